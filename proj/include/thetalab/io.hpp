#pragma once
// JSON and CSV formats for lattices, forms, points and evaluation results.
#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

#include "thetalab/fqm.hpp"
#include "thetalab/grassmann.hpp"
#include "thetalab/lift.hpp"
#include "thetalab/qseries.hpp"
#include "thetalab/theta.hpp"

namespace thetalab::io {

using json = nlohmann::json;

// Thrown by every reader on malformed input.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string build_id();

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);
// Two-space indented dump followed by a newline; the only dump used for artifacts.
std::string dump(const json& j);

json rational_to_json(const Rational& r);
Rational rational_from_json(const json& j);
json complex_to_json(cplx z);
cplx complex_from_json(const json& j);

json lattice_to_json(const Lattice& lat);
Lattice lattice_from_json(const json& j);
json discriminant_report(const DiscriminantForm& d);

json rep_to_json(const WeilRep& w);
WeilRep rep_from_json(const json& j);

json form_to_json(const WeakMaassForm& f);
WeakMaassForm form_from_json(const json& j);
// A series is a form with an empty minus table.
json series_to_json(const VVSeries& s);
VVSeries series_from_json(const json& j);

// {"frame": [[..]]} in lattice coordinates, or {"h2": {"z1": [re, im], "z2": [re, im]}} for U + U,
// or {"group": [[..]]} for an isometry applied to the base point.
json point_to_json(const GrassmannPoint& z);
GrassmannPoint point_from_json(const Lattice& lat, const json& j);

json wedges_to_json(const std::vector<FockForm::Wedge>& w, int p, int q);
std::vector<FockForm::Wedge> wedges_from_json(const json& j);

json theta_value_to_json(const ThetaValue& v, const DiscriminantForm& d, const ThetaKernel& k, cplx tau);
ThetaValue theta_value_from_json(const json& j);

json lift_value_to_json(const LiftValue& v);
LiftValue lift_value_from_json(const json& j);

json form_value_to_json(const FormValue& v);
FormValue form_value_from_json(const json& j);

json singular_report_to_json(const SingularLocusReport& r);
json error_json(const std::string& kind, const std::string& message);

// Plot-ready CSV; doubles printed with 17 significant digits.
void write_csv(std::ostream& os, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

}  // namespace thetalab::io
