#include "thetalab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#ifndef THETALAB_BUILD_ID
#define THETALAB_BUILD_ID "unknown"
#endif

namespace thetalab::io {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get_as(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("field '") + what + "' has the wrong type");
  }
}

IntMatrix int_matrix(const json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string("'") + what + "' must be an array of rows");
  IntMatrix m;
  for (const auto& row : j) {
    if (!row.is_array()) throw FormatError(std::string("'") + what + "' must be an array of rows");
    std::vector<long long> r;
    for (const auto& x : row) {
      if (!x.is_number_integer()) throw FormatError(std::string("'") + what + "' entries must be integers");
      r.push_back(x.get<long long>());
    }
    m.push_back(std::move(r));
  }
  return m;
}

json real_matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(row);
  }
  return out;
}

Eigen::MatrixXd real_matrix(const json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string("'") + what + "' must be an array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = j[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw FormatError(std::string("'") + what + "' must be square");
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!row[static_cast<size_t>(k)].is_number()) throw FormatError(std::string("'") + what + "' entries must be numbers");
      m(i, k) = row[static_cast<size_t>(k)].get<double>();
    }
  }
  return m;
}

json residues_json(const DiscriminantForm& d, size_t h) { return d.residues(h); }

size_t residues_index(const DiscriminantForm& d, const json& j) {
  auto r = get_as<std::vector<long long>>(j, "h");
  if (r.size() != d.invariants().size()) throw FormatError("coset label has the wrong length");
  try {
    return d.index(r);
  } catch (const std::exception& e) {
    throw FormatError(std::string("bad coset label: ") + e.what());
  }
}

json table_to_json(const CoeffTable& t, const DiscriminantForm& d) {
  json out = json::array();
  for (const auto& [idx, c] : t)
    out.push_back({{"h", residues_json(d, idx.h)}, {"n", idx.n.str()}, {"re", c.real()}, {"im", c.imag()}});
  return out;
}

CoeffTable table_from_json(const json& j, const WeilRep& rep) {
  if (!j.is_array()) throw FormatError("coefficient table must be an array");
  CoeffTable t;
  for (const auto& e : j) {
    const size_t h = residues_index(*rep.disc, field(e, "h"));
    const Rational n = rational_from_json(field(e, "n"));
    if (!index_compatible(rep, h, n)) throw FormatError("coefficient index violates n = +-q(h) mod 1");
    const double re = get_as<double>(field(e, "re"), "re"), im = get_as<double>(field(e, "im"), "im");
    t[CoeffIndex{h, n}] = cplx(re, im);
  }
  return t;
}

}  // namespace

std::string build_id() { return THETALAB_BUILD_ID; }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("malformed JSON in '" + path + "': " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << dump(j);
}

json rational_to_json(const Rational& r) { return r.str(); }

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (!j.is_string()) throw FormatError("rational must be a string \"a/b\"");
  try {
    return Rational::parse(j.get<std::string>());
  } catch (const std::exception& e) {
    throw FormatError(std::string("bad rational: ") + e.what());
  }
}

json complex_to_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

cplx complex_from_json(const json& j) {
  return {get_as<double>(field(j, "re"), "re"), get_as<double>(field(j, "im"), "im")};
}

json lattice_to_json(const Lattice& lat) {
  json j{{"gram", lat.gram}};
  if (!lat.name.empty()) j["name"] = lat.name;
  return j;
}

Lattice lattice_from_json(const json& j) {
  IntMatrix g = int_matrix(field(j, "gram"), "gram");
  std::string name = j.contains("name") ? get_as<std::string>(j.at("name"), "name") : "";
  try {
    return make_lattice(g, name);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

json discriminant_report(const DiscriminantForm& d) {
  json table = json::array();
  for (size_t h = 0; h < d.order(); ++h) table.push_back({{"h", d.residues(h)}, {"q", d.q(h).str()}});
  return {{"invariants", d.invariants()}, {"order", d.order()}, {"level", d.level()}, {"q_table", table}};
}

json rep_to_json(const WeilRep& w) {
  return {{"gram", w.disc->lattice().gram}, {"dual", w.dual}, {"sig", {w.p, w.q}}};
}

WeilRep rep_from_json(const json& j) {
  IntMatrix g = int_matrix(field(j, "gram"), "gram");
  const bool dual = j.contains("dual") ? get_as<bool>(j.at("dual"), "dual") : false;
  try {
    if (g.empty()) {
      auto sig = get_as<std::vector<int>>(field(j, "sig"), "sig");
      if (sig.size() != 2) throw FormatError("'sig' must be [p, q]");
      WeilRep w = trivial_weil_rep(sig[0], sig[1]);
      w.dual = dual;
      return w;
    }
    return make_weil_rep(make_lattice(g), dual);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

json form_to_json(const WeakMaassForm& f) {
  const DiscriminantForm& d = *f.rep.disc;
  return {{"weight", f.weight.str()},     {"rep", rep_to_json(f.rep)},         {"plus", table_to_json(f.plus, d)},
          {"minus", table_to_json(f.minus, d)}, {"class", to_string(f.cls)}, {"prec", f.prec.str()}};
}

WeakMaassForm form_from_json(const json& j) {
  WeakMaassForm f;
  f.weight = rational_from_json(field(j, "weight"));
  f.rep = rep_from_json(field(j, "rep"));
  f.plus = table_from_json(field(j, "plus"), f.rep);
  f.minus = j.contains("minus") ? table_from_json(j.at("minus"), f.rep) : CoeffTable{};
  try {
    f.cls = j.contains("class") ? form_class_from_string(get_as<std::string>(j.at("class"), "class"))
                                : FormClass::weakly_holomorphic;
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  f.prec = rational_from_json(field(j, "prec"));
  try {
    f.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return f;
}

json series_to_json(const VVSeries& s) {
  return form_to_json(WeakMaassForm{s.weight, s.rep, s.coeffs, {}, FormClass::weakly_holomorphic, s.prec});
}

VVSeries series_from_json(const json& j) {
  WeakMaassForm f = form_from_json(j);
  if (!f.minus.empty()) throw FormatError("a series must have an empty minus table");
  VVSeries s{f.weight, f.rep, f.plus, f.prec};
  return s;
}

json point_to_json(const GrassmannPoint& z) {
  return {{"gram", z.gram_int}, {"sig", {z.p, z.q}}, {"frame", real_matrix_to_json(z.frame)}};
}

GrassmannPoint point_from_json(const Lattice& lat, const json& j) {
  if (j.contains("gram") && int_matrix(j.at("gram"), "gram") != lat.gram)
    throw FormatError("point was written for a different lattice");
  try {
    if (j.contains("frame")) {
      Eigen::MatrixXd f = real_matrix(j.at("frame"), "frame");
      // a frame written by this library is already orthonormal up to rounding
      return grassmann_from_frame(lat, f, 1e-8);
    }
    if (j.contains("group")) return grassmann_from_group(lat, real_matrix(j.at("group"), "group"), 1e-8);
    if (j.contains("h2")) {
      const json& h = j.at("h2");
      auto z1 = get_as<std::vector<double>>(field(h, "z1"), "z1"), z2 = get_as<std::vector<double>>(field(h, "z2"), "z2");
      if (z1.size() != 2 || z2.size() != 2) throw FormatError("z1, z2 must be [re, im]");
      return grassmann_from_h2(lat, {z1[0], z1[1]}, {z2[0], z2[1]});
    }
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  throw FormatError("point needs one of 'frame', 'group', 'h2'");
}

json wedges_to_json(const std::vector<FockForm::Wedge>& w, int p, int q) {
  json out = json::array();
  for (auto x : w) out.push_back({{"bits", x}, {"label", wedge_label(x, p, q)}});
  return out;
}

std::vector<FockForm::Wedge> wedges_from_json(const json& j) {
  if (!j.is_array()) throw FormatError("wedges must be an array");
  std::vector<FockForm::Wedge> w;
  for (const auto& e : j) w.push_back(get_as<FockForm::Wedge>(field(e, "bits"), "bits"));
  return w;
}

json theta_value_to_json(const ThetaValue& v, const DiscriminantForm& d, const ThetaKernel& k, cplx tau) {
  json comps = json::array();
  for (size_t h = 0; h < v.components.size(); ++h) {
    json vals = json::array();
    for (cplx c : v.components[h]) vals.push_back(complex_to_json(c));
    comps.push_back({{"h", d.residues(h)}, {"values", vals}});
  }
  return {{"kind", "theta"},
          {"kernel", k.name},
          {"sig", {k.p, k.q}},
          {"weight", k.weight.str()},
          {"tau", complex_to_json(tau)},
          {"wedges", wedges_to_json(v.wedges, k.p, k.q)},
          {"components", comps},
          {"error_bound", v.error_bound},
          {"radius", v.radius},
          {"vector_count", v.vector_count}};
}

ThetaValue theta_value_from_json(const json& j) {
  ThetaValue v;
  v.wedges = wedges_from_json(field(j, "wedges"));
  for (const auto& c : field(j, "components")) {
    std::vector<cplx> row;
    for (const auto& x : field(c, "values")) row.push_back(complex_from_json(x));
    if (row.size() != v.wedges.size()) throw FormatError("component row does not match the wedge list");
    v.components.push_back(std::move(row));
  }
  v.error_bound = get_as<double>(field(j, "error_bound"), "error_bound");
  v.radius = get_as<double>(field(j, "radius"), "radius");
  v.vector_count = get_as<size_t>(field(j, "vector_count"), "vector_count");
  return v;
}

json lift_value_to_json(const LiftValue& v) {
  json comps = json::array();
  for (cplx c : v.components) comps.push_back(complex_to_json(c));
  return {{"kind", "lift"},
          {"is_form", v.is_form},
          {"sig", {v.p, v.q}},
          {"wedges", wedges_to_json(v.wedges, v.p, v.q)},
          {"components", comps},
          {"error", v.error},
          {"regularization_constant", v.regularization_constant},
          {"compact_part", v.compact_part},
          {"quadrature_level", v.quadrature_level},
          {"radius", v.radius},
          {"vector_count", v.vector_count}};
}

LiftValue lift_value_from_json(const json& j) {
  LiftValue v;
  v.is_form = get_as<bool>(field(j, "is_form"), "is_form");
  auto sig = get_as<std::vector<int>>(field(j, "sig"), "sig");
  if (sig.size() != 2) throw FormatError("'sig' must be [p, q]");
  v.p = sig[0];
  v.q = sig[1];
  v.wedges = wedges_from_json(field(j, "wedges"));
  for (const auto& c : field(j, "components")) v.components.push_back(complex_from_json(c));
  if (v.components.size() != v.wedges.size()) throw FormatError("components do not match the wedge list");
  v.error = get_as<double>(field(j, "error"), "error");
  v.regularization_constant = get_as<double>(field(j, "regularization_constant"), "regularization_constant");
  v.compact_part = get_as<double>(field(j, "compact_part"), "compact_part");
  v.quadrature_level = get_as<int>(field(j, "quadrature_level"), "quadrature_level");
  v.radius = get_as<double>(field(j, "radius"), "radius");
  v.vector_count = get_as<size_t>(field(j, "vector_count"), "vector_count");
  return v;
}

json form_value_to_json(const FormValue& v) {
  return {{"kind", "form"},
          {"sig", {v.p, v.q}},
          {"wedges", wedges_to_json(v.wedges, v.p, v.q)},
          {"components", v.components},
          {"error", v.error}};
}

FormValue form_value_from_json(const json& j) {
  FormValue v;
  auto sig = get_as<std::vector<int>>(field(j, "sig"), "sig");
  if (sig.size() != 2) throw FormatError("'sig' must be [p, q]");
  v.p = sig[0];
  v.q = sig[1];
  v.wedges = wedges_from_json(field(j, "wedges"));
  v.components = get_as<std::vector<double>>(field(j, "components"), "components");
  if (v.components.size() != v.wedges.size()) throw FormatError("components do not match the wedge list");
  v.error = get_as<double>(field(j, "error"), "error");
  return v;
}

json singular_report_to_json(const SingularLocusReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"h", e.h}, {"n", e.n.str()}, {"lambda", e.lambda}, {"q_z", e.q_z}, {"dist", e.dist}});
  return {{"eps", r.eps}, {"entries", entries}};
}

json error_json(const std::string& kind, const std::string& message) {
  return {{"error", {{"kind", kind}, {"message", message}}}, {"build", build_id()}};
}

void write_csv(std::ostream& os, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  char buf[40];
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", r[i]);
      os << (i ? "," : "") << buf;
    }
    os << "\n";
  }
}

}  // namespace thetalab::io
