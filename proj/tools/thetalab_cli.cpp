// thetalab command line: file formats in, JSON/CSV artifacts out.
// exit 0 ok, 1 a check failed, 2 validation / singular locus / other errors
#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "thetalab/io.hpp"
#include "thetalab/laurent.hpp"

using namespace thetalab;
using io::json;

namespace {

double default_tol(double module_default) {
  if (const char* env = std::getenv("THETALAB_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0)) throw io::FormatError("THETALAB_TOL is not a positive number");
    return v;
  }
  return module_default;
}

std::pair<double, double> parse_pair(const std::string& s, const char* what) {
  std::istringstream in(s);
  double a = 0, b = 0;
  char comma = 0;
  if (!(in >> a >> comma >> b) || comma != ',' || !in.eof())
    throw io::FormatError(std::string("--") + what + " expects 're,im'");
  return {a, b};
}

std::vector<long long> parse_ints(const std::string& s) {
  std::vector<long long> out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stoll(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw io::FormatError("expected a comma separated integer list, got '" + s + "'");
    }
  }
  return out;
}

// inline object, or a path relative to base
json json_ref(const json& j, const std::filesystem::path& base) {
  if (j.is_string()) {
    std::filesystem::path p = j.get<std::string>();
    if (p.is_relative()) p = base / p;
    return io::read_json_file(p.string());
  }
  return j;
}

void emit(const json& j, const std::string& out) {
  if (out.empty())
    std::cout << io::dump(j);
  else
    io::write_json_file(out, j);
}

json config_json(int workers, double tol) { return {{"workers", workers}, {"tol", tol}}; }

// ---- fqm

json weil_relations(const Lattice& lat) {
  WeilRep w = make_weil_rep(lat);
  const DiscriminantForm& d = *w.disc;
  const auto n = static_cast<Eigen::Index>(d.order());
  CMatrix S = weil_generator(w, 'S'), T = weil_generator(w, 'T');
  CMatrix Z = CMatrix::Zero(n, n);
  for (Eigen::Index h = 0; h < n; ++h) Z(static_cast<Eigen::Index>(d.neg(static_cast<size_t>(h))), h) = 1.0;
  // rho(S)^2 = i^{q-p} (h -> -h)
  const cplx c = std::pow(cplx(0, 1), static_cast<double>(((lat.q - lat.p) % 4 + 4) % 4));
  CMatrix ST = S * T;
  const double r_s2 = (S * S - c * Z).cwiseAbs().maxCoeff();
  const double r_st3 = (ST * ST * ST - S * S).cwiseAbs().maxCoeff();
  const double r_unit = std::max((S.adjoint() * S - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff(),
                                 (T.adjoint() * T - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
  return {{"S2", r_s2}, {"ST3", r_st3}, {"unitary", r_unit}};
}

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(io::complex_to_json(m(i, k)));
    rows.push_back(r);
  }
  return rows;
}

// ---- verify

struct Check {
  std::string name;
  bool pass;
  json detail;
};

std::vector<Check> run_verify(const std::string& level, int workers) {
  const bool full = level == "full";
  std::vector<Check> out;
  auto timed = [&](const std::string& name, auto&& body) {
    auto t0 = std::chrono::steady_clock::now();
    Check c{name, false, json::object()};
    try {
      body(c);
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail["exception"] = e.what();
    }
    c.detail["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(c));
  };

  const std::vector<std::pair<std::string, IntMatrix>> lats{
      {"U", {{0, 1}, {1, 0}}},
      {"[2]", {{2}}},
      {"A2", {{2, -1}, {-1, 2}}},
      {"U+U", lattice_UU().gram},
      {"diag(2,2,-2)", {{2, 0, 0}, {0, 2, 0}, {0, 0, -2}}}};
  for (const auto& [name, g] : lats)
    timed("weil " + name, [&](Check& c) {
      c.detail = weil_relations(make_lattice(g, name));
      c.pass = c.detail["S2"].get<double>() < 1e-12 && c.detail["ST3"].get<double>() < 1e-12 &&
               c.detail["unitary"].get<double>() < 1e-12;
    });

  timed("pairing Delta vs E4^2 E6 / Delta^2", [&](Check& c) {
    mpq_class v = pairing_exact(classic_laurent("Delta", 8), classic_laurent("E4sqE6_over_DeltaSq", 8));
    c.detail["value"] = v.get_str();
    c.pass = v == 0;
  });

  const int max_rank = full ? 7 : 5;
  timed("fock identities", [&](Check& c) {
    json fails = json::array();
    size_t count = 0;
    for (int n = 2; n <= max_rank; ++n)
      for (int q = 1; q < n; ++q) {
        const int p = n - q;
        for (const auto& id : identity_names()) {
          if (id == "ddc" && (q != 2 || p > 5)) continue;
          IdentityReport r = verify_identity(id, p, q);
          ++count;
          if (!r.pass) fails.push_back({{"identity", id}, {"sig", {p, q}}, {"diff_term_count", r.diff_term_count}});
        }
      }
    c.detail = {{"checked", count}, {"max_rank", max_rank}, {"failures", fails}};
    c.pass = fails.empty();
  });

  timed("theta modularity U+U", [&](Check& c) {
    Lattice U = lattice_UU();
    DiscriminantForm d(U);
    auto z = grassmann_from_h2(U, {0.2, 1.1}, {-0.3, 0.8});
    ThetaOptions o;
    o.tol = 1e-10;
    o.workers = workers;
    double worst = 0;
    for (const char* k : {"phi0", "phikm", "psi"})
      for (char g : {'S', 'T'}) worst = std::max(worst, modularity_residual(make_kernel(k, 2, 2), d, {0.1, 0.9}, z, g, o));
    c.detail["max_residual"] = worst;
    c.pass = worst < 1e-8;
  });

  if (full) {
    timed("lift j-744 against log|j(z1)-j(z2)|", [&](Check& c) {
      Lattice U = lattice_UU();
      auto f = weakly_holomorphic(classic_series("j_minus_744", 60));
      LiftOptions o;
      o.tol = 1e-8;
      o.workers = workers;
      double worst = 0;
      for (auto [z1, z2] : {std::pair<cplx, cplx>{{0.1, 1.3}, {-0.2, 0.9}}, {{0.3, 2.0}, {0.05, 1.1}}}) {
        const double v = lift_phi0(f, grassmann_from_h2(U, z1, z2), o).value();
        worst = std::max(worst, std::abs(v + 4.0 * std::log(std::abs(klein_j(z1) - klein_j(z2)))));
      }
      c.detail["max_deviation"] = worst;
      c.pass = worst < 1e-6;
    });
  }
  return out;
}

// ---- lift scan

struct Fit {
  double c1, c2, r2;
};

Fit fit_log(const std::vector<double>& t, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = std::log(t[static_cast<size_t>(i)]);
    b(i) = y[static_cast<size_t>(i)];
  }
  Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  const double mean = b.mean();
  const double ss_res = (A * c - b).squaredNorm(), ss_tot = (b.array() - mean).matrix().squaredNorm();
  return {c(0), c(1), ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thetalab: Weil representations, weak Maass forms and regularized theta lifts"};
  app.require_subcommand(1);
  int workers = 1;
  app.add_option("--workers", workers, "worker threads")->check(CLI::Range(1, 256));
  app.set_version_flag("--version", io::build_id());

  std::string lattice_path, out_path, f_path, g_path, point_path, name, kernel_name, tau_s, identity, sig_s, word,
      eta_s, seed_s, level = "quick", geodesic_path, rep_kind = "dual";
  double tol = 0;
  int prec = 20, samples = 20;
  bool dual = false, prime = false;

  auto* fqm = app.add_subcommand("fqm", "discriminant forms and Weil representation");
  fqm->require_subcommand(1);
  auto* fqm_info = fqm->add_subcommand("info", "discriminant report");
  fqm_info->add_option("--lattice", lattice_path)->required();
  fqm_info->add_option("--out", out_path);
  auto* fqm_weil = fqm->add_subcommand("weil", "Weil representation matrices and relation residuals");
  fqm_weil->add_option("--lattice", lattice_path)->required();
  fqm_weil->add_flag("--dual", dual);
  fqm_weil->add_option("--word", word, "S/T word, lowercase for inverses");
  fqm_weil->add_option("--out", out_path);

  auto* series = app.add_subcommand("series", "input q-series");
  series->require_subcommand(1);
  auto* classic = series->add_subcommand("classic", "named scalar series as a form file");
  classic->add_option("--name", name, "E4, E6, Delta, j, j_minus_744, E4sqE6_over_DeltaSq")->required();
  classic->add_option("--prec", prec)->check(CLI::Range(1, 2000));
  classic->add_option("--out", out_path);
  auto* induce = series->add_subcommand("induce", "induce eta^r E4^a E6^b Delta^c to a Weil representation");
  induce->add_option("--lattice", lattice_path)->required();
  induce->add_option("--eta", eta_s, "r,a,b,c")->required();
  induce->add_option("--seed", seed_s, "coset residues of the seed vector")->required();
  induce->add_option("--rep", rep_kind)->check(CLI::IsMember({"dual", "plain"}));
  induce->add_option("--prec", prec)->check(CLI::Range(1, 2000));
  induce->add_option("--out", out_path);

  auto* pair = app.add_subcommand("pair", "pairing {g, f}");
  pair->add_option("--g", g_path)->required();
  pair->add_option("--f", f_path)->required();
  pair->add_flag("--prime", prime, "omit the constant term");

  auto* fock = app.add_subcommand("fock", "Fock model identities");
  fock->require_subcommand(1);
  auto* fverify = fock->add_subcommand("verify", "exact identity check");
  fverify->add_option("--sig", sig_s, "p,q")->required();
  fverify->add_option("--identity", identity)->required();

  auto* theta = app.add_subcommand("theta", "theta series");
  theta->require_subcommand(1);
  auto* teval = theta->add_subcommand("eval", "evaluate Theta at (tau, z)");
  teval->add_option("--lattice", lattice_path)->required();
  teval->add_option("--phi", kernel_name)->required()->check(CLI::IsMember({"phi0", "phikm", "psi", "ddcphi0"}));
  teval->add_option("--tau", tau_s, "re,im")->required();
  teval->add_option("--point", point_path)->required();
  teval->add_option("--tol", tol);
  teval->add_option("--out", out_path);

  auto* lift = app.add_subcommand("lift", "regularized theta lift");
  lift->require_subcommand(1);
  auto* leval = lift->add_subcommand("eval", "evaluate the lift at a point");
  leval->add_option("--lattice", lattice_path)->required();
  leval->add_option("--f", f_path)->required();
  leval->add_option("--point", point_path)->required();
  leval->add_option("--kernel", kernel_name)->required()->check(CLI::IsMember({"phi0", "psi"}));
  leval->add_option("--tol", tol);
  leval->add_option("--out", out_path);
  auto* lscan = lift->add_subcommand("scan", "lift along a path, CSV out");
  lscan->add_option("--geodesic", geodesic_path)->required();
  lscan->add_option("--samples", samples)->check(CLI::Range(2, 100000));
  lscan->add_option("--out", out_path)->required();
  lscan->add_option("--tol", tol);

  auto* verify = app.add_subcommand("verify", "orchestrated checks");
  verify->add_option("--level", level)->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cout << io::dump(io::error_json("usage", e.what()));
    return 2;
  }

  try {
    if (fqm_info->parsed()) {
      Lattice lat = io::lattice_from_json(io::read_json_file(lattice_path));
      json j = io::discriminant_report(DiscriminantForm(lat));
      j["signature"] = {lat.p, lat.q};
      emit(j, out_path);
    } else if (fqm_weil->parsed()) {
      Lattice lat = io::lattice_from_json(io::read_json_file(lattice_path));
      WeilRep w = make_weil_rep(lat, dual);
      json j{{"dual", dual}, {"relations", weil_relations(lat)}, {"build", io::build_id()}};
      if (word.empty()) {
        j["S"] = matrix_json(weil_generator(w, 'S'));
        j["T"] = matrix_json(weil_generator(w, 'T'));
      } else {
        MetaplecticWord mw = MetaplecticWord::parse(word);
        j["word"] = mw.str();
        j["matrix"] = matrix_json(weil_element(w, mw));
      }
      emit(j, out_path);
    } else if (classic->parsed()) {
      emit(io::series_to_json(classic_series(name, prec)), out_path);
    } else if (induce->parsed()) {
      Lattice lat = io::lattice_from_json(io::read_json_file(lattice_path));
      auto e = parse_ints(eta_s);
      if (e.size() != 4) throw io::FormatError("--eta expects r,a,b,c");
      WeilRep w = make_weil_rep(lat, rep_kind == "dual");
      const size_t h0 = w.disc->index(parse_ints(seed_s));
      ScalarForm s = eta_quotient_form(static_cast<int>(e[0]), static_cast<int>(e[1]), static_cast<int>(e[2]),
                                       static_cast<int>(e[3]), prec);
      emit(io::series_to_json(induce_from_scalar(s, w, h0)), out_path);
    } else if (pair->parsed()) {
      VVSeries g = io::series_from_json(io::read_json_file(g_path));
      WeakMaassForm f = io::form_from_json(io::read_json_file(f_path));
      const cplx v = prime ? pairing_prime(g, f) : pairing(g, f);
      emit({{"value", io::complex_to_json(v)}, {"build", io::build_id()}}, out_path);
    } else if (fverify->parsed()) {
      auto s = parse_ints(sig_s);
      if (s.size() != 2) throw io::FormatError("--sig expects p,q");
      IdentityReport r = verify_identity(identity, static_cast<int>(s[0]), static_cast<int>(s[1]));
      emit({{"identity", r.name},
            {"sig", {r.p, r.q}},
            {"pass", r.pass},
            {"diff_term_count", r.diff_term_count},
            {"build", io::build_id()}},
           out_path);
      return r.pass ? 0 : 1;
    } else if (teval->parsed()) {
      Lattice lat = io::lattice_from_json(io::read_json_file(lattice_path));
      GrassmannPoint z = io::point_from_json(lat, io::read_json_file(point_path));
      auto [re, im] = parse_pair(tau_s, "tau");
      ThetaOptions o;
      o.tol = tol > 0 ? tol : default_tol(1e-8);
      o.workers = workers;
      ThetaKernel k = make_kernel(kernel_name, lat.p, lat.q);
      DiscriminantForm d(lat);
      json j = io::theta_value_to_json(theta_eval(k, d, {re, im}, z, o), d, k, {re, im});
      j["build"] = io::build_id();
      j["config"] = config_json(workers, o.tol);
      emit(j, out_path);
    } else if (leval->parsed()) {
      Lattice lat = io::lattice_from_json(io::read_json_file(lattice_path));
      GrassmannPoint z = io::point_from_json(lat, io::read_json_file(point_path));
      WeakMaassForm f = io::form_from_json(io::read_json_file(f_path));
      LiftOptions o;
      o.tol = tol > 0 ? tol : default_tol(1e-6);
      o.workers = workers;
      json j = io::lift_value_to_json(lift_eval(make_kernel(kernel_name, lat.p, lat.q), f, z, o));
      j["build"] = io::build_id();
      j["config"] = config_json(workers, o.tol);
      emit(j, out_path);
    } else if (lscan->parsed()) {
      const std::filesystem::path base = std::filesystem::path(geodesic_path).parent_path();
      json spec = io::read_json_file(geodesic_path);
      Lattice lat = io::lattice_from_json(json_ref(spec.at("lattice"), base));
      WeakMaassForm f = io::form_from_json(json_ref(spec.at("f"), base));
      const std::string kname = spec.value("kernel", std::string("phi0"));
      const double tmin = spec.value("tmin", 1e-3), tmax = spec.value("tmax", 1e-1);
      if (!(tmin > 0) || !(tmax > tmin)) throw io::FormatError("need 0 < tmin < tmax");
      const bool log_spacing = spec.value("log_spacing", true);
      const json& path = spec.at("path");
      std::function<GrassmannPoint(double)> at;
      if (path.contains("h2")) {
        const json& h = path.at("h2");
        auto z1 = h.at("z1").get<std::vector<double>>(), z2 = h.at("z2").get<std::vector<double>>(),
             dir = h.at("direction").get<std::vector<double>>();
        if (z1.size() != 2 || z2.size() != 2 || dir.size() != 2) throw io::FormatError("h2 path entries are [re, im]");
        at = [=](double t) { return grassmann_from_h2(lat, {z1[0], z1[1]}, cplx(z2[0], z2[1]) + t * cplx(dir[0], dir[1])); };
      } else if (path.contains("flow")) {
        const json& fl = path.at("flow");
        GrassmannPoint start = io::point_from_json(lat, fl.at("start"));
        const int a = fl.at("alpha").get<int>(), m = fl.at("mu").get<int>();
        at = [=](double t) { return flow(start, a, m, t); };
      } else {
        throw io::FormatError("path needs 'h2' or 'flow'");
      }
      LiftOptions o;
      o.tol = tol > 0 ? tol : default_tol(1e-6);
      o.workers = workers;
      ThetaKernel k = make_kernel(kname, lat.p, lat.q);
      std::vector<std::vector<double>> rows;
      std::vector<double> ts, vs;
      for (int i = 0; i < samples; ++i) {
        const double s = static_cast<double>(i) / (samples - 1);
        const double t = log_spacing ? tmin * std::pow(tmax / tmin, s) : tmin + s * (tmax - tmin);
        LiftValue v = lift_eval(k, f, at(t), o);
        rows.push_back({t, v.value(), v.error});
        ts.push_back(t);
        vs.push_back(v.value());
      }
      std::ofstream csv(out_path);
      if (!csv) throw std::runtime_error("cannot write '" + out_path + "'");
      io::write_csv(csv, {"t", "value", "error"}, rows);
      Fit fit = fit_log(ts, vs);
      std::cout << io::dump({{"fit", {{"c1", fit.c1}, {"c2", fit.c2}, {"r2", fit.r2}}},
                             {"samples", samples},
                             {"csv", out_path},
                             {"build", io::build_id()},
                             {"config", config_json(workers, o.tol)}});
    } else if (verify->parsed()) {
      auto checks = run_verify(level, workers);
      json list = json::array();
      bool all = true;
      for (const auto& c : checks) {
        list.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        all = all && c.pass;
      }
      emit({{"level", level}, {"pass", all}, {"checks", list}, {"build", io::build_id()}, {"config", config_json(workers, 0)}},
           out_path);
      return all ? 0 : 1;
    }
  } catch (const SingularLocusError& e) {
    json j = io::error_json("singular_locus", e.what());
    j["report"] = io::singular_report_to_json(e.report);
    std::cout << io::dump(j);
    return 2;
  } catch (const io::FormatError& e) {
    std::cout << io::dump(io::error_json("format", e.what()));
    return 2;
  } catch (const json::exception& e) {
    std::cout << io::dump(io::error_json("format", e.what()));
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cout << io::dump(io::error_json("validation", e.what()));
    return 2;
  } catch (const std::exception& e) {
    std::cout << io::dump(io::error_json("runtime", e.what()));
    return 2;
  }
  return 0;
}
