// scno: command-line front end.
//
//   scno classify  FILE --point 1,0 [--y 0,1]
//   scno analyze   FILE [--perturb 0.1 --seed 7]
//   scno topology  P Q | --sweep PMAX
//   scno levelset  FILE [--level A ...]
//   scno perturb   FILE --perturb EPS --seed N
//
// Exit status: 0 analysis completed, 2 input error, 3 numeric failure.

#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scno/errors.hpp"
#include "scno/io.hpp"

namespace {

using scno::Json;

std::vector<double> parse_vector(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw scno::InputError(std::string("empty entry in ") + what);
    out.push_back(scno::parse_rational(item.substr(b, e - b + 1)).get_d());
  }
  if (out.empty()) throw scno::InputError(std::string(what) + " is empty");
  return out;
}

std::string fmt(const Json& v) {
  if (v.is_null()) return "-";
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  if (v.is_number_float()) {
    std::ostringstream os;
    os << std::setprecision(10) << v.get<double>();
    return os.str();
  }
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + ")";
  }
  return v.dump();
}

void print_point_text(std::ostream& os, const Json& pr) {
  const Json& st = pr["stationarity"];
  os << "point " << fmt(st["point"]) << "  f = " << fmt(st["value"]) << "\n";
  os << "  feasible " << fmt(st["feasible"]) << ", k = " << fmt(st["k"]) << ", M-stationary "
     << fmt(st["m_stationary"]) << "\n";
  os << "  ND1 " << fmt(st["nd1"]) << ", ND2 " << fmt(st["nd2"]) << ", QI " << fmt(st["qi"]) << ", M-index "
     << fmt(st["m_index"]) << ", class " << fmt(st["class"]) << "\n";
  os << "  BF-vector " << fmt(pr["bf_vector"]) << ", CW-minimum " << fmt(pr["cw_minimum"])
     << ", sampled local min " << fmt(pr["local_min_sampled"]) << "\n";
  const Json& rx = pr["relaxation"];
  if (rx.is_null()) return;
  os << "  relaxation at y = " << fmt(rx["y"]) << ": S-stationary " << fmt(rx["s_stationary"]) << ", LICQ "
     << fmt(rx["licq"]) << ", KKT " << fmt(rx["kkt"]) << ", strict complementarity "
     << fmt(rx["strict_complementarity"]) << ", CC-SOSC " << fmt(rx["cc_sosc"]) << "\n";
  for (const Json& a : rx["active"])
    os << "    " << std::left << std::setw(16) << a["constraint"].get<std::string>() << " multiplier "
       << fmt(a["multiplier"]) << "\n";
}

void print_curve_text(std::ostream& os, const Json& curve) {
  os << "  level            q  boundary\n";
  for (std::size_t i = 0; i < curve["levels"].size(); ++i)
    os << "  " << std::left << std::setw(16) << fmt(curve["levels"][i]) << " " << std::setw(2)
       << fmt(curve["q"][i]) << " " << fmt(curve["touches_boundary"][i]) << "\n";
}

void print_analysis_text(std::ostream& os, const Json& rep) {
  os << "problem n = " << rep["problem"]["n"] << ", s = " << rep["problem"]["s"] << "\n";
  os << "f = " << rep["problem"]["objective"]["expression"].get<std::string>() << "\n\n";
  for (const Json& p : rep["points"]) print_point_text(os, p);
  const Json& m = rep["morse"];
  os << "\nr = " << m["r"] << ", r_I = " << m["r_I"] << ", r_II = " << m["r_II"] << ", n-s = " << m["n_minus_s"]
     << "\n";
  os << "relation " << m["relation_lhs"] << " >= " << m["relation_rhs"] << ": " << fmt(m["relation_holds"])
     << " (verdict " << fmt(m["verdict"]) << ")\n";
  print_curve_text(os, m["curve"]);
  for (const Json& w : m["warnings"]) os << "warning: " << w.get<std::string>() << "\n";
}

void print_topology_text(std::ostream& os, const Json& rep) {
  os << " p  q  cells  expected  count  acyclic  minimal  collapsible  mod2\n";
  for (const Json& r : rep["rows"]) {
    os << std::right << std::setw(2) << fmt(r["p"]) << " " << std::setw(2) << fmt(r["q"]) << " " << std::setw(6)
       << fmt(r["cell_count"]) << " " << std::setw(9) << fmt(r["expected_count"]) << "  " << std::setw(5)
       << fmt(r["count_ok"]) << "  " << std::setw(7) << fmt(r["contractible_ok"]) << "  " << std::setw(7)
       << fmt(r["minimal_ok"]) << "  " << std::setw(11) << fmt(r["collapsible"]) << "  " << std::setw(4)
       << fmt(r["mod2_agrees"]) << "\n";
  }
  os << "all ok: " << fmt(rep["all_ok"]) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analysis of sparsity constrained polynomial optimization problems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", scno::kToolVersion);

  std::optional<double> tol_zero_entry, tol_grad_zero, tol_eig_zero, tol_dedupe;
  int resolution = 41;
  int starts = 5;
  std::optional<std::string> perturb;
  std::uint64_t seed = 0;
  std::string format = "json";
  app.add_option("--tol-zero-entry", tol_zero_entry, "entries at or below this count as zero");
  app.add_option("--tol-grad-zero", tol_grad_zero, "gradient entries at or below this count as zero");
  app.add_option("--tol-eig-zero", tol_eig_zero, "restricted Hessian eigenvalues treated as singular");
  app.add_option("--tol-dedupe", tol_dedupe, "radius for merging stationary points");
  app.add_option("--resolution", resolution, "level-set grid points per axis")->check(CLI::Range(2, 1000));
  app.add_option("--starts", starts, "Newton starts per support dimension")->check(CLI::Range(1, 1000));
  app.add_option("--perturb", perturb, "perturbation size, exact decimal or p/q");
  app.add_option("--seed", seed, "perturbation seed");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "text"}));

  std::string file;
  std::string point_text;
  std::optional<std::string> y_text;
  double radius = 0.1;
  int samples = 2000;

  auto* classify = app.add_subcommand("classify", "classify one point");
  classify->fallthrough();
  classify->add_option("file", file, "problem file")->required();
  classify->add_option("--point", point_text, "comma-separated coordinates")->required();
  classify->add_option("--y", y_text, "auxiliary variables of the relaxation (default canonical)");
  classify->add_option("--radius", radius, "sampling radius of the local-minimum test")
      ->check(CLI::PositiveNumber);
  classify->add_option("--samples", samples, "samples of the local-minimum test")->check(CLI::Range(1, 10000000));

  auto* analyze = app.add_subcommand("analyze", "enumerate, classify and check the Morse relation");
  analyze->fallthrough();
  analyze->add_option("file", file, "problem file")->required();

  std::vector<std::size_t> pq;
  std::optional<std::size_t> sweep;
  auto* topology = app.add_subcommand("topology", "normal Morse data of the cell attachment");
  topology->fallthrough();
  topology->add_option("pq", pq, "p and q")->expected(2);
  topology->add_option("--sweep", sweep, "all 1 <= p <= PMAX, 0 <= q < p")->check(CLI::Range(1, 12));

  std::vector<double> levels;
  auto* levelset = app.add_subcommand("levelset", "component counts of lower level sets");
  levelset->fallthrough();
  levelset->add_option("file", file, "problem file")->required();
  levelset->add_option("--level", levels, "extra probe levels");

  auto* perturb_cmd = app.add_subcommand("perturb", "write a perturbed problem file");
  perturb_cmd->fallthrough();
  perturb_cmd->add_option("file", file, "problem file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    scno::AnalysisSettings settings;
    settings.morse.resolution = resolution;
    settings.morse.enumeration.starts_per_axis = starts;
    settings.seed = seed;
    if (perturb) settings.perturbation = scno::parse_rational(*perturb);
    settings.sampling.radius = radius;
    settings.sampling.samples = samples;

    auto load = [&] {
      scno::ProblemFile pf = scno::read_problem_file(file);
      if (tol_zero_entry) pf.tol.zero_entry = *tol_zero_entry;
      if (tol_grad_zero) pf.tol.grad_zero = *tol_grad_zero;
      if (tol_eig_zero) pf.tol.eig_zero = *tol_eig_zero;
      if (tol_dedupe) pf.tol.dedupe_radius = *tol_dedupe;
      (void)pf.to_problem();
      return pf;
    };

    Json out;
    if (*classify) {
      const scno::ProblemFile used = scno::prepare_problem(load(), settings);
      const scno::Problem prob = used.to_problem();
      const auto x = parse_vector(point_text, "--point");
      if (x.size() != prob.n())
        throw scno::InputError("--point has " + std::to_string(x.size()) + " entries, expected " +
                               std::to_string(prob.n()));
      std::optional<std::vector<double>> y;
      if (y_text) y = parse_vector(*y_text, "--y");
      out["tool"] = "scno";
      out["version"] = scno::kToolVersion;
      out["command"] = "classify";
      out["problem"] = scno::problem_file_json(used);
      out["sampling"] = Json{{"radius", radius}, {"samples", samples}, {"seed", settings.sampling.seed}};
      out["result"] = scno::point_report(x, prob, settings.sampling, y);
      if (format == "text") {
        print_point_text(std::cout, out["result"]);
        return 0;
      }
    } else if (*analyze) {
      out = scno::analysis_report(load(), settings);
      if (format == "text") {
        print_analysis_text(std::cout, out);
        return 0;
      }
    } else if (*topology) {
      std::vector<std::pair<std::size_t, std::size_t>> cases;
      if (sweep) {
        if (!pq.empty()) throw scno::InputError("give either p q or --sweep, not both");
        for (std::size_t p = 1; p <= *sweep; ++p)
          for (std::size_t q = 0; q < p; ++q) cases.emplace_back(p, q);
      } else {
        if (pq.size() != 2) throw scno::InputError("topology needs p and q, or --sweep PMAX");
        cases.emplace_back(pq[0], pq[1]);
      }
      out["tool"] = "scno";
      out["version"] = scno::kToolVersion;
      out["command"] = "topology";
      out["rows"] = Json::array();
      bool all_ok = true;
      for (auto [p, q] : cases) {
        const auto rep = scno::verify_normal_morse_data(p, q);
        all_ok = all_ok && rep.all_ok();
        out["rows"].push_back(scno::to_json(rep));
      }
      out["all_ok"] = all_ok;
      if (format == "text") {
        print_topology_text(std::cout, out);
        return 0;
      }
    } else if (*levelset) {
      const scno::ProblemFile pf = load();
      out = scno::levelset_report(pf, settings);
      if (!levels.empty()) {
        const scno::Problem prob = scno::prepare_problem(pf, settings).to_problem();
        const scno::LevelGrid grid(prob, resolution);
        Json extra = Json::array();
        for (double a : levels) {
          const auto c = scno::components_at_level(grid, a);
          extra.push_back(Json{{"level", a}, {"q", c.count}, {"touches_boundary", c.touches_boundary}});
        }
        out["probes"] = std::move(extra);
      }
      if (format == "text") {
        print_curve_text(std::cout, out["curve"]);
        if (out.contains("probes"))
          for (const Json& p : out["probes"])
            std::cout << "  level " << fmt(p["level"]) << ": q = " << p["q"] << "\n";
        return 0;
      }
    } else if (*perturb_cmd) {
      if (!settings.perturbation) throw scno::InputError("perturb needs --perturb EPS");
      out = scno::problem_file_json(scno::prepare_problem(load(), settings));
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  } catch (const scno::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const scno::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
}
