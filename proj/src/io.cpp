#include "scno/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "scno/errors.hpp"

namespace scno {

namespace {

Json one_based(const IndexSet& idx) {
  Json out = Json::array();
  for (std::size_t i : idx) out.push_back(i + 1);
  return out;
}

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

const Json& require(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw InputError(std::string("problem file: missing field '") + key + "'");
  return *it;
}

std::size_t read_count(const Json& v, const char* key) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw InputError(std::string("problem file: '") + key + "' must be a nonnegative integer");
  return v.get<std::size_t>();
}

double read_real(const Json& v, const std::string& where) {
  if (!v.is_number()) throw InputError("problem file: " + where + " must be a number");
  return v.get<double>();
}

Rational read_coefficient(const Json& v) {
  if (v.is_number_integer()) return Rational(v.get<long>());
  if (v.is_string()) return parse_rational(v.get<std::string>());
  throw InputError("problem file: coefficients must be integers or strings such as \"-3/4\"");
}

}  // namespace

Problem ProblemFile::to_problem() const { return Problem(s, objective, box, tol); }

Json to_json(const Polynomial& p) {
  Json terms = Json::array();
  for (const auto& [exps, c] : p.terms()) {
    Json t;
    t["coeff"] = c.get_str();
    t["exps"] = exps;
    terms.push_back(std::move(t));
  }
  return terms;
}

Polynomial polynomial_from_json(const Json& terms, std::size_t nvars) {
  if (!terms.is_array()) throw InputError("problem file: objective terms must be a list");
  std::map<Exponents, Rational> acc;
  for (const Json& t : terms) {
    if (!t.is_object()) throw InputError("problem file: each term must be an object");
    const Json& e = require(t, "exps");
    if (!e.is_array() || e.size() != nvars)
      throw InputError("problem file: term exponent list must have length n = " + std::to_string(nvars));
    Exponents exps;
    for (const Json& k : e) {
      if (!k.is_number_integer() || k.get<long long>() < 0)
        throw InputError("problem file: exponents must be nonnegative integers");
      exps.push_back(k.get<unsigned>());
    }
    acc[exps] += read_coefficient(require(t, "coeff"));
  }
  return Polynomial(nvars, std::move(acc));
}

ProblemFile parse_problem_file(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    std::string msg = e.what();
    const auto colon = msg.find(": ", msg.find("column"));
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw ParseError("malformed problem file: " + msg, line, column);
  }
  if (!doc.is_object()) throw InputError("problem file: top level must be an object");

  ProblemFile pf;
  pf.n = read_count(require(doc, "n"), "n");
  pf.s = read_count(require(doc, "s"), "s");
  if (pf.n == 0) throw InputError("problem file: n must be positive");

  const Json& obj = require(doc, "objective");
  std::optional<Polynomial> from_terms;
  if (obj.is_string()) {
    pf.expression = obj.get<std::string>();
  } else if (obj.is_object()) {
    if (obj.contains("terms")) from_terms = polynomial_from_json(obj["terms"], pf.n);
    if (obj.contains("expression")) {
      if (!obj["expression"].is_string()) throw InputError("problem file: expression must be a string");
      pf.expression = obj["expression"].get<std::string>();
    }
    if (!from_terms && !pf.expression) throw InputError("problem file: objective needs terms or an expression");
  } else {
    throw InputError("problem file: objective must be a string or an object");
  }
  if (pf.expression) {
    Polynomial parsed = parse_polynomial(*pf.expression, pf.n);
    if (from_terms && !(*from_terms == parsed))
      throw InputError("problem file: objective terms and expression disagree");
    pf.objective = std::move(parsed);
  } else {
    pf.objective = std::move(*from_terms);
  }

  const Json& box = require(doc, "box");
  if (!box.is_array() || box.size() != pf.n)
    throw InputError("problem file: box must list n = " + std::to_string(pf.n) + " intervals");
  for (std::size_t i = 0; i < pf.n; ++i) {
    const Json& iv = box[i];
    const std::string where = "box[" + std::to_string(i + 1) + "]";
    if (!iv.is_array() || iv.size() != 2) throw InputError("problem file: " + where + " must be [lo, hi]");
    pf.box.push_back({read_real(iv[0], where), read_real(iv[1], where)});
  }

  if (doc.contains("tolerances")) {
    const Json& t = doc["tolerances"];
    if (!t.is_object()) throw InputError("problem file: tolerances must be an object");
    for (const auto& [key, value] : t.items()) {
      double* slot = key == "zero_entry"      ? &pf.tol.zero_entry
                     : key == "grad_zero"     ? &pf.tol.grad_zero
                     : key == "eig_zero"      ? &pf.tol.eig_zero
                     : key == "dedupe_radius" ? &pf.tol.dedupe_radius
                                              : nullptr;
      if (!slot) throw InputError("problem file: unknown tolerance '" + key + "'");
      *slot = read_real(value, "tolerance " + key);
    }
  }
  if (doc.contains("labels")) {
    const Json& l = doc["labels"];
    if (!l.is_object()) throw InputError("problem file: labels must be an object");
    for (const auto& [key, value] : l.items()) {
      if (!value.is_string()) throw InputError("problem file: label '" + key + "' must be a string");
      pf.labels[key] = value.get<std::string>();
    }
  }
  // Validates s, box and tolerances.
  (void)pf.to_problem();
  return pf;
}

ProblemFile read_problem_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open problem file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem_file(ss.str());
}

Json problem_file_json(const ProblemFile& pf) {
  Json j;
  j["n"] = pf.n;
  j["s"] = pf.s;
  j["objective"]["expression"] = pf.expression.value_or(pf.objective.to_string());
  j["objective"]["terms"] = to_json(pf.objective);
  Json box = Json::array();
  for (const auto& iv : pf.box) box.push_back({iv.lo, iv.hi});
  j["box"] = std::move(box);
  j["tolerances"] = to_json(pf.tol);
  j["labels"] = Json::object();
  for (const auto& [k, v] : pf.labels) j["labels"][k] = v;
  return j;
}

ProblemFile problem_file_from(const Problem& prob, std::map<std::string, std::string> labels) {
  ProblemFile pf;
  pf.n = prob.n();
  pf.s = prob.s();
  pf.objective = prob.objective();
  pf.box = prob.box();
  pf.tol = prob.tol();
  pf.labels = std::move(labels);
  return pf;
}

Json to_json(const ToleranceSet& tol) {
  return Json{{"zero_entry", tol.zero_entry},
              {"grad_zero", tol.grad_zero},
              {"eig_zero", tol.eig_zero},
              {"dedupe_radius", tol.dedupe_radius}};
}

Json to_json(const StationaryRecord& rec) {
  Json j;
  j["point"] = rec.point;
  j["feasible"] = rec.feasible;
  j["I0"] = one_based(rec.support.I0);
  j["I1"] = one_based(rec.support.I1);
  j["k"] = rec.support.k;
  j["m_stationary"] = rec.is_m_stationary;
  j["nd1"] = to_string(rec.nd1);
  j["nd2"] = rec.nd2;
  j["nondegenerate"] = rec.nondegenerate();
  j["qi"] = optional_json(rec.qi);
  j["m_index"] = optional_json(rec.m_index);
  j["class"] = to_string(rec.cls);
  j["value"] = rec.value;
  j["gradient"] = rec.gradient;
  j["restricted_eigenvalues"] = rec.restricted_eigenvalues;
  return j;
}

Json to_json(const RelaxationRecord& rec) {
  Json j;
  j["y"] = rec.y;
  j["index_sets"] = Json{{"I+-0", one_based(rec.index_sets.Ipm0)},
                         {"I00", one_based(rec.index_sets.I00)},
                         {"I01", one_based(rec.index_sets.I01)},
                         {"I0+", one_based(rec.index_sets.I0p)}};
  j["s_stationary"] = rec.is_s_stationary;
  j["gamma"] = rec.gamma;
  j["licq"] = rec.licq;
  j["kkt"] = rec.kkt;
  j["multipliers_unique"] = rec.multipliers_unique;
  j["strict_complementarity"] = rec.strict_complementarity;
  j["stationarity_residual"] = rec.stationarity_residual;
  Json active = Json::array();
  for (const auto& c : rec.active) {
    Json a;
    a["constraint"] = c.name();
    a["gradient"] = c.gradient;
    a["multiplier"] = rec.kkt ? Json(c.multiplier) : Json(nullptr);
    active.push_back(std::move(a));
  }
  j["active"] = std::move(active);
  j["mu"] = rec.kkt ? Json(rec.mu) : Json(nullptr);
  j["lambda"] = rec.kkt ? Json(rec.lambda) : Json(nullptr);
  j["cc_sosc"] = rec.cc_sosc ? Json(to_string(*rec.cc_sosc)) : Json(nullptr);
  j["cc_sosc_eigenvalues"] = rec.cc_sosc_eigenvalues;
  return j;
}

Json to_json(const EnumerationResult& res) {
  Json j;
  j["options"] = Json{{"starts_per_axis", res.options.starts_per_axis},
                      {"max_newton_iterations", res.options.max_newton_iterations}};
  j["completeness_note"] = res.completeness_note;
  j["counts"] = Json{{"r", res.counts.r},
                     {"r_I", res.counts.r_I},
                     {"r_II", res.counts.r_II},
                     {"degenerate", res.counts.n_degenerate},
                     {"higher", res.counts.n_higher}};
  Json pts = Json::array();
  for (const auto& p : res.points) {
    Json e;
    e["point"] = p.record.point;
    e["class"] = to_string(p.record.cls);
    e["value"] = p.record.value;
    e["provenance"] = Json{{"scheduled_support", one_based(p.provenance.scheduled_support)},
                           {"start", p.provenance.start},
                           {"iterations", p.provenance.iterations},
                           {"residual", p.provenance.residual}};
    pts.push_back(std::move(e));
  }
  j["points"] = std::move(pts);
  return j;
}

Json to_json(const ComponentCurve& curve) {
  Json j;
  j["critical_values"] = curve.critical_values;
  j["levels"] = curve.levels;
  j["q"] = curve.q;
  Json touches = Json::array();
  for (bool b : curve.touches_boundary) touches.push_back(b);
  j["touches_boundary"] = std::move(touches);
  return j;
}

Json to_json(const MergeCheck& check) {
  Json entries = Json::array();
  for (const auto& e : check.entries) {
    entries.push_back(Json{{"point", e.point},
                           {"class", to_string(e.cls)},
                           {"value", e.value},
                           {"dq_observed", e.dq_observed},
                           {"bound", {e.bound_lo, e.bound_hi}},
                           {"coincident", e.coincident},
                           {"ok", e.ok}});
  }
  return Json{{"entries", std::move(entries)}, {"all_ok", check.all_ok}, {"warnings", check.warnings}};
}

Json to_json(const MorseReport& rep) {
  Json j;
  j["r"] = rep.counts.r;
  j["r_I"] = rep.counts.r_I;
  j["r_II"] = rep.counts.r_II;
  j["n_minus_s"] = rep.n_minus_s;
  j["relation_lhs"] = rep.relation_lhs;
  j["relation_rhs"] = rep.relation_rhs;
  j["relation_holds"] = rep.relation_holds;
  j["degenerate_present"] = rep.degenerate_present;
  j["properness_warning"] = rep.properness_warning;
  j["hypothesis_met"] = rep.hypothesis_met;
  j["verdict"] = rep.verdict;
  j["curve"] = to_json(rep.curve);
  j["merge_bounds"] = to_json(rep.merges);
  j["warnings"] = rep.warnings;
  return j;
}

Json to_json(const BettiProfile& b) {
  return Json{{"reduced_betti", b.reduced}, {"euler_characteristic", b.euler_characteristic}};
}

Json to_json(const NormalMorseReport& rep) {
  return Json{{"p", rep.p},
              {"q", rep.q},
              {"cell_count", rep.cell_count},
              {"expected_count", rep.expected_count},
              {"skeleton_rank", rep.skeleton_rank},
              {"count_ok", rep.count_ok},
              {"contractible_ok", rep.contractible_ok},
              {"minimal_ok", rep.minimal_ok},
              {"collapsible", rep.collapsible},
              {"mod2_agrees", rep.mod2_agrees},
              {"all_ok", rep.all_ok()}};
}

Json point_report(std::span<const double> x, const Problem& prob, const SamplingSettings& sampling,
                  const std::optional<std::vector<double>>& y) {
  const StationaryRecord rec = classify_point(x, prob);
  Json j;
  j["stationarity"] = to_json(rec);
  if (!rec.feasible) {
    j["bf_vector"] = nullptr;
    j["cw_minimum"] = nullptr;
    j["local_min_sampled"] = nullptr;
    j["relaxation"] = nullptr;
    j["sosc_implies_nondegenerate_min"] = nullptr;
    return j;
  }
  j["bf_vector"] = is_bf_vector(x, prob);
  j["cw_minimum"] = is_cw_minimum(x, prob);
  j["local_min_sampled"] = is_local_min_sampled(x, prob, sampling.radius, sampling.samples, sampling.seed);
  j["relaxation"] = to_json(analyze_relaxation(x, prob, y));
  j["sosc_implies_nondegenerate_min"] =
      rec.is_m_stationary && rec.support.k == prob.s() ? Json(nondeg_from_sosc(x, prob)) : Json(nullptr);
  return j;
}

ProblemFile prepare_problem(const ProblemFile& pf, const AnalysisSettings& settings) {
  if (!settings.perturbation || *settings.perturbation == 0) return pf;
  const Problem perturbed = perturb_problem(pf.to_problem(), *settings.perturbation, settings.seed);
  auto labels = pf.labels;
  labels["perturbation"] = settings.perturbation->get_str();
  labels["perturbation_seed"] = std::to_string(settings.seed);
  return problem_file_from(perturbed, std::move(labels));
}

namespace {

Json settings_json(const AnalysisSettings& settings) {
  Json j;
  j["resolution"] = settings.morse.resolution;
  j["starts_per_axis"] = settings.morse.enumeration.starts_per_axis;
  j["max_newton_iterations"] = settings.morse.enumeration.max_newton_iterations;
  j["perturbation"] = settings.perturbation ? Json(settings.perturbation->get_str()) : Json(nullptr);
  j["seed"] = settings.seed;
  j["sampling"] = Json{{"radius", settings.sampling.radius},
                       {"samples", settings.sampling.samples},
                       {"seed", settings.sampling.seed}};
  return j;
}

Json header(const char* command, const ProblemFile& original, const ProblemFile& used,
            const AnalysisSettings& settings) {
  Json j;
  j["tool"] = "scno";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["seed"] = settings.seed;
  j["settings"] = settings_json(settings);
  j["problem"] = problem_file_json(used);
  j["source_problem"] = settings.perturbation && *settings.perturbation != 0 ? problem_file_json(original)
                                                                            : Json(nullptr);
  return j;
}

}  // namespace

Json analysis_report(const ProblemFile& pf, const AnalysisSettings& settings) {
  const ProblemFile used = prepare_problem(pf, settings);
  const Problem prob = used.to_problem();
  const MorseReport rep = morse_relation(prob, settings.morse);

  Json j = header("analyze", pf, used, settings);
  j["enumeration"] = to_json(rep.enumeration);
  Json points = Json::array();
  std::set<std::size_t> sizes;
  for (const auto& p : rep.enumeration.points) {
    points.push_back(point_report(p.record.point, prob, settings.sampling));
    sizes.insert(p.record.support.k);
  }
  j["points"] = std::move(points);
  j["morse"] = to_json(rep);
  // Normal Morse data at a point with k nonzero entries: p = n - k, q = s - k.
  Json topo = Json::array();
  for (std::size_t k : sizes) {
    Json t = to_json(verify_normal_morse_data(prob.n() - k, prob.s() - k));
    t["k"] = k;
    topo.push_back(std::move(t));
  }
  j["topology"] = std::move(topo);
  return j;
}

Json levelset_report(const ProblemFile& pf, const AnalysisSettings& settings) {
  const ProblemFile used = prepare_problem(pf, settings);
  const Problem prob = used.to_problem();
  const EnumerationResult e = enumerate_m_stationary(prob, settings.morse.enumeration);
  const LevelGrid grid(prob, settings.morse.resolution, anchor_points(e));
  Json j = header("levelset", pf, used, settings);
  j["grid_nodes"] = grid.size();
  j["curve"] = to_json(component_curve(grid, e));
  return j;
}

}  // namespace scno
