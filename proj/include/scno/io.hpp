#pragma once

// Problem files and JSON reports.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "scno/globalmorse.hpp"
#include "scno/relaxation.hpp"
#include "scno/topology.hpp"

namespace scno {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

/// Parsed problem file. The objective is always held as exact terms; an
/// expression string, when the file had one, is kept for the echo.
struct ProblemFile {
  std::size_t n = 0;
  std::size_t s = 0;
  Polynomial objective{1};
  std::optional<std::string> expression;
  std::vector<Interval> box;
  ToleranceSet tol;
  std::map<std::string, std::string> labels;

  Problem to_problem() const;
};

/// Throws ParseError for malformed JSON or expressions, InputError for
/// well-formed files that do not describe a valid problem.
ProblemFile parse_problem_file(std::string_view text);
ProblemFile read_problem_file(const std::string& path);

/// Exact terms plus tolerances and labels; parse_problem_file reads it back unchanged.
Json problem_file_json(const ProblemFile& pf);
ProblemFile problem_file_from(const Problem& prob, std::map<std::string, std::string> labels = {});

Json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const Json& terms, std::size_t nvars);

Json to_json(const ToleranceSet& tol);
Json to_json(const StationaryRecord& rec);
Json to_json(const RelaxationRecord& rec);
Json to_json(const EnumerationResult& res);
Json to_json(const ComponentCurve& curve);
Json to_json(const MergeCheck& check);
Json to_json(const MorseReport& rep);
Json to_json(const NormalMorseReport& rep);
Json to_json(const BettiProfile& b);

struct SamplingSettings {
  double radius = 0.1;
  int samples = 2000;
  std::uint64_t seed = 0x5eed;
};

/// Every check available at one point: stationarity record, BF and CW
/// verdicts, sampled local minimality and, for feasible points, the
/// relaxation analysis at the canonical y (or at `y` when given).
Json point_report(std::span<const double> x, const Problem& prob, const SamplingSettings& sampling,
                  const std::optional<std::vector<double>>& y = std::nullopt);

struct AnalysisSettings {
  MorseOptions morse;
  SamplingSettings sampling;
  std::optional<Rational> perturbation;  ///< applied with `seed` before analysis
  std::uint64_t seed = 0;
};

/// The analysed problem after the optional perturbation.
ProblemFile prepare_problem(const ProblemFile& pf, const AnalysisSettings& settings);

/// Full pipeline: enumeration, per-point records, Morse report, normal Morse
/// data per support size. Deterministic for fixed input and settings.
Json analysis_report(const ProblemFile& pf, const AnalysisSettings& settings);

/// Component curve only.
Json levelset_report(const ProblemFile& pf, const AnalysisSettings& settings);

}  // namespace scno
