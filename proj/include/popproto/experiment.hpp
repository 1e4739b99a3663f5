#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "popproto/engine.hpp"
#include "popproto/stacks.hpp"

namespace popproto {

enum class Instrumentation { Off, Light, Full };

Instrumentation parse_instrumentation(const std::string& name);

struct ExperimentSpec {
  std::vector<GraphDescriptor> points;
  std::string stack;
  StackOptions stack_options;
  std::size_t seeds = 1;
  std::uint64_t seed_base = 1;
  std::uint64_t step_cap = 0;          // 0: default cap per graph
  std::optional<std::uint64_t> tail;   // unset: default tail per graph
  /// 0: POPPROTO_THREADS, or the hardware concurrency when unset.
  std::size_t threads = 0;

  /// Throws InvalidParameter when seeds is zero or there are no points.
  void validate() const;
};

/// One run on `point` with the given seed. The descriptor stored in the
/// record has its seed resolved.
RunRecord run_single(const GraphDescriptor& point, const std::string& stack,
                     const StackOptions& options, std::uint64_t seed, std::uint64_t step_cap = 0,
                     std::optional<std::uint64_t> tail = std::nullopt,
                     std::vector<StepObserver*> observers = {});

/// One record per (point, seed), sorted by (point index, seed). Seeds run in
/// parallel; the result does not depend on the thread count.
std::vector<RunRecord> run_experiment(const ExperimentSpec& spec);

/// Thread count from POPPROTO_THREADS (at least 1).
std::size_t default_thread_count();

// --- serialisation ----------------------------------------------------------

nlohmann::ordered_json record_to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::ordered_json& j);
/// Equality over the serialised fields.
bool same_record(const RunRecord& a, const RunRecord& b);

void write_jsonl(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_jsonl(std::istream& in);

// --- statistics -------------------------------------------------------------

struct PointSummary {
  GraphDescriptor graph;
  std::size_t runs = 0;
  std::size_t capped = 0;
  std::size_t uncapped = 0;
  double mean = 0.0;        // over uncapped runs
  double median = 0.0;      // nearest rank
  double p95 = 0.0;         // nearest rank
  bool warning = false;     // some runs capped and excluded

  bool operator==(const PointSummary&) const = default;
};

/// Nearest-rank quantile: the ceil(q·N)-th smallest value. `values` must be
/// nonempty.
double nearest_rank(std::vector<double> values, double q);

/// Stats over plain values; capped entries are given as nullopt.
PointSummary summarize_values(const std::vector<std::optional<double>>& values);

/// Per-point stats of one layer's steps (the top layer when `layer` is
/// empty). Points keep first-appearance order; seeds of random families are
/// ignored when grouping.
std::vector<PointSummary> summarize(const std::vector<RunRecord>& records,
                                    const std::string& layer = {});

struct FitPoint {
  double x = 0.0;
  double mean = 0.0;
  double p95 = 0.0;
};

struct ScalingFit {
  std::vector<FitPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// OLS of log(y) on log(x). Throws FitError with fewer than three distinct x
/// or non-positive values.
ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

/// Fit of mean steps against n. Every point needs at least five uncapped runs
/// and at most 10% capped runs; otherwise FitError.
ScalingFit fit_scaling(const std::vector<PointSummary>& points);

void write_summary_csv(std::ostream& out, const std::vector<PointSummary>& points);
void write_fit_csv(std::ostream& out, const std::vector<PointSummary>& points, const ScalingFit& fit);

}  // namespace popproto
