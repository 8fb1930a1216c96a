#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tiqa/geometry.hpp"
#include "tiqa/metrics.hpp"
#include "tiqa/resample.hpp"

namespace tiqa {

struct ViewStats {
  double min{0};
  double max{0};
  double stddev{0};  // population
};

struct TMetricReport {
  MetricDescriptor metric;
  int level{0};
  std::vector<std::pair<int, double>> per_view;  // (plane_index, value)
  double t_value{0};
  ViewStats stats;
};

/// Neumaier-compensated sum.
double compensated_sum(const std::vector<double>& values);

/// Level b with 20 * 4^b == count, or nullopt.
std::optional<int> level_for_view_count(std::size_t count);

/// Plain mean (compensated) of per-view scores ordered by plane index. Throws aggregation
/// error for mixed metric ids and layout error when the count is not
/// 20 * 4^b.
TMetricReport t_metric(const std::vector<MetricScore>& scores,
                       const MetricDescriptor& descriptor);
TMetricReport t_metric(const std::vector<MetricScore>& scores);

/// Weighted variant (weights typically face solid angles). Stats stay
/// unweighted.
TMetricReport t_metric_weighted(const std::vector<MetricScore>& scores,
                                const std::vector<double>& weights,
                                const MetricDescriptor& descriptor);

struct EvaluateOptions {
  Interp interp{Interp::bicubic};
  int threads{1};
  /// Weight views by face solid angle instead of the plain mean.
  bool solid_angle_weights{false};
  ScoringContext scoring{};
};

/// Result for one metric: a report, or the error that aborted it.
struct MetricOutcome {
  MetricId metric;
  std::optional<TMetricReport> report;
  std::string error;
  ErrorKind error_kind{ErrorKind::aggregation};

  bool ok() const noexcept { return report.has_value(); }
};

/// Renders both view sets once, scores every (metric, view) pair, and
/// aggregates per metric in the order given. A failing view aborts only
/// that metric's report; the error names the metric and plane index.
std::vector<MetricOutcome> evaluate_odi_outcomes(
    const ErpImage& ref, const ErpImage& dist, const TangentLayout& layout,
    const std::vector<MetricId>& metrics, const EvaluateOptions& options = {});

/// Same as evaluate_odi_outcomes but rethrows the first failure.
std::vector<TMetricReport> evaluate_odi(const ErpImage& ref, const ErpImage& dist,
                                        const TangentLayout& layout,
                                        const std::vector<MetricId>& metrics,
                                        const EvaluateOptions& options = {});

/// Scores precomputed view lists; used when one reference is scored against
/// many distorted images.
std::vector<MetricOutcome> evaluate_views(const std::vector<TangentView>& ref_views,
                                          const std::vector<TangentView>& dist_views,
                                          const TangentLayout& layout,
                                          const std::vector<MetricId>& metrics,
                                          const EvaluateOptions& options = {});

}  // namespace tiqa
