#include "tiqa/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "tiqa/external_metric.hpp"
#include "tiqa/parallel.hpp"

namespace tiqa {

double compensated_sum(const std::vector<double>& values) {
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

std::optional<int> level_for_view_count(std::size_t count) {
  std::size_t n = kIcosahedronFaces;
  for (int level = 0; level <= 30 && n <= count; ++level, n *= 4) {
    if (n == count) return level;
  }
  return std::nullopt;
}

namespace {

// Compensated mean about the first value; exact for constant inputs.
double shifted_mean(const std::vector<double>& values) {
  const double shift = values.front();
  std::vector<double> centered;
  centered.reserve(values.size());
  for (double v : values) centered.push_back(v - shift);
  return shift + compensated_sum(centered) / static_cast<double>(values.size());
}

std::vector<double> validated_values(const std::vector<MetricScore>& scores,
                                     const MetricDescriptor& descriptor) {
  if (scores.empty()) {
    throw Error(ErrorKind::layout, "t_metric: no per-view scores");
  }
  if (!level_for_view_count(scores.size())) {
    throw Error(ErrorKind::layout, "t_metric: " + std::to_string(scores.size()) +
                                       " views is not 20 * 4^b");
  }
  std::vector<double> values;
  values.reserve(scores.size());
  for (const auto& s : scores) {
    if (!(s.id == descriptor.id)) {
      throw Error(ErrorKind::aggregation,
                  "t_metric: mixed metrics ('" + descriptor.id.name() + "' and '" +
                      s.id.name() + "')");
    }
    if (!std::isfinite(s.value)) {
      throw Error(ErrorKind::aggregation,
                  "t_metric: non-finite score for '" + s.id.name() + "'");
    }
    values.push_back(s.value);
  }
  return values;
}

TMetricReport make_report(const std::vector<double>& values, double t_value,
                          const MetricDescriptor& descriptor) {
  TMetricReport report;
  report.metric = descriptor;
  report.level = *level_for_view_count(values.size());
  report.per_view.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    report.per_view.emplace_back(static_cast<int>(i), values[i]);
  }
  report.t_value = t_value;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  report.stats.min = *lo;
  report.stats.max = *hi;
  const double mean = shifted_mean(values);
  std::vector<double> sq;
  sq.reserve(values.size());
  for (double v : values) sq.push_back((v - mean) * (v - mean));
  report.stats.stddev =
      std::sqrt(compensated_sum(sq) / static_cast<double>(values.size()));
  // Keep min <= t <= max under rounding.
  report.t_value = std::clamp(report.t_value, report.stats.min, report.stats.max);
  return report;
}

}  // namespace

TMetricReport t_metric(const std::vector<MetricScore>& scores,
                       const MetricDescriptor& descriptor) {
  const std::vector<double> values = validated_values(scores, descriptor);
  return make_report(values, shifted_mean(values), descriptor);
}

TMetricReport t_metric(const std::vector<MetricScore>& scores) {
  if (scores.empty()) throw Error(ErrorKind::layout, "t_metric: no per-view scores");
  return t_metric(scores, builtin_descriptor(scores.front().id));
}

TMetricReport t_metric_weighted(const std::vector<MetricScore>& scores,
                                const std::vector<double>& weights,
                                const MetricDescriptor& descriptor) {
  const std::vector<double> values = validated_values(scores, descriptor);
  if (weights.size() != values.size()) {
    throw Error(ErrorKind::aggregation, "t_metric_weighted: weight count mismatch");
  }
  std::vector<double> weighted(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] > 0.0)) {
      throw Error(ErrorKind::aggregation, "t_metric_weighted: weights must be positive");
    }
    weighted[i] = weights[i] * values[i];
  }
  return make_report(values, compensated_sum(weighted) / compensated_sum(weights),
                     descriptor);
}

std::vector<MetricOutcome> evaluate_views(const std::vector<TangentView>& ref_views,
                                          const std::vector<TangentView>& dist_views,
                                          const TangentLayout& layout,
                                          const std::vector<MetricId>& metrics,
                                          const EvaluateOptions& options) {
  const std::size_t n_views = layout.planes.size();
  if (ref_views.size() != n_views || dist_views.size() != n_views) {
    throw Error(ErrorKind::layout, "evaluate_views: view count does not match layout");
  }
  const std::size_t n_tasks = metrics.size() * n_views;
  std::vector<double> values(n_tasks, 0.0);
  std::vector<std::string> errors(n_tasks);
  std::vector<ErrorKind> kinds(n_tasks, ErrorKind::aggregation);

  parallel_for(n_tasks, options.threads, [&](std::size_t task) {
    const std::size_t m = task / n_views;
    const std::size_t v = task % n_views;
    try {
      values[task] =
          score_pair(ref_views[v], dist_views[v], metrics[m], options.scoring).value;
    } catch (const Error& e) {
      errors[task] = "metric '" + metrics[m].name() + "', plane " +
                     std::to_string(v) + ": " + e.what();
      kinds[task] = e.kind();
    } catch (const std::exception& e) {
      errors[task] = "metric '" + metrics[m].name() + "', plane " +
                     std::to_string(v) + ": " + e.what();
    }
  });

  std::vector<double> weights;
  if (options.solid_angle_weights) {
    weights = face_solid_angles(subdivide_icosahedron(layout.level));
  }
  std::vector<MetricOutcome> outcomes;
  outcomes.reserve(metrics.size());
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    MetricOutcome outcome{metrics[m], std::nullopt, {}};
    // First failing view (lowest plane index) aborts the metric.
    for (std::size_t v = 0; v < n_views && outcome.error.empty(); ++v) {
      outcome.error = errors[m * n_views + v];
      outcome.error_kind = kinds[m * n_views + v];
    }
    if (outcome.error.empty()) {
      try {
        const MetricDescriptor descriptor =
            describe(metrics[m], options.scoring.plugins);
        std::vector<MetricScore> scores;
        scores.reserve(n_views);
        for (std::size_t v = 0; v < n_views; ++v) {
          scores.push_back({metrics[m], values[m * n_views + v]});
        }
        outcome.report = options.solid_angle_weights
                             ? t_metric_weighted(scores, weights, descriptor)
                             : t_metric(scores, descriptor);
        outcome.report->level = layout.level;
      } catch (const Error& e) {
        outcome.error = "metric '" + metrics[m].name() + "': " + e.what();
        outcome.error_kind = e.kind();
      }
    }
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

std::vector<MetricOutcome> evaluate_odi_outcomes(const ErpImage& ref,
                                                 const ErpImage& dist,
                                                 const TangentLayout& layout,
                                                 const std::vector<MetricId>& metrics,
                                                 const EvaluateOptions& options) {
  require_same_shape(ref.image(), dist.image(), "evaluate_odi");
  const auto ref_views = render_all_views(ref, layout, options.interp, options.threads);
  const auto dist_views = render_all_views(dist, layout, options.interp, options.threads);
  return evaluate_views(ref_views, dist_views, layout, metrics, options);
}

std::vector<TMetricReport> evaluate_odi(const ErpImage& ref, const ErpImage& dist,
                                        const TangentLayout& layout,
                                        const std::vector<MetricId>& metrics,
                                        const EvaluateOptions& options) {
  std::vector<TMetricReport> reports;
  for (auto& outcome : evaluate_odi_outcomes(ref, dist, layout, metrics, options)) {
    if (!outcome.ok()) throw Error(outcome.error_kind, outcome.error);
    reports.push_back(std::move(*outcome.report));
  }
  return reports;
}

}  // namespace tiqa
