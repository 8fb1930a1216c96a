#pragma once

#include <string>
#include <vector>

#include "tiqa/aggregate.hpp"
#include "tiqa/geometry.hpp"

namespace tiqa {

inline constexpr int kSchemaVersion = 1;

/// Shortest decimal text that round-trips the double.
std::string format_number(double value);

/// {schema_version, level, view_dim, planes: [{center, u, v, fov}]}
std::string layout_to_json(const TangentLayout& layout);

/// Scores of one distorted image against the reference.
struct ScoreResult {
  std::string ref;
  std::string dist;
  int level{0};
  int view_dim{0};
  std::vector<MetricOutcome> outcomes;
  std::string error;  // set when the image could not be scored at all
};

/// {schema_version, results: [{ref, dist, level, view_dim, reports, errors}]}
std::string score_results_to_json(const std::vector<ScoreResult>& results);

/// Header plus one row per (dist, metric).
std::string score_results_to_csv(const std::vector<ScoreResult>& results,
                                 const std::vector<MetricId>& metrics);

}  // namespace tiqa
