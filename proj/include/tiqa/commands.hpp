#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tiqa/config.hpp"

namespace tiqa {

/// Exit statuses shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;

struct TangentsArgs {
  std::filesystem::path input;
  std::filesystem::path out_dir;
  int bit_depth{8};
};

/// Writes view_NNNN.png for every plane plus layout.json.
int cmd_tangents(const TangentsArgs& args, const RunConfig& config, std::ostream& out,
                 std::ostream& err);

struct ScoreArgs {
  std::filesystem::path ref;
  std::vector<std::filesystem::path> dists;
  std::optional<std::filesystem::path> out;  // stdout when empty
};

/// Scores every distorted image against ref with the configured metrics.
/// Failures are reported per (dist, metric); the exit status is nonzero if
/// any occurred.
int cmd_score(const ScoreArgs& args, const RunConfig& config, std::ostream& out,
              std::ostream& err);

struct ResizeArgs {
  std::filesystem::path input;
  std::filesystem::path out;
  int scale{4};
  Kernel kernel{Kernel::bicubic};
  double sigma{1.0};
  double noise{0.0};  // degrade only: additive Gaussian noise, seeded by config.seed
  int bit_depth{8};
};

int cmd_degrade(const ResizeArgs& args, const RunConfig& config, std::ostream& out,
                std::ostream& err);
int cmd_upsample(const ResizeArgs& args, const RunConfig& config, std::ostream& out,
                 std::ostream& err);

struct CompareArgs {
  std::filesystem::path scores_csv;  // header: scene,method,metric,value
  std::optional<std::filesystem::path> out;
};

/// Per-metric objective preference percentages, one row per metric and one
/// column per method.
int cmd_compare(const CompareArgs& args, const RunConfig& config, std::ostream& out,
                std::ostream& err);

struct SubjectiveArgs {
  std::filesystem::path votes_csv;  // [scene,]method_a,method_b,votes_a,votes_b,ties
  std::optional<int> n;             // participants per pair; validated per row
  std::optional<std::filesystem::path> out;
};

/// Preference probabilities, verdicts, thresholds and Bradley-Terry strengths,
/// pooled and per scene.
int cmd_subjective(const SubjectiveArgs& args, const RunConfig& config,
                   std::ostream& out, std::ostream& err);

}  // namespace tiqa
