// tangent_iqa: tangent-view quality assessment for equirectangular images.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tiqa/commands.hpp"
#include "tiqa/report.hpp"

namespace {

struct GlobalFlags {
  std::string config_path;
  std::optional<int> level;
  std::optional<std::string> metrics;
  std::optional<int> threads;
  std::optional<std::string> format;
  std::optional<std::string> out;
  std::optional<long long> seed;
  std::optional<double> alpha;
  std::optional<double> padding;
  std::optional<std::string> interp;
  std::vector<std::string> polarity;
  bool allow_any_aspect = false;
  bool keep_temp = false;
  bool weighted = false;
};

tiqa::RunConfig resolve_config(const GlobalFlags& flags) {
  tiqa::RunConfig config;
  std::string path = flags.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("TANGENT_IQA_CONFIG"); env && *env) path = env;
  }
  if (!path.empty()) config = tiqa::load_config(path);

  auto set = [&](const char* key, const std::string& value) {
    tiqa::apply_config_value(config, key, value);
  };
  if (flags.level) set("level", std::to_string(*flags.level));
  if (flags.metrics) set("metrics", *flags.metrics);
  if (flags.threads) set("threads", std::to_string(*flags.threads));
  if (flags.format) set("format", *flags.format);
  if (flags.seed) set("seed", std::to_string(*flags.seed));
  if (flags.alpha) set("alpha", tiqa::format_number(*flags.alpha));
  if (flags.padding) set("padding", tiqa::format_number(*flags.padding));
  if (flags.interp) set("interp", *flags.interp);
  if (flags.allow_any_aspect) config.allow_any_aspect = true;
  if (flags.keep_temp) config.keep_temp = true;
  if (flags.weighted) config.solid_angle_weights = true;
  for (const auto& entry : flags.polarity) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw tiqa::Error(tiqa::ErrorKind::config,
                        "--polarity expects name=higher|lower, got '" + entry + "'");
    }
    set(("metric." + entry.substr(0, eq) + ".polarity").c_str(), entry.substr(eq + 1));
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tangent-view full-reference quality assessment for 360-degree images"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  app.add_option("--config", flags.config_path,
                 "key = value config file (default: $TANGENT_IQA_CONFIG)");
  app.add_option("--level", flags.level, "icosahedron subdivision level b (default 1)");
  app.add_option("--metrics", flags.metrics,
                 "comma-separated metrics: ssim,msssim,gmsd,vifs,nlpd or plugin names");
  app.add_option("--threads", flags.threads, "worker threads (0 = hardware)");
  app.add_option("--format", flags.format, "output format: json or csv");
  app.add_option("--out", flags.out, "output file (stdout when omitted)");
  app.add_option("--seed", flags.seed, "seed for randomized utilities");
  app.add_option("--alpha", flags.alpha, "significance level for vote thresholds");
  app.add_option("--padding", flags.padding, "tangent view field-of-view padding");
  app.add_option("--interp", flags.interp, "view resampler: bicubic or bilinear");
  app.add_option("--polarity", flags.polarity, "metric polarity override, name=higher|lower");
  app.add_flag("--allow-any-aspect", flags.allow_any_aspect, "accept non-2:1 inputs");
  app.add_flag("--keep-temp", flags.keep_temp, "keep plugin scratch files");
  app.add_flag("--weighted", flags.weighted, "weight views by face solid angle");

  tiqa::TangentsArgs tangents;
  auto* tangents_cmd = app.add_subcommand("tangents", "render tangent views of an ERP image");
  tangents_cmd->add_option("input", tangents.input, "ERP image")->required();
  tangents_cmd->add_option("out_dir", tangents.out_dir, "output directory")->required();
  tangents_cmd->add_option("--bit-depth", tangents.bit_depth, "PNG bit depth (8 or 16)");

  tiqa::ScoreArgs score;
  std::vector<std::string> score_inputs;
  auto* score_cmd = app.add_subcommand("score", "t-metric scores of distorted ERPs");
  score_cmd->add_option("ref", score.ref, "reference ERP image")->required();
  score_cmd->add_option("dist", score_inputs, "distorted ERP images")->required();

  tiqa::ResizeArgs resize;
  std::string kernel = "bicubic";
  std::string resize_out;
  auto* degrade_cmd = app.add_subcommand("degrade", "integer-factor downsampling");
  auto* upsample_cmd = app.add_subcommand("upsample", "integer-factor upsampling");
  for (auto* cmd : {degrade_cmd, upsample_cmd}) {
    cmd->add_option("input", resize.input, "input image")->required();
    cmd->add_option("--scale", resize.scale, "integer scale factor")->default_val(4);
    cmd->add_option("--kernel", kernel, "bicubic, bilinear, nearest or gaussian");
    cmd->add_option("--bit-depth", resize.bit_depth, "output bit depth (8 or 16)");
  }
  degrade_cmd->add_option("--sigma", resize.sigma, "gaussian kernel sigma (input pixels)");
  degrade_cmd->add_option("--noise", resize.noise, "additive Gaussian noise sigma");

  tiqa::CompareArgs compare;
  auto* compare_cmd =
      app.add_subcommand("compare", "objective pairwise preference from a score table");
  compare_cmd->add_option("scores_csv", compare.scores_csv, "scene,method,metric,value CSV")
      ->required();

  tiqa::SubjectiveArgs subjective;
  std::optional<int> participants;
  auto* subjective_cmd =
      app.add_subcommand("subjective", "pairwise vote statistics and Bradley-Terry scaling");
  subjective_cmd->add_option("votes_csv", subjective.votes_csv, "vote CSV")->required();
  subjective_cmd->add_option("--n", participants, "participants per pair");

  CLI11_PARSE(app, argc, argv);

  tiqa::RunConfig config;
  try {
    config = resolve_config(flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*tangents_cmd) return tiqa::cmd_tangents(tangents, config, std::cout, std::cerr);
    if (*score_cmd) {
      for (const auto& p : score_inputs) score.dists.emplace_back(p);
      if (flags.out) score.out = *flags.out;
      return tiqa::cmd_score(score, config, std::cout, std::cerr);
    }
    if (*degrade_cmd || *upsample_cmd) {
      if (!flags.out) {
        std::cerr << "error: --out is required\n";
        return 2;
      }
      resize.out = *flags.out;
      resize.kernel = tiqa::parse_kernel(kernel);
      return *degrade_cmd ? tiqa::cmd_degrade(resize, config, std::cout, std::cerr)
                          : tiqa::cmd_upsample(resize, config, std::cout, std::cerr);
    }
    if (*compare_cmd) {
      if (flags.out) compare.out = *flags.out;
      return tiqa::cmd_compare(compare, config, std::cout, std::cerr);
    }
    if (*subjective_cmd) {
      subjective.n = participants;
      if (flags.out) subjective.out = *flags.out;
      return tiqa::cmd_subjective(subjective, config, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
