// Acceptance checks AC1-AC8. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/synthetic.hpp"
#include "tiqa/aggregate.hpp"
#include "tiqa/geometry.hpp"
#include "tiqa/image_io.hpp"
#include "tiqa/metrics.hpp"
#include "tiqa/resample.hpp"
#include "tiqa/subjective.hpp"

using namespace tiqa;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << id << ": " << detail << std::endl;
  if (!pass) ++failures;
}

std::string fmt(double v, int digits = 6) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

int run(const std::string& cmd) {
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<MetricId> all_builtins() { return builtin_metrics(); }

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("tiqa_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
};

// ---------------------------------------------------------------------------

void ac1(const Scratch& scratch) {
  const bool counts = view_count(0) == 20 && view_count(1) == 80;
  const Image img = testing::erp_from_function(1920, 960, [](double lat, double lon) {
    return 0.5 + 0.3 * std::cos(lat) * std::sin(5 * lon) + 0.1 * std::sin(40 * lat);
  });
  const fs::path in = scratch.dir / "ac1.png";
  write_png(in, img);
  const fs::path out = scratch.dir / "ac1_views";
  const auto t0 = Clock::now();
  const int rc = run(std::string(TANGENT_IQA_BIN) + " --level 1 tangents " + in.string() + " " +
                     out.string() + " > /dev/null");
  const double elapsed = seconds_since(t0);
  int views = 0;
  if (fs::exists(out)) {
    for (const auto& e : fs::directory_iterator(out)) {
      const auto name = e.path().filename().string();
      if (name.rfind("view_", 0) == 0 && e.path().extension() == ".png") ++views;
    }
  }
  report("AC1", counts && rc == 0 && views == 80 && elapsed < 10.0,
         "view_count(0)=" + std::to_string(view_count(0)) + " view_count(1)=" +
             std::to_string(view_count(1)) + "; tangents 1920x960 b=1 wrote " +
             std::to_string(views) + " views in " + fmt(elapsed, 3) + " s");
}

void ac2() {
  const double hi = binom_cdf(13, 20, 0.5);
  const double lo = binom_cdf(6, 20, 0.5);
  const Thresholds t = significance_thresholds(20, 0.06);
  const bool pass = std::abs(hi - 0.9423) <= 5e-5 && std::abs(lo - 0.0577) <= 5e-5 &&
                    t.k_lo && *t.k_lo == 6 && t.k_hi == 13;
  report("AC2", pass,
         "B(13,20,.5)=" + fmt(hi) + " B(6,20,.5)=" + fmt(lo) + " thresholds=(" +
             (t.k_lo ? std::to_string(*t.k_lo) : std::string("none")) + "," +
             std::to_string(t.k_hi) + ")");
}

void ac3() {
  const double hi = pref_prob(13, 20, 0);
  const double lo = pref_prob(6, 20, 0);
  report("AC3", hi == 0.65 && lo == 0.30,
         "pref_prob(13,20,0)=" + fmt(hi) + " pref_prob(6,20,0)=" + fmt(lo));
}

void ac4(const std::vector<testing::NamedErp>& erps) {
  const auto t0 = Clock::now();
  double worst_unit = 0, worst_zero = 0;
  bool ok = true;
  for (int level : {0, 1}) {
    const TangentLayout layout = build_layout(level, erps.front().image.width());
    for (const auto& e : erps) {
      for (const auto& r : evaluate_odi(e.image, e.image, layout, all_builtins())) {
        const auto kind = r.metric.id.kind();
        const bool unit = kind == MetricId::Kind::ssim || kind == MetricId::Kind::msssim ||
                          kind == MetricId::Kind::vifs;
        if (unit) {
          worst_unit = std::max(worst_unit, std::abs(r.t_value - 1.0));
          ok = ok && std::abs(r.t_value - 1.0) <= 1e-6;
        } else {
          worst_zero = std::max(worst_zero, std::abs(r.t_value));
          ok = ok && std::abs(r.t_value) <= 1e-9;
        }
      }
    }
  }
  const double elapsed = seconds_since(t0);
  report("AC4", ok && elapsed < 60.0,
         std::to_string(erps.size()) + " ERPs x b{0,1}: max|t-1|=" + fmt(worst_unit, 3) +
             " (ssim/msssim/vifs) max|t|=" + fmt(worst_zero, 3) + " (gmsd/nlpd) in " +
             fmt(elapsed, 3) + " s");
}

struct Distorted {
  std::string name;
  ErpImage image;
};

const std::vector<double> kBlurSigmas{0.5, 1.0, 2.0, 4.0};

std::vector<Distorted> distortions(const ErpImage& ref, std::uint64_t seed) {
  std::vector<Distorted> out;
  out.push_back({"bicubic_rt", upsample(degrade(ref, {4, Kernel::bicubic}), 4, Kernel::bicubic)});
  out.push_back({"nearest_rt", upsample(degrade(ref, {4, Kernel::nearest}), 4, Kernel::nearest)});
  for (double s : kBlurSigmas) {
    out.push_back({"blur_" + fmt(s, 2), ErpImage(gaussian_blur(ref.image(), s))});
  }
  out.push_back({"noise_0.05", ErpImage(add_gaussian_noise(ref.image(), 0.05, seed))});
  return out;
}

bool better(const TMetricReport& a, const TMetricReport& b) {
  return a.metric.polarity == Polarity::higher_better ? a.t_value > b.t_value
                                                      : a.t_value < b.t_value;
}

void ac5(const std::vector<testing::NamedErp>& erps, const Scratch& scratch,
         std::vector<std::pair<fs::path, std::vector<fs::path>>>& written) {
  const auto t0 = Clock::now();
  const TangentLayout layout = build_layout(1, erps.front().image.width());
  int cases = 0, passed = 0;
  std::string failed;
  for (std::size_t i = 0; i < erps.size(); ++i) {
    const auto& e = erps[i];
    const auto dists = distortions(e.image, 100 + i);
    std::map<std::string, std::vector<TMetricReport>> scores;
    for (const auto& d : dists) scores[d.name] = evaluate_odi(e.image, d.image, layout, all_builtins());

    for (std::size_t m = 0; m < all_builtins().size(); ++m) {
      const std::string metric = scores["bicubic_rt"][m].metric.id.name();
      ++cases;
      bool ok = better(scores["bicubic_rt"][m], scores["nearest_rt"][m]);
      for (std::size_t k = 0; k + 1 < kBlurSigmas.size(); ++k) {
        ok = ok && better(scores["blur_" + fmt(kBlurSigmas[k], 2)][m],
                          scores["blur_" + fmt(kBlurSigmas[k + 1], 2)][m]);
      }
      passed += ok ? 1 : 0;
      if (!ok) failed += (failed.empty() ? "" : ", ") + e.name + "/" + metric;
    }

    const fs::path ref_path = scratch.dir / (e.name + "_ref.png");
    write_png(ref_path, e.image.image(), 16);
    std::vector<fs::path> dist_paths;
    for (const auto& d : dists) {
      dist_paths.push_back(scratch.dir / (e.name + "_" + d.name + ".png"));
      write_png(dist_paths.back(), d.image.image(), 16);
    }
    written.emplace_back(ref_path, dist_paths);
  }
  const double elapsed = seconds_since(t0);
  report("AC5", passed == cases && elapsed < 300.0,
         std::to_string(passed) + "/" + std::to_string(cases) +
             " (ERP, metric) cases rank bicubic_rt > nearest_rt and blur sigma "
             "{0.5,1,2,4} monotone; noise 0.05 scored" +
             (failed.empty() ? "" : "; failing " + failed) + "; " +
             fmt(elapsed, 3) + " s");
}

void ac6() {
  double worst_rt = 0;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int level : {0, 1}) {
    const TangentLayout layout = build_layout(level, 1920);
    for (const auto& plane : layout.planes) {
      const double h = plane.half_extent();
      for (int k = 0; k < 10000; ++k) {
        const double x = h * unit(rng), y = h * unit(rng);
        const Vec3d d = gnomonic_inverse_direction(plane, x, y);
        const Vec2d back = gnomonic_forward(plane, d);
        const Vec3d d2 = gnomonic_inverse_direction(plane, back.x(), back.y());
        worst_rt = std::max(worst_rt, angular_distance(d, d2));
      }
    }
  }

  double worst_area = 0;
  for (int level : {0, 1, 2}) {
    const auto areas = face_solid_angles(subdivide_icosahedron(level));
    double sum = 0;
    for (double a : areas) sum += a;
    worst_area = std::max(worst_area, std::abs(sum - 4 * std::numbers::pi));
  }

  int uncovered = 0;
  std::normal_distribution<double> gauss;
  const int samples = 100000;
  std::vector<TangentLayout> layouts{build_layout(0, 1920), build_layout(1, 1920)};
  for (int k = 0; k < samples; ++k) {
    const Vec3d d = Vec3d(gauss(rng), gauss(rng), gauss(rng)).normalized();
    for (const auto& layout : layouts) {
      bool covered = false;
      for (const auto& plane : layout.planes) {
        if (plane.center.dot(d) <= kHemisphereEpsilon) continue;
        const Vec2d p = gnomonic_forward(plane, d);
        const double h = plane.half_extent();
        if (std::abs(p.x()) <= h && std::abs(p.y()) <= h) {
          covered = true;
          break;
        }
      }
      uncovered += covered ? 0 : 1;
    }
  }
  report("AC6", worst_rt < 1e-9 && worst_area <= 1e-6 && uncovered == 0,
         "round trip max " + fmt(worst_rt, 3) + " rad (b{0,1}, 1e4 pts/plane); |sum-4pi| max " +
             fmt(worst_area, 3) + " (b{0,1,2}); coverage " +
             std::to_string(2 * samples - uncovered) + "/" + std::to_string(2 * samples) +
             " at padding 1.3 (b{0,1})");
}

void ac7() {
  VoteMatrix two = VoteMatrix::zeros({"a", "b"}, 20);
  two.add(0, 1, 15, 5, 0);
  const BtScores bt2 = bradley_terry(two);
  const bool closed = std::abs(bt2.strengths(0) - 0.75) <= 1e-6 &&
                      std::abs(bt2.strengths(1) - 0.25) <= 1e-6;

  const std::vector<double> truth{8, 4, 2, 1};
  constexpr int kVotesPerPair = 100;
  int recovered = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    VoteMatrix v = VoteMatrix::zeros({"m0", "m1", "m2", "m3"}, kVotesPerPair);
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) {
        std::binomial_distribution<int> draw(kVotesPerPair, truth[a] / (truth[a] + truth[b]));
        const int wa = draw(rng);
        v.add(a, b, wa, kVotesPerPair - wa, 0);
      }
    }
    const Eigen::VectorXd s = bradley_terry(v).strengths;
    recovered += (s(0) > s(1) && s(1) > s(2) && s(2) > s(3)) ? 1 : 0;
  }

  Eigen::MatrixXd dominance(6, 4);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 0.9);
  for (int s = 0; s < 6; ++s) {
    for (int m = 1; m < 4; ++m) dominance(s, m) = u(rng);
    dominance(s, 0) = 0.95;
  }
  const Eigen::VectorXd dom = objective_preference(dominance, Polarity::higher_better);
  double worst_sum = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd scores(5, 4);
    for (Eigen::Index i = 0; i < scores.size(); ++i) scores(i) = std::round(u(rng) * 10) / 10;
    for (Polarity p : {Polarity::higher_better, Polarity::lower_better}) {
      worst_sum = std::max(worst_sum, std::abs(objective_preference(scores, p).sum() - 100.0));
    }
  }
  report("AC7", closed && recovered >= 99 && dom(0) == 50.0 && worst_sum <= 1e-9,
         "BT 15/5 -> " + fmt(bt2.strengths(0), 8) + "/" + fmt(bt2.strengths(1), 8) +
             "; rank recovery " + std::to_string(recovered) +
             "/100 (n=" + std::to_string(kVotesPerPair) + "/pair); dominance " + fmt(dom(0)) + "; row sum err " + fmt(worst_sum, 3));
}

void ac8(const Scratch& scratch,
         const std::vector<std::pair<fs::path, std::vector<fs::path>>>& inputs) {
  const auto t0 = Clock::now();
  bool identical = true;
  int files = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    std::string args = inputs[i].first.string();
    for (const auto& d : inputs[i].second) args += " " + d.string();
    const fs::path a = scratch.dir / ("score_t1_" + std::to_string(i) + ".json");
    const fs::path b = scratch.dir / ("score_t8_" + std::to_string(i) + ".json");
    const std::string bin = TANGENT_IQA_BIN;
    const int ra = run(bin + " --threads 1 --out " + a.string() + " score " + args);
    const int rb = run(bin + " --threads 8 --out " + b.string() + " score " + args);
    const std::string ja = slurp(a), jb = slurp(b);
    identical = identical && ra == 0 && rb == 0 && !ja.empty() && ja == jb;
    ++files;
  }
  report("AC8", identical && files > 0,
         "score --threads 1 vs 8 on " + std::to_string(files) +
             " reference sets: " + (identical ? "byte-identical" : "differ") + " (" +
             fmt(seconds_since(t0), 3) + " s)");
}

}  // namespace

int main() {
  try {
    Scratch scratch;
    ac1(scratch);
    ac2();
    ac3();
    const auto erps = testing::synthetic_erps(1280, 2024);
    ac4(erps);
    std::vector<std::pair<fs::path, std::vector<fs::path>>> written;
    ac5(erps, scratch, written);
    ac6();
    ac7();
    ac8(scratch, written);
  } catch (const std::exception& e) {
    std::cout << "[FAIL] acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
