#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "support/synthetic.hpp"
#include "tiqa/metrics.hpp"
#include "tiqa/resample.hpp"

using namespace tiqa;

namespace {

Plane noise_plane(int w, int h, std::uint64_t seed) {
  return tiqa::testing::white_noise(w, h, seed).plane_d(0);
}

Plane texture(std::uint64_t seed = 21) {
  return tiqa::testing::natural_texture(256, 256, seed).plane_d(0);
}

Plane blurred(const Plane& p, double sigma) {
  return gaussian_blur(Image::from_plane(p), sigma).plane_d(0);
}

Plane noisy(const Plane& p, double sigma, std::uint64_t seed = 3) {
  return add_gaussian_noise(Image::from_plane(p), sigma, seed).plane_d(0);
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::domain;
}

// Direct-loop SSIM with the standard definition; returns {ssim, cs}.
std::pair<double, double> naive_ssim(const Plane& x, const Plane& y) {
  const int n = 11;
  double g[11], total = 0.0;
  for (int i = 0; i < n; ++i) {
    g[i] = std::exp(-0.5 * (i - 5) * (i - 5) / (1.5 * 1.5));
    total += g[i];
  }
  for (double& v : g) v /= total;
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double s_sum = 0.0, cs_sum = 0.0;
  const int rows = static_cast<int>(x.rows()) - n + 1, cols = static_cast<int>(x.cols()) - n + 1;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double mx = 0, my = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          mx += g[i] * g[j] * x(r + i, c + j);
          my += g[i] * g[j] * y(r + i, c + j);
        }
      }
      double vx = 0, vy = 0, cov = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double dx = x(r + i, c + j) - mx, dy = y(r + i, c + j) - my;
          vx += g[i] * g[j] * dx * dx;
          vy += g[i] * g[j] * dy * dy;
          cov += g[i] * g[j] * dx * dy;
        }
      }
      const double cs = (2 * cov + c2) / (vx + vy + c2);
      s_sum += (2 * mx * my + c1) / (mx * mx + my * my + c1) * cs;
      cs_sum += cs;
    }
  }
  return {s_sum / (rows * cols), cs_sum / (rows * cols)};
}

Plane naive_pool(const Plane& p) {
  Plane out(p.rows() / 2, p.cols() / 2);
  for (int r = 0; r < out.rows(); ++r) {
    for (int c = 0; c < out.cols(); ++c) {
      out(r, c) = 0.25 * (p(2 * r, 2 * c) + p(2 * r + 1, 2 * c) + p(2 * r, 2 * c + 1) +
                          p(2 * r + 1, 2 * c + 1));
    }
  }
  return out;
}

double naive_gmsd(const Plane& x, const Plane& y) {
  const Plane a = naive_pool(x), b = naive_pool(y);
  std::vector<double> gms;
  for (int r = 1; r + 1 < a.rows(); ++r) {
    for (int c = 1; c + 1 < a.cols(); ++c) {
      auto grad = [&](const Plane& p) {
        double gx = 0, gy = 0;
        for (int k = -1; k <= 1; ++k) {
          gx += (p(r + k, c - 1) - p(r + k, c + 1)) / 3.0;
          gy += (p(r - 1, c + k) - p(r + 1, c + k)) / 3.0;
        }
        return std::sqrt(gx * gx + gy * gy);
      };
      const double m1 = grad(a), m2 = grad(b);
      gms.push_back((2 * m1 * m2 + 0.0026) / (m1 * m1 + m2 * m2 + 0.0026));
    }
  }
  double mean = 0;
  for (double v : gms) mean += v;
  mean /= gms.size();
  double var = 0;
  for (double v : gms) var += (v - mean) * (v - mean);
  return std::sqrt(var / gms.size());
}

}  // namespace

TEST(MetricIdTest, NamesAndExternalTokens) {
  EXPECT_EQ(builtin_metrics().size(), 5u);
  EXPECT_EQ(MetricId::parse("msssim").kind(), MetricId::Kind::msssim);
  EXPECT_TRUE(MetricId::parse("lpips-v0.1").is_external());
  EXPECT_EQ(kind_of([] { MetricId::external(""); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { MetricId::external("a/b"); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { MetricId::external(".."); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { MetricId::external("ssim"); }), ErrorKind::config);
}

TEST(MetricIdTest, BuiltinPolarities) {
  auto pol = [](const char* n) { return builtin_descriptor(MetricId::parse(n)).polarity; };
  EXPECT_EQ(pol("ssim"), Polarity::higher_better);
  EXPECT_EQ(pol("msssim"), Polarity::higher_better);
  EXPECT_EQ(pol("vifs"), Polarity::higher_better);
  EXPECT_EQ(pol("gmsd"), Polarity::lower_better);
  EXPECT_EQ(pol("nlpd"), Polarity::lower_better);
  EXPECT_EQ(parse_polarity("lower"), Polarity::lower_better);
  EXPECT_THROW(parse_polarity("up"), Error);
}

TEST(Ssim, IdentityIsExactlyOne) {
  const Plane x = texture();
  EXPECT_EQ(ssim(x, x), 1.0);
  const Plane n = noise_plane(40, 30, 2);
  EXPECT_EQ(ssim(n, n), 1.0);
}

TEST(Ssim, ConstantsFollowTheLuminanceTerm) {
  const double c1 = 1e-4;
  for (auto [a, b] : {std::pair{0.2, 0.6}, {0.5, 0.5}, {0.0, 1.0}, {0.9, 0.85}}) {
    const double expected = (2 * a * b + c1) / (a * a + b * b + c1);
    EXPECT_NEAR(ssim(Plane::Constant(16, 16, a), Plane::Constant(16, 16, b)), expected, 1e-12);
  }
}

TEST(Ssim, MatchesDirectLoopOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Plane x = noise_plane(29, 23, seed);
    const Plane y = 0.5 * x + 0.5 * noise_plane(29, 23, seed + 100);
    EXPECT_NEAR(ssim(x, y), naive_ssim(x, y).first, 1e-10);
  }
}

TEST(Ssim, AntiCorrelatedPairIsNegative) {
  const Plane x = noise_plane(32, 32, 4);
  EXPECT_LT(ssim(x, 1.0 - x), 0.0);
}

TEST(Ssim, StrictlyDecreasingInNoise) {
  const Plane x = texture();
  double prev = 1.0;
  for (double sigma : {0.01, 0.05, 0.1}) {
    const double s = ssim(x, noisy(x, sigma));
    EXPECT_LT(s, prev) << sigma;
    prev = s;
  }
}

TEST(Ssim, TooSmallIsSupportError) {
  EXPECT_EQ(kind_of([] { ssim(Plane::Zero(10, 20), Plane::Zero(10, 20)); }), ErrorKind::support);
  EXPECT_EQ(kind_of([] { ssim(Plane::Zero(20, 20), Plane::Zero(20, 21)); }), ErrorKind::shape);
}

TEST(Msssim, IdentityAndMinimumSide) {
  EXPECT_EQ(msssim_min_side(), 176);
  const Plane x = noise_plane(176, 176, 1);
  EXPECT_NEAR(msssim(x, x), 1.0, 1e-9);
  EXPECT_EQ(kind_of([] { msssim(Plane::Zero(175, 300), Plane::Zero(175, 300)); }),
            ErrorKind::support);
}

TEST(Msssim, MatchesDirectLoopOracle) {
  Plane x = blurred(noise_plane(176, 180, 7), 1.0);
  Plane y = blurred(noise_plane(176, 180, 8), 1.0) * 0.3 + 0.7 * x;
  const MsssimParams p;
  double expected = 1.0;
  for (int s = 0; s < 5; ++s) {
    const auto [full, cs] = naive_ssim(x, y);
    expected *= std::pow(std::max(s < 4 ? cs : full, 0.0), p.weights[s]);
    x = naive_pool(x);
    y = naive_pool(y);
  }
  Plane x0 = blurred(noise_plane(176, 180, 7), 1.0);
  Plane y0 = blurred(noise_plane(176, 180, 8), 1.0) * 0.3 + 0.7 * x0;
  EXPECT_NEAR(msssim(x0, y0), expected, 1e-9);
}

TEST(Msssim, StrictlyDecreasingInNoise) {
  const Plane x = texture();
  double prev = 1.0;
  for (double sigma : {0.01, 0.05, 0.1}) {
    const double s = msssim(x, noisy(x, sigma));
    EXPECT_LT(s, prev) << sigma;
    prev = s;
  }
}

TEST(Gmsd, IdentityIsZero) {
  const Plane x = texture();
  EXPECT_NEAR(gmsd(x, x), 0.0, 1e-12);
}

TEST(Gmsd, MatchesDirectLoopOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Plane x = noise_plane(30, 26, seed);
    const Plane y = blurred(x, 1.0);
    EXPECT_NEAR(gmsd(x, y), naive_gmsd(x, y), 1e-12);
  }
}

TEST(Gmsd, SymmetricOnRandomPairs) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Plane x = noise_plane(24, 24, seed);
    const Plane y = noise_plane(24, 24, seed + 1000);
    EXPECT_EQ(gmsd(x, y), gmsd(y, x));
  }
}

TEST(Gmsd, BlurIsPenalized) {
  const Plane x = texture();
  EXPECT_GT(gmsd(x, blurred(x, 1.0)), 0.0);
}

TEST(Vifs, IdentityIsOne) {
  const Plane x = texture();
  EXPECT_NEAR(vifs(x, x), 1.0, 1e-6);
  const Plane n = noise_plane(vifs_min_side(), vifs_min_side(), 1);
  EXPECT_NEAR(vifs(n, n), 1.0, 1e-6);
}

TEST(Vifs, ConstantDistortionPreservesNoInformation) {
  const Plane x = texture();
  EXPECT_LE(vifs(x, Plane::Constant(256, 256, 0.5)), 0.05);
  EXPECT_GE(vifs(x, Plane::Constant(256, 256, 0.5)), 0.0);
}

TEST(Vifs, MinimumSideIsTight) {
  const int side = vifs_min_side();
  EXPECT_GT(side, 16);
  EXPECT_NO_THROW(vifs(Plane::Zero(side, side), Plane::Zero(side, side)));
  EXPECT_EQ(kind_of([&] { vifs(Plane::Zero(side - 1, side), Plane::Zero(side - 1, side)); }),
            ErrorKind::support);
}

TEST(Vifs, FlatReference) {
  const Plane flat = Plane::Constant(80, 80, 0.3);
  EXPECT_EQ(vifs(flat, flat), 1.0);
  EXPECT_EQ(vifs(flat, noise_plane(80, 80, 3)), 0.0);
}

TEST(Nlpd, IdentityIsZero) {
  const Plane x = texture();
  EXPECT_NEAR(nlpd(x, x), 0.0, 1e-12);
}

TEST(Nlpd, SymmetricOnRandomPairs) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Plane x = noise_plane(64, 70, seed);
    const Plane y = noise_plane(64, 70, seed + 500);
    EXPECT_NEAR(nlpd(x, y), nlpd(y, x), 1e-12);
  }
}

TEST(Nlpd, StrictlyIncreasingInNoise) {
  const Plane x = texture();
  double prev = 0.0;
  for (double sigma : {0.01, 0.02, 0.05, 0.1}) {
    const double d = nlpd(x, noisy(x, sigma));
    EXPECT_GT(d, prev) << sigma;
    prev = d;
  }
}

TEST(Nlpd, MinimumSide) {
  EXPECT_EQ(nlpd_min_side(), 64);
  EXPECT_EQ(kind_of([] { nlpd(Plane::Zero(63, 64), Plane::Zero(63, 64)); }), ErrorKind::support);
  EXPECT_NO_THROW(nlpd(Plane::Zero(64, 64), Plane::Zero(64, 64)));
}

TEST(Metrics, StrictlyMonotoneInBlurOnTexture) {
  const Plane x = texture();
  const std::vector<double> sigmas{0.5, 1.0, 2.0, 4.0};
  for (const MetricId& id : builtin_metrics()) {
    const bool higher = builtin_descriptor(id).polarity == Polarity::higher_better;
    std::vector<double> scores;
    for (double s : sigmas) {
      scores.push_back(compute_metric(id, Image::from_plane(x), Image::from_plane(blurred(x, s)))
                           .value);
    }
    for (std::size_t i = 1; i < scores.size(); ++i) {
      if (higher) {
        EXPECT_LT(scores[i], scores[i - 1]) << id.name() << " sigma " << sigmas[i];
      } else {
        EXPECT_GT(scores[i], scores[i - 1]) << id.name() << " sigma " << sigmas[i];
      }
    }
  }
}

TEST(Metrics, BoundedOnRandomPairs) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> mix(0.0, 1.0);
  auto pair_at = [&](int side, std::uint64_t seed) {
    const Plane a = noise_plane(side, side, seed);
    Plane b = noise_plane(side, side, seed + 1'000'000);
    switch (seed % 4) {
      case 0: break;
      case 1: b = 1.0 - a; break;
      case 2: b = mix(rng) * a + (1 - mix(rng)) * b; b = b.max(0.0).min(1.0); break;
      case 3: b = Plane::Constant(side, side, mix(rng)); break;
    }
    return std::pair{a, b};
  };
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto [a, b] = pair_at(16, seed);
    const double s = ssim(a, b);
    EXPECT_TRUE(std::isfinite(s) && s >= -1.0 && s <= 1.0) << s;
    const double g = gmsd(a, b);
    EXPECT_TRUE(std::isfinite(g) && g >= 0.0) << g;
  }
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const auto [a, b] = pair_at(64, seed);
    const double d = nlpd(a, b);
    EXPECT_TRUE(std::isfinite(d) && d >= 0.0) << d;
  }
  const int vside = vifs_min_side();
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const auto [a, b] = pair_at(vside, seed);
    const double v = vifs(a, b);
    EXPECT_TRUE(std::isfinite(v) && v >= 0.0) << v;
  }
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto [a, b] = pair_at(176, seed);
    const double m = msssim(a, b);
    EXPECT_TRUE(std::isfinite(m) && m >= 0.0 && m <= 1.0) << m;
  }
}

TEST(Metrics, ColorInputsAreScoredOnLuma) {
  const Image rgb = Image::from_planes({noise_plane(64, 64, 1), noise_plane(64, 64, 2),
                                        noise_plane(64, 64, 3)});
  const Image other = Image::from_planes({noise_plane(64, 64, 4), noise_plane(64, 64, 2),
                                          noise_plane(64, 64, 3)});
  for (const MetricId& id : {MetricId::parse("ssim"), MetricId::parse("gmsd"),
                             MetricId::parse("nlpd")}) {
    const double color = compute_metric(id, rgb, other).value;
    const double luma = compute_metric(id, Image::from_plane(rgb.luma()),
                                       Image::from_plane(other.luma()))
                            .value;
    EXPECT_NEAR(color, luma, 1e-6) << id.name();
  }
  EXPECT_EQ(kind_of([&] { compute_metric(MetricId::parse("ssim"), rgb, Image(64, 64, 1)); }),
            ErrorKind::shape);
}

TEST(Metrics, DeterministicAcrossCalls) {
  const Plane x = texture(), y = blurred(x, 1.5);
  EXPECT_EQ(vifs(x, y), vifs(x, y));
  EXPECT_EQ(msssim(x, y), msssim(x, y));
  EXPECT_EQ(nlpd(x, y), nlpd(x, y));
}

TEST(Metrics, ConstantsAreConfigurable) {
  const Plane x = texture(), y = blurred(x, 1.0);
  GmsdParams g;
  g.c = 0.1;
  EXPECT_LT(gmsd(x, y, g), gmsd(x, y));
  SsimParams s;
  s.k2 = 0.3;
  EXPECT_GT(ssim(x, y, s), ssim(x, y));
}

TEST(ScorePair, IdealOnIdenticalViewsAndPairingChecks) {
  const TangentView a{3, tiqa::testing::natural_texture(200, 200, 1)};
  EXPECT_EQ(score_pair(a, a, MetricId::parse("ssim")).value, 1.0);
  EXPECT_NEAR(score_pair(a, a, MetricId::parse("gmsd")).value, 0.0, 1e-12);
  const TangentView b{4, a.image};
  EXPECT_EQ(kind_of([&] { score_pair(a, b, MetricId::parse("ssim")); }), ErrorKind::pairing);
  const TangentView c{3, Image(100, 100, 1, 0.5f)};
  EXPECT_EQ(kind_of([&] { score_pair(a, c, MetricId::parse("ssim")); }), ErrorKind::pairing);
  EXPECT_EQ(kind_of([&] { score_pair(a, a, MetricId::parse("lpips")); }), ErrorKind::plugin);
}

TEST(ScorePair, BicubicDegradedViewsScoreBelowIdeal) {
  const ErpImage ref(tiqa::testing::natural_texture(1024, 512, 2));
  const ErpImage dist = upsample(degrade(ref, {4, Kernel::bicubic}), 4, Kernel::bicubic);
  const TangentLayout layout = build_layout(1, 1024);
  const TangentView r = render_view(ref, layout, 10);
  const TangentView d = render_view(dist, layout, 10);
  EXPECT_LT(score_pair(r, d, MetricId::parse("ssim")).value, 1.0);
  EXPECT_GT(score_pair(r, d, MetricId::parse("gmsd")).value, 0.0);
}
