#include <gtest/gtest.h>

#include <cmath>

#include "adkyle/error.hpp"
#include "adkyle/model.hpp"
#include "oracles.hpp"

using namespace adkyle;

namespace {

SignalModel normals(std::vector<std::pair<double, double>> params, std::vector<double> prior = {}) {
  std::vector<DistributionSpec> specs;
  for (auto [m, s] : params) specs.push_back(dist::Normal{m, s});
  if (prior.empty()) prior = uniform_prior(specs.size());
  return build_signal_model(default_grid(specs), specs, prior, 1.0);
}

}  // namespace

TEST(StateGrid, UniformNodes) {
  StateGrid g(-8.0, 8.0, 1601);
  EXPECT_EQ(g.size(), 1601u);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.01);
  EXPECT_EQ(g[0], -8.0);
  EXPECT_EQ(g[1600], 8.0);
  EXPECT_NEAR(g[800], 0.0, 1e-15);
  for (std::size_t k = 1; k < g.size(); ++k) EXPECT_GT(g[k], g[k - 1]);
  EXPECT_EQ(g.nearest_index(0.004), 800u);
  EXPECT_EQ(g.nearest_index(-100.0), 0u);
}

TEST(StateGrid, RejectsBadShapes) {
  EXPECT_THROW(StateGrid(1.0, 1.0, 10), ConfigError);
  EXPECT_THROW(StateGrid(2.0, 1.0, 10), ConfigError);
  EXPECT_THROW(StateGrid(0.0, 1.0, 2), ConfigError);
}

TEST(SignalModel, NormalIntegratesToOne) {
  StateGrid g(-8.0, 8.0, 1601);
  auto m = build_signal_model(g, {dist::Normal{0.0, 1.0}}, {1.0}, 1.0);
  EXPECT_NEAR(m.integrate(m.density(0)), 1.0, 1e-8);
  EXPECT_NEAR(m.raw_masses()[0], 1.0, 1e-8);
  EXPECT_NEAR(m.density(0)[800], 0.3989422804, 1e-9);
  EXPECT_NEAR(m.density(0)[800], oracle::normal_pdf(0.0), 1e-12);
}

TEST(SignalModel, SkewShapeZeroIsNormal) {
  StateGrid g(-8.0, 8.0, 1601);
  auto a = build_signal_model(g, {dist::SkewNormal{0.0, 1.0, 0.0}}, {1.0}, 1.0);
  auto b = build_signal_model(g, {dist::Normal{0.0, 1.0}}, {1.0}, 1.0);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(a.density(0)[k], b.density(0)[k], 1e-12);
}

TEST(SignalModel, SkewNormalMatchesClosedForm) {
  StateGrid g(-10.0, 10.0, 2001);
  const auto raw = sample_density(dist::SkewNormal{0.5, 1.5, 3.0}, g);
  for (std::size_t k = 0; k < g.size(); k += 37) {
    const double z = (g[k] - 0.5) / 1.5;
    EXPECT_NEAR(raw[k], 2.0 / 1.5 * oracle::normal_pdf(z) * oracle::normal_cdf(3.0 * z), 1e-14);
  }
}

TEST(SignalModel, DensitiesNonnegativeAndUnitMass) {
  std::vector<DistributionSpec> specs{dist::Normal{1.0, 0.7}, dist::SkewNormal{-1.0, 2.0, -5.0},
                                      dist::LogNormal{3.0, 0.3}};
  StateGrid g(-16.0, 16.0, 3201);
  auto m = build_signal_model(g, specs, uniform_prior(3), 1.0);
  for (std::size_t i = 0; i < 3; ++i) {
    for (double v : m.density(i)) EXPECT_GE(v, 0.0);
    EXPECT_NEAR(m.integrate(m.density(i)), 1.0, 1e-12);
  }
}

TEST(SignalModel, TabulatedAndAtoms) {
  StateGrid g(0.0, 4.0, 5);
  auto m = build_signal_model(g, {dist::Tabulated{{0, 1, 2, 1, 0}}, dist::DiscreteAtoms{{{2.0, 1.0}}}},
                              {0.5, 0.5}, 1.0);
  EXPECT_EQ(m.raw_masses()[0], 4.0);
  EXPECT_EQ(m.density(0)[2], 0.5);
  EXPECT_EQ(m.density(1)[2], 1.0);
  EXPECT_EQ(m.density(1)[1], 0.0);
}

TEST(SignalModel, ValidationErrors) {
  StateGrid g(-5.0, 5.0, 101);
  EXPECT_THROW(build_signal_model(g, {}, {}, 1.0), ConfigError);
  EXPECT_THROW(build_signal_model(g, {dist::Normal{0, 0}}, {1.0}, 1.0), ConfigError);
  EXPECT_THROW(build_signal_model(g, {dist::Normal{0, -1}}, {1.0}, 1.0), ConfigError);
  EXPECT_THROW(build_signal_model(g, {dist::SkewNormal{0, 0, 1}}, {1.0}, 1.0), ConfigError);
  EXPECT_THROW(build_signal_model(g, {dist::Tabulated{{1, 2, 3}}}, {1.0}, 1.0), ConfigError);
  EXPECT_THROW(build_signal_model(g, {dist::Normal{0, 1}, dist::Normal{1, 1}}, {1.2, -0.2}, 1.0), ConfigError);
  EXPECT_THROW(build_signal_model(g, {dist::Normal{0, 1}}, {0.5, 0.5}, 1.0), ConfigError);
  EXPECT_THROW(build_signal_model(g, {dist::Normal{0, 1}}, {1.0}, 0.0), ConfigError);
  EXPECT_THROW(build_signal_model(g, {dist::Normal{0, 1}}, {1.0}, std::vector<double>(101, -1.0)), ConfigError);
  EXPECT_THROW(build_signal_model(g, {dist::DiscreteAtoms{{{-5.0, 1.0}}}}, {1.0}, 1.0), ConfigError);
}

TEST(SignalModel, NoiseVector) {
  StateGrid g(-5.0, 5.0, 11);
  std::vector<double> s(11, 2.0);
  auto m = build_signal_model(g, {dist::Normal{0, 1}}, {1.0}, s);
  EXPECT_TRUE(m.constant_noise());
  s[3] = 3.0;
  auto v = build_signal_model(g, {dist::Normal{0, 1}}, {1.0}, s);
  EXPECT_FALSE(v.constant_noise());
  auto scaled = v.with_noise_scaled(10.0);
  EXPECT_EQ(scaled.noise_sigma()[3], 30.0);
}

TEST(PriorMean, Examples) {
  EXPECT_NEAR(prior_mean(normals({{1, 1}, {-1, 1}})), 0.0, 1e-8);
  EXPECT_NEAR(prior_mean(normals({{2, 0.5}})), 2.0, 1e-6);
  EXPECT_NEAR(prior_mean(normals({{2, 1}, {0, 1}}, {0.75, 0.25})), 1.5, 1e-6);
}

TEST(Reweight, UniformIsIdentity) {
  for (std::size_t count : {2u, 3u, 4u}) {
    std::vector<std::pair<double, double>> p;
    for (std::size_t i = 0; i < count; ++i) p.push_back({double(i), 1.0});
    auto m = normals(p);
    auto r = reweight_to_uniform_prior(m);
    EXPECT_TRUE(r.unit_mass());
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t k = 0; k < m.grid().size(); ++k) EXPECT_EQ(r.density(i)[k], m.density(i)[k]);
    }
  }
}

TEST(Reweight, ScalesByPriorRatio) {
  auto m = normals({{1, 1}, {-1, 1}}, {0.8, 0.2});
  auto r = reweight_to_uniform_prior(m);
  EXPECT_FALSE(r.unit_mass());
  EXPECT_NEAR(r.integrate(r.density(0)), 1.6, 1e-8);
  EXPECT_NEAR(r.integrate(r.density(1)), 0.4, 1e-8);
  EXPECT_EQ(r.prior()[0], 0.5);
  // Undoing the scaling recovers the input.
  for (std::size_t k = 0; k < m.grid().size(); ++k) {
    EXPECT_NEAR(r.density(0)[k] / 1.6, m.density(0)[k], 1e-12);
    EXPECT_NEAR(r.density(1)[k] / 0.4, m.density(1)[k], 1e-12);
  }
  EXPECT_NEAR(prior_mean(r), prior_mean(m), 1e-12);
}

TEST(Reweight, RejectsZeroWeight) {
  auto m = normals({{1, 1}, {-1, 1}}, {1.0, 0.0});
  EXPECT_THROW(reweight_to_uniform_prior(m), ConfigError);
}

TEST(DefaultGrid, CoversSixScales) {
  auto g = default_grid({dist::Normal{1.0, 2.0}, dist::Normal{-1.0, 0.5}});
  EXPECT_DOUBLE_EQ(g.lo(), -13.0);
  EXPECT_DOUBLE_EQ(g.hi(), 13.0);
  EXPECT_EQ(g.size(), 1601u);
  EXPECT_THROW(default_grid({dist::Tabulated{{1, 2, 3}}}), ConfigError);
}
