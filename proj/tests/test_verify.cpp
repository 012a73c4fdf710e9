#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pgap/campaign.hpp"

using namespace pgap;

TEST(Segment, CertificateAndRejection) {
  const auto s = make_segment(-1.0, 1.0, {}, 64);
  EXPECT_EQ(s.nodes(), 65u);
  EXPECT_NEAR(s.h(), 1.0 / 64, 1e-16);
  EXPECT_NEAR(s.f()[0], -0.125, 1e-16);
  EXPECT_DOUBLE_EQ(s.diameter(), 1.0);

  BumpSpec convex;
  convex.terms.push_back({Bump::Kind::RampSquared, 1.5, 0.1});
  EXPECT_NO_THROW(make_segment(-1.0, 1.0, convex, 64));

  BumpSpec concave;
  concave.terms.push_back({Bump::Kind::Quadratic, -0.2, 0.0});
  try {
    make_segment(-1.0, 1.0, concave, 64);
    FAIL() << "concave bump accepted";
  } catch (const CertificateViolation& e) {
    EXPECT_GE(e.node(), 1u);
    EXPECT_LE(e.node(), 63u);
  }
  EXPECT_THROW(make_segment(-1.0, 1.0, {}, 16), DomainError);
}

TEST(Segment, CircleAndRescale) {
  const auto c = make_circle(2.0, 128);
  EXPECT_TRUE(c.periodic());
  EXPECT_DOUBLE_EQ(c.diameter(), 2.0);
  EXPECT_DOUBLE_EQ(c.length(), 4.0);
  const auto s = rescale(make_segment(-1.0, 1.0, {}, 64), 2.0);
  EXPECT_DOUBLE_EQ(s.diameter(), 2.0);
  EXPECT_DOUBLE_EQ(s.kappa(), -0.25);
}

TEST(Segment, CoarsenKeepsCertificate) {
  const auto s = make_segment(-1.0, 1.0, random_convex_bump(3, 1.0), 256);
  const auto c = coarsen(s);
  EXPECT_EQ(c.cells(), 128u);
  EXPECT_EQ(c.f()[1], s.f()[2]);
}

TEST(RandomBump, DeterministicAndConvex) {
  const auto a = random_convex_bump(9, 1.0), b = random_convex_bump(9, 1.0);
  ASSERT_EQ(a.terms.size(), b.terms.size());
  for (std::size_t i = 0; i < a.terms.size(); ++i) EXPECT_EQ(a.terms[i].c, b.terms[i].c);
  for (std::uint64_t s = 1; s <= 100; ++s) EXPECT_NO_THROW(make_segment(-1.0, 1.0, random_convex_bump(s, 1.0), 64));
  PerturbationSpec none;
  none.none = true;
  EXPECT_TRUE(random_convex_bump(4, 1.0, none).empty());
  EXPECT_TRUE(random_convex_bump(0, 1.0).empty());
}

TEST(Discrete, FlatIntervalP2) {
  const auto r = discrete_first_eigenvalue(make_segment(0.0, std::numbers::pi, {}, 2048), PExponent(2.0));
  EXPECT_NEAR(r.lambda_h, 1.0, 5e-3);
}

TEST(Discrete, TridiagonalOracleP2) {
  for (std::size_t n : {256u, 2048u}) {
    const auto seg = make_segment(-1.0, 2.0, {}, n);
    const auto r = discrete_first_eigenvalue(seg, PExponent(2.0));
    EXPECT_NEAR(r.lambda_h / oracle::sturm_liouville_p2_nodal(seg.f(), seg.length()), 1.0, 1e-6) << "N=" << n;
  }
  BumpSpec b;
  b.terms.push_back({Bump::Kind::RampSquared, 1.0, -0.2});
  const auto seg = make_segment(-1.0, 1.0, b, 1024);
  EXPECT_NEAR(discrete_first_eigenvalue(seg, PExponent(2.0)).lambda_h /
                  oracle::sturm_liouville_p2_nodal(seg.f(), seg.length()),
              1.0, 1e-6);
}

TEST(Discrete, SharpnessInstanceP3) {
  const auto r = discrete_first_eigenvalue(make_segment(-1.0, 1.0, {}, 4096), PExponent(3.0));
  const double mu = mu_shoot(EigenQuery(3.0, -1.0, 1.0)).mu;
  EXPECT_LT(std::abs(r.lambda_h - mu) / mu, 1e-2);
}

TEST(Discrete, ResultInvariants) {
  for (double p : {1.5, 2.0, 3.0}) {
    const PExponent pe(p);
    const auto seg = make_segment(-1.0, 1.0, random_convex_bump(2, 1.0), 512);
    const auto r = discrete_first_eigenvalue(seg, pe);
    const DiscretePFunctional F(seg, pe);
    EXPECT_NEAR(F.energy(r.u) / F.pmass(r.u, 0.0), r.lambda_h, 1e-14 * r.lambda_h);
    EXPECT_LT(std::abs(r.mean_constraint), 1e-8);
    EXPECT_LE(r.residual, RayleighOptions{}.tol);
    EXPECT_DOUBLE_EQ(*std::min_element(r.u.begin(), r.u.end()), -1.0);
    EXPECT_LE(*std::max_element(r.u.begin(), r.u.end()), 1.0);
    EXPECT_DOUBLE_EQ(r.grid_spacing, seg.h());
  }
}

TEST(Discrete, RandomRestartsAgree) {
  for (double p : {1.5, 3.0}) {
    const PExponent pe(p);
    const auto seg = make_segment(-1.0, 1.0, random_convex_bump(5, 1.0), 512);
    const double ref = discrete_first_eigenvalue(seg, pe).lambda_h;
    for (std::uint64_t s = 1; s <= 5; ++s) {
      RayleighOptions o;
      o.seed = s;
      EXPECT_NEAR(discrete_first_eigenvalue(seg, pe, o).lambda_h / ref, 1.0, 1e-4) << "p=" << p << " seed=" << s;
    }
  }
}

TEST(Discrete, ScaleCovariance) {
  for (double p : {1.5, 2.0, 3.0}) {
    const PExponent pe(p);
    const auto seg = make_segment(-1.0, 1.0, random_convex_bump(7, 1.0), 512);
    const double l = discrete_first_eigenvalue(seg, pe).lambda_h;
    for (double s : {0.5, 2.0}) {
      const double ls = discrete_first_eigenvalue(rescale(seg, s), pe).lambda_h;
      EXPECT_NEAR(ls * std::pow(s, p) / l, 1.0, 1e-9);
    }
  }
}

TEST(Discrete, RefinementConverges) {
  for (double p : {1.5, 3.0}) {
    const PExponent pe(p);
    std::vector<double> l;
    for (std::size_t n : {256u, 512u, 1024u, 2048u}) l.push_back(discrete_first_eigenvalue(make_segment(-1.0, 1.0, {}, n), pe).lambda_h);
    for (std::size_t i = 1; i < l.size(); ++i) EXPECT_GT(l[i], l[i - 1]);  // from below, O(h^2)
    const double r1 = l[2] + (l[2] - l[1]) / 3, r2 = l[3] + (l[3] - l[2]) / 3;
    EXPECT_NEAR(r1 / r2, 1.0, 5e-4);
  }
}

TEST(Discrete, CircleMatchesKappaZeroModel) {
  for (double p : {2.0, 3.0}) {
    const PExponent pe(p);
    const double d = 1.0;
    const auto r = discrete_first_eigenvalue(make_circle(d, 1024), pe);
    EXPECT_NEAR(r.lambda_h / mu_closed_form_kappa0(pe, d), 1.0, 1e-3) << "p=" << p;
  }
}

TEST(Verify, CalibrationShrinksWithN) {
  const double e1 = calibrate_eps_h(256), e2 = calibrate_eps_h(512);
  EXPECT_GT(e1, 0.0);
  EXPECT_NEAR(e1 / e2, 4.0, 0.2);
}

TEST(Verify, LowerBoundOnModelAndPerturbed) {
  const PExponent p(3.0);
  const auto model = make_segment(-1.0, 1.0, {}, 1024);
  const auto rm = check_lower_bound(model, p, discrete_first_eigenvalue(model, p));
  EXPECT_FALSE(rm.violation);
  EXPECT_LT(std::abs(rm.relative_margin), 1e-5);
  EXPECT_EQ(rm.regime, Regime::SharpProved);

  const auto seg = make_segment(-1.0, 1.0, random_convex_bump(11, 1.0), 1024);
  const auto rp = check_lower_bound(seg, p, discrete_first_eigenvalue(seg, p));
  EXPECT_FALSE(rp.violation);
  EXPECT_GT(rp.relative_margin, rm.relative_margin);
  EXPECT_GT(rp.eps_h.refinement, 0.0);
}

TEST(Verify, OffCentreRestrictionIncreasesMargin) {
  // model f on [-1/2, 1/2] restricted to [-1/2, 3/10]: no longer the model, so the margin grows
  const PExponent p(1.5);
  const auto full = make_segment(-1.0, 1.0, {}, 1000);
  const std::vector<double> f(full.f().begin(), full.f().begin() + 801);
  const WeightedSegment sub(0.8, f, -1.0);
  const auto a = check_lower_bound(full, p, discrete_first_eigenvalue(full, p));
  const auto b = check_lower_bound(sub, p, discrete_first_eigenvalue(sub, p));
  EXPECT_GT(b.relative_margin, a.relative_margin + 1e-4);
  EXPECT_FALSE(b.violation);
}

TEST(Verify, SelectModelProfile) {
  const ModelParams mp(1.5, -1.0, 8.0);
  for (double um : {1.0, 0.8, 0.5, 0.2}) {
    const auto sol = select_model_profile(mp, um);
    ASSERT_TRUE(sol.geometry.reached());
    EXPECT_NEAR(sol.geometry.m, std::min(um, 1.0), 1e-9);
  }
  EXPECT_THROW(select_model_profile(mp, 1.5), RangeContainment);
  EXPECT_THROW(select_model_profile(mp, 0.0), RangeContainment);
}

TEST(Verify, GradientComparisonModelSegment) {
  for (double p : {1.5, 2.0, 3.0}) {
    const PExponent pe(p);
    const auto seg = make_segment(-1.0, 1.0, {}, 2048);
    const auto res = discrete_first_eigenvalue(seg, pe);
    const auto g = check_gradient_comparison(seg, pe, res);
    EXPECT_TRUE(g.passed()) << "p=" << p << " max violation " << g.max_violation;
    EXPECT_LT(std::abs(g.max_violation), g.tolerance_h);  // equality up to discretisation
    EXPECT_NEAR(g.model_a, -0.5, 1e-3);
  }
}

TEST(Verify, GradientComparisonPerturbed) {
  const PExponent pe(2.0);
  for (std::uint64_t s : {1u, 2u, 3u}) {
    const auto seg = make_segment(-1.0, 1.0, random_convex_bump(s, 1.0), 4096);
    const auto g = check_gradient_comparison(seg, pe, discrete_first_eigenvalue(seg, pe));
    EXPECT_TRUE(g.passed()) << "seed " << s;
  }
}

TEST(Verify, GradientComparisonGuards) {
  const PExponent pe(2.0);
  const auto seg = make_segment(-1.0, 1.0, random_convex_bump(1, 1.0), 256);
  const auto res = discrete_first_eigenvalue(seg, pe);
  auto flat = res;
  std::fill(flat.u.begin(), flat.u.end(), 0.0);
  const ModelParams mp(pe, -1.0, res.lambda_h);
  EXPECT_THROW(check_gradient_comparison(seg, flat, select_model_profile(mp, 0.5)), DomainError);
  const double um = *std::max_element(res.u.begin(), res.u.end());
  EXPECT_THROW(check_gradient_comparison(seg, res, select_model_profile(mp, 0.5 * um)), RangeContainment);
}

TEST(Verify, Lichnerowicz) {
  {
    const PExponent p(2.0);
    const auto seg = make_segment(1.0, 4.0, {}, 1024);
    const auto r = check_lichnerowicz(seg, p, discrete_first_eigenvalue(seg, p));
    EXPECT_TRUE(r.passed());
    EXPECT_GE(r.lambda_h, 1.0);
    EXPECT_DOUBLE_EQ(r.bound, r.wang_li);
  }
  {
    const PExponent p(3.0);
    const auto seg = make_segment(2.0, 2.0, {}, 1024);
    const auto r = check_lichnerowicz(seg, p, discrete_first_eigenvalue(seg, p));
    EXPECT_TRUE(r.passed());
    EXPECT_GE(r.lambda_h, 1.0);
  }
  const auto neg = make_segment(-1.0, 1.0, {}, 64);
  const PExponent p3(3.0);
  EXPECT_THROW(check_lichnerowicz(neg, p3, discrete_first_eigenvalue(neg, p3)), DomainError);
}

TEST(Campaign, SmallRunSortedAndClean) {
  CampaignSpec s;
  s.p = {3.0, 1.5};
  s.n_list = {512, 256};
  s.seeds = {2, 1};
  const auto recs = run_campaign(s);
  ASSERT_EQ(recs.size(), 8u);
  EXPECT_EQ(recs.front().p, 1.5);
  EXPECT_EQ(recs.front().seed, 1u);
  EXPECT_EQ(recs.front().n_cells, 256u);
  for (const auto& r : recs) {
    EXPECT_TRUE(r.ok()) << r.error;
    EXPECT_TRUE(r.grad_violations.has_value());
  }
}

TEST(Campaign, SharpnessStudy) {
  const auto r = sharpness_study(PExponent(2.0), -1.0, 2.0, {512, 256, 1024});
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.rows.front().n_cells, 256u);
  EXPECT_TRUE(r.margin_decreasing());
  EXPECT_NEAR(r.mu, 2.0, 1e-7);
}
