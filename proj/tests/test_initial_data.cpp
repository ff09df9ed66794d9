#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vpfocus/initial_data.hpp"

using namespace vpfocus;

namespace {

ClassSpec desk_spec() { return ClassSpec::make(1.0, -25.0, 0.2); }

// Cartesian oracle for the velocity integral of f0 at |x| = r: midpoint rule
// on the cube of side 2 eps/a0 around the support center (a1/a0) x.
double velocity_integral(const InitialDatum& f0, double r, int n) {
  const ClassSpec& s = f0.spec();
  const Vec3 x{r, 0.0, 0.0};
  const double half = s.eps / s.a0;
  const double h = 2.0 * half / n;
  const double cx = s.a1 / s.a0 * r;
  std::vector<double> plane;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const Vec3 v{cx - half + (i + 0.5) * h, -half + (j + 0.5) * h, -half + (k + 0.5) * h};
        acc += f0.evaluate(x, v);
      }
    }
    plane.push_back(acc);
  }
  return pairwise_sum(plane) * h * h * h;
}

}  // namespace

TEST(ClassSpec, DerivedFieldsFollowTheConstruction) {
  const ClassSpec s = desk_spec();
  EXPECT_DOUBLE_EQ(s.delta_r, 0.008);
  EXPECT_DOUBLE_EQ(s.delta_w, 0.4);
  EXPECT_FALSE(s.is_mass_class());
  EXPECT_THROW(ClassSpec::make(0.0, -1.0, 0.1), ParameterError);
  EXPECT_THROW(ClassSpec::make(1.0, 1.0, 0.1), ParameterError);
  EXPECT_THROW(ClassSpec::make(1.0, -1.0, 0.0), ParameterError);
  EXPECT_THROW(ClassSpec::make(1.0, -1.0, 0.1, -2.0), ParameterError);
}

TEST(DerivedBounds, DeskExample) {
  const DerivedBounds b = derived_bounds(desk_spec());
  EXPECT_DOUBLE_EQ(b.delta_w, 0.4);
  EXPECT_DOUBLE_EQ(b.mass_lower, 0.024);
  EXPECT_DOUBLE_EQ(b.mass_upper, 0.064);
  EXPECT_DOUBLE_EQ(b.ell_max(1.0), 0.04);
  EXPECT_DOUBLE_EQ(b.ell_max(2.0), 0.16);
}

TEST(DerivedBounds, VelocitySpreadIsTwoEpsOverA0WhenA1IsMinusEpsToTheMinus2) {
  for (double eps : {0.3, 0.1, 0.01, 1e-3}) {
    for (double a0 : {0.5, 1.0, 4.0}) {
      const ClassSpec s = ClassSpec::make(a0, -1.0 / (eps * eps), eps);
      EXPECT_NEAR(derived_bounds(s).delta_w, 2.0 * eps / a0, 1e-15 * (2.0 * eps / a0));
    }
  }
}

TEST(ProfileH, SupportAndNormalization) {
  const ProfileH h = ProfileH::bump();
  EXPECT_EQ(h(1.0), 0.0);
  EXPECT_EQ(h(1.5), 0.0);
  EXPECT_EQ(h(-0.1), 0.0);
  EXPECT_GT(h(0.0), 0.0);
  EXPECT_NEAR(profile_normalization(h, 1.0), 3.0 / (4.0 * pi), 1e-12);
}

TEST(ProfileH, CustomShapesAreNormalized) {
  const ProfileH h = ProfileH::from_shape([](double s) { return s < 1.0 ? (1.0 - s) * (1.0 - s) : 0.0; });
  EXPECT_NEAR(profile_normalization(h, 1.0), 3.0 / (4.0 * pi), 1e-12);
  EXPECT_THROW(ProfileH::from_shape([](double) { return 0.0; }), ParameterError);
}

TEST(RescaleProfile, UnitEpsIsTheIdentity) {
  const ProfileH h = ProfileH::bump();
  const RescaledProfile h1 = rescale_profile(h, 1.0);
  for (double s : {0.0, 0.1, 0.37, 0.9, 0.999, 1.0, 2.0}) EXPECT_EQ(h1(s), h(s));
}

TEST(RescaleProfile, NormalizationIsPreserved) {
  const ProfileH h = ProfileH::bump();
  for (double eps : {1.0, 0.5, 0.2, 0.05, 1e-3}) {
    const RescaledProfile he = rescale_profile(h, eps);
    EXPECT_NEAR(profile_normalization(he, eps) / (3.0 / (4.0 * pi)), 1.0, 1e-10) << "eps=" << eps;
    EXPECT_EQ(he.support_bound(), eps * eps);
  }
}

TEST(RescaleProfile, OutsideTheRescaledSupport) {
  const RescaledProfile he = rescale_profile(ProfileH::bump(), 0.5);
  EXPECT_EQ(he(0.3), 0.0);  // 0.3 / 0.25 = 1.2 > 1
  EXPECT_EQ(he(0.0), 8.0 * ProfileH::bump()(0.0));
  EXPECT_THROW(rescale_profile(ProfileH::bump(), 0.0), ParameterError);
  EXPECT_THROW(rescale_profile(ProfileH::bump(), -1.0), ParameterError);
}

TEST(CutoffPhi, LevelSets) {
  const CutoffPhi phi(1.0, 0.1);
  for (double r : {0.85, 0.9, 1.1, 1.2, 0.5}) EXPECT_EQ(phi(r), 0.0) << r;
  for (double r : {0.951, 0.97, 1.0, 1.03, 1.049}) EXPECT_EQ(phi(r), 1.0) << r;
  for (int k = 0; k <= 400; ++k) {
    const double r = 0.88 + 0.24 * k / 400.0;
    EXPECT_GE(phi(r), 0.0);
    EXPECT_LE(phi(r), 1.0);
  }
  // monotone on the rising edge
  double prev = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double v = phi(0.9 + 0.05 * k / 100.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(EvaluateF0, VanishesOutsideTheShell) {
  const InitialDatum f0 = InitialDatum::canonical(desk_spec());
  const ClassSpec s = desk_spec();
  const double r = s.a0 + 2.0 * s.delta_r;
  for (double vx : {-30.0, -25.0, 0.0, 3.0}) EXPECT_EQ(f0.evaluate({r, 0, 0}, {vx, 0.1, 0}), 0.0);
  EXPECT_THROW(f0.evaluate({0, 0, 0}, {1, 0, 0}), DomainError);
}

TEST(EvaluateF0, SupportCenterTakesThePeakValue) {
  const ClassSpec s = desk_spec();
  const InitialDatum f0 = InitialDatum::canonical(s);
  const Vec3 x{0.0, 0.6, 0.8};
  const Vec3 v{0.0, s.a1 / s.a0 * 0.6, s.a1 / s.a0 * 0.8};
  const double expected = ProfileH::bump()(0.0) / (s.eps * s.eps * s.eps);
  EXPECT_NEAR(f0.evaluate(x, v), expected, 1e-14 * expected);
  // reduced and Cartesian evaluation agree
  const RadialCoordinates c = to_radial({0.3, 0.4, 0.0}, {-7.0, -10.1, 0.05});
  EXPECT_DOUBLE_EQ(f0(c), f0.evaluate({0.3, 0.4, 0.0}, {-7.0, -10.1, 0.05}));
}

TEST(EvaluateF0, PlateauDensityByCartesianQuadrature) {
  const ClassSpec s = ClassSpec::make(1.0, -25.0, 0.2);
  const InitialDatum f0 = InitialDatum::canonical(s);
  const double expected = 3.0 / (4.0 * pi);
  const double got = velocity_integral(f0, s.a0, 96);
  EXPECT_NEAR(got / expected, 1.0, 1e-6);
}

TEST(Density, ReducedMarginalMatchesThePlateauValue) {
  for (const ClassSpec& s : {ClassSpec::make(1.0, -25.0, 0.2), ClassSpec::make(2.0, -3.0, 0.5)}) {
    const InitialDatum f0 = InitialDatum::canonical(s);
    const double bound = s.rho_bound();
    for (double off : {-0.5, -0.25, 0.0, 0.3, 0.5}) {
      EXPECT_NEAR(f0.density(s.a0 + off * s.delta_r) / bound, 1.0, 1e-6) << off;
    }
    EXPECT_LE(f0.density(s.a0 + 0.8 * s.delta_r), bound * (1.0 + 1e-6));
    EXPECT_EQ(f0.density(s.a0 + 1.5 * s.delta_r), 0.0);
  }
}

TEST(Membership, CanonicalConstructionPasses) {
  const ClassSpec s = desk_spec();
  const MembershipReport report = check_membership(s, probe_datum(InitialDatum::canonical(s)));
  for (const CheckOutcome& c : report.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.witness;
  EXPECT_TRUE(report.passed());
}

TEST(Membership, MassClassPasses) {
  const ClassSpec s = ClassSpec::make(2.0, -5.0, 0.3, 1.0);
  const MembershipReport report = check_membership(s, probe_datum(InitialDatum::canonical(s)));
  for (const CheckOutcome& c : report.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.witness;
  ASSERT_NE(report.find("total_mass"), nullptr);
  EXPECT_EQ(report.find("density_bound"), nullptr);
}

TEST(Membership, RandomParametersPass) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> a0d(0.3, 5.0), a1d(-50.0, -0.5), epsd(0.02, 0.95);
  ProbeResolution probe;
  probe.support = {12, 24, 12};
  probe.n_radii = 9;
  probe.nw = probe.nl = 256;
  MembershipTolerances tol;
  tol.density_rel = 1e-5;  // coarser probe than the default
  for (int k = 0; k < 12; ++k) {
    const ClassSpec s = ClassSpec::make(a0d(rng), a1d(rng), epsd(rng));
    const MembershipReport report = check_membership(s, probe_datum(InitialDatum::canonical(s), probe), tol);
    for (const CheckOutcome& c : report.checks) {
      EXPECT_TRUE(c.passed) << "a0=" << s.a0 << " a1=" << s.a1 << " eps=" << s.eps << " " << c.name << ": " << c.witness;
    }
  }
}

TEST(Membership, ShiftedSupportFailsWithWitness) {
  const ClassSpec s = desk_spec();
  SampledDatum d = probe_datum(InitialDatum::canonical(s));
  for (SupportSample& p : d.support) p.at.r += s.a0;  // shell now centered at 2 a0
  const MembershipReport report = check_membership(s, d);
  const CheckOutcome* c = report.find("shell_radius");
  ASSERT_NE(c, nullptr);
  EXPECT_FALSE(c->passed);
  EXPECT_EQ(c->severity, Severity::hard);
  EXPECT_EQ(c->violations, d.support.size());
  EXPECT_EQ(c->witness.rfind("(r=", 0), 0u) << c->witness;
  EXPECT_FALSE(report.passed());
}

TEST(Membership, InflatedDensityFailsTheBound) {
  const ClassSpec s = desk_spec();
  SampledDatum d = probe_datum(InitialDatum::canonical(s));
  for (DensitySample& p : d.density) p.rho *= 1.1;
  const MembershipReport report = check_membership(s, d);
  const CheckOutcome* c = report.find("density_bound");
  ASSERT_NE(c, nullptr);
  EXPECT_FALSE(c->passed);
  EXPECT_EQ(c->severity, Severity::tolerance);
  EXPECT_FALSE(c->witness.empty());
  // support conditions are untouched
  EXPECT_TRUE(report.find("suppcond")->passed);
}

TEST(Membership, WrongMassIsReported) {
  const ClassSpec s = ClassSpec::make(1.0, -4.0, 0.3, 2.0);
  SampledDatum d = probe_datum(InitialDatum::canonical(s));
  *d.mass *= 1.001;
  const CheckOutcome* c = check_membership(s, d).find("total_mass");
  ASSERT_NE(c, nullptr);
  EXPECT_FALSE(c->passed);
}

TEST(Sampler, ZeroProfileIsAnEmptyEnsembleError) {
  EXPECT_THROW(sample_ensemble(InitialDatum(desk_spec(), ProfileH::zero()), {4, 4, 4}), EmptyEnsembleError);
}

TEST(Sampler, RejectsTooCoarseResolution) {
  EXPECT_THROW(sample_ensemble(desk_spec(), ProfileH::bump(), {1, 4, 4}), ParameterError);
}

TEST(Sampler, MassClassHitsTheTarget) {
  for (double m : {1.0, 32.0, 1e-3}) {
    const ClassSpec s = ClassSpec::make(1.5, -10.0, 0.25, m);
    const Ensemble e = sample_ensemble(s, ProfileH::bump(), {10, 16, 10});
    EXPECT_NEAR(e.total_mass(), m, 1e-12 * m);
  }
}

TEST(Sampler, EveryShellSitsInsideTheOpenSupport) {
  const ClassSpec s = desk_spec();
  const Ensemble e = sample_ensemble(s);
  const double ratio = s.a0 / std::abs(s.a1);
  const DerivedBounds db = derived_bounds(s);
  ASSERT_GT(e.size(), 10000u);
  for (const Shell& sh : e.shells()) {
    const RadialCoordinates& c = sh.coords;
    const double x = c.r + ratio * c.w;
    ASSERT_LT(x * x + c.ell / (c.r * c.r) * ratio * ratio, s.eps * s.eps / (s.a1 * s.a1));
    ASSERT_GT(c.ell, 0.0);
    ASSERT_GT(c.r, s.a0 - s.delta_r);
    ASSERT_LT(c.r, s.a0 + s.delta_r);
    ASSERT_GT(c.w, s.a1 - db.delta_w);
    ASSERT_LT(c.w, s.a1 + db.delta_w);
    ASSERT_GT(sh.weight, 0.0);
  }
}

TEST(Sampler, MassSandwichHoldsAcrossResolutions) {
  for (const ClassSpec& s : {ClassSpec::make(1.0, -25.0, 0.2), ClassSpec::make(0.7, -100.0, 0.1)}) {
    const DerivedBounds db = derived_bounds(s);
    for (SampleResolution res : {SampleResolution{8, 12, 8}, SampleResolution{16, 24, 16}, SampleResolution{24, 40, 24}}) {
      const double m = sample_ensemble(s, ProfileH::bump(), res).total_mass();
      EXPECT_GE(m, db.mass_lower);
      EXPECT_LE(m, db.mass_upper);
    }
  }
}

TEST(Sampler, SampledMassConvergesToTheContinuumMass) {
  // Continuum mass: int rho0(r) 4 pi r^2 dr with the reduced marginal.
  const ClassSpec s = desk_spec();
  const InitialDatum f0 = InitialDatum::canonical(s);
  const int n = 64;
  std::vector<double> terms;
  for (int i = 0; i < n; ++i) {
    const double r = s.a0 - s.delta_r + 2.0 * s.delta_r * (i + 0.5) / n;
    terms.push_back(f0.density(r, 256, 256) * 4.0 * pi * r * r * 2.0 * s.delta_r / n);
  }
  const double continuum = pairwise_sum(terms);
  const double coarse = quadrature_mass(f0, {12, 20, 12});
  const double fine = quadrature_mass(f0, {48, 80, 48});
  EXPECT_LT(std::abs(fine - continuum), std::abs(coarse - continuum));
  EXPECT_NEAR(fine / continuum, 1.0, 2e-3);
}

TEST(Sampler, IsDeterministic) {
  const Ensemble a = sample_ensemble(desk_spec(), ProfileH::bump(), {8, 10, 8});
  const Ensemble b = sample_ensemble(desk_spec(), ProfileH::bump(), {8, 10, 8});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].coords, b[i].coords);
    EXPECT_EQ(a[i].weight, b[i].weight);
    EXPECT_EQ(a[i].id, b[i].id);
  }
}
