#include "cornerlab/compatibility.hpp"
#include "cornerlab/errors.hpp"
#include "cornerlab/estimates_harness.hpp"
#include "cornerlab/expr.hpp"
#include "cornerlab/lifting_ops.hpp"
#include "cornerlab/numerics.hpp"
#include "cornerlab/sobolev_norms.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace cornerlab;
using testutil::sample;

namespace {

LineSamples gaussian(double shift = 0.0, double width = 1.0) {
  return sample([=](double x) { return std::exp(-(x - shift) * (x - shift) / (width * width)); }, -24, 24, 384);
}

// Mexican-hat style wavelet bump.
LineSamples wavelet() {
  return sample([](double x) { return (1.0 - x * x) * std::exp(-0.5 * x * x); }, -24, 24, 384);
}

}  // namespace

TEST_CASE("cutoff jets at zero") {
  for (int m = 0; m <= 4; ++m) {
    const CutoffSpec chi = make_cutoff(m);
    const Eigen::VectorXd d = chi.profile->derivatives(0.0, 6);
    for (int k = 0; k <= 6; ++k) {
      CAPTURE(m);
      CAPTURE(k);
      CHECK(d(k) == doctest::Approx(k == m ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
    }
    for (double t : {1.0, 1.3, 5.0}) CHECK(chi(t) == 0.0);
  }
  const CutoffSpec c2 = make_cutoff(2, 0.5);
  CHECK(c2(0.2) == doctest::Approx(0.02));
  CHECK(c2(0.5) == 0.0);
  CHECK_THROWS_AS(make_cutoff(-1), std::invalid_argument);
}

TEST_CASE("lift of zero is zero") {
  const LineSamples z{Eigen::VectorXd::Zero(129), 0.125, -8.0};
  LiftOptions o;
  o.measure_norms = false;
  const PlaneFn R = lift_rm(z, 1, 2.0, 0.5, o);
  CHECK(R.samples.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lift traces on Gaussians and wavelets") {
  LiftOptions o;
  o.measure_norms = false;
  o.half_range = true;
  for (const LineSamples& g : {gaussian(), gaussian(1.5, 0.7), wavelet()}) {
    const double gmax = g.values.cwiseAbs().maxCoeff();
    for (int m = 0; m <= 2; ++m)
      for (double lambda : {1.0, 4.0}) {
        const PlaneFn R = lift_rm(g, m, lambda, 0.5, o);
        const Eigen::MatrixXd J = time_jets_at_zero(R, m + 1, m + 3);
        CAPTURE(m);
        CAPTURE(lambda);
        CHECK((J.col(m) - g.values).cwiseAbs().maxCoeff() <= 1e-6 * gmax);
        for (int d = 0; d <= m + 1; ++d)
          if (d != m) CHECK(J.col(d).cwiseAbs().maxCoeff() <= 1e-6 * gmax);
      }
  }
}

TEST_CASE("lift guards") {
  const LineSamples narrow = sample([](double x) { return std::exp(-x * x); }, -2, 2, 64);
  CHECK_THROWS_AS(lift_rm(narrow, 1, 1.0, 0.5), NumericalGuardError);
  const LineSamples coarse = sample([](double x) { return std::exp(-x * x) * std::cos(7 * x); }, -24, 24, 96);
  CHECK_THROWS_WITH_AS(lift_rm(coarse, 1, 1.0, 0.5), doctest::Contains("not resolved"), NumericalGuardError);
  CHECK_THROWS_AS(lift_rm(gaussian(), 1, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("lift smallness in lambda") {
  const LineSamples g = gaussian();
  for (int m = 0; m <= 2; ++m) {
    const double target = std::pow(2.0, -(m - 0.5) - 0.5);
    double prev = lift_norm(g, m, 4.0, 0.5);
    for (double lambda : {8.0, 16.0}) {
      const double cur = lift_norm(g, m, lambda, 0.5);
      CAPTURE(m);
      CAPTURE(lambda);
      CHECK(cur / prev == doctest::Approx(target).epsilon(0.2));
      prev = cur;
    }
  }
}

TEST_CASE("lift bound ratio is uniform in lambda") {
  const LineSamples g = gaussian();
  for (int m = 0; m <= 1; ++m)
    for (double s : {0.25, 0.5, 1.0}) {
      double lo = 1e300, hi = 0.0;
      for (double lambda : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        const double r = lift_rm(g, m, lambda, s).diagnostics.at("bound_ratio");
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      CAPTURE(m);
      CAPTURE(s);
      CHECK(hi <= 1.2 * lo);
    }
}

TEST_CASE("odd extension") {
  const LineSamples u = sample("x*exp(-x)", 0, 4, 64);
  const LineSamples v = odd_extension(u);
  CHECK(v.size() == 129);
  CHECK(v.x0 == doctest::Approx(-4.0));
  const int at_minus_one = 64 - 16;
  CHECK(v.values(at_minus_one) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-12));
  for (int i = 0; i <= 64; ++i) CHECK(v.values(64 - i) == -v.values(64 + i));
  CHECK(odd_extension(LineSamples{Eigen::VectorXd::Zero(9), 0.5, 0.0}).values.cwiseAbs().maxCoeff() == 0.0);

  const LineSamples jump = odd_extension(sample("exp(-x)", 0, 2, 1024));
  CHECK(gagliardo_seminorm(jump, 0.5).verdict == Verdict::divergent);
  CHECK(gagliardo_seminorm(jump, 0.25).verdict == Verdict::finite);
}

TEST_CASE("corner lift recovers both traces") {
  const DataTriple d = make_triple({"x*exp(-x)"}, {"t*exp(-t)"}, {}, 12.0, 12.0, 3072, 3072);
  CornerLiftOptions o;
  o.padding = 2;
  const PlaneFn R = corner_lift(d.u0, d.g, 0.75, o);
  CHECK(R.diagnostics.at("trace_t0_error") <= 1e-4);
  CHECK(R.diagnostics.at("trace_y0_error") <= 1e-4);
  CHECK(R.diagnostics.at("r0_boundary_trace") <= 1e-10);
  const LineSamples t0{R.samples.col(0) - d.u0.samples.col(0), R.h, 0.0};
  CHECK(l2_norm(t0) <= 1e-4);
}

TEST_CASE("corner lift of zero data and the membership gate") {
  const DataTriple z = make_triple({"0"}, {"0"}, {}, 2.0, 2.0, 128, 128);
  CHECK(corner_lift(z.u0, z.g, 0.5).samples.cwiseAbs().maxCoeff() == 0.0);

  const DataTriple jump = make_triple({"eta(x,0.5,1)"}, {"0"}, {}, 2.0, 2.0, 512, 512);
  CHECK_THROWS_WITH_AS(corner_lift(jump.u0, jump.g, 0.5), doctest::Contains("corner data incompatible"), DataError);
  CHECK_THROWS_AS(corner_lift(jump.u0, jump.g, 0.75), DataError);
  CHECK_NOTHROW(corner_lift(jump.u0, jump.g, 0.25));
}

TEST_CASE("synthesis on e^-x, e^-t") {
  const SystemSpec toy = SystemSpec::toy();
  const DataTriple d = make_triple({"exp(-x)"}, {"exp(-t)"}, {}, 4.0, 4.0, 512, 512);
  const SynthesisResult s = synthesize_compatible_data(toy, d, 1, 3, 4.0);
  REQUIRE(s.corrections.size() == 2);
  CHECK(s.corrections[0](0) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(s.corrections[1](0) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  CHECK(compat_report(toy, s.data, 3.0).verified_order >= 3.0);
  for (int j = 2; j <= 3; ++j) CHECK(std::abs(check_cc_order(j, toy, s.data).residual(0)) <= 1e-10);

  const SynthesisResult again = synthesize_compatible_data(toy, s.data, 1, 3, 4.0);
  for (const auto& c : again.corrections) CHECK(c.norm() <= 1e-10);
  CHECK((again.data.g.samples - s.data.g.samples).cwiseAbs().maxCoeff() == 0.0);
  CHECK(again.correction_norm == 0.0);

  double prev = 1e300;
  for (double lambda : {2.0, 4.0, 8.0}) {
    const double n = synthesize_compatible_data(toy, d, 1, 3, lambda).correction_norm;
    CHECK(n < prev);
    prev = n;
  }
}

TEST_CASE("synthesis of compatible data is the identity") {
  const SystemSpec toy = SystemSpec::toy();
  const DataTriple d = make_triple({"sin(x)"}, {"-sin(t)"}, {}, 4.0, 4.0, 256, 256);
  const SynthesisResult s = synthesize_compatible_data(toy, d, 1, 4);
  for (const auto& c : s.corrections) CHECK(c.norm() <= 1e-12);
  CHECK((s.data.g.samples - d.g.samples).cwiseAbs().maxCoeff() == 0.0);
  const DataTriple bad = make_triple({"exp(-x)"}, {"0"}, {}, 4.0, 4.0, 256, 256);
  CHECK_THROWS_AS(synthesize_compatible_data(toy, bad, 1, 3), DataError);
}

TEST_CASE("approximate solution") {
  const SystemSpec toy = SystemSpec::toy();
  const DataTriple d = make_triple({"exp(-x)"}, {"exp(-t)"}, {}, 4.0, 4.0, 400, 400);
  const auto v = taylor_coefficients(toy, d, 2);
  const CutoffSpec chi = make_cutoff(0);
  const Field2D u = approximate_solution(v, chi, 1.0, 1000);
  CHECK(u.components[0](0, 100) == doctest::Approx(1.105 * chi(0.1)).epsilon(1e-9));

  // Time jets at t = 0 reproduce v_j.
  PlaneFn P;
  P.samples = u.components[0];
  P.k = u.k;
  const Eigen::MatrixXd J = time_jets_at_zero(P, 2, 6);
  for (int j = 0; j <= 2; ++j)
    CHECK((J.col(j) - v[j].samples.col(0).head(u.N() + 1)).cwiseAbs().maxCoeff() <= 1e-6);

  // L u_app - f vanishes to order m - 2 = 1 at t = 0 and not beyond.
  const Eigen::MatrixXd r = num::fd_derivative_cols(u.components[0], u.k, 1) +
                            num::fd_derivative_rows(u.components[0], u.h, 1);
  PlaneFn Rp;
  Rp.samples = r;
  Rp.k = u.k;
  const Eigen::MatrixXd Jr = time_jets_at_zero(Rp, 2, 8);
  const Eigen::MatrixXd interior = Jr.middleRows(10, u.N() - 20);
  CHECK(interior.col(0).cwiseAbs().maxCoeff() <= 1e-3);
  CHECK(interior.col(1).cwiseAbs().maxCoeff() <= 1e-2);
  CHECK(interior.col(2).cwiseAbs().maxCoeff() >= 0.1);

  std::vector<SampledHalfLine> zeros(3, SampledHalfLine::zeros(1, 4.0, 400, 0));
  CHECK(approximate_solution(zeros, chi, 1.0, 100).components[0].cwiseAbs().maxCoeff() == 0.0);
}
