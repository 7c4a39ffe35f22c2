#include "cornerlab/compatibility.hpp"
#include "cornerlab/errors.hpp"
#include "cornerlab/estimates_harness.hpp"
#include "cornerlab/expr.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cornerlab;

namespace {

DataTriple toy_triple(const std::string& u0, const std::string& g, int jet_order = 6, ForcingSpec f = {}) {
  return make_triple({u0}, {g}, f, 4.0, 4.0, 512, 512, jet_order);
}

ForcingTerm term(Eigen::VectorXd c, const std::string& fx, const std::string& ft) {
  return {std::move(c), parse_function(fx), parse_function(ft, "t")};
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd r(v.size());
  int i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

}  // namespace

TEST_CASE("required order at s") {
  CHECK(required_compat_order(0.4) == 0.0);
  CHECK(required_compat_order(0.5) == 0.5);
  CHECK(required_compat_order(1.0) == 1.0);
  CHECK(required_compat_order(1.25) == 1.0);
  CHECK(required_compat_order(1.5) == 1.5);
  CHECK(required_compat_order(1.75) == 2.0);
  CHECK(required_compat_order(2.5) == 2.5);
}

TEST_CASE("zero data gives zero coefficients and residuals") {
  const DataTriple d = toy_triple("0", "0");
  for (const auto& v : taylor_coefficients(SystemSpec::toy(), d, 4)) CHECK(v.samples.cwiseAbs().maxCoeff() == 0.0);
  for (int j = 1; j <= 4; ++j) CHECK(check_cc_order(j, SystemSpec::toy(), d).residual.norm() == 0.0);
  CHECK(compat_report(SystemSpec::toy(), d, 3.5).verified_order == 3.5);
}

TEST_CASE("toy recursion on e^-x keeps e^-x") {
  const DataTriple d = toy_triple("exp(-x)", "0");
  const auto v = taylor_coefficients(SystemSpec::toy(), d, 4);
  REQUIRE(v.size() == 5);
  for (int j = 0; j <= 4; ++j) {
    CAPTURE(j);
    CHECK(v[j].samples(0, 0) == doctest::Approx(1.0));
    CHECK(v[j].samples(128, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
    REQUIRE(v[j].jet_rows() >= 1);
    CHECK((*v[j].boundary_jet)(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("two-component recursion step") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, -1;
  Eigen::MatrixXd B(1, 2);
  B << 0, 1;
  const SystemSpec spec = SystemSpec::constant(A, B);
  const DataTriple d = make_triple({"sin(x)", "cos(x)"}, {"0"}, {}, 4.0, 4.0, 512, 512, 6);
  const auto v = taylor_coefficients(spec, d, 1);
  const int i = 100;
  const double x = i * d.u0.h;
  CHECK(v[1].samples(i, 0) == doctest::Approx(std::cos(x)).epsilon(1e-6));
  CHECK(v[1].samples(i, 1) == doctest::Approx(std::sin(x)).epsilon(1e-6));
}

TEST_CASE("toy residuals for e^-x and e^-t") {
  const DataTriple d = toy_triple("exp(-x)", "exp(-t)");
  const OrderResidual e1 = check_cc_order(1, SystemSpec::toy(), d);
  CHECK(e1.residual(0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(e1.pass);
  const OrderResidual e2 = check_cc_order(2, SystemSpec::toy(), d);
  CHECK(e2.residual(0) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK_FALSE(e2.pass);
  const CompatReport r = compat_report(SystemSpec::toy(), d, 3.0);
  CHECK(r.verified_order == 1.0);
  CHECK(r.hierarchy_consistent);
}

TEST_CASE("jet underflow is reported") {
  const DataTriple d = toy_triple("exp(-x)", "exp(-t)", 1);
  CHECK_THROWS_WITH_AS(check_cc_order(4, SystemSpec::toy(), d), doctest::Contains("jet underflow"), DataError);
}

TEST_CASE("half-order checks") {
  const SystemSpec toy = SystemSpec::toy();
  CHECK(check_cc_half_order(1, toy, toy_triple("exp(-x)", "exp(-t)")).verdict == Verdict::finite);
  CHECK(check_cc_half_order(1, toy, toy_triple("x^0.3*eta(x,0.5,1)", "0")).verdict == Verdict::finite);
  CHECK(check_cc_half_order(1, toy, toy_triple("eta(x,0.5,1)", "0")).verdict == Verdict::divergent);
  CHECK(check_cc_half_order(2, toy, toy_triple("exp(-x)", "exp(-t)")).verdict == Verdict::divergent);
  CHECK_THROWS_WITH_AS(check_cc_half_order(2, toy, toy_triple("eta(x,0.5,1)", "0")),
                       doctest::Contains("lower-order CC violated"), DataError);
}

TEST_CASE("matched first jets reach order two") {
  const CompatReport r = compat_report(SystemSpec::toy(), toy_triple("x*eta(x,0.5,1)", "-t*eta(t,0.5,1)"), 3.0);
  CHECK(r.verified_order >= 2.0);
}

TEST_CASE("toy closed form of the residuals") {
  // eps_j = g^(j-1)(0) - (-1)^(j-1) u0^(j-1)(0).
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"exp(-2*x)*cos(x)", "sin(3*t)+1"}, {"x^3-2*x+1", "exp(t)"}, {"cos(x)", "cos(t)"}, {"(1+x)^-1", "t^4"}};
  for (const auto& [a, b] : pairs) {
    const DataTriple d = toy_triple(a, b, 8);
    const auto fu = parse_function(a);
    const auto fg = parse_function(b, "t");
    const Eigen::VectorXd du = fu->derivatives(0.0, 5), dg = fg->derivatives(0.0, 5);
    for (int j = 1; j <= 5; ++j) {
      const double expected = dg(j - 1) - ((j - 1) % 2 ? -1.0 : 1.0) * du(j - 1);
      CAPTURE(a);
      CAPTURE(j);
      CHECK(check_cc_order(j, SystemSpec::toy(), d).residual(0) ==
            doctest::Approx(expected).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("residuals are linear in the data") {
  ForcingSpec f1, f2, f12;
  f1.terms.push_back(term(vec({1.0}), "exp(-x)", "cos(t)"));
  f2.terms.push_back(term(vec({-0.5}), "sin(x)", "t^2"));
  f12.terms = {f1.terms[0], f2.terms[0]};
  const DataTriple a = toy_triple("exp(-x)", "sin(t)", 6, f1);
  const DataTriple b = toy_triple("x^2*exp(-x)", "1+t", 6, f2);
  const DataTriple ab = toy_triple("exp(-x)+x^2*exp(-x)", "sin(t)+1+t", 6, f12);
  for (int j = 1; j <= 4; ++j) {
    const double lhs = check_cc_order(j, SystemSpec::toy(), ab).residual(0);
    const double rhs = check_cc_order(j, SystemSpec::toy(), a).residual(0) +
                       check_cc_order(j, SystemSpec::toy(), b).residual(0);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("data generated by a smooth solution satisfy every condition") {
  // Toy: w = e^-x cos t, w_t + w_x = -e^-x (sin t + cos t).
  ForcingSpec f;
  f.terms.push_back(term(vec({-1.0}), "exp(-x)", "sin(t)"));
  f.terms.push_back(term(vec({-1.0}), "exp(-x)", "cos(t)"));
  const DataTriple d = toy_triple("exp(-x)", "cos(t)", 6, f);
  for (int j = 1; j <= 4; ++j) CHECK(std::abs(check_cc_order(j, SystemSpec::toy(), d).residual(0)) <= 1e-8);

  // System: A = [[0,1],[1,0]], B = [[1,0]], w = (e^-x cos t, e^-x sin t),
  // w_t - A w_x = (0, 2 e^-x cos t).
  Eigen::MatrixXd A(2, 2);
  A << 0, 1, 1, 0;
  Eigen::MatrixXd B(1, 2);
  B << 1, 0;
  ForcingSpec fs;
  fs.terms.push_back(term(vec({0.0, 2.0}), "exp(-x)", "cos(t)"));
  const DataTriple ds = make_triple({"exp(-x)", "0"}, {"cos(t)"}, fs, 8.0, 4.0, 512, 256, 6);
  for (int j = 1; j <= 4; ++j)
    CHECK(check_cc_order(j, SystemSpec::constant(A, B), ds).residual.norm() <= 1e-8);
}

TEST_CASE("hierarchy holds over the sweep corpus") {
  for (const CorpusEntry& e : sweep_corpus()) {
    CAPTURE(e.name);
    const CompatReport r = compat_report(e.spec, e.data, 3.0);
    CHECK(r.hierarchy_consistent);
    CHECK(r.verified_order == std::min(e.expected_order, 3.0));
  }
}
