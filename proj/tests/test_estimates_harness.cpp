#include "cornerlab/characteristics_solver.hpp"
#include "cornerlab/estimates_harness.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace cornerlab;

namespace {

Field2D solve(const DataTriple& d, int N, double X = 2.0, double T = 2.0) {
  SolveConfig c;
  c.N = c.M = N;
  c.X = X;
  c.T = T;
  return solve_exact(SystemSpec::toy(), d, c);
}

const std::vector<EstimateKind> kKinds{EstimateKind::semigroup, EstimateKind::resolvent,
                                       EstimateKind::weighted_resolvent};

int kind_s(EstimateKind k) { return k == EstimateKind::weighted_resolvent ? 1 : 0; }

double simpson2(const std::function<double(double, double)>& f, double X, double T, int n) {
  auto w = [n](int i) { return (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
  const double h = X / n, k = T / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) acc += w(i) * w(j) * f(i * h, j * k);
  return acc * h * k / 9.0;
}

}  // namespace

TEST_CASE("estimate kinds round-trip") {
  for (auto k : kKinds) CHECK(parse_estimate_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_estimate_kind("energy"), std::invalid_argument);
}

TEST_CASE("zero data give zero sides") {
  const DataTriple d = make_triple({"0"}, {"0"}, {}, 2.0, 2.0, 64, 64);
  const Field2D u = solve(d, 64);
  for (auto k : kKinds) {
    const EstimateSides e = estimate_sides(u, d, 2.0, kind_s(k), k);
    CHECK(e.lhs == 0.0);
    CHECK(e.rhs == 0.0);
    CHECK(e.ratio == 0.0);
    CHECK_FALSE(e.anomaly);
  }
}

TEST_CASE("nonzero solution against zero data is an anomaly") {
  const DataTriple d = make_triple({"0"}, {"0"}, {}, 2.0, 2.0, 64, 64);
  Field2D u = Field2D::zeros(1, 2.0, 2.0, 64, 64);
  u.components[0].setConstant(1.0);
  const EstimateSides e = estimate_sides(u, d, 1.0, 0, EstimateKind::resolvent);
  CHECK(e.anomaly);
  CHECK(std::isinf(e.ratio));
}

TEST_CASE("estimate argument checks") {
  const DataTriple d = make_triple({"sin(x)"}, {"-sin(t)"}, {}, 2.0, 2.0, 64, 64);
  const Field2D u = solve(d, 64);
  CHECK_THROWS_AS(estimate_sides(u, d, 0.0, 0, EstimateKind::resolvent), std::invalid_argument);
  CHECK_THROWS_AS(estimate_sides(u, d, 1.0, 1, EstimateKind::semigroup), std::invalid_argument);
  CHECK_THROWS_AS(estimate_sides(u, d, 1.0, 4, EstimateKind::weighted_resolvent), std::invalid_argument);
}

TEST_CASE("resolvent ratio on sine data is refinement stable") {
  const DataTriple d1 = make_triple({"sin(x)"}, {"-sin(t)"}, {}, 2.0, 2.0, 128, 128);
  const DataTriple d2 = make_triple({"sin(x)"}, {"-sin(t)"}, {}, 2.0, 2.0, 256, 256);
  for (auto k : kKinds) {
    const double r1 = estimate_sides(solve(d1, 128), d1, 2.0, kind_s(k), k).ratio;
    const double r2 = estimate_sides(solve(d2, 256), d2, 2.0, kind_s(k), k).ratio;
    CAPTURE(to_string(k));
    CHECK(std::isfinite(r1));
    CHECK(r2 == doctest::Approx(r1).epsilon(0.1));
  }
}

TEST_CASE("gamma sweep on compatible data stays below 1.5 times its first value") {
  const DataTriple d = make_triple({"sin(x)"}, {"-sin(t)"}, {}, 2.0, 2.0, 256, 256);
  const Field2D u = solve(d, 256);
  for (auto k : kKinds) {
    const auto rows = gamma_sweep(u, d, {1.0, 2.0, 4.0, 8.0}, kind_s(k), k);
    REQUIRE(rows.size() == 4);
    for (const auto& e : rows) {
      CHECK(e.lhs >= 0.0);
      CHECK(e.rhs > 0.0);
      CHECK(e.ratio <= 1.5 * rows.front().ratio);
    }
  }
}

TEST_CASE("estimates are homogeneous in the data") {
  const DataTriple d = make_triple({"exp(-x)*cos(x)"}, {"exp(-t)"}, {}, 2.0, 2.0, 128, 128);
  const DataTriple d3 = make_triple({"3*exp(-x)*cos(x)"}, {"3*exp(-t)"}, {}, 2.0, 2.0, 128, 128);
  const Field2D u = solve(d, 128), u3 = solve(d3, 128);
  for (auto k : kKinds)
    for (double g : {1.0, 4.0}) {
      const EstimateSides a = estimate_sides(u, d, g, kind_s(k), k);
      const EstimateSides b = estimate_sides(u3, d3, g, kind_s(k), k);
      const double p = k == EstimateKind::semigroup ? 3.0 : 9.0;
      CHECK(b.ratio == doctest::Approx(a.ratio).epsilon(1e-10));
      CHECK(b.lhs == doctest::Approx(p * a.lhs).epsilon(1e-10));
      CHECK(b.rhs == doctest::Approx(p * a.rhs).epsilon(1e-10));
    }
}

TEST_CASE("H^s proxy of sin(x - t) against quadrature") {
  const DataTriple d = make_triple({"sin(x)"}, {"-sin(t)"}, {}, 2.0, 2.0, 256, 256);
  const Field2D u = solve(d, 256);
  const double l2 = simpson2([](double x, double t) { return std::pow(std::sin(x - t), 2); }, 2, 2, 400);
  const double h1 = l2 + simpson2([](double x, double t) { return 2 * std::pow(std::cos(x - t), 2); }, 2, 2, 400);
  CHECK(hs_proxy(u, 0.0, 1) == doctest::Approx(l2).epsilon(1e-4));
  CHECK(hs_proxy(u, 1.0, 1) == doctest::Approx(h1).epsilon(1e-3));
  CHECK(hs_proxy(u, 1.5, 4) > hs_proxy(u, 1.0, 4));
}

TEST_CASE("prediction rule") {
  CompatReport r;
  r.verified_order = 1.0;
  r.data_regularity = SobolevIndex::smooth();
  CHECK(predicted_bounded(r, 1.0));
  CHECK(predicted_bounded(r, 1.25));
  CHECK_FALSE(predicted_bounded(r, 1.5));
  CHECK_FALSE(predicted_bounded(r, 2.0));
  r.verified_order = 3.0;
  r.data_regularity = SobolevIndex::below(1.8);
  CHECK(predicted_bounded(r, 1.5));
  CHECK_FALSE(predicted_bounded(r, 2.0));
}

TEST_CASE("sweep examples") {
  const SystemSpec toy = SystemSpec::toy();
  const std::vector<double> grid{0.4, 0.5, 1.0, 1.5, 2.0, 2.5};
  SweepOptions o;
  const auto check = [&](const DataTriple& d, const std::vector<std::string>& expected) {
    const SweepResult r = regularity_sweep(toy, d, grid, 3, o);
    REQUIRE(r.classification.size() == grid.size());
    CHECK(r.norm_table.cols() == 4);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CAPTURE(grid[i]);
      CHECK(r.classification[i] == expected[i]);
      CHECK(r.matches(i));
    }
  };
  const double X = 2.0 * (o.X + o.T);
  check(make_triple({"sin(x)"}, {"-sin(t)"}, {}, X, X, 2048, 2048),
        {"bounded", "bounded", "bounded", "bounded", "bounded", "bounded"});
  check(make_triple({"exp(-x)"}, {"exp(-t)"}, {}, X, X, 2048, 2048),
        {"bounded", "bounded", "bounded", "divergent", "divergent", "divergent"});
  check(make_triple({"eta(x,0.5,1)"}, {"0"}, {}, X, X, 2048, 2048),
        {"bounded", "divergent", "divergent", "divergent", "divergent", "divergent"});
  CHECK_THROWS_AS(regularity_sweep(toy, make_triple({"0"}, {"0"}, {}, X, X, 64, 64), grid, 2, o),
                  std::invalid_argument);
}

TEST_CASE("sweep classification is stable from three to four levels") {
  const std::vector<double> grid{0.4, 0.5, 1.0, 1.5, 2.0, 2.5};
  const auto corpus = sweep_corpus();
  for (std::size_t n : {0u, 4u, 8u}) {
    const CorpusEntry& e = corpus[n];
    CAPTURE(e.name);
    const SweepResult a = regularity_sweep(e.spec, e.data, grid, 3);
    const SweepResult b = regularity_sweep(e.spec, e.data, grid, 4);
    CHECK(a.classification == b.classification);
  }
}

TEST_CASE("corpus shape") {
  const auto corpus = sweep_corpus();
  CHECK(corpus.size() == 12);
  std::set<std::string> names;
  std::set<double> orders;
  for (const auto& e : corpus) {
    names.insert(e.name);
    orders.insert(e.expected_order);
  }
  CHECK(names.size() == 12);
  for (double o : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5}) CHECK(orders.count(o) == 1);
}

TEST_CASE("constant probe") {
  const DataTriple smooth = make_triple({"sin(x)"}, {"-sin(t)"}, {}, 2.0, 1.0, 512, 256);
  const auto rows = half_integer_constant_probe(SystemSpec::toy(), smooth, {0.3, 0.4, 0.45, 0.49});
  REQUIRE(rows.size() == 4);
  double lo = 1e300, hi = 0.0;
  for (const auto& r : rows) {
    CHECK(r.ratio == doctest::Approx(r.lhs / r.rhs));
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  CHECK(hi <= 1.1 * lo);
  CHECK(half_integer_constant_probe(SystemSpec::toy(), smooth, {0.3}).size() == 1);

  const DataTriple jump = make_triple({"eta(x,0.5,1)"}, {"0"}, {}, 2.0, 1.0, 512, 256);
  const auto j = half_integer_constant_probe(SystemSpec::toy(), jump, {0.3, 0.4, 0.45, 0.49});
  for (std::size_t i = 1; i < j.size(); ++i) CHECK(j[i].ratio > j[i - 1].ratio);
  CHECK(j.back().ratio >= 5.0 * j.front().ratio);
}
