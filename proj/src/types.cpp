#include "cornerlab/types.hpp"

#include "cornerlab/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace cornerlab {

namespace {

Eigen::MatrixXd jet_matrix(const std::vector<ScalarFn>& f, int jet_order, int& depth) {
  Eigen::MatrixXd jet(jet_order + 1, static_cast<Eigen::Index>(f.size()));
  depth = jet_order + 1;
  for (std::size_t c = 0; c < f.size(); ++c) {
    const Taylor<double> t = f[c]->taylor(0.0, jet_order);
    depth = std::min(depth, t.valid);
    for (int j = 0; j <= jet_order; ++j)
      jet(j, static_cast<Eigen::Index>(c)) =
          j < t.valid ? t.derivative(j) : std::numeric_limits<double>::quiet_NaN();
  }
  return jet;
}

Eigen::MatrixXd sample(const std::vector<ScalarFn>& f, double step, int n) {
  Eigen::MatrixXd s(n + 1, static_cast<Eigen::Index>(f.size()));
  for (std::size_t c = 0; c < f.size(); ++c)
    for (int i = 0; i <= n; ++i) s(i, static_cast<Eigen::Index>(c)) = f[c]->value(i * step);
  return s;
}

void check_jet(const Eigen::MatrixXd& samples, const std::optional<Eigen::MatrixXd>& jet,
               const char* what) {
  if (!jet || jet->rows() == 0) return;
  if (jet->cols() != samples.cols())
    throw std::invalid_argument(std::string(what) + ": jet component count mismatch");
  for (Eigen::Index c = 0; c < samples.cols(); ++c) {
    const double a = (*jet)(0, c), b = samples(0, c);
    if (std::isnan(a)) continue;
    if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(b)))
      throw std::invalid_argument(std::string(what) + ": jet[0] disagrees with samples[0]");
  }
}

SobolevIndex min_regularity(const std::vector<ScalarFn>& f) {
  SobolevIndex r = SobolevIndex::smooth();
  for (const auto& g : f) r = min(r, g->regularity());
  return r;
}

}  // namespace

SobolevIndex SampledHalfLine::regularity() const { return min_regularity(sources); }
SobolevIndex BoundarySignal::regularity() const { return min_regularity(sources); }

void SampledHalfLine::validate() const {
  if (q() < 1) throw std::invalid_argument("SampledHalfLine: q must be >= 1");
  if (std::abs(N() * h - X) > 1e-9 * std::max(1.0, X))
    throw std::invalid_argument("SampledHalfLine: N*h != X");
  check_jet(samples, boundary_jet, "SampledHalfLine");
}

void BoundarySignal::validate() const {
  if (b() < 1) throw std::invalid_argument("BoundarySignal: b must be >= 1");
  if (std::abs(M() * k - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument("BoundarySignal: M*k != T");
  check_jet(samples, jet_at_zero, "BoundarySignal");
}

SampledHalfLine SampledHalfLine::from_functions(const std::vector<ScalarFn>& f, double X, int N,
                                                int jet_order) {
  SampledHalfLine s;
  s.h = X / N;
  s.X = X;
  s.samples = sample(f, s.h, N);
  int depth = 0;
  s.boundary_jet = jet_matrix(f, jet_order, depth);
  s.sources = f;
  return s;
}

SampledHalfLine SampledHalfLine::zeros(int q, double X, int N, int jet_order) {
  SampledHalfLine s;
  s.h = X / N;
  s.X = X;
  s.samples = Eigen::MatrixXd::Zero(N + 1, q);
  s.boundary_jet = Eigen::MatrixXd::Zero(jet_order + 1, q);
  return s;
}

BoundarySignal BoundarySignal::from_functions(const std::vector<ScalarFn>& g, double T, int M,
                                              int jet_order) {
  BoundarySignal s;
  s.k = T / M;
  s.T = T;
  s.samples = sample(g, s.k, M);
  int depth = 0;
  s.jet_at_zero = jet_matrix(g, jet_order, depth);
  s.sources = g;
  return s;
}

BoundarySignal BoundarySignal::zeros(int b, double T, int M, int jet_order) {
  BoundarySignal s;
  s.k = T / M;
  s.T = T;
  s.samples = Eigen::MatrixXd::Zero(M + 1, b);
  s.jet_at_zero = Eigen::MatrixXd::Zero(jet_order + 1, b);
  return s;
}

Eigen::VectorXd Field2D::at(int i, int j) const {
  Eigen::VectorXd v(q());
  for (int c = 0; c < q(); ++c) v(c) = components[c](i, j);
  return v;
}

Field2D Field2D::zeros(int q, double X, double T, int N, int M) {
  Field2D f;
  f.X = X;
  f.T = T;
  f.h = X / N;
  f.k = T / M;
  f.components.assign(q, Eigen::MatrixXd::Zero(N + 1, M + 1));
  return f;
}

}  // namespace cornerlab
