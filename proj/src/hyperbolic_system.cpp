#include "cornerlab/hyperbolic_system.hpp"

#include "cornerlab/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cornerlab {

Eigen::VectorXd ForcingSpec::evaluate(double x, double t, int q) const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(q);
  for (const auto& term : terms) f += term.coeff * (term.fx->value(x) * term.ft->value(t));
  return f;
}

Eigen::VectorXd ForcingSpec::time_jet(double x, int j, int q) const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(q);
  for (const auto& term : terms) {
    const Taylor<double> tt = term.ft->taylor(0.0, j);
    if (tt.valid <= j) throw DataError("jet underflow at order " + std::to_string(j) + " (forcing)");
    f += term.coeff * (term.fx->value(x) * tt.derivative(j));
  }
  return f;
}

bool ForcingSpec::consistent(int q, int max_order, double tol) const {
  for (double x : {0.0, 0.37, 1.1}) {
    const Eigen::VectorXd f0 = evaluate(x, 0.0, q);
    if ((time_jet(x, 0, q) - f0).norm() > tol * std::max(1.0, f0.norm())) return false;
    for (int j = 0; j <= max_order; ++j)
      if (!time_jet(x, j, q).allFinite()) return false;
  }
  return true;
}

Eigen::MatrixXd SystemSpec::A_l(int l) const {
  if (l < static_cast<int>(A_taylor.size())) return A_taylor[l];
  return Eigen::MatrixXd::Zero(A.rows(), A.cols());
}

Eigen::MatrixXd SystemSpec::B_l(int l) const {
  if (l < static_cast<int>(B_taylor.size())) return B_taylor[l];
  return Eigen::MatrixXd::Zero(B.rows(), B.cols());
}

bool SystemSpec::constant_coefficients() const {
  for (std::size_t l = 1; l < A_taylor.size(); ++l)
    if (A_taylor[l].norm() != 0.0) return false;
  for (std::size_t l = 1; l < B_taylor.size(); ++l)
    if (B_taylor[l].norm() != 0.0) return false;
  return true;
}

void SystemSpec::validate() const {
  if (A.rows() != A.cols() || A.rows() < 1) throw std::invalid_argument("A must be square and nonempty");
  if (B.cols() != A.cols()) throw std::invalid_argument("B must have q columns");
  if (B.rows() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-12 * std::max(1.0, sv(0)))
      throw std::invalid_argument("B must have full row rank");
  }
  if (A_taylor.empty() || (A_taylor[0] - A).norm() != 0.0)
    throw std::invalid_argument("A_taylor[0] must equal A");
  if (B_taylor.empty() || (B_taylor[0] - B).norm() != 0.0)
    throw std::invalid_argument("B_taylor[0] must equal B");
  for (const auto& m : A_taylor)
    if (m.rows() != A.rows() || m.cols() != A.cols()) throw std::invalid_argument("A_taylor shape mismatch");
  for (const auto& m : B_taylor)
    if (m.rows() != B.rows() || m.cols() != B.cols()) throw std::invalid_argument("B_taylor shape mismatch");
  for (const auto& t : forcing.terms)
    if (t.coeff.size() != A.rows()) throw std::invalid_argument("forcing coefficient must have q entries");
}

SystemSpec SystemSpec::constant(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  SystemSpec s;
  s.A = A;
  s.B = B;
  s.A_taylor = {A};
  s.B_taylor = {B};
  return s;
}

SystemSpec SystemSpec::toy() {
  return constant(Eigen::MatrixXd::Constant(1, 1, -1.0), Eigen::MatrixXd::Constant(1, 1, 1.0));
}

Eigen::MatrixXd CharDecomp::P_in() const {
  Eigen::MatrixXd m(P.rows(), static_cast<Eigen::Index>(incoming.size()));
  for (std::size_t i = 0; i < incoming.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = P.col(incoming[i]);
  return m;
}

Eigen::MatrixXd CharDecomp::P_out() const {
  Eigen::MatrixXd m(P.rows(), static_cast<Eigen::Index>(outgoing.size()));
  for (std::size_t i = 0; i < outgoing.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = P.col(outgoing[i]);
  return m;
}

namespace {

double condition(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  return smin == 0.0 ? std::numeric_limits<double>::infinity() : sv(0) / smin;
}

}  // namespace

CharDecomp diagonalize(const Eigen::MatrixXd& A) {
  const int q = static_cast<int>(A.rows());
  Eigen::EigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw AdmissibilityError("not diagonalizable");
  const double scale = std::max(A.norm(), 1e-300);
  const Eigen::VectorXcd ev = es.eigenvalues();
  for (int i = 0; i < q; ++i)
    if (std::abs(ev(i).imag()) > 1e-9 * scale) throw AdmissibilityError("not hyperbolic");
  std::vector<int> order(q);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return ev(a).real() < ev(b).real(); });
  CharDecomp d;
  d.eigenvalues.resize(q);
  d.P.resize(q, q);
  const Eigen::MatrixXcd V = es.eigenvectors();
  for (int c = 0; c < q; ++c) {
    const int src = order[c];
    d.eigenvalues(c) = ev(src).real();
    Eigen::VectorXd v = V.col(src).real();
    if (v.norm() < 1e-300) v = V.col(src).imag();
    v.normalize();
    for (int r = 0; r < q; ++r)
      if (std::abs(v(r)) > 1e-12) {
        if (v(r) < 0.0) v = -v;
        break;
      }
    d.P.col(c) = v;
  }
  d.condition_number = condition(d.P);
  if (!std::isfinite(d.condition_number) || d.condition_number > 1e12)
    throw AdmissibilityError("not diagonalizable");
  d.P_inv = d.P.inverse();
  const double tol = 1e-8 * std::max(d.eigenvalues.cwiseAbs().maxCoeff(), 1e-300);
  for (int c = 0; c < q; ++c) {
    if (d.eigenvalues(c) < -tol) d.incoming.push_back(c);
    else if (d.eigenvalues(c) > tol) d.outgoing.push_back(c);
  }
  return d;
}

AdmissibilityReport check_noncharacteristic(const Eigen::MatrixXd& A) {
  AdmissibilityReport r;
  try {
    const CharDecomp d = diagonalize(A);
    const double maxabs = d.eigenvalues.cwiseAbs().maxCoeff();
    r.min_abs_eigenvalue = d.eigenvalues.cwiseAbs().minCoeff();
    r.determinant = A.determinant();
    r.condition_number = condition(A);
    if (maxabs == 0.0 || r.min_abs_eigenvalue <= 1e-8 * maxabs) {
      r.reason = "characteristic boundary (zero eigenvalue)";
    } else if (!std::isfinite(r.condition_number) || r.condition_number > 1e12) {
      r.reason = "boundary matrix inverse unbounded";
    } else {
      r.pass = true;
      r.reason = "ok";
    }
  } catch (const AdmissibilityError& e) {
    r.reason = e.what();
  }
  return r;
}

AdmissibilityReport check_kreiss_lopatinskii_1d(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const CharDecomp d = diagonalize(A);
  if (static_cast<int>(B.rows()) != static_cast<int>(d.incoming.size()))
    throw AdmissibilityError("boundary condition count mismatch");
  AdmissibilityReport r;
  r.min_abs_eigenvalue = d.eigenvalues.cwiseAbs().minCoeff();
  if (B.rows() == 0) {
    r.pass = true;
    r.determinant = 1.0;
    r.condition_number = 1.0;
    r.reason = "ok";
    return r;
  }
  const Eigen::MatrixXd M = B * d.P_in();
  r.determinant = M.determinant();
  r.condition_number = condition(M);
  r.pass = std::isfinite(r.condition_number) && r.condition_number < 1e8;
  r.reason = r.pass ? "ok" : "Lopatinskii failure";
  return r;
}

}  // namespace cornerlab
