#include "cornerlab/characteristics_solver.hpp"

#include "cornerlab/errors.hpp"
#include "cornerlab/numerics.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cornerlab {

void SolveConfig::validate() const {
  if (N < 8 || M < 8) throw std::invalid_argument("SolveConfig: N and M must be >= 8");
  if (duhamel_steps < 4) throw std::invalid_argument("SolveConfig: duhamel_steps must be >= 4");
}

namespace {

constexpr double kHorizonSlack = 1e-12;

// Vector-valued evaluation of a profile: closed form when available,
// cubic interpolation of the samples otherwise.
class Profile {
 public:
  Profile(const Eigen::MatrixXd& samples, double step, const std::vector<ScalarFn>& sources)
      : samples_(samples), step_(step), sources_(sources) {}

  int dim() const { return static_cast<int>(samples_.cols()); }

  void eval(double x, Eigen::Ref<Eigen::VectorXd> out) const {
    if (!sources_.empty()) {
      for (int c = 0; c < dim(); ++c) out(c) = sources_[c]->value(x);
      return;
    }
    const double s = x / step_;
    const int i = static_cast<int>(std::llround(s));
    if (std::abs(s - i) < 1e-12 && i >= 0 && i < samples_.rows()) {
      out = samples_.row(i).transpose();
      return;
    }
    for (int c = 0; c < dim(); ++c) out(c) = num::cubic_interp(samples_.col(c), step_, x);
  }

  double scalar(double x) const {
    if (!sources_.empty()) return sources_[0]->value(x);
    Eigen::VectorXd v(dim());
    eval(x, v);
    return v(0);
  }

 private:
  const Eigen::MatrixXd& samples_;
  double step_;
  const std::vector<ScalarFn>& sources_;
};

void resolve_extents(const SolveConfig& c, double data_X, double data_T, double reach,
                     double& X, double& T) {
  T = c.T > 0.0 ? c.T : data_T;
  X = c.X > 0.0 ? c.X : data_X - reach * T;
  if (T > data_T * (1.0 + kHorizonSlack) + kHorizonSlack) throw DataError("boundary data horizon exceeded");
  if (X <= 0.0 || X + reach * T > data_X * (1.0 + kHorizonSlack) + kHorizonSlack)
    throw DataError("initial data horizon exceeded");
}

}  // namespace

Field2D solve_toy(const SampledHalfLine& u0, const BoundarySignal& g, const SolveConfig& config) {
  config.validate();
  if (u0.q() != 1 || g.b() != 1) throw std::invalid_argument("solve_toy: scalar data expected");
  double X = 0.0, T = 0.0;
  resolve_extents(config, u0.X, g.T, 0.0, X, T);
  Field2D u = Field2D::zeros(1, X, T, config.N, config.M);
  const Profile p0(u0.samples, u0.h, u0.sources), pg(g.samples, g.k, g.sources);
  Eigen::MatrixXd& U = u.components[0];
  for (int j = 0; j <= config.M; ++j) {
    const double t = j * u.k;
    for (int i = 0; i <= config.N; ++i) {
      const double x = i * u.h;
      U(i, j) = x - t >= 0.0 ? p0.scalar(x - t) : pg.scalar(t - x);
    }
  }
  u.metadata["solver"] = "toy_closed_form";
  return u;
}

Field2D solve_exact(const SystemSpec& spec, const DataTriple& data, const SolveConfig& config) {
  config.validate();
  spec.validate();
  data.validate(spec);
  if (config.mode == SolveConfig::Mode::toy_closed_form) {
    if (spec.q() != 1 || spec.A(0, 0) != -1.0 || spec.B(0, 0) != 1.0 || !data.f.is_zero())
      throw std::invalid_argument("toy_closed_form mode needs the transport problem with f = 0");
    return solve_toy(data.u0, data.g, config);
  }
  if (!spec.constant_coefficients()) throw std::invalid_argument("solve_exact needs constant A and B");
  const AdmissibilityReport nc = check_noncharacteristic(spec.A);
  if (!nc.pass) throw AdmissibilityError(nc.reason);
  const AdmissibilityReport kl = check_kreiss_lopatinskii_1d(spec.A, spec.B);
  if (!kl.pass) throw AdmissibilityError("Lopatinskii failure");

  const CharDecomp d = diagonalize(spec.A);
  const int q = spec.q();
  const double lam_max = std::max(0.0, d.eigenvalues.maxCoeff());
  double X = 0.0, T = 0.0;
  resolve_extents(config, data.u0.X, data.g.T, lam_max, X, T);
  Field2D u = Field2D::zeros(q, X, T, config.N, config.M);

  const Profile p0(data.u0.samples, data.u0.h, data.u0.sources);
  const Profile pg(data.g.samples, data.g.k, data.g.sources);
  const Eigen::MatrixXd& Pinv = d.P_inv;
  const Eigen::MatrixXd BPin = spec.B * d.P_in();
  const Eigen::MatrixXd BPout = spec.B * d.P_out();
  const auto bp_solver = BPin.partialPivLu();
  const bool forced = !data.f.is_zero();
  const auto& gl = num::gauss_legendre(config.duhamel_steps);
  const int n_out = static_cast<int>(d.outgoing.size());

  Eigen::VectorXd buf(q);
  // Component i of P^{-1} u0 at x.
  auto w0 = [&](int i, double x) {
    p0.eval(x, buf);
    return Pinv.row(i).dot(buf);
  };
  // int_a^b (P^{-1} f)_i along x(s) = x_at(s).
  auto duhamel = [&](int i, double a, double b, auto&& x_at) {
    if (!forced || b <= a) return 0.0;
    double acc = 0.0;
    for (int n = 0; n < gl.nodes.size(); ++n) {
      const double s = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes(n);
      acc += gl.weights(n) * Pinv.row(i).dot(data.f.evaluate(x_at(s), s, q));
    }
    return 0.5 * (b - a) * acc;
  };
  // Outgoing mode i at (0, tau), carried from x0 = lambda tau.
  auto w_out_boundary = [&](int i, double tau) {
    const double lam = d.eigenvalues(i);
    return w0(i, lam * tau) + duhamel(i, 0.0, tau, [&](double s) { return lam * (tau - s); });
  };
  Eigen::VectorXd gb(spec.b()), wout(n_out);
  auto w_in_boundary = [&](double tau) {
    pg.eval(tau, gb);
    for (int o = 0; o < n_out; ++o) wout(o) = w_out_boundary(d.outgoing[o], tau);
    return Eigen::VectorXd(bp_solver.solve(gb - BPout * wout));
  };

  Eigen::VectorXd w(q);
  for (int j = 0; j <= config.M; ++j) {
    const double t = j * u.k;
    for (int i = 0; i <= config.N; ++i) {
      const double x = i * u.h;
      for (int m = 0; m < q; ++m) {
        const double lam = d.eigenvalues(m);
        const double x0 = x + lam * t;
        if (x0 >= 0.0) {
          w(m) = w0(m, x0) + duhamel(m, 0.0, t, [&](double s) { return x0 - lam * s; });
        } else {
          const double tb = t - x / std::abs(lam);
          int slot = 0;
          while (d.incoming[slot] != m) ++slot;
          w(m) = w_in_boundary(tb)(slot) + duhamel(m, tb, t, [&](double s) { return -lam * (s - tb); });
        }
      }
      const Eigen::VectorXd val = d.P * w;
      for (int c = 0; c < q; ++c) u.components[c](i, j) = val(c);
    }
  }
  // P P^{-1} is the identity only up to rounding; keep the initial slice exact.
  for (int i = 0; i <= config.N; ++i) {
    p0.eval(i * u.h, buf);
    for (int c = 0; c < q; ++c) u.components[c](i, 0) = buf(c);
  }
  std::ostringstream os;
  os << "A=" << spec.A.format(Eigen::IOFormat(Eigen::FullPrecision, Eigen::DontAlignCols, ",", ";"));
  u.metadata["solver"] = "exact_characteristics";
  u.metadata["system"] = os.str();
  if (data.u0.has_sources()) u.metadata["u0"] = data.u0.sources[0]->describe();
  if (data.g.has_sources()) u.metadata["g"] = data.g.sources[0]->describe();
  return u;
}

std::pair<SampledHalfLine, BoundarySignal> extract_traces(const Field2D& u) {
  SampledHalfLine init;
  BoundarySignal bnd;
  init.h = u.h;
  init.X = u.X;
  bnd.k = u.k;
  bnd.T = u.T;
  init.samples.resize(u.N() + 1, u.q());
  bnd.samples.resize(u.M() + 1, u.q());
  for (int c = 0; c < u.q(); ++c) {
    init.samples.col(c) = u.components[c].col(0);
    bnd.samples.col(c) = u.components[c].row(0).transpose();
  }
  return {init, bnd};
}

}  // namespace cornerlab
