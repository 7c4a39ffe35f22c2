#include "cornerlab/lifting_ops.hpp"

#include "cornerlab/errors.hpp"
#include "cornerlab/expr.hpp"
#include "cornerlab/numerics.hpp"
#include "cornerlab/sobolev_norms.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cornerlab {

namespace {

using cvec = std::vector<std::complex<double>>;

double japanese(double xi) { return std::sqrt(1.0 + xi * xi); }

// chi as a closed-form value, without going through the virtual interface.
double cutoff_value(int m, double b, double t) {
  const double a = std::abs(t);
  if (a >= b) return 0.0;
  return std::pow(t, m) / num::factorial(m) * smooth_cutoff(a, 0.5 * b, b);
}

// H^r norm of a plane given by its x'-spectra on the periodic window (one
// column per t sample, compactly supported in t).
double periodic_plane_norm(const Eigen::MatrixXcd& spectra, double h, double k, const Eigen::VectorXd& xi,
                           double r) {
  const int n_pad = static_cast<int>(spectra.rows()), n_t = static_cast<int>(spectra.cols());
  const int n_tp = num::next_pow2(2 * n_t);
  const Eigen::VectorXd tau = num::fft_frequencies(n_tp, k);
  Eigen::FFT<double> engine;
  cvec row(n_tp), hat;
  double acc = 0.0;
  for (int a = 0; a < n_pad; ++a) {
    if (spectra.row(a).cwiseAbs().maxCoeff() == 0.0) continue;
    std::fill(row.begin(), row.end(), std::complex<double>(0.0));
    for (int j = 0; j < n_t; ++j) row[j] = spectra(a, j);
    engine.fwd(hat, row);
    for (int l = 0; l < n_tp; ++l)
      acc += std::norm(hat[l]) * std::pow(1.0 + xi(a) * xi(a) + tau(l) * tau(l), r);
  }
  return std::sqrt(acc * h * k / (static_cast<double>(n_pad) * n_tp));
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

CutoffSpec make_cutoff(int m, double support_end) {
  if (m < 0) throw std::invalid_argument("make_cutoff: m must be >= 0");
  if (!(support_end > 0.0)) throw std::invalid_argument("make_cutoff: support_end must be positive");
  CutoffSpec c;
  c.m = m;
  c.support_end = support_end;
  const double b = support_end;
  auto value = [m, b](double t) { return cutoff_value(m, b, t); };
  auto taylor = [m, b](double t, int order) {
    const Taylor<double> v = Taylor<double>::variable(t, order);
    Taylor<double> p = Taylor<double>::constant(1.0 / num::factorial(m), order);
    for (int i = 0; i < m; ++i) p = p * v;
    const Taylor<double> eta = smooth_cutoff(t < 0.0 ? -v : v, 0.5 * b, b);
    return p * eta;
  };
  c.profile = std::make_shared<LambdaFunction>(value, taylor, SobolevIndex::smooth(),
                                               "chi_" + std::to_string(m));
  return c;
}

LineSamples CutoffSpec::sample(double T, int M) const {
  LineSamples s;
  s.h = T / M;
  s.values.resize(M + 1);
  for (int j = 0; j <= M; ++j) s.values(j) = cutoff_value(m, support_end, j * s.h);
  return s;
}

PlaneFn lift_rm(const LineSamples& g, int m, double lambda, double s_report,
                const LiftOptions& options) {
  if (m < 0) throw std::invalid_argument("lift_rm: m must be >= 0");
  if (lambda < 1.0) throw std::invalid_argument("lift_rm: lambda must be >= 1");
  if (g.size() < 4) throw std::invalid_argument("lift_rm: too few samples");
  const double b = options.support_end;
  const int n = g.size();
  const double peak_g = g.values.cwiseAbs().maxCoeff();

  PlaneFn out;
  out.h = g.h;
  out.x0 = g.x0;
  out.provenance["operator"] = "R_m";
  out.provenance["m"] = std::to_string(m);
  out.provenance["lambda"] = fmt(lambda);

  int first = 0, last = n - 1;
  if (peak_g > 0.0) {
    const double edge = std::max(std::abs(g.values(0)), std::abs(g.values(n - 1)));
    if (edge > 1e-8 * peak_g) throw NumericalGuardError("window too small: g does not decay at the edges");
    while (std::abs(g.values(first)) <= 1e-8 * peak_g) ++first;
    while (std::abs(g.values(last)) <= 1e-8 * peak_g) --last;
  }
  // Periodic window at least twice the samples and eight times the support.
  const int n_pad = num::next_pow2(std::max(2 * n, 8 * (last - first + 1)));

  Eigen::FFT<double> engine;
  std::vector<double> in(n_pad, 0.0);
  for (int i = 0; i < n; ++i) in[i] = g.values(i);
  cvec G;
  engine.fwd(G, in);
  const Eigen::VectorXd xi = num::fft_frequencies(n_pad, g.h);
  const double xi_nyq = std::numbers::pi / g.h;

  double peak = 0.0, tail = 0.0, xi_eff = 0.0;
  for (int k = 0; k < n_pad; ++k) peak = std::max(peak, std::abs(G[k]));
  for (int k = 0; k < n_pad; ++k) {
    const double a = std::abs(G[k]);
    if (std::abs(xi(k)) >= 0.75 * xi_nyq) tail = std::max(tail, a);
    if (a >= 1e-12 * peak) xi_eff = std::max(xi_eff, std::abs(xi(k)));
  }
  if (peak > 0.0 && tail >= 1e-8 * peak) throw NumericalGuardError("spectrum of g not resolved");

  const double kt = b / (options.t_resolution * lambda * japanese(xi_eff));
  const int J = static_cast<int>(std::ceil(1.25 * b / (lambda * kt)));
  const int j_begin = options.half_range ? 0 : -J;
  out.k = kt;
  out.t0 = j_begin * kt;
  out.samples.resize(n, J - j_begin + 1);

  Eigen::VectorXd scale(n_pad);
  for (int k = 0; k < n_pad; ++k) scale(k) = std::pow(lambda * japanese(xi(k)), -m);
  const bool measure = options.measure_norms && !options.half_range && peak_g > 0.0;
  const int n_cols = J - j_begin + 1;
  Eigen::MatrixXcd spectra;
  if (measure) spectra.resize(n_pad, n_cols);
  cvec H(n_pad), r;
  for (int j = j_begin; j <= J; ++j) {
    const double t = j * kt;
    for (int k = 0; k < n_pad; ++k)
      H[k] = G[k] * (scale(k) * cutoff_value(m, b, lambda * t * japanese(xi(k))));
    if (measure) spectra.col(j - j_begin) = Eigen::Map<Eigen::VectorXcd>(H.data(), n_pad);
    engine.inv(r, H);
    for (int i = 0; i < n; ++i) out.samples(i, j - j_begin) = r[i].real();
  }

  out.diagnostics["xi_eff"] = xi_eff;
  out.diagnostics["spectral_tail"] = peak > 0.0 ? tail / peak : 0.0;
  const double out_peak = out.samples.cwiseAbs().maxCoeff();
  out.diagnostics["x_edge_decay"] =
      out_peak > 0.0 ? std::max(out.samples.row(0).cwiseAbs().maxCoeff(),
                                out.samples.row(n - 1).cwiseAbs().maxCoeff()) / out_peak
                     : 0.0;
  if (measure) {
    const double norm = periodic_plane_norm(spectra, g.h, kt, xi, m + s_report + 0.5);
    out.diagnostics["norm_lift"] = norm;
    if (s_report >= 0.0) {
      const double data = fourier_hs_norm(g, s_report).value;
      out.diagnostics["norm_g"] = data;
      out.diagnostics["bound_ratio"] = norm / (std::pow(lambda, s_report) * data);
    }
  }
  return out;
}

double lift_norm(const LineSamples& g, int m, double lambda, double r, const LiftOptions& options) {
  LiftOptions o = options;
  o.measure_norms = true;
  o.half_range = false;
  return lift_rm(g, m, lambda, r - m - 0.5, o).diagnostics.at("norm_lift");
}

Eigen::MatrixXd time_jets_at_zero(const PlaneFn& R, int max_order, int points) {
  if (points < max_order + 1) throw std::invalid_argument("time_jets_at_zero: too few points");
  const int j0 = static_cast<int>(std::llround(-R.t0 / R.k));
  if (j0 < 0 || j0 + points > R.samples.cols())
    throw std::invalid_argument("time_jets_at_zero: t = 0 is not a usable grid column");
  Eigen::VectorXd nodes(points);
  for (int p = 0; p < points; ++p) nodes(p) = p * R.k;
  const Eigen::MatrixXd w = num::fornberg_weights(0.0, nodes, max_order);
  return R.samples.middleCols(j0, points) * w;
}

LineSamples odd_extension(const LineSamples& u0) {
  const int n = u0.size();
  LineSamples out;
  out.h = u0.h;
  out.x0 = u0.x0 - (n - 1) * u0.h;
  out.values.resize(2 * n - 1);
  for (int i = 0; i < n; ++i) {
    out.values(n - 1 + i) = u0.values(i);
    out.values(n - 1 - i) = -u0.values(i);
  }
  out.values(n - 1) = 0.0;
  return out;
}

namespace {

void corner_gate(const SampledHalfLine& u0, const BoundarySignal& g, double theta) {
  const std::string msg = "corner data incompatible at order " + fmt(theta);
  auto member = [&](const LineSamples& v, const std::vector<ScalarFn>& src) {
    if (!src.empty()) return src[0]->regularity().admits(theta);
    if (theta >= 1.0) return true;
    return gagliardo_seminorm(v, theta).verdict == Verdict::finite;
  };
  if (!member(u0.component(0), u0.sources) || !member(g.component(0), g.sources)) throw DataError(msg);

  const double scale = std::max({1.0, u0.samples.cwiseAbs().maxCoeff(), g.samples.cwiseAbs().maxCoeff()});
  if (theta > 0.5) {
    if (std::abs(u0.samples(0, 0) - g.samples(0, 0)) > 1e-8 * scale) throw DataError(msg);
  } else if (theta == 0.5) {
    const double L = std::min(u0.X, g.T);
    NormResult r;
    if (u0.has_sources() && g.has_sources()) {
      const ScalarFn a = u0.sources[0], c = g.sources[0];
      r = hardy_integral([&](double x) { const double d = a->value(x) - c->value(x); return d * d; }, L);
    } else {
      const int n = static_cast<int>(std::floor(L / u0.h + 1e-9));
      LineSamples d{Eigen::VectorXd(n + 1), u0.h, 0.0};
      const Eigen::VectorXd gs = g.samples.col(0);
      for (int i = 0; i <= n; ++i) d.values(i) = u0.samples(i, 0) - num::cubic_interp(gs, g.k, i * u0.h);
      r = h1200_norm(d);
    }
    if (r.verdict != Verdict::finite) throw DataError(msg);
  }
}

}  // namespace

PlaneFn corner_lift(const SampledHalfLine& u0, const BoundarySignal& g, double theta,
                    const CornerLiftOptions& options) {
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("corner_lift: theta must lie in (0, 1]");
  if (u0.q() != 1 || g.b() != 1) throw std::invalid_argument("corner_lift: scalar data expected");
  if (options.padding < 2 || options.stride < 1) throw std::invalid_argument("corner_lift: bad options");
  corner_gate(u0, g, theta);

  const double b = options.support_end;
  const int N = u0.N(), M = g.M();
  Eigen::FFT<double> engine;

  // R_b g: even extension in t, multiplier chi(<tau> y) row by row.
  const int nt = num::next_pow2(options.padding * (2 * M + 1));
  std::vector<double> gt(nt, 0.0);
  for (int j = 0; j <= M; ++j) {
    gt[j] = g.samples(j, 0);
    if (j > 0) gt[nt - j] = g.samples(j, 0);
  }
  cvec Gt, H(nt), r;
  engine.fwd(Gt, gt);
  const Eigen::VectorXd tau = num::fft_frequencies(nt, g.k);
  Eigen::MatrixXd Rb(N + 1, M + 1);
  for (int i = 0; i <= N; ++i) {
    const double y = i * u0.h;
    for (int k = 0; k < nt; ++k) H[k] = Gt[k] * cutoff_value(0, b, japanese(tau(k)) * y);
    engine.inv(r, H);
    for (int j = 0; j <= M; ++j) Rb(i, j) = r[j].real();
  }

  // R_0 of the remaining initial mismatch: odd extension in y, chi(<eta> t).
  const int ny = num::next_pow2(options.padding * (2 * N + 1));
  std::vector<double> wy(ny, 0.0);
  for (int i = 1; i <= N; ++i) {
    const double w = u0.samples(i, 0) - Rb(i, 0);
    wy[i] = w;
    wy[ny - i] = -w;
  }
  cvec W, Hy(ny);
  engine.fwd(W, wy);
  const Eigen::VectorXd eta = num::fft_frequencies(ny, u0.h);
  Eigen::MatrixXd R0(N + 1, M + 1);
  for (int j = 0; j <= M; ++j) {
    const double t = j * g.k;
    for (int k = 0; k < ny; ++k) Hy[k] = W[k] * cutoff_value(0, b, japanese(eta(k)) * t);
    engine.inv(r, Hy);
    for (int i = 0; i <= N; ++i) R0(i, j) = r[i].real();
  }

  const Eigen::MatrixXd R = Rb + R0;
  const double err_t0 = l2_norm({R.col(0) - u0.samples.col(0), u0.h, 0.0});
  const double err_y0 = l2_norm({R.row(0).transpose() - g.samples.col(0), g.k, 0.0});

  PlaneFn out;
  const int s = options.stride;
  out.samples.resize(N / s + 1, M / s + 1);
  for (int i = 0; i <= N / s; ++i)
    for (int j = 0; j <= M / s; ++j) out.samples(i, j) = R(i * s, j * s);
  out.h = u0.h * s;
  out.k = g.k * s;
  out.provenance["operator"] = "corner_lift";
  out.provenance["theta"] = fmt(theta);
  out.diagnostics["trace_t0_error"] = err_t0;
  out.diagnostics["trace_y0_error"] = err_y0;
  out.diagnostics["r0_boundary_trace"] = R0.row(0).cwiseAbs().maxCoeff();
  return out;
}

SynthesisResult synthesize_compatible_data(const SystemSpec& spec, const DataTriple& data, int k,
                                           int m, double lambda) {
  if (k < 0 || m <= k) throw std::invalid_argument("synthesize: need 0 <= k < m");
  if (!(lambda >= 1.0)) throw std::invalid_argument("synthesize: lambda must be >= 1");
  for (int j = 1; j <= k; ++j)
    if (!check_cc_order(j, spec, data).pass)
      throw DataError("data fail compatibility at order " + std::to_string(j) + " <= k");

  SynthesisResult res;
  res.lambda = lambda;
  res.data = data;
  const int bdim = spec.b();
  std::vector<int> orders;
  for (int j = k + 1; j <= m; ++j) {
    const OrderResidual r = check_cc_order(j, spec, data);
    if (r.pass) {
      res.corrections.push_back(Eigen::VectorXd::Zero(bdim));
    } else {
      res.corrections.push_back(r.residual);
      orders.push_back(j);
    }
  }
  if (orders.empty()) return res;

  std::vector<CutoffSpec> chis;
  for (int j = k + 1; j <= m; ++j) chis.push_back(make_cutoff(j - 1));
  auto eps = [&](int j) -> const Eigen::VectorXd& { return res.corrections[j - k - 1]; };

  BoundarySignal& gt = res.data.g;
  if (data.g.has_sources()) {
    std::vector<ScalarFn> comps;
    for (int c = 0; c < bdim; ++c) {
      std::vector<double> w;
      std::vector<ScalarFn> terms;
      for (int j : orders) {
        w.push_back(-eps(j)(c) / std::pow(lambda, j - 1));
        terms.push_back(std::make_shared<Rescaled>(chis[j - k - 1].profile, lambda));
      }
      comps.push_back(std::make_shared<LinearCombination>(data.g.sources[c], w, terms));
    }
    gt = BoundarySignal::from_functions(comps, data.g.T, data.g.M(), std::max(data.g.jet_rows() - 1, m));
  } else {
    for (int j : orders) {
      const double sc = std::pow(lambda, j - 1);
      for (int i = 0; i <= gt.M(); ++i) {
        const double chi = cutoff_value(j - 1, 1.0, lambda * i * gt.k);
        gt.samples.row(i) -= eps(j).transpose() * (chi / sc);
      }
      if (gt.jet_at_zero && gt.jet_at_zero->rows() >= j) gt.jet_at_zero->row(j - 1) -= eps(j).transpose();
    }
  }

  // |g~ - g|_{H^k} from the exact derivatives of the rescaled cutoffs.
  const double end = std::min(data.g.T, 1.0 / lambda);
  const int n = 4000;
  const double dt = end / n;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = i * dt;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k + 1, bdim);
    for (int j : orders) {
      const Taylor<double> tc = chis[j - k - 1].profile->taylor(lambda * t, k);
      for (int a = 0; a <= k; ++a)
        d.row(a) -= eps(j).transpose() * (tc.derivative(a) * std::pow(lambda, a - (j - 1)));
    }
    acc(i) = d.squaredNorm();
  }
  res.correction_norm = std::sqrt(num::trapezoid(acc, dt));
  return res;
}

Field2D approximate_solution(const std::vector<SampledHalfLine>& v, const CutoffSpec& chi, double T,
                             int M) {
  if (v.empty()) throw std::invalid_argument("approximate_solution: no Taylor coefficients");
  if (M < 1 || !(T > 0.0)) throw std::invalid_argument("approximate_solution: bad time grid");
  const int q = v[0].q(), N = v[0].N();
  Field2D u = Field2D::zeros(q, v[0].X, T, N, M);
  for (int j = 0; j <= M; ++j) {
    const double t = j * u.k;
    const double c = chi(t);
    if (c == 0.0) continue;
    double w = 1.0;
    for (std::size_t p = 0; p < v.size(); ++p) {
      if (p > 0) w *= t / static_cast<double>(p);
      for (int comp = 0; comp < q; ++comp) u.components[comp].col(j) += (w * c) * v[p].samples.col(comp);
    }
  }
  u.metadata["operator"] = "u_app";
  u.metadata["terms"] = std::to_string(v.size());
  return u;
}

}  // namespace cornerlab
