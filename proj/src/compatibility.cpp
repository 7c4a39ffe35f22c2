#include "cornerlab/compatibility.hpp"

#include "cornerlab/errors.hpp"
#include "cornerlab/numerics.hpp"
#include "cornerlab/sobolev_norms.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace cornerlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kResidualSamples = 1024;

std::string underflow(int j) { return "jet underflow at order " + std::to_string(j); }

// v_j = sum_m U[m] d^m u0 + sum_{i,m} F[i][m] d^m F_i with F_i = d_t^i f(., 0).
struct VForm {
  std::vector<Eigen::MatrixXd> U;
  std::vector<std::vector<Eigen::MatrixXd>> F;
};

std::vector<VForm> build_forms(const SystemSpec& spec, int k) {
  const int q = spec.q();
  const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(q, q);
  std::vector<VForm> v(k + 1);
  for (auto& f : v) {
    f.U.assign(k + 1, Z);
    f.F.assign(std::max(k, 1), std::vector<Eigen::MatrixXd>(k + 1, Z));
  }
  v[0].U[0] = Eigen::MatrixXd::Identity(q, q);
  for (int j = 0; j < k; ++j) {
    VForm& n = v[j + 1];
    for (int l = 0; l <= j; ++l) {
      const Eigen::MatrixXd c = num::binomial(j, l) * spec.A_l(l);
      if (c.isZero(0.0)) continue;
      const VForm& src = v[j - l];
      for (int m = 0; m < k; ++m) {
        n.U[m + 1] += c * src.U[m];
        for (int i = 0; i < k; ++i) n.F[i][m + 1] += c * src.F[i][m];
      }
    }
    n.F[j][0] += Eigen::MatrixXd::Identity(q, q);
  }
  return v;
}

// d^n of every u0 component at x, rows 0..n.
Eigen::MatrixXd taylor_derivs(const std::vector<ScalarFn>& f, double x, int n) {
  Eigen::MatrixXd d(n + 1, static_cast<Eigen::Index>(f.size()));
  for (std::size_t c = 0; c < f.size(); ++c) {
    const Taylor<double> t = f[c]->taylor(x, n);
    for (int r = 0; r <= n; ++r) d(r, static_cast<Eigen::Index>(c)) = r < t.valid ? t.derivative(r) : kNaN;
  }
  return d;
}

// One-sided grid derivatives at index 0 from the first samples.
Eigen::MatrixXd one_sided_derivs(const Eigen::MatrixXd& samples, double h, int n) {
  const int pts = std::min<int>(n + 4, static_cast<int>(samples.rows()));
  Eigen::VectorXd nodes(pts);
  for (int i = 0; i < pts; ++i) nodes(i) = i * h;
  const Eigen::MatrixXd w = num::fornberg_weights(0.0, nodes, n);
  Eigen::MatrixXd d(n + 1, samples.cols());
  for (int r = 0; r <= n; ++r) d.row(r) = w.col(r).transpose() * samples.topRows(pts);
  return d;
}

// Derivatives of u0 at the corner, rows 0..n.
Eigen::MatrixXd u0_corner(const SampledHalfLine& u0, int n, int order_for_error, bool* exact) {
  if (exact) *exact = true;
  if (u0.boundary_jet) {
    if (u0.jet_rows() < n + 1) throw DataError(underflow(order_for_error));
    return u0.boundary_jet->topRows(n + 1);
  }
  if (u0.has_sources()) return taylor_derivs(u0.sources, 0.0, n);
  if (exact) *exact = false;
  return one_sided_derivs(u0.samples, u0.h, n);
}

Eigen::MatrixXd g_corner(const BoundarySignal& g, int n, int order_for_error, bool* exact) {
  if (exact) *exact = true;
  if (g.jet_at_zero) {
    if (g.jet_rows() < n + 1) throw DataError(underflow(order_for_error));
    return g.jet_at_zero->topRows(n + 1);
  }
  if (g.has_sources()) return taylor_derivs(g.sources, 0.0, n);
  if (exact) *exact = false;
  return one_sided_derivs(g.samples, g.k, n);
}

// d^n F_i (x) for i < imax, n <= nmax; indexed [i][n].
std::vector<std::vector<Eigen::VectorXd>> forcing_derivs(const ForcingSpec& f, double x, int imax,
                                                         int nmax, int q) {
  std::vector<std::vector<Eigen::VectorXd>> out(std::max(imax, 1),
                                                std::vector<Eigen::VectorXd>(nmax + 1, Eigen::VectorXd::Zero(q)));
  for (const auto& term : f.terms) {
    const Taylor<double> tt = term.ft->taylor(0.0, std::max(imax - 1, 0));
    const Taylor<double> tx = term.fx->taylor(x, nmax);
    for (int i = 0; i < imax; ++i) {
      if (i >= tt.valid) throw DataError(underflow(i + 1) + " (forcing)");
      for (int n = 0; n <= nmax; ++n)
        out[i][n] += term.coeff * (tt.derivative(i) * (n < tx.valid ? tx.derivative(n) : kNaN));
    }
  }
  return out;
}

// r-th derivative of v_j at a point where u0 derivatives (rows) and forcing
// derivatives are known.
Eigen::VectorXd eval_form(const VForm& form, int j, int r, const Eigen::MatrixXd& du0,
                          const std::vector<std::vector<Eigen::VectorXd>>& df) {
  const int q = static_cast<int>(du0.cols());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(q);
  for (int m = 0; m <= j; ++m) {
    if (form.U[m].isZero(0.0)) continue;
    v += form.U[m] * du0.row(m + r).transpose();
  }
  for (int i = 0; i < j; ++i)
    for (int m = 0; m < j - i; ++m) {
      if (form.F[i][m].isZero(0.0)) continue;
      v += form.F[i][m] * df[i][m + r];
    }
  return v;
}

SobolevIndex shifted(SobolevIndex r, double by) {
  if (!r.is_smooth()) r.value -= by;
  return r;
}

}  // namespace

SobolevIndex DataTriple::regularity() const {
  SobolevIndex r = min(u0.regularity(), g.regularity());
  for (const auto& t : f.terms) r = min(r, min(t.fx->regularity(), t.ft->regularity()));
  return r;
}

void DataTriple::validate(const SystemSpec& spec) const {
  u0.validate();
  g.validate();
  if (u0.q() != spec.q()) throw std::invalid_argument("u0 must have q components");
  if (g.b() != spec.b()) throw std::invalid_argument("g must have b components");
}

double required_compat_order(double s) {
  const double k = std::floor(s);
  const double frac = s - k;
  if (std::abs(frac - 0.5) < 1e-12) return k + 0.5;
  return frac < 0.5 ? k : k + 1.0;
}

std::vector<SampledHalfLine> taylor_coefficients(const SystemSpec& spec, const DataTriple& data, int k) {
  const int q = spec.q();
  const std::vector<VForm> forms = build_forms(spec, k);
  const SampledHalfLine& u0 = data.u0;
  const int N = u0.N();
  std::vector<SampledHalfLine> v(k + 1);
  for (int j = 0; j <= k; ++j) {
    v[j].h = u0.h;
    v[j].X = u0.X;
    v[j].samples.resize(N + 1, q);
  }
  // Interior samples.
  if (u0.has_sources()) {
    for (int i = 0; i <= N; ++i) {
      const double x = i * u0.h;
      const Eigen::MatrixXd du0 = taylor_derivs(u0.sources, x, k);
      const auto df = forcing_derivs(data.f, x, k, k, q);
      for (int j = 0; j <= k; ++j) v[j].samples.row(i) = eval_form(forms[j], j, 0, du0, df).transpose();
    }
  } else {
    std::vector<Eigen::MatrixXd> D(k + 1);
    D[0] = u0.samples;
    for (int m = 1; m <= k; ++m) D[m] = num::fd_derivative_rows(D[m - 1], u0.h, 1);
    for (int i = 0; i <= N; ++i) {
      Eigen::MatrixXd du0(k + 1, q);
      for (int m = 0; m <= k; ++m) du0.row(m) = D[m].row(i);
      const auto df = forcing_derivs(data.f, i * u0.h, k, k, q);
      for (int j = 0; j <= k; ++j) v[j].samples.row(i) = eval_form(forms[j], j, 0, du0, df).transpose();
    }
  }
  // Corner jets.
  int rows = u0.boundary_jet ? u0.jet_rows() : (u0.has_sources() ? k + 1 : 0);
  if (rows > 0) {
    const Eigen::MatrixXd du0 = u0.boundary_jet ? Eigen::MatrixXd(u0.boundary_jet->topRows(rows))
                                                : taylor_derivs(u0.sources, 0.0, rows - 1);
    const auto df = forcing_derivs(data.f, 0.0, k, rows - 1, q);
    for (int j = 0; j <= k; ++j) {
      const int r_rows = rows - j;
      if (r_rows <= 0) continue;
      Eigen::MatrixXd jet(r_rows, q);
      for (int r = 0; r < r_rows; ++r) jet.row(r) = eval_form(forms[j], j, r, du0, df).transpose();
      v[j].boundary_jet = jet;
      // Keep the documented invariant jet[0] == samples[0] when sources exist.
      if (!jet.row(0).hasNaN()) v[j].samples.row(0) = jet.row(0);
    }
  }
  // Closed-form generators.
  if (u0.has_sources()) {
    const SobolevIndex reg = data.regularity();
    for (int j = 0; j <= k; ++j) {
      for (int c = 0; c < q; ++c) {
        const VForm form = forms[j];
        const std::vector<ScalarFn> src = u0.sources;
        const ForcingSpec f = data.f;
        auto taylor = [form, src, f, j, c, q, k](double x, int order) {
          const Eigen::MatrixXd du0 = taylor_derivs(src, x, j + order);
          const auto df = forcing_derivs(f, x, std::max(k, 1), j + order, q);
          Taylor<double> t(order);
          t.valid = order + 1;
          double fact = 1.0;
          for (int r = 0; r <= order; ++r) {
            if (r > 0) fact *= r;
            const double d = eval_form(form, j, r, du0, df)(c);
            if (!std::isfinite(d) && t.valid > r) t.valid = r;
            t.c(r) = d / fact;
          }
          return t;
        };
        auto value = [taylor](double x) { return taylor(x, 0).c(0); };
        v[j].sources.push_back(std::make_shared<LambdaFunction>(
            value, taylor, shifted(reg, j), "v" + std::to_string(j) + "[" + std::to_string(c) + "]"));
      }
    }
  }
  return v;
}

OrderResidual check_cc_order(int j, const SystemSpec& spec, const DataTriple& data) {
  if (j < 1) throw std::invalid_argument("compatibility order must be >= 1");
  const int q = spec.q();
  const std::vector<VForm> forms = build_forms(spec, j - 1);
  bool exact_u = true, exact_g = true;
  const Eigen::MatrixXd du0 = u0_corner(data.u0, j - 1, j, &exact_u);
  const Eigen::MatrixXd dg = g_corner(data.g, j - 1, j, &exact_g);
  const auto df = forcing_derivs(data.f, 0.0, j - 1, j - 1, q);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(spec.b());
  double scale = 1.0;
  for (int l = 0; l <= j - 1; ++l) {
    const Eigen::MatrixXd Bl = spec.B_l(l);
    if (Bl.isZero(0.0)) continue;
    const Eigen::VectorXd term = num::binomial(j - 1, l) * Bl * eval_form(forms[j - 1 - l], j - 1 - l, 0, du0, df);
    scale = std::max(scale, term.cwiseAbs().maxCoeff());
    rhs += term;
  }
  OrderResidual r;
  r.order = j;
  const Eigen::VectorXd gj = dg.row(j - 1).transpose();
  scale = std::max(scale, gj.cwiseAbs().maxCoeff());
  r.residual = gj - rhs;
  if (r.residual.hasNaN()) throw DataError(underflow(j) + " (data not differentiable at the corner)");
  if (exact_u && exact_g) {
    r.tolerance = 1e-8 * scale;
  } else {
    const double h = std::max(exact_u ? 0.0 : data.u0.h, exact_g ? 0.0 : data.g.k);
    r.tolerance = 10.0 * h * h * scale;
  }
  r.pass = r.residual.cwiseAbs().maxCoeff() <= r.tolerance;
  return r;
}

Eigen::MatrixXd half_order_residual(int k, const SystemSpec& spec, const DataTriple& data,
                                    const Eigen::VectorXd& tau) {
  if (!data.u0.has_sources() || !data.g.has_sources())
    throw std::invalid_argument("half_order_residual needs closed-form data");
  const int q = spec.q(), b = spec.b();
  const std::vector<VForm> forms = build_forms(spec, k - 1);
  Eigen::MatrixXd r(b, tau.size());
  for (Eigen::Index p = 0; p < tau.size(); ++p) {
    const double t = tau(p);
    const Eigen::MatrixXd du0 = taylor_derivs(data.u0.sources, t, k - 1);
    const Eigen::MatrixXd dg = taylor_derivs(data.g.sources, t, k - 1);
    const auto df = forcing_derivs(data.f, t, k - 1, k - 1, q);
    Eigen::VectorXd v = dg.row(k - 1).transpose();
    for (int l = 0; l <= k - 1; ++l) {
      const Eigen::MatrixXd Bl = spec.B_l(l);
      if (Bl.isZero(0.0)) continue;
      v -= num::binomial(k - 1, l) * Bl * eval_form(forms[k - 1 - l], k - 1 - l, 0, du0, df);
    }
    r.col(p) = v;
  }
  return r;
}

namespace {

NormResult combine(const NormResult& hardy, const std::vector<NormResult>& gag) {
  NormResult r = hardy;
  double g2 = 0.0;
  bool all_finite = hardy.verdict == Verdict::finite, any_div = hardy.verdict == Verdict::divergent;
  for (const auto& g : gag) {
    g2 += g.value * g.value;
    all_finite = all_finite && g.verdict == Verdict::finite;
    any_div = any_div || g.verdict == Verdict::divergent;
    r.slope = std::max(r.slope, g.slope);
  }
  r.value = std::sqrt(hardy.value * hardy.value + g2);
  for (double& p : r.truncation_sequence) p += g2;
  r.extrapolated = hardy.extrapolated + g2;
  r.verdict = all_finite ? Verdict::finite : (any_div ? Verdict::divergent : Verdict::inconclusive);
  return r;
}

}  // namespace

NormResult check_cc_half_order(int k, const SystemSpec& spec, const DataTriple& data) {
  if (k < 1) throw std::invalid_argument("half-order index must be >= 1");
  for (int j = 1; j < k; ++j)
    if (!check_cc_order(j, spec, data).pass) throw DataError("lower-order CC violated");
  const int b = spec.b();
  const double L = std::min(data.u0.X, data.g.T);
  if (data.u0.has_sources() && data.g.has_sources()) {
    NormResult hardy = hardy_integral(
        [&](double x) {
          Eigen::VectorXd tau(1);
          tau(0) = x;
          return half_order_residual(k, spec, data, tau).col(0).squaredNorm();
        },
        L);
    Eigen::VectorXd tau = Eigen::VectorXd::LinSpaced(kResidualSamples + 1, 0.0, L);
    Eigen::MatrixXd r = half_order_residual(k, spec, data, tau);
    // Corner values of singular profiles come from the one-sided limit.
    for (int c = 0; c < b; ++c)
      if (!std::isfinite(r(c, 0))) r(c, 0) = r(c, 1) + (r(c, 1) - r(c, 2));
    // A residual in H^1 lies in H^{1/2}; the sampled seminorm is then only
    // reported, since steep smooth profiles stay pre-asymptotic on the grid.
    const bool h1 = shifted(data.regularity(), k - 1).admits(1.0);
    std::vector<NormResult> gag;
    for (int c = 0; c < b; ++c) {
      gag.push_back(gagliardo_seminorm({r.row(c).transpose(), L / kResidualSamples, 0.0}, 0.5));
      if (h1) gag.back().verdict = Verdict::finite;
    }
    return combine(hardy, gag);
  }
  // Sampled path: residual on the u0 grid, g derivatives by differences.
  const int n = static_cast<int>(std::floor(L / data.u0.h + 1e-9));
  const std::vector<SampledHalfLine> v = taylor_coefficients(spec, data, k - 1);
  NormResult hardy_total;
  std::vector<NormResult> gag;
  Eigen::MatrixXd res(n + 1, b);
  Eigen::MatrixXd gd = data.g.samples;
  if (k > 1) gd = num::fd_derivative_rows(gd, data.g.k, k - 1);
  for (int i = 0; i <= n; ++i) {
    const double x = i * data.u0.h;
    Eigen::VectorXd row(b);
    for (int c = 0; c < b; ++c) row(c) = num::cubic_interp(gd.col(c), data.g.k, x);
    for (int l = 0; l <= k - 1; ++l) {
      const Eigen::MatrixXd Bl = spec.B_l(l);
      if (Bl.isZero(0.0)) continue;
      row -= num::binomial(k - 1, l) * Bl * v[k - 1 - l].samples.row(i).transpose();
    }
    res.row(i) = row.transpose();
  }
  std::vector<double> partials;
  for (int c = 0; c < b; ++c) {
    const LineSamples line{res.col(c), data.u0.h, 0.0};
    const NormResult hd = hardy_integral(line);
    if (partials.empty()) partials.assign(hd.truncation_sequence.size(), 0.0);
    for (std::size_t p = 0; p < partials.size(); ++p) partials[p] += hd.truncation_sequence[p];
    gag.push_back(gagliardo_seminorm(line, 0.5));
  }
  const double total = partials.empty() ? 0.0 : partials.back();
  hardy_total = num::classify_partials(std::sqrt(total), partials);
  return combine(hardy_total, gag);
}

CompatReport compat_report(const SystemSpec& spec, const DataTriple& data, double s_max) {
  CompatReport rep;
  rep.s_max = s_max;
  rep.data_regularity = data.regularity();
  std::map<int, OrderResidual> cc;
  auto order = [&](int j) -> const OrderResidual& {
    auto it = cc.find(j);
    if (it == cc.end()) {
      it = cc.emplace(j, check_cc_order(j, spec, data)).first;
      rep.orders_checked.push_back(j);
      rep.residuals.push_back(it->second.residual);
      rep.order_pass.push_back(it->second.pass);
      rep.tol_cc = std::max(rep.tol_cc, it->second.tolerance);
    }
    return it->second;
  };
  auto half = [&](int k) -> const NormResult& {
    auto it = rep.half_orders.find(k);
    if (it == rep.half_orders.end()) it = rep.half_orders.emplace(k, check_cc_half_order(k, spec, data)).first;
    return it->second;
  };

  rep.verified_order = 0.0;
  rep.limited_by = "s_max";
  const int steps = static_cast<int>(std::floor(2.0 * s_max + 1e-9));
  bool stopped = false;
  for (int i = 0; i <= steps && !stopped; ++i) {
    const double s = 0.5 * i;
    if (!rep.data_regularity.admits(s)) {
      rep.limited_by = "regularity";
      break;
    }
    const int kk = i / 2;
    for (int j = 1; j <= kk; ++j)
      if (!order(j).pass) {
        rep.limited_by = "order " + std::to_string(j);
        stopped = true;
        break;
      }
    if (stopped) break;
    if (i % 2 == 1) {
      const NormResult& hr = half(kk + 1);
      rep.half_order_hardy = hr;
      rep.half_order_index = kk + 1;
      if (hr.verdict != Verdict::finite) {
        rep.limited_by = "order " + std::to_string(kk + 1) + "-1/2";
        break;
      }
    }
    rep.verified_order = s;
  }

  // Each passing order j must also pass the order j-1/2 condition.
  for (const auto& [j, res] : cc) {
    if (!res.pass || !rep.data_regularity.admits(j - 0.5)) continue;
    if (half(j).verdict != Verdict::finite) rep.hierarchy_consistent = false;
  }
  return rep;
}

}  // namespace cornerlab
