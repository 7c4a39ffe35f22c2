#include "cornerlab/estimates_harness.hpp"

#include "cornerlab/expr.hpp"
#include "cornerlab/numerics.hpp"
#include "cornerlab/sobolev_norms.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

namespace cornerlab {

const char* to_string(EstimateKind k) {
  switch (k) {
    case EstimateKind::semigroup: return "semigroup";
    case EstimateKind::resolvent: return "resolvent";
    case EstimateKind::weighted_resolvent: return "weighted_resolvent";
  }
  return "?";
}

EstimateKind parse_estimate_kind(const std::string& name) {
  if (name == "semigroup") return EstimateKind::semigroup;
  if (name == "resolvent") return EstimateKind::resolvent;
  if (name == "weighted_resolvent") return EstimateKind::weighted_resolvent;
  throw std::invalid_argument("unknown estimate kind '" + name + "'");
}

namespace {

Eigen::VectorXd time_weights(int n, double k, double gamma) {
  Eigen::VectorXd w = num::trapezoid_weights(n, k);
  for (int j = 0; j < n; ++j) w(j) *= std::exp(-2.0 * gamma * j * k);
  return w;
}

// sum_{j <= s} (sum_c int w |d^j v_c|^2)^{1/2} for the columns of v.
double line_hs(const Eigen::MatrixXd& v, double h, const Eigen::VectorXd& w, int s) {
  double total = 0.0;
  for (int j = 0; j <= s; ++j) {
    const Eigen::MatrixXd d = j == 0 ? v : num::fd_derivative_rows(v, h, j);
    total += std::sqrt(std::max(0.0, (w.transpose() * d.array().square().matrix()).sum()));
  }
  return total;
}

Field2D forcing_field(const DataTriple& data, int q, double T, int M) {
  const int N = data.u0.N();
  Field2D f = Field2D::zeros(q, data.u0.X, T, N, M);
  for (int j = 0; j <= M; ++j)
    for (int i = 0; i <= N; ++i) {
      const Eigen::VectorXd v = data.f.evaluate(i * f.h, j * f.k, q);
      for (int c = 0; c < q; ++c) f.components[c](i, j) = v(c);
    }
  return f;
}

}  // namespace

EstimateSides estimate_sides(const Field2D& u, const DataTriple& data, double gamma, int s,
                             EstimateKind kind) {
  if (!(gamma > 0.0)) throw std::invalid_argument("estimate_sides: gamma must be positive");
  if (kind != EstimateKind::weighted_resolvent && s != 0)
    throw std::invalid_argument("estimate_sides: s must be 0 for the L2 estimates");
  if (s < 0 || s > 3) throw std::invalid_argument("estimate_sides: s must lie in {0,1,2,3}");
  const int q = u.q(), N = u.N(), M = u.M();

  EstimateSides e;
  e.gamma = gamma;
  e.s = s;
  e.kind = kind;

  Eigen::MatrixXd trace(M + 1, q);
  for (int c = 0; c < q; ++c) trace.col(c) = u.components[c].row(0).transpose();
  // The corner node carries u0(0); the trace is the limit from t > 0.
  if (M >= 3) trace.row(0) = 3.0 * trace.row(1) - 3.0 * trace.row(2) + trace.row(3);
  const Eigen::VectorXd wt = time_weights(M + 1, u.k, gamma);
  const Eigen::VectorXd wx = num::trapezoid_weights(N + 1, u.h);

  const int Mg = std::min(data.g.M(), static_cast<int>(std::llround(u.T / data.g.k)));
  const Eigen::MatrixXd g = data.g.samples.topRows(Mg + 1);
  const Eigen::VectorXd wg = time_weights(Mg + 1, data.g.k, gamma);
  const Eigen::VectorXd wu0 = num::trapezoid_weights(data.u0.N() + 1, data.u0.h);
  const bool forced = !data.f.is_zero();
  const Field2D f = forced ? forcing_field(data, q, u.T, M) : Field2D{};

  if (kind == EstimateKind::weighted_resolvent) {
    const double interior = weighted_hs_gamma_norm(u, s, gamma).value;
    const double bnd = line_hs(trace, u.k, wt, s);
    const double u0n = line_hs(data.u0.samples, data.u0.h, wu0, s);
    const double gn = line_hs(g, data.g.k, wg, s);
    const double fn = forced ? weighted_hs_gamma_norm(f, s, gamma).value : 0.0;
    e.lhs = gamma * interior * interior + bnd * bnd;
    e.rhs = u0n * u0n + gn * gn + fn * fn / gamma;
  } else {
    double sup = 0.0, interior_sq = 0.0;
    for (int j = 0; j <= M; ++j) {
      double sq = 0.0;
      for (int c = 0; c < q; ++c) sq += wx.dot(u.components[c].col(j).array().square().matrix());
      sup = std::max(sup, std::exp(-gamma * j * u.k) * std::sqrt(sq));
      interior_sq += wt(j) * sq;
    }
    const double bnd = line_hs(trace, u.k, wt, 0);
    const double u0n = line_hs(data.u0.samples, data.u0.h, wu0, 0);
    const double gn = line_hs(g, data.g.k, wg, 0);
    const double fn = forced ? weighted_hs_gamma_norm(f, 0, gamma).value : 0.0;
    if (kind == EstimateKind::semigroup) {
      e.lhs = sup + std::sqrt(gamma) * bnd;
      e.rhs = u0n + gn + fn / std::sqrt(gamma);
    } else {
      e.lhs = gamma * interior_sq + bnd * bnd;
      e.rhs = u0n * u0n + gn * gn + fn * fn / gamma;
    }
  }
  if (e.rhs > 0.0) {
    e.ratio = e.lhs / e.rhs;
  } else {
    e.anomaly = e.lhs > 1e-12;
    e.ratio = e.anomaly ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return e;
}

std::vector<EstimateSides> gamma_sweep(const Field2D& u, const DataTriple& data,
                                       const std::vector<double>& gammas, int s, EstimateKind kind) {
  std::vector<EstimateSides> out;
  for (double g : gammas) out.push_back(estimate_sides(u, data, g, s, kind));
  return out;
}

// ---------------------------------------------------------------------------
// H^s proxy

namespace {

class ProxyEvaluator {
 public:
  explicit ProxyEvaluator(const Field2D& u) : u_(u) {}

  double operator()(double s, int stride) {
    if (s < 0.0 || s > kMaxSobolevOrder) throw std::invalid_argument("hs_proxy: s out of range");
    const int k = static_cast<int>(std::floor(s + 1e-12));
    const double theta = s - k;
    const Eigen::VectorXd wx = num::trapezoid_weights(u_.N() + 1, u_.h);
    const Eigen::VectorXd wt = num::trapezoid_weights(u_.M() + 1, u_.k);
    double total = 0.0;
    for (int c = 0; c < u_.q(); ++c)
      for (int a = 0; a <= k; ++a)
        for (int b = 0; a + b <= k; ++b) {
          const Eigen::MatrixXd& d = derivative(c, a, b);
          total += wx.transpose() * d.array().square().matrix() * wt;
        }
    if (theta > 1e-12) {
      for (int c = 0; c < u_.q(); ++c)
        for (int a = 0; a <= k; ++a) total += fractional(derivative(c, a, k - a), theta, stride);
    }
    return total;
  }

 private:
  const Eigen::MatrixXd& derivative(int c, int a, int b) {
    const auto key = std::make_tuple(c, a, b);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Eigen::MatrixXd d;
    if (b > 0) {
      d = num::fd_derivative_cols(derivative(c, a, b - 1), u_.k, 1);
    } else if (a > 0) {
      d = num::fd_derivative_rows(derivative(c, a - 1, 0), u_.h, 1);
    } else {
      d = u_.components[c];
    }
    return cache_.emplace(key, std::move(d)).first->second;
  }

  static double shells_sum(const double* p, long stride, int n, double h, double theta) {
    double acc = 0.0;
    for (double v : num::gagliardo_shells(p, stride, n, h, theta)) acc += v;
    return acc;
  }

  // Seminorm in x on t-slices plus seminorm in t on x-slices, both weighted by
  // the trapezoid rule on the slice grid.
  double fractional(const Eigen::MatrixXd& d, double theta, int stride) const {
    const int nx = static_cast<int>(d.rows()), nt = static_cast<int>(d.cols());
    double acc = 0.0;
    for (int j = 0; j < nt; j += stride) {
      const double w = stride * u_.k * ((j == 0 || j + stride >= nt) ? 0.5 : 1.0);
      acc += w * shells_sum(d.col(j).data(), 1, nx, u_.h, theta);
    }
    for (int i = 0; i < nx; i += stride) {
      const double w = stride * u_.h * ((i == 0 || i + stride >= nx) ? 0.5 : 1.0);
      acc += w * shells_sum(d.data() + i, nx, nt, u_.k, theta);
    }
    return acc;
  }

  const Field2D& u_;
  std::map<std::tuple<int, int, int>, Eigen::MatrixXd> cache_;
};

}  // namespace

double hs_proxy(const Field2D& u, double s, int slice_stride) {
  ProxyEvaluator eval(u);
  return eval(s, slice_stride);
}

bool predicted_bounded(const CompatReport& report, double s) {
  return report.verified_order + 1e-12 >= required_compat_order(s) && report.data_regularity.admits(s);
}

bool SweepResult::matches(std::size_t i) const {
  return (classification[i] == "bounded") == predicted_bounded[i] && classification[i] != "inconclusive";
}

SweepResult regularity_sweep(const SystemSpec& spec, const DataTriple& data,
                             const std::vector<double>& s_grid, int levels, const SweepOptions& options) {
  if (levels < 3) throw std::invalid_argument("regularity_sweep: levels must be >= 3");
  if (s_grid.empty()) throw std::invalid_argument("regularity_sweep: empty s grid");
  SweepResult r;
  r.s = s_grid;
  double s_max = 0.0;
  for (double s : s_grid) s_max = std::max(s_max, s);
  r.report = compat_report(spec, data, s_max);
  r.compat_order = r.report.verified_order;
  r.norm_table.resize(static_cast<Eigen::Index>(s_grid.size()), levels + 1);

  for (int l = 0; l <= levels; ++l) {
    SolveConfig cfg;
    cfg.N = cfg.M = options.base_N << l;
    cfg.X = options.X;
    cfg.T = options.T;
    cfg.duhamel_steps = options.duhamel_steps;
    const Field2D u = solve_exact(spec, data, cfg);
    r.grid_sizes.push_back(cfg.N);
    ProxyEvaluator eval(u);
    for (std::size_t i = 0; i < s_grid.size(); ++i) r.norm_table(i, l) = eval(s_grid[i], 1 << l);
  }

  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    std::vector<double> partials(r.norm_table.cols());
    for (int l = 0; l <= levels; ++l) partials[l] = r.norm_table(i, l);
    const NormResult c = num::classify_partials(partials.back(), partials);
    r.verdicts.push_back(c.verdict);
    r.slopes.push_back(c.slope);
    r.classification.push_back(c.verdict == Verdict::finite      ? "bounded"
                               : c.verdict == Verdict::divergent ? "divergent"
                                                                 : "inconclusive");
    r.predicted_bounded.push_back(predicted_bounded(r.report, s_grid[i]));
  }
  return r;
}

// ---------------------------------------------------------------------------
// C(theta)

std::vector<ConstantProbeRow> half_integer_constant_probe(const SystemSpec& spec,
                                                          const DataTriple& data,
                                                          const std::vector<double>& theta_grid,
                                                          const ProbeOptions& options) {
  SolveConfig cfg;
  cfg.N = static_cast<int>(std::llround(options.N));
  cfg.M = options.time_slices * 8;
  cfg.X = options.X;
  cfg.T = options.T;
  const Field2D u = solve_exact(spec, data, cfg);

  auto h_theta_sq = [&](int col, double theta) {
    double acc = 0.0;
    for (const auto& c : u.components) {
      const LineSamples line{c.col(col), u.h, 0.0};
      const double l2 = l2_norm(line);
      acc += l2 * l2 + gagliardo_seminorm(line, theta).extrapolated;
    }
    return acc;
  };

  std::vector<ConstantProbeRow> rows;
  for (double theta : theta_grid) {
    if (!(theta > 0.0 && theta < 0.5)) throw std::invalid_argument("probe: theta must lie in (0, 1/2)");
    ConstantProbeRow row;
    row.theta = theta;
    row.rhs = h_theta_sq(0, theta);
    for (int i = 1; i <= options.time_slices; ++i) row.lhs = std::max(row.lhs, h_theta_sq(i * 8, theta));
    row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : 0.0;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Corpus

DataTriple make_triple(const std::vector<std::string>& u0, const std::vector<std::string>& g,
                       const ForcingSpec& f, double X, double T, int N, int M, int jet_order) {
  std::vector<ScalarFn> fu, fg;
  for (const auto& e : u0) fu.push_back(parse_function(e, "x"));
  for (const auto& e : g) fg.push_back(parse_function(e, "t"));
  DataTriple d;
  d.u0 = SampledHalfLine::from_functions(fu, X, N, jet_order);
  d.g = BoundarySignal::from_functions(fg, T, M, jet_order);
  d.f = f;
  return d;
}

std::vector<CorpusEntry> sweep_corpus(const SweepOptions& options) {
  const double X = options.X, T = options.T;
  const int n_per_unit = 256;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<CorpusEntry> out;
  auto toy = [&](std::string name, std::string u0, std::string g, double order, ForcingSpec f = {}) {
    CorpusEntry e;
    e.name = std::move(name);
    e.spec = SystemSpec::toy();
    e.data = make_triple({u0}, {g}, f, X, T, static_cast<int>(X * n_per_unit),
                         static_cast<int>(T * n_per_unit));
    e.expected_order = order;
    out.push_back(std::move(e));
  };
  toy("cutoff_vs_zero", "eta(x,0.5,1)", "0", 0.0);
  toy("exp_vs_zero", "exp(-x)", "0", 0.0);
  toy("root03_initial", "x^0.3", "0", 0.5);
  toy("root03_boundary", "0", "t^0.3", 0.5);
  toy("exp_exp", "exp(-x)", "exp(-t)", 1.0);
  {
    CorpusEntry e;
    e.name = "system_exp";
    Eigen::MatrixXd A(2, 2), B(1, 2);
    A << 0, 1, 1, 0;
    B << 1, 0;
    e.spec = SystemSpec::constant(A, B);
    const double Xd = X + T;  // fastest outgoing speed is 1
    e.data = make_triple({"exp(-x)", "0"}, {"exp(-t)"}, {}, Xd, T, static_cast<int>(Xd * n_per_unit),
                         static_cast<int>(T * n_per_unit));
    e.expected_order = 1.0;
    out.push_back(std::move(e));
  }
  toy("root13_initial", "x^1.3", "0", 1.5);
  toy("root13_boundary", "0", "t^1.3", 1.5);
  toy("exp_linear", "exp(-x)", "1+t", 2.0);
  {
    ForcingSpec f;
    f.terms.push_back({Eigen::VectorXd::Ones(1), constant_function(1.0), constant_function(1.0)});
    toy("sine_forced", "sin(x)", "t^2", 2.0, f);
  }
  toy("root23_initial", "x^2.3", "0", 2.5);
  toy("sine_smooth", "sin(x)", "-sin(t)", inf);
  return out;
}

}  // namespace cornerlab
