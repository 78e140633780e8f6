#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "sktlab/hermitian.hpp"

namespace sktlab {

/// Right-hand side of the pluriclosed flow on left-invariant metrics:
/// d omega/dt = -(rho^B)^{(1,1)}, transcribed to the Gram matrix through
/// g(x, y) = omega(x, Jy). Requires a pluriclosed start (gated).
inline Eigen::MatrixXd flow_rhs(const LieAlgebra& L, const ComplexStructure& J, const Metric& g,
                                double gate = 1e-6) {
  const double res = pluriclosed_residual(L, J, g);
  if (res > gate)
    throw std::invalid_argument("flow_rhs: metric is not pluriclosed (residual " +
                                std::to_string(res) + ")");
  const KForm rho = bismut_ricci(L, J, g);
  const KForm p11 = bidegree_project(rho, J, 1, 1);
  if (p11.max_imag() > 1e-9 * (1.0 + p11.max_abs()))
    throw InconsistencyError("flow_rhs: (1,1) part of the Ricci form is not real");
  const int n = L.dim();
  Eigen::MatrixXd P(n, n);  // P_ab = rho^{(1,1)}(e_a, e_b)
  for (int a = 0; a < n; ++a) {
    P(a, a) = 0.0;
    for (int b = a + 1; b < n; ++b) {
      P(a, b) = p11.on_basis({a, b}).real();
      P(b, a) = -P(a, b);
    }
  }
  // gdot(x, y) = -rho11(x, Jy)
  const Eigen::MatrixXd Gdot = -P * J.matrix();
  return 0.5 * (Gdot + Gdot.transpose());
}

struct FlowOptions {
  double t_end = 1.0;
  double dt = 1e-4;
  int sample_stride = 100;      ///< diagnostics every this many steps
  double eig_floor = 1e-6;      ///< stop when min eigenvalue falls below
  double rhs_gate = 1e-6;       ///< pluriclosed gate inside the RHS
  double step_error_bound = 1e-6;  ///< Richardson local-error rejection bound
};

struct FlowSample {
  double t = 0.0;
  Eigen::MatrixXd G;
  double pluriclosed = 0.0;
  SklResiduals skl;
  double min_eig = 0.0;
  double offdiag_dev = 0.0;  ///< max |G_ij|, i != j, in the integration basis
};

enum class FlowTermination { ReachedEnd, EigFloor };

struct FlowTrace {
  std::vector<FlowSample> samples;
  FlowTermination termination = FlowTermination::ReachedEnd;
  std::string message;
};

/// Classical fixed-step RK4 on the Gram matrix with diagnostics at sample
/// strides. At each sample the local error is estimated by comparing one
/// full step against two half steps (Richardson); a violation throws.
inline FlowTrace integrate_flow(const LieAlgebra& L, const ComplexStructure& J, const Metric& g0,
                                const FlowOptions& opt = {}) {
  if (opt.dt <= 0 || opt.t_end <= 0 || opt.sample_stride <= 0)
    throw std::invalid_argument("integrate_flow: dt, t_end, stride must be positive");
  const int n = L.dim();
  FlowTrace trace;
  Eigen::MatrixXd G = g0.matrix();
  double t = 0.0;

  const auto rhs = [&](const Eigen::MatrixXd& M) {
    return flow_rhs(L, J, Metric(M), opt.rhs_gate);
  };
  const auto rk4_step = [&](const Eigen::MatrixXd& M, double h) {
    const Eigen::MatrixXd k1 = rhs(M);
    const Eigen::MatrixXd k2 = rhs(M + 0.5 * h * k1);
    const Eigen::MatrixXd k3 = rhs(M + 0.5 * h * k2);
    const Eigen::MatrixXd k4 = rhs(M + h * k3);
    return (M + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).eval();
  };

  const auto record = [&]() {
    FlowSample s;
    s.t = t;
    s.G = G;
    const Metric gm(G);
    s.pluriclosed = pluriclosed_residual(L, J, gm);
    s.skl = skl_residuals(L, J, gm);
    s.min_eig = min_eigenvalue(G);
    s.offdiag_dev = (G - Eigen::MatrixXd(G.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
    trace.samples.push_back(std::move(s));
  };

  record();
  const long total_steps = static_cast<long>(opt.t_end / opt.dt + 0.5);
  for (long step = 0; step < total_steps; ++step) {
    const Eigen::MatrixXd next = rk4_step(G, opt.dt);
    if (min_eigenvalue(next) < opt.eig_floor) {
      trace.termination = FlowTermination::EigFloor;
      trace.message = "stopped: metric approached degeneracy at t = " + std::to_string(t);
      record();
      return trace;
    }
    const bool sample_now = ((step + 1) % opt.sample_stride == 0) || step + 1 == total_steps;
    if (sample_now) {
      // a posteriori step-halving error estimate on this step
      const Eigen::MatrixXd half = rk4_step(rk4_step(G, 0.5 * opt.dt), 0.5 * opt.dt);
      const double err = (next - half).norm() / 15.0;
      if (err > opt.step_error_bound)
        throw std::runtime_error("integrate_flow: step rejected, local error estimate " +
                                 std::to_string(err) + " above bound");
    }
    G = next;
    t += opt.dt;
    if (sample_now) record();
  }
  (void)n;
  return trace;
}

/// Least-squares linear fit of (min eigenvalue)^2 against t; the root of the
/// fitted line when it is decreasing, otherwise nullopt ("none detected").
inline std::optional<double> singular_time_estimate(const FlowTrace& trace) {
  const std::size_t m = trace.samples.size();
  if (m < 3) return std::nullopt;
  Eigen::MatrixXd A(m, 2);
  Eigen::VectorXd y(m);
  for (std::size_t i = 0; i < m; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = trace.samples[i].t;
    y(i) = trace.samples[i].min_eig * trace.samples[i].min_eig;
  }
  const Eigen::Vector2d fit = A.colPivHouseholderQr().solve(y);
  if (fit(1) >= -1e-12) return std::nullopt;
  return -fit(0) / fit(1);
}

namespace flow_detail {
inline std::string num(double v) {
  char buf[64];
  const auto rc = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, rc.ptr);
}
}  // namespace flow_detail

/// CSV with one row per sample: t, the lower triangle of the metric
/// (row-major), the residuals and the minimum eigenvalue. Locale-independent.
inline std::string flow_trace_csv(const FlowTrace& trace) {
  using flow_detail::num;
  std::string out;
  if (trace.samples.empty()) return out;
  const int n = static_cast<int>(trace.samples.front().G.rows());
  out += "t";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      out += ",g_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
  out += ",res_pluriclosed,res_bianchi,res_type,res_nabla_t,min_eig,offdiag_dev\n";
  for (const auto& s : trace.samples) {
    out += num(s.t);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) out += "," + num(s.G(i, j));
    out += "," + num(s.pluriclosed) + "," + num(s.skl.bianchi) + "," + num(s.skl.type) + "," +
           num(s.skl.nabla_t) + "," + num(s.min_eig) + "," + num(s.offdiag_dev) + "\n";
  }
  return out;
}

inline void write_flow_csv(const FlowTrace& trace, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << flow_trace_csv(trace);
}

/// Companion gnuplot script plotting the metric diagonal and the residuals.
inline void write_flow_gnuplot(const FlowTrace& trace, const std::string& csv_path,
                               const std::string& gp_path) {
  if (trace.samples.empty()) return;
  const int n = static_cast<int>(trace.samples.front().G.rows());
  const int tri = n * (n + 1) / 2;
  std::ofstream f(gp_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + gp_path);
  f << "set datafile separator ','\nset key outside\nset xlabel 't'\n";
  f << "plot ";
  int col = 2;  // first metric column
  bool first = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      if (i == j) {
        if (!first) f << ", \\\n     ";
        f << "'" << csv_path << "' using 1:" << col << " with lines title 'g_{" << (i + 1) << ","
          << (j + 1) << "}'";
        first = false;
      }
      ++col;
    }
  f << ", \\\n     '" << csv_path << "' using 1:" << (2 + tri + 4)
    << " with lines title 'min eig'\n";
}

}  // namespace sktlab
