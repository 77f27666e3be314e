#include "qet/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qet/errors.hpp"

namespace qet {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBoundSlack = 1e-9;

[[noreturn]] void solver_failure(const std::string& what) {
  throw Error(ErrorCode::SolverFailure, what);
}

std::vector<double> uniform(double a, double b, int n) {
  std::vector<double> x(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) x[i] = a + (b - a) * i / n;
  x.back() = b;
  return x;
}

// Solves the Euler-Lagrange system of sum (h_{i+1} - h_i)^2 / dx_i on `x`
// with h(x.front()) = left and h(x.back()) = right. Thomas algorithm.
std::vector<double> solve_segment(const std::vector<double>& x, double left, double right) {
  const std::size_t n = x.size() - 1;
  std::vector<double> h(n + 1);
  h[0] = left;
  h[n] = right;
  if (n < 2) return h;
  const std::size_t m = n - 1;
  std::vector<double> lower(m), diag(m), upper(m), rhs(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    const double wl = 1.0 / (x[i] - x[i - 1]);
    const double wr = 1.0 / (x[i + 1] - x[i]);
    lower[k] = -wl;
    diag[k] = wl + wr;
    upper[k] = -wr;
  }
  rhs.front() += (1.0 / (x[1] - x[0])) * left;
  rhs.back() += (1.0 / (x[n] - x[n - 1])) * right;

  for (std::size_t k = 1; k < m; ++k) {
    if (!(diag[k - 1] > 0.0)) solver_failure("non-positive pivot in tridiagonal solve");
    const double w = lower[k] / diag[k - 1];
    diag[k] -= w * upper[k - 1];
    rhs[k] -= w * rhs[k - 1];
  }
  if (!(diag[m - 1] > 0.0)) solver_failure("non-positive pivot in tridiagonal solve");
  h[m] = rhs[m - 1] / diag[m - 1];
  for (std::size_t k = m - 1; k-- > 0;) h[k + 1] = (rhs[k] - upper[k] * h[k + 2]) / diag[k];
  for (double v : h) {
    if (!std::isfinite(v)) solver_failure("non-finite value in tridiagonal solve");
  }
  return h;
}

double dirichlet_energy(const std::vector<double>& x, const std::vector<double>& h) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double dh = h[i + 1] - h[i];
    s += dh * dh / (x[i + 1] - x[i]);
  }
  return s / (12.0 * kPi);
}

struct Layout {
  std::vector<double> gap;
  std::vector<double> tail;
};

Layout layout(const ProtocolGeometry& geo, double tail_length, int grid_points) {
  geo.validate();
  if (grid_points < 64) {
    throw Error(ErrorCode::ParameterViolation, "minimize_flanagan requires grid_points >= 64");
  }
  if (!(tail_length > 0.0) || !std::isfinite(tail_length)) {
    throw Error(ErrorCode::ParameterViolation, "tail_length must be > 0");
  }
  // Half the nodes resolve the gap and half the tail.
  const int gap_n = grid_points / 2;
  const int tail_n = grid_points - gap_n;
  return {uniform(geo.x2A, geo.x1B, gap_n), uniform(geo.x2B, geo.x2B + tail_length, tail_n)};
}

FlanaganMinimum assemble(const Layout& lay, const std::vector<double>& h_gap,
                         const std::vector<double>& h_tail) {
  FlanaganMinimum out;
  out.gap_part = dirichlet_energy(lay.gap, h_gap);
  out.tail_part = dirichlet_energy(lay.tail, h_tail);
  out.value = out.gap_part + out.tail_part;
  out.gap_points = static_cast<int>(lay.gap.size());
  out.tail_points = static_cast<int>(lay.tail.size());
  auto& g = out.xi.grid;
  auto& v = out.xi.values;
  for (std::size_t i = 0; i < lay.gap.size(); ++i) {
    g.push_back(lay.gap[i]);
    v.push_back(h_gap[i] * h_gap[i]);
  }
  // The plateau [x1B, x2B] is flat; its end points carry xi = 1.
  for (std::size_t i = 0; i < lay.tail.size(); ++i) {
    g.push_back(lay.tail[i]);
    v.push_back(h_tail[i] * h_tail[i]);
  }
  return out;
}

}  // namespace

void SamplingFunction::validate() const {
  if (grid.size() != values.size() || grid.size() < 2) {
    throw Error(ErrorCode::ParameterViolation, "sampling function needs matching grid/values (>= 2)");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || !std::isfinite(values[i])) {
      throw Error(ErrorCode::ParameterViolation, "sampling function must be finite");
    }
    if (values[i] < 0.0) throw Error(ErrorCode::ParameterViolation, "sampling function must be >= 0");
    if (i > 0 && grid[i] < grid[i - 1]) {
      throw Error(ErrorCode::ParameterViolation, "sampling grid must be sorted");
    }
  }
}

bool SamplingFunction::satisfies_boundary(const ProtocolGeometry& geo, double tol) const {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= geo.x2A && values[i] > tol) return false;
    if (grid[i] >= geo.x1B && grid[i] <= geo.x2B && std::abs(values[i] - 1.0) > tol) return false;
  }
  return true;
}

double flanagan_functional(const SamplingFunction& xi) {
  xi.validate();
  auto h = [&](std::size_t i) { return std::sqrt(xi.values[i]); };
  if (h(0) != 0.0 || h(xi.values.size() - 1) != 0.0) {
    throw Error(ErrorCode::NonFiniteFunctional,
                "sqrt(xi) jumps to zero at the end of the grid (nonzero end value)");
  }
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < xi.grid.size(); ++i) {
    const double dx = xi.grid[i + 1] - xi.grid[i];
    const double dh = h(i + 1) - h(i);
    if (dx == 0.0) {
      if (dh != 0.0) {
        std::ostringstream msg;
        msg << "sqrt(xi) jumps by " << dh << " at x = " << xi.grid[i];
        throw Error(ErrorCode::NonFiniteFunctional, msg.str());
      }
      continue;
    }
    s += dh * dh / dx;
  }
  return s / (12.0 * kPi);
}

FlanaganMinimum minimize_flanagan(const ProtocolGeometry& geo, double tail_length,
                                  int grid_points) {
  const Layout lay = layout(geo, tail_length, grid_points);
  return assemble(lay, solve_segment(lay.gap, 0.0, 1.0), solve_segment(lay.tail, 1.0, 0.0));
}

namespace {

// Conjugate gradients for the same Dirichlet problem, matrix-free.
std::vector<double> cg_segment(const std::vector<double>& x, double left, double right) {
  const std::size_t n = x.size() - 1;
  std::vector<double> h(n + 1, 0.0);
  h[0] = left;
  h[n] = right;
  if (n < 2) return h;
  const std::size_t m = n - 1;
  auto apply = [&](const std::vector<double>& u, std::vector<double>& out) {
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = k + 1;
      const double wl = 1.0 / (x[i] - x[i - 1]);
      const double wr = 1.0 / (x[i + 1] - x[i]);
      double v = (wl + wr) * u[k];
      if (k > 0) v -= wl * u[k - 1];
      if (k + 1 < m) v -= wr * u[k + 1];
      out[k] = v;
    }
  };
  std::vector<double> b(m, 0.0), u(m, 0.0), r(m), p(m), Ap(m);
  b.front() += left / (x[1] - x[0]);
  b.back() += right / (x[n] - x[n - 1]);
  r = b;
  p = r;
  double rr = 0.0, bb = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    rr += r[k] * r[k];
    bb += b[k] * b[k];
  }
  const double target = 1e-28 * std::max(bb, 1e-300);
  const std::size_t max_iter = 4 * m + 100;
  std::size_t it = 0;
  for (; it < max_iter && rr > target; ++it) {
    apply(p, Ap);
    double pAp = 0.0;
    for (std::size_t k = 0; k < m; ++k) pAp += p[k] * Ap[k];
    if (!(pAp > 0.0)) solver_failure("conjugate gradients lost positive definiteness");
    const double alpha = rr / pAp;
    double rr_new = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      u[k] += alpha * p[k];
      r[k] -= alpha * Ap[k];
      rr_new += r[k] * r[k];
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t k = 0; k < m; ++k) p[k] = r[k] + beta * p[k];
  }
  if (rr > target) solver_failure("conjugate gradients did not converge");
  for (std::size_t k = 0; k < m; ++k) h[k + 1] = u[k];
  return h;
}

}  // namespace

FlanaganMinimum minimize_flanagan_iterative(const ProtocolGeometry& geo, double tail_length,
                                            int grid_points) {
  const Layout lay = layout(geo, tail_length, grid_points);
  return assemble(lay, cg_segment(lay.gap, 0.0, 1.0), cg_segment(lay.tail, 1.0, 0.0));
}

double flanagan_minimum_exact(double L, double tail_length) {
  return (1.0 / L + 1.0 / tail_length) / (12.0 * kPi);
}

BoundCertification certify_bound(const TeleportReport& report, const ProtocolGeometry& geo) {
  BoundCertification c;
  const double L = geo.L();
  c.bound_value = 1.0 / (12.0 * kPi * L);
  c.bound_ratio = 12.0 * kPi * L * report.E_B;
  c.applicable = !report.squeezed;
  if (c.applicable) c.pass = c.bound_ratio <= 1.0 + kBoundSlack;
  return c;
}

}  // namespace qet
