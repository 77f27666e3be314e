#include "qet/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "qet/errors.hpp"

namespace qet {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Kronrod 21-point abscissae (positive half, descending) and weights; the
// odd-indexed abscissae are the 10-point Gauss nodes.
constexpr std::array<double, 11> kXgk21 = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr std::array<double, 11> kWgk21 = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980957758, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg10 = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

// Kronrod 15-point / Gauss 7-point pair for the 2D tensor rule.
constexpr std::array<double, 8> kXgk15 = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk15 = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg7 = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  double floor;  // roundoff level of this panel
};

struct PanelOrder {
  bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

Panel gauss_kronrod_21(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk21[10];
  double gauss = 0.0;
  double abs_sum = std::abs(kronrod);
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk21[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kWgk21[j] * (f1 + f2);
    abs_sum += kWgk21[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kWg10[j / 2] * (f1 + f2);
  }
  Panel p{a, b, kronrod * half, 0.0, 0.0};
  p.floor = 50.0 * kEps * abs_sum * std::abs(half);
  p.error = std::max(std::abs((kronrod - gauss) * half), p.floor);
  return p;
}

QuadratureResult adaptive(const Integrand& f, std::span<const double> breaks,
                          const QuadratureConfig& cfg) {
  std::priority_queue<Panel, std::vector<Panel>, PanelOrder> heap;
  QuadratureResult out;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] == breaks[i]) continue;
    const Panel p = gauss_kronrod_21(f, breaks[i], breaks[i + 1]);
    value += p.value;
    error += p.error;
    heap.push(p);
    out.evaluations += 21;
  }
  auto totals = [&heap]() {
    // Sum in a fixed order so the result does not depend on heap layout.
    auto copy = heap;
    std::vector<Panel> panels;
    panels.reserve(copy.size());
    while (!copy.empty()) {
      panels.push_back(copy.top());
      copy.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const Panel& x, const Panel& y) { return x.a < y.a; });
    double value = 0.0;
    double error = 0.0;
    for (const auto& p : panels) {
      value += p.value;
      error += p.error;
    }
    return std::pair{value, error};
  };

  while (!heap.empty()) {
    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value));
    if (error <= tol) break;
    Panel worst = heap.top();
    // Nothing left to gain once the worst panel sits at its roundoff floor.
    if (worst.error <= worst.floor) break;
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    if (out.subdivisions >= cfg.max_subdivisions) {
      std::ostringstream msg;
      msg << "1D adaptive integration on [" << breaks.front() << ", " << breaks.back()
          << "] did not reach tolerance " << tol << " (estimate " << value
          << ", error " << error << ") within " << cfg.max_subdivisions << " subdivisions";
      throw Error(ErrorCode::NonConvergence, msg.str());
    }
    heap.pop();
    const Panel left = gauss_kronrod_21(f, worst.a, mid);
    const Panel right = gauss_kronrod_21(f, mid, worst.b);
    out.evaluations += 42;
    ++out.subdivisions;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  const auto [v, e] = totals();
  out.value = v;
  out.error = e;
  return out;
}

}  // namespace

void QuadratureConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::ParameterViolation, what); };
  if (!(rel_tol > 0.0)) fail("quadrature rel_tol must be > 0");
  if (!(abs_tol > 0.0)) fail("quadrature abs_tol must be > 0");
  if (!(epsilon_regulator > 0.0)) fail("quadrature epsilon_regulator must be > 0");
  if (!(freq_cutoff > 0.0)) fail("quadrature freq_cutoff must be > 0");
  if (grid_points < 16) fail("quadrature grid_points must be >= 16");
  if (max_subdivisions < 1) fail("quadrature max_subdivisions must be >= 1");
}

QuadratureResult integrate_1d(const Integrand& f, double a, double b,
                              const QuadratureConfig& cfg, EndpointSingularity singular) {
  if (a == b) return {};
  if (a > b) {
    auto r = integrate_1d(f, b, a, cfg, singular == EndpointSingularity::left    ? EndpointSingularity::right
                                        : singular == EndpointSingularity::right ? EndpointSingularity::left
                                                                                 : singular);
    r.value = -r.value;
    return r;
  }
  const double w = b - a;
  switch (singular) {
    case EndpointSingularity::none: {
      const std::array<double, 2> br{a, b};
      return adaptive(f, br, cfg);
    }
    case EndpointSingularity::left: {
      const std::array<double, 2> br{0.0, 1.0};
      return adaptive([&](double t) { return f(a + w * t * t) * 2.0 * w * t; }, br, cfg);
    }
    case EndpointSingularity::right: {
      const std::array<double, 2> br{0.0, 1.0};
      return adaptive([&](double t) { return f(b - w * t * t) * 2.0 * w * t; }, br, cfg);
    }
    case EndpointSingularity::both: {
      const double m = 0.5 * (a + b);
      auto left = integrate_1d(f, a, m, cfg, EndpointSingularity::left);
      auto right = integrate_1d(f, m, b, cfg, EndpointSingularity::right);
      return {left.value + right.value, left.error + right.error,
              left.evaluations + right.evaluations, left.subdivisions + right.subdivisions};
    }
  }
  return {};
}

QuadratureResult integrate_1d(const Integrand& f, std::span<const double> breaks,
                              const QuadratureConfig& cfg) {
  if (breaks.size() < 2) return {};
  if (!std::is_sorted(breaks.begin(), breaks.end())) {
    throw Error(ErrorCode::ParameterViolation, "integration breakpoints must be sorted");
  }
  return adaptive(f, breaks, cfg);
}

double truncation_point(const Integrand& f, double start, const QuadratureConfig& cfg) {
  constexpr int kSamples = 32;
  constexpr double kGrowth = 1.5;
  double omega = std::max(start, std::numeric_limits<double>::min());
  while (omega < cfg.freq_cutoff) {
    double peak = 0.0;
    for (int i = 0; i <= kSamples; ++i) {
      const double x = omega * (1.0 + (kGrowth - 1.0) * i / kSamples);
      peak = std::max(peak, std::abs(f(x)));
    }
    if (peak < cfg.abs_tol) return omega;
    omega *= kGrowth;
  }
  return cfg.freq_cutoff;
}

// ---------------------------------------------------------------------------
// 2D cubature

namespace {

struct Cell {
  Interval x;
  Interval y;
  double value;
  double error;
  double err_x;
  double err_y;
  double floor;
};

struct CellOrder {
  bool operator()(const Cell& a, const Cell& b) const { return a.error < b.error; }
};

// Node t_i in [-1, 1] with Kronrod weight and Gauss weight (0 for Kronrod-only).
struct Node1D {
  double t;
  double wk;
  double wg;
};

const std::array<Node1D, 15>& nodes15() {
  static const std::array<Node1D, 15> nodes = [] {
    std::array<Node1D, 15> n{};
    int k = 0;
    for (int j = 0; j < 7; ++j) {
      const double wg = (j % 2 == 1) ? kWg7[j / 2] : 0.0;
      n[k++] = {-kXgk15[j], kWgk15[j], wg};
      n[k++] = {kXgk15[j], kWgk15[j], wg};
    }
    n[k] = {0.0, kWgk15[7], kWg7[3]};
    return n;
  }();
  return nodes;
}

Cell evaluate_cell(const Kernel2D& k, const Interval& x, const Interval& y) {
  const auto& nodes = nodes15();
  const double hx = 0.5 * x.width();
  const double hy = 0.5 * y.width();
  double kk = 0.0, gk = 0.0, kg = 0.0, abs_sum = 0.0;
  for (const auto& nx : nodes) {
    const double xv = x.mid() + hx * nx.t;
    double row_k = 0.0, row_g = 0.0, row_abs = 0.0;
    for (const auto& ny : nodes) {
      const double v = k.value(xv, y.mid() + hy * ny.t);
      row_k += ny.wk * v;
      row_g += ny.wg * v;
      row_abs += ny.wk * std::abs(v);
    }
    kk += nx.wk * row_k;
    gk += nx.wg * row_k;
    kg += nx.wk * row_g;
    abs_sum += nx.wk * row_abs;
  }
  const double jac = hx * hy;
  Cell c{x, y, kk * jac, 0.0, std::abs((kk - gk) * jac), std::abs((kk - kg) * jac), 0.0};
  c.floor = 50.0 * kEps * abs_sum * std::abs(jac);
  c.error = std::max(c.err_x + c.err_y, c.floor);
  return c;
}

}  // namespace

QuadratureResult integrate_2d(const Kernel2D& k, const Interval& domain_a,
                              const Interval& domain_b, const QuadratureConfig& cfg) {
  QuadratureResult out;
  if (domain_a.width() <= 0.0 || domain_b.width() <= 0.0) return out;

  if (k.denominator_min) {
    const double dmin = k.denominator_min(domain_a, domain_b);
    if (!(dmin > 0.0)) {
      std::ostringstream msg;
      msg << "kernel denominator reaches " << dmin << " on the integration domain";
      throw Error(ErrorCode::SingularKernel, msg.str());
    }
  }

  // Pre-split cells whose distance to the singular set is small compared with
  // their size, so the Kronrod rule only ever sees a regular kernel.
  std::vector<std::pair<Interval, Interval>> pending{{domain_a, domain_b}};
  std::vector<std::pair<Interval, Interval>> seeds;
  while (!pending.empty()) {
    auto [x, y] = pending.back();
    pending.pop_back();
    const double size = std::max(x.width(), y.width());
    const bool near = k.denominator_min && k.denominator_min(x, y) < 10.0 * size;
    if (near && static_cast<int>(seeds.size() + pending.size()) < cfg.max_subdivisions) {
      if (x.width() >= y.width()) {
        pending.push_back({{x.lo, x.mid()}, y});
        pending.push_back({{x.mid(), x.hi}, y});
      } else {
        pending.push_back({x, {y.lo, y.mid()}});
        pending.push_back({x, {y.mid(), y.hi}});
      }
    } else {
      seeds.push_back({x, y});
    }
  }
  out.subdivisions = static_cast<int>(seeds.size()) - 1;

  std::priority_queue<Cell, std::vector<Cell>, CellOrder> heap;
  double value = 0.0, error = 0.0;
  for (const auto& [x, y] : seeds) {
    Cell c = evaluate_cell(k, x, y);
    out.evaluations += 225;
    value += c.value;
    error += c.error;
    heap.push(c);
  }

  while (true) {
    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value));
    if (error <= tol) break;
    const Cell worst = heap.top();
    if (worst.error <= worst.floor) break;
    if (out.subdivisions >= cfg.max_subdivisions) {
      std::ostringstream msg;
      msg << "2D cubature did not reach tolerance " << tol << " (estimate " << value
          << ", error " << error << ")";
      throw Error(ErrorCode::NonConvergence, msg.str());
    }
    heap.pop();
    Cell first, second;
    if (worst.err_x >= worst.err_y) {
      first = evaluate_cell(k, {worst.x.lo, worst.x.mid()}, worst.y);
      second = evaluate_cell(k, {worst.x.mid(), worst.x.hi}, worst.y);
    } else {
      first = evaluate_cell(k, worst.x, {worst.y.lo, worst.y.mid()});
      second = evaluate_cell(k, worst.x, {worst.y.mid(), worst.y.hi});
    }
    out.evaluations += 450;
    ++out.subdivisions;
    value += first.value + second.value - worst.value;
    error += first.error + second.error - worst.error;
    heap.push(first);
    heap.push(second);
  }

  // Deterministic final sum, ordered by cell position.
  std::vector<Cell> cells;
  cells.reserve(heap.size());
  while (!heap.empty()) {
    cells.push_back(heap.top());
    heap.pop();
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return a.x.lo != b.x.lo ? a.x.lo < b.x.lo : a.y.lo < b.y.lo;
  });
  out.value = 0.0;
  out.error = 0.0;
  for (const auto& c : cells) {
    out.value += c.value;
    out.error += c.error;
  }
  return out;
}

}  // namespace qet
