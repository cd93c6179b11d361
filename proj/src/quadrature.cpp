#include "rcmap/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rcmap/error.hpp"

namespace rcmap::quadrature {

namespace {

constexpr std::size_t kMaxIntervals = 4000;

struct Panel {
  double a, b, value, error, l1;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// 15-point Kronrod / 7-point Gauss pair on [a, b] with the QUADPACK error
// scaling. The node tables come from Boost.
Panel gk15(const Integrand& f, double a, double b) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  using Gauss = boost::math::quadrature::gauss<double, 7>;
  const auto& x = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  std::array<double, 15> fx;
  fx[0] = f(c);
  for (std::size_t i = 1; i < x.size(); ++i) {
    fx[2 * i - 1] = f(c - h * x[i]);
    fx[2 * i] = f(c + h * x[i]);
  }
  double kronrod = wk[0] * fx[0];
  double gauss = wg[0] * fx[0];
  double abs_sum = wk[0] * std::abs(fx[0]);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double pair = fx[2 * i - 1] + fx[2 * i];
    kronrod += wk[i] * pair;
    abs_sum += wk[i] * (std::abs(fx[2 * i - 1]) + std::abs(fx[2 * i]));
    if (i % 2 == 0) gauss += wg[i / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = wk[0] * std::abs(fx[0] - mean);
  for (std::size_t i = 1; i < x.size(); ++i) {
    asc += wk[i] * (std::abs(fx[2 * i - 1] - mean) + std::abs(fx[2 * i] - mean));
  }
  const double value = kronrod * h;
  const double l1 = abs_sum * std::abs(h);
  asc *= std::abs(h);
  double error = std::abs((kronrod - gauss) * h);
  if (asc != 0.0 && error != 0.0) error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (l1 > std::numeric_limits<double>::min() / (50.0 * eps)) error = std::max(50.0 * eps * l1, error);
  return {a, b, value, error, l1};
}

struct Piece {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

// Globally adaptive: always bisect the panel with the largest error estimate
// until the summed estimate meets the tolerance relative to the L1 norm.
Piece integrate_piece(const Integrand& f, double a, double b, double tolerance) {
  if (a == b) return {};
  std::priority_queue<Panel> panels;
  panels.push(gk15(f, a, b));
  double value = panels.top().value;
  double error = panels.top().error;
  double l1 = panels.top().l1;
  auto target = [&] { return std::max(tolerance * l1, 64 * std::numeric_limits<double>::epsilon() * l1); };
  while (error > target() && panels.size() < kMaxIntervals) {
    const Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    panels.pop();
    const Panel left = gk15(f, worst.a, mid);
    const Panel right = gk15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    panels.push(left);
    panels.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  return {value, error, l1};
}

Result finish(const Piece& p, double tolerance) {
  const double target = std::max(tolerance * p.l1, 64 * std::numeric_limits<double>::epsilon() * p.l1);
  return {p.value, p.error, p.error <= target || p.error == 0.0};
}

constexpr std::array<double, 4> kNodes4 = {-0.86113631159405257522, -0.33998104358485626480,
                                           0.33998104358485626480, 0.86113631159405257522};
constexpr std::array<double, 4> kWeights4 = {0.34785484513745385737, 0.65214515486254614263,
                                             0.65214515486254614263, 0.34785484513745385737};
constexpr std::array<double, 8> kNodes8 = {
    -0.96028985649753623168, -0.79666647741362673959, -0.52553240991632898582,
    -0.18343464249564980494, 0.18343464249564980494,  0.52553240991632898582,
    0.79666647741362673959,  0.96028985649753623168};
constexpr std::array<double, 8> kWeights8 = {
    0.10122853629037625915, 0.22238103445337447054, 0.31370664587788728734,
    0.36268378337836198297, 0.36268378337836198297, 0.31370664587788728734,
    0.22238103445337447054, 0.10122853629037625915};

}  // namespace

Result integrate(const Integrand& f, double a, double b, double tolerance,
                 std::span<const double> breakpoints) {
  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  // Nearly coincident cuts only produce slivers.
  const double gap = 1e-12 * (b - a);
  std::vector<double> kept{cuts.front()};
  for (std::size_t i = 1; i + 1 < cuts.size(); ++i) {
    if (cuts[i] - kept.back() > gap && b - cuts[i] > gap) kept.push_back(cuts[i]);
  }
  kept.push_back(b);

  Piece total;
  for (std::size_t i = 0; i + 1 < kept.size(); ++i) {
    const Piece piece = integrate_piece(f, kept[i], kept[i + 1], tolerance);
    total.value += piece.value;
    total.error += piece.error;
    total.l1 += piece.l1;
  }
  return finish(total, tolerance);
}

Result principal_value(const Integrand& f, double a, double b, double pole, double tolerance) {
  if (!(pole > a && pole < b)) {
    if (pole == a || pole == b) {
      throw Error("principal value requested with the pole on an interval endpoint");
    }
    return integrate([&](double x) { return f(x) / (x - pole); }, a, b, tolerance);
  }
  const double f_pole = f(pole);
  auto regular = [&](double x) {
    const double dx = x - pole;
    return dx == 0.0 ? 0.0 : (f(x) - f_pole) / dx;
  };
  const Piece left = integrate_piece(regular, a, pole, tolerance);
  const Piece right = integrate_piece(regular, pole, b, tolerance);
  Result out = finish({left.value + right.value, left.error + right.error, left.l1 + right.l1}, tolerance);
  if (f_pole != 0.0) out.value += f_pole * std::log((b - pole) / (pole - a));
  return out;
}

std::span<const double> legendre_nodes(int n) {
  if (n == 4) return kNodes4;
  if (n == 8) return kNodes8;
  throw Error("unsupported Gauss-Legendre order");
}

std::span<const double> legendre_weights(int n) {
  if (n == 4) return kWeights4;
  if (n == 8) return kWeights8;
  throw Error("unsupported Gauss-Legendre order");
}

}  // namespace rcmap::quadrature
