#include "rcmap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rcmap/error.hpp"
#include "rcmap/kernels.hpp"
#include "rcmap/quadrature.hpp"

namespace rcmap::spectral {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

int sign(double x) { return (x > 0) - (x < 0); }

// Fritsch-Butland slopes with the three-point edge rule (same scheme as
// scipy's PchipInterpolator).
std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), d(n - 1), m(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x[k + 1] - x[k];
    d[k] = (y[k + 1] - y[k]) / h[k];
  }
  if (n == 2) {
    m[0] = m[1] = d[0];
    return m;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (sign(d[k - 1]) * sign(d[k]) <= 0) continue;
    const double w1 = 2 * h[k] + h[k - 1];
    const double w2 = h[k] + 2 * h[k - 1];
    m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
  }
  auto edge = [](double h0, double h1, double d0, double d1) {
    double s = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (sign(s) != sign(d0)) {
      s = 0.0;
    } else if (sign(d0) != sign(d1) && std::abs(s) > 3 * std::abs(d0)) {
      s = 3 * d0;
    }
    return s;
  };
  m[0] = edge(h[0], h[1], d[0], d[1]);
  m[n - 1] = edge(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  return m;
}

// Closed-form Re W0+ of a Lorentzian restricted to [lower, upper].
double lorentzian_window_cauchy(const Lorentzian& l, double w, Interval window) {
  const double t = w - l.center;
  const double a = window.lower - l.center;
  const double b = window.upper - l.center;
  const double d = l.width;
  const double pref = l.gamma * d * d / (kPi * (t * t + d * d));
  return pref * (std::log(std::abs((b - t) / (a - t))) -
                 0.5 * std::log((b * b + d * d) / (a * a + d * d)) -
                 (t / d) * (std::atan(b / d) - std::atan(a / d)));
}

double lorentzian_cauchy(const Lorentzian& l, double w) {
  const double t = w - l.center;
  return -l.gamma * l.width * t / (t * t + l.width * l.width);
}

double residual_value(double lambda2, double j, double re) {
  if (j <= 0.0 || std::isinf(re)) return 0.0;
  return 4.0 * lambda2 * j / (j * j + re * re);
}

void check_residual(std::vector<double>& values, double tolerance, int level) {
  double max_value = 0.0;
  double min_value = 0.0;
  for (double v : values) {
    if (std::isnan(v)) throw MappingBreakdown(level, v);
    max_value = std::max(max_value, v);
    min_value = std::min(min_value, v);
  }
  if (min_value < -tolerance * max_value) throw MappingBreakdown(level, min_value);
  for (double& v : values) v = std::max(v, 0.0);
}

double require_weight(double weight) {
  if (!(weight > 0.0)) throw Error("degenerate SD: total weight is not positive");
  if (!std::isfinite(weight)) throw Error("degenerate SD: total weight is infinite");
  return weight;
}

quadrature::Result checked(quadrature::Result r, const char* what) {
  if (!r.converged) throw QuadratureError(what, r.value, r.error);
  return r;
}

// Numerical moments over the quadrature window.
std::pair<double, double> window_moments(const SpectralDensity& sd, double tolerance) {
  const Interval win = sd.window();
  std::vector<double> cuts;
  if (const auto* l = sd.as<Lorentzian>()) cuts.push_back(l->center);
  if (const auto* t = sd.as<Tabulated>()) cuts.assign(t->omega().begin(), t->omega().end());
  const auto w0 = checked(
      quadrature::integrate([&](double w) { return sd(w); }, win.lower, win.upper, tolerance, cuts),
      "weight quadrature did not converge");
  const auto w1 = checked(quadrature::integrate([&](double w) { return w * sd(w); }, win.lower,
                                                win.upper, tolerance, cuts),
                          "first-moment quadrature did not converge");
  return {w0.value / (2 * kPi), w1.value / (2 * kPi)};
}

RCChainLevel tabulated_level(double lambda2, double energy, std::vector<double> grid,
                             std::vector<double> values, double truncated, const MapOptions& opt,
                             int level) {
  check_residual(values, opt.breakdown_tolerance, level);
  return RCChainLevel{std::sqrt(lambda2), energy,
                      SpectralDensity::tabulated(std::move(grid), std::move(values)), truncated};
}

RCChainLevel map_impl(const SpectralDensity& sd, const MapOptions& opt, int level) {
  const bool numeric = opt.method == MapMethod::quadrature;

  if (const auto* l = sd.as<Lorentzian>()) {
    if (!numeric) {
      require_weight(l->gamma * l->width);
      return RCChainLevel{std::sqrt(0.5 * l->gamma * l->width), l->center,
                          SpectralDensity::flat(2.0 * l->width, -kInf, kInf), 0.0};
    }
    auto [weight, moment] = window_moments(sd, opt.tolerance);
    const double tail = 0.5 * l->gamma * l->width * (1.0 - 2.0 / kPi * std::atan(l->cutoff));
    const double lambda2 = require_weight(weight + tail);
    const double energy = (moment + l->center * tail) / lambda2;
    std::vector<double> grid = lorentzian_grid(*l, opt.grid_points);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double w = grid[i];
      // The window edges are poles of the window PV; nudge inwards.
      const double inner = std::clamp(w, grid.front() + 1e-12 * l->width, grid.back() - 1e-12 * l->width);
      const auto W = cauchy_plus_quadrature(sd, inner, opt.tolerance);
      values[i] = residual_value(lambda2, sd(w), W.real());
    }
    return tabulated_level(lambda2, energy, std::move(grid), std::move(values), tail, opt, level);
  }

  if (const auto* s = sd.as<Semicircle>()) {
    if (!numeric) return RCChainLevel{0.5 * s->radius, s->center, sd, 0.0};
    auto [weight, moment] = window_moments(sd, opt.tolerance);
    const double lambda2 = require_weight(weight);
    std::vector<double> grid = edge_clustered_grid(s->center - s->radius, s->center + s->radius,
                                                   opt.grid_points);
    std::vector<double> values(grid.size(), 0.0);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      values[i] = residual_value(lambda2, sd(grid[i]),
                                 cauchy_plus_quadrature(sd, grid[i], opt.tolerance).real());
    }
    return tabulated_level(lambda2, moment / lambda2, std::move(grid), std::move(values), 0.0, opt,
                           level);
  }

  if (const auto* f = sd.as<Flat>()) {
    if (!std::isfinite(f->lower) || !std::isfinite(f->upper)) {
      throw Error("degenerate SD: flat density with infinite support has infinite weight");
    }
    double lambda2 = 0.0;
    double energy = 0.0;
    if (numeric) {
      auto [weight, moment] = window_moments(sd, opt.tolerance);
      lambda2 = require_weight(weight);
      energy = moment / lambda2;
    } else {
      lambda2 = require_weight(f->height * (f->upper - f->lower) / (2 * kPi));
      energy = 0.5 * (f->lower + f->upper);
    }
    std::vector<double> grid = edge_clustered_grid(f->lower, f->upper, opt.grid_points);
    std::vector<double> values(grid.size(), 0.0);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const double re = numeric ? cauchy_plus_quadrature(sd, grid[i], opt.tolerance).real()
                                : cauchy_plus(sd, grid[i]).real();
      values[i] = residual_value(lambda2, f->height, re);
    }
    return tabulated_level(lambda2, energy, std::move(grid), std::move(values), 0.0, opt, level);
  }

  const auto& t = std::get<Tabulated>(sd.kind());
  double lambda2 = 0.0;
  double energy = 0.0;
  if (numeric) {
    auto [weight, moment] = window_moments(sd, opt.tolerance);
    lambda2 = require_weight(weight);
    energy = moment / lambda2;
  } else {
    lambda2 = require_weight(t.integral() / (2 * kPi));
    energy = t.first_moment() / (2 * kPi * lambda2);
  }
  std::vector<double> grid(t.omega().begin(), t.omega().end());
  std::vector<double> values(grid.size(), 0.0);
  const std::span<const double> interior(grid.data() + 1, grid.size() - 2);
  const std::vector<double> re = numeric ? kernels::cauchy_real_reference(t, interior, opt.tolerance)
                                         : kernels::cauchy_real(t, interior);
  for (std::size_t i = 0; i < interior.size(); ++i) {
    values[i + 1] = residual_value(lambda2, t.values()[i + 1], re[i]);
  }
  return tabulated_level(lambda2, energy, std::move(grid), std::move(values), 0.0, opt, level);
}

}  // namespace

bool Interval::finite() const { return std::isfinite(lower) && std::isfinite(upper); }

// ---------------------------------------------------------------------------
// Tabulated

Tabulated::Tabulated(std::vector<double> omega, std::vector<double> values)
    : omega_(std::move(omega)), values_(std::move(values)) {
  if (omega_.size() < 2 || omega_.size() != values_.size()) {
    throw Error("tabulated SD needs at least two (omega, J) samples of equal length");
  }
  double max_value = 0.0;
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    if (!std::isfinite(omega_[i]) || !std::isfinite(values_[i])) {
      throw Error("tabulated SD contains non-finite samples");
    }
    if (i > 0 && !(omega_[i] > omega_[i - 1])) {
      throw Error("tabulated SD grid must be strictly increasing");
    }
    max_value = std::max(max_value, values_[i]);
  }
  for (double& v : values_) {
    if (v < -1e-8 * max_value) throw Error("tabulated SD has negative samples");
    v = std::max(v, 0.0);
  }
  slopes_ = monotone_slopes(omega_, values_);
}

std::size_t Tabulated::locate(double w) const {
  if (w <= omega_.front()) return 0;
  if (w >= omega_.back()) return pieces() - 1;
  const auto it = std::upper_bound(omega_.begin(), omega_.end(), w);
  return static_cast<std::size_t>(it - omega_.begin()) - 1;
}

double Tabulated::eval_piece(std::size_t i, double w) const {
  const double h = omega_[i + 1] - omega_[i];
  const double s = w - omega_[i];
  const double delta = (values_[i + 1] - values_[i]) / h;
  const double c2 = (3 * delta - 2 * slopes_[i] - slopes_[i + 1]) / h;
  const double c3 = (slopes_[i] + slopes_[i + 1] - 2 * delta) / (h * h);
  return values_[i] + s * (slopes_[i] + s * (c2 + s * c3));
}

double Tabulated::operator()(double w) const {
  if (w < omega_.front() || w > omega_.back()) return 0.0;
  return std::max(0.0, eval_piece(locate(w), w));
}

double Tabulated::integral() const {
  double total = 0.0;
  for (std::size_t i = 0; i < pieces(); ++i) {
    const double h = omega_[i + 1] - omega_[i];
    total += 0.5 * h * (values_[i] + values_[i + 1]) + h * h * (slopes_[i] - slopes_[i + 1]) / 12.0;
  }
  return total;
}

double Tabulated::first_moment() const {
  double total = 0.0;
  for (std::size_t i = 0; i < pieces(); ++i) {
    const double h = omega_[i + 1] - omega_[i];
    const double delta = (values_[i + 1] - values_[i]) / h;
    const double c2 = (3 * delta - 2 * slopes_[i] - slopes_[i + 1]) / h;
    const double c3 = (slopes_[i] + slopes_[i + 1] - 2 * delta) / (h * h);
    const double area = 0.5 * h * (values_[i] + values_[i + 1]) +
                        h * h * (slopes_[i] - slopes_[i + 1]) / 12.0;
    // int_0^h s p(s) ds in the local coordinate, then shift by omega_i.
    const double local = values_[i] * h * h / 2 + slopes_[i] * h * h * h / 3 +
                         c2 * std::pow(h, 4) / 4 + c3 * std::pow(h, 5) / 5;
    total += omega_[i] * area + local;
  }
  return total;
}

// ---------------------------------------------------------------------------
// SpectralDensity

SpectralDensity::SpectralDensity(Kind kind) : kind_(std::move(kind)) {
  if (const auto* l = as<Lorentzian>()) {
    if (!(l->gamma >= 0) || !(l->width > 0) || !(l->cutoff > 0) || !std::isfinite(l->center)) {
      throw Error("lorentzian SD needs gamma >= 0, width > 0, cutoff > 0");
    }
  } else if (const auto* f = as<Flat>()) {
    if (!(f->height >= 0) || !(f->lower < f->upper)) {
      throw Error("flat SD needs height >= 0 and lower < upper");
    }
  } else if (const auto* s = as<Semicircle>()) {
    if (!(s->radius > 0) || !std::isfinite(s->center)) throw Error("semicircle SD needs radius > 0");
  }
}

SpectralDensity SpectralDensity::lorentzian(double gamma, double width, double center, double cutoff) {
  return SpectralDensity(Lorentzian{gamma, width, center, cutoff});
}

SpectralDensity SpectralDensity::flat(double height, double lower, double upper) {
  return SpectralDensity(Flat{height, lower, upper});
}

SpectralDensity SpectralDensity::semicircle(double center, double radius) {
  return SpectralDensity(Semicircle{center, radius});
}

SpectralDensity SpectralDensity::tabulated(std::vector<double> omega, std::vector<double> values) {
  return SpectralDensity(Tabulated(std::move(omega), std::move(values)));
}

double SpectralDensity::operator()(double w) const {
  return std::visit(
      [w](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Lorentzian>) {
          const double t = w - k.center;
          return k.gamma * k.width * k.width / (t * t + k.width * k.width);
        } else if constexpr (std::is_same_v<T, Flat>) {
          return (w >= k.lower && w <= k.upper) ? k.height : 0.0;
        } else if constexpr (std::is_same_v<T, Semicircle>) {
          const double t = w - k.center;
          return std::sqrt(std::max(0.0, k.radius * k.radius - t * t));
        } else {
          return k(w);
        }
      },
      kind_);
}

Interval SpectralDensity::support() const {
  return std::visit(
      [](const auto& k) -> Interval {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Lorentzian>) {
          return {-kInf, kInf};
        } else if constexpr (std::is_same_v<T, Flat>) {
          return {k.lower, k.upper};
        } else if constexpr (std::is_same_v<T, Semicircle>) {
          return {k.center - k.radius, k.center + k.radius};
        } else {
          return {k.lower(), k.upper()};
        }
      },
      kind_);
}

Interval SpectralDensity::window() const {
  if (const auto* l = as<Lorentzian>()) {
    return {l->center - l->cutoff * l->width, l->center + l->cutoff * l->width};
  }
  return support();
}

std::string SpectralDensity::kind_name() const {
  static constexpr const char* names[] = {"lorentzian", "flat", "semicircle", "tabulated"};
  return names[kind_.index()];
}

double eval_sd(const SpectralDensity& sd, double w) { return sd(w); }

std::complex<double> cauchy_plus(const SpectralDensity& sd, double w) {
  const double j = sd(w);
  if (const auto* l = sd.as<Lorentzian>()) return {lorentzian_cauchy(*l, w), j};
  if (const auto* f = sd.as<Flat>()) {
    const bool lo_inf = std::isinf(f->lower);
    const bool hi_inf = std::isinf(f->upper);
    if (lo_inf && hi_inf) return {0.0, j};
    if (lo_inf || hi_inf) throw Error("Cauchy transform of a half-infinite flat SD diverges");
    if (w == f->lower) return {kInf, j};
    if (w == f->upper) return {-kInf, j};
    return {f->height / kPi * std::log(std::abs((f->upper - w) / (w - f->lower))), j};
  }
  if (const auto* s = sd.as<Semicircle>()) {
    const double t = w - s->center;
    if (std::abs(t) <= s->radius) return {-t, j};
    return {-t + sign(t) * std::sqrt(t * t - s->radius * s->radius), 0.0};
  }
  const auto& t = std::get<Tabulated>(sd.kind());
  const double point[] = {w};
  return {kernels::cauchy_real(t, point)[0], j};
}

std::complex<double> cauchy_plus_quadrature(const SpectralDensity& sd, double w, double tolerance) {
  const Interval win = sd.window();
  if (!win.finite()) throw Error("quadrature Cauchy transform needs a finite window");
  std::function<double(double)> f = [&](double x) { return sd(x); };
  const auto pv = quadrature::principal_value(f, win.lower, win.upper, w, tolerance);
  if (!pv.converged) throw QuadratureError("principal-value quadrature did not converge", pv.value, pv.error);
  double re = pv.value / kPi;
  if (const auto* l = sd.as<Lorentzian>()) {
    re += lorentzian_cauchy(*l, w) - lorentzian_window_cauchy(*l, w, win);
  }
  return {re, sd(w)};
}

RCChainLevel rc_map(const SpectralDensity& sd, const MapOptions& options) {
  return map_impl(sd, options, 0);
}

std::vector<RCChainLevel> iterate_chain(const SpectralDensity& sd, int n, const MapOptions& options) {
  if (n < 1) throw Error("iterate_chain needs n >= 1");
  if (!sd.support().finite()) {
    throw Error("iterate_chain needs a finite support; tabulate a truncated window first");
  }
  std::vector<RCChainLevel> levels;
  levels.reserve(static_cast<std::size_t>(n));
  const SpectralDensity* current = &sd;
  for (int k = 0; k < n; ++k) {
    levels.push_back(map_impl(*current, options, k));
    current = &levels.back().residual;
  }
  return levels;
}

double total_weight(const SpectralDensity& sd) {
  return std::visit(
      [](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Lorentzian>) {
          return 0.5 * k.gamma * k.width;
        } else if constexpr (std::is_same_v<T, Flat>) {
          return k.height * (k.upper - k.lower) / (2 * kPi);
        } else if constexpr (std::is_same_v<T, Semicircle>) {
          return 0.25 * k.radius * k.radius;
        } else {
          return k.integral() / (2 * kPi);
        }
      },
      sd.kind());
}

SpectralDensity tabulate(const SpectralDensity& sd, std::vector<double> grid) {
  std::vector<double> values(grid.size());
  std::transform(grid.begin(), grid.end(), values.begin(), [&](double w) { return sd(w); });
  return SpectralDensity::tabulated(std::move(grid), std::move(values));
}

std::vector<double> edge_clustered_grid(double lower, double upper, std::size_t n) {
  if (n < 2) throw Error("grid needs at least two points");
  std::vector<double> grid(n);
  const double c = 0.5 * (lower + upper);
  const double r = 0.5 * (upper - lower);
  for (std::size_t j = 0; j < n; ++j) {
    grid[j] = c - r * std::cos(kPi * static_cast<double>(j) / static_cast<double>(n - 1));
  }
  grid.front() = lower;
  grid.back() = upper;
  // cos() is not exactly antisymmetric in floating point; enforce ordering.
  for (std::size_t j = 1; j < n; ++j) grid[j] = std::max(grid[j], std::nextafter(grid[j - 1], kInf));
  return grid;
}

std::vector<double> lorentzian_grid(const Lorentzian& l, std::size_t n) {
  if (n < 2) throw Error("grid needs at least two points");
  const double theta_max = std::atan(l.cutoff);
  std::vector<double> grid(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double theta = -theta_max + 2 * theta_max * static_cast<double>(j) / static_cast<double>(n - 1);
    grid[j] = l.center + l.width * std::tan(theta);
  }
  grid.front() = l.center - l.cutoff * l.width;
  grid.back() = l.center + l.cutoff * l.width;
  if (n % 2 == 1) grid[n / 2] = l.center;
  return grid;
}

double sup_distance(const SpectralDensity& a, const SpectralDensity& b, Interval over,
                    std::size_t samples) {
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double w = over.lower + over.width() * static_cast<double>(i) / static_cast<double>(samples - 1);
    worst = std::max(worst, std::abs(a(w) - b(w)));
  }
  return worst;
}

}  // namespace rcmap::spectral
