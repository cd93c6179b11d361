#include "rcmap/set_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "rcmap/error.hpp"
#include "rcmap/quadrature.hpp"
#include "rcmap/redfield.hpp"

namespace rcmap::set_oracle {

double Lead::sd(double w) const {
  const double t = w - center;
  return gamma * width * width / (t * t + width * width);
}

SetParams benchmark_params(double beta_gamma) {
  const double beta = 1.0;
  const Lead left{beta_gamma / beta, 0.1, 1.0, beta, 1.0};
  Lead right = left;
  right.mu = -1.0;
  return {1.0, left, right};
}

double lamb_shift(const Lead& lead, double w) {
  const double t = w - lead.center;
  return lead.gamma * lead.width * t / (2.0 * (t * t + lead.width * lead.width));
}

double matter_integrand(const SetParams& p, double w) {
  const double jl = p.left.sd(w);
  const double jr = p.right.sd(w);
  const double df = redfield::fermi(p.left.beta, p.left.mu, w) - redfield::fermi(p.right.beta, p.right.mu, w);
  const double shift = w - p.dot_energy - lamb_shift(p.left, w) - lamb_shift(p.right, w);
  return 2.0 / std::numbers::pi * jl * jr * df / ((jl + jr) * (jl + jr) + 4.0 * shift * shift);
}

spectral::Interval integration_window(const SetParams& p) {
  double lo = std::min(p.left.center - p.cutoff * p.left.width, p.right.center - p.cutoff * p.right.width);
  double hi = std::max(p.left.center + p.cutoff * p.left.width, p.right.center + p.cutoff * p.right.width);
  lo = std::min({lo, p.left.mu - 20.0 / p.left.beta, p.right.mu - 20.0 / p.right.beta});
  hi = std::max({hi, p.left.mu + 20.0 / p.left.beta, p.right.mu + 20.0 / p.right.beta});
  return {lo, hi};
}

namespace {

void check(const SetParams& p) {
  for (const Lead* l : {&p.left, &p.right}) {
    if (!(l->gamma > 0.0) || !(l->width > 0.0)) throw Error("SET leads need gamma, width > 0");
    if (!(l->beta > 0.0)) throw Error("SET leads need beta > 0");
  }
  if (!(p.tolerance > 0.0)) throw Error("SET tolerance must be positive");
}

std::vector<double> breakpoints(const SetParams& p, spectral::Interval win) {
  std::vector<double> b{p.dot_energy, p.left.center, p.right.center, p.left.mu, p.right.mu};
  // Resonances: sign changes of w - eps - Sigma(w) on a fine scan.
  const int n = 20000;
  auto g = [&](double w) { return w - p.dot_energy - lamb_shift(p.left, w) - lamb_shift(p.right, w); };
  double prev_w = win.lower, prev = g(prev_w);
  for (int i = 1; i <= n; ++i) {
    const double w = win.lower + win.width() * i / n;
    const double v = g(w);
    if ((prev < 0.0) != (v < 0.0)) {
      double a = prev_w, c = w, ga = prev;
      for (int it = 0; it < 80; ++it) {
        const double m = 0.5 * (a + c);
        const double gm = g(m);
        if ((gm < 0.0) == (ga < 0.0)) {
          a = m;
          ga = gm;
        } else {
          c = m;
        }
      }
      b.push_back(0.5 * (a + c));
    }
    prev_w = w;
    prev = v;
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

}  // namespace

Currents exact_currents(const SetParams& p) {
  check(p);
  const auto win = integration_window(p);
  const auto bp = breakpoints(p, win);
  const quadrature::Integrand fm = [&](double w) { return matter_integrand(p, w); };
  const quadrature::Integrand fe = [&](double w) { return w * matter_integrand(p, w); };
  const auto m = quadrature::integrate(fm, win.lower, win.upper, p.tolerance, bp);
  const auto e = quadrature::integrate(fe, win.lower, win.upper, p.tolerance, bp);
  if (!m.converged) throw QuadratureError("exact SET matter current did not converge", m.value, m.error);
  if (!e.converged) throw QuadratureError("exact SET energy current did not converge", e.value, e.error);
  return {m.value, e.value, m.error, e.error};
}

fock::ImpurityModel build_set_model(const SetParams& p, bool with_rc) {
  check(p);
  using spectral::SpectralDensity;
  fock::ModelBuilder b;
  const int dot = b.add_mode("d", p.dot_energy);
  const auto l = b.attach(dot, {"L", p.left.beta, p.left.mu,
                                SpectralDensity::lorentzian(p.left.gamma, p.left.width, p.left.center, p.cutoff)});
  const auto r = b.attach(dot, {"R", p.right.beta, p.right.mu,
                                SpectralDensity::lorentzian(p.right.gamma, p.right.width, p.right.center, p.cutoff)});
  if (with_rc) {
    b.add_reaction_coordinate(l, "C_L");
    b.add_reaction_coordinate(r, "C_R");
  }
  return b.build(with_rc ? "set_rc" : "set");
}

}  // namespace rcmap::set_oracle
