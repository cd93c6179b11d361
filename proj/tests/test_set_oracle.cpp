#include <cmath>
#include <numbers>

#include <doctest.h>

#include "rcmap/set_oracle.hpp"

using namespace rcmap::set_oracle;

namespace {

// Independent oracle: composite Simpson on a uniform grid over the oracle
// window, halving the step until two refinements agree to 1e-8.
struct Simpson {
  double matter, energy;
};

Simpson simpson(const SetParams& p) {
  auto fermi = [](double beta, double mu, double w) { return 1.0 / (1.0 + std::exp(beta * (w - mu))); };
  auto lor = [](const Lead& l, double w) {
    const double t = w - l.center;
    return l.gamma * l.width * l.width / (t * t + l.width * l.width);
  };
  auto shift = [](const Lead& l, double w) {
    const double t = w - l.center;
    return l.gamma * l.width * t / (2.0 * (t * t + l.width * l.width));
  };
  auto f = [&](double w) {
    const double jl = lor(p.left, w), jr = lor(p.right, w);
    const double s = w - p.dot_energy - shift(p.left, w) - shift(p.right, w);
    return 2.0 / std::numbers::pi * jl * jr * (fermi(p.left.beta, p.left.mu, w) - fermi(p.right.beta, p.right.mu, w)) /
           ((jl + jr) * (jl + jr) + 4.0 * s * s);
  };
  const auto win = integration_window(p);
  Simpson prev{0, 0};
  for (long n = 1 << 12; n <= (1L << 24); n *= 2) {
    const double h = (win.upper - win.lower) / n;
    double m = 0, e = 0;
    for (long i = 0; i <= n; ++i) {
      const double w = win.lower + i * h;
      const double c = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double v = f(w);
      m += c * v;
      e += c * w * v;
    }
    const Simpson cur{m * h / 3, e * h / 3};
    if (std::abs(cur.matter / prev.matter - 1) < 1e-8 && std::abs(cur.energy / prev.energy - 1) < 1e-8) return cur;
    prev = cur;
  }
  FAIL("Simpson oracle did not settle");
  return prev;
}

}  // namespace

TEST_CASE("Lamb shift closed form") {
  const Lead l{1.0, 0.1, 1.0, 1.0, 0.0};
  CHECK(lamb_shift(l, 1.0) == 0.0);
  CHECK(lamb_shift(l, 1.1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(std::abs(lamb_shift(l, 1e12)) < 1e-12);
}

TEST_CASE("no bias means no current") {
  auto p = benchmark_params(1e-2);
  p.right.mu = p.left.mu;
  const auto c = exact_currents(p);
  CHECK(c.matter == 0.0);
  CHECK(c.energy == 0.0);
}

TEST_CASE("swapping the leads flips the currents") {
  auto p = benchmark_params(0.1);
  p.left.gamma = 0.07;
  p.right.width = 0.3;
  const auto a = exact_currents(p);
  std::swap(p.left, p.right);
  const auto b = exact_currents(p);
  CHECK(b.matter == doctest::Approx(-a.matter).epsilon(1e-10));
  CHECK(b.energy == doctest::Approx(-a.energy).epsilon(1e-10));
}

TEST_CASE("golden benchmark value") {
  const auto p = benchmark_params(1e-2);
  const auto c = exact_currents(p);
  // frozen from the Simpson oracle below
  CHECK(c.matter == doctest::Approx(1.8132242490197e-3).epsilon(1e-8));
  CHECK(c.energy == doctest::Approx(1.8128796667457e-3).epsilon(1e-8));
  const auto s = simpson(p);
  CHECK(s.matter == doctest::Approx(1.8132242490197e-3).epsilon(1e-8));
}

TEST_CASE("adaptive and fixed-grid quadratures agree on the acceptance points") {
  for (double bg : {1e-3, 3e-3, 1e-2, 3e-2, 1e-1}) {
    const auto p = benchmark_params(bg);
    const auto c = exact_currents(p);
    const auto s = simpson(p);
    CAPTURE(bg);
    CHECK(std::abs(c.matter / s.matter - 1) < 1e-6);
    CHECK(std::abs(c.energy / s.energy - 1) < 1e-6);
  }
}

TEST_CASE("forward bias gives a nonnegative integrand and current") {
  const auto p = benchmark_params(0.3);
  const auto win = integration_window(p);
  for (double w = win.lower; w <= win.upper; w += 0.01) CHECK(matter_integrand(p, w) >= 0.0);
  CHECK(exact_currents(p).matter > 0.0);
}

TEST_CASE("current is linear in the coupling for small Gamma") {
  const double lo = exact_currents(benchmark_params(1e-6)).matter;
  const double hi = exact_currents(benchmark_params(1e-4)).matter;
  const double slope = std::log(hi / lo) / std::log(100.0);
  CHECK(slope == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("invalid parameters") {
  auto p = benchmark_params(1e-2);
  p.left.width = 0.0;
  CHECK_THROWS(exact_currents(p));
  p = benchmark_params(1e-2);
  p.tolerance = 0.0;
  CHECK_THROWS(exact_currents(p));
}

TEST_CASE("SET model layout") {
  const auto p = benchmark_params(1e-2);
  const auto bare = build_set_model(p, false);
  const auto rc = build_set_model(p, true);
  CHECK(bare.dimension() == 2);
  CHECK(rc.dimension() == 8);
  CHECK(rc.mode_names == std::vector<std::string>{"d", "C_L", "C_R"});
  CHECK(rc.attachment_index("L") >= 0);
  CHECK(rc.attachments[rc.attachment_index("R")].mode == rc.mode_index("C_R"));
}
