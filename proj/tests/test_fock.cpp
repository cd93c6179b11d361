#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "rcmap/error.hpp"
#include "rcmap/fock.hpp"

using namespace rcmap;
using namespace rcmap::fock;

namespace {

double comm_norm(const Matrix& a, const Matrix& b) { return (a * b - b * a).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("single mode") {
  const auto a = build_algebra(1);
  Matrix d(2, 2);
  d << 0, 1, 0, 0;
  CHECK(a.annihilator(0) == d);
  CHECK(a.number(0) == (Matrix(2, 2) << 0, 0, 0, 1).finished());
}

TEST_CASE("anticommutation relations hold exactly") {
  for (int n : {2, 5}) {
    const auto a = build_algebra(n);
    const Matrix one = Matrix::Identity(a.dimension(), a.dimension());
    for (int i = 0; i < n; ++i) {
      CHECK(a.annihilator(i) * a.annihilator(i) == Matrix::Zero(a.dimension(), a.dimension()));
      for (int j = 0; j < n; ++j) {
        const Matrix& di = a.annihilator(i);
        const Matrix& dj = a.annihilator(j);
        const Matrix djd = a.creator(j);
        CHECK(di * djd + djd * di == (i == j ? one : Matrix::Zero(a.dimension(), a.dimension())));
        CHECK(di * dj + dj * di == Matrix::Zero(a.dimension(), a.dimension()));
      }
    }
  }
}

TEST_CASE("mode 0 is the least significant bit") {
  const auto a = build_algebra(3);
  for (Eigen::Index s = 0; s < 8; ++s) {
    for (int m = 0; m < 3; ++m) CHECK(a.number(m)(s, s).real() == (ModeAlgebra::occupied(s, m) ? 1.0 : 0.0));
  }
  CHECK(a.total_number().diagonal().real().sum() == 12.0);
}

TEST_CASE("mode count guard") {
  CHECK_THROWS_AS(build_algebra(0), Error);
  CHECK_THROWS_AS(build_algebra(13), Error);
  CHECK_THROWS_AS(build_algebra(2).annihilator(2), Error);
}

TEST_CASE("double dot spectrum") {
  auto eig = [](const ImpurityModel& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> s(m.hamiltonian);
    return s.eigenvalues();
  };
  const auto m = build_double_dot(1, 1, 0.015);
  CHECK(m.dimension() == 4);
  const auto e = eig(m);
  CHECK(e[0] == doctest::Approx(0.0));
  CHECK(e[1] == doctest::Approx(1.0));
  CHECK(e[2] == doctest::Approx(1.0));
  CHECK(e[3] == doctest::Approx(2.015));
  const auto free = eig(build_double_dot(0.7, 1.3, 0.0));
  CHECK(free[1] == doctest::Approx(0.7));
  CHECK(free[2] == doctest::Approx(1.3));
  CHECK(free[3] == doctest::Approx(2.0));
  const Matrix& h = m.hamiltonian;
  CHECK((h(3, 3) - h(1, 1) - h(2, 2)).real() == doctest::Approx(0.015).epsilon(1e-14));
}

TEST_CASE("demon presets") {
  const DemonParams p;
  struct Expect {
    ModelVariant v;
    Eigen::Index dim;
    std::vector<std::string> modes;
  };
  const Expect expected[] = {
      {ModelVariant::dqdmd, 4, {"d_s", "d_d"}},
      {ModelVariant::model1, 16, {"d_s", "d_d", "C_l", "C_r"}},
      {ModelVariant::model2, 8, {"d_s", "d_d", "C_d"}},
      {ModelVariant::model3, 32, {"d_s", "d_d", "C_l", "C_r", "C_d"}},
  };
  for (const auto& e : expected) {
    const auto m = build_model(e.v, p);
    CAPTURE(m.name);
    CHECK(m.dimension() == e.dim);
    CHECK(m.mode_names == e.modes);
    CHECK(m.attachments.size() == 3);
    CHECK(comm_norm(m.hamiltonian, m.number) < 1e-12);
    CHECK((m.hamiltonian - m.hamiltonian.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    for (const auto& a : m.attachments) CHECK(comm_norm(m.number, a.coupling) == doctest::Approx(1.0));
    CHECK(m.attachment_index("L") >= 0);
    CHECK(m.attachment_index("X") == -1);
  }
}

TEST_CASE("model1 couples the reaction coordinates with sqrt(Gamma Delta / 2)") {
  const DemonParams p;
  const auto m = build_model(ModelVariant::model1, p);
  const int ds = m.mode_index("d_s");
  const int cl = m.mode_index("C_l");
  const int cr = m.mode_index("C_r");
  const Matrix& h = m.hamiltonian;
  // <d_s occupied| H |C_l occupied>; no Jordan-Wigner sign between modes 0 and 2 here
  const Complex t = h(Eigen::Index{1} << ds, Eigen::Index{1} << cl);
  CHECK(t.real() == doctest::Approx(std::sqrt(1e-5 * 0.01 / 2)).epsilon(1e-12));
  CHECK(std::sqrt(1e-5 * 0.01 / 2) == doctest::Approx(2.2361e-4).epsilon(1e-4));
  // on-site energies of the RCs
  CHECK(h(Eigen::Index{1} << cl, Eigen::Index{1} << cl).real() == doctest::Approx(p.eps_s));
  CHECK(h(Eigen::Index{1} << cr, Eigen::Index{1} << cr).real() == doctest::Approx(p.eps_s + p.coulomb));

  const auto& left = m.attachments[m.attachment_index("L")];
  CHECK(left.mode == cl);
  const auto* flat = left.reservoir.sd.as<spectral::Flat>();
  REQUIRE(flat != nullptr);
  CHECK(flat->height == doctest::Approx(2 * p.delta_s));
  CHECK(left.reservoir.mu == doctest::Approx(1.005));
}

TEST_CASE("model3 Hamiltonian is the union of model1 and model2") {
  const DemonParams p;
  const auto m3 = build_model(ModelVariant::model3, p);
  const auto m1 = build_model(ModelVariant::model1, p);
  const auto m2 = build_model(ModelVariant::model2, p);
  // Compare spectra against a direct sum of the two extensions on the 5-mode space.
  const auto& a = m3.algebra;
  const int cd = m3.mode_index("C_d");
  Matrix h2_extra = (p.center_d()) * a.number(cd);
  const double td = std::sqrt(p.gamma_d() * p.delta_d / 2);
  const Matrix hop = a.creator(1) * a.annihilator(cd);
  h2_extra += td * (hop + Matrix(hop.adjoint()));
  // m1 lives on modes 0..3 which are the lowest bits of the 5-mode space
  Matrix h1 = Matrix::Zero(32, 32);
  for (Eigen::Index s = 0; s < 32; ++s) {
    for (Eigen::Index t = 0; t < 32; ++t) {
      if ((s >> 4) == (t >> 4)) h1(s, t) = m1.hamiltonian(s & 15, t & 15);
    }
  }
  CHECK((m3.hamiltonian - h1 - h2_extra).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(m2.dimension() == 8);
}

TEST_CASE("sd imbalance formula") {
  CHECK(sd_imbalance(DemonParams{}) == doctest::Approx(3.25).epsilon(1e-14));
  DemonParams p;
  const auto m = build_model(ModelVariant::dqdmd, p);
  const auto& l = m.attachments[m.attachment_index("L")].reservoir.sd;
  const auto& r = m.attachments[m.attachment_index("R")].reservoir.sd;
  CHECK(l(p.eps_s) / l(p.eps_s + p.coulomb) == doctest::Approx(3.25));
  CHECK(r(p.eps_s + p.coulomb) / r(p.eps_s) == doctest::Approx(3.25));
}

TEST_CASE("variant names") {
  CHECK(parse_variant("model2") == ModelVariant::model2);
  CHECK(to_string(ModelVariant::dqdmd) == "dqdmd");
  CHECK_THROWS_AS(parse_variant("model4"), Error);
}

TEST_CASE("demon parameters from json") {
  const auto p = demon_params_from_json(nlohmann::json::parse(R"({"U": 0.02, "gamma_s": 1e-6})"));
  CHECK(p.coulomb == 0.02);
  CHECK(p.gamma_s == 1e-6);
  CHECK(p.beta_ratio == 300.0);
  CHECK_THROWS_AS(demon_params_from_json(nlohmann::json::parse(R"({"bogus": 1})")), Error);
  CHECK_THROWS_AS(build_model(ModelVariant::model1, demon_params_from_json(nlohmann::json::parse(R"({"delta_s": 0})"))),
                  Error);
  const auto back = demon_params_from_json(to_json(p));
  CHECK(back.coulomb == p.coulomb);
  CHECK(back.gamma_s == p.gamma_s);
}

TEST_CASE("custom model from json") {
  const auto j = nlohmann::json::parse(R"({
    "name": "chain",
    "modes": [{"name": "a", "energy": 0.5}, {"name": "b", "energy": 0.7}],
    "tunneling": [{"i": "a", "j": 1, "t": 0.1}],
    "coulomb": [{"i": 0, "j": "b", "u": 0.2}],
    "attachments": [
      {"mode": "a", "label": "L", "beta": 2, "mu": 0.3,
       "sd": {"kind": "lorentzian", "gamma": 0.01, "width": 0.1, "center": 0.5},
       "reaction_coordinate": "C"},
      {"mode": "b", "label": "R", "beta": 2, "mu": 0.0, "sd": {"kind": "flat", "height": 0.01}}
    ],
    "partition": {"system": ["a", "C"], "demon": ["b"]}
  })");
  const auto m = model_from_json(j);
  CHECK(m.name == "chain");
  CHECK(m.dimension() == 8);
  CHECK(m.mode_index("C") == 2);
  CHECK(m.attachments[0].mode == 2);
  CHECK(m.system_modes == std::vector<int>{0, 2});
  CHECK(comm_norm(m.hamiltonian, m.number) < 1e-14);
  auto bad = j;
  bad["tunneling"][0]["j"] = "z";
  CHECK_THROWS_AS(model_from_json(bad), Error);
  bad = j;
  bad["attachments"][0]["beta"] = 0;
  CHECK_THROWS_AS(model_from_json(bad), Error);
}
