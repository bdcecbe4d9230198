#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "dense_oracle.hpp"
#include "gsfv/diffusion.hpp"

using namespace gsfv;
using Field = CellField<double>;

namespace {

Field random_field(const MeshPtr<double>& mesh, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field f(mesh);
  for (Eigen::Index k = 0; k < f.size(); ++k) f[k] = dist(rng);
  return f;
}

}  // namespace

TEST_CASE("apply: constants and the 2x2 hand stencil") {
  const auto m = unit_square(4);
  const ImplicitDiffusionOperator<double> op(m, 0.3, 0.7);
  const auto out = op.apply(Field(m, 2.0));
  for (Eigen::Index k = 0; k < out.size(); ++k) CHECK(out[k] == doctest::Approx(0.0625 * 2.0));

  const auto m2 = unit_square(2);
  const ImplicitDiffusionOperator<double> unit_op(m2, 1.0, 1.0);
  Field e0(m2);
  e0[0] = 1.0;
  const auto a = unit_op.apply(e0);
  CHECK(a[0] == 2.25);
  CHECK(a[1] == -1.0);
  CHECK(a[2] == -1.0);
  CHECK(a[3] == 0.0);

  CHECK_THROWS_AS(unit_op.apply(Field(m)), MeshMismatch);
  CHECK_THROWS_AS(ImplicitDiffusionOperator<double>(m, 0.0, 1.0), DomainError);
}

TEST_CASE("apply matches the dense bilinear-form assembly") {
  std::mt19937 rng(99);
  for (int n = 2; n <= 8; ++n) {
    const auto m = unit_square(n);
    const double d = 0.01 * n, dt = 0.5;
    const ImplicitDiffusionOperator<double> op(m, d, dt);
    const Eigen::MatrixXd dense = testing::assemble_dense(*m, d, dt);
    const auto x = random_field(m, rng);
    const Eigen::VectorXd expected = dense * x.values();
    CHECK((op.apply(x).values() - expected).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("operator properties on random fields") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial % 10;
    const auto m = unit_square(n);
    const ImplicitDiffusionOperator<double> op(m, 1e-3 * (1 + trial), 0.1 + trial);
    const auto u = random_field(m, rng);
    const auto v = random_field(m, rng);

    // linearity
    const auto sum = op.apply(u + v);
    CHECK((sum.values() - op.apply(u).values() - op.apply(v).values()).norm() <=
          1e-12 * sum.values().norm());
    // symmetry in the plain dot product
    const double uav = u.values().dot(op.apply(v).values());
    const double vau = v.values().dot(op.apply(u).values());
    CHECK(std::abs(uav - vau) <= 1e-12 * std::max(std::abs(uav), 1.0));
    // coercivity: <A u, u> >= h² |u|²
    CHECK(u.values().dot(op.apply(u).values()) >= m->cell_area() * u.values().squaredNorm());
    // Neumann conservation: fluxes telescope
    CHECK(op.apply(u).values().sum() ==
          doctest::Approx(m->cell_area() * u.values().sum()).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("CG: constant right-hand side needs at most one iteration") {
  const auto m = unit_square(16);
  const ImplicitDiffusionOperator<double> op(m, 1.6e-5, 1.0);
  const auto sol = solve(op, Field(m, m->cell_area()));
  CHECK(sol.iterations <= 1);
  for (Eigen::Index k = 0; k < sol.x.size(); ++k) CHECK(sol.x[k] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("CG inverts apply") {
  std::mt19937 rng(5);
  const CgOptions options{1e-10, 1000};
  for (int n : {4, 9, 32}) {
    const auto m = unit_square(n);
    for (double dt : {0.01, 1.0, 64.0 * m->h()}) {
      const ImplicitDiffusionOperator<double> op(m, 1.6e-5, dt);
      const auto x = random_field(m, rng);
      const auto rhs = op.apply(x);
      const auto sol = solve(op, rhs, options);
      CHECK(sol.relative_residual <= options.tolerance);
      CHECK((sol.x.values() - x.values()).norm() <= 10 * options.tolerance * x.values().norm());
    }
  }
}

TEST_CASE("CG matches dense elimination on the 2x2 mesh") {
  const auto m = unit_square(2);
  const ImplicitDiffusionOperator<double> op(m, 1.0, 1.0);
  Field e0(m);
  e0[0] = 1.0;
  const Eigen::MatrixXd dense = testing::assemble_dense(*m, 1.0, 1.0);
  const Eigen::VectorXd direct = dense.fullPivLu().solve(e0.values());
  const auto sol = solve(op, e0, {1e-14, 100});
  CHECK((sol.x.values() - direct).norm() <= 1e-12 * direct.norm());
}

TEST_CASE("CG error paths") {
  const auto m = unit_square(8);
  const ImplicitDiffusionOperator<double> op(m, 1.0, 10.0);
  std::mt19937 rng(3);
  const auto rhs = random_field(m, rng);
  CHECK_THROWS_AS(solve(op, rhs, {1e-14, 1}), NoConvergence);
  CHECK_THROWS_AS(solve(op, rhs, {0.0, 10}), DomainError);
  CHECK_THROWS_AS(solve(op, rhs, {1e-8, 0}), DomainError);
  CHECK_THROWS_AS(solve(op, Field(unit_square(4))), MeshMismatch);

  const auto zero = solve(op, Field(m));
  CHECK(zero.iterations == 0);
  CHECK(zero.x.values().norm() == 0.0);

  Field bad(m, 1.0);
  bad[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(solve(op, bad).x.is_finite());
}

TEST_CASE("CG is deterministic") {
  std::mt19937 rng(11);
  const auto m = unit_square(24);
  const ImplicitDiffusionOperator<double> op(m, 0.05, 2.0);
  const auto rhs = random_field(m, rng);
  const auto a = solve(op, rhs);
  const auto b = solve(op, rhs);
  CHECK(a.iterations == b.iterations);
  CHECK((a.x.values().array() == b.x.values().array()).all());
}

TEST_CASE("operator templated on float") {
  const auto m = unit_square<float>(4);
  const ImplicitDiffusionOperator<float> op(m, 0.1f, 1.0f);
  const auto sol = solve(op, CellField<float>(m, m->cell_area()), {1e-5, 50});
  CHECK(sol.x[0] == doctest::Approx(1.0f));
}
