#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qgnls/error.hpp"
#include "qgnls/functionals.hpp"

using namespace qgnls;

namespace {

struct Setup {
  std::shared_ptr<const Mesh> mesh;
  ActionFunctional f;
};

Setup setup(double lambda, double p) {
  auto m = build_mesh(testing::triangle_with_tail(), 0.1);
  return {m, ActionFunctional(m, {lambda, p})};
}

}  // namespace

TEST_CASE("parameters are validated") {
  CHECK_THROWS_AS(ProblemParams({0.0, 3.0}).validate(), Error);
  CHECK_THROWS_AS(ProblemParams({1.0, 1.0}).validate(), Error);
  CHECK_NOTHROW(ProblemParams({1.0, 1.5}).validate());
}

TEST_CASE("gradient is the derivative of the action") {
  for (double p : {2.0, 3.0, 4.5}) {
    auto [m, f] = setup(2.0, p);
    std::mt19937_64 rng(11);
    const Vector u = testing::random_vector(rng, m->dof_count(), -0.5, 2.0);
    const Vector dir = testing::random_vector(rng, m->dof_count());
    const double eps = 1e-5;
    const double fd = (f.action(u + eps * dir) - f.action(u - eps * dir)) / (2 * eps);
    CHECK(fd == doctest::Approx(f.gradient(u).dot(dir)).epsilon(1e-7));
  }
}

TEST_CASE("hessian is the derivative of the gradient") {
  auto [m, f] = setup(2.0, 3.0);
  std::mt19937_64 rng(12);
  const Vector u = testing::random_vector(rng, m->dof_count(), -0.5, 2.0);
  const Vector dir = testing::random_vector(rng, m->dof_count());
  const double eps = 1e-6;
  const Vector fd = (f.gradient(u + eps * dir) - f.gradient(u - eps * dir)) / (2 * eps);
  const Vector hv = f.hessian(u) * dir;
  CHECK((fd - hv).norm() <= 1e-6 * hv.norm());
}

TEST_CASE("constant solution is critical and has the closed-form action") {
  for (double p : {2.0, 3.0, 5.0}) {
    const double lambda = 7.0;
    auto [m, f] = setup(lambda, p);
    const double c = constant_solution_value({lambda, p});
    CHECK(c == doctest::Approx(std::pow(lambda, 1.0 / (p - 1.0))));
    const Vector u = Vector::Constant(static_cast<Eigen::Index>(m->dof_count()), c);
    CHECK(f.gradient(u).cwiseAbs().maxCoeff() < 1e-10 * c);
    // Independent formula: λ^{1/2−(p+1)/(p−1)} (½ − 1/(p+1)) λ c² |G| = λ^{1/2}(½ − 1/(p+1))|G|.
    CHECK(f.nehari_action(u) == doctest::Approx(std::sqrt(lambda) * (0.5 - 1.0 / (p + 1.0)) * 5.0).epsilon(1e-12));
    CHECK(constant_branch_action({lambda, p}, 5.0) == doctest::Approx(f.nehari_action(u)).epsilon(1e-12));
  }
}

TEST_CASE("nehari projection") {
  auto [m, f] = setup(3.0, 3.0);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector u = testing::random_vector(rng, m->dof_count(), -1.0, 3.0);
    const double t = f.nehari_scale(u);
    CHECK(t > 0.0);
    const Vector v = t * u;
    CHECK(std::abs(f.nehari_defect(v)) < 1e-12);
    CHECK(f.nehari_action(v) == doctest::Approx(f.renormalized_action(v)).epsilon(1e-10));
    // Nehari characterization: t maximizes s ↦ I(su) along the ray.
    CHECK(f.action(v) >= f.action(1.01 * v));
    CHECK(f.action(v) >= f.action(0.99 * v));
  }
  const Vector neg = -Vector::Ones(static_cast<Eigen::Index>(m->dof_count()));
  CHECK_THROWS_AS(f.nehari_scale(neg), Error);
  CHECK_THROWS_AS(f.nehari_action(Vector::Ones(static_cast<Eigen::Index>(m->dof_count()))), Error);
}

TEST_CASE("renormalization exponent") {
  auto [m, f] = setup(4.0, 3.0);
  CHECK(f.renormalization() == doctest::Approx(std::pow(4.0, 0.5 - 2.0)));
}

TEST_CASE("report is consistent") {
  auto [m, f] = setup(2.0, 3.0);
  std::mt19937_64 rng(8);
  const Vector u = testing::random_vector(rng, m->dof_count(), 0.0, 1.0);
  const FunctionalReport r = f.report(u);
  CHECK(r.action_I == doctest::Approx(f.action(u)));
  CHECK(r.action_J == doctest::Approx(f.renormalized_action(u)));
  CHECK(r.mass_sq == doctest::Approx(u.dot(m->mass() * u)));
  CHECK(r.lambda_norm_sq == doctest::Approx(u.dot(m->stiffness() * u) + 2.0 * r.mass_sq));
}
