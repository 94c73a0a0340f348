#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qgnls/error.hpp"
#include "qgnls/profiles.hpp"

using namespace qgnls;

TEST_CASE("soliton solves -U'' + U = U^p") {
  for (double p : {2.0, 3.0, 4.0, 5.0}) {
    const double h = 1e-3;
    double worst = 0.0;
    for (double x = 0.05; x <= 5.0; x += 0.05) {
      const double upp = (soliton(p, x + h) - 2 * soliton(p, x) + soliton(p, x - h)) / (h * h);
      worst = std::max(worst, std::abs(-upp + soliton(p, x) - std::pow(soliton(p, x), p)));
    }
    CHECK(worst < 1e-5);  // O(h²) finite-difference floor
    for (double x : {0.0, 0.7, 3.0}) {
      CHECK(soliton_second_derivative(p, x) ==
            doctest::Approx(soliton(p, x) - std::pow(soliton(p, x), p)).epsilon(1e-12));
      const double fd = (soliton(p, x + 1e-6) - soliton(p, x - 1e-6)) / 2e-6;
      CHECK(soliton_derivative(p, x) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("soliton is even, peaked at zero and does not overflow") {
  CHECK(soliton(3.0, 0.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(soliton(3.0, -1.3) == soliton(3.0, 1.3));
  CHECK(soliton_derivative(3.0, 0.0) == 0.0);
  CHECK(std::isfinite(soliton(3.0, 2000.0)));
  CHECK(soliton(3.0, 2000.0) >= 0.0);
}

TEST_CASE("p = 3 norms against sech closed forms") {
  // U = √2 sech x: ∫U² = 4, ∫U'² = 4/3, ∫_0^∞ U² = 2.
  const SolitonNorms n = soliton_norms(3.0);
  CHECK(std::abs(n.l2_sq_line - 4.0) < 1e-9);
  CHECK(std::abs(n.grad_sq_line - 4.0 / 3.0) < 1e-9);
  CHECK(std::abs(n.h1_sq_line - 16.0 / 3.0) < 1e-9);
  CHECK(std::abs(n.l2_sq_half_line - 2.0) < 1e-9);
  CHECK(std::abs(n.m_infinity - 2.0 / 3.0) < 1e-9);
}

TEST_CASE("norms for general p against Simpson quadrature") {
  for (double p : {2.0, 4.0, 5.0, 2.5}) {
    const SolitonNorms n = soliton_norms(p);
    const double l2 = 2.0 * testing::simpson([p](double x) { return std::pow(soliton(p, x), 2); }, 0.0, 60.0, 60000);
    const double g2 =
        2.0 * testing::simpson([p](double x) { return std::pow(soliton_derivative(p, x), 2); }, 0.0, 60.0, 60000);
    CHECK(n.l2_sq_line == doctest::Approx(l2).epsilon(1e-10));
    CHECK(n.grad_sq_line == doctest::Approx(g2).epsilon(1e-10));
    CHECK(n.m_infinity == doctest::Approx(0.5 * (0.5 - 1.0 / (p + 1.0)) * (l2 + g2)).epsilon(1e-10));
    // Pohozaev on ℝ: ∫U'² = (p−1)/(p+3) ∫U².
    CHECK(n.grad_sq_line == doctest::Approx((p - 1.0) / (p + 3.0) * n.l2_sq_line).epsilon(1e-10));
  }
}

TEST_CASE("norms are insensitive to the truncation point") {
  const SolitonNorms a = soliton_norms(3.0, 1.0), b = soliton_norms(3.0, 2.0);
  CHECK(std::abs(a.h1_sq_line - b.h1_sq_line) < 1e-12);
}

TEST_CASE("cutoff is C1 with the right plateau and support") {
  const double l = 1.8;
  CHECK(cutoff(0.0, l) == 1.0);
  CHECK(cutoff(0.9, l) == 1.0);
  CHECK(cutoff(1.8, l) == 0.0);
  CHECK(cutoff(1.35, l) == doctest::Approx(0.5));
  CHECK(std::abs(cutoff_derivative(0.9 + 1e-12, l)) < 1e-9);
  CHECK(std::abs(cutoff_derivative(1.8 - 1e-12, l)) < 1e-9);
  for (double x : {1.0, 1.2, 1.5, 1.7}) {
    CHECK(cutoff_derivative(x, l) == doctest::Approx((cutoff(x + 1e-6, l) - cutoff(x - 1e-6, l)) / 2e-6).epsilon(1e-6));
    CHECK(cutoff_second_derivative(x, l) ==
          doctest::Approx((cutoff_derivative(x + 1e-6, l) - cutoff_derivative(x - 1e-6, l)) / 2e-6).epsilon(1e-5));
  }
}

TEST_CASE("peak requests are checked") {
  auto s = testing::star(3, 2.0);
  CHECK(resolve_peaks(*s, {{{"l0", std::nullopt}}}).front().l_cut == doctest::Approx(1.8));
  auto code = [&](const PeakSpec& spec) {
    try {
      resolve_peaks(*s, spec);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  CHECK(code({}) == ErrorCode::InvalidPeakSpec);
  CHECK(code({{{"c", std::nullopt}}}) == ErrorCode::PeakOnNonTerminalVertex);
  CHECK(code({{{"nope", std::nullopt}}}) == ErrorCode::InvalidPeakSpec);
  CHECK(code({{{"l0", 2.0}}}) == ErrorCode::SupportTooLong);
  CHECK(code({{{"l0", -1.0}}}) == ErrorCode::InvalidPeakSpec);
  CHECK(code({{{"l0", std::nullopt}, {"l0", std::nullopt}}}) == ErrorCode::InvalidPeakSpec);
  // A single edge has two terminal vertices sharing the same edge.
  auto i = testing::interval(4.0);
  CHECK_THROWS_AS(resolve_peaks(*i, {{{"A", std::nullopt}, {"B", std::nullopt}}}), Error);
}

TEST_CASE("ansatz residual source matches the strong residual") {
  auto s = testing::star(3, 2.0);
  const ProblemParams params{25.0, 3.0};
  PeakedAnsatz w(*s, resolve_peaks(*s, {{{"l1", std::nullopt}}}), params);
  const std::size_t e = s->edge_index("e1");
  const double len = s->edge(e).length;
  // Strong residual f(W) − (−W″ + λW) by central differences in the edge coordinate.
  const double h = 1e-4;
  for (double x : {0.05, 0.3, 0.5, 0.8, 1.0}) {
    const double wpp = (w.value(e, x + h) - 2 * w.value(e, x) + w.value(e, x - h)) / (h * h);
    const double wv = w.value(e, x);
    const double strong = std::pow(std::max(wv, 0.0), params.p) - (-wpp + params.lambda * wv);
    CHECK(w.residual_source(e, x) == doctest::Approx(strong).epsilon(1e-4).scale(1e-3));
  }
  // The terminal vertex is at the far end of the edge; W vanishes beyond l_cut from it.
  CHECK(w.value(e, len) == doctest::Approx(rescaled_soliton(3.0, 25.0, 0.0)));
  CHECK(w.value(e, 0.1) == 0.0);
  CHECK(w.value(s->edge_index("e0"), 1.0) == 0.0);
}

TEST_CASE("nodal ansatz and bump") {
  auto i = testing::interval(4.0);
  auto m = build_mesh(i, 0.01);
  const ProblemParams params{16.0, 3.0};
  const DiscreteFunction w = build_ansatz(m, {{{"A", std::nullopt}}}, params);
  CHECK(w.node_value(0, 0) == doctest::Approx(4.0 * std::sqrt(2.0)));
  const DiscreteFunction b = soliton_bump(m, params, {0, 2.0});
  CHECK(evaluate(b, {0, 2.0}) == doctest::Approx(4.0 * std::sqrt(2.0)));
  CHECK(evaluate(b, {0, 1.5}) == doctest::Approx(evaluate(b, {0, 2.5})));
}

TEST_CASE("soliton decreases on the half line") {
  for (double p : {2.0, 3.0, 5.0}) {
    double prev = soliton(p, 0.0);
    for (int i = 1; i <= 400; ++i) {
      const double u = soliton(p, 0.05 * i);
      CHECK(u < prev);
      prev = u;
    }
  }
}

TEST_CASE("multipeak ansatz is a superposition of single peaks") {
  auto s = testing::star(3, 2.0);
  const ProblemParams params{9.0, 3.0};
  PeakedAnsatz both(*s, resolve_peaks(*s, {{{"l0", std::nullopt}, {"l2", std::nullopt}}}), params);
  PeakedAnsatz first(*s, resolve_peaks(*s, {{{"l0", std::nullopt}}}), params);
  PeakedAnsatz second(*s, resolve_peaks(*s, {{{"l2", std::nullopt}}}), params);
  for (std::size_t e = 0; e < 3; ++e)
    for (double x = 0.0; x <= 2.0; x += 0.125)
      CHECK(both.value(e, x) == first.value(e, x) + second.value(e, x));
}

TEST_CASE("ansatz λ-norm tends to the half-line soliton norm") {
  // ‖W_λ‖²_λ / (λ^{2/(p−1)+1/2} ‖U‖²_{H¹(ℝ⁺)}) → 1; W and W′ integrated by Simpson on the analytic ansatz.
  auto g = testing::interval(4.0);
  const double p = 3.0;
  const double half_h1 = 0.5 * soliton_norms(p).h1_sq_line;
  double prev_defect = INFINITY;
  for (double lambda : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    PeakedAnsatz w(*g, resolve_peaks(*g, {{{"A", std::nullopt}}}), {lambda, p});
    const double d = 1e-5;
    auto dw = [&](double x) { return (w.value(0, x + d) - w.value(0, std::max(0.0, x - d))) / (x + d - std::max(0.0, x - d)); };
    const double grad = testing::simpson([&](double x) { return dw(x) * dw(x); }, 0.0, 3.6, 36000);
    const double mass = testing::simpson([&](double x) { return w.value(0, x) * w.value(0, x); }, 0.0, 3.6, 36000);
    const double ratio = (grad + lambda * mass) / (std::pow(lambda, 2.0 / (p - 1.0) + 0.5) * half_h1);
    const double defect = std::abs(ratio - 1.0);
    CHECK(defect < prev_defect);
    prev_defect = defect;
  }
  CHECK(prev_defect < 1e-5);
}
