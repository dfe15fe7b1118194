#include <algorithm>
#include <cmath>

#include "../support/oracles.hpp"
#include "doctest.h"
#include "gsqg/nonlinearity.hpp"
#include "gsqg/spectral_ops.hpp"

using namespace gsqg;

namespace {

double max_diff(const SpectralField& f, const oracle::Sparse& ref) {
  double worst = 0.0;
  const int h = f.grid_size() / 2;
  for (int a = -h + 1; a < h; ++a) {
    for (int b = -h + 1; b < h; ++b) {
      const auto it = ref.find({a, b});
      const Complex r = it == ref.end() ? Complex{} : it->second;
      worst = std::max(worst, std::abs(f.coeff({a, b}) - r));
    }
  }
  return worst;
}

double max_abs(const oracle::Sparse& s) {
  double m = 0.0;
  for (const auto& [k, c] : s) m = std::max(m, std::abs(c));
  return m;
}

// Random field with exactly `pairs` active pairs inside radius kmax.
SpectralField sparse_random(int m, int pairs, int kmax, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> comp(-kmax, kmax);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Mode> modes;
  while (static_cast<int>(modes.size()) < pairs) {
    const Wavenumber n{comp(rng), comp(rng)};
    if (n.is_zero() || n.modulus() > kmax) continue;
    modes.push_back({n, {u(rng), u(rng)}});
  }
  return SpectralField::from_modes(m, modes);
}

}  // namespace

TEST_CASE("dealias policy validation") {
  CHECK_THROWS_AS(DealiasPolicy{0.0}.validate(32), std::invalid_argument);
  CHECK_THROWS_AS(DealiasPolicy{1.5}.validate(32), std::invalid_argument);
  CHECK_THROWS_AS(DealiasPolicy{0.1}.validate(8), std::invalid_argument);
  CHECK_NOTHROW(DealiasPolicy{}.validate(8));
  CHECK(DealiasPolicy{}.radius(96) == doctest::Approx(32.0));
}

TEST_CASE("single shear mode has no self-transport") {
  const Mode c{{1, 0}, {0.5, 0}};
  const SpectralField theta = SpectralField::from_modes(32, std::span(&c, 1));
  for (double alpha : {0.3, 0.5, 1.0}) CHECK(sobolev_norm(nonlinear_term(theta, alpha), 0.0) < 1e-16);
  const auto r = cancellation_residuals(theta, 0.5);
  CHECK(r.hamiltonian == 0.0);
  CHECK(r.l2 == 0.0);
  const auto z = cancellation_residuals(SpectralField(32), 0.5);
  CHECK(z.hamiltonian == 0.0);
  CHECK(z.l2 == 0.0);
}

TEST_CASE("four-mode symmetric datum matches the direct convolution at alpha = 1") {
  const std::vector<Mode> modes = {{{1, 0}, {0.5, 0.0}}, {{0, 1}, {0.5, 0.0}}};
  const SpectralField theta = SpectralField::from_modes(16, modes);
  const auto ref = oracle::transport_convolution(oracle::to_sparse(theta), 1.0, DealiasPolicy{}.radius(16));
  CHECK(max_diff(nonlinear_term(theta, 1.0), ref) <= 1e-12 * std::max(1.0, max_abs(ref)));
  // cos x1 + cos x2 at alpha = 1 is a steady state: the velocity is parallel to the level sets.
  CHECK(sobolev_norm(nonlinear_term(theta, 1.0), 0.0) < 1e-15);
}

TEST_CASE("nonlinear term equals the direct convolution for sparse random data") {
  for (double alpha : {0.3, 0.5, 1.0}) {
    for (unsigned seed = 0; seed < 6; ++seed) {
      const int m = 32;
      const SpectralField theta = sparse_random(m, 8, 7, seed * 31 + 7);
      const auto ref = oracle::transport_convolution(oracle::to_sparse(theta), alpha, DealiasPolicy{}.radius(m));
      const SpectralField n = nonlinear_term(theta, alpha);
      CHECK(max_diff(n, ref) <= 1e-12 * std::max(1.0, max_abs(ref)));
      CHECK(hermitian_defect(n) == 0.0);
      CHECK(n.coeff({0, 0}) == Complex{});
    }
  }
}

TEST_CASE("modes beyond the cutoff are ignored by the nonlinearity") {
  const int m = 32;
  const SpectralField low = sparse_random(m, 6, 6, 5);
  SpectralField high = low;
  const Mode extra{{13, 3}, {0.3, 0.2}};
  high += SpectralField::from_modes(m, std::span(&extra, 1));
  CHECK(nonlinear_term(high, 0.5).max_abs_diff(nonlinear_term(low, 0.5)) < 1e-15);
}

TEST_CASE("both cancellations hold on random fields") {
  for (double alpha : {0.25, 0.5, 0.75, 1.0}) {
    for (unsigned seed = 0; seed < 5; ++seed) {
      const SpectralField theta = oracle::random_field(64, 30, 0.8, seed + 100, 3.0);
      const auto r = cancellation_residuals(theta, alpha);
      const double scale = std::max(1.0, std::pow(sobolev_norm(theta, 0.0), 3));
      CHECK(r.hamiltonian <= 1e-10 * scale);
      CHECK(r.l2 <= 1e-10 * scale);
    }
  }
  // 32 active mode pairs at alpha = 1/2
  const SpectralField theta = sparse_random(64, 32, 20, 42);
  const auto r = cancellation_residuals(theta, 0.5);
  CHECK(r.hamiltonian <= 1e-10);
  CHECK(r.l2 <= 1e-10);
}

TEST_CASE("translation equivariance") {
  const int m = 32;
  const SpectralField theta = oracle::random_field(m, 10, 0.5, 8);
  const double h1 = 2 * oracle::kPi * 3 / m, h2 = 2 * oracle::kPi * 5 / m;
  auto shift = [&](const SpectralField& f) {
    SpectralField g = f;
    auto d = g.mutable_half_spectrum();
    for (int r = 0; r < g.rows(); ++r)
      for (int c = 0; c < g.cols(); ++c) {
        const Wavenumber n = g.wavenumber_at(r, c);
        d[g.index(r, c)] *= std::exp(Complex(0.0, n.n1 * h1 + n.n2 * h2));
      }
    g.enforce_invariants();
    return g;
  };
  const SpectralField a = nonlinear_term(shift(theta), 0.5);
  const SpectralField b = shift(nonlinear_term(theta, 0.5));
  CHECK(a.max_abs_diff(b) <= 1e-12 * std::max(1.0, sobolev_norm(b, 0)));
}

TEST_CASE("commutator examples") {
  const int m = 32;
  const SpectralField h = oracle::random_field(m, 6, 0.5, 3);
  SUBCASE("constant phi gives zero") {
    const TestFunction phi = TestFunction::from_field(SpectralField(m));
    const auto t = commutator_T_alpha(phi, h, 0.5);
    CHECK(sobolev_norm(t.x1.fluctuation, 0) == 0.0);
    CHECK(sobolev_norm(t.x2.fluctuation, 0) == 0.0);
    CHECK(t.x1.mean == 0.0);
  }
  SUBCASE("unit-modulus h against a direct multiplier computation") {
    // phi = cos(2 x2), h = cos x1. grad phi = (0, -2 sin 2x2); (-Delta)^alpha h = h.
    const Mode pm{{0, 2}, {0.5, 0}};
    const Mode hm{{1, 0}, {0.5, 0}};
    const TestFunction phi = TestFunction::from_field(SpectralField::from_modes(m, std::span(&pm, 1)));
    const SpectralField hh = SpectralField::from_modes(m, std::span(&hm, 1));
    const double alpha = 0.4;
    const auto t = commutator_T_alpha(phi, hh, alpha);
    // product -2 sin(2x2) cos(x1) lives on (+-1, +-2), |n| = sqrt 5
    const double factor = 1.0 - std::pow(5.0, alpha);
    CHECK(sobolev_norm(t.x1.fluctuation, 0) < 1e-15);
    // coefficient of -2 sin 2x2 cos x1 at (1,2): -2 * (1/(2i)) * (1/2) = i/2
    const Complex expected = Complex(0, 0.5) * factor;
    CHECK(std::abs(t.x2.fluctuation.coeff({1, 2}) - expected) < 1e-14);
    CHECK(std::abs(t.x2.fluctuation.coeff({-1, 2}) - expected) < 1e-14);
    CHECK(std::abs(t.x2.mean) < 1e-15);
  }
  SUBCASE("random phi and h against direct convolution") {
    const SpectralField ph = sparse_random(m, 4, 3, 17);
    const TestFunction phi = TestFunction::from_field(ph);
    const double alpha = 0.5;
    const auto t = commutator_T_alpha(phi, h, alpha);
    const auto hs = oracle::to_sparse(h);
    const auto ps = oracle::to_sparse(ph);
    oracle::Sparse ref1, ref2;
    double mean1 = 0.0, mean2 = 0.0;
    for (const auto& [p, cp] : ps) {
      for (const auto& [q, cq] : hs) {
        const oracle::Key k{p.first + q.first, p.second + q.second};
        const double kq = std::pow(double(q.first) * q.first + double(q.second) * q.second, alpha);
        const double kk = std::pow(double(k.first) * k.first + double(k.second) * k.second, alpha);
        const Complex g1 = Complex(0, p.first) * cp * cq;
        const Complex g2 = Complex(0, p.second) * cp * cq;
        if (k.first == 0 && k.second == 0) {
          mean1 += std::real(g1 * kq);
          mean2 += std::real(g2 * kq);
          continue;
        }
        ref1[k] += g1 * (kq - kk);
        ref2[k] += g2 * (kq - kk);
      }
    }
    CHECK(max_diff(t.x1.fluctuation, ref1) < 1e-13);
    CHECK(max_diff(t.x2.fluctuation, ref2) < 1e-13);
    CHECK(t.x1.mean == doctest::Approx(mean1).epsilon(1e-12));
    CHECK(t.x2.mean == doctest::Approx(mean2).epsilon(1e-12));
  }
}

TEST_CASE("weak form identity") {
  const int m = 64;
  SUBCASE("single mode gives zero on both sides") {
    const Mode c{{2, 1}, {0.3, 0.1}};
    const SpectralField theta = SpectralField::from_modes(m, std::span(&c, 1));
    const TestFunction phi = TestFunction::from_field(sparse_random(m, 3, 3, 4));
    const auto w = weak_form_terms(theta, phi, 0.5);
    CHECK(std::abs(w.lhs) < 1e-15);
    CHECK(std::abs(w.rhs) < 1e-15);
  }
  SUBCASE("random band-limited data") {
    for (double alpha : {0.25, 0.5, 0.75, 1.0}) {
      for (unsigned seed = 0; seed < 4; ++seed) {
        const SpectralField theta = oracle::random_field(m, 8, 0.5, seed + 50);
        const TestFunction phi = TestFunction::from_field(sparse_random(m, 4, 3, seed + 60));
        const auto w = weak_form_terms(theta, phi, alpha);
        CHECK(w.gap <= 1e-8 * (1.0 + w.scale));
        CHECK(std::abs(w.lhs) > 1e-6);  // nontrivial instance
        CHECK(std::abs(w.rhs) <= 10.0 * w.scale);
      }
    }
  }
}
