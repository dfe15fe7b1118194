#include "gsqg/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <tuple>

#include "gsqg/fft.hpp"

namespace gsqg {
namespace {

// Fault injection for the selftest: skews one velocity multiplier so that u
// is no longer divergence free.
#ifdef GSQG_FAULT_INJECT
constexpr double kRieszSkew = 1.0 + 1e-3;
#else
constexpr double kRieszSkew = 1.0;
#endif

NonlinearOperator& cached_operator(int m, double alpha, const DealiasPolicy& policy) {
  using Key = std::tuple<int, double, double>;
  thread_local std::map<Key, std::unique_ptr<NonlinearOperator>> cache;
  const Key key{m, alpha, policy.cutoff_fraction};
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<NonlinearOperator>(m, alpha, policy)).first;
  return *it->second;
}

RealGrid product_grid(const SpectralField& a, const SpectralField& b) {
  RealGrid ga = to_physical(a);
  const RealGrid gb = to_physical(b);
  for (std::size_t i = 0; i < ga.values.size(); ++i) ga.values[i] *= gb.values[i];
  return ga;
}

FieldWithMean split_mean(const RealGrid& g, double cutoff) {
  FieldWithMean out;
  double acc = 0.0;
  for (double v : g.values) acc += v;
  out.mean = acc / static_cast<double>(g.values.size());
  out.fluctuation = project_low(from_physical(g), cutoff);
  return out;
}

}  // namespace

void DealiasPolicy::validate(int grid_size) const {
  if (!(cutoff_fraction > 0.0 && cutoff_fraction <= 1.0)) {
    throw std::invalid_argument("dealias cutoff_fraction must lie in (0, 1]");
  }
  if (radius(grid_size) < 1.0) throw std::invalid_argument("dealias radius keeps no active mode");
}

TestFunction TestFunction::from_field(SpectralField phi) {
  TestFunction t;
  t.grad = gradient(phi);
  t.phi = std::move(phi);
  return t;
}

double TestFunction::c2_proxy() const {
  double acc = 0.0;
  phi.for_each_mode([&](Wavenumber n, Complex c, int w) {
    const double k = 1.0 + n.modulus();
    acc += w * k * k * std::abs(c);
  });
  return acc;
}

NonlinearOperator::NonlinearOperator(int grid_size, double alpha, DealiasPolicy policy)
    : m_(grid_size), alpha_(alpha), policy_(policy) {
  policy_.validate(grid_size);
  const SpectralField shape(grid_size);
  const std::size_t n = shape.half_spectrum().size();
  riesz_.assign(n, 0.0);
  const double r2 = policy_.radius(grid_size) * policy_.radius(grid_size);
  for (int r = 0; r < shape.rows(); ++r) {
    for (int c = 0; c < shape.cols(); ++c) {
      if (shape.lattice_weight(r, c) == 0) continue;
      const auto k2 = static_cast<double>(shape.wavenumber_at(r, c).modulus_sq());
      if (k2 <= r2) riesz_[shape.index(r, c)] = std::pow(k2, -alpha);
    }
  }
  u1_.assign(n, Complex{});
  u2_.assign(n, Complex{});
  g1_.assign(n, Complex{});
  g2_.assign(n, Complex{});
  ru1_ = RealGrid(grid_size);
  ru2_ = RealGrid(grid_size);
  rg1_ = RealGrid(grid_size);
  rg2_ = RealGrid(grid_size);
  prod_ = RealGrid(grid_size);
}

double NonlinearOperator::apply(const SpectralField& theta, SpectralField& out) {
  if (theta.grid_size() != m_) throw std::invalid_argument("NonlinearOperator: grid mismatch");
  if (out.grid_size() != m_) out = SpectralField(m_);
  const auto th = theta.half_spectrum();
  const int cols = m_ / 2 + 1;
  for (int r = 0; r < m_; ++r) {
    const int n1 = r < m_ / 2 ? r : r - m_;
    for (int c = 0; c < cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * cols + c;
      const double rz = riesz_[i];
      if (rz == 0.0) {
        u1_[i] = u2_[i] = g1_[i] = g2_[i] = Complex{};
        continue;
      }
      const Complex ith = Complex(-th[i].imag(), th[i].real());  // i * theta
      u1_[i] = -static_cast<double>(c) * rz * kRieszSkew * ith;
      u2_[i] = static_cast<double>(n1) * rz * ith;
      g1_[i] = static_cast<double>(n1) * ith;
      g2_[i] = static_cast<double>(c) * ith;
    }
  }
  FftWorkspace& fft = FftWorkspace::for_grid(m_);
  fft.inverse(u1_, ru1_.values);
  fft.inverse(u2_, ru2_.values);
  fft.inverse(g1_, rg1_.values);
  fft.inverse(g2_, rg2_.values);
  double umax2 = 0.0;
  for (std::size_t k = 0; k < prod_.values.size(); ++k) {
    const double a = ru1_.values[k];
    const double b = ru2_.values[k];
    umax2 = std::max(umax2, a * a + b * b);
    prod_.values[k] = a * rg1_.values[k] + b * rg2_.values[k];
  }
  auto dst = out.mutable_half_spectrum();
  fft.forward(prod_.values, dst);
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (riesz_[i] == 0.0) dst[i] = Complex{};
  }
  out.enforce_invariants();
  return std::sqrt(umax2);
}

SpectralField nonlinear_term(const SpectralField& theta, double alpha, const DealiasPolicy& policy) {
  SpectralField out(theta.grid_size());
  cached_operator(theta.grid_size(), alpha, policy).apply(theta, out);
  return out;
}

CancellationResiduals cancellation_residuals(const SpectralField& theta, double alpha, const DealiasPolicy& policy) {
  const SpectralField n = nonlinear_term(theta, alpha, policy);
  return {std::abs(inner_product_hs(n, theta, -alpha)), std::abs(inner_product_hs(n, theta, 0.0))};
}

CommutatorResult commutator_T_alpha(const TestFunction& phi, const SpectralField& h, double alpha,
                                    const DealiasPolicy& policy) {
  require_same_grid(phi.phi, h, "commutator_T_alpha");
  const int m = h.grid_size();
  policy.validate(m);
  const double cutoff = policy.radius(m);
  const SpectralField lap_h = fractional_laplacian(h, alpha);

  auto component = [&](const SpectralField& dphi) {
    // grad phi * ((-Delta)^alpha h) keeps its mean; (-Delta)^alpha(grad phi h) has none.
    FieldWithMean first = split_mean(product_grid(dphi, lap_h), cutoff);
    const FieldWithMean second = split_mean(product_grid(dphi, h), cutoff);
    first.fluctuation -= fractional_laplacian(second.fluctuation, alpha);
    return first;
  };
  return {component(phi.grad.x1), component(phi.grad.x2)};
}

WeakFormTerms weak_form_terms(const SpectralField& theta, const TestFunction& phi, double alpha,
                              const DealiasPolicy& policy) {
  require_same_grid(theta, phi.phi, "weak_form_terms");
  WeakFormTerms w;

  const VectorField u = riesz_perp(theta, alpha);
  const RealGrid th = to_physical(theta);
  const RealGrid u1 = to_physical(u.x1);
  const RealGrid u2 = to_physical(u.x2);
  const RealGrid p1 = to_physical(phi.grad.x1);
  const RealGrid p2 = to_physical(phi.grad.x2);
  double acc = 0.0;
  for (std::size_t k = 0; k < th.values.size(); ++k) {
    acc += th.values[k] * (u1.values[k] * p1.values[k] + u2.values[k] * p2.values[k]);
  }
  w.lhs = acc / static_cast<double>(th.values.size());

  const CommutatorResult t = commutator_T_alpha(phi, fractional_laplacian(theta, -alpha), alpha, policy);
  // u has zero mean, so the commutator means do not contribute to the pairing.
  w.rhs = 0.5 * (inner_product_hs(u.x1, t.x1.fluctuation, 0.0) + inner_product_hs(u.x2, t.x2.fluctuation, 0.0));
  w.gap = std::abs(w.lhs - w.rhs);
  w.scale = sobolev_norm_sq(theta, -alpha) * phi.c2_proxy();
  return w;
}

double weak_form_identity_gap(const SpectralField& theta, const TestFunction& phi, double alpha,
                              const DealiasPolicy& policy) {
  return weak_form_terms(theta, phi, alpha, policy).gap;
}

}  // namespace gsqg
