#pragma once

#include <vector>

#include "gsqg/spectral_field.hpp"
#include "gsqg/spectral_ops.hpp"

namespace gsqg {

/// Sharp radial Fourier cutoff J = P_{<= cutoff_fraction * M/2}. It is both
/// the dealiasing rule and the mollifier of the regularized nonlinearity; as a
/// radial multiplier it commutes with R_perp and every |grad|^s.
struct DealiasPolicy {
  double cutoff_fraction = 2.0 / 3.0;

  [[nodiscard]] double radius(int grid_size) const { return cutoff_fraction * 0.5 * grid_size; }
  /// Throws std::invalid_argument unless 0 < fraction <= 1 and the radius
  /// keeps at least one mode.
  void validate(int grid_size) const;
};

/// Smooth time-independent test function phi with its gradient.
struct TestFunction {
  SpectralField phi;
  VectorField grad;

  static TestFunction from_field(SpectralField phi);
  /// sum_n (1 + |n|)^2 |phi(n)|, an upper bound for the C^2 norm.
  [[nodiscard]] double c2_proxy() const;
};

/// Reusable evaluator of N(theta) = J(J u . grad J theta), u = R_perp_alpha theta.
/// Caches multipliers for one (grid, alpha, policy) triple and owns its
/// physical-space buffers; one instance per thread.
class NonlinearOperator {
 public:
  NonlinearOperator(int grid_size, double alpha, DealiasPolicy policy);

  [[nodiscard]] int grid_size() const { return m_; }
  [[nodiscard]] double alpha() const { return alpha_; }

  /// Writes N(theta) into out (same grid) and returns max_x |J u(x)| on the grid.
  double apply(const SpectralField& theta, SpectralField& out);

 private:
  int m_;
  double alpha_;
  DealiasPolicy policy_;
  std::vector<double> riesz_;  // |n|^{-2 alpha} inside the cutoff, 0 outside
  std::vector<Complex> u1_, u2_, g1_, g2_;
  RealGrid ru1_, ru2_, rg1_, rg2_, prod_;
};

/// N(theta) = J(J u . grad J theta), zero mean, Hermitian.
SpectralField nonlinear_term(const SpectralField& theta, double alpha, const DealiasPolicy& policy = {});

struct CancellationResiduals {
  double hamiltonian = 0.0;  // |<N(theta), theta>_{H^{-alpha}}|
  double l2 = 0.0;           // |<N(theta), theta>_{L^2}|
};

CancellationResiduals cancellation_residuals(const SpectralField& theta, double alpha,
                                             const DealiasPolicy& policy = {});

/// One commutator component: fluctuating part plus its (retained) mean.
struct FieldWithMean {
  double mean = 0.0;
  SpectralField fluctuation;
};

struct CommutatorResult {
  FieldWithMean x1;
  FieldWithMean x2;
};

/// T_alpha[phi] h = grad phi ((-Delta)^alpha h) - (-Delta)^alpha (grad phi h),
/// both products formed on the grid and projected by J.
CommutatorResult commutator_T_alpha(const TestFunction& phi, const SpectralField& h, double alpha,
                                    const DealiasPolicy& policy = {});

struct WeakFormTerms {
  double lhs = 0.0;    // integral theta u . grad phi
  double rhs = 0.0;    // 1/2 <R_perp theta, T_alpha[phi] (-Delta)^{-alpha} theta>
  double gap = 0.0;    // |lhs - rhs|
  double scale = 0.0;  // ||theta||^2_{H^{-alpha}} * ||phi||_{C^2 proxy}
};

WeakFormTerms weak_form_terms(const SpectralField& theta, const TestFunction& phi, double alpha,
                              const DealiasPolicy& policy = {});

/// |lhs - rhs| of the commutator rewriting of the weak nonlinearity.
double weak_form_identity_gap(const SpectralField& theta, const TestFunction& phi, double alpha,
                              const DealiasPolicy& policy = {});

}  // namespace gsqg
