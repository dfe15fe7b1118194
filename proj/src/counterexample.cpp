#include "gsqg/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gsqg/errors.hpp"

namespace gsqg {
namespace {

constexpr double kPi = std::numbers::pi;

// 16-point Gauss-Legendre nodes and weights on [-1, 1] (positive half).
constexpr double kGlX[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
                            0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr double kGlW[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
                            0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

// Log-uniform panels keep a bounded number of Bessel oscillations per panel.
constexpr double kPanelRatio = 1.05;

// (e^{-k a} - e^{-k b}) / k for k > 0, b >= a.
double exp_window(double k, double a, double b) {
  if (k <= 0.0) return b - a;
  return std::exp(-k * a) * (-std::expm1(-k * (b - a))) / k;
}

}  // namespace

void BumpProfile::validate() const {
  if (!(r0 > 0.0 && r0 < kPi)) throw ConfigError("bump radius r0 must lie in (0, pi)");
  if (k < 3) throw ConfigError("bump exponent k must be at least 3");
  if (!(amplitude != 0.0) || !std::isfinite(amplitude)) throw ConfigError("bump amplitude must be nonzero");
}

double BumpProfile::psi(double r) const {
  if (r >= r0) return 0.0;
  return amplitude * std::pow(1.0 - r * r / (r0 * r0), k);
}

double BumpProfile::theta0(double r) const {
  if (r >= r0) return 0.0;
  const double q = r * r / (r0 * r0);
  const double w = 1.0 - q;
  const double r02 = r0 * r0;
  return amplitude * (-4.0 * k / r02 * std::pow(w, k - 1) + 4.0 * k * (k - 1) * q / r02 * std::pow(w, k - 2));
}

double BumpProfile::fourier(double rho) const {
  // F[psi](rho) = 2 pi r0^2 2^k k! J_{k+1}(b) / b^{k+1}, b = r0 rho; F[Delta psi] = -rho^2 F[psi].
  const double b = r0 * rho;
  double ratio;
  if (b < 1e-6) {
    ratio = 1.0 / (std::pow(2.0, k + 1) * std::tgamma(k + 2.0));
  } else {
    ratio = std::cyl_bessel_j(static_cast<double>(k + 1), b) / std::pow(b, k + 1);
  }
  const double fpsi = 2.0 * kPi * r0 * r0 * std::pow(2.0, k) * std::tgamma(k + 1.0) * ratio;
  return -amplitude * rho * rho * fpsi;
}

double CounterexampleRecipe::length_scale() const { return std::pow(nu, 1.0 / gamma); }

double CounterexampleRecipe::amplitude_scale() const { return std::pow(nu, -(1.0 + alpha) / gamma); }

double CounterexampleRecipe::coefficient(double modulus) const {
  const double l = length_scale();
  return amplitude_scale() * l * l * bump.fourier(l * modulus) / (4.0 * kPi * kPi);
}

double CounterexampleRecipe::datum(double r) const { return amplitude_scale() * bump.theta0(r / length_scale()); }

SimParams CounterexampleRecipe::sim_params(int grid_size, double t_end, double dt) const {
  SimParams p;
  p.alpha = alpha;
  p.gamma = gamma;
  p.nu = nu;
  p.grid_size = grid_size;
  p.t_end = t_end;
  p.dt = dt;
  p.nonlinear = false;
  return p;
}

CounterexampleFamily build_counterexample_family(double nu, double alpha, double gamma, const BumpProfile& bump,
                                                 int grid_size) {
  bump.validate();
  if (!(nu > 0.0)) throw ConfigError("counterexample needs nu > 0");
  if (!(alpha > 0.0 && alpha <= 1.0) || !(gamma > 0.0)) throw ConfigError("counterexample needs alpha in (0,1], gamma > 0");
  CounterexampleFamily fam;
  fam.recipe = {alpha, gamma, nu, bump};
  const double support = fam.recipe.length_scale() * bump.r0;
  if (!(support < kPi)) {
    throw ConfigError("rescaled bump support radius " + std::to_string(support) + " reaches the torus period");
  }
  fam.theta0 = SpectralField(grid_size);
  auto d = fam.theta0.mutable_half_spectrum();
  for (int r = 0; r < fam.theta0.rows(); ++r) {
    for (int c = 0; c < fam.theta0.cols(); ++c) {
      if (fam.theta0.lattice_weight(r, c) == 0) continue;
      d[fam.theta0.index(r, c)] = fam.recipe.coefficient(fam.theta0.wavenumber_at(r, c).modulus());
    }
  }
  fam.theta0.enforce_invariants();
  return fam;
}

LinearFlowEvaluator::LinearFlowEvaluator(const CounterexampleRecipe& recipe, int lattice_radius)
    : recipe_(recipe), lattice_radius_(lattice_radius) {
  recipe_.bump.validate();
  if (lattice_radius < 1) throw ConfigError("lattice radius must be positive");
  const long long r2max = static_cast<long long>(lattice_radius) * lattice_radius;
  std::vector<int> count(static_cast<std::size_t>(r2max) + 1, 0);
  for (int a = -lattice_radius; a <= lattice_radius; ++a) {
    for (int b = -lattice_radius; b <= lattice_radius; ++b) {
      const long long k = static_cast<long long>(a) * a + static_cast<long long>(b) * b;
      if (k > 0 && k <= r2max) ++count[static_cast<std::size_t>(k)];
    }
  }
  for (long long k = 1; k <= r2max; ++k) {
    if (count[static_cast<std::size_t>(k)] == 0) continue;
    const double rho = std::sqrt(static_cast<double>(k));
    lattice_.push_back({rho, static_cast<double>(count[static_cast<std::size_t>(k)]), recipe_.coefficient(rho)});
  }
  continuum_ = continuum_nodes(lattice_radius);
}

std::vector<LinearFlowEvaluator::Node> LinearFlowEvaluator::continuum_nodes(double lower) const {
  std::vector<Node> nodes;
  const double upper = recipe_.bump.frequency_extent() / recipe_.length_scale();
  if (!(lower < upper)) return nodes;
  const double span = std::log(upper / lower);
  const int panels = std::max(1, static_cast<int>(std::ceil(span / std::log(kPanelRatio))));
  const double du = span / panels;
  nodes.reserve(static_cast<std::size_t>(panels) * 16);
  for (int p = 0; p < panels; ++p) {
    const double mid = std::log(lower) + (p + 0.5) * du;
    for (int i = 0; i < 8; ++i) {
      for (int sgn : {-1, 1}) {
        const double u = mid + sgn * 0.5 * du * kGlX[i];
        const double rho = std::exp(u);
        // d rho = rho du; area element 2 pi rho d rho.
        const double w = 0.5 * du * kGlW[i] * 2.0 * kPi * rho * rho;
        nodes.push_back({rho, w, recipe_.coefficient(rho)});
      }
    }
  }
  return nodes;
}

template <class Fn>
double LinearFlowEvaluator::sum(double cutoff, Fn&& g) const {
  double acc = 0.0;
  for (const Node& n : lattice_) {
    if (n.rho > cutoff) acc += n.weight * g(n.rho, n.coeff);
  }
  // A fixed node set keeps tails exactly monotone in the cutoff.
  for (const Node& n : continuum_) {
    if (n.rho > cutoff) acc += n.weight * g(n.rho, n.coeff);
  }
  return acc;
}

double LinearFlowEvaluator::norm_sq(double s, double t, double cutoff) const {
  const double nu = recipe_.nu, g2 = 2.0 * recipe_.gamma;
  return sum(cutoff, [&](double rho, double c) {
    return std::pow(rho, 2.0 * s) * c * c * std::exp(-2.0 * nu * t * std::pow(rho, g2));
  });
}

double LinearFlowEvaluator::time_integral(double s, double a, double b, double cutoff) const {
  if (!(b >= a) || a < 0.0) throw std::invalid_argument("time_integral: need 0 <= a <= b");
  const double nu = recipe_.nu, g2 = 2.0 * recipe_.gamma;
  return sum(cutoff, [&](double rho, double c) {
    return std::pow(rho, 2.0 * s) * c * c * exp_window(2.0 * nu * std::pow(rho, g2), a, b);
  });
}

double cross_time_integral(const LinearFlowEvaluator& a, const LinearFlowEvaluator& b, double s, double t_end) {
  if (a.lattice_radius_ != b.lattice_radius_) throw std::invalid_argument("cross_time_integral: lattice mismatch");
  if (a.recipe_.gamma != b.recipe_.gamma) throw std::invalid_argument("cross_time_integral: gamma mismatch");
  const double g2 = 2.0 * a.recipe_.gamma;
  const double nus = a.recipe_.nu + b.recipe_.nu;
  auto term = [&](double rho, double ca, double cb) {
    return std::pow(rho, 2.0 * s) * ca * cb * exp_window(nus * std::pow(rho, g2), 0.0, t_end);
  };
  double acc = 0.0;
  for (std::size_t i = 0; i < a.lattice_.size(); ++i) {
    acc += a.lattice_[i].weight * term(a.lattice_[i].rho, a.lattice_[i].coeff, b.lattice_[i].coeff);
  }
  // Continuum on the wider of the two frequency ranges.
  const LinearFlowEvaluator& wide = a.recipe_.length_scale() < b.recipe_.length_scale() ? a : b;
  const LinearFlowEvaluator& other = &wide == &a ? b : a;
  for (const auto& n : wide.continuum_) {
    const double co = other.recipe_.coefficient(n.rho);
    acc += n.weight * term(n.rho, n.coeff, co);
  }
  return acc;
}

double distance_sq(const LinearFlowEvaluator& a, const LinearFlowEvaluator& b, double s, double t_end) {
  const double d = a.time_integral(s, 0.0, t_end) + b.time_integral(s, 0.0, t_end) -
                   2.0 * cross_time_integral(a, b, s, t_end);
  return std::max(0.0, d);
}

DiagnosticSeries LinearFlowEvaluator::series(const std::vector<double>& times,
                                             const std::vector<double>& tail_cutoffs) const {
  DiagnosticSeries out;
  out.alpha = recipe_.alpha;
  out.gamma = recipe_.gamma;
  out.nu = recipe_.nu;
  out.grid_size = 0;
  out.physical_norms = false;
  out.tail_cutoffs = tail_cutoffs;
  const double a = recipe_.alpha, g = recipe_.gamma, nu = recipe_.nu;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double t : times) {
    DiagnosticSample s;
    s.t = t;
    s.h_minus_alpha = std::sqrt(norm_sq(-a, t));
    s.l2 = std::sqrt(norm_sq(0.0, t));
    s.h_gamma_minus_alpha = std::sqrt(norm_sq(g - a, t));
    s.h_gamma = std::sqrt(norm_sq(g, t));
    s.lp_alpha = s.l1 = s.linf = nan;
    s.cum_diss_ham = nu * time_integral(g - a, 0.0, t);
    s.cum_diss_l2 = nu * time_integral(g, 0.0, t);
    out.samples.push_back(s);
    std::vector<double> tails;
    for (double cut : tail_cutoffs) tails.push_back(norm_sq(-a, t, cut));
    out.tail_sq.push_back(std::move(tails));
  }
  return out;
}

std::vector<double> counterexample_sample_times(double nu, double t_end, int samples) {
  if (samples < 2) throw std::invalid_argument("counterexample_sample_times: need at least two samples");
  std::vector<double> t{0.0};
  if (!(t_end > 0.0)) return t;
  // Half the samples log-spaced from 1e-3 nu, half uniform over the window.
  const int nlog = samples / 2;
  const double lo = std::min(1e-3 * nu, 1e-3 * t_end);
  for (int i = 0; i < nlog; ++i) t.push_back(lo * std::pow(t_end / lo, static_cast<double>(i) / nlog));
  const int nlin = samples - nlog;
  for (int i = 1; i <= nlin; ++i) t.push_back(t_end * i / nlin);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

}  // namespace gsqg
