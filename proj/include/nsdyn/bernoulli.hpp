#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "nsdyn/log_value.hpp"
#include "nsdyn/shift.hpp"

namespace nsdyn {

/// A fully supported probability vector on {1..N}.
class SiteMeasure {
 public:
  /// Throws std::invalid_argument unless every entry lies in (0,1) and the
  /// entries sum to 1 within 1e-12.
  explicit SiteMeasure(std::vector<double> probabilities);

  static SiteMeasure uniform(int size);

  int size() const { return static_cast<int>(p_.size()); }
  double operator()(Symbol s) const { return p_[static_cast<std::size_t>(s - 1)]; }
  double log_prob(Symbol s) const { return log_p_[static_cast<std::size_t>(s - 1)]; }
  double max() const { return max_; }
  double min() const { return min_; }
  /// max / min, the per-site uniformity ratio.
  double ratio() const { return max_ / min_; }
  std::span<const double> probabilities() const { return p_; }

  /// Inverse-CDF draw from a uniform in [0, 1).
  Symbol draw(double u) const;

  friend bool operator==(const SiteMeasure& a, const SiteMeasure& b) { return a.p_ == b.p_; }

 private:
  std::vector<double> p_;
  std::vector<double> log_p_;
  double max_ = 0.0;
  double min_ = 0.0;
};

/// Sum_j (sqrt a(j) - sqrt b(j))^2.
double hellinger_term(const SiteMeasure& a, const SiteMeasure& b);

/// Summable majorant t_k of the per-site log deviations from the base
/// measure. `tail(H)` must bound Sum_{|k| >= H} t_k.
struct TailMajorant {
  std::function<double(Coord)> term;
  std::function<double(Coord)> tail;

  /// t_k = scale * ratio^|k| with 0 < ratio < 1.
  static TailMajorant geometric(double scale, double ratio);
};

/// A sequence of site measures (mu_k) defining the product measure on
/// {1..N}^Z. The kind fixes which quantities are computed exactly.
class BernoulliFamily {
 public:
  enum class Kind { iid, compactly_perturbed, summable, periodic };

  static BernoulliFamily iid(SiteMeasure base);
  /// mu_k = window[k - start] for k in the window, base elsewhere.
  static BernoulliFamily compactly_perturbed(SiteMeasure base, Coord start, std::vector<SiteMeasure> window);
  /// mu_k = rule(k); the majorant is checked against the rule on |k| <= 256.
  static BernoulliFamily summable(SiteMeasure base, std::function<SiteMeasure(Coord)> rule, TailMajorant majorant);
  /// mu_k = (1 - e_k) base + e_k alternative with e_k = amplitude * ratio^|k|.
  /// The geometric majorant is derived from the mixture.
  static BernoulliFamily geometric_mixture(SiteMeasure base, const SiteMeasure& alternative, double amplitude,
                                           double ratio);
  /// mu_k = period[(k - phase) mod p].
  static BernoulliFamily periodic(std::vector<SiteMeasure> period, Coord phase = 0);

  Kind kind() const;
  Alphabet alphabet() const;
  const SiteMeasure& base() const;
  SiteMeasure at(Coord k) const;
  double log_prob(Coord k, Symbol s) const;

  /// Sites where mu_k may differ from the base (compactly perturbed kind).
  std::optional<std::pair<Coord, Coord>> perturbation_window() const;
  /// K with the perturbation window inside [-K, K]; 0 for iid.
  Coord perturbation_radius() const;
  const std::vector<SiteMeasure>& period() const;
  const TailMajorant& majorant() const;

  /// Family nu with nu_k = mu_{k - shift}.
  BernoulliFamily reindexed(Coord shift) const;

  /// Shift non-singularity is certified (every kind except a non-constant
  /// periodic family).
  bool nonsingular() const;

  std::shared_ptr<const SiteSampler> sampler() const;
  Configuration sample(std::uint64_t seed, Coord cap = kDefaultCoordinateCap) const;

 private:
  struct Impl;
  explicit BernoulliFamily(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

struct KakutaniResult {
  double value = 0.0;
  /// Bound on the omitted tail (0 when the partial sum is the full sum).
  double tail_bound = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

/// Partial Kakutani sum over |k| <= horizon of hellinger_term(mu_k, mu_{k-1}).
KakutaniResult kakutani_sum(const BernoulliFamily& family, Coord horizon, double tol = 1e-9);

/// log (T^n)'(x) = Sum_k log mu_{k-n}(x_k) - log mu_k(x_k). Exact for iid, periodic and
/// compactly perturbed families; truncated with error_bound <= tol otherwise.
LogValue rn_derivative(const BernoulliFamily& family, const Configuration& x, Coord n, double tol = 1e-12);

/// Chain rule (T^{n+m})'(x) = (T^n)'(T^m x) (T^m)'(x) in log space.
bool cocycle_check(const BernoulliFamily& family, const Configuration& x, Coord n, Coord m, double tol = 1e-12);

struct UniformityConstant {
  double value = 1.0;
  /// False when the supremum was only scanned over |k| <= horizon.
  bool exact = true;
};

/// L = sup_k max_j mu_k(j) / min_j mu_k(j).
UniformityConstant uniformity_constant(const BernoulliFamily& family, Coord horizon);

struct HomoclinicRatioCheck {
  double ratio_log = 0.0;
  /// 4 N log L.
  double bound_log = 0.0;
  /// Sum_{|k|<=N} log(M_k M_{k-n} / (m_k m_{k-n})).
  double product_bound_log = 0.0;
  /// 2 (2N+1) log L: every one of the 2N+1 differing sites contributes at most L^2.
  double site_bound_log = 0.0;
  bool ok = false;
  bool within_product_bound = false;
  bool within_site_bound = false;
};

/// Compares (T^n)'(x) / (T^n)'(y) for a homoclinic pair of radius N with the
/// uniform and per-site bounds.
HomoclinicRatioCheck homoclinic_ratio_bound_check(const BernoulliFamily& family, const Configuration& x,
                                                  const Configuration& y, Coord radius, Coord n);

struct ConservativityOptions {
  double divergence_threshold = 1e3;
  double min_last_decade_increment = 10.0;
  double flat_increment = 1e-6;
  double tol = 1e-12;
};

struct ConservativityReport {
  /// partial_sums[n-1] = Sum_{k=1..n} (T^{-k})'(x).
  std::vector<double> partial_sums;
  Verdict verdict = Verdict::inconclusive;
  /// Proven lower bound on every term (0 when none is available).
  double term_lower_bound = 0.0;
  /// L^{-2(2K+1)}, the nominal bound for compactly perturbed families.
  double nominal_lower_bound = 0.0;
  double min_term = 0.0;
  double max_term = 0.0;
};

/// Partial sums of the dual series of 1 at x, which diverge exactly on the
/// conservative part.
ConservativityReport conservativity_probe(const BernoulliFamily& family, const Configuration& x, Coord horizon,
                                          const ConservativityOptions& options = {});

}  // namespace nsdyn
