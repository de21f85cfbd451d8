#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "nsdyn/bernoulli.hpp"
#include "nsdyn/ergodic.hpp"
#include "nsdyn/log_value.hpp"

namespace nsdyn {

/// Point of Z^d for d <= 3; unused trailing coordinates are 0.
using Site = std::array<Coord, 3>;

inline Site operator+(const Site& a, const Site& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Site operator-(const Site& a, const Site& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Coord sup_norm(const Site& a) { return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])}); }

/// (2n+1)^d.
Coord box_size(int dimension, Coord n);
/// Sites of F_n = [-n,n]^d in lexicographic order.
std::vector<Site> box_sites(int dimension, Coord n);
/// Sites of F_n minus F_{n-1} (F_0 for n = 0).
std::vector<Site> box_shell(int dimension, Coord n);

/// Product measure on {1..N}^{Z^d}.
class LatticeFamily {
 public:
  enum class Kind { compactly_perturbed, periodic };

  static LatticeFamily iid(int dimension, SiteMeasure base);
  static LatticeFamily compactly_perturbed(int dimension, SiteMeasure base, std::map<Site, SiteMeasure> perturbed);
  /// mu_h = period[h[axis] mod p].
  static LatticeFamily periodic(int dimension, int axis, std::vector<SiteMeasure> period);

  Kind kind() const;
  int dimension() const;
  Alphabet alphabet() const;
  const SiteMeasure& at(const Site& h) const;
  /// Perturbed sites (compactly perturbed kind).
  std::vector<Site> perturbed_sites() const;
  /// mu_{h+g} = mu_h for every h.
  bool invariant_under(const Site& g) const;
  /// sup_h max/min.
  double uniformity_constant() const;

 private:
  struct Impl;
  explicit LatticeFamily(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// A point of {1..N}^{Z^d}: symbols sampled per site as a pure function of
/// (seed, site), a translation offset, and explicit overrides.
class LatticeConfiguration {
 public:
  LatticeConfiguration(LatticeFamily family, std::uint64_t seed);

  Symbol at(const Site& h) const;
  std::uint64_t seed() const { return seed_; }

  /// T_g x with (T_g x)_h = x_{h-g}.
  friend LatticeConfiguration translate(const LatticeConfiguration& x, const Site& g);
  /// Equal to x except at the given sites.
  friend LatticeConfiguration rewire(const LatticeConfiguration& x, const std::map<Site, Symbol>& symbols);

 private:
  LatticeFamily family_;
  std::uint64_t seed_;
  Site offset_{0, 0, 0};
  std::shared_ptr<const std::map<Site, Symbol>> overrides_;
};

LatticeConfiguration translate(const LatticeConfiguration& x, const Site& g);
LatticeConfiguration rewire(const LatticeConfiguration& x, const std::map<Site, Symbol>& symbols);

/// Sum_h hellinger_term(mu_h, mu_{h - e_axis}), over all of Z^d for the
/// compactly perturbed kind and over the box [-horizon, horizon]^d otherwise.
KakutaniResult kakutani_sum_generator(const LatticeFamily& family, int axis, Coord horizon);

/// log d(mu o T_g)/dmu (x) = Sum_h log mu_{h+g}(x_h) - log mu_h(x_h). Exact;
/// throws std::domain_error when T_g is singular.
LogValue rn_derivative_g(const LatticeFamily& family, const LatticeConfiguration& x, const Site& g);

/// c + Sum a_i 1[x_h = w_h for h in pattern_i].
struct LatticeObservable {
  double constant = 0.0;
  std::vector<std::pair<double, std::map<Site, Symbol>>> terms;

  static LatticeObservable indicator(std::map<Site, Symbol> pattern) { return {0.0, {{1.0, std::move(pattern)}}}; }
  double operator()(const LatticeConfiguration& x) const;
};

/// Sum_{g in F_n} w_g f(T_g x) / Sum_{g in F_n} w_g with w_g = d(mu o T_g)/dmu (x),
/// for n = 1..n_max.
SumSeries box_ratio_average(const LatticeFamily& family, const LatticeObservable& f, const LatticeConfiguration& x,
                            Coord n_max, Coord cap = kDefaultCoordinateCap);

/// Smallest r with x_h = y_h for r < |h|_inf <= horizon; absent when the last
/// disagreement has |h|_inf in (horizon - slack, horizon]. Default slack horizon / 2.
std::optional<Coord> box_homoclinic_radius(const LatticeConfiguration& x, const LatticeConfiguration& y,
                                           int dimension, Coord horizon, std::optional<Coord> slack = std::nullopt);

}  // namespace nsdyn
