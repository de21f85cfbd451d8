#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "nsdyn/log_value.hpp"
#include "nsdyn/shift.hpp"

namespace nsdyn {

/// Subshift of finite type given by a 0/1 adjacency matrix over states 1..|S|.
class Sft {
 public:
  /// Throws std::invalid_argument unless the matrix is square, 0/1, at least
  /// 2x2, and every row and column has a positive entry.
  explicit Sft(Eigen::MatrixXi adjacency);

  static Sft full(int states);
  /// [[1,1],[1,0]].
  static Sft golden_mean();

  int states() const { return static_cast<int>(a_.rows()); }
  bool allowed(Symbol from, Symbol to) const { return a_(from - 1, to - 1) != 0; }
  bool admissible(const std::vector<Symbol>& word) const;
  const Eigen::MatrixXi& adjacency() const { return a_; }

 private:
  Eigen::MatrixXi a_;
};

/// Least N <= |S|^2 - 2|S| + 2 with A^N > 0, absent when A is not primitive.
std::optional<int> primitivity_index(const Sft& sft);

/// Calls f on every admissible word of the given length, in lexicographic order.
void for_each_admissible_word(const Sft& sft, std::size_t length,
                              const std::function<void(const std::vector<Symbol>&)>& f);

/// Inhomogeneous Markov measure on an SFT. P_n = window[n - start] inside the
/// window and the stationary P elsewhere; marginals satisfy pi_n = pi for
/// n <= start and pi_{n+1} = pi_n P_n.
class MarkovFamily {
 public:
  MarkovFamily(Sft sft, Eigen::MatrixXd transition, Eigen::RowVectorXd stationary, Coord window_start = 0,
               std::vector<Eigen::MatrixXd> window = {});

  /// Stationary pair of a homogeneous chain.
  static MarkovFamily homogeneous(Sft sft, Eigen::MatrixXd transition);

  const Sft& sft() const;
  int states() const;
  const Eigen::MatrixXd& base_transition() const;
  const Eigen::RowVectorXd& base_marginal() const;
  const Eigen::MatrixXd& transition(Coord n) const;
  Eigen::RowVectorXd marginal(Coord n) const;

  /// [lo, hi] of the perturbed transitions; absent for homogeneous families.
  std::optional<std::pair<Coord, Coord>> perturbation_window() const;
  /// All distinct transition matrices (base first).
  std::vector<Eigen::MatrixXd> transition_matrices() const;
  bool homogeneous() const;

  std::shared_ptr<const SiteSampler> sampler() const;
  Configuration sample(std::uint64_t seed, Coord cap = kDefaultCoordinateCap) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Left eigenvector of a stochastic matrix for eigenvalue 1, normalized to sum 1.
Eigen::RowVectorXd stationary_distribution(const Eigen::MatrixXd& transition);

/// pi_k(b_k) Prod_{j=k}^{l-1} P_j(b_j, b_{j+1}). Throws on inadmissible words.
double markov_cylinder_measure(const MarkovFamily& family, const Cylinder& cylinder);

/// log Z_n(x) = log mu(T[x]_{-n}^n) / mu([x]_{-n}^n). Always exact.
LogValue z_n(const MarkovFamily& family, const Configuration& x, Coord n);

/// log mu(T^shift [x]_{-n}^n) / mu([x]_{-n}^n).
LogValue cylinder_shift_ratio(const MarkovFamily& family, const Configuration& x, Coord shift, Coord n);

/// E[Z_{n+1} | [w]_{-n}^n] - Z_n on the symmetric cylinder w, by exact
/// enumeration of the one-symbol extensions on both sides.
double martingale_defect(const MarkovFamily& family, const Cylinder& w);

/// Least window radius at which cylinder_shift_ratio equals d(mu o T^shift)/dmu.
Coord certified_rn_window(const MarkovFamily& family, Coord shift);

/// log d(mu o T^shift)/dmu (x) from the cylinder ratio at radius `window`
/// (default: the certified radius). Smaller windows give an uncertified value
/// (infinite error bound).
LogValue rn_derivative_markov(const MarkovFamily& family, const Configuration& x, Coord shift,
                              std::optional<Coord> window = std::nullopt);

struct TransitionRatio {
  /// sup_n sup_s max_t P_n(s,t) / min_{t: P_n(s,t)>0} P_n(s,t).
  double value = 1.0;
  double min_entry = 1.0;
  /// Every positive entry is >= L^{-|S|}.
  bool floor_ok = false;
  /// Every positive entry is >= 1 / (|S| L).
  bool corrected_floor_ok = false;
};

TransitionRatio transition_ratio_constant(const MarkovFamily& family);

struct CouplingCertificate {
  Cylinder b;
  Cylinder c;
  Cylinder b_ext;
  Cylinder c_ext;
  Symbol hub = 1;
  int primitivity = 0;
  /// mu(C') / mu(B'), the constant derivative of the rewiring map R.
  double ratio = 0.0;
  double b_fraction = 0.0;  // mu(B') / mu(B)
  double c_fraction = 0.0;  // mu(C') / mu(C)
  /// |S|^{-1} L^{-|S|N}.
  double extension_bound = 0.0;
  /// |S|^{-1} L^{-2|S|N}.
  double coupling_bound = 0.0;
  /// |S|^{-1} (|S| L)^{-2N}, from the floor 1/(|S| L).
  double corrected_bound = 0.0;
  bool extension_ok = false;
  bool coupling_ok = false;
  bool corrected_ok = false;
  /// R is a bijection between the one-symbol extensions of B' and C'.
  bool bijective = false;
  /// |Sum_{w in B'} mu(R w) - ratio * mu(B')| over one-symbol extensions.
  double pushforward_error = 0.0;
};

/// Couples symmetric n-cylinders B and C through a hub state at distance N
/// (the primitivity index) outside them. Throws if the SFT is not primitive,
/// the cylinders are not symmetric of equal radius, or either is null.
CouplingCertificate couple_cylinders(const MarkovFamily& family, const Cylinder& b, const Cylinder& c);

/// Replaces the B' window of x by the C' word. Requires x in B'.
Configuration apply_coupling(const CouplingCertificate& cert, const Configuration& x);

struct TailTrivialityReport {
  Coord radius = 0;
  double epsilon = 0.0;
  std::size_t cylinders_checked = 0;
  /// Cylinder with mu(D n B) >= (1 - eps/2) mu(B).
  std::optional<Cylinder> dense_cylinder;
  /// Cylinder with mu(D n C) < (eps^2/2) mu(C).
  std::optional<Cylinder> violation;
  bool violated() const { return violation.has_value(); }
};

/// D is the union of the given cylinders (an empty cylinder is the whole
/// space). Cylinders of radius max(n, radius of D) are scanned in word order.
/// Default epsilon is |S|^{-1} L^{-|S|N}.
TailTrivialityReport tail_triviality_probe(const MarkovFamily& family, const std::vector<Cylinder>& d, Coord n,
                                           std::optional<double> epsilon = std::nullopt);

}  // namespace nsdyn
