#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "nsdyn/bernoulli.hpp"
#include "nsdyn/log_value.hpp"
#include "nsdyn/markov.hpp"
#include "nsdyn/shift.hpp"

namespace nsdyn {

/// c + Sum a_i 1_{C_i} on a shift space.
struct CylinderObservable {
  double constant = 0.0;
  std::vector<std::pair<double, Cylinder>> terms;

  static CylinderObservable indicator(Cylinder c) { return {0.0, {{1.0, std::move(c)}}}; }
  static CylinderObservable constant_function(double c) { return {c, {}}; }

  double operator()(const Configuration& x) const;
  double sup() const;
  double inf() const;
};

/// A shift-invariant-in-form measure on a shift space whose RN cocycle is
/// computable.
class SymbolicSystem {
 public:
  virtual ~SymbolicSystem() = default;
  virtual Configuration sample(std::uint64_t seed) const = 0;
  /// log (T^n)'(x) = log d(mu o T^n)/dmu (x).
  virtual LogValue log_rn(const Configuration& x, Coord n, double tol) const = 0;
  /// 0 for words the system does not allow.
  virtual double cylinder_measure(const Cylinder& c) const = 0;
  virtual bool measure_preserving() const = 0;
  virtual bool conservative_certified() const = 0;
  virtual int alphabet_size() const = 0;
};

std::shared_ptr<const SymbolicSystem> bernoulli_system(BernoulliFamily family);
std::shared_ptr<const SymbolicSystem> markov_system(MarkovFamily family);

/// ||f||_1 by enumerating the words on the range of the observable's cylinders.
double l1_norm(const SymbolicSystem& system, const CylinderObservable& f);
/// int f dmu.
double integral(const SymbolicSystem& system, const CylinderObservable& f);

enum class Normalization { raw, per_n, ratio };

struct SeriesPoint {
  Coord n = 0;
  double value = 0.0;
  double error_bound = 0.0;
};

struct SumSeries {
  Normalization normalization = Normalization::raw;
  std::vector<SeriesPoint> checkpoints;
  /// Value at the last checkpoint, the finite-horizon stand-in for the limit.
  double empirical_limit = 0.0;
  /// False when some RN factor was uncertified.
  bool certified = true;
};

/// 1, 2, 4, ..., and the horizon itself.
std::vector<Coord> checkpoint_grid(Coord horizon);

/// S_n(f)(x) / n = (1/n) Sum_{k<n} f(T^k x).
SumSeries birkhoff_series(const CylinderObservable& f, const Configuration& x, Coord horizon);

/// Sum_{k<n} (T^{-k})'(x) f(T^{-k} x).
SumSeries dual_series(const SymbolicSystem& system, const CylinderObservable& f, const Configuration& x,
                      Coord horizon, double tol = 1e-12);

/// Dual sum of f over the dual sum of 1.
SumSeries hurewicz_ratio_series(const SymbolicSystem& system, const CylinderObservable& f, const Configuration& x,
                                Coord horizon, double tol = 1e-12);

struct MaximalInequalityResult {
  double empirical_tail = 0.0;
  double bound = 0.0;
  double l1_norm = 0.0;
  /// 3 sqrt(p(1-p)/seeds).
  double slack = 0.0;
  bool ok = false;
};

/// Fraction of seeds with sup_{n <= horizon} |T^_n f / T^_n 1| > t against ||f||_1 / t.
MaximalInequalityResult maximal_inequality_probe(const SymbolicSystem& system, const CylinderObservable& f, double t,
                                                 Coord horizon, std::size_t seeds, std::uint64_t master_seed);

/// t -> value of the observable along one sampled orbit.
using Trajectory = std::function<double(std::int64_t)>;
using TrajectoryFactory = std::function<Trajectory(std::uint64_t seed)>;

/// t -> f(T^t x) for x sampled from the system.
TrajectoryFactory symbolic_trajectory(std::shared_ptr<const SymbolicSystem> system, CylinderObservable f);

struct LiminfProbeResult {
  /// Per-seed minimum of the block averages over the last quarter of block sizes.
  std::vector<double> estimates;
  double quantile05 = 0.0;
  double sigma = 0.0;
  double target = 0.0;
  bool pass = false;
  /// Same test with the standard-error slack 3 sigma / sqrt(seeds).
  bool pass_standard_error = false;
};

/// Block averages (1/N) Sum_{k<N} a(n_k) for each N in block_sizes; passes
/// when the 5% quantile of the liminf estimates is >= alpha mu(A) - 3 sigma.
LiminfProbeResult theorem11_probe(const TrajectoryFactory& trajectory, const std::vector<std::int64_t>& times,
                                  const std::vector<std::size_t>& block_sizes, double alpha, double measure,
                                  std::size_t seeds, std::uint64_t master_seed);

}  // namespace nsdyn
