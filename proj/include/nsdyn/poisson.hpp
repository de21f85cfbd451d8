#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace nsdyn {

using Point = std::int64_t;
/// Finite set of ground points, kept sorted and duplicate free.
using Region = std::vector<Point>;

Region make_region(std::vector<Point> points);
/// {lo, ..., hi}.
Region interval(Point lo, Point hi);
Region intersect(const Region& a, const Region& b);
Region unite(const Region& a, const Region& b);

/// Countable ground space with a weighted counting measure and an invertible
/// point map T.
class GroundSpace {
 public:
  /// Points are all integers, weight w everywhere, T p = p + step.
  static GroundSpace integer_translation(double weight = 1.0, Point step = 1);
  /// Points 0..m-1, T p = p + rotation mod m.
  static GroundSpace cyclic(Point m, Point rotation, double weight = 1.0);
  /// Points 0..m-1, T p = permutation[p].
  static GroundSpace finite(std::vector<double> weights, std::vector<Point> permutation);

  bool contains(Point p) const;
  double weight(Point p) const;
  double weight(const Region& region) const;
  /// T^n p.
  Point apply(Point p, std::int64_t n) const;
  /// T^{-n}(region) = {p : T^n p in region}.
  Region pull_back(const Region& region, std::int64_t n) const;
  /// weight o T = weight, checked on every point (finite spaces) or exactly
  /// (translations).
  bool measure_preserving() const;

 private:
  enum class Kind { translation, cyclic, finite };
  Kind kind_ = Kind::translation;
  double unit_weight_ = 1.0;
  Point step_ = 1;
  Point size_ = 0;
  std::shared_ptr<const std::vector<double>> weights_;
  std::shared_ptr<const std::vector<Point>> forward_;
  std::shared_ptr<const std::vector<Point>> backward_;

  void check(Point p) const;
};

/// [N(region) = count].
struct Constraint {
  Region region;
  int count = 0;
};

/// Intersection of count constraints (a Poissonian cylinder).
struct PoissonEvent {
  std::vector<Constraint> constraints;

  /// S(B): the union of the constrained regions.
  Region support() const;
  /// Conjunction of both events.
  friend PoissonEvent operator&(const PoissonEvent& a, const PoissonEvent& b);
};

inline constexpr int kEventCountCap = 64;

/// e^{-w} w^k / k!.
double poisson_pmf(double mean, int k);

/// Exact probability under the Poisson measure. Regions are split into atoms
/// of the generated algebra whose counts are independent Poisson variables.
/// Throws std::invalid_argument for counts above kEventCountCap or negative.
double event_probability(const GroundSpace& gs, const PoissonEvent& event);

struct MixingGap {
  double gap = 0.0;
  double bound = 0.0;
  bool ok = false;
};

/// |P(B n C) - P(B) P(C)| against 2 mu(S(B) n S(C)).
MixingGap mixing_gap(const GroundSpace& gs, const PoissonEvent& b, const PoissonEvent& c);

class HorizonExhausted : public std::runtime_error {
 public:
  HorizonExhausted(std::size_t step, std::int64_t horizon);
  /// 1-based index of the first time that could not be chosen.
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Greedy times 0 = n_0 < n_1 < ... < n_count <= horizon with
/// mu(T^{-n_l} A_a n T^{-n_j} A_b) < 2^{-j} for all l < j and all a, b.
/// Returns n_1..n_count; throws HorizonExhausted.
std::vector<std::int64_t> find_null_subsequence(const GroundSpace& gs, const std::vector<Region>& regions,
                                                std::size_t count, std::int64_t horizon);

/// Same with a growing pool: step j uses pool(j), and pool(j) must contain pool(j-1).
std::vector<std::int64_t> find_null_subsequence(const GroundSpace& gs,
                                                const std::function<std::vector<Region>(std::size_t)>& pool,
                                                std::size_t count, std::int64_t horizon);

struct BanachDensity {
  std::vector<std::int64_t> members;
  double density = 0.0;
};

/// K = {1 <= n <= horizon : a_n < eps} and |K| / horizon.
BanachDensity banach_density_filter(const std::function<double(std::int64_t)>& a, double epsilon,
                                    std::int64_t horizon);

/// A Poisson point configuration: N({p}) ~ Poisson(weight(p)) drawn as a pure
/// function of (seed, p).
class PointSample {
 public:
  PointSample(GroundSpace gs, std::uint64_t seed) : gs_(std::move(gs)), seed_(seed) {}

  int count(Point p) const;
  int count(const Region& region) const;
  bool in(const PoissonEvent& event) const;
  std::uint64_t seed() const { return seed_; }
  const GroundSpace& ground() const { return gs_; }

 private:
  GroundSpace gs_;
  std::uint64_t seed_;
};

/// 1 if T_*^n(sample) lies in the event, using N(A)(T_*^n v) = N(T^{-n} A)(v).
int suspension_indicator(const PointSample& sample, const PoissonEvent& event, std::int64_t n);

/// The event {v : T_*^n v in event}.
PoissonEvent pull_back(const GroundSpace& gs, const PoissonEvent& event, std::int64_t n);

struct BlockStatistics {
  std::size_t n = 0;
  double mean = 0.0;
  /// Unbiased sample variance of the per-seed averages.
  double variance = 0.0;
};

/// Per-seed averages (1/N) Sum_{j<N} 1_B(T_*^{n_j} v) for each requested N,
/// over seeds derive_seed(master, 0..seeds-1).
std::vector<BlockStatistics> subsequence_average_experiment(const GroundSpace& gs, const PoissonEvent& event,
                                                            const std::vector<std::int64_t>& times,
                                                            const std::vector<std::size_t>& block_sizes,
                                                            std::size_t seeds, std::uint64_t master_seed);

/// c + Sum a_i 1_{E_i}.
struct EventCombination {
  double constant = 0.0;
  std::vector<std::pair<double, PoissonEvent>> terms;

  double operator()(const PointSample& sample, std::int64_t n = 0) const;
  double integral(const GroundSpace& gs) const;
};

struct CorrelationPoint {
  std::int64_t time = 0;
  double estimate = 0.0;
  double standard_error = 0.0;
  /// (int f)(int g).
  double limit = 0.0;
  /// |estimate - limit| <= 3 standard errors (or both exactly equal).
  bool within_interval = false;
};

/// Monte Carlo estimates of int f o T_*^{n_j} g over the given times.
std::vector<CorrelationPoint> weak_mixing_probe(const GroundSpace& gs, const EventCombination& f,
                                                const EventCombination& g, const std::vector<std::int64_t>& times,
                                                std::size_t seeds, std::uint64_t master_seed);

}  // namespace nsdyn
