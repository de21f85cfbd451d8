#include "nsdyn/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "nsdyn/parallel.hpp"
#include "nsdyn/random.hpp"

namespace nsdyn {

double CylinderObservable::operator()(const Configuration& x) const {
  double v = constant;
  for (const auto& [a, c] : terms) {
    if (x.in(c)) v += a;
  }
  return v;
}

double CylinderObservable::sup() const {
  double v = constant;
  for (const auto& t : terms) v += std::max(t.first, 0.0);
  return v;
}

double CylinderObservable::inf() const {
  double v = constant;
  for (const auto& t : terms) v += std::min(t.first, 0.0);
  return v;
}

namespace {

class BernoulliSystem final : public SymbolicSystem {
 public:
  explicit BernoulliSystem(BernoulliFamily family) : family_(std::move(family)) {}

  Configuration sample(std::uint64_t seed) const override { return family_.sample(seed); }
  LogValue log_rn(const Configuration& x, Coord n, double tol) const override {
    return rn_derivative(family_, x, n, tol);
  }
  double cylinder_measure(const Cylinder& c) const override {
    double m = 1.0;
    for (Coord k = c.left(); k <= c.right(); ++k) {
      if (!family_.alphabet().contains(c.at(k))) return 0.0;
      m *= family_.at(k)(c.at(k));
    }
    return m;
  }
  bool measure_preserving() const override {
    using Kind = BernoulliFamily::Kind;
    return family_.kind() == Kind::iid || (family_.kind() == Kind::periodic && family_.nonsingular());
  }
  bool conservative_certified() const override {
    return family_.kind() != BernoulliFamily::Kind::summable && family_.nonsingular();
  }
  int alphabet_size() const override { return family_.alphabet().size(); }

 private:
  BernoulliFamily family_;
};

class MarkovSystem final : public SymbolicSystem {
 public:
  explicit MarkovSystem(MarkovFamily family) : family_(std::move(family)) {}

  Configuration sample(std::uint64_t seed) const override { return family_.sample(seed); }
  LogValue log_rn(const Configuration& x, Coord n, double) const override {
    return rn_derivative_markov(family_, x, n);
  }
  double cylinder_measure(const Cylinder& c) const override {
    if (!family_.sft().admissible(c.word())) return 0.0;
    return markov_cylinder_measure(family_, c);
  }
  bool measure_preserving() const override { return family_.homogeneous(); }
  // Finitely many factors differ from 1, so the dual series of 1 has terms
  // bounded below.
  bool conservative_certified() const override { return true; }
  int alphabet_size() const override { return family_.states(); }

 private:
  MarkovFamily family_;
};

// Calls g(word, left) for every word over the covering range of f.
template <class G>
void for_each_word(const SymbolicSystem& system, const CylinderObservable& f, G&& g) {
  Coord lo = std::numeric_limits<Coord>::max();
  Coord hi = std::numeric_limits<Coord>::min();
  for (const auto& t : f.terms) {
    if (t.second.empty()) continue;
    lo = std::min(lo, t.second.left());
    hi = std::max(hi, t.second.right());
  }
  if (lo > hi) {
    g(std::vector<Symbol>{}, Coord{0});
    return;
  }
  const int a = system.alphabet_size();
  const double words = std::pow(static_cast<double>(a), static_cast<double>(hi - lo + 1));
  if (words > 4194304.0) throw std::length_error("observable range too long to enumerate");
  std::vector<Symbol> w(static_cast<std::size_t>(hi - lo + 1), 1);
  while (true) {
    g(w, lo);
    std::size_t i = w.size();
    while (i > 0 && w[i - 1] == a) w[--i] = 1;
    if (i == 0) return;
    ++w[i - 1];
  }
}

double value_on_word(const CylinderObservable& f, const std::vector<Symbol>& w, Coord lo) {
  double v = f.constant;
  for (const auto& [a, c] : f.terms) {
    bool inside = true;
    for (Coord k = c.left(); k <= c.right() && inside; ++k) inside = w[static_cast<std::size_t>(k - lo)] == c.at(k);
    if (inside) v += a;
  }
  return v;
}

}  // namespace

std::shared_ptr<const SymbolicSystem> bernoulli_system(BernoulliFamily family) {
  return std::make_shared<BernoulliSystem>(std::move(family));
}

std::shared_ptr<const SymbolicSystem> markov_system(MarkovFamily family) {
  return std::make_shared<MarkovSystem>(std::move(family));
}

double l1_norm(const SymbolicSystem& system, const CylinderObservable& f) {
  double total = 0.0;
  for_each_word(system, f, [&](const std::vector<Symbol>& w, Coord lo) {
    const double mu = w.empty() ? 1.0 : system.cylinder_measure(Cylinder(lo, w));
    if (mu > 0.0) total += std::fabs(value_on_word(f, w, lo)) * mu;
  });
  return total;
}

double integral(const SymbolicSystem& system, const CylinderObservable& f) {
  double v = f.constant;
  for (const auto& [a, c] : f.terms) v += a * system.cylinder_measure(c);
  return v;
}

std::vector<Coord> checkpoint_grid(Coord horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  std::vector<Coord> grid;
  for (Coord n = 1; n < horizon; n *= 2) grid.push_back(n);
  grid.push_back(horizon);
  return grid;
}

SumSeries birkhoff_series(const CylinderObservable& f, const Configuration& x, Coord horizon) {
  SumSeries s;
  s.normalization = Normalization::per_n;
  const auto grid = checkpoint_grid(horizon);
  std::size_t next = 0;
  double sum = 0.0;
  for (Coord k = 0; k < horizon; ++k) {
    sum += f(shift(x, k));
    if (k + 1 == grid[next]) {
      s.checkpoints.push_back({k + 1, sum / static_cast<double>(k + 1), 0.0});
      ++next;
    }
  }
  s.empirical_limit = s.checkpoints.back().value;
  return s;
}

namespace {

struct DualAccumulator {
  ScaledSum sum;
  double error = 0.0;

  void add(double coefficient, const LogValue& w) {
    sum.add(coefficient, w.log_magnitude);
    if (coefficient != 0.0 && w.error_bound != 0.0) {
      error += std::fabs(coefficient) * std::exp(w.log_magnitude) * std::expm1(w.error_bound);
    }
  }
};

}  // namespace

SumSeries dual_series(const SymbolicSystem& system, const CylinderObservable& f, const Configuration& x,
                      Coord horizon, double tol) {
  SumSeries s;
  s.normalization = Normalization::raw;
  const auto grid = checkpoint_grid(horizon);
  std::size_t next = 0;
  DualAccumulator acc;
  for (Coord k = 0; k < horizon; ++k) {
    const LogValue w = system.log_rn(x, -k, tol);
    if (!w.certified()) s.certified = false;
    acc.add(f(shift(x, -k)), w);
    if (k + 1 == grid[next]) {
      s.checkpoints.push_back({k + 1, acc.sum.value(), acc.error});
      ++next;
    }
  }
  s.empirical_limit = s.checkpoints.back().value;
  return s;
}

SumSeries hurewicz_ratio_series(const SymbolicSystem& system, const CylinderObservable& f, const Configuration& x,
                                Coord horizon, double tol) {
  SumSeries s;
  s.normalization = Normalization::ratio;
  const auto grid = checkpoint_grid(horizon);
  std::size_t next = 0;
  DualAccumulator num;
  DualAccumulator den;
  for (Coord k = 0; k < horizon; ++k) {
    const LogValue w = system.log_rn(x, -k, tol);
    if (!w.certified()) s.certified = false;
    num.add(f(shift(x, -k)), w);
    den.add(1.0, w);
    if (k + 1 == grid[next]) {
      const double d = den.sum.value();
      const double r = num.sum.value() / d;
      s.checkpoints.push_back({k + 1, r, (num.error + std::fabs(r) * den.error) / d});
      ++next;
    }
  }
  s.empirical_limit = s.checkpoints.back().value;
  return s;
}

MaximalInequalityResult maximal_inequality_probe(const SymbolicSystem& system, const CylinderObservable& f, double t,
                                                 Coord horizon, std::size_t seeds, std::uint64_t master_seed) {
  if (!(t > 0.0)) throw std::invalid_argument("threshold must be positive");
  if (horizon < 1 || seeds == 0) throw std::invalid_argument("horizon and seeds must be positive");
  const auto exceeded = parallel_map(seeds, [&](std::size_t i) {
    const Configuration x = system.sample(derive_seed(master_seed, i));
    ScaledSum num;
    ScaledSum den;
    for (Coord k = 0; k < horizon; ++k) {
      const LogValue w = system.log_rn(x, -k, 1e-12);
      num.add(f(shift(x, -k)), w.log_magnitude);
      den.add(1.0, w.log_magnitude);
      if (std::fabs(num.value() / den.value()) > t) return 1;
    }
    return 0;
  });
  MaximalInequalityResult r;
  r.l1_norm = l1_norm(system, f);
  r.bound = r.l1_norm / t;
  r.empirical_tail = static_cast<double>(std::accumulate(exceeded.begin(), exceeded.end(), 0)) /
                     static_cast<double>(seeds);
  r.slack = 3.0 * std::sqrt(r.empirical_tail * (1.0 - r.empirical_tail) / static_cast<double>(seeds));
  r.ok = r.empirical_tail <= r.bound + r.slack;
  return r;
}

TrajectoryFactory symbolic_trajectory(std::shared_ptr<const SymbolicSystem> system, CylinderObservable f) {
  return [system = std::move(system), f = std::move(f)](std::uint64_t seed) -> Trajectory {
    const Configuration x = system->sample(seed);
    return [x, f](std::int64_t t) { return f(shift(x, t)); };
  };
}

LiminfProbeResult theorem11_probe(const TrajectoryFactory& trajectory, const std::vector<std::int64_t>& times,
                                  const std::vector<std::size_t>& block_sizes, double alpha, double measure,
                                  std::size_t seeds, std::uint64_t master_seed) {
  if (block_sizes.empty() || seeds < 2) throw std::invalid_argument("need block sizes and at least two seeds");
  for (std::size_t i = 0; i < block_sizes.size(); ++i) {
    if (block_sizes[i] == 0 || block_sizes[i] > times.size() || (i > 0 && block_sizes[i] <= block_sizes[i - 1])) {
      throw std::invalid_argument("block sizes must increase within the number of times");
    }
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] <= times[i - 1]) throw std::invalid_argument("times must increase strictly");
  }
  const std::size_t longest = block_sizes.back();
  const std::size_t tail = std::max<std::size_t>(1, (block_sizes.size() + 3) / 4);

  LiminfProbeResult r;
  r.estimates = parallel_map(seeds, [&](std::size_t s) {
    const Trajectory a = trajectory(derive_seed(master_seed, s));
    double sum = 0.0;
    double estimate = std::numeric_limits<double>::infinity();
    std::size_t b = 0;
    for (std::size_t k = 0; k < longest; ++k) {
      sum += a(times[k]);
      if (k + 1 == block_sizes[b]) {
        if (b + tail >= block_sizes.size()) estimate = std::min(estimate, sum / static_cast<double>(k + 1));
        ++b;
      }
    }
    return estimate;
  });

  std::vector<double> sorted = r.estimates;
  std::sort(sorted.begin(), sorted.end());
  r.quantile05 = sorted[static_cast<std::size_t>(0.05 * static_cast<double>(seeds - 1))];
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(seeds);
  double ss = 0.0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  r.sigma = std::sqrt(ss / static_cast<double>(seeds - 1));
  r.target = alpha * measure;
  r.pass = r.quantile05 >= r.target - 3.0 * r.sigma;
  r.pass_standard_error = r.quantile05 >= r.target - 3.0 * r.sigma / std::sqrt(static_cast<double>(seeds));
  return r;
}

}  // namespace nsdyn
