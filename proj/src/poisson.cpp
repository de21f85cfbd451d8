#include "nsdyn/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "nsdyn/parallel.hpp"
#include "nsdyn/random.hpp"

namespace nsdyn {

Region make_region(std::vector<Point> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

Region interval(Point lo, Point hi) {
  Region r;
  if (hi < lo) return r;
  r.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (Point p = lo; p <= hi; ++p) r.push_back(p);
  return r;
}

Region intersect(const Region& a, const Region& b) {
  Region out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Region unite(const Region& a, const Region& b) {
  Region out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

namespace {

Point floor_mod(Point a, Point m) {
  const Point r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

GroundSpace GroundSpace::integer_translation(double weight, Point step) {
  if (!(weight > 0.0) || !std::isfinite(weight)) throw std::invalid_argument("weights must be positive");
  GroundSpace gs;
  gs.kind_ = Kind::translation;
  gs.unit_weight_ = weight;
  gs.step_ = step;
  return gs;
}

GroundSpace GroundSpace::cyclic(Point m, Point rotation, double weight) {
  if (m < 1) throw std::invalid_argument("cycle length must be positive");
  if (!(weight > 0.0) || !std::isfinite(weight)) throw std::invalid_argument("weights must be positive");
  GroundSpace gs;
  gs.kind_ = Kind::cyclic;
  gs.unit_weight_ = weight;
  gs.size_ = m;
  gs.step_ = floor_mod(rotation, m);
  return gs;
}

GroundSpace GroundSpace::finite(std::vector<double> weights, std::vector<Point> permutation) {
  const Point m = static_cast<Point>(weights.size());
  if (m < 1 || permutation.size() != weights.size()) throw std::invalid_argument("weights and map sizes differ");
  std::vector<Point> inverse(weights.size(), -1);
  for (Point p = 0; p < m; ++p) {
    if (!(weights[p] > 0.0) || !std::isfinite(weights[p])) throw std::invalid_argument("weights must be positive");
    const Point q = permutation[p];
    if (q < 0 || q >= m || inverse[q] != -1) throw std::invalid_argument("point map is not a bijection");
    inverse[q] = p;
  }
  GroundSpace gs;
  gs.kind_ = Kind::finite;
  gs.size_ = m;
  gs.weights_ = std::make_shared<const std::vector<double>>(std::move(weights));
  gs.forward_ = std::make_shared<const std::vector<Point>>(std::move(permutation));
  gs.backward_ = std::make_shared<const std::vector<Point>>(std::move(inverse));
  return gs;
}

bool GroundSpace::contains(Point p) const { return kind_ == Kind::translation || (p >= 0 && p < size_); }

void GroundSpace::check(Point p) const {
  if (!contains(p)) throw std::out_of_range("point " + std::to_string(p) + " outside ground space");
}

double GroundSpace::weight(Point p) const {
  check(p);
  return kind_ == Kind::finite ? (*weights_)[static_cast<std::size_t>(p)] : unit_weight_;
}

double GroundSpace::weight(const Region& region) const {
  double w = 0.0;
  for (Point p : region) w += weight(p);
  return w;
}

Point GroundSpace::apply(Point p, std::int64_t n) const {
  check(p);
  switch (kind_) {
    case Kind::translation: return p + n * step_;
    case Kind::cyclic: {
      const auto shift = static_cast<__int128>(floor_mod(n, size_)) * step_;
      return floor_mod(static_cast<Point>((p + shift) % size_), size_);
    }
    case Kind::finite: {
      // The orbit of p has length <= size_, so |n| can be reduced modulo it.
      Point len = 1;
      for (Point q = (*forward_)[p]; q != p; q = (*forward_)[q]) ++len;
      Point steps = floor_mod(n, len);
      Point q = p;
      while (steps-- > 0) q = (*forward_)[q];
      return q;
    }
  }
  return p;
}

Region GroundSpace::pull_back(const Region& region, std::int64_t n) const {
  Region out;
  out.reserve(region.size());
  for (Point q : region) out.push_back(apply(q, -n));
  return make_region(std::move(out));
}

bool GroundSpace::measure_preserving() const {
  if (kind_ != Kind::finite) return true;
  for (Point p = 0; p < size_; ++p) {
    if ((*weights_)[(*forward_)[p]] != (*weights_)[p]) return false;
  }
  return true;
}

Region PoissonEvent::support() const {
  Region s;
  for (const auto& c : constraints) s = unite(s, c.region);
  return s;
}

PoissonEvent operator&(const PoissonEvent& a, const PoissonEvent& b) {
  PoissonEvent e = a;
  e.constraints.insert(e.constraints.end(), b.constraints.begin(), b.constraints.end());
  return e;
}

double poisson_pmf(double mean, int k) {
  if (k < 0) return 0.0;
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
}

namespace {

struct Atom {
  std::uint64_t mask = 0;
  double weight = 0.0;
};

class AtomEnumerator {
 public:
  AtomEnumerator(std::vector<Atom> atoms, std::vector<int> last_atom)
      : atoms_(std::move(atoms)), last_atom_(std::move(last_atom)), memo_(atoms_.size()) {}

  double run(const std::vector<int>& remaining) { return visit(0, remaining); }

 private:
  double visit(std::size_t j, const std::vector<int>& remaining) {
    if (j == atoms_.size()) {
      return std::all_of(remaining.begin(), remaining.end(), [](int r) { return r == 0; }) ? 1.0 : 0.0;
    }
    if (auto it = memo_[j].find(remaining); it != memo_[j].end()) return it->second;
    const Atom& atom = atoms_[j];
    int lo = 0;
    int hi = kEventCountCap;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      if (!(atom.mask >> i & 1U)) continue;
      hi = std::min(hi, remaining[i]);
      // This atom is the last one that can still fill constraint i.
      if (last_atom_[i] == static_cast<int>(j)) lo = std::max(lo, remaining[i]);
    }
    double total = 0.0;
    std::vector<int> next = remaining;
    for (int c = lo; c <= hi; ++c) {
      for (std::size_t i = 0; i < remaining.size(); ++i) {
        if (atom.mask >> i & 1U) next[i] = remaining[i] - c;
      }
      total += poisson_pmf(atom.weight, c) * visit(j + 1, next);
    }
    memo_[j].emplace(remaining, total);
    return total;
  }

  std::vector<Atom> atoms_;
  std::vector<int> last_atom_;
  std::vector<std::map<std::vector<int>, double>> memo_;
};

}  // namespace

double event_probability(const GroundSpace& gs, const PoissonEvent& event) {
  const auto& cs = event.constraints;
  if (cs.size() > 64) throw std::invalid_argument("at most 64 constraints per event");
  for (const auto& c : cs) {
    if (c.count < 0 || c.count > kEventCountCap) {
      throw std::invalid_argument("constraint count outside [0, " + std::to_string(kEventCountCap) + "]");
    }
  }
  std::map<Point, std::uint64_t> signature;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (Point p : cs[i].region) signature[p] |= std::uint64_t{1} << i;
  }
  std::map<std::uint64_t, double> atom_weight;
  for (const auto& [p, mask] : signature) atom_weight[mask] += gs.weight(p);

  std::vector<Atom> atoms;
  for (const auto& [mask, w] : atom_weight) atoms.push_back({mask, w});
  std::vector<int> last_atom(cs.size(), -1);
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (atoms[j].mask >> i & 1U) last_atom[i] = static_cast<int>(j);
    }
  }
  std::vector<int> remaining;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (last_atom[i] < 0) {
      if (cs[i].count != 0) return 0.0;
      remaining.push_back(0);
    } else {
      remaining.push_back(cs[i].count);
    }
  }
  return AtomEnumerator(std::move(atoms), std::move(last_atom)).run(remaining);
}

MixingGap mixing_gap(const GroundSpace& gs, const PoissonEvent& b, const PoissonEvent& c) {
  MixingGap g;
  const double pb = event_probability(gs, b);
  const double pc = event_probability(gs, c);
  const double pbc = event_probability(gs, b & c);
  g.gap = std::fabs(pbc - pb * pc);
  g.bound = 2.0 * gs.weight(intersect(b.support(), c.support()));
  g.ok = g.gap <= g.bound + 1e-12;
  return g;
}

HorizonExhausted::HorizonExhausted(std::size_t step, std::int64_t horizon)
    : std::runtime_error("horizon " + std::to_string(horizon) + " exhausted at step " + std::to_string(step)),
      step_(step) {}

std::vector<std::int64_t> find_null_subsequence(const GroundSpace& gs, const std::vector<Region>& regions,
                                                std::size_t count, std::int64_t horizon) {
  return find_null_subsequence(gs, [&](std::size_t) { return regions; }, count, horizon);
}

std::vector<std::int64_t> find_null_subsequence(const GroundSpace& gs,
                                                const std::function<std::vector<Region>(std::size_t)>& pool,
                                                std::size_t count, std::int64_t horizon) {
  std::vector<std::int64_t> times{0};
  for (std::size_t j = 1; j <= count; ++j) {
    const std::vector<Region> regions = pool(j);
    const double threshold = std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(j, 2000)));
    std::vector<std::vector<Region>> earlier;
    earlier.reserve(times.size());
    for (std::int64_t t : times) {
      std::vector<Region> pulled;
      for (const auto& a : regions) pulled.push_back(gs.pull_back(a, t));
      earlier.push_back(std::move(pulled));
    }
    bool found = false;
    for (std::int64_t n = times.back() + 1; n <= horizon && !found; ++n) {
      std::vector<Region> current;
      for (const auto& b : regions) current.push_back(gs.pull_back(b, n));
      bool good = true;
      for (const auto& pulled : earlier) {
        for (const auto& a : pulled) {
          for (const auto& b : current) {
            const double overlap = gs.weight(intersect(a, b));
            if (overlap != 0.0 && !(overlap < threshold)) {
              good = false;
              break;
            }
          }
          if (!good) break;
        }
        if (!good) break;
      }
      if (good) {
        times.push_back(n);
        found = true;
      }
    }
    if (!found) throw HorizonExhausted(j, horizon);
  }
  return {times.begin() + 1, times.end()};
}

BanachDensity banach_density_filter(const std::function<double(std::int64_t)>& a, double epsilon,
                                    std::int64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  BanachDensity d;
  for (std::int64_t n = 1; n <= horizon; ++n) {
    if (a(n) < epsilon) d.members.push_back(n);
  }
  d.density = static_cast<double>(d.members.size()) / static_cast<double>(horizon);
  return d;
}

int PointSample::count(Point p) const {
  CounterStream stream(coordinate_key(seed_, p));
  return sample_poisson(gs_.weight(p), stream);
}

int PointSample::count(const Region& region) const {
  int total = 0;
  for (Point p : region) total += count(p);
  return total;
}

bool PointSample::in(const PoissonEvent& event) const {
  return std::all_of(event.constraints.begin(), event.constraints.end(),
                     [&](const Constraint& c) { return count(c.region) == c.count; });
}

PoissonEvent pull_back(const GroundSpace& gs, const PoissonEvent& event, std::int64_t n) {
  PoissonEvent e;
  for (const auto& c : event.constraints) e.constraints.push_back({gs.pull_back(c.region, n), c.count});
  return e;
}

int suspension_indicator(const PointSample& sample, const PoissonEvent& event, std::int64_t n) {
  return sample.in(pull_back(sample.ground(), event, n)) ? 1 : 0;
}

namespace {

std::pair<double, double> mean_and_variance(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, ss / static_cast<double>(v.size() - 1)};
}

}  // namespace

std::vector<BlockStatistics> subsequence_average_experiment(const GroundSpace& gs, const PoissonEvent& event,
                                                            const std::vector<std::int64_t>& times,
                                                            const std::vector<std::size_t>& block_sizes,
                                                            std::size_t seeds, std::uint64_t master_seed) {
  if (seeds == 0) throw std::invalid_argument("need at least one seed");
  std::size_t longest = 0;
  for (std::size_t n : block_sizes) {
    if (n == 0 || n > times.size()) throw std::invalid_argument("block size must lie in [1, number of times]");
    longest = std::max(longest, n);
  }
  std::vector<PoissonEvent> pulled;
  pulled.reserve(longest);
  for (std::size_t j = 0; j < longest; ++j) pulled.push_back(pull_back(gs, event, times[j]));

  const auto averages = parallel_map(seeds, [&](std::size_t s) {
    const PointSample sample(gs, derive_seed(master_seed, s));
    std::vector<double> prefix(longest + 1, 0.0);
    for (std::size_t j = 0; j < longest; ++j) prefix[j + 1] = prefix[j] + (sample.in(pulled[j]) ? 1.0 : 0.0);
    std::vector<double> out;
    for (std::size_t n : block_sizes) out.push_back(prefix[n] / static_cast<double>(n));
    return out;
  });

  std::vector<BlockStatistics> stats;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    std::vector<double> column;
    column.reserve(seeds);
    for (const auto& row : averages) column.push_back(row[b]);
    const auto [mean, variance] = mean_and_variance(column);
    stats.push_back({block_sizes[b], mean, variance});
  }
  return stats;
}

double EventCombination::operator()(const PointSample& sample, std::int64_t n) const {
  double v = constant;
  for (const auto& [a, e] : terms) v += a * suspension_indicator(sample, e, n);
  return v;
}

double EventCombination::integral(const GroundSpace& gs) const {
  double v = constant;
  for (const auto& [a, e] : terms) v += a * event_probability(gs, e);
  return v;
}

std::vector<CorrelationPoint> weak_mixing_probe(const GroundSpace& gs, const EventCombination& f,
                                                const EventCombination& g, const std::vector<std::int64_t>& times,
                                                std::size_t seeds, std::uint64_t master_seed) {
  if (seeds < 2) throw std::invalid_argument("need at least two seeds");
  const auto rows = parallel_map(seeds, [&](std::size_t s) {
    const PointSample sample(gs, derive_seed(master_seed, s));
    const double gv = g(sample);
    std::vector<double> out;
    out.reserve(times.size());
    for (std::int64_t t : times) out.push_back(f(sample, t) * gv);
    return out;
  });
  const double limit = f.integral(gs) * g.integral(gs);
  std::vector<CorrelationPoint> points;
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> column;
    column.reserve(seeds);
    for (const auto& row : rows) column.push_back(row[i]);
    const auto [mean, variance] = mean_and_variance(column);
    CorrelationPoint p;
    p.time = times[i];
    p.estimate = mean;
    p.standard_error = std::sqrt(variance / static_cast<double>(seeds));
    p.limit = limit;
    p.within_interval = std::fabs(mean - limit) <= 3.0 * p.standard_error + 1e-12;
    points.push_back(p);
  }
  return points;
}

}  // namespace nsdyn
