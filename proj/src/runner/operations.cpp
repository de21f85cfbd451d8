#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "internal.hpp"
#include "nsdyn/random.hpp"

namespace nsdyn::runner::detail {
namespace {

std::int64_t bounded(const Params& p, const std::string& key, std::int64_t fallback, std::int64_t lo,
                     std::int64_t hi) {
  const auto v = p.integer(key, fallback);
  if (v < lo || v > hi) {
    fail(p.where() + "." + key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return v;
}

std::int64_t bounded(const Params& p, const std::string& key, std::int64_t lo, std::int64_t hi) {
  if (!p.has(key)) fail(p.where() + "." + key, "missing");
  return bounded(p, key, 0, lo, hi);
}

double positive(const Params& p, const std::string& key, double fallback) {
  const double v = p.real(key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) fail(p.where() + "." + key, "must be positive");
  return v;
}

Cylinder cylinder_param(const Params& p, const std::string& key, const Alphabet& alphabet) {
  Cylinder c = parse_cylinder(p.raw(key), p.where() + "." + key);
  try {
    c.validate(alphabet);
  } catch (const std::invalid_argument& e) {
    fail(p.where() + "." + key, e.what());
  }
  return c;
}

std::vector<std::size_t> powers_of_two(std::int64_t max_exponent) {
  std::vector<std::size_t> out;
  for (std::int64_t e = 1; e <= max_exponent; ++e) out.push_back(std::size_t{1} << e);
  return out;
}

std::vector<std::int64_t> consecutive(std::size_t count) {
  std::vector<std::int64_t> t(count);
  for (std::size_t i = 0; i < count; ++i) t[i] = static_cast<std::int64_t>(i);
  return t;
}

ojson stats_json(const std::vector<double>& v) {
  return ojson::array({number(*std::min_element(v.begin(), v.end())), number(*std::max_element(v.begin(), v.end()))});
}

ojson liminf_json(const LiminfProbeResult& r) {
  ojson o;
  o["quantile05"] = number(r.quantile05);
  o["sigma"] = number(r.sigma);
  o["target"] = number(r.target);
  o["threshold"] = number(r.target - 3.0 * r.sigma);
  o["pass"] = r.pass;
  o["pass_standard_error"] = r.pass_standard_error;
  o["estimate_range"] = stats_json(r.estimates);
  return o;
}

/// Shared series operations for the two symbolic systems. Returns false when
/// the name is not one of them.
bool symbolic_op(const std::shared_ptr<const SymbolicSystem>& system, const std::string& name, const Params& p,
                 std::uint64_t seed, OperationResult& out) {
  const Alphabet alphabet(system->alphabet_size());
  if (name == "birkhoff_series" || name == "dual_series" || name == "hurewicz_ratio_series") {
    const auto f = CylinderObservable::indicator(cylinder_param(p, "cylinder", alphabet));
    const Coord horizon = bounded(p, "horizon", 1024, 1, 1 << 22);
    const double tol = positive(p, "tol", 1e-12);
    p.finish();
    const Configuration x = system->sample(seed);
    SumSeries s = name == "birkhoff_series" ? birkhoff_series(f, x, horizon)
                  : name == "dual_series"   ? dual_series(*system, f, x, horizon, tol)
                                            : hurewicz_ratio_series(*system, f, x, horizon, tol);
    out.results["integral"] = number(integral(*system, f));
    out.results["series"] = to_json(s);
    out.series.emplace_back(name, std::move(s));
    return true;
  }
  if (name == "maximal_inequality_probe") {
    const auto f = CylinderObservable::indicator(cylinder_param(p, "cylinder", alphabet));
    const double t = positive(p, "t", 0.5);
    const Coord horizon = bounded(p, "horizon", 256, 1, 1 << 16);
    const auto seeds = bounded(p, "seeds", 200, 1, 100000);
    p.finish();
    const auto r = maximal_inequality_probe(*system, f, t, horizon, static_cast<std::size_t>(seeds), seed);
    out.results["empirical_tail"] = number(r.empirical_tail);
    out.results["bound"] = number(r.bound);
    out.results["l1_norm"] = number(r.l1_norm);
    out.results["slack"] = number(r.slack);
    out.results["ok"] = r.ok;
    out.failure = !r.ok;
    return true;
  }
  if (name == "theorem11_probe") {
    const auto f = CylinderObservable::indicator(cylinder_param(p, "cylinder", alphabet));
    const double alpha = positive(p, "alpha", 0.5);
    const auto max_exponent = bounded(p, "max_exponent", 12, 1, 20);
    const auto seeds = bounded(p, "seeds", 100, 2, 100000);
    p.finish();
    const auto blocks = powers_of_two(max_exponent);
    const double measure = integral(*system, f);
    const auto r = theorem11_probe(symbolic_trajectory(system, f), consecutive(blocks.back()), blocks, alpha, measure,
                                   static_cast<std::size_t>(seeds), seed);
    out.results = liminf_json(r);
    out.results["measure"] = number(measure);
    out.failure = !r.pass;
    return true;
  }
  return false;
}

void bernoulli_op(const Params& sys, const std::string& name, const Params& p, std::uint64_t seed,
                  OperationResult& out) {
  const BernoulliFamily fam = parse_bernoulli(sys);
  sys.finish();
  ojson& r = out.results;
  if (name == "kakutani_sum") {
    const Coord horizon = bounded(p, "horizon", 100, 1, 1000000);
    const double tol = positive(p, "tol", 1e-9);
    p.finish();
    const auto k = kakutani_sum(fam, horizon, tol);
    r["value"] = number(k.value);
    r["tail_bound"] = number(k.tail_bound);
    r["verdict"] = std::string(to_string(k.verdict));
    r["nonsingular"] = fam.nonsingular();
    return;
  }
  if (name == "rn_derivative") {
    const Coord n = bounded(p, "n", 1, -1000000, 1000000);
    const double tol = positive(p, "tol", 1e-12);
    std::optional<Cylinder> window;
    if (p.has("window")) window = cylinder_param(p, "window", fam.alphabet());
    p.finish();
    const Configuration x = window ? Configuration::from_window(window->left(), window->word(), fam.sampler(), seed)
                                   : fam.sample(seed);
    r["n"] = n;
    r["log_rn"] = to_json(rn_derivative(fam, x, n, tol));
    return;
  }
  if (name == "cocycle_check") {
    const auto cases = bounded(p, "cases", 1000, 1, 100000);
    const Coord max_shift = bounded(p, "max_shift", 50, 0, 10000);
    const double tol = positive(p, "tol", 1e-12);
    p.finish();
    const auto span = static_cast<std::uint64_t>(2 * max_shift + 1);
    std::int64_t failures = 0;
    double worst = 0.0;
    for (std::int64_t i = 0; i < cases; ++i) {
      CounterStream st(derive_seed(seed, static_cast<std::uint64_t>(i)));
      const Configuration x = fam.sample(st.next_bits());
      const Coord n = static_cast<Coord>(st.next_bits() % span) - max_shift;
      const Coord m = static_cast<Coord>(st.next_bits() % span) - max_shift;
      const double a = rn_derivative(fam, x, n + m, tol).log_magnitude;
      const double b = rn_derivative(fam, x, m, tol).log_magnitude;
      const double c = rn_derivative(fam, shift(x, m), n, tol).log_magnitude;
      worst = std::max(worst, std::abs(a - b - c));
      if (!cocycle_check(fam, x, n, m, tol)) ++failures;
    }
    r["cases"] = cases;
    r["failures"] = failures;
    r["max_defect"] = number(worst);
    out.failure = failures > 0;
    return;
  }
  if (name == "uniformity_constant") {
    const Coord horizon = bounded(p, "horizon", 1000, 0, 1000000);
    p.finish();
    const auto u = uniformity_constant(fam, horizon);
    r["value"] = number(u.value);
    r["exact"] = u.exact;
    return;
  }
  if (name == "homoclinic_scan") {
    const Coord max_radius = bounded(p, "max_radius", 3, 0, 8);
    const Coord max_shift = bounded(p, "max_shift", 8, 0, 64);
    p.finish();
    const int a = fam.alphabet().size();
    if (std::pow(static_cast<double>(a), static_cast<double>(2 * max_radius + 1)) > 65536.0) {
      fail(p.where() + ".max_radius", "too many words for this alphabet");
    }
    const Configuration x = fam.sample(seed);
    std::int64_t pairs = 0, violations = 0, product_violations = 0, site_violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (Coord rad = 0; rad <= max_radius; ++rad) {
      const auto len = static_cast<std::size_t>(2 * rad + 1);
      std::vector<Symbol> word(len, 1);
      while (true) {
        const Configuration y = rewire(x, Cylinder(-rad, word));
        const Coord radius = homoclinic_radius(x, y, max_radius + 1, 0).value_or(max_radius);
        for (Coord n = -max_shift; n <= max_shift; ++n) {
          const auto c = homoclinic_ratio_bound_check(fam, x, y, radius, n);
          ++pairs;
          if (!c.ok) ++violations;
          if (!c.within_product_bound) ++product_violations;
          if (!c.within_site_bound) ++site_violations;
          worst = std::max(worst, std::abs(c.ratio_log) - c.bound_log);
        }
        std::size_t i = 0;
        while (i < len && word[i] == a) word[i++] = 1;
        if (i == len) break;
        ++word[i];
      }
    }
    r["pairs"] = pairs;
    r["violations"] = violations;
    r["product_bound_violations"] = product_violations;
    r["site_bound_violations"] = site_violations;
    r["worst_log_excess"] = number(worst);
    out.failure = violations > 0;
    return;
  }
  if (name == "conservativity_probe") {
    const Coord horizon = bounded(p, "horizon", 4096, 1, 1 << 22);
    p.finish();
    const auto c = conservativity_probe(fam, fam.sample(seed), horizon);
    SumSeries s;
    for (Coord n : checkpoint_grid(horizon)) {
      s.checkpoints.push_back({n, c.partial_sums[static_cast<std::size_t>(n - 1)], 0.0});
    }
    s.empirical_limit = c.partial_sums.back();
    r["verdict"] = std::string(to_string(c.verdict));
    r["term_lower_bound"] = number(c.term_lower_bound);
    r["nominal_lower_bound"] = number(c.nominal_lower_bound);
    r["min_term"] = number(c.min_term);
    r["max_term"] = number(c.max_term);
    r["partial_sums"] = to_json(s);
    out.series.emplace_back("partial_sums", std::move(s));
    return;
  }
  if (symbolic_op(bernoulli_system(fam), name, p, seed, out)) return;
  fail(p.where(), "unknown Bernoulli operation \"" + name + "\"");
}

void markov_op(const Params& sys, const std::string& name, const Params& p, std::uint64_t seed,
               OperationResult& out) {
  const MarkovFamily fam = parse_markov(sys);
  sys.finish();
  const Alphabet alphabet(fam.states());
  ojson& r = out.results;
  if (name == "primitivity_index") {
    p.finish();
    const auto n = primitivity_index(fam.sft());
    r["primitive"] = n.has_value();
    r["index"] = n ? ojson(*n) : ojson(nullptr);
    return;
  }
  if (name == "cylinder_measure") {
    const Cylinder c = cylinder_param(p, "cylinder", alphabet);
    p.finish();
    r["admissible"] = fam.sft().admissible(c.word());
    r["measure"] = number(r["admissible"].get<bool>() ? markov_cylinder_measure(fam, c) : 0.0);
    return;
  }
  if (name == "z_n" || name == "rn_derivative") {
    const Coord shift_by = name == "z_n" ? 1 : bounded(p, "shift", 1, -1000, 1000);
    const Coord n = name == "z_n" ? bounded(p, "n", 1, 0, 100000) : 0;
    std::optional<Coord> window;
    if (name == "rn_derivative" && p.has("window")) window = bounded(p, "window", 0, 100000);
    p.finish();
    const Configuration x = fam.sample(seed);
    if (name == "z_n") {
      r["n"] = n;
      r["log_z"] = to_json(z_n(fam, x, n));
    } else {
      r["shift"] = shift_by;
      r["certified_window"] = certified_rn_window(fam, shift_by);
      r["log_rn"] = to_json(rn_derivative_markov(fam, x, shift_by, window));
    }
    return;
  }
  if (name == "transition_ratio_constant") {
    p.finish();
    const auto t = transition_ratio_constant(fam);
    r["value"] = number(t.value);
    r["min_entry"] = number(t.min_entry);
    r["floor_ok"] = t.floor_ok;
    r["corrected_floor_ok"] = t.corrected_floor_ok;
    return;
  }
  if (name == "couple_cylinders") {
    const Cylinder b = cylinder_param(p, "b", alphabet);
    const Cylinder c = cylinder_param(p, "c", alphabet);
    p.finish();
    const auto cert = couple_cylinders(fam, b, c);
    r["b_extension"] = to_json(cert.b_ext);
    r["c_extension"] = to_json(cert.c_ext);
    r["hub"] = cert.hub;
    r["primitivity"] = cert.primitivity;
    r["ratio"] = number(cert.ratio);
    r["b_fraction"] = number(cert.b_fraction);
    r["c_fraction"] = number(cert.c_fraction);
    r["extension_bound"] = number(cert.extension_bound);
    r["coupling_bound"] = number(cert.coupling_bound);
    r["corrected_bound"] = number(cert.corrected_bound);
    r["extension_ok"] = cert.extension_ok;
    r["coupling_ok"] = cert.coupling_ok;
    r["corrected_ok"] = cert.corrected_ok;
    r["bijective"] = cert.bijective;
    r["pushforward_error"] = number(cert.pushforward_error);
    out.failure = !(cert.extension_ok && cert.coupling_ok && cert.bijective);
    return;
  }
  if (name == "tail_triviality_probe") {
    const ojson& list = p.raw("d");
    if (!list.is_array() || list.empty()) fail(p.where() + ".d", "expected a non-empty array of cylinders");
    std::vector<Cylinder> d;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string w = p.where() + ".d[" + std::to_string(i) + "]";
      if (list[i] == "whole") {
        d.emplace_back();
        continue;
      }
      d.push_back(parse_cylinder(list[i], w));
      try {
        d.back().validate(alphabet);
      } catch (const std::invalid_argument& e) {
        fail(w, e.what());
      }
    }
    const Coord n = bounded(p, "n", 1, 0, 8);
    std::optional<double> eps;
    if (p.has("epsilon")) eps = positive(p, "epsilon", 1.0);
    p.finish();
    const auto t = tail_triviality_probe(fam, d, n, eps);
    r["radius"] = t.radius;
    r["epsilon"] = number(t.epsilon);
    r["cylinders_checked"] = t.cylinders_checked;
    r["dense_cylinder"] = t.dense_cylinder ? to_json(*t.dense_cylinder) : ojson(nullptr);
    r["violation"] = t.violation ? to_json(*t.violation) : ojson(nullptr);
    out.failure = t.violated();
    return;
  }
  if (name == "martingale_check") {
    const Coord n = bounded(p, "n", 3, 0, 6);
    const double tol = positive(p, "tol", 1e-12);
    p.finish();
    double worst = 0.0;
    std::size_t words = 0;
    for (Coord k = 0; k <= n; ++k) {
      for_each_admissible_word(fam.sft(), static_cast<std::size_t>(2 * k + 1), [&](const std::vector<Symbol>& w) {
        worst = std::max(worst, std::abs(martingale_defect(fam, Cylinder(-k, w))));
        ++words;
      });
    }
    r["cylinders"] = words;
    r["max_defect"] = number(worst);
    r["ok"] = worst <= tol;
    out.failure = worst > tol;
    return;
  }
  if (symbolic_op(markov_system(fam), name, p, seed, out)) return;
  fail(p.where(), "unknown Markov operation \"" + name + "\"");
}

std::vector<Region> event_regions(const PoissonEvent& e) {
  std::vector<Region> out;
  for (const auto& c : e.constraints) out.push_back(c.region);
  return out;
}

/// Times given as a list, {spacing, count[, start]} or {null_subsequence: {count, horizon[, regions]}}.
std::vector<std::int64_t> parse_times(const GroundSpace& gs, const Params& p, const PoissonEvent& event,
                                      bool& exhausted, ojson& info) {
  const ojson& spec = p.raw("times");
  const std::string w = p.where() + ".times";
  if (spec.is_array()) {
    std::vector<std::int64_t> t;
    for (std::size_t i = 0; i < spec.size(); ++i) t.push_back(parse_integer(spec[i], w));
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (t[i] <= t[i - 1]) fail(w, "times must increase strictly");
    }
    if (t.empty()) fail(w, "empty");
    return t;
  }
  const Params s(spec, w);
  if (s.has("null_subsequence")) {
    const Params q = s.object("null_subsequence");
    const auto count = bounded(q, "count", 1, 100000);
    const auto horizon = bounded(q, "horizon", 1000000, 1, std::int64_t{1} << 40);
    std::vector<Region> regions = event_regions(event);
    if (q.has("regions")) {
      regions.clear();
      const ojson& list = q.raw("regions");
      if (!list.is_array()) fail(q.where() + ".regions", "expected an array");
      for (const auto& reg : list) regions.push_back(parse_region(reg, q.where() + ".regions"));
    }
    q.finish();
    s.finish();
    try {
      auto t = find_null_subsequence(gs, regions, static_cast<std::size_t>(count), horizon);
      info["times_source"] = "null_subsequence";
      return t;
    } catch (const HorizonExhausted& e) {
      exhausted = true;
      info["horizon_exhausted_at"] = e.step();
      return {};
    }
  }
  const auto spacing = bounded(s, "spacing", 1, std::int64_t{1} << 32);
  const auto count = bounded(s, "count", 1, 1000000);
  const auto start = s.integer("start", 0);
  s.finish();
  std::vector<std::int64_t> t(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = start + spacing * static_cast<std::int64_t>(i);
  return t;
}

std::vector<std::size_t> block_sizes_param(const Params& p, std::size_t available) {
  std::vector<std::size_t> out;
  for (auto b : p.integers("block_sizes")) {
    if (b < 1) fail(p.where() + ".block_sizes", "must be positive");
    out.push_back(static_cast<std::size_t>(b));
  }
  if (out.empty()) fail(p.where() + ".block_sizes", "empty");
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] <= out[i - 1]) fail(p.where() + ".block_sizes", "must increase strictly");
  }
  if (available > 0 && out.back() > available) fail(p.where() + ".block_sizes", "exceed the number of times");
  return out;
}

void poisson_op(const Params& sys, const std::string& name, const Params& p, std::uint64_t seed,
                OperationResult& out) {
  const GroundSpace gs = parse_ground(sys);
  sys.finish();
  ojson& r = out.results;
  const std::string w = p.where();
  if (name == "event_probability") {
    const PoissonEvent e = parse_event(p.raw("event"), w + ".event");
    p.finish();
    r["probability"] = number(event_probability(gs, e));
    return;
  }
  if (name == "mixing_gap") {
    const PoissonEvent b = parse_event(p.raw("b"), w + ".b");
    const PoissonEvent c = parse_event(p.raw("c"), w + ".c");
    p.finish();
    const auto m = mixing_gap(gs, b, c);
    r["gap"] = number(m.gap);
    r["bound"] = number(m.bound);
    r["ok"] = m.ok;
    out.failure = !m.ok;
    return;
  }
  if (name == "find_null_subsequence") {
    std::vector<Region> regions;
    const ojson& list = p.raw("regions");
    if (!list.is_array() || list.empty()) fail(w + ".regions", "expected a non-empty array");
    for (const auto& reg : list) regions.push_back(parse_region(reg, w + ".regions"));
    const auto count = bounded(p, "count", 1, 100000);
    const auto horizon = bounded(p, "horizon", 1000000, 1, std::int64_t{1} << 40);
    p.finish();
    try {
      r["times"] = find_null_subsequence(gs, regions, static_cast<std::size_t>(count), horizon);
    } catch (const HorizonExhausted& e) {
      r["horizon_exhausted_at"] = e.step();
      r["error"] = e.what();
      out.failure = true;
    }
    return;
  }
  if (name == "banach_density_filter") {
    const std::string sequence = p.string("sequence", "reciprocal");
    const double scale = p.real("scale", 1.0);
    const double eps = positive(p, "epsilon", 0.1);
    const auto horizon = bounded(p, "horizon", 10000, 1, 10000000);
    p.finish();
    std::function<double(std::int64_t)> a;
    if (sequence == "reciprocal") {
      a = [scale](std::int64_t n) { return scale / static_cast<double>(std::abs(n) + 1); };
    } else if (sequence == "constant") {
      a = [scale](std::int64_t) { return scale; };
    } else {
      fail(w + ".sequence", "must be reciprocal or constant");
    }
    const auto b = banach_density_filter(a, eps, horizon);
    r["members"] = b.members.size();
    r["density"] = number(b.density);
    return;
  }
  if (name == "suspension_indicator") {
    const PoissonEvent e = parse_event(p.raw("event"), w + ".event");
    const auto n = p.integer("n", 0);
    p.finish();
    r["value"] = suspension_indicator(PointSample(gs, seed), e, n);
    return;
  }
  if (name == "subsequence_average_experiment" || name == "theorem11_probe") {
    const PoissonEvent e = parse_event(p.raw("event"), w + ".event");
    bool exhausted = false;
    const auto times = parse_times(gs, p, e, exhausted, r);
    const auto blocks = block_sizes_param(p, times.size());
    const auto seeds = bounded(p, "seeds", 200, 2, 100000);
    const double alpha = name == "theorem11_probe" ? positive(p, "alpha", 0.5) : 0.0;
    p.finish();
    if (exhausted) {
      out.failure = true;
      return;
    }
    const double prob = event_probability(gs, e);
    r["probability"] = number(prob);
    if (name == "theorem11_probe") {
      const TrajectoryFactory traj = [&gs, &e](std::uint64_t s) -> Trajectory {
        return [sample = PointSample(gs, s), &e](std::int64_t n) {
          return static_cast<double>(suspension_indicator(sample, e, n));
        };
      };
      const auto lim = theorem11_probe(traj, times, blocks, alpha, prob, static_cast<std::size_t>(seeds), seed);
      const ojson summary = liminf_json(lim);
      for (const auto& [k, v] : summary.items()) r[k] = v;
      out.failure = !lim.pass;
      return;
    }
    const auto stats = subsequence_average_experiment(gs, e, times, blocks, static_cast<std::size_t>(seeds), seed);
    double log_c = 0.0;
    for (const auto& s : stats) log_c += std::log(static_cast<double>(s.n) * s.variance);
    const double c = std::exp(log_c / static_cast<double>(stats.size()));
    bool within = true;
    ojson rows = ojson::array();
    for (const auto& s : stats) {
      const double ratio = s.variance * static_cast<double>(s.n) / c;
      within = within && ratio >= 0.5 && ratio <= 2.0;
      rows.push_back({{"n", s.n},
                      {"mean", number(s.mean)},
                      {"variance", number(s.variance)},
                      {"independent_variance", number(prob * (1.0 - prob) / static_cast<double>(s.n))},
                      {"fit_ratio", number(ratio)}});
    }
    r["blocks"] = std::move(rows);
    r["fitted_constant"] = number(c);
    r["within_factor_two"] = within;
    out.failure = !within;
    return;
  }
  if (name == "weak_mixing_probe") {
    const EventCombination f = parse_combination(p.raw("f"), w + ".f");
    const EventCombination g = parse_combination(p.raw("g"), w + ".g");
    PoissonEvent joint;
    for (const auto& [coef, ev] : f.terms) joint = joint & ev;
    bool exhausted = false;
    const auto times = parse_times(gs, p, joint, exhausted, r);
    const auto seeds = bounded(p, "seeds", 200, 2, 100000);
    p.finish();
    if (exhausted) {
      out.failure = true;
      return;
    }
    const auto pts = weak_mixing_probe(gs, f, g, times, static_cast<std::size_t>(seeds), seed);
    ojson rows = ojson::array();
    std::size_t outside = 0;
    for (const auto& c : pts) {
      outside += c.within_interval ? 0 : 1;
      rows.push_back({{"time", c.time},
                      {"estimate", number(c.estimate)},
                      {"standard_error", number(c.standard_error)},
                      {"limit", number(c.limit)},
                      {"within_interval", c.within_interval}});
    }
    r["points"] = std::move(rows);
    r["outside_interval"] = outside;
    return;
  }
  fail(w, "unknown Poisson operation \"" + name + "\"");
}

Site site_param(const ojson& v, const std::string& where, int dim) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim) fail(where, "expected " + std::to_string(dim) + " coordinates");
  Site s{0, 0, 0};
  for (int k = 0; k < dim; ++k) s[static_cast<std::size_t>(k)] = parse_integer(v[static_cast<std::size_t>(k)], where);
  return s;
}

void zd_op(const Params& sys, const std::string& name, const Params& p, std::uint64_t seed, OperationResult& out) {
  const LatticeFamily fam = parse_lattice(sys);
  sys.finish();
  const int dim = fam.dimension();
  ojson& r = out.results;
  const std::string w = p.where();
  if (name == "kakutani_sum_generator") {
    const auto axis = bounded(p, "axis", 0, 0, dim - 1);
    const Coord horizon = bounded(p, "horizon", 100, 1, 1000000);
    p.finish();
    const auto k = kakutani_sum_generator(fam, static_cast<int>(axis), horizon);
    r["value"] = number(k.value);
    r["tail_bound"] = number(k.tail_bound);
    r["verdict"] = std::string(to_string(k.verdict));
    return;
  }
  if (name == "rn_derivative_g") {
    const Site g = site_param(p.raw("g"), w + ".g", dim);
    p.finish();
    r["log_rn"] = to_json(rn_derivative_g(fam, LatticeConfiguration(fam, seed), g));
    return;
  }
  if (name == "uniformity_constant") {
    p.finish();
    r["value"] = number(fam.uniformity_constant());
    return;
  }
  if (name == "cocycle_fuzz") {
    const auto cases = bounded(p, "cases", 1000, 1, 100000);
    const Coord max_shift = bounded(p, "max_shift", 5, 0, 1000);
    const double tol = positive(p, "tol", 1e-9);
    p.finish();
    const auto span = static_cast<std::uint64_t>(2 * max_shift + 1);
    std::int64_t failures = 0;
    double worst = 0.0;
    for (std::int64_t i = 0; i < cases; ++i) {
      CounterStream st(derive_seed(seed, static_cast<std::uint64_t>(i)));
      const LatticeConfiguration x(fam, st.next_bits());
      Site g{0, 0, 0}, h{0, 0, 0};
      for (int k = 0; k < dim; ++k) {
        g[static_cast<std::size_t>(k)] = static_cast<Coord>(st.next_bits() % span) - max_shift;
        h[static_cast<std::size_t>(k)] = static_cast<Coord>(st.next_bits() % span) - max_shift;
      }
      const double a = rn_derivative_g(fam, x, g + h).log_magnitude;
      const double b = rn_derivative_g(fam, x, h).log_magnitude + rn_derivative_g(fam, translate(x, h), g).log_magnitude;
      const double defect = std::abs(a - b);
      worst = std::max(worst, defect);
      if (defect > tol) ++failures;
    }
    r["cases"] = cases;
    r["failures"] = failures;
    r["max_defect"] = number(worst);
    out.failure = failures > 0;
    return;
  }
  if (name == "box_ratio_average") {
    const ojson& pattern = p.raw("pattern");
    if (!pattern.is_array() || pattern.empty()) fail(w + ".pattern", "expected a non-empty array");
    std::map<Site, Symbol> pat;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      const std::string wi = w + ".pattern[" + std::to_string(i) + "]";
      const Params e(pattern[i], wi);
      const Site s = site_param(e.raw("site"), wi + ".site", dim);
      const auto sym = e.integer("symbol");
      if (!fam.alphabet().contains(static_cast<Symbol>(sym))) fail(wi + ".symbol", "not in the alphabet");
      pat[s] = static_cast<Symbol>(sym);
      e.finish();
    }
    const Coord n_max = bounded(p, "n_max", 16, 1, dim == 1 ? 100000 : dim == 2 ? 256 : 32);
    p.finish();
    SumSeries s = box_ratio_average(fam, LatticeObservable::indicator(pat), LatticeConfiguration(fam, seed), n_max);
    r["series"] = to_json(s);
    out.series.emplace_back("box_ratio_average", std::move(s));
    return;
  }
  fail(w, "unknown zd operation \"" + name + "\"");
}

}  // namespace

OperationResult run_operation(const ojson& system, const ojson& operation, std::uint64_t seed) {
  const Params sys(system, "config.system");
  sys.ignore("type");
  const std::string type = system.at("type").get<std::string>();
  const std::string name = operation.at("name").get<std::string>();
  static const ojson kEmpty = ojson::object();
  const ojson& params = operation.contains("params") ? operation.at("params") : kEmpty;
  if (!params.is_object()) fail("config.operation.params", "expected an object");
  const Params p(params, "config.operation.params");
  OperationResult out;
  if (type == "bernoulli") bernoulli_op(sys, name, p, seed, out);
  else if (type == "markov") markov_op(sys, name, p, seed, out);
  else if (type == "poisson") poisson_op(sys, name, p, seed, out);
  else zd_op(sys, name, p, seed, out);
  return out;
}

}  // namespace nsdyn::runner::detail
