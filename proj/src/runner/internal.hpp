#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsdyn/bernoulli.hpp"
#include "nsdyn/ergodic.hpp"
#include "nsdyn/lattice.hpp"
#include "nsdyn/markov.hpp"
#include "nsdyn/poisson.hpp"
#include "nsdyn/runner.hpp"

namespace nsdyn::runner::detail {

using ojson = nlohmann::ordered_json;

/// Typed access to one config object; every key must be read before finish().
class Params {
 public:
  Params(const ojson& object, std::string where);

  const std::string& where() const { return where_; }
  bool has(const std::string& key) const;
  const ojson& raw(const std::string& key) const;

  double real(const std::string& key) const;
  double real(const std::string& key, double fallback) const;
  std::int64_t integer(const std::string& key) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  std::string string(const std::string& key) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<std::int64_t> integers(const std::string& key) const;
  Params object(const std::string& key) const;

  /// Marks a key as consumed without reading it.
  void ignore(const std::string& key) const { used_.insert(key); }
  /// Throws ValidationError naming the first unknown key.
  void finish() const;

 private:
  const ojson* object_;
  std::string where_;
  mutable std::set<std::string> used_;
};

[[noreturn]] void fail(const std::string& where, const std::string& message);

double parse_real(const ojson& value, const std::string& where);
std::int64_t parse_integer(const ojson& value, const std::string& where);
std::vector<double> parse_reals(const ojson& value, const std::string& where);

SiteMeasure parse_site_measure(const ojson& value, const std::string& where);
Cylinder parse_cylinder(const ojson& value, const std::string& where);
Region parse_region(const ojson& value, const std::string& where);
PoissonEvent parse_event(const ojson& value, const std::string& where);
EventCombination parse_combination(const ojson& value, const std::string& where);

BernoulliFamily parse_bernoulli(const Params& system);
MarkovFamily parse_markov(const Params& system);
GroundSpace parse_ground(const Params& system);
LatticeFamily parse_lattice(const Params& system);

struct OperationResult {
  ojson results = ojson::object();
  std::vector<std::pair<std::string, SumSeries>> series;
  bool failure = false;
};

/// Builds the system and runs the named operation. All parameters are
/// validated before any computation starts.
OperationResult run_operation(const ojson& system, const ojson& operation, std::uint64_t seed);

/// Finite doubles as numbers, others as "inf", "-inf" or "nan".
ojson number(double v);
ojson to_json(const Cylinder& c);
ojson to_json(const SumSeries& s);
ojson to_json(const LogValue& v);

}  // namespace nsdyn::runner::detail
