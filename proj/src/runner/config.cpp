#include <cerrno>
#include <cmath>
#include <cstdlib>

#include "internal.hpp"

namespace nsdyn::runner {

namespace detail {

void fail(const std::string& where, const std::string& message) { throw ValidationError(where + ": " + message); }

Params::Params(const ojson& object, std::string where) : object_(&object), where_(std::move(where)) {
  if (!object.is_object()) fail(where_, "expected an object");
}

bool Params::has(const std::string& key) const {
  used_.insert(key);
  return object_->contains(key);
}

const ojson& Params::raw(const std::string& key) const {
  used_.insert(key);
  auto it = object_->find(key);
  if (it == object_->end()) fail(where_, "missing field \"" + key + "\"");
  return *it;
}

double Params::real(const std::string& key) const { return parse_real(raw(key), where_ + "." + key); }

double Params::real(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }

std::int64_t Params::integer(const std::string& key) const { return parse_integer(raw(key), where_ + "." + key); }

std::int64_t Params::integer(const std::string& key, std::int64_t fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::string Params::string(const std::string& key) const {
  const ojson& v = raw(key);
  if (!v.is_string()) fail(where_ + "." + key, "expected a string");
  return v.get<std::string>();
}

std::string Params::string(const std::string& key, const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

bool Params::boolean(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const ojson& v = raw(key);
  if (!v.is_boolean()) fail(where_ + "." + key, "expected true or false");
  return v.get<bool>();
}

std::vector<double> Params::reals(const std::string& key) const { return parse_reals(raw(key), where_ + "." + key); }

std::vector<std::int64_t> Params::integers(const std::string& key) const {
  const ojson& v = raw(key);
  if (!v.is_array()) fail(where_ + "." + key, "expected an array of integers");
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(parse_integer(v[i], where_ + "." + key + "[" + std::to_string(i) + "]"));
  return out;
}

Params Params::object(const std::string& key) const { return Params(raw(key), where_ + "." + key); }

void Params::finish() const {
  for (const auto& item : object_->items()) {
    if (!used_.count(item.key())) fail(where_, "unknown field \"" + item.key() + "\"");
  }
}

namespace {

double parse_decimal(const std::string& text, const std::string& where) {
  if (text.empty()) fail(where, "empty number");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (errno != 0 || end != text.c_str() + text.size()) fail(where, "\"" + text + "\" is not a decimal number");
  return v;
}

}  // namespace

double parse_real(const ojson& value, const std::string& where) {
  double v = 0.0;
  if (value.is_number()) {
    v = value.get<double>();
  } else if (value.is_string()) {
    const std::string text = value.get<std::string>();
    // "p/q" is accepted alongside plain decimals.
    if (const auto slash = text.find('/'); slash != std::string::npos) {
      const double num = parse_decimal(text.substr(0, slash), where);
      const double den = parse_decimal(text.substr(slash + 1), where);
      if (den == 0.0) fail(where, "zero denominator");
      v = num / den;
    } else {
      v = parse_decimal(text, where);
    }
  } else {
    fail(where, "expected a number or a decimal string");
  }
  if (!std::isfinite(v)) fail(where, "number must be finite");
  return v;
}

std::int64_t parse_integer(const ojson& value, const std::string& where) {
  if (value.is_number_integer()) return value.get<std::int64_t>();
  if (value.is_string()) {
    const std::string text = value.get<std::string>();
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (!text.empty() && errno == 0 && end == text.c_str() + text.size()) return v;
  }
  fail(where, "expected an integer");
}

std::vector<double> parse_reals(const ojson& value, const std::string& where) {
  if (!value.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(parse_real(value[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

SiteMeasure parse_site_measure(const ojson& value, const std::string& where) {
  try {
    return SiteMeasure(parse_reals(value, where));
  } catch (const ValidationError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

namespace {

std::vector<SiteMeasure> parse_measures(const ojson& value, const std::string& where) {
  if (!value.is_array()) fail(where, "expected an array of measures");
  std::vector<SiteMeasure> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(parse_site_measure(value[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<Symbol> parse_word(const ojson& value, const std::string& where) {
  if (!value.is_array()) fail(where, "expected an array of symbols");
  std::vector<Symbol> word;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const auto s = parse_integer(value[i], where + "[" + std::to_string(i) + "]");
    if (s < 1 || s > 1 << 20) fail(where, "symbols are positive integers");
    word.push_back(static_cast<Symbol>(s));
  }
  return word;
}

Eigen::MatrixXd parse_matrix(const ojson& value, const std::string& where) {
  if (!value.is_array() || value.empty()) fail(where, "expected a non-empty matrix");
  const auto rows = static_cast<Eigen::Index>(value.size());
  Eigen::MatrixXd m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto row = parse_reals(value[static_cast<std::size_t>(i)], where + "[" + std::to_string(i) + "]");
    if (i == 0) m.resize(rows, static_cast<Eigen::Index>(row.size()));
    if (static_cast<Eigen::Index>(row.size()) != m.cols()) fail(where, "rows of different length");
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = row[static_cast<std::size_t>(j)];
  }
  return m;
}

template <class F>
auto wrap(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

}  // namespace

Cylinder parse_cylinder(const ojson& value, const std::string& where) {
  Params p(value, where);
  std::vector<Symbol> word = parse_word(p.raw("word"), where + ".word");
  Coord left = 0;
  if (p.has("left")) {
    left = p.integer("left");
  } else {
    if (word.size() % 2 == 0) fail(where, "symmetric cylinders need an odd word length");
    left = -static_cast<Coord>(word.size() / 2);
  }
  p.finish();
  return Cylinder(left, std::move(word));
}

Region parse_region(const ojson& value, const std::string& where) {
  if (value.is_array()) {
    std::vector<Point> points;
    for (std::size_t i = 0; i < value.size(); ++i) points.push_back(parse_integer(value[i], where + "[" + std::to_string(i) + "]"));
    return make_region(std::move(points));
  }
  Params p(value, where);
  const Point lo = p.integer("lo");
  const Point hi = p.integer("hi");
  p.finish();
  if (hi - lo > (1 << 20)) fail(where, "region too large");
  return interval(lo, hi);
}

PoissonEvent parse_event(const ojson& value, const std::string& where) {
  if (!value.is_array()) fail(where, "expected an array of constraints");
  PoissonEvent e;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    Params p(value[i], w);
    Constraint c;
    c.region = parse_region(p.raw("region"), w + ".region");
    const auto count = p.integer("count");
    if (count < 0 || count > kEventCountCap) fail(w, "count must lie in [0, 64]");
    c.count = static_cast<int>(count);
    p.finish();
    e.constraints.push_back(std::move(c));
  }
  return e;
}

EventCombination parse_combination(const ojson& value, const std::string& where) {
  Params p(value, where);
  EventCombination f;
  f.constant = p.real("constant", 0.0);
  if (p.has("terms")) {
    const ojson& terms = p.raw("terms");
    if (!terms.is_array()) fail(where + ".terms", "expected an array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string w = where + ".terms[" + std::to_string(i) + "]";
      Params t(terms[i], w);
      const double a = t.real("coefficient");
      PoissonEvent e = parse_event(t.raw("event"), w + ".event");
      t.finish();
      f.terms.emplace_back(a, std::move(e));
    }
  }
  p.finish();
  return f;
}

BernoulliFamily parse_bernoulli(const Params& s) {
  const std::string kind = s.string("kind", "iid");
  const std::string& w = s.where();
  if (kind == "iid") return BernoulliFamily::iid(parse_site_measure(s.raw("base"), w + ".base"));
  if (kind == "compact") {
    SiteMeasure base = parse_site_measure(s.raw("base"), w + ".base");
    const Coord start = s.integer("window_start", 0);
    auto window = parse_measures(s.raw("window"), w + ".window");
    return wrap(w, [&] { return BernoulliFamily::compactly_perturbed(base, start, window); });
  }
  if (kind == "mixture") {
    SiteMeasure base = parse_site_measure(s.raw("base"), w + ".base");
    SiteMeasure alt = parse_site_measure(s.raw("alternative"), w + ".alternative");
    const double amplitude = s.real("amplitude");
    const double ratio = s.real("ratio");
    return wrap(w, [&] { return BernoulliFamily::geometric_mixture(base, alt, amplitude, ratio); });
  }
  if (kind == "periodic") {
    auto period = parse_measures(s.raw("period"), w + ".period");
    const Coord phase = s.integer("phase", 0);
    return wrap(w, [&] { return BernoulliFamily::periodic(period, phase); });
  }
  fail(w + ".kind", "unknown Bernoulli kind \"" + kind + "\"");
}

MarkovFamily parse_markov(const Params& s) {
  const std::string& w = s.where();
  const ojson& sft_spec = s.raw("sft");
  std::optional<Sft> sft;
  if (sft_spec.is_string()) {
    const std::string name = sft_spec.get<std::string>();
    if (name == "golden_mean") {
      sft = Sft::golden_mean();
    } else if (name == "full") {
      const auto states = s.integer("states");
      if (states < 2 || states > 16) fail(w + ".states", "must lie in [2, 16]");
      sft = Sft::full(static_cast<int>(states));
    } else {
      fail(w + ".sft", "unknown SFT \"" + name + "\"");
    }
  } else {
    const Eigen::MatrixXd a = parse_matrix(sft_spec, w + ".sft");
    if ((a.array() != a.array().round()).any()) fail(w + ".sft", "adjacency entries must be integers");
    sft = wrap(w + ".sft", [&] { return Sft(a.cast<int>()); });
  }
  Eigen::MatrixXd p = parse_matrix(s.raw("transition"), w + ".transition");
  std::optional<Eigen::RowVectorXd> pi;
  if (s.has("stationary")) {
    const auto v = s.reals("stationary");
    pi = Eigen::Map<const Eigen::RowVectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  const Coord start = s.integer("window_start", 0);
  std::vector<Eigen::MatrixXd> window;
  if (s.has("window")) {
    const ojson& ws = s.raw("window");
    if (!ws.is_array()) fail(w + ".window", "expected an array of matrices");
    for (std::size_t i = 0; i < ws.size(); ++i) window.push_back(parse_matrix(ws[i], w + ".window[" + std::to_string(i) + "]"));
  }
  return wrap(w, [&] {
    if (p.rows() != p.cols()) throw std::invalid_argument("transition must be square");
    Eigen::RowVectorXd stationary = pi ? *pi : stationary_distribution(p);
    return MarkovFamily(*sft, p, stationary, start, window);
  });
}

GroundSpace parse_ground(const Params& s) {
  const std::string& w = s.where();
  const std::string kind = s.string("ground", "translation");
  if (kind == "translation") {
    const double weight = s.real("weight", 1.0);
    const Point step = s.integer("step", 1);
    return wrap(w, [&] { return GroundSpace::integer_translation(weight, step); });
  }
  if (kind == "cyclic") {
    const Point size = s.integer("size");
    const Point rotation = s.integer("rotation", 1);
    const double weight = s.real("weight", 1.0);
    if (size > (1 << 20)) fail(w + ".size", "too large");
    return wrap(w, [&] { return GroundSpace::cyclic(size, rotation, weight); });
  }
  if (kind == "finite") {
    auto weights = s.reals("weights");
    auto perm = s.integers("permutation");
    return wrap(w, [&] { return GroundSpace::finite(weights, perm); });
  }
  fail(w + ".ground", "unknown ground space \"" + kind + "\"");
}

LatticeFamily parse_lattice(const Params& s) {
  const std::string& w = s.where();
  const auto d = s.integer("dimension");
  if (d < 1 || d > 3) fail(w + ".dimension", "must be 1, 2 or 3");
  const int dim = static_cast<int>(d);
  const std::string kind = s.string("kind", "iid");
  if (kind == "iid") return LatticeFamily::iid(dim, parse_site_measure(s.raw("base"), w + ".base"));
  if (kind == "compact") {
    SiteMeasure base = parse_site_measure(s.raw("base"), w + ".base");
    std::map<Site, SiteMeasure> perturbed;
    const ojson& list = s.raw("perturbed");
    if (!list.is_array()) fail(w + ".perturbed", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string wi = w + ".perturbed[" + std::to_string(i) + "]";
      Params p(list[i], wi);
      const auto site = p.integers("site");
      if (static_cast<int>(site.size()) != dim) fail(wi + ".site", "wrong number of coordinates");
      Site h{0, 0, 0};
      for (int k = 0; k < dim; ++k) h[k] = site[k];
      perturbed.insert_or_assign(h, parse_site_measure(p.raw("measure"), wi + ".measure"));
      p.finish();
    }
    return wrap(w, [&] { return LatticeFamily::compactly_perturbed(dim, base, perturbed); });
  }
  if (kind == "periodic") {
    const auto axis = s.integer("axis");
    auto period = parse_measures(s.raw("period"), w + ".period");
    return wrap(w, [&] { return LatticeFamily::periodic(dim, static_cast<int>(axis), period); });
  }
  fail(w + ".kind", "unknown lattice kind \"" + kind + "\"");
}

}  // namespace detail

ExperimentConfig parse_config(const nlohmann::ordered_json& config, std::optional<std::uint64_t> seed_override) {
  using detail::fail;
  detail::Params top(config, "config");
  if (!top.has("schema") || top.raw("schema") != "v1") fail("config.schema", "must be \"v1\"");
  top.ignore("description");
  ExperimentConfig cfg;
  cfg.raw = config;
  if (top.has("seed")) {
    const auto& v = top.raw("seed");
    if (v.is_number_unsigned()) {
      cfg.seed = v.get<std::uint64_t>();
    } else if (v.is_string()) {
      const std::string text = v.get<std::string>();
      errno = 0;
      char* end = nullptr;
      cfg.seed = std::strtoull(text.c_str(), &end, 10);
      if (text.empty() || errno != 0 || end != text.c_str() + text.size() || text[0] == '-') {
        fail("config.seed", "expected an unsigned 64-bit integer");
      }
    } else {
      fail("config.seed", "expected an unsigned 64-bit integer");
    }
  }
  if (seed_override) cfg.seed = *seed_override;
  cfg.raw["seed"] = cfg.seed;

  const detail::Params system = top.object("system");
  system.ignore("type");
  if (!system.has("type") || !system.raw("type").is_string()) fail("config.system.type", "missing system type");
  const std::string type = system.raw("type").get<std::string>();
  if (type != "bernoulli" && type != "markov" && type != "poisson" && type != "zd") {
    fail("config.system.type", "unknown system \"" + type + "\"");
  }
  const detail::Params op = top.object("operation");
  if (!op.has("name") || !op.raw("name").is_string()) fail("config.operation.name", "missing operation name");
  op.ignore("params");
  op.finish();
  if (top.has("output")) {
    const detail::Params out = top.object("output");
    if (out.has("dir")) cfg.out_dir = out.string("dir");
    cfg.format = out.string("format", "json");
    out.finish();
  }
  if (cfg.format != "json" && cfg.format != "csv") fail("config.output.format", "must be csv or json");
  if (top.has("repeat")) {
    const auto r = top.integer("repeat");
    if (r < 1 || r > 10) fail("config.repeat", "must lie in [1, 10]");
    cfg.repeat = static_cast<int>(r);
  }
  top.finish();
  return cfg;
}

}  // namespace nsdyn::runner
