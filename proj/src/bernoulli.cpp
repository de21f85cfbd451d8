#include "nsdyn/bernoulli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nsdyn {

SiteMeasure::SiteMeasure(std::vector<double> probabilities) : p_(std::move(probabilities)) {
  if (p_.size() < 2) throw std::invalid_argument("site measure needs at least two symbols");
  double total = 0.0;
  for (double q : p_) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("site probabilities must lie in (0,1)");
    total += q;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw std::invalid_argument("site probabilities must sum to 1");
  log_p_.reserve(p_.size());
  for (double q : p_) log_p_.push_back(std::log(q));
  max_ = *std::max_element(p_.begin(), p_.end());
  min_ = *std::min_element(p_.begin(), p_.end());
}

SiteMeasure SiteMeasure::uniform(int size) {
  if (size < 2) throw std::invalid_argument("site measure needs at least two symbols");
  return SiteMeasure(std::vector<double>(static_cast<std::size_t>(size), 1.0 / size));
}

Symbol SiteMeasure::draw(double u) const {
  double cdf = 0.0;
  for (std::size_t j = 0; j + 1 < p_.size(); ++j) {
    cdf += p_[j];
    if (u < cdf) return static_cast<Symbol>(j + 1);
  }
  return static_cast<Symbol>(p_.size());
}

double hellinger_term(const SiteMeasure& a, const SiteMeasure& b) {
  if (a.size() != b.size()) throw std::invalid_argument("site measures over different alphabets");
  double sum = 0.0;
  for (Symbol s = 1; s <= a.size(); ++s) {
    const double d = std::sqrt(a(s)) - std::sqrt(b(s));
    sum += d * d;
  }
  return sum;
}

TailMajorant TailMajorant::geometric(double scale, double ratio) {
  if (!(scale >= 0.0) || !(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("geometric majorant needs scale >= 0 and ratio in (0,1)");
  }
  TailMajorant m;
  m.term = [scale, ratio](Coord k) { return scale * std::pow(ratio, static_cast<double>(k < 0 ? -k : k)); };
  m.tail = [scale, ratio](Coord h) {
    if (h <= 0) return scale * (1.0 + ratio) / (1.0 - ratio);
    return 2.0 * scale * std::pow(ratio, static_cast<double>(h)) / (1.0 - ratio);
  };
  return m;
}

struct BernoulliFamily::Impl {
  Impl(Kind k, SiteMeasure b) : kind(k), base(std::move(b)) {}

  Kind kind;
  SiteMeasure base;
  Coord start = 0;
  // Perturbation window (compactly perturbed) or one period (periodic).
  std::vector<SiteMeasure> measures;
  std::function<SiteMeasure(Coord)> rule;
  TailMajorant majorant;
};

BernoulliFamily::BernoulliFamily(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

BernoulliFamily BernoulliFamily::iid(SiteMeasure base) {
  return BernoulliFamily(std::make_shared<const Impl>(Impl{Kind::iid, std::move(base)}));
}

BernoulliFamily BernoulliFamily::compactly_perturbed(SiteMeasure base, Coord start, std::vector<SiteMeasure> window) {
  for (const auto& m : window) {
    if (m.size() != base.size()) throw std::invalid_argument("window measure alphabet differs from base");
  }
  if (window.empty()) return iid(std::move(base));
  Impl impl{Kind::compactly_perturbed, std::move(base)};
  impl.start = start;
  impl.measures = std::move(window);
  return BernoulliFamily(std::make_shared<const Impl>(std::move(impl)));
}

BernoulliFamily BernoulliFamily::summable(SiteMeasure base, std::function<SiteMeasure(Coord)> rule,
                                          TailMajorant majorant) {
  if (!rule || !majorant.term || !majorant.tail) throw std::invalid_argument("summable family needs rule and majorant");
  for (Coord k = -256; k <= 256; ++k) {
    const SiteMeasure m = rule(k);
    if (m.size() != base.size()) throw std::invalid_argument("rule alphabet differs from base");
    double deviation = 0.0;
    for (Symbol s = 1; s <= base.size(); ++s) deviation = std::max(deviation, std::fabs(m.log_prob(s) - base.log_prob(s)));
    if (deviation > majorant.term(k) + 1e-12) {
      throw std::invalid_argument("majorant violated at site " + std::to_string(k));
    }
  }
  Impl impl{Kind::summable, std::move(base)};
  impl.rule = std::move(rule);
  impl.majorant = std::move(majorant);
  return BernoulliFamily(std::make_shared<const Impl>(std::move(impl)));
}

BernoulliFamily BernoulliFamily::geometric_mixture(SiteMeasure base, const SiteMeasure& alternative, double amplitude,
                                                   double ratio) {
  if (alternative.size() != base.size()) throw std::invalid_argument("alternative alphabet differs from base");
  if (!(amplitude > 0.0 && amplitude <= 1.0)) throw std::invalid_argument("amplitude must lie in (0,1]");
  double c = 0.0;
  for (Symbol s = 1; s <= base.size(); ++s) c = std::max(c, std::fabs(alternative(s) / base(s) - 1.0));
  if (amplitude * c >= 1.0) throw std::invalid_argument("mixture amplitude too large for a log majorant");
  // |log(1+z)| <= |z| / (1 - |z|) with |z| <= e_k c.
  const double scale = amplitude * c / (1.0 - amplitude * c);
  auto rule = [base, alternative, amplitude, ratio](Coord k) {
    const double e = amplitude * std::pow(ratio, static_cast<double>(k < 0 ? -k : k));
    std::vector<double> p(static_cast<std::size_t>(base.size()));
    for (Symbol s = 1; s <= base.size(); ++s) p[static_cast<std::size_t>(s - 1)] = (1.0 - e) * base(s) + e * alternative(s);
    return SiteMeasure(std::move(p));
  };
  return summable(base, std::move(rule), TailMajorant::geometric(scale, ratio));
}

BernoulliFamily BernoulliFamily::periodic(std::vector<SiteMeasure> period, Coord phase) {
  if (period.empty()) throw std::invalid_argument("periodic family needs at least one measure");
  for (const auto& m : period) {
    if (m.size() != period.front().size()) throw std::invalid_argument("period measures over different alphabets");
  }
  Impl impl{Kind::periodic, period.front()};
  impl.start = phase;
  impl.measures = std::move(period);
  return BernoulliFamily(std::make_shared<const Impl>(std::move(impl)));
}

BernoulliFamily::Kind BernoulliFamily::kind() const { return impl_->kind; }
Alphabet BernoulliFamily::alphabet() const { return Alphabet(impl_->base.size()); }
const SiteMeasure& BernoulliFamily::base() const { return impl_->base; }

namespace {

Coord floor_mod(Coord a, Coord m) {
  const Coord r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

SiteMeasure BernoulliFamily::at(Coord k) const {
  const Impl& f = *impl_;
  switch (f.kind) {
    case Kind::iid: return f.base;
    case Kind::compactly_perturbed: {
      const Coord i = k - f.start;
      if (i >= 0 && i < static_cast<Coord>(f.measures.size())) return f.measures[static_cast<std::size_t>(i)];
      return f.base;
    }
    case Kind::summable: return f.rule(k);
    case Kind::periodic:
      return f.measures[static_cast<std::size_t>(floor_mod(k - f.start, static_cast<Coord>(f.measures.size())))];
  }
  return f.base;
}

double BernoulliFamily::log_prob(Coord k, Symbol s) const {
  const Impl& f = *impl_;
  switch (f.kind) {
    case Kind::iid: return f.base.log_prob(s);
    case Kind::compactly_perturbed: {
      const Coord i = k - f.start;
      if (i >= 0 && i < static_cast<Coord>(f.measures.size())) return f.measures[static_cast<std::size_t>(i)].log_prob(s);
      return f.base.log_prob(s);
    }
    case Kind::summable: return f.rule(k).log_prob(s);
    case Kind::periodic:
      return f.measures[static_cast<std::size_t>(floor_mod(k - f.start, static_cast<Coord>(f.measures.size())))]
          .log_prob(s);
  }
  return f.base.log_prob(s);
}

std::optional<std::pair<Coord, Coord>> BernoulliFamily::perturbation_window() const {
  if (impl_->kind != Kind::compactly_perturbed) return std::nullopt;
  return std::pair{impl_->start, impl_->start + static_cast<Coord>(impl_->measures.size()) - 1};
}

Coord BernoulliFamily::perturbation_radius() const {
  const auto w = perturbation_window();
  if (!w) return 0;
  return std::max(std::abs(w->first), std::abs(w->second));
}

const std::vector<SiteMeasure>& BernoulliFamily::period() const { return impl_->measures; }
const TailMajorant& BernoulliFamily::majorant() const { return impl_->majorant; }

BernoulliFamily BernoulliFamily::reindexed(Coord shift) const {
  Impl copy = *impl_;
  switch (copy.kind) {
    case Kind::iid: break;
    case Kind::compactly_perturbed:
    case Kind::periodic: copy.start += shift; break;
    case Kind::summable: {
      auto rule = impl_->rule;
      auto term = impl_->majorant.term;
      auto tail = impl_->majorant.tail;
      const Coord a = std::abs(shift);
      copy.rule = [rule, shift](Coord k) { return rule(k - shift); };
      copy.majorant.term = [term, shift](Coord k) { return term(k - shift); };
      // |k - shift| >= |k| - |shift|.
      copy.majorant.tail = [tail, a](Coord h) { return tail(h > a ? h - a : 0); };
      break;
    }
  }
  return BernoulliFamily(std::make_shared<const Impl>(std::move(copy)));
}

bool BernoulliFamily::nonsingular() const {
  if (impl_->kind != Kind::periodic) return true;
  return std::all_of(impl_->measures.begin(), impl_->measures.end(),
                     [&](const SiteMeasure& m) { return m == impl_->measures.front(); });
}

namespace {

class BernoulliSampler final : public SiteSampler {
 public:
  explicit BernoulliSampler(BernoulliFamily family) : family_(std::move(family)) {}

  bool independent() const override { return true; }
  Symbol draw_anchor(Coord k, double u) const override { return family_.at(k).draw(u); }
  Symbol draw_after(Coord k, Symbol, double u) const override { return draw_anchor(k, u); }
  Symbol draw_before(Coord k, Symbol, double u) const override { return draw_anchor(k, u); }

 private:
  BernoulliFamily family_;
};

// Visits every k in [lo1,hi1] U [lo2,hi2] once, in increasing order.
template <class F>
void for_each_in_union(Coord lo1, Coord hi1, Coord lo2, Coord hi2, F&& f) {
  if (lo2 < lo1) {
    std::swap(lo1, lo2);
    std::swap(hi1, hi2);
  }
  if (lo2 <= hi1 + 1) {
    for (Coord k = lo1; k <= std::max(hi1, hi2); ++k) f(k);
    return;
  }
  for (Coord k = lo1; k <= hi1; ++k) f(k);
  for (Coord k = lo2; k <= hi2; ++k) f(k);
}

void check_coordinate(Coord n, Coord cap) {
  if (n > cap || n < -cap) throw std::length_error("shift exponent exceeds coordinate cap");
}

}  // namespace

std::shared_ptr<const SiteSampler> BernoulliFamily::sampler() const {
  return std::make_shared<BernoulliSampler>(*this);
}

Configuration BernoulliFamily::sample(std::uint64_t seed, Coord cap) const {
  return Configuration(sampler(), seed, cap);
}

KakutaniResult kakutani_sum(const BernoulliFamily& family, Coord horizon, double tol) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  check_coordinate(horizon, kDefaultCoordinateCap);
  using Kind = BernoulliFamily::Kind;
  KakutaniResult r;
  auto term = [&](Coord k) { return hellinger_term(family.at(k), family.at(k - 1)); };
  switch (family.kind()) {
    case Kind::iid:
      r.verdict = Verdict::convergent_certified;
      return r;
    case Kind::compactly_perturbed: {
      // Nonzero terms need mu_k or mu_{k-1} in the window: k in [lo, hi+1].
      const auto [lo, hi] = *family.perturbation_window();
      for (Coord k = lo; k <= hi + 1; ++k) {
        const double t = term(k);
        if (k >= -horizon && k <= horizon) {
          r.value += t;
        } else {
          r.tail_bound += t;
        }
      }
      r.verdict = Verdict::convergent_certified;
      return r;
    }
    case Kind::summable: {
      for (Coord k = -horizon; k <= horizon; ++k) r.value += term(k);
      // Each omitted term is at most (e^{s_k/2} - 1)^2 <= s_k^2 e^{s_k} / 4 with
      // s_k = t_k + t_{k-1}, and Sum s_k over the omitted sites is <= 2 tail(horizon).
      const double s = 2.0 * family.majorant().tail(horizon);
      r.tail_bound = 0.25 * s * s * std::exp(s);
      r.verdict = r.tail_bound <= tol ? Verdict::convergent_certified : Verdict::inconclusive;
      return r;
    }
    case Kind::periodic: {
      const Coord p = static_cast<Coord>(family.period().size());
      double per_period = 0.0;
      for (Coord k = 0; k < p; ++k) per_period = std::max(per_period, term(k));
      for (Coord k = -horizon; k <= horizon; ++k) r.value += term(k);
      if (per_period > 0.0) {
        r.tail_bound = std::numeric_limits<double>::infinity();
        r.verdict = Verdict::divergent_certified;
      } else {
        r.verdict = Verdict::convergent_certified;
      }
      return r;
    }
  }
  return r;
}

LogValue rn_derivative(const BernoulliFamily& family, const Configuration& x, Coord n, double tol) {
  check_coordinate(n, x.cap());
  using Kind = BernoulliFamily::Kind;
  if (n == 0) return {};
  if (family.kind() == Kind::periodic) {
    // T^n preserves the product measure when n is a period of (mu_k), and is
    // singular to it otherwise (every per-site term repeats forever).
    const Coord p = static_cast<Coord>(family.period().size());
    for (Coord k = 0; k < p; ++k) {
      if (!(family.at(k) == family.at(k - n))) throw std::domain_error("shift is singular for this family");
    }
    return {};
  }
  LogValue out;
  auto add = [&](Coord k) {
    const Symbol s = x.at(k);
    out.log_magnitude += family.log_prob(k - n, s) - family.log_prob(k, s);
  };
  switch (family.kind()) {
    case Kind::iid:
    case Kind::periodic: return out;
    case Kind::compactly_perturbed: {
      const auto [lo, hi] = *family.perturbation_window();
      for_each_in_union(lo, hi, lo + n, hi + n, add);
      return out;
    }
    case Kind::summable: {
      // Sites with |k| > H and |k-n| > H contribute at most t_k + t_{k-n}.
      const auto& tail = family.majorant().tail;
      Coord h = 8;
      while (2.0 * tail(h + 1) > tol) {
        h *= 2;
        if (2 * h + 1 > x.cap()) throw std::runtime_error("tolerance unachievable within coordinate cap");
      }
      for_each_in_union(-h, h, n - h, n + h, add);
      out.error_bound = 2.0 * tail(h + 1);
      return out;
    }
  }
  return out;
}

bool cocycle_check(const BernoulliFamily& family, const Configuration& x, Coord n, Coord m, double tol) {
  const LogValue whole = rn_derivative(family, x, n + m, tol);
  const LogValue outer = rn_derivative(family, shift(x, m), n, tol);
  const LogValue inner = rn_derivative(family, x, m, tol);
  return std::fabs(whole.log_magnitude - outer.log_magnitude - inner.log_magnitude) <= 3.0 * tol + 1e-9;
}

UniformityConstant uniformity_constant(const BernoulliFamily& family, Coord horizon) {
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  using Kind = BernoulliFamily::Kind;
  UniformityConstant u{family.base().ratio(), true};
  switch (family.kind()) {
    case Kind::iid: break;
    case Kind::compactly_perturbed:
    case Kind::periodic:
      for (const auto& m : family.period()) u.value = std::max(u.value, m.ratio());
      break;
    case Kind::summable:
      for (Coord k = -horizon; k <= horizon; ++k) u.value = std::max(u.value, family.at(k).ratio());
      u.exact = false;
      break;
  }
  return u;
}

HomoclinicRatioCheck homoclinic_ratio_bound_check(const BernoulliFamily& family, const Configuration& x,
                                                  const Configuration& y, Coord radius, Coord n) {
  if (radius < 0) throw std::invalid_argument("radius must be >= 0");
  const LogValue rx = rn_derivative(family, x, n);
  const LogValue ry = rn_derivative(family, y, n);
  const double slack = 1e-9 + rx.error_bound + ry.error_bound;
  const double log_l = std::log(uniformity_constant(family, radius + std::abs(n) + 1).value);

  HomoclinicRatioCheck c;
  c.ratio_log = rx.log_magnitude - ry.log_magnitude;
  c.bound_log = 4.0 * static_cast<double>(radius) * log_l;
  c.site_bound_log = 2.0 * static_cast<double>(2 * radius + 1) * log_l;
  for (Coord k = -radius; k <= radius; ++k) {
    const SiteMeasure a = family.at(k);
    const SiteMeasure b = family.at(k - n);
    c.product_bound_log += std::log(a.max()) + std::log(b.max()) - std::log(a.min()) - std::log(b.min());
  }
  const double r = std::fabs(c.ratio_log);
  c.ok = r <= c.bound_log + slack;
  c.within_product_bound = r <= c.product_bound_log + slack;
  c.within_site_bound = r <= c.site_bound_log + slack;
  return c;
}

namespace {

// Smallest mu_a(s) / mu_b(s) over the measures a compactly perturbed family uses.
double min_site_ratio(const BernoulliFamily& family) {
  std::vector<SiteMeasure> all = family.period();
  all.push_back(family.base());
  double r = 1.0;
  for (const auto& a : all) {
    for (const auto& b : all) {
      for (Symbol s = 1; s <= a.size(); ++s) r = std::min(r, a(s) / b(s));
    }
  }
  return r;
}

}  // namespace

ConservativityReport conservativity_probe(const BernoulliFamily& family, const Configuration& x, Coord horizon,
                                          const ConservativityOptions& options) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  using Kind = BernoulliFamily::Kind;
  ConservativityReport rep;
  rep.partial_sums.reserve(static_cast<std::size_t>(horizon));
  ScaledSum sum;
  rep.min_term = std::numeric_limits<double>::infinity();
  for (Coord k = 1; k <= horizon; ++k) {
    const LogValue w = rn_derivative(family, x, -k, options.tol);
    sum.add(1.0, w.log_magnitude);
    rep.partial_sums.push_back(sum.value());
    rep.min_term = std::min(rep.min_term, w.value());
    rep.max_term = std::max(rep.max_term, w.value());
  }

  switch (family.kind()) {
    case Kind::iid:
    case Kind::periodic:
      rep.term_lower_bound = 1.0;
      rep.nominal_lower_bound = 1.0;
      rep.verdict = Verdict::divergent_certified;
      return rep;
    case Kind::compactly_perturbed: {
      // (T^{-k})'(x) has at most 2 |window| factors mu_a(s)/mu_b(s) != 1.
      const auto [lo, hi] = *family.perturbation_window();
      const double factors = 2.0 * static_cast<double>(hi - lo + 1);
      const double l = uniformity_constant(family, 0).value;
      const double k_radius = static_cast<double>(family.perturbation_radius());
      rep.term_lower_bound = std::pow(min_site_ratio(family), factors);
      rep.nominal_lower_bound = std::pow(l, -2.0 * (2.0 * k_radius + 1.0));
      rep.verdict = rep.term_lower_bound > 0.0 ? Verdict::divergent_certified : Verdict::inconclusive;
      return rep;
    }
    case Kind::summable: {
      const double last = rep.partial_sums.back();
      const Coord decade_start = horizon / 10;
      const double before = decade_start >= 1 ? rep.partial_sums[static_cast<std::size_t>(decade_start - 1)] : 0.0;
      const double increment = last - before;
      if (last > options.divergence_threshold && increment > options.min_last_decade_increment) {
        rep.verdict = Verdict::divergent_looking;
      } else if (increment < options.flat_increment) {
        rep.verdict = Verdict::convergent_looking;
      } else {
        rep.verdict = Verdict::inconclusive;
      }
      return rep;
    }
  }
  return rep;
}

}  // namespace nsdyn
