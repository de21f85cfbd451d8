#include "nsdyn/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace nsdyn {

namespace {

constexpr double kStochasticTol = 1e-12;

void check_symbol(int states, Symbol s) {
  if (s < 1 || s > states) throw std::invalid_argument("state " + std::to_string(s) + " outside SFT");
}

}  // namespace

Sft::Sft(Eigen::MatrixXi adjacency) : a_(std::move(adjacency)) {
  if (a_.rows() != a_.cols() || a_.rows() < 2) throw std::invalid_argument("adjacency must be square with >= 2 states");
  if ((a_.array() != 0 && a_.array() != 1).any()) throw std::invalid_argument("adjacency entries must be 0 or 1");
  for (Eigen::Index i = 0; i < a_.rows(); ++i) {
    if (a_.row(i).sum() == 0 || a_.col(i).sum() == 0) {
      throw std::invalid_argument("state " + std::to_string(i + 1) + " is stranded");
    }
  }
}

Sft Sft::full(int states) {
  if (states < 2) throw std::invalid_argument("full shift needs at least two states");
  return Sft(Eigen::MatrixXi::Ones(states, states));
}

Sft Sft::golden_mean() {
  Eigen::MatrixXi a(2, 2);
  a << 1, 1, 1, 0;
  return Sft(a);
}

bool Sft::admissible(const std::vector<Symbol>& word) const {
  for (Symbol s : word) {
    if (s < 1 || s > states()) return false;
  }
  for (std::size_t i = 0; i + 1 < word.size(); ++i) {
    if (!allowed(word[i], word[i + 1])) return false;
  }
  return true;
}

std::optional<int> primitivity_index(const Sft& sft) {
  const int n = sft.states();
  const int wielandt = n * n - 2 * n + 2;
  const Eigen::MatrixXi a = sft.adjacency();
  Eigen::MatrixXi power = a;
  for (int k = 1; k <= wielandt; ++k) {
    if ((power.array() > 0).all()) return k;
    power = ((power * a).array() > 0).cast<int>();
  }
  return std::nullopt;
}

void for_each_admissible_word(const Sft& sft, std::size_t length,
                              const std::function<void(const std::vector<Symbol>&)>& f) {
  if (length == 0) {
    f({});
    return;
  }
  std::vector<Symbol> word(length, 1);
  // Iterative depth-first search in lexicographic order.
  std::size_t depth = 0;
  word[0] = 0;
  while (true) {
    ++word[depth];
    if (word[depth] > sft.states()) {
      if (depth == 0) return;
      --depth;
      continue;
    }
    if (depth > 0 && !sft.allowed(word[depth - 1], word[depth])) continue;
    if (depth + 1 == length) {
      f(word);
    } else {
      ++depth;
      word[depth] = 0;
    }
  }
}

Eigen::RowVectorXd stationary_distribution(const Eigen::MatrixXd& transition) {
  const Eigen::Index n = transition.rows();
  if (n != transition.cols() || n == 0) throw std::invalid_argument("transition matrix must be square");
  Eigen::MatrixXd m = transition.transpose() - Eigen::MatrixXd::Identity(n, n);
  m.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::VectorXd v = m.fullPivLu().solve(rhs);
  return v.transpose();
}

struct MarkovFamily::Impl {
  Sft sft;
  Eigen::MatrixXd p;
  Eigen::RowVectorXd pi;
  Coord lo = 0;
  std::vector<Eigen::MatrixXd> window;
  // marginals[i] = pi_{lo + i} for lo <= lo + i <= precomputed_hi.
  std::vector<Eigen::RowVectorXd> marginals;
  Coord precomputed_hi = 0;

  Coord hi() const { return lo + static_cast<Coord>(window.size()) - 1; }

  const Eigen::MatrixXd& transition(Coord n) const {
    const Coord i = n - lo;
    if (i >= 0 && i < static_cast<Coord>(window.size())) return window[static_cast<std::size_t>(i)];
    return p;
  }

  Eigen::RowVectorXd marginal(Coord n) const {
    if (window.empty() || n <= lo) return pi;
    if (n <= precomputed_hi) return marginals[static_cast<std::size_t>(n - lo)];
    // Homogeneous propagation beyond the window: pi_{hi'} P^{n - hi'}.
    Eigen::RowVectorXd v = marginals.back();
    Eigen::MatrixXd base = p;
    for (Coord e = n - precomputed_hi; e > 0; e >>= 1) {
      if (e & 1) v = v * base;
      base = base * base;
    }
    return v;
  }
};

namespace {

void validate_transition(const Sft& sft, const Eigen::MatrixXd& p, const std::string& what) {
  const int n = sft.states();
  if (p.rows() != n || p.cols() != n) throw std::invalid_argument(what + " has wrong dimensions");
  for (int s = 0; s < n; ++s) {
    double sum = 0.0;
    for (int t = 0; t < n; ++t) {
      const double q = p(s, t);
      if (!std::isfinite(q) || q < 0.0 || q > 1.0) throw std::invalid_argument(what + " has an entry outside [0,1]");
      if ((q > 0.0) != (sft.adjacency()(s, t) != 0)) {
        throw std::invalid_argument(what + " support differs from the SFT adjacency");
      }
      sum += q;
    }
    if (std::fabs(sum - 1.0) > kStochasticTol) throw std::invalid_argument(what + " is not row-stochastic");
  }
}

Symbol draw_from(const Eigen::RowVectorXd& weights, double u) {
  const double total = weights.sum();
  double cdf = 0.0;
  Symbol last = 1;
  for (Eigen::Index t = 0; t < weights.size(); ++t) {
    if (weights(t) <= 0.0) continue;
    last = static_cast<Symbol>(t + 1);
    cdf += weights(t) / total;
    if (u < cdf) return last;
  }
  return last;
}

class MarkovSampler final : public SiteSampler {
 public:
  explicit MarkovSampler(MarkovFamily family) : family_(std::move(family)) {}

  bool independent() const override { return false; }
  Symbol draw_anchor(Coord k, double u) const override { return draw_from(family_.marginal(k), u); }
  Symbol draw_after(Coord k, Symbol previous, double u) const override {
    return draw_from(family_.transition(k - 1).row(previous - 1), u);
  }
  Symbol draw_before(Coord k, Symbol next, double u) const override {
    const Eigen::RowVectorXd w =
        family_.marginal(k).cwiseProduct(family_.transition(k).col(next - 1).transpose());
    return draw_from(w, u);
  }

 private:
  MarkovFamily family_;
};

}  // namespace

MarkovFamily::MarkovFamily(Sft sft, Eigen::MatrixXd transition, Eigen::RowVectorXd stationary, Coord window_start,
                           std::vector<Eigen::MatrixXd> window) {
  validate_transition(sft, transition, "base transition");
  const int n = sft.states();
  if (stationary.size() != n) throw std::invalid_argument("marginal has wrong dimension");
  if ((stationary.array() <= 0.0).any()) throw std::invalid_argument("marginal must be strictly positive");
  if (std::fabs(stationary.sum() - 1.0) > kStochasticTol) throw std::invalid_argument("marginal must sum to 1");
  if ((stationary * transition - stationary).cwiseAbs().maxCoeff() > kStochasticTol) {
    throw std::invalid_argument("marginal is not stationary for the base transition");
  }
  for (std::size_t i = 0; i < window.size(); ++i) {
    validate_transition(sft, window[i], "transition at " + std::to_string(window_start + static_cast<Coord>(i)));
  }

  auto impl = std::make_shared<Impl>(Impl{std::move(sft), std::move(transition), std::move(stationary), window_start,
                                          std::move(window), {}, window_start});
  if (!impl->window.empty()) {
    impl->precomputed_hi = std::max<Coord>(impl->hi() + 1, 1);
    impl->marginals.reserve(static_cast<std::size_t>(impl->precomputed_hi - impl->lo + 1));
    impl->marginals.push_back(impl->pi);
    for (Coord k = impl->lo; k < impl->precomputed_hi; ++k) {
      impl->marginals.push_back(impl->marginals.back() * impl->transition(k));
    }
  }
  impl_ = std::move(impl);
}

MarkovFamily MarkovFamily::homogeneous(Sft sft, Eigen::MatrixXd transition) {
  validate_transition(sft, transition, "base transition");
  Eigen::RowVectorXd pi = stationary_distribution(transition);
  return MarkovFamily(std::move(sft), std::move(transition), std::move(pi));
}

const Sft& MarkovFamily::sft() const { return impl_->sft; }
int MarkovFamily::states() const { return impl_->sft.states(); }
const Eigen::MatrixXd& MarkovFamily::base_transition() const { return impl_->p; }
const Eigen::RowVectorXd& MarkovFamily::base_marginal() const { return impl_->pi; }
const Eigen::MatrixXd& MarkovFamily::transition(Coord n) const { return impl_->transition(n); }
Eigen::RowVectorXd MarkovFamily::marginal(Coord n) const { return impl_->marginal(n); }
bool MarkovFamily::homogeneous() const { return impl_->window.empty(); }

std::optional<std::pair<Coord, Coord>> MarkovFamily::perturbation_window() const {
  if (impl_->window.empty()) return std::nullopt;
  return std::pair{impl_->lo, impl_->hi()};
}

std::vector<Eigen::MatrixXd> MarkovFamily::transition_matrices() const {
  std::vector<Eigen::MatrixXd> out{impl_->p};
  for (const auto& m : impl_->window) {
    if (std::none_of(out.begin(), out.end(), [&](const Eigen::MatrixXd& q) { return q == m; })) out.push_back(m);
  }
  return out;
}

std::shared_ptr<const SiteSampler> MarkovFamily::sampler() const { return std::make_shared<MarkovSampler>(*this); }

Configuration MarkovFamily::sample(std::uint64_t seed, Coord cap) const {
  return Configuration(sampler(), seed, cap);
}

double markov_cylinder_measure(const MarkovFamily& family, const Cylinder& cylinder) {
  if (cylinder.empty()) return 1.0;
  for (Symbol s : cylinder.word()) check_symbol(family.states(), s);
  if (!family.sft().admissible(cylinder.word())) throw std::invalid_argument("cylinder word is not admissible");
  double m = family.marginal(cylinder.left())(cylinder.word().front() - 1);
  for (Coord j = cylinder.left(); j < cylinder.right(); ++j) {
    m *= family.transition(j)(cylinder.at(j) - 1, cylinder.at(j + 1) - 1);
  }
  return m;
}

LogValue cylinder_shift_ratio(const MarkovFamily& family, const Configuration& x, Coord shift, Coord n) {
  if (n < 0) throw std::invalid_argument("window radius must be >= 0");
  LogValue out;
  if (shift == 0) return out;
  const Symbol first = x.at(-n);
  check_symbol(family.states(), first);
  out.log_magnitude = std::log(family.marginal(-n - shift)(first - 1)) - std::log(family.marginal(-n)(first - 1));

  const auto w = family.perturbation_window();
  if (!w) return out;
  // P_{j-shift} and P_j differ only for j in the window or its translate.
  auto term = [&](Coord j) {
    if (j < -n || j > n - 1) return;
    const Symbol a = x.at(j);
    const Symbol b = x.at(j + 1);
    out.log_magnitude += std::log(family.transition(j - shift)(a - 1, b - 1)) - std::log(family.transition(j)(a - 1, b - 1));
  };
  Coord lo1 = w->first, hi1 = w->second, lo2 = w->first + shift, hi2 = w->second + shift;
  if (lo2 < lo1) {
    std::swap(lo1, lo2);
    std::swap(hi1, hi2);
  }
  if (lo2 <= hi1 + 1) {
    for (Coord j = lo1; j <= std::max(hi1, hi2); ++j) term(j);
  } else {
    for (Coord j = lo1; j <= hi1; ++j) term(j);
    for (Coord j = lo2; j <= hi2; ++j) term(j);
  }
  return out;
}

LogValue z_n(const MarkovFamily& family, const Configuration& x, Coord n) { return cylinder_shift_ratio(family, x, 1, n); }

double martingale_defect(const MarkovFamily& family, const Cylinder& w) {
  const Coord n = w.right();
  if (w.empty() || w.left() != -n) throw std::invalid_argument("martingale check needs a symmetric cylinder");
  const double mu = markov_cylinder_measure(family, w);
  const double zn = z_n(family, Configuration::from_window(-n, w.word()), n).value();
  double expectation = 0.0;
  for (Symbol a = 1; a <= family.states(); ++a) {
    for (Symbol c = 1; c <= family.states(); ++c) {
      std::vector<Symbol> ext{a};
      ext.insert(ext.end(), w.word().begin(), w.word().end());
      ext.push_back(c);
      if (!family.sft().admissible(ext)) continue;
      const double weight = markov_cylinder_measure(family, Cylinder(-n - 1, ext)) / mu;
      expectation += weight * z_n(family, Configuration::from_window(-n - 1, ext), n + 1).value();
    }
  }
  return expectation - zn;
}

Coord certified_rn_window(const MarkovFamily& family, Coord shift) {
  const auto w = family.perturbation_window();
  if (!w) return 1;
  const auto [lo, hi] = *w;
  return std::max({Coord{1}, -lo, -lo - shift, hi + 1, hi + shift + 1});
}

LogValue rn_derivative_markov(const MarkovFamily& family, const Configuration& x, Coord shift,
                              std::optional<Coord> window) {
  if (shift == 0) return {};
  const Coord needed = certified_rn_window(family, shift);
  LogValue v = cylinder_shift_ratio(family, x, shift, window.value_or(needed));
  if (window.value_or(needed) < needed) v.error_bound = std::numeric_limits<double>::infinity();
  return v;
}

TransitionRatio transition_ratio_constant(const MarkovFamily& family) {
  TransitionRatio r;
  for (const auto& p : family.transition_matrices()) {
    for (Eigen::Index s = 0; s < p.rows(); ++s) {
      double mx = 0.0;
      double mn = 1.0;
      for (Eigen::Index t = 0; t < p.cols(); ++t) {
        if (p(s, t) <= 0.0) continue;
        mx = std::max(mx, p(s, t));
        mn = std::min(mn, p(s, t));
      }
      r.value = std::max(r.value, mx / mn);
      r.min_entry = std::min(r.min_entry, mn);
    }
  }
  const double states = family.states();
  const double slack = 1.0 - 1e-12;
  r.floor_ok = r.min_entry >= std::pow(r.value, -states) * slack;
  r.corrected_floor_ok = r.min_entry >= slack / (states * r.value);
  return r;
}

namespace {

// Most probable path x_start = from, ..., x_{start+steps} = to.
std::vector<Symbol> best_path(const MarkovFamily& family, Coord start, Symbol from, int steps, Symbol to) {
  const int n = family.states();
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> score(static_cast<std::size_t>(steps + 1), std::vector<double>(n, ninf));
  std::vector<std::vector<int>> back(static_cast<std::size_t>(steps + 1), std::vector<int>(n, -1));
  score[0][from - 1] = 0.0;
  for (int i = 1; i <= steps; ++i) {
    const Eigen::MatrixXd& p = family.transition(start + i - 1);
    for (int t = 0; t < n; ++t) {
      for (int s = 0; s < n; ++s) {
        if (score[i - 1][s] == ninf || p(s, t) <= 0.0) continue;
        const double v = score[i - 1][s] + std::log(p(s, t));
        if (v > score[i][t]) {
          score[i][t] = v;
          back[i][t] = s;
        }
      }
    }
  }
  if (score[steps][to - 1] == ninf) throw std::logic_error("no path of the primitivity length");
  std::vector<Symbol> path(static_cast<std::size_t>(steps + 1));
  int cur = to - 1;
  for (int i = steps; i >= 0; --i) {
    path[i] = cur + 1;
    if (i > 0) cur = back[i][cur];
  }
  return path;
}

Cylinder extend(const MarkovFamily& family, const Cylinder& core, Symbol hub, int steps) {
  const Coord n = core.right();
  const auto left = best_path(family, -n - steps, hub, steps, core.word().front());
  const auto right = best_path(family, n, core.word().back(), steps, hub);
  std::vector<Symbol> word(left.begin(), left.end() - 1);
  word.insert(word.end(), core.word().begin(), core.word().end());
  word.insert(word.end(), right.begin() + 1, right.end());
  return Cylinder(-n - steps, std::move(word));
}

void check_symmetric(const Cylinder& c, Coord n, const char* name) {
  if (c.empty() || c.left() != -n || c.right() != n) {
    throw std::invalid_argument(std::string(name) + " must be a symmetric cylinder of the common radius");
  }
}

}  // namespace

CouplingCertificate couple_cylinders(const MarkovFamily& family, const Cylinder& b, const Cylinder& c) {
  const auto index = primitivity_index(family.sft());
  if (!index) throw std::invalid_argument("SFT is not topologically mixing");
  const Coord n = b.right();
  check_symmetric(b, n, "B");
  check_symmetric(c, n, "C");

  CouplingCertificate cert;
  cert.b = b;
  cert.c = c;
  cert.primitivity = *index;
  const double mu_b = markov_cylinder_measure(family, b);
  const double mu_c = markov_cylinder_measure(family, c);
  if (!(mu_b > 0.0) || !(mu_c > 0.0)) throw std::invalid_argument("cylinders must have positive measure");

  const int big_n = *index;
  const Eigen::RowVectorXd hub_marginal = family.marginal(-n - big_n);
  Eigen::Index hub = 0;
  for (Eigen::Index s = 1; s < hub_marginal.size(); ++s) {
    if (hub_marginal(s) > hub_marginal(hub)) hub = s;
  }
  if (hub_marginal(hub) * family.states() < 1.0 - 1e-12) throw std::logic_error("hub state below 1/|S|");
  cert.hub = static_cast<Symbol>(hub + 1);

  cert.b_ext = extend(family, b, cert.hub, big_n);
  cert.c_ext = extend(family, c, cert.hub, big_n);
  const double mu_b_ext = markov_cylinder_measure(family, cert.b_ext);
  const double mu_c_ext = markov_cylinder_measure(family, cert.c_ext);
  cert.ratio = mu_c_ext / mu_b_ext;
  cert.b_fraction = mu_b_ext / mu_b;
  cert.c_fraction = mu_c_ext / mu_c;

  const double states = family.states();
  const double l = transition_ratio_constant(family).value;
  cert.extension_bound = std::pow(l, -states * big_n) / states;
  cert.coupling_bound = std::pow(l, -2.0 * states * big_n) / states;
  cert.corrected_bound = std::pow(states * l, -2.0 * big_n) / states;
  const double slack = 1.0 - 1e-12;
  cert.extension_ok = std::min(cert.b_fraction, cert.c_fraction) >= cert.extension_bound * slack;
  cert.coupling_ok = cert.c_fraction >= cert.coupling_bound * slack;
  cert.corrected_ok = std::min(cert.b_fraction, cert.c_fraction) >= cert.corrected_bound * slack;

  // R on one-symbol extensions of B': swap the window word, keep the ends.
  const Coord outer = n + big_n + 1;
  std::set<std::vector<Symbol>> images;
  std::size_t sources = 0;
  double sum_b = 0.0;
  double sum_image = 0.0;
  double pointwise = 0.0;
  bool admissible = true;
  for (Symbol a = 1; a <= family.states(); ++a) {
    for (Symbol z = 1; z <= family.states(); ++z) {
      std::vector<Symbol> w{a};
      w.insert(w.end(), cert.b_ext.word().begin(), cert.b_ext.word().end());
      w.push_back(z);
      if (!family.sft().admissible(w)) continue;
      ++sources;
      std::vector<Symbol> image{a};
      image.insert(image.end(), cert.c_ext.word().begin(), cert.c_ext.word().end());
      image.push_back(z);
      if (!family.sft().admissible(image)) {
        admissible = false;
        continue;
      }
      images.insert(image);
      const double mw = markov_cylinder_measure(family, Cylinder(-outer, w));
      const double mr = markov_cylinder_measure(family, Cylinder(-outer, image));
      sum_b += mw;
      sum_image += mr;
      pointwise = std::max(pointwise, std::fabs(mr - cert.ratio * mw));
    }
  }
  std::size_t targets = 0;
  for (Symbol a = 1; a <= family.states(); ++a) {
    for (Symbol z = 1; z <= family.states(); ++z) {
      std::vector<Symbol> w{a};
      w.insert(w.end(), cert.c_ext.word().begin(), cert.c_ext.word().end());
      w.push_back(z);
      if (family.sft().admissible(w)) ++targets;
    }
  }
  cert.bijective = admissible && images.size() == sources && targets == sources;
  cert.pushforward_error =
      std::max({pointwise, std::fabs(sum_image - cert.ratio * sum_b), std::fabs(cert.ratio * sum_b - mu_c_ext)});
  return cert;
}

Configuration apply_coupling(const CouplingCertificate& cert, const Configuration& x) {
  if (!x.in(cert.b_ext)) throw std::invalid_argument("configuration is not in the extended cylinder B'");
  return rewire(x, cert.c_ext);
}

TailTrivialityReport tail_triviality_probe(const MarkovFamily& family, const std::vector<Cylinder>& d, Coord n,
                                           std::optional<double> epsilon) {
  if (n < 0) throw std::invalid_argument("radius must be >= 0");
  TailTrivialityReport rep;
  rep.radius = n;
  for (const auto& c : d) {
    if (!c.empty()) rep.radius = std::max({rep.radius, std::abs(c.left()), std::abs(c.right())});
  }
  if (epsilon) {
    rep.epsilon = *epsilon;
  } else {
    const auto index = primitivity_index(family.sft());
    if (!index) throw std::invalid_argument("SFT is not topologically mixing");
    const double states = family.states();
    rep.epsilon = std::pow(transition_ratio_constant(family).value, -states * *index) / states;
  }
  if (!(rep.epsilon > 0.0 && rep.epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0,1]");

  const Coord r = rep.radius;
  auto in_d = [&](const std::vector<Symbol>& word) {
    return std::any_of(d.begin(), d.end(), [&](const Cylinder& c) {
      for (Coord k = c.left(); k <= c.right(); ++k) {
        if (word[static_cast<std::size_t>(k + r)] != c.at(k)) return false;
      }
      return true;
    });
  };
  // D is measurable with respect to the radius-r coordinates, so mu(D n C) / mu(C) is 0 or 1.
  std::vector<std::pair<std::vector<Symbol>, bool>> cylinders;
  for_each_admissible_word(family.sft(), static_cast<std::size_t>(2 * r + 1),
                           [&](const std::vector<Symbol>& w) { cylinders.emplace_back(w, in_d(w)); });
  rep.cylinders_checked = cylinders.size();
  for (const auto& [w, inside] : cylinders) {
    const double fraction = inside ? 1.0 : 0.0;
    if (fraction >= 1.0 - rep.epsilon / 2.0) {
      rep.dense_cylinder = Cylinder(-r, w);
      break;
    }
  }
  if (!rep.dense_cylinder) return rep;
  for (const auto& [w, inside] : cylinders) {
    const double fraction = inside ? 1.0 : 0.0;
    if (fraction < rep.epsilon * rep.epsilon / 2.0) {
      rep.violation = Cylinder(-r, w);
      break;
    }
  }
  return rep;
}

}  // namespace nsdyn
