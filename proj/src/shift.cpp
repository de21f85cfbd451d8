#include "nsdyn/shift.hpp"

#include <cstdlib>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <string>

#include "nsdyn/random.hpp"

namespace nsdyn {

Alphabet::Alphabet(int size) : size_(size) {
  if (size < 2) throw std::invalid_argument("alphabet needs at least two symbols");
}

Cylinder::Cylinder(Coord left, std::vector<Symbol> word) : left_(left), word_(std::move(word)) {}

Cylinder::Cylinder(Coord left, Coord right, std::vector<Symbol> word) : left_(left), word_(std::move(word)) {
  if (right - left + 1 != static_cast<Coord>(word_.size()) || right < left - 1) {
    throw std::invalid_argument("cylinder word length does not match its range");
  }
}

void Cylinder::validate(const Alphabet& alphabet) const {
  for (Symbol s : word_) {
    if (!alphabet.contains(s)) throw std::invalid_argument("cylinder symbol " + std::to_string(s) + " outside alphabet");
  }
}

namespace detail {

// Contiguous materialized range [lo_, lo_ + size) grown outward from the
// anchor window. Independent samplers bypass the range entirely.
class SymbolStore {
 public:
  SymbolStore(std::shared_ptr<const SiteSampler> sampler, std::uint64_t seed, Coord cap, Coord start,
              std::vector<Symbol> window)
      : sampler_(std::move(sampler)), seed_(seed), cap_(cap), window_lo_(start),
        window_hi_(start + static_cast<Coord>(window.size()) - 1), window_(std::move(window)), lo_(start),
        symbols_(window_.begin(), window_.end()) {
    if (cap_ <= 0) throw std::invalid_argument("coordinate cap must be positive");
  }

  Symbol at(Coord k) {
    if (!sampler_ || sampler_->independent()) {
      if (k >= window_lo_ && k <= window_hi_) return window_[static_cast<std::size_t>(k - window_lo_)];
      if (!sampler_) throw std::out_of_range("coordinate " + std::to_string(k) + " outside explicit window");
      check_cap(k);
      return sampler_->draw_anchor(k, uniform(k));
    }

    std::lock_guard lock(mutex_);
    if (symbols_.empty()) {
      lo_ = 0;
      symbols_.push_back(sampler_->draw_anchor(0, uniform(0)));
    }
    if (k < lo_ || k >= lo_ + static_cast<Coord>(symbols_.size())) check_cap(k);
    while (k < lo_) {
      const Coord c = lo_ - 1;
      symbols_.push_front(sampler_->draw_before(c, symbols_.front(), uniform(c)));
      lo_ = c;
    }
    while (k >= lo_ + static_cast<Coord>(symbols_.size())) {
      const Coord c = lo_ + static_cast<Coord>(symbols_.size());
      symbols_.push_back(sampler_->draw_after(c, symbols_.back(), uniform(c)));
    }
    return symbols_[static_cast<std::size_t>(k - lo_)];
  }

  std::uint64_t seed() const { return seed_; }
  Coord cap() const { return cap_; }

 private:
  double uniform(Coord k) const { return to_unit(coordinate_key(seed_, k)); }

  void check_cap(Coord k) const {
    const Coord anchor_lo = window_hi_ >= window_lo_ ? window_lo_ : 0;
    const Coord anchor_hi = window_hi_ >= window_lo_ ? window_hi_ : 0;
    const Coord lo = std::min(anchor_lo, k);
    const Coord hi = std::max(anchor_hi, k);
    if (hi - lo + 1 > cap_) throw std::length_error("coordinate range exceeds cap");
  }

  std::shared_ptr<const SiteSampler> sampler_;
  std::uint64_t seed_;
  Coord cap_;
  Coord window_lo_;
  Coord window_hi_;
  const std::vector<Symbol> window_;
  std::mutex mutex_;
  Coord lo_;
  // Materialized symbols on [lo_, lo_ + size) for neighbour-dependent samplers.
  std::deque<Symbol> symbols_;
};

}  // namespace detail

Configuration::Configuration(std::shared_ptr<const SiteSampler> sampler, std::uint64_t seed, Coord cap) {
  if (!sampler) throw std::invalid_argument("configuration needs a sampler");
  store_ = std::make_shared<detail::SymbolStore>(std::move(sampler), seed, cap, 0, std::vector<Symbol>{});
}

Configuration Configuration::from_window(Coord start, std::vector<Symbol> window,
                                         std::shared_ptr<const SiteSampler> tail, std::uint64_t seed, Coord cap) {
  if (window.empty() && !tail) throw std::invalid_argument("configuration needs a window or a tail sampler");
  Configuration x;
  x.store_ = std::make_shared<detail::SymbolStore>(std::move(tail), seed, cap, start, std::move(window));
  return x;
}

Symbol Configuration::at(Coord i) const {
  const Coord absolute = i + offset_;
  if (overrides_) {
    if (auto it = overrides_->find(absolute); it != overrides_->end()) return it->second;
  }
  return store_->at(absolute);
}

std::vector<Symbol> Configuration::read(Coord lo, Coord hi) const {
  if (hi - lo + 1 > cap()) throw std::length_error("read range exceeds cap");
  std::vector<Symbol> out;
  if (hi < lo) return out;
  out.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (Coord i = lo; i <= hi; ++i) out.push_back(at(i));
  return out;
}

bool Configuration::in(const Cylinder& c) const {
  for (Coord k = c.left(); k <= c.right(); ++k) {
    if (at(k) != c.at(k)) return false;
  }
  return true;
}

std::uint64_t Configuration::seed() const { return store_->seed(); }
Coord Configuration::cap() const { return store_->cap(); }

Configuration shift(const Configuration& x, Coord n) {
  Configuration y = x;
  y.offset_ += n;
  return y;
}

Configuration rewire(const Configuration& x, const Cylinder& block) {
  if (block.empty()) return x;
  auto merged = x.overrides_ ? std::make_shared<std::map<Coord, Symbol>>(*x.overrides_)
                             : std::make_shared<std::map<Coord, Symbol>>();
  for (Coord k = block.left(); k <= block.right(); ++k) (*merged)[k + x.offset_] = block.at(k);
  Configuration y = x;
  y.overrides_ = std::move(merged);
  return y;
}

std::optional<Coord> homoclinic_radius(const Configuration& x, const Configuration& y, Coord horizon,
                                       std::optional<Coord> slack) {
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  const Coord s = slack.value_or(horizon / 2);
  for (Coord r = horizon; r >= 1; --r) {
    if (x.at(r) != y.at(r) || x.at(-r) != y.at(-r)) {
      if (r > horizon - s) return std::nullopt;
      return r;
    }
  }
  return Coord{0};
}

}  // namespace nsdyn
