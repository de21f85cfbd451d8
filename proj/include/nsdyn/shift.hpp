#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace nsdyn {

using Coord = std::int64_t;
/// Symbols are 1..N.
using Symbol = int;

inline constexpr Coord kDefaultCoordinateCap = Coord{1} << 24;

class Alphabet {
 public:
  explicit Alphabet(int size);

  int size() const { return size_; }
  bool contains(Symbol s) const { return s >= 1 && s <= size_; }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  int size_;
};

/// The cylinder [b]_left^right. An empty word is the empty block at `left`.
class Cylinder {
 public:
  Cylinder() = default;
  Cylinder(Coord left, std::vector<Symbol> word);
  Cylinder(Coord left, Coord right, std::vector<Symbol> word);

  Coord left() const { return left_; }
  Coord right() const { return left_ + static_cast<Coord>(word_.size()) - 1; }
  std::size_t length() const { return word_.size(); }
  bool empty() const { return word_.empty(); }
  const std::vector<Symbol>& word() const { return word_; }
  Symbol at(Coord k) const { return word_[static_cast<std::size_t>(k - left_)]; }
  bool covers(Coord k) const { return k >= left_ && k <= right(); }

  /// Throws std::invalid_argument if a symbol is outside the alphabet.
  void validate(const Alphabet& alphabet) const;

  friend bool operator==(const Cylinder&, const Cylinder&) = default;

 private:
  Coord left_ = 0;
  std::vector<Symbol> word_;
};

/// Source of the symbols outside a configuration's explicit window.
/// `u` is the uniform attached to coordinate k; implementations must be pure.
class SiteSampler {
 public:
  virtual ~SiteSampler() = default;

  /// True when x_k does not depend on its neighbours.
  virtual bool independent() const = 0;
  virtual Symbol draw_anchor(Coord k, double u) const = 0;
  /// x_k given x_{k-1}.
  virtual Symbol draw_after(Coord k, Symbol previous, double u) const = 0;
  /// x_k given x_{k+1}.
  virtual Symbol draw_before(Coord k, Symbol next, double u) const = 0;
};

namespace detail {
class SymbolStore;
}

/// A point of a shift space. Symbols are materialized on first read and are
/// stable afterwards; copies share storage. Reads are thread-safe.
class Configuration {
 public:
  /// Lazily sampled configuration anchored at coordinate 0.
  Configuration(std::shared_ptr<const SiteSampler> sampler, std::uint64_t seed,
                Coord cap = kDefaultCoordinateCap);

  /// Explicit window x_start..x_{start+len-1}; coordinates outside the window
  /// come from `tail` (reads there throw std::out_of_range when tail is null).
  static Configuration from_window(Coord start, std::vector<Symbol> window,
                                   std::shared_ptr<const SiteSampler> tail = nullptr,
                                   std::uint64_t seed = 0, Coord cap = kDefaultCoordinateCap);

  Symbol at(Coord i) const;
  std::vector<Symbol> read(Coord lo, Coord hi) const;
  bool in(const Cylinder& c) const;

  Coord offset() const { return offset_; }
  std::uint64_t seed() const;
  Coord cap() const;

  friend Configuration shift(const Configuration& x, Coord n);
  friend Configuration rewire(const Configuration& x, const Cylinder& block);

 private:
  Configuration() = default;

  std::shared_ptr<detail::SymbolStore> store_;
  Coord offset_ = 0;
  std::shared_ptr<const std::map<Coord, Symbol>> overrides_;
};

/// T^n x: the result reads coordinate i as x reads i + n.
Configuration shift(const Configuration& x, Coord n);

/// Equal to x outside the block and to the block's word inside it.
Configuration rewire(const Configuration& x, const Cylinder& block);

/// Horizon-certified double-tail radius: the smallest N with x_n = y_n for
/// all N < |n| <= horizon. Absent when the last disagreement lies in
/// (horizon - slack, horizon]. Default slack is horizon / 2.
std::optional<Coord> homoclinic_radius(const Configuration& x, const Configuration& y, Coord horizon,
                                       std::optional<Coord> slack = std::nullopt);

}  // namespace nsdyn
