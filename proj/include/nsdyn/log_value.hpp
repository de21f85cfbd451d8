#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string_view>

namespace nsdyn {

/// Natural log of a positive quantity together with a bound on the
/// truncation error of the log. An infinite bound marks an uncertified value.
struct LogValue {
  double log_magnitude = 0.0;
  double error_bound = 0.0;

  double value() const { return std::exp(log_magnitude); }
  bool exact() const { return error_bound == 0.0; }
  bool certified() const { return std::isfinite(error_bound); }
};

/// Running sum of terms given as w * exp(log_w), kept relative to a moving
/// scale so that sums of unit weights stay exact integers.
class ScaledSum {
 public:
  void add(double coefficient, double log_weight) {
    if (coefficient == 0.0) return;
    if (log_weight > scale_ + kRescale) {
      sum_ *= std::exp(scale_ - log_weight);
      scale_ = log_weight;
    }
    sum_ += coefficient * std::exp(log_weight - scale_);
  }

  double value() const { return sum_ * std::exp(scale_); }

 private:
  static constexpr double kRescale = 600.0;
  double scale_ = 0.0;
  double sum_ = 0.0;
};

enum class Verdict {
  convergent_certified,
  divergent_certified,
  divergent_looking,
  convergent_looking,
  inconclusive,
};

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::convergent_certified: return "convergent_certified";
    case Verdict::divergent_certified: return "divergent_certified";
    case Verdict::divergent_looking: return "divergent_looking";
    case Verdict::convergent_looking: return "convergent_looking";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

}  // namespace nsdyn
