#include <cmath>
#include <ostream>

#include "internal.hpp"

namespace nsdyn::runner {

namespace detail {

ojson number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

ojson to_json(const Cylinder& c) {
  ojson j;
  j["left"] = c.left();
  j["word"] = c.word();
  return j;
}

ojson to_json(const SumSeries& s) {
  ojson j;
  switch (s.normalization) {
    case Normalization::raw: j["normalization"] = "raw"; break;
    case Normalization::per_n: j["normalization"] = "per_n"; break;
    case Normalization::ratio: j["normalization"] = "ratio"; break;
  }
  j["certified"] = s.certified;
  j["empirical_limit"] = number(s.empirical_limit);
  ojson points = ojson::array();
  for (const auto& p : s.checkpoints) points.push_back({{"n", p.n}, {"value", number(p.value)}, {"error_bound", number(p.error_bound)}});
  j["checkpoints"] = std::move(points);
  return j;
}

ojson to_json(const LogValue& v) {
  return {{"log_value", number(v.log_magnitude)}, {"value", number(v.value())}, {"error_bound", number(v.error_bound)}};
}

}  // namespace detail

void write_series_csv(std::ostream& out, const SumSeries& series) {
  const auto old = out.precision(17);
  out << "n,value,error_bound\n";
  for (const auto& p : series.checkpoints) out << p.n << ',' << p.value << ',' << p.error_bound << '\n';
  out.precision(old);
}

}  // namespace nsdyn::runner
