#include "internal.hpp"

namespace nsdyn::runner {
namespace {

CatalogEntry entry(std::string name, std::string description, const char* config) {
  return {std::move(name), std::move(description), nlohmann::ordered_json::parse(config)};
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      entry("bernoulli-cocycle", "RN cocycle identity on a compactly perturbed Bernoulli shift", R"({
        "schema": "v1", "seed": 1,
        "system": {"type": "bernoulli", "kind": "compact", "base": ["0.5", "0.5"], "window_start": -1,
                   "window": [["0.8", "0.2"], ["0.3", "0.7"], ["0.6", "0.4"]]},
        "operation": {"name": "cocycle_check", "params": {"cases": 1000, "max_shift": 20, "tol": 1e-9}}})"),
      entry("kakutani-criterion", "Kakutani sum of the alternating (3/4,1/4)/(1/4,3/4) family", R"({
        "schema": "v1", "seed": 2,
        "system": {"type": "bernoulli", "kind": "periodic", "period": [["3/4", "1/4"], ["1/4", "3/4"]]},
        "operation": {"name": "kakutani_sum", "params": {"horizon": 100}}})"),
      entry("homoclinic-ratio-bounds", "Scan of RN ratios over homoclinic pairs against L^{4N}", R"({
        "schema": "v1", "seed": 3,
        "system": {"type": "bernoulli", "kind": "compact", "base": ["0.5", "0.5"], "window_start": -1,
                   "window": [["0.8", "0.2"], ["0.2", "0.8"], ["0.6", "0.4"]]},
        "operation": {"name": "homoclinic_scan", "params": {"max_radius": 3, "max_shift": 8}}})"),
      entry("poisson-mixing-gap", "Mixing gap of [N({0})=0] and [N({0,1})=0] on unit weights", R"({
        "schema": "v1", "seed": 4,
        "system": {"type": "poisson", "ground": "translation", "weight": 1},
        "operation": {"name": "mixing_gap", "params": {
          "b": [{"region": [0], "count": 0}],
          "c": [{"region": [0, 1], "count": 0}]}}})"),
      entry("poisson-variance-decay", "Variance of block averages along spaced times against C/N", R"({
        "schema": "v1", "seed": 5,
        "system": {"type": "poisson", "ground": "translation", "weight": "0.1"},
        "operation": {"name": "subsequence_average_experiment", "params": {
          "event": [{"region": {"lo": 0, "hi": 9}, "count": 0}],
          "times": {"spacing": 10, "count": 256},
          "block_sizes": [16, 64, 256], "seeds": 10000}}})"),
      entry("theorem11-probe", "Liminf probe along a null subsequence of a Poisson suspension", R"({
        "schema": "v1", "seed": 6,
        "system": {"type": "poisson", "ground": "translation", "weight": 1},
        "operation": {"name": "theorem11_probe", "params": {
          "event": [{"region": [0], "count": 1}, {"region": [1, 2], "count": 1}],
          "times": {"null_subsequence": {"count": 256, "horizon": 1000000000}},
          "block_sizes": [16, 32, 64, 128, 256], "alpha": 1, "seeds": 400}}})"),
      entry("markov-coupling", "Coupling certificate on the golden-mean SFT", R"({
        "schema": "v1", "seed": 7,
        "system": {"type": "markov", "sft": "golden_mean", "transition": [["1/2", "1/2"], [1, 0]]},
        "operation": {"name": "couple_cylinders", "params": {"b": {"word": [1, 2, 1]}, "c": {"word": [2, 1, 1]}}}})"),
      entry("markov-martingale", "Exact martingale check of Z_n on a perturbed golden-mean chain", R"({
        "schema": "v1", "seed": 8,
        "system": {"type": "markov", "sft": "golden_mean", "transition": [["1/2", "1/2"], [1, 0]],
                   "window_start": -1, "window": [[["0.3", "0.7"], [1, 0]], [["0.6", "0.4"], [1, 0]]]},
        "operation": {"name": "martingale_check", "params": {"n": 4}}})"),
      entry("hurewicz-sanity", "Hurewicz ratio series for a fair coin indicator", R"({
        "schema": "v1", "seed": 9,
        "system": {"type": "bernoulli", "kind": "iid", "base": ["0.5", "0.5"]},
        "operation": {"name": "hurewicz_ratio_series", "params": {"cylinder": {"word": [1]}, "horizon": 100000}}})"),
      entry("zd-actions", "Box ratio averages of an indicator on a perturbed Z^2 shift", R"({
        "schema": "v1", "seed": 10,
        "system": {"type": "zd", "dimension": 2, "kind": "compact", "base": ["0.5", "0.5"],
                   "perturbed": [{"site": [0, 0], "measure": ["0.7", "0.3"]}, {"site": [1, -1], "measure": ["0.25", "0.75"]}]},
        "operation": {"name": "box_ratio_average", "params": {"pattern": [{"site": [0, 0], "symbol": 1}], "n_max": 64}}})"),
      entry("determinism", "Repeated cocycle fuzz on Z^2 with one master seed", R"({
        "schema": "v1", "seed": 11, "repeat": 2,
        "system": {"type": "zd", "dimension": 2, "kind": "compact", "base": ["0.5", "0.5"],
                   "perturbed": [{"site": [0, 1], "measure": ["0.9", "0.1"]}]},
        "operation": {"name": "cocycle_fuzz", "params": {"cases": 500, "max_shift": 5}}})"),
  };
  return entries;
}

}  // namespace nsdyn::runner
