#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "internal.hpp"

namespace nsdyn::runner {

RunOutcome run(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const auto& raw = config.raw;
  auto once = [&] {
    try {
      return detail::run_operation(raw.at("system"), raw.at("operation"), config.seed);
    } catch (const ValidationError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    } catch (const std::domain_error& e) {
      throw ValidationError(e.what());
    }
  };
  detail::OperationResult result = once();
  bool identical = true;
  for (int i = 1; i < config.repeat; ++i) {
    const auto again = once();
    identical = identical && again.results.dump() == result.results.dump() && again.failure == result.failure;
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  RunOutcome out;
  out.certified_failure = result.failure || !identical;
  auto& report = out.report;
  report["schema"] = "v1";
  report["library_version"] = kLibraryVersion;
  report["operation"] = raw.at("operation").at("name");
  report["seed"] = config.seed;
  report["status"] = out.certified_failure ? "certified_failure" : "ok";
  report["config"] = raw;
  report["results"] = std::move(result.results);
  if (config.repeat > 1) report["repeat"] = {{"count", config.repeat}, {"identical", identical}};
  report["wall_time_seconds"] = elapsed;
  out.series = std::move(result.series);
  return out;
}

namespace {

namespace fs = std::filesystem;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f.flush()) throw IoError("write failed for " + path.string());
}

void emit(const RunOutcome& outcome, const ExperimentConfig& cfg, std::ostream& out) {
  const bool csv = cfg.format == "csv";
  if (!cfg.out_dir) {
    if (!csv) {
      out << outcome.report.dump(2) << '\n';
      return;
    }
    for (const auto& [name, s] : outcome.series) {
      out << "# " << name << '\n';
      write_series_csv(out, s);
    }
    return;
  }
  const fs::path dir(*cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "report.json", outcome.report.dump(2) + "\n");
  if (csv) {
    for (const auto& [name, s] : outcome.series) {
      std::ostringstream text;
      write_series_csv(text, s);
      write_file(dir / (name + ".csv"), text.str());
    }
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Experiments on non-singular shifts, Markov measures and Poisson suspensions", "nsdyn"};
  std::string config_path;
  std::string experiment;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  std::optional<std::string> list;
  auto* config_opt = app.add_option("-c,--config", config_path, "Experiment config (JSON)");
  auto* exp_opt = app.add_option("-e,--experiment", experiment, "Run a catalog experiment by name");
  app.add_option("-s,--seed", seed, "Override the master seed");
  app.add_option("-o,--out", out_dir, "Output directory (default: stdout)");
  app.add_option("-f,--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  auto* list_opt = app.add_option("-l,--list", list, "List catalog experiments, optionally filtered")
                       ->expected(0, 1)
                       ->default_str("");
  config_opt->excludes(exp_opt);
  list_opt->excludes(config_opt)->excludes(exp_opt);
  app.add_flag_callback("-V,--version", [&] { throw CLI::CallForVersion(kLibraryVersion, 0); }, "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      if (dynamic_cast<const CLI::CallForVersion*>(&e)) out << kLibraryVersion << '\n';
      else out << app.help();
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  }

  if (list_opt->count() > 0) {
    const std::string filter = list.value_or("");
    for (const auto& entry : catalog()) {
      if (entry.name.find(filter) == std::string::npos && entry.description.find(filter) == std::string::npos) continue;
      out << entry.name << "  " << entry.description << '\n';
    }
    return 0;
  }
  if (config_opt->count() == 0 && exp_opt->count() == 0) {
    err << "error: one of --config, --experiment or --list is required\n";
    return 2;
  }

  nlohmann::ordered_json raw;
  if (exp_opt->count() > 0) {
    const auto& entries = catalog();
    const auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.name == experiment; });
    if (it == entries.end()) {
      err << "error: no catalog experiment named \"" << experiment << "\"\n";
      return 2;
    }
    raw = it->config;
  } else {
    std::ifstream f(config_path);
    if (!f) {
      err << "error: cannot read " << config_path << '\n';
      return 4;
    }
    try {
      raw = nlohmann::ordered_json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
      err << "error: " << config_path << " is not valid JSON: " << e.what() << '\n';
      return 2;
    }
  }

  try {
    ExperimentConfig cfg = parse_config(raw, seed);
    if (out_dir) cfg.out_dir = out_dir;
    if (format) cfg.format = *format;
    const RunOutcome outcome = run(cfg);
    emit(outcome, cfg, out);
    return outcome.certified_failure ? 3 : 0;
  } catch (const ValidationError& e) {
    err << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace nsdyn::runner
