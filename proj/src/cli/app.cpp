#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "loschmidt/cli.hpp"
#include "loschmidt/errors.hpp"
#include "loschmidt/parallel.hpp"

namespace loschmidt::cli {

namespace {

struct Flags {
  std::vector<std::string> configs;
  std::vector<std::string> sets;
  std::string out;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
};

const char* summary(const std::string& name) {
  if (name == "echo") return "Ensemble mean and variance of the fidelity per kick";
  if (name == "histogram") return "Distribution of the fidelity at selected times";
  if (name == "ldos") return "Local spectral density and Lorentzian width by exact diagonalization";
  if (name == "scan-peak") return "Peak variance and its time over a list of perturbations";
  if (name == "theory") return "Semiclassical variance prediction and its four terms";
  if (name == "classical") return "Standard-map Lyapunov exponents";
  if (name == "fit") return "Exponential or power-law fit of two columns of a CSV file";
  return "";
}

unsigned resolve_threads(const Flags& f, const Config& config) {
  if (f.threads) return *f.threads;
  if (const Setting* s = config.find("threads")) {
    unsigned v = 0;
    const auto& t = s->value;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || v == 0)
      throw ConfigError(s->origin + ": threads must be a positive integer");
    return v;
  }
  return default_thread_count();
}

int execute(const std::string& command, const Flags& f, std::ostream& out) {
  Config config;
  for (const auto& path : f.configs) config.load_file(path);
  for (const auto& s : f.sets) config.assign(s, "--set " + s);
  if (f.seed) config.set("seed", std::to_string(*f.seed), "--seed");
  const unsigned threads = resolve_threads(f, config);

  std::string out_path = f.out;
  if (out_path.empty())
    if (const Setting* s = config.find("out")) out_path = s->value;

  const Output result = run_command(command, config, threads);
  if (out_path.empty()) {
    write_csv(out, result, threads);
    out.flush();
    if (!out) throw std::runtime_error("failed writing to standard output");
  } else {
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file '" + out_path + "'");
    write_csv(file, result, threads);
    file.close();
    if (!file) throw std::runtime_error("failed writing output file '" + out_path + "'");
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Loschmidt echo fluctuations in the quantum kicked rotator", "loschmidt"};
  app.require_subcommand(1);
  app.set_version_flag("--version", LOSCHMIDT_VERSION);

  Flags flags;
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, summary(name));
    sub->add_option("--config", flags.configs, "key=value config file (repeatable, later files win)")
        ->check(CLI::ExistingFile);
    sub->add_option("--set", flags.sets, "override one key, key=value (repeatable)");
    sub->add_option("--out", flags.out, "output CSV path (default: standard output)");
    sub->add_option("--threads", flags.threads, "worker threads (default: LOSCHMIDT_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", flags.seed, "base seed of the counter-based RNG");
  }

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << LOSCHMIDT_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "loschmidt: " << e.what() << "\n";
    if (e.get_name() == "RequiredError" && app.get_subcommands().empty()) err << app.help();
    return 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();

  try {
    return execute(command, flags, out);
  } catch (const ConfigError& e) {
    err << "loschmidt " << command << ": config error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidArgument& e) {
    err << "loschmidt " << command << ": invalid parameter: " << e.what() << "\n";
    return 1;
  } catch (const SizeLimitError& e) {
    err << "loschmidt " << command << ": invalid parameter: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "loschmidt " << command << ": error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace loschmidt::cli
