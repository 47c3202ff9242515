#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "contagion/config.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using contagion::Error;
using contagion::ErrorKind;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitInvalid = 4;

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) contagion::fail(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) contagion::fail(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

ordered_json config_json(const contagion::ScenarioConfig& c) {
  ordered_json j;
  j["n"] = c.n;
  j["topology"] = contagion::to_string(c.topology_kind);
  if (!c.topology_file.empty()) j["topology_file"] = c.topology_file;
  j["p"] = c.p;
  j["Q"] = c.q;
  j["s"] = c.s;
  j["t"] = c.t;
  j["E"] = c.total_external;
  j["r_grid"] = c.r_grid;
  j["replications"] = c.replications;
  j["seed"] = c.master_seed;
  j["loss_rule"] = contagion::to_string(c.loss_rule);
  j["initial_bank"] = "uniform_random";
  j["attachment_shift"] = c.attachment.shift;
  if (c.surcharge) {
    j["surcharge"] = {{"R_s", c.surcharge->ratio},
                      {"biggest_fraction", c.surcharge->biggest_fraction}};
  } else {
    j["surcharge"] = nullptr;
  }
  return j;
}

void print_degree_summary(std::ostream& out, const contagion::Topology& topology) {
  const contagion::DegreeStats d = contagion::degree_stats(topology);
  const auto max_of = [](const std::vector<std::uint32_t>& v) {
    return v.empty() ? 0u : *std::max_element(v.begin(), v.end());
  };
  out << "banks " << topology.size() << '\n'
      << "edges " << topology.edges().size() << '\n'
      << "density " << contagion::format_double(d.density) << '\n'
      << "mean_out_degree " << contagion::format_double(d.mean_out()) << '\n'
      << "mean_in_degree " << contagion::format_double(d.mean_in()) << '\n'
      << "max_out_degree " << max_of(d.out_degree) << '\n'
      << "max_in_degree " << max_of(d.in_degree) << '\n';
}

// Returns the exit code; config errors are reported by the caller.
int cmd_generate(const contagion::ScenarioConfig& cfg, const std::string& out_path) {
  const contagion::Scenario scenario(cfg);
  const contagion::ReplicationDraw draw = scenario.draw(0);
  if (out_path.empty() || out_path == "-") {
    contagion::write_edge_list(std::cout, *draw.topology);
    print_degree_summary(std::cerr, *draw.topology);
    return kExitOk;
  }
  const fs::path path(out_path);
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  {
    std::ofstream out = open_output(path);
    contagion::write_edge_list(out, *draw.topology);
  }
  std::ofstream summary = open_output(fs::path(out_path + ".stats"));
  print_degree_summary(summary, *draw.topology);
  print_degree_summary(std::cout, *draw.topology);
  return kExitOk;
}

struct InspectArgs {
  std::string topology;
  std::optional<double> q;
  std::optional<double> ratio;
  std::optional<double> total_external;
  std::optional<contagion::BankIndex> shock;
  bool trace = false;
};

int cmd_inspect(const std::optional<contagion::ScenarioConfig>& cfg, const InspectArgs& args,
                const std::string& out_dir) {
  const contagion::Topology topology = contagion::read_edge_list_file(args.topology);
  const double q = args.q ? *args.q : cfg ? cfg->q : 0.1;
  const double s = cfg ? cfg->s : 0.0;
  const double t = cfg ? cfg->t : 0.0;
  const double e = args.total_external ? *args.total_external : cfg ? cfg->total_external : 1.0;
  double r = 0.0;
  if (args.ratio) {
    r = *args.ratio;
  } else if (cfg && !cfg->r_grid.empty()) {
    r = cfg->r_grid.front();
  } else {
    contagion::fail(ErrorKind::InvalidParameter, "inspect needs --ratio or a config with r_grid");
  }
  const contagion::WeightMatrix w = contagion::compute_weights(topology, s, t, q, e);
  contagion::BalanceSheetSet sheets = contagion::build_balance_sheets(w, q, r, e);
  if (cfg && cfg->surcharge) {
    contagion::apply_surcharge_in_place(sheets, cfg->surcharge->ratio,
                                        cfg->surcharge->biggest_fraction);
  }
  const contagion::ValidationReport report = contagion::validate(sheets);

  std::optional<contagion::CascadeResult> cascade;
  if (args.trace || args.shock) {
    const contagion::BankIndex bank = args.shock.value_or(0);
    if (bank >= topology.size()) {
      contagion::fail(ErrorKind::InvalidParameter, "--shock: bank " + std::to_string(bank) +
                                                       " outside [0, " +
                                                       std::to_string(topology.size()) + ")");
    }
    contagion::ShockState state = contagion::initial_shock(sheets, bank);
    cascade = contagion::propagate(sheets, w, state,
                                   cfg ? cfg->loss_rule : contagion::LossRule::PaperMax);
  }

  if (out_dir.empty()) {
    contagion::write_balance_csv(std::cout, sheets);
    std::cout << '\n';
    contagion::write_validation_report(std::cout, report);
    if (cascade) {
      std::cout << "\nN_d " << cascade->n_defaults << '\n';
      if (args.trace) contagion::write_trace(std::cout, *cascade);
    }
  } else {
    const fs::path dir(out_dir);
    ensure_dir(dir);
    {
      std::ofstream out = open_output(dir / "balance.csv");
      contagion::write_balance_csv(out, sheets);
    }
    {
      std::ofstream out = open_output(dir / "validation.txt");
      contagion::write_validation_report(out, report);
    }
    if (cascade && args.trace) {
      std::ofstream out = open_output(dir / "trace.ndjson");
      contagion::write_trace(out, *cascade);
    }
    contagion::write_validation_report(std::cout, report);
    if (cascade) std::cout << "N_d " << cascade->n_defaults << '\n';
  }
  return report.clean() ? kExitOk : kExitInvalid;
}

// Full default trace of replication 0 at every R, one JSON object per default.
void write_sweep_trace(std::ostream& out, const contagion::ScenarioConfig& cfg) {
  const contagion::Scenario scenario(cfg);
  const contagion::ReplicationDraw draw = scenario.draw(0);
  for (double r : cfg.r_grid) {
    contagion::BalanceSheetSet sheets =
        contagion::build_balance_sheets(draw.weights, cfg.q, r, cfg.total_external);
    if (cfg.surcharge) {
      contagion::apply_surcharge_in_place(sheets, cfg.surcharge->ratio,
                                          cfg.surcharge->biggest_fraction);
    }
    contagion::ShockState state = contagion::initial_shock(sheets, draw.initial_bank);
    const contagion::CascadeResult res = contagion::propagate(sheets, draw.weights, state, cfg.loss_rule);
    for (const contagion::DefaultRecord& d : res.default_set) {
      ordered_json j;
      j["R"] = r;
      j["stream_index"] = 0;
      j["round"] = d.round;
      j["bank"] = d.bank;
      j["distress"] = d.distress;
      j["transmitted"] = d.transmitted;
      j["delivered"] = d.delivered;
      out << j.dump() << '\n';
    }
  }
}

int cmd_sweep(const contagion::ScenarioConfig& cfg, const std::string& out_dir,
              std::size_t workers, bool raw_samples, bool trace) {
  const fs::path dir(out_dir.empty() ? "." : out_dir);
  ensure_dir(dir);
  const auto start = std::chrono::steady_clock::now();
  const contagion::SweepResult result =
      contagion::sweep(cfg, {.workers = workers, .keep_samples = raw_samples});

  ordered_json outputs = ordered_json::array();
  {
    std::ofstream out = open_output(dir / "curves.csv");
    contagion::write_sweep_csv(out, result);
    outputs.push_back((dir / "curves.csv").string());
  }
  if (raw_samples) {
    std::ofstream out = open_output(dir / "samples.csv");
    contagion::write_samples_csv(out, result);
    outputs.push_back((dir / "samples.csv").string());
  }
  if (trace) {
    std::ofstream out = open_output(dir / "trace.ndjson");
    write_sweep_trace(out, cfg);
    outputs.push_back((dir / "trace.ndjson").string());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  ordered_json manifest;
  manifest["tool"] = "contagion";
  manifest["version"] = CONTAGION_VERSION;
  manifest["timestamp"] = utc_timestamp();
  manifest["config"] = config_json(cfg);
  manifest["config_text"] = contagion::emit_config(cfg);
  manifest["workers"] = workers;
  manifest["wall_clock_seconds"] = wall;
  manifest["realized_density_mean"] = result.realized_density_mean;
  ordered_json per_r = ordered_json::array();
  for (std::size_t k = 0; k < cfg.r_grid.size(); ++k) {
    per_r.push_back({{"R", cfg.r_grid[k]}, {"seconds", result.r_runtime_seconds[k]}});
  }
  manifest["r_runtime_seconds"] = per_r;
  outputs.push_back((dir / "manifest.json").string());
  manifest["outputs"] = outputs;
  {
    std::ofstream out = open_output(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
  }
  std::cout << "wrote " << (dir / "curves.csv").string() << " (" << cfg.r_grid.size() << " R values, "
            << cfg.replications << " replications, " << std::fixed << std::setprecision(2) << wall
            << " s)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interbank default-contagion simulator"};
  app.set_version_flag("--version", std::string(CONTAGION_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  std::string generate_out;
  std::string inspect_out;
  std::string sweep_out = ".";
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  bool raw_samples = false;
  bool trace = false;
  InspectArgs inspect_args;

  CLI::App* generate = app.add_subcommand("generate", "Write the edge list of replication 0's network");
  generate->add_option("--config", config_path, "Scenario file")->required();
  generate->add_option("--out", generate_out, "Edge-list path (stdout when omitted)");

  CLI::App* inspect = app.add_subcommand("inspect", "Balance sheets and validation for an edge-list file");
  inspect->add_option("topology", inspect_args.topology, "Edge-list file")->required();
  inspect->add_option("--config", config_path, "Scenario file supplying Q, s, t, E, surcharge, loss rule");
  inspect->add_option("--ratio", inspect_args.ratio, "Equity capital ratio R (default: first r_grid value)");
  inspect->add_option("--Q", inspect_args.q, "Interbank share of assets (default 0.1)");
  inspect->add_option("--E", inspect_args.total_external, "Total external assets (default 1)");
  inspect->add_option("--shock", inspect_args.shock, "Bank hit by the initial shock");
  inspect->add_flag("--trace", inspect_args.trace, "Print the default trace of the shock");
  inspect->add_option("--out", inspect_out, "Directory for balance.csv, validation.txt, trace.ndjson");

  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over the R grid");
  sweep->add_option("--config", config_path, "Scenario file")->required();
  sweep->add_option("--out", sweep_out, "Output directory")->capture_default_str();
  sweep->add_option("--workers", workers, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
  sweep->add_flag("--raw-samples", raw_samples, "Also write every N_d to samples.csv");
  sweep->add_flag("--trace", trace, "Also write replication 0's default trace per R");

  CLI11_PARSE(app, argc, argv);

  std::optional<contagion::ScenarioConfig> cfg;
  try {
    if (!config_path.empty()) cfg = contagion::parse_config(config_path);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*generate) return cmd_generate(*cfg, generate_out);
    if (*inspect) return cmd_inspect(cfg, inspect_args, inspect_out);
    return cmd_sweep(*cfg, sweep_out, workers, raw_samples, trace);
  } catch (const contagion::ReplicationError& e) {
    std::cerr << "error in replication " << e.stream_index() << ": " << e.what() << '\n';
    return kExitRuntime;
  } catch (const Error& e) {
    std::cerr << contagion::to_string(e.kind()) << ": " << e.what() << '\n';
    return e.kind() == ErrorKind::InvalidParameter && *inspect ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
