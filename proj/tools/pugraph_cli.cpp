#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pugraph/config.hpp"
#include "pugraph/harness.hpp"

#ifndef PUGRAPH_VERSION
#define PUGRAPH_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace pugraph;

namespace {

constexpr const char* kOutEnv = "PUGRAPH_OUT";

struct Options {
  std::string command;
  fs::path config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  fs::path out;
  int verbosity = 1;  // 0 quiet, 1 normal, 2+ verbose
};

class Log {
 public:
  explicit Log(int level) : level_(level) {}
  void info(const std::string& msg) const {
    if (level_ >= 1) std::cerr << "pugraph: " << msg << '\n';
  }
  void debug(const std::string& msg) const {
    if (level_ >= 2) std::cerr << "pugraph: " << msg << '\n';
  }

 private:
  int level_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

struct Run {
  Options opt;
  ExperimentConfig cfg;
  std::uint64_t seed = 0;
  std::string seed_source;
  Log log{1};
  std::vector<std::string> outputs;  // relative to the out dir
  nlohmann::json timings = nlohmann::json::object();

  void write(const std::string& rel, const std::string& content) {
    write_file_atomic(opt.out / rel, content);
    outputs.push_back(rel);
    log.debug("wrote " + (opt.out / rel).string());
  }
};

// The snapshot files are written to a staging directory that replaces the
// target in one rename.
void write_snapshot_atomic(Run& run, const LoadedDataset& data) {
  const fs::path target = run.opt.out / "snapshot";
  const fs::path staging = run.opt.out / "snapshot.tmp";
  fs::remove_all(staging);
  write_snapshot(staging, data.graph, data.labels);
  fs::remove_all(target);
  fs::rename(staging, target);
  run.outputs.push_back("snapshot/nodes.csv");
  run.outputs.push_back("snapshot/edges.csv");
}

nlohmann::json dataset_summary(const LoadedDataset& data) {
  nlohmann::json j = {{"id", data.id},
                      {"nodes", data.graph.node_count()},
                      {"edges", data.graph.edge_count()},
                      {"directed", data.graph.directed()},
                      {"labeled_positives", data.labels.labeled_count()},
                      {"warnings", data.warnings}};
  if (data.labels.y) j["true_positives"] = data.labels.true_positive_count();
  return j;
}

LoadedDataset load(Run& run) {
  const auto t0 = std::chrono::steady_clock::now();
  auto data = load_dataset(run.cfg.dataset, dataset_seed(run.seed));
  run.timings["load_seconds"] = seconds_since(t0);
  for (const auto& w : data.warnings) run.log.info("warning: " + w);
  run.log.info("dataset " + data.id + ": " + std::to_string(data.graph.node_count()) + " nodes, " +
               std::to_string(data.graph.edge_count()) + " edges, " + std::to_string(data.labels.labeled_count()) +
               " labeled");
  return data;
}

void cmd_ingest(Run& run) {
  if (run.opt.command == "synth" && !run.cfg.dataset.synthetic) {
    throw ConfigError("dataset.synthetic", "synth needs a synthetic dataset section");
  }
  if (run.opt.command == "ingest" && run.cfg.dataset.synthetic) {
    throw ConfigError("dataset", "ingest reads edges and labels or a snapshot; use synth for generated graphs");
  }
  const auto data = load(run);
  write_snapshot_atomic(run, data);
  run.write("dataset.json", dataset_summary(data).dump(2) + "\n");
}

void cmd_embed(Run& run) {
  if (run.cfg.embeddings.empty()) throw ConfigError("embeddings", "at least one embedding is required");
  const auto data = load(run);
  std::map<EmbeddingMethod, EmbeddingMatrix> base;
  nlohmann::json fit = nlohmann::json::object();
  for (const auto& spec : run.cfg.embeddings) {
    for (auto m : spec.parts) {
      if (base.count(m)) continue;
      const auto t0 = std::chrono::steady_clock::now();
      base.emplace(m, train_embedding(m, data.graph, run.cfg.embedding,
                                      derive_seed(run.seed, {1, static_cast<std::uint64_t>(m)})));
      fit[to_string(m)] = seconds_since(t0);
      run.log.info("trained " + std::string(to_string(m)));
    }
  }
  run.timings["embedding_seconds"] = fit;
  for (const auto& spec : run.cfg.embeddings) {
    EmbeddingMatrix emb = base.at(spec.parts[0]);
    for (std::size_t i = 1; i < spec.parts.size(); ++i) emb = concat_embeddings(emb, base.at(spec.parts[i]));
    if (!emb.all_finite()) throw DegenerateDataError("embedding " + spec.name() + " has non-finite entries");
    const fs::path staging = run.opt.out / "embeddings" / (spec.name() + ".csv.tmp");
    const fs::path target = run.opt.out / "embeddings" / (spec.name() + ".csv");
    fs::create_directories(staging.parent_path());
    write_embedding_csv(staging, emb);
    fs::rename(embedding_metadata_path(staging), embedding_metadata_path(target));
    fs::rename(staging, target);
    run.outputs.push_back("embeddings/" + spec.name() + ".csv");
    run.outputs.push_back("embeddings/" + spec.name() + ".csv.meta.json");
  }
}

void cmd_sweep(Run& run) {
  const auto data = load(run);
  const auto result = run_hidden_positive_sweep(run.cfg, data, run.seed);
  run.timings["sweep_seconds"] = result.seconds;
  run.write("sweep.csv", sweep_csv(result));
  run.write("sweep.md", sweep_markdown(result));
  run.write("metadata.json", sweep_metadata(result).dump(2) + "\n");
}

void cmd_bench(Run& run) {
  const auto data = load(run);
  const auto result = run_benchmark(run.cfg, data, run.seed);
  run.timings["benchmark_seconds"] = result.seconds;
  run.write("matrix.csv", matrix_csv(result));
  run.write("matrix.md", matrix_markdown(result));
  run.write("metadata.json", benchmark_metadata(result).dump(2) + "\n");
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

int execute(Options opt) {
  const auto t0 = std::chrono::steady_clock::now();
  Run run;
  run.log = Log(opt.verbosity);
  run.cfg = load_experiment_config(opt.config_path);
  if (opt.jobs) run.cfg.jobs = *opt.jobs;
  if (run.cfg.jobs == 0) throw ConfigError("jobs", "must be >= 1");
  if (opt.seed) {
    run.seed = *opt.seed;
    run.seed_source = "flag";
  } else if (run.cfg.seed) {
    run.seed = *run.cfg.seed;
    run.seed_source = "config";
  } else {
    std::random_device rd;
    run.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    run.seed_source = "random";
  }
  run.opt = std::move(opt);
  run.log.debug("seed " + std::to_string(run.seed) + " (" + run.seed_source + ")");
  fs::create_directories(run.opt.out);
  const std::string started = utc_now();

  const std::string& cmd = run.opt.command;
  if (cmd == "ingest" || cmd == "synth") cmd_ingest(run);
  else if (cmd == "embed") cmd_embed(run);
  else if (cmd == "sweep") cmd_sweep(run);
  else cmd_bench(run);

  run.timings["total_seconds"] = seconds_since(t0);
  const nlohmann::json manifest = {{"command", cmd},
                                   {"version", PUGRAPH_VERSION},
                                   {"config", fs::absolute(run.opt.config_path).string()},
                                   {"seed", run.seed},
                                   {"seed_source", run.seed_source},
                                   {"jobs", run.cfg.jobs},
                                   {"out_dir", fs::absolute(run.opt.out).string()},
                                   {"started_utc", started},
                                   {"outputs", run.outputs},
                                   {"timings", run.timings}};
  write_file_atomic(run.opt.out / "manifest.json", manifest.dump(2) + "\n");
  run.log.info(cmd + " done: " + std::to_string(run.outputs.size() + 1) + " files in " + run.opt.out.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positive-unlabeled illicit node detection on transaction graphs"};
  app.set_version_flag("--version", PUGRAPH_VERSION);
  app.require_subcommand(1);

  Options opt;
  std::string config;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  std::string out;
  int verbose = 0;
  bool quiet = false;

  const std::pair<const char*, const char*> commands[] = {
      {"ingest", "Read an edge list and labels (or a snapshot) and write a snapshot"},
      {"synth", "Generate a synthetic labeled graph and write a snapshot"},
      {"embed", "Train node embeddings on the whole graph"},
      {"sweep", "Estimated vs defacto metrics as labeled positives are hidden"},
      {"bench", "Embedding x model benchmark matrix"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "JSON experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Run seed (overrides the config)");
    sub->add_option("--out", out, std::string("Output directory (default $") + kOutEnv + " or ./out)");
    sub->add_option("--jobs", jobs, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
    sub->add_flag("-v,--verbose", verbose, "More log output (repeatable)");
    sub->add_flag("-q,--quiet", quiet, "Only errors");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cout.flush();
    std::cerr << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  for (auto* sub : subs) {
    if (sub->parsed()) {
      opt.command = sub->get_name();
      if (sub->count("--seed")) opt.seed = seed;
      if (sub->count("--jobs")) opt.jobs = jobs;
    }
  }
  opt.config_path = config;
  if (!out.empty()) opt.out = out;
  else if (const char* env = std::getenv(kOutEnv); env && *env) opt.out = env;
  else opt.out = "out";
  opt.verbosity = quiet ? 0 : 1 + verbose;

  try {
    return execute(std::move(opt));
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.category() << ": " << one_line(e.what()) << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: io: " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << one_line(e.what()) << '\n';
    return 1;
  }
}
