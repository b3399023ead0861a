// Command-line front end: fine-tuning with gradient layers, assist-mode
// training, data generation, exact W1 evaluation, the exact-oracle flow demo,
// and toy dataset dumps. Every run writes a manifest before numerics start
// and stamps it complete at the end.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gradlayer/config.hpp"
#include "gradlayer/csv.hpp"
#include "gradlayer/datasets.hpp"
#include "gradlayer/diagnostics.hpp"
#include "gradlayer/stack_io.hpp"
#include "gradlayer/wgan.hpp"

namespace fs = std::filesystem;
using namespace gradlayer;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

using KvList = std::vector<std::pair<std::string, std::string>>;

void write_kv_file(const fs::path& path, const KvList& kv) {
  std::string text;
  for (const auto& [k, v] : kv) {
    text += k;
    text += '=';
    text += v;
    text += '\n';
  }
  write_text_file(path.string(), text);
}

void write_manifest(const fs::path& path, const std::string& command, const RunSetup& setup,
                    const std::string& status, const KvList& extra) {
  KvList kv;
  kv.emplace_back("status", status);
  kv.emplace_back("command", command);
  kv.emplace_back("config_hash", hex64(setup.config_hash()));
  kv.emplace_back("created_at", utc_now());
  std::istringstream canon(setup.canonical());
  std::string line;
  while (std::getline(canon, line)) {
    const auto eq = line.find('=');
    kv.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  for (const auto& e : extra) kv.push_back(e);
  write_kv_file(path, kv);
}

EmpiricalMeasure make_dataset(const std::string& name, std::size_t n, std::uint64_t seed) {
  if (name == "eight_gaussians") return eight_gaussians(n, seed).points;
  if (name == "twenty_five_gaussians") return twenty_five_gaussians(n, seed).points;
  if (name == "swiss_roll") return swiss_roll(n, seed);
  throw ConfigError("unknown dataset: " + name);
}

std::vector<int> parse_snapshots(const std::string& text) {
  std::vector<int> steps;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    if (cell.empty()) continue;
    try {
      steps.push_back(std::stoi(cell));
    } catch (const std::exception&) {
      throw ConfigError("bad snapshot list entry: " + cell);
    }
  }
  return steps;
}

std::uint64_t snapshot_seed(std::uint64_t master, int step) {
  return splitmix64(master ^ (0x736e617000000000ull + static_cast<std::uint64_t>(step)));
}

struct FinetuneArgs {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed_override = -1;
  std::string snapshots = "0,25,50,100";
  int w1_every = -1;
};

int cmd_finetune(const FinetuneArgs& args) {
  auto setup = RunSetup::from_config(KvConfig::load(args.config_path));
  if (args.seed_override >= 0) setup.train.seed = static_cast<std::uint64_t>(args.seed_override);
  if (args.w1_every >= 0) setup.train.w1_every = args.w1_every;
  const auto snapshots = parse_snapshots(args.snapshots);

  const fs::path out(args.out_dir);
  fs::create_directories(out);

  const auto data = make_dataset(setup.dataset, setup.data_size, setup.train.seed);
  const auto base = gaussian_base(data.dim, setup.noise_std);
  Prng init_rng(setup.train.seed, Stream::critic_init);
  const auto critic_init = DenseNet::glorot_uniform_init(setup.critic_spec(data.dim), init_rng);

  const KvList artifacts = {{"stack_file", "stack.glstk"},
                            {"metrics_file", "metrics.csv"}};
  write_manifest(out / "manifest.meta", "finetune", setup, "incomplete", artifacts);

  const std::size_t snap_n = std::min<std::size_t>(data.size(), 500);
  const auto hook = [&](int k, const GradientLayerStack& stack) {
    if (std::find(snapshots.begin(), snapshots.end(), k) == snapshots.end()) return;
    const auto gen =
        generate(stack, snap_n, base, snapshot_seed(setup.train.seed, k), setup.train.squash);
    char name[32];
    std::snprintf(name, sizeof(name), "snap_%04d.svg", k);
    emit_scatter_svg({{"data", data}, {"generated", gen}}, (out / name).string());
  };

  const auto result = finetune(setup.train, data, base, critic_init, hook);

  save_stack(result.stack, (out / "stack.glstk").string());
  KvList meta;
  meta.emplace_back("seed", std::to_string(setup.train.seed));
  meta.emplace_back("created_at", utc_now());
  meta.emplace_back("config_hash", hex64(setup.config_hash()));
  meta.emplace_back("squash", setup.train.squash == Squash::none ? "none" : "tanh");
  meta.emplace_back("noise_std", fmt_double(setup.noise_std));
  meta.emplace_back("dataset", setup.dataset);
  write_kv_file(out / "stack.meta", meta);
  write_text_file((out / "metrics.csv").string(), finetune_metrics_csv(result.metrics));

  KvList done = artifacts;
  if (setup.train.w1_every > 0) {
    const auto gen = generate(result.stack, data.size(), base,
                              snapshot_seed(setup.train.seed, setup.train.outer_iters + 1),
                              setup.train.squash);
    done.emplace_back("final_w1", fmt_double(wasserstein(1, gen, data).cost));
  }
  write_manifest(out / "manifest.meta", "finetune", setup, "complete", done);
  return kExitOk;
}

struct GenerateArgs {
  std::string stack_path;
  std::size_t n = 500;
  std::int64_t seed = 0;
  std::string out_csv;
  double noise_std = -1.0;  // <0: take from the sidecar
};

int cmd_generate(const GenerateArgs& args) {
  const auto stack = load_stack(args.stack_path);
  double noise_std = 0.5;
  Squash squash = Squash::none;
  const fs::path meta_path = fs::path(args.stack_path).replace_extension(".meta");
  if (fs::exists(meta_path)) {
    const auto meta = KvConfig::load(meta_path.string());
    noise_std = meta.get_double("noise_std", 0.5);
    if (meta.get_or("squash", "none") == "tanh") squash = Squash::tanh_output;
  }
  if (args.noise_std >= 0.0) noise_std = args.noise_std;

  const int dim = stack.base_spec().input_dim();
  EmpiricalMeasure out(dim);
  if (args.n > 0) {
    out = generate(stack, args.n, gaussian_base(dim, noise_std),
                   static_cast<std::uint64_t>(args.seed), squash);
  }
  write_points_csv(out, args.out_csv, dim);
  return kExitOk;
}

struct AssistArgs {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed_override = -1;
};

int cmd_assist(const AssistArgs& args) {
  auto setup = RunSetup::from_config(KvConfig::load(args.config_path));
  if (args.seed_override >= 0) setup.train.seed = static_cast<std::uint64_t>(args.seed_override);

  const fs::path out(args.out_dir);
  fs::create_directories(out);

  const auto data = make_dataset(setup.dataset, setup.data_size, setup.train.seed);
  const auto noise = gaussian_base(setup.noise_dim, setup.noise_std);
  Prng critic_rng(setup.train.seed, Stream::critic_init);
  Prng gen_rng(setup.train.seed, Stream::generator_init);
  const auto critic_init = DenseNet::glorot_uniform_init(setup.critic_spec(data.dim), critic_rng);
  const auto generator_init =
      DenseNet::glorot_uniform_init(setup.generator_spec(data.dim), gen_rng);

  const KvList artifacts = {{"critic_file", "critic.glnet"},
                            {"generator_file", "generator.glnet"},
                            {"metrics_file", "metrics.csv"}};
  write_manifest(out / "manifest.meta", "assist", setup, "incomplete", artifacts);

  const auto result = assist_train(setup.train, data, noise, critic_init, generator_init);

  save_net(result.critic, (out / "critic.glnet").string());
  save_net(result.generator, (out / "generator.glnet").string());
  write_text_file((out / "metrics.csv").string(), finetune_metrics_csv(result.metrics));
  KvList meta;
  meta.emplace_back("seed", std::to_string(setup.train.seed));
  meta.emplace_back("created_at", utc_now());
  meta.emplace_back("config_hash", hex64(setup.config_hash()));
  meta.emplace_back("eta", fmt_double(setup.train.eta));
  meta.emplace_back("assist_layers", std::to_string(setup.train.assist_layers));
  meta.emplace_back("noise_std", fmt_double(setup.noise_std));
  meta.emplace_back("noise_dim", std::to_string(setup.noise_dim));
  write_kv_file(out / "assist.meta", meta);
  write_manifest(out / "manifest.meta", "assist", setup, "complete", artifacts);
  return kExitOk;
}

struct GenerateAssistArgs {
  std::string model_dir;
  std::size_t n = 500;
  std::int64_t seed = 0;
  std::string out_csv;
};

int cmd_generate_assist(const GenerateAssistArgs& args) {
  const fs::path dir(args.model_dir);
  const auto critic = load_net((dir / "critic.glnet").string());
  const auto generator = load_net((dir / "generator.glnet").string());
  const auto meta = KvConfig::load((dir / "assist.meta").string());
  const double eta = meta.get_double("eta");
  const int layers = static_cast<int>(meta.get_int("assist_layers"));
  const double noise_std = meta.get_double("noise_std", 0.5);
  const int noise_dim = static_cast<int>(meta.get_int("noise_dim", generator.input_dim()));

  EmpiricalMeasure out(generator.output_dim());
  if (args.n > 0) {
    out = generate_assist(critic, generator, eta, layers, args.n,
                          gaussian_base(noise_dim, noise_std), static_cast<std::uint64_t>(args.seed));
  }
  write_points_csv(out, args.out_csv, generator.output_dim());
  return kExitOk;
}

struct FlowDemoArgs {
  std::string oracle = "quadratic";
  double eta = 0.1;
  int iters = 50;
  std::string out_dir;
  std::size_t particles = 256;
  std::int64_t seed = 7;
  std::string snapshots = "0,25,50,100";
};

int cmd_flow_demo(const FlowDemoArgs& args) {
  if (!(args.eta > 0.0)) throw ConfigError("eta must be > 0");
  if (args.iters < 1) throw ConfigError("T must be >= 1");
  ExactOracle oracle;
  std::vector<std::vector<double>> marks;
  if (args.oracle == "quadratic") {
    oracle = quadratic_oracle({0.5, 0.25});
    marks = {{0.5, 0.25}};
  } else if (args.oracle == "two-well") {
    oracle = two_well_oracle({-0.7, 0.0}, {0.7, 0.0});
    marks = {{-0.7, 0.0}, {0.7, 0.0}};
  } else {
    throw ConfigError("unknown oracle: " + args.oracle + " (expected quadratic or two-well)");
  }

  const fs::path out(args.out_dir);
  fs::create_directories(out);
  KvList manifest;
  manifest.emplace_back("status", "incomplete");
  manifest.emplace_back("command", "flow-demo");
  manifest.emplace_back("oracle", args.oracle);
  manifest.emplace_back("eta", fmt_double(args.eta));
  manifest.emplace_back("T", std::to_string(args.iters));
  manifest.emplace_back("particles", std::to_string(args.particles));
  manifest.emplace_back("seed", std::to_string(args.seed));
  manifest.emplace_back("created_at", utc_now());
  write_kv_file(out / "manifest.meta", manifest);

  Prng rng(static_cast<std::uint64_t>(args.seed), Stream::particles);
  EmpiricalMeasure particles(2);
  particles.data.resize(2 * args.particles);
  for (double& v : particles.data) v = 0.5 * rng.normal();

  const auto run = fgd_exact(oracle, particles, args.eta, args.iters);
  write_text_file((out / "metrics.csv").string(), run_metrics_csv(run.metrics));

  const auto theorem = theorem1_audit(run.metrics, args.eta, args.iters, oracle.loss_floor);
  const auto descent = descent_audit(run.metrics, args.eta);
  int violations = 0;
  for (bool ok : descent.holds) violations += ok ? 0 : 1;
  KvList audit;
  audit.emplace_back("theorem1_lhs", fmt_double(theorem.lhs));
  audit.emplace_back("theorem1_rhs", fmt_double(theorem.rhs));
  audit.emplace_back("theorem1_satisfied", theorem.satisfied ? "true" : "false");
  audit.emplace_back("descent_all_hold", descent.all_hold ? "true" : "false");
  audit.emplace_back("descent_violations", std::to_string(violations));
  write_kv_file(out / "audit.txt", audit);

  EmpiricalMeasure targets(2);
  for (const auto& m : marks) targets.push_back(m);
  for (int k : parse_snapshots(args.snapshots)) {
    if (k < 0 || k > args.iters) continue;
    char name[32];
    std::snprintf(name, sizeof(name), "snap_%04d.svg", k);
    emit_scatter_svg({{"particles", run.trajectory[static_cast<std::size_t>(k)]},
                      {"target", targets}},
                     (out / name).string());
  }

  manifest[0].second = "complete";
  write_kv_file(out / "manifest.meta", manifest);
  std::cout << "theorem1_satisfied=" << (theorem.satisfied ? "true" : "false")
            << " descent_all_hold=" << (descent.all_hold ? "true" : "false") << "\n";
  return kExitOk;
}

struct EvalW1Args {
  std::string file_a;
  std::string file_b;
  int p = 1;
  std::string assignment_csv;
  bool brute = false;
};

int cmd_eval_w1(const EvalW1Args& args) {
  const auto mu = read_points_csv(args.file_a);
  const auto nu = read_points_csv(args.file_b);
  if (mu.size() > 500) {
    std::cerr << "note: exact assignment on " << mu.size() << " points is O(n^3); expect a wait\n";
  }
  const auto plan = wasserstein(args.p, mu, nu);
  std::cout << fmt_double(plan.cost) << "\n";
  if (args.brute) {
    const auto reference = brute_force_wasserstein(args.p, mu, nu);
    if (reference.cost != plan.cost) {
      throw NumericError("assignment cost disagrees with the brute-force oracle");
    }
    std::cout << "brute_cost=" << fmt_double(reference.cost) << "\n";
  }
  if (!args.assignment_csv.empty()) {
    std::string csv = "source,target\n";
    for (std::size_t i = 0; i < plan.permutation.size(); ++i) {
      csv += std::to_string(i) + ',' + std::to_string(plan.permutation[i]) + '\n';
    }
    write_text_file(args.assignment_csv, csv);
  }
  return kExitOk;
}

struct DatasetsDumpArgs {
  std::string name = "eight_gaussians";
  std::size_t n = 500;
  std::int64_t seed = 0;
  std::string out_csv;
};

int cmd_datasets_dump(const DatasetsDumpArgs& args) {
  const auto data = make_dataset(args.name, args.n, static_cast<std::uint64_t>(args.seed));
  write_points_csv(data, args.out_csv);
  return kExitOk;
}

int fail(int code, const std::string& what) {
  std::cerr << "error_code=" << code << "\n" << what << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradient-layer training, generation, and transport diagnostics"};
  app.require_subcommand(1);

  FinetuneArgs ft;
  auto* ft_cmd = app.add_subcommand("finetune", "stack gradient layers on a toy dataset");
  ft_cmd->add_option("--config", ft.config_path, "key = value config file")->required();
  ft_cmd->add_option("--out", ft.out_dir, "output directory")->required();
  ft_cmd->add_option("--seed", ft.seed_override, "override the config seed");
  ft_cmd->add_option("--snapshots", ft.snapshots, "comma-separated outer steps to render");
  ft_cmd->add_option("--w1-every", ft.w1_every, "record W1 to data every N outer steps");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "sample through a saved stack");
  gen_cmd->add_option("--stack", gen.stack_path, "stack file (.glstk)")->required();
  gen_cmd->add_option("--n", gen.n, "number of samples");
  gen_cmd->add_option("--seed", gen.seed, "sampling seed");
  gen_cmd->add_option("--out", gen.out_csv, "output CSV")->required();
  gen_cmd->add_option("--noise-std", gen.noise_std, "override the sidecar base noise std");

  AssistArgs as;
  auto* as_cmd = app.add_subcommand("assist", "train WGAN-GP with assist-mode gradient layers");
  as_cmd->add_option("--config", as.config_path, "key = value config file")->required();
  as_cmd->add_option("--out", as.out_dir, "output directory")->required();
  as_cmd->add_option("--seed", as.seed_override, "override the config seed");

  GenerateAssistArgs ga;
  auto* ga_cmd = app.add_subcommand("generate-assist", "sample from an assist-mode model");
  ga_cmd->add_option("--model", ga.model_dir, "assist output directory")->required();
  ga_cmd->add_option("--n", ga.n, "number of samples");
  ga_cmd->add_option("--seed", ga.seed, "sampling seed");
  ga_cmd->add_option("--out", ga.out_csv, "output CSV")->required();

  FlowDemoArgs fd;
  auto* fd_cmd = app.add_subcommand("flow-demo", "exact-oracle functional gradient descent");
  fd_cmd->add_option("--oracle", fd.oracle, "quadratic or two-well");
  fd_cmd->add_option("--eta", fd.eta, "learning rate");
  fd_cmd->add_option("--T", fd.iters, "iterations");
  fd_cmd->add_option("--out", fd.out_dir, "output directory")->required();
  fd_cmd->add_option("--particles", fd.particles, "particle count");
  fd_cmd->add_option("--seed", fd.seed, "particle seed");
  fd_cmd->add_option("--snapshots", fd.snapshots, "steps to render");

  EvalW1Args ew;
  auto* ew_cmd = app.add_subcommand("eval-w1", "exact W_p between two point files");
  ew_cmd->add_option("--a", ew.file_a, "first points CSV")->required();
  ew_cmd->add_option("--b", ew.file_b, "second points CSV")->required();
  ew_cmd->add_option("--p", ew.p, "exponent (1 or 2)");
  ew_cmd->add_option("--assignment", ew.assignment_csv, "write the optimal assignment CSV here");
  ew_cmd->add_flag("--brute", ew.brute, "cross-check against the exhaustive oracle (n <= 8)");

  DatasetsDumpArgs dd;
  auto* dd_cmd = app.add_subcommand("datasets-dump", "write a toy dataset as CSV");
  dd_cmd->add_option("--name", dd.name, "eight_gaussians, twenty_five_gaussians, swiss_roll");
  dd_cmd->add_option("--n", dd.n, "number of points");
  dd_cmd->add_option("--seed", dd.seed, "dataset seed");
  dd_cmd->add_option("--out", dd.out_csv, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitConfig, e.what());
  }

  try {
    if (*ft_cmd) return cmd_finetune(ft);
    if (*gen_cmd) return cmd_generate(gen);
    if (*as_cmd) return cmd_assist(as);
    if (*ga_cmd) return cmd_generate_assist(ga);
    if (*fd_cmd) return cmd_flow_demo(fd);
    if (*ew_cmd) return cmd_eval_w1(ew);
    if (*dd_cmd) return cmd_datasets_dump(dd);
  } catch (const ConfigError& e) {
    return fail(kExitConfig, e.what());
  } catch (const NumericError& e) {
    return fail(kExitNumeric, e.what());
  } catch (const StackIoError& e) {
    return fail(kExitIo, e.what());
  } catch (const ShapeError& e) {
    return fail(kExitConfig, e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(kExitIo, e.what());
  } catch (const std::exception& e) {
    return fail(kExitIo, e.what());
  }
  return fail(kExitConfig, "no subcommand given");
}
