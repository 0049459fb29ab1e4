// Command-line driver: keygen, gendata, run, attack, bench.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seigen/adversary.hpp"
#include "seigen/datagen.hpp"
#include "seigen/errors.hpp"
#include "seigen/protocol.hpp"
#include "seigen/run_config.hpp"

namespace fs = std::filesystem;
using namespace seigen;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitProtocol = 3;
constexpr int kExitNonConvergence = 4;

// Files inside a run directory.
constexpr const char* kTranscriptFile = "transcript.bin";
constexpr const char* kKeysFile = "keys.bin";
constexpr const char* kConfigFile = "config.txt";
constexpr const char* kStatsFile = "stats.txt";
constexpr const char* kResultFile = "eigenvector.txt";
constexpr const char* kEmissionsFile = "emissions.txt";

constexpr std::size_t kOutlierWindow = 8;
constexpr double kOutlierZ = 2.0;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t effective_seed(std::uint64_t flag_seed) {
  if (const char* env = std::getenv("SEIGEN_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(std::string("SEIGEN_SEED is not an unsigned integer: ") + env);
    }
  }
  return flag_seed;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

fs::path party_file(const fs::path& dir, std::size_t p) {
  return dir / ("party_" + std::to_string(p) + ".txt");
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// ---- keygen ---------------------------------------------------------------

int cmd_keygen(unsigned bits, const std::string& out, std::uint64_t seed) {
  if (bits < paillier::kMinKeyBits || bits % 2 != 0)
    throw ConfigError("key size must be even and at least " + std::to_string(paillier::kMinKeyBits));
  auto rng = protocol::stream_rng(effective_seed(seed), protocol::Stream::kKeygen);
  const auto keys = paillier::keygen(bits, rng);
  write_bytes(out, paillier::serialize_key_pair(keys));
  std::cout << "bits=" << bits << "\nkey_id=" << keys.pub.key_id << "\nout=" << out << "\n";
  return kExitOk;
}

// ---- gendata --------------------------------------------------------------

int cmd_gendata(std::size_t k, const std::vector<std::size_t>& sizes, double gap, std::uint64_t seed,
                const std::string& out_dir) {
  if (!(gap > 0.0 && gap < 1.0)) throw ConfigError("gap must lie in (0, 1)");
  if (sizes.empty()) throw ConfigError("sizes must list at least one party width");
  SyntheticSpec spec;
  spec.k = k;
  spec.sizes = sizes;
  spec.gap = gap;
  spec.seed = effective_seed(seed);
  SyntheticData data;
  try {
    data = generate_synthetic(spec);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  fs::create_directories(out_dir);
  for (std::size_t p = 0; p < data.parts.size(); ++p) save_matrix(party_file(out_dir, p + 1).string(), data.parts[p]);
  save_matrix((fs::path(out_dir) / "combined.txt").string(), data.combined);
  std::cout << "k=" << k << "\nparties=" << sizes.size() << "\ngap=" << fmt(gap)
            << "\nlambda_1=" << fmt(data.eigenvalues[0]) << "\nlambda_2=" << fmt(data.eigenvalues[1])
            << "\nout_dir=" << out_dir << "\n";
  return kExitOk;
}

// ---- run ------------------------------------------------------------------

RunConfig resolve_config(const std::string& path, const std::vector<std::string>& overrides,
                         std::optional<std::uint64_t> seed) {
  RunConfig config = load_run_config(path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (seed) config.protocol.seed = *seed;
  config.protocol.seed = effective_seed(config.protocol.seed);
  // Relative data/key paths are taken relative to the config file.
  const fs::path base = fs::path(path).parent_path();
  for (auto& d : config.data)
    if (fs::path(d).is_relative()) d = (base / d).string();
  if (!config.keys.empty() && fs::path(config.keys).is_relative()) config.keys = (base / config.keys).string();
  if (!config.oracle.empty() && fs::path(config.oracle).is_relative())
    config.oracle = (base / config.oracle).string();
  config.validate();
  return config;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            std::optional<std::uint64_t> seed, const std::string& output, bool oracle) {
  RunConfig config = resolve_config(config_path, overrides, seed);
  if (!output.empty()) config.output = output;
  if (config.output.empty()) throw ConfigError("no output directory (set output = ... or --output)");

  const auto datasets = load_datasets(config);
  const auto keys = load_or_generate_keys(config);
  Bus bus(static_cast<std::uint16_t>(datasets.size()));
  const auto start = std::chrono::steady_clock::now();
  const auto result = protocol::run_protocol(datasets, config.protocol, bus, keys);
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  const fs::path dir = config.output;
  fs::create_directories(dir);
  result.transcript.save((dir / kTranscriptFile).string());
  if (result.keys) write_bytes(dir / kKeysFile, paillier::serialize_key_pair(*result.keys));
  for (std::size_t p = 0; p < datasets.size(); ++p) save_matrix(party_file(dir, p + 1).string(), datasets[p]);
  RunConfig resolved = config;
  resolved.data.clear();
  for (std::size_t p = 0; p < datasets.size(); ++p) resolved.data.push_back(party_file(dir, p + 1).filename().string());
  resolved.keys = result.keys ? kKeysFile : "";
  resolved.output.clear();
  resolved.oracle.clear();
  write_text(dir / kConfigFile, render_run_config(resolved));
  save_matrix((dir / kResultFile).string(), DenseMatrix(result.eigenvector.size(), 1, result.eigenvector));
  {
    std::ostringstream log;
    for (const auto& e : result.emissions)
      log << e.round << " " << protocol::to_string(e.kind) << " " << e.source_round << " " << e.scale << "\n";
    write_text(dir / kEmissionsFile, log.str());
  }

  const BenchRow row = bench_row(config.protocol, result, config.k, datasets.size());
  std::ostringstream stats;
  stats << "mode=" << row.mode << "\n"
        << "parties=" << datasets.size() << "\n"
        << "k=" << config.k << "\n"
        << "rounds_total=" << result.rounds_total << "\n"
        << "rounds_valid=" << result.rounds_valid << "\n"
        << "first_converged_party=" << result.first_converged_party << "\n"
        << "elements_per_round=" << fmt(row.elements) << "\n"
        << "bytes_per_round=" << fmt(row.bytes) << "\n"
        << "enc_ops_per_party_round=" << fmt(row.enc_ops) << "\n"
        << "dec_ops_per_party_round=" << fmt(row.dec_ops) << "\n"
        << "wall_ms=" << fmt(wall_ms) << "\n"
        << "ms_party=" << fmt(result.party_ms) << "\n"
        << "ms_arbitrator=" << fmt(result.arbitrator_ms) << "\n";
  if (oracle || !config.oracle.empty()) {
    const DenseMatrix m = config.oracle.empty() ? hconcat(datasets) : load_matrix(config.oracle);
    const auto top = jacobi_eigen_oracle(gram(m)).front();
    stats << "cosine=" << fmt(abs_cosine(result.eigenvector, top.vector)) << "\n";
  }
  write_text(dir / kStatsFile, stats.str());
  std::cout << stats.str();
  return kExitOk;
}

// ---- attack ---------------------------------------------------------------

struct RunDir {
  RunConfig config;
  std::vector<DenseMatrix> data;
  std::shared_ptr<const paillier::KeyPair> keys;
  Transcript transcript;
  std::vector<bool> decoys;
};

RunDir load_run_dir(const fs::path& transcript_path) {
  RunDir r;
  const fs::path dir = transcript_path.parent_path();
  r.config = load_run_config((dir / kConfigFile).string());
  for (auto& d : r.config.data) d = (dir / d).string();
  if (!r.config.keys.empty()) r.config.keys = (dir / r.config.keys).string();
  r.data = load_datasets(r.config);
  r.keys = load_or_generate_keys(r.config);
  r.transcript = Transcript::load(transcript_path.string());
  std::ifstream log(dir / kEmissionsFile);
  if (!log) throw IoError("cannot open " + (dir / kEmissionsFile).string());
  std::string line;
  while (std::getline(log, line)) {
    std::istringstream ss(line);
    std::uint32_t round;
    std::string kind;
    if (ss >> round >> kind) r.decoys.push_back(kind == "decoy");
  }
  return r;
}

adversary::AttackReport colspace_report(const RunDir& r, const adversary::PartyView& view, std::size_t party,
                                        const std::string& mode) {
  adversary::AttackReport rep{"colspace", mode, "max_principal_angle", 0.0, 1e-6, false, ""};
  std::vector<DenseMatrix> others;
  for (std::size_t p = 0; p < r.data.size(); ++p)
    if (p + 1 != party) others.push_back(r.data[p]);
  const DenseMatrix other = hconcat(others);
  const auto truth = column_space(other, default_null_tolerance(other));
  if (truth.empty()) {
    rep.note = "other_data_zero";
    return rep;
  }
  try {
    const auto est = adversary::attack_colspace(view, truth.size());
    rep.value = adversary::max_principal_angle(est.basis, truth);
    rep.success = rep.value <= rep.threshold;
  } catch (const InsufficientDataError&) {
    rep.value = std::numbers::pi / 2;
    rep.note = "insufficient_rounds";
  }
  return rep;
}

adversary::AttackReport nullspace_report(const RunDir& r, const adversary::PartyView& view, std::size_t party,
                                         const std::string& mode) {
  adversary::AttackReport rep{"nullspace", mode, "max_principal_angle", 0.0, 1e-6, false, ""};
  DenseMatrix own = r.data[party - 1];
  if (r.config.protocol.padded()) own = pad_matrix(own, r.config.protocol.padding[party - 1]);
  const auto est = adversary::attack_nullspace(view, own);
  if (est.attack_void) {
    rep.metric = "null_dimension";
    rep.note = "attack_void";
    return rep;
  }
  std::vector<DenseMatrix> others;
  for (std::size_t p = 0; p < r.data.size(); ++p)
    if (p + 1 != party) others.push_back(r.data[p]);
  const auto truth = adversary::projected_column_space(est.null_basis, hconcat(others));
  if (truth.empty() || est.projections.size() < truth.size()) {
    rep.value = std::numbers::pi / 2;
    rep.note = truth.empty() ? "no_projection" : "insufficient_rounds";
    return rep;
  }
  rep.value = adversary::max_principal_angle(dominant_subspace(est.projections, truth.size()), truth);
  rep.success = rep.value <= rep.threshold;
  return rep;
}

adversary::AttackReport krylov_report(const RunDir& r, const adversary::PartyView& view, const std::string& mode) {
  adversary::AttackReport rep{"krylov", mode, "cosine_second_eigenvector", 0.0, 1 - 1e-3, false, ""};
  const auto u = view.received_vectors();
  try {
    const auto est = adversary::attack_krylov(u, normalize(u.back()));
    if (!est.has_signal) {
      rep.note = "insufficient_signal";
      return rep;
    }
    const auto pairs = jacobi_eigen_oracle(outer_gram(hconcat(r.data)));
    rep.value = abs_cosine(est.second.vector, pairs.at(1).vector);
    rep.success = rep.value >= rep.threshold;
  } catch (const InsufficientDataError&) {
    rep.note = "insufficient_rounds";
  }
  return rep;
}

adversary::AttackReport outlier_report(const RunDir& r, const adversary::PartyView& view, const std::string& mode) {
  adversary::AttackReport rep{"outlier", mode, "recall", 0.0, 0.9, false, ""};
  const auto u = view.received_vectors();
  if (u.size() <= kOutlierWindow) {
    rep.note = "insufficient_rounds";
    return rep;
  }
  auto truth = r.decoys;
  truth.resize(u.size(), false);
  const auto out = adversary::attack_outlier(u, kOutlierWindow, kOutlierZ);
  const auto m = adversary::score_detection(out.decoy, truth, kOutlierWindow);
  if (!m.recall) {
    rep.note = "no_decoys";
    return rep;
  }
  rep.value = *m.recall;
  rep.success = rep.value >= rep.threshold;
  if (m.precision) rep.note = "precision=" + fmt(*m.precision);
  return rep;
}

adversary::AttackReport search_cost_report(const RunDir& r, const adversary::PartyView& view,
                                           const std::string& mode) {
  adversary::AttackReport rep{"krylov_search", mode, "log10_subsets", 0.0, 0.0, false, ""};
  const std::uint64_t n = view.rounds.size();
  const std::uint64_t k = r.config.k;
  if (n < k) {
    rep.note = "fewer_rounds_than_k";
    return rep;
  }
  const mpz_class cost = adversary::krylov_verification_cost(k, n);
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, cost.get_mpz_t());
  rep.value = std::log10(mant) + static_cast<double>(exp) * std::log10(2.0);
  rep.success = rep.value <= rep.threshold;
  return rep;
}

int cmd_attack(const std::string& transcript, std::size_t party, std::string mode, const std::string& attack) {
  const RunDir r = load_run_dir(transcript);
  if (party < 1 || party > r.data.size()) throw ConfigError("party must be in 1.." + std::to_string(r.data.size()));
  if (mode.empty()) mode = mode_label(r.config.protocol);
  std::optional<FixedPointCodec> codec;
  if (r.keys) codec = protocol::make_session(r.data, r.config.protocol, r.keys).codec;
  const auto view = adversary::make_party_view(r.transcript, static_cast<std::uint16_t>(party), r.keys.get(),
                                               codec ? &*codec : nullptr);
  const bool all = attack == "all";
  bool any = false;
  auto emit = [&](const char* name, auto&& fn) {
    if (all || attack == name) {
      std::cout << fn().render() << "\n";
      any = true;
    }
  };
  emit("colspace", [&] { return colspace_report(r, view, party, mode); });
  emit("nullspace", [&] { return nullspace_report(r, view, party, mode); });
  emit("krylov", [&] { return krylov_report(r, view, mode); });
  emit("outlier", [&] { return outlier_report(r, view, mode); });
  emit("krylov_search", [&] { return search_cost_report(r, view, mode); });
  if (!any) throw ConfigError("unknown attack '" + attack + "'");
  return kExitOk;
}

// ---- bench ----------------------------------------------------------------

int cmd_bench(const std::string& config_path, const std::vector<std::string>& overrides,
              std::optional<std::uint64_t> seed, int repeats, int threads) {
  if (repeats < 1) throw ConfigError("repeats must be positive");
  const RunConfig config = resolve_config(config_path, overrides, seed);
  const auto datasets = load_datasets(config);
  auto keys = load_or_generate_keys(config);
  if (config.protocol.encryption && !keys) {
    auto rng = protocol::stream_rng(config.protocol.seed, protocol::Stream::kKeygen);
    keys = std::make_shared<const paillier::KeyPair>(paillier::keygen(config.protocol.key_bits, rng));
  }
  auto one = [&]() {
    Bus bus(static_cast<std::uint16_t>(datasets.size()));
    const auto result = protocol::run_protocol(datasets, config.protocol, bus, keys);
    return bench_row(config.protocol, result, config.k, datasets.size());
  };
  std::vector<BenchRow> rows;
  if (threads > 1) {
    std::vector<std::future<BenchRow>> pending;
    for (int i = 0; i < repeats; ++i) {
      if (static_cast<int>(pending.size()) == threads) {
        rows.push_back(pending.front().get());
        pending.erase(pending.begin());
      }
      pending.push_back(std::async(std::launch::async, one));
    }
    for (auto& f : pending) rows.push_back(f.get());
  } else {
    for (int i = 0; i < repeats; ++i) rows.push_back(one());
  }
  std::cout << kBenchHeader << "\n";
  for (const auto& row : rows) std::cout << render_bench_row(row) << "\n";

  // Per-round cost law: every party does k+1 encryptions and decryptions,
  // and a round moves 2Nk + 2N elements.
  const double n = static_cast<double>(datasets.size());
  const double k = static_cast<double>(config.k);
  for (const auto& row : rows) {
    const double expected_ops = config.protocol.encryption ? k + 1 : 0.0;
    if (row.enc_ops != expected_ops || row.dec_ops != expected_ops || row.elements != 2 * n * k + 2 * n)
      throw ProtocolError("bench cost check failed for mode " + row.mode);
  }
  std::cerr << "cost_check=pass\n";
  return kExitOk;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoul(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad size '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving principal eigenvector computation"};
  app.require_subcommand(1);

  unsigned bits = paillier::kDefaultKeyBits;
  std::string key_out = "keys.bin";
  std::uint64_t seed = 1;
  auto* keygen = app.add_subcommand("keygen", "Generate a Paillier key pair");
  keygen->add_option("--bits", bits, "Modulus size in bits")->capture_default_str();
  keygen->add_option("--out", key_out, "Output file")->capture_default_str();
  keygen->add_option("--seed", seed, "Random seed")->capture_default_str();

  std::size_t k = 20;
  std::string sizes_text = "15,15";
  double gap = 0.5;
  std::string out_dir = "data";
  auto* gendata = app.add_subcommand("gendata", "Synthesize party data with a prescribed spectrum");
  gendata->add_option("--k", k, "Row dimension")->capture_default_str();
  gendata->add_option("--sizes", sizes_text, "Comma-separated column counts, one per party")->capture_default_str();
  gendata->add_option("--gap", gap, "lambda_2 / lambda_1, in (0, 1)")->capture_default_str();
  gendata->add_option("--seed", seed, "Random seed")->capture_default_str();
  gendata->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> run_seed;
  std::string output;
  bool oracle = false;
  auto* run = app.add_subcommand("run", "Run the protocol and write a run directory");
  run->add_option("--config", config_path, "Run configuration file")->required();
  run->add_option("--set", overrides, "Override a config entry (key=value)");
  run->add_option("--seed", run_seed, "Random seed");
  run->add_option("--output", output, "Run directory (overrides the config)");
  run->add_flag("--oracle", oracle, "Report cosine against the Jacobi oracle");

  std::string transcript;
  std::size_t party = 1;
  std::string mode;
  std::string attack = "all";
  auto* atk = app.add_subcommand("attack", "Run semi-honest inference attacks on a recorded run");
  atk->add_option("--transcript", transcript, "transcript.bin inside a run directory")->required();
  atk->add_option("--party", party, "Attacking party (1-based)")->capture_default_str();
  atk->add_option("--mode", mode, "Label for the mode under test (defaults to the run's mode)");
  atk->add_option("--attack", attack, "colspace, nullspace, krylov, outlier, krylov_search or all")
      ->capture_default_str();

  int repeats = 1;
  int threads = 1;
  auto* bench = app.add_subcommand("bench", "Repeat runs and print per-round cost as CSV");
  bench->add_option("--config", config_path, "Run configuration file")->required();
  bench->add_option("--set", overrides, "Override a config entry (key=value)");
  bench->add_option("--seed", run_seed, "Random seed");
  bench->add_option("--repeats", repeats, "Number of runs")->capture_default_str();
  bench->add_option("--threads", threads, "Concurrent runs")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*keygen) return cmd_keygen(bits, key_out, seed);
    if (*gendata) return cmd_gendata(k, parse_sizes(sizes_text), gap, seed, out_dir);
    if (*run) return cmd_run(config_path, overrides, run_seed, output, oracle);
    if (*atk) return cmd_attack(transcript, party, mode, attack);
    if (*bench) return cmd_bench(config_path, overrides, run_seed, repeats, threads);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NonConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return kExitProtocol;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
