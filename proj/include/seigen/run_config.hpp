#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "seigen/linalg.hpp"
#include "seigen/paillier.hpp"
#include "seigen/protocol.hpp"

namespace seigen {

// File-backed run description: flat "key = value" lines, '#' comments.
struct RunConfig {
  protocol::ProtocolConfig protocol;
  std::size_t parties = 2;
  std::size_t k = 20;
  std::vector<std::size_t> sizes{15, 15};
  double gap = 0.5;
  // Party matrix files; when empty the data is synthesized from k, sizes,
  // gap and seed.
  std::vector<std::string> data;
  std::string keys;    // serialized key pair; generated when empty
  std::string output;  // run directory
  std::string oracle;  // optional matrix whose oracle eigenvector is compared

  void validate() const;  // throws ConfigError
};

RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::string& path);
std::string render_run_config(const RunConfig& config);
// Applies a single "key=value" assignment; throws ConfigError.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

// "basic", "enc", "enc+scale", "enc+scale+pad", ... with "+obf" appended
// when the arbitrator obfuscates.
std::string mode_label(const protocol::ProtocolConfig& config);

std::vector<DenseMatrix> load_datasets(const RunConfig& config);
std::shared_ptr<const paillier::KeyPair> load_or_generate_keys(const RunConfig& config);

// One bench measurement; op and traffic counts are per party per round
// (elements and bytes per round for the whole network).
struct BenchRow {
  std::string mode;
  std::size_t k = 0;
  std::size_t parties = 0;
  int rounds = 0;
  double enc_ops = 0.0;
  double dec_ops = 0.0;
  double elements = 0.0;
  double bytes = 0.0;
  double ms_party = 0.0;
  double ms_arbitrator = 0.0;
};

inline constexpr const char* kBenchHeader =
    "mode,k,N,rounds,enc_ops,dec_ops,elements,bytes,ms_party,ms_arbitrator";
BenchRow bench_row(const protocol::ProtocolConfig& config, const protocol::ProtocolResult& result,
                   std::size_t k, std::size_t parties);
std::string render_bench_row(const BenchRow& row);

}  // namespace seigen
