#include "seigen/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <numeric>
#include <sstream>

#include "seigen/datagen.hpp"
#include "seigen/errors.hpp"

namespace seigen {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ConfigError("bad value for " + key + ": '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "off" || value == "0" || value == "no") return false;
  throw ConfigError("bad boolean for " + key + ": '" + value + "'");
}

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, double>) out += fmt_double(items[i]);
    else if constexpr (std::is_same_v<T, std::string>) out += items[i];
    else out += std::to_string(items[i]);
  }
  return out;
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  auto& p = c.protocol;
  if (key == "parties") c.parties = parse_number<std::size_t>(key, value);
  else if (key == "k") c.k = parse_number<std::size_t>(key, value);
  else if (key == "sizes") {
    c.sizes.clear();
    for (const auto& s : split_list(value)) c.sizes.push_back(parse_number<std::size_t>(key, s));
  } else if (key == "gap") c.gap = parse_number<double>(key, value);
  else if (key == "data") c.data = split_list(value);
  else if (key == "keys") c.keys = value;
  else if (key == "output") c.output = value;
  else if (key == "oracle") c.oracle = value;
  else if (key == "encryption") p.encryption = parse_bool(key, value);
  else if (key == "scaling") p.scaling = parse_bool(key, value);
  else if (key == "padding") {
    p.padding.clear();
    for (const auto& s : split_list(value)) p.padding.push_back(parse_number<double>(key, s));
  } else if (key == "obfuscation_p") p.obfuscation_p = parse_number<double>(key, value);
  else if (key == "noise_sigma") p.noise_sigma = parse_number<double>(key, value);
  else if (key == "obfuscation_style") {
    try {
      p.obfuscation_style = protocol::parse_obfuscation_style(value);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "eps") p.eps = parse_number<double>(key, value);
  else if (key == "max_rounds") p.max_rounds = parse_number<int>(key, value);
  else if (key == "window") p.window = parse_number<int>(key, value);
  else if (key == "repeat_count") p.repeat_count = parse_number<int>(key, value);
  else if (key == "fraction_bits") p.fraction_bits = parse_number<int>(key, value);
  else if (key == "scalar_range") p.scalar_range = parse_number<std::uint64_t>(key, value);
  else if (key == "seed") p.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "key_bits") p.key_bits = parse_number<unsigned>(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_run_config(std::istream& in) {
  RunConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return parse_run_config(in);
}

void RunConfig::validate() const {
  if (parties < 2) throw ConfigError("need at least two parties");
  if (k == 0) throw ConfigError("k must be positive");
  if (data.empty()) {
    if (sizes.size() != parties) throw ConfigError("sizes must list one width per party");
    if (!(gap > 0.0 && gap < 1.0)) throw ConfigError("gap must lie in (0, 1)");
  } else if (data.size() != parties) {
    throw ConfigError("data must list one file per party");
  }
  protocol.validate(parties);
}

std::string render_run_config(const RunConfig& c) {
  const auto& p = c.protocol;
  std::ostringstream out;
  out << "parties = " << c.parties << "\n"
      << "k = " << c.k << "\n"
      << "sizes = " << join(c.sizes) << "\n"
      << "gap = " << fmt_double(c.gap) << "\n";
  if (!c.data.empty()) out << "data = " << join(c.data) << "\n";
  if (!c.keys.empty()) out << "keys = " << c.keys << "\n";
  if (!c.output.empty()) out << "output = " << c.output << "\n";
  if (!c.oracle.empty()) out << "oracle = " << c.oracle << "\n";
  out << "encryption = " << (p.encryption ? "true" : "false") << "\n"
      << "scaling = " << (p.scaling ? "true" : "false") << "\n";
  if (p.padded()) out << "padding = " << join(p.padding) << "\n";
  out << "obfuscation_p = " << fmt_double(p.obfuscation_p) << "\n"
      << "noise_sigma = " << fmt_double(p.noise_sigma) << "\n"
      << "obfuscation_style = " << protocol::to_string(p.obfuscation_style) << "\n"
      << "eps = " << fmt_double(p.eps) << "\n"
      << "max_rounds = " << p.max_rounds << "\n"
      << "window = " << p.window << "\n"
      << "repeat_count = " << p.repeat_count << "\n"
      << "fraction_bits = " << p.fraction_bits << "\n"
      << "scalar_range = " << p.scalar_range << "\n"
      << "seed = " << p.seed << "\n"
      << "key_bits = " << p.key_bits << "\n";
  return out.str();
}

std::string mode_label(const protocol::ProtocolConfig& p) {
  std::string label;
  const auto add = [&](const char* part) {
    if (!label.empty()) label += "+";
    label += part;
  };
  if (p.encryption) add("enc");
  if (p.scaling) add("scale");
  if (p.padded()) add("pad");
  if (p.obfuscated()) add("obf");
  return label.empty() ? "basic" : label;
}

std::vector<DenseMatrix> load_datasets(const RunConfig& c) {
  if (!c.data.empty()) {
    std::vector<DenseMatrix> out;
    for (const auto& path : c.data) {
      DenseMatrix m = load_matrix(path);
      if (m.rows() != c.k)
        throw ConfigError(path + " has " + std::to_string(m.rows()) + " rows, expected k = " +
                          std::to_string(c.k));
      out.push_back(std::move(m));
    }
    return out;
  }
  SyntheticSpec spec;
  spec.k = c.k;
  spec.sizes = c.sizes;
  spec.gap = c.gap;
  spec.seed = c.protocol.seed;
  return generate_synthetic(spec).parts;
}

std::shared_ptr<const paillier::KeyPair> load_or_generate_keys(const RunConfig& c) {
  if (!c.protocol.encryption) return nullptr;
  if (!c.keys.empty()) {
    std::ifstream in(c.keys, std::ios::binary);
    if (!in) throw ConfigError("cannot open key file " + c.keys);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return std::make_shared<const paillier::KeyPair>(paillier::deserialize_key_pair(
        std::vector<std::uint8_t>(bytes.begin(), bytes.end())));
  }
  return nullptr;
}

BenchRow bench_row(const protocol::ProtocolConfig& config, const protocol::ProtocolResult& result,
                   std::size_t k, std::size_t parties) {
  BenchRow row;
  row.mode = mode_label(config);
  row.k = k;
  row.parties = parties;
  row.rounds = result.rounds_total;
  std::uint64_t enc = 0;
  std::uint64_t dec = 0;
  for (const auto& per_party : result.ops)
    for (const auto& ops : per_party) {
      enc += ops.encryptions;
      dec += ops.decryptions;
    }
  const double denom = static_cast<double>(parties) * std::max(1, result.rounds_total);
  row.enc_ops = static_cast<double>(enc) / denom;
  row.dec_ops = static_cast<double>(dec) / denom;
  const CostReport cost = account(result.transcript, 1, static_cast<std::uint32_t>(result.rounds_total));
  const double rounds = std::max(1, result.rounds_total);
  row.elements = static_cast<double>(cost.iteration_total.elements) / rounds;
  row.bytes = static_cast<double>(cost.iteration_total.bytes) / rounds;
  row.ms_party = result.party_ms;
  row.ms_arbitrator = result.arbitrator_ms;
  return row;
}

std::string render_bench_row(const BenchRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%d,%.6g,%.6g,%.6g,%.6g,%.3f,%.3f", r.mode.c_str(), r.k,
                r.parties, r.rounds, r.enc_ops, r.dec_ops, r.elements, r.bytes, r.ms_party,
                r.ms_arbitrator);
  return buf;
}

}  // namespace seigen
