#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "primechain/chains.hpp"
#include "primechain/errors.hpp"

namespace primechain::store {

using nlohmann::json;

inline std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

/// Append-only JSONL store. Every record is one self-describing JSON object
/// per line; nothing is ever rewritten.
class ChainStore {
 public:
  explicit ChainStore(std::filesystem::path path) : path_(std::move(path)) {}

  /// Resolution order: explicit path flag, PRIMECHAIN_STORE, then a local
  /// default file.
  static std::filesystem::path default_path() {
    if (const char* env = std::getenv("PRIMECHAIN_STORE"); env != nullptr && *env != '\0')
      return env;
    return "primechain_store.jsonl";
  }

  const std::filesystem::path& path() const { return path_; }

  void append(const json& record) {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw error("store: cannot open '" + path_.string() + "' for append");
    out << record.dump() << '\n';
    if (!out) throw error("store: write to '" + path_.string() + "' failed");
  }

  std::vector<json> read_all() const {
    std::vector<json> records;
    std::ifstream in(path_);
    if (!in) return records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        records.push_back(json::parse(line));
      } catch (const json::parse_error& e) {
        throw parse_error("store: bad JSON on line " + std::to_string(lineno) + " of '" +
                          path_.string() + "': " + e.what());
      }
    }
    return records;
  }

 private:
  std::filesystem::path path_;
};

/// Chain as a store record. Primes are decimal strings (they outgrow any
/// fixed-width integer), the rule is its spec string, and the seed rides
/// along as certified digits when one is known.
inline json chain_record(const PrimeChain& chain, std::string_view provenance) {
  json rec;
  rec["kind"] = "chain";
  rec["rule"] = chain.rule.spec();
  rec["policy"] = policy_name(chain.policy);
  json primes = json::array();
  for (const auto& p : chain.primes) primes.push_back(p.get_str());
  rec["primes"] = std::move(primes);
  rec["length"] = chain.primes.size();
  if (!chain.primes.empty()) rec["last_digits"] = digits10(chain.primes.back());
  if (chain.seed) {
    const std::string digits = certified_decimal(*chain.seed, 120);
    if (!digits.empty()) rec["seed_digits"] = digits;
  }
  rec["provenance"] = std::string(provenance);
  rec["timestamp"] = iso8601_now();
  return rec;
}

inline PrimeChain chain_from_record(const json& rec) {
  if (!rec.is_object() || rec.value("kind", "") != "chain")
    throw parse_error("store: record is not a chain");
  PrimeChain chain;
  chain.rule = GrowthRule::parse(rec.at("rule").get<std::string>());
  const std::string policy = rec.value("policy", "nearest");
  chain.policy = policy == "next-above" ? SelectionPolicy::NextAbove : SelectionPolicy::Nearest;
  for (const auto& p : rec.at("primes")) chain.primes.emplace_back(p.get<std::string>());
  if (rec.contains("seed_digits"))
    chain.seed = parse_decimal(rec.at("seed_digits").get<std::string>());
  return chain;
}

/// Every CLI run appends one of these: what ran, with which knobs, and how it
/// ended, so results stay reproducible.
inline json run_manifest(std::string_view command, const json& parameters, std::string_view outcome,
                         double wall_seconds) {
  json rec;
  rec["kind"] = "run";
  rec["command"] = std::string(command);
  rec["parameters"] = parameters;
  rec["outcome"] = std::string(outcome);
  rec["wall_seconds"] = wall_seconds;
  rec["timestamp"] = iso8601_now();
  return rec;
}

}  // namespace primechain::store
