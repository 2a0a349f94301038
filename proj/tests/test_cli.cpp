#include <catch2/catch_amalgamated.hpp>

#include <primechain/constants.hpp>
#include <primechain/store.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "oracles.hpp"

namespace pcc = primechain::constants;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

std::filesystem::path scratch_dir() {
  static const auto dir = [] {
    auto d = std::filesystem::temp_directory_path() /
             ("primechain-cli-test-" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

/// Run the CLI under test with an isolated store, capturing combined output.
RunResult run_cli(const std::string& args) {
  const char* cli = std::getenv("TEST_CLI_PATH");
  REQUIRE(cli != nullptr);
  const auto store = scratch_dir() / "store.jsonl";
  const std::string cmd = "PRIMECHAIN_STORE=" + store.string() + " " + std::string(cli) + " " +
                          args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = ::fread(buf, 1, sizeof(buf), pipe)) > 0) r.output.append(buf, got);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path write_file(const char* name, const std::string& text) {
  const auto p = scratch_dir() / name;
  std::ofstream out(p);
  out << text;
  return p;
}

}  // namespace

TEST_CASE("verify targets succeed on the published data") {
  for (const char* target : {"wright", "mills", "plouffe54", "plouffe32", "scaled-nn", "concat",
                             "appendix-s50"}) {
    const auto r = run_cli(std::string("verify ") + target);
    CAPTURE(target, r.output);
    REQUIRE(r.exit_code == 0);
  }
  REQUIRE(run_cli("verify wright").output.find("16381") != std::string::npos);
}

TEST_CASE("verify exits 2 when the printed digits cannot decide the depth") {
  const auto r = run_cli("verify mills 5");
  REQUIRE(r.exit_code == 2);
}

TEST_CASE("verify exits 1 on the composite beyond the published scaled run") {
  const auto r = run_cli("verify scaled-nn 22");
  REQUIRE(r.exit_code == 1);
  REQUIRE(r.output.find("90679274426594169303635264729") != std::string::npos);
}

TEST_CASE("usage errors exit 64") {
  REQUIRE(run_cli("").exit_code == 64);
  REQUIRE(run_cli("verify nosuchtarget").exit_code == 64);
  REQUIRE(run_cli("generate --count 3").exit_code == 64);
  REQUIRE(run_cli("frobnicate").exit_code == 64);
  REQUIRE(run_cli("generate --seed-file /nonexistent-seed.txt --count 3").exit_code == 64);
}

TEST_CASE("generate walks the published 3/2 chain from its seed") {
  const auto seed = write_file("seed32.txt", std::string(pcc::kSeed32) + "\n");
  const auto r = run_cli("generate --seed-file " + seed.string() + " --rule power:3/2 --count 9");
  CAPTURE(r.output);
  REQUIRE(r.exit_code == 0);
  const auto& pub = pcc::chain32_published();
  for (std::size_t i = 0; i < 10; ++i)
    REQUIRE(r.output.find(pub[i].get_str()) != std::string::npos);
}

TEST_CASE("generate exits 2 past the seed's information boundary") {
  const auto seed = write_file("seed32b.txt", std::string(pcc::kSeed32) + "\n");
  const auto r = run_cli("generate --seed-file " + seed.string() + " --rule power:3/2 --count 13");
  REQUIRE(r.exit_code == 2);
}

TEST_CASE("recover prints certified digits and a midpoint that regenerates the chain") {
  // Chain file with comments and bracket punctuation: parsing must cope.
  std::string chain_text = "# published exponent-3/2 chain\n[";
  const auto& pub = pcc::chain32_published();
  for (std::size_t i = 0; i < 10; ++i)
    chain_text += (i != 0 ? ", " : "") + pub[i].get_str();
  chain_text += "]\n";
  const auto chain = write_file("chain10.txt", chain_text);

  const auto rec = run_cli("recover --chain-file " + chain.string() + " --rule power:3/2 --digits 40");
  CAPTURE(rec.output);
  REQUIRE(rec.exit_code == 0);
  REQUIRE(rec.output.find("2.038239154782") != std::string::npos);
  REQUIRE(rec.output.find("midpoint estimate") != std::string::npos);

  // Extract the midpoint estimate and feed it back as a seed.
  const auto pos = rec.output.find("midpoint estimate");
  const auto colon = rec.output.find(':', pos);
  const auto eol = rec.output.find('\n', colon);
  std::string midpoint = rec.output.substr(colon + 1, eol - colon - 1);
  midpoint.erase(0, midpoint.find_first_not_of(' '));
  REQUIRE(testor::starts_with(midpoint, "2.038"));

  const auto seed = write_file("midpoint.txt", midpoint + "\n");
  const auto regen =
      run_cli("generate --seed-file " + seed.string() + " --rule power:3/2 --count 9 --exact-seed");
  REQUIRE(regen.exit_code == 0);
  for (std::size_t i = 0; i < 10; ++i)
    REQUIRE(regen.output.find(pub[i].get_str()) != std::string::npos);
}

TEST_CASE("recover exits 1 on a tampered chain") {
  const auto chain = write_file("tampered.txt", "2 3 5 11 37 227 3331\n");
  const auto r = run_cli("recover --chain-file " + chain.string() + " --rule power:3/2");
  REQUIRE(r.exit_code == 1);
}

TEST_CASE("search is bit-reproducible and stores its progress") {
  const std::string args = "--rng-seed 1 search --rule power:5/4 --target-length 8";
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  CAPTURE(a.output);
  REQUIRE(a.exit_code == 0);
  REQUIRE(a.output == b.output);
  REQUIRE(a.output.find("6084503611") != std::string::npos);

  const auto store = scratch_dir() / "store.jsonl";
  primechain::store::ChainStore reader(store);
  bool chain_rec = false, progress_rec = false, run_rec = false;
  for (const auto& rec : reader.read_all()) {
    const std::string kind = rec.value("kind", "");
    chain_rec = chain_rec || kind == "chain";
    progress_rec = progress_rec || kind == "search_progress";
    run_rec = run_rec || kind == "run";
  }
  REQUIRE(chain_rec);
  REQUIRE(progress_rec);
  REQUIRE(run_rec);
}

TEST_CASE("tree prints the census and writes DOT") {
  const auto dot = scratch_dir() / "forest.dot";
  const auto r = run_cli("tree 3331 --dot " + dot.string());
  CAPTURE(r.output);
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.output.find("470") != std::string::npos);
  REQUIRE(r.output.find("374") != std::string::npos);

  std::ifstream in(dot);
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  REQUIRE(text.find("digraph prime_forest {") != std::string::npos);
  REQUIRE(text.find("223 -> 3331;") != std::string::npos);
}

TEST_CASE("every run appends a manifest with the invocation") {
  (void)run_cli("verify wright");
  const auto store = scratch_dir() / "store.jsonl";
  primechain::store::ChainStore reader(store);
  bool seen = false;
  for (const auto& rec : reader.read_all()) {
    if (rec.value("kind", "") != "run") continue;
    if (!rec.contains("parameters") || !rec["parameters"].contains("argv")) continue;
    const std::string joined = rec["parameters"]["argv"].dump();
    if (joined.find("wright") != std::string::npos) seen = true;
  }
  REQUIRE(seen);
}
