#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>

#include "helpers.hpp"

using testutil::CmdResult;
using testutil::read_file;
using testutil::run_cmd;
using testutil::scratch_dir;

namespace {

std::string binary() {
  const char* bin = std::getenv("MQC_BIN");
  if (!bin || !*bin)
    throw mqc::internal_error(
        "MQC_BIN must point at the command-line binary for these tests");
  return bin;
}

// These tests drive the installed binary; without MQC_BIN they cannot run.
#define REQUIRE_BINARY() \
  if (!std::getenv("MQC_BIN")) SKIP("set MQC_BIN to the binary under test")

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("gen writes deterministic annotated instances", "[cli]") {
  REQUIRE_BINARY();
  auto dir = scratch_dir("gen");
  std::string cmd = binary() + " gen --taxa 6 --seed 3 --alter 10 --out " +
                    q(dir / "a.qrt");
  CmdResult r1 = run_cmd(cmd);
  INFO(r1.output);
  REQUIRE(r1.code == 0);
  CmdResult r2 = run_cmd(binary() + " gen --taxa 6 --seed 3 --alter 10 --out " +
                         q(dir / "b.qrt"));
  REQUIRE(r2.code == 0);
  std::string a = read_file(dir / "a.qrt");
  CHECK(a == read_file(dir / "b.qrt"));
  CHECK(a.find("# n 6 seed 3 alter-percent 10") != std::string::npos);
  CHECK(a.find("# altered 1 of 15") != std::string::npos);
  int topology_lines = 0;
  std::istringstream in(a);
  std::string line;
  while (std::getline(in, line))
    if (line.find('|') != std::string::npos) ++topology_lines;
  CHECK(topology_lines == 15);
}

TEST_CASE("gen honors the seed environment variable as a default", "[cli]") {
  REQUIRE_BINARY();
  auto dir = scratch_dir("genenv");
  REQUIRE(run_cmd("QMQC_SEED=9 " + binary() + " gen --taxa 5 --out " +
                  q(dir / "env.qrt"))
              .code == 0);
  REQUIRE(run_cmd(binary() + " gen --taxa 5 --seed 9 --out " +
                  q(dir / "flag.qrt"))
              .code == 0);
  // An explicit flag wins over the environment.
  REQUIRE(run_cmd("QMQC_SEED=1 " + binary() + " gen --taxa 5 --seed 9 --out " +
                  q(dir / "both.qrt"))
              .code == 0);
  std::string env = read_file(dir / "env.qrt");
  CHECK(env == read_file(dir / "flag.qrt"));
  CHECK(env == read_file(dir / "both.qrt"));
}

TEST_CASE("gen can emit the source tree it drew", "[cli]") {
  REQUIRE_BINARY();
  auto dir = scratch_dir("gentree");
  REQUIRE(run_cmd(binary() + " gen --taxa 6 --seed 4 --out " +
                  q(dir / "i.qrt") + " --tree " + q(dir / "i.nwk"))
              .code == 0);
  mqc::UnrootedPhylogeny t =
      mqc::parse_newick_unrooted(read_file(dir / "i.nwk"));
  std::ifstream in(dir / "i.qrt");
  mqc::QrtFile f = mqc::read_qrt(in);
  // Zero alteration: the file holds exactly the tree's quartets.
  CHECK(mqc::tree_satisfied_count(t, f.quartets) == 15);
}

TEST_CASE("run equals encode, solve, decode composed", "[cli]") {
  REQUIRE_BINARY();
  auto dir = scratch_dir("compose");
  REQUIRE(run_cmd(binary() + " gen --taxa 6 --seed 8 --alter 30 --out " +
                  q(dir / "i.qrt"))
              .code == 0);

  CmdResult direct = run_cmd(binary() + " run --model fst --in " +
                             q(dir / "i.qrt") + " --out " + q(dir / "run.nwk") +
                             " --report " + q(dir / "run.json"));
  INFO(direct.output);
  REQUIRE(direct.code == 0);

  REQUIRE(run_cmd(binary() + " encode --model fst --in " + q(dir / "i.qrt") +
                  " --out " + q(dir / "i.opb") + " --map " + q(dir / "i.map"))
              .code == 0);
  REQUIRE(run_cmd(binary() + " solve --in " + q(dir / "i.opb") + " --out " +
                  q(dir / "i.sol"))
              .code == 0);
  REQUIRE(run_cmd(binary() + " decode --map " + q(dir / "i.map") + " --sol " +
                  q(dir / "i.sol") + " --out " + q(dir / "steps.nwk"))
              .code == 0);

  CHECK(read_file(dir / "run.nwk") == read_file(dir / "steps.nwk"));

  // The report carries the counts the steps printed.
  std::string json = read_file(dir / "run.json");
  CHECK(json.find("\"schema\": 1") != std::string::npos);
  CHECK(json.find("\"model\": \"fst\"") != std::string::npos);
  CHECK(json.find("\"status\": \"optimal\"") != std::string::npos);
}

TEST_CASE("check recounts what run reported", "[cli]") {
  REQUIRE_BINARY();
  auto dir = scratch_dir("check");
  REQUIRE(run_cmd(binary() + " gen --taxa 6 --seed 2 --alter 30 --out " +
                  q(dir / "i.qrt"))
              .code == 0);
  REQUIRE(run_cmd(binary() + " run --model scd --in " + q(dir / "i.qrt") +
                  " --out " + q(dir / "t.nwk"))
              .code == 0);
  CmdResult chk = run_cmd(binary() + " check --tree " + q(dir / "t.nwk") +
                          " --in " + q(dir / "i.qrt"));
  INFO(chk.output);
  REQUIRE(chk.code == 0);
  CHECK(chk.output.find("quartets 15") != std::string::npos);
  CHECK(chk.output.find("satisfied ") != std::string::npos);
  CHECK(chk.output.find("errors ") != std::string::npos);
}

TEST_CASE("oracle agrees with run on small instances", "[cli]") {
  REQUIRE_BINARY();
  auto dir = scratch_dir("oracle");
  REQUIRE(run_cmd(binary() + " gen --taxa 5 --seed 6 --alter 30 --out " +
                  q(dir / "i.qrt"))
              .code == 0);
  CmdResult run = run_cmd(binary() + " run --model basic --in " +
                          q(dir / "i.qrt") + " --out " + q(dir / "t.nwk"));
  REQUIRE(run.code == 0);
  CmdResult oracle = run_cmd(binary() + " oracle --in " + q(dir / "i.qrt") +
                             " --tree " + q(dir / "o.nwk"));
  REQUIRE(oracle.code == 0);
  // Pull "optimum K" out of the oracle's output.
  size_t at = oracle.output.find("optimum ");
  REQUIRE(at != std::string::npos);
  int opt = std::stoi(oracle.output.substr(at + 8));
  size_t sat = run.output.find("satisfied ");
  REQUIRE(sat != std::string::npos);
  CHECK(std::stoi(run.output.substr(sat + 10)) == opt);
  // The emitted witness achieves it.
  mqc::UnrootedPhylogeny wit =
      mqc::parse_newick_unrooted(read_file(dir / "o.nwk"));
  std::ifstream in(dir / "i.qrt");
  CHECK(mqc::tree_satisfied_count(wit, mqc::read_qrt(in).quartets) == opt);
}

TEST_CASE("bench writes one sorted deterministic csv", "[cli]") {
  REQUIRE_BINARY();
  auto dir = scratch_dir("bench");
  std::string cmd = binary() +
                    " bench --taxa 5 --alter 0,10 --seeds 2 --models fst,scd"
                    " --out " +
                    q(dir / "b.csv");
  CmdResult r = run_cmd(cmd);
  INFO(r.output);
  REQUIRE(r.code == 0);
  std::string csv = read_file(dir / "b.csv");
  std::istringstream in(csv);
  std::string header;
  REQUIRE(std::getline(in, header));
  CHECK(header ==
        "n,alter_percent,seed,model,siblings,quartets,altered,vars,"
        "constraints,satisfied,errors,tree_satisfied,decisions,propagations,"
        "conflicts,elapsed_s");
  std::vector<std::string> prefixes = {
      "5,0,1,fst,0,",  "5,0,1,scd,0,",  "5,0,2,fst,0,",  "5,0,2,scd,0,",
      "5,10,1,fst,0,", "5,10,1,scd,0,", "5,10,2,fst,0,", "5,10,2,scd,0,"};
  std::string line;
  size_t row = 0;
  while (std::getline(in, line)) {
    REQUIRE(row < prefixes.size());
    CHECK(line.rfind(prefixes[row], 0) == 0);
    ++row;
  }
  CHECK(row == 8);  // 1 n * 2 alter * 2 seeds * 2 models

  // A parallel run writes the identical file apart from the wall-clock
  // column at the end of each row.
  CmdResult again = run_cmd(binary() +
                            " bench --taxa 5 --alter 0,10 --seeds 2 "
                            "--models fst,scd --jobs 2 --out " +
                            q(dir / "b2.csv"));
  REQUIRE(again.code == 0);
  auto drop_last_field = [](const std::string& text) {
    std::istringstream is(text);
    std::string out, ln;
    while (std::getline(is, ln)) {
      out.append(ln, 0, ln.rfind(','));
      out.push_back('\n');
    }
    return out;
  };
  CHECK(drop_last_field(read_file(dir / "b2.csv")) == drop_last_field(csv));
}

TEST_CASE("usage problems exit with code two", "[cli]") {
  REQUIRE_BINARY();
  auto dir = scratch_dir("usage");
  CHECK(run_cmd(binary() + " --help").code == 0);
  CHECK(run_cmd(binary()).code == 2);
  CHECK(run_cmd(binary() + " frobnicate").code == 2);
  CHECK(run_cmd(binary() + " gen --taxa 6").code == 2);  // --out missing
  CHECK(run_cmd(binary() + " gen --taxa 3 --out " + q(dir / "x.qrt")).code ==
        2);
  CHECK(run_cmd(binary() + " run --model nope --in x --out y").code == 2);
  CHECK(run_cmd(binary() + " run --model fst --in " + q(dir / "missing.qrt") +
                " --out " + q(dir / "t.nwk"))
            .code == 2);
  std::ofstream(dir / "junk.opb") << "not an opb file\n";
  CHECK(run_cmd(binary() + " solve --in " + q(dir / "junk.opb") + " --out " +
                q(dir / "s.sol"))
            .code == 2);
}

TEST_CASE("decode rejects mismatched solutions", "[cli]") {
  REQUIRE_BINARY();
  auto dir = scratch_dir("decode");
  REQUIRE(run_cmd(binary() + " gen --taxa 5 --seed 1 --out " + q(dir / "i.qrt"))
              .code == 0);
  REQUIRE(run_cmd(binary() + " encode --model basic --in " + q(dir / "i.qrt") +
                  " --out " + q(dir / "i.opb") + " --map " + q(dir / "i.map"))
              .code == 0);
  std::ofstream(dir / "unsat.sol") << "s UNSATISFIABLE\n";
  CHECK(run_cmd(binary() + " decode --map " + q(dir / "i.map") + " --sol " +
                q(dir / "unsat.sol") + " --out " + q(dir / "t.nwk"))
            .code == 2);
  std::ofstream(dir / "short.sol") << "s OPTIMUM FOUND\nv x1 -x2\n";
  CHECK(run_cmd(binary() + " decode --map " + q(dir / "i.map") + " --sol " +
                q(dir / "short.sol") + " --out " + q(dir / "t.nwk"))
            .code == 2);
}
