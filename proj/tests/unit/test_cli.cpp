#include <doctest.h>

#include <chromaprobe/manifest_io.hpp>
#include <chromaprobe/prompt_bank.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fake_adapter.hpp"
#include "oracles.hpp"

#ifndef CHROMAPROBE_CLI
#define CHROMAPROBE_CLI "chromaprobe"
#endif

using namespace chromaprobe;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(const std::string& args, const std::filesystem::path& scratch) {
  const auto err_path = scratch / "stderr.txt";
  const std::string cmd = std::string("'") + CHROMAPROBE_CLI + "' " + args + " 2>'" + err_path.string() + "'";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = oracle::slurp(err_path);
  return r;
}

int data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  int rows = -1;  // header
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') ++rows;
  }
  return rows;
}

}  // namespace

TEST_CASE("cli generates, probes and reports") {
  oracle::TempDir dir("cli");
  const auto d = dir.path().string();

  auto r = cli("--porcelain -j 2 gen-stroop --samples 1 --seed 7 --out '" + d + "/stroop'", dir.path());
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("records=990\n") != std::string::npos);
  CHECK(r.out.find("config_hash=") != std::string::npos);

  const auto manifest = read_manifest(dir / "stroop/manifest.ndjson", Palette::standard());
  fake::write_embeddings_for(dir / "emb", manifest, builtin_templates());

  r = cli("run-probe --manifest '" + d + "/stroop/manifest.ndjson' --template-id word-font --embeddings '" + d +
              "/emb' --out '" + d + "/res.ndjson'",
          dir.path());
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("WrittenColor: 990\n") != std::string::npos);

  r = cli("report --kind stroop --results '" + d + "/res.ndjson' --out '" + d + "/rep'", dir.path());
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto csv = oracle::slurp(dir / "rep/stroop-word-font.csv");
  CHECK(data_rows(csv) == 12);
  CHECK(csv.rfind("# chromaprobe\n", 0) == 0);
}

TEST_CASE("cli usage errors") {
  oracle::TempDir dir("cli-usage");
  auto r = cli("frobnicate", dir.path());
  CHECK(r.code == 2);
  CHECK(r.err.find("unknown subcommand 'frobnicate'") != std::string::npos);
  CHECK(r.err.find("gen-stroop") != std::string::npos);

  r = cli("gen-shapes --samples 1", dir.path());
  CHECK(r.code == 2);
  CHECK(r.err.find("--out") != std::string::npos);

  r = cli("", dir.path());
  CHECK(r.code == 2);

  r = cli("report --kind table9 --results x --out y", dir.path());
  CHECK(r.code == 2);

  r = cli("--version", dir.path());
  CHECK(r.code == 0);
  CHECK(r.out.find("chromaprobe 1.0.0") != std::string::npos);
}

TEST_CASE("cli runtime errors exit 1") {
  oracle::TempDir dir("cli-runtime");
  std::ofstream(dir / "bad.ndjson") << "not json\n";
  auto r = cli("report --kind stroop --results '" + (dir / "bad.ndjson").string() + "' --out '" +
                   (dir / "rep").string() + "'",
               dir.path());
  CHECK(r.code == 1);
  CHECK(r.err.find("chromaprobe: error:") != std::string::npos);
}

TEST_CASE("cli config file and palette override") {
  oracle::TempDir dir("cli-config");
  const auto d = dir.path().string();
  std::ofstream(dir / "run.toml") << "porcelain = true\n[gen-stroop]\nsamples = 1\nseed = 5\nwhite-bg = true\n";
  std::ofstream(dir / "palette.txt") << "gray = 128,128,128 as grey\n";
  auto r = cli("--config '" + d + "/run.toml' --palette '" + d + "/palette.txt' gen-stroop --out '" + d + "/s'",
               dir.path());
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("records=90\n") != std::string::npos);
  const auto text = oracle::slurp(dir / "s/manifest.ndjson");
  CHECK(text.find("\"grey\"") != std::string::npos);

  r = cli("--palette '" + d + "/missing.txt' gen-stroop --samples 1 --out x", dir.path());
  CHECK(r.code == 2);
}
