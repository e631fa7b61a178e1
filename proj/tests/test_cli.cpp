#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "helpers.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run agdn_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = agdn::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json last_json(const std::string& text) {
  std::istringstream in(text);
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  return json::parse(last);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli: synth, train, eval") {
  auto dir = agdn::test::temp_dir("cli");
  const std::string data = (dir / "sbm").string();
  REQUIRE(agdn_cli({"synth", "--nodes", "90", "--seed", "4", "--out", data}).code == 0);
  CHECK(fs::exists(dir / "sbm" / "manifest.json"));

  Run a = agdn_cli({"train", "--dataset", data, "--out", (dir / "a").string(), "--epochs", "3",
                    "--hops", "2", "--seed", "7"});
  REQUIRE(a.code == 0);
  for (const char* f : {"checkpoint.bin", "metrics.jsonl", "summary.json"}) CHECK(fs::exists(dir / "a" / f));
  json sa = last_json(a.out);
  CHECK(sa.at("epochs_run") == 3);
  CHECK(sa.at("config").at("hops") == 2);
  CHECK(json::parse(slurp(dir / "a" / "summary.json")).at("metrics_digest") == sa.at("metrics_digest"));

  Run b = agdn_cli({"train", "--dataset", data, "--out", (dir / "b").string(), "--epochs", "3",
                    "--hops", "2", "--seed", "7"});
  REQUIRE(b.code == 0);
  CHECK(last_json(b.out).at("metrics_digest") == sa.at("metrics_digest"));
  CHECK(slurp(dir / "a" / "metrics.jsonl") == slurp(dir / "b" / "metrics.jsonl"));

  Run e = agdn_cli({"eval", "--checkpoint", (dir / "a" / "checkpoint.bin").string()});
  REQUIRE(e.code == 0);
  json ev = last_json(e.out);
  CHECK(ev.at("split") == "test");
  CHECK(ev.at("accuracy").get<double>() == sa.at("test_acc").get<double>());

  Run v = agdn_cli({"eval", "--checkpoint", (dir / "a" / "checkpoint.bin").string(), "--dataset", data,
                    "--split", "valid"});
  CHECK(last_json(v.out).at("accuracy").get<double>() == sa.at("best_valid_acc").get<double>());

  // config file with flags on top
  std::ofstream(dir / "run.json") << json{{"dataset", data}, {"epochs", 5}, {"variant", "gat-ha"},
                                          {"hidden_dim", 8}, {"out", (dir / "c").string()}}
                                          .dump();
  Run c = agdn_cli({"train", "--config", (dir / "run.json").string(), "--epochs", "2", "--use-labels"});
  REQUIRE(c.code == 0);
  json sc = last_json(c.out);
  CHECK(sc.at("epochs_run") == 2);
  CHECK(sc.at("config").at("variant") == "gat-ha");
  CHECK(sc.at("config").at("use_labels") == true);
}

TEST_CASE("cli: exit codes") {
  auto dir = agdn::test::temp_dir("cli_codes");
  const std::string data = (dir / "sbm").string();
  REQUIRE(agdn_cli({"synth", "--nodes", "60", "--out", data}).code == 0);

  CHECK(agdn_cli({"eval", "--checkpoint", (dir / "nope.bin").string(), "--dataset", data}).code == 1);
  CHECK(agdn_cli({"train", "--dataset", (dir / "missing").string(), "--out", (dir / "x").string()}).code ==
        1);

  std::ofstream(dir / "bad.json") << R"({"dataset": ")" + data + R"(", "epochz": 3})";
  Run bad = agdn_cli({"train", "--config", (dir / "bad.json").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("epochz") != std::string::npos);

  std::ofstream(dir / "type.json") << R"({"epochs": "many"})";
  CHECK(agdn_cli({"train", "--config", (dir / "type.json").string(), "--dataset", data}).code == 2);
  CHECK(agdn_cli({"train", "--dataset", data, "--variant", "gin"}).code == 2);
  CHECK(agdn_cli({"train", "--dataset", data, "--layers", "0"}).code == 2);
  CHECK(agdn_cli({"train"}).code == 2);
  CHECK(agdn_cli({}).code == 2);
  CHECK(agdn_cli({"frobnicate"}).code == 2);
  CHECK(agdn_cli({"--help"}).code == 0);
}

TEST_CASE("cli: verify and dumps") {
  auto dir = agdn::test::temp_dir("cli_verify");
  Run ok = agdn_cli({"verify"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("att_row_sums") != std::string::npos);
  CHECK(ok.out.find("FAIL") == std::string::npos);

  Run bad = agdn_cli({"verify", "--inject-fault"});
  CHECK(bad.code == 3);
  CHECK(bad.out.find("FAIL") != std::string::npos);

  const fs::path t = dir / "t.txt", h = dir / "h.csv";
  REQUIRE(agdn_cli({"verify", "--dump-transition", t.string(), "--dump-hop-attention", h.string(),
                    "--hops", "3", "--variant", "gat-ha"})
              .code == 0);
  std::istringstream lines(slurp(t));
  agdn::index_t i, j;
  double w;
  int n = 0;
  while (lines >> i >> j >> w) ++n;
  CHECK(n > 60);
  std::istringstream csv(slurp(h));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "node,hop0,hop1,hop2,hop3");
  int rows = 0;
  for (std::string row; std::getline(csv, row);) {
    std::stringstream cells(row);
    std::string cell;
    std::getline(cells, cell, ',');
    double sum = 0;
    while (std::getline(cells, cell, ',')) sum += std::stod(cell);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    ++rows;
  }
  CHECK(rows == 60);
}

TEST_CASE("cli: ingest") {
  auto dir = agdn::test::temp_dir("cli_ingest");
  std::ofstream(dir / "edges.txt") << "0 1\n1 2\n2 3\n";
  agdn::write_f32_matrix(dir / "x.f32", 4, 2, {1, 0, 0, 1, 1, 1, 0, 0});
  agdn::write_f32_matrix(dir / "y.f32", 4, 1, {0, 1, 0, 1});
  fs::create_directories(dir / "masks");
  std::ofstream(dir / "masks" / "train.txt") << "0\n1\n";
  std::ofstream(dir / "masks" / "valid.txt") << "2\n";
  std::ofstream(dir / "masks" / "test.txt") << "3\n";
  Run r = agdn_cli({"ingest", "--edges", (dir / "edges.txt").string(), "--features", (dir / "x.f32").string(),
                    "--labels", (dir / "y.f32").string(), "--masks", (dir / "masks").string(), "--out",
                    (dir / "ds").string()});
  REQUIRE(r.code == 0);
  agdn::Dataset ds = agdn::load_dataset(dir / "ds");
  CHECK(ds.graph.num_nodes() == 4);
  CHECK(ds.num_classes == 2);
  CHECK(ds.train_mask == std::vector<bool>{true, true, false, false});

  agdn::write_f32_matrix(dir / "y5.f32", 5, 1, {0, 1, 0, 1, 0});
  CHECK(agdn_cli({"ingest", "--edges", (dir / "edges.txt").string(), "--features", (dir / "x.f32").string(),
                  "--labels", (dir / "y5.f32").string(), "--masks", (dir / "masks").string(), "--out",
                  (dir / "ds2").string()})
            .code != 0);
}
