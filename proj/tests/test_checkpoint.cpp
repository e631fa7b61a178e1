#include <doctest.h>

#include <fstream>
#include <sstream>

#include "agdn/checkpoint.hpp"
#include "helpers.hpp"

using namespace agdn;

namespace {

ModelConfig config() {
  ModelConfig cfg;
  cfg.variant = Variant::gat_ha;
  cfg.layers = 3;
  cfg.hops = 2;
  cfg.heads = 2;
  cfg.hidden_dim = 6;
  cfg.input_dim = 5;
  cfg.num_classes = 4;
  cfg.use_labels = true;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

}  // namespace

TEST_CASE("checkpoint round trip") {
  auto dir = test::temp_dir("ckpt");
  ModelConfig cfg = config();
  ModelParams p = init_params(cfg, 9);
  p.norms[1].running_mean[2] = 0.375;
  p.norms[0].running_var[0] = 2.5;
  save_checkpoint(dir / "c.bin", cfg, p);

  Checkpoint ck = load_checkpoint(dir / "c.bin");
  CHECK(ck.config.to_json() == cfg.to_json());
  CHECK(ck.config_digest == config_digest(cfg));
  auto a = p.named_parameters(), b = ck.params.named_parameters();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first == b[i].first);
    CHECK(std::equal(a[i].second.values().begin(), a[i].second.values().end(),
                     b[i].second.values().begin()));
  }
  CHECK(ck.params.norms[1].running_mean[2] == 0.375);
  CHECK(ck.params.norms[0].running_var[0] == 2.5);

  const std::string text = slurp(dir / "c.bin");
  CHECK(text.rfind("AGDN-CHECKPOINT 1 " + config_digest(cfg) + " ", 0) == 0);
}

TEST_CASE("checkpoint corruption is detected") {
  auto dir = test::temp_dir("ckpt_bad");
  ModelConfig cfg = config();
  save_checkpoint(dir / "c.bin", cfg, init_params(cfg, 1));
  const std::string good = slurp(dir / "c.bin");
  const auto header_end = good.find('\n');

  CHECK_THROWS_AS(load_checkpoint(dir / "missing.bin"), ParseError);

  spit(dir / "trunc.bin", good.substr(0, good.size() - 7));
  CHECK_THROWS_AS(load_checkpoint(dir / "trunc.bin"), ParseError);

  std::string digest = good;
  digest[18] = digest[18] == '0' ? '1' : '0';
  spit(dir / "digest.bin", digest);
  CHECK_THROWS_AS(load_checkpoint(dir / "digest.bin"), ParseError);

  // header says 3 heads, payload has 2
  ModelConfig other = cfg;
  other.heads = 3;
  const std::string other_json = other.to_json().dump();
  spit(dir / "shape.bin", "AGDN-CHECKPOINT 1 " + config_digest(other) + " " + other_json +
                              good.substr(header_end));
  CHECK_THROWS_AS(load_checkpoint(dir / "shape.bin"), ParseError);

  spit(dir / "magic.bin", "NOT-A-CHECKPOINT\n");
  CHECK_THROWS_AS(load_checkpoint(dir / "magic.bin"), ParseError);

  spit(dir / "header_only.bin", good.substr(0, header_end + 1));
  CHECK_THROWS_AS(load_checkpoint(dir / "header_only.bin"), ParseError);
}
