#include <doctest.h>

#include "mimhd/config.hpp"
#include "test_util.hpp"

using namespace mimhd;

TEST_CASE("key/value parsing") {
  const auto kv = KeyValueConfig::parse(
      "# sweep\n"
      "dim = 1000, 2000\n"
      "\n"
      "  metric=mcam   # trailing comment\n"
      "dataset.isolet.train = /data/a b.csv\n"
      "dim = 4000\n");
  CHECK(kv.get("dim") == "4000");
  CHECK(kv.get("metric") == "mcam");
  CHECK(kv.get("dataset.isolet.train") == "/data/a b.csv");
  CHECK_FALSE(kv.get("Dim").has_value());
  CHECK(kv.contains("metric"));
  CHECK(kv.entries().size() == 3);
}

TEST_CASE("malformed lines report their number") {
  const auto message = [](std::string_view text) {
    try {
      (void)KeyValueConfig::parse(text);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::parse);
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("a = 1\nno equals here\n").find("line 2") != std::string::npos);
  CHECK(message("= value\n").find("line 1") != std::string::npos);
}

TEST_CASE("config files") {
  testing::TempDir dir;
  testing::write_text(dir / "run.conf", "seed = 7\r\nprecision = 1,2,3\r\n");
  const auto kv = KeyValueConfig::load(dir / "run.conf");
  CHECK(kv.get("seed") == "7");
  CHECK(split_list(*kv.get("precision")) == std::vector<std::string>{"1", "2", "3"});
  CHECK_ERROR_KIND(ErrorKind::io, KeyValueConfig::load(dir / "missing.conf"));
}

TEST_CASE("string helpers") {
  CHECK(trim("  a b \t") == "a b");
  CHECK(trim("") == "");
  CHECK(split_list(" 1 , ,2,") == std::vector<std::string>{"1", "2"});
  CHECK(split_list("a;b", ';') == std::vector<std::string>{"a", "b"});
}
