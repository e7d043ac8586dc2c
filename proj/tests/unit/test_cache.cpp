#include "protctx/cache.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>
#include <thread>
#include <vector>

using namespace protctx;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  std::random_device rd;
  auto p = fs::temp_directory_path() / ("protctx_cache_" + tag + "_" + std::to_string(rd()));
  fs::remove_all(p);
  return p;
}

std::size_t count_files(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir)) n += e.is_regular_file();
  return n;
}

}  // namespace

TEST_CASE("put then get round-trips bytes") {
  const auto dir = fresh_dir("rt");
  ContentCache cache(dir);
  CHECK_FALSE(cache.get("k", "in").has_value());
  const std::string value("a\0b\nc", 5);
  cache.put("k", "in", value);
  REQUIRE(cache.get("k", "in").has_value());
  CHECK(*cache.get("k", "in") == value);
  CHECK_FALSE(cache.get("other", "in").has_value());
  CHECK_FALSE(cache.get("k", "in2").has_value());

  // entries are immutable
  cache.put("k", "in", "replacement");
  CHECK(*cache.get("k", "in") == value);
  fs::remove_all(dir);
}

TEST_CASE("keys are deterministic and separate kind from input") {
  CHECK(ContentCache::key("a", "b") == ContentCache::key("a", "b"));
  CHECK(ContentCache::key("a", "b").size() == 64);
  CHECK(ContentCache::key("ab", "") != ContentCache::key("a", "b"));
  CHECK(ContentCache::key("a", "bc") != ContentCache::key("a", "bd"));
  // sha256 of "\0"
  CHECK(ContentCache::key("", "") ==
        "6e340b9cffb37a989ca544e6bb780a2c78901d3fb33738768511a30617afa01d");
}

TEST_CASE("entries live under a two-character shard") {
  const auto dir = fresh_dir("layout");
  ContentCache cache(dir);
  cache.put("k", "x", "v");
  const auto key = ContentCache::key("k", "x");
  const auto p = cache.path_for(key);
  CHECK(p == dir / key.substr(0, 2) / key);
  CHECK(fs::is_regular_file(p));
  fs::remove_all(dir);
}

TEST_CASE("concurrent writers of one key leave a single complete entry") {
  const auto dir = fresh_dir("race");
  ContentCache cache(dir);
  const std::string value(1 << 16, 'z');
  {
    std::vector<std::jthread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&] {
        for (int i = 0; i < 20; ++i) cache.put("race", "same", value);
      });
    }
  }
  CHECK(count_files(dir) == 1);
  CHECK(*cache.get("race", "same") == value);
  fs::remove_all(dir);
}
