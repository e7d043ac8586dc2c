#include "protctx/cache.hpp"

#include "protctx/error.hpp"
#include "protctx/hash.hpp"

#include <unistd.h>

#include <atomic>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace protctx {

namespace fs = std::filesystem;

ContentCache::ContentCache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error("cannot create cache directory " + dir_.string() + ": " + ec.message());
}

std::string ContentCache::key(std::string_view kind, std::string_view input) {
  std::string material;
  material.reserve(kind.size() + 1 + input.size());
  material.append(kind);
  material.push_back('\0');
  material.append(input);
  return sha256_hex(material);
}

fs::path ContentCache::path_for(const std::string& key) const {
  return dir_ / key.substr(0, 2) / key;
}

std::optional<std::string> ContentCache::get(std::string_view kind, std::string_view input) const {
  std::ifstream in(path_for(key(kind, input)), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error("cache read failed");
  return buf.str();
}

void ContentCache::put(std::string_view kind, std::string_view input, std::string_view value) {
  static std::atomic<unsigned long> counter{0};
  const std::string k = key(kind, input);
  const fs::path final_path = path_for(k);
  std::error_code ec;
  if (fs::exists(final_path, ec)) return;  // entries are immutable
  fs::create_directories(final_path.parent_path(), ec);
  if (ec) throw Error("cannot create cache shard: " + ec.message());

  std::ostringstream tmp_name;
  tmp_name << '.' << k << ".tmp." << ::getpid() << '.'
           << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.' << counter++;
  const fs::path tmp = final_path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(value.data(), static_cast<std::streamsize>(value.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw Error("cache write failed: " + tmp.string());
    }
  }
  fs::rename(tmp, final_path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cache rename failed: " + final_path.string());
  }
}

}  // namespace protctx
