#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace protctx {

/// Content-addressed byte store. An entry's key is the SHA-256 of its kind
/// tag and input bytes; entries are written once via temp-file + rename, so
/// concurrent writers of the same key never expose a partial value.
class ContentCache {
 public:
  explicit ContentCache(std::filesystem::path dir);

  static std::string key(std::string_view kind, std::string_view input);

  std::optional<std::string> get(std::string_view kind, std::string_view input) const;
  void put(std::string_view kind, std::string_view input, std::string_view value);

  std::filesystem::path path_for(const std::string& key) const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace protctx
