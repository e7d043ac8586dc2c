#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace protctx {

/// 64-bit FNV-1a. Used for context fingerprints and prompt digests.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// fnv1a64 rendered as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view bytes);

/// SHA-256 as 64 lowercase hex digits. Used for cache keys.
std::string sha256_hex(std::string_view bytes);

}  // namespace protctx
