#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace culturescope {

std::string sha256_hex(std::string_view data);

// First 16 hex chars of SHA-256 over the parts joined by a unit separator.
std::string short_digest(std::initializer_list<std::string_view> parts);
std::string short_digest(const std::vector<std::string>& parts);

// Derives an independent 64-bit seed for a named substream.
std::uint64_t substream_seed(std::uint64_t seed, std::string_view name);

}  // namespace culturescope
