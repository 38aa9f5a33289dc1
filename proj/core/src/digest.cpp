#include "culturescope/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>

#include "culturescope/error.hpp"

namespace culturescope {

namespace {

std::array<unsigned char, 32> sha256_raw(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, 32> out{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1) {
    throw Error(ErrorCode::kIo, "sha256 failed");
  }
  return out;
}

constexpr char kHex[] = "0123456789abcdef";

}  // namespace

std::string sha256_hex(std::string_view data) {
  const auto raw = sha256_raw(data);
  std::string hex;
  hex.reserve(64);
  for (unsigned char b : raw) {
    hex.push_back(kHex[b >> 4]);
    hex.push_back(kHex[b & 0xF]);
  }
  return hex;
}

std::string short_digest(std::initializer_list<std::string_view> parts) {
  std::string joined;
  for (auto p : parts) {
    joined.append(p);
    joined.push_back('\x1f');
  }
  return sha256_hex(joined).substr(0, 16);
}

std::string short_digest(const std::vector<std::string>& parts) {
  std::string joined;
  for (const auto& p : parts) {
    joined.append(p);
    joined.push_back('\x1f');
  }
  return sha256_hex(joined).substr(0, 16);
}

std::uint64_t substream_seed(std::uint64_t seed, std::string_view name) {
  const auto raw = sha256_raw(std::to_string(seed) + "/" + std::string(name));
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | raw[static_cast<std::size_t>(i)];
  return v;
}

}  // namespace culturescope
