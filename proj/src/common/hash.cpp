#include "codebench/common/hash.hpp"

#include <openssl/evp.h>

#include <cstdint>
#include <stdexcept>

namespace codebench {

namespace {

std::string to_hex(const unsigned char* data, unsigned int len) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kDigits[data[i] >> 4]);
    out.push_back(kDigits[data[i] & 0x0f]);
  }
  return out;
}

}  // namespace

struct ContentHasher::Impl {
  EVP_MD_CTX* ctx = nullptr;
};

ContentHasher::ContentHasher() : impl_(new Impl) {
  impl_->ctx = EVP_MD_CTX_new();
  if (!impl_->ctx || EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(impl_->ctx);
    delete impl_;
    throw std::runtime_error("sha256 init failed");
  }
}

ContentHasher::~ContentHasher() {
  EVP_MD_CTX_free(impl_->ctx);
  delete impl_;
}

ContentHasher& ContentHasher::add(std::string_view part) {
  std::uint64_t n = part.size();
  unsigned char prefix[8];
  for (int i = 0; i < 8; ++i) prefix[i] = static_cast<unsigned char>(n >> (8 * i));
  EVP_DigestUpdate(impl_->ctx, prefix, sizeof prefix);
  EVP_DigestUpdate(impl_->ctx, part.data(), part.size());
  return *this;
}

std::string ContentHasher::hex() {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(impl_->ctx, md, &len);
  EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr);
  return to_hex(md, len);
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  return to_hex(md, len);
}

}  // namespace codebench
