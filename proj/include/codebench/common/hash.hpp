#pragma once

#include <string>
#include <string_view>

namespace codebench {

// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// Incremental hasher used to derive content-addressed keys from several parts.
class ContentHasher {
 public:
  ContentHasher();
  ~ContentHasher();
  ContentHasher(const ContentHasher&) = delete;
  ContentHasher& operator=(const ContentHasher&) = delete;

  // Each part is length-prefixed so ("ab","c") and ("a","bc") differ.
  ContentHasher& add(std::string_view part);
  std::string hex();

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace codebench
