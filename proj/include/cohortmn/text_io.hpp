#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "cohortmn/errors.hpp"

namespace cohortmn {

/// Shortest decimal representation that parses back to exactly the
/// same double. Keeps emitted files byte-stable and lossless.
inline std::string format_double(double value) {
  char buffer[64];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

namespace detail {

template <typename T>
bool parse_number(std::string_view token, T& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto result = std::from_chars(first, last, out);
  return result.ec == std::errc() && result.ptr == last;
}

}  // namespace detail

inline double parse_double_token(std::string_view token,
                                 const std::string& context) {
  double value = 0.0;
  if (token.empty() || !detail::parse_number(token, value)) {
    throw ParseError(context + ": '" + std::string(token) +
                     "' is not a number");
  }
  return value;
}

inline std::int64_t parse_int_token(std::string_view token,
                                    const std::string& context) {
  std::int64_t value = 0;
  if (token.empty() || !detail::parse_number(token, value)) {
    throw ParseError(context + ": '" + std::string(token) +
                     "' is not an integer");
  }
  return value;
}

inline std::uint64_t parse_uint_token(std::string_view token,
                                      const std::string& context) {
  std::uint64_t value = 0;
  if (token.empty() || !detail::parse_number(token, value)) {
    throw ParseError(context + ": '" + std::string(token) +
                     "' is not a non-negative integer");
  }
  return value;
}

/// Splits on blanks after dropping everything from the first '#'.
inline std::vector<std::string_view> tokenize_line(std::string_view line) {
  if (const auto hash = line.find('#'); hash != std::string_view::npos) {
    line = line.substr(0, hash);
  }
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r')) {
      ++i;
    }
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
           line[i] != '\r') {
      ++i;
    }
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw IoError("failed while reading '" + path.string() + "'");
  }
  return std::move(buffer).str();
}

/// Writes through a sibling temp file and renames into place, so a
/// failure never leaves a partial artifact at the destination.
inline void write_file_atomic(const std::filesystem::path& path,
                              std::string_view content) {
  std::filesystem::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open '" + temp.string() + "' for writing");
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(temp, ec);
      throw IoError("failed while writing '" + temp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::error_code cleanup;
    std::filesystem::remove(temp, cleanup);
    throw IoError("cannot move '" + temp.string() + "' to '" + path.string() +
                  "': " + ec.message());
  }
}

}  // namespace cohortmn
