#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cohortmn/errors.hpp"

namespace cohortmn {

/// Ordered, mutually exclusive health states. State indices used across
/// the library are zero-based positions into `labels`.
struct StateSpace {
  std::vector<std::string> labels;

  std::size_t size() const { return labels.size(); }

  std::optional<std::size_t> index_of(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) return i;
    }
    return std::nullopt;
  }

  void validate() const {
    if (labels.empty()) {
      throw ValidationError("state space must contain at least one state");
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& label : labels) {
      if (label.empty()) {
        throw ValidationError("state labels must be non-empty");
      }
      if (!seen.insert(label).second) {
        throw ValidationError("duplicate state label '" + label + "'");
      }
    }
  }

  /// Convenience for tests and defaults: S1, S2, ..., Ss.
  static StateSpace numbered(std::size_t count, std::string_view prefix = "S") {
    StateSpace space;
    space.labels.reserve(count);
    for (std::size_t i = 1; i <= count; ++i) {
      space.labels.push_back(std::string(prefix) + std::to_string(i));
    }
    return space;
  }

  friend bool operator==(const StateSpace&, const StateSpace&) = default;
};

}  // namespace cohortmn
