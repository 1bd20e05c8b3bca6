#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "recmem/dataset.hpp"

namespace recmem {

// Case-fold (ASCII), trim, collapse whitespace runs.
std::string normalize_title(std::string_view title);

// Maps free-text movie titles back to catalog ids. Lookup is exact after
// normalization; the only extra forms tried are leading-article inversion
// ("Matrix, The" <-> "The Matrix", both directions) and a year-stripped key
// that exists only where dropping "(YYYY)" stays unambiguous. No fuzzy
// matching.
class TitleIndex {
 public:
  static TitleIndex build(const ItemCatalog& catalog);

  std::optional<std::int64_t> resolve(std::string_view title) const;
  std::size_t collision_count() const { return collisions_; }

 private:
  std::unordered_map<std::string, std::int64_t> exact_;
  std::unordered_map<std::string, std::int64_t> year_stripped_;
  std::size_t collisions_ = 0;
};

}  // namespace recmem
