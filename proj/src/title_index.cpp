#include "recmem/title_index.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <vector>

#include "recmem/strings.hpp"

namespace recmem {

std::string normalize_title(std::string_view title) {
  return ascii_lower(collapse_spaces(trim(title)));
}

namespace {

// "matrix, the (1999)" -> body "matrix, the", year " (1999)".
std::pair<std::string, std::string> split_year(const std::string& s) {
  if (s.size() >= 7 && s.back() == ')') {
    std::size_t open = s.rfind(" (");
    if (open != std::string::npos && s.size() - open == 7) {
      bool digits = true;
      for (std::size_t i = open + 2; i + 1 < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') digits = false;
      }
      if (digits) return {s.substr(0, open), s.substr(open)};
    }
  }
  return {s, ""};
}

const char* kArticles[] = {"the", "an", "a"};

// "the matrix" -> "matrix, the"
std::optional<std::string> to_comma_form(const std::string& body) {
  for (const char* art : kArticles) {
    std::string prefix = std::string(art) + " ";
    if (body.size() > prefix.size() && body.compare(0, prefix.size(), prefix) == 0) {
      return body.substr(prefix.size()) + ", " + art;
    }
  }
  return std::nullopt;
}

// "matrix, the" -> "the matrix"
std::optional<std::string> from_comma_form(const std::string& body) {
  for (const char* art : kArticles) {
    std::string suffix = std::string(", ") + art;
    if (body.size() > suffix.size() &&
        body.compare(body.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return std::string(art) + " " + body.substr(0, body.size() - suffix.size());
    }
  }
  return std::nullopt;
}

std::vector<std::string> candidate_forms(const std::string& normalized) {
  std::vector<std::string> out{normalized};
  auto [body, year] = split_year(normalized);
  if (auto comma = to_comma_form(body)) out.push_back(*comma + year);
  if (auto front = from_comma_form(body)) out.push_back(*front + year);
  return out;
}

}  // namespace

TitleIndex TitleIndex::build(const ItemCatalog& catalog) {
  TitleIndex index;
  std::map<std::string, std::size_t> stripped_freq;
  for (const auto& item : catalog.items()) {
    std::string key = normalize_title(item.title);
    auto [it, inserted] = index.exact_.emplace(key, item.id);
    if (!inserted) {
      ++index.collisions_;
      std::cerr << "warning: duplicate title '" << item.title << "' (ids "
                << std::min(it->second, item.id) << ", " << std::max(it->second, item.id)
                << "); resolving to the lower id\n";
      it->second = std::min(it->second, item.id);
    }
    auto [body, year] = split_year(key);
    if (!year.empty()) ++stripped_freq[body];
  }
  // Year-less lookups only resolve where dropping the year is unambiguous.
  for (const auto& item : catalog.items()) {
    std::string key = normalize_title(item.title);
    auto [body, year] = split_year(key);
    if (year.empty() || stripped_freq[body] != 1) continue;
    index.year_stripped_.emplace(body, item.id);
  }
  return index;
}

std::optional<std::int64_t> TitleIndex::resolve(std::string_view title) const {
  std::string normalized = normalize_title(title);
  auto forms = candidate_forms(normalized);
  for (const auto& form : forms) {
    auto it = exact_.find(form);
    if (it != exact_.end()) return it->second;
  }
  for (const auto& form : forms) {
    auto it = year_stripped_.find(form);
    if (it != year_stripped_.end()) return it->second;
  }
  return std::nullopt;
}

}  // namespace recmem
