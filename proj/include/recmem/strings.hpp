#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace recmem {

std::string_view trim(std::string_view s);

// Splits on every occurrence of `delim`. An empty input yields one empty field.
std::vector<std::string_view> split(std::string_view s, std::string_view delim);

// ASCII-only case fold; bytes >= 0x80 (ISO-8859-1 accents) pass through
// untouched so matching stays byte-exact.
std::string ascii_lower(std::string_view s);

// Collapses runs of spaces/tabs to a single space.
std::string collapse_spaces(std::string_view s);

// Accepts canonical base-10 integers only: digits, no sign, no leading zeros
// (except "0" itself). Canonical form is what keeps round-trip serialization
// byte-identical.
std::optional<std::int64_t> parse_canonical_int(std::string_view s);

// Fixed-point formatting with half-up rounding, e.g. format_fixed(0.80762, 4)
// -> "0.8076". Used everywhere a report value must be byte-stable.
std::string format_fixed(double value, int decimals);

// Fraction -> percentage with two decimals, half-up: 3136/3883 -> "80.76".
std::string format_pct(double fraction);

// Substitutes "{name}" placeholders. Unknown placeholders are left intact.
std::string substitute(std::string_view tmpl,
                       const std::vector<std::pair<std::string, std::string>>& vars);

// Filesystem-safe model names: spaces and path separators become '_'.
std::string sanitize_filename(std::string_view s);

// Dataset strings are ISO-8859-1 bytes, but JSON (cache records, report
// documents, request bodies) must be valid UTF-8. These convert losslessly in
// the Latin-1 range; codepoints above U+00FF and invalid sequences decode to
// '?', which can never produce a spurious exact match.
std::string latin1_to_utf8(std::string_view s);
std::string utf8_to_latin1(std::string_view s);

}  // namespace recmem
