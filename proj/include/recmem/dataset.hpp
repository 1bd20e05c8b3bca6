#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace recmem {

// One movies.dat record. raw_value keeps the exact "Title::Genres" bytes so
// probe verdicts can stay byte-faithful to the file.
struct Item {
  std::int64_t id = 0;
  std::string title;
  std::vector<std::string> genres;
  std::string raw_value;
};

// One users.dat record; raw_value is "Gender::Age::Occupation::Zip-code".
struct User {
  std::int64_t id = 0;
  char gender = '?';
  int age = 0;
  int occupation = 0;
  std::string zip;
  std::string raw_value;
};

// One ratings.dat record.
struct Interaction {
  std::int64_t user_id = 0;
  std::int64_t item_id = 0;
  int rating = 0;
  std::int64_t timestamp = 0;
};

using InteractionLog = std::vector<Interaction>;

class ItemCatalog {
 public:
  void add(Item item);  // throws ParseError on duplicate id
  const std::vector<Item>& items() const { return items_; }
  const Item* find(std::int64_t id) const;
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

 private:
  std::vector<Item> items_;
  std::unordered_map<std::int64_t, std::size_t> by_id_;
};

class UserTable {
 public:
  void add(User user);
  const std::vector<User>& users() const { return users_; }
  const User* find(std::int64_t id) const;
  std::size_t size() const { return users_.size(); }
  bool empty() const { return users_.empty(); }

 private:
  std::vector<User> users_;
  std::unordered_map<std::int64_t, std::size_t> by_id_;
};

// Parsers for the "::"-separated MovieLens-1M formats. Input is treated as
// ISO-8859-1 bytes; LF and CRLF line endings are both accepted. Errors carry
// 1-based line numbers.
ItemCatalog parse_items(std::istream& in);
UserTable parse_users(std::istream& in);
InteractionLog parse_interactions(std::istream& in);

// Reconstructions of the source lines (round-trip property).
std::string to_source_line(const Item& item);
std::string to_source_line(const User& user);
std::string to_source_line(const Interaction& interaction);

struct MovieLensDataset {
  ItemCatalog items;
  UserTable users;
  InteractionLog interactions;
};

// Loads movies.dat / users.dat / ratings.dat from a directory.
MovieLensDataset load_movielens(const std::filesystem::path& dir);

enum class SplitOrder { Temporal, SeededRandom };

struct SplitLog {
  InteractionLog train;
  InteractionLog test;
  double ratio = 0.8;
  SplitOrder order = SplitOrder::Temporal;
  std::uint64_t seed = 42;
};

// Per-user leave-n-out holdout. Temporal mode orders each user's history by
// (timestamp, item_id) ascending and keeps the first ceil(ratio*n) rows for
// training; SeededRandom shuffles per user instead. A user with one
// interaction contributes it to train.
SplitLog split_leave_n_out(const InteractionLog& log, double ratio,
                           SplitOrder order = SplitOrder::Temporal,
                           std::uint64_t seed = 42);

// Returns each user's interactions in the declared per-user order
// (timestamp ascending, ties by item id). Keyed by user id.
std::map<std::int64_t, std::vector<Interaction>> interactions_by_user(
    const InteractionLog& log);

struct PopularityTiers {
  std::set<std::int64_t> top;
  std::set<std::int64_t> middle;
  std::set<std::int64_t> bottom;
  std::map<std::int64_t, std::size_t> counts;  // catalog items only
};

// Ranks catalog items by interaction count descending (ties by id ascending,
// zero-interaction items last). Band width is 20% of the items that actually
// appear in the log; top/bottom are the ends of the ranking, middle is the
// centered band.
PopularityTiers popularity_tiers(const InteractionLog& log, const ItemCatalog& catalog);

// Structured text report: entity counts plus tier boundaries.
std::string dataset_summary_text(const MovieLensDataset& dataset,
                                 const PopularityTiers& tiers);

}  // namespace recmem
