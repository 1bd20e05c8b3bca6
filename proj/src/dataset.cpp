#include "recmem/dataset.hpp"

#include <fstream>
#include <sstream>

#include "recmem/errors.hpp"
#include "recmem/strings.hpp"

namespace recmem {

namespace {

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

// getline plus CRLF tolerance.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::int64_t parse_id(std::string_view field, std::size_t line_no, const char* what) {
  auto v = parse_canonical_int(field);
  if (!v || *v <= 0) fail(line_no, std::string("invalid ") + what + " '" + std::string(field) + "'");
  return *v;
}

}  // namespace

void ItemCatalog::add(Item item) {
  if (!by_id_.emplace(item.id, items_.size()).second) {
    throw ParseError("duplicate item id " + std::to_string(item.id));
  }
  items_.push_back(std::move(item));
}

const Item* ItemCatalog::find(std::int64_t id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &items_[it->second];
}

void UserTable::add(User user) {
  if (!by_id_.emplace(user.id, users_.size()).second) {
    throw ParseError("duplicate user id " + std::to_string(user.id));
  }
  users_.push_back(std::move(user));
}

const User* UserTable::find(std::int64_t id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &users_[it->second];
}

ItemCatalog parse_items(std::istream& in) {
  ItemCatalog catalog;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    // MovieID::Title::Genres. The title may contain "::"-free text only, so
    // split at the first separator for the id and the last for the genres.
    std::size_t first = line.find("::");
    if (first == std::string::npos) fail(line_no, "expected MovieID::Title::Genres");
    Item item;
    item.id = parse_id(std::string_view(line).substr(0, first), line_no, "movie id");
    item.raw_value = line.substr(first + 2);
    std::size_t last = item.raw_value.rfind("::");
    if (last == std::string::npos) fail(line_no, "missing genres field");
    item.title = item.raw_value.substr(0, last);
    std::string genres = item.raw_value.substr(last + 2);
    if (item.title.empty()) fail(line_no, "empty title");
    if (genres.empty()) fail(line_no, "empty genres");
    for (auto g : split(genres, "|")) {
      if (g.empty()) fail(line_no, "empty genre tag");
      item.genres.emplace_back(g);
    }
    try {
      catalog.add(std::move(item));
    } catch (const ParseError& e) {
      fail(line_no, e.what());
    }
  }
  return catalog;
}

UserTable parse_users(std::istream& in) {
  UserTable table;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    auto fields = split(line, "::");
    if (fields.size() != 5) fail(line_no, "expected UserID::Gender::Age::Occupation::Zip-code");
    User user;
    user.id = parse_id(fields[0], line_no, "user id");
    if (fields[1] != "M" && fields[1] != "F") {
      fail(line_no, "invalid gender '" + std::string(fields[1]) + "'");
    }
    user.gender = fields[1][0];
    auto age = parse_canonical_int(fields[2]);
    if (!age || *age < 0) fail(line_no, "invalid age code");
    user.age = static_cast<int>(*age);
    auto occ = parse_canonical_int(fields[3]);
    if (!occ || *occ < 0) fail(line_no, "invalid occupation code");
    user.occupation = static_cast<int>(*occ);
    if (fields[4].empty()) fail(line_no, "empty zip code");
    user.zip = std::string(fields[4]);
    user.raw_value = line.substr(line.find("::") + 2);
    try {
      table.add(std::move(user));
    } catch (const ParseError& e) {
      fail(line_no, e.what());
    }
  }
  return table;
}

InteractionLog parse_interactions(std::istream& in) {
  InteractionLog log;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    auto fields = split(line, "::");
    if (fields.size() != 4) fail(line_no, "expected UserID::MovieID::Rating::Timestamp");
    Interaction x;
    x.user_id = parse_id(fields[0], line_no, "user id");
    x.item_id = parse_id(fields[1], line_no, "movie id");
    auto rating = parse_canonical_int(fields[2]);
    if (!rating) fail(line_no, "non-integer rating");
    if (*rating < 1 || *rating > 5) {
      fail(line_no, "rating " + std::to_string(*rating) + " out of range [1,5]");
    }
    x.rating = static_cast<int>(*rating);
    auto ts = parse_canonical_int(fields[3]);
    if (!ts) fail(line_no, "non-integer timestamp");
    x.timestamp = *ts;
    log.push_back(x);
  }
  return log;
}

std::string to_source_line(const Item& item) {
  return std::to_string(item.id) + "::" + item.raw_value;
}

std::string to_source_line(const User& user) {
  return std::to_string(user.id) + "::" + user.raw_value;
}

std::string to_source_line(const Interaction& x) {
  return std::to_string(x.user_id) + "::" + std::to_string(x.item_id) + "::" +
         std::to_string(x.rating) + "::" + std::to_string(x.timestamp);
}

namespace {

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return in;
}

}  // namespace

MovieLensDataset load_movielens(const std::filesystem::path& dir) {
  MovieLensDataset dataset;
  {
    auto in = open_or_throw(dir / "movies.dat");
    dataset.items = parse_items(in);
  }
  {
    auto in = open_or_throw(dir / "users.dat");
    dataset.users = parse_users(in);
  }
  {
    auto in = open_or_throw(dir / "ratings.dat");
    dataset.interactions = parse_interactions(in);
  }
  return dataset;
}

}  // namespace recmem
