#include "recmem/model_io.hpp"

#include <cstring>
#include <fstream>

#include "recmem/errors.hpp"

namespace recmem {

namespace {

constexpr char kMagic[4] = {'R', 'M', 'D', 'L'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kKindBprmf = 1;
constexpr std::uint32_t kKindEase = 2;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

void put_block(std::ostream& out, const std::vector<double>& v) {
  put_u32(out, static_cast<std::uint32_t>(v.size()));
  for (double x : v) put_f64(out, x);
}

std::vector<double> get_block(std::istream& in) {
  std::uint32_t n = get_u32(in);
  std::vector<double> v(n);
  for (double& x : v) x = get_f64(in);
  return v;
}

std::ifstream open_model(const std::filesystem::path& path, std::uint32_t expected_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot open model file " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw StorageError(path.string() + ": not a model container");
  }
  std::uint32_t version = get_u32(in);
  if (version != kVersion) {
    throw StorageError(path.string() + ": unsupported container version " +
                       std::to_string(version));
  }
  std::uint32_t kind = get_u32(in);
  if (kind != expected_kind) {
    throw StorageError(path.string() + ": container holds a different model kind");
  }
  return in;
}

}  // namespace

void save_bprmf(const std::filesystem::path& path, const BprmfModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError("cannot write model file " + path.string());
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, kKindBprmf);
  put_u32(out, static_cast<std::uint32_t>(model.n_users()));
  put_u32(out, static_cast<std::uint32_t>(model.n_items()));
  put_u32(out, static_cast<std::uint32_t>(model.config().factors));
  put_u32(out, model.config().use_biases ? 1 : 0);
  put_block(out, model.user_factors());
  put_block(out, model.item_factors());
  put_block(out, model.item_biases());
  if (!out) throw StorageError("short write to " + path.string());
}

BprmfModel load_bprmf(const std::filesystem::path& path) {
  auto in = open_model(path, kKindBprmf);
  std::uint32_t n_users = get_u32(in);
  std::uint32_t n_items = get_u32(in);
  std::uint32_t factors = get_u32(in);
  std::uint32_t use_biases = get_u32(in);
  BprmfConfig cfg;
  cfg.factors = static_cast<int>(factors);
  cfg.use_biases = use_biases != 0;
  BprmfModel model(static_cast<int>(n_users), static_cast<int>(n_items), cfg);
  model.user_factors() = get_block(in);
  model.item_factors() = get_block(in);
  model.item_biases() = get_block(in);
  if (!in) throw StorageError("truncated model file " + path.string());
  if (model.user_factors().size() != static_cast<std::size_t>(n_users) * factors ||
      model.item_factors().size() != static_cast<std::size_t>(n_items) * factors ||
      model.item_biases().size() != n_items) {
    throw StorageError(path.string() + ": payload does not match declared dims");
  }
  return model;
}

void save_ease(const std::filesystem::path& path, const EaseModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError("cannot write model file " + path.string());
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, kKindEase);
  put_u32(out, static_cast<std::uint32_t>(model.n_items()));
  put_f64(out, model.lambda());
  put_block(out, model.weights());
  if (!out) throw StorageError("short write to " + path.string());
}

EaseModel load_ease(const std::filesystem::path& path, const InteractionMatrix& train) {
  auto in = open_model(path, kKindEase);
  std::uint32_t n_items = get_u32(in);
  double lambda = get_f64(in);
  std::vector<double> b = get_block(in);
  if (!in) throw StorageError("truncated model file " + path.string());
  if (static_cast<int>(n_items) != train.n_items() ||
      b.size() != static_cast<std::size_t>(n_items) * n_items) {
    throw StorageError(path.string() + ": payload does not match the training matrix");
  }
  return EaseModel(train, std::move(b), lambda);
}

}  // namespace recmem
