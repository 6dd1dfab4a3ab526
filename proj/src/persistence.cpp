#include "medlda/persistence.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace medlda {

namespace {

constexpr char kMagic[8] = {'M', 'E', 'D', 'L', 'D', 'A', 'S', 'N'};
constexpr std::size_t kHeaderSize = 16;  // magic, version, count

template <typename T>
void put(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  template <typename T>
  T get(const char* what) {
    if (data_.size() - pos_ < sizeof(T)) {
      throw SnapshotError(std::string("snapshot truncated while reading ") + what);
    }
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, data_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
  }

  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string serialize_snapshots(std::span<const ModelSnapshot> snapshots) {
  if (snapshots.empty()) throw SnapshotError("nothing to save: no snapshots");
  std::string out(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(snapshots.size()));
  for (const auto& s : snapshots) {
    const auto K = s.phi_hat.rows();
    const auto V = s.phi_hat.cols();
    const auto L = s.etas.rows();
    if (s.etas.cols() != K) throw SnapshotError("snapshot etas and phi_hat disagree on K");
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.task));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(K));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(V));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(L));
    put<std::int32_t>(out, s.burn_in);
    put<std::uint64_t>(out, s.seed);
    put<double>(out, s.hyper.alpha);
    put<double>(out, s.hyper.beta);
    put<double>(out, s.hyper.nu2);
    put<double>(out, s.hyper.c);
    put<double>(out, s.hyper.ell);
    put<double>(out, s.hyper.epsilon);
    for (Eigen::Index k = 0; k < K; ++k) {
      for (Eigen::Index t = 0; t < V; ++t) put<double>(out, s.phi_hat(k, t));
    }
    for (Eigen::Index i = 0; i < L; ++i) {
      for (Eigen::Index k = 0; k < K; ++k) put<double>(out, s.etas(i, k));
    }
  }
  put<std::uint64_t>(out, fnv1a64(std::string_view(out).substr(kHeaderSize)));
  return out;
}

std::vector<ModelSnapshot> deserialize_snapshots(std::string_view bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw SnapshotError("not a medlda snapshot file (bad magic)");
  }
  Reader header(bytes.substr(sizeof kMagic));
  const auto version = header.get<std::uint32_t>("version");
  if (version != kSnapshotVersion) {
    throw SnapshotError("unsupported snapshot format version " + std::to_string(version) +
                        " (this reader understands version " +
                        std::to_string(kSnapshotVersion) + ")");
  }
  const auto count = header.get<std::uint32_t>("snapshot count");
  if (bytes.size() < kHeaderSize + sizeof(std::uint64_t)) {
    throw SnapshotError("snapshot truncated: missing checksum");
  }
  const auto body = bytes.substr(kHeaderSize, bytes.size() - kHeaderSize - sizeof(std::uint64_t));
  Reader trailer(bytes.substr(bytes.size() - sizeof(std::uint64_t)));
  if (trailer.get<std::uint64_t>("checksum") != fnv1a64(body)) {
    throw SnapshotError("snapshot checksum mismatch (file corrupted or truncated)");
  }
  if (count == 0) throw SnapshotError("snapshot file holds no models");

  Reader r(body);
  std::vector<ModelSnapshot> out;
  for (std::uint32_t m = 0; m < count; ++m) {
    ModelSnapshot s;
    const auto task = r.get<std::uint32_t>("task kind");
    if (task > static_cast<std::uint32_t>(TaskKind::multilabel)) {
      throw SnapshotError("unknown task kind code " + std::to_string(task));
    }
    s.task = static_cast<TaskKind>(task);
    const auto K = r.get<std::uint32_t>("K");
    const auto V = r.get<std::uint64_t>("V");
    const auto L = r.get<std::uint32_t>("L");
    s.burn_in = r.get<std::int32_t>("burn-in");
    s.seed = r.get<std::uint64_t>("seed");
    s.hyper.num_topics = static_cast<int>(K);
    s.hyper.alpha = r.get<double>("alpha");
    s.hyper.beta = r.get<double>("beta");
    s.hyper.nu2 = r.get<double>("nu2");
    s.hyper.c = r.get<double>("c");
    s.hyper.ell = r.get<double>("ell");
    s.hyper.epsilon = r.get<double>("epsilon");
    const std::uint64_t need = (std::uint64_t(K) * V + std::uint64_t(L) * K) * sizeof(double);
    if (K == 0 || need > r.remaining()) throw SnapshotError("snapshot truncated in matrix data");
    s.phi_hat.resize(K, static_cast<Eigen::Index>(V));
    for (Eigen::Index k = 0; k < K; ++k) {
      for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(V); ++t) s.phi_hat(k, t) = r.get<double>("phi");
    }
    s.etas.resize(L, K);
    for (Eigen::Index i = 0; i < L; ++i) {
      for (Eigen::Index k = 0; k < K; ++k) s.etas(i, k) = r.get<double>("eta");
    }
    out.push_back(std::move(s));
  }
  if (r.remaining() != 0) throw SnapshotError("trailing bytes after the last snapshot");
  return out;
}

void save_snapshots(std::span<const ModelSnapshot> snapshots, const std::filesystem::path& path) {
  const auto bytes = serialize_snapshots(snapshots);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw SnapshotError("cannot open '" + path.string() + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw SnapshotError("failed writing '" + path.string() + "'");
}

void save_snapshot(const ModelSnapshot& snapshot, const std::filesystem::path& path) {
  save_snapshots(std::span(&snapshot, 1), path);
}

std::vector<ModelSnapshot> load_snapshots(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SnapshotError("cannot open snapshot '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return deserialize_snapshots(ss.str());
}

ModelSnapshot load_snapshot(const std::filesystem::path& path) {
  auto all = load_snapshots(path);
  if (all.size() != 1) {
    throw SnapshotError("expected one model in '" + path.string() + "', found " +
                        std::to_string(all.size()));
  }
  return std::move(all.front());
}

}  // namespace medlda
