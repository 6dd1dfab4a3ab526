#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "medlda/model.hpp"

namespace medlda {

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

// Byte layout in docs/snapshot_format.md. A file holds one or more snapshots
// (several for a one-vs-all ensemble).
std::string serialize_snapshots(std::span<const ModelSnapshot> snapshots);
std::vector<ModelSnapshot> deserialize_snapshots(std::string_view bytes);

void save_snapshots(std::span<const ModelSnapshot> snapshots, const std::filesystem::path& path);
void save_snapshot(const ModelSnapshot& snapshot, const std::filesystem::path& path);
std::vector<ModelSnapshot> load_snapshots(const std::filesystem::path& path);
// Throws SnapshotError unless the file holds exactly one snapshot.
ModelSnapshot load_snapshot(const std::filesystem::path& path);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace medlda
