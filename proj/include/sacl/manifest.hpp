#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

namespace sacl {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Writes to `path.tmp` and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

inline constexpr const char* kCodeVersion = "0.1.0";

struct ManifestEntry {
    std::string path;  // relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct TrajectorySeed {
    std::uint64_t index = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/// manifest.json of one output directory. Written with status "running" when
/// constructed and rewritten on every update; `finalize` records the closing
/// status and the finish time. Safe to call from several threads.
class RunManifest {
public:
    RunManifest(std::filesystem::path dir, std::string command, std::string config_echo, std::uint64_t seed);

    void add_trajectory(const TrajectorySeed& s);
    /// Checksums `relative` (a file inside the output directory) and records it.
    void record_file(const std::string& relative);
    void finalize(const std::string& status);

    const std::vector<ManifestEntry>& files() const { return files_; }
    std::filesystem::path path() const { return dir_ / "manifest.json"; }

private:
    void flush_locked() const;

    std::filesystem::path dir_;
    std::string command_;
    std::string config_echo_;
    std::uint64_t seed_;
    std::string started_;
    std::string finished_;
    std::string status_ = "running";
    std::vector<TrajectorySeed> trajectories_;
    std::vector<ManifestEntry> files_;
    mutable std::mutex mutex_;
};

}  // namespace sacl
