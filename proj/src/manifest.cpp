#include "sacl/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sacl/error.hpp"

namespace sacl {

namespace {

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string digest_hex(EVP_MD_CTX* ctx) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx, md, &len) != 1) throw NumericError("sha256 digest failed");
    std::string hex;
    char buf[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

struct DigestContext {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    DigestContext() {
        if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) throw NumericError("sha256 init failed");
    }
    ~DigestContext() { EVP_MD_CTX_free(ctx); }
    DigestContext(const DigestContext&) = delete;
    DigestContext& operator=(const DigestContext&) = delete;
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    DigestContext d;
    EVP_DigestUpdate(d.ctx, bytes.data(), bytes.size());
    return digest_hex(d.ctx);
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SnapshotError("snapshot-io", "cannot open " + path.string());
    DigestContext d;
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0) EVP_DigestUpdate(d.ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return digest_hex(d.ctx);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw SnapshotError("snapshot-io", "cannot open " + tmp.string() + " for writing");
        out << contents;
        if (!out) throw SnapshotError("snapshot-io", "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

RunManifest::RunManifest(std::filesystem::path dir, std::string command, std::string config_echo, std::uint64_t seed)
    : dir_(std::move(dir)), command_(std::move(command)), config_echo_(std::move(config_echo)), seed_(seed),
      started_(utc_now()) {
    std::filesystem::create_directories(dir_);
    std::lock_guard lock(mutex_);
    flush_locked();
}

void RunManifest::add_trajectory(const TrajectorySeed& s) {
    std::lock_guard lock(mutex_);
    trajectories_.push_back(s);
}

void RunManifest::record_file(const std::string& relative) {
    const auto full = dir_ / relative;
    ManifestEntry e{relative, sha256_file(full), std::filesystem::file_size(full)};
    std::lock_guard lock(mutex_);
    auto it = std::find_if(files_.begin(), files_.end(), [&](const ManifestEntry& f) { return f.path == relative; });
    if (it != files_.end())
        *it = e;
    else
        files_.push_back(e);
    flush_locked();
}

void RunManifest::finalize(const std::string& status) {
    std::lock_guard lock(mutex_);
    status_ = status;
    finished_ = utc_now();
    std::sort(files_.begin(), files_.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    std::sort(trajectories_.begin(), trajectories_.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    flush_locked();
}

void RunManifest::flush_locked() const {
    nlohmann::ordered_json j;
    j["command"] = command_;
    j["code_version"] = kCodeVersion;
    j["master_seed"] = seed_;
    j["status"] = status_;
    j["started_utc"] = started_;
    if (!finished_.empty()) j["finished_utc"] = finished_;
    j["config"] = config_echo_;
    j["notes"] = nlohmann::ordered_json::array(
        {"noise kernel j_eps is normalized to unit discrete integral (a modelling choice)"});
    auto& tr = j["trajectories"] = nlohmann::ordered_json::array();
    for (const auto& t : trajectories_) tr.push_back({{"index", t.index}, {"seed", t.seed}, {"stream", t.stream}});
    auto& fs = j["files"] = nlohmann::ordered_json::array();
    for (const auto& f : files_) fs.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    write_file_atomic(dir_ / "manifest.json", j.dump(2) + "\n");
}

}  // namespace sacl
