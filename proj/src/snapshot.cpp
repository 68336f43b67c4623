#include "sacl/snapshot.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "sacl/error.hpp"

namespace sacl {

namespace {

using ordered_json = nlohmann::ordered_json;

std::uint64_t to_little(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
}

}  // namespace

void write_snapshot(std::ostream& out, const TorusField& field, const SnapshotMeta& meta) {
    if (!field.is_scalar()) throw InvalidFieldError("write_snapshot: only scalar fields are stored");
    field.check_finite();
    const Grid& g = field.grid();
    ordered_json h;
    h["magic"] = "SACF1";
    h["d"] = g.dim();
    h["shape"] = std::vector<int>(static_cast<std::size_t>(g.dim()), g.n());
    h["eps"] = meta.eps;
    h["time"] = meta.time;
    if (!meta.kind.empty()) h["kind"] = meta.kind;
    if (meta.dt) h["dt"] = *meta.dt;
    out << h.dump() << '\n';
    std::vector<std::uint64_t> raw(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) raw[i] = to_little(std::bit_cast<std::uint64_t>(field[i]));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 8));
    if (!out) throw SnapshotError("snapshot-io", "write_snapshot: stream write failed");
}

void write_snapshot(const std::string& path, const TorusField& field, const SnapshotMeta& meta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SnapshotError("snapshot-io", "cannot open " + path + " for writing");
    write_snapshot(out, field, meta);
}

std::optional<Snapshot> read_snapshot(std::istream& in, std::optional<int> expected_dim) {
    if (in.peek() == std::char_traits<char>::eof()) return std::nullopt;
    std::string line;
    std::getline(in, line);
    ordered_json h;
    try {
        h = ordered_json::parse(line);
    } catch (const std::exception&) {
        throw SnapshotError("snapshot-magic", "snapshot header is not a JSON object");
    }
    if (!h.is_object() || !h.contains("magic") || h["magic"] != "SACF1")
        throw SnapshotError("snapshot-magic", "snapshot magic mismatch (expected SACF1)");
    if (!h.contains("d") || !h.contains("shape") || !h["shape"].is_array())
        throw SnapshotError("snapshot-shape", "snapshot header lacks d or shape");
    const int d = h["d"].get<int>();
    const auto shape = h["shape"].get<std::vector<int>>();
    if (static_cast<int>(shape.size()) != d || d < 1)
        throw SnapshotError("snapshot-shape", "snapshot shape does not match its dimension");
    for (int s : shape)
        if (s != shape.front()) throw SnapshotError("snapshot-shape", "snapshot grid must be cubic");
    if (expected_dim && *expected_dim != d)
        throw SnapshotError("snapshot-shape", "snapshot has dimension " + std::to_string(d) + ", expected " +
                                                  std::to_string(*expected_dim));
    std::optional<Grid> grid;
    try {
        grid.emplace(d, shape.front());
    } catch (const Error& e) {
        throw SnapshotError("snapshot-shape", std::string("snapshot grid invalid: ") + e.what());
    }

    Snapshot snap{TorusField(*grid), SnapshotMeta{}};
    snap.meta.eps = h.value("eps", 0.0);
    snap.meta.time = h.value("time", 0.0);
    snap.meta.kind = h.value("kind", std::string());
    if (h.contains("dt")) snap.meta.dt = h["dt"].get<double>();

    std::vector<std::uint64_t> raw(grid->size());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 8));
    if (static_cast<std::size_t>(in.gcount()) != raw.size() * 8)
        throw SnapshotError("snapshot-length", "snapshot payload is shorter than product(shape) values");
    for (std::size_t i = 0; i < raw.size(); ++i) {
        double v = std::bit_cast<double>(to_little(raw[i]));
        if (!std::isfinite(v)) throw SnapshotError("snapshot-nonfinite", "snapshot payload contains non-finite values");
        snap.field[i] = v;
    }
    return snap;
}

Snapshot read_snapshot(const std::string& path, std::optional<int> expected_dim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SnapshotError("snapshot-io", "cannot open " + path);
    auto s = read_snapshot(in, expected_dim);
    if (!s) throw SnapshotError("snapshot-length", path + " is empty");
    if (in.peek() != std::char_traits<char>::eof())
        throw SnapshotError("snapshot-length", path + " holds data beyond one record");
    return std::move(*s);
}

std::vector<Snapshot> read_snapshots(const std::string& path, std::optional<int> expected_dim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SnapshotError("snapshot-io", "cannot open " + path);
    std::vector<Snapshot> out;
    while (auto s = read_snapshot(in, expected_dim)) out.push_back(std::move(*s));
    return out;
}

}  // namespace sacl
