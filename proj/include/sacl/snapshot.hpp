#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sacl/torus_field.hpp"

namespace sacl {

/// One SACF1 record: a JSON header line
///   {"magic":"SACF1","d":..,"shape":[..],"eps":..,"time":..}
/// then product(shape) little-endian float64 values, row-major. Streams are
/// plain concatenations of records. Extra header keys are carried in `kind`
/// and `dt` (optional).
struct SnapshotMeta {
    double eps = 0.0;
    double time = 0.0;
    std::string kind;           // e.g. "u", "increment", "noise"; empty = omitted
    std::optional<double> dt;
};

struct Snapshot {
    TorusField field;
    SnapshotMeta meta;
};

void write_snapshot(std::ostream& out, const TorusField& field, const SnapshotMeta& meta);
void write_snapshot(const std::string& path, const TorusField& field, const SnapshotMeta& meta);

/// Reads the next record. Returns nullopt at a clean end of stream. With
/// `expected_dim` set, a record of another dimension is a shape error.
std::optional<Snapshot> read_snapshot(std::istream& in, std::optional<int> expected_dim = std::nullopt);
Snapshot read_snapshot(const std::string& path, std::optional<int> expected_dim = std::nullopt);
std::vector<Snapshot> read_snapshots(const std::string& path, std::optional<int> expected_dim = std::nullopt);

}  // namespace sacl
