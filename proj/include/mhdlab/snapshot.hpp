#pragma once

#include <array>
#include <string>
#include <vector>

#include "mhdlab/spectral.hpp"

namespace mhd {

struct SnapshotField {
    std::string name;                           // "u" or "b"
    std::vector<std::vector<double>> samples;   // per component, x1 slowest
};

// MHDSNAP1 container: seven ASCII header lines, a blank line, then the
// real-space samples as little-endian IEEE doubles.
struct Snapshot {
    int dim = 2;
    std::array<int, 3> modes{0, 0, 1};
    double time = 0.0;
    double nu = 0.0;
    double eta = 0.0;
    std::vector<SnapshotField> fields;

    Grid grid() const;
    const SnapshotField* find(const std::string& name) const;
};

Snapshot snapshot_of(const SpectralField& b, double time, double nu,
                     double eta);
Snapshot snapshot_of(const SpectralField& u, const SpectralField& b,
                     double time, double nu, double eta);

// Trigonometric interpolation of the named payload field.
SpectralField field_from(const Snapshot& snap, const std::string& name);

// Atomic: writes a temporary file next to path, then renames.
void write_snapshot(const Snapshot& snap, const std::string& path);

Snapshot read_snapshot(const std::string& path);

}  // namespace mhd
