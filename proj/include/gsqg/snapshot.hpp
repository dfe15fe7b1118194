#pragma once

#include <filesystem>
#include <iosfwd>

#include "gsqg/spectral_field.hpp"

namespace gsqg {

struct SnapshotHeader {
  int grid_size = 0;
  double alpha = 0.0;
  double gamma = 0.0;
  double nu = 0.0;
  double t = 0.0;
};

struct Snapshot {
  SnapshotHeader header;
  SpectralField field;
};

// Spectral snapshot files hold the header followed by one record
// (n1, n2, re, im) per representable mode in the lexicographically positive
// half plane (n1 > 0, or n1 == 0 and n2 > 0), in increasing (n1, n2) order.
//
// Binary layout, little-endian throughout:
//   int32 M | float64 alpha | float64 gamma | float64 nu | float64 t |
//   int32 record_count | record_count x (int32 n1, int32 n2, float64 re, float64 im)
//
// The CSV mirror carries the same content:
//   M,alpha,gamma,nu,t
//   <values>
//   n1,n2,re,im
//   <one line per record>

void write_snapshot_binary(std::ostream& out, const SnapshotHeader& header, const SpectralField& field);
void write_snapshot_csv(std::ostream& out, const SnapshotHeader& header, const SpectralField& field);
Snapshot read_snapshot_binary(std::istream& in);
Snapshot read_snapshot_csv(std::istream& in);

void write_snapshot_binary(const std::filesystem::path& path, const SnapshotHeader& header, const SpectralField& field);
void write_snapshot_csv(const std::filesystem::path& path, const SnapshotHeader& header, const SpectralField& field);
Snapshot read_snapshot_binary(const std::filesystem::path& path);
Snapshot read_snapshot_csv(const std::filesystem::path& path);

/// Round-trip formatting for doubles in text outputs.
std::string format_double(double v);

}  // namespace gsqg
