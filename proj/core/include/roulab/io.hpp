#pragma once

#include <filesystem>
#include <span>
#include <string>

namespace roulab {

/// Formats with 17 significant digits ("%.17g", C locale): enough to
/// round-trip any double, so identical values serialize identically.
std::string fmt_g17(double x);

/// Two-column CSV (header line + one row per grid point) at full precision.
std::string series_csv(const std::string& col0, const std::string& col1,
                       std::span<const double> t, std::span<const double> x);

/// Writes via a temporary file in the same directory plus atomic rename, so
/// no partially written file is ever observable at `file`.
void atomic_write(const std::filesystem::path& file, const std::string& content);

/// FNV-1a 64-bit content hash, hex string; used to fingerprint calibration
/// documents in manifests.
std::string fnv1a_hex(const std::string& content);

}  // namespace roulab
