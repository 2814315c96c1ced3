#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bnls/evolution.hpp"

namespace bnls::io {

/// Column order of the time-series CSV:
///   t, mass, grad_norm_sq, lap_norm_sq, potential, action, energy0, nehari, pohozaev, virial_Q,
///   M_R<r> for each radius, dMdt_R<r> (finite difference) for each radius,
///   rate_R<r> (instantaneous) for each radius.
std::string series_header(const std::vector<double>& radii);

/// Every number is written with 17 significant digits. Missing virial entries are left empty.
void write_series(const std::vector<DiagnosticsRecord>& records, const std::vector<double>& radii,
                  const std::filesystem::path& path);
std::string format_series(const std::vector<DiagnosticsRecord>& records,
                          const std::vector<double>& radii);

/// Formats x with 17 significant digits ("%.17g").
std::string format_double(double x);

}  // namespace bnls::io
