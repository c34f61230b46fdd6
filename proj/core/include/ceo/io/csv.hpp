#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ceo/fit/recipes.hpp"
#include "ceo/pulse.hpp"
#include "ceo/spectrum.hpp"

namespace ceo::io {

// '#'-prefixed metadata lines written before the CSV header row.
using Metadata = std::vector<std::pair<std::string, std::string>>;

// Canonical shortest-round-trip formatting (17 significant digits).
std::string format_double(double value);

// Spectrum files: columns freq_hz, R, S_re, S_im (frequencies stored in Hz).
void write_spectrum_csv(const std::string& path, const Spectrum& spectrum,
                        const Metadata& metadata);
Spectrum read_spectrum_csv(const std::string& path, Metadata* metadata = nullptr);

// Trace files: columns t_s, value[, value_im].
void write_trace_csv(const std::string& path, const RealTrace& trace,
                     const Metadata& metadata);
RealTrace read_trace_csv(const std::string& path, Metadata* metadata = nullptr);
void write_trace_csv(const std::string& path, const ComplexTrace& trace,
                     const Metadata& metadata);

// Back-action summary: columns C, dOmega_hz, dKappa_hz.
void write_dba_summary_csv(const std::string& path, const std::vector<double>& c_values,
                           const std::vector<DbaShift>& shifts, const Metadata& metadata);

// R(omega, t) matrix: first column t_s, one column R@<freq_hz> per frequency.
void write_time_series_csv(const std::string& path, const fit::SpectralTimeSeries& series,
                           const Metadata& metadata);
fit::SpectralTimeSeries read_time_series_csv(const std::string& path,
                                             Metadata* metadata = nullptr);

// FNV-1a 64-bit digest of a canonical byte string, as fixed-width hex.
std::string digest(const std::string& text);

}  // namespace ceo::io
