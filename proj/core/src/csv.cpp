#include "ceo/io/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ceo/constants.hpp"

namespace ceo::io {

namespace {

void write_metadata(std::ostream& out, const Metadata& metadata) {
  for (const auto& [key, value] : metadata) out << "# " << key << ": " << value << "\n";
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& text, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double value = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw std::runtime_error("csv: bad numeric field '" + text + "' in " + where);
  }
}

struct ParsedCsv {
  Metadata metadata;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

ParsedCsv read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");
  ParsedCsv parsed;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      std::string key = line.substr(1, colon == std::string::npos ? std::string::npos
                                                                  : colon - 1);
      std::string value = colon == std::string::npos ? "" : line.substr(colon + 1);
      auto trim = [](std::string& s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
      };
      trim(key);
      trim(value);
      parsed.metadata.emplace_back(key, value);
      continue;
    }
    if (!header_seen) {
      parsed.header = split_line(line);
      header_seen = true;
      continue;
    }
    const auto fields = split_line(line);
    if (fields.size() != parsed.header.size())
      throw std::runtime_error("csv: column count mismatch at " + path + ":" +
                               std::to_string(line_no));
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields)
      row.push_back(parse_double(f, path + ":" + std::to_string(line_no)));
    parsed.rows.push_back(std::move(row));
  }
  if (!header_seen) throw std::runtime_error("csv: missing header row in '" + path + "'");
  return parsed;
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string digest(const std::string& text) {
  // FNV-1a 64
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buffer[20];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

void write_spectrum_csv(const std::string& path, const Spectrum& spectrum,
                        const Metadata& metadata) {
  spectrum.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write '" + path + "'");
  write_metadata(out, metadata);
  const bool with_sigma = !spectrum.sigma.empty();
  out << (with_sigma ? "freq_hz,R,S_re,S_im,sigma_R\n" : "freq_hz,R,S_re,S_im\n");
  for (std::size_t i = 0; i < spectrum.frequencies.size(); ++i) {
    const double r = spectrum.r_values.empty() ? 0.0 : spectrum.r_values[i];
    const cplx s = spectrum.s_values.empty() ? cplx(0.0, 0.0) : spectrum.s_values[i];
    out << format_double(angular_to_hz(spectrum.frequencies[i])) << ',' << format_double(r)
        << ',' << format_double(s.real()) << ',' << format_double(s.imag());
    if (with_sigma) out << ',' << format_double(spectrum.sigma[i]);
    out << "\n";
  }
}

Spectrum read_spectrum_csv(const std::string& path, Metadata* metadata) {
  const ParsedCsv parsed = read_csv(path);
  const bool with_sigma = parsed.header.size() == 5 && parsed.header[4] == "sigma_R";
  if ((parsed.header.size() != 4 && !with_sigma) || parsed.header[0] != "freq_hz")
    throw std::runtime_error("csv: '" + path + "' is not a spectrum file");
  Spectrum spectrum;
  for (const auto& row : parsed.rows) {
    spectrum.frequencies.push_back(hz_to_angular(row[0]));
    spectrum.r_values.push_back(row[1]);
    spectrum.s_values.emplace_back(row[2], row[3]);
    if (with_sigma) spectrum.sigma.push_back(row[4]);
  }
  spectrum.validate();
  if (metadata) *metadata = parsed.metadata;
  return spectrum;
}

void write_trace_csv(const std::string& path, const RealTrace& trace,
                     const Metadata& metadata) {
  trace.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write '" + path + "'");
  write_metadata(out, metadata);
  out << "t_s,value\n";
  for (std::size_t i = 0; i < trace.samples.size(); ++i)
    out << format_double(trace.grid.time(i)) << ',' << format_double(trace.samples[i])
        << "\n";
}

void write_trace_csv(const std::string& path, const ComplexTrace& trace,
                     const Metadata& metadata) {
  trace.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write '" + path + "'");
  write_metadata(out, metadata);
  out << "t_s,value,value_im\n";
  for (std::size_t i = 0; i < trace.samples.size(); ++i)
    out << format_double(trace.grid.time(i)) << ',' << format_double(trace.samples[i].real())
        << ',' << format_double(trace.samples[i].imag()) << "\n";
}

RealTrace read_trace_csv(const std::string& path, Metadata* metadata) {
  const ParsedCsv parsed = read_csv(path);
  if (parsed.header.size() < 2 || parsed.header[0] != "t_s")
    throw std::runtime_error("csv: '" + path + "' is not a trace file");
  RealTrace trace;
  std::vector<double> times;
  for (const auto& row : parsed.rows) {
    times.push_back(row[0]);
    trace.samples.push_back(row[1]);
  }
  if (times.size() < 2) throw std::runtime_error("csv: trace '" + path + "' too short");
  trace.grid = TimeGrid{(times.back() - times.front()) / static_cast<double>(times.size() - 1),
                        times.front(), times.size()};
  trace.validate();
  if (metadata) *metadata = parsed.metadata;
  return trace;
}

void write_dba_summary_csv(const std::string& path, const std::vector<double>& c_values,
                           const std::vector<DbaShift>& shifts, const Metadata& metadata) {
  if (c_values.size() != shifts.size())
    throw std::invalid_argument("write_dba_summary_csv: length mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write '" + path + "'");
  write_metadata(out, metadata);
  out << "C,dOmega_hz,dKappa_hz\n";
  for (std::size_t i = 0; i < c_values.size(); ++i)
    out << format_double(c_values[i]) << ','
        << format_double(angular_to_hz(shifts[i].delta_omega_e)) << ','
        << format_double(angular_to_hz(shifts[i].delta_kappa_e)) << "\n";
}

void write_time_series_csv(const std::string& path, const fit::SpectralTimeSeries& series,
                           const Metadata& metadata) {
  series.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write '" + path + "'");
  write_metadata(out, metadata);
  out << "t_s";
  for (double f : series.frequencies) out << ",R@" << format_double(angular_to_hz(f));
  out << "\n";
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    out << format_double(series.times[k]);
    for (std::size_t i = 0; i < series.frequencies.size(); ++i)
      out << ',' << format_double(series.r(static_cast<Eigen::Index>(i),
                                           static_cast<Eigen::Index>(k)));
    out << "\n";
  }
}

fit::SpectralTimeSeries read_time_series_csv(const std::string& path, Metadata* metadata) {
  const ParsedCsv parsed = read_csv(path);
  if (parsed.header.size() < 2 || parsed.header[0] != "t_s")
    throw std::runtime_error("csv: '" + path + "' is not a time-series file");
  fit::SpectralTimeSeries series;
  for (std::size_t c = 1; c < parsed.header.size(); ++c) {
    const std::string& name = parsed.header[c];
    if (name.rfind("R@", 0) != 0)
      throw std::runtime_error("csv: bad time-series column '" + name + "'");
    series.frequencies.push_back(hz_to_angular(parse_double(name.substr(2), path)));
  }
  series.r.resize(static_cast<Eigen::Index>(series.frequencies.size()),
                  static_cast<Eigen::Index>(parsed.rows.size()));
  for (std::size_t k = 0; k < parsed.rows.size(); ++k) {
    series.times.push_back(parsed.rows[k][0]);
    for (std::size_t i = 0; i + 1 < parsed.rows[k].size(); ++i)
      series.r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          parsed.rows[k][i + 1];
  }
  series.validate();
  if (metadata) *metadata = parsed.metadata;
  return series;
}

}  // namespace ceo::io
