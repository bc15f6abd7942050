#ifndef SECHGATE_IO_HPP
#define SECHGATE_IO_HPP

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sechgate/common.hpp"
#include "sechgate/device_model.hpp"
#include "sechgate/protocol.hpp"

namespace sechgate {

// Plain-text key/value device config. Recognized keys:
//   cavity_freq_ghz, q1_freq_ghz, q2_freq_ghz, anharmonicity_mhz,
//   coupling_mhz, cavity_levels, transmon_levels
// '#' starts a comment; keys may be separated from values by '=' or spaces.
// Missing keys keep the reference-device defaults.
inline DeviceParams parse_device_config_text(const std::string& text) {
  DeviceParams p;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& ch : line)
      if (ch == '=') ch = ' ';
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    double value;
    if (!(ls >> value)) {
      throw config_error("config line " + std::to_string(lineno) +
                         ": missing value for key '" + key + "'");
    }
    if (key == "cavity_freq_ghz") p.cavity_freq_ghz = value;
    else if (key == "q1_freq_ghz") p.q1_freq_ghz = value;
    else if (key == "q2_freq_ghz") p.q2_freq_ghz = value;
    else if (key == "anharmonicity_mhz") { p.anharmonicity1_mhz = value; p.anharmonicity2_mhz = value; }
    else if (key == "coupling_mhz") { p.coupling1_mhz = value; p.coupling2_mhz = value; }
    else if (key == "cavity_levels") p.cavity_levels = static_cast<int>(value);
    else if (key == "transmon_levels") p.transmon_levels = static_cast<int>(value);
    else {
      throw config_error("config line " + std::to_string(lineno) +
                         ": unknown key '" + key + "'");
    }
  }
  p.validate();
  return p;
}

inline DeviceParams parse_device_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_device_config_text(ss.str());
}

// "A:B:N" -> N values linearly spaced from A to B inclusive (N=1 gives A;
// N=0 gives an empty grid).
inline std::vector<double> parse_grid(const std::string& s) {
  double a = 0.0, b = 0.0;
  int n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 0 ||
      (in >> std::ws, !in.eof())) {
    throw config_error("grid must have the form A:B:N, got '" + s + "'");
  }
  std::vector<double> g;
  g.reserve(n);
  for (int i = 0; i < n; ++i) {
    g.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  }
  return g;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Minimal CSV assembly with a fixed column schema.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string str() const {
    std::ostringstream out;
    for (size_t i = 0; i < header.size(); ++i) {
      out << header[i] << (i + 1 < header.size() ? "," : "");
    }
    out << "\n";
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) {
        out << row[i] << (i + 1 < row.size() ? "," : "");
      }
      out << "\n";
    }
    return out.str();
  }

  void write(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw config_error("cannot open output file: " + path);
    f << str();
  }
};

inline std::string to_string(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

inline Branch branch_from_string(const std::string& s) {
  if (s == "plus") return Branch::Plus;
  if (s == "minus") return Branch::Minus;
  throw config_error("branch must be 'plus' or 'minus', got '" + s + "'");
}

// One-line structured record of a resolved protocol.
inline std::string protocol_record(const ProtocolSpec& s) {
  std::ostringstream out;
  out << "family=" << to_string(s.family)
      << " theta_rad=" << format_double(s.theta)
      << " lambda=" << s.target_block
      << " branch=" << to_string(s.branch)
      << " sigma_mhz=" << format_double(rad_to_mhz(s.sigma))
      << " pulse_freq_ghz=" << format_double(rad_to_ghz(s.drive_freq))
      << " area_index=" << s.area_index;
  return out.str();
}

}  // namespace sechgate

#endif  // SECHGATE_IO_HPP
