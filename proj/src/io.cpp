#include "mvlab/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "mvlab/error.hpp"

namespace mvlab {

namespace {

constexpr std::string_view kLedgerHeader = "t,F,F_ent,F_int,dissipation,peak,m2";

double parse_number(std::string_view text, std::size_t line_no) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": bad number '" +
                                      std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> parse_csv_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (quoted) throw Error(ErrorKind::Parse, "unterminated quoted field");
  fields.push_back(std::move(current));
  return fields;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + path.parent_path().string());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot rename onto " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string ledger_to_csv(const EnergyLedger& ledger) {
  std::string out(kLedgerHeader);
  out += '\n';
  for (const auto& s : ledger.samples()) {
    for (double v : {s.t, s.free_energy, s.entropic, s.interaction, s.dissipation, s.peak,
                     s.second_moment}) {
      out += format_double(v);
      out += ',';
    }
    out.back() = '\n';
  }
  return out;
}

EnergyLedger ledger_from_csv(std::string_view text) {
  EnergyLedger ledger;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kLedgerHeader) throw Error(ErrorKind::Parse, "unexpected ledger header");
      continue;
    }
    if (line.empty()) continue;
    const auto fields = parse_csv_record(line);
    if (fields.size() != 7) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected 7 columns");
    }
    double v[7];
    for (int k = 0; k < 7; ++k) v[k] = parse_number(fields[k], line_no);
    ledger.append({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
  }
  return ledger;
}

nlohmann::json segmentation_to_json(const RegimeSegmentation& seg) {
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& s : seg.segments) {
    segments.push_back(
        {{"t_start", s.t_start}, {"t_end", s.t_end}, {"label", std::string(to_string(s.label))}});
  }
  return {{"segments", segments},
          {"classifier", {{"rate_deadband", seg.rate_deadband}, {"min_duration", seg.min_duration}}},
          {"warnings", seg.warnings}};
}

RegimeSegmentation segmentation_from_json(const nlohmann::json& doc) {
  RegimeSegmentation seg;
  try {
    for (const auto& s : doc.at("segments")) {
      const auto name = s.at("label").get<std::string>();
      const auto label = parse_regime(name);
      if (!label) throw Error(ErrorKind::Parse, "unknown regime label '" + name + "'");
      seg.segments.push_back({s.at("t_start").get<double>(), s.at("t_end").get<double>(), *label});
    }
    seg.rate_deadband = doc.at("classifier").at("rate_deadband").get<double>();
    seg.min_duration = doc.at("classifier").at("min_duration").get<double>();
    seg.warnings = doc.at("warnings").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("segmentation: ") + e.what());
  }
  return seg;
}

std::string snapshots_to_csv(const std::vector<Snapshot>& snapshots) {
  std::string out = "t,x,rho\n";
  for (const auto& snap : snapshots) {
    const auto& grid = snap.field.grid();
    const std::string t = format_double(snap.t);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out += t;
      out += ',';
      out += format_double(grid.center(i));
      out += ',';
      out += format_double(snap.field[i]);
      out += '\n';
    }
  }
  return out;
}

}  // namespace mvlab
