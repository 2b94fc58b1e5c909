#include "elasto/io.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "elasto/errors.hpp"

namespace elasto {

namespace {

constexpr char kMagic[8] = {'E', 'L', 'A', 'S', 'T', 'O', 'C', 'K'};
constexpr std::uint8_t kCheckpointVersion = 1;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& s, int line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ParseError(line, "bad number '" + s + "'");
  return v;
}

class ByteWriter {
 public:
  explicit ByteWriter(std::ostream& out) : out_(out) {}
  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int b = 0; b < 4; ++b) u8(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void u64(std::uint64_t v) {
    for (int b = 0; b < 8; ++b) u8(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

 private:
  std::ostream& out_;
};

class ByteReader {
 public:
  ByteReader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}
  std::uint8_t u8() {
    const int c = in_.get();
    if (c == std::char_traits<char>::eof()) throw IoError("checkpoint '" + path_ + "' is truncated");
    return static_cast<std::uint8_t>(c);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(u8()) << (8 * b);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(u8()) << (8 * b);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }

 private:
  std::istream& in_;
  std::string path_;
};

nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : c.initial.modes) {
    nlohmann::json k = nlohmann::json::array(), a = nlohmann::json::array();
    for (int i = 0; i < c.grid.dim; ++i) {
      k.push_back(m.k[i]);
      a.push_back(m.amplitude[i]);
    }
    modes.push_back({{"k", k}, {"amplitude", a}});
  }
  return {{"d", c.grid.dim},
          {"N", c.grid.n},
          {"Lbox", c.grid.length},
          {"backend", to_string(c.grid.backend)},
          {"dealias", c.grid.dealias},
          {"gamma", c.params.gamma},
          {"cfl", c.params.cfl},
          {"epsilon", c.params.epsilon},
          {"tEnd", c.params.t_end},
          {"form", to_string(c.params.form)},
          {"initial", c.initial.kind == InitialData::Kind::modes ? "modes" : "random"},
          {"velocity", c.initial.velocity == InitialVelocity::traveling ? "traveling" : "zero"},
          {"seed", c.initial.seed},
          {"band", c.initial.band},
          {"modes", modes},
          {"outputEvery", c.output_every},
          {"outDir", c.out_dir},
          {"checkpointEvery", c.checkpoint_every},
          {"dt", c.fixed_dt}};
}

}  // namespace

void write_series_csv(std::ostream& out, const NormSeries& series) {
  const auto& cols = series_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << "\n";
  for (const auto& r : series) {
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << fmt17(column_value(r, cols[c]));
    out << "\n";
  }
}

void write_series_csv(const std::string& path, const NormSeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_series_csv(out, series);
  if (!out) throw IoError("write failed for '" + path + "'");
}

NormSeries read_series_csv(std::istream& in) {
  const auto& cols = series_columns();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty series file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split_csv(line) != cols) throw ParseError(1, "unexpected series header");
  NormSeries out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != cols.size())
      throw ParseError(line_no, "expected " + std::to_string(cols.size()) + " columns");
    std::vector<double> v(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) v[c] = parse_cell(cells[c], line_no);
    NormRecord r;
    r.t = r.energy.t = v[0];
    r.energy.T1 = v[2];
    r.energy.T2 = v[3];
    r.energy.T3 = v[4];
    r.energy.T4 = v[5];
    r.energy.T5 = v[6];
    r.v_H3 = v[8];
    r.eta_H3 = v[9];
    r.grad_eta_H3 = v[10];
    r.min_J = v[11];
    r.max_J = v[12];
    r.piola_res = v[13];
    r.r_v = v[14];
    r.r_xi = v[15];
    r.r_gradxi = v[16];
    if (!out.empty() && !(r.t > out.back().t)) throw ParseError(line_no, "times must increase strictly");
    out.push_back(r);
  }
  return out;
}

NormSeries read_series_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_series_csv(in);
}

void write_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(kMagic, sizeof kMagic);
  ByteWriter w(out);
  w.u8(kCheckpointVersion);
  w.u8(static_cast<std::uint8_t>(ck.grid.dim));
  w.u8(ck.grid.backend == Backend::spectral ? 0 : 1);
  w.u8(ck.grid.dealias ? 1 : 0);
  w.u8(ck.params.form == Form::divergence ? 0 : 1);
  w.u32(static_cast<std::uint32_t>(ck.grid.n));
  w.f64(ck.grid.length);
  w.f64(ck.params.gamma);
  w.f64(ck.params.cfl);
  w.f64(ck.params.epsilon);
  w.f64(ck.params.t_end);
  w.f64(ck.state.t);
  const std::size_t count = ck.state.eta_tilde.values().size();
  w.u64(count);
  for (double x : ck.state.eta_tilde.values()) w.f64(x);
  for (double x : ck.state.v.values()) w.f64(x);
  if (!out) throw IoError("write failed for '" + path + "'");
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  char magic[8];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + 8, kMagic))
    throw IoError("'" + path + "' is not a checkpoint");
  ByteReader r(in, path);
  if (const auto ver = r.u8(); ver != kCheckpointVersion)
    throw IoError("unsupported checkpoint version " + std::to_string(ver));
  Checkpoint ck;
  ck.grid.dim = ck.params.dim = r.u8();
  ck.grid.backend = r.u8() == 0 ? Backend::spectral : Backend::fd2;
  ck.grid.dealias = r.u8() != 0;
  ck.params.form = r.u8() == 0 ? Form::divergence : Form::second_order;
  ck.grid.n = static_cast<int>(r.u32());
  ck.grid.length = r.f64();
  ck.params.gamma = r.f64();
  ck.params.cfl = r.f64();
  ck.params.epsilon = r.f64();
  ck.params.t_end = r.f64();
  const double t = r.f64();
  try {
    ck.grid.validate();
    ck.params.validate();
  } catch (const ValidationError& e) {
    throw IoError("checkpoint '" + path + "' has an invalid header: " + e.what());
  }
  const std::uint64_t count = r.u64();
  if (count != ck.grid.points() * static_cast<std::size_t>(ck.grid.dim))
    throw IoError("checkpoint '" + path + "' field size does not match its grid");
  ck.state = zero_state(ck.grid, t);
  for (double& x : ck.state.eta_tilde.values()) x = r.f64();
  for (double& x : ck.state.v.values()) x = r.f64();
  return ck;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::json j{{"version", kVersionTag},
                   {"config", config_json(m.config)},
                   {"t_start", m.t_start},
                   {"t_stop", m.t_stop},
                   {"status", to_string(m.status)},
                   {"failure_time", m.failure_time ? nlohmann::json(*m.failure_time) : nlohmann::json(nullptr)},
                   {"message", m.message},
                   {"steps", m.steps},
                   {"wall_start", m.wall_start},
                   {"wall_end", m.wall_end}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string read_manifest_status(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in).at("status").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest '" + path + "': " + e.what());
  }
}

void write_snapshot_csv(const std::string& path, const EulerianSnapshot& snap) {
  const GridSpec& g = snap.query_grid;
  const int d = g.dim;
  static const char* axes = "xyz";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (int a = 0; a < d; ++a) out << axes[a] << ",";
  out << "rho";
  for (int a = 0; a < d; ++a) out << ",u" << a;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out << ",F" << i << j;
  for (int a = 0; a < d; ++a) out << ",y" << a;
  out << "\n";
  for (std::size_t p = 0; p < g.points(); ++p) {
    for (int a = 0; a < d; ++a) out << fmt17(g.coordinate(p, a)) << ",";
    out << fmt17(snap.rho(0, p));
    for (int a = 0; a < d; ++a) out << "," << fmt17(snap.u(a, p));
    for (int k = 0; k < d * d; ++k) out << "," << fmt17(snap.F(k, p));
    for (int a = 0; a < d; ++a) out << "," << fmt17(snap.preimages[p][a]);
    out << "\n";
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace elasto
