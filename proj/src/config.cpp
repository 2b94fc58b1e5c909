#include "elasto/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "elasto/errors.hpp"

namespace elasto {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double to_double(std::string_view s, int line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(line, "expected a number, got '" + std::string(s) + "'");
  return v;
}

long long to_integer(std::string_view s, int line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(line, "expected an integer, got '" + std::string(s) + "'");
  return v;
}

bool to_bool(std::string_view s, int line) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ParseError(line, "expected a boolean, got '" + std::string(s) + "'");
}

struct PendingMode {
  int line;
  std::vector<std::string_view> k;
  std::vector<std::string_view> amp;
};

}  // namespace

void RunConfig::validate() const {
  grid.validate();
  params.validate();
  if (grid.dim != params.dim) throw ValidationError("d", "grid and parameter dimensions differ");
  if (output_every < 1) throw ValidationError("outputEvery", "must be >= 1");
  if (checkpoint_every < 0) throw ValidationError("checkpointEvery", "must be >= 0");
  if (!(fixed_dt >= 0.0) || !std::isfinite(fixed_dt)) throw ValidationError("dt", "must be >= 0");
  if (out_dir.empty()) throw ValidationError("outDir", "must not be empty");
  if (initial.band < 1) throw ValidationError("band", "must be >= 1");
  if (initial.band >= grid.n / 2) throw ValidationError("band", "must be below the Nyquist index N/2");
  for (const auto& m : initial.modes)
    for (int a = 0; a < grid.dim; ++a)
      if (std::abs(m.k[a]) >= grid.n / 2) throw ValidationError("mode", "wavenumber at or above Nyquist");
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::vector<PendingMode> modes;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view val = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "missing key");
    if (val.empty()) throw ParseError(line_no, "missing value for '" + std::string(key) + "'");

    if (key == "mode") {
      const auto colon = val.find(':');
      if (colon == std::string_view::npos) throw ParseError(line_no, "mode needs 'k... : amplitude...'");
      modes.push_back({line_no, split_ws(val.substr(0, colon)), split_ws(val.substr(colon + 1))});
      continue;
    }
    if (!seen.emplace(key).second) throw ParseError(line_no, "duplicate key '" + std::string(key) + "'");

    if (key == "d") {
      cfg.grid.dim = cfg.params.dim = static_cast<int>(to_integer(val, line_no));
    } else if (key == "N") {
      cfg.grid.n = static_cast<int>(to_integer(val, line_no));
    } else if (key == "Lbox") {
      cfg.grid.length = to_double(val, line_no);
    } else if (key == "backend") {
      if (val == "spectral")
        cfg.grid.backend = Backend::spectral;
      else if (val == "fd2")
        cfg.grid.backend = Backend::fd2;
      else
        throw ParseError(line_no, "backend must be spectral or fd2");
    } else if (key == "dealias") {
      cfg.grid.dealias = to_bool(val, line_no);
    } else if (key == "gamma") {
      cfg.params.gamma = to_double(val, line_no);
    } else if (key == "cfl") {
      cfg.params.cfl = to_double(val, line_no);
    } else if (key == "epsilon") {
      cfg.params.epsilon = to_double(val, line_no);
    } else if (key == "tEnd") {
      cfg.params.t_end = to_double(val, line_no);
    } else if (key == "form") {
      if (val == "divergence")
        cfg.params.form = Form::divergence;
      else if (val == "second_order")
        cfg.params.form = Form::second_order;
      else
        throw ParseError(line_no, "form must be divergence or second_order");
    } else if (key == "initial") {
      if (val == "modes")
        cfg.initial.kind = InitialData::Kind::modes;
      else if (val == "random")
        cfg.initial.kind = InitialData::Kind::random;
      else
        throw ParseError(line_no, "initial must be modes or random");
    } else if (key == "velocity") {
      if (val == "traveling")
        cfg.initial.velocity = InitialVelocity::traveling;
      else if (val == "zero")
        cfg.initial.velocity = InitialVelocity::zero;
      else
        throw ParseError(line_no, "velocity must be traveling or zero");
    } else if (key == "seed") {
      const long long s = to_integer(val, line_no);
      if (s < 0) throw ValidationError("seed", "must be >= 0");
      cfg.initial.seed = static_cast<std::uint64_t>(s);
    } else if (key == "band") {
      cfg.initial.band = static_cast<int>(to_integer(val, line_no));
    } else if (key == "outputEvery") {
      cfg.output_every = static_cast<int>(to_integer(val, line_no));
    } else if (key == "outDir") {
      cfg.out_dir = std::string(val);
    } else if (key == "checkpointEvery") {
      cfg.checkpoint_every = static_cast<int>(to_integer(val, line_no));
    } else if (key == "dt") {
      cfg.fixed_dt = to_double(val, line_no);
    } else {
      throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
    }
  }

  const int d = cfg.grid.dim;
  for (const auto& pm : modes) {
    if (static_cast<int>(pm.k.size()) != d || static_cast<int>(pm.amp.size()) != d)
      throw ParseError(pm.line, "mode needs " + std::to_string(d) + " wavenumbers and " + std::to_string(d) +
                                    " amplitudes");
    ModeSpec m;
    for (int a = 0; a < d; ++a) {
      m.k[a] = static_cast<int>(to_integer(pm.k[a], pm.line));
      m.amplitude[a] = to_double(pm.amp[a], pm.line);
    }
    cfg.initial.modes.push_back(m);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const RunConfig& c) {
  std::ostringstream o;
  o.precision(17);
  o << "d = " << c.grid.dim << "\n"
    << "N = " << c.grid.n << "\n"
    << "Lbox = " << c.grid.length << "\n"
    << "backend = " << to_string(c.grid.backend) << "\n"
    << "dealias = " << (c.grid.dealias ? "true" : "false") << "\n"
    << "gamma = " << c.params.gamma << "\n"
    << "cfl = " << c.params.cfl << "\n"
    << "epsilon = " << c.params.epsilon << "\n"
    << "tEnd = " << c.params.t_end << "\n"
    << "form = " << to_string(c.params.form) << "\n"
    << "initial = " << (c.initial.kind == InitialData::Kind::modes ? "modes" : "random") << "\n"
    << "velocity = " << (c.initial.velocity == InitialVelocity::traveling ? "traveling" : "zero") << "\n"
    << "seed = " << c.initial.seed << "\n"
    << "band = " << c.initial.band << "\n";
  for (const auto& m : c.initial.modes) {
    o << "mode =";
    for (int a = 0; a < c.grid.dim; ++a) o << " " << m.k[a];
    o << " :";
    for (int a = 0; a < c.grid.dim; ++a) o << " " << m.amplitude[a];
    o << "\n";
  }
  o << "outputEvery = " << c.output_every << "\n"
    << "outDir = " << c.out_dir << "\n"
    << "checkpointEvery = " << c.checkpoint_every << "\n"
    << "dt = " << c.fixed_dt << "\n";
  return o.str();
}

}  // namespace elasto
