// Copyright 2026 The modpulse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "modpulse/spec_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <sstream>

#include "modpulse/error.hpp"
#include "modpulse/trajectory.hpp"

namespace modpulse {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s, int line) {
  double v = 0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw ParseError("not a number: '" + s + "'", line);
  return v;
}

int to_int(const std::string& s, int line) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw ParseError("not an integer: '" + s + "'", line);
  return v;
}

std::string num(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

struct Entry {
  std::string value;
  int line = 0;
};
using Section = std::map<std::string, Entry>;

struct RawDocument {
  Section top;
  std::vector<Section> segments;
  std::map<std::string, Section> named;
};

RawDocument read_raw(std::istream& in) {
  RawDocument raw;
  Section* cur = &raw.top;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", n);
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name == "segment") {
        raw.segments.emplace_back();
        cur = &raw.segments.back();
      } else {
        cur = &raw.named[name];
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", n);
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("missing key", n);
    if (cur->count(key)) throw ParseError("duplicate key '" + key + "'", n);
    (*cur)[key] = {trim(line.substr(eq + 1)), n};
  }
  return raw;
}

const Entry& require(const Section& s, const std::string& key, int fallback_line) {
  const auto it = s.find(key);
  if (it == s.end()) throw ParseError("missing key '" + key + "'", fallback_line);
  return it->second;
}

int first_line(const Section& s) {
  int l = 1 << 30;
  for (const auto& [k, e] : s) l = std::min(l, e.line);
  return s.empty() ? 1 : l;
}

void reject_unknown(const Section& s, std::initializer_list<const char*> allowed) {
  for (const auto& [k, e] : s)
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) == allowed.end())
      throw ParseError("unknown key '" + k + "'", e.line);
}

FmSpec read_fm(const Section& s, bool allow_switching, int line) {
  FmSpec fm;
  fm.amplitude = to_double(require(s, "amplitude", line).value, require(s, "amplitude", line).line);
  if (const auto it = s.find("coefficients"); it != s.end()) {
    for (const auto& item : split(it->second.value, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ParseError("coefficient must be index:value", it->second.line);
      fm.coefficients.push_back({to_int(trim(item.substr(0, colon)), it->second.line),
                                 to_double(trim(item.substr(colon + 1)), it->second.line)});
    }
  }
  if (const auto it = s.find("switching_time"); it != s.end()) {
    if (!allow_switching) throw ParseError("switching_time needs family amfm", it->second.line);
    fm.switching_time = to_double(it->second.value, it->second.line);
  }
  return fm;
}

void write_fm(std::ostream& o, const FmSpec& fm) {
  o << "amplitude = " << num(fm.amplitude) << "\n";
  if (!fm.coefficients.empty()) {
    o << "coefficients = ";
    for (std::size_t i = 0; i < fm.coefficients.size(); ++i)
      o << (i ? ", " : "") << fm.coefficients[i].index << ":" << num(fm.coefficients[i].value);
    o << "\n";
  }
  if (fm.switching_time) o << "switching_time = " << num(*fm.switching_time) << "\n";
}

}  // namespace

NoiseModel SpecDocument::noise_model() const {
  if (noise == "general") return NoiseModel::general();
  return NoiseModel::pure_dephasing();
}

SpecDocument parse_spec(std::istream& in) {
  const RawDocument raw = read_raw(in);
  const Section& top = raw.top;
  const int line0 = first_line(top);
  SpecDocument doc;
  PulseSpec& spec = doc.spec;
  const Entry& fam = require(top, "family", line0);
  Family family;
  try {
    family = parse_family(fam.value);
  } catch (const SpecError& e) {
    throw ParseError(e.what(), fam.line);
  }
  const Entry& th = require(top, "theta", line0);
  try {
    spec.target = TargetAngle::parse(th.value);
  } catch (const SpecError& e) {
    throw ParseError(e.what(), th.line);
  }
  if (auto it = top.find("duration"); it != top.end()) spec.duration = to_double(it->second.value, it->second.line);
  if (auto it = top.find("note"); it != top.end()) spec.note = it->second.value;
  if (auto it = top.find("dataset"); it != top.end()) spec.dataset = it->second.value;
  if (auto it = top.find("printed_decimals"); it != top.end())
    spec.printed_decimals = to_int(it->second.value, it->second.line);
  if (auto it = top.find("order"); it != top.end()) {
    doc.order = to_int(it->second.value, it->second.line);
    if (doc.order < 1 || doc.order > 2) throw ParseError("order must be 1 or 2", it->second.line);
  }
  if (auto it = top.find("noise"); it != top.end()) {
    doc.noise = it->second.value;
    if (doc.noise != "dephasing" && doc.noise != "general")
      throw ParseError("noise must be dephasing or general", it->second.line);
  }
  if (auto it = top.find("bath"); it != top.end()) {
    doc.bath = it->second.value;
    if (doc.bath != "classical" && doc.bath != "quantum")
      throw ParseError("bath must be classical or quantum", it->second.line);
  }
  const auto common = {"family", "theta", "duration", "note", "dataset", "printed_decimals", "order", "noise", "bath"};
  auto allowed = [&](std::initializer_list<const char*> extra) {
    for (const auto& [k, e] : top) {
      const bool known = std::find_if(common.begin(), common.end(), [&](const char* a) { return k == a; }) !=
                             common.end() ||
                         std::find_if(extra.begin(), extra.end(), [&](const char* a) { return k == a; }) != extra.end();
      if (!known) throw ParseError("unknown key '" + k + "'", e.line);
    }
  };
  if (family != Family::FmSequence && !raw.segments.empty())
    throw ParseError("[segment] blocks need family fm-sequence", first_line(raw.segments.front()));

  switch (family) {
    case Family::AmPiecewise: {
      allowed({"amplitude", "instants", "signs"});
      PiecewiseAmSpec am;
      const Entry& amp = require(top, "amplitude", line0);
      am.amplitude = to_double(amp.value, amp.line);
      if (auto it = top.find("instants"); it != top.end())
        for (const auto& s : split(it->second.value, ',')) am.instants.push_back(to_double(s, it->second.line));
      if (auto it = top.find("signs"); it != top.end()) {
        for (char c : it->second.value) {
          if (c == '+') am.signs.push_back(1);
          else if (c == '-') am.signs.push_back(-1);
          else if (c != ' ' && c != ',' && c != '1')
            throw ParseError("signs are written as + and -", it->second.line);
        }
      } else {
        am.signs = alternating_signs(am.instants.size());
      }
      spec.shape = am;
      break;
    }
    case Family::AmContinuous: {
      allowed({"a", "b"});
      ContinuousAmSpec c;
      c.a = to_double(require(top, "a", line0).value, require(top, "a", line0).line);
      c.b = to_double(require(top, "b", line0).value, require(top, "b", line0).line);
      spec.shape = c;
      break;
    }
    case Family::Fm:
    case Family::AmFm: {
      allowed({"amplitude", "coefficients", "switching_time"});
      FmSpec fm = read_fm(top, family == Family::AmFm, line0);
      if (family == Family::AmFm && !fm.switching_time)
        throw ParseError("family amfm needs switching_time", line0);
      spec.shape = fm;
      break;
    }
    case Family::FmSequence: {
      allowed({});
      if (raw.segments.empty()) throw ParseError("fm-sequence needs [segment] blocks", line0);
      FmSequenceSpec seq;
      for (const Section& s : raw.segments) {
        reject_unknown(s, {"amplitude", "coefficients", "switching_time"});
        seq.segments.push_back(read_fm(s, true, first_line(s)));
      }
      spec.shape = seq;
      break;
    }
  }
  try {
    validate(spec);
  } catch (const SpecError& e) {
    throw ParseError(e.what(), line0);
  }
  return doc;
}

SpecDocument parse_spec_string(const std::string& text) {
  std::istringstream in(text);
  return parse_spec(in);
}

SpecDocument load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return parse_spec(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

std::string serialize_spec(const SpecDocument& doc) {
  const PulseSpec& s = doc.spec;
  std::ostringstream o;
  if (!s.note.empty()) o << "note = " << s.note << "\n";
  if (!s.dataset.empty()) o << "dataset = " << s.dataset << "\n";
  o << "family = " << family_name(s.family()) << "\n";
  o << "theta = " << (s.target.token.empty() ? num(s.target.radians) : s.target.token) << "\n";
  if (s.duration != 1) o << "duration = " << num(s.duration) << "\n";
  o << "order = " << doc.order << "\n";
  o << "noise = " << doc.noise << "\n";
  if (doc.bath != "classical") o << "bath = " << doc.bath << "\n";
  if (s.printed_decimals) o << "printed_decimals = " << s.printed_decimals << "\n";
  if (const auto* am = std::get_if<PiecewiseAmSpec>(&s.shape)) {
    o << "amplitude = " << num(am->amplitude) << "\n";
    if (!am->instants.empty()) {
      o << "instants = ";
      for (std::size_t i = 0; i < am->instants.size(); ++i) o << (i ? ", " : "") << num(am->instants[i]);
      o << "\n";
    }
    o << "signs =";
    for (int g : am->signs) o << (g > 0 ? " +" : " -");
    o << "\n";
  } else if (const auto* c = std::get_if<ContinuousAmSpec>(&s.shape)) {
    o << "a = " << num(c->a) << "\nb = " << num(c->b) << "\n";
  } else if (const auto* fm = std::get_if<FmSpec>(&s.shape)) {
    write_fm(o, *fm);
  } else if (const auto* seq = std::get_if<FmSequenceSpec>(&s.shape)) {
    for (const FmSpec& seg : seq->segments) {
      o << "\n[segment]\n";
      write_fm(o, seg);
    }
  }
  return o.str();
}

void save_spec(const SpecDocument& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_spec(doc);
}

NumericsConfig parse_config(std::istream& in) {
  const RawDocument raw = read_raw(in);
  NumericsConfig cfg;
  if (!raw.top.empty()) throw ParseError("settings belong in a [numerics] section", first_line(raw.top));
  const auto it = raw.named.find("numerics");
  for (const auto& [name, sec] : raw.named)
    if (name != "numerics") throw ParseError("unknown section [" + name + "]", first_line(sec));
  if (it == raw.named.end()) return cfg;
  for (const auto& [k, e] : it->second) {
    const auto d = [&] { return to_double(e.value, e.line); };
    const auto i = [&] { return to_int(e.value, e.line); };
    if (k == "quad_abs_tol") cfg.eval.quad.abs_tol = d();
    else if (k == "quad_rel_tol") cfg.eval.quad.rel_tol = d();
    else if (k == "max_subdivisions") cfg.eval.quad.max_subdivisions = i();
    else if (k == "max_refinement") cfg.eval.max_refinement = i();
    else if (k == "panel_phase") cfg.eval.grid.panel_phase = d();
    else if (k == "ode_local_abs") cfg.eval.grid.ode.local_abs = d();
    else if (k == "acceptance") cfg.solver.acceptance = d();
    else if (k == "max_iterations") cfg.solver.max_iterations = i();
    else if (k == "max_evaluations") cfg.solver.max_evaluations = i();
    else if (k == "fd_step") cfg.solver.fd_step = d();
    else if (k == "slices") cfg.scaling.slices = i();
    else if (k == "ensemble") cfg.scaling.ensemble = static_cast<std::size_t>(i());
    else if (k == "seed") cfg.scaling.seed = static_cast<std::uint64_t>(std::stoull(e.value));
    else if (k == "workers") cfg.scaling.workers = static_cast<unsigned>(i());
    else throw ParseError("unknown numerics key '" + k + "'", e.line);
  }
  return cfg;
}

NumericsConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_config(in);
}

void write_waveform(std::ostream& out, const PulseSpec& spec, int samples) {
  if (samples < 2) throw SpecError("need at least two samples");
  const double len = spec.length(), tp = spec.duration;
  out << "t,v_x,v_y,v_z,Omega,f\n" << std::setprecision(12);
  for (int k = 0; k < samples; ++k) {
    const double t = len * k / (samples - 1);
    const ControlSample c = eval_control(spec, t);
    out << t * tp << "," << c.v[0] / tp << "," << c.v[1] / tp << "," << c.v[2] / tp << "," << c.omega << ","
        << c.envelope << "\n";
  }
}

void write_trajectory(std::ostream& out, const PulseSpec& spec, int samples) {
  if (samples < 2) throw SpecError("need at least two samples");
  GridPolicy grid;
  grid.dense = true;
  const RotationTrajectory tr = propagate(spec, grid);
  out << "t,psi,phi,theta,a_x,a_y,a_z\n" << std::setprecision(12);
  for (int k = 0; k < samples; ++k) {
    const double t = tr.length() * k / (samples - 1);
    const RotationState s = k == 0 ? RotationState{0, tr.initial_axis()} : tr.state_at(t);
    out << t * spec.duration << "," << s.psi << "," << s.phi() << "," << s.theta() << "," << s.axis[0] << ","
        << s.axis[1] << "," << s.axis[2] << "\n";
  }
}

std::filesystem::path data_directory() {
  namespace fs = std::filesystem;
  if (const char* env = std::getenv("MODPULSE_DATA_DIR"); env && *env) {
    if (!fs::is_directory(env)) throw Error(std::string("MODPULSE_DATA_DIR is not a directory: ") + env);
    return env;
  }
  for (const char* dir : {MODPULSE_INSTALLED_DATA_DIR, MODPULSE_SOURCE_DATA_DIR})
    if (fs::is_directory(fs::path(dir) / "specs")) return dir;
  throw Error("no data directory found; set MODPULSE_DATA_DIR");
}

std::vector<SpecDocument> load_datasets(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const fs::path specs = fs::is_directory(dir / "specs") ? dir / "specs" : dir;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(specs))
    if (e.path().extension() == ".pulse") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<SpecDocument> docs;
  for (const auto& f : files) {
    docs.push_back(load_spec(f));
    if (docs.back().spec.dataset.empty()) docs.back().spec.dataset = f.stem().string();
  }
  return docs;
}

SpecDocument find_dataset(const std::string& name, const std::filesystem::path& dir) {
  for (auto& d : load_datasets(dir))
    if (d.spec.dataset == name) return d;
  throw Error("no shipped parameter set named '" + name + "'");
}

}  // namespace modpulse
