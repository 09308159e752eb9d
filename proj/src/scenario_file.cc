// Copyright 2026 The mdirand Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mdirand/scenario_file.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mdirand {
namespace {

using nlohmann::json;

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}
std::string at(const std::string& base, size_t i) { return base + "[" + std::to_string(i) + "]"; }

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw SchemaError(join(path, it.key()), "unknown field");
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(path, "expected a finite number");
  return v;
}

long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<long>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  return j;
}

std::vector<double> numbers(const json& j, const std::string& path) {
  std::vector<double> out;
  const json& a = array(j, path);
  for (size_t i = 0; i < a.size(); ++i) out.push_back(number(a[i], at(path, i)));
  return out;
}

Vec3 vec3(const json& j, const std::string& path) {
  const auto v = numbers(j, path);
  if (v.size() != 3) throw SchemaError(path, "expected three components");
  return {v[0], v[1], v[2]};
}

RealMatrix real_table(const json& j, const std::string& path) {
  const json& rows = array(j, path);
  if (rows.empty()) throw SchemaError(path, "empty matrix");
  RealMatrix out;
  for (size_t r = 0; r < rows.size(); ++r) {
    const auto row = numbers(rows[r], at(path, r));
    if (r == 0) out.resize(static_cast<Index>(rows.size()), static_cast<Index>(row.size()));
    if (static_cast<Index>(row.size()) != out.cols()) throw SchemaError(at(path, r), "ragged row");
    for (size_t c = 0; c < row.size(); ++c) out(static_cast<Index>(r), static_cast<Index>(c)) = row[c];
  }
  return out;
}

ComplexMatrix complex_matrix(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object with real and imag parts");
  only_keys(j, path, {"real", "imag"});
  if (!j.contains("real")) throw SchemaError(join(path, "real"), "missing");
  const RealMatrix re = real_table(j["real"], join(path, "real"));
  RealMatrix im = RealMatrix::Zero(re.rows(), re.cols());
  if (j.contains("imag")) {
    im = real_table(j["imag"], join(path, "imag"));
    if (im.rows() != re.rows() || im.cols() != re.cols()) throw SchemaError(join(path, "imag"), "shape differs from real part");
  }
  if (re.rows() != re.cols()) throw SchemaError(path, "matrix is not square");
  ComplexMatrix out(re.rows(), re.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

std::vector<ComplexMatrix> complex_list(const json& j, const std::string& path) {
  const json& a = array(j, path);
  if (a.empty()) throw SchemaError(path, "empty list");
  std::vector<ComplexMatrix> out;
  for (size_t i = 0; i < a.size(); ++i) {
    out.push_back(complex_matrix(a[i], at(path, i)));
    if (out.back().rows() != out.front().rows()) throw SchemaError(at(path, i), "dimension differs from the first entry");
  }
  return out;
}

json to_json(const ComplexMatrix& m) {
  json re = json::array(), im = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ii = json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ii.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return {{"real", re}, {"imag", im}};
}

SourceSpec parse_source(const json& j) {
  const std::string path = "source";
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  only_keys(j, path, {"preset", "alpha", "bloch", "density_matrices"});
  const int forms = static_cast<int>(j.contains("preset")) + static_cast<int>(j.contains("bloch")) +
                    static_cast<int>(j.contains("density_matrices"));
  if (forms != 1) throw SchemaError(path, "give exactly one of preset, bloch, density_matrices");
  SourceSpec s;
  if (j.contains("preset")) {
    s.kind = SourceSpec::Kind::kPreset;
    s.preset = text(j["preset"], join(path, "preset"));
    if (s.preset != "tomographic" && s.preset != "plus-zero" && s.preset != "angle") {
      throw SchemaError(join(path, "preset"), "unknown state preset '" + s.preset + "'");
    }
    if (s.preset == "angle") {
      if (!j.contains("alpha")) throw SchemaError(join(path, "alpha"), "required by the angle preset");
      s.alpha = number(j["alpha"], join(path, "alpha"));
    } else if (j.contains("alpha")) {
      throw SchemaError(join(path, "alpha"), "only used by the angle preset");
    }
    return s;
  }
  if (j.contains("alpha")) throw SchemaError(join(path, "alpha"), "only used by the angle preset");
  if (j.contains("bloch")) {
    s.kind = SourceSpec::Kind::kBloch;
    const json& a = array(j["bloch"], join(path, "bloch"));
    if (a.empty()) throw SchemaError(join(path, "bloch"), "empty list");
    for (size_t i = 0; i < a.size(); ++i) s.bloch.push_back(vec3(a[i], at(join(path, "bloch"), i)));
    return s;
  }
  s.kind = SourceSpec::Kind::kDensity;
  s.density = complex_list(j["density_matrices"], join(path, "density_matrices"));
  return s;
}

DeviceSpec parse_device(const json& j) {
  const std::string path = "honest_device";
  DeviceSpec d;
  if (j.is_string()) {
    d.preset = j.get<std::string>();
    if (d.preset != "sigma_z" && d.preset != "sigma_x" && d.preset != "extremal3" && d.preset != "extremal4") {
      throw SchemaError(path, "unknown device preset '" + d.preset + "'");
    }
    return d;
  }
  if (!j.is_object()) throw SchemaError(path, "expected a preset name or an object");
  only_keys(j, path, {"bloch", "elements"});
  if (j.contains("bloch") == j.contains("elements")) throw SchemaError(path, "give exactly one of bloch, elements");
  if (j.contains("bloch")) {
    const std::string bp = join(path, "bloch");
    const json& b = j["bloch"];
    if (!b.is_object()) throw SchemaError(bp, "expected an object with weights and directions");
    only_keys(b, bp, {"weights", "directions"});
    if (!b.contains("weights") || !b.contains("directions")) throw SchemaError(bp, "needs weights and directions");
    d.kind = DeviceSpec::Kind::kBloch;
    d.weights = numbers(b["weights"], join(bp, "weights"));
    const json& dirs = array(b["directions"], join(bp, "directions"));
    for (size_t i = 0; i < dirs.size(); ++i) d.directions.push_back(vec3(dirs[i], at(join(bp, "directions"), i)));
    if (d.weights.size() != d.directions.size() || d.weights.empty()) {
      throw SchemaError(bp, "weights and directions must be non-empty and of equal length");
    }
    return d;
  }
  d.kind = DeviceSpec::Kind::kElements;
  d.elements = complex_list(j["elements"], join(path, "elements"));
  return d;
}

BlochPovmSpec bloch_spec(const DeviceSpec& d) {
  if (d.kind == DeviceSpec::Kind::kPreset) {
    if (d.preset == "sigma_z") return sigma_z_spec();
    if (d.preset == "sigma_x") return sigma_x_spec();
    if (d.preset == "extremal3") return extremal3();
    return extremal4();
  }
  BlochPovmSpec s;
  s.weights = d.weights;
  for (const auto& v : d.directions) s.directions.emplace_back(v[0], v[1], v[2]);
  return s;
}

template <typename F>
auto physical(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception& e) {
    throw SchemaError(path, e.what());
  }
}

std::pair<int, int> line_column(std::string_view text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(json_text, e.byte > 0 ? e.byte - 1 : 0);
    throw SchemaError("line " + std::to_string(line) + ", column " + std::to_string(col), "invalid JSON");
  }
  if (!j.is_object()) throw SchemaError("", "top level must be an object");
  only_keys(j, "", {"schema_version", "name", "description", "source", "tensor_power", "copies", "mode",
                    "input_probs", "q", "generation_index", "honest_device", "noise_eta", "statistics"});
  ScenarioSpec s;
  if (!j.contains("schema_version")) throw SchemaError("schema_version", "missing");
  s.schema_version = static_cast<int>(integer(j["schema_version"], "schema_version"));
  if (s.schema_version != kSchemaVersion) {
    throw SchemaError("schema_version", "unsupported version " + std::to_string(s.schema_version));
  }
  if (j.contains("name")) s.name = text(j["name"], "name");
  if (j.contains("description")) s.description = text(j["description"], "description");
  if (!j.contains("source")) throw SchemaError("source", "missing");
  s.source = parse_source(j["source"]);
  if (j.contains("tensor_power")) {
    const long m = integer(j["tensor_power"], "tensor_power");
    if (m < 1 || m > 5) throw SchemaError("tensor_power", "must be between 1 and 5");
    s.tensor_power = static_cast<int>(m);
  }
  if (j.contains("copies")) {
    const long c = integer(j["copies"], "copies");
    if (c != 1 && c != 2) throw SchemaError("copies", "must be 1 or 2");
    s.copies = static_cast<int>(c);
  }
  if (j.contains("mode")) {
    const std::string m = text(j["mode"], "mode");
    if (m == "asymptotic") {
      s.mode = RateMode::kAsymptoticAsymmetric;
    } else if (m != "finite-q") {
      throw SchemaError("mode", "expected 'finite-q' or 'asymptotic'");
    }
  }
  if (j.contains("input_probs") && j.contains("q")) throw SchemaError("q", "give either input_probs or q");
  if (s.mode == RateMode::kAsymptoticAsymmetric && (j.contains("input_probs") || j.contains("q"))) {
    throw SchemaError(j.contains("q") ? "q" : "input_probs", "not used in asymptotic mode");
  }
  if (j.contains("input_probs")) s.input_probs = numbers(j["input_probs"], "input_probs");
  if (j.contains("q")) {
    s.q = number(j["q"], "q");
    if (*s.q < 0.0 || *s.q > 1.0) throw SchemaError("q", "must lie in [0, 1]");
  }
  if (j.contains("generation_index")) {
    const long g = integer(j["generation_index"], "generation_index");
    if (g < 0) throw SchemaError("generation_index", "must be non-negative");
    s.generation_index = g;
  }
  const bool has_stats = j.contains("statistics");
  const bool has_device = j.contains("honest_device");
  const bool has_eta = j.contains("noise_eta");
  if (has_stats && (has_device || has_eta)) {
    throw SchemaError("statistics", "give either a statistics table or honest_device with noise_eta, not both");
  }
  if (!has_stats && !(has_device && has_eta)) {
    throw SchemaError(has_device ? "noise_eta" : "honest_device", "missing (or give a statistics table)");
  }
  if (has_device) {
    s.device = parse_device(j["honest_device"]);
    const json& e = j["noise_eta"];
    s.noise_eta = e.is_array() ? numbers(e, "noise_eta") : std::vector<double>{number(e, "noise_eta")};
    if (s.noise_eta.empty()) throw SchemaError("noise_eta", "empty grid");
    for (size_t i = 0; i < s.noise_eta.size(); ++i) {
      if (s.noise_eta[i] < 0.0 || s.noise_eta[i] > 1.0) {
        throw SchemaError(e.is_array() ? at("noise_eta", i) : "noise_eta", "must lie in [0, 1]");
      }
    }
  } else {
    const json& t = array(j["statistics"], "statistics");
    if (t.empty()) throw SchemaError("statistics", "empty table");
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < t.size(); ++i) {
      rows.push_back(numbers(t[i], at("statistics", i)));
      if (rows.back().size() != rows.front().size() || rows.back().empty()) {
        throw SchemaError(at("statistics", i), "row length differs from the first row");
      }
    }
    s.statistics = std::move(rows);
  }
  return s;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("", "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const ScenarioSpec& s) {
  json j;
  j["schema_version"] = s.schema_version;
  if (!s.name.empty()) j["name"] = s.name;
  if (!s.description.empty()) j["description"] = s.description;
  json src;
  switch (s.source.kind) {
    case SourceSpec::Kind::kPreset:
      src["preset"] = s.source.preset;
      if (s.source.preset == "angle") src["alpha"] = s.source.alpha;
      break;
    case SourceSpec::Kind::kBloch:
      src["bloch"] = s.source.bloch;
      break;
    case SourceSpec::Kind::kDensity:
      src["density_matrices"] = json::array();
      for (const auto& m : s.source.density) src["density_matrices"].push_back(to_json(m));
      break;
  }
  j["source"] = src;
  if (s.tensor_power != 1) j["tensor_power"] = s.tensor_power;
  if (s.copies != 1) j["copies"] = s.copies;
  j["mode"] = s.mode == RateMode::kAsymptoticAsymmetric ? "asymptotic" : "finite-q";
  if (s.input_probs) j["input_probs"] = *s.input_probs;
  if (s.q) j["q"] = *s.q;
  if (s.generation_index != 0) j["generation_index"] = s.generation_index;
  if (s.device) {
    const DeviceSpec& d = *s.device;
    if (d.kind == DeviceSpec::Kind::kPreset) {
      j["honest_device"] = d.preset;
    } else if (d.kind == DeviceSpec::Kind::kBloch) {
      j["honest_device"] = {{"bloch", {{"weights", d.weights}, {"directions", d.directions}}}};
    } else {
      json el = json::array();
      for (const auto& m : d.elements) el.push_back(to_json(m));
      j["honest_device"] = {{"elements", el}};
    }
    if (s.noise_eta.size() == 1) {
      j["noise_eta"] = s.noise_eta.front();
    } else {
      j["noise_eta"] = s.noise_eta;
    }
  }
  if (s.statistics) j["statistics"] = *s.statistics;
  return j.dump(2) + "\n";
}

std::filesystem::path preset_directory() {
  if (const char* env = std::getenv("MDIRAND_PRESET_DIR"); env != nullptr && *env != '\0') return env;
  return MDIRAND_PRESET_DIR;
}

std::filesystem::path resolve_scenario_path(const std::string& name) {
  const std::filesystem::path direct(name);
  if (std::filesystem::is_regular_file(direct)) return direct;
  const std::filesystem::path preset = preset_directory() / (name + ".json");
  if (std::filesystem::is_regular_file(preset)) return preset;
  throw SchemaError("", "no scenario file or preset named '" + name + "'");
}

StateEnsemble build_states(const ScenarioSpec& spec) {
  std::vector<DensityMatrix> states;
  const SourceSpec& src = spec.source;
  switch (src.kind) {
    case SourceSpec::Kind::kPreset:
      if (src.preset == "angle") {
        physical("source.alpha", [&] {
          const auto [phi, psi] = angle_states(src.alpha);
          states = {phi, psi};
          return 0;
        });
      } else {
        states = tomographic_set();
        if (src.preset == "plus-zero") states.resize(2);
      }
      break;
    case SourceSpec::Kind::kBloch:
      for (size_t i = 0; i < src.bloch.size(); ++i) {
        const auto& v = src.bloch[i];
        states.push_back(physical(at("source.bloch", i), [&] { return bloch_to_density({v[0], v[1], v[2]}); }));
      }
      break;
    case SourceSpec::Kind::kDensity:
      for (size_t i = 0; i < src.density.size(); ++i) {
        states.push_back(physical(at("source.density_matrices", i),
                                  [&] { return DensityMatrix(HermitianOperator(src.density[i])); }));
      }
      break;
  }
  StateEnsemble base(std::move(states));
  StateEnsemble ens = spec.tensor_power > 1
                          ? physical("tensor_power", [&] { return tensor_ensemble(base, spec.tensor_power); })
                          : base;
  const Index n = ens.size();
  if (spec.input_probs) {
    if (static_cast<Index>(spec.input_probs->size()) != n) {
      throw SchemaError("input_probs", "expected " + std::to_string(n) + " probabilities");
    }
    RealVector p = Eigen::Map<const RealVector>(spec.input_probs->data(), n);
    return physical("input_probs", [&] { return ens.with_input_probs(p); });
  }
  if (spec.q) {
    if (n < 2 && *spec.q != 1.0) throw SchemaError("q", "needs at least two states");
    RealVector p = RealVector::Constant(n, n > 1 ? (1.0 - *spec.q) / static_cast<double>(n - 1) : 0.0);
    p(0) = *spec.q;
    return physical("q", [&] { return ens.with_input_probs(p); });
  }
  return ens;
}

Povm build_device(const ScenarioSpec& spec) {
  if (!spec.device) throw SchemaError("honest_device", "missing");
  const DeviceSpec& d = *spec.device;
  Povm base;
  if (d.kind == DeviceSpec::Kind::kElements) {
    base = physical("honest_device.elements", [&] {
      std::vector<HermitianOperator> el;
      for (const auto& m : d.elements) el.emplace_back(m);
      return Povm(std::move(el));
    });
  } else {
    base = physical("honest_device", [&] { return povm_from_bloch(bloch_spec(d)); });
  }
  if (spec.tensor_power > 1) return physical("tensor_power", [&] { return tensor_povm(base, spec.tensor_power); });
  return base;
}

Scenario build_scenario(const ScenarioSpec& spec, double eta) {
  const StateEnsemble states = build_states(spec);
  if (spec.generation_index >= states.size()) throw SchemaError("generation_index", "beyond the number of states");
  Scenario s;
  if (spec.statistics) {
    const auto& t = *spec.statistics;
    if (static_cast<Index>(t.size()) != states.size()) {
      throw SchemaError("statistics", "expected one row per state (" + std::to_string(states.size()) + ")");
    }
    RealMatrix cond(states.size(), static_cast<Index>(t.front().size()));
    const double tol = default_tolerances().stats_row;
    for (size_t a = 0; a < t.size(); ++a) {
      double sum = 0.0;
      for (size_t x = 0; x < t[a].size(); ++x) {
        cond(static_cast<Index>(a), static_cast<Index>(x)) = t[a][x];
        sum += t[a][x];
      }
      if (std::abs(sum - 1.0) > tol) {
        std::ostringstream msg;
        msg << "row sums to " << sum << ", expected 1";
        throw SchemaError(at("statistics", a), msg.str());
      }
    }
    s.ensemble = states;
    s.observed = physical("statistics", [&] { return ObservedStatistics(cond, states.input_probs()); });
    s.mode = spec.mode;
    s.generation_index = spec.generation_index;
  } else {
    const Povm device = build_device(spec);
    if (device.dim() != states.dim()) {
      throw SchemaError("honest_device", "dimension " + std::to_string(device.dim()) + " does not match the states (" +
                                             std::to_string(states.dim()) + ")");
    }
    if (!(eta >= 0.0 && eta <= 1.0)) throw SchemaError("noise_eta", "must lie in [0, 1]");
    s = honest_scenario(states, device, eta, spec.mode, spec.generation_index);
  }
  if (spec.copies == 2) return physical("copies", [&] { return double_scenario(s); });
  return s;
}

Scenario build_scenario(const ScenarioSpec& spec) {
  return build_scenario(spec, spec.noise_eta.empty() ? 1.0 : spec.noise_eta.front());
}

std::vector<ValidationCheck> validate_scenario(const ScenarioSpec& spec) {
  std::vector<ValidationCheck> out;
  auto attempt = [&](const std::string& name, auto&& f) {
    ValidationCheck c{name, true, "ok"};
    try {
      f(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = e.what();
    }
    out.push_back(c);
    return c.ok;
  };

  std::optional<StateEnsemble> states;
  attempt("states", [&](ValidationCheck& c) {
    states = build_states(spec);
    c.detail = std::to_string(states->size()) + " valid density matrices of dimension " + std::to_string(states->dim());
  });
  if (spec.device) {
    std::optional<Povm> device;
    attempt("povm", [&](ValidationCheck& c) {
      device = build_device(spec);
      c.detail = std::to_string(device->outcomes()) + " PSD elements summing to the identity";
    });
    const bool bloch_form = spec.device->kind != DeviceSpec::Kind::kElements && spec.tensor_power == 1;
    if (device && states) {
      attempt("unbiased", [&](ValidationCheck& c) {
        const Index g = std::min(spec.generation_index, states->size() - 1);
        const double target = 1.0 / static_cast<double>(device->outcomes());
        double worst = 0.0;
        for (Index x = 0; x < device->outcomes(); ++x)
          worst = std::max(worst, std::abs(trace_product((*device)[x], (*states)[g].op()) - target));
        c.ok = worst <= 1e-10;
        std::ostringstream msg;
        msg << (c.ok ? "uniform" : "biased") << " outcomes on generation state " << g << " (max deviation "
            << worst << ")";
        c.detail = msg.str();
      });
    }
    if (device) {
      attempt("extremal", [&](ValidationCheck& c) {
        const ExtremalityReport rep = bloch_form ? extremality(bloch_spec(*spec.device)) : extremality(*device);
        c.ok = rep.ok();
        c.detail = rep.diagnosis();
      });
    }
  }
  if (states) {
    attempt("statistics", [&](ValidationCheck& c) {
      const Scenario s = build_scenario(spec);
      c.detail = std::to_string(s.inputs()) + " x " + std::to_string(s.outcomes()) + " conditional table";
    });
  }
  return out;
}

}  // namespace mdirand
