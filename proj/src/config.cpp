#include "mvlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mvlab/error.hpp"

namespace mvlab {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& key, const std::string& what) {
  throw Error(ErrorKind::Parse, "key '" + key + "': " + what);
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void require_object(const json& node, const std::string& path) {
  if (!node.is_object()) parse_fail(path, "expected an object");
}

void reject_unknown(const json& node, const std::string& prefix,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : node.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorKind::Parse, "unknown key '" + join(prefix, key) + "'");
    }
  }
}

double number(const json& node, const std::string& path) {
  if (!node.is_number()) parse_fail(path, "expected a number");
  return node.get<double>();
}

std::size_t count(const json& node, const std::string& path) {
  if (!node.is_number_integer()) parse_fail(path, "expected an integer");
  const auto v = node.get<long long>();
  if (v < 0) parse_fail(path, "expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

std::string text(const json& node, const std::string& path) {
  if (!node.is_string()) parse_fail(path, "expected a string");
  return node.get<std::string>();
}

template <class T, class F>
void read_opt(const json& obj, const char* key, const std::string& prefix, T& out, F reader) {
  if (auto it = obj.find(key); it != obj.end()) out = reader(*it, join(prefix, key));
}

GaussianComponent component(const json& node, const std::string& path) {
  GaussianComponent c;
  if (node.is_array()) {
    if (node.size() != 3) parse_fail(path, "expected [weight, mean, std]");
    c.weight = number(node[0], path + "[0]");
    c.mean = number(node[1], path + "[1]");
    c.std = number(node[2], path + "[2]");
    return c;
  }
  require_object(node, path);
  reject_unknown(node, path, {"weight", "mean", "std"});
  read_opt(node, "weight", path, c.weight, number);
  read_opt(node, "mean", path, c.mean, number);
  if (!node.contains("std")) throw ValidationError(path + ".std", "required");
  c.std = number(node["std"], path + ".std");
  return c;
}

InteractionKernel kernel_from(const json& node, double length) {
  require_object(node, "kernel");
  if (!node.contains("type")) throw ValidationError("kernel.type", "required");
  const std::string type = text(node["type"], "kernel.type");
  if (type == "morse") {
    reject_unknown(node, "kernel", {"type", "C_a", "C_r", "l_a", "l_r"});
    MorseKernel k = reference_morse(length);
    read_opt(node, "C_a", "kernel", k.attraction_strength, number);
    read_opt(node, "C_r", "kernel", k.repulsion_strength, number);
    read_opt(node, "l_a", "kernel", k.attraction_length, number);
    read_opt(node, "l_r", "kernel", k.repulsion_length, number);
    return k;
  }
  if (type == "hegselmann_krause") {
    reject_unknown(node, "kernel", {"type", "R_0"});
    HegselmannKrauseKernel k;
    read_opt(node, "R_0", "kernel", k.radius, number);
    return k;
  }
  parse_fail("kernel.type", "expected \"morse\" or \"hegselmann_krause\", got \"" + type + "\"");
}

// Flat `a.b.c = value` lines folded into a nested JSON object.
json flat_to_json(std::string_view doc) {
  json root = json::object();
  std::istringstream in{std::string(doc)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string raw = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": empty key");
    }
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    json* node = &root;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot - start);
      if (part.empty()) parse_fail(key, "malformed key");
      if (dot == std::string::npos) {
        if (node->contains(part)) parse_fail(key, "duplicate key");
        (*node)[part] = std::move(value);
        break;
      }
      json& child = (*node)[part];
      if (child.is_null()) child = json::object();
      if (!child.is_object()) parse_fail(key, "conflicts with a scalar value");
      node = &child;
      start = dot + 1;
    }
  }
  return root;
}

}  // namespace

SimulationConfig config_from_json(const json& doc) {
  require_object(doc, "<document>");
  reject_unknown(doc, "", {"name", "domain", "kernel", "sigma", "t_final", "solver", "initial",
                           "classifier", "output", "seed", "particles"});
  SimulationConfig cfg;
  read_opt(doc, "name", "", cfg.name, text);

  if (auto it = doc.find("domain"); it != doc.end()) {
    require_object(*it, "domain");
    reject_unknown(*it, "domain", {"L", "n_cells"});
    read_opt(*it, "L", "domain", cfg.domain.length, number);
    read_opt(*it, "n_cells", "domain", cfg.domain.n_cells, count);
  }

  if (auto it = doc.find("kernel"); it != doc.end()) {
    cfg.kernel = kernel_from(*it, cfg.domain.length);
  } else {
    cfg.kernel = reference_morse(cfg.domain.length);
  }

  if (!doc.contains("sigma")) throw ValidationError("sigma", "required");
  cfg.sigma = number(doc["sigma"], "sigma");

  bool have_t_final = false;
  if (auto it = doc.find("t_final"); it != doc.end()) {
    cfg.t_final = number(*it, "t_final");
    have_t_final = true;
  }
  if (auto it = doc.find("solver"); it != doc.end()) {
    const json& s = *it;
    require_object(s, "solver");
    reject_unknown(s, "solver", {"dt", "scheme", "t_final", "record_stride", "stationarity_tol",
                                 "density_floor", "cfl_safety"});
    read_opt(s, "dt", "solver", cfg.solver.dt, number);
    read_opt(s, "stationarity_tol", "solver", cfg.solver.stationarity_tol, number);
    read_opt(s, "density_floor", "solver", cfg.solver.density_floor, number);
    read_opt(s, "cfl_safety", "solver", cfg.solver.cfl_safety, number);
    read_opt(s, "record_stride", "solver", cfg.record_stride, count);
    if (auto t = s.find("t_final"); t != s.end()) {
      if (have_t_final) parse_fail("solver.t_final", "t_final given twice");
      cfg.t_final = number(*t, "solver.t_final");
      have_t_final = true;
    }
    if (auto sc = s.find("scheme"); sc != s.end()) {
      const auto name = text(*sc, "solver.scheme");
      const auto parsed = parse_scheme(name);
      if (!parsed) parse_fail("solver.scheme", "unknown scheme \"" + name + "\"");
      cfg.solver.scheme = *parsed;
    }
  }
  if (!have_t_final) throw ValidationError("t_final", "required");

  if (!doc.contains("initial")) throw ValidationError("initial", "required");
  {
    const json* list = &doc["initial"];
    if (list->is_object()) {
      reject_unknown(*list, "initial", {"components"});
      if (!list->contains("components")) throw ValidationError("initial.components", "required");
      list = &(*list)["components"];
    }
    if (!list->is_array()) parse_fail("initial", "expected a list of components");
    for (std::size_t k = 0; k < list->size(); ++k) {
      cfg.initial.push_back(component((*list)[k], "initial[" + std::to_string(k) + "]"));
    }
  }

  if (auto it = doc.find("classifier"); it != doc.end()) {
    require_object(*it, "classifier");
    reject_unknown(*it, "classifier", {"rate_deadband", "min_duration", "flatness_tol"});
    if (auto d = it->find("rate_deadband"); d != it->end() && !d->is_null()) {
      cfg.classifier.rate_deadband = number(*d, "classifier.rate_deadband");
    }
    read_opt(*it, "min_duration", "classifier", cfg.classifier.min_duration, number);
    read_opt(*it, "flatness_tol", "classifier", cfg.flatness_tol, number);
  }

  if (auto it = doc.find("output"); it != doc.end()) {
    require_object(*it, "output");
    reject_unknown(*it, "output", {"directory", "snapshot_times"});
    read_opt(*it, "directory", "output", cfg.output.directory, text);
    if (auto st = it->find("snapshot_times"); st != it->end()) {
      if (!st->is_array()) parse_fail("output.snapshot_times", "expected a list of times");
      for (std::size_t k = 0; k < st->size(); ++k) {
        cfg.output.snapshot_times.push_back(
            number((*st)[k], "output.snapshot_times[" + std::to_string(k) + "]"));
      }
    }
  }

  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0)) {
      parse_fail("seed", "expected a nonnegative integer");
    }
    cfg.seed = it->get<std::uint64_t>();
  }
  if (auto it = doc.find("particles"); it != doc.end()) {
    require_object(*it, "particles");
    reject_unknown(*it, "particles", {"count", "record_stride"});
    read_opt(*it, "count", "particles", cfg.particles.count, count);
    read_opt(*it, "record_stride", "particles", cfg.particles.record_stride, count);
  }

  validate(cfg);
  return cfg;
}

SimulationConfig parse_config(std::string_view doc) {
  const auto first = doc.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && doc[first] == '{') {
    json parsed;
    try {
      parsed = json::parse(doc);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::Parse, std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(parsed);
  }
  return config_from_json(flat_to_json(doc));
}

json config_to_json(const SimulationConfig& cfg) {
  json doc;
  doc["name"] = cfg.name;
  doc["domain"] = {{"L", cfg.domain.length}, {"n_cells", cfg.domain.n_cells}};
  if (const auto* m = std::get_if<MorseKernel>(&cfg.kernel)) {
    doc["kernel"] = {{"type", "morse"},
                     {"C_a", m->attraction_strength},
                     {"C_r", m->repulsion_strength},
                     {"l_a", m->attraction_length},
                     {"l_r", m->repulsion_length}};
  } else {
    doc["kernel"] = {{"type", "hegselmann_krause"},
                     {"R_0", std::get<HegselmannKrauseKernel>(cfg.kernel).radius}};
  }
  doc["sigma"] = cfg.sigma;
  doc["solver"] = {{"dt", cfg.solver.dt},
                   {"scheme", std::string(to_string(cfg.solver.scheme))},
                   {"t_final", cfg.t_final},
                   {"record_stride", cfg.record_stride},
                   {"stationarity_tol", cfg.solver.stationarity_tol},
                   {"density_floor", cfg.solver.density_floor},
                   {"cfl_safety", cfg.solver.cfl_safety}};
  json comps = json::array();
  for (const auto& c : cfg.initial) {
    comps.push_back({{"weight", c.weight}, {"mean", c.mean}, {"std", c.std}});
  }
  doc["initial"] = comps;
  doc["classifier"] = {{"rate_deadband", cfg.classifier.rate_deadband
                                             ? json(*cfg.classifier.rate_deadband)
                                             : json(nullptr)},
                       {"min_duration", cfg.classifier.min_duration},
                       {"flatness_tol", cfg.flatness_tol}};
  doc["output"] = {{"directory", cfg.output.directory},
                   {"snapshot_times", cfg.output.snapshot_times}};
  doc["seed"] = cfg.seed;
  doc["particles"] = {{"count", cfg.particles.count},
                      {"record_stride", cfg.particles.record_stride}};
  return doc;
}

void validate(const SimulationConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> issues;
  auto check = [&](bool ok, const char* path, const char* what) {
    if (!ok) issues.emplace_back(path, what);
  };
  const double length = cfg.domain.length;
  check(length > 0.0 && std::isfinite(length), "domain.L", "must be positive");
  check(cfg.domain.n_cells >= 2, "domain.n_cells", "must be at least 2");
  check(cfg.sigma > 0.0 && std::isfinite(cfg.sigma), "sigma", "must be positive");
  check(cfg.t_final > 0.0, "t_final", "must be positive");
  check(cfg.solver.dt > 0.0, "solver.dt", "must be positive");
  check(cfg.solver.cfl_safety > 0.0 && cfg.solver.cfl_safety <= 1.0, "solver.cfl_safety",
        "must lie in (0, 1]");
  check(cfg.solver.density_floor > 0.0, "solver.density_floor", "must be positive");
  check(cfg.solver.stationarity_tol > 0.0, "solver.stationarity_tol", "must be positive");
  check(cfg.record_stride >= 1, "solver.record_stride", "must be at least 1");

  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, MorseKernel>) {
          check(k.attraction_strength > 0.0, "kernel.C_a", "must be positive");
          check(k.repulsion_strength > 0.0, "kernel.C_r", "must be positive");
          check(k.attraction_length > 0.0, "kernel.l_a", "must be positive");
          check(k.repulsion_length > 0.0, "kernel.l_r", "must be positive");
        } else {
          check(k.radius > 0.0, "kernel.R_0", "must be positive");
          check(k.radius <= 0.5 * length, "kernel.R_0", "must not exceed L/2");
        }
      },
      cfg.kernel);

  check(!cfg.initial.empty(), "initial", "needs at least one component");
  double total = 0.0;
  for (const auto& c : cfg.initial) {
    check(c.weight > 0.0, "initial.weight", "must be positive");
    check(c.std > 0.0, "initial.std", "must be positive");
    check(c.mean >= -0.5 * length && c.mean < 0.5 * length, "initial.mean",
          "must lie in [-L/2, L/2)");
    total += c.weight;
  }
  check(cfg.initial.empty() || std::abs(total - 1.0) <= 1e-10, "initial",
        "weights must sum to 1");

  check(!cfg.classifier.rate_deadband || *cfg.classifier.rate_deadband >= 0.0,
        "classifier.rate_deadband", "must be nonnegative");
  check(cfg.classifier.min_duration >= 0.0, "classifier.min_duration", "must be nonnegative");
  check(cfg.flatness_tol > 0.0, "classifier.flatness_tol", "must be positive");
  for (double t : cfg.output.snapshot_times) {
    check(t >= 0.0 && t <= cfg.t_final, "output.snapshot_times", "must lie in [0, t_final]");
  }
  check(cfg.particles.count >= 1, "particles.count", "must be at least 1");
  check(cfg.particles.record_stride >= 1, "particles.record_stride", "must be at least 1");

  if (issues.empty()) return;
  std::string message = issues.front().second;
  for (std::size_t k = 1; k < issues.size(); ++k) {
    message += "; " + issues[k].first + ": " + issues[k].second;
  }
  throw ValidationError(issues.front().first, message);
}

}  // namespace mvlab
