#include "dmac/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace dmac {

namespace {

Rational parse_value(const json& j, const std::string& path) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number()) return snap(j.get<double>());
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path, "expected a number or a \"p/q\" string");
}

double parse_double(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return to_double(parse_value(j, path));
  throw ConfigError(path, "expected a number");
}

std::uint64_t parse_count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(path, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key())) throw ConfigError(path + "." + it.key(), "unknown field");
}

std::string at(const std::string& path, std::size_t k) { return path + "[" + std::to_string(k) + "]"; }

ContinuousLawSpec parse_continuous(const json& j, const std::string& path, std::size_t n_grid) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  try {
    if (j.contains("uniform")) {
      const json& u = j["uniform"];
      if (!u.is_array() || u.size() != 2) throw ConfigError(path + ".uniform", "expected [lo, hi]");
      return ContinuousLawSpec::uniform(parse_double(u[0], path + ".uniform[0]"),
                                        parse_double(u[1], path + ".uniform[1]"), n_grid);
    }
    if (j.contains("point")) return ContinuousLawSpec::point_mass(parse_double(j["point"], path + ".point"), n_grid);
    if (j.contains("smoothed")) {
      const json& s = j["smoothed"];
      if (!s.is_object() || !s.contains("law") || !s.contains("width"))
        throw ConfigError(path + ".smoothed", "expected {law, width}");
      return ContinuousLawSpec::smoothed(parse_law(s["law"], path + ".smoothed.law"),
                                         parse_double(s["width"], path + ".smoothed.width"), n_grid);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path, "expected one of uniform, point, smoothed");
}

}  // namespace

DiscreteLaw parse_law(const json& j, const std::string& path) {
  try {
    if (j.is_array()) {
      if (j.empty()) throw ConfigError(path, "law has empty support");
      std::vector<Atom> atoms;
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_array() || j[k].size() != 2) throw ConfigError(at(path, k), "expected [value, probability]");
        atoms.push_back({parse_value(j[k][0], at(path, k) + "[0]"), parse_value(j[k][1], at(path, k) + "[1]")});
      }
      std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
      return DiscreteLaw(std::move(atoms));
    }
    if (j.is_object()) {
      if (j.contains("uniform")) {
        const json& u = j["uniform"];
        if (!u.is_array() || u.empty()) throw ConfigError(path + ".uniform", "law has empty support");
        std::vector<Rational> vals;
        for (std::size_t k = 0; k < u.size(); ++k) vals.push_back(parse_value(u[k], at(path + ".uniform", k)));
        std::sort(vals.begin(), vals.end());
        return DiscreteLaw::uniform(vals);
      }
      if (j.contains("point")) return DiscreteLaw::point(parse_value(j["point"], path + ".point"));
      if (j.contains("truncated_geometric")) {
        const json& g = j["truncated_geometric"];
        std::string gp = path + ".truncated_geometric";
        if (!g.is_object() || !g.contains("p")) throw ConfigError(gp, "expected {p, n}");
        int n = g.contains("n") ? static_cast<int>(parse_count(g["n"], gp + ".n")) : 5;
        return DiscreteLaw::truncated_geometric(parse_value(g["p"], gp + ".p"), n);
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path, "expected [[value, probability], ...] or {uniform|point|truncated_geometric}");
}

std::vector<RateFadingLaw> Config::laws() const {
  std::vector<RateFadingLaw> out;
  for (std::size_t u = 0; u < users.size(); ++u)
    out.emplace_back(users[u].arrivals, users[u].fading ? *users[u].fading : DiscreteLaw::point(gains[u]));
  return out;
}

bool Config::fixed_fading() const {
  for (const auto& u : users)
    if (u.fading && u.fading->max_support() != u.fading->atoms().front().value) return false;
  return true;
}

Config parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("$", "config must be a JSON object");
  reject_unknown(doc, {"users", "gains", "dmax", "scheduler", "dd_beta", "robust_step", "vi", "iteropt", "sim", "sweep", "continuous"},
                 "$");
  Config cfg;
  if (doc.contains("users")) {
    const json& users = doc["users"];
    if (!users.is_array() || users.empty()) throw ConfigError("users", "expected a non-empty array");
    for (std::size_t u = 0; u < users.size(); ++u) {
      std::string p = at("users", u);
      if (!users[u].is_object() || !users[u].contains("arrivals")) throw ConfigError(p, "expected {arrivals, fading?}");
      reject_unknown(users[u], {"arrivals", "fading"}, p);
      UserConfig uc{parse_law(users[u]["arrivals"], p + ".arrivals"), std::nullopt};
      if (users[u].contains("fading")) {
        uc.fading = parse_law(users[u]["fading"], p + ".fading");
        if (uc.fading->atoms().front().value <= 0 || uc.fading->atoms().front().prob < 0)
          throw ConfigError(p + ".fading", "fading gains must be positive");
      }
      cfg.users.push_back(std::move(uc));
    }
  }
  if (doc.contains("gains")) {
    const json& g = doc["gains"];
    if (!g.is_array() || g.size() != cfg.users.size()) throw ConfigError("gains", "expected one gain per user");
    for (std::size_t k = 0; k < g.size(); ++k) {
      Rational v = parse_value(g[k], at("gains", k));
      if (v <= 0) throw ConfigError(at("gains", k), "gain must be positive");
      cfg.gains.push_back(v);
    }
  } else {
    cfg.gains.assign(cfg.users.size(), Rational(1));
  }
  if (doc.contains("dmax")) {
    cfg.dmax = parse_count(doc["dmax"], "dmax");
    if (cfg.dmax < 1) throw ConfigError("dmax", "must be at least 1");
  }
  if (doc.contains("scheduler")) {
    if (!doc["scheduler"].is_string()) throw ConfigError("scheduler", "expected a string");
    cfg.scheduler = doc["scheduler"].get<std::string>();
    static const std::set<std::string> known{"identity", "via", "robust", "dd"};
    if (!known.count(cfg.scheduler)) throw ConfigError("scheduler", "expected identity|via|robust|dd");
  }
  if (doc.contains("dd_beta")) {
    cfg.dd_beta = parse_double(doc["dd_beta"], "dd_beta");
    if (!(cfg.dd_beta > 0 && cfg.dd_beta <= 1)) throw ConfigError("dd_beta", "must lie in (0,1]");
  }
  if (doc.contains("robust_step")) {
    cfg.robust_step = parse_value(doc["robust_step"], "robust_step");
    if (cfg.robust_step <= 0) throw ConfigError("robust_step", "must be positive");
  }
  VIConfig& vi = cfg.iteropt.vi;
  if (doc.contains("vi")) {
    const json& v = doc["vi"];
    if (!v.is_object()) throw ConfigError("vi", "expected an object");
    reject_unknown(v, {"gamma", "delta", "tol", "max_iter"}, "vi");
    if (v.contains("gamma")) vi.gamma = parse_double(v["gamma"], "vi.gamma");
    if (!(vi.gamma > 0 && vi.gamma < 1)) throw ConfigError("vi.gamma", "must lie in (0,1)");
    if (v.contains("delta")) vi.delta = parse_value(v["delta"], "vi.delta");
    if (vi.delta <= 0) throw ConfigError("vi.delta", "must be positive");
    if (v.contains("tol")) vi.tol = parse_double(v["tol"], "vi.tol");
    if (!(vi.tol > 0)) throw ConfigError("vi.tol", "must be positive");
    if (v.contains("max_iter")) vi.max_iter = parse_count(v["max_iter"], "vi.max_iter");
  }
  if (doc.contains("iteropt")) {
    const json& o = doc["iteropt"];
    if (!o.is_object()) throw ConfigError("iteropt", "expected an object");
    reject_unknown(o, {"init", "halt_tol", "max_outer"}, "iteropt");
    if (o.contains("init")) {
      std::string init = o["init"].is_string() ? o["init"].get<std::string>() : "";
      if (init == "tdma") cfg.iteropt.init = IterInit::tdma;
      else if (init == "unitdelay") cfg.iteropt.init = IterInit::unitdelay;
      else throw ConfigError("iteropt.init", "expected tdma|unitdelay");
    }
    if (o.contains("halt_tol")) cfg.iteropt.halt_tol = parse_double(o["halt_tol"], "iteropt.halt_tol");
    if (o.contains("max_outer")) cfg.iteropt.max_outer = parse_count(o["max_outer"], "iteropt.max_outer");
  }
  if (doc.contains("sim")) {
    const json& s = doc["sim"];
    if (!s.is_object()) throw ConfigError("sim", "expected an object");
    reject_unknown(s, {"slots", "reps", "seed", "trace"}, "sim");
    if (s.contains("slots")) cfg.sim.slots = parse_count(s["slots"], "sim.slots");
    if (cfg.sim.slots < 1) throw ConfigError("sim.slots", "must be at least 1");
    if (s.contains("reps")) cfg.sim.reps = parse_count(s["reps"], "sim.reps");
    if (cfg.sim.reps < 1) throw ConfigError("sim.reps", "must be at least 1");
    if (s.contains("seed")) cfg.sim.seed = parse_count(s["seed"], "sim.seed");
    if (s.contains("trace")) {
      if (!s["trace"].is_boolean()) throw ConfigError("sim.trace", "expected true or false");
      cfg.sim.trace = s["trace"].get<bool>();
    }
  }
  if (doc.contains("sweep")) {
    const json& s = doc["sweep"];
    if (!s.is_object() || !s.contains("axis") || !s.contains("grid")) throw ConfigError("sweep", "expected {axis, grid}");
    reject_unknown(s, {"axis", "grid", "deltas", "simulate"}, "sweep");
    SweepConfig sw;
    sw.axis = s["axis"].is_string() ? s["axis"].get<std::string>() : "";
    if (sw.axis != "alpha" && sw.axis != "gamma_a" && sw.axis != "p1")
      throw ConfigError("sweep.axis", "expected alpha|gamma_a|p1");
    if (!s["grid"].is_array() || s["grid"].empty()) throw ConfigError("sweep.grid", "expected a non-empty array");
    for (std::size_t k = 0; k < s["grid"].size(); ++k) {
      double x = parse_double(s["grid"][k], at("sweep.grid", k));
      if (!(x > 0)) throw ConfigError(at("sweep.grid", k), "sweep values must be positive");
      sw.grid.push_back(x);
    }
    if (s.contains("deltas")) {
      if (!s["deltas"].is_array()) throw ConfigError("sweep.deltas", "expected an array");
      for (std::size_t k = 0; k < s["deltas"].size(); ++k) {
        Rational d = parse_value(s["deltas"][k], at("sweep.deltas", k));
        if (d <= 0) throw ConfigError(at("sweep.deltas", k), "must be positive");
        sw.deltas.push_back(d);
      }
    }
    if (s.contains("simulate")) {
      if (!s["simulate"].is_boolean()) throw ConfigError("sweep.simulate", "expected true or false");
      sw.simulate = s["simulate"].get<bool>();
    }
    cfg.sweep = std::move(sw);
  }
  if (doc.contains("continuous")) {
    const json& c = doc["continuous"];
    if (!c.is_object() || !c.contains("users")) throw ConfigError("continuous", "expected {users, alpha, n_grid}");
    reject_unknown(c, {"users", "alpha", "n_grid"}, "continuous");
    ContinuousConfig cc;
    std::size_t n_grid = c.contains("n_grid") ? parse_count(c["n_grid"], "continuous.n_grid") : 1025;
    if (n_grid < 64) throw ConfigError("continuous.n_grid", "must be at least 64");
    if (c.contains("alpha")) cc.alpha = parse_double(c["alpha"], "continuous.alpha");
    if (!(cc.alpha > 0 && cc.alpha <= 1)) throw ConfigError("continuous.alpha", "must lie in (0, 1]");
    if (!c["users"].is_array() || c["users"].size() != 2) throw ConfigError("continuous.users", "expected two users");
    for (std::size_t k = 0; k < 2; ++k) {
      std::string p = at("continuous.users", k);
      cc.users.push_back(parse_continuous(c["users"][k], p, n_grid));
      try {
        cc.users.back().validate();
      } catch (const std::exception& e) {
        throw ConfigError(p, e.what());
      }
    }
    cfg.continuous = std::move(cc);
  }
  if (cfg.users.empty() && !cfg.continuous) throw ConfigError("users", "missing");
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
  return parse_config(doc);
}

}  // namespace dmac
