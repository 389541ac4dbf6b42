#include "dmac/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace dmac {

namespace {

Rational fixed_gain(const Config& cfg, std::size_t u) {
  const auto& f = cfg.users[u].fading;
  if (!f) return cfg.gains[u];
  for (const auto& a : f->atoms())
    if (a.prob > 0) return a.value;
  return cfg.gains[u];
}

void require_two(const Config& cfg, const char* what) {
  if (cfg.users.size() != 2) throw ConfigError("users", std::string(what) + " needs exactly two users");
}

void require_fixed(const Config& cfg, const char* what) {
  if (!cfg.fixed_fading()) throw ConfigError("users", std::string(what) + " needs fixed fading (one gain per user)");
}

std::vector<DiscreteLaw> arrival_laws(const Config& cfg) {
  std::vector<DiscreteLaw> out;
  for (const auto& u : cfg.users) out.push_back(u.arrivals);
  return out;
}

std::array<Rational, 2> two_gains(const Config& cfg) { return {fixed_gain(cfg, 0), fixed_gain(cfg, 1)}; }

IterOptConfig iteropt_config(const Config& cfg, const CommandOptions& opt) {
  IterOptConfig c = cfg.iteropt;
  if (opt.init) c.init = *opt.init;
  return c;
}

class OutDir {
 public:
  explicit OutDir(const std::string& dir) : dir_(dir) { std::filesystem::create_directories(dir_); }
  std::ofstream open(const std::string& name, CommandResult& res) const {
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
    res.files.push_back(name);
    return os;
  }

 private:
  std::filesystem::path dir_;
};

std::string name_with_delta(const std::string& base, const Rational& delta, bool tagged) {
  return tagged ? base + "(delta=" + to_string(delta) + ")" : base;
}

}  // namespace

AllocationReport allocate_config(const Config& cfg) {
  const std::size_t L = cfg.users.size();
  auto laws = cfg.laws();
  if (L == 2) return allocate_dynamic(build_pseudo_cdf(laws[0], laws[1]));
  require_fixed(cfg, "allocation for other than two users");
  if (L == 1) {
    AllocationReport rep;
    Rational g = fixed_gain(cfg, 0);
    rep.laws = {RateFadingLaw::fixed(cfg.users[0].arrivals, g)};
    rep.table.users.resize(1);
    for (const auto& a : cfg.users[0].arrivals.atoms())
      if (a.value > 0) rep.table.users[0].push_back({a.value, g, rate_cost(to_double(a.value)) / to_double(g)});
    rep.achieved = rep.lower_bound = average_sum_power(rep.table, rep.laws);
    return rep;
  }
  std::vector<std::size_t> order(L);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fixed_gain(cfg, a) > fixed_gain(cfg, b); });
  std::vector<DiscreteLaw> rates;
  std::vector<Rational> gains;
  for (auto i : order) {
    rates.push_back(cfg.users[i].arrivals);
    gains.push_back(fixed_gain(cfg, i));
  }
  AllocationReport sorted = allocate_l_user(rates, gains);
  AllocationReport rep = sorted;
  for (std::size_t k = 0; k < L; ++k) {
    rep.laws[order[k]] = sorted.laws[k];
    rep.table.users[order[k]] = sorted.table.users[k];
  }
  return rep;
}

std::vector<std::pair<std::string, double>> scheme_averages(const Config& cfg, const CommandOptions& opt) {
  require_two(cfg, "scheme comparison");
  std::vector<std::pair<std::string, double>> out;
  auto laws = cfg.laws();
  if (cfg.dmax == 1) {
    out.push_back({"centralized", centralized_average(laws[0], laws[1])});
    out.push_back({"decentralized", allocate_config(cfg).achieved});
    out.push_back({"gtdm", gtdm_optimize(laws[0], laws[1]).average});
    out.push_back({"stdm", tdm_average(laws[0], laws[1], 0.5)});
    return out;
  }
  require_fixed(cfg, "D_max > 1 comparison");
  auto arrivals = arrival_laws(cfg);
  auto gains = two_gains(cfg);
  std::vector<Rational> deltas;
  if (cfg.sweep && !cfg.sweep->deltas.empty()) deltas = cfg.sweep->deltas;
  else deltas = {cfg.iteropt.vi.delta};
  for (const auto& d : deltas) {
    IterOptConfig ic = iteropt_config(cfg, opt);
    ic.vi.delta = d;
    out.push_back({name_with_delta("iteropt", d, deltas.size() > 1), iteropt(arrivals, gains, cfg.dmax, ic).final_step().average});
  }
  double tdma = 0.0, robust_tdma = 0.0;
  std::vector<DiscreteLaw> robust;
  for (std::size_t u = 0; u < 2; ++u) {
    PowerCurve curve = stdm_curve(to_double(gains[u]), 0.5);
    tdma += policy_average_cost(value_iteration(curve, arrivals[u], cfg.dmax, cfg.iteropt.vi), curve, arrivals[u]);
    robust.push_back(stationary_rate_law(robust_policy(cfg.robust_step), arrivals[u], cfg.dmax));
    robust_tdma += robust.back().expected_value(curve);
  }
  out.push_back({"tdma_via", tdma});
  out.push_back({"robust_optimal", allocate_fixed(robust[0], robust[1], gains[0], gains[1]).achieved});
  out.push_back({"robust_tdma", robust_tdma});
  return out;
}

namespace {

SimConfig base_sim(const Config& cfg, const CommandOptions& opt) {
  SimConfig sc;
  sc.slots = cfg.sim.slots;
  sc.reps = cfg.sim.reps;
  sc.seed = opt.seed ? *opt.seed : cfg.sim.seed;
  sc.trace = cfg.sim.trace;
  sc.dmax = cfg.dmax;
  auto laws = cfg.laws();
  for (const auto& l : laws) {
    SimUser u;
    u.arrivals = l.rate;
    u.fading = l.fading;
    sc.users.push_back(std::move(u));
  }
  return sc;
}

// Config for the chosen scheduler and, when available, its analytic average.
std::pair<SimConfig, std::optional<double>> build_sim(const Config& cfg, const CommandOptions& opt) {
  SchedulerKind kind = parse_scheduler(cfg.scheduler);
  SimConfig sc = base_sim(cfg, opt);
  std::optional<double> analytic;
  switch (kind) {
    case SchedulerKind::identity: {
      AllocationReport rep = allocate_config(cfg);
      sc.table = rep.table;
      analytic = rep.achieved;
      break;
    }
    case SchedulerKind::via: {
      require_two(cfg, "the via scheduler");
      require_fixed(cfg, "the via scheduler");
      IterOptTrace tr = iteropt(arrival_laws(cfg), two_gains(cfg), cfg.dmax, iteropt_config(cfg, opt));
      const IterOptStep& fin = tr.final_step();
      for (std::size_t u = 0; u < 2; ++u) {
        sc.users[u].scheduler = SchedulerKind::via;
        sc.users[u].policy = fin.schedulers[u];
      }
      sc.table = fin.allocation.table;
      analytic = fin.average;
      break;
    }
    case SchedulerKind::robust: {
      require_two(cfg, "the robust scheduler");
      require_fixed(cfg, "the robust scheduler");
      auto gains = two_gains(cfg);
      std::vector<DiscreteLaw> laws;
      for (std::size_t u = 0; u < 2; ++u) {
        laws.push_back(stationary_rate_law(robust_policy(cfg.robust_step), cfg.users[u].arrivals, cfg.dmax));
        sc.users[u].scheduler = SchedulerKind::robust;
        sc.users[u].robust_step = cfg.robust_step;
      }
      AllocationReport rep = allocate_fixed(laws[0], laws[1], gains[0], gains[1]);
      sc.table = rep.table;
      analytic = rep.achieved;
      break;
    }
    case SchedulerKind::dd: {
      require_two(cfg, "the dd scheduler");
      SimConfig dd = dd_fading_config(cfg.laws(), cfg.dmax, cfg.dd_beta);
      dd.slots = sc.slots;
      dd.reps = sc.reps;
      dd.seed = sc.seed;
      dd.trace = sc.trace;
      sc = std::move(dd);
      break;
    }
  }
  return {std::move(sc), analytic};
}

Config at_sweep_point(const Config& cfg, double x) {
  Config c = cfg;
  const std::string& axis = cfg.sweep->axis;
  if (axis == "alpha") {
    require_two(cfg, "the alpha sweep");
    c.gains = {Rational(1), snap(x)};
    for (auto& u : c.users) u.fading.reset();
  } else if (axis == "gamma_a") {
    Rational k = snap(x);
    DiscreteLaw base = c.users[0].fading ? *c.users[0].fading : DiscreteLaw::point(c.gains[0]);
    c.users[0].fading = base.scaled_values(k * k);
  } else {
    c.users[0].arrivals = DiscreteLaw::truncated_geometric(snap(x), 5);
  }
  return c;
}

}  // namespace

std::vector<SweepRow> run_sweep(const Config& cfg, const CommandOptions& opt) {
  if (!cfg.sweep) throw ConfigError("sweep", "missing");
  std::vector<SweepRow> rows;
  for (double x : cfg.sweep->grid) {
    Config c = at_sweep_point(cfg, x);
    for (const auto& [name, avg] : scheme_averages(c, opt)) rows.push_back({x, name, avg, "analytic"});
    if (!cfg.sweep->simulate || c.dmax != 1) continue;
    auto laws = c.laws();
    SimConfig sc = base_sim(c, opt);
    SimConfig dec = sc;
    dec.trace = false;
    dec.table = allocate_config(c).table;
    rows.push_back({x, "decentralized", run(dec).mean, "simulated"});
    SimConfig joint = sc;
    joint.trace = false;
    joint.joint = centralized_rule();
    rows.push_back({x, "centralized", run(joint).mean, "simulated"});
    joint.joint = tdm_rule(gtdm_optimize(laws[0], laws[1]).tau);
    rows.push_back({x, "gtdm", run(joint).mean, "simulated"});
    joint.joint = tdm_rule(0.5);
    rows.push_back({x, "stdm", run(joint).mean, "simulated"});
  }
  return rows;
}

CommandResult cmd_alloc(const Config& cfg, const CommandOptions& opt) {
  CommandResult res;
  OutDir out(opt.out_dir);
  AllocationReport rep = allocate_config(cfg);
  OutageAudit audit = verify_outage_free(rep.table, rep.laws);
  json doc = to_json(rep, audit);
  if (cfg.users.size() == 2) {
    auto laws = cfg.laws();
    doc["grid"] = to_json(build_pseudo_cdf(laws[0], laws[1]));
  }
  out.open("alloc.json", res) << doc.dump(2) << "\n";
  auto csv = out.open("power_table.csv", res);
  write_power_table_csv(csv, rep.table);
  res.summary = {{"achieved", rep.achieved}, {"lower_bound", rep.lower_bound}, {"outage_audit", to_json(audit)}};
  if (doc.contains("grid")) res.summary["d0"] = doc["grid"]["d0"];
  res.exit_code = audit ? 0 : 2;
  return res;
}

CommandResult cmd_iteropt(const Config& cfg, const CommandOptions& opt) {
  require_two(cfg, "iteropt");
  require_fixed(cfg, "iteropt");
  CommandResult res;
  OutDir out(opt.out_dir);
  IterOptTrace tr = iteropt(arrival_laws(cfg), two_gains(cfg), cfg.dmax, iteropt_config(cfg, opt));
  out.open("iteropt.json", res) << to_json(tr).dump(2) << "\n";
  const IterOptStep& fin = tr.final_step();
  {
    auto os = out.open("schedulers.txt", res);
    for (std::size_t u = 0; u < fin.schedulers.size(); ++u) {
      os << "S_" << u + 1 << "\n";
      if (cfg.dmax == 2) os << fin.schedulers[u].render_matrix();
      else os << to_json(fin.schedulers[u]).dump(2) << "\n";
    }
  }
  auto csv = out.open("power_table.csv", res);
  write_power_table_csv(csv, fin.allocation.table);
  OutageAudit audit = verify_outage_free(fin.allocation.table, fin.allocation.laws);
  res.summary = {{"iterations", tr.iterations()},
                 {"final_average", fin.average},
                 {"halt_reason", tr.halt_reason},
                 {"outage_audit", to_json(audit)}};
  res.exit_code = audit ? 0 : 2;
  return res;
}

CommandResult cmd_simulate(const Config& cfg, const CommandOptions& opt) {
  CommandResult res;
  OutDir out(opt.out_dir);
  auto [sc, analytic] = build_sim(cfg, opt);
  SimReport rep = run(sc);
  json doc = {{"scheduler", cfg.scheduler}, {"seed", sc.seed}};
  if (analytic) doc["analytic"] = *analytic;
  doc["report"] = to_json(rep);
  out.open("sim.json", res) << doc.dump(2) << "\n";
  if (sc.trace) {
    auto csv = out.open("trace.csv", res);
    write_trace_csv(csv, rep.trace);
  }
  res.summary = {{"mean", rep.mean},
                 {"std_err", rep.std_err},
                 {"outages", rep.outages},
                 {"delay_violations", rep.delay_violations}};
  if (analytic) res.summary["analytic"] = *analytic;
  res.exit_code = rep.delay_violations == 0 ? 0 : 3;
  return res;
}

CommandResult cmd_baselines(const Config& cfg, const CommandOptions& opt) {
  require_two(cfg, "baselines");
  CommandResult res;
  OutDir out(opt.out_dir);
  json doc = json::object();
  for (const auto& [name, avg] : scheme_averages(cfg, opt)) doc[name] = avg;
  if (cfg.dmax == 1) {
    auto laws = cfg.laws();
    doc["gtdm_tau"] = gtdm_optimize(laws[0], laws[1]).tau;
  }
  out.open("baselines.json", res) << doc.dump(2) << "\n";
  res.summary = doc;
  return res;
}

CommandResult cmd_sweep(const Config& cfg, const CommandOptions& opt) {
  CommandResult res;
  OutDir out(opt.out_dir);
  auto rows = run_sweep(cfg, opt);
  auto os = out.open("sweep.csv", res);
  CsvWriter w(os, {cfg.sweep->axis, "scheme", "average_sum_power", "source"});
  for (const auto& r : rows) w.row({format_double(r.axis), r.scheme, format_double(r.average), r.source});
  res.summary = {{"rows", rows.size()}, {"axis", cfg.sweep->axis}};
  return res;
}

CommandResult cmd_continuous(const Config& cfg, const CommandOptions& opt) {
  if (!cfg.continuous) throw ConfigError("continuous", "missing");
  CommandResult res;
  OutDir out(opt.out_dir);
  const ContinuousConfig& cc = *cfg.continuous;
  ContinuousAllocation a = allocate_continuous(cc.users[0], cc.users[1], cc.alpha);
  auto os = out.open("continuous.csv", res);
  write_continuous_csv(os, a);
  std::string why;
  bool ok = check_continuous(a, 1e-9, &why);
  res.summary = {{"average", a.average}, {"residual", a.residual}, {"curves_valid", ok}};
  if (!ok) res.summary["problem"] = why;
  res.exit_code = ok ? 0 : 2;
  return res;
}

}  // namespace dmac
