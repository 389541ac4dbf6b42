#include "dmac/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace dmac {

json to_json(const Rational& q) { return to_string(q); }

json to_json(const DiscreteLaw& law) {
  json out = json::array();
  for (const auto& a : law.atoms()) out.push_back({to_json(a.value), to_json(a.prob)});
  return out;
}

json to_json(const RateFadingLaw& law) { return {{"rate", to_json(law.rate)}, {"fading", to_json(law.fading)}}; }

namespace {

json pair_json(const RatePair& p) { return {to_json(p.rate), to_json(p.gain)}; }

json levels_json(const std::vector<Rational>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(to_json(x));
  return out;
}

json table_json(const PowerTable& table) {
  json out = json::array();
  for (std::size_t u = 0; u < table.users.size(); ++u)
    for (const auto& e : table.users[u])
      out.push_back({{"user", u + 1}, {"rate", to_json(e.rate)}, {"gain", to_json(e.gain)}, {"power", e.power}});
  return out;
}

json hist_json(const std::map<double, std::uint64_t>& h) {
  json out = json::array();
  for (auto [k, c] : h) out.push_back({k, c});
  return out;
}

}  // namespace

json to_json(const GammaGrid& grid) {
  json levels = json::array();
  for (std::size_t l = 0; l < grid.levels.size(); ++l)
    levels.push_back({{"gamma", to_json(grid.levels[l].gamma)},
                      {"gap", to_json(grid.levels[l].gap)},
                      {"pairs", {pair_json(grid.pair(l, 0)), pair_json(grid.pair(l, 1))}}});
  return {{"alpha_levels", levels_json(grid.raw_levels(0))},
          {"beta_levels", levels_json(grid.raw_levels(1))},
          {"d0", to_json(grid.d0)},
          {"d0_value", to_double(grid.d0)},
          {"base_user", grid.base_user + 1},
          {"swapped", grid.swapped()},
          {"l_star", grid.l_star},
          {"levels", levels}};
}

json to_json(const OutageAudit& audit) {
  static const char* names[] = {"pass", "violation", "missing_entry"};
  json out = {{"status", names[static_cast<int>(audit.status)]}};
  if (audit.status != OutageAudit::Status::pass) {
    json tuple = json::array(), subset = json::array();
    for (const auto& p : audit.tuple) tuple.push_back(pair_json(p));
    for (auto i : audit.subset) subset.push_back(i + 1);
    out["tuple"] = tuple;
    out["subset"] = subset;
    out["lhs"] = audit.lhs;
    out["rhs"] = audit.rhs;
    out["message"] = audit.message;
  }
  return out;
}

json to_json(const AllocationReport& report, const OutageAudit& audit) {
  json laws = json::array(), trace = json::array();
  for (const auto& l : report.laws) laws.push_back(to_json(l));
  for (const auto& t : report.trace) {
    json pairs = json::array();
    for (const auto& p : t.pairs) pairs.push_back(pair_json(p));
    trace.push_back({{"gamma", to_json(t.gamma)}, {"gap", to_json(t.gap)}, {"pairs", pairs}, {"received", t.received}});
  }
  return {{"achieved", report.achieved},
          {"lower_bound", report.lower_bound},
          {"swapped", report.swapped},
          {"outage_audit", to_json(audit)},
          {"laws", laws},
          {"power_table", table_json(report.table)},
          {"trace", trace}};
}

json to_json(const SchedulerPolicy& policy) {
  json entries = json::array();
  for (const auto& [s, a] : policy.table()) {
    json state = json::array();
    for (auto t : s) state.push_back(to_json(Rational(t) * policy.delta()));
    entries.push_back({state, to_json(Rational(a) * policy.delta())});
  }
  json out = {{"Dmax", policy.dmax()}, {"delta", to_json(policy.delta())}, {"entries", entries}};
  if (policy.dmax() == 2) out["matrix"] = policy.render_matrix();
  return out;
}

json to_json(const IterOptTrace& trace) {
  json steps = json::array();
  for (const auto& s : trace.steps) {
    json laws = json::array(), scheds = json::array();
    for (const auto& l : s.laws) laws.push_back(to_json(l));
    for (const auto& p : s.schedulers) scheds.push_back(to_json(p));
    steps.push_back({{"average", s.average},
                     {"lower_bound", s.allocation.lower_bound},
                     {"laws", laws},
                     {"schedulers", scheds},
                     {"power_table", table_json(s.allocation.table)}});
  }
  return {{"dmax", trace.dmax},
          {"gains", {to_json(trace.gains[0]), to_json(trace.gains[1])}},
          {"iterations", trace.iterations()},
          {"halt_reason", trace.halt_reason},
          {"final_average", trace.final_step().average},
          {"steps", steps}};
}

json to_json(const SimReport& r) {
  json rate = json::array(), power = json::array();
  for (const auto& h : r.rate_hist) rate.push_back(hist_json(h));
  for (const auto& h : r.power_hist) power.push_back(hist_json(h));
  return {{"mean", r.mean},
          {"std_err", r.std_err},
          {"slots", r.slots},
          {"reps", r.reps},
          {"outages", r.outages},
          {"delay_violations", r.delay_violations},
          {"user_mean", r.user_mean},
          {"rate_hist", rate},
          {"power_hist", power}};
}

json to_json(const GtdmResult& r) { return {{"tau", r.tau}, {"average", r.average}}; }

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), width_(header.size()) {
  if (header.empty()) throw std::invalid_argument("CSV header must not be empty");
  row(header);
}

std::string CsvWriter::escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw std::invalid_argument("CSV row width differs from the header");
  for (std::size_t k = 0; k < fields.size(); ++k) os_ << (k ? "," : "") << escape(fields[k]);
  os_ << "\r\n";
}

void write_power_table_csv(std::ostream& os, const PowerTable& table) {
  CsvWriter w(os, {"user", "rate", "gain", "power"});
  for (std::size_t u = 0; u < table.users.size(); ++u)
    for (const auto& e : table.users[u])
      w.row({std::to_string(u + 1), format_double(to_double(e.rate)), format_double(to_double(e.gain)),
             format_double(e.power)});
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  CsvWriter w(os, {"slot", "user", "arrival", "fading", "rate", "power", "outage_flag"});
  for (const auto& r : rows)
    w.row({std::to_string(r.slot), std::to_string(r.user + 1), format_double(r.arrival), format_double(r.fading),
           format_double(r.rate), format_double(r.power), r.outage ? "1" : "0"});
}

void write_continuous_csv(std::ostream& os, const ContinuousAllocation& a) {
  CsvWriter w(os, {"quantile", "rate_1", "power_1", "rate_2", "power_2"});
  for (const auto& s : a.samples)
    w.row({format_double(s.quantile), format_double(s.rate_1), format_double(s.power_1), format_double(s.rate_2),
           format_double(s.power_2)});
}

}  // namespace dmac
