#include "dmac/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace dmac {

namespace {

constexpr double kStateSlack = 1e-9;

template <class F>
void parallel_for(std::size_t n, F&& f) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw <= 1 || n < 4096) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (n + hw - 1) / hw;
  for (unsigned t = 0; t < hw; ++t) {
    std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &f] {
      for (std::size_t i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct TicksHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (auto x : v) h ^= std::hash<std::int64_t>{}(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};

std::int64_t tick_of(const Rational& value, const Rational& delta, const char* what) {
  Rational q = value / delta;
  if (denominator(q) != 1) throw std::invalid_argument(std::string(what) + " " + to_string(value) +
                                                       " is not a multiple of the step " + to_string(delta));
  return numerator(q).convert_to<std::int64_t>();
}

// Serve `action` earliest deadline first and drop the (now empty) head.
template <class T>
std::vector<T> serve_and_shift(const std::vector<T>& s, T action) {
  std::vector<T> out(s.size() - 1);
  for (std::size_t d = 0; d < s.size(); ++d) {
    T take = std::min(action, s[d]);
    action -= take;
    if (d > 0) out[d - 1] = s[d] - take;
  }
  return out;
}

}  // namespace

ExactState step_state(const ExactState& s, const Rational& action, const Rational& arrival) {
  if (s.empty()) throw std::invalid_argument("state vector must have D_max >= 1 entries");
  if (arrival < 0) throw std::invalid_argument("arrival must be nonnegative");
  Rational total = 0;
  for (const auto& x : s) {
    if (x < 0) throw std::invalid_argument("state entries must be nonnegative");
    total += x;
  }
  if (action < s[0]) throw std::invalid_argument("action " + to_string(action) + " misses the deadline of " +
                                                 to_string(s[0]) + " urgent bits");
  if (action > total) throw std::invalid_argument("action " + to_string(action) + " exceeds the backlog " +
                                                  to_string(total));
  ExactState out = serve_and_shift(s, action);
  out.push_back(arrival);
  return out;
}

QueueState step_state(const QueueState& s, double action, double arrival) {
  if (s.empty()) throw std::invalid_argument("state vector must have D_max >= 1 entries");
  if (arrival < 0) throw std::invalid_argument("arrival must be nonnegative");
  double total = 0.0;
  for (double x : s) {
    if (x < -kStateSlack) throw std::invalid_argument("state entries must be nonnegative");
    total += x;
  }
  double slack = kStateSlack * std::max(1.0, total);
  if (action < s[0] - slack) {
    std::ostringstream os;
    os << "action " << action << " misses the deadline of " << s[0] << " urgent bits";
    throw std::invalid_argument(os.str());
  }
  if (action > total + slack) {
    std::ostringstream os;
    os << "action " << action << " exceeds the backlog " << total;
    throw std::invalid_argument(os.str());
  }
  action = std::clamp(action, s[0], total);
  QueueState out = serve_and_shift(s, action);
  for (double& x : out)
    if (x < slack) x = std::max(0.0, x);
  out.push_back(arrival);
  return out;
}

SchedulerPolicy::SchedulerPolicy(std::size_t dmax, Rational delta, std::map<Ticks, std::int64_t> table)
    : dmax_(dmax), delta_(std::move(delta)), table_(std::move(table)) {
  if (dmax_ < 1) throw std::invalid_argument("D_max must be at least 1");
  if (delta_ <= 0) throw std::invalid_argument("step must be positive");
  for (const auto& [s, a] : table_) {
    if (s.size() != dmax_) throw std::invalid_argument("policy state of wrong length");
    std::int64_t total = std::accumulate(s.begin(), s.end(), std::int64_t{0});
    if (a < s[0] || a > total) throw std::invalid_argument("policy action outside [s[1], backlog]");
  }
}

SchedulerPolicy::Ticks SchedulerPolicy::to_ticks(const ExactState& s) const {
  if (s.size() != dmax_) throw std::invalid_argument("state length differs from D_max");
  Ticks t;
  for (const auto& x : s) t.push_back(tick_of(x, delta_, "state entry"));
  return t;
}

bool SchedulerPolicy::contains(const ExactState& s) const {
  try {
    return table_.count(to_ticks(s)) != 0;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

Rational SchedulerPolicy::rate(const ExactState& s) const {
  auto it = table_.find(to_ticks(s));
  if (it == table_.end()) {
    std::ostringstream os;
    os << "policy has no entry for state (";
    for (std::size_t d = 0; d < s.size(); ++d) os << (d ? "," : "") << to_string(s[d]);
    os << ")";
    throw std::out_of_range(os.str());
  }
  return Rational(it->second) * delta_;
}

double SchedulerPolicy::rate(const QueueState& s) const {
  ExactState e;
  double step = to_double(delta_);
  for (double x : s) {
    double k = std::round(x / step);
    if (std::abs(x - k * step) > kStateSlack * std::max(1.0, std::abs(x)))
      throw std::invalid_argument("state entry is off the policy grid");
    e.push_back(Rational(static_cast<long>(k)) * delta_);
  }
  return to_double(rate(e));
}

Rational SchedulerPolicy::matrix_entry(const Rational& urgent, const Rational& fresh) const {
  if (dmax_ != 2) throw std::logic_error("matrix layout exists for D_max = 2 only");
  return rate(ExactState{urgent, fresh});
}

std::string SchedulerPolicy::render_matrix() const {
  if (dmax_ != 2) throw std::logic_error("matrix layout exists for D_max = 2 only");
  std::vector<std::int64_t> rows, cols;
  for (const auto& [s, a] : table_) {
    rows.push_back(s[0]);
    cols.push_back(s[1]);
  }
  auto uniq = [](std::vector<std::int64_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(rows);
  uniq(cols);
  auto show = [&](std::int64_t t) { return to_string(Rational(t) * delta_); };
  std::size_t w = 1;
  for (auto r : rows) w = std::max(w, show(r).size());
  for (auto c : cols) w = std::max(w, show(c).size());
  for (const auto& [s, a] : table_) w = std::max(w, show(a).size());
  auto pad = [w](const std::string& x) { return std::string(w + 1 - x.size(), ' ') + x; };
  std::ostringstream os;
  os << pad("");
  for (auto c : cols) os << pad(show(c));
  os << "\n";
  for (auto r : rows) {
    os << pad(show(r));
    for (auto c : cols) {
      auto it = table_.find({r, c});
      os << pad(it == table_.end() ? "-" : show(it->second));
    }
    os << "\n";
  }
  return os.str();
}

SchedulerPolicy value_iteration(const PowerCurve& power, const DiscreteLaw& arrivals, std::size_t dmax,
                                const VIConfig& cfg, VIStats* stats, std::vector<std::vector<double>>* value_history) {
  if (dmax < 1) throw std::invalid_argument("D_max must be at least 1");
  if (!(cfg.gamma > 0 && cfg.gamma < 1)) throw std::invalid_argument("discount must lie in (0,1)");
  if (cfg.delta <= 0) throw std::invalid_argument("step must be positive");
  if (!(cfg.tol > 0)) throw std::invalid_argument("tolerance must be positive");

  std::vector<std::int64_t> arr;
  std::vector<double> prob;
  for (const auto& a : arrivals.atoms()) {
    if (a.prob == 0) continue;
    arr.push_back(tick_of(a.value, cfg.delta, "arrival"));
    prob.push_back(to_double(a.prob));
  }
  using Ticks = SchedulerPolicy::Ticks;

  // States: residual (D_max - 1 entries) followed by the fresh arrival.
  std::unordered_map<Ticks, std::size_t, TicksHash> state_id, res_id;
  std::vector<Ticks> states, residuals;
  std::vector<std::vector<std::size_t>> res_next;  // residual -> state per arrival
  auto residual_index = [&](const Ticks& r) {
    auto [it, fresh] = res_id.emplace(r, residuals.size());
    if (fresh) residuals.push_back(r);
    return it->second;
  };
  residual_index(Ticks(dmax - 1, 0));
  std::vector<std::vector<std::size_t>> action_res;  // per state, per action offset
  for (std::size_t r = 0; r < residuals.size(); ++r) {
    std::vector<std::size_t> nxt;
    for (auto a : arr) {
      Ticks s = residuals[r];
      s.push_back(a);
      auto [it, fresh] = state_id.emplace(s, states.size());
      if (fresh) {
        states.push_back(s);
        std::int64_t total = std::accumulate(s.begin(), s.end(), std::int64_t{0});
        std::vector<std::size_t> outs;
        for (std::int64_t act = s[0]; act <= total; ++act) outs.push_back(residual_index(serve_and_shift(s, act)));
        action_res.push_back(std::move(outs));
      }
      nxt.push_back(it->second);
    }
    res_next.push_back(std::move(nxt));
  }

  const std::size_t n = states.size();
  std::map<std::int64_t, double> cost_cache;
  auto cost = [&](std::int64_t t) {
    auto it = cost_cache.find(t);
    if (it != cost_cache.end()) return it->second;
    double c = power(to_double(Rational(t) * cfg.delta));
    if (!std::isfinite(c) || c < 0) throw std::invalid_argument("power curve must be finite and nonnegative");
    return cost_cache[t] = c;
  };
  std::vector<std::vector<double>> action_cost(n);
  double ceiling = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < action_res[i].size(); ++k)
      action_cost[i].push_back(cost(states[i][0] + static_cast<std::int64_t>(k)));
    ceiling = std::max(ceiling, action_cost[i].front());
  }

  // Start above the fixed point so the iterates decrease monotonically.
  std::vector<double> V(n, ceiling / (1 - cfg.gamma)), next(n), ev(residuals.size());
  auto q_value = [&](std::size_t i, std::size_t k) { return action_cost[i][k] + cfg.gamma * ev[action_res[i][k]]; };
  auto expect = [&] {
    for (std::size_t r = 0; r < residuals.size(); ++r) {
      double e = 0.0;
      for (std::size_t k = 0; k < arr.size(); ++k) e += prob[k] * V[res_next[r][k]];
      ev[r] = e;
    }
  };
  if (value_history) value_history->push_back(V);
  std::size_t sweep = 0;
  double residual = std::numeric_limits<double>::infinity();
  while (sweep < cfg.max_iter) {
    expect();
    parallel_for(n, [&](std::size_t i) {
      double best = q_value(i, 0);
      for (std::size_t k = 1; k < action_res[i].size(); ++k) best = std::min(best, q_value(i, k));
      next[i] = best;
    });
    residual = 0.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      residual = std::max(residual, std::abs(next[i] - V[i]));
      scale = std::max(scale, std::abs(next[i]));
    }
    V.swap(next);
    ++sweep;
    if (value_history) value_history->push_back(V);
    if (residual <= cfg.tol * scale) break;
  }
  if (stats) *stats = {sweep, residual, n};
  if (sweep >= cfg.max_iter) {
    std::ostringstream os;
    os << "value iteration did not converge in " << cfg.max_iter << " sweeps (residual " << residual << ")";
    throw std::runtime_error(os.str());
  }

  expect();
  std::map<Ticks, std::int64_t> table;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t pick = 0;
    double best = q_value(i, 0);
    for (std::size_t k = 1; k < action_res[i].size(); ++k) {
      double q = q_value(i, k);
      if (q < best - 1e-12 * std::max(1.0, std::abs(best))) {
        best = q;
        pick = k;
      }
    }
    table.emplace(states[i], states[i][0] + static_cast<std::int64_t>(pick));
  }
  return SchedulerPolicy(dmax, cfg.delta, std::move(table));
}

namespace {

// Solves mu = mu M, sum(mu) = 1 on a closed class by exact elimination.
std::vector<Rational> solve_stationary(const std::vector<std::map<std::size_t, Rational>>& M) {
  const std::size_t n = M.size();
  // Unknown j; equation j (j < n-1): sum_i mu_i M[i][j] - mu_j = 0; last: sum mu = 1.
  std::vector<std::vector<Rational>> A(n, std::vector<Rational>(n + 1));
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [j, p] : M[i])
      if (j + 1 < n) A[j][i] += p;
  for (std::size_t j = 0; j + 1 < n; ++j) A[j][j] -= 1;
  for (std::size_t i = 0; i < n; ++i) A[n - 1][i] = 1;
  A[n - 1][n] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && A[piv][c] == 0) ++piv;
    if (piv == n) throw std::runtime_error("singular stationary system");
    std::swap(A[piv], A[c]);
    Rational inv = 1 / A[c][c];
    for (std::size_t k = c; k <= n; ++k) A[c][k] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || A[r][c] == 0) continue;
      Rational f = A[r][c];
      for (std::size_t k = c; k <= n; ++k)
        if (A[c][k] != 0) A[r][k] -= f * A[c][k];
    }
  }
  std::vector<Rational> mu(n);
  for (std::size_t i = 0; i < n; ++i) mu[i] = A[i][n];
  return mu;
}

// Tarjan; returns component id per node and the component count.
std::pair<std::vector<std::size_t>, std::size_t> strongly_connected(const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t n = adj.size(), unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, unset), low(n), comp(n, unset), stack;
  std::vector<bool> on(n, false);
  std::size_t counter = 0, comps = 0;
  // Iterative DFS with explicit (node, edge cursor) frames.
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unset) continue;
    frames.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on[root] = true;
    while (!frames.empty()) {
      auto& [v, e] = frames.back();
      if (e < adj[v].size()) {
        std::size_t w = adj[v][e++];
        if (index[w] == unset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on[w] = true;
          frames.push_back({w, 0});
        } else if (on[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on[w] = false;
          comp[w] = comps;
        } while (w != v);
        ++comps;
      }
      std::size_t done = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
    }
  }
  return {comp, comps};
}

}  // namespace

DiscreteLaw stationary_rate_law(const ExactPolicy& policy, const DiscreteLaw& arrivals, std::size_t dmax,
                                std::size_t max_states) {
  if (dmax < 1) throw std::invalid_argument("D_max must be at least 1");
  std::vector<Atom> arr;
  for (const auto& a : arrivals.atoms())
    if (a.prob > 0) arr.push_back(a);

  std::map<ExactState, std::size_t> id;
  std::vector<ExactState> residuals;
  std::vector<std::vector<Rational>> rates;            // per residual, per arrival
  std::vector<std::map<std::size_t, Rational>> M;      // residual transition law
  auto index_of = [&](const ExactState& r) {
    auto [it, fresh] = id.emplace(r, residuals.size());
    if (fresh) {
      if (residuals.size() >= max_states)
        throw std::runtime_error("scheduler chain reaches more than " + std::to_string(max_states) +
                                 " residual states; quantize the scheduler's rates");
      residuals.push_back(r);
    }
    return it->second;
  };
  index_of(ExactState(dmax - 1, Rational(0)));
  for (std::size_t r = 0; r < residuals.size(); ++r) {
    std::vector<Rational> out;
    std::map<std::size_t, Rational> row;
    for (const auto& a : arr) {
      ExactState s = residuals[r];
      s.push_back(a.value);
      Rational act = policy(s);
      ExactState nxt = step_state(s, act, Rational(0));
      nxt.pop_back();
      std::size_t j = index_of(nxt);
      row[j] += a.prob;
      out.push_back(act);
    }
    rates.push_back(std::move(out));
    M.push_back(std::move(row));
  }

  const std::size_t n = residuals.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [j, p] : M[i]) adj[i].push_back(j);
  auto [comp, comps] = strongly_connected(adj);
  std::vector<bool> closed(comps, true);
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : adj[i])
      if (comp[j] != comp[i]) closed[comp[i]] = false;
  std::size_t recurrent = comps;
  for (std::size_t c = 0; c < comps; ++c)
    if (closed[c]) {
      if (recurrent != comps) throw std::runtime_error("scheduler chain has more than one recurrent class");
      recurrent = c;
    }

  std::vector<std::size_t> members;
  std::vector<std::size_t> local(n, n);
  for (std::size_t i = 0; i < n; ++i)
    if (comp[i] == recurrent) {
      local[i] = members.size();
      members.push_back(i);
    }
  std::vector<std::map<std::size_t, Rational>> sub(members.size());
  for (std::size_t k = 0; k < members.size(); ++k)
    for (const auto& [j, p] : M[members[k]]) sub[k][local[j]] = p;
  std::vector<Rational> mu = solve_stationary(sub);

  std::map<Rational, Rational> law;
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (mu[k] == 0) continue;
    for (std::size_t a = 0; a < arr.size(); ++a) law[rates[members[k]][a]] += mu[k] * arr[a].prob;
  }
  std::vector<Atom> atoms;
  for (auto& [v, p] : law)
    if (p > 0) atoms.push_back({v, p});
  return DiscreteLaw(std::move(atoms));
}

DiscreteLaw stationary_rate_law(const SchedulerPolicy& policy, const DiscreteLaw& arrivals) {
  return stationary_rate_law([&policy](const ExactState& s) { return policy.rate(s); }, arrivals, policy.dmax());
}

SchedulerPolicy full_drain_policy(const DiscreteLaw& arrivals, std::size_t dmax, const Rational& delta) {
  if (dmax < 1) throw std::invalid_argument("D_max must be at least 1");
  if (delta <= 0) throw std::invalid_argument("step must be positive");
  std::map<SchedulerPolicy::Ticks, std::int64_t> table;
  for (const auto& a : arrivals.atoms()) {
    if (a.prob == 0) continue;
    SchedulerPolicy::Ticks s(dmax, 0);
    s.back() = tick_of(a.value, delta, "arrival");
    table.emplace(s, s.back());
  }
  return SchedulerPolicy(dmax, delta, std::move(table));
}

double policy_average_cost(const SchedulerPolicy& policy, const PowerCurve& power, const DiscreteLaw& arrivals) {
  return stationary_rate_law(policy, arrivals).expected_value(power);
}

Rational robust_rate(const ExactState& s) {
  Rational best = 0, run = 0;
  for (std::size_t d = 0; d < s.size(); ++d) {
    run += s[d];
    Rational avg = run / static_cast<long>(d + 1);
    if (avg > best) best = avg;
  }
  return best;
}

double robust_rate(const QueueState& s) {
  double best = 0.0, run = 0.0;
  for (std::size_t d = 0; d < s.size(); ++d) {
    run += s[d];
    best = std::max(best, run / static_cast<double>(d + 1));
  }
  return best;
}

Rational robust_rate(const ExactState& s, const Rational& step) {
  if (step < 0) throw std::invalid_argument("step must be nonnegative");
  Rational r = robust_rate(s);
  if (step == 0) return r;
  Rational q = r / step;
  Rational k = floor(q);
  if (k != q) k += 1;
  Rational total = 0;
  for (const auto& x : s) total += x;
  Rational up = k * step;
  return up < total ? up : total;
}

ExactPolicy robust_policy(const Rational& step) {
  return [step](const ExactState& s) { return robust_rate(s, step); };
}

DDDecision dd_rate(const QueueState& s, double gain, const DDState& dd, const FadingPowerCurve& curve) {
  if (!(dd.beta > 0 && dd.beta <= 1)) throw std::invalid_argument("DD smoothing must lie in (0,1]");
  double backlog = std::accumulate(s.begin(), s.end(), 0.0);
  double r = curve.rate_at_slope(dd.derivative, gain);
  double b = std::min(std::max(r, robust_rate(s)), backlog);
  double at = std::min(b, curve.max_rate());
  DDState next = dd;
  next.derivative = dd.beta * dd.derivative + (1 - dd.beta) * curve.slope(at, gain);
  return {b, next};
}

}  // namespace dmac
