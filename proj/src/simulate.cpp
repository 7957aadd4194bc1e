#include "handoff/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace handoff {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t trace_seed(std::uint64_t base, int index) {
  return splitmix64(base ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(index + 1)));
}

// Canonical uniform in [0,1) from the top 53 bits, independent of library
// distribution implementations.
double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

int sample_initial(const std::vector<double>& weights, double u) {
  double acc = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last = static_cast<int>(i);
    if (u < acc) return last;
  }
  if (last < 0) throw invariant_error("initial distribution has empty support");
  return last;  // rounding tail lands on the final positive entry
}

int sample_action(const std::map<int, double>& choice, double u) {
  double acc = 0.0;
  int last = -1;
  for (const auto& [a, pr] : choice) {
    if (pr <= 0.0) continue;
    acc += pr;
    last = a;
    if (u < acc) return last;
  }
  if (last < 0) throw invariant_error("policy row has empty support");
  return last;
}

std::size_t sample_successor(const ProductRow& row, double u) {
  double acc = 0.0;
  std::size_t last = row.succ.size();
  for (std::size_t s = 0; s < row.succ.size(); ++s) {
    if (row.prob[s] <= 0.0) continue;
    acc += row.prob[s];
    last = s;
    if (u < acc) return last;
  }
  if (last == row.succ.size()) throw invariant_error("transition row has empty support");
  return last;
}

Trace run_one(const ProductMdp& p, const RewardVector& rewards, const SwitchingPolicy& pol,
              std::uint64_t seed, int horizon) {
  std::mt19937_64 eng(seed);
  Trace tr;
  int v = sample_initial(p.initial, uniform01(eng));
  tr.states.push_back(v);
  int active_component = -1;
  double discount = 1.0;
  for (int t = 0; t < horizon; ++t) {
    if (!tr.switch_time && rewards.in_union[v]) {
      tr.switch_time = t;
      active_component = pol.component_of.at(v);
    }
    const MemorylessPolicy& g =
        tr.switch_time ? pol.inside[active_component] : pol.outside;
    if (!g.defined_at(v))
      throw invariant_error("no policy action at state " + p.state_ids[v]);
    int a = sample_action(g.at(v), uniform01(eng));
    const ProductRow* row = p.row(v, a);
    if (!row)
      throw invariant_error("policy action " + p.actions[a].id() + " not enabled at " +
                            p.state_ids[v]);
    std::size_t s = sample_successor(*row, uniform01(eng));
    tr.actions.push_back(a);
    tr.costs.push_back(row->cost[s]);
    tr.discounted_cost += discount * row->cost[s];
    discount *= p.gamma;
    v = row->succ[s];
    tr.states.push_back(v);
  }
  if (!tr.switch_time && rewards.in_union[v]) tr.switch_time = horizon;
  if (tr.switch_time)
    tr.reach_sample = *tr.switch_time == 0
                          ? 1.0
                          : std::pow(p.gamma, *tr.switch_time - 1);
  return tr;
}

// Strongly connected components of the chain a component policy induces,
// with a flag for the bottom ones (no edge leaving the class).
struct ChainClasses {
  std::map<int, int> class_of;
  std::vector<std::vector<int>> members;
  std::vector<bool> bottom;
};

ChainClasses chain_classes(const ProductMdp& p, const std::vector<int>& states,
                           const MemorylessPolicy& g) {
  std::map<int, std::vector<int>> succ;
  for (int v : states) {
    for (const auto& [a, pr] : g.at(v)) {
      if (pr <= 0.0) continue;
      const ProductRow* row = p.row(v, a);
      for (std::size_t s = 0; s < row->succ.size(); ++s)
        if (row->prob[s] > 0.0) succ[v].push_back(row->succ[s]);
    }
  }
  // Kosaraju with explicit stacks; components are small.
  std::vector<int> order;
  std::set<int> seen;
  for (int root : states) {
    if (seen.count(root)) continue;
    std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
    seen.insert(root);
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      if (i < succ[v].size()) {
        int w = succ[v][i++];
        if (!seen.count(w)) {
          seen.insert(w);
          stack.emplace_back(w, 0);
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }
  std::map<int, std::vector<int>> pred;
  for (const auto& [v, outs] : succ)
    for (int w : outs) pred[w].push_back(v);
  ChainClasses cc;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (cc.class_of.count(*it)) continue;
    int id = static_cast<int>(cc.members.size());
    cc.members.emplace_back();
    std::vector<int> stack{*it};
    cc.class_of[*it] = id;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      cc.members[id].push_back(v);
      for (int w : pred[v])
        if (!cc.class_of.count(w)) {
          cc.class_of[w] = id;
          stack.push_back(w);
        }
    }
  }
  cc.bottom.assign(cc.members.size(), true);
  for (const auto& [v, outs] : succ)
    for (int w : outs)
      if (cc.class_of[w] != cc.class_of[v]) cc.bottom[cc.class_of[v]] = false;
  return cc;
}

std::vector<int> policy_domain(const MemorylessPolicy& g) {
  std::vector<int> out;
  for (const auto& [v, row] : g.choice) {
    (void)row;
    out.push_back(v);
  }
  return out;
}

}  // namespace

Trace simulate(const ProductMdp& p, const RewardVector& rewards, const SwitchingPolicy& pol,
               const SimOptions& opt) {
  if (opt.horizon < 1) throw invariant_error("simulation horizon must be at least 1");
  return run_one(p, rewards, pol, trace_seed(opt.seed, 0), opt.horizon);
}

Estimate estimate(const ProductMdp& p, const RewardVector& rewards, const SwitchingPolicy& pol,
                  int n, const SimOptions& opt) {
  if (n < 1) throw invariant_error("trace count must be at least 1");
  if (opt.horizon < 1) throw invariant_error("simulation horizon must be at least 1");

  std::vector<ChainClasses> classes;
  for (std::size_t c = 0; c < pol.inside.size(); ++c)
    classes.push_back(chain_classes(p, policy_domain(pol.inside[c]), pol.inside[c]));

  Estimate est;
  est.traces = n;
  est.reach_truncation = std::pow(p.gamma, opt.horizon);
  double cmax = 0.0;
  for (const auto& rows : p.rows)
    for (const ProductRow& row : rows)
      for (double c : row.cost) cmax = std::max(cmax, c);
  est.cost_truncation = est.reach_truncation * cmax / (1.0 - p.gamma);

  // Welford accumulation; the textbook sum-of-squares shortcut loses all
  // significance when the spread is tiny next to the mean.
  double reach_mean = 0.0, reach_m2 = 0.0, cost_mean = 0.0, cost_m2 = 0.0;
  std::map<int, int> last_visit;
  for (int i = 0; i < n; ++i) {
    Trace tr = run_one(p, rewards, pol, trace_seed(opt.seed, i), opt.horizon);
    double d = tr.reach_sample - reach_mean;
    reach_mean += d / (i + 1);
    reach_m2 += d * (tr.reach_sample - reach_mean);
    d = tr.discounted_cost - cost_mean;
    cost_mean += d / (i + 1);
    cost_m2 += d * (tr.discounted_cost - cost_mean);
    if (!tr.switch_time) continue;
    est.switched += 1;

    int T = static_cast<int>(tr.states.size()) - 1;
    int st = *tr.switch_time;
    last_visit.clear();
    for (int t = st; t <= T; ++t) {
      est.occupation[tr.states[t]] += 1;
      last_visit[tr.states[t]] = t;
    }
    if (T - st < kSuffixWindow) continue;
    est.qualified += 1;

    int comp = pol.component_of.at(tr.states[st]);
    const ChainClasses& cc = classes[comp];
    auto visited_recently = [&](int v) {
      auto it = last_visit.find(v);
      return it != last_visit.end() && it->second >= T - kSuffixWindow;
    };
    auto cls = cc.class_of.find(tr.states[T]);
    if (cls != cc.class_of.end() && cc.bottom[cls->second]) {
      bool all = true;
      for (int v : cc.members[cls->second]) all = all && visited_recently(v);
      if (all) est.recurrent_covered += 1;
    }
    bool whole = true;
    for (const auto& [v, cid] : cc.class_of) {
      (void)cid;
      whole = whole && visited_recently(v);
    }
    if (whole) est.component_covered += 1;
  }

  est.reach_mean = reach_mean;
  est.cost_mean = cost_mean;
  if (n > 1) {
    est.reach_se = std::sqrt(reach_m2 / (n - 1) / n);
    est.cost_se = std::sqrt(cost_m2 / (n - 1) / n);
  }
  return est;
}

}  // namespace handoff
