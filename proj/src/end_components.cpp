#include "handoff/end_components.hpp"

#include <algorithm>

namespace handoff {

namespace {

// Iterative Tarjan over the candidate sub-MDP. Returns per-state component
// ids (dense, deterministic for a fixed input) for states in `alive`;
// -1 elsewhere.
std::vector<int> scc_ids(const ProductMdp& p, const std::vector<char>& alive,
                         const std::vector<std::vector<char>>& row_ok, int& count) {
  const int n = static_cast<int>(p.num_states());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  int next = 0;
  count = 0;

  struct Frame {
    int v;
    size_t row = 0;
    size_t succ = 0;
  };

  for (int root = 0; root < n; ++root) {
    if (!alive[root] || index[root] != -1) continue;
    std::vector<Frame> call;
    call.push_back({root});
    while (!call.empty()) {
      Frame& f = call.back();
      int v = f.v;
      if (f.row == 0 && f.succ == 0 && index[v] == -1) {
        index[v] = low[v] = next++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      bool descended = false;
      while (f.row < p.rows[v].size()) {
        if (!row_ok[v][f.row]) {
          ++f.row;
          f.succ = 0;
          continue;
        }
        const auto& succs = p.rows[v][f.row].succ;
        while (f.succ < succs.size()) {
          int w = succs[f.succ++];
          if (!alive[w]) continue;
          if (index[w] == -1) {
            call.push_back({w});
            descended = true;
            break;
          }
          if (on_stack[w]) low[v] = std::min(low[v], index[w]);
        }
        if (descended) break;
        ++f.row;
        f.succ = 0;
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        int id = count++;
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = id;
          if (w == v) break;
        }
      }
      call.pop_back();
      if (!call.empty()) {
        int parent = call.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return comp;
}

// Shared fixpoint: restricted to `alive` states, prune rows whose support
// leaves the containing SCC, drop states without rows, repeat until stable.
std::vector<EndComponent> mec_fixpoint(const ProductMdp& p, std::vector<char> alive) {
  const int n = static_cast<int>(p.num_states());
  std::vector<std::vector<char>> row_ok(n);
  for (int v = 0; v < n; ++v) row_ok[v].assign(p.rows[v].size(), 1);

  // A row is usable only while its entire support is alive.
  auto prune_dead_support = [&]() {
    for (int v = 0; v < n; ++v) {
      if (!alive[v]) continue;
      for (size_t k = 0; k < p.rows[v].size(); ++k) {
        if (!row_ok[v][k]) continue;
        for (int w : p.rows[v][k].succ)
          if (!alive[w]) {
            row_ok[v][k] = 0;
            break;
          }
      }
    }
  };
  prune_dead_support();

  std::vector<int> comp;
  int comp_count = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    comp = scc_ids(p, alive, row_ok, comp_count);
    for (int v = 0; v < n; ++v) {
      if (!alive[v]) continue;
      bool any = false;
      for (size_t k = 0; k < p.rows[v].size(); ++k) {
        if (!row_ok[v][k]) continue;
        bool stays = true;
        for (int w : p.rows[v][k].succ)
          if (!alive[w] || comp[w] != comp[v]) {
            stays = false;
            break;
          }
        if (!stays) {
          row_ok[v][k] = 0;
          changed = true;
        } else {
          any = true;
        }
      }
      if (!any) {
        alive[v] = 0;
        changed = true;
      }
    }
    if (changed) prune_dead_support();
  }

  std::map<int, EndComponent> by_comp;
  for (int v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    auto& ec = by_comp[comp[v]];
    ec.states.push_back(v);
    auto& acts = ec.staying[v];
    for (size_t k = 0; k < p.rows[v].size(); ++k)
      if (row_ok[v][k]) acts.push_back(p.rows[v][k].action);
    std::sort(acts.begin(), acts.end());
  }

  std::vector<EndComponent> out;
  for (auto& [id, ec] : by_comp) {
    (void)id;
    std::sort(ec.states.begin(), ec.states.end());
    out.push_back(std::move(ec));
  }
  std::sort(out.begin(), out.end(),
            [](const EndComponent& a, const EndComponent& b) {
              return a.states.front() < b.states.front();
            });
  return out;
}

}  // namespace

std::vector<EndComponent> maximal_end_components(const ProductMdp& p) {
  std::vector<char> alive(p.num_states(), 1);
  return mec_fixpoint(p, std::move(alive));
}

std::vector<EndComponent> accepting_end_components(const ProductMdp& p) {
  std::map<std::vector<int>, EndComponent> merged;  // keyed by state set
  for (const auto& pair : p.acceptance) {
    std::vector<char> alive(p.num_states(), 1);
    for (int v : pair.avoid_states) alive[v] = 0;
    std::set<int> repeat(pair.repeat_states.begin(), pair.repeat_states.end());
    for (auto& mec : mec_fixpoint(p, std::move(alive))) {
      bool hits = std::any_of(mec.states.begin(), mec.states.end(),
                              [&](int v) { return repeat.count(v) > 0; });
      if (!hits) continue;
      auto it = merged.find(mec.states);
      if (it == merged.end()) {
        merged.emplace(mec.states, std::move(mec));
      } else {
        // Same state set found under another pair: union the staying actions.
        for (auto& [v, acts] : mec.staying) {
          auto& dst = it->second.staying[v];
          std::vector<int> u;
          std::set_union(dst.begin(), dst.end(), acts.begin(), acts.end(),
                         std::back_inserter(u));
          dst = std::move(u);
        }
      }
    }
  }
  std::vector<EndComponent> out;
  for (auto& [key, ec] : merged) {
    (void)key;
    out.push_back(std::move(ec));
  }
  std::sort(out.begin(), out.end(),
            [](const EndComponent& a, const EndComponent& b) {
              return a.states.front() < b.states.front();
            });
  return out;
}

std::vector<int> accepting_states_union(const std::vector<EndComponent>& aecs) {
  std::set<int> u;
  for (const auto& ec : aecs) u.insert(ec.states.begin(), ec.states.end());
  return {u.begin(), u.end()};
}

}  // namespace handoff
