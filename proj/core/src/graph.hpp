#pragma once

#include <algorithm>
#include <vector>

namespace opal::detail {

// Iterative Tarjan. succ(v) must return something iterable over ints.
// Returns the component id of each vertex; ids are in reverse topological order.
template <class Succ>
std::vector<int> scc_ids(int n, Succ&& succ, int& count) {
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<bool> on(n, false);
  int next = 0;
  count = 0;
  struct Frame {
    int v;
    std::vector<int> out;
    std::size_t i;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<Frame> call;
    auto enter = [&](int v) {
      index[v] = low[v] = next++;
      stack.push_back(v);
      on[v] = true;
      const auto& s = succ(v);
      call.push_back({v, std::vector<int>(s.begin(), s.end()), 0});
    };
    enter(root);
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.i < f.out.size()) {
        int w = f.out[f.i++];
        if (index[w] < 0) {
          enter(w);
        } else if (on[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      int v = f.v;
      if (low[v] == index[v]) {
        for (;;) {
          int w = stack.back();
          stack.pop_back();
          on[w] = false;
          comp[w] = count;
          if (w == v) break;
        }
        ++count;
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }
  return comp;
}

}  // namespace opal::detail
