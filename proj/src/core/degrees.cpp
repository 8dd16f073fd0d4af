#include "degrees.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace brd {

namespace {

// incremental structure match: vertices chosen so far agree with the target
bool prefix_matches(const FiniteStructure& target, const FiniteStructure& host,
                    const std::vector<int>& verts, int next) {
  int i = static_cast<int>(verts.size());
  int tu = target.unary_of(i);
  int hu = host.unary_of(next);
  if (tu != hu) return false;
  for (int b = 0; b < target.sig().binary_count(); ++b) {
    for (int j = 0; j < i; ++j) {
      if (target.related(b, j, i) != host.related(b, verts[static_cast<size_t>(j)], next)) return false;
      if (target.related(b, i, j) != host.related(b, next, verts[static_cast<size_t>(j)])) return false;
    }
  }
  return true;
}

}  // namespace

Subtree antichain_closure(const CodingTree& host, const std::vector<int>& coding_levels) {
  std::vector<NodeId> members;
  for (int m : coding_levels) members.push_back(host.coding_node(m));
  return Subtree::closure(host, members);
}

std::vector<std::vector<int>> enumerate_antichains(const FiniteStructure& target,
                                                   const CodingTree& host, int depth) {
  if (depth > host.depth())
    throw std::invalid_argument("enumerate_antichains: depth exceeds the host truncation");
  int k = target.size();
  if (k < 1) throw std::invalid_argument("enumerate_antichains: empty target");
  std::vector<std::vector<int>> out;
  std::vector<int> chosen;

  std::function<void(int)> rec = [&](int from) {
    if (static_cast<int>(chosen.size()) == k) {
      Subtree t = antichain_closure(host, chosen);
      std::string why;
      if (is_diagonal(t, &why)) out.push_back(chosen);
      return;
    }
    for (int m = from; m < depth; ++m) {
      if (!prefix_matches(target, host.built_structure(), chosen, m)) continue;
      bool comparable = false;
      NodeId cm = host.coding_node(m);
      for (int c : chosen)
        if (host.is_prefix(host.coding_node(c), cm)) { comparable = true; break; }
      if (comparable) continue;
      chosen.push_back(m);
      rec(m + 1);
      chosen.pop_back();
    }
  };
  rec(0);
  return out;
}

DegreeResult big_ramsey_degree(const FiniteStructure& target, const ClassTemplate& tmpl,
                               TreeMode mode, const std::vector<int>& depths,
                               ScheduleKind sched) {
  if (depths.empty()) throw std::invalid_argument("big_ramsey_degree: empty depth schedule");
  std::vector<int> sorted = depths;
  std::sort(sorted.begin(), sorted.end());

  DegreeResult res;
  res.target = target;
  CodingTree host = CodingTree::build(tmpl, mode, sorted.back(), sched);

  for (int d : sorted) {
    auto census = enumerate_antichains(target, host, d);
    std::set<std::string> codes;
    for (const auto& a : census)
      codes.insert(canonical_code(antichain_closure(host, a)).serialize());
    res.trace.push_back({d, static_cast<int>(codes.size())});
    if (d == sorted.back()) {
      res.census_size = static_cast<long>(census.size());
      res.codes = std::move(codes);
    }
  }
  res.degree = res.trace.back().second;
  res.stabilized = res.trace.size() >= 2 &&
                   res.trace[res.trace.size() - 1].second == res.trace[res.trace.size() - 2].second;
  std::ostringstream fp;
  fp << tmpl.name() << "|" << (mode == TreeMode::S ? "S" : "U") << "|"
     << (sched == ScheduleKind::LexMin ? "lexmin" : "lexmax") << "|";
  for (size_t i = 0; i < sorted.size(); ++i) fp << (i ? "," : "") << sorted[i];
  res.schedule_fingerprint = fp.str();
  return res;
}

AggregateDegree big_ramsey_degree_unlabeled(const FiniteStructure& target,
                                            const ClassTemplate& tmpl, TreeMode mode,
                                            const std::vector<int>& depths,
                                            ScheduleKind sched) {
  AggregateDegree agg;
  agg.stabilized = true;
  for (const auto& enumeration : enumeration_classes(target)) {
    DegreeResult r = big_ramsey_degree(enumeration, tmpl, mode, depths, sched);
    agg.total += r.degree;
    agg.stabilized = agg.stabilized && r.stabilized;
    agg.parts.push_back(std::move(r));
  }
  return agg;
}

RecoveryResult degree_recovery_demo(const FiniteStructure& target, const CodingTree& host,
                                    int depth, const std::vector<int>& pattern,
                                    const CopyColoring& coloring, int sub_size) {
  RecoveryResult res;
  std::string fixed_code = canonical_code(antichain_closure(host, pattern)).serialize();

  auto census = enumerate_antichains(target, host, depth);
  std::vector<std::vector<int>> fixed_copies;
  for (const auto& a : census)
    if (canonical_code(antichain_closure(host, a)).serialize() == fixed_code)
      fixed_copies.push_back(a);
  if (fixed_copies.empty()) {
    res.note = "no copy of the fixed similarity type within the truncation";
    return res;
  }

  // sub-antichain candidates: coding levels whose represented structure
  // repeats the host's own coding diagram prefix (the finite stand-in for a
  // subcopy of the limit)
  std::vector<int> levels;
  std::function<bool(int)> rec = [&](int from) -> bool {
    if (static_cast<int>(levels.size()) == sub_size) {
      int color = -2;
      long copies = 0;
      for (const auto& a : fixed_copies) {
        bool inside = true;
        for (int m : a)
          if (std::find(levels.begin(), levels.end(), m) == levels.end()) inside = false;
        if (!inside) continue;
        ++copies;
        int c = coloring(a);
        if (color == -2) color = c;
        if (c != color) return false;
      }
      if (copies == 0) return false;  // a vacuous witness shows nothing
      res.found = true;
      res.sub_dca = levels;
      res.color = color;
      res.copies_in_sub = copies;
      return true;
    }
    for (int m = from; m < depth; ++m) {
      // mirror the host's own diagram: vertex i of the sub-antichain relates
      // to the earlier ones the way host vertex i does
      int i = static_cast<int>(levels.size());
      bool ok = host.built_structure().unary_of(m) == host.built_structure().unary_of(i);
      for (int b = 0; ok && b < host.tmpl().sig().binary_count(); ++b) {
        for (int j = 0; ok && j < i; ++j) {
          if (host.built_structure().related(b, levels[static_cast<size_t>(j)], m) !=
              host.built_structure().related(b, j, i))
            ok = false;
          if (host.built_structure().related(b, m, levels[static_cast<size_t>(j)]) !=
              host.built_structure().related(b, i, j))
            ok = false;
        }
      }
      if (!ok) continue;
      NodeId cm = host.coding_node(m);
      bool comparable = false;
      for (int c : levels)
        if (host.is_prefix(host.coding_node(c), cm)) comparable = true;
      if (comparable) continue;
      levels.push_back(m);
      if (rec(m + 1)) return true;
      levels.pop_back();
    }
    return false;
  };
  if (!rec(0)) {
    if (!res.found)
      res.note = "truncation too shallow to exhibit a monochromatic sub-antichain with " +
                 std::to_string(sub_size) + " coding nodes";
  }
  return res;
}

}  // namespace brd
