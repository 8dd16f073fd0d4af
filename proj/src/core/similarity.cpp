#include "similarity.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace brd {

namespace {

int compare_descriptors(const Signature& sig, const SubtreeNode& a, const SubtreeNode& b) {
  if (a.unary != b.unary) return a.unary < b.unary ? -1 : 1;
  size_t n = std::min(a.frags.size(), b.frags.size());
  for (size_t i = 0; i < n; ++i) {
    int c = sig.compare_fragments(a.frags[i], b.frags[i]);
    if (c) return c;
  }
  if (a.frags.size() != b.frags.size()) return a.frags.size() < b.frags.size() ? -1 : 1;
  return 0;
}

}  // namespace

Subtree Subtree::from_nodes(Signature sig, std::vector<SubtreeNode> nodes) {
  if (nodes.empty()) throw std::invalid_argument("subtree: empty node set");
  Subtree s;
  s.sig_ = std::move(sig);
  std::sort(nodes.begin(), nodes.end(), [&](const SubtreeNode& a, const SubtreeNode& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    return compare_descriptors(s.sig_, a, b) < 0;
  });
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](const SubtreeNode& a, const SubtreeNode& b) {
                            return a.same_descriptor(b);
                          }),
              nodes.end());
  s.nodes_ = std::move(nodes);

  s.level_begin_.push_back(0);
  for (int i = 0; i < s.node_count(); ++i) {
    if (s.level_depths_.empty() || s.level_depths_.back() != s.nodes_[static_cast<size_t>(i)].depth) {
      if (!s.level_depths_.empty()) s.level_begin_.push_back(i);
      s.level_depths_.push_back(s.nodes_[static_cast<size_t>(i)].depth);
    }
    if (s.nodes_[static_cast<size_t>(i)].coding) s.coding_seq_.push_back(i);
  }
  s.level_begin_.push_back(s.node_count());

  // grading: every node's truncation to every lower present depth is a node
  for (int i = 0; i < s.node_count(); ++i) {
    for (int t = 0; t < s.level_count(); ++t) {
      int d = s.level_depth(t);
      if (d >= s.nodes_[static_cast<size_t>(i)].depth) break;
      if (s.ancestor_at(i, d) < 0)
        throw std::invalid_argument("subtree: missing initial segment at a level depth");
    }
  }
  std::string why;
  if (!s.is_meet_closed(&why)) throw std::invalid_argument("subtree: " + why);
  return s;
}

Subtree Subtree::closure(const CodingTree& host, const std::vector<NodeId>& members) {
  if (members.empty()) throw std::invalid_argument("tree_closure: empty input");
  std::vector<int> depths;
  for (const NodeId& m : members) depths.push_back(m.level);
  for (size_t i = 0; i < members.size(); ++i)
    for (size_t j = i + 1; j < members.size(); ++j)
      if (auto w = host.meet(members[i], members[j])) depths.push_back(w->level);
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());

  std::vector<SubtreeNode> nodes;
  auto add = [&](NodeId id, bool coding, int color) {
    SubtreeNode n;
    n.depth = id.level;
    n.unary = host.node_unary(id);
    n.frags = host.node_fragments(id);
    n.coding = coding;
    n.color = color;
    nodes.push_back(std::move(n));
  };
  for (const NodeId& m : members) {
    for (int d : depths) {
      if (d > m.level) break;
      NodeId a = host.ancestor(m, d);
      bool coding = (d == m.level) && host.is_coding(m);
      add(a, coding, coding ? host.coding_color(d) : -1);
    }
  }
  // duplicate descriptors collapse in from_nodes; keep coding flags sticky
  std::sort(nodes.begin(), nodes.end(), [&](const SubtreeNode& a, const SubtreeNode& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    int c = compare_descriptors(host.tmpl().sig(), a, b);
    if (c) return c < 0;
    return a.coding > b.coding;
  });
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](const SubtreeNode& a, const SubtreeNode& b) {
                            return a.same_descriptor(b);
                          }),
              nodes.end());
  return from_nodes(host.tmpl().sig(), std::move(nodes));
}

int Subtree::level_depth(int t) const { return level_depths_[static_cast<size_t>(t)]; }

int Subtree::lex_compare(int a, int b) const {
  // initial segments sort first; otherwise the first differing block decides
  return compare_descriptors(sig_, nodes_[static_cast<size_t>(a)], nodes_[static_cast<size_t>(b)]);
}

int Subtree::ancestor_at(int a, int d) const {
  const SubtreeNode& na = nodes_[static_cast<size_t>(a)];
  if (d > na.depth) return -1;
  if (d == na.depth) return a;
  for (int i = 0; i < node_count(); ++i) {
    const SubtreeNode& ni = nodes_[static_cast<size_t>(i)];
    if (ni.depth != d) continue;
    if (ni.unary != na.unary) continue;
    if (std::equal(ni.frags.begin(), ni.frags.end(), na.frags.begin())) return i;
  }
  return -1;
}

int Subtree::meet_prefix_len(int a, int b) const {
  const SubtreeNode& na = nodes_[static_cast<size_t>(a)];
  const SubtreeNode& nb = nodes_[static_cast<size_t>(b)];
  if (na.unary != nb.unary) return -1;
  int lim = std::min(na.depth, nb.depth);
  int d = 0;
  while (d < lim && na.frags[static_cast<size_t>(d)] == nb.frags[static_cast<size_t>(d)]) ++d;
  return d;
}

int Subtree::meet_node(int a, int b) const {
  int d = meet_prefix_len(a, b);
  if (d < 0) return -1;
  return ancestor_at(a, d);
}

bool Subtree::is_meet_closed(std::string* why) const {
  for (int a = 0; a < node_count(); ++a) {
    for (int b = a + 1; b < node_count(); ++b) {
      int d = meet_prefix_len(a, b);
      if (d < 0) continue;  // different roots
      if (d == nodes_[static_cast<size_t>(a)].depth || d == nodes_[static_cast<size_t>(b)].depth)
        continue;  // comparable pair, meet is the shorter node
      if (ancestor_at(a, d) < 0) {
        if (why)
          *why = "meet of nodes " + std::to_string(a) + "," + std::to_string(b) +
                 " (depth " + std::to_string(d) + ") is missing";
        return false;
      }
    }
  }
  return true;
}

std::string Subtree::to_dot() const {
  std::ostringstream os;
  os << "digraph subtree {\n  rankdir=BT;\n  node [shape=ellipse, fontsize=10];\n";
  for (int i = 0; i < node_count(); ++i) {
    const SubtreeNode& n = nodes_[static_cast<size_t>(i)];
    os << "  n" << i << " [label=\"" << n.depth << ":";
    if (n.unary >= 0) os << sig_.unary_name(n.unary);
    for (Fragment f : n.frags) os << "|" << sig_.fragment_to_string(f);
    os << "\"";
    if (n.coding) {
      os << ", peripheries=2";
      if (n.color >= 0) os << ", xlabel=\"" << sig_.unary_name(n.color) << "\"";
    }
    os << "];\n";
  }
  for (int t = 1; t < level_count(); ++t) {
    for (int i = level_begin(t); i < level_end(t); ++i) {
      int p = ancestor_at(i, level_depth(t - 1));
      if (p >= 0) os << "  n" << p << " -> n" << i << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

bool SimilarityCode::LevelEvent::operator==(const LevelEvent& o) const {
  return count == o.count && parent_rank == o.parent_rank && codings == o.codings &&
         prev_codings == o.prev_codings && passing == o.passing;
}

bool SimilarityCode::operator<(const SimilarityCode& o) const {
  return serialize() < o.serialize();
}

std::string SimilarityCode::serialize() const {
  std::ostringstream os;
  for (size_t t = 0; t < events_.size(); ++t) {
    const LevelEvent& e = events_[t];
    if (t) os << ";";
    os << "L" << t << "{n=" << e.count << ";par=";
    for (size_t i = 0; i < e.parent_rank.size(); ++i) {
      if (i) os << ",";
      os << e.parent_rank[i];
    }
    os << ";cod=";
    for (size_t i = 0; i < e.codings.size(); ++i) {
      if (i) os << ",";
      os << e.codings[i].first << ":" << e.codings[i].second;
    }
    os << ";pass=";
    for (size_t i = 0; i < e.passing.size(); ++i) {
      if (i) os << ",";
      os << e.passing[i];
    }
    os << "}";
  }
  return os.str();
}

SimilarityCode canonical_code(const Subtree& s) {
  SimilarityCode code;
  std::vector<int> prev_nodes;  // node indices at the previous level, lex order
  for (int t = 0; t < s.level_count(); ++t) {
    SimilarityCode::LevelEvent e;
    e.count = s.level_size(t);
    std::vector<int> cur;
    for (int i = s.level_begin(t); i < s.level_end(t); ++i) cur.push_back(i);

    for (int rank = 0; rank < e.count; ++rank) {
      int i = cur[static_cast<size_t>(rank)];
      if (t == 0) {
        e.parent_rank.push_back(-1);
      } else {
        int anc = s.ancestor_at(i, s.level_depth(t - 1));
        int prank = -1;
        for (size_t p = 0; p < prev_nodes.size(); ++p)
          if (prev_nodes[p] == anc) prank = static_cast<int>(p);
        e.parent_rank.push_back(prank);
      }
      if (s.node(i).coding) e.codings.push_back({rank, s.node(i).color >= 0 ? s.node(i).color : s.node(i).unary});
    }

    if (t > 0) {
      std::vector<int> prev_coding_depths;
      for (int p : prev_nodes)
        if (s.node(p).coding) prev_coding_depths.push_back(s.node(p).depth);
      e.prev_codings = static_cast<int>(prev_coding_depths.size());
      for (int rank = 0; rank < e.count; ++rank) {
        int i = cur[static_cast<size_t>(rank)];
        for (int d : prev_coding_depths)
          e.passing.push_back(s.node(i).frags[static_cast<size_t>(d)]);
      }
    }

    code.events().push_back(std::move(e));
    prev_nodes = std::move(cur);
  }
  return code;
}

bool is_similarity_map(const SimilarityMap& f, const Subtree& s, const Subtree& t,
                       std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (static_cast<int>(f.size()) != s.node_count()) return fail("map is not total on the domain");
  if (s.node_count() != t.node_count()) return fail("node counts differ");
  std::vector<char> hit(static_cast<size_t>(t.node_count()), 0);
  for (int i = 0; i < s.node_count(); ++i) {
    if (f[static_cast<size_t>(i)] < 0 || f[static_cast<size_t>(i)] >= t.node_count())
      return fail("map image out of range");
    if (hit[static_cast<size_t>(f[static_cast<size_t>(i)])]) return fail("map is not injective");
    hit[static_cast<size_t>(f[static_cast<size_t>(i)])] = 1;
  }

  for (int a = 0; a < s.node_count(); ++a) {
    for (int b = 0; b < s.node_count(); ++b) {
      if (a == b) continue;
      int fa = f[static_cast<size_t>(a)], fb = f[static_cast<size_t>(b)];
      // (1) lexicographic order
      if ((s.lex_compare(a, b) < 0) != (t.lex_compare(fa, fb) < 0))
        return fail("order not preserved");
      // (3) relative lengths
      if ((s.node(a).depth < s.node(b).depth) != (t.node(fa).depth < t.node(fb).depth))
        return fail("relative lengths not preserved");
      // (4) initial segments
      bool sub_s = s.node(a).depth <= s.node(b).depth &&
                   s.meet_prefix_len(a, b) == s.node(a).depth;
      bool sub_t = t.node(fa).depth <= t.node(fb).depth &&
                   t.meet_prefix_len(fa, fb) == t.node(fa).depth;
      if (sub_s != sub_t) return fail("initial segments not preserved");
      // (2) meets
      if (a < b) {
        int ms = s.meet_node(a, b);
        int mt = t.meet_node(fa, fb);
        if ((ms < 0) != (mt < 0)) return fail("meet existence not preserved");
        if (ms >= 0 && f[static_cast<size_t>(ms)] != mt) return fail("meets not preserved");
      }
    }
  }

  // (5) coding nodes with parameter-free data, by coding index
  const auto& cs = s.coding_seq();
  const auto& ct = t.coding_seq();
  if (cs.size() != ct.size()) return fail("coding node counts differ");
  for (size_t i = 0; i < cs.size(); ++i) {
    if (f[static_cast<size_t>(cs[i])] != ct[i]) return fail("coding nodes not aligned by index");
    const SubtreeNode& a = s.node(cs[i]);
    const SubtreeNode& b = t.node(ct[i]);
    int ua = a.color >= 0 ? a.color : a.unary;
    int ub = b.color >= 0 ? b.color : b.unary;
    if (ua != ub) return fail("coding-node unary data differ");
  }
  for (int i = 0; i < s.node_count(); ++i)
    if (s.node(i).coding != t.node(f[static_cast<size_t>(i)]).coding)
      return fail("coding designation not preserved");

  // (6) relative passing types
  for (size_t ci = 0; ci < cs.size(); ++ci) {
    int ds = s.node(cs[ci]).depth;
    int dt = t.node(ct[ci]).depth;
    for (int a = 0; a < s.node_count(); ++a) {
      if (s.node(a).depth <= ds) continue;
      Fragment ps = s.node(a).frags[static_cast<size_t>(ds)];
      Fragment pt = t.node(f[static_cast<size_t>(a)]).frags[static_cast<size_t>(dt)];
      if (ps != pt) return fail("relative passing types not preserved");
    }
  }
  return true;
}

std::optional<SimilarityMap> find_similarity(const Subtree& s, const Subtree& t) {
  if (s.level_count() != t.level_count()) return std::nullopt;
  for (int lv = 0; lv < s.level_count(); ++lv)
    if (s.level_size(lv) != t.level_size(lv)) return std::nullopt;
  // order preservation forces rank alignment per level
  SimilarityMap f(static_cast<size_t>(s.node_count()), -1);
  for (int lv = 0; lv < s.level_count(); ++lv)
    for (int k = 0; k < s.level_size(lv); ++k)
      f[static_cast<size_t>(s.level_begin(lv) + k)] = t.level_begin(lv) + k;
  if (is_similarity_map(f, s, t)) return f;
  return std::nullopt;
}

FiniteStructure represented_structure(const Subtree& s, const Signature& sig) {
  const auto& cs = s.coding_seq();
  if (cs.empty()) throw std::invalid_argument("represented_structure: no coding nodes");
  FiniteStructure out(sig);
  for (size_t i = 0; i < cs.size(); ++i) {
    const SubtreeNode& c = s.node(cs[i]);
    int unary = c.color >= 0 ? c.color : c.unary;
    if (unary < 0) throw std::invalid_argument("represented_structure: coding node lacks unary data");
    out.add_vertex(unary);
    for (size_t j = 0; j < i; ++j) {
      int dj = s.node(cs[j]).depth;
      out.apply_fragment(static_cast<int>(j), static_cast<int>(i),
                         c.frags[static_cast<size_t>(dj)]);
    }
  }
  return out;
}

}  // namespace brd
