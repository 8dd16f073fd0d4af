#include "coding_tree.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace brd {

bool mode_allowed(const ClassTemplate& tmpl, TreeMode mode, std::string* why) {
  if (mode == TreeMode::S) {
    if (tmpl.kind() == TemplateKind::LinearOrderDense && tmpl.sig().unary_count() >= 2) {
      if (why)
        *why = "template '" + tmpl.name() +
               "' mixes non-trivial unaries with a linear order; the unary-colored tree (mode U) is required";
      return false;
    }
    return true;
  }
  if (tmpl.kind() == TemplateKind::KPartite) {
    if (why)
      *why = "template '" + tmpl.name() +
             "' decides admissibility by the candidate's part; use mode S";
    return false;
  }
  return true;
}

TreeMode default_mode(const ClassTemplate& tmpl) {
  if (tmpl.kind() == TemplateKind::LinearOrderDense && tmpl.sig().unary_count() >= 2)
    return TreeMode::U;
  return TreeMode::S;
}

CodingTree CodingTree::build(const ClassTemplate& tmpl, TreeMode mode, int depth,
                             ScheduleKind sched) {
  if (depth < 1) throw std::invalid_argument("build_tree: depth must be >= 1");
  std::string why;
  if (!mode_allowed(tmpl, mode, &why)) throw std::invalid_argument("build_tree: " + why);

  CodingTree tree(tmpl, mode, sched);
  bool reduct = (mode == TreeMode::U);

  struct Pending {
    NodeId node;
    int color;
    int ledger_slot;
  };
  std::deque<Pending> queue;

  auto push_level_demands = [&](int level) {
    const Level& lv = tree.levels_[static_cast<size_t>(level)];
    for (int i = 0; i < lv.count(); ++i) {
      if (reduct) {
        for (int c = 0; c < tmpl.sig().unary_count(); ++c) {
          tree.ledger_.push_back({NodeId{level, i}, c, level, -1});
          queue.push_back({NodeId{level, i}, c, static_cast<int>(tree.ledger_.size()) - 1});
        }
      } else {
        tree.ledger_.push_back({NodeId{level, i}, -1, level, -1});
        queue.push_back({NodeId{level, i}, -1, static_cast<int>(tree.ledger_.size()) - 1});
      }
    }
  };

  auto make_level = [&](int level) {
    // level nodes are the admissible types over the structure built so far;
    // children of lex-sorted parents emitted in fragment order stay lex-sorted
    Level lv;
    if (level == 0) {
      auto roots = tmpl.one_types_over(tree.built_.restrict_to_prefix(0), reduct);
      for (const auto& r : roots) {
        lv.unary.push_back(r.unary);
        lv.parent.push_back(-1);
      }
    } else {
      const Level& prev = tree.levels_[static_cast<size_t>(level - 1)];
      FiniteStructure base = tree.built_.restrict_to_prefix(level);
      for (int p = 0; p < prev.count(); ++p) {
        std::vector<Fragment> prefix(prev.frags.begin() + static_cast<long>(p) * (level - 1),
                                     prev.frags.begin() + static_cast<long>(p + 1) * (level - 1));
        auto opts = tmpl.admissible_fragments(base, level - 1, prev.unary[static_cast<size_t>(p)], prefix);
        for (Fragment f : opts) {
          lv.unary.push_back(prev.unary[static_cast<size_t>(p)]);
          lv.parent.push_back(p);
          lv.frags.insert(lv.frags.end(), prefix.begin(), prefix.end());
          lv.frags.push_back(f);
        }
      }
    }
    tree.levels_.push_back(std::move(lv));
  };

  make_level(0);
  push_level_demands(0);

  for (int m = 0; m < depth; ++m) {
    // oldest satisfiable demand wins; scan its extensions at level m
    int chosen = -1, chosen_color = -1;
    size_t qpos = 0;
    for (; qpos < queue.size(); ++qpos) {
      const Pending& d = queue[qpos];
      const Level& lv = tree.levels_[static_cast<size_t>(m)];
      int found = -1;
      for (int i = 0; i < lv.count(); ++i) {
        if (tree.ancestor(NodeId{m, i}, d.node.level) == d.node) {
          found = i;
          if (sched == ScheduleKind::LexMin) break;
        }
      }
      if (found >= 0) {
        chosen = found;
        chosen_color = d.color;
        break;
      }
    }
    if (chosen < 0)
      throw std::runtime_error("build_tree: no satisfiable demand at level " + std::to_string(m));

    int color = chosen_color >= 0 ? chosen_color
                                  : tree.levels_[static_cast<size_t>(m)].unary[static_cast<size_t>(chosen)];
    tree.coding_.push_back({chosen, color});

    // retire every demand this coding node satisfies
    NodeId cn{m, chosen};
    for (auto it = queue.begin(); it != queue.end();) {
      bool color_ok = it->color < 0 || it->color == color;
      if (color_ok && tree.ancestor(cn, it->node.level) == it->node) {
        tree.ledger_[static_cast<size_t>(it->ledger_slot)].satisfied_at = m;
        it = queue.erase(it);
      } else {
        ++it;
      }
    }

    OneType t = tree.node_type(cn);
    tree.built_ = tmpl.realize(tree.built_, t, color);
    make_level(m + 1);
    push_level_demands(m + 1);
  }

  tree.depth_ = depth;
  return tree;
}

int CodingTree::level_size(int level) const {
  return levels_[static_cast<size_t>(level)].count();
}

int CodingTree::node_unary(NodeId n) const {
  return levels_[static_cast<size_t>(n.level)].unary[static_cast<size_t>(n.index)];
}

int CodingTree::node_parent(NodeId n) const {
  return levels_[static_cast<size_t>(n.level)].parent[static_cast<size_t>(n.index)];
}

Fragment CodingTree::node_fragment(NodeId n, int i) const {
  return levels_[static_cast<size_t>(n.level)]
      .frags[static_cast<size_t>(n.index) * static_cast<size_t>(n.level) + static_cast<size_t>(i)];
}

std::vector<Fragment> CodingTree::node_fragments(NodeId n) const {
  const Level& lv = levels_[static_cast<size_t>(n.level)];
  auto begin = lv.frags.begin() + static_cast<long>(n.index) * n.level;
  return std::vector<Fragment>(begin, begin + n.level);
}

OneType CodingTree::node_type(NodeId n) const { return OneType{node_unary(n), node_fragments(n)}; }

NodeId CodingTree::coding_node(int n) const {
  return NodeId{n, coding_[static_cast<size_t>(n)].index};
}

int CodingTree::coding_color(int n) const { return coding_[static_cast<size_t>(n)].color; }

bool CodingTree::is_coding(NodeId n) const {
  return n.level < static_cast<int>(coding_.size()) &&
         coding_[static_cast<size_t>(n.level)].index == n.index;
}

NodeId CodingTree::ancestor(NodeId n, int level) const {
  while (n.level > level) n = NodeId{n.level - 1, node_parent(n)};
  return n;
}

bool CodingTree::is_prefix(NodeId shorter, NodeId longer) const {
  return shorter.level <= longer.level && ancestor(longer, shorter.level) == shorter;
}

Fragment CodingTree::passing_type(NodeId t, int m) const {
  if (m < 0 || m >= t.level)
    throw std::out_of_range("passing_type: coding index must be below the node's level");
  return node_fragment(t, m);
}

bool CodingTree::passing_similar(NodeId s, int m, NodeId t, int n) const {
  return passing_type(s, m) == passing_type(t, n);
}

int CodingTree::lex_compare(NodeId s, NodeId t) const {
  if (s == t) return 0;
  int lvl = std::min(s.level, t.level);
  NodeId sa = ancestor(s, lvl), ta = ancestor(t, lvl);
  if (sa == ta) return s.level < t.level ? -1 : 1;  // proper initial segment first
  // levels are stored lex-sorted, so index order decides
  return sa.index < ta.index ? -1 : 1;
}

std::optional<NodeId> CodingTree::meet(NodeId s, NodeId t) const {
  int lvl = std::min(s.level, t.level);
  NodeId sa = ancestor(s, lvl), ta = ancestor(t, lvl);
  while (lvl > 0 && sa != ta) {
    sa = NodeId{lvl - 1, node_parent(sa)};
    ta = NodeId{lvl - 1, node_parent(ta)};
    --lvl;
  }
  if (sa != ta) return std::nullopt;  // distinct roots never meet
  return sa;
}

std::string CodingTree::to_dot() const {
  std::ostringstream os;
  os << "digraph coding_tree {\n  rankdir=BT;\n  node [shape=ellipse, fontsize=10];\n";
  for (int lvl = 0; lvl <= depth_; ++lvl) {
    for (int i = 0; i < level_size(lvl); ++i) {
      NodeId n{lvl, i};
      os << "  n" << lvl << "_" << i << " [label=\"" << lvl << ":";
      if (node_unary(n) >= 0) os << tmpl_.sig().unary_name(node_unary(n));
      for (int j = 0; j < lvl; ++j) os << "|" << tmpl_.sig().fragment_to_string(node_fragment(n, j));
      os << "\"";
      if (is_coding(n)) {
        os << ", peripheries=2";
        if (mode_ == TreeMode::U)
          os << ", xlabel=\"" << tmpl_.sig().unary_name(coding_color(lvl)) << "\"";
      }
      os << "];\n";
      if (lvl > 0) os << "  n" << (lvl - 1) << "_" << node_parent(n) << " -> n" << lvl << "_" << i << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string CodingTree::to_json() const {
  std::ostringstream os;
  os << "{\"format_version\":1,\"template\":\"" << tmpl_.name() << "\",\"mode\":\""
     << (mode_ == TreeMode::S ? "S" : "U") << "\",\"depth\":" << depth_ << ",\"levels\":[";
  for (int lvl = 0; lvl <= depth_; ++lvl) {
    if (lvl) os << ",";
    os << "[";
    for (int i = 0; i < level_size(lvl); ++i) {
      if (i) os << ",";
      NodeId n{lvl, i};
      os << "{\"parent\":" << node_parent(n);
      if (node_unary(n) >= 0) os << ",\"unary\":\"" << tmpl_.sig().unary_name(node_unary(n)) << "\"";
      os << ",\"frags\":[";
      for (int j = 0; j < lvl; ++j) {
        if (j) os << ",";
        os << "\"" << tmpl_.sig().fragment_to_string(node_fragment(n, j)) << "\"";
      }
      os << "]}";
    }
    os << "]";
  }
  os << "],\"coding\":[";
  for (int n = 0; n < static_cast<int>(coding_.size()); ++n) {
    if (n) os << ",";
    os << "{\"index\":" << coding_[static_cast<size_t>(n)].index << ",\"color\":\""
       << tmpl_.sig().unary_name(coding_[static_cast<size_t>(n)].color) << "\"}";
  }
  os << "]}";
  return os.str();
}

}  // namespace brd
