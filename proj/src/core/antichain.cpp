#include "antichain.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace brd {

namespace {

int compare_frag_vectors(const Signature& sig, int ua, const std::vector<Fragment>& a, int ub,
                         const std::vector<Fragment>& b) {
  if (ua != ub) return ua < ub ? -1 : 1;
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    int c = sig.compare_fragments(a[i], b[i]);
    if (c) return c;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

}  // namespace

bool is_diagonal(const Subtree& t, std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  for (int lv = 0; lv + 1 < t.level_count(); ++lv) {
    std::map<int, int> child_count;  // node index -> successors at next level
    for (int i = t.level_begin(lv + 1); i < t.level_end(lv + 1); ++i) {
      int p = t.ancestor_at(i, t.level_depth(lv));
      if (p >= 0) ++child_count[p];
    }
    int splitters = 0;
    bool coding_level = false;
    for (int i = t.level_begin(lv); i < t.level_end(lv); ++i)
      if (t.node(i).coding) coding_level = true;
    for (auto& [node, cnt] : child_count) {
      if (cnt >= 2) {
        ++splitters;
        if (cnt > 2)
          return fail("splitting node at level depth " + std::to_string(t.level_depth(lv)) +
                      " has degree " + std::to_string(cnt));
      }
    }
    if (splitters > 1)
      return fail("level depth " + std::to_string(t.level_depth(lv)) + " has " +
                  std::to_string(splitters) + " splitting nodes");
    if (splitters > 0 && coding_level)
      return fail("coding level depth " + std::to_string(t.level_depth(lv)) +
                  " contains a splitting node");
  }
  return true;
}

Subtree closure_from_descriptors(const Signature& sig, std::vector<SubtreeNode> nodes) {
  if (nodes.empty()) throw std::invalid_argument("closure: empty node set");
  std::vector<int> depths;
  for (const auto& n : nodes) depths.push_back(n.depth);
  for (size_t i = 0; i < nodes.size(); ++i) {
    for (size_t j = i + 1; j < nodes.size(); ++j) {
      if (nodes[i].unary != nodes[j].unary) continue;
      size_t lim = std::min(nodes[i].frags.size(), nodes[j].frags.size());
      size_t d = 0;
      while (d < lim && nodes[i].frags[d] == nodes[j].frags[d]) ++d;
      depths.push_back(static_cast<int>(d));
    }
  }
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());

  std::vector<SubtreeNode> full;
  for (const auto& n : nodes) {
    for (int d : depths) {
      if (d > n.depth) break;
      SubtreeNode p;
      p.depth = d;
      p.unary = n.unary;
      p.frags.assign(n.frags.begin(), n.frags.begin() + d);
      p.coding = (d == n.depth) && n.coding;
      p.color = p.coding ? n.color : -1;
      full.push_back(std::move(p));
    }
  }
  std::sort(full.begin(), full.end(), [&](const SubtreeNode& a, const SubtreeNode& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    int c = compare_frag_vectors(sig, a.unary, a.frags, b.unary, b.frags);
    if (c) return c < 0;
    return a.coding > b.coding;
  });
  full.erase(std::unique(full.begin(), full.end(),
                         [](const SubtreeNode& a, const SubtreeNode& b) {
                           return a.same_descriptor(b);
                         }),
             full.end());
  return Subtree::from_nodes(sig, std::move(full));
}

std::vector<Fragment> GoodDca::coding_frags(int n) const {
  int m = coding_vertex(n);
  std::vector<Fragment> out;
  out.reserve(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) out.push_back(host_.fragment_of(i, m));
  return out;
}

FiniteStructure GoodDca::represented() const { return host_.restrict_to(raw_.coding_vertex); }

FiniteStructure GoodDca::represented_prefix(int n) const {
  std::vector<int> verts(raw_.coding_vertex.begin(), raw_.coding_vertex.begin() + n);
  return host_.restrict_to(verts);
}

GoodDca GoodDca::build(const ClassTemplate& tmpl, TreeMode mode, int n_coding, int depth_cap) {
  return build_seeded(tmpl, mode, {}, n_coding, depth_cap);
}

GoodDca GoodDca::build_seeded(const ClassTemplate& tmpl, TreeMode mode,
                              const std::vector<SeedStage>& seed, int n_coding, int depth_cap) {
  if (n_coding < 1) throw std::invalid_argument("build_good_dca: need at least one coding node");
  if (static_cast<int>(seed.size()) > n_coding)
    throw std::invalid_argument("build_good_dca: seed longer than the requested antichain");
  std::string why;
  if (!mode_allowed(tmpl, mode, &why)) throw std::invalid_argument("build_good_dca: " + why);
  bool reduct = (mode == TreeMode::U);

  GoodDca M(tmpl, mode);
  FiniteStructure& host = M.host_;
  FiniteStructure rep(tmpl.sig());

  struct B {
    int unary = -1;
    std::vector<Fragment> frags;
    Fragment assigned = 0;
  };
  std::vector<B> branches;
  for (const auto& r : tmpl.one_types_over(rep, reduct)) branches.push_back({r.unary, {}, 0});

  struct Dem {
    int over;
    OneType type;
    int color;
    int slot;
  };
  std::deque<Dem> dq;
  auto enqueue_types = [&](int over) {
    FiniteStructure base = rep.restrict_to_prefix(over);
    for (const auto& t : tmpl.one_types_over(base, reduct)) {
      if (reduct) {
        for (int c = 0; c < tmpl.sig().unary_count(); ++c) {
          M.demands_.push_back({over, t, c, -1});
          dq.push_back({over, t, c, static_cast<int>(M.demands_.size()) - 1});
        }
      } else {
        M.demands_.push_back({over, t, -1, -1});
        dq.push_back({over, t, -1, static_cast<int>(M.demands_.size()) - 1});
      }
    }
  };
  enqueue_types(0);

  auto type_over_rep = [&](const B& b, int j) {
    OneType t;
    t.unary = b.unary;
    for (int i = 0; i < j; ++i)
      t.frags.push_back(b.frags[static_cast<size_t>(M.raw_.coding_vertex[static_cast<size_t>(i)])]);
    return t;
  };

  // Adds a host vertex realizing `vtype` (a full type over the current host)
  // with the given unary; every branch then takes one fragment at the new
  // vertex.  split_branch >= 0 marks the branch that splits here: it is
  // replaced by two children taking the two least admissible fragments.
  // assigned=true makes branches take their assigned completion instead of
  // the least admissible fragment (the coding/passing level).
  auto advance = [&](const std::vector<Fragment>& vfrags, int vunary, int split_branch,
                     bool use_assigned) -> std::pair<Fragment, Fragment> {
    int lvl = host.size();
    host = tmpl.realize(host, OneType{-1, vfrags}, vunary);
    std::pair<Fragment, Fragment> split_frags{0, 0};
    std::vector<B> next;
    next.reserve(branches.size() + 1);
    for (size_t bi = 0; bi < branches.size(); ++bi) {
      B& b = branches[bi];
      auto opts = tmpl.admissible_fragments(host, lvl, b.unary, b.frags);
      if (opts.empty())
        throw std::logic_error("good-dca builder: branch has no admissible extension");
      if (static_cast<int>(bi) == split_branch) {
        if (opts.size() < 2)
          throw std::logic_error("good-dca builder: split requested where the branch cannot split");
        B left = b, right = b;
        left.frags.push_back(opts[0]);
        right.frags.push_back(opts[1]);
        split_frags = {opts[0], opts[1]};
        next.push_back(std::move(left));
        next.push_back(std::move(right));
      } else {
        Fragment f;
        if (use_assigned) {
          f = b.assigned;
          if (std::find(opts.begin(), opts.end(), f) == opts.end())
            throw std::logic_error("good-dca builder: assigned completion not admissible");
        } else {
          f = opts[0];
        }
        b.frags.push_back(f);
        next.push_back(std::move(b));
      }
    }
    branches = std::move(next);
    return split_frags;
  };

  // Picks a unary for a routing vertex placed on `b` so the branch can split.
  auto split_unary = [&](const B& b) -> int {
    for (int u = 0; u < tmpl.sig().unary_count(); ++u) {
      FiniteStructure probe = tmpl.realize(host, OneType{-1, b.frags}, u);
      if (tmpl.admissible_fragments(probe, host.size(), b.unary, b.frags).size() >= 2) return u;
    }
    throw std::logic_error("good-dca builder: no routing unary lets this branch split");
  };

  auto branch_less = [&](const B& a, const B& b) {
    return compare_frag_vectors(tmpl.sig(), a.unary, a.frags, b.unary, b.frags) < 0;
  };

  for (int stage = 0; stage < n_coding; ++stage) {
    std::sort(branches.begin(), branches.end(), branch_less);

    // the coding branch: dictated by the seed, otherwise by the oldest
    // satisfiable genericity demand
    int bstar = -1, color = -1;
    if (stage < static_cast<int>(seed.size())) {
      const SeedStage& st = seed[static_cast<size_t>(stage)];
      for (size_t bi = 0; bi < branches.size() && bstar < 0; ++bi) {
        OneType bt = type_over_rep(branches[bi], stage);
        if (reduct) bt.unary = -1;
        if (bt == st.type) bstar = static_cast<int>(bi);
      }
      if (bstar < 0)
        throw std::invalid_argument("build_good_dca: seed type at stage " +
                                    std::to_string(stage) + " is not realized by any witness");
      color = reduct ? st.color : branches[static_cast<size_t>(bstar)].unary;
      if (color < 0) throw std::invalid_argument("build_good_dca: seed stage lacks a color");
    } else {
      int dq_pos = -1;
      for (size_t q = 0; q < dq.size() && dq_pos < 0; ++q) {
        const Dem& d = dq[q];
        for (size_t bi = 0; bi < branches.size(); ++bi) {
          OneType bt = type_over_rep(branches[bi], d.over);
          if (reduct) bt.unary = -1;
          if (bt == d.type) {
            dq_pos = static_cast<int>(q);
            bstar = static_cast<int>(bi);
            break;
          }
        }
      }
      if (bstar < 0) throw std::logic_error("good-dca builder: no satisfiable demand");
      color = reduct ? dq[static_cast<size_t>(dq_pos)].color
                     : branches[static_cast<size_t>(bstar)].unary;
    }

    OneType sigma = type_over_rep(branches[static_cast<size_t>(bstar)], stage);
    FiniteStructure rep_next = tmpl.realize(rep, sigma, color);

    // completion sets over the grown represented structure
    std::vector<std::vector<Fragment>> comp(branches.size());
    for (size_t bi = 0; bi < branches.size(); ++bi) {
      OneType bt = type_over_rep(branches[bi], stage);
      comp[bi] = tmpl.admissible_fragments(rep_next, stage, branches[bi].unary, bt.frags);
      if (comp[bi].empty())
        throw std::logic_error("good-dca builder: branch type has no completion");
    }

    // splitting plan: all branches in lex order, the coding branch last
    std::vector<int> order;
    for (int bi = 0; bi < static_cast<int>(branches.size()); ++bi)
      if (bi != bstar) order.push_back(bi);
    order.push_back(bstar);

    // branch identity shifts as splits insert children; track by frags
    auto find_branch = [&](const std::vector<Fragment>& prefix, int unary) -> int {
      for (size_t bi = 0; bi < branches.size(); ++bi) {
        if (branches[bi].unary != unary) continue;
        if (branches[bi].frags.size() < prefix.size()) continue;
        if (std::equal(prefix.begin(), prefix.end(), branches[bi].frags.begin())) {
          return static_cast<int>(bi);
        }
      }
      return -1;
    };

    std::vector<std::vector<Fragment>> keys;  // frozen branch keys in plan order
    std::vector<int> key_unary;
    for (int bi : order) {
      keys.push_back(branches[static_cast<size_t>(bi)].frags);
      key_unary.push_back(branches[static_cast<size_t>(bi)].unary);
    }

    int coding_depth = -1;
    std::vector<Fragment> coding_node_frags;
    for (size_t oi = 0; oi < keys.size(); ++oi) {
      bool is_star = (oi + 1 == keys.size());
      int cur = find_branch(keys[oi], key_unary[oi]);
      if (cur < 0) throw std::logic_error("good-dca builder: lost track of a branch");
      const auto& cset = comp[static_cast<size_t>(order[oi])];
      int w = static_cast<int>(cset.size());
      int total_splits = is_star ? w : w - 1;

      for (int s = 0; s < total_splits; ++s) {
        // the continuing child keeps the frozen prefix and is the lex-least
        // branch extending it: splits append the smaller fragment to the left
        cur = find_branch(keys[oi], key_unary[oi]);
        Critical crit;
        crit.kind = CriticalKind::Split;
        crit.depth = host.size();
        crit.node = branches[static_cast<size_t>(cur)].frags;
        crit.unary = branches[static_cast<size_t>(cur)].unary;
        int u = split_unary(branches[static_cast<size_t>(cur)]);
        auto lr = advance(branches[static_cast<size_t>(cur)].frags, u, cur, false);
        crit.left = lr.first;
        crit.right = lr.second;
        M.raw_.criticals.push_back(std::move(crit));
        if (is_star && s + 1 == total_splits) {
          // the final split is the splitting predecessor: its prec-right
          // child becomes the coding node, the left child stays a witness
          coding_depth = host.size();
          coding_node_frags = branches[static_cast<size_t>(cur) + 1].frags;
          branches.erase(branches.begin() + cur + 1);
        }
      }

      // completion assignment: the family of leaves descending from this
      // branch, in lex order, receives the completion set in lex order; the
      // lex-least leaf (the left spine, at the coding branch the left child
      // of the splitting predecessor) gets the least completion
      std::vector<int> family;
      for (size_t bi = 0; bi < branches.size(); ++bi) {
        if (branches[bi].unary != key_unary[oi]) continue;
        if (branches[bi].frags.size() < keys[oi].size()) continue;
        if (std::equal(keys[oi].begin(), keys[oi].end(), branches[bi].frags.begin()))
          family.push_back(static_cast<int>(bi));
      }
      if (static_cast<int>(family.size()) != w)
        throw std::logic_error("good-dca builder: family size mismatch");
      std::sort(family.begin(), family.end(), [&](int x, int y) {
        return branch_less(branches[static_cast<size_t>(x)], branches[static_cast<size_t>(y)]);
      });
      for (size_t fi = 0; fi < family.size(); ++fi)
        branches[static_cast<size_t>(family[fi])].assigned = cset[fi];
    }

    // the coding level: the host vertex realizes the right child of the last
    // split; every surviving branch takes its assigned completion here
    if (coding_depth != host.size())
      throw std::logic_error("good-dca builder: coding level out of position");
    Critical ccrit;
    ccrit.kind = CriticalKind::Coding;
    ccrit.depth = host.size();
    ccrit.node = coding_node_frags;
    ccrit.unary = reduct ? -1 : color;
    ccrit.coding_index = stage;
    M.raw_.criticals.push_back(std::move(ccrit));
    M.raw_.coding_vertex.push_back(host.size());
    advance(coding_node_frags, color, -1, true);

    // retire satisfied demands: the new vertex realizes sigma over rep
    for (auto it = dq.begin(); it != dq.end();) {
      bool match = static_cast<int>(it->type.frags.size()) <= stage;
      if (match) {
        for (size_t i = 0; i < it->type.frags.size() && match; ++i)
          if (it->type.frags[i] != sigma.frags[i]) match = false;
        if (reduct) {
          if (it->color != color) match = false;
        } else {
          if (it->type.unary != color) match = false;
        }
      }
      if (match) {
        M.demands_[static_cast<size_t>(it->slot)].satisfied_by = stage;
        it = dq.erase(it);
      } else {
        ++it;
      }
    }

    rep = rep_next;
    enqueue_types(stage + 1);

    // exactly-once audit: branch types over the grown structure are a
    // bijection with the admissible types
    {
      std::vector<OneType> have;
      for (const auto& b : branches) {
        OneType t = type_over_rep(b, stage + 1);
        if (reduct) t.unary = -1;
        have.push_back(t);
      }
      auto want = tmpl.one_types_over(rep, reduct);
      if (have.size() != want.size())
        throw std::logic_error("good-dca builder: witness width mismatch after stage " +
                               std::to_string(stage));
      for (const auto& w2 : want) {
        int hits = 0;
        for (const auto& h : have)
          if (h == w2) ++hits;
        if (hits != 1)
          throw std::logic_error("good-dca builder: type not represented exactly once");
      }
    }
  }

  for (const auto& b : branches) M.raw_.branches.push_back({b.unary, b.frags});
  M.stabilization_k_ = 0;

  if (host.size() > depth_cap)
    throw std::invalid_argument("build_good_dca: insufficient depth: " + std::to_string(n_coding) +
                                " coding nodes for template '" + tmpl.name() + "' require host depth " +
                                std::to_string(host.size()) + " > cap " + std::to_string(depth_cap));
  return M;
}

std::vector<SubtreeNode> GoodDca::level_set(int depth) const {
  std::vector<SubtreeNode> out;
  auto add = [&](int unary, const std::vector<Fragment>& frags, bool coding, int color) {
    if (static_cast<int>(frags.size()) < depth) return;
    SubtreeNode n;
    n.depth = depth;
    n.unary = unary;
    n.frags.assign(frags.begin(), frags.begin() + depth);
    n.coding = coding;
    n.color = color;
    out.push_back(std::move(n));
  };
  for (const auto& b : raw_.branches) add(b.unary, b.frags, false, -1);
  for (int n = 0; n < coding_count(); ++n) {
    auto cf = coding_frags(n);
    bool self = static_cast<int>(cf.size()) == depth;
    add(mode_ == TreeMode::U ? -1 : coding_color(n), cf, self, self ? coding_color(n) : -1);
  }
  std::sort(out.begin(), out.end(), [&](const SubtreeNode& a, const SubtreeNode& b) {
    int c = compare_frag_vectors(tmpl_.sig(), a.unary, a.frags, b.unary, b.frags);
    if (c) return c < 0;
    return a.coding > b.coding;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const SubtreeNode& a, const SubtreeNode& b) {
                          return a.same_descriptor(b);
                        }),
            out.end());
  return out;
}

const GoodDca::Critical& GoodDca::splitting_predecessor(int n) const {
  if (n < 0 || n >= coding_count())
    throw std::out_of_range("splitting_predecessor: coding index out of range");
  int cd = coding_vertex(n);
  const Critical* best = nullptr;
  for (const auto& c : raw_.criticals)
    if (c.kind == CriticalKind::Split && c.depth < cd) best = &c;
  if (!best) throw std::logic_error("splitting_predecessor: no splitting node below the coding node");
  return *best;
}

Subtree GoodDca::restriction(int k) const {
  if (k < 0 || k > critical_count())
    throw std::out_of_range("restriction: k out of range");
  std::vector<SubtreeNode> nodes;
  for (int t = 0; t < k; ++t) {
    auto lv = level_set(raw_.criticals[static_cast<size_t>(t)].depth);
    nodes.insert(nodes.end(), lv.begin(), lv.end());
  }
  if (nodes.empty()) return Subtree();
  return Subtree::from_nodes(tmpl_.sig(), std::move(nodes));
}

std::string GoodDca::to_dot() const {
  Subtree t = restriction(critical_count());
  return t.to_dot();
}

std::string GoodnessReport::to_string() const {
  std::ostringstream os;
  os << "condition (1) splitting predecessors: " << (cond1 ? "pass" : "FAIL " + witness1) << "\n";
  os << "condition (2) uniform left passing types: " << (cond2 ? "pass" : "FAIL " + witness2) << "\n";
  os << "condition (3) unique type witnesses: " << (cond3 ? "pass" : "FAIL " + witness3);
  if (cond3) os << " (stabilization k=" << stabilization_k << ")";
  os << "\nwidths above coding nodes:";
  for (int w : widths) os << " " << w;
  os << "\n";
  return os.str();
}

GoodnessReport check_good(const GoodDca& m) {
  GoodnessReport rep;
  const Signature& sig = m.tmpl().sig();
  bool reduct = m.mode() == TreeMode::U;

  // collect all maximal nodes: coding nodes and witness branches
  struct Item {
    int unary;
    std::vector<Fragment> frags;
    bool coding;
  };
  std::vector<Item> items;
  for (const auto& b : m.raw().branches) items.push_back({b.unary, b.frags, false});
  for (int n = 0; n < m.coding_count(); ++n)
    items.push_back({reduct ? -1 : m.coding_color(n), m.coding_frags(n), true});

  // splitting nodes of the induced tree: pairwise divergence prefixes
  struct SplitInfo {
    int unary;
    int depth;                    // divergence depth
    std::vector<Fragment> node;   // common prefix
  };
  std::vector<SplitInfo> splits;
  for (size_t i = 0; i < items.size(); ++i) {
    for (size_t j = i + 1; j < items.size(); ++j) {
      if (items[i].unary != items[j].unary) continue;
      size_t lim = std::min(items[i].frags.size(), items[j].frags.size());
      size_t d = 0;
      while (d < lim && items[i].frags[d] == items[j].frags[d]) ++d;
      if (d == lim) continue;  // comparable; no splitting node
      bool seen = false;
      for (const auto& s : splits)
        if (s.depth == static_cast<int>(d) && s.unary == items[i].unary &&
            std::equal(s.node.begin(), s.node.end(), items[i].frags.begin()))
          seen = true;
      if (!seen)
        splits.push_back({items[i].unary, static_cast<int>(d),
                          std::vector<Fragment>(items[i].frags.begin(),
                                                items[i].frags.begin() + static_cast<long>(d))});
    }
  }

  // (1): for each coding node, the longest splitting node below it extends
  // prec-right to it
  for (int n = 0; n < m.coding_count() && rep.cond1; ++n) {
    auto cf = m.coding_frags(n);
    int cu = reduct ? -1 : m.coding_color(n);
    const SplitInfo* sp = nullptr;
    for (const auto& s : splits)
      if (s.depth < static_cast<int>(cf.size()) && (!sp || s.depth > sp->depth)) sp = &s;
    if (!sp) {
      rep.cond1 = false;
      rep.witness1 = "coding node " + std::to_string(n) + " has no splitting node below it";
      break;
    }
    // the coding node must extend sp's prec-greatest child
    bool extends_sp = sp->unary == cu && static_cast<int>(cf.size()) > sp->depth &&
                      std::equal(sp->node.begin(), sp->node.end(), cf.begin());
    if (!extends_sp) {
      rep.cond1 = false;
      rep.witness1 = "coding node " + std::to_string(n) +
                     " does not extend the longest splitting node below it (depth " +
                     std::to_string(sp->depth) + ")";
      break;
    }
    Fragment cfrag = cf[static_cast<size_t>(sp->depth)];
    // child fragments present in the tree at sp
    std::set<Fragment> kids;
    for (const auto& it : items) {
      if (it.unary != sp->unary) continue;
      if (static_cast<int>(it.frags.size()) <= sp->depth) continue;
      if (!std::equal(sp->node.begin(), sp->node.end(), it.frags.begin())) continue;
      kids.insert(it.frags[static_cast<size_t>(sp->depth)]);
    }
    for (Fragment k : kids) {
      if (sig.compare_fragments(cfrag, k) < 0) {
        rep.cond1 = false;
        rep.witness1 = "coding node " + std::to_string(n) +
                       " extends a prec-left child of its splitting predecessor";
        break;
      }
    }
  }

  // (2): the prec-left extensions at splitting predecessors carry one
  // passing-type class at their coding nodes
  bool have_rho = false;
  Fragment rho = 0;
  for (int n = 0; n < m.coding_count() && rep.cond2; ++n) {
    auto cf = m.coding_frags(n);
    int cu = reduct ? -1 : m.coding_color(n);
    int cd = static_cast<int>(cf.size());
    const SplitInfo* sp = nullptr;
    for (const auto& s : splits)
      if (s.depth < cd && (!sp || s.depth > sp->depth)) sp = &s;
    if (!sp) continue;  // cond1 reports this
    // the prec-left sibling: nodes extending sp with a smaller fragment
    Fragment cfrag = cd > sp->depth ? cf[static_cast<size_t>(sp->depth)] : 0;
    std::set<Fragment> left_pass;
    for (const auto& it : items) {
      if (it.unary != sp->unary) continue;
      if (static_cast<int>(it.frags.size()) <= cd) continue;
      if (!std::equal(sp->node.begin(), sp->node.end(), it.frags.begin())) continue;
      Fragment side = it.frags[static_cast<size_t>(sp->depth)];
      if (sig.compare_fragments(side, cfrag) < 0) left_pass.insert(it.frags[static_cast<size_t>(cd)]);
    }
    if (left_pass.size() != 1) {
      rep.cond2 = false;
      rep.witness2 = "coding node " + std::to_string(n) + " has " +
                     std::to_string(left_pass.size()) + " left-extension passing classes";
      break;
    }
    if (!have_rho) {
      rho = *left_pass.begin();
      have_rho = true;
    } else if (*left_pass.begin() != rho) {
      rep.cond2 = false;
      rep.witness2 = "left passing class at coding node " + std::to_string(n) +
                     " differs from earlier coding nodes";
    }
  }

  // (3): minimal k with level sets above coding nodes in bijection with the
  // admissible 1-types over the represented structure
  int K = m.coding_count();
  std::vector<char> good_at(static_cast<size_t>(K), 0);
  for (int n = 0; n < K; ++n) {
    int depth = m.coding_vertex(n) + 1;
    auto lv = m.level_set(depth);
    rep.widths.push_back(static_cast<int>(lv.size()));
    FiniteStructure base = m.represented_prefix(n + 1);
    auto want = m.tmpl().one_types_over(base, reduct);
    std::vector<OneType> have;
    for (const auto& node : lv) {
      OneType t;
      t.unary = node.unary;
      for (int i = 0; i <= n; ++i)
        t.frags.push_back(node.frags[static_cast<size_t>(m.coding_vertex(i))]);
      have.push_back(std::move(t));
    }
    bool ok = have.size() == want.size();
    if (ok) {
      for (const auto& w : want) {
        int hits = 0;
        for (const auto& h : have)
          if (h == w) ++hits;
        if (hits != 1) {
          ok = false;
          break;
        }
      }
    }
    good_at[static_cast<size_t>(n)] = ok ? 1 : 0;
  }
  int k = K;
  for (int n = K - 1; n >= 0 && good_at[static_cast<size_t>(n)]; --n) k = n;
  if (k == K) {
    rep.cond3 = false;
    rep.stabilization_k = -1;
    rep.witness3 = "no index stabilizes the type-witness bijection";
  } else {
    rep.stabilization_k = k;
    // a full failure only if some coding node at or above the reported k broke
    for (int n = k; n < K; ++n)
      if (!good_at[static_cast<size_t>(n)]) rep.cond3 = false;
    if (!rep.cond3) rep.witness3 = "gap in the type-witness bijection above k";
  }
  return rep;
}

Subtree antichain_tree(const GoodDca& m, const DcaAntichain& a) {
  if (a.coding.empty()) throw std::invalid_argument("antichain_tree: empty antichain");
  bool reduct = m.mode() == TreeMode::U;
  std::vector<SubtreeNode> nodes;
  for (int idx : a.coding) {
    SubtreeNode n;
    n.depth = m.coding_vertex(idx);
    n.unary = reduct ? -1 : m.coding_color(idx);
    n.frags = m.coding_frags(idx);
    n.coding = true;
    n.color = m.coding_color(idx);
    nodes.push_back(std::move(n));
  }
  return closure_from_descriptors(m.tmpl().sig(), std::move(nodes));
}

Envelope canonical_envelope(const GoodDca& m, const DcaAntichain& a) {
  if (a.coding.empty()) throw std::invalid_argument("canonical_envelope: empty antichain");
  const Signature& sig = m.tmpl().sig();
  bool reduct = m.mode() == TreeMode::U;
  int n = static_cast<int>(a.coding.size());

  Envelope env;
  env.base = a;
  std::vector<int> depths;  // coding-node depths
  for (int idx : a.coding) depths.push_back(m.coding_vertex(idx));
  env.max_depth = depths.back() + 1;

  FiniteStructure repA = m.host_structure().restrict_to(depths);

  // base nodes: the antichain plus its splitting predecessors in m
  std::vector<SubtreeNode> base_nodes;
  for (int j = 0; j < n; ++j) {
    SubtreeNode c;
    c.depth = depths[static_cast<size_t>(j)];
    c.unary = reduct ? -1 : m.coding_color(a.coding[static_cast<size_t>(j)]);
    c.frags = m.coding_frags(a.coding[static_cast<size_t>(j)]);
    c.coding = true;
    c.color = m.coding_color(a.coding[static_cast<size_t>(j)]);
    base_nodes.push_back(c);

    const auto& sp = m.splitting_predecessor(a.coding[static_cast<size_t>(j)]);
    SubtreeNode s;
    s.depth = sp.depth;
    s.unary = sp.unary;
    s.frags = sp.node;
    base_nodes.push_back(s);
    env.splitting_predecessors.push_back(std::move(s));
  }

  // node pool of m at a given depth, lex sorted
  auto m_level = [&](int depth) { return m.level_set(depth); };

  auto type_over_A = [&](const SubtreeNode& node, int j) {
    OneType t;
    t.unary = node.unary;
    for (int i = 0; i < j; ++i) t.frags.push_back(node.frags[static_cast<size_t>(depths[static_cast<size_t>(i)])]);
    return t;
  };

  // types represented at level d by truncations of the base nodes
  auto represented_by_base = [&](int d, int j) {
    std::vector<OneType> out;
    for (const auto& b : base_nodes) {
      if (static_cast<int>(b.frags.size()) < d) continue;
      SubtreeNode p;
      p.unary = b.unary;
      p.frags.assign(b.frags.begin(), b.frags.begin() + d);
      out.push_back(type_over_A(p, j));
    }
    return out;
  };

  std::vector<SubtreeNode> pool;  // E_{j-1} plus base truncations one level down
  for (int j = 0; j < n; ++j) {
    int lvl_depth = depths[static_cast<size_t>(j)] + 1;
    FiniteStructure baseA = repA.restrict_to_prefix(j + 1);
    auto required = m.tmpl().one_types_over(baseA, reduct);
    auto covered = represented_by_base(lvl_depth, j + 1);

    std::vector<SubtreeNode> stage_witnesses;
    for (const auto& tau : required) {
      bool have = false;
      for (const auto& c : covered)
        if (c == tau) { have = true; break; }
      if (have) continue;

      const SubtreeNode* anchor = nullptr;
      if (j > 0) {
        // leftmost pool node whose type over A_j matches tau's restriction
        OneType tau_rest = tau;
        tau_rest.frags.pop_back();
        for (const auto& p : pool) {
          if (type_over_A(p, j) == tau_rest) { anchor = &p; break; }
        }
        if (!anchor)
          throw std::logic_error("canonical_envelope: no pool node restricts to the demanded type");
      }

      // leftmost node of m at lvl_depth above the anchor realizing tau
      const SubtreeNode* chosen = nullptr;
      auto level = m_level(lvl_depth);
      for (const auto& cand : level) {
        if (anchor) {
          if (cand.unary != anchor->unary) continue;
          if (!std::equal(anchor->frags.begin(), anchor->frags.end(), cand.frags.begin())) continue;
        }
        if (type_over_A(cand, j + 1) == tau) { chosen = &cand; break; }
      }
      if (!chosen)
        throw std::invalid_argument(
            "canonical_envelope: the ambient antichain is too shallow to witness a 1-type; "
            "extend it (need witnesses above depth " + std::to_string(lvl_depth) + ")");
      SubtreeNode w = *chosen;
      w.coding = false;
      w.color = -1;
      stage_witnesses.push_back(w);
    }

    // pool for the next stage: this stage's witnesses plus base truncations
    pool.clear();
    for (const auto& w : stage_witnesses) pool.push_back(w);
    for (const auto& b : base_nodes) {
      if (static_cast<int>(b.frags.size()) < lvl_depth) continue;
      SubtreeNode p;
      p.depth = lvl_depth;
      p.unary = b.unary;
      p.frags.assign(b.frags.begin(), b.frags.begin() + lvl_depth);
      pool.push_back(std::move(p));
    }
    std::sort(pool.begin(), pool.end(), [&](const SubtreeNode& x, const SubtreeNode& y) {
      return compare_frag_vectors(sig, x.unary, x.frags, y.unary, y.frags) < 0;
    });
    pool.erase(std::unique(pool.begin(), pool.end(),
                           [](const SubtreeNode& x, const SubtreeNode& y) {
                             return x.same_descriptor(y);
                           }),
               pool.end());

    env.type_witnesses.push_back(std::move(stage_witnesses));
  }

  // assemble the envelope tree
  std::vector<SubtreeNode> all = base_nodes;
  for (const auto& stage : env.type_witnesses)
    for (const auto& w : stage) all.push_back(w);
  env.tree = closure_from_descriptors(sig, std::move(all));

  // type table: maximal-depth nodes paired with their 1-type over A
  for (int i = 0; i < env.tree.node_count(); ++i) {
    const SubtreeNode& node = env.tree.node(i);
    if (node.depth != env.max_depth) continue;
    env.type_table.push_back({node, type_over_A(node, n)});
  }
  return env;
}

}  // namespace brd
