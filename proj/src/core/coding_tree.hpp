#ifndef BRD_CODING_TREE_HPP
#define BRD_CODING_TREE_HPP

#include <optional>
#include <string>
#include <vector>

#include "fraisse.hpp"
#include "signature.hpp"

namespace brd {

// S: nodes are full 1-types (unaries inside the node).
// U: nodes are types over the binary reduct; unary colors live on coding nodes.
enum class TreeMode { S, U };

// Tie-break used when a coding node is chosen among the extensions of the
// oldest pending demand.  Both schedules are fair; degree counts must agree.
enum class ScheduleKind { LexMin, LexMax };

struct NodeId {
  int level = -1;
  int index = -1;
  bool operator==(const NodeId& o) const { return level == o.level && index == o.index; }
  bool operator!=(const NodeId& o) const { return !(*this == o); }
  bool valid() const { return level >= 0; }
};

// Finite truncation of the coding tree of 1-types over an enumerated limit.
// Levels 0..depth are materialized and each level holds every admissible type
// over the structure built so far; coding nodes c_0..c_{depth-1} are chosen by
// a demand-queue schedule that realizes Fraisse genericity: every node, once
// created, is eventually extended by a coding node (every color in U mode).
class CodingTree {
 public:
  static CodingTree build(const ClassTemplate& tmpl, TreeMode mode, int depth,
                          ScheduleKind sched = ScheduleKind::LexMin);

  const ClassTemplate& tmpl() const { return tmpl_; }
  TreeMode mode() const { return mode_; }
  ScheduleKind schedule() const { return sched_; }
  int depth() const { return depth_; }
  const FiniteStructure& built_structure() const { return built_; }

  int level_size(int level) const;
  int node_unary(NodeId n) const;
  int node_parent(NodeId n) const;  // index at level-1; -1 at level 0
  Fragment node_fragment(NodeId n, int i) const;
  std::vector<Fragment> node_fragments(NodeId n) const;
  OneType node_type(NodeId n) const;

  NodeId coding_node(int n) const;      // n < depth
  int coding_color(int n) const;        // unary of v_n
  bool is_coding(NodeId n) const;

  NodeId ancestor(NodeId n, int level) const;
  bool is_prefix(NodeId shorter, NodeId longer) const;

  // Passing type of t at the coding node c_m; requires m < t.level.
  Fragment passing_type(NodeId t, int m) const;
  // Passing-type similarity: fragments agree under the parameter substitution.
  bool passing_similar(NodeId s, int m, NodeId t, int n) const;

  // Total lexicographic order: proper initial segments first, otherwise the
  // first differing block decides with negated literals first.
  int lex_compare(NodeId s, NodeId t) const;

  // Longest common restriction; disengaged across distinct roots.
  std::optional<NodeId> meet(NodeId s, NodeId t) const;

  // Genericity ledger introspection (for fairness audits).
  struct DemandRecord {
    NodeId node;
    int color;         // -1 in S mode
    int enqueued_at;   // level at which the demand was scheduled
    int satisfied_at;  // coding index that met it, or -1 within this depth
  };
  const std::vector<DemandRecord>& demand_ledger() const { return ledger_; }

  std::string to_dot() const;
  std::string to_json() const;

 private:
  CodingTree(const ClassTemplate& tmpl, TreeMode mode, ScheduleKind sched)
      : tmpl_(tmpl), mode_(mode), sched_(sched), built_(tmpl.sig()) {}

  struct Level {
    std::vector<int> unary;
    std::vector<int> parent;
    std::vector<Fragment> frags;  // count * level entries
    int count() const { return static_cast<int>(unary.size()); }
  };
  struct Coding {
    int index = -1;
    int color = -1;
  };

  ClassTemplate tmpl_;
  TreeMode mode_;
  ScheduleKind sched_;
  int depth_ = 0;
  FiniteStructure built_;
  std::vector<Level> levels_;
  std::vector<Coding> coding_;
  std::vector<DemandRecord> ledger_;
};

// Reduct-mode flag implied by Convention-style rules: U is required when the
// template mixes non-trivial unaries with a linear order, and unsupported
// where admissibility needs the candidate's unary.
bool mode_allowed(const ClassTemplate& tmpl, TreeMode mode, std::string* why = nullptr);
TreeMode default_mode(const ClassTemplate& tmpl);

}  // namespace brd

#endif
