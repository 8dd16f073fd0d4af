#ifndef BRD_SIMILARITY_HPP
#define BRD_SIMILARITY_HPP

#include <optional>
#include <string>
#include <vector>

#include "coding_tree.hpp"
#include "fraisse.hpp"
#include "signature.hpp"

namespace brd {

struct SubtreeNode {
  int depth = 0;
  int unary = -1;
  std::vector<Fragment> frags;
  bool coding = false;
  int color = -1;  // unary color of the represented vertex (coding nodes)

  bool same_descriptor(const SubtreeNode& o) const {
    return depth == o.depth && unary == o.unary && frags == o.frags;
  }
};

// A finite meet-closed, level-graded set of tree nodes with designated coding
// nodes, detached from its host: everything similarity needs (descriptors,
// depths, coding data) is stored in the value itself.
class Subtree {
 public:
  Subtree() = default;
  // Validates grading and meet-closure; nodes are stored level-major in
  // lexicographic order.
  static Subtree from_nodes(Signature sig, std::vector<SubtreeNode> nodes);
  // Meet-closure of `members` inside the host (coding designations inherited).
  static Subtree closure(const CodingTree& host, const std::vector<NodeId>& members);

  const Signature& sig() const { return sig_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const SubtreeNode& node(int i) const { return nodes_[static_cast<size_t>(i)]; }

  int level_count() const { return static_cast<int>(level_begin_.size()) - 1; }
  int level_depth(int t) const;
  int level_begin(int t) const { return level_begin_[static_cast<size_t>(t)]; }
  int level_end(int t) const { return level_begin_[static_cast<size_t>(t) + 1]; }
  int level_size(int t) const { return level_end(t) - level_begin(t); }

  // Coding nodes in order of increasing depth (node indices).
  const std::vector<int>& coding_seq() const { return coding_seq_; }

  int lex_compare(int a, int b) const;
  // Index of the node equal to node a truncated to depth d (-1 if absent).
  int ancestor_at(int a, int d) const;
  // Meet as common-prefix length; -1 across distinct roots.
  int meet_prefix_len(int a, int b) const;
  // Meet as a subtree node index (-1 when disengaged or absent).
  int meet_node(int a, int b) const;

  bool is_meet_closed(std::string* why = nullptr) const;

  std::string to_dot() const;

 private:
  Signature sig_;
  std::vector<SubtreeNode> nodes_;
  std::vector<int> level_begin_;
  std::vector<int> level_depths_;
  std::vector<int> coding_seq_;
};

// Canonical invariant of the similarity class: one event per level recording
// the branch permutation, the critical data, and the passing-type classes at
// the previous coding level.  Equality of codes characterizes similarity.
class SimilarityCode {
 public:
  struct LevelEvent {
    int count = 0;
    std::vector<int> parent_rank;             // -1 on the first level
    std::vector<std::pair<int, int>> codings; // (rank, color)
    int prev_codings = 0;
    std::vector<Fragment> passing;            // count * prev_codings, row-major
    bool operator==(const LevelEvent& o) const;
  };

  const std::vector<LevelEvent>& events() const { return events_; }
  std::vector<LevelEvent>& events() { return events_; }

  bool operator==(const SimilarityCode& o) const { return events_ == o.events_; }
  bool operator!=(const SimilarityCode& o) const { return !(*this == o); }
  bool operator<(const SimilarityCode& o) const;

  // Stable text form, usable as a dedupe key and diffable across
  // implementations.
  std::string serialize() const;

 private:
  std::vector<LevelEvent> events_;
};

SimilarityCode canonical_code(const Subtree& s);

// A similarity map is stored as node index translation S -> T.
using SimilarityMap = std::vector<int>;

// Checks the six similarity-map conditions literally: order, meets, relative
// lengths, initial segments, coding nodes with their parameter-free data, and
// relative passing types.
bool is_similarity_map(const SimilarityMap& f, const Subtree& s, const Subtree& t,
                       std::string* why = nullptr);

// Exhaustive decision procedure: order preservation pins the only candidate
// bijection (rank alignment per level), which is then checked condition by
// condition.
std::optional<SimilarityMap> find_similarity(const Subtree& s, const Subtree& t);

// The substructure represented by the coding nodes, in coding order.
FiniteStructure represented_structure(const Subtree& s, const Signature& sig);

}  // namespace brd

#endif
