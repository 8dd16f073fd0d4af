#ifndef BRD_ANTICHAIN_HPP
#define BRD_ANTICHAIN_HPP

#include <memory>
#include <string>
#include <vector>

#include "coding_tree.hpp"
#include "fraisse.hpp"
#include "signature.hpp"
#include "similarity.hpp"

namespace brd {

// Diagonal-tree test, Def-style: at most one splitting node per level, every
// splitting node of degree exactly two, no splitting node on a coding level.
bool is_diagonal(const Subtree& t, std::string* why = nullptr);

// Meet-closure of arbitrary descriptor nodes (host-independent): adds meets
// and the initial segments at the induced level depths.
Subtree closure_from_descriptors(const Signature& sig, std::vector<SubtreeNode> nodes);

enum class CriticalKind { Split, Coding };

// A finite truncation of a good diagonal coding antichain.  Coding nodes are
// coding nodes of the co-built host enumeration; the other maximal branches
// are the type witnesses standing for coding nodes beyond the truncation.
class GoodDca {
 public:
  struct Branch {
    int unary = -1;  // root unary in S mode, -1 in U mode
    std::vector<Fragment> frags;
  };
  struct Critical {
    CriticalKind kind;
    int depth;                  // node depth of the critical node
    std::vector<Fragment> node; // the critical node's fragments
    int unary = -1;
    Fragment left = 0, right = 0;  // split children fragments (Split only)
    int coding_index = -1;         // position in the coding sequence (Coding only)
  };
  struct Raw {
    std::vector<int> coding_vertex;
    std::vector<Branch> branches;
    std::vector<Critical> criticals;
  };

  // Builds a good diagonal coding antichain with n_coding coding nodes,
  // co-constructing a fair host enumeration; fails with the exact depth
  // requirement when the cap is too small.
  static GoodDca build(const ClassTemplate& tmpl, TreeMode mode, int n_coding,
                       int depth_cap);

  // Same stage machinery with the first coding types dictated: stage j
  // realizes seed[j] (a 1-type over the first j coding vertices, plus the
  // vertex color).  Stages beyond the seed follow the genericity demands.
  // This is how an antichain is end-extended to a good antichain whose
  // restriction is its envelope.
  struct SeedStage {
    OneType type;
    int color = -1;
  };
  static GoodDca build_seeded(const ClassTemplate& tmpl, TreeMode mode,
                              const std::vector<SeedStage>& seed, int n_coding,
                              int depth_cap);

  const ClassTemplate& tmpl() const { return tmpl_; }
  TreeMode mode() const { return mode_; }
  const FiniteStructure& host_structure() const { return host_; }
  int host_depth() const { return host_.size(); }
  int coding_count() const { return static_cast<int>(raw_.coding_vertex.size()); }
  int coding_vertex(int n) const { return raw_.coding_vertex[static_cast<size_t>(n)]; }
  int coding_color(int n) const { return host_.unary_of(coding_vertex(n)); }
  std::vector<Fragment> coding_frags(int n) const;
  int stabilization_k() const { return stabilization_k_; }
  const Raw& raw() const { return raw_; }
  Raw& mutable_raw() { return raw_; }

  // Represented structure on the coding vertices, enumeration order inherited.
  FiniteStructure represented() const;
  FiniteStructure represented_prefix(int n) const;

  const std::vector<Critical>& criticals() const { return raw_.criticals; }
  int critical_count() const { return static_cast<int>(raw_.criticals.size()); }

  // Level set of the induced tree at the given depth: deduplicated prefixes
  // of branches and of coding nodes of length >= depth.
  std::vector<SubtreeNode> level_set(int depth) const;

  // Longest splitting node below the n-th coding node (goodness (1)).
  const Critical& splitting_predecessor(int n) const;

  // Nodes of the first k critical levels, as a detached subtree.
  Subtree restriction(int k) const;
  // Depth of the k-th critical node (k < critical_count()).
  int critical_depth(int k) const { return raw_.criticals[static_cast<size_t>(k)].depth; }

  // Genericity ledger of the represented structure.
  struct Demand {
    int over;   // demanded type lives over the first `over` coding vertices
    OneType type;
    int color;  // U mode
    int satisfied_by;  // coding index or -1
  };
  const std::vector<Demand>& demand_ledger() const { return demands_; }

  std::string to_dot() const;

 private:
  GoodDca(const ClassTemplate& tmpl, TreeMode mode)
      : tmpl_(tmpl), mode_(mode), host_(tmpl.sig()) {}

  ClassTemplate tmpl_;
  TreeMode mode_;
  FiniteStructure host_;
  Raw raw_;
  std::vector<Demand> demands_;
  int stabilization_k_ = 0;
};

// Per-condition goodness report with a witness per failure.
struct GoodnessReport {
  bool cond1 = true, cond2 = true, cond3 = true;
  std::string witness1, witness2, witness3;
  int stabilization_k = -1;  // minimal k making (3) hold; -1 if none
  std::vector<int> widths;   // level-set widths just above each coding node
  bool ok() const { return cond1 && cond2 && cond3 && stabilization_k >= 0; }
  std::string to_string() const;
};

GoodnessReport check_good(const GoodDca& m);

// A finite antichain of coding nodes of a GoodDca, by coding-sequence index.
struct DcaAntichain {
  std::vector<int> coding;  // increasing indices into the DCA coding sequence
};

// Subtree induced by the antichain (meet-closure), coding flags on members.
Subtree antichain_tree(const GoodDca& m, const DcaAntichain& a);

struct Envelope {
  DcaAntichain base;
  std::vector<SubtreeNode> splitting_predecessors;
  std::vector<std::vector<SubtreeNode>> type_witnesses;  // per coding stage
  Subtree tree;            // meet-closure of the full node set
  int max_depth = 0;
  // maximal nodes at max_depth paired with the represented 1-type they carry
  std::vector<std::pair<SubtreeNode, OneType>> type_table;
};

// Canonical envelope: adds the splitting predecessors and, stage by stage,
// one leftmost witness per unrepresented 1-type over the represented
// structure of the antichain.
Envelope canonical_envelope(const GoodDca& m, const DcaAntichain& a);

}  // namespace brd

#endif
