#ifndef BRD_FRAISSE_HPP
#define BRD_FRAISSE_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "signature.hpp"

namespace brd {

// A complete 1-type over an enumerated finite structure: the parameter-free
// unary choice plus one fragment per vertex of the base.  unary == -1 marks a
// binary-reduct type (used by unary-colored trees, where the color lives on
// coding nodes instead).
struct OneType {
  int unary = -1;
  std::vector<Fragment> frags;

  bool operator==(const OneType& o) const { return unary == o.unary && frags == o.frags; }
};

enum class TemplateKind {
  Unrestricted,       // free amalgamation over arbitrary binary symbols
  LinearOrder,        // the rationals
  LinearOrderDense,   // rationals with k dense unary classes
  KPartite,           // generic k-partite graph (no intra-part edges)
};

// A Fraisse class presented as a hereditary admissibility predicate on
// 1-types: which complete types over a finite member are realizable.
class ClassTemplate {
 public:
  static ClassTemplate unrestricted(std::vector<std::string> binary,
                                    std::vector<bool> symmetric);
  static ClassTemplate rado();
  static ClassTemplate linear_order();
  static ClassTemplate linear_order_dense(int classes);
  static ClassTemplate k_partite(int parts);

  // Parses a registry name: rado | q | q_<k> | kpartite_<k> |
  // unrestricted:<sym>[*][,...]  (trailing * marks a non-symmetric symbol).
  static std::optional<ClassTemplate> by_name(const std::string& name);
  static std::vector<std::string> known_names();

  TemplateKind kind() const { return kind_; }
  const Signature& sig() const { return sig_; }
  const std::string& name() const { return name_; }
  int param() const { return param_; }

  // Fragments admissible at parameter v_m of `base`, given the candidate's
  // unary (-1 for reduct types) and its fragments at v_0..v_{m-1}.  Returned
  // in fragment order.  Hereditary by construction.
  std::vector<Fragment> admissible_fragments(const FiniteStructure& base, int m, int unary,
                                             const std::vector<Fragment>& prefix) const;

  bool admits(const FiniteStructure& base, const OneType& t) const;

  // All admissible complete 1-types over base, lexicographic in
  // (unary, fragments).  With reduct=true the unary slot is dropped and
  // types are over the binary reduct.
  std::vector<OneType> one_types_over(const FiniteStructure& base, bool reduct = false) const;

  // Extends base by one vertex realizing t.  For reduct types the realizing
  // unary must be supplied.
  FiniteStructure realize(const FiniteStructure& base, const OneType& t, int unary_override = -1) const;

  // Unary symbols the candidate type may carry (non-reduct enumeration).
  std::vector<int> admissible_unaries(const FiniteStructure& base) const;

 private:
  ClassTemplate(TemplateKind kind, Signature sig, std::string name, int param)
      : kind_(kind), sig_(std::move(sig)), name_(std::move(name)), param_(param) {}

  TemplateKind kind_;
  Signature sig_;
  std::string name_;
  int param_ = 0;  // class/part count where applicable
};

// Lexicographic comparison of complete types (unary block first, then
// fragments under the signature's literal order).
int compare_types(const Signature& sig, const OneType& a, const OneType& b);

}  // namespace brd

#endif
