#ifndef BRD_SIGNATURE_HPP
#define BRD_SIGNATURE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace brd {

// A fragment is a truth assignment to the binary atoms {R(v,x), R(x,v)}
// for a single parameter v.  Atoms are packed into bits; the bit layout is
// fixed by the signature (see Signature::atom_count).
using Fragment = std::uint16_t;

constexpr int kMaxBinaryAtoms = 16;

// Relational signature: ordered unary symbols, ordered binary symbols with
// a per-symbol symmetry flag.  The induced literal order lists, for each
// binary symbol in order, the atom R(v,x) and then R(x,v) (omitted when the
// symbol is symmetric).  Negated literals sort before positive ones, so
// fragment comparison is bitwise with 0 < 1, atom 0 most significant.
class Signature {
 public:
  Signature() = default;
  Signature(std::vector<std::string> unary_names,
            std::vector<std::string> binary_names,
            std::vector<bool> symmetric_flags);

  int unary_count() const { return static_cast<int>(unary_.size()); }
  int binary_count() const { return static_cast<int>(binary_.size()); }
  bool symmetric(int b) const { return symmetric_[static_cast<size_t>(b)]; }
  const std::string& unary_name(int u) const { return unary_[static_cast<size_t>(u)]; }
  const std::string& binary_name(int b) const { return binary_[static_cast<size_t>(b)]; }

  int find_unary(const std::string& name) const;   // -1 if absent
  int find_binary(const std::string& name) const;  // -1 if absent

  // Number of atoms in one fragment.
  int atom_count() const { return atom_count_; }
  // Bit index of atom (symbol b, direction d); d=0 is R(v,x), d=1 is R(x,v).
  // For symmetric symbols both directions share one bit.
  int atom_bit(int b, int d) const;

  bool operator==(const Signature& o) const;
  bool operator!=(const Signature& o) const { return !(*this == o); }

  // -1, 0, 1 with negated atoms first: the fragment whose first differing
  // atom is false is the smaller one.
  int compare_fragments(Fragment a, Fragment b) const;

  std::string fragment_to_string(Fragment f) const;

 private:
  std::vector<std::string> unary_;
  std::vector<std::string> binary_;
  std::vector<bool> symmetric_;
  std::vector<int> atom_offset_;  // per binary symbol
  int atom_count_ = 0;
};

// Finite relational structure over an enumerated universe {v_0,...,v_{n-1}}.
// The vertex order is part of the data: it is the enumeration order used by
// coding trees and by ordered isomorphism.
class FiniteStructure {
 public:
  FiniteStructure() = default;
  explicit FiniteStructure(Signature sig) : sig_(std::move(sig)) {}

  const Signature& sig() const { return sig_; }
  int size() const { return static_cast<int>(unary_of_.size()); }

  int unary_of(int v) const { return unary_of_[static_cast<size_t>(v)]; }
  bool related(int b, int i, int j) const;
  void set_related(int b, int i, int j, bool value);

  // Appends a vertex with the given unary; all relations to it default false.
  int add_vertex(int unary);

  // Fragment describing how vertex j relates to vertex i (i as the parameter).
  Fragment fragment_of(int i, int j) const;
  // Installs relations between existing vertex i and new last vertex per f.
  void apply_fragment(int i, int j, Fragment f);

  FiniteStructure restrict_to_prefix(int m) const;
  FiniteStructure restrict_to(const std::vector<int>& vertices) const;

 private:
  Signature sig_;
  std::vector<int> unary_of_;
  // rel_[b] is a flat size*size matrix; entry (i,j) = R_b(v_i, v_j).
  std::vector<std::vector<char>> rel_;
};

struct Violation {
  std::string message;
};

// Report-style validation: lists every violated structure invariant.
std::vector<Violation> validate_structure(const Signature& sig, const FiniteStructure& s);

// True iff the index-order-preserving bijection v_i -> v_i is an isomorphism.
bool ordered_isomorphic(const FiniteStructure& a, const FiniteStructure& b);

// All relabelings of `s` (one per permutation of its universe), deduplicated
// up to ordered isomorphism.  Used to aggregate degrees over the enumerations
// of an unlabeled structure.
std::vector<FiniteStructure> enumeration_classes(const FiniteStructure& s);

}  // namespace brd

#endif
