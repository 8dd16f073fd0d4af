#include "signature.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace brd {

Signature::Signature(std::vector<std::string> unary_names,
                     std::vector<std::string> binary_names,
                     std::vector<bool> symmetric_flags)
    : unary_(std::move(unary_names)),
      binary_(std::move(binary_names)),
      symmetric_(std::move(symmetric_flags)) {
  if (unary_.empty()) throw std::invalid_argument("signature needs at least one unary symbol");
  if (symmetric_.size() != binary_.size())
    throw std::invalid_argument("symmetric flag count must match binary symbol count");
  atom_offset_.resize(binary_.size());
  int off = 0;
  for (size_t b = 0; b < binary_.size(); ++b) {
    atom_offset_[b] = off;
    off += symmetric_[b] ? 1 : 2;
  }
  atom_count_ = off;
  if (atom_count_ > kMaxBinaryAtoms)
    throw std::invalid_argument("too many binary atoms for fragment representation");
}

int Signature::find_unary(const std::string& name) const {
  for (size_t i = 0; i < unary_.size(); ++i)
    if (unary_[i] == name) return static_cast<int>(i);
  return -1;
}

int Signature::find_binary(const std::string& name) const {
  for (size_t i = 0; i < binary_.size(); ++i)
    if (binary_[i] == name) return static_cast<int>(i);
  return -1;
}

int Signature::atom_bit(int b, int d) const {
  int base = atom_offset_[static_cast<size_t>(b)];
  return symmetric_[static_cast<size_t>(b)] ? base : base + d;
}

bool Signature::operator==(const Signature& o) const {
  return unary_ == o.unary_ && binary_ == o.binary_ && symmetric_ == o.symmetric_;
}

int Signature::compare_fragments(Fragment a, Fragment b) const {
  if (a == b) return 0;
  for (int i = 0; i < atom_count_; ++i) {
    int ba = (a >> i) & 1, bb = (b >> i) & 1;
    if (ba != bb) return ba < bb ? -1 : 1;
  }
  return 0;
}

std::string Signature::fragment_to_string(Fragment f) const {
  std::string out;
  for (int b = 0; b < binary_count(); ++b) {
    if (b) out += ",";
    if (symmetric_[static_cast<size_t>(b)]) {
      out += ((f >> atom_bit(b, 0)) & 1) ? binary_[static_cast<size_t>(b)] : "-" + binary_[static_cast<size_t>(b)];
    } else {
      out += ((f >> atom_bit(b, 0)) & 1) ? binary_[static_cast<size_t>(b)] + ">" : "-" + binary_[static_cast<size_t>(b)] + ">";
      out += ((f >> atom_bit(b, 1)) & 1) ? "<" : "-<";
    }
  }
  return out;
}

bool FiniteStructure::related(int b, int i, int j) const {
  return rel_[static_cast<size_t>(b)][static_cast<size_t>(i) * unary_of_.size() + static_cast<size_t>(j)] != 0;
}

void FiniteStructure::set_related(int b, int i, int j, bool value) {
  size_t n = unary_of_.size();
  rel_[static_cast<size_t>(b)][static_cast<size_t>(i) * n + static_cast<size_t>(j)] = value ? 1 : 0;
  if (sig_.symmetric(b))
    rel_[static_cast<size_t>(b)][static_cast<size_t>(j) * n + static_cast<size_t>(i)] = value ? 1 : 0;
}

int FiniteStructure::add_vertex(int unary) {
  int n = size();
  unary_of_.push_back(unary);
  size_t m = unary_of_.size();
  std::vector<std::vector<char>> grown(static_cast<size_t>(sig_.binary_count()),
                                       std::vector<char>(m * m, 0));
  for (int b = 0; b < sig_.binary_count(); ++b)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        grown[static_cast<size_t>(b)][static_cast<size_t>(i) * m + static_cast<size_t>(j)] =
            rel_[static_cast<size_t>(b)][static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)];
  rel_ = std::move(grown);
  return n;
}

Fragment FiniteStructure::fragment_of(int i, int j) const {
  Fragment f = 0;
  for (int b = 0; b < sig_.binary_count(); ++b) {
    if (related(b, i, j)) f |= static_cast<Fragment>(1u << sig_.atom_bit(b, 0));
    if (!sig_.symmetric(b) && related(b, j, i)) f |= static_cast<Fragment>(1u << sig_.atom_bit(b, 1));
  }
  return f;
}

void FiniteStructure::apply_fragment(int i, int j, Fragment f) {
  for (int b = 0; b < sig_.binary_count(); ++b) {
    set_related(b, i, j, (f >> sig_.atom_bit(b, 0)) & 1);
    if (!sig_.symmetric(b)) set_related(b, j, i, (f >> sig_.atom_bit(b, 1)) & 1);
  }
}

FiniteStructure FiniteStructure::restrict_to_prefix(int m) const {
  std::vector<int> verts(static_cast<size_t>(m));
  std::iota(verts.begin(), verts.end(), 0);
  return restrict_to(verts);
}

FiniteStructure FiniteStructure::restrict_to(const std::vector<int>& vertices) const {
  FiniteStructure out(sig_);
  for (int v : vertices) out.add_vertex(unary_of(v));
  for (int b = 0; b < sig_.binary_count(); ++b)
    for (size_t i = 0; i < vertices.size(); ++i)
      for (size_t j = 0; j < vertices.size(); ++j)
        out.set_related(b, static_cast<int>(i), static_cast<int>(j),
                        related(b, vertices[i], vertices[j]));
  return out;
}

std::vector<Violation> validate_structure(const Signature& sig, const FiniteStructure& s) {
  std::vector<Violation> out;
  if (s.sig() != sig) {
    out.push_back({"structure signature differs from the given signature"});
    return out;
  }
  for (int v = 0; v < s.size(); ++v) {
    if (s.unary_of(v) < 0 || s.unary_of(v) >= sig.unary_count())
      out.push_back({"vertex " + std::to_string(v) + ": unary symbol index out of range (exactly one unary required)"});
  }
  for (int b = 0; b < sig.binary_count(); ++b) {
    for (int v = 0; v < s.size(); ++v) {
      if (s.related(b, v, v))
        out.push_back({"vertex " + std::to_string(v) + ": binary relation " + sig.binary_name(b) + " is reflexive here; loops are not allowed"});
    }
    if (sig.symmetric(b)) {
      for (int i = 0; i < s.size(); ++i)
        for (int j = 0; j < s.size(); ++j)
          if (s.related(b, i, j) != s.related(b, j, i))
            out.push_back({"symmetric symbol " + sig.binary_name(b) + " has an asymmetric entry at (" +
                           std::to_string(i) + "," + std::to_string(j) + ")"});
    }
  }
  return out;
}

bool ordered_isomorphic(const FiniteStructure& a, const FiniteStructure& b) {
  if (a.sig() != b.sig()) return false;
  if (a.size() != b.size()) return false;
  for (int v = 0; v < a.size(); ++v)
    if (a.unary_of(v) != b.unary_of(v)) return false;
  for (int s = 0; s < a.sig().binary_count(); ++s)
    for (int i = 0; i < a.size(); ++i)
      for (int j = 0; j < a.size(); ++j)
        if (a.related(s, i, j) != b.related(s, i, j)) return false;
  return true;
}

std::vector<FiniteStructure> enumeration_classes(const FiniteStructure& s) {
  std::vector<int> perm(static_cast<size_t>(s.size()));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<FiniteStructure> out;
  do {
    FiniteStructure r = s.restrict_to(perm);
    bool fresh = true;
    for (const auto& seen : out)
      if (ordered_isomorphic(seen, r)) { fresh = false; break; }
    if (fresh) out.push_back(std::move(r));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace brd
