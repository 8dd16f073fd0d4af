#include "fraisse.hpp"

#include <algorithm>
#include <stdexcept>

namespace brd {

namespace {

std::vector<std::string> default_unaries(int k) {
  std::vector<std::string> u;
  if (k == 1) {
    u.push_back("V");
  } else {
    for (int i = 0; i < k; ++i) u.push_back("P" + std::to_string(i));
  }
  return u;
}

}  // namespace

ClassTemplate ClassTemplate::unrestricted(std::vector<std::string> binary,
                                          std::vector<bool> symmetric) {
  Signature sig(default_unaries(1), std::move(binary), std::move(symmetric));
  return ClassTemplate(TemplateKind::Unrestricted, std::move(sig), "unrestricted", 0);
}

ClassTemplate ClassTemplate::rado() {
  Signature sig(default_unaries(1), {"E"}, {true});
  return ClassTemplate(TemplateKind::Unrestricted, std::move(sig), "rado", 0);
}

ClassTemplate ClassTemplate::linear_order() {
  Signature sig(default_unaries(1), {"<"}, {false});
  return ClassTemplate(TemplateKind::LinearOrder, std::move(sig), "q", 0);
}

ClassTemplate ClassTemplate::linear_order_dense(int classes) {
  if (classes < 2) throw std::invalid_argument("q_n requires n >= 2 classes");
  Signature sig(default_unaries(classes), {"<"}, {false});
  return ClassTemplate(TemplateKind::LinearOrderDense, std::move(sig),
                       "q_" + std::to_string(classes), classes);
}

ClassTemplate ClassTemplate::k_partite(int parts) {
  if (parts < 2) throw std::invalid_argument("kpartite requires >= 2 parts");
  Signature sig(default_unaries(parts), {"E"}, {true});
  return ClassTemplate(TemplateKind::KPartite, std::move(sig),
                       "kpartite_" + std::to_string(parts), parts);
}

std::optional<ClassTemplate> ClassTemplate::by_name(const std::string& name) {
  if (name == "rado") return rado();
  if (name == "q") return linear_order();
  auto parse_suffix = [](const std::string& s, const std::string& prefix) -> int {
    if (s.rfind(prefix, 0) != 0) return -1;
    try {
      size_t pos = 0;
      int v = std::stoi(s.substr(prefix.size()), &pos);
      if (pos != s.size() - prefix.size()) return -1;
      return v;
    } catch (...) {
      return -1;
    }
  };
  if (int k = parse_suffix(name, "q_"); k >= 2) return linear_order_dense(k);
  if (int k = parse_suffix(name, "kpartite_"); k >= 2) return k_partite(k);
  if (name.rfind("unrestricted:", 0) == 0) {
    std::string spec = name.substr(std::string("unrestricted:").size());
    std::vector<std::string> syms;
    std::vector<bool> symm;
    std::string cur;
    auto flush = [&]() {
      if (cur.empty()) return false;
      bool directed = cur.back() == '*';
      if (directed) cur.pop_back();
      if (cur.empty()) return false;
      syms.push_back(cur);
      symm.push_back(!directed);
      cur.clear();
      return true;
    };
    for (char c : spec) {
      if (c == ',') {
        if (!flush()) return std::nullopt;
      } else {
        cur += c;
      }
    }
    if (!flush() || syms.empty()) return std::nullopt;
    try {
      return unrestricted(std::move(syms), std::move(symm));
    } catch (...) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::vector<std::string> ClassTemplate::known_names() {
  return {"rado", "q", "q_<k>", "kpartite_<k>", "unrestricted:<sym>[*][,...]"};
}

std::vector<Fragment> ClassTemplate::admissible_fragments(const FiniteStructure& base, int m,
                                                          int unary,
                                                          const std::vector<Fragment>& prefix) const {
  if (m > static_cast<int>(prefix.size()))
    throw std::invalid_argument("admissible_fragments: prefix shorter than parameter index");
  std::vector<Fragment> out;
  switch (kind_) {
    case TemplateKind::Unrestricted: {
      Fragment all = static_cast<Fragment>((1u << sig_.atom_count()) - 1u);
      for (Fragment f = 0; f <= all; ++f) out.push_back(f);
      std::sort(out.begin(), out.end(),
                [&](Fragment a, Fragment b) { return sig_.compare_fragments(a, b) < 0; });
      break;
    }
    case TemplateKind::KPartite: {
      if (unary < 0)
        throw std::invalid_argument("kpartite admissibility needs the candidate's part");
      Fragment edge = static_cast<Fragment>(1u << sig_.atom_bit(0, 0));
      out.push_back(0);
      if (base.unary_of(m) != unary) out.push_back(edge);
      break;
    }
    case TemplateKind::LinearOrder:
    case TemplateKind::LinearOrderDense: {
      Fragment below = static_cast<Fragment>(1u << sig_.atom_bit(0, 1));  // x < v_m
      Fragment above = static_cast<Fragment>(1u << sig_.atom_bit(0, 0));  // v_m < x
      bool below_ok = true, above_ok = true;
      for (int i = 0; i < m; ++i) {
        bool x_below_vi = (prefix[static_cast<size_t>(i)] >> sig_.atom_bit(0, 1)) & 1;
        if (x_below_vi) {
          // x < v_i: if v_i < v_m then x < v_m is forced.
          if (base.related(0, i, m)) above_ok = false;
        } else {
          // v_i < x: if v_m < v_i then v_m < x is forced.
          if (base.related(0, m, i)) below_ok = false;
        }
      }
      if (below_ok) out.push_back(below);
      if (above_ok) out.push_back(above);
      std::sort(out.begin(), out.end(),
                [&](Fragment a, Fragment b) { return sig_.compare_fragments(a, b) < 0; });
      break;
    }
  }
  return out;
}

bool ClassTemplate::admits(const FiniteStructure& base, const OneType& t) const {
  if (static_cast<int>(t.frags.size()) != base.size()) return false;
  if (t.unary >= sig_.unary_count()) return false;
  if (t.unary < 0 && kind_ == TemplateKind::KPartite) return false;
  std::vector<Fragment> prefix;
  prefix.reserve(t.frags.size());
  for (int m = 0; m < base.size(); ++m) {
    auto opts = admissible_fragments(base, m, t.unary, prefix);
    if (std::find(opts.begin(), opts.end(), t.frags[static_cast<size_t>(m)]) == opts.end())
      return false;
    prefix.push_back(t.frags[static_cast<size_t>(m)]);
  }
  return true;
}

std::vector<OneType> ClassTemplate::one_types_over(const FiniteStructure& base,
                                                   bool reduct) const {
  std::vector<int> unaries;
  if (reduct) {
    unaries.push_back(-1);
  } else {
    unaries = admissible_unaries(base);
  }
  std::vector<OneType> out;
  std::vector<Fragment> prefix;
  for (int u : unaries) {
    if (base.size() == 0) {
      out.push_back(OneType{u, {}});
      continue;
    }
    // depth-first over parameters, emitting fragments in lex order
    prefix.clear();
    struct Frame {
      std::vector<Fragment> options;
      size_t next = 0;
    };
    std::vector<Frame> stack;
    stack.push_back({admissible_fragments(base, 0, u, prefix), 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next >= f.options.size()) {
        stack.pop_back();
        if (!prefix.empty()) prefix.pop_back();
        continue;
      }
      Fragment chosen = f.options[f.next++];
      prefix.push_back(chosen);
      if (static_cast<int>(prefix.size()) == base.size()) {
        out.push_back(OneType{u, prefix});
        prefix.pop_back();
      } else {
        stack.push_back({admissible_fragments(base, static_cast<int>(prefix.size()), u, prefix), 0});
      }
    }
  }
  return out;
}

FiniteStructure ClassTemplate::realize(const FiniteStructure& base, const OneType& t,
                                       int unary_override) const {
  if (static_cast<int>(t.frags.size()) != base.size())
    throw std::invalid_argument("realize: type length does not match base universe");
  int unary = t.unary >= 0 ? t.unary : unary_override;
  if (unary < 0 || unary >= sig_.unary_count())
    throw std::invalid_argument("realize: no unary symbol for the new vertex");
  FiniteStructure out = base;
  int v = out.add_vertex(unary);
  for (int i = 0; i < base.size(); ++i) out.apply_fragment(i, v, t.frags[static_cast<size_t>(i)]);
  return out;
}

std::vector<int> ClassTemplate::admissible_unaries(const FiniteStructure&) const {
  std::vector<int> out;
  for (int u = 0; u < sig_.unary_count(); ++u) out.push_back(u);
  return out;
}

int compare_types(const Signature& sig, const OneType& a, const OneType& b) {
  if (a.unary != b.unary) return a.unary < b.unary ? -1 : 1;
  size_t n = std::min(a.frags.size(), b.frags.size());
  for (size_t i = 0; i < n; ++i) {
    int c = sig.compare_fragments(a.frags[i], b.frags[i]);
    if (c != 0) return c;
  }
  if (a.frags.size() != b.frags.size()) return a.frags.size() < b.frags.size() ? -1 : 1;
  return 0;
}

}  // namespace brd
