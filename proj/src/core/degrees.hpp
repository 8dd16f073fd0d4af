#ifndef BRD_DEGREES_HPP
#define BRD_DEGREES_HPP

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "antichain.hpp"
#include "coding_tree.hpp"
#include "similarity.hpp"

namespace brd {

// All diagonal antichains of coding nodes of `host` within the first `depth`
// levels whose represented substructure is ordered-isomorphic to `target`.
// Each antichain is the increasing list of coding indices.
std::vector<std::vector<int>> enumerate_antichains(const FiniteStructure& target,
                                                   const CodingTree& host, int depth);

Subtree antichain_closure(const CodingTree& host, const std::vector<int>& coding_levels);

struct DegreeResult {
  FiniteStructure target;
  std::vector<std::pair<int, int>> trace;  // (depth, distinct similarity types)
  int degree = 0;
  long census_size = 0;
  bool stabilized = false;
  std::set<std::string> codes;  // serialized similarity codes at the last depth
  std::string schedule_fingerprint;
};

// Similarity-type count of the diagonal antichains representing the target,
// per depth in the schedule; "stabilized" reports two consecutive agreeing
// depths.  Deduplication is by canonical code.
DegreeResult big_ramsey_degree(const FiniteStructure& target, const ClassTemplate& tmpl,
                               TreeMode mode, const std::vector<int>& depths,
                               ScheduleKind sched = ScheduleKind::LexMin);

// Aggregate over the enumeration classes of the unlabeled target: the big
// Ramsey degree of the isomorphism type is the sum over the distinct
// enumerations (copies of any enumeration are counted by the theorem).
struct AggregateDegree {
  int total = 0;
  bool stabilized = false;
  std::vector<DegreeResult> parts;
};
AggregateDegree big_ramsey_degree_unlabeled(const FiniteStructure& target,
                                            const ClassTemplate& tmpl, TreeMode mode,
                                            const std::vector<int>& depths,
                                            ScheduleKind sched = ScheduleKind::LexMin);

// A coloring of concrete copies (antichains given by coding levels).
using CopyColoring = std::function<int(const std::vector<int>&)>;

struct RecoveryResult {
  bool found = false;
  std::string note;                   // honest failure reason when !found
  std::vector<int> sub_dca;           // chosen coding levels of the host
  int color = -1;                     // the single color on the fixed type
  long copies_in_sub = 0;             // census of the fixed type inside
};

// Desk-scale shadow of the degree-recovery pipeline: fix one similarity type
// (the code of `pattern`), then search for a sub-antichain of the host coding
// spine, structure-similar to its own initial segment, on which the coloring
// is constant over the copies carrying that code.
RecoveryResult degree_recovery_demo(const FiniteStructure& target, const CodingTree& host,
                                    int depth, const std::vector<int>& pattern,
                                    const CopyColoring& coloring, int sub_size);

}  // namespace brd

#endif
