#pragma once

#include <initializer_list>
#include <variant>
#include <vector>

#include "presyn/geometry/polytope.hpp"

namespace presyn::sys {

/// Subset of a finite state space {0, ..., n-1}, represented as a membership
/// mask. All operations are exact.
class FiniteSet {
 public:
  FiniteSet() = default;
  explicit FiniteSet(int universe) : mask_(universe, 0) {}

  static FiniteSet full(int universe) {
    FiniteSet s(universe);
    std::fill(s.mask_.begin(), s.mask_.end(), 1);
    return s;
  }
  static FiniteSet of(int universe, std::initializer_list<int> ids) {
    FiniteSet s(universe);
    for (int i : ids) s.insert(i);
    return s;
  }
  static FiniteSet from_ids(int universe, const std::vector<int>& ids) {
    FiniteSet s(universe);
    for (int i : ids) s.insert(i);
    return s;
  }

  int universe() const { return static_cast<int>(mask_.size()); }
  bool contains(int i) const { return mask_[i] != 0; }
  void insert(int i) { mask_.at(i) = 1; }
  void erase(int i) { mask_.at(i) = 0; }
  int count() const;
  bool empty() const { return count() == 0; }
  std::vector<int> ids() const;

  bool is_subset_of(const FiniteSet& o) const;
  FiniteSet intersect(const FiniteSet& o) const;
  bool operator==(const FiniteSet& o) const { return mask_ == o.mask_; }

 private:
  std::vector<unsigned char> mask_;
};

/// A state set is either finite (exact) or a polytope (tolerance-based).
using StateSet = std::variant<FiniteSet, geom::Polytope>;

bool ss_is_finite(const StateSet& s);
const FiniteSet& ss_fin(const StateSet& s);
const geom::Polytope& ss_pol(const StateSet& s);

StateSet ss_intersect(const StateSet& a, const StateSet& b,
                      const geom::Tol& tol = {});
bool ss_is_subset(const StateSet& a, const StateSet& b, double eps);
bool ss_is_empty(const StateSet& a, const geom::Tol& tol = {});
bool ss_equal(const StateSet& a, const StateSet& b, double eps);

}  // namespace presyn::sys
