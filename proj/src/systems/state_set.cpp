#include "presyn/systems/state_set.hpp"

#include <algorithm>
#include <numeric>

#include "presyn/errors.hpp"

namespace presyn::sys {

int FiniteSet::count() const {
  return static_cast<int>(
      std::count(mask_.begin(), mask_.end(), static_cast<unsigned char>(1)));
}

std::vector<int> FiniteSet::ids() const {
  std::vector<int> out;
  for (int i = 0; i < universe(); ++i)
    if (mask_[i]) out.push_back(i);
  return out;
}

bool FiniteSet::is_subset_of(const FiniteSet& o) const {
  if (universe() != o.universe())
    throw DimensionError("finite set universe mismatch");
  for (int i = 0; i < universe(); ++i)
    if (mask_[i] && !o.mask_[i]) return false;
  return true;
}

FiniteSet FiniteSet::intersect(const FiniteSet& o) const {
  if (universe() != o.universe())
    throw DimensionError("finite set universe mismatch");
  FiniteSet r(universe());
  for (int i = 0; i < universe(); ++i) r.mask_[i] = mask_[i] & o.mask_[i];
  return r;
}

bool ss_is_finite(const StateSet& s) {
  return std::holds_alternative<FiniteSet>(s);
}

const FiniteSet& ss_fin(const StateSet& s) {
  if (!ss_is_finite(s)) throw Error("state set is not finite");
  return std::get<FiniteSet>(s);
}

const geom::Polytope& ss_pol(const StateSet& s) {
  if (ss_is_finite(s)) throw Error("state set is not polytopic");
  return std::get<geom::Polytope>(s);
}

StateSet ss_intersect(const StateSet& a, const StateSet& b,
                      const geom::Tol& tol) {
  if (ss_is_finite(a) != ss_is_finite(b))
    throw DimensionError("state set kind mismatch");
  if (ss_is_finite(a)) return ss_fin(a).intersect(ss_fin(b));
  return geom::intersect(ss_pol(a), ss_pol(b), tol);
}

bool ss_is_subset(const StateSet& a, const StateSet& b, double eps) {
  if (ss_is_finite(a) != ss_is_finite(b))
    throw DimensionError("state set kind mismatch");
  if (ss_is_finite(a)) return ss_fin(a).is_subset_of(ss_fin(b));
  return geom::is_subset(ss_pol(a), ss_pol(b), eps);
}

bool ss_is_empty(const StateSet& a, const geom::Tol& tol) {
  if (ss_is_finite(a)) return ss_fin(a).empty();
  return geom::is_empty(ss_pol(a), tol);
}

bool ss_equal(const StateSet& a, const StateSet& b, double eps) {
  if (ss_is_finite(a) != ss_is_finite(b))
    throw DimensionError("state set kind mismatch");
  if (ss_is_finite(a)) return ss_fin(a) == ss_fin(b);
  return geom::set_equal(ss_pol(a), ss_pol(b), eps);
}

}  // namespace presyn::sys
