#include "qsturm/angle.hpp"

#include <algorithm>

namespace qsturm {

double AngleTrack::at(double x) const {
  if (x <= xs_.front()) return angles_.front();
  if (x >= xs_.back()) return angles_.back();
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - xs_.begin());
  const double t = (x - xs_[k - 1]) / (xs_[k] - xs_[k - 1]);
  return angles_[k - 1] + t * (angles_[k] - angles_[k - 1]);
}

}  // namespace qsturm
