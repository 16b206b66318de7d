#include "belllab/joint_dist.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "belllab/errors.hpp"
#include "belllab/tolerances.hpp"

namespace belllab {

JointOutcomeDist::JointOutcomeDist(double pp, double pm, double mp, double mm)
    : table_{pp, pm, mp, mm} {
  double sum = 0.0;
  for (double& entry : table_) {
    if (!(entry >= -kExactTol && entry <= 1.0 + kExactTol)) {
      throw InvalidParameter("joint table entry outside [0, 1]: " +
                             std::to_string(entry));
    }
    sum += entry;
    entry = std::clamp(entry, 0.0, 1.0);
  }
  if (!(std::fabs(sum - 1.0) <= kExactTol)) {
    throw InvalidParameter("joint table entries must sum to 1, got " +
                           std::to_string(sum));
  }
}

JointOutcomeDist JointOutcomeDist::point_mass(Outcome a, Outcome b) {
  std::array<double, 4> t{0.0, 0.0, 0.0, 0.0};
  t[static_cast<std::size_t>(index(a, b))] = 1.0;
  return JointOutcomeDist(t[0], t[1], t[2], t[3]);
}

OutcomeDist JointOutcomeDist::marginal_a() const {
  return OutcomeDist{table_[0] + table_[1], table_[2] + table_[3]};
}

OutcomeDist JointOutcomeDist::marginal_b() const {
  return OutcomeDist{table_[0] + table_[2], table_[1] + table_[3]};
}

OutcomeDist JointOutcomeDist::conditional_a_given_b(Outcome b) const {
  const double pb = marginal_b().p(b);
  if (!(pb > 0.0)) {
    throw ZeroConditioningEvent(
        "conditioning outcome on wing B has zero probability");
  }
  return OutcomeDist{p(Outcome::plus(), b) / pb, p(Outcome::minus(), b) / pb};
}

OutcomeDist JointOutcomeDist::conditional_b_given_a(Outcome a) const {
  const double pa = marginal_a().p(a);
  if (!(pa > 0.0)) {
    throw ZeroConditioningEvent(
        "conditioning outcome on wing A has zero probability");
  }
  return OutcomeDist{p(a, Outcome::plus()) / pa, p(a, Outcome::minus()) / pa};
}

double JointOutcomeDist::expectation_product() const {
  return table_[0] - table_[1] - table_[2] + table_[3];
}

}  // namespace belllab
