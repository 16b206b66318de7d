#pragma once

#include <array>

#include "belllab/outcome.hpp"

namespace belllab {

// Distribution of one wing's outcome.
struct OutcomeDist {
  double p_plus;
  double p_minus;

  double p(Outcome o) const { return o == Outcome::plus() ? p_plus : p_minus; }
};

// Probability table over the four outcome pairs of the two wings.
// Invariants: every entry in [0, 1] (inputs tolerate rounding noise of
// 1e-12 and are clamped), entries sum to 1 within 1e-12.
class JointOutcomeDist {
 public:
  // Entries in the order (+,+), (+,-), (-,+), (-,-).
  JointOutcomeDist(double pp, double pm, double mp, double mm);

  static JointOutcomeDist point_mass(Outcome a, Outcome b);

  double p(Outcome a, Outcome b) const { return table_[index(a, b)]; }
  const std::array<double, 4>& table() const { return table_; }

  OutcomeDist marginal_a() const;
  OutcomeDist marginal_b() const;

  // Throw ZeroConditioningEvent when the conditioning outcome has zero
  // probability.
  OutcomeDist conditional_a_given_b(Outcome b) const;
  OutcomeDist conditional_b_given_a(Outcome a) const;

  // E[A*B] for this table.
  double expectation_product() const;

  static int index(Outcome a, Outcome b) {
    return (a == Outcome::plus() ? 0 : 2) + (b == Outcome::plus() ? 0 : 1);
  }

 private:
  std::array<double, 4> table_;
};

}  // namespace belllab
