#pragma once

#include <array>

#include "belllab/errors.hpp"

namespace belllab {

// Measurement outcome of one wing: exactly +1 or -1.
class Outcome {
 public:
  static constexpr Outcome plus() { return Outcome(+1, Tag{}); }
  static constexpr Outcome minus() { return Outcome(-1, Tag{}); }

  explicit Outcome(int value) : value_(value) {
    if (value != +1 && value != -1) {
      throw InvalidParameter("Outcome must be +1 or -1");
    }
  }

  int value() const { return value_; }
  Outcome flipped() const { return Outcome(-value_); }

  bool operator==(const Outcome&) const = default;

 private:
  struct Tag {};
  constexpr Outcome(int value, Tag) : value_(value) {}
  int value_;
};

// Canonical iteration order for outcome loops and table layouts.
inline constexpr std::array<Outcome, 2> kOutcomeOrder = {Outcome::plus(),
                                                         Outcome::minus()};

// Pair of outcomes (wing A, wing B).
struct OutcomePair {
  Outcome a;
  Outcome b;

  bool operator==(const OutcomePair&) const = default;
};

}  // namespace belllab
