#pragma once

#include <stdexcept>
#include <string>

namespace belllab {

// Base class for all library errors. Everything thrown on purpose derives
// from this, so callers can separate belllab failures from the rest.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A caller-supplied value violates a documented precondition.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Conditioning on an outcome whose probability is zero. Never silently
// treated as 0/0 = 0; the caller decides whether to skip the point.
class ZeroConditioningEvent : public Error {
 public:
  using Error::Error;
};

// Every conditioning event on the audit grid had zero probability, so the
// audit has nothing to report on.
class DegenerateGrid : public Error {
 public:
  using Error::Error;
};

// A partition cell carries zero weight under the source ensemble.
class EmptyCell : public Error {
 public:
  using Error::Error;
};

// Two state ensembles cannot be compared pointwise (different state
// spaces, or one of them has no enumerable support).
class IncomparableEnsembles : public Error {
 public:
  using Error::Error;
};

// A trial-log query matched no records.
class NoMatchingTrials : public Error {
 public:
  using Error::Error;
};

// An enumeration would exceed the configured size cap.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

}  // namespace belllab
