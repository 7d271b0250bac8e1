#pragma once

// Order-independent floating-point summation: keeps the running total as
// non-overlapping partials (Shewchuk) and rounds once on read, so any
// regrouping of the same addends yields the same double.

#include <vector>

namespace xdw {

class ExactSum {
public:
  void add(double x);
  void merge(const ExactSum &other);
  /// Correctly rounded sum of everything added so far.
  double value() const;

private:
  std::vector<double> partials_;
};

} // namespace xdw
