#pragma once

#include <cmath>

namespace hyerslab {

/// Neumaier's variant of Kahan summation; also correct when a term is
/// larger in magnitude than the running sum.
template <typename Real>
class CompensatedSum {
 public:
  CompensatedSum& operator+=(Real value) noexcept {
    const Real t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  Real value() const noexcept { return sum_ + compensation_; }

 private:
  Real sum_{0};
  Real compensation_{0};
};

}  // namespace hyerslab
