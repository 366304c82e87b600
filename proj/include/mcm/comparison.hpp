#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcm {

// How a relational operator on uncertain values is resolved to one bool.
enum class ComparisonPolicy {
  Unanimous,  // every sample must agree, otherwise UncertainComparisonError
  ByMean,     // compare the sample means
  Forbidden,  // always throws; use lift_unary / lift_nary instead
};

enum class Relation { Less, LessEqual, Greater, GreaterEqual, Equal };

std::string_view to_string(ComparisonPolicy policy) noexcept;
std::string_view to_string(Relation relation) noexcept;

// Process-wide default used by the overloaded operators. Set it once at
// startup; reads and writes are atomic.
ComparisonPolicy default_comparison_policy() noexcept;
void set_default_comparison_policy(ComparisonPolicy policy) noexcept;

// Thrown when a branch would depend on an uncertain value.
class UncertainComparisonError : public std::domain_error {
 public:
  UncertainComparisonError(Relation relation, double fraction_true);
  explicit UncertainComparisonError(const std::string& message);

  // Fraction of samples for which the relation held (NaN for Forbidden).
  double fraction_true() const noexcept { return fraction_true_; }

 private:
  double fraction_true_;
};

}  // namespace mcm
