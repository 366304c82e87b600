#include "mcm/comparison.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mcm {

namespace {

std::atomic<ComparisonPolicy> g_default_policy{ComparisonPolicy::Unanimous};

std::string describe(Relation relation, double fraction_true) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "uncertain comparison: relation '%s' holds for %.1f%% of samples and fails "
                "for %.1f%%; branch on a lifted function (lift_unary/lift_nary) or use "
                "ComparisonPolicy::ByMean",
                std::string(to_string(relation)).c_str(), 100.0 * fraction_true,
                100.0 * (1.0 - fraction_true));
  return buf;
}

}  // namespace

std::string_view to_string(ComparisonPolicy policy) noexcept {
  switch (policy) {
    case ComparisonPolicy::Unanimous: return "unanimous";
    case ComparisonPolicy::ByMean: return "by-mean";
    case ComparisonPolicy::Forbidden: return "forbidden";
  }
  return "?";
}

std::string_view to_string(Relation relation) noexcept {
  switch (relation) {
    case Relation::Less: return "<";
    case Relation::LessEqual: return "<=";
    case Relation::Greater: return ">";
    case Relation::GreaterEqual: return ">=";
    case Relation::Equal: return "==";
  }
  return "?";
}

ComparisonPolicy default_comparison_policy() noexcept {
  return g_default_policy.load(std::memory_order_relaxed);
}

void set_default_comparison_policy(ComparisonPolicy policy) noexcept {
  g_default_policy.store(policy, std::memory_order_relaxed);
}

UncertainComparisonError::UncertainComparisonError(Relation relation, double fraction_true)
    : std::domain_error(describe(relation, fraction_true)), fraction_true_(fraction_true) {}

UncertainComparisonError::UncertainComparisonError(const std::string& message)
    : std::domain_error(message), fraction_true_(std::numeric_limits<double>::quiet_NaN()) {}

}  // namespace mcm
