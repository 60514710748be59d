#pragma once

namespace tcbuf::normal {

double pdf(double x) noexcept;
double cdf(double x) noexcept;

/// Inverse of cdf on (0, 1). Relative error below 1e-14 over (1e-300, 1 - 1e-16).
/// Throws DomainError outside the open unit interval.
double quantile(double p);

}  // namespace tcbuf::normal
