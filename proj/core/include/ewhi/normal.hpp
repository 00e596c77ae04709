#pragma once

namespace ewhi {

/// Standard normal CDF, via erfc (accurate in both tails).
double normal_cdf(double z);

/// log of the standard normal CDF; uses the asymptotic tail series below z = -30.
double log_normal_cdf(double z);

double normal_pdf(double z);

/// Integral of Phi((t - mean) / sd) for t from -infinity to b.
double gaussian_partial_moment(double b, double mean, double sd);

}  // namespace ewhi
