#pragma once

namespace nashvar {

// Standard normal density.
double norm_pdf(double x);

// Standard normal CDF, absolute error below 1e-14 (erfc based).
double norm_cdf(double x);

// Inverse standard normal CDF on (0,1). Rational initial guess refined by one
// Halley step; absolute error well below 1e-9. Throws std::invalid_argument
// outside (0,1).
double norm_quantile(double p);

} // namespace nashvar
