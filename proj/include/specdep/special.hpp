#ifndef SPECDEP_SPECIAL_HPP
#define SPECDEP_SPECIAL_HPP

namespace specdep {

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation, absolute accuracy around 1e-14 over (0,1).
double regularized_incomplete_beta(double a, double b, double x);

// Student t distribution function with nu > 0 degrees of freedom.
double student_t_cdf(double x, double nu);

}  // namespace specdep

#endif  // SPECDEP_SPECIAL_HPP
