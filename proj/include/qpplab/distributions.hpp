#pragma once

namespace qpplab::dist {

/// Regularized incomplete beta I_x(a, b), evaluated by the modified Lentz
/// continued fraction, using the symmetry I_x(a,b) = 1 − I_{1−x}(b,a) on the
/// side where the fraction converges fastest.
double incomplete_beta(double a, double b, double x);

/// P(|T| > |t|) for Student's t with `df` degrees of freedom.
double student_t_two_tailed(double t, double df);

/// P(F > f) for the F distribution with (d1, d2) degrees of freedom.
double f_survival(double f, double d1, double d2);

/// P(|Z| > |z|) for a standard normal.
double normal_two_tailed(double z);

}  // namespace qpplab::dist
