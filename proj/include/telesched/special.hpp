#pragma once

namespace telesched::special {

/// exp(-z) * I_1(z) for z >= 0, I_1 the modified Bessel function of the
/// first kind. Ascending series up to z = 700, Hankel asymptotic expansion
/// beyond; relative error below 1e-14 on both branches.
double bessel_i1_scaled(double z);

/// I_1(z); overflows to +inf for z above ~713.
double bessel_i1(double z);

}  // namespace telesched::special
