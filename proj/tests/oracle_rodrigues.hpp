#pragma once

// Independent evaluation of the Gegenbauer polynomials from the Rodrigues
// formula, with the k-th derivative expanded symbolically by the Leibniz rule:
//
//   C_k^nu(t) = (-1)^k / (k! 2^k) * (2nu)_k / (nu+1/2)_k
//               * D^k[(1-t^2)^{k+beta}] / (1-t^2)^beta,     beta = nu - 1/2
//
//   D^k[(1-t)^{k+b}(1+t)^{k+b}]
//     = sum_i C(k,i) (-1)^i ff(k+b,i) ff(k+b,k-i) (1-t)^{k+b-i} (1+t)^{b+i}
//
// The alternating sum loses ~30+ decimal digits at k=50, so it is evaluated
// in 100-digit floats. Test oracle only; the library uses the recurrence.

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using bigfloat = boost::multiprecision::cpp_bin_float_100;

inline bigfloat falling(const bigfloat& x, int m) {
    bigfloat r = 1;
    for (int i = 0; i < m; ++i) r *= (x - i);
    return r;
}

inline double gegenbauer_rodrigues(int k, double nu, double t) {
    bigfloat beta = bigfloat(nu) - bigfloat(1) / 2;
    bigfloat tt(t);
    bigfloat one_m = 1 - tt, one_p = 1 + tt;
    bigfloat sum = 0;
    bigfloat binom = 1;  // C(k,0)
    for (int i = 0; i <= k; ++i) {
        bigfloat term = binom * falling(bigfloat(k) + beta, i) * falling(bigfloat(k) + beta, k - i) *
                        pow(one_m, k - i) * pow(one_p, i);
        sum += (i % 2 == 0) ? term : -term;
        binom = binom * (k - i) / (i + 1);
    }
    bigfloat poch_num = 1, poch_den = 1, fact = 1;
    for (int i = 0; i < k; ++i) {
        poch_num *= 2 * bigfloat(nu) + i;
        poch_den *= bigfloat(nu) + bigfloat(1) / 2 + i;
        fact *= i + 1;
    }
    bigfloat pref = poch_num / (poch_den * fact * pow(bigfloat(2), k));
    bigfloat result = ((k % 2 == 0) ? pref : -pref) * sum;
    return static_cast<double>(result);
}

}  // namespace oracle
