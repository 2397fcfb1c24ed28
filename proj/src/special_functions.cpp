#include "pathsum/special_functions.hpp"

#include <cmath>
#include <string>

#include "pathsum/errors.hpp"

namespace pathsum {

namespace {
constexpr double kRelStop = 1e-14;
constexpr int kMaxTerms = 20000;

bool non_positive_integer(double b) {
    return b <= 0.0 && b == std::floor(b);
}
} // namespace

double hyp0f2(double b1, double b2, double z) {
    if (!std::isfinite(b1) || !std::isfinite(b2) || !std::isfinite(z))
        throw InputError("hyp0f2 arguments must be finite");
    if (non_positive_integer(b1) || non_positive_integer(b2))
        throw InputError("hyp0f2 parameter pole: b = " +
                         std::to_string(non_positive_integer(b1) ? b1 : b2));
    double sum = 1.0;
    double term = 1.0;
    for (int k = 0; k < kMaxTerms; ++k) {
        term *= z / ((b1 + k) * (b2 + k) * (k + 1));
        sum += term;
        if (std::abs(term) <= kRelStop * std::abs(sum)) return sum;
    }
    throw NumericError("hyp0f2 series did not converge");
}

double bessel_i(int nu, double x) {
    if (!std::isfinite(x)) throw InputError("bessel_i argument must be finite");
    if (nu < 0) nu = -nu;
    if (x == 0.0) return nu == 0 ? 1.0 : 0.0;
    const bool negate = x < 0.0 && (nu % 2 == 1);
    const double ax = std::abs(x);
    // Series in units of the leading term keeps intermediates order-1.
    const double q = 0.25 * ax * ax;
    double sum = 1.0;
    double term = 1.0;
    for (int k = 0; k < kMaxTerms; ++k) {
        term *= q / ((k + 1.0) * (nu + k + 1.0));
        sum += term;
        if (term <= kRelStop * sum) {
            const double lead =
                std::exp(nu * std::log(0.5 * ax) - std::lgamma(nu + 1.0));
            const double value = lead * sum;
            return negate ? -value : value;
        }
    }
    throw NumericError("bessel_i series did not converge");
}

} // namespace pathsum
