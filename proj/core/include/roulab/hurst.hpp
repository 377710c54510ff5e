#pragma once

#include <stdexcept>

namespace roulab {

/// Self-similarity index pair for the second-chaos construction.
///
/// The process is indexed by H in the open interval (1/2, 1); every kernel
/// evaluation happens at the derived index Hprime = (H + 1)/2 in (3/4, 1).
struct HurstParams {
    double H;
    double Hprime;

    explicit HurstParams(double h) : H(h), Hprime(0.5 * (h + 1.0)) {
        if (!(h > 0.5 && h < 1.0)) {
            throw std::domain_error("HurstParams: H must lie in (1/2, 1) exclusive");
        }
    }
};

}  // namespace roulab
