#include "roulab/kernel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "roulab/io.hpp"

namespace roulab {

namespace {

/// I(t, s) = int_s^t (u-s)^{H'-3/2} u^{H'-1/2} du.
///
/// Substituting u = s + v^2 gives int_0^b 2 v^{2H'-2} (s+v^2)^{H'-1/2} dv,
/// b = sqrt(t-s). The remaining endpoint power v^{2H'-2} is peeled off in
/// closed form: with q = H'-1/2,
///   2 v^{2H'-2} (s+v^2)^q = 2 v^{2H'-2} [(s+v^2)^q - s^q] + 2 s^q v^{2H'-2},
/// where the bracket vanishes like v^2 at 0, so the first term is a C^1
/// integrand that adaptive Gauss-Kronrod drives below 1e-12, and the second
/// integrates exactly to 2 s^q b^{2H'-1} / (2H'-1).
double inner_integral(double hprime, double t, double s) {
    const double sigma = 2.0 * hprime - 2.0;  // in (-1/2, 0)
    const double q = hprime - 0.5;
    const double b = std::sqrt(t - s);
    const double sq = std::pow(s, q);
    auto smooth = [&](double v) {
        return 2.0 * std::pow(v, sigma) * (std::pow(s + v * v, q) - sq);
    };
    double regular = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        smooth, 0.0, b, 15, 1e-13);
    double singular = 2.0 * sq * std::pow(b, sigma + 1.0) / (sigma + 1.0);
    return regular + singular;
}

}  // namespace

double kernel_K(const HurstParams& params, const KernelConstants& consts, double t, double s) {
    if (!(s > 0.0) || !(t > 0.0) || s > t) {
        throw std::domain_error("kernel_K: requires 0 < s <= t");
    }
    if (s == t) {
        return 0.0;
    }
    const double hp = params.Hprime;
    return consts.c_hprime * std::pow(s, 0.5 - hp) * inner_integral(hp, t, s);
}

double kernel_dK(const HurstParams& params, const KernelConstants& consts, double u, double s) {
    if (!(s > 0.0) || !(u > 0.0) || s >= u) {
        throw std::domain_error("kernel_dK: requires 0 < s < u");
    }
    const double hp = params.Hprime;
    return consts.c_hprime * std::pow(s, 0.5 - hp) * std::pow(u - s, hp - 1.5) *
           std::pow(u, hp - 0.5);
}

NoiseGram::NoiseGram(const HurstParams& params, std::size_t n_cells) : n(n_cells) {
    if (n_cells == 0) {
        throw std::invalid_argument("NoiseGram: need at least one cell");
    }
    const double twoH = 2.0 * params.H;
    const double norm = twoH * (twoH - 1.0);
    gamma.resize(n);
    // psi(l) is a second difference of l^{2H}; evaluating the three powers
    // directly cancels ~l^2 * eps of relative precision, i.e. below 1e-7
    // even at l ~ 3e4, far inside every tolerance used downstream.
    for (std::size_t l = 0; l < n; ++l) {
        const double ld = static_cast<double>(l);
        const double psi =
            (std::pow(ld + 1.0, twoH) + std::pow(std::abs(ld - 1.0), twoH) -
             2.0 * std::pow(ld, twoH)) /
            norm;
        if (!(psi > 0.0)) {
            throw calibration_error("NoiseGram: nonpositive pair mass entry");
        }
        gamma[l] = std::sqrt(psi);
    }
}

KernelConstants calibrate_constants(const HurstParams& params, int points_per_unit) {
    if (points_per_unit < 16) {
        throw std::invalid_argument("calibrate_constants: points_per_unit must be >= 16");
    }
    const int n = points_per_unit;
    const double delta = 1.0 / n;

    // Scale solve for c_{H'}: the lattice variance of B^{H'}_1 is
    // sum_i K(1, y_i)^2 delta and scales as c^2.
    KernelConstants unit{1.0, 1.0, delta, points_per_unit};
    double fbm_var = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double k = kernel_K(params, unit, 1.0, i * delta);
        fbm_var += k * k * delta;
    }
    if (!(fbm_var > 0.0) || !std::isfinite(fbm_var)) {
        throw calibration_error("calibrate_constants: degenerate lattice fBm variance");
    }
    const double c = 1.0 / std::sqrt(fbm_var);

    // Scale solve for d_H: the lattice variance of Z_1 is the symmetrized
    // double sum d^2 delta^{2H} sum_{k,l<n} 2 gamma(k-l)^2 (Isserlis on the
    // squared chaos field), collapsed over lags to an O(n) pass.
    const NoiseGram gram(params, static_cast<std::size_t>(n));
    double sum = static_cast<double>(n) * gram.psi(0);
    for (std::size_t l = 1; l < gram.n; ++l) {
        sum += 2.0 * static_cast<double>(gram.n - l) * gram.psi(l);
    }
    if (!(sum > 0.0) || !std::isfinite(sum)) {
        throw calibration_error("calibrate_constants: degenerate lattice chaos variance");
    }
    const double d = 1.0 / (std::pow(delta, params.H) * std::sqrt(2.0 * sum));
    return KernelConstants{c, d, delta, points_per_unit};
}

void save_constants(const HurstParams& params, const KernelConstants& consts,
                    const std::filesystem::path& file) {
    nlohmann::json j{{"H", params.H},
                     {"Hprime", params.Hprime},
                     {"c_Hprime", consts.c_hprime},
                     {"d_H", consts.d_h},
                     {"points_per_unit", consts.points_per_unit}};
    atomic_write(file, j.dump(2) + "\n");
}

std::pair<HurstParams, KernelConstants> load_constants(const std::filesystem::path& file) {
    nlohmann::json j;
    {
        std::ifstream in(file);
        if (!in) {
            throw calibration_error("load_constants: cannot open " + file.string());
        }
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw calibration_error("load_constants: invalid JSON in " + file.string() + ": " +
                                    e.what());
        }
    }
    for (const char* key : {"H", "Hprime", "c_Hprime", "d_H", "points_per_unit"}) {
        if (!j.contains(key)) {
            throw calibration_error(std::string("load_constants: missing field ") + key);
        }
    }
    const double h = j["H"].get<double>();
    if (!(h > 0.5 && h < 1.0)) {
        throw calibration_error("load_constants: H out of range (1/2, 1)");
    }
    HurstParams params(h);
    if (std::abs(j["Hprime"].get<double>() - params.Hprime) > 1e-12) {
        throw calibration_error("load_constants: Hprime inconsistent with H");
    }
    const double c = j["c_Hprime"].get<double>();
    const double d = j["d_H"].get<double>();
    const int ppu = j["points_per_unit"].get<int>();
    if (!(c > 0.0) || !(d > 0.0) || ppu < 1) {
        throw calibration_error("load_constants: nonpositive constants or resolution");
    }
    return {params, KernelConstants{c, d, 1.0 / ppu, ppu}};
}

}  // namespace roulab
