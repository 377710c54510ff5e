#include "roulab/rosenblatt.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace roulab {

namespace {

void check_resolution(const BrownianLattice& lattice, const KernelConstants& consts) {
    if (std::abs(lattice.delta - consts.grid_delta) > 1e-12 * consts.grid_delta) {
        throw std::invalid_argument(
            "rosenblatt path: constants were calibrated at a different lattice resolution");
    }
}

std::vector<double> grid_times(std::size_t n, double delta) {
    std::vector<double> t(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        t[k] = static_cast<double>(k) * delta;
    }
    return t;
}

}  // namespace

RosenblattPath rosenblatt_path_fast(const BrownianLattice& lattice, const HurstParams& hurst,
                                    const KernelConstants& consts) {
    check_resolution(lattice, consts);
    const std::size_t n = lattice.increments.size();
    const double delta = consts.grid_delta;
    const NoiseGram gram(hurst, n);
    const std::vector<double>& g = gram.gamma;
    const double sqrt_delta = std::sqrt(delta);

    // Durbin-Levinson innovation recursion, interleaved with synthesis of the
    // unit-scale chaos field w. phi holds the order-m autoregression in
    // place; the order update phi_{m,j} = phi_{m-1,j} - kappa phi_{m-1,m-j}
    // walks the coefficient vector from both ends so no scratch copy is
    // needed.
    std::vector<double> phi(n, 0.0);
    std::vector<double> w(n);
    double sigma2 = g[0];
    w[0] = std::sqrt(sigma2) * lattice.increments[0] / sqrt_delta;
    for (std::size_t m = 1; m < n; ++m) {
        double acc = g[m];
        for (std::size_t j = 1; j < m; ++j) {
            acc -= phi[j] * g[m - j];
        }
        const double kappa = acc / sigma2;
        if (!(std::abs(kappa) < 1.0)) {
            throw std::runtime_error(
                "rosenblatt_path_fast: chaos Gram lost positive definiteness");
        }
        std::size_t lo = 1;
        std::size_t hi = m - 1;
        for (; lo < hi; ++lo, --hi) {
            const double a = phi[lo];
            const double b = phi[hi];
            phi[lo] = a - kappa * b;
            phi[hi] = b - kappa * a;
        }
        if (lo == hi) {
            phi[lo] -= kappa * phi[lo];
        }
        phi[m] = kappa;
        sigma2 *= 1.0 - kappa * kappa;

        double s = std::sqrt(sigma2) * lattice.increments[m] / sqrt_delta;
        for (std::size_t j = 1; j <= m; ++j) {
            s += phi[j] * w[m - j];
        }
        w[m] = s;
    }

    // Physical scale: W_m = delta^{H'-1} w_m and the chaos sum carries d_H
    // delta per cell; together d_H delta^{2H'-1} = d_H delta^H per squared
    // unit-field term.
    RosenblattPath path{grid_times(n, delta), std::vector<double>(n + 1, 0.0), hurst, consts};
    const double cell_scale = consts.d_h * std::pow(delta, hurst.H);
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        acc += cell_scale * (w[m] * w[m] - g[0]);
        path.values[m + 1] = acc;
    }
    return path;
}

RosenblattPath rosenblatt_path_bruteforce(const BrownianLattice& lattice, const HurstParams& hurst,
                                          const KernelConstants& consts) {
    check_resolution(lattice, consts);
    const std::size_t n = lattice.increments.size();
    if (n > 512) {
        throw std::invalid_argument("rosenblatt_path_bruteforce: N exceeds the 512 cost guard");
    }
    const double delta = consts.grid_delta;
    const NoiseGram gram(hurst, n);

    // Dense Cholesky of the Gram Toeplitz matrix; deliberately a different
    // factorization algorithm than the fast generator's recursion (both
    // produce the unique lower factor with positive diagonal).
    Eigen::MatrixXd cov(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                gram.gamma[i >= j ? i - j : j - i];
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error(
            "rosenblatt_path_bruteforce: chaos Gram lost positive definiteness");
    }
    const Eigen::MatrixXd lower = llt.matrixL();

    Eigen::VectorXd xi(n);
    const double sqrt_delta = std::sqrt(delta);
    for (std::size_t i = 0; i < n; ++i) {
        xi(static_cast<Eigen::Index>(i)) = lattice.increments[i] / sqrt_delta;
    }

    // Literal Wick double sum: accumulate the pair kernel A_k row by row and
    // re-evaluate sum_{i,j} A_k(i,j) (xi_i xi_j - 1_{i=j}) at every k.
    RosenblattPath path{grid_times(n, delta), std::vector<double>(n + 1, 0.0), hurst, consts};
    const double cell_scale = consts.d_h * std::pow(delta, hurst.H);
    Eigen::MatrixXd pair_kernel = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
        const auto row = lower.row(static_cast<Eigen::Index>(k - 1));
        pair_kernel.noalias() += row.transpose() * row;
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double wick =
                    xi(static_cast<Eigen::Index>(i)) * xi(static_cast<Eigen::Index>(j)) -
                    (i == j ? 1.0 : 0.0);
                s += pair_kernel(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                     wick;
            }
        }
        path.values[k] = cell_scale * s;
    }
    return path;
}

double covariance_oracle(const HurstParams& hurst, double s, double t) {
    if (s < 0.0 || t < 0.0) {
        throw std::domain_error("covariance_oracle: times must be nonnegative");
    }
    const double twoH = 2.0 * hurst.H;
    return 0.5 * (std::pow(s, twoH) + std::pow(t, twoH) - std::pow(std::abs(t - s), twoH));
}

double wiener_rosenblatt_integral(std::span<const double> g, const RosenblattPath& path) {
    if (g.size() != path.times.size()) {
        throw std::invalid_argument(
            "wiener_rosenblatt_integral: integrand length must match the grid");
    }
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < path.values.size(); ++k) {
        acc += g[k] * (path.values[k + 1] - path.values[k]);
    }
    return acc;
}

}  // namespace roulab
