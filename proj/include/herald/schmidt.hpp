#pragma once

// Schmidt decomposition of the single-pair amplitude on a truncated window.

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "herald/error.hpp"
#include "herald/quadrature.hpp"
#include "herald/spectral.hpp"

namespace herald {

struct SchmidtDecomposition {
    std::vector<double> weights; ///< rho_n = s_n^2 / sum s^2, descending
    double norm = 0.0;           ///< sum s^2, the quadrature value of the squared amplitude
    double K = 0.0;              ///< Schmidt number 1 / sum rho_n^2
    double purity() const { return 1.0 / K; }
};

/// SVD of sqrt(w_a) f(a, b) sqrt(w_b) for a real amplitude f on two grids.
template <class Amplitude>
SchmidtDecomposition schmidt_decompose(Amplitude&& f, const FreqGrid& a, const FreqGrid& b)
{
    const auto na = static_cast<Eigen::Index>(a.size());
    const auto nb = static_cast<Eigen::Index>(b.size());
    Eigen::MatrixXd A(na, nb);
    for (Eigen::Index i = 0; i < na; ++i)
        for (Eigen::Index j = 0; j < nb; ++j)
            A(i, j) = std::sqrt(a.weights[i] * b.weights[j]) * f(a.nodes[i], b.nodes[j]);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
    if (svd.info() != Eigen::Success)
        throw NumericalError("Schmidt SVD did not converge");
    const Eigen::VectorXd s = svd.singularValues();
    SchmidtDecomposition out;
    out.norm = s.squaredNorm();
    if (!(out.norm > 0.0))
        throw NumericalError("amplitude vanishes on the window");
    double sum_sq = 0.0;
    out.weights.reserve(static_cast<std::size_t>(s.size()));
    for (Eigen::Index n = 0; n < s.size(); ++n) {
        const double rho = s(n) * s(n) / out.norm;
        out.weights.push_back(rho);
        sum_sq += rho * rho;
    }
    out.K = 1.0 / sum_sq;
    return out;
}

inline SchmidtDecomposition schmidt_decompose(const SourceParams& p, double window = 4.0, std::size_t nodes = 128)
{
    p.validate();
    const auto g = FreqGrid::symmetric(window, nodes);
    return schmidt_decompose([&](double s, double i) { return jsa_single(s, i, p); }, g, g);
}

} // namespace herald
