#include "entlab/measures.hpp"

#include <algorithm>
#include <cmath>

namespace entlab::measures {

namespace {

using qstate::cxd;

void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractViolation(msg);
}

Matrix spin_flip_matrix() {
    // sigma_y (x) sigma_y in the Product ordering; real and diagonal-flipped.
    Matrix f = Matrix::Zero(4, 4);
    f(0, 3) = -1.0;
    f(1, 2) = 1.0;
    f(2, 1) = 1.0;
    f(3, 0) = -1.0;
    return f;
}

void check_pattern(const Matrix& m, const std::vector<std::pair<int, int>>& allowed,
                   const char* what) {
    Matrix mask = m;
    for (auto [i, j] : allowed) mask(i, j) = 0.0;
    const double off = mask.cwiseAbs().maxCoeff();
    if (off > PATTERN_TOL)
        throw PatternViolation(std::string(what) + ": off-pattern entry of size " +
                               std::to_string(off));
}

} // namespace

double concurrence(const DensityMatrix& rho) {
    require(rho.dim() == 4, "concurrence: state must be a 4x4 two-qubit matrix");
    require(rho.basis() == qstate::Basis::Product,
            "concurrence: state must be given in the Product basis");
    static const Matrix flip = spin_flip_matrix();
    // The required square roots of the eigenvalues of rho (sy x sy) rho*
    // (sy x sy) are the singular values of sqrt(rho) (sy x sy) sqrt(rho)*,
    // which stay accurate near zero where an eigensolve on the product
    // would lose half the digits.
    const Matrix root = qstate::sqrt_psd(rho.matrix());
    const Matrix a = root * flip * root.conjugate();
    Eigen::JacobiSVD<Matrix> svd(a);
    const Eigen::Vector4d s = svd.singularValues();  // sorted descending
    return std::max(0.0, s(0) - s(1) - s(2) - s(3));
}

ConcurrenceBreakdown concurrence_x_state(const DensityMatrix& rho) {
    require(rho.dim() == 4, "concurrence_x_state: state must be 4x4");
    check_pattern(rho.matrix(),
                  {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {0, 3}, {3, 0}, {1, 2}, {2, 1}},
                  "concurrence_x_state");
    const Matrix& m = rho.matrix();
    const double r11 = m(0, 0).real(), r22 = m(1, 1).real();
    const double r33 = m(2, 2).real(), r44 = m(3, 3).real();
    ConcurrenceBreakdown out;
    out.c1 = 2.0 * (std::abs(m(0, 3)) - std::sqrt(std::max(0.0, r22 * r33)));
    out.c2 = 2.0 * (std::abs(m(1, 2)) - std::sqrt(std::max(0.0, r11 * r44)));
    out.c = std::max({0.0, out.c1, out.c2});
    return out;
}

double concurrence_block(const DensityMatrix& rho) {
    require(rho.dim() == 4, "concurrence_block: state must be 4x4");
    check_pattern(rho.matrix(), {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {1, 2}, {2, 1}},
                  "concurrence_block");
    const Matrix& m = rho.matrix();
    const double thresh = std::sqrt(std::max(0.0, m(0, 0).real() * m(3, 3).real()));
    return 2.0 * std::max(0.0, std::abs(m(1, 2)) - thresh);
}

double concurrence_two_entangled(const DensityMatrix& rho_dicke) {
    require(rho_dicke.dim() == 4, "concurrence_two_entangled: state must be 4x4");
    require(rho_dicke.basis() == qstate::Basis::Dicke,
            "concurrence_two_entangled: state must be given in the Dicke basis");
    check_pattern(rho_dicke.matrix(), {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {1, 2}, {2, 1}},
                  "concurrence_two_entangled");
    const Matrix& m = rho_dicke.matrix();
    const double pop_diff = m(1, 1).real() - m(2, 2).real();
    // (rho_sa - rho_as)^2 = -4 Im(rho_sa)^2 for a Hermitian matrix, so the
    // radicand is a sum of squares up to round-off.
    const double radicand = pop_diff * pop_diff + 4.0 * std::pow(m(1, 2).imag(), 2);
    if (radicand < -1e-10)
        throw NumericalFailure("concurrence_two_entangled: negative radicand " +
                               std::to_string(radicand));
    const double thresh = std::sqrt(std::max(0.0, m(0, 0).real() * m(3, 3).real()));
    return std::max(0.0, std::sqrt(std::abs(radicand)) - 2.0 * thresh);
}

double binary_entropy(double p) {
    require(p >= -1e-12 && p <= 1.0 + 1e-12, "binary_entropy: probability out of range");
    p = std::clamp(p, 0.0, 1.0);
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

double entropy_of_entanglement(const DensityMatrix& pure) {
    require(pure.dim() == 4, "entropy_of_entanglement: state must be 4x4");
    if (pure.purity() < 1.0 - 1e-8)
        throw ContractViolation("entropy_of_entanglement: state is mixed, purity " +
                                std::to_string(pure.purity()));
    const DensityMatrix marginal = qstate::partial_trace(pure, {2, 2}, {0});
    const auto eig = qstate::eig_hermitian(marginal.matrix());
    double s = 0.0;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        const double p = std::max(eig.values(i), 0.0);
        if (p > 0.0) s -= p * std::log2(p);
    }
    return s;
}

double entanglement_of_formation(const DensityMatrix& rho) {
    const double c = concurrence(rho);
    return binary_entropy(0.5 + 0.5 * std::sqrt(std::max(0.0, 1.0 - c * c)));
}

} // namespace entlab::measures
