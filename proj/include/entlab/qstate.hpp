#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "entlab/errors.hpp"

namespace entlab::qstate {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr cxd I_UNIT{0.0, 1.0};

// Validation tolerances of a physical density matrix.
inline constexpr double HERM_TOL = 1e-10;
inline constexpr double TRACE_TOL = 1e-10;
inline constexpr double POSITIVITY_FLOOR = -1e-9;

// Kronecker (tensor) product.
Matrix kron(const Matrix& a, const Matrix& b);
Vector kron_vec(const Vector& a, const Vector& b);

struct EigenSystem {
    Eigen::VectorXd values;  // sorted descending
    Matrix vectors;          // column i pairs with values[i]
};

// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
// Throws ContractViolation if the input is not Hermitian to 1e-9.
EigenSystem eig_hermitian(const Matrix& m, double herm_tol = 1e-9);

// Hermitian square root of a positive semidefinite matrix (negative
// round-off eigenvalues are clamped to zero).
Matrix sqrt_psd(const Matrix& m);

// Orthonormal two-qubit bases. Product ordering follows
// (|g1 g2>, |g1 e2>, |e1 g2>, |e1 e2>); Dicke is (ground, symmetric,
// antisymmetric, doubly excited); Bell is (psi_s, psi_a, phi_s, phi_a).
enum class Basis : std::uint8_t { Product, Dicke, Bell };

std::string to_string(Basis b);
std::optional<Basis> basis_from_string(const std::string& name);

// Columns are the basis states of `b` expressed in Product coordinates.
Matrix basis_in_product_coords(Basis b);

// Change-of-basis matrix whose columns are `to` states expanded in `from`.
Matrix change_of_basis(Basis from, Basis to);

class DensityMatrix {
public:
    // Validates hermiticity, unit trace and positivity; eigenvalues in
    // [POSITIVITY_FLOOR, 0) are clamped to zero.
    DensityMatrix(Matrix rho, Basis basis);

    const Matrix& matrix() const { return rho_; }
    Basis basis() const { return basis_; }
    Eigen::Index dim() const { return rho_.rows(); }
    cxd operator()(Eigen::Index i, Eigen::Index j) const { return rho_(i, j); }

    double purity() const { return (rho_ * rho_).trace().real(); }

    static DensityMatrix pure(const Vector& state, Basis basis);

private:
    Matrix rho_;
    Basis basis_;
};

// Named pure two-qubit states, all expressed in the Product basis.
struct Psi1 {};                       // |g1 g2>
struct Psi2 {};                       // |g1 e2>
struct Psi3 {};                       // |e1 g2>
struct Psi4 {};                       // |e1 e2>
struct PsiS {};                       // (|e1 g2> + |g1 e2>)/sqrt(2)
struct PsiA {};                       // (|e1 g2> - |g1 e2>)/sqrt(2)
struct PhiS {};                       // (|g1 g2> + |e1 e2>)/sqrt(2)
struct PhiA {};                       // (|g1 g2> - |e1 e2>)/sqrt(2)
struct CorrelatedQ { double q; };     // sqrt(q)|e1 e2> + sqrt(1-q)|g1 g2>
struct ChiSD { double alpha; double beta; };  // cos(a)|e1 e2> + e^{ib} sin(a)|g1 g2>
struct AlphaPure { double alpha; };   // (|e1 g2> + a|g1 e2>)/sqrt(1+a^2)

using NamedState = std::variant<Psi1, Psi2, Psi3, Psi4, PsiS, PsiA, PhiS, PhiA,
                                CorrelatedQ, ChiSD, AlphaPure>;

// State vector in the Product basis, unit norm to 1e-12.
Vector named_state_vector(const NamedState& tag);

// Pure-state density matrix of the named state in the Product basis.
DensityMatrix build_named_state(const NamedState& tag);

// rho' = C^dag rho C with C the change-of-basis matrix from -> to.
DensityMatrix basis_transform(const DensityMatrix& rho, Basis from, Basis to);

// Reduced density matrix over the kept subsystems. `dims` are the factor
// dimensions in tensor order, `keep` the (sorted, unique) factor indices
// to retain. The result is tagged with the Product basis.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<Eigen::Index>& dims,
                            const std::vector<std::size_t>& keep);
Matrix partial_trace_raw(const Matrix& rho, const std::vector<Eigen::Index>& dims,
                         const std::vector<std::size_t>& keep);

// JSON serialization, schema {dim, basis, re[][], im[][]}.
std::string to_json(const DensityMatrix& rho);
DensityMatrix density_matrix_from_json(const std::string& text);

} // namespace entlab::qstate
