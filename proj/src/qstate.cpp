#include "entlab/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <nlohmann/json.hpp>

namespace entlab::qstate {

namespace {

const double SQRT1_2 = 1.0 / std::sqrt(2.0);

void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractViolation(msg);
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", x);
    return buf;
}

} // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Vector kron_vec(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

EigenSystem eig_hermitian(const Matrix& m, double herm_tol) {
    require(m.rows() == m.cols(), "eig_hermitian: matrix must be square");
    const double herm_err = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm_err > herm_tol)
        throw ContractViolation("eig_hermitian: matrix not Hermitian, deviation " +
                                std::to_string(herm_err));
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure("eig_hermitian: eigensolver did not converge");
    // Eigen sorts ascending; flip to descending.
    const Eigen::Index n = m.rows();
    EigenSystem out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = solver.eigenvalues()(n - 1 - i);
        out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return out;
}

Matrix sqrt_psd(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure("sqrt_psd: eigensolver did not converge");
    Eigen::VectorXd vals = solver.eigenvalues().cwiseMax(0.0);
    return solver.eigenvectors() * vals.cwiseSqrt().asDiagonal() *
           solver.eigenvectors().adjoint();
}

std::string to_string(Basis b) {
    switch (b) {
        case Basis::Product: return "product";
        case Basis::Dicke: return "dicke";
        case Basis::Bell: return "bell";
    }
    return "?";
}

std::optional<Basis> basis_from_string(const std::string& name) {
    if (name == "product") return Basis::Product;
    if (name == "dicke") return Basis::Dicke;
    if (name == "bell") return Basis::Bell;
    return std::nullopt;
}

Matrix basis_in_product_coords(Basis b) {
    Matrix u = Matrix::Identity(4, 4);
    switch (b) {
        case Basis::Product:
            break;
        case Basis::Dicke:
            // columns: ground, symmetric, antisymmetric, doubly excited
            u.setZero();
            u(0, 0) = 1.0;
            u(1, 1) = SQRT1_2;
            u(2, 1) = SQRT1_2;
            u(1, 2) = -SQRT1_2;
            u(2, 2) = SQRT1_2;
            u(3, 3) = 1.0;
            break;
        case Basis::Bell:
            // columns: psi_s, psi_a, phi_s, phi_a
            u.setZero();
            u(1, 0) = SQRT1_2;
            u(2, 0) = SQRT1_2;
            u(1, 1) = -SQRT1_2;
            u(2, 1) = SQRT1_2;
            u(0, 2) = SQRT1_2;
            u(3, 2) = SQRT1_2;
            u(0, 3) = SQRT1_2;
            u(3, 3) = -SQRT1_2;
            break;
    }
    return u;
}

Matrix change_of_basis(Basis from, Basis to) {
    return basis_in_product_coords(from).adjoint() * basis_in_product_coords(to);
}

DensityMatrix::DensityMatrix(Matrix rho, Basis basis) : rho_(std::move(rho)), basis_(basis) {
    require(rho_.rows() == rho_.cols(), "density matrix must be square");
    require(rho_.rows() > 0, "density matrix must be non-empty");
    const double herm_err = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (herm_err > HERM_TOL)
        throw ContractViolation("density matrix not Hermitian, deviation " + sci(herm_err));
    const double trace_err = std::abs(rho_.trace() - cxd(1.0, 0.0));
    if (trace_err > TRACE_TOL)
        throw ContractViolation("density matrix trace deviates from 1 by " + sci(trace_err));
    if (rho_.rows() > 16) {
        // Large composite sectors: a shifted factorization certifies the
        // positivity floor at a third of the eigensolver cost.
        const double shift = -2.0 * POSITIVITY_FLOOR;
        Eigen::LDLT<Matrix> ldlt(
            Matrix(0.5 * (rho_ + rho_.adjoint()) + shift * Matrix::Identity(rho_.rows(),
                                                                            rho_.cols())));
        if (ldlt.info() == Eigen::Success && ldlt.vectorD().real().minCoeff() >= 0.0)
            return;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver((rho_ + rho_.adjoint()) / 2.0);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure("density matrix validation: eigensolver failed");
    const double min_eig = solver.eigenvalues().minCoeff();
    if (min_eig < POSITIVITY_FLOOR)
        throw ContractViolation("density matrix not positive semidefinite, min eigenvalue " +
                                sci(min_eig));
    if (min_eig < 0.0) {
        // Integrator round-off: clamp the tiny negative part away.
        Eigen::VectorXd vals = solver.eigenvalues().cwiseMax(0.0);
        vals /= vals.sum();
        rho_ = solver.eigenvectors() * vals.asDiagonal() * solver.eigenvectors().adjoint();
    }
}

DensityMatrix DensityMatrix::pure(const Vector& state, Basis basis) {
    const double norm = state.norm();
    require(std::abs(norm - 1.0) < 1e-10, "pure state must have unit norm");
    return DensityMatrix(state * state.adjoint(), basis);
}

Vector named_state_vector(const NamedState& tag) {
    Vector v = Vector::Zero(4);
    std::visit(
        [&v](auto&& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Psi1>) {
                v(0) = 1.0;
            } else if constexpr (std::is_same_v<T, Psi2>) {
                v(1) = 1.0;
            } else if constexpr (std::is_same_v<T, Psi3>) {
                v(2) = 1.0;
            } else if constexpr (std::is_same_v<T, Psi4>) {
                v(3) = 1.0;
            } else if constexpr (std::is_same_v<T, PsiS>) {
                v(1) = SQRT1_2;
                v(2) = SQRT1_2;
            } else if constexpr (std::is_same_v<T, PsiA>) {
                v(1) = -SQRT1_2;
                v(2) = SQRT1_2;
            } else if constexpr (std::is_same_v<T, PhiS>) {
                v(0) = SQRT1_2;
                v(3) = SQRT1_2;
            } else if constexpr (std::is_same_v<T, PhiA>) {
                v(0) = SQRT1_2;
                v(3) = -SQRT1_2;
            } else if constexpr (std::is_same_v<T, CorrelatedQ>) {
                require(s.q >= 0.0 && s.q <= 1.0, "CorrelatedQ: q must be in [0, 1]");
                v(3) = std::sqrt(s.q);
                v(0) = std::sqrt(1.0 - s.q);
            } else if constexpr (std::is_same_v<T, ChiSD>) {
                require(std::isfinite(s.alpha) && std::isfinite(s.beta),
                        "ChiSD: angles must be finite");
                v(3) = std::cos(s.alpha);
                v(0) = std::exp(I_UNIT * s.beta) * std::sin(s.alpha);
            } else if constexpr (std::is_same_v<T, AlphaPure>) {
                require(std::isfinite(s.alpha), "AlphaPure: alpha must be finite");
                const double n = std::sqrt(1.0 + s.alpha * s.alpha);
                v(2) = 1.0 / n;
                v(1) = s.alpha / n;
            }
        },
        tag);
    return v;
}

DensityMatrix build_named_state(const NamedState& tag) {
    return DensityMatrix::pure(named_state_vector(tag), Basis::Product);
}

DensityMatrix basis_transform(const DensityMatrix& rho, Basis from, Basis to) {
    require(rho.dim() == 4, "basis_transform: only 4-dimensional two-qubit bases are defined");
    require(rho.basis() == from, "basis_transform: state is not expressed in the given basis");
    const Matrix c = change_of_basis(from, to);
    return DensityMatrix(c.adjoint() * rho.matrix() * c, to);
}

Matrix partial_trace_raw(const Matrix& rho, const std::vector<Eigen::Index>& dims,
                         const std::vector<std::size_t>& keep) {
    const Eigen::Index total =
        std::accumulate(dims.begin(), dims.end(), Eigen::Index{1}, std::multiplies<>());
    require(total == rho.rows() && rho.rows() == rho.cols(),
            "partial_trace: product of subsystem dims must equal the matrix dimension");
    require(!keep.empty(), "partial_trace: keep set must be non-empty");
    require(std::is_sorted(keep.begin(), keep.end()) &&
                std::adjacent_find(keep.begin(), keep.end()) == keep.end(),
            "partial_trace: keep set must be sorted and unique");
    require(keep.back() < dims.size(), "partial_trace: keep index out of range");

    std::vector<std::size_t> traced;
    for (std::size_t k = 0; k < dims.size(); ++k)
        if (!std::binary_search(keep.begin(), keep.end(), k)) traced.push_back(k);

    Eigen::Index keep_dim = 1, traced_dim = 1;
    for (std::size_t k : keep) keep_dim *= dims[k];
    for (std::size_t k : traced) traced_dim *= dims[k];

    // Strides of each factor in the flattened row-major multi-index.
    std::vector<Eigen::Index> stride(dims.size());
    Eigen::Index s = 1;
    for (std::size_t k = dims.size(); k-- > 0;) {
        stride[k] = s;
        s *= dims[k];
    }

    auto flat_index = [&](Eigen::Index kept, Eigen::Index tr) {
        Eigen::Index idx = 0, kq = kept, tq = tr;
        for (std::size_t p = keep.size(); p-- > 0;) {
            idx += (kq % dims[keep[p]]) * stride[keep[p]];
            kq /= dims[keep[p]];
        }
        for (std::size_t p = traced.size(); p-- > 0;) {
            idx += (tq % dims[traced[p]]) * stride[traced[p]];
            tq /= dims[traced[p]];
        }
        return idx;
    };

    Matrix out = Matrix::Zero(keep_dim, keep_dim);
    for (Eigen::Index i = 0; i < keep_dim; ++i)
        for (Eigen::Index j = 0; j < keep_dim; ++j)
            for (Eigen::Index t = 0; t < traced_dim; ++t)
                out(i, j) += rho(flat_index(i, t), flat_index(j, t));
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<Eigen::Index>& dims,
                            const std::vector<std::size_t>& keep) {
    return DensityMatrix(partial_trace_raw(rho.matrix(), dims, keep), Basis::Product);
}

std::string to_json(const DensityMatrix& rho) {
    nlohmann::json j;
    j["dim"] = rho.dim();
    j["basis"] = to_string(rho.basis());
    std::vector<std::vector<double>> re(rho.dim()), im(rho.dim());
    for (Eigen::Index i = 0; i < rho.dim(); ++i) {
        re[i].resize(rho.dim());
        im[i].resize(rho.dim());
        for (Eigen::Index k = 0; k < rho.dim(); ++k) {
            re[i][k] = rho(i, k).real();
            im[i][k] = rho(i, k).imag();
        }
    }
    j["re"] = re;
    j["im"] = im;
    return j.dump(2);
}

DensityMatrix density_matrix_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    const Eigen::Index dim = j.at("dim").get<Eigen::Index>();
    const auto basis = basis_from_string(j.at("basis").get<std::string>());
    if (!basis) throw ContractViolation("density matrix JSON: unknown basis tag");
    const auto re = j.at("re").get<std::vector<std::vector<double>>>();
    const auto im = j.at("im").get<std::vector<std::vector<double>>>();
    require(static_cast<Eigen::Index>(re.size()) == dim &&
                static_cast<Eigen::Index>(im.size()) == dim,
            "density matrix JSON: dim does not match matrix payload");
    Matrix rho(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        require(static_cast<Eigen::Index>(re[i].size()) == dim &&
                    static_cast<Eigen::Index>(im[i].size()) == dim,
                "density matrix JSON: ragged matrix payload");
        for (Eigen::Index k = 0; k < dim; ++k) rho(i, k) = cxd(re[i][k], im[i][k]);
    }
    return DensityMatrix(rho, *basis);  // re-validates on load
}

} // namespace entlab::qstate
