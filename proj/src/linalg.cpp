#include "bdsid/linalg.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace bdsid {

void TensorSpace::validate() const {
    if (dims.empty()) throw std::invalid_argument("TensorSpace: no factors");
    for (auto d : dims)
        if (d < 1) throw std::invalid_argument("TensorSpace: factor dimension < 1");
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    return Eigen::kroneckerProduct(a, b);
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
    return Eigen::kroneckerProduct(a, b);
}

namespace {

void require_square_dim(const ComplexMatrix& m, const TensorSpace& space, const char* who) {
    if (m.rows() != m.cols() || m.rows() != space.dim())
        throw std::invalid_argument(std::string(who) + ": matrix is " +
                                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                    " but the tensor space has dimension " +
                                    std::to_string(space.dim()));
}

// Decompose a flat index into per-factor digits, most significant factor first.
void to_digits(Eigen::Index flat, const std::vector<Eigen::Index>& dims,
               std::vector<Eigen::Index>& out) {
    for (std::size_t k = dims.size(); k-- > 0;) {
        out[k] = flat % dims[k];
        flat /= dims[k];
    }
}

Eigen::Index from_digits(const std::vector<Eigen::Index>& digits,
                         const std::vector<Eigen::Index>& dims) {
    Eigen::Index flat = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) flat = flat * dims[k] + digits[k];
    return flat;
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& rho, const TensorSpace& space,
                            const std::vector<int>& keep) {
    require_square_dim(rho, space, "partial_trace");
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
    std::vector<bool> kept(space.factors(), false);
    for (int k : keep) {
        if (k < 0 || static_cast<std::size_t>(k) >= space.factors())
            throw std::invalid_argument("partial_trace: keep index out of range");
        if (kept[k]) throw std::invalid_argument("partial_trace: duplicate keep index");
        kept[k] = true;
    }

    std::vector<Eigen::Index> keep_dims, trace_dims;
    std::vector<int> keep_idx, trace_idx;
    for (std::size_t f = 0; f < space.factors(); ++f) {
        if (kept[f]) { keep_dims.push_back(space.dims[f]); keep_idx.push_back(int(f)); }
        else         { trace_dims.push_back(space.dims[f]); trace_idx.push_back(int(f)); }
    }
    Eigen::Index dk = std::accumulate(keep_dims.begin(), keep_dims.end(), Eigen::Index(1),
                                      std::multiplies<>());
    Eigen::Index dt = std::accumulate(trace_dims.begin(), trace_dims.end(), Eigen::Index(1),
                                      std::multiplies<>());

    ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
    std::vector<Eigen::Index> di(keep_dims.size()), dj(keep_dims.size()), dtr(trace_dims.size());
    std::vector<Eigen::Index> full_i(space.factors()), full_j(space.factors());
    for (Eigen::Index i = 0; i < dk; ++i) {
        to_digits(i, keep_dims, di);
        for (Eigen::Index j = 0; j < dk; ++j) {
            to_digits(j, keep_dims, dj);
            cxd acc{0.0, 0.0};
            for (Eigen::Index t = 0; t < dt; ++t) {
                to_digits(t, trace_dims, dtr);
                for (std::size_t k = 0; k < keep_idx.size(); ++k) {
                    full_i[keep_idx[k]] = di[k];
                    full_j[keep_idx[k]] = dj[k];
                }
                for (std::size_t k = 0; k < trace_idx.size(); ++k) {
                    full_i[trace_idx[k]] = dtr[k];
                    full_j[trace_idx[k]] = dtr[k];
                }
                acc += rho(from_digits(full_i, space.dims), from_digits(full_j, space.dims));
            }
            out(i, j) = acc;
        }
    }
    return out;
}

ComplexMatrix embed_operator(const ComplexMatrix& op, const TensorSpace& space,
                             const std::vector<int>& targets) {
    if (targets.empty()) throw std::invalid_argument("embed_operator: no target factors");
    std::vector<bool> seen(space.factors(), false);
    Eigen::Index dop = 1;
    for (int f : targets) {
        if (f < 0 || static_cast<std::size_t>(f) >= space.factors())
            throw std::invalid_argument("embed_operator: target index out of range");
        if (seen[f]) throw std::invalid_argument("embed_operator: duplicate target");
        seen[f] = true;
        dop *= space.dims[f];
    }
    if (op.rows() != dop || op.cols() != dop)
        throw std::invalid_argument("embed_operator: operator dimension does not match targets");

    std::vector<Eigen::Index> tdims;
    for (int f : targets) tdims.push_back(space.dims[f]);

    const Eigen::Index d = space.dim();
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    std::vector<Eigen::Index> fi(space.factors()), fj(space.factors());
    std::vector<Eigen::Index> ti(targets.size()), tj(targets.size());
    for (Eigen::Index i = 0; i < d; ++i) {
        to_digits(i, space.dims, fi);
        for (Eigen::Index j = 0; j < d; ++j) {
            to_digits(j, space.dims, fj);
            bool offdiag_rest = false;
            for (std::size_t f = 0; f < space.factors(); ++f) {
                if (!seen[f] && fi[f] != fj[f]) { offdiag_rest = true; break; }
            }
            if (offdiag_rest) continue;
            for (std::size_t k = 0; k < targets.size(); ++k) {
                ti[k] = fi[targets[k]];
                tj[k] = fj[targets[k]];
            }
            out(i, j) = op(from_digits(ti, tdims), from_digits(tj, tdims));
        }
    }
    return out;
}

double hermiticity_error(const ComplexMatrix& m) {
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

double unitarity_error(const ComplexMatrix& m) {
    ComplexMatrix g = m.adjoint() * m;
    g -= ComplexMatrix::Identity(m.rows(), m.cols());
    return g.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
    return m.rows() == m.cols() && hermiticity_error(m) <= tol;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
    return m.rows() == m.cols() && unitarity_error(m) <= tol;
}

ComplexMatrix matexp_unitary(const ComplexMatrix& h, double t) {
    if (h.rows() != h.cols()) throw std::invalid_argument("matexp_unitary: matrix not square");
    if (!is_hermitian(h))
        throw std::invalid_argument("matexp_unitary: generator is not Hermitian (error " +
                                    std::to_string(hermiticity_error(h)) + ")");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    ComplexVector phases(h.rows());
    for (Eigen::Index k = 0; k < h.rows(); ++k)
        phases(k) = std::exp(cxd(0.0, -es.eigenvalues()(k) * t));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
        throw std::invalid_argument("trace_distance: dimension mismatch");
    check_density_matrix(rho, "trace_distance(rho)");
    check_density_matrix(sigma, "trace_distance(sigma)");
    // rho - sigma is Hermitian, so singular values are |eigenvalues|.
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho - sigma);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double gate_fidelity_phase_invariant(const ComplexMatrix& u, const ComplexMatrix& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols())
        throw std::invalid_argument("gate_fidelity_phase_invariant: dimension mismatch");
    if (!is_unitary(u) || !is_unitary(v))
        throw std::invalid_argument("gate_fidelity_phase_invariant: input is not unitary");
    return std::abs((u.adjoint() * v).trace()) / double(u.rows());
}

void check_density_matrix(const ComplexMatrix& rho, const std::string& what,
                          double herm_tol, double psd_tol, double trace_tol) {
    if (rho.rows() != rho.cols())
        throw std::invalid_argument(what + ": density matrix not square");
    if (hermiticity_error(rho) > herm_tol)
        throw std::invalid_argument(what + ": density matrix not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > trace_tol || std::abs(rho.trace().imag()) > trace_tol)
        throw std::invalid_argument(what + ": density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho);
    if (es.eigenvalues().minCoeff() < -psd_tol)
        throw std::invalid_argument(what + ": density matrix has negative eigenvalue " +
                                    std::to_string(es.eigenvalues().minCoeff()));
}

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << 0, -kImag, kImag, 0;
    return m;
}

ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

}  // namespace bdsid
