#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bdsid {

using cxd = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr cxd kImag{0.0, 1.0};

/// Labels the tensor-factor structure of a matrix dimension.
/// The leftmost factor is the most significant index, i.e. basis states are
/// ordered |q1 q2 ... qk> with |0> = [1,0]^T for qubits.
struct TensorSpace {
    std::vector<Eigen::Index> dims;

    TensorSpace(std::initializer_list<Eigen::Index> d) : dims(d) { validate(); }
    explicit TensorSpace(std::vector<Eigen::Index> d) : dims(std::move(d)) { validate(); }

    Eigen::Index dim() const {
        Eigen::Index n = 1;
        for (auto d : dims) n *= d;
        return n;
    }
    std::size_t factors() const { return dims.size(); }

  private:
    void validate() const;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);

/// Trace out every factor not listed in `keep`. Kept factors preserve their
/// relative order; the result lives on the tensor space of the kept factors.
ComplexMatrix partial_trace(const ComplexMatrix& rho, const TensorSpace& space,
                            const std::vector<int>& keep);

/// Place a matrix acting on the listed factors (in the given order) into the
/// full space, identity elsewhere.
ComplexMatrix embed_operator(const ComplexMatrix& op, const TensorSpace& space,
                             const std::vector<int>& targets);

/// e^{-i h t} for Hermitian h, via eigendecomposition.
/// Rejects h when max-entry deviation from h^dagger exceeds 1e-10 (relative).
ComplexMatrix matexp_unitary(const ComplexMatrix& h, double t);

/// (1/2) * sum of singular values of rho - sigma.
double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma);

/// |tr(u^dagger v)| / d. Insensitive to a global phase on either argument.
double gate_fidelity_phase_invariant(const ComplexMatrix& u, const ComplexMatrix& v);

// Predicates used by input validation throughout.
double hermiticity_error(const ComplexMatrix& m);      // relative, max-entry norm
double unitarity_error(const ComplexMatrix& m);        // max-entry of U^t U - I
bool is_hermitian(const ComplexMatrix& m, double tol = 1e-10);
bool is_unitary(const ComplexMatrix& m, double tol = 1e-8);

/// Throws std::invalid_argument unless rho is Hermitian, PSD and unit-trace
/// within the given tolerances.
void check_density_matrix(const ComplexMatrix& rho, const std::string& what,
                          double herm_tol = 1e-10, double psd_tol = 1e-10,
                          double trace_tol = 1e-12);

ComplexMatrix identity(Eigen::Index n);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

}  // namespace bdsid
