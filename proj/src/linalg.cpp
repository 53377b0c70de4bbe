#include "hybridmem/linalg.hpp"

#include <cmath>
#include <sstream>

#include "hybridmem/errors.hpp"

namespace hybridmem::linalg {

double hermiticity_defect(const ComplexMatrix& m)
{
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void require_finite(const ComplexMatrix& m, const char* what)
{
    if (!m.allFinite()) {
        throw NumericalError(std::string(what) + ": non-finite entry");
    }
}

void require_finite(const ComplexVector& v, const char* what)
{
    if (!v.allFinite()) {
        throw NumericalError(std::string(what) + ": non-finite entry");
    }
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b)
{
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Eigensystem eig_hermitian(const ComplexMatrix& h)
{
    if (h.rows() != h.cols()) {
        throw NumericalError("eig_hermitian: matrix is not square");
    }
    require_finite(h, "eig_hermitian input");
    const double defect = hermiticity_defect(h);
    if (defect > kHermitianTol) {
        std::ostringstream msg;
        msg << "eig_hermitian: input not Hermitian, max |h - h^dagger| = " << defect;
        throw NumericalError(msg.str());
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eig_hermitian: eigensolver failed to converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix unitary_from_eigensystem(const Eigensystem& es, double dt)
{
    const Eigen::Index n = es.values.size();
    ComplexVector phases(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        phases(k) = std::exp(Complex(0.0, -es.values(k) * dt));
    }
    return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

ComplexMatrix unitary_from_hamiltonian(const ComplexMatrix& h, double dt)
{
    return unitary_from_eigensystem(eig_hermitian(h), dt);
}

} // namespace hybridmem::linalg
