#pragma once

#include <complex>

#include <Eigen/Dense>

namespace hybridmem {

using Complex = std::complex<double>;

// Dense complex Hilbert-space objects. Row-major logical indexing
// (entry (i,j) = row i, column j) is part of the serialization contract;
// Eigen's internal storage order is irrelevant to it.
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace linalg {

inline constexpr double kHermitianTol = 1e-12;

// max_{ij} |m - m^dagger|
double hermiticity_defect(const ComplexMatrix& m);

// Throws NumericalError if any entry is NaN/Inf. `what` names the offender.
void require_finite(const ComplexMatrix& m, const char* what);
void require_finite(const ComplexVector& v, const char* what);

// Kronecker product: entry ((i*b.rows+k),(j*b.cols+l)) = a(i,j)*b(k,l).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

struct Eigensystem {
    RealVector values;      // ascending
    ComplexMatrix vectors;  // orthonormal columns, vectors.col(k) <-> values(k)
};

// Rejects inputs with hermiticity defect above kHermitianTol; the defect is
// reported in the diagnostic since it always indicates a construction bug.
Eigensystem eig_hermitian(const ComplexMatrix& h);

// U = exp(-i h dt) through the spectral decomposition of Hermitian h,
// unitary to round-off by construction.
ComplexMatrix unitary_from_hamiltonian(const ComplexMatrix& h, double dt);
ComplexMatrix unitary_from_eigensystem(const Eigensystem& es, double dt);

} // namespace linalg
} // namespace hybridmem
