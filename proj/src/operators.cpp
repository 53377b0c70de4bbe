#include "hybridmem/operators.hpp"

#include <cmath>

namespace hybridmem::model {

ComplexMatrix qubit_sigma_minus()
{
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

ComplexMatrix qubit_sigma_plus()
{
    return qubit_sigma_minus().adjoint();
}

ComplexMatrix qubit_sigma_x()
{
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

ComplexMatrix qubit_sigma_z_flux()
{
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

ComplexMatrix qubit_number()
{
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(1, 1) = 1.0;
    return m;
}

ComplexMatrix boson_annihilation(int fock_cutoff)
{
    ComplexMatrix a = ComplexMatrix::Zero(fock_cutoff, fock_cutoff);
    for (int n = 1; n < fock_cutoff; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

ComplexMatrix boson_number(int fock_cutoff)
{
    ComplexMatrix n = ComplexMatrix::Zero(fock_cutoff, fock_cutoff);
    for (int k = 0; k < fock_cutoff; ++k) {
        n(k, k) = static_cast<double>(k);
    }
    return n;
}

int basis_index(int i_c, int i_m, int i_nve, int fock_cutoff)
{
    return (i_c * 2 + i_m) * fock_cutoff + i_nve;
}

ComplexMatrix embed_c(const ComplexMatrix& op, int fock_cutoff)
{
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix in = ComplexMatrix::Identity(fock_cutoff, fock_cutoff);
    return linalg::kron(linalg::kron(op, i2), in);
}

ComplexMatrix embed_m(const ComplexMatrix& op, int fock_cutoff)
{
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix in = ComplexMatrix::Identity(fock_cutoff, fock_cutoff);
    return linalg::kron(linalg::kron(i2, op), in);
}

ComplexMatrix embed_nve(const ComplexMatrix& op, int fock_cutoff)
{
    const ComplexMatrix i4 = ComplexMatrix::Identity(4, 4);
    (void)fock_cutoff;
    return linalg::kron(i4, op);
}

ComplexMatrix excitation_number(int fock_cutoff)
{
    return embed_c(qubit_number(), fock_cutoff) + embed_m(qubit_number(), fock_cutoff)
         + embed_nve(boson_number(fock_cutoff), fock_cutoff);
}

int basis_index_cn(int i_c, int i_nve, int fock_cutoff)
{
    return i_c * fock_cutoff + i_nve;
}

ComplexMatrix embed_cn_qubit(const ComplexMatrix& op, int fock_cutoff)
{
    const ComplexMatrix in = ComplexMatrix::Identity(fock_cutoff, fock_cutoff);
    return linalg::kron(op, in);
}

ComplexMatrix embed_cn_mode(const ComplexMatrix& op, int fock_cutoff)
{
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    (void)fock_cutoff;
    return linalg::kron(i2, op);
}

ComplexMatrix excitation_number_cn(int fock_cutoff)
{
    return embed_cn_qubit(qubit_number(), fock_cutoff)
         + embed_cn_mode(boson_number(fock_cutoff), fock_cutoff);
}

} // namespace hybridmem::model
