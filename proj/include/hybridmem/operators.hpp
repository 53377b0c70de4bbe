#pragma once

#include "hybridmem/linalg.hpp"

// Elementary operators and embeddings over the fixed tensor ordering
// C (x) M (x) NVE, basis index = ((i_C*2)+i_M)*fock_cutoff + i_NVE.
// Qubit convention: index 0 = ground, index 1 = excited.
namespace hybridmem::model {

ComplexMatrix qubit_sigma_minus();            // |0><1|
ComplexMatrix qubit_sigma_plus();             // |1><0|
ComplexMatrix qubit_sigma_x();
ComplexMatrix qubit_sigma_z_flux();           // diag(1,-1) in the flux basis
ComplexMatrix qubit_number();                 // sigma^+ sigma^-
ComplexMatrix boson_annihilation(int fock_cutoff);
ComplexMatrix boson_number(int fock_cutoff);

int basis_index(int i_c, int i_m, int i_nve, int fock_cutoff);

// Full-space embeddings (dimension 4*fock_cutoff).
ComplexMatrix embed_c(const ComplexMatrix& op, int fock_cutoff);
ComplexMatrix embed_m(const ComplexMatrix& op, int fock_cutoff);
ComplexMatrix embed_nve(const ComplexMatrix& op, int fock_cutoff);

// N = n_C + n_M + b^dagger b
ComplexMatrix excitation_number(int fock_cutoff);

// Reduced space C (x) NVE (dimension 2*fock_cutoff), used by the
// coupler-eliminated and single-circuit Hamiltonians.
int basis_index_cn(int i_c, int i_nve, int fock_cutoff);
ComplexMatrix embed_cn_qubit(const ComplexMatrix& op, int fock_cutoff);
ComplexMatrix embed_cn_mode(const ComplexMatrix& op, int fock_cutoff);
ComplexMatrix excitation_number_cn(int fock_cutoff);

} // namespace hybridmem::model
