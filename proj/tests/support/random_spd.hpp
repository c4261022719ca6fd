#ifndef SPAI_TESTS_RANDOM_SPD_HPP
#define SPAI_TESTS_RANDOM_SPD_HPP

#include <cstdint>
#include <vector>

#include "spai/sparse.hpp"

namespace spai::support {

/// Random sparse matrix with roughly density*rows*cols entries in (-1, 1).
SparseMat random_sparse(Index rows, Index cols, double density, std::uint64_t seed);

/// Sparse symmetric, strictly diagonally dominant, hence SPD.
SparseMat random_spd(Index n, std::uint64_t seed, double density = 0.1);

/// Q diag(eigs) Q^T with a seeded random orthogonal Q, symmetrized exactly.
SparseMat planted_spectrum(const std::vector<double>& eigs, std::uint64_t seed);

/// max |x_ij - y_ij| over the union of patterns.
double max_abs_diff(const SparseMat& X, const SparseMat& Y);
double max_abs_diff(const SparseMat& X, const DenseMat& Y);

/// ||X - Y||_F through densified operands.
double frob_diff(const SparseMat& X, const DenseMat& Y);
double frob(const DenseMat& X);

} // namespace spai::support

#endif
