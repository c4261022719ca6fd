/** \file
 * \brief Compressed sparse row matrices and the kernels consumed by the
 * global SPAI iterations.
 */

#ifndef SPAI_SPARSE_HPP
#define SPAI_SPARSE_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spai {

using Index = std::int64_t;

/// Thrown when operands are not conformable.
class DimensionError : public std::invalid_argument
{
public:
	using std::invalid_argument::invalid_argument;
};

/// Thrown when the arrays handed to a SparseMat violate its invariants.
class StructureError : public std::invalid_argument
{
public:
	using std::invalid_argument::invalid_argument;
};

struct Triplet
{
	Index row;
	Index col;
	double value;
};

/// Dense row-major matrix, used by oracles and small eigen-solves.
struct DenseMat
{
	Index nrows = 0;
	Index ncols = 0;
	std::vector<double> values;

	DenseMat() = default;
	DenseMat(Index rows, Index cols, double fill = 0.0)
		: nrows(rows), ncols(cols), values(static_cast<std::size_t>(rows * cols), fill)
	{}

	double& operator()(Index i, Index j) { return values[static_cast<std::size_t>(i * ncols + j)]; }
	double operator()(Index i, Index j) const { return values[static_cast<std::size_t>(i * ncols + j)]; }
};

/// Immutable compressed sparse row matrix.
/**
 * Column indices are strictly increasing within every row. Explicitly stored
 * zeros are allowed unless the matrix came out of prune().
 */
class SparseMat
{
public:
	/// View of one compressed row.
	struct Row
	{
		std::span<const Index> cols;
		std::span<const double> vals;
		std::size_t size() const { return cols.size(); }
	};

	SparseMat() : row_offsets_{0} {}

	/// Takes ownership of the arrays; throws StructureError if they are malformed.
	SparseMat(Index nrows, Index ncols, std::vector<Index> row_offsets,
	          std::vector<Index> col_indices, std::vector<double> values);

	/// Builds a matrix from unordered triplets; duplicates are summed.
	static SparseMat from_triplets(Index nrows, Index ncols, std::vector<Triplet> triplets);

	static SparseMat zeros(Index nrows, Index ncols);

	Index rows() const { return nrows_; }
	Index cols() const { return ncols_; }
	Index nnz() const { return static_cast<Index>(values_.size()); }
	bool is_square() const { return nrows_ == ncols_; }

	std::span<const Index> row_offsets() const { return row_offsets_; }
	std::span<const Index> col_indices() const { return col_indices_; }
	std::span<const double> values() const { return values_; }

	Row row(Index i) const
	{
		const auto b = static_cast<std::size_t>(row_offsets_[static_cast<std::size_t>(i)]);
		const auto e = static_cast<std::size_t>(row_offsets_[static_cast<std::size_t>(i) + 1]);
		return {std::span<const Index>(col_indices_).subspan(b, e - b),
		        std::span<const double>(values_).subspan(b, e - b)};
	}

	/// Stored value at (i,j), or 0 if the entry is not in the pattern.
	double at(Index i, Index j) const;

	/// True if (i,j) is in the stored pattern.
	bool contains(Index i, Index j) const;

	/// Checks every structural invariant; returns an empty string on success.
	std::string validate() const;

private:
	struct Unchecked {};
	SparseMat(Unchecked, Index nrows, Index ncols, std::vector<Index> row_offsets,
	          std::vector<Index> col_indices, std::vector<double> values);

	friend class SparseBuilder;

	Index nrows_ = 0;
	Index ncols_ = 0;
	std::vector<Index> row_offsets_;
	std::vector<Index> col_indices_;
	std::vector<double> values_;
};

/// Row-by-row assembly of a SparseMat whose rows are appended in order.
/** Kernels use this to skip re-validation of output they constructed sorted. */
class SparseBuilder
{
public:
	SparseBuilder(Index nrows, Index ncols, std::size_t reserve_nnz = 0);

	/// Appends an entry to the current row; columns must be pushed in increasing order.
	void push(Index col, double value)
	{
		cols_.push_back(col);
		vals_.push_back(value);
	}
	void end_row() { offsets_.push_back(static_cast<Index>(cols_.size())); }

	SparseMat finish() &&;

private:
	Index nrows_;
	Index ncols_;
	std::vector<Index> offsets_;
	std::vector<Index> cols_;
	std::vector<double> vals_;
};

SparseMat identity(Index n);
SparseMat diagonal_matrix(std::span<const double> diag);

/// A*B. Each output entry is accumulated in ascending order of the inner index.
SparseMat spgemm(const SparseMat& A, const SparseMat& B);

/// a*A + b*B over the union of both patterns.
SparseMat spgeam(double a, const SparseMat& A, double b, const SparseMat& B);

/// a*X with the pattern of X.
SparseMat scale(double a, const SparseMat& X);

/// Frobenius inner product tr(X^T Y), compensated summation in row-major order.
double frob_inner(const SparseMat& X, const SparseMat& Y);
/// Equals frob_inner(X, X), computed with the same summation.
double frob_norm_sq(const SparseMat& X);
double frob_norm(const SparseMat& X);

SparseMat transpose(const SparseMat& X);

/// (M + M^T)/2 on the symmetrized union pattern.
SparseMat symmetrize(const SparseMat& M);

/// Entry k is the squared 2-norm of column k.
std::vector<double> col_norms_sq(const SparseMat& A);

/// Main diagonal as a dense vector (zeros where not stored).
std::vector<double> diagonal(const SparseMat& A);

/// Drops every stored entry with |v| <= threshold.
SparseMat prune(const SparseMat& X, double threshold = 0.0);

/// Number of nonzero stored values over nrows*ncols.
double density(const SparseMat& X);
Index count_nonzeros(const SparseMat& X);

std::vector<double> matvec(const SparseMat& A, std::span<const double> x);

DenseMat densify(const SparseMat& X);
SparseMat sparsify(const DenseMat& D);

/// Largest |x_ij - x_ji| relative to the largest |x_ij|; 0 for an empty matrix.
double asymmetry(const SparseMat& X);

/// Exact symmetry of pattern and values.
bool is_exactly_symmetric(const SparseMat& X);

} // namespace spai

#endif
