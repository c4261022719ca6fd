#include "spai/sparse.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

namespace spai {

namespace {

/// Neumaier's variant of Kahan summation.
class CompensatedSum
{
public:
	void add(double x)
	{
		const double t = sum_ + x;
		if (std::fabs(sum_) >= std::fabs(x))
			comp_ += (sum_ - t) + x;
		else
			comp_ += (x - t) + sum_;
		sum_ = t;
	}
	double value() const { return sum_ + comp_; }

private:
	double sum_ = 0.0;
	double comp_ = 0.0;
};

void require_same_shape(const SparseMat& X, const SparseMat& Y, const char* op)
{
	if (X.rows() != Y.rows() || X.cols() != Y.cols()) {
		std::ostringstream os;
		os << op << ": shape mismatch (" << X.rows() << "x" << X.cols() << " vs "
		   << Y.rows() << "x" << Y.cols() << ")";
		throw DimensionError(os.str());
	}
}

} // namespace

SparseMat::SparseMat(Index nrows, Index ncols, std::vector<Index> row_offsets,
                     std::vector<Index> col_indices, std::vector<double> values)
	: nrows_(nrows), ncols_(ncols), row_offsets_(std::move(row_offsets)),
	  col_indices_(std::move(col_indices)), values_(std::move(values))
{
	const std::string err = validate();
	if (!err.empty())
		throw StructureError("SparseMat: " + err);
}

SparseMat::SparseMat(Unchecked, Index nrows, Index ncols, std::vector<Index> row_offsets,
                     std::vector<Index> col_indices, std::vector<double> values)
	: nrows_(nrows), ncols_(ncols), row_offsets_(std::move(row_offsets)),
	  col_indices_(std::move(col_indices)), values_(std::move(values))
{
	assert(validate().empty());
}

std::string SparseMat::validate() const
{
	if (nrows_ < 0 || ncols_ < 0)
		return "negative dimension";
	if (row_offsets_.size() != static_cast<std::size_t>(nrows_) + 1)
		return "row_offsets must have nrows+1 entries";
	if (row_offsets_.front() != 0)
		return "row_offsets[0] must be 0";
	if (col_indices_.size() != values_.size())
		return "col_indices and values differ in length";
	if (row_offsets_.back() != static_cast<Index>(values_.size()))
		return "row_offsets[nrows] must equal the number of stored values";
	for (Index i = 0; i < nrows_; ++i) {
		const Index b = row_offsets_[static_cast<std::size_t>(i)];
		const Index e = row_offsets_[static_cast<std::size_t>(i) + 1];
		if (e < b)
			return "row_offsets must be non-decreasing (row " + std::to_string(i) + ")";
		for (Index p = b; p < e; ++p) {
			const Index c = col_indices_[static_cast<std::size_t>(p)];
			if (c < 0 || c >= ncols_)
				return "column index out of range in row " + std::to_string(i);
			if (p > b && col_indices_[static_cast<std::size_t>(p) - 1] >= c)
				return "column indices not strictly increasing in row " + std::to_string(i);
		}
	}
	return {};
}

SparseMat SparseMat::from_triplets(Index nrows, Index ncols, std::vector<Triplet> triplets)
{
	for (const auto& t : triplets) {
		if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
			throw DimensionError("from_triplets: entry (" + std::to_string(t.row) + ","
			                     + std::to_string(t.col) + ") out of bounds");
	}
	std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
		return a.row != b.row ? a.row < b.row : a.col < b.col;
	});
	SparseBuilder builder(nrows, ncols, triplets.size());
	std::size_t p = 0;
	for (Index i = 0; i < nrows; ++i) {
		while (p < triplets.size() && triplets[p].row == i) {
			const Index c = triplets[p].col;
			double v = 0.0;
			while (p < triplets.size() && triplets[p].row == i && triplets[p].col == c)
				v += triplets[p++].value;
			builder.push(c, v);
		}
		builder.end_row();
	}
	return std::move(builder).finish();
}

SparseMat SparseMat::zeros(Index nrows, Index ncols)
{
	return SparseMat(Unchecked{}, nrows, ncols,
	                 std::vector<Index>(static_cast<std::size_t>(nrows) + 1, 0), {}, {});
}

double SparseMat::at(Index i, Index j) const
{
	const Row r = row(i);
	const auto it = std::lower_bound(r.cols.begin(), r.cols.end(), j);
	if (it == r.cols.end() || *it != j)
		return 0.0;
	return r.vals[static_cast<std::size_t>(it - r.cols.begin())];
}

bool SparseMat::contains(Index i, Index j) const
{
	const Row r = row(i);
	return std::binary_search(r.cols.begin(), r.cols.end(), j);
}

SparseBuilder::SparseBuilder(Index nrows, Index ncols, std::size_t reserve_nnz)
	: nrows_(nrows), ncols_(ncols)
{
	offsets_.reserve(static_cast<std::size_t>(nrows) + 1);
	offsets_.push_back(0);
	cols_.reserve(reserve_nnz);
	vals_.reserve(reserve_nnz);
}

SparseMat SparseBuilder::finish() &&
{
	assert(offsets_.size() == static_cast<std::size_t>(nrows_) + 1);
	return SparseMat(SparseMat::Unchecked{}, nrows_, ncols_, std::move(offsets_),
	                 std::move(cols_), std::move(vals_));
}

SparseMat identity(Index n)
{
	SparseBuilder b(n, n, static_cast<std::size_t>(n));
	for (Index i = 0; i < n; ++i) {
		b.push(i, 1.0);
		b.end_row();
	}
	return std::move(b).finish();
}

SparseMat diagonal_matrix(std::span<const double> diag)
{
	const auto n = static_cast<Index>(diag.size());
	SparseBuilder b(n, n, diag.size());
	for (Index i = 0; i < n; ++i) {
		b.push(i, diag[static_cast<std::size_t>(i)]);
		b.end_row();
	}
	return std::move(b).finish();
}

SparseMat spgemm(const SparseMat& A, const SparseMat& B)
{
	if (A.cols() != B.rows())
		throw DimensionError("spgemm: inner dimensions differ (" + std::to_string(A.cols())
		                     + " vs " + std::to_string(B.rows()) + ")");
	const Index n = A.rows();
	const Index m = B.cols();

	// Gustavson row-by-row product with a dense accumulator. For every output
	// entry the partial products are added in ascending order of the inner index.
	std::vector<double> acc(static_cast<std::size_t>(m), 0.0);
	std::vector<Index> marker(static_cast<std::size_t>(m), -1);
	std::vector<Index> pattern;
	SparseBuilder out(n, m, static_cast<std::size_t>(A.nnz() + B.nnz()));

	for (Index i = 0; i < n; ++i) {
		pattern.clear();
		const auto ra = A.row(i);
		for (std::size_t p = 0; p < ra.size(); ++p) {
			const double a = ra.vals[p];
			const auto rb = B.row(ra.cols[p]);
			for (std::size_t q = 0; q < rb.size(); ++q) {
				const auto j = static_cast<std::size_t>(rb.cols[q]);
				if (marker[j] != i) {
					marker[j] = i;
					acc[j] = a * rb.vals[q];
					pattern.push_back(rb.cols[q]);
				} else {
					acc[j] += a * rb.vals[q];
				}
			}
		}
		std::sort(pattern.begin(), pattern.end());
		for (const Index j : pattern)
			out.push(j, acc[static_cast<std::size_t>(j)]);
		out.end_row();
	}
	return std::move(out).finish();
}

SparseMat spgeam(double a, const SparseMat& A, double b, const SparseMat& B)
{
	require_same_shape(A, B, "spgeam");
	SparseBuilder out(A.rows(), A.cols(), static_cast<std::size_t>(A.nnz() + B.nnz()));
	for (Index i = 0; i < A.rows(); ++i) {
		const auto ra = A.row(i);
		const auto rb = B.row(i);
		std::size_t p = 0, q = 0;
		while (p < ra.size() || q < rb.size()) {
			if (q == rb.size() || (p < ra.size() && ra.cols[p] < rb.cols[q])) {
				out.push(ra.cols[p], a * ra.vals[p]);
				++p;
			} else if (p == ra.size() || rb.cols[q] < ra.cols[p]) {
				out.push(rb.cols[q], b * rb.vals[q]);
				++q;
			} else {
				out.push(ra.cols[p], a * ra.vals[p] + b * rb.vals[q]);
				++p;
				++q;
			}
		}
		out.end_row();
	}
	return std::move(out).finish();
}

SparseMat scale(double a, const SparseMat& X)
{
	std::vector<double> vals(X.values().begin(), X.values().end());
	for (double& v : vals)
		v *= a;
	return SparseMat(X.rows(), X.cols(),
	                 std::vector<Index>(X.row_offsets().begin(), X.row_offsets().end()),
	                 std::vector<Index>(X.col_indices().begin(), X.col_indices().end()),
	                 std::move(vals));
}

double frob_inner(const SparseMat& X, const SparseMat& Y)
{
	require_same_shape(X, Y, "frob_inner");
	CompensatedSum sum;
	for (Index i = 0; i < X.rows(); ++i) {
		const auto rx = X.row(i);
		const auto ry = Y.row(i);
		std::size_t p = 0, q = 0;
		while (p < rx.size() && q < ry.size()) {
			if (rx.cols[p] < ry.cols[q])
				++p;
			else if (ry.cols[q] < rx.cols[p])
				++q;
			else
				sum.add(rx.vals[p++] * ry.vals[q++]);
		}
	}
	return sum.value();
}

double frob_norm_sq(const SparseMat& X)
{
	CompensatedSum sum;
	for (const double v : X.values())
		sum.add(v * v);
	return sum.value();
}

double frob_norm(const SparseMat& X)
{
	return std::sqrt(frob_norm_sq(X));
}

SparseMat transpose(const SparseMat& X)
{
	const Index n = X.rows();
	const Index m = X.cols();
	std::vector<Index> offsets(static_cast<std::size_t>(m) + 1, 0);
	for (const Index c : X.col_indices())
		++offsets[static_cast<std::size_t>(c) + 1];
	for (std::size_t j = 0; j < static_cast<std::size_t>(m); ++j)
		offsets[j + 1] += offsets[j];
	std::vector<Index> cols(static_cast<std::size_t>(X.nnz()));
	std::vector<double> vals(static_cast<std::size_t>(X.nnz()));
	std::vector<Index> next(offsets.begin(), offsets.end() - 1);
	// Rows are visited in increasing order, so every transposed row comes out sorted.
	for (Index i = 0; i < n; ++i) {
		const auto r = X.row(i);
		for (std::size_t p = 0; p < r.size(); ++p) {
			const auto dst = static_cast<std::size_t>(next[static_cast<std::size_t>(r.cols[p])]++);
			cols[dst] = i;
			vals[dst] = r.vals[p];
		}
	}
	return SparseMat(m, n, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMat symmetrize(const SparseMat& M)
{
	if (!M.is_square())
		throw DimensionError("symmetrize: matrix is not square");
	return spgeam(0.5, M, 0.5, transpose(M));
}

std::vector<double> col_norms_sq(const SparseMat& A)
{
	std::vector<double> out(static_cast<std::size_t>(A.cols()), 0.0);
	for (Index i = 0; i < A.rows(); ++i) {
		const auto r = A.row(i);
		for (std::size_t p = 0; p < r.size(); ++p)
			out[static_cast<std::size_t>(r.cols[p])] += r.vals[p] * r.vals[p];
	}
	return out;
}

std::vector<double> diagonal(const SparseMat& A)
{
	const Index n = std::min(A.rows(), A.cols());
	std::vector<double> d(static_cast<std::size_t>(n), 0.0);
	for (Index i = 0; i < n; ++i)
		d[static_cast<std::size_t>(i)] = A.at(i, i);
	return d;
}

SparseMat prune(const SparseMat& X, double threshold)
{
	SparseBuilder out(X.rows(), X.cols(), static_cast<std::size_t>(X.nnz()));
	for (Index i = 0; i < X.rows(); ++i) {
		const auto r = X.row(i);
		for (std::size_t p = 0; p < r.size(); ++p)
			if (std::fabs(r.vals[p]) > threshold)
				out.push(r.cols[p], r.vals[p]);
		out.end_row();
	}
	return std::move(out).finish();
}

Index count_nonzeros(const SparseMat& X)
{
	return static_cast<Index>(std::count_if(X.values().begin(), X.values().end(),
	                                        [](double v) { return v != 0.0; }));
}

double density(const SparseMat& X)
{
	if (X.rows() == 0 || X.cols() == 0)
		return 0.0;
	return static_cast<double>(count_nonzeros(X))
	       / (static_cast<double>(X.rows()) * static_cast<double>(X.cols()));
}

std::vector<double> matvec(const SparseMat& A, std::span<const double> x)
{
	if (static_cast<Index>(x.size()) != A.cols())
		throw DimensionError("matvec: vector length " + std::to_string(x.size())
		                     + " does not match " + std::to_string(A.cols()) + " columns");
	std::vector<double> y(static_cast<std::size_t>(A.rows()), 0.0);
	for (Index i = 0; i < A.rows(); ++i) {
		const auto r = A.row(i);
		double s = 0.0;
		for (std::size_t p = 0; p < r.size(); ++p)
			s += r.vals[p] * x[static_cast<std::size_t>(r.cols[p])];
		y[static_cast<std::size_t>(i)] = s;
	}
	return y;
}

DenseMat densify(const SparseMat& X)
{
	DenseMat D(X.rows(), X.cols());
	for (Index i = 0; i < X.rows(); ++i) {
		const auto r = X.row(i);
		for (std::size_t p = 0; p < r.size(); ++p)
			D(i, r.cols[p]) = r.vals[p];
	}
	return D;
}

SparseMat sparsify(const DenseMat& D)
{
	SparseBuilder out(D.nrows, D.ncols);
	for (Index i = 0; i < D.nrows; ++i) {
		for (Index j = 0; j < D.ncols; ++j)
			if (D(i, j) != 0.0)
				out.push(j, D(i, j));
		out.end_row();
	}
	return std::move(out).finish();
}

double asymmetry(const SparseMat& X)
{
	if (!X.is_square())
		throw DimensionError("asymmetry: matrix is not square");
	const SparseMat diff = spgeam(1.0, X, -1.0, transpose(X));
	double dmax = 0.0;
	for (const double v : diff.values())
		dmax = std::max(dmax, std::fabs(v));
	double xmax = 0.0;
	for (const double v : X.values())
		xmax = std::max(xmax, std::fabs(v));
	return xmax == 0.0 ? 0.0 : dmax / xmax;
}

bool is_exactly_symmetric(const SparseMat& X)
{
	if (!X.is_square())
		return false;
	const SparseMat T = transpose(X);
	return std::equal(X.row_offsets().begin(), X.row_offsets().end(), T.row_offsets().begin())
	       && std::equal(X.col_indices().begin(), X.col_indices().end(), T.col_indices().begin())
	       && std::equal(X.values().begin(), X.values().end(), T.values().begin());
}

} // namespace spai
