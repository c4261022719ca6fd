#include <gtest/gtest.h>

#include <cmath>

#include "random_spd.hpp"
#include "spai/sparse.hpp"

using namespace spai;
using spai::support::random_sparse;

namespace {

DenseMat dense_mul(const DenseMat& A, const DenseMat& B)
{
	DenseMat C(A.nrows, B.ncols);
	for (Index i = 0; i < A.nrows; ++i)
		for (Index k = 0; k < A.ncols; ++k)
			for (Index j = 0; j < B.ncols; ++j)
				C(i, j) += A(i, k) * B(k, j);
	return C;
}

double dense_frob(const DenseMat& X)
{
	double s = 0.0;
	for (double v : X.values)
		s += v * v;
	return std::sqrt(s);
}

SparseMat from_rows(Index r, Index c, std::vector<double> v)
{
	DenseMat D(r, c);
	D.values = std::move(v);
	return sparsify(D);
}

} // namespace

TEST(SparseMat, ValidatesStructure)
{
	EXPECT_THROW(SparseMat(2, 2, {0, 1}, {0}, {1.0}), StructureError);
	EXPECT_THROW(SparseMat(2, 2, {0, 2, 2}, {1, 0}, {1.0, 2.0}), StructureError);
	EXPECT_THROW(SparseMat(2, 2, {0, 1, 2}, {0, 2}, {1.0, 2.0}), StructureError);
	EXPECT_THROW(SparseMat(2, 2, {1, 1, 2}, {0, 1}, {1.0, 2.0}), StructureError);
	const SparseMat ok(2, 3, {0, 2, 3}, {0, 2, 1}, {1.0, 2.0, 3.0});
	EXPECT_EQ(ok.nnz(), 3);
	EXPECT_EQ(ok.at(0, 2), 2.0);
	EXPECT_EQ(ok.at(1, 0), 0.0);
	EXPECT_TRUE(ok.validate().empty());
}

TEST(SparseMat, FromTripletsSumsDuplicates)
{
	const SparseMat m = SparseMat::from_triplets(2, 2, {{1, 1, 0.5}, {0, 0, 1.0}, {1, 1, 0.5}});
	EXPECT_EQ(m.nnz(), 2);
	EXPECT_EQ(m.at(1, 1), 1.0);
	EXPECT_THROW(SparseMat::from_triplets(2, 2, {{2, 0, 1.0}}), DimensionError);
}

TEST(Spgemm, IdentityLeavesOperandUnchanged)
{
	const SparseMat B = random_sparse(3, 3, 0.6, 11);
	const SparseMat C = spgemm(identity(3), B);
	EXPECT_EQ(support::max_abs_diff(C, B), 0.0);
}

TEST(Spgemm, DiagonalTimesPermutation)
{
	const SparseMat A = from_rows(2, 2, {2, 0, 0, 3});
	const SparseMat B = from_rows(2, 2, {0, 1, 1, 0});
	const SparseMat C = spgemm(A, B);
	EXPECT_EQ(C.at(0, 0), 0.0);
	EXPECT_EQ(C.at(0, 1), 2.0);
	EXPECT_EQ(C.at(1, 0), 3.0);
	EXPECT_EQ(C.at(1, 1), 0.0);
}

TEST(Spgemm, RejectsNonConformable)
{
	EXPECT_THROW(spgemm(identity(2), identity(3)), DimensionError);
	EXPECT_THROW(spgeam(1.0, identity(2), 1.0, identity(3)), DimensionError);
	EXPECT_THROW(frob_inner(identity(2), identity(3)), DimensionError);
	EXPECT_THROW(matvec(identity(2), std::vector<double>(3)), DimensionError);
	EXPECT_THROW(symmetrize(SparseMat::zeros(2, 3)), DimensionError);
}

TEST(Spgemm, MatchesDenseProductOnRandomInstances)
{
	for (std::uint64_t seed = 0; seed < 100; ++seed) {
		const Index n = 5 + static_cast<Index>(seed % 46);
		const SparseMat A = random_sparse(n, n, 0.15, 2 * seed);
		const SparseMat B = random_sparse(n, n, 0.15, 2 * seed + 1);
		const SparseMat C = spgemm(A, B);
		ASSERT_TRUE(C.validate().empty());
		const DenseMat D = dense_mul(densify(A), densify(B));
		EXPECT_LE(support::max_abs_diff(C, D), 1e-13 * std::max(1.0, dense_frob(D))) << seed;
	}
}

TEST(Spgeam, Examples)
{
	const SparseMat A = random_sparse(6, 6, 0.4, 3);
	const SparseMat Z = spgeam(1.0, A, -1.0, A);
	EXPECT_EQ(Z.nnz(), A.nnz());
	EXPECT_EQ(prune(Z, 0.0).nnz(), 0);
	const SparseMat D = spgeam(1.0, identity(2), 1.0, identity(2));
	EXPECT_EQ(D.nnz(), 2);
	EXPECT_EQ(D.at(0, 0), 2.0);
	EXPECT_EQ(D.at(1, 1), 2.0);
}

TEST(Spgeam, MatchesDenseSumOnRandomInstances)
{
	for (std::uint64_t seed = 0; seed < 100; ++seed) {
		const Index n = 3 + static_cast<Index>(seed % 48);
		const SparseMat A = random_sparse(n, n, 0.2, 7 * seed);
		const SparseMat B = random_sparse(n, n, 0.2, 7 * seed + 1);
		const SparseMat C = spgeam(0.75, A, -2.5, B);
		ASSERT_TRUE(C.validate().empty());
		DenseMat D = densify(A);
		const DenseMat Bd = densify(B);
		for (std::size_t k = 0; k < D.values.size(); ++k)
			D.values[k] = 0.75 * D.values[k] - 2.5 * Bd.values[k];
		EXPECT_LE(support::max_abs_diff(C, D), 1e-13 * std::max(1.0, dense_frob(D)));
	}
}

TEST(FrobInner, Examples)
{
	EXPECT_EQ(frob_inner(identity(5), identity(5)), 5.0);
	const SparseMat X = SparseMat::from_triplets(2, 2, {{0, 1, 3.0}});
	const SparseMat Y = SparseMat::from_triplets(2, 2, {{1, 0, 4.0}});
	EXPECT_EQ(frob_inner(X, Y), 0.0);
	EXPECT_EQ(frob_norm(identity(4)), 2.0);
	EXPECT_EQ(frob_norm(SparseMat::zeros(3, 3)), 0.0);
}

TEST(FrobInner, MatchesDenseSumAndNormSquared)
{
	for (std::uint64_t seed = 0; seed < 50; ++seed) {
		const SparseMat X = random_sparse(30, 20, 0.3, 3 * seed);
		const SparseMat Y = random_sparse(30, 20, 0.3, 3 * seed + 1);
		const DenseMat Xd = densify(X);
		const DenseMat Yd = densify(Y);
		double ref = 0.0;
		double mag = 0.0;
		for (std::size_t k = 0; k < Xd.values.size(); ++k) {
			ref += Xd.values[k] * Yd.values[k];
			mag += std::fabs(Xd.values[k] * Yd.values[k]);
		}
		EXPECT_NEAR(frob_inner(X, Y), ref, 1e-13 * mag);
		const double n2 = frob_norm(X) * frob_norm(X);
		EXPECT_NEAR(n2, frob_inner(X, X), 1e-13 * frob_inner(X, X));
		EXPECT_EQ(frob_norm_sq(X), frob_inner(X, X));
	}
}

TEST(Transpose, SymmetrizeExamples)
{
	const SparseMat S = from_rows(2, 2, {0, 2, 0, 0});
	const SparseMat T = symmetrize(S);
	EXPECT_EQ(T.at(0, 1), 1.0);
	EXPECT_EQ(T.at(1, 0), 1.0);
	EXPECT_EQ(T.at(0, 0), 0.0);

	const SparseMat Sym = from_rows(2, 2, {1, 2, 2, 5});
	EXPECT_EQ(support::max_abs_diff(symmetrize(Sym), Sym), 0.0);
}

TEST(Transpose, MatchesDenseOracle)
{
	for (std::uint64_t seed = 0; seed < 100; ++seed) {
		const Index n = 2 + static_cast<Index>(seed % 49);
		const SparseMat X = random_sparse(n, n, 0.2, 5 * seed);
		const DenseMat D = densify(X);
		DenseMat Dt(n, n), Ds(n, n);
		for (Index i = 0; i < n; ++i)
			for (Index j = 0; j < n; ++j) {
				Dt(i, j) = D(j, i);
				Ds(i, j) = 0.5 * D(i, j) + 0.5 * D(j, i);
			}
		EXPECT_EQ(support::max_abs_diff(transpose(X), Dt), 0.0);
		const SparseMat S = symmetrize(X);
		EXPECT_LE(support::max_abs_diff(S, Ds), 1e-15);
		EXPECT_TRUE(is_exactly_symmetric(S));
	}
}

TEST(ColNorms, Examples)
{
	const auto ones = col_norms_sq(identity(4));
	EXPECT_EQ(ones, std::vector<double>(4, 1.0));
	const double d[] = {2.0, 3.0};
	EXPECT_EQ(col_norms_sq(diagonal_matrix(d)), (std::vector<double>{4.0, 9.0}));

	const SparseMat X = random_sparse(15, 12, 0.3, 9);
	const DenseMat D = densify(X);
	const auto c = col_norms_sq(X);
	for (Index j = 0; j < 12; ++j) {
		double s = 0.0;
		for (Index i = 0; i < 15; ++i)
			s += D(i, j) * D(i, j);
		EXPECT_NEAR(c[static_cast<std::size_t>(j)], s, 1e-14 * std::max(1.0, s));
	}
}

TEST(Utilities, DensityPruneMatvec)
{
	EXPECT_EQ(density(identity(4)), 0.25);
	const SparseMat A = random_sparse(8, 8, 0.5, 4);
	EXPECT_EQ(prune(spgeam(1.0, A, -1.0, A), 0.0).nnz(), 0);
	const double d[] = {2.0, 3.0};
	EXPECT_EQ(matvec(diagonal_matrix(d), std::vector<double>{1.0, 1.0}), (std::vector<double>{2.0, 3.0}));
	const SparseMat P = prune(from_rows(2, 2, {1e-3, 0.5, -2.0, 0.0}), 1e-2);
	EXPECT_EQ(P.nnz(), 2);
	for (double v : prune(A).values())
		EXPECT_GT(std::fabs(v), 0.0);
}

TEST(Properties, AdjointIdentity)
{
	for (std::uint64_t seed = 0; seed < 50; ++seed) {
		const SparseMat A = random_sparse(20, 20, 0.2, 11 * seed);
		const SparseMat B = random_sparse(20, 20, 0.2, 11 * seed + 1);
		const SparseMat C = random_sparse(20, 20, 0.2, 11 * seed + 2);
		const double lhs = frob_inner(spgemm(A, B), C);
		const double rhs = frob_inner(B, spgemm(transpose(A), C));
		const double scale = frob_norm(spgemm(A, B)) * frob_norm(C) + 1e-300;
		EXPECT_LE(std::fabs(lhs - rhs), 1e-12 * scale);
	}
}

TEST(Properties, KernelsAreBitwiseDeterministic)
{
	const SparseMat A = random_sparse(40, 40, 0.2, 1);
	const SparseMat B = random_sparse(40, 40, 0.2, 2);
	const SparseMat C1 = spgemm(A, B);
	const SparseMat C2 = spgemm(A, B);
	ASSERT_EQ(C1.nnz(), C2.nnz());
	for (Index k = 0; k < C1.nnz(); ++k)
		EXPECT_EQ(C1.values()[static_cast<std::size_t>(k)], C2.values()[static_cast<std::size_t>(k)]);
}
