#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "spai/matgen.hpp"
#include "spai/verify.hpp"

using namespace spai;

namespace {

MatrixSpec tri(Index n, Index k, std::uint64_t seed)
{
	MatrixSpec s;
	s.family = Family::TriEigs;
	s.n = n;
	s.k_distinct = k;
	s.eig_low = 0.0;
	s.eig_high = 1.0;
	s.seed = seed;
	return s;
}

std::vector<MatrixSpec> sample_specs()
{
	std::vector<MatrixSpec> out;
	out.push_back(tri(300, 20, 1));
	MatrixSpec b = tri(250, 15, 2);
	b.family = Family::BandedEigs;
	b.bandwidth = 4;
	out.push_back(b);
	MatrixSpec r;
	r.family = Family::RandPattern;
	r.n = 300;
	r.nnz_target = 600;
	r.eig_low = 0.5;
	r.eig_high = 10.0;
	r.seed = 3;
	out.push_back(r);
	MatrixSpec p;
	p.family = Family::Poisson2D;
	p.nx = 12;
	p.ny = 9;
	out.push_back(p);
	MatrixSpec w;
	w.family = Family::Wathen;
	w.nx = 5;
	w.ny = 4;
	w.seed = 4;
	out.push_back(w);
	return out;
}

double smallest_singular_value(const SparseMat& L)
{
	const DenseMat D = densify(L);
	Eigen::MatrixXd E(D.nrows, D.ncols);
	for (Index i = 0; i < D.nrows; ++i)
		for (Index j = 0; j < D.ncols; ++j)
			E(i, j) = D(i, j);
	const Eigen::JacobiSVD<Eigen::MatrixXd> svd(E);
	return svd.singularValues().minCoeff();
}

bool identical(const SparseMat& A, const SparseMat& B)
{
	const auto same = [](auto x, auto y) { return std::equal(x.begin(), x.end(), y.begin(), y.end()); };
	return A.rows() == B.rows() && A.cols() == B.cols() && same(A.row_offsets(), B.row_offsets()) &&
	       same(A.col_indices(), B.col_indices()) && same(A.values(), B.values());
}

} // namespace

TEST(CounterRng, DrawsDependOnlyOnSeedStreamAndIndex)
{
	CounterRng a(7, 1), b(7, 1), c(7, 2), d(8, 1);
	for (int k = 0; k < 100; ++k) {
		const auto x = a.next_u64();
		EXPECT_EQ(x, b.next_u64());
		EXPECT_NE(x, c.next_u64());
		EXPECT_NE(x, d.next_u64());
	}
	EXPECT_EQ(a.counter(), 100u);
}

TEST(CounterRng, RangesAreRespected)
{
	CounterRng r(1, 1);
	for (int k = 0; k < 10000; ++k) {
		const double u = r.uniform(2.0, 3.0);
		EXPECT_GT(u, 2.0);
		EXPECT_LT(u, 3.0);
		EXPECT_LT(r.below(7), 7u);
	}
	std::set<std::uint64_t> seen;
	for (int k = 0; k < 1000; ++k)
		seen.insert(r.below(5));
	EXPECT_EQ(seen.size(), 5u);
}

TEST(TriEigs, SmallExampleWithoutPlantedValues)
{
	const MatrixSpec s = tri(4, 0, 9);
	const SparseMat L = gen_factor(s);
	for (Index i = 0; i < 4; ++i)
		EXPECT_EQ(L.at(i, i), 1.0);
	EXPECT_EQ(L.nnz(), 7);
	const SparseMat A = gen(s);
	EXPECT_EQ(A.nnz(), 10);
	EXPECT_TRUE(is_exactly_symmetric(A));
	EXPECT_TRUE(spectral_probe(A).is_spd);
}

TEST(TriEigs, TridiagonalNonzeroCount)
{
	for (const Index n : {Index{2}, Index{10}, Index{137}, Index{500}})
		EXPECT_EQ(gen(tri(n, n / 4, 5)).nnz(), 3 * n - 2);
}

TEST(TriEigs, FullScaleMetadata)
{
	const SparseMat A = gen(tri(4000, 100, 11));
	EXPECT_EQ(A.rows(), 4000);
	EXPECT_EQ(A.nnz(), 11998);
}

TEST(TriEigs, PlantedValuesLandInRange)
{
	MatrixSpec s = tri(200, 50, 12);
	s.eig_low = 5.0;
	s.eig_high = 6.0;
	const SparseMat L = gen_factor(s);
	Index planted = 0;
	for (Index i = 0; i < 200; ++i) {
		const double d = L.at(i, i);
		if (d != 1.0) {
			++planted;
			EXPECT_GT(d, 5.0);
			EXPECT_LT(d, 6.0);
		}
	}
	EXPECT_EQ(planted, 50);
}

TEST(BandedEigs, FactorBandwidth)
{
	MatrixSpec s = tri(40, 5, 13);
	s.family = Family::BandedEigs;
	s.bandwidth = 4;
	const SparseMat L = gen_factor(s);
	EXPECT_EQ(L.nnz(), 40 * 5 - (1 + 2 + 3 + 4));
	for (Index i = 0; i < 40; ++i)
		for (Index j = 0; j < 40; ++j)
			EXPECT_EQ(L.contains(i, j), j <= i && i - j <= 4);
}

TEST(RandPattern, StrictlyLowerCountAndDiagonal)
{
	MatrixSpec s;
	s.family = Family::RandPattern;
	s.n = 100;
	s.nnz_target = 321;
	s.eig_low = 1.0;
	s.eig_high = 2.0;
	s.seed = 14;
	const SparseMat L = gen_factor(s);
	Index lower = 0;
	for (Index i = 0; i < 100; ++i) {
		EXPECT_GT(L.at(i, i), 1.0);
		for (Index j = i + 1; j < 100; ++j)
			EXPECT_FALSE(L.contains(i, j));
		for (Index j = 0; j < i; ++j)
			lower += L.contains(i, j) ? 1 : 0;
	}
	EXPECT_EQ(lower, 321);

	s.n = 5;
	s.nnz_target = 10;
	EXPECT_EQ(gen_factor(s).nnz(), 15);
}

TEST(Poisson2D, StencilAndRowSums)
{
	MatrixSpec s;
	s.family = Family::Poisson2D;
	s.nx = 6;
	s.ny = 5;
	const SparseMat A = gen(s);
	EXPECT_EQ(A.rows(), 30);
	EXPECT_EQ(A.nnz(), 5 * 30 - 2 * 6 - 2 * 5);
	for (Index y = 0; y < 5; ++y)
		for (Index x = 0; x < 6; ++x) {
			const Index k = y * 6 + x;
			double sum = 0.0;
			for (Index j = 0; j < 30; ++j)
				sum += A.at(k, j);
			const bool interior = x > 0 && y > 0 && x < 5 && y < 4;
			if (interior)
				EXPECT_EQ(sum, 0.0);
			else
				EXPECT_GT(sum, 0.0);
		}
}

TEST(Wathen, OrderAndStructure)
{
	MatrixSpec s;
	s.family = Family::Wathen;
	s.nx = 20;
	s.ny = 20;
	s.seed = 1;
	EXPECT_EQ(s.order(), 1281);
	const SparseMat A = gen(s);
	EXPECT_EQ(A.rows(), 1281);
	EXPECT_TRUE(is_exactly_symmetric(A));
	for (Index i = 0; i < A.rows(); ++i)
		EXPECT_GT(A.at(i, i), 0.0);
}

TEST(Generators, ExactlySymmetricDeterministicAndSpd)
{
	for (const MatrixSpec& s : sample_specs()) {
		const SparseMat A = gen(s);
		const SparseMat B = gen(s);
		EXPECT_EQ(A.rows(), s.order());
		EXPECT_TRUE(is_exactly_symmetric(A)) << family_token(s.family);
		EXPECT_TRUE(identical(A, B));
		const auto eig = dense_spectrum(A);
		EXPECT_GT(eig.front(), 0.0) << family_token(s.family);
		EXPECT_TRUE(spectral_probe(A).is_spd);
	}
}

TEST(Generators, SeedChangesOutput)
{
	EXPECT_FALSE(identical(gen(tri(50, 10, 1)), gen(tri(50, 10, 2))));
}

TEST(Generators, SmallestEigenvalueIsSquaredSmallestSingularValueOfFactor)
{
	for (const MatrixSpec& s : sample_specs()) {
		if (s.family == Family::Poisson2D || s.family == Family::Wathen)
			continue;
		const double sigma = smallest_singular_value(gen_factor(s));
		const double lmin = dense_spectrum(gen(s)).front();
		EXPECT_GT(sigma, 0.0);
		EXPECT_NEAR(lmin, sigma * sigma, 1e-8 * sigma * sigma + 1e-13) << family_token(s.family);
	}
}

TEST(Spec, KeyValueRoundTrip)
{
	for (const MatrixSpec& s : sample_specs()) {
		const std::string text = to_key_values(s);
		const MatrixSpec back = spec_from_key_values(text);
		EXPECT_EQ(to_key_values(back), text);
		EXPECT_TRUE(identical(gen(back), gen(s)));
	}
	const MatrixSpec parsed = spec_from_key_values("# comment\nfamily=wathen\n\nnx=3\nny = 2\nseed=5\n");
	EXPECT_EQ(parsed.family, Family::Wathen);
	EXPECT_EQ(parsed.nx, 3);
	EXPECT_EQ(parsed.ny, 2);
	EXPECT_EQ(parsed.seed, 5u);
}

TEST(Spec, RejectsInvalidFields)
{
	auto expect_field = [](const MatrixSpec& s, const std::string& field) {
		try {
			s.validate();
			ADD_FAILURE() << "accepted invalid " << field;
		} catch (const std::invalid_argument& e) {
			EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
		}
	};
	MatrixSpec s = tri(10, 2, 0);
	s.eig_low = 2.0;
	s.eig_high = 1.0;
	expect_field(s, "eig_low");
	s = tri(10, 11, 0);
	expect_field(s, "k_distinct");
	s = tri(0, 0, 0);
	expect_field(s, "n");
	s = tri(10, 0, 0);
	s.family = Family::BandedEigs;
	s.bandwidth = 10;
	expect_field(s, "bandwidth");
	s = tri(10, 0, 0);
	s.family = Family::RandPattern;
	s.nnz_target = 46;
	expect_field(s, "nnz_target");
	MatrixSpec w;
	w.family = Family::Wathen;
	w.nx = 0;
	w.ny = 3;
	expect_field(w, "nx");

	EXPECT_THROW(parse_family("hilbert"), std::invalid_argument);
	EXPECT_THROW(spec_from_key_values("family=tri-eigs\ncolour=red\n"), std::invalid_argument);
	EXPECT_THROW(spec_from_key_values("family=tri-eigs\nn=ten\n"), std::invalid_argument);
	EXPECT_THROW(gen_factor(w), std::invalid_argument);
}
