#include "random_spd.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "spai/matgen.hpp"

namespace spai::support {

SparseMat random_sparse(Index rows, Index cols, double density, std::uint64_t seed)
{
	CounterRng pick(seed, 101);
	CounterRng val(seed, 102);
	std::vector<Triplet> t;
	for (Index i = 0; i < rows; ++i)
		for (Index j = 0; j < cols; ++j)
			if (pick.uniform(0.0, 1.0) < density)
				t.push_back({i, j, val.uniform(-1.0, 1.0)});
	return SparseMat::from_triplets(rows, cols, std::move(t));
}

SparseMat random_spd(Index n, std::uint64_t seed, double density)
{
	CounterRng pick(seed, 201);
	CounterRng val(seed, 202);
	std::vector<Triplet> t;
	std::vector<double> rowsum(static_cast<std::size_t>(n), 0.0);
	for (Index i = 0; i < n; ++i) {
		for (Index j = 0; j < i; ++j) {
			if (pick.uniform(0.0, 1.0) < density) {
				const double v = val.uniform(-1.0, 1.0);
				t.push_back({i, j, v});
				t.push_back({j, i, v});
				rowsum[static_cast<std::size_t>(i)] += std::fabs(v);
				rowsum[static_cast<std::size_t>(j)] += std::fabs(v);
			}
		}
	}
	for (Index i = 0; i < n; ++i)
		t.push_back({i, i, rowsum[static_cast<std::size_t>(i)] + 1.0 + val.uniform(0.0, 1.0)});
	return SparseMat::from_triplets(n, n, std::move(t));
}

SparseMat planted_spectrum(const std::vector<double>& eigs, std::uint64_t seed)
{
	const auto n = static_cast<Index>(eigs.size());
	CounterRng val(seed, 301);
	Eigen::MatrixXd G(n, n);
	for (Index j = 0; j < n; ++j)
		for (Index i = 0; i < n; ++i)
			G(i, j) = val.uniform(-1.0, 1.0);
	const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
	const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(eigs.data(), n);
	const Eigen::MatrixXd A = Q * d.asDiagonal() * Q.transpose();
	DenseMat D(n, n);
	for (Index i = 0; i < n; ++i)
		for (Index j = 0; j < n; ++j)
			D(i, j) = 0.5 * (A(i, j) + A(j, i));
	return sparsify(D);
}

double max_abs_diff(const SparseMat& X, const SparseMat& Y)
{
	const SparseMat d = spgeam(1.0, X, -1.0, Y);
	double m = 0.0;
	for (const double v : d.values())
		m = std::max(m, std::fabs(v));
	return m;
}

double max_abs_diff(const SparseMat& X, const DenseMat& Y)
{
	const DenseMat D = densify(X);
	double m = 0.0;
	for (std::size_t k = 0; k < D.values.size(); ++k)
		m = std::max(m, std::fabs(D.values[k] - Y.values[k]));
	return m;
}

double frob_diff(const SparseMat& X, const DenseMat& Y)
{
	const DenseMat D = densify(X);
	double s = 0.0;
	for (std::size_t k = 0; k < D.values.size(); ++k)
		s += (D.values[k] - Y.values[k]) * (D.values[k] - Y.values[k]);
	return std::sqrt(s);
}

double frob(const DenseMat& X)
{
	double s = 0.0;
	for (const double v : X.values)
		s += v * v;
	return std::sqrt(s);
}

} // namespace spai::support
