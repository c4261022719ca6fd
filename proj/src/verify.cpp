#include "spai/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace spai {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

double dot(std::span<const double> x, std::span<const double> y)
{
	double s = 0.0;
	for (std::size_t k = 0; k < x.size(); ++k)
		s += x[k] * y[k];
	return s;
}

double norm2(std::span<const double> x)
{
	return std::sqrt(dot(x, x));
}

Mat to_eigen(const DenseMat& D)
{
	return RowMajorMap(D.values.data(), D.nrows, D.ncols);
}

DenseMat from_eigen(const Mat& X)
{
	DenseMat D(X.rows(), X.cols());
	for (Index i = 0; i < X.rows(); ++i)
		for (Index j = 0; j < X.cols(); ++j)
			D(i, j) = X(i, j);
	return D;
}

Mat dense_symmetric_part(const SparseMat& X)
{
	const Mat D = to_eigen(densify(X));
	return 0.5 * (D + D.transpose());
}

double fip(const Mat& X, const Mat& Y)
{
	return (X.array() * Y.array()).sum();
}

/// 53-bit uniforms in [-1, 1) from a splitmix64 stream.
class StartVector
{
public:
	explicit StartVector(std::uint64_t seed) : state_(seed) {}

	double next()
	{
		std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
		z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
		z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
		z ^= z >> 31;
		return 2.0 * static_cast<double>(z >> 11) * 0x1p-53 - 1.0;
	}

private:
	std::uint64_t state_;
};

struct LanczosResult
{
	double lo = 0.0;
	double hi = 0.0;
	bool converged = false;
	Index steps = 0;
};

LanczosResult lanczos(const SparseMat& S, const ProbeOptions& opts, std::uint64_t seed)
{
	const Index n = S.rows();
	const Index mmax = std::min(n, opts.max_steps);
	Mat V(n, mmax);
	std::vector<double> alpha;
	std::vector<double> beta;

	StartVector rng(seed);
	Vec v(n);
	for (Index k = 0; k < n; ++k)
		v(k) = rng.next();
	v.normalize();

	LanczosResult res;
	for (Index j = 0; j < mmax; ++j) {
		V.col(j) = v;
		const std::vector<double> wv = matvec(S, std::span<const double>(v.data(), static_cast<std::size_t>(n)));
		Vec w = Eigen::Map<const Vec>(wv.data(), n);
		alpha.push_back(v.dot(w));
		for (int pass = 0; pass < 2; ++pass) {
			const Vec h = V.leftCols(j + 1).transpose() * w;
			w -= V.leftCols(j + 1) * h;
		}
		const double b = w.norm();
		if (!std::isfinite(b))
			return res;
		beta.push_back(b);

		const Index m = j + 1;
		const double scale = std::max({std::fabs(alpha.front()), std::fabs(alpha.back()), 1e-300});
		const bool invariant = b <= 1e-13 * scale;
		if (invariant || m % 10 == 0 || m == mmax) {
			Eigen::SelfAdjointEigenSolver<Mat> es;
			Vec diag = Eigen::Map<const Vec>(alpha.data(), m);
			Vec sub = Eigen::Map<const Vec>(beta.data(), m - 1);
			es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
			const Vec& theta = es.eigenvalues();
			res.lo = theta(0);
			res.hi = theta(m - 1);
			res.steps = m;
			const double tmax = std::max(std::fabs(res.lo), std::fabs(res.hi));
			const double r_lo = b * std::fabs(es.eigenvectors()(m - 1, 0));
			const double r_hi = b * std::fabs(es.eigenvectors()(m - 1, m - 1));
			if (invariant || m == n
			    || (r_lo <= opts.rel_tol * tmax && r_hi <= opts.rel_tol * tmax)) {
				res.converged = true;
				return res;
			}
		}
		v = w / b;
	}
	return res;
}

void require_method_inputs(Method method, const DenseMat& A, const DenseMat& M0, const DenseMat* Pi)
{
	if (A.nrows != A.ncols || M0.nrows != A.nrows || M0.ncols != A.ncols)
		throw DimensionError("dense_oracle: A and M0 must be square of the same order");
	if (method.preconditioned != (Pi != nullptr))
		throw ConfigError("dense_oracle: a preconditioner is required exactly for preconditioned methods");
	if (Pi && (Pi->nrows != A.nrows || Pi->ncols != A.ncols))
		throw DimensionError("dense_oracle: preconditioner order differs from A");
}

[[noreturn]] void oracle_breakdown(Method m, Index i)
{
	throw BreakdownError("dense " + method_name(m) + " breakdown at iteration " + std::to_string(i));
}

double positive(Method m, Index i, double den)
{
	if (!(den > 0.0) || !std::isfinite(den))
		oracle_breakdown(m, i);
	return den;
}

} // namespace

double backward_error(const SparseMat& A, std::span<const double> x, std::span<const double> b,
                      double frob_A)
{
	const std::vector<double> ax = matvec(A, x);
	double r2 = 0.0;
	for (std::size_t k = 0; k < b.size(); ++k) {
		const double d = b[k] - ax[k];
		r2 += d * d;
	}
	return std::sqrt(r2) / (frob_A * norm2(x) + norm2(b));
}

SolveReport linear_pcg(const SparseMat& A, std::span<const double> b, const SparseMat* M,
                       double tol, Index maxit)
{
	if (!A.is_square() || static_cast<Index>(b.size()) != A.rows())
		throw DimensionError("linear_pcg: A must be square and conform with b");
	if (M && (M->rows() != A.rows() || M->cols() != A.cols()))
		throw DimensionError("linear_pcg: preconditioner does not conform with A");

	SolveReport rep;
	rep.tol = tol;
	const std::size_t n = b.size();
	if (norm2(b) == 0.0) {
		rep.converged = true;
		return rep;
	}

	const double frob_A = frob_norm(A);
	std::vector<double> x(n, 0.0);
	std::vector<double> r(b.begin(), b.end());
	std::vector<double> z = M ? matvec(*M, r) : r;
	std::vector<double> p = z;
	double rz = dot(r, z);

	while (rep.iterations < maxit) {
		const std::vector<double> q = matvec(A, p);
		const double pq = dot(p, q);
		if (!(pq > 0.0) || !std::isfinite(pq) || !(rz > 0.0) || !std::isfinite(rz))
			return rep;
		const double alpha = rz / pq;
		for (std::size_t k = 0; k < n; ++k) {
			x[k] += alpha * p[k];
			r[k] -= alpha * q[k];
		}
		++rep.iterations;
		const double be = backward_error(A, x, b, frob_A);
		rep.backward_errors.push_back(be);
		if (!std::isfinite(be))
			return rep;
		if (be < tol) {
			rep.converged = true;
			return rep;
		}
		z = M ? matvec(*M, r) : r;
		const double rz_new = dot(r, z);
		const double beta = rz_new / rz;
		rz = rz_new;
		for (std::size_t k = 0; k < n; ++k)
			p[k] = z[k] + beta * p[k];
	}
	return rep;
}

std::vector<double> dense_spectrum(const SparseMat& X)
{
	if (!X.is_square())
		throw DimensionError("dense_spectrum: matrix is not square");
	if (X.rows() == 0)
		return {};
	Eigen::SelfAdjointEigenSolver<Mat> es(dense_symmetric_part(X), Eigen::EigenvaluesOnly);
	const Vec& ev = es.eigenvalues();
	return {ev.data(), ev.data() + ev.size()};
}

SpectralProbe spectral_probe(const SparseMat& M, const ProbeOptions& opts)
{
	if (!M.is_square() || M.rows() == 0)
		throw DimensionError("spectral_probe: matrix must be square and non-empty");
	SpectralProbe p;
	if (M.rows() <= opts.dense_limit) {
		const std::vector<double> ev = dense_spectrum(M);
		p.lambda_min_est = ev.front();
		p.lambda_max_est = ev.back();
		p.method = ProbeMethod::Dense;
	} else {
		const SparseMat S = symmetrize(M);
		p.method = ProbeMethod::Lanczos;
		LanczosResult best;
		for (int attempt = 0; attempt < std::max(opts.attempts, 1); ++attempt) {
			best = lanczos(S, opts, opts.seed + static_cast<std::uint64_t>(attempt) * 0x9e37ULL);
			if (best.converged)
				break;
		}
		p.lambda_min_est = best.lo;
		p.lambda_max_est = best.hi;
		p.converged = best.converged;
		p.lanczos_steps = best.steps;
	}
	p.is_spd = p.lambda_min_est > 0.0;
	return p;
}

std::vector<DenseMat> dense_oracle(Method method, const DenseMat& Ad, const DenseMat& M0d,
                                   const DenseMat* Pid, Index iters)
{
	require_method_inputs(method, Ad, M0d, Pid);
	const Index n = Ad.nrows;
	const Mat A = to_eigen(Ad);
	const Mat I = Mat::Identity(n, n);
	const Mat Pi = Pid ? to_eigen(*Pid) : I;
	Mat M = to_eigen(M0d);

	std::vector<DenseMat> out;
	out.push_back(from_eigen(M));

	Mat R = I - A * M;
	Mat Z, P, G;
	double rho = 0.0;

	switch (method.kind) {
	case MethodKind::MR:
		if (method.preconditioned)
			Z = Pi - Pi * A * M;
		for (Index i = 0; i < iters; ++i) {
			if (method.preconditioned) {
				const Mat W = Pi * A * Z;
				const double alpha = fip(Z, W) / positive(method, i, fip(W, W));
				M = M + alpha * Z;
				Z = Z - alpha * W;
			} else {
				const Mat AR = A * R;
				const double alpha = fip(R, AR) / positive(method, i, fip(AR, AR));
				M = M + alpha * R;
				R = R - alpha * AR;
			}
			out.push_back(from_eigen(M));
		}
		break;

	case MethodKind::SD:
		if (method.preconditioned) {
			Z = Pi - Pi * A * M;
			P = Pi * A * Z;
		} else {
			P = A * R;
		}
		for (Index i = 0; i < iters; ++i) {
			if (method.preconditioned) {
				const Mat W = Pi * A * P;
				const double alpha = fip(Z, W) / positive(method, i, fip(W, W));
				M = M + alpha * P;
				Z = Z - alpha * W;
				P = Pi * A * Z;
			} else {
				const Mat AP = A * P;
				const double alpha = fip(R, AP) / positive(method, i, fip(AP, AP));
				M = M + alpha * P;
				R = R - alpha * AP;
				P = A * R;
			}
			out.push_back(from_eigen(M));
		}
		break;

	case MethodKind::NCG:
		G = method.preconditioned ? Mat(-Pi * A * (Pi * R)) : Mat(-A * R);
		P = -G;
		for (Index i = 0; i < iters; ++i) {
			const Mat AP = A * P;
			const double rg = fip(R, G);
			const double alpha = -rg / positive(method, i, fip(P, AP));
			M = M + alpha * P;
			R = R - alpha * AP;
			G = method.preconditioned ? Mat(-Pi * A * (Pi * R)) : Mat(-A * R);
			if (rg == 0.0)
				oracle_breakdown(method, i);
			const double beta = fip(R, G) / rg;
			P = -G + beta * P;
			out.push_back(from_eigen(M));
		}
		break;

	case MethodKind::CG:
		Z = Pi * R;
		P = Z;
		rho = fip(R, Z);
		for (Index i = 0; i < iters; ++i) {
			const Mat AP = A * P;
			const double alpha = rho / positive(method, i, fip(P, AP));
			M = M + alpha * P;
			R = R - alpha * AP;
			Z = Pi * R;
			if (rho == 0.0)
				oracle_breakdown(method, i);
			const double rho_new = fip(R, Z);
			const double beta = rho_new / rho;
			rho = rho_new;
			P = Z + beta * P;
			out.push_back(from_eigen(M));
		}
		break;

	case MethodKind::LOMR:
		P = Mat::Zero(n, n);
		Z = Pi * R;
		for (Index i = 0; i < iters; ++i) {
			const Mat AZ = A * Z;
			const Mat AP = A * P;
			const Mat PAZ = Pi * AZ;
			const Mat PAP = Pi * AP;
			const double zz = fip(AZ, PAZ);
			positive(method, i, zz);
			double delta = 0.0;
			double gamma = 0.0;
			if (i == 0) {
				delta = fip(Z, AZ) / zz;
				gamma = 1.0;
			} else {
				const double pp = fip(AP, PAP);
				const double zp = fip(AZ, PAP);
				const double c = zz * pp - zp * zp;
				if (c > 64.0 * std::numeric_limits<double>::epsilon() * zz * pp) {
					delta = (pp * fip(Z, AZ) - zp * fip(Z, AP)) / c;
					gamma = (zz * fip(Z, AP) - zp * fip(Z, AZ)) / c;
				} else {
					delta = fip(Z, AZ) / zz;
					gamma = 0.0;
				}
			}
			M = M + delta * Z + gamma * P;
			R = R - delta * AZ - gamma * AP;
			if (delta != 0.0)
				P = Z + (gamma / delta) * P;
			else if (gamma == 0.0)
				P = Z;
			Z = Pi * R;
			out.push_back(from_eigen(M));
		}
		break;
	}
	return out;
}

BoundReport check_bounds(const SparseMat& A, std::span<const SparseMat> trajectory, Method method)
{
	if (method.preconditioned
	    || (method.kind != MethodKind::NCG && method.kind != MethodKind::CG))
		throw std::invalid_argument("check_bounds: only NCG and CG have error bounds");
	if (!A.is_square())
		throw DimensionError("check_bounds: A is not square");

	const Mat Ad = to_eigen(densify(A));
	Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (Ad + Ad.transpose()), Eigen::EigenvaluesOnly);
	const double lmin = es.eigenvalues()(0);
	const double lmax = es.eigenvalues()(Ad.rows() - 1);
	if (!(lmin > 0.0))
		throw std::invalid_argument("check_bounds: A is not positive definite");

	BoundReport rep;
	rep.kappa = lmax / lmin;
	const double q = method.kind == MethodKind::NCG
	                     ? (rep.kappa - 1.0) / (rep.kappa + 1.0)
	                     : (std::sqrt(rep.kappa) - 1.0) / (std::sqrt(rep.kappa) + 1.0);

	const Mat Ainv = Ad.llt().solve(Mat::Identity(Ad.rows(), Ad.cols()));
	const auto anorm = [&](const SparseMat& M) {
		const Mat E = Ainv - to_eigen(densify(M));
		return std::sqrt(std::max(fip(Ad * E, E), 0.0));
	};

	if (trajectory.empty())
		return rep;
	const double e0 = anorm(trajectory.front());
	for (std::size_t i = 0; i < trajectory.size(); ++i) {
		BoundRow row;
		row.iter = static_cast<Index>(i);
		row.ratio = e0 > 0.0 ? anorm(trajectory[i]) / e0 : 0.0;
		row.bound = 2.0 * std::pow(q, static_cast<double>(i));
		row.margin = row.bound - row.ratio;
		rep.rows.push_back(row);
	}
	return rep;
}

} // namespace spai
