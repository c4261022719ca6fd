#include "spai/dropping.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spai {

namespace {

struct Candidate
{
	double key;
	std::size_t pos; // row-major storage position, i.e. (row, col) order
};

/// Marks the `count` candidates with smallest key; ties resolved by position.
std::vector<char> select_smallest(std::vector<Candidate> cands, std::size_t count, std::size_t nnz)
{
	std::vector<char> drop(nnz, 0);
	if (count == 0)
		return drop;
	const auto less = [](const Candidate& a, const Candidate& b) {
		return a.key < b.key || (a.key == b.key && a.pos < b.pos);
	};
	if (count < cands.size())
		std::nth_element(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(count),
		                 cands.end(), less);
	for (std::size_t c = 0; c < std::min(count, cands.size()); ++c)
		drop[cands[c].pos] = 1;
	return drop;
}

SparseMat filter(const SparseMat& X, const std::vector<char>& drop)
{
	SparseBuilder out(X.rows(), X.cols(), X.values().size());
	std::size_t pos = 0;
	for (Index i = 0; i < X.rows(); ++i) {
		const auto r = X.row(i);
		for (std::size_t p = 0; p < r.size(); ++p, ++pos)
			if (!drop[pos])
				out.push(r.cols[p], r.vals[p]);
		out.end_row();
	}
	return std::move(out).finish();
}

/// Calls f(pos, value, ar) for every stored entry of row i of M, with ar = AR(i, col).
template <typename F>
void for_each_with_ar(const SparseMat& M, const SparseMat& AR, F&& f)
{
	std::size_t pos = 0;
	for (Index i = 0; i < M.rows(); ++i) {
		const auto rm = M.row(i);
		const auto ra = AR.row(i);
		std::size_t q = 0;
		for (std::size_t p = 0; p < rm.size(); ++p, ++pos) {
			while (q < ra.size() && ra.cols[q] < rm.cols[p])
				++q;
			const double ar = (q < ra.size() && ra.cols[q] == rm.cols[p]) ? ra.vals[q] : 0.0;
			f(pos, i, rm.cols[p], rm.vals[p], ar);
		}
	}
}

SparseMat symmetrize_and_purge(const SparseMat& M, const DropConfig& cfg, DropReport& report)
{
	const SparseMat sym = symmetrize(M);
	std::vector<char> purge(sym.values().size(), 0);
	std::size_t pos = 0;
	for (Index i = 0; i < sym.rows(); ++i) {
		const auto r = sym.row(i);
		for (std::size_t p = 0; p < r.size(); ++p, ++pos) {
			if (r.cols[p] != i && std::fabs(r.vals[p]) < cfg.roundoff) {
				purge[pos] = 1;
				++report.purged_M;
			}
		}
	}
	return report.purged_M > 0 ? filter(sym, purge) : sym;
}

SparseMat select_by_score(const SparseMat& kept, const SparseMat& AR, std::span<const double> colnorms,
                          const DropConfig& cfg, DropReport& report)
{
	std::vector<Candidate> cands;
	cands.reserve(kept.values().size());
	std::vector<double> scores(kept.values().size(), 0.0);
	for_each_with_ar(kept, AR, [&](std::size_t p, Index row, Index col, double m, double ar) {
		if (row == col)
			return;
		scores[p] = drop_score(m, colnorms[static_cast<std::size_t>(row)], ar);
		cands.push_back({scores[p], p});
	});

	const auto count = static_cast<std::size_t>(kept.nnz() - cfg.max_nnz_M);
	const auto drop = select_smallest(std::move(cands), count, kept.values().size());
	for (std::size_t p = 0; p < drop.size(); ++p) {
		if (drop[p]) {
			report.predicted_delta += scores[p];
			++report.dropped_M;
		}
	}
	report.fired = true;
	return filter(kept, drop);
}

void check_main_inputs(const SparseMat& M, std::span<const double> colnorms, const DropConfig& cfg)
{
	if (!M.is_square())
		throw DimensionError("drop_main: M is not square");
	if (static_cast<Index>(colnorms.size()) != M.rows())
		throw DimensionError("drop_main: colnorms length does not match M");
	cfg.validate(M.rows());
}

} // namespace

void DropConfig::validate(Index n) const
{
	if (max_nnz_M < n)
		throw std::invalid_argument("DropConfig: max_nnz_M = " + std::to_string(max_nnz_M)
		                            + " cannot retain the diagonal of an order-"
		                            + std::to_string(n) + " matrix");
	if (max_nnz_P < 0)
		throw std::invalid_argument("DropConfig: max_nnz_P must be non-negative");
	if (!(roundoff >= 0.0))
		throw std::invalid_argument("DropConfig: roundoff must be non-negative");
}

DropConfig drop_config_for(Index n, double density_cap)
{
	const double nn = static_cast<double>(n) * static_cast<double>(n);
	const auto m = static_cast<Index>(std::floor(density_cap * nn));
	return DropConfig{m, m};
}

double predicted_change(const SparseMat& M, const SparseMat& AR,
                        std::span<const double> colnorms, std::span<const EntryIndex> entries)
{
	double total = 0.0;
	for (const auto& e : entries) {
		const double m = M.at(e.row, e.col);
		total += drop_score(m, colnorms[static_cast<std::size_t>(e.row)], AR.at(e.row, e.col));
	}
	return total;
}

SparseMat remove_entries(const SparseMat& X, std::span<const EntryIndex> entries)
{
	std::vector<char> drop(X.values().size(), 0);
	const auto offsets = X.row_offsets();
	for (const auto& e : entries) {
		const auto r = X.row(e.row);
		const auto it = std::lower_bound(r.cols.begin(), r.cols.end(), e.col);
		if (it != r.cols.end() && *it == e.col)
			drop[static_cast<std::size_t>(offsets[static_cast<std::size_t>(e.row)]
			                              + (it - r.cols.begin()))] = 1;
	}
	return filter(X, drop);
}


std::pair<SparseMat, DropReport> drop_main(const SparseMat& M, const SparseMat& AR,
                                           std::span<const double> colnorms,
                                           const DropConfig& cfg)
{
	check_main_inputs(M, colnorms, cfg);
	if (AR.rows() != M.rows() || AR.cols() != M.cols())
		throw DimensionError("drop_main: AR does not conform with M");

	DropReport report;
	SparseMat kept = symmetrize_and_purge(M, cfg, report);
	if (kept.nnz() <= cfg.max_nnz_M)
		return {std::move(kept), report};
	SparseMat out = select_by_score(kept, AR, colnorms, cfg, report);
	return {std::move(out), report};
}

std::pair<SparseMat, DropReport> Dropper::main(const SparseMat& M) const
{
	check_main_inputs(M, colnorms_, cfg_);
	if (M.rows() != A_.rows())
		throw DimensionError("Dropper::main: M does not conform with A");

	DropReport report;
	SparseMat kept = symmetrize_and_purge(M, cfg_, report);
	if (kept.nnz() <= cfg_.max_nnz_M)
		return {std::move(kept), report};
	const SparseMat R = spgeam(1.0, identity(A_.rows()), -1.0, spgemm(A_, kept));
	const SparseMat AR = spgemm(A_, R);
	report.score_spgemm = 2;
	SparseMat out = select_by_score(kept, AR, colnorms_, cfg_, report);
	return {std::move(out), report};
}

std::pair<SparseMat, DropReport> drop_direction(const SparseMat& P, const DropConfig& cfg)
{
	DropReport report;
	if (P.nnz() <= cfg.max_nnz_P)
		return {P, report};

	std::vector<Candidate> cands;
	cands.reserve(P.values().size());
	for (std::size_t p = 0; p < P.values().size(); ++p)
		cands.push_back({std::fabs(P.values()[p]), p});
	const auto count = static_cast<std::size_t>(P.nnz() - cfg.max_nnz_P);
	const auto drop = select_smallest(std::move(cands), count, P.values().size());
	report.dropped_P = static_cast<Index>(count);
	report.fired = true;
	return {filter(P, drop), report};
}

Dropper::Dropper(const SparseMat& A, DropConfig cfg) : A_(A), cfg_(cfg), colnorms_(col_norms_sq(A))
{
	if (!A.is_square())
		throw DimensionError("Dropper: A is not square");
	cfg_.validate(A.rows());
}

} // namespace spai
