/** \file
 * \brief Nonzero dropping for the main iterate and the search direction.
 */

#ifndef SPAI_DROPPING_HPP
#define SPAI_DROPPING_HPP

#include <span>
#include <utility>
#include <vector>

#include "spai/sparse.hpp"

namespace spai {

struct DropConfig
{
	/// Stored-entry budget for the approximate inverse.
	Index max_nnz_M = 0;
	/// Stored-entry budget for the search direction.
	Index max_nnz_P = 0;
	/// Off-diagonal entries of M below this magnitude are purged.
	double roundoff = 0x1p-53;

	/// Throws std::invalid_argument if the budget cannot hold the diagonal of an order-n matrix.
	void validate(Index n) const;
};

/// Budget of floor(cap * n^2) entries for both M and P.
DropConfig drop_config_for(Index n, double density_cap);

struct DropReport
{
	/// Entries removed by the score-based selection.
	Index dropped_M = 0;
	/// Off-diagonal entries removed by the round-off purge.
	Index purged_M = 0;
	Index dropped_P = 0;
	/// Sum of the scores of the entries removed by the selection.
	double predicted_delta = 0.0;
	/// True when the budget was exceeded and the selection ran.
	bool fired = false;
	/// SpGEMMs Dropper::main spent forming A*(I - A*M) for the scores.
	int score_spgemm = 0;
};

struct EntryIndex
{
	Index row;
	Index col;
};

/// Change of ||I - AM||_F^2 caused by zeroing m_kl alone: m^2 ||Ae_k||^2 + 2 m (AR)_kl.
inline double drop_score(double m_kl, double colnorm_k, double ar_kl)
{
	return m_kl * m_kl * colnorm_k + 2.0 * m_kl * ar_kl;
}

/// Sum of drop_score over the given entries, ignoring interactions within a column.
double predicted_change(const SparseMat& M, const SparseMat& AR,
                        std::span<const double> colnorms, std::span<const EntryIndex> entries);

/// Copy of X without the listed entries (entries missing from the pattern are ignored).
SparseMat remove_entries(const SparseMat& X, std::span<const EntryIndex> entries);

/// Symmetrize, purge round-off, then drop the lowest-scoring off-diagonal entries.
/**
 * AR must be A*(I - A*M) and colnorms the squared column norms of A. The
 * diagonal of M is never dropped. Ties between equal scores go to the entry
 * that comes first in row-major order.
 */
std::pair<SparseMat, DropReport> drop_main(const SparseMat& M, const SparseMat& AR,
                                           std::span<const double> colnorms,
                                           const DropConfig& cfg);

/// Keep the max_nnz_P entries of largest magnitude (diagonal included).
std::pair<SparseMat, DropReport> drop_direction(const SparseMat& P, const DropConfig& cfg);

/// Dropping hooks bound to one coefficient matrix.
class Dropper
{
public:
	Dropper(const SparseMat& A, DropConfig cfg);

	/// drop_main with AR formed from the symmetrized, purged M, and only when the budget is exceeded.
	std::pair<SparseMat, DropReport> main(const SparseMat& M) const;
	std::pair<SparseMat, DropReport> direction(const SparseMat& P) const
	{
		return drop_direction(P, cfg_);
	}

	const DropConfig& config() const { return cfg_; }
	std::span<const double> colnorms() const { return colnorms_; }

private:
	SparseMat A_;
	DropConfig cfg_;
	std::vector<double> colnorms_;
};

} // namespace spai

#endif
