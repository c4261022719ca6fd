/** \file
 * \brief Seeded generators for SPD test matrices.
 */

#ifndef SPAI_MATGEN_HPP
#define SPAI_MATGEN_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "spai/sparse.hpp"

namespace spai {

/// Counter-based generator: the k-th draw of a stream depends only on (seed, stream, k).
class CounterRng
{
public:
	CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

	std::uint64_t next_u64();
	/// Uniform in the open interval (lo, hi).
	double uniform(double lo, double hi);
	/// Uniform integer in [0, bound).
	std::uint64_t below(std::uint64_t bound);

	std::uint64_t counter() const { return counter_; }

private:
	std::uint64_t seed_;
	std::uint64_t stream_;
	std::uint64_t counter_ = 0;
};

enum class Family { TriEigs, BandedEigs, RandPattern, Poisson2D, Wathen };

std::string family_token(Family f);
/// Accepts tri-eigs, banded-eigs, rand-pattern, poisson2d, wathen.
Family parse_family(std::string_view token);

struct MatrixSpec
{
	Family family = Family::TriEigs;
	/// Order for TriEigs, BandedEigs and RandPattern.
	Index n = 0;
	/// Number of planted diagonal entries of L (TriEigs, BandedEigs).
	Index k_distinct = 0;
	double eig_low = 0.0;
	double eig_high = 1.0;
	double offdiag_low = 0.0;
	double offdiag_high = 1.0;
	/// Lower bandwidth of L (BandedEigs).
	Index bandwidth = 1;
	/// Strictly lower entries of L (RandPattern).
	Index nnz_target = 0;
	/// Grid for Poisson2D and Wathen.
	Index nx = 0;
	Index ny = 0;
	std::uint64_t seed = 0;

	/// Throws std::invalid_argument naming the offending field.
	void validate() const;
	/// Order of the generated matrix.
	Index order() const;
};

/// A = L*L^T for the factor families, the stencil or FEM matrix otherwise.
SparseMat gen(const MatrixSpec& spec);

/// Lower triangular factor L of the factor families.
SparseMat gen_factor(const MatrixSpec& spec);

/// key=value lines covering every field relevant to the family.
std::string to_key_values(const MatrixSpec& spec);
/// Parses the output of to_key_values (blank lines and '#' comments ignored).
MatrixSpec spec_from_key_values(std::string_view text);
/// Builds a spec from already split keys; unknown keys are rejected.
MatrixSpec spec_from_map(const std::map<std::string, std::string>& kv);

} // namespace spai

#endif
