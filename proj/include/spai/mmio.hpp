/** \file
 * \brief Matrix Market coordinate files.
 */

#ifndef SPAI_MMIO_HPP
#define SPAI_MMIO_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "spai/sparse.hpp"

namespace spai {

/// Base of every reader failure; line() is 1-based, 0 when not tied to a line.
class MMError : public std::runtime_error
{
public:
	MMError(const std::string& what, std::size_t line)
		: std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line)
	{}
	std::size_t line() const { return line_; }

private:
	std::size_t line_;
};

class MMHeaderError : public MMError
{
public:
	using MMError::MMError;
};

/// The header names a format other than coordinate (e.g. array).
class MMFormatError : public MMError
{
public:
	using MMError::MMError;
};

class MMBoundsError : public MMError
{
public:
	using MMError::MMError;
};

/// Size line or entry line that cannot be parsed, or a wrong entry count.
class MMDataError : public MMError
{
public:
	using MMError::MMError;
};

enum class MMField { Real, Integer, Pattern };
enum class MMSymmetry { General, Symmetric };

struct MMHeader
{
	MMField field = MMField::Real;
	MMSymmetry symmetry = MMSymmetry::General;
};

SparseMat read_mm(std::istream& in, MMHeader* header = nullptr);
SparseMat read_mm(const std::string& path, MMHeader* header = nullptr);

/// Writes real coordinate data at 17 significant digits.
/** With symmetry_hint and an exactly symmetric M only the lower triangle is stored. */
void write_mm(const SparseMat& M, std::ostream& out, bool symmetry_hint = false);
/// Writes through a temporary file renamed into place on success.
void write_mm(const SparseMat& M, const std::string& path, bool symmetry_hint = false);

} // namespace spai

#endif
