#pragma once

#include <iosfwd>
#include <string>

#include "mbgf/integrals.hpp"

namespace mbgf {

// FCIDUMP reader. Accepts the usual header (&FCI ... terminated by / or &END),
// Fortran D exponents, and the sentinel index conventions: all-zero indices carry
// the core energy, k=l=0 carries hcore, j=k=l=0 carries an orbital energy.
// ORBSYM/ISYM are parsed and ignored. Malformed lines raise parse_error with the
// line number.
spatial_integrals parse_fcidump_spatial(std::istream& in);
integral_set parse_fcidump(std::istream& in);
integral_set parse_fcidump_file(const std::string& path);

void write_fcidump(std::ostream& out, const spatial_integrals& sp);

}  // namespace mbgf
