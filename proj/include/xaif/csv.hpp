#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace xaif::csv {

// RFC 4180 records: quoted fields may contain commas, doubled quotes and newlines.
// Throws DataError on an unterminated quote.
std::vector<std::vector<std::string>> read_all(std::istream& in);

std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace xaif::csv
