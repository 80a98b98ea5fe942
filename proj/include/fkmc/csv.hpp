// CSV emission and parsing. Numbers are written with 17 significant digits
// so a parse-emit round trip is exact; '#' lines before the header carry
// provenance and survive the round trip.

#pragma once

#include <string>
#include <vector>

#include "fkmc/verify.hpp"

namespace fkmc {

std::string csv_format(const ReportTable& table);

ReportTable csv_parse(const std::string& text);

void csv_write_file(const std::string& path, const ReportTable& table);

ReportTable csv_read_file(const std::string& path);

// Column lookup; throws DomainError when absent.
std::size_t csv_column(const ReportTable& table, const std::string& name);

} // namespace fkmc
