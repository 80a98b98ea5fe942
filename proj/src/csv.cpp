#include "fkmc/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fkmc/errors.hpp"

namespace fkmc {

namespace {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    out.push_back(cell);
    return out;
}

} // namespace

std::string csv_format(const ReportTable& table) {
    std::ostringstream out;
    for (const auto& line : table.provenance) out << "# " << line << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out << ',';
        out << table.columns[i];
    }
    out << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw DomainError("csv_format: row width does not match the header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_number(row[i]);
        }
        out << "\n";
    }
    return out.str();
}

ReportTable csv_parse(const std::string& text) {
    ReportTable table;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (header_seen)
                throw DomainError("csv_parse: comment after the header at line " +
                                  std::to_string(line_no));
            std::size_t start = 1;
            if (start < line.size() && line[start] == ' ') ++start;
            table.provenance.push_back(line.substr(start));
            continue;
        }
        if (!header_seen) {
            table.columns = split_line(line);
            header_seen = true;
            continue;
        }
        const auto cells = split_line(line);
        if (cells.size() != table.columns.size())
            throw DomainError("csv_parse: row width mismatch at line " + std::to_string(line_no));
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw DomainError("csv_parse: bad number '" + cell + "' at line " +
                                  std::to_string(line_no));
            }
            if (used != cell.size())
                throw DomainError("csv_parse: bad number '" + cell + "' at line " +
                                  std::to_string(line_no));
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    if (!header_seen) throw DomainError("csv_parse: no header line");
    return table;
}

void csv_write_file(const std::string& path, const ReportTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("csv_write_file: cannot open " + path);
    out << csv_format(table);
    if (!out) throw ConfigError("csv_write_file: write failed for " + path);
}

ReportTable csv_read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("csv_read_file: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return csv_parse(buf.str());
}

std::size_t csv_column(const ReportTable& table, const std::string& name) {
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        if (table.columns[i] == name) return i;
    throw DomainError("csv_column: no column named '" + name + "'");
}

} // namespace fkmc
