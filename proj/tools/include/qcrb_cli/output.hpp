#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qcrb/linalg.hpp"

namespace qcrb::cli {

using Json = nlohmann::ordered_json;

// Empty, number, integer, flag, text, or a nested JSON value (matrices).
using Cell = std::variant<std::monostate, double, long long, bool, std::string, Json>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
std::string format_double(double v);

// Finite doubles as numbers, non-finite as null.
Json json_number(double v);

// [[[re, im], ...], ...], the same layout model files use.
Json matrix_json(const ComplexMatrix& m);

// Header line plus one line per row. Empty cells stay empty; JSON cells are
// written as quoted compact JSON.
void write_csv(const Table& t, std::ostream& out);

// Aligned columns. JSON-valued cells are printed as blocks after the table.
void write_text(const Table& t, std::ostream& out);

// Array of objects keyed by column name; empty cells become null.
Json rows_json(const Table& t);

}  // namespace qcrb::cli
