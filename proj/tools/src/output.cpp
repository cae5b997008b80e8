#include "qcrb_cli/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace qcrb::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

Json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v == 0.0 ? 0.0 : v;
}

Json matrix_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      row.push_back(Json::array({json_number(m(i, j).real()), json_number(m(i, j).imag())}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string plain(const Cell& c) {
  struct {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(const Json& j) const { return j.dump(); }
  } visit;
  return std::visit(visit, c);
}

std::string csv_field(const Cell& c) {
  std::string s = plain(c);
  if (std::holds_alternative<Json>(c) ||
      s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  }
  return s;
}

}  // namespace

void write_csv(const Table& t, std::ostream& out) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    out << (i ? "," : "") << t.columns[i];
  }
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
    out << '\n';
  }
}

void write_text(const Table& t, std::ostream& out) {
  std::vector<bool> block(t.columns.size(), false);
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (std::holds_alternative<Json>(row[i])) block[i] = true;
    }
  }
  std::vector<std::size_t> width(t.columns.size());
  for (std::size_t i = 0; i < t.columns.size(); ++i) width[i] = t.columns[i].size();
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!block[i]) width[i] = std::max(width[i], plain(row[i]).size());
    }
  }
  auto emit = [&](auto get) {
    bool first = true;
    std::string line;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (block[i]) continue;
      std::string s = get(i);
      if (!first) line += "  ";
      first = false;
      line += s + std::string(width[i] - s.size(), ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  };
  emit([&](std::size_t i) { return t.columns[i]; });
  for (const auto& row : t.rows) emit([&](std::size_t i) { return plain(row[i]); });

  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (!block[i]) continue;
      out << '\n' << t.columns[i] << " (row " << r << ", " << t.columns[0] << " = "
          << plain(t.rows[r][0]) << "):\n";
      const auto* j = std::get_if<Json>(&t.rows[r][i]);
      if (j && j->is_array()) {
        for (const auto& line : *j) {
          std::string text;
          for (const auto& entry : line) {
            const double re = entry[0].is_null() ? NAN : entry[0].get<double>();
            const double im = entry[1].is_null() ? NAN : entry[1].get<double>();
            text += (text.empty() ? "  " : "  ") + format_double(re) + (im < 0 ? "-" : "+") +
                    format_double(std::abs(im)) + "i";
          }
          out << text << '\n';
        }
      } else {
        out << "  " << plain(t.rows[r][i]) << '\n';
      }
    }
  }
}

Json rows_json(const Table& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      const Cell& c = row[i];
      if (std::holds_alternative<std::monostate>(c)) obj[t.columns[i]] = nullptr;
      else if (const auto* d = std::get_if<double>(&c)) obj[t.columns[i]] = json_number(*d);
      else if (const auto* n = std::get_if<long long>(&c)) obj[t.columns[i]] = *n;
      else if (const auto* b = std::get_if<bool>(&c)) obj[t.columns[i]] = *b;
      else if (const auto* s = std::get_if<std::string>(&c)) obj[t.columns[i]] = *s;
      else obj[t.columns[i]] = std::get<Json>(c);
    }
    rows.push_back(std::move(obj));
  }
  return rows;
}

}  // namespace qcrb::cli
