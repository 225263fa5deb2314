#include "adkyle/csv.hpp"

#include <array>
#include <cmath>

namespace adkyle {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), header_(std::move(header)) {
  for (std::size_t c = 0; c < header_.size(); ++c) {
    if (c) out_ << ',';
    out_ << header_[c];
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& fields) {
  for (std::size_t c = 0; c < fields.size(); ++c) {
    if (c) out_ << ',';
    out_ << format_number(fields[c]);
  }
  out_ << '\n';
}

}  // namespace adkyle
