#pragma once

#include <charconv>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace adkyle {

/// Shortest round-trip decimal form; locale independent.
std::string format_number(double v);

/// Comma-separated rows with a header. Numbers use format_number.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  template <typename... Ts>
  void row(const Ts&... fields) {
    bool first = true;
    ((emit(fields, first)), ...);
    out_ << '\n';
  }

  void row(const std::vector<double>& fields);

  std::size_t columns() const { return header_.size(); }

 private:
  template <typename T>
  void emit(const T& v, bool& first) {
    if (!first) out_ << ',';
    first = false;
    if constexpr (std::is_floating_point_v<T>) {
      out_ << format_number(static_cast<double>(v));
    } else if constexpr (std::is_integral_v<T>) {
      out_ << std::to_string(v);
    } else {
      out_ << std::string_view(v);
    }
  }

  std::ostream& out_;
  std::vector<std::string> header_;
};

}  // namespace adkyle
