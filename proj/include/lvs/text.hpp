#ifndef LVS_TEXT_HPP
#define LVS_TEXT_HPP

#include <optional>
#include <string>

namespace lvs {

/// Shortest round-trip decimal form of x (std::to_chars), so output bytes are
/// a pure function of the value on every platform.
std::string format_double(double x);

/// Empty string for null CSV fields.
std::string format_optional(const std::optional<double>& x);

/// RFC 4180: quote a field when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

}  // namespace lvs

#endif  // LVS_TEXT_HPP
