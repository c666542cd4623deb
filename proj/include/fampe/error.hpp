#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace fampe {

// Every failure raised by the library carries a short machine-readable code
// alongside the human message; the CLI prints them as `error: <code>: <msg>`.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

namespace errc {
inline constexpr const char* invalid_argument = "invalid_argument";
inline constexpr const char* shape_mismatch = "shape_mismatch";
inline constexpr const char* non_finite = "non_finite";
inline constexpr const char* degenerate_spectrum = "degenerate_spectrum";
inline constexpr const char* bad_layout = "bad_layout";
inline constexpr const char* io = "io";
inline constexpr const char* format = "format";
inline constexpr const char* not_found = "not_found";
} // namespace errc

} // namespace fampe
