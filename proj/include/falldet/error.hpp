#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace falldet {

// Error categories map onto the CLI exit codes:
//   Usage -> 1, Data -> 2, Numeric -> 3.
enum class ErrorKind { Usage, Data, Numeric };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail),
        kind_(kind),
        code_(std::move(code)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& code() const { return code_; }

private:
  ErrorKind kind_;
  std::string code_;
};

[[noreturn]] inline void raise_usage(const std::string& code,
                                     const std::string& detail) {
  throw Error(ErrorKind::Usage, code, detail);
}

[[noreturn]] inline void raise_data(const std::string& code,
                                    const std::string& detail) {
  throw Error(ErrorKind::Data, code, detail);
}

[[noreturn]] inline void raise_numeric(const std::string& code,
                                       const std::string& detail) {
  throw Error(ErrorKind::Numeric, code, detail);
}

}  // namespace falldet
