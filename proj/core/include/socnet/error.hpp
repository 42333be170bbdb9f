#pragma once

#include <stdexcept>
#include <string>

namespace socnet {

enum class ErrorCode {
  invalid_argument,
  empty_graph,
  undefined_correlation,
  insufficient_data,
  input_error,
  ensemble_warning_rate,
};

// All library failures surface as socnet::Error; the code lets callers map
// failures onto exit statuses without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace socnet
