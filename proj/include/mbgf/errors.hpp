#pragma once

#include <stdexcept>
#include <string>

namespace mbgf {

// Exit-code categories used by the command line driver.
enum class error_category : int {
  usage = 2,
  input = 3,
  validation = 4,
  numerical = 5,
};

class mbgf_error : public std::runtime_error {
 public:
  mbgf_error(error_category cat, const std::string& msg)
      : std::runtime_error(msg), category_(cat) {}
  error_category category() const { return category_; }

 private:
  error_category category_;
};

class usage_error : public mbgf_error {
 public:
  explicit usage_error(const std::string& msg) : mbgf_error(error_category::usage, msg) {}
};

class parse_error : public mbgf_error {
 public:
  explicit parse_error(const std::string& msg, long line = -1)
      : mbgf_error(error_category::input,
                   line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

class validation_error : public mbgf_error {
 public:
  explicit validation_error(const std::string& msg)
      : mbgf_error(error_category::validation, msg) {}
};

class numerical_error : public mbgf_error {
 public:
  explicit numerical_error(const std::string& msg)
      : mbgf_error(error_category::numerical, msg) {}
};

}  // namespace mbgf
