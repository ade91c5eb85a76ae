#pragma once

#include <stdexcept>
#include <string>

namespace sabr {

// Bad user-supplied values (parameters, quotes, config files).
class invalid_input : public std::invalid_argument {
 public:
  explicit invalid_input(const std::string& what) : std::invalid_argument(what) {}
};

// Arguments outside the mathematical domain of a formula (e.g. F + shift <= 0).
class domain_error : public std::domain_error {
 public:
  explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// A formula was requested in a parameter limit where it is undefined
// (e.g. the vol-of-vol correction or the modified vega at alpha = 0).
class degenerate_parameter : public std::domain_error {
 public:
  explicit degenerate_parameter(const std::string& what) : std::domain_error(what) {}
};

// A field that the requested computation needs was not populated
// (e.g. second-order sensitivities in analytic mode).
class unavailable_field : public std::logic_error {
 public:
  explicit unavailable_field(const std::string& what) : std::logic_error(what) {}
};

}  // namespace sabr
