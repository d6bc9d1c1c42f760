#ifndef OKFRAC_ERRORS_HPP
#define OKFRAC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace okfrac {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define OKFRAC_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    explicit Name(const std::string& what) \
        : Error(#Name ": " + what) {}      \
  };

OKFRAC_DEFINE_ERROR(InvalidInstance)
OKFRAC_DEFINE_ERROR(KeyMismatch)
OKFRAC_DEFINE_ERROR(InvalidPermutation)
OKFRAC_DEFINE_ERROR(DuplicateItem)
OKFRAC_DEFINE_ERROR(DomainError)
OKFRAC_DEFINE_ERROR(AlternatingSumUnstable)
OKFRAC_DEFINE_ERROR(ConvergenceFailure)
OKFRAC_DEFINE_ERROR(InvalidSpec)
OKFRAC_DEFINE_ERROR(DegenerateInstance)

#undef OKFRAC_DEFINE_ERROR

}  // namespace okfrac

#endif  // OKFRAC_ERRORS_HPP
