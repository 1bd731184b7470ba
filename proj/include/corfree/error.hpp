#ifndef CORFREE_ERROR_HPP_
#define CORFREE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace corfree {

  class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
  };

  // A computation would exceed the configured size cap.
  class SizeCapError : public Error {
   public:
    using Error::Error;
  };

  // Input data violates a structural invariant (bad table, non-subgroup, ...).
  class ValidationError : public Error {
   public:
    using Error::Error;
  };

  class NormalityError : public Error {
   public:
    using Error::Error;
  };

  // An operation was asked to run outside its hypotheses.
  class PreconditionError : public Error {
   public:
    using Error::Error;
  };

  class ParseError : public Error {
   public:
    using Error::Error;
  };

  namespace detail {
    template <typename E = ValidationError>
    inline void require(bool cond, std::string const& what) {
      if (!cond) {
        throw E(what);
      }
    }
  }  // namespace detail

}  // namespace corfree

#endif  // CORFREE_ERROR_HPP_
