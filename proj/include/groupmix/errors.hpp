#pragma once

#include <stdexcept>
#include <string>

namespace groupmix {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cayley-table validation failures; messages name the offending cell/triple.
struct NoIdentityError : Error {
  using Error::Error;
};
struct NotLatinSquareError : Error {
  using Error::Error;
};
struct NotAssociativeError : Error {
  using Error::Error;
};

struct CapExceededError : Error {
  using Error::Error;
};
struct DimensionCapError : Error {
  using Error::Error;
};
struct GroupMismatchError : Error {
  using Error::Error;
};
struct NotNormalError : Error {
  using Error::Error;
};
struct ChainMismatchError : Error {
  using Error::Error;
};
struct NotGeneratingError : Error {
  using Error::Error;
};
struct NotNormalInQuotientError : Error {
  using Error::Error;
};
struct HypothesisViolatedError : Error {
  using Error::Error;
};
struct ExponentMismatchError : Error {
  using Error::Error;
};
struct BInfiniteError : Error {
  using Error::Error;
};
struct ConfigInvalidError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace groupmix
