#pragma once

#include <stdexcept>
#include <string>

namespace qkdsim {

// Precondition failures on public operations (bad lengths, ranges, counts).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A primary key with fewer than 7 bits cannot seed a BSTS session.
class KeyTooShort : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// The peer did something the protocol does not allow (e.g. end before start).
class ProtocolViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke an operation's contract in a way no valid input can produce.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace qkdsim
