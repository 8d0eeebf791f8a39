#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

// Base for everything the library throws on purpose. The CLI maps these to
// exit codes; anything else escaping is a bug (exit 4).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error { using Error::Error; };            // bad input / bad file
struct IoError : Error { using Error::Error; };                // filesystem trouble
struct InvalidChannelError : Error { using Error::Error; };    // channel index out of 1..W
struct InfeasibleActionError : Error { using Error::Error; };  // transmit with no whole packet queued
struct SpaceTooLargeError : Error { using Error::Error; };     // state count past the configured limit
struct ConvergenceFailureError : Error { using Error::Error; };
struct NonUnichainError : Error { using Error::Error; };       // stationary solve rejected the chain
struct InvalidBracketError : Error { using Error::Error; };    // mixing needs cost_above > budget > cost_below
struct NoFeasiblePolicyError : Error { using Error::Error; };  // budget unreachable at this sampling rate
struct AllInfeasibleError : Error { using Error::Error; };     // every grid rate unreachable
struct TooLargeError : Error { using Error::Error; };          // oracle enumerability guard

}  // namespace aoi
