/*
 * errors.hpp — exception taxonomy shared by all modules.
 *
 * Misuse (bad ids, malformed input, dimension mismatch) throws
 * std::invalid_argument.  Physics-level refusals carry their own types so
 * callers and tests can tell them apart.  Zero-probability projections are
 * NOT exceptions; see ProjectionResult in statekit.hpp.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace protosim {

struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A populated configuration lies outside the sector the model covers
// (e.g. two photons in a Bragg cavity, |e,1> in a resonant JC exchange).
struct UnsupportedSectorError : SimError {
  using SimError::SimError;
};

// Asked to drop a subsystem that is still correlated with the rest.
struct NonProductError : SimError {
  using SimError::SimError;
};

// The fixed-step integrator failed to meet its accuracy contract.
struct IntegratorError : SimError {
  using SimError::SimError;
};

}  // namespace protosim
