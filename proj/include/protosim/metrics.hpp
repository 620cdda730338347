/*
 * metrics.hpp — quantitative state comparison and entanglement measures.
 *
 * States are compared by |<a|b>|^2; the overlap phase is reported rather
 * than silently absorbed, so phase-convention differences stay visible.
 * Entropy is the base-2 von Neumann entropy of the reduced density matrix
 * of one side of a bipartition; negativity is the absolute sum of the
 * negative eigenvalues of the partially transposed two-party matrix.
 * Both are computed on the occupied local supports, which is exact for
 * sparse states and keeps large multipartite registries cheap.
 */

#pragma once

#include <string>
#include <vector>

#include "protosim/statekit.hpp"

namespace protosim {

struct OverlapReport {
  double fidelity = 0.0;  // |<a|b>|^2, within [0, 1 + 1e-12]
  double phase = 0.0;     // arg <a|b> (rad)
  bool basis_mismatch = false;
};

// Exact sparse inner product.  Registries must carry the same subsystems
// (id, kind and basis); a differing registry order is reconciled, anything
// else throws.
OverlapReport fidelity(const KetState& a, const KetState& b);

// Non-throwing variant for report generation: a registry mismatch comes
// back as {0, 0, basis_mismatch = true}.
OverlapReport fidelity_report(const KetState& a, const KetState& b);

// Base-2 von Neumann entropy across (side_a | rest).  Eigenvalues below
// 1e-12 are dropped before the log; an eigenvalue below -1e-9 is an error.
// The state must be normalized.
double entanglement_entropy(const KetState& state, const std::vector<std::string>& side_a);

// Sum of |negative eigenvalues| of the partial transpose over side_a.
double negativity(const KetState& state, const std::vector<std::string>& side_a);

}  // namespace protosim
