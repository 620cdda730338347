// Internal construction backdoor for KetState.  Implementation files build
// amplitude maps directly and wrap them here; the public surface stays
// validated constructors only.

#pragma once

#include <map>
#include <utility>
#include <vector>

#include "protosim/statekit.hpp"

namespace protosim::detail {

struct StateAccess {
  static KetState make(std::vector<SubsystemSpec> reg, std::map<ConfigKey, Complex> amps,
                       bool post_selected, double branch_probability) {
    KetState s;
    s.registry_ = std::move(reg);
    s.amps_ = std::move(amps);
    s.post_selected_ = post_selected;
    s.branch_probability_ = branch_probability;
    return s;
  }

  // same registry and tags as `like`, new amplitudes
  static KetState like(const KetState& like, std::map<ConfigKey, Complex> amps) {
    return make(like.registry(), std::move(amps), like.post_selected(),
                like.branch_probability());
  }
};

}  // namespace protosim::detail
