#pragma once

#include <optional>
#include <string>
#include <vector>

#include "levykato/kato.hpp"

namespace levykato {

// Ground-truth suite: (process, potential) pairs with the expected label and,
// where known in closed form, the expected memberships. Cases without fixed
// memberships still assert the consistency lattice and, when the label makes
// the two classes coincide, their equality.
struct BatteryCase {
    std::string name;
    ProcessSpec spec;
    Potential q;
    Label expected_label;
    std::optional<Membership> expected_K;    // time class
    std::optional<Membership> expected_calK; // space class
};

struct BatteryOutcome {
    std::string name;
    Label label;
    Membership K = Membership::Inconclusive;
    Membership calK = Membership::Inconclusive;
    bool label_ok = false;
    bool memberships_ok = false; // expectations (when present) met
    bool lattice_ok = false;     // In-calK implies In-K
    bool coincidence_ok = false; // K == calK whenever the label demands it
    std::string note;
    bool pass() const {
        return label_ok && memberships_ok && lattice_ok && coincidence_ok;
    }
};

std::vector<BatteryCase> builtin_battery();

struct BatteryReport {
    std::vector<BatteryOutcome> outcomes;
    bool all_pass = true;
};

BatteryReport run_battery(const KatoConfig& cfg = {});

} // namespace levykato
