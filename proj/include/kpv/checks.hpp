#pragma once

#include <string>
#include <vector>

#include "kpv/schedules.hpp"

namespace kpv {

// Reference values from closed-form radial quadrature of the resting lump Q:
// M[Q] = 48 pi, E[Q] = -16 pi (cubic weight 1/6), P[Q] = 0.
inline constexpr double kLumpMass = 48 * 3.14159265358979323846;
inline constexpr double kLumpEnergy = -16 * 3.14159265358979323846;

struct CheckResult {
    std::string name;
    double measured = 0;
    double threshold = 0;
    bool pass = false;
    double seconds = 0;
    std::string detail;
};

// weight_profile, localizacion, schedules, lump_identities, conservation, lump_transport,
// rate_identities, decay, interpolation_scaling.
const std::vector<std::string>& check_names();

// Runs one named check at its fixed reference resolution. Schedule exponents come from `s`
// where the check depends on them. Throws std::invalid_argument for an unknown name.
CheckResult run_check(const std::string& name, const ScheduleParams& s = {});

// "name measured=... threshold=... PASS|FAIL seconds=... detail"
std::string format_check(const CheckResult& r);

}  // namespace kpv
