#pragma once

#include <numbers>

// Unit convention
// ---------------
// Every rate, detuning and splitting is stored as an angular frequency in
// rad/us. Configuration files and reports use ordinary frequency in MHz.
// The only conversion in the code base happens through these two functions,
// so 1 MHz <-> 2*pi rad/us.

namespace cascade::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double mhz_to_angular(double mhz) { return two_pi * mhz; }
constexpr double angular_to_mhz(double angular) { return angular / two_pi; }

} // namespace cascade::units
