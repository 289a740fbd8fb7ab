#pragma once

namespace lccool {

// Every frequency or rate inside the library is angular (rad/s). Configuration
// files and CSV columns speak in ordinary frequencies nu = omega/2pi (Hz),
// matching the conventions of typical circuit-QED parameter tables; the
// conversion happens exactly once at the I/O boundary.

inline constexpr double kTwoPi = 6.28318530717958647692528676656;
inline constexpr double kHbar = 1.054571817e-34;       // J s
inline constexpr double kBoltzmann = 1.380649e-23;     // J / K

constexpr double hz_to_angular(double hz) { return kTwoPi * hz; }
constexpr double angular_to_hz(double omega) { return omega / kTwoPi; }

}  // namespace lccool
