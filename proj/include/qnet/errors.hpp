#pragma once

#include <stdexcept>
#include <string>

namespace qnet {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A propagation delay does not land on an integer number of microsecond slots.
struct NonIntegerSlot : Error {
    using Error::Error;
};

// Argument outside its admissible domain (fidelity, Werner parameter, probability).
struct OutOfRange : Error {
    using Error::Error;
};

// Improvement factor is undefined at p_ni == 1 (log of 1 in the denominator).
struct DegenerateLog : Error {
    using Error::Error;
};

struct UnknownPreset : Error {
    using Error::Error;
};

// Infinite sum requested with geometric ratio >= 1.
struct DivergentSeries : Error {
    using Error::Error;
};

// Coherence time too small to admit any valid cut-off.
struct EmptyCutoffDomain : Error {
    using Error::Error;
};

// No cut-off in the domain reaches the target fidelity.
struct Infeasible : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace qnet
