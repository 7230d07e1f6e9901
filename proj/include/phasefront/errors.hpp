#pragma once

#include <stdexcept>

// Error types thrown across the library. Each names the contract it guards;
// all carry a human-readable message with the offending values.
namespace phasefront {

struct NyquistViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WindowOverrun : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientCoverage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BinningMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroPoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroCrossing : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotHomogeneous : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularTime : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BlowUp : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LevelOutOfBand : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StencilOverrun : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedHamiltonian : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedSignal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FileFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace phasefront
