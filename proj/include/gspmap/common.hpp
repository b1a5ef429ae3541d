#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gspmap {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GSPMAP_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

// graph-core
GSPMAP_DEFINE_ERROR(InvalidGraph);
GSPMAP_DEFINE_ERROR(DomainMismatch);
GSPMAP_DEFINE_ERROR(DecompositionFailure);
GSPMAP_DEFINE_ERROR(DisconnectedGraph);
GSPMAP_DEFINE_ERROR(GenerationFailure);
GSPMAP_DEFINE_ERROR(PerturbationFailure);
// statistics
GSPMAP_DEFINE_ERROR(InvalidBeta);
GSPMAP_DEFINE_ERROR(SingularCovariance);
// estimators
GSPMAP_DEFINE_ERROR(InvalidConfig);
GSPMAP_DEFINE_ERROR(SingularNormalEquations);
GSPMAP_DEFINE_ERROR(SingularFilterSystem);
GSPMAP_DEFINE_ERROR(NonFinite);
// psse
GSPMAP_DEFINE_ERROR(ParseError);
GSPMAP_DEFINE_ERROR(DisconnectedNetwork);
GSPMAP_DEFINE_ERROR(InvalidSusceptanceSign);
// harness
GSPMAP_DEFINE_ERROR(IoError);

#undef GSPMAP_DEFINE_ERROR

/// SplitMix64 finalizer; used to derive independent RNG streams from a master seed.
constexpr std::uint64_t mix_seed(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b = 0, std::uint64_t c = 0) noexcept {
  return mix_seed(mix_seed(mix_seed(mix_seed(master) ^ a) ^ b) ^ c);
}

}  // namespace gspmap
