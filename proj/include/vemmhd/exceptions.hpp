#pragma once

#include <stdexcept>
#include <string>

namespace vemmhd {

// Every failure mode gets its own type so callers (and the CLI) can map
// them to exit codes without string matching.
#define VEMMHD_DEFINE_ERROR(Name)                            \
  struct Name : std::runtime_error {                         \
    explicit Name(const std::string& msg)                    \
        : std::runtime_error(std::string(#Name) + ": " + msg) {} \
  }

VEMMHD_DEFINE_ERROR(NonManifoldEdge);
VEMMHD_DEFINE_ERROR(SelfIntersectingCell);
VEMMHD_DEFINE_ERROR(DegenerateCell);
VEMMHD_DEFINE_ERROR(SingularDecomposition);
VEMMHD_DEFINE_ERROR(SingularMass);
VEMMHD_DEFINE_ERROR(RankDeficiency);
VEMMHD_DEFINE_ERROR(IllConditionedTrace);
VEMMHD_DEFINE_ERROR(InconsistentBC);
VEMMHD_DEFINE_ERROR(SingularSystem);
VEMMHD_DEFINE_ERROR(ResidualTooLarge);
VEMMHD_DEFINE_ERROR(MeshFileError);

#undef VEMMHD_DEFINE_ERROR

}  // namespace vemmhd
