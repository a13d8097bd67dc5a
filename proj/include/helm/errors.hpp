#pragma once

#include <stdexcept>
#include <string>

namespace helm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// geometry_mesh
struct InvalidDomain : Error { using Error::Error; };
struct MeshQualityFailure : Error { using Error::Error; };
struct RegionOutsideDomain : Error { using Error::Error; };
struct MeshFormatError : Error { using Error::Error; };

// refraction
struct OriginSingularity : Error { using Error::Error; };
struct NonPositiveIndex : Error { using Error::Error; };
struct InadmissibleRefraction : Error { using Error::Error; };

// fem_core
struct EmptyFreeDofs : Error { using Error::Error; };
struct SingularSystem : Error { using Error::Error; };

// radiation_functional
struct OriginInDomain : Error { using Error::Error; };
struct CircleOutsideDomain : Error { using Error::Error; };

// cgm_solver
struct StagnationError : Error { using Error::Error; };
struct NotConverged : Error { using Error::Error; };

// exact_reference
struct DomainError : Error { using Error::Error; };
struct InsideObstacle : Error { using Error::Error; };

// analysis
struct ZeroReference : Error { using Error::Error; };

// cli_runner
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

} // namespace helm
