#pragma once

#include <stdexcept>
#include <string>

namespace rxdg {

/// Base class for all solver errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thermodynamics
struct TemperatureOutOfRange : Error { using Error::Error; };
struct ZeroDensity : Error { using Error::Error; };
struct NonphysicalPressure : Error { using Error::Error; };
struct NoRoot : Error { using Error::Error; };

// Mesh / geometry
struct UnsupportedShape : Error { using Error::Error; };
struct DegenerateElement : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct NonconformingMesh : Error { using Error::Error; };

// Flux / residual
struct InadmissibleInput : Error { using Error::Error; };
struct InadmissibleTraceState : Error { using Error::Error; };

// Limiter / decomposition
struct AverageInadmissible : Error { using Error::Error; };
struct NoPositiveTheta : Error { using Error::Error; };
struct NotStraightSided : Error { using Error::Error; };
struct DegenerateDenominator : Error { using Error::Error; };

// Chemistry / time stepping
struct StiffSolveFailure : Error { using Error::Error; };
struct RetryExhausted : Error { using Error::Error; };

// Configuration / I/O
struct ValidationError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct RegionOverlapAmbiguity : Error { using Error::Error; };

} // namespace rxdg
