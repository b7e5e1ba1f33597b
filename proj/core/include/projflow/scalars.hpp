#ifndef PROJFLOW_SCALARS_HPP
#define PROJFLOW_SCALARS_HPP

#include <stdexcept>
#include <string>

namespace projflow {

/// Global tolerance record. All thresholds in one place so experiments can
/// tighten or loosen them coherently.
struct Tolerances {
  double eq = 1e-9;     ///< projective equality of canonical representatives
  double sing = 1e-12;  ///< genericity floor for determinants / pairings
  double gap = 1e-8;    ///< minimal relative eigenvalue gap
  double pos = 1e-12;   ///< positivity floor for triple ratios
  double cl = 1e-9;     ///< closed leaf equality residual bound
  double conv = 1e-6;   ///< Cauchy tolerance for truncated stage limits
};

/// Mutable global tolerances. Seeded once from the environment:
/// PROJFLOW_TOL, when set, overrides the equality tolerance `eq`.
Tolerances& tol();

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateInput : Error {
  using Error::Error;
};
struct NotGeneric : Error {
  using Error::Error;
};
struct DegeneratePoint : Error {
  using Error::Error;
};
struct NotCollinear : Error {
  using Error::Error;
};
struct NotConcurrent : Error {
  using Error::Error;
};
struct NotLoxodromic : Error {
  using Error::Error;
};
struct PointOutsideDomain : Error {
  using Error::Error;
};
struct NonConvexInput : Error {
  using Error::Error;
};
struct IncompatibleTriangulation : Error {
  using Error::Error;
};
struct InvalidAnchors : Error {
  using Error::Error;
};
struct InvalidGluing : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct ConvergenceFailure : Error {
  using Error::Error;
};
struct OutOfDepth : Error {
  using Error::Error;
};
struct SpectralGapTooSmall : Error {
  using Error::Error;
};
struct ChartFailure : Error {
  using Error::Error;
};

/// Transversality failure; carries the offending indices (0-based) when the
/// caller works on an indexed tuple, else -1.
struct NotTransverse : Error {
  int i = -1, j = -1;
  explicit NotTransverse(const std::string& what) : Error(what) {}
  NotTransverse(const std::string& what, int i_, int j_)
      : Error(what + " (flags " + std::to_string(i_) + "," + std::to_string(j_) + ", 0-based)"),
        i(i_),
        j(j_) {}
};

/// Positivity failure; carries the offending triple (0-based) when available.
struct NotPositive : Error {
  int i = -1, j = -1, k = -1;
  explicit NotPositive(const std::string& what) : Error(what) {}
  NotPositive(const std::string& what, int i_, int j_, int k_)
      : Error(what + " (triple " + std::to_string(i_) + "," + std::to_string(j_) + "," +
              std::to_string(k_) + ", 0-based)"),
        i(i_),
        j(j_),
        k(k_) {}
};

}  // namespace projflow

#endif
