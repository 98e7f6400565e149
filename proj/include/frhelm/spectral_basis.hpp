#pragma once

// Eigenpairs of  Y''(y) - eps Y''(-y) + lambda Y(y) = 0  on (-pi, pi) under
// Dirichlet, Neumann, periodic and anti-periodic conditions.
//
// Sine (odd) eigenfunctions pick up the factor (1 + eps), cosine (even) ones
// (1 - eps), because Y''(-y) = -Y''(y) for odd Y and +Y''(y) for even Y.
//
// Mode indexing is (kind, parity, k) with k >= k_min(kind, parity). The
// single interleaved index n maps as
//     D : odd -> 2k-1, even -> 2k        (family 1)
//     N : odd -> 2k+1, even -> 2k        (family 2)
//     P : odd -> 2k-1, even -> 2k        (family 3)
//     AP: odd -> 2k+1, even -> 2k        (family 4)
// see serial_index() / from_serial_index().

#include <cmath>
#include <compare>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "frhelm/error.hpp"
#include "frhelm/numeric.hpp"

namespace frhelm {

enum class ProblemKind { Dirichlet, Neumann, Periodic, AntiPeriodic };
enum class Parity { odd, even };

inline const char* to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::Dirichlet: return "D";
    case ProblemKind::Neumann: return "N";
    case ProblemKind::Periodic: return "P";
    case ProblemKind::AntiPeriodic: return "AP";
  }
  return "?";
}

inline const char* to_string(Parity p) { return p == Parity::odd ? "odd" : "even"; }

inline ProblemKind parse_kind(std::string_view s) {
  if (s == "D" || s == "dirichlet" || s == "Dirichlet") return ProblemKind::Dirichlet;
  if (s == "N" || s == "neumann" || s == "Neumann") return ProblemKind::Neumann;
  if (s == "P" || s == "periodic" || s == "Periodic") return ProblemKind::Periodic;
  if (s == "AP" || s == "antiperiodic" || s == "AntiPeriodic" || s == "anti-periodic") {
    return ProblemKind::AntiPeriodic;
  }
  throw Error(ErrorKind::InvalidParams, "unknown problem kind '" + std::string(s) + "' (expected D, N, P or AP)");
}

inline constexpr int k_min(ProblemKind kind, Parity parity) {
  switch (kind) {
    case ProblemKind::Dirichlet: return 1;
    case ProblemKind::Neumann: return 0;
    case ProblemKind::Periodic: return parity == Parity::odd ? 1 : 0;
    case ProblemKind::AntiPeriodic: return 0;
  }
  return 0;
}

struct ModeIndex {
  ProblemKind kind = ProblemKind::Dirichlet;
  Parity parity = Parity::odd;
  int k = 1;

  auto operator<=>(const ModeIndex&) const = default;

  bool valid() const { return k >= k_min(kind, parity); }
};

inline std::string to_string(const ModeIndex& m) {
  return std::string(to_string(m.kind)) + "-" + to_string(m.parity) + " k=" + std::to_string(m.k);
}

inline void require_valid(const ModeIndex& m) {
  if (!m.valid()) {
    throw Error(ErrorKind::UnknownMode, to_string(m) + " is below k_min = " + std::to_string(k_min(m.kind, m.parity)));
  }
}

inline void require_eps(double eps) {
  if (!(std::abs(eps) < 1.0)) {
    throw Error(ErrorKind::EpsOutOfRange, "|eps| < 1 is required, got eps = " + std::to_string(eps));
  }
}

/// Trigonometric wavenumber omega of the mode: Y = sin(omega y) or cos(omega y).
inline double wavenumber(const ModeIndex& m) {
  const double k = m.k;
  switch (m.kind) {
    case ProblemKind::Dirichlet: return m.parity == Parity::odd ? k : k - 0.5;
    case ProblemKind::Neumann: return m.parity == Parity::odd ? k + 0.5 : k;
    case ProblemKind::Periodic: return k;
    case ProblemKind::AntiPeriodic: return k + 0.5;
  }
  return k;
}

inline bool is_constant_mode(const ModeIndex& m) { return m.parity == Parity::even && wavenumber(m) == 0.0; }

/// L2(-pi, pi) normalisation: 1/sqrt(pi), or 1/sqrt(2 pi) for the constant.
inline double norm_const(const ModeIndex& m) {
  return is_constant_mode(m) ? 1.0 / std::sqrt(2.0 * pi) : 1.0 / std::sqrt(pi);
}

inline double eigenvalue(const ModeIndex& m, double eps) {
  require_eps(eps);
  require_valid(m);
  const double w = wavenumber(m);
  const double factor = m.parity == Parity::odd ? 1.0 + eps : 1.0 - eps;
  return factor * w * w;
}

/// Modal frequency sqrt(lambda + c^2).
inline double mu_of_mode(const ModeIndex& m, double eps, double c) {
  return std::sqrt(eigenvalue(m, eps) + c * c);
}

/// Normalised eigenfunction with analytic derivatives of any order.
class Eigenfunction {
 public:
  explicit Eigenfunction(const ModeIndex& m) : mode_(m), omega_(wavenumber(m)), norm_(norm_const(m)) {
    require_valid(m);
  }

  const ModeIndex& mode() const { return mode_; }
  double omega() const { return omega_; }
  double norm() const { return norm_; }

  double operator()(double y) const { return derivative(y, 0); }

  /// d^order/dy^order of norm * sin(omega y) or norm * cos(omega y).
  double derivative(double y, int order) const {
    // Shift the phase by order * pi/2 and scale by omega^order; done with an
    // explicit switch so that sin/cos are evaluated at exactly omega*y.
    const double s = std::sin(omega_ * y);
    const double c = std::cos(omega_ * y);
    const int base = mode_.parity == Parity::odd ? 0 : 1;  // sin -> 0, cos -> 1
    double v = 0.0;
    switch ((base + order) % 4) {
      case 0: v = s; break;
      case 1: v = c; break;
      case 2: v = -s; break;
      case 3: v = -c; break;
    }
    return norm_ * std::pow(omega_, order) * v;
  }

 private:
  ModeIndex mode_;
  double omega_;
  double norm_;
};

inline Eigenfunction eigenfunction(const ModeIndex& m) { return Eigenfunction(m); }

/// y -> Y''(y) - eps Y''(-y) + lambda Y(y), evaluated from the closed forms.
/// Identically zero up to rounding.
inline std::function<double(double)> operator_apply(const ModeIndex& m, double eps) {
  const double lambda = eigenvalue(m, eps);
  Eigenfunction f(m);
  return [f, eps, lambda](double y) { return f.derivative(y, 2) - eps * f.derivative(-y, 2) + lambda * f(y); };
}

/// All modes with k_min <= k <= n_max, odd family first, ascending k. This is
/// the canonical summation order used everywhere downstream.
inline std::vector<ModeIndex> enumerate_modes(ProblemKind kind, int n_max) {
  std::vector<ModeIndex> out;
  for (Parity p : {Parity::odd, Parity::even}) {
    for (int k = k_min(kind, p); k <= n_max; ++k) out.push_back({kind, p, k});
  }
  return out;
}

inline int family_index(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Dirichlet: return 1;
    case ProblemKind::Neumann: return 2;
    case ProblemKind::Periodic: return 3;
    case ProblemKind::AntiPeriodic: return 4;
  }
  return 0;
}

struct SerialIndex {
  int n = 0;       // interleaved index (2k-1, 2k or 2k+1)
  int family = 0;  // 1..4
  auto operator<=>(const SerialIndex&) const = default;
};

inline SerialIndex serial_index(const ModeIndex& m) {
  require_valid(m);
  const bool shifted = m.kind == ProblemKind::Neumann || m.kind == ProblemKind::AntiPeriodic;
  const int n = m.parity == Parity::even ? 2 * m.k : (shifted ? 2 * m.k + 1 : 2 * m.k - 1);
  return {n, family_index(m.kind)};
}

inline ModeIndex from_serial_index(SerialIndex p) {
  ProblemKind kind;
  switch (p.family) {
    case 1: kind = ProblemKind::Dirichlet; break;
    case 2: kind = ProblemKind::Neumann; break;
    case 3: kind = ProblemKind::Periodic; break;
    case 4: kind = ProblemKind::AntiPeriodic; break;
    default: throw Error(ErrorKind::UnknownMode, "family index must be 1..4");
  }
  const bool shifted = kind == ProblemKind::Neumann || kind == ProblemKind::AntiPeriodic;
  ModeIndex m{kind, Parity::even, 0};
  if (p.n % 2 == 0) {
    m.k = p.n / 2;
  } else {
    m.parity = Parity::odd;
    m.k = shifted ? (p.n - 1) / 2 : (p.n + 1) / 2;
  }
  require_valid(m);
  return m;
}

}  // namespace frhelm
