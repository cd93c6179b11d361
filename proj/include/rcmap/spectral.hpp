#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rcmap::spectral {

struct Interval {
  double lower;
  double upper;

  double width() const { return upper - lower; }
  double center() const { return 0.5 * (lower + upper); }
  bool finite() const;
  bool contains(double w) const { return w >= lower && w <= upper; }
};

/// J(w) = gamma * width^2 / ((w - center)^2 + width^2). Defined on the whole
/// real line; `cutoff` sets the quadrature window center +- cutoff * width.
struct Lorentzian {
  double gamma;
  double width;
  double center;
  double cutoff = 50.0;
};

/// Constant `height` on [lower, upper], zero outside. Either bound may be
/// infinite (wide-band limit).
struct Flat {
  double height;
  double lower;
  double upper;
};

/// J(w) = sqrt(radius^2 - (w - center)^2) inside |w - center| <= radius.
struct Semicircle {
  double center;
  double radius;
};

/// Samples of J on a strictly increasing grid, interpolated by a monotone
/// piecewise cubic (Fritsch-Butland slopes). Zero outside the grid.
class Tabulated {
 public:
  Tabulated(std::vector<double> omega, std::vector<double> values);

  double operator()(double w) const;

  std::span<const double> omega() const { return omega_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> slopes() const { return slopes_; }
  std::size_t size() const { return omega_.size(); }
  std::size_t pieces() const { return omega_.size() - 1; }
  double lower() const { return omega_.front(); }
  double upper() const { return omega_.back(); }

  /// Index of the piece [omega[i], omega[i+1]] that contains w (clamped).
  std::size_t locate(double w) const;
  /// Cubic of piece i evaluated at w, also outside the piece.
  double eval_piece(std::size_t i, double w) const;

  /// Exact integrals of the interpolant: int J dw and int w J dw.
  double integral() const;
  double first_moment() const;

 private:
  std::vector<double> omega_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

class SpectralDensity {
 public:
  using Kind = std::variant<Lorentzian, Flat, Semicircle, Tabulated>;

  explicit SpectralDensity(Kind kind);

  static SpectralDensity lorentzian(double gamma, double width, double center,
                                    double cutoff = 50.0);
  static SpectralDensity flat(double height, double lower, double upper);
  static SpectralDensity semicircle(double center, double radius);
  static SpectralDensity tabulated(std::vector<double> omega, std::vector<double> values);

  double operator()(double w) const;

  /// Where J may be nonzero.
  Interval support() const;
  /// Finite interval used for quadrature. For the Lorentzian this is the
  /// cutoff window; for everything else it equals the support.
  Interval window() const;

  const Kind& kind() const { return kind_; }
  std::string kind_name() const;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&kind_);
  }

 private:
  Kind kind_;
};

double eval_sd(const SpectralDensity& sd, double w);

/// Boundary value W0+(w) = i J(w) + PV int dw'/pi J(w')/(w' - w).
/// Closed forms for the parametric kinds; the tabulated kind integrates its
/// interpolant piecewise (see kernels.hpp).
std::complex<double> cauchy_plus(const SpectralDensity& sd, double w);

/// Same quantity through adaptive singularity-subtracted quadrature over the
/// quadrature window. Lorentzian tails beyond the window are added in closed
/// form. Throws QuadratureError when the tolerance is not reached.
std::complex<double> cauchy_plus_quadrature(const SpectralDensity& sd, double w,
                                            double tolerance = 1e-11);

struct RCChainLevel {
  double coupling;  ///< lambda >= 0
  double energy;    ///< on-site energy of the extracted mode
  SpectralDensity residual;
  /// Weight of the parent density outside the quadrature window that was
  /// restored analytically (nonzero only for quadrature-mapped Lorentzians).
  double truncated_weight = 0.0;
};

enum class MapMethod {
  automatic,   ///< closed forms where they exist
  quadrature,  ///< force numerical moments and Cauchy transforms
};

struct MapOptions {
  MapMethod method = MapMethod::automatic;
  /// Grid size used when a residual has to be tabulated from a non-tabulated parent.
  std::size_t grid_points = 801;
  double tolerance = 1e-11;
  /// Relative size of negative residual values that are clamped to zero.
  double breakdown_tolerance = 1e-8;
};

/// One reaction-coordinate extraction: lambda^2 = int J / 2pi,
/// E = int w J / (2pi lambda^2), J1 = 4 lambda^2 J / |W0+|^2.
RCChainLevel rc_map(const SpectralDensity& sd, const MapOptions& options = {});

/// Applies rc_map n times, feeding each residual into the next step.
/// Requires finite support (flat, semicircle or tabulated kinds).
std::vector<RCChainLevel> iterate_chain(const SpectralDensity& sd, int n,
                                        const MapOptions& options = {});

/// Total weight int J dw / 2pi (closed form or exact interpolant integral).
double total_weight(const SpectralDensity& sd);

/// Samples sd on `grid` and returns the tabulated kind.
SpectralDensity tabulate(const SpectralDensity& sd, std::vector<double> grid);

/// Chebyshev-Lobatto nodes on [lower, upper], clustered at the edges.
std::vector<double> edge_clustered_grid(double lower, double upper, std::size_t n);

/// Equal-weight nodes for a Lorentzian: center + width * tan(theta) with
/// theta uniform over the cutoff window.
std::vector<double> lorentzian_grid(const Lorentzian& l, std::size_t n);

/// max |a(w) - b(w)| over `samples` equally spaced points of `over`.
double sup_distance(const SpectralDensity& a, const SpectralDensity& b, Interval over,
                    std::size_t samples = 2001);

}  // namespace rcmap::spectral
