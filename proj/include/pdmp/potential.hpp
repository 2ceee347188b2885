#ifndef PDMP_POTENTIAL_HPP
#define PDMP_POTENTIAL_HPP

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pdmp/linalg.hpp"

namespace pdmp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Curvature metadata consumed by the rate bounds.
///
/// `hess_lower_neg` is the L in Hess U >= -L I; +inf means no such bound is
/// known. `hess_upper` is the L in ||Hess U|| <= L; +inf means unbounded.
struct PotentialMeta {
    double m_poincare = 1.0;
    double hess_upper = kInf;
    double hess_lower_neg = kInf;
    double growth_M = 1.0;
    bool is_convex = false;

    void validate() const;
};

/// One-dimensional potential u(s) used as a factor of a separable potential.
struct Factor1D {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> first;
    std::function<double(double)> second;
    /// sup of |u''| over [lo, hi]. When empty, `abs_second_monotone` must
    /// declare that |u''| is nondecreasing in |s|.
    std::function<double(double, double)> sup_abs_second;
    bool abs_second_monotone = false;

    double curvature_sup(double lo, double hi) const;
};

/// u(s) = (s^2 - 1)^2 / 4
Factor1D double_well_factor();
/// u(s) = k s^2 / 2
Factor1D harmonic_factor(double k);

/// Metadata of the double-well factor: m = 0.79209 (spectral gap of the 1D
/// Gibbs measure), u'' >= -1, u'' unbounded above, M = 2.173.
PotentialMeta double_well_meta();

enum class PotentialKind { Quadratic, Product1D, Custom };

/// Which field a bounce clock reflects against: coordinate k of the gradient
/// (zigzag) or the full gradient (bouncy particle sampler).
struct BounceField {
    enum class Kind { Coordinate, Gradient } kind = Kind::Gradient;
    int index = 0;

    static BounceField coordinate(int k) { return {Kind::Coordinate, k}; }
    static BounceField gradient() { return {Kind::Gradient, 0}; }
};

/// Dominating affine rate: rate(t) <= (a + c t)_+ on the horizon.
struct RateEnvelope {
    double a = 0.0;
    double c = 0.0;
};

struct CustomPotential {
    std::function<double(std::span<const double>)> value;
    std::function<void(std::span<const double>, std::span<double>)> gradient;
    /// Optional envelope; without it hess_upper must be finite.
    std::function<RateEnvelope(std::span<const double>, std::span<const double>, BounceField, double)> envelope;
};

/// Target potential U. Immutable after construction.
class Potential {
public:
    static Potential quadratic(const DenseMatrix& a);
    static Potential isotropic_gaussian(int d, double m);
    static Potential diagonal_gaussian(std::span<const double> diag);
    static Potential product(std::vector<Factor1D> factors, const PotentialMeta& meta);
    static Potential double_well_product(int d);
    static Potential custom(int d, CustomPotential fns, const PotentialMeta& meta);

    PotentialKind kind() const { return kind_; }
    int dim() const { return dim_; }
    const PotentialMeta& meta() const { return meta_; }
    const std::string& label() const { return label_; }

    double value(std::span<const double> x) const;
    /// Writes grad U(x) into `grad`, returns U(x).
    double value_and_gradient(std::span<const double> x, std::span<double> grad) const;
    double partial(std::span<const double> x, int k) const;

    /// Quadratic only.
    const DenseMatrix& matrix() const;
    const SymmetricEigen& eigen() const;
    std::shared_ptr<const SymmetricEigen> eigen_ptr() const { return eigen_; }
    const std::vector<Factor1D>& factors() const { return factors_; }
    const CustomPotential& custom_fns() const { return custom_; }

private:
    Potential() = default;

    PotentialKind kind_ = PotentialKind::Custom;
    int dim_ = 0;
    PotentialMeta meta_;
    std::string label_;
    std::shared_ptr<const DenseMatrix> matrix_;
    std::shared_ptr<const SymmetricEigen> eigen_;
    std::vector<Factor1D> factors_;
    CustomPotential custom_;
};

struct GradEval {
    double value;
    Vec grad;
};

/// U(x) and grad U(x). Throws InvalidPotential on non-finite output.
GradEval eval_grad(const Potential& potential, std::span<const double> x);

struct ConvexityBarrier {
    double r = 0.0;
    double r_zz = 0.0;
};

/// R: 0 if convex, sqrt(L) with Hess U >= -L I, else M sqrt(d).
/// R_zz: sqrt(L) with ||Hess U|| <= L, else M sqrt(d).
ConvexityBarrier convexity_barrier(const PotentialMeta& meta, int d);

/// Affine envelope for the bounce rate t -> (v . F(x + t v))_+ on [0, horizon].
/// Exact for quadratic potentials.
RateEnvelope line_rate_envelope(const Potential& potential, std::span<const double> x, std::span<const double> v,
                                BounceField field, double horizon);

/// The true bounce rate (v . F(x))_+ at a point.
double bounce_rate(const Potential& potential, std::span<const double> x, std::span<const double> v,
                   BounceField field);

}  // namespace pdmp

#endif  // PDMP_POTENTIAL_HPP
