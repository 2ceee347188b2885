#include "pdmp/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pdmp/errors.hpp"

namespace pdmp {

void PotentialMeta::validate() const
{
    if (!(m_poincare > 0.0) || !std::isfinite(m_poincare))
        throw std::invalid_argument("PotentialMeta: m_poincare must be positive and finite");
    if (!(hess_upper > 0.0)) throw std::invalid_argument("PotentialMeta: hess_upper must be positive");
    if (!(hess_lower_neg >= 0.0)) throw std::invalid_argument("PotentialMeta: hess_lower_neg must be nonnegative");
    if (!(growth_M >= 1.0) || !std::isfinite(growth_M))
        throw std::invalid_argument("PotentialMeta: growth_M must be finite and >= 1");
    if (is_convex && hess_lower_neg != 0.0)
        throw std::invalid_argument("PotentialMeta: convex potentials must have hess_lower_neg = 0");
}

double Factor1D::curvature_sup(double lo, double hi) const
{
    if (lo > hi) std::swap(lo, hi);
    if (sup_abs_second) return sup_abs_second(lo, hi);
    if (abs_second_monotone) return std::max(std::abs(second(lo)), std::abs(second(hi)));
    throw UnboundedCurvature("factor '" + name + "' declares neither a curvature bound nor monotone |u''|");
}

Factor1D double_well_factor()
{
    Factor1D f;
    f.name = "double_well";
    f.value = [](double s) {
        const double q = s * s - 1.0;
        return 0.25 * q * q;
    };
    f.first = [](double s) { return s * s * s - s; };
    f.second = [](double s) { return 3.0 * s * s - 1.0; };
    // 3 s^2 - 1 is convex with minimum -1 at 0
    f.sup_abs_second = [](double lo, double hi) {
        double sup = std::max(std::abs(3.0 * lo * lo - 1.0), std::abs(3.0 * hi * hi - 1.0));
        if (lo <= 0.0 && hi >= 0.0) sup = std::max(sup, 1.0);
        return sup;
    };
    return f;
}

Factor1D harmonic_factor(double k)
{
    if (!(k > 0.0)) throw std::invalid_argument("harmonic_factor: stiffness must be positive");
    Factor1D f;
    f.name = "harmonic";
    f.value = [k](double s) { return 0.5 * k * s * s; };
    f.first = [k](double s) { return k * s; };
    f.second = [k](double) { return k; };
    f.abs_second_monotone = true;
    return f;
}

PotentialMeta double_well_meta()
{
    PotentialMeta meta;
    meta.m_poincare = 0.79209;
    meta.hess_upper = kInf;
    meta.hess_lower_neg = 1.0;
    meta.growth_M = 2.173;
    meta.is_convex = false;
    return meta;
}

Potential Potential::quadratic(const DenseMatrix& a)
{
    if (a.rows() == 0 || a.rows() != a.cols()) throw std::invalid_argument("quadratic potential: matrix must be square");
    if (!a.is_symmetric(1e-12)) throw std::invalid_argument("quadratic potential: matrix must be symmetric");

    auto eig = std::make_shared<SymmetricEigen>(jacobi_eigen(a));
    if (!(eig->values.front() > 0.0))
        throw std::invalid_argument("quadratic potential: matrix must be positive definite");

    Potential p;
    p.kind_ = PotentialKind::Quadratic;
    p.dim_ = static_cast<int>(a.rows());
    p.matrix_ = std::make_shared<DenseMatrix>(a);
    p.eigen_ = eig;
    p.meta_.m_poincare = eig->values.front();
    p.meta_.hess_upper = eig->values.back();
    p.meta_.hess_lower_neg = 0.0;
    p.meta_.growth_M = std::max(1.0, eig->values.back());
    p.meta_.is_convex = true;
    p.label_ = "quadratic";
    return p;
}

Potential Potential::isotropic_gaussian(int d, double m)
{
    if (d < 1) throw std::invalid_argument("isotropic_gaussian: d must be >= 1");
    if (!(m > 0.0)) throw std::invalid_argument("isotropic_gaussian: m must be positive");
    Potential p = quadratic(DenseMatrix::diagonal(Vec(static_cast<std::size_t>(d), m)));
    p.label_ = "isotropic";
    return p;
}

Potential Potential::diagonal_gaussian(std::span<const double> diag)
{
    Potential p = quadratic(DenseMatrix::diagonal(diag));
    p.label_ = "diagonal";
    return p;
}

Potential Potential::product(std::vector<Factor1D> factors, const PotentialMeta& meta)
{
    if (factors.empty()) throw std::invalid_argument("product potential: needs at least one factor");
    for (const auto& f : factors)
        if (!f.value || !f.first || !f.second)
            throw std::invalid_argument("product potential: factor '" + f.name + "' lacks an evaluator");
    meta.validate();
    Potential p;
    p.kind_ = PotentialKind::Product1D;
    p.dim_ = static_cast<int>(factors.size());
    p.meta_ = meta;
    p.label_ = "product";
    p.factors_ = std::move(factors);
    return p;
}

Potential Potential::double_well_product(int d)
{
    if (d < 1) throw std::invalid_argument("double_well_product: d must be >= 1");
    Potential p = product(std::vector<Factor1D>(static_cast<std::size_t>(d), double_well_factor()), double_well_meta());
    p.label_ = "double_well";
    return p;
}

Potential Potential::custom(int d, CustomPotential fns, const PotentialMeta& meta)
{
    if (d < 1) throw std::invalid_argument("custom potential: d must be >= 1");
    if (!fns.value || !fns.gradient) throw std::invalid_argument("custom potential: value and gradient are required");
    meta.validate();
    Potential p;
    p.kind_ = PotentialKind::Custom;
    p.dim_ = d;
    p.meta_ = meta;
    p.label_ = "custom";
    p.custom_ = std::move(fns);
    return p;
}

const DenseMatrix& Potential::matrix() const
{
    if (!matrix_) throw std::logic_error("Potential::matrix: not a quadratic potential");
    return *matrix_;
}

const SymmetricEigen& Potential::eigen() const
{
    if (!eigen_) throw std::logic_error("Potential::eigen: not a quadratic potential");
    return *eigen_;
}

double Potential::value(std::span<const double> x) const
{
    switch (kind_) {
    case PotentialKind::Quadratic:
        return 0.5 * matrix_->bilinear(x, x);
    case PotentialKind::Product1D: {
        double u = 0.0;
        for (std::size_t k = 0; k < factors_.size(); ++k) u += factors_[k].value(x[k]);
        return u;
    }
    case PotentialKind::Custom:
        return custom_.value(x);
    }
    return 0.0;
}

double Potential::value_and_gradient(std::span<const double> x, std::span<double> grad) const
{
    switch (kind_) {
    case PotentialKind::Quadratic:
        matrix_->multiply(x, grad);
        return 0.5 * dot(x, grad);
    case PotentialKind::Product1D: {
        double u = 0.0;
        for (std::size_t k = 0; k < factors_.size(); ++k) {
            u += factors_[k].value(x[k]);
            grad[k] = factors_[k].first(x[k]);
        }
        return u;
    }
    case PotentialKind::Custom:
        custom_.gradient(x, grad);
        return custom_.value(x);
    }
    return 0.0;
}

double Potential::partial(std::span<const double> x, int k) const
{
    switch (kind_) {
    case PotentialKind::Quadratic:
        return dot(matrix_->row(static_cast<std::size_t>(k)), x);
    case PotentialKind::Product1D:
        return factors_[static_cast<std::size_t>(k)].first(x[static_cast<std::size_t>(k)]);
    case PotentialKind::Custom: {
        Vec g(x.size());
        custom_.gradient(x, g);
        return g[static_cast<std::size_t>(k)];
    }
    }
    return 0.0;
}

GradEval eval_grad(const Potential& potential, std::span<const double> x)
{
    GradEval out{0.0, Vec(x.size())};
    out.value = potential.value_and_gradient(x, out.grad);
    bool finite = std::isfinite(out.value);
    for (double g : out.grad) finite = finite && std::isfinite(g);
    if (!finite) {
        std::ostringstream msg;
        msg << "potential '" << potential.label() << "' produced a non-finite value or gradient";
        throw InvalidPotential(msg.str());
    }
    return out;
}

ConvexityBarrier convexity_barrier(const PotentialMeta& meta, int d)
{
    const double growth = meta.growth_M * std::sqrt(static_cast<double>(d));
    ConvexityBarrier out;
    if (meta.is_convex)
        out.r = 0.0;
    else if (std::isfinite(meta.hess_lower_neg))
        out.r = std::sqrt(meta.hess_lower_neg);
    else
        out.r = growth;
    out.r_zz = std::isfinite(meta.hess_upper) ? std::sqrt(meta.hess_upper) : growth;
    return out;
}

double bounce_rate(const Potential& potential, std::span<const double> x, std::span<const double> v,
                   BounceField field)
{
    double s;
    if (field.kind == BounceField::Kind::Coordinate) {
        s = v[static_cast<std::size_t>(field.index)] * potential.partial(x, field.index);
    }
    else {
        Vec g(x.size());
        potential.value_and_gradient(x, g);
        s = dot(v, g);
    }
    return s > 0.0 ? s : 0.0;
}

RateEnvelope line_rate_envelope(const Potential& potential, std::span<const double> x, std::span<const double> v,
                                BounceField field, double horizon)
{
    if (!(horizon > 0.0)) throw std::invalid_argument("line_rate_envelope: horizon must be positive");
    const bool coord = field.kind == BounceField::Kind::Coordinate;
    const auto k = static_cast<std::size_t>(field.index);

    switch (potential.kind()) {
    case PotentialKind::Quadratic: {
        const DenseMatrix& a = potential.matrix();
        if (coord) return {v[k] * dot(a.row(k), x), v[k] * dot(a.row(k), v)};
        return {a.bilinear(v, x), a.bilinear(v, v)};
    }
    case PotentialKind::Product1D: {
        const auto& factors = potential.factors();
        auto slope_bound = [&](std::size_t i) {
            return v[i] * v[i] * factors[i].curvature_sup(x[i], x[i] + horizon * v[i]);
        };
        if (coord) return {v[k] * factors[k].first(x[k]), slope_bound(k)};
        RateEnvelope env;
        for (std::size_t i = 0; i < x.size(); ++i) {
            env.a += v[i] * factors[i].first(x[i]);
            env.c += slope_bound(i);
        }
        return env;
    }
    case PotentialKind::Custom: {
        const auto& fns = potential.custom_fns();
        if (fns.envelope) return fns.envelope(x, v, field, horizon);
        const double lip = potential.meta().hess_upper;
        if (!std::isfinite(lip))
            throw UnboundedCurvature("custom potential has no envelope callback and no finite Hessian bound");
        Vec g(x.size());
        fns.gradient(x, g);
        const double speed = norm(v);
        if (coord) return {v[k] * g[k], std::abs(v[k]) * speed * lip};
        return {dot(v, g), speed * speed * lip};
    }
    }
    return {};
}

}  // namespace pdmp
