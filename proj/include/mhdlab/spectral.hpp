#pragma once

#include <array>
#include <vector>

#include "mhdlab/field.hpp"

namespace mhd {

// --- transforms -------------------------------------------------------------

// Real-space samples, one array per component, row-major with x1 slowest.
std::vector<std::vector<double>> to_physical(const SpectralField& f);

// Trigonometric interpolation of real samples; Nyquist planes are zeroed and
// conjugate symmetry is enforced exactly.
SpectralField to_spectral(const std::vector<std::vector<double>>& samples,
                          const Grid& grid);

// --- algebra ----------------------------------------------------------------

SpectralField& axpy(SpectralField& y, double a, const SpectralField& x);
SpectralField scaled(const SpectralField& f, double a);
SpectralField added(const SpectralField& a, const SpectralField& b);

double max_abs_coef(const SpectralField& f);
double mean_magnitude(const SpectralField& f);  // |c(0)| summed over components

// Max over components of max |c(-k) - conj(c(k))|.
double reality_defect(const SpectralField& f);
void enforce_reality(SpectralField& f);

// --- differential operators -------------------------------------------------

// Multiply each coefficient by (i k_axis)^order.
SpectralField differentiate(const SpectralField& f, int axis, int order);

SpectralField laplacian(const SpectralField& f);

// Divide by -|k|^2; the k = 0 coefficient must vanish and is gauged to zero.
SpectralField invert_laplacian(const SpectralField& f);

// Scalar divergence of a vector field.
SpectralField divergence(const SpectralField& f);

// Relative divergence defect: max_k |k.c(k)| / max coefficient magnitude.
double divergence_defect(const SpectralField& f);

// Projection onto divergence-free fields (pressure elimination).
SpectralField leray_project(const SpectralField& f);

// 3-D: vector curl. 2-D: scalar d1 f2 - d2 f1.
SpectralField curl(const SpectralField& f);

// Multiply coefficients by exp(-kappa |k|^2 t).
SpectralField heat_evolve(const SpectralField& f, double kappa, double t);

// --- norms and evaluation ---------------------------------------------------

// sqrt( sum_k sum_{m<=r} |k|^{2m} |c(k)|^2 (2pi)^d ), all components.
double sobolev_norm(const SpectralField& f, int r);

// Exact trigonometric-sum evaluation at an arbitrary point.
std::vector<double> evaluate_at(const SpectralField& f,
                                const std::array<double, 3>& x);

// Zero every coefficient with |k_a| >= modes_a/3 on some axis (2/3 rule).
void dealias(SpectralField& f);

// Sparse evaluator: keeps coefficients above a relative threshold and
// evaluates the field and its Jacobian by direct summation.
class Evaluator {
  public:
    explicit Evaluator(const SpectralField& f, double rel_threshold = 1e-14);

    int dim() const { return dim_; }
    int ncomp() const { return ncomp_; }
    double max_abs_value() const;  // sup-norm bound: sum of |coefficients|

    std::array<double, 3> value(const std::array<double, 3>& x) const;
    // jac[c][a] = d f_c / d x_a
    void value_and_jacobian(const std::array<double, 3>& x,
                            std::array<double, 3>& val,
                            std::array<std::array<double, 3>, 3>& jac) const;

  private:
    struct Term {
        std::array<int, 3> k;
        std::array<cd, 3> c;  // per-component coefficient
    };
    int dim_ = 2;
    int ncomp_ = 2;
    std::vector<Term> terms_;
};

}  // namespace mhd
