#pragma once

#include <complex>
#include <vector>

#include "mhdlab/grid.hpp"

namespace mhd {

using cd = std::complex<double>;

// Full-spectrum Fourier representation of a real-valued periodic field
// (vector-valued with dim components, or a scalar with one component).
// Coefficients are the series coefficients of f(x) = sum_k c(k) e^{i k.x},
// stored in FFT ordering with x1 the slowest axis. Conjugate symmetry
// c(-k) = conj(c(k)) is an invariant; Nyquist planes are kept at zero.
class SpectralField {
  public:
    SpectralField() = default;
    SpectralField(const Grid& grid, int ncomp)
        : grid_(grid), coef_(ncomp, std::vector<cd>(grid.total(), cd{0.0, 0.0})) {}

    static SpectralField vector_field(const Grid& g) { return {g, g.dim}; }
    static SpectralField scalar_field(const Grid& g) { return {g, 1}; }

    const Grid& grid() const { return grid_; }
    int ncomp() const { return static_cast<int>(coef_.size()); }
    bool is_scalar() const { return ncomp() == 1; }

    std::vector<cd>& comp(int c) { return coef_[c]; }
    const std::vector<cd>& comp(int c) const { return coef_[c]; }

    std::size_t flat(int i1, int i2, int i3 = 0) const {
        const auto& m = grid_.modes;
        return (static_cast<std::size_t>(i1) * m[1] + i2) * m[2] + i3;
    }

    cd& at(int c, int i1, int i2, int i3 = 0) { return coef_[c][flat(i1, i2, i3)]; }
    const cd& at(int c, int i1, int i2, int i3 = 0) const {
        return coef_[c][flat(i1, i2, i3)];
    }

    // Coefficient addressed by integer wavenumber.
    cd& mode(int c, int k1, int k2, int k3 = 0) {
        return at(c, grid_.index_of(0, k1), grid_.index_of(1, k2),
                  grid_.dim == 3 ? grid_.index_of(2, k3) : 0);
    }
    const cd& mode(int c, int k1, int k2, int k3 = 0) const {
        return at(c, grid_.index_of(0, k1), grid_.index_of(1, k2),
                  grid_.dim == 3 ? grid_.index_of(2, k3) : 0);
    }

    bool claims_divergence_free() const { return div_free_; }
    bool claims_zero_mean() const { return zero_mean_; }
    void set_divergence_free(bool v) { div_free_ = v; }
    void set_zero_mean(bool v) { zero_mean_ = v; }

  private:
    Grid grid_;
    std::vector<std::vector<cd>> coef_;
    bool div_free_ = false;
    bool zero_mean_ = false;
};

}  // namespace mhd
