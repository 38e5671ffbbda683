#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <stdexcept>

namespace mhd {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Collocation grid on the torus [0, 2pi)^d. Unused axes have modes == 1.
struct Grid {
    int dim = 2;
    std::array<int, 3> modes{1, 1, 1};

    Grid() = default;
    Grid(int n1, int n2) : dim(2), modes{n1, n2, 1} { validate(); }
    Grid(int n1, int n2, int n3) : dim(3), modes{n1, n2, n3} { validate(); }

    void validate() const {
        if (dim != 2 && dim != 3)
            throw std::invalid_argument("Grid: dim must be 2 or 3");
        for (int a = 0; a < dim; ++a) {
            if (modes[a] < 8 || modes[a] % 2 != 0)
                throw std::invalid_argument(
                    "Grid: modes per axis must be even and >= 8");
        }
    }

    std::size_t total() const {
        std::size_t n = 1;
        for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(modes[a]);
        return n;
    }

    // Integer wavenumber for a storage index (standard FFT ordering).
    int freq(int axis, int idx) const {
        const int n = modes[axis];
        return idx <= n / 2 ? idx : idx - n;
    }

    // Storage index of an integer wavenumber, |k| < modes/2.
    int index_of(int axis, int k) const {
        const int n = modes[axis];
        if (k < -(n / 2 - 1) || k > n / 2 - 1)
            throw std::out_of_range("Grid: wavenumber outside resolved band");
        return k >= 0 ? k : k + n;
    }

    bool resolves(int axis, int k) const {
        return k > -(modes[axis] / 2) && k < modes[axis] / 2;
    }

    double spacing(int axis) const { return kTwoPi / modes[axis]; }

    // Physical sample coordinate x_j = 2pi j / modes.
    double coord(int axis, int j) const { return kTwoPi * j / modes[axis]; }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.dim == b.dim && a.modes == b.modes;
    }
    friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }
};

}  // namespace mhd
