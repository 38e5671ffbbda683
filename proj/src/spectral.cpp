#include "mhdlab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace mhd {

namespace {

// Cached FFTW plans keyed by (shape, sign). Plans are created with
// FFTW_ESTIMATE so the algorithm choice, and therefore the rounding of
// results, is deterministic across runs.
class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    void execute(const Grid& g, int sign, std::vector<cd>& data) {
        std::lock_guard<std::mutex> lock(mu_);
        Key key{g.dim, g.modes, sign};
        auto it = plans_.find(key);
        if (it == plans_.end()) {
            buf_.resize(std::max(buf_.size(), g.total()));
            fftw_complex* b = reinterpret_cast<fftw_complex*>(buf_.data());
            fftw_plan p;
            if (g.dim == 2)
                p = fftw_plan_dft_2d(g.modes[0], g.modes[1], b, b, sign,
                                     FFTW_ESTIMATE);
            else
                p = fftw_plan_dft_3d(g.modes[0], g.modes[1], g.modes[2], b, b,
                                     sign, FFTW_ESTIMATE);
            it = plans_.emplace(key, p).first;
        }
        fftw_execute_dft(it->second,
                         reinterpret_cast<fftw_complex*>(data.data()),
                         reinterpret_cast<fftw_complex*>(data.data()));
    }

  private:
    struct Key {
        int dim;
        std::array<int, 3> modes;
        int sign;
        bool operator<(const Key& o) const {
            if (dim != o.dim) return dim < o.dim;
            if (modes != o.modes) return modes < o.modes;
            return sign < o.sign;
        }
    };
    std::mutex mu_;
    std::map<Key, fftw_plan> plans_;
    std::vector<cd> buf_;
};

template <typename Fn>
void for_each_mode(const Grid& g, Fn&& fn) {
    const int n1 = g.modes[0], n2 = g.modes[1], n3 = g.modes[2];
    std::size_t idx = 0;
    for (int i1 = 0; i1 < n1; ++i1) {
        const int k1 = g.freq(0, i1);
        for (int i2 = 0; i2 < n2; ++i2) {
            const int k2 = g.freq(1, i2);
            for (int i3 = 0; i3 < n3; ++i3, ++idx) {
                fn(idx, k1, k2, g.freq(2, i3));
            }
        }
    }
}

// Zero the unresolved Nyquist planes |k_a| = modes_a/2.
void zero_nyquist(SpectralField& f) {
    const Grid& g = f.grid();
    for (int c = 0; c < f.ncomp(); ++c) {
        auto& a = f.comp(c);
        for_each_mode(g, [&](std::size_t idx, int k1, int k2, int k3) {
            if (k1 == g.modes[0] / 2 || k2 == g.modes[1] / 2 ||
                (g.dim == 3 && k3 == g.modes[2] / 2))
                a[idx] = cd{0.0, 0.0};
        });
    }
}

std::size_t conj_index(const Grid& g, int i1, int i2, int i3) {
    const auto wrap = [](int i, int n) { return i == 0 ? 0 : n - i; };
    const auto& m = g.modes;
    return (static_cast<std::size_t>(wrap(i1, m[0])) * m[1] + wrap(i2, m[1])) *
               m[2] +
           wrap(i3, m[2]);
}

}  // namespace

std::vector<std::vector<double>> to_physical(const SpectralField& f) {
    const Grid& g = f.grid();
    std::vector<std::vector<double>> out(f.ncomp());
    std::vector<cd> work;
    for (int c = 0; c < f.ncomp(); ++c) {
        work = f.comp(c);
        PlanCache::instance().execute(g, FFTW_BACKWARD, work);
        out[c].resize(g.total());
        for (std::size_t i = 0; i < work.size(); ++i) out[c][i] = work[i].real();
    }
    return out;
}

SpectralField to_spectral(const std::vector<std::vector<double>>& samples,
                          const Grid& grid) {
    grid.validate();
    SpectralField f(grid, static_cast<int>(samples.size()));
    const double inv = 1.0 / static_cast<double>(grid.total());
    std::vector<cd> work(grid.total());
    for (int c = 0; c < f.ncomp(); ++c) {
        if (samples[c].size() != grid.total())
            throw std::invalid_argument("to_spectral: sample count mismatch");
        for (std::size_t i = 0; i < work.size(); ++i)
            work[i] = cd{samples[c][i], 0.0};
        PlanCache::instance().execute(grid, FFTW_FORWARD, work);
        auto& a = f.comp(c);
        for (std::size_t i = 0; i < work.size(); ++i) a[i] = work[i] * inv;
    }
    zero_nyquist(f);
    enforce_reality(f);
    return f;
}

SpectralField& axpy(SpectralField& y, double a, const SpectralField& x) {
    if (y.grid() != x.grid() || y.ncomp() != x.ncomp())
        throw std::invalid_argument("axpy: incompatible fields");
    for (int c = 0; c < y.ncomp(); ++c) {
        auto& yc = y.comp(c);
        const auto& xc = x.comp(c);
        for (std::size_t i = 0; i < yc.size(); ++i) yc[i] += a * xc[i];
    }
    return y;
}

SpectralField scaled(const SpectralField& f, double a) {
    SpectralField out = f;
    for (int c = 0; c < out.ncomp(); ++c)
        for (auto& v : out.comp(c)) v *= a;
    return out;
}

SpectralField added(const SpectralField& a, const SpectralField& b) {
    SpectralField out = a;
    axpy(out, 1.0, b);
    out.set_divergence_free(a.claims_divergence_free() &&
                            b.claims_divergence_free());
    out.set_zero_mean(a.claims_zero_mean() && b.claims_zero_mean());
    return out;
}

double max_abs_coef(const SpectralField& f) {
    double m = 0.0;
    for (int c = 0; c < f.ncomp(); ++c)
        for (const auto& v : f.comp(c)) m = std::max(m, std::abs(v));
    return m;
}

double mean_magnitude(const SpectralField& f) {
    double m = 0.0;
    for (int c = 0; c < f.ncomp(); ++c) m += std::abs(f.comp(c)[0]);
    return m;
}

double reality_defect(const SpectralField& f) {
    const Grid& g = f.grid();
    double worst = 0.0;
    for (int c = 0; c < f.ncomp(); ++c) {
        const auto& a = f.comp(c);
        std::size_t idx = 0;
        for (int i1 = 0; i1 < g.modes[0]; ++i1)
            for (int i2 = 0; i2 < g.modes[1]; ++i2)
                for (int i3 = 0; i3 < g.modes[2]; ++i3, ++idx) {
                    const cd d = a[conj_index(g, i1, i2, i3)] - std::conj(a[idx]);
                    worst = std::max(worst, std::abs(d));
                }
    }
    return worst;
}

void enforce_reality(SpectralField& f) {
    const Grid& g = f.grid();
    for (int c = 0; c < f.ncomp(); ++c) {
        auto& a = f.comp(c);
        std::size_t idx = 0;
        for (int i1 = 0; i1 < g.modes[0]; ++i1)
            for (int i2 = 0; i2 < g.modes[1]; ++i2)
                for (int i3 = 0; i3 < g.modes[2]; ++i3, ++idx) {
                    const std::size_t j = conj_index(g, i1, i2, i3);
                    if (j < idx) continue;
                    const cd avg = 0.5 * (a[idx] + std::conj(a[j]));
                    a[idx] = avg;
                    a[j] = std::conj(avg);
                }
    }
}

SpectralField differentiate(const SpectralField& f, int axis, int order) {
    if (order < 1) throw std::invalid_argument("differentiate: order >= 1");
    if (axis < 0 || axis >= f.grid().dim)
        throw std::invalid_argument("differentiate: bad axis");
    SpectralField out = f;
    out.set_divergence_free(false);
    for (int c = 0; c < out.ncomp(); ++c) {
        auto& a = out.comp(c);
        for_each_mode(f.grid(), [&](std::size_t idx, int k1, int k2, int k3) {
            const int k = axis == 0 ? k1 : (axis == 1 ? k2 : k3);
            a[idx] *= std::pow(cd{0.0, static_cast<double>(k)}, order);
        });
    }
    return out;
}

SpectralField laplacian(const SpectralField& f) {
    SpectralField out = f;
    for (int c = 0; c < out.ncomp(); ++c) {
        auto& a = out.comp(c);
        for_each_mode(f.grid(), [&](std::size_t idx, int k1, int k2, int k3) {
            a[idx] *= -static_cast<double>(k1 * k1 + k2 * k2 + k3 * k3);
        });
    }
    return out;
}

SpectralField invert_laplacian(const SpectralField& f) {
    const double floor = 1e-14 + 1e-12 * max_abs_coef(f);
    if (mean_magnitude(f) > floor)
        throw std::invalid_argument("invert_laplacian: input has nonzero mean");
    SpectralField out = f;
    for (int c = 0; c < out.ncomp(); ++c) {
        auto& a = out.comp(c);
        for_each_mode(f.grid(), [&](std::size_t idx, int k1, int k2, int k3) {
            const int k2sum = k1 * k1 + k2 * k2 + k3 * k3;
            a[idx] = k2sum == 0 ? cd{0.0, 0.0} : a[idx] / static_cast<double>(-k2sum);
        });
    }
    out.set_zero_mean(true);
    return out;
}

SpectralField divergence(const SpectralField& f) {
    if (f.ncomp() != f.grid().dim)
        throw std::invalid_argument("divergence: needs a vector field");
    SpectralField out = SpectralField::scalar_field(f.grid());
    auto& a = out.comp(0);
    for_each_mode(f.grid(), [&](std::size_t idx, int k1, int k2, int k3) {
        cd s = cd{0.0, static_cast<double>(k1)} * f.comp(0)[idx] +
               cd{0.0, static_cast<double>(k2)} * f.comp(1)[idx];
        if (f.grid().dim == 3)
            s += cd{0.0, static_cast<double>(k3)} * f.comp(2)[idx];
        a[idx] = s;
    });
    return out;
}

double divergence_defect(const SpectralField& f) {
    const double scale = max_abs_coef(f);
    if (scale == 0.0) return 0.0;
    return max_abs_coef(divergence(f)) / scale;
}

SpectralField leray_project(const SpectralField& f) {
    if (f.ncomp() != f.grid().dim)
        throw std::invalid_argument("leray_project: needs a vector field");
    SpectralField out = f;
    const int d = f.grid().dim;
    for_each_mode(f.grid(), [&](std::size_t idx, int k1, int k2, int k3) {
        const double kk[3] = {static_cast<double>(k1), static_cast<double>(k2),
                              static_cast<double>(k3)};
        const double k2sum = kk[0] * kk[0] + kk[1] * kk[1] + kk[2] * kk[2];
        if (k2sum == 0.0) return;
        cd kdotf{0.0, 0.0};
        for (int c = 0; c < d; ++c) kdotf += kk[c] * f.comp(c)[idx];
        kdotf /= k2sum;
        for (int c = 0; c < d; ++c) out.comp(c)[idx] -= kk[c] * kdotf;
    });
    out.set_divergence_free(true);
    return out;
}

SpectralField curl(const SpectralField& f) {
    const Grid& g = f.grid();
    if (f.ncomp() != g.dim)
        throw std::invalid_argument("curl: needs a vector field");
    if (g.dim == 2) {
        // scalar vorticity d1 f2 - d2 f1
        SpectralField out = SpectralField::scalar_field(g);
        auto& a = out.comp(0);
        for_each_mode(g, [&](std::size_t idx, int k1, int k2, int) {
            a[idx] = cd{0.0, static_cast<double>(k1)} * f.comp(1)[idx] -
                     cd{0.0, static_cast<double>(k2)} * f.comp(0)[idx];
        });
        return out;
    }
    SpectralField out = SpectralField::vector_field(g);
    for_each_mode(g, [&](std::size_t idx, int k1, int k2, int k3) {
        const cd ik[3] = {cd{0.0, static_cast<double>(k1)},
                          cd{0.0, static_cast<double>(k2)},
                          cd{0.0, static_cast<double>(k3)}};
        out.comp(0)[idx] = ik[1] * f.comp(2)[idx] - ik[2] * f.comp(1)[idx];
        out.comp(1)[idx] = ik[2] * f.comp(0)[idx] - ik[0] * f.comp(2)[idx];
        out.comp(2)[idx] = ik[0] * f.comp(1)[idx] - ik[1] * f.comp(0)[idx];
    });
    out.set_zero_mean(true);
    return out;
}

SpectralField heat_evolve(const SpectralField& f, double kappa, double t) {
    if (t < 0.0) throw std::invalid_argument("heat_evolve: negative time");
    if (kappa < 0.0) throw std::invalid_argument("heat_evolve: negative kappa");
    SpectralField out = f;
    for (int c = 0; c < out.ncomp(); ++c) {
        auto& a = out.comp(c);
        for_each_mode(f.grid(), [&](std::size_t idx, int k1, int k2, int k3) {
            a[idx] *= std::exp(-kappa * (k1 * k1 + k2 * k2 + k3 * k3) * t);
        });
    }
    return out;
}

double sobolev_norm(const SpectralField& f, int r) {
    if (r < 0) throw std::invalid_argument("sobolev_norm: r >= 0");
    const double vol = std::pow(kTwoPi, f.grid().dim);
    double acc = 0.0;
    for (int c = 0; c < f.ncomp(); ++c) {
        const auto& a = f.comp(c);
        for_each_mode(f.grid(), [&](std::size_t idx, int k1, int k2, int k3) {
            const double k2sum = k1 * k1 + k2 * k2 + k3 * k3;
            double w = 1.0, pow_k = 1.0;
            for (int m = 1; m <= r; ++m) {
                pow_k *= k2sum;
                w += pow_k;
            }
            acc += w * std::norm(a[idx]);
        });
    }
    return std::sqrt(acc * vol);
}

std::vector<double> evaluate_at(const SpectralField& f,
                                const std::array<double, 3>& x) {
    const Grid& g = f.grid();
    // Per-axis phase tables e^{i k x_a}.
    std::array<std::vector<cd>, 3> phase;
    for (int a = 0; a < 3; ++a) {
        phase[a].resize(g.modes[a]);
        for (int i = 0; i < g.modes[a]; ++i) {
            const double arg = g.freq(a, i) * x[a];
            phase[a][i] = cd{std::cos(arg), std::sin(arg)};
        }
    }
    std::vector<double> out(f.ncomp(), 0.0);
    for (int c = 0; c < f.ncomp(); ++c) {
        cd acc{0.0, 0.0};
        std::size_t idx = 0;
        const auto& coefs = f.comp(c);
        for (int i1 = 0; i1 < g.modes[0]; ++i1)
            for (int i2 = 0; i2 < g.modes[1]; ++i2) {
                const cd p12 = phase[0][i1] * phase[1][i2];
                for (int i3 = 0; i3 < g.modes[2]; ++i3, ++idx)
                    acc += coefs[idx] * p12 * phase[2][i3];
            }
        out[c] = acc.real();
    }
    return out;
}

void dealias(SpectralField& f) {
    const Grid& g = f.grid();
    std::array<int, 3> cut{g.modes[0] / 3, g.modes[1] / 3,
                           g.dim == 3 ? g.modes[2] / 3 : 1};
    for (int c = 0; c < f.ncomp(); ++c) {
        auto& a = f.comp(c);
        for_each_mode(g, [&](std::size_t idx, int k1, int k2, int k3) {
            if (std::abs(k1) > cut[0] || std::abs(k2) > cut[1] ||
                (g.dim == 3 && std::abs(k3) > cut[2]))
                a[idx] = cd{0.0, 0.0};
        });
    }
}

Evaluator::Evaluator(const SpectralField& f, double rel_threshold)
    : dim_(f.grid().dim), ncomp_(f.ncomp()) {
    const double cutoff = rel_threshold * max_abs_coef(f);
    for_each_mode(f.grid(), [&](std::size_t idx, int k1, int k2, int k3) {
        double mag = 0.0;
        for (int c = 0; c < ncomp_; ++c) mag = std::max(mag, std::abs(f.comp(c)[idx]));
        if (mag <= cutoff) return;
        Term t;
        t.k = {k1, k2, k3};
        for (int c = 0; c < 3; ++c)
            t.c[c] = c < ncomp_ ? f.comp(c)[idx] : cd{0.0, 0.0};
        terms_.push_back(t);
    });
}

double Evaluator::max_abs_value() const {
    double s = 0.0;
    for (const auto& t : terms_) {
        double mag = 0.0;
        for (int c = 0; c < ncomp_; ++c) mag += std::norm(t.c[c]);
        s += std::sqrt(mag);
    }
    return s;
}

std::array<double, 3> Evaluator::value(const std::array<double, 3>& x) const {
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (const auto& t : terms_) {
        const double arg = t.k[0] * x[0] + t.k[1] * x[1] + t.k[2] * x[2];
        const cd ph{std::cos(arg), std::sin(arg)};
        for (int c = 0; c < ncomp_; ++c) out[c] += (t.c[c] * ph).real();
    }
    return out;
}

void Evaluator::value_and_jacobian(const std::array<double, 3>& x,
                                   std::array<double, 3>& val,
                                   std::array<std::array<double, 3>, 3>& jac) const {
    val = {0.0, 0.0, 0.0};
    for (auto& row : jac) row = {0.0, 0.0, 0.0};
    for (const auto& t : terms_) {
        const double arg = t.k[0] * x[0] + t.k[1] * x[1] + t.k[2] * x[2];
        const cd ph{std::cos(arg), std::sin(arg)};
        for (int c = 0; c < ncomp_; ++c) {
            const cd v = t.c[c] * ph;
            val[c] += v.real();
            for (int a = 0; a < dim_; ++a)
                jac[c][a] += (v * cd{0.0, static_cast<double>(t.k[a])}).real();
        }
    }
}

}  // namespace mhd
