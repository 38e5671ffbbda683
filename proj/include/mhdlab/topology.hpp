#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mhdlab/fields.hpp"
#include "mhdlab/spectral.hpp"

namespace mhd {

enum class PointKind { kSaddle, kCenter, kDegenerate };

using Mat2 = std::array<std::array<double, 2>, 2>;

struct CriticalPoint {
    std::array<double, 2> position{};
    Mat2 jacobian{};
    PointKind kind = PointKind::kDegenerate;
    double residual = 0.0;
    std::optional<std::array<double, 2>> origin;  // unperturbed lattice point
};

// det < -tol: saddle; det > tol: center; else degenerate, with
// tol = 1e-8 * (max |entry|)^2.
PointKind classify(const Mat2& jacobian);

// Newton search seeded from collocation cells where |f| is locally minimal.
// Every returned point has |f| <= tol * max|f|; duplicates within 1e-6 are
// merged. Non-converging seeds are dropped.
std::vector<CriticalPoint> find_critical_points(const SpectralField& f,
                                                double tol = 1e-10);

struct ContinuedPoint {
    std::array<double, 2> lattice{};
    std::array<double, 2> position{};
    PointKind kind = PointKind::kDegenerate;
    int iterations = 0;
    bool lost = false;
};

struct ContinuationReport {
    std::vector<ContinuedPoint> points;
    double radius = 0.0;  // rho_0 = N^{-L}
    bool any_lost = false;
    bool any_merged = false;
    double min_pairwise = 0.0;
};

// Frozen-Jacobian fixed-point continuation of the x*/xbar lattice of the
// base Taylor family into the perturbed field, confined to radius N^{-L}.
ContinuationReport continue_critical_points(const TaylorSpec& base,
                                            const SpectralField& perturbed,
                                            int L);

// psi with grad_perp psi = f, zero mean.
SpectralField stream_function(const SpectralField& f);

enum class Closure { kClosed, kQuasiPeriodic, kUndetermined };

struct FieldLine {
    std::vector<std::array<double, 3>> samples;  // covering space
    Closure closure = Closure::kUndetermined;
    std::array<int, 3> winding{0, 0, 0};          // lattice displacement
    std::array<double, 3> rotation{0.0, 0.0, 0.0};  // displacement / arclength
    double arclength = 0.0;
};

// Unit-speed RK4 integration of the field line through x0. Closure is
// detected on return within 1e-6 of x0 modulo the lattice; entering a
// stagnation neighborhood leaves the closure undetermined.
FieldLine integrate_field_line(const SpectralField& f,
                               const std::array<double, 3>& x0,
                               double max_arclength, double step);

// Lattice displacement for closed lines, rotation estimate otherwise.
std::optional<std::array<int, 3>> winding_vector(const FieldLine& line);

enum class Branch { kUnstablePlus, kUnstableMinus, kStablePlus, kStableMinus };
enum class Connection { kHeteroclinic, kHomoclinic, kNone };

struct SeparatrixReport {
    int source = -1;
    Branch branch = Branch::kUnstablePlus;
    int terminal = -1;  // index into the saddle list, -1 for none
    Connection connection = Connection::kNone;
    double min_approach = 0.0;
};

// Launches from every saddle at offset 1e-4 along each eigenvector and
// integrates up to arclength 8*2pi; approach within 1e-3 of a saddle is a
// connection.
std::vector<SeparatrixReport> trace_separatrices(
    const SpectralField& f, const std::vector<CriticalPoint>& saddles);

// psi(a) - psi(b), gauge invariant.
double saddle_value_gap(const SpectralField& psi,
                        const std::array<double, 2>& a,
                        const std::array<double, 2>& b);

struct TopologyReport {
    std::vector<CriticalPoint> points;
    std::vector<SeparatrixReport> separatrices;
    int n_saddles = 0;
    int n_centers = 0;
    int n_degenerate = 0;
    int n_heteroclinic = 0;
    int n_homoclinic = 0;
};

TopologyReport topology_report(const SpectralField& f);

// The count invariant: no torus homeomorphism can match fields whose
// saddle or center counts differ.
bool reports_equivalent(const TopologyReport& a, const TopologyReport& b);

}  // namespace mhd
