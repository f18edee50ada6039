// pointer.hpp
// Exact post-selected pointer dynamics. A displacement coupling on rail r
// acts as exp(-i K |r><r| P_x) on a Gaussian beam: the rail-r component of
// the wavefunction is displaced by K. A polarization coupling rotates the
// rail's polarization qubit from V toward H by theta. Post-selection keeps
// the (unnormalized) projection onto the final rail state; the surviving
// pointer state is a superposition of displaced Gaussian branches whose
// moments have closed forms in the pairwise Gaussian overlaps.
//
// Gaussian convention: amplitude G(x) = (2 pi s^2)^(-1/4) exp(-x^2/(4 s^2)),
// so the intensity |G|^2 has rms width s. All displacements are measured in
// units of s unless stated otherwise.

#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "threebox/railspace.hpp"

namespace threebox {

// Branches with |weight| below this are dropped after post-selection.
inline constexpr double kBranchEpsilon = 1e-15;

struct GaussianPointer {
    double sigma = 1.0;  // rms width of the intensity profile, > 0
};

// Transverse displacement of one rail by K = gT sigma units.
struct DisplacementCoupling {
    std::string rail;
    double strength = 0.0;
};

// Polarization rotation of one rail from V toward H by theta radians,
// |theta| < pi/2.
struct PolarizationCoupling {
    std::string rail;
    double theta = 0.0;
};

enum class Polarization { V, H };

struct PointerBranch {
    Complex weight;            // conj(post_r) * pre_r, times cos/sin theta
    double displacement = 0.0; // sigma units
    Polarization pol = Polarization::V;
};

// Unnormalized conditional pointer state surviving post-selection. Its
// squared norm (the post-selection success probability) lies in (0, 1].
struct PostSelectedPointer {
    std::vector<PointerBranch> branches;
    double sigma = 1.0;
};

struct PointerMoments {
    double mean_shift = 0.0;          // sigma units
    double success_probability = 0.0; // in (0, 1]
};

struct ShiftResult {
    double mean_shift = 0.0;
    double success_probability = 0.0;
    double inferred = 0.0;  // mean_shift / K
};

// <G_d1 | G_d2> = exp(-(d1-d2)^2 / (8 s^2)). Throws for s <= 0.
double gaussian_overlap(double d1, double d2, double sigma);

// <G_d1 | x | G_d2> = (d1+d2)/2 * exp(-(d1-d2)^2 / (8 s^2)).
double gaussian_x_moment(double d1, double d2, double sigma);

// Applies the couplings rail by rail, projects onto the post state, and
// returns the surviving branch superposition. At most one displacement per
// rail. Throws std::domain_error when nothing survives ("post-selection
// never succeeds"), std::invalid_argument for unknown or repeated rails.
PostSelectedPointer evolve_and_postselect(
    const RailState& pre, const RailState& post,
    const std::vector<DisplacementCoupling>& displacements,
    const std::optional<PolarizationCoupling>& rotation,
    const GaussianPointer& pointer);

// Exact mean position and squared norm of the conditional pointer state via
// the pairwise double sum. Cross terms between branches at distinct pointer
// positions are scaled by cross_coherence (1 = fully coherent, the ideal
// model); branches at the same position always stay mutually coherent.
// Polarization-mismatched pairs never contribute.
PointerMoments pointer_mean(const PostSelectedPointer& ps,
                            double cross_coherence = 1.0);

// pointer_mean plus the inferred probability mean_shift / K. Throws
// std::domain_error at K = 0 ("inferred probability undefined at zero
// coupling"); use pointer_mean when no coupling scale applies.
ShiftResult mean_shift(const PostSelectedPointer& ps, double strength,
                       double cross_coherence = 1.0);

// Independent oracle for pointer_mean: constructs the pointer field
// explicitly on a uniform grid over [-grid_halfwidth, grid_halfwidth] and
// integrates x|phi|^2 and |phi|^2 with the trapezoid rule. The grid must
// cover every displacement by at least 10 sigma and use >= 1001 points.
PointerMoments pointer_mean_numeric(const PostSelectedPointer& ps,
                                    double grid_halfwidth, int points,
                                    double cross_coherence = 1.0);

ShiftResult mean_shift_numeric(const PostSelectedPointer& ps, double strength,
                               double grid_halfwidth, int points,
                               double cross_coherence = 1.0);

// arctan(||H|| / ||V||) where each norm is that polarization block's
// contribution to the squared norm. Exactly theta when a single rotated
// rail survives alone. Throws std::domain_error when the V block is empty
// ("fully rotated state").
double polarization_rotation(const PostSelectedPointer& ps);

// Removes every branch with the blocked polarization. No renormalization:
// the success probability shrinks accordingly. Throws std::domain_error
// when nothing survives ("polarizer extinguishes output").
PostSelectedPointer apply_polarizer(const PostSelectedPointer& ps,
                                    Polarization blocked);

}  // namespace threebox
