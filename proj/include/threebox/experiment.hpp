// experiment.hpp
// The three measurement campaigns as reproducible scans: single-rail
// displacement sweeps, the single-displacement beam-profile snapshot, and
// the simultaneous displacement + polarization two-pointer sweep. Includes
// the phenomenological fringe-visibility model and sigma-to-pixel scaling.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "threebox/pointer.hpp"
#include "threebox/railspace.hpp"

namespace threebox {

// Rows with |K| below half an rms width count as weak-regime.
inline constexpr double kWeakRegimeBoundary = 0.5;

// Pairwise fringe visibility between the displaced beam and the
// undisplaced rest of the interferometer output. 1 = ideal coherence.
struct VisibilityModel {
    double v = 1.0;

    VisibilityModel() = default;
    explicit VisibilityModel(double vis);
};

struct PixelScale {
    double pixels_per_sigma = 16.09;
};

struct ScanSpec {
    std::string rail;
    double k_min = 0.0;
    double k_max = 0.0;
    int steps = 0;  // >= 2, inclusive endpoints
    VisibilityModel visibility{};
};

struct ScanRow {
    double k = 0.0;
    double mean_shift = 0.0;
    std::optional<double> inferred;  // absent when K == 0
    double success_probability = 0.0;
    bool weak_regime = false;
};

using DataSeries = std::vector<ScanRow>;

enum class PolarizerSetting { None, BlockV, BlockH };

struct TwoPointerRow {
    double k_b = 0.0;
    double mean_shift = 0.0;
    std::optional<double> inferred_p_b;  // absent when K_B == 0
    double inferred_p_c = 0.0;           // polarization rotation / theta
    double success_probability = 0.0;
};

using TwoPointerSeries = std::vector<TwoPointerRow>;

struct BeamProfiles {
    std::vector<double> x_pixels;
    std::vector<double> rail_a;        // each normalized to unit peak
    std::vector<double> rail_b;
    std::vector<double> rail_c;
    std::vector<double> postselected;
};

// Visibility-adjusted shift statistics: cross terms between distinct
// pointer positions scale by the model's v; v = 1 is the ideal result.
ShiftResult shifted_mean(const PostSelectedPointer& ps, double strength,
                         const VisibilityModel& vis);
PointerMoments shifted_moments(const PostSelectedPointer& ps,
                               const VisibilityModel& vis);

// Displaces spec.rail over the inclusive linear grid and records the
// visibility-adjusted shift statistics at each point. Errors from the
// pointer evolution are rethrown annotated with the offending K.
DataSeries scan_single_rail(const ScanSpec& spec, const RailState& pre,
                            const RailState& post,
                            const GaussianPointer& pointer = {});

// Intensity profiles (unit peak) over a pixel grid for each rail alone and
// for the post-selected beam, with the third rail displaced by k_c sigma.
// Uses the "generalized" preset states.
BeamProfiles beam_profiles(double k_c, const PixelScale& scale, int points,
                           const VisibilityModel& vis = {},
                           const GaussianPointer& pointer = {});

// Simultaneous displacement sweep on spec.rail and fixed polarization
// rotation theta on rotation_rail. The polarization readout inferred_p_c
// always refers to the unfiltered post-selected state; the polarizer, when
// present, filters the state used for the displacement readout.
TwoPointerSeries two_pointer_scan(const ScanSpec& spec, double theta,
                                  const std::string& rotation_rail,
                                  PolarizerSetting polarizer,
                                  const RailState& pre, const RailState& post,
                                  const GaussianPointer& pointer = {});

// Named state configurations: "original" (equal weights, sign-flipped
// post), "generalized" (balanced 50/50-output pair), "swapped" (same
// pre-state, post-selection with the roles of the first and third rails
// exchanged). Throws std::invalid_argument for unknown names.
std::pair<RailState, RailState> preset_states(const std::string& name);

}  // namespace threebox
