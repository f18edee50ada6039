#include "threebox/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace threebox {

VisibilityModel::VisibilityModel(double vis) : v(vis) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("visibility out of range [0,1]");
    }
}

ShiftResult shifted_mean(const PostSelectedPointer& ps, double strength,
                         const VisibilityModel& vis) {
    return mean_shift(ps, strength, vis.v);
}

PointerMoments shifted_moments(const PostSelectedPointer& ps,
                               const VisibilityModel& vis) {
    return pointer_mean(ps, vis.v);
}

namespace {

std::vector<double> linear_grid(double lo, double hi, int steps) {
    if (steps < 2) {
        throw std::invalid_argument("scan needs at least 2 steps");
    }
    if (!(lo < hi)) {
        throw std::invalid_argument("scan range must satisfy k_min < k_max");
    }
    std::vector<double> ks;
    ks.reserve(steps);
    for (int i = 0; i < steps; ++i) {
        ks.push_back(lo + i * (hi - lo) / (steps - 1));
    }
    return ks;
}

}  // namespace

DataSeries scan_single_rail(const ScanSpec& spec, const RailState& pre,
                            const RailState& post,
                            const GaussianPointer& pointer) {
    DataSeries series;
    for (const double k : linear_grid(spec.k_min, spec.k_max, spec.steps)) {
        try {
            const auto ps = evolve_and_postselect(
                pre, post, {{spec.rail, k}}, std::nullopt, pointer);
            const PointerMoments m = shifted_moments(ps, spec.visibility);
            ScanRow row;
            row.k = k;
            row.mean_shift = m.mean_shift;
            if (k != 0.0) row.inferred = m.mean_shift / k;
            row.success_probability = m.success_probability;
            row.weak_regime = std::abs(k) < kWeakRegimeBoundary * pointer.sigma;
            series.push_back(row);
        } catch (const std::exception& e) {
            throw std::runtime_error("scan failed at K = " + std::to_string(k) +
                                     ": " + e.what());
        }
    }
    return series;
}

BeamProfiles beam_profiles(double k_c, const PixelScale& scale, int points,
                           const VisibilityModel& vis,
                           const GaussianPointer& pointer) {
    if (!std::isfinite(k_c)) {
        throw std::invalid_argument("displacement must be finite");
    }
    if (points < 2) {
        throw std::invalid_argument("profile needs at least 2 points");
    }
    if (!(scale.pixels_per_sigma > 0.0)) {
        throw std::invalid_argument("pixel scale must be positive");
    }
    const auto [pre, post] = preset_states("generalized");
    const auto ps =
        evolve_and_postselect(pre, post, {{"C", k_c}}, std::nullopt, pointer);

    const double s = pointer.sigma;
    const double lo = std::min(0.0, k_c) - 6.0 * s;
    const double hi = std::max(0.0, k_c) + 6.0 * s;

    BeamProfiles out;
    out.x_pixels.reserve(points);
    std::vector<std::vector<double>*> cols = {&out.rail_a, &out.rail_b,
                                              &out.rail_c, &out.postselected};
    for (auto* c : cols) c->reserve(points);

    const auto bump = [s](double x, double d) {
        const double u = x - d;
        return std::exp(-u * u / (2.0 * s * s));
    };
    for (int i = 0; i < points; ++i) {
        const double x = lo + i * (hi - lo) / (points - 1);
        out.x_pixels.push_back(x * scale.pixels_per_sigma);
        out.rail_a.push_back(bump(x, 0.0));
        out.rail_b.push_back(bump(x, 0.0));
        out.rail_c.push_back(bump(x, k_c));
        double intensity = 0.0;
        for (const auto& bj : ps.branches) {
            for (const auto& bk : ps.branches) {
                const double c =
                    bj.displacement == bk.displacement ? 1.0 : vis.v;
                intensity += c * std::real(std::conj(bj.weight) * bk.weight) *
                             std::sqrt(bump(x, bj.displacement) *
                                       bump(x, bk.displacement));
            }
        }
        out.postselected.push_back(intensity);
    }
    // each column normalized to unit peak over the sampled grid
    for (auto* col : cols) {
        const double peak = *std::max_element(col->begin(), col->end());
        for (auto& y : *col) y /= peak;
    }
    return out;
}

TwoPointerSeries two_pointer_scan(const ScanSpec& spec, double theta,
                                  const std::string& rotation_rail,
                                  PolarizerSetting polarizer,
                                  const RailState& pre, const RailState& post,
                                  const GaussianPointer& pointer) {
    if (theta == 0.0) {
        throw std::invalid_argument("two-pointer scan needs a nonzero rotation");
    }
    TwoPointerSeries series;
    for (const double k : linear_grid(spec.k_min, spec.k_max, spec.steps)) {
        try {
            const auto ps = evolve_and_postselect(
                pre, post, {{spec.rail, k}},
                PolarizationCoupling{rotation_rail, theta}, pointer);
            TwoPointerRow row;
            row.k_b = k;
            row.inferred_p_c = polarization_rotation(ps) / theta;
            const PostSelectedPointer measured =
                polarizer == PolarizerSetting::None
                    ? ps
                    : apply_polarizer(ps, polarizer == PolarizerSetting::BlockV
                                              ? Polarization::V
                                              : Polarization::H);
            const PointerMoments m = shifted_moments(measured, spec.visibility);
            row.mean_shift = m.mean_shift;
            if (k != 0.0) row.inferred_p_b = m.mean_shift / k;
            row.success_probability = m.success_probability;
            series.push_back(row);
        } catch (const std::exception& e) {
            throw std::runtime_error("two-pointer scan failed at K = " +
                                     std::to_string(k) + ": " + e.what());
        }
    }
    return series;
}

std::pair<RailState, RailState> preset_states(const std::string& name) {
    if (name == "original") {
        return three_box_states();
    }
    const double h = 1.0 / std::sqrt(2.0);
    if (name == "generalized") {
        return {make_state({std::sqrt(0.4), std::sqrt(0.4), std::sqrt(0.2)}),
                make_state({0.5, 0.5, -h})};
    }
    if (name == "swapped") {
        return {make_state({std::sqrt(0.4), std::sqrt(0.4), std::sqrt(0.2)}),
                make_state({-0.5, 0.5, h})};
    }
    throw std::invalid_argument("unknown states preset: " + name);
}

}  // namespace threebox
