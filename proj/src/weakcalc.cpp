#include "threebox/weakcalc.hpp"

#include <cmath>
#include <stdexcept>

namespace threebox {

BeamsplitterSpec::BeamsplitterSpec(double r_amp, double t_amp,
                                   double ph_r, double ph_t)
    : r(r_amp), t(t_amp), phase_r(ph_r), phase_t(ph_t) {
    if (r < 0.0 || r > 1.0 || t < 0.0 || t > 1.0) {
        throw std::invalid_argument("beamsplitter amplitudes must lie in [0,1]");
    }
    if (std::abs(r * r + t * t - 1.0) > 1e-12) {
        throw std::invalid_argument("beamsplitter amplitudes must satisfy r^2 + t^2 = 1");
    }
}

BeamsplitterSpec BeamsplitterSpec::from_reflectance(double r_amp) {
    if (r_amp < 0.0 || r_amp > 1.0) {
        throw std::invalid_argument("beamsplitter amplitudes must lie in [0,1]");
    }
    return BeamsplitterSpec(r_amp, std::sqrt(1.0 - r_amp * r_amp));
}

BeamsplitterSpec BeamsplitterSpec::balanced() {
    const double h = 1.0 / std::sqrt(2.0);
    return BeamsplitterSpec(h, h);
}

namespace {

Complex checked_overlap(const RailState& pre, const RailState& post) {
    const Complex ov = inner(post, pre);
    if (std::abs(ov) <= kOverlapEpsilon) {
        throw std::domain_error("undefined weak value (zero overlap)");
    }
    return ov;
}

// <post| P_r |pre> for the one-rail projector.
Complex projected_amplitude(const RailState& pre, const RailState& post,
                            std::size_t r) {
    return std::conj(post.amplitudes()[r]) * pre.amplitudes()[r];
}

}  // namespace

WeakValueResult weak_value(const RailState& pre, const RailState& post,
                           const RailProjector& proj) {
    const Complex ov = checked_overlap(pre, post);
    const std::size_t r = post.index_of(proj.rail);
    return {projected_amplitude(pre, post, r) / ov, ov};
}

std::vector<Complex> weak_probabilities(const RailState& pre,
                                        const RailState& post) {
    const Complex ov = checked_overlap(pre, post);
    std::vector<Complex> probs;
    probs.reserve(pre.dimension());
    for (std::size_t r = 0; r < pre.dimension(); ++r) {
        probs.push_back(projected_amplitude(pre, post, r) / ov);
    }
    return probs;
}

namespace {

// Squared post-selection amplitudes of the two branches of a strong
// {P_r, 1-P_r} measurement.
std::pair<double, double> abl_branches(const RailState& pre,
                                       const RailState& post,
                                       const RailProjector& proj) {
    if (pre.dimension() != post.dimension()) {
        throw std::invalid_argument("dimension mismatch between states");
    }
    const std::size_t r = post.index_of(proj.rail);
    const Complex in_amp = projected_amplitude(pre, post, r);
    const Complex out_amp = inner(post, pre) - in_amp;
    const double p_in = std::norm(in_amp);
    const double p_out = std::norm(out_amp);
    if (p_in + p_out <= 1e-30) {
        throw std::domain_error("post-selection impossible");
    }
    return {p_in, p_out};
}

}  // namespace

double abl_probability(const RailState& pre, const RailState& post,
                       const RailProjector& proj) {
    const auto [p_in, p_out] = abl_branches(pre, post, proj);
    return p_in / (p_in + p_out);
}

double abl_complement_probability(const RailState& pre, const RailState& post,
                                  const RailProjector& proj) {
    const auto [p_in, p_out] = abl_branches(pre, post, proj);
    return p_out / (p_in + p_out);
}

Complex joint_weak_probability(const RailState& pre, const RailState& post,
                               const std::string& rail_x,
                               const std::string& rail_y) {
    const Complex ov = checked_overlap(pre, post);
    const std::size_t x = post.index_of(rail_x);
    const std::size_t y = pre.index_of(rail_y);
    if (x != y) return Complex{0.0, 0.0};  // <x|y> = 0 for distinct rails
    return projected_amplitude(pre, post, x) / ov;
}

RailState pre_state_from_bs(const BeamsplitterSpec& bs1,
                            const BeamsplitterSpec& bs2) {
    return make_state({bs1.r, bs1.t * bs2.r, bs1.t * bs2.t});
}

RailState post_state_from_bs(const BeamsplitterSpec& bs3,
                             const BeamsplitterSpec& bs4) {
    return make_state({bs3.t * bs4.r, bs3.r * bs4.r, -bs4.t});
}

RailState balance_pre_state(const RailState& post) {
    std::vector<Complex> amps;
    amps.reserve(post.dimension());
    for (std::size_t r = 0; r < post.dimension(); ++r) {
        const double mag = std::abs(post.amplitudes()[r]);
        if (mag <= 0.0) {
            throw std::invalid_argument("unbalanceable: zero amplitude on rail " +
                                        post.labels()[r]);
        }
        amps.emplace_back(1.0 / mag, 0.0);
    }
    return make_state(std::move(amps), post.labels());
}

}  // namespace threebox
