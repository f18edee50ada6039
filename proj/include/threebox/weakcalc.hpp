// weakcalc.hpp
// Weak values and weak probabilities of rail projectors for pre- and
// post-selected ensembles, ABL conditional probabilities for strong
// intermediate measurements, joint weak probabilities, and the
// beamsplitter-network parameterization of the selected states.

#pragma once

#include <complex>
#include <vector>

#include "threebox/railspace.hpp"

namespace threebox {

// Pre/post overlaps with magnitude at or below this are treated as
// orthogonal: the weak value denominator is not resolvable.
inline constexpr double kOverlapEpsilon = 1e-12;

struct WeakValueResult {
    Complex value;    // <post|P|pre> / <post|pre>
    Complex overlap;  // <post|pre>, guaranteed nonzero
};

// One beamsplitter: real reflection/transmission amplitudes plus phases.
// r^2 + t^2 must equal 1 within 1e-12. The phases are bookkeeping only;
// the state builders below assume they are compensated by path lengths.
struct BeamsplitterSpec {
    double r = 0.0;
    double t = 1.0;
    double phase_r = 0.0;
    double phase_t = 0.0;

    BeamsplitterSpec(double r_amp, double t_amp,
                     double ph_r = 0.0, double ph_t = 0.0);

    // Spec with reflection amplitude r and t = sqrt(1 - r^2).
    static BeamsplitterSpec from_reflectance(double r_amp);
    // 50/50 splitter.
    static BeamsplitterSpec balanced();
};

// Weak value of |rail><rail| between pre- and post-selection (the pointer
// shift divided by the coupling strength, in the weak limit). Throws
// std::domain_error when the overlap is zero within kOverlapEpsilon.
WeakValueResult weak_value(const RailState& pre, const RailState& post,
                           const RailProjector& proj);

// Weak value of every rail projector, in rail order. Sums to 1.
std::vector<Complex> weak_probabilities(const RailState& pre,
                                        const RailState& post);

// Probability that a strong intermediate measurement of {P, 1-P} yields P,
// conditioned on successful post-selection. Always in [0, 1]. Throws
// std::domain_error when both outcome branches have zero post-selection
// amplitude ("post-selection impossible").
double abl_probability(const RailState& pre, const RailState& post,
                       const RailProjector& proj);

// Probability of the complementary outcome (1-P) in the same binary
// partition; abl_probability + abl_complement_probability == 1.
double abl_complement_probability(const RailState& pre, const RailState& post,
                                  const RailProjector& proj);

// Weak value of |X><X|Y><Y|. Identically zero for distinct rails, reduces
// to weak_value for X == Y.
Complex joint_weak_probability(const RailState& pre, const RailState& post,
                               const std::string& rail_x,
                               const std::string& rail_y);

// State prepared by the input pair of beamsplitters:
// (r1, t1*r2, t1*t2), phases taken as compensated.
RailState pre_state_from_bs(const BeamsplitterSpec& bs1,
                            const BeamsplitterSpec& bs2);

// State selected by the output pair: (t3*r4, r3*r4, -t4). The minus sign
// on the last rail is the fixed phase convention of the output port.
RailState post_state_from_bs(const BeamsplitterSpec& bs3,
                             const BeamsplitterSpec& bs4);

// The real positive-amplitude pre-state with pre_r proportional to
// 1/|post_r|, which makes every rail contribute the same intensity to the
// post-selected output. Throws std::invalid_argument if any post amplitude
// is zero ("unbalanceable").
RailState balance_pre_state(const RailState& post);

}  // namespace threebox
