// railspace.hpp
// Complex amplitude vectors over interferometer rails: construction,
// inner products, rail projectors, and the canonical three-box states.

#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace threebox {

using Complex = std::complex<double>;

// Normalized state over N >= 2 rails. Immutable after construction; the
// global phase is whatever the caller supplied (downstream quantities are
// phase-invariant ratios, so no canonicalization is applied).
class RailState {
public:
    // Normalizes the given amplitudes. Labels default to "A", "B", "C", ...
    explicit RailState(std::vector<Complex> amplitudes,
                       std::vector<std::string> labels = {});

    std::size_t dimension() const { return amplitudes_.size(); }
    const std::vector<Complex>& amplitudes() const { return amplitudes_; }
    const std::vector<std::string>& labels() const { return labels_; }

    const Complex& amplitude(std::size_t i) const { return amplitudes_.at(i); }
    const Complex& amplitude(const std::string& rail) const;

    // Index of a rail label; throws std::invalid_argument for unknown rails.
    std::size_t index_of(const std::string& rail) const;

private:
    std::vector<Complex> amplitudes_;
    std::vector<std::string> labels_;
};

// One-rail projector |r><r|.
struct RailProjector {
    std::string rail;
};

// Normalized state from raw amplitudes; relative phases are preserved.
// Throws std::invalid_argument on an all-zero vector ("degenerate state")
// or fewer than two amplitudes.
RailState make_state(std::vector<Complex> amplitudes,
                     std::vector<std::string> labels = {});

// <post|pre> = sum_r conj(post_r) * pre_r. Throws on dimension mismatch.
Complex inner(const RailState& post, const RailState& pre);

// The equally weighted pre-selection and its sign-flipped post-selection:
// (1,1,1)/sqrt(3) and (1,1,-1)/sqrt(3).
std::pair<RailState, RailState> three_box_states();

}  // namespace threebox
