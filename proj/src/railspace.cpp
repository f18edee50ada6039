#include "threebox/railspace.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace threebox {

namespace {

std::vector<std::string> default_labels(std::size_t n) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < 26) {
            labels.emplace_back(1, static_cast<char>('A' + i));
        } else {
            labels.push_back("R" + std::to_string(i));
        }
    }
    return labels;
}

}  // namespace

RailState::RailState(std::vector<Complex> amplitudes,
                     std::vector<std::string> labels)
    : amplitudes_(std::move(amplitudes)), labels_(std::move(labels)) {
    if (amplitudes_.size() < 2) {
        throw std::invalid_argument("rail state needs at least 2 amplitudes");
    }
    if (labels_.empty()) {
        labels_ = default_labels(amplitudes_.size());
    }
    if (labels_.size() != amplitudes_.size()) {
        throw std::invalid_argument("label count does not match amplitude count");
    }
    std::set<std::string> unique(labels_.begin(), labels_.end());
    if (unique.size() != labels_.size()) {
        throw std::invalid_argument("rail labels must be unique");
    }
    double norm2 = 0.0;
    for (const auto& a : amplitudes_) norm2 += std::norm(a);
    if (norm2 <= 0.0) {
        throw std::invalid_argument("degenerate state: all amplitudes zero");
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& a : amplitudes_) a *= inv;
}

const Complex& RailState::amplitude(const std::string& rail) const {
    return amplitudes_[index_of(rail)];
}

std::size_t RailState::index_of(const std::string& rail) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == rail) return i;
    }
    throw std::invalid_argument("unknown rail: " + rail);
}

RailState make_state(std::vector<Complex> amplitudes,
                     std::vector<std::string> labels) {
    return RailState(std::move(amplitudes), std::move(labels));
}

Complex inner(const RailState& post, const RailState& pre) {
    if (post.dimension() != pre.dimension()) {
        throw std::invalid_argument("dimension mismatch between states");
    }
    Complex sum{0.0, 0.0};
    for (std::size_t i = 0; i < post.dimension(); ++i) {
        sum += std::conj(post.amplitudes()[i]) * pre.amplitudes()[i];
    }
    return sum;
}

std::pair<RailState, RailState> three_box_states() {
    const double a = 1.0 / std::sqrt(3.0);
    return {make_state({a, a, a}), make_state({a, a, -a})};
}

}  // namespace threebox
