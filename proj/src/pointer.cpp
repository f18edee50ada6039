#include "threebox/pointer.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace threebox {

namespace {

void check_sigma(double sigma) {
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("pointer sigma must be positive");
    }
}

// Norm contribution of the pol-matched pair (j,k), with the coherence
// factor for distinct pointer positions.
double pair_factor(const PointerBranch& j, const PointerBranch& k,
                   double cross_coherence) {
    if (j.pol != k.pol) return 0.0;
    return j.displacement == k.displacement ? 1.0 : cross_coherence;
}

}  // namespace

double gaussian_overlap(double d1, double d2, double sigma) {
    check_sigma(sigma);
    const double d = d1 - d2;
    return std::exp(-d * d / (8.0 * sigma * sigma));
}

double gaussian_x_moment(double d1, double d2, double sigma) {
    return 0.5 * (d1 + d2) * gaussian_overlap(d1, d2, sigma);
}

PostSelectedPointer evolve_and_postselect(
    const RailState& pre, const RailState& post,
    const std::vector<DisplacementCoupling>& displacements,
    const std::optional<PolarizationCoupling>& rotation,
    const GaussianPointer& pointer) {
    check_sigma(pointer.sigma);
    if (pre.dimension() != post.dimension()) {
        throw std::invalid_argument("dimension mismatch between states");
    }
    std::vector<double> shift(pre.dimension(), 0.0);
    std::set<std::size_t> displaced;
    for (const auto& c : displacements) {
        if (!std::isfinite(c.strength)) {
            throw std::invalid_argument("coupling strength must be finite");
        }
        const std::size_t r = pre.index_of(c.rail);
        if (!displaced.insert(r).second) {
            throw std::invalid_argument("repeated displacement coupling on rail " + c.rail);
        }
        shift[r] = c.strength;
    }
    std::size_t rotated = pre.dimension();
    double theta = 0.0;
    if (rotation) {
        if (!(std::abs(rotation->theta) < M_PI / 2.0)) {
            throw std::invalid_argument("polarization angle must satisfy |theta| < pi/2");
        }
        rotated = pre.index_of(rotation->rail);
        theta = rotation->theta;
    }

    PostSelectedPointer ps;
    ps.sigma = pointer.sigma;
    for (std::size_t r = 0; r < pre.dimension(); ++r) {
        const Complex w = std::conj(post.amplitudes()[r]) * pre.amplitudes()[r];
        const auto push = [&ps](Complex weight, double d, Polarization pol) {
            if (std::abs(weight) >= kBranchEpsilon) {
                ps.branches.push_back({weight, d, pol});
            }
        };
        if (r == rotated) {
            push(w * std::cos(theta), shift[r], Polarization::V);
            push(w * std::sin(theta), shift[r], Polarization::H);
        } else {
            push(w, shift[r], Polarization::V);
        }
    }
    if (ps.branches.empty() ||
        pointer_mean(ps).success_probability <= 1e-30) {
        throw std::domain_error("post-selection never succeeds");
    }
    return ps;
}

PointerMoments pointer_mean(const PostSelectedPointer& ps,
                            double cross_coherence) {
    check_sigma(ps.sigma);
    double num = 0.0;
    double norm = 0.0;
    for (const auto& j : ps.branches) {
        for (const auto& k : ps.branches) {
            const double c = pair_factor(j, k, cross_coherence);
            if (c == 0.0) continue;
            const double re = c * std::real(std::conj(j.weight) * k.weight);
            norm += re * gaussian_overlap(j.displacement, k.displacement, ps.sigma);
            num += re * gaussian_x_moment(j.displacement, k.displacement, ps.sigma);
        }
    }
    return {num / norm, norm};
}

ShiftResult mean_shift(const PostSelectedPointer& ps, double strength,
                       double cross_coherence) {
    if (strength == 0.0) {
        throw std::domain_error("inferred probability undefined at zero coupling");
    }
    const PointerMoments m = pointer_mean(ps, cross_coherence);
    return {m.mean_shift, m.success_probability, m.mean_shift / strength};
}

PointerMoments pointer_mean_numeric(const PostSelectedPointer& ps,
                                    double grid_halfwidth, int points,
                                    double cross_coherence) {
    check_sigma(ps.sigma);
    if (points < 1001) {
        throw std::invalid_argument("numeric grid needs at least 1001 points");
    }
    double max_d = 0.0;
    for (const auto& b : ps.branches) {
        max_d = std::max(max_d, std::abs(b.displacement));
    }
    if (grid_halfwidth < max_d + 10.0 * ps.sigma) {
        throw std::invalid_argument("insufficient grid coverage: halfwidth must exceed "
                                    "every displacement by 10 sigma");
    }

    const double s = ps.sigma;
    const double amp = std::pow(2.0 * M_PI * s * s, -0.25);
    const auto g = [amp, s](double x, double d) {
        const double u = x - d;
        return amp * std::exp(-u * u / (4.0 * s * s));
    };
    const double h = 2.0 * grid_halfwidth / (points - 1);

    double norm = 0.0;
    double num = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = -grid_halfwidth + i * h;
        double intensity = 0.0;
        if (cross_coherence == 1.0) {
            // direct field construction, one complex amplitude per pol block
            Complex fv{0.0, 0.0};
            Complex fh{0.0, 0.0};
            for (const auto& b : ps.branches) {
                (b.pol == Polarization::V ? fv : fh) += b.weight * g(x, b.displacement);
            }
            intensity = std::norm(fv) + std::norm(fh);
        } else {
            for (const auto& bj : ps.branches) {
                for (const auto& bk : ps.branches) {
                    const double c = pair_factor(bj, bk, cross_coherence);
                    if (c == 0.0) continue;
                    intensity += c * std::real(std::conj(bj.weight) * bk.weight) *
                                 g(x, bj.displacement) * g(x, bk.displacement);
                }
            }
        }
        const double wt = (i == 0 || i == points - 1) ? 0.5 : 1.0;
        norm += wt * intensity;
        num += wt * x * intensity;
    }
    norm *= h;
    num *= h;
    return {num / norm, norm};
}

ShiftResult mean_shift_numeric(const PostSelectedPointer& ps, double strength,
                               double grid_halfwidth, int points,
                               double cross_coherence) {
    if (strength == 0.0) {
        throw std::domain_error("inferred probability undefined at zero coupling");
    }
    const PointerMoments m =
        pointer_mean_numeric(ps, grid_halfwidth, points, cross_coherence);
    return {m.mean_shift, m.success_probability, m.mean_shift / strength};
}

namespace {

// One polarization block's contribution to the squared norm; a positive
// semidefinite quadratic form, clamped against tiny negative round-off.
double block_norm2(const PostSelectedPointer& ps, Polarization pol) {
    double n = 0.0;
    for (const auto& j : ps.branches) {
        if (j.pol != pol) continue;
        for (const auto& k : ps.branches) {
            if (k.pol != pol) continue;
            n += std::real(std::conj(j.weight) * k.weight) *
                 gaussian_overlap(j.displacement, k.displacement, ps.sigma);
        }
    }
    return std::max(n, 0.0);
}

}  // namespace

double polarization_rotation(const PostSelectedPointer& ps) {
    const double nv = block_norm2(ps, Polarization::V);
    const double nh = block_norm2(ps, Polarization::H);
    if (nv <= 1e-30) {
        throw std::domain_error("fully rotated state: no V component to reference");
    }
    return std::atan(std::sqrt(nh / nv));
}

PostSelectedPointer apply_polarizer(const PostSelectedPointer& ps,
                                    Polarization blocked) {
    PostSelectedPointer out;
    out.sigma = ps.sigma;
    for (const auto& b : ps.branches) {
        if (b.pol != blocked) out.branches.push_back(b);
    }
    if (out.branches.empty() ||
        pointer_mean(out).success_probability <= 1e-30) {
        throw std::domain_error("polarizer extinguishes output");
    }
    return out;
}

}  // namespace threebox
