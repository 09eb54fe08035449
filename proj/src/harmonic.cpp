#include "hfl/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hfl/rng.hpp"

namespace hfl {

Eigen::VectorXd barycenter(const std::vector<std::pair<double, Eigen::VectorXd>>& points) {
    if (points.empty()) throw std::invalid_argument("barycenter of an empty point list");
    double total = 0.0;
    for (const auto& [w, p] : points) {
        if (w < 0.0) throw std::invalid_argument("barycenter weight is negative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("barycenter weights do not sum to 1");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(points.front().second.size());
    for (const auto& [w, p] : points) {
        if (p.size() != out.size()) throw std::invalid_argument("barycenter point dimension mismatch");
        out += w * p;
    }
    return out;
}

EquivariantMap::EquivariantMap(AffineAction action, Eigen::VectorXd base)
    : action_(std::move(action)), base_(std::move(base)) {
    if (base_.size() != action_.dim()) throw std::invalid_argument("base vector dimension mismatch");
    if (!base_.allFinite()) throw std::invalid_argument("base vector has non-finite entries");
}

Eigen::VectorXd EquivariantMap::evaluate(const GroupContext& ctx, const Element& g) const {
    return action_.apply(ctx, g, base_);
}

double local_energy(const EquivariantMap& f, const GroupContext& ctx, const Element& x) {
    const auto& act = f.action();
    Eigen::VectorXd fx = f.evaluate(ctx, x);
    double sum = 0.0;
    for (int t = 0; t < ctx.token_count(); ++t) {
        Eigen::VectorXd fxs = f.evaluate(ctx, ctx.multiply(x, ctx.generator(t)));
        sum += (fx - fxs).squaredNorm();
    }
    return sum / (2.0 * static_cast<double>(act.token_count()));
}

double n_step_energy(const EquivariantMap& f, const GroupContext& ctx, const Element& x, int n, std::size_t cap) {
    WalkMeasure mu = ctx.walk_convolution(n, cap);
    Eigen::VectorXd fx = f.evaluate(ctx, x);
    double sum = 0.0;
    for (const auto& [w, mass] : mu.mass) {
        Eigen::VectorXd fxw = f.evaluate(ctx, ctx.multiply(x, w));
        sum += mass * (fx - fxw).squaredNorm();
    }
    return 0.5 * sum;
}

Eigen::MatrixXd generator_mean_matrix(const AffineAction& action) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(action.dim(), action.dim());
    for (int t = 0; t < action.token_count(); ++t) m += action.generator_matrix(t);
    return m / static_cast<double>(action.token_count());
}

Eigen::VectorXd generator_mean_translation(const AffineAction& action) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(action.dim());
    for (int t = 0; t < action.token_count(); ++t) c += action.generator_translation(t);
    return c / static_cast<double>(action.token_count());
}

Eigen::VectorXd flow_step(const AffineAction& action, const Eigen::VectorXd& v) {
    return 0.5 * (v + generator_mean_matrix(action) * v + generator_mean_translation(action));
}

EquivariantMap averaging(const EquivariantMap& f) {
    return EquivariantMap(f.action(), flow_step(f.action(), f.base()));
}

Eigen::VectorXd laplacian(const EquivariantMap& f, const GroupContext& ctx, const Element& x) {
    Eigen::VectorXd delta_e = f.base() - flow_step(f.action(), f.base());
    return f.action().linear_part(ctx, x) * delta_e;
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::Harmonic: return "harmonic";
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        case Stability::Undecided: return "undecided";
    }
    return "undecided";
}

FlowResult run_flow(const EquivariantMap& f0, const GroupContext& ctx, const FlowOptions& options) {
    const AffineAction& act = f0.action();
    const int R = options.ball_radius;

    // cache A(x) over ball(R+1); neighbors of ball(R) points live there
    std::vector<Element> outer = ctx.ball(R + 1, options.ball_cap);
    std::map<Element, int> position;
    std::vector<Eigen::MatrixXd> linear(outer.size());
    for (std::size_t i = 0; i < outer.size(); ++i) {
        position[outer[i]] = static_cast<int>(i);
        linear[i] = act.linear_part(ctx, outer[i]);
    }
    std::vector<int> inner;  // indices of ball(R) members within `outer`
    std::vector<std::vector<int>> closed_neighborhood;  // x(S u {e}) as indices
    for (std::size_t i = 0; i < outer.size(); ++i) {
        if (ctx.word_length(outer[i]) > R) continue;
        inner.push_back(static_cast<int>(i));
        std::vector<int> nbrs{static_cast<int>(i)};
        for (int t = 0; t < ctx.token_count(); ++t) {
            auto it = position.find(ctx.multiply(outer[i], ctx.generator(t)));
            if (it != position.end()) nbrs.push_back(it->second);
        }
        closed_neighborhood.push_back(std::move(nbrs));
    }

    auto ball_norms = [&](const Eigen::VectorXd& delta_e) {
        std::vector<double> norms(outer.size());
        for (std::size_t i = 0; i < outer.size(); ++i) norms[i] = (linear[i] * delta_e).norm();
        return norms;
    };

    FlowResult result;
    FlowTrace& trace = result.trace;
    StabilityVerdict& verdict = result.verdict;
    verdict.ball_radius = R;
    verdict.iteration_cap = options.max_iterations;
    verdict.witness_point = ctx.identity();

    Eigen::VectorXd v = f0.base();
    Eigen::VectorXd delta_e = v - flow_step(act, v);
    std::vector<double> norms = ball_norms(delta_e);

    auto record_iterate = [&](const Eigen::VectorXd& vec, const Eigen::VectorXd& de, const std::vector<double>& ns) {
        trace.iterates.push_back(vec);
        trace.laplacian_norm_at_e.push_back(de.norm());
        double mx = 0.0;
        for (int idx : inner) mx = std::max(mx, ns[static_cast<std::size_t>(idx)]);
        trace.laplacian_norm_ball_max.push_back(mx);
    };
    record_iterate(v, delta_e, norms);

    int harmonic_at = trace.laplacian_norm_at_e[0] <= options.harmonic_tol ? 0 : -1;

    for (int i = 0; i < options.max_iterations && harmonic_at < 0; ++i) {
        Eigen::VectorXd v_next = flow_step(act, v);
        Eigen::VectorXd delta_next = v_next - flow_step(act, v_next);
        std::vector<double> norms_next = ball_norms(delta_next);

        // Delta(H f_i)(x) <= max over x(S u {e}) of Delta f_i, per ball point
        double worst_ratio = 0.0;
        double worst_excess = -std::numeric_limits<double>::infinity();
        int worst_idx = inner.empty() ? 0 : inner.front();
        for (std::size_t k = 0; k < inner.size(); ++k) {
            double lhs = norms_next[static_cast<std::size_t>(inner[k])];
            double rhs = 0.0;
            for (int nb : closed_neighborhood[k]) rhs = std::max(rhs, norms[static_cast<std::size_t>(nb)]);
            worst_excess = std::max(worst_excess, lhs - rhs);
            double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
            if (ratio >= worst_ratio) {
                worst_ratio = ratio;
                worst_idx = inner[k];
            }
        }
        trace.step_ratio.push_back(worst_ratio);
        trace.monotonicity_excess.push_back(worst_excess);
        if (worst_excess > options.monotonicity_slack)
            throw std::runtime_error("flow monotonicity violated beyond tolerance");

        if (worst_ratio >= 1.0 - 1e-9 && !verdict.equality_seen) {
            // rigidity clause: equality forces Delta f constant
            verdict.equality_seen = true;
            double spread = 0.0;
            Eigen::VectorXd ref = linear[static_cast<std::size_t>(inner.empty() ? 0 : inner.front())] * delta_e;
            for (int idx : inner) spread = std::max(spread, (linear[static_cast<std::size_t>(idx)] * delta_e - ref).norm());
            verdict.delta_constant_on_ball = spread <= 1e-8 * (1.0 + ref.norm());
            verdict.witness_iteration = i;
            verdict.witness_point = outer[static_cast<std::size_t>(worst_idx)];
        }

        v = std::move(v_next);
        delta_e = std::move(delta_next);
        norms = std::move(norms_next);
        record_iterate(v, delta_e, norms);
        if (trace.laplacian_norm_at_e.back() <= options.harmonic_tol) harmonic_at = i + 1;
    }

    if (harmonic_at >= 0) {
        verdict.kind = Stability::Harmonic;
        verdict.i0 = harmonic_at;
        return result;
    }

    // find the earliest i0 from which every step ratio stays below 1
    const auto& ratios = trace.step_ratio;
    int i0 = -1;
    double lambda = 0.0;
    double suffix_max = 0.0;
    std::vector<double> from_here(ratios.size());
    for (int i = static_cast<int>(ratios.size()) - 1; i >= 0; --i) {
        suffix_max = std::max(suffix_max, ratios[static_cast<std::size_t>(i)]);
        from_here[static_cast<std::size_t>(i)] = suffix_max;
    }
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (from_here[i] < 1.0) {
            i0 = static_cast<int>(i);
            lambda = from_here[i];
            break;
        }
    }

    if (i0 >= 0 && i0 < static_cast<int>(ratios.size())) {
        verdict.kind = Stability::Stable;
        verdict.lambda = lambda;
        verdict.i0 = i0;
        return result;
    }

    // ratio >= 1 up to the cap: unstable if that held persistently, else undecided
    int window = std::max(10, options.max_iterations / 10);
    window = std::min<int>(window, static_cast<int>(ratios.size()));
    bool persistent = window > 0;
    for (int i = static_cast<int>(ratios.size()) - window; i < static_cast<int>(ratios.size()) && persistent; ++i)
        persistent = ratios[static_cast<std::size_t>(i)] >= 1.0 - 1e-9;
    verdict.kind = persistent ? Stability::Unstable : Stability::Undecided;
    return result;
}

HarmonicSolution solve_harmonic(const AffineAction& action) {
    const int d = action.dim();
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(d, d) - generator_mean_matrix(action);
    Eigen::VectorXd rhs = generator_mean_translation(action);

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(lhs);
    cod.setThreshold(1e-10);
    Eigen::VectorXd particular = cod.solve(rhs);
    double residual = (lhs * particular - rhs).norm();

    HarmonicSolution sol;
    sol.residual = residual;
    if (residual > 1e-8 * (1.0 + rhs.norm())) {
        sol.kind = HarmonicSolution::Kind::NoSolution;
        sol.particular = Eigen::VectorXd::Zero(d);
        sol.kernel = Eigen::MatrixXd::Zero(d, 0);
        return sol;
    }
    sol.particular = particular;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
    lu.setThreshold(1e-10);
    sol.kernel = lu.kernel();
    if (lu.dimensionOfKernel() == 0) {
        sol.kind = HarmonicSolution::Kind::Unique;
        sol.kernel = Eigen::MatrixXd::Zero(d, 0);
    } else {
        sol.kind = HarmonicSolution::Kind::AffineFamily;
    }
    return sol;
}

std::optional<Eigen::VectorXd> find_fixed_point(const AffineAction& action, double tol) {
    const int d = action.dim();
    const int k = action.token_count();
    Eigen::MatrixXd stacked(k * d, d);
    Eigen::VectorXd target(k * d);
    for (int t = 0; t < k; ++t) {
        stacked.block(t * d, 0, d, d) = action.generator_matrix(t) - Eigen::MatrixXd::Identity(d, d);
        target.segment(t * d, d) = -action.generator_translation(t);
    }
    Eigen::VectorXd v = stacked.completeOrthogonalDecomposition().solve(target);
    double worst = 0.0;
    for (int t = 0; t < k; ++t)
        worst = std::max(worst, (action.generator_matrix(t) * v + action.generator_translation(t) - v).norm());
    if (worst <= tol * (1.0 + v.norm())) return v;
    return std::nullopt;
}

Eigen::VectorXd min_energy_vector(const AffineAction& action, const GroupContext& ctx, const Element& x) {
    const int d = action.dim();
    Eigen::MatrixXd Ax = action.linear_part(ctx, x);
    Eigen::MatrixXd weight = Ax.transpose() * Ax;
    Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
    for (int t = 0; t < action.token_count(); ++t) {
        Eigen::MatrixXd B = Eigen::MatrixXd::Identity(d, d) - action.generator_matrix(t);
        hessian += B.transpose() * weight * B;
        rhs += B.transpose() * weight * action.generator_translation(t);
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(hessian);
    cod.setThreshold(1e-12);
    return cod.solve(rhs);
}

double displacement(const AffineAction& action, const Eigen::VectorXd& v) {
    double worst = 0.0;
    for (int t = 0; t < action.token_count(); ++t)
        worst = std::max(worst, (action.generator_matrix(t) * v + action.generator_translation(t) - v).norm());
    return worst;
}

Eigen::VectorXd near_critical_search(const AffineAction& action, const Eigen::VectorXd& start, double j,
                                     const NearCriticalOptions& options) {
    if (j < 1.0) throw std::invalid_argument("near-critical search needs j >= 1");
    Rng rng(options.seed);
    Eigen::VectorXd v = start;

    auto propose = [&](const Eigen::VectorXd& center, double radius) -> std::optional<Eigen::VectorXd> {
        double dv = displacement(action, center);
        if (options.use_solver_candidate) {
            // displacement least-squares point, pulled into the search ball
            const int d = action.dim();
            const int k = action.token_count();
            Eigen::MatrixXd stacked(k * d, d);
            Eigen::VectorXd target(k * d);
            for (int t = 0; t < k; ++t) {
                stacked.block(t * d, 0, d, d) = action.generator_matrix(t) - Eigen::MatrixXd::Identity(d, d);
                target.segment(t * d, d) = -action.generator_translation(t);
            }
            Eigen::VectorXd candidate = stacked.completeOrthogonalDecomposition().solve(target);
            Eigen::VectorXd step = candidate - center;
            double len = step.norm();
            Eigen::VectorXd w = len <= radius || len == 0.0 ? candidate : Eigen::VectorXd(center + (radius / len) * step);
            if (displacement(action, w) < 0.5 * dv) return w;
        }
        for (int s = 0; s < options.samples; ++s) {
            Eigen::VectorXd dir(action.dim());
            for (int i = 0; i < action.dim(); ++i) dir(i) = rng.next_double(-1.0, 1.0);
            if (dir.norm() == 0.0) continue;
            Eigen::VectorXd w = center + (radius * rng.next_double() / dir.norm()) * dir;
            if (displacement(action, w) < 0.5 * dv) return w;
        }
        return std::nullopt;
    };

    for (int move = 0; move < options.max_moves; ++move) {
        double dv = displacement(action, v);
        if (dv == 0.0) return v;  // exact fixed point
        auto w = propose(v, j * dv);
        if (!w) return v;  // j-near-critical
        v = *w;
    }
    // still halving at the cap: the infimum is likely 0 at a scale we cannot reach
    double dv = displacement(action, v);
    if (dv == 0.0) return v;
    if (!propose(v, j * dv)) return v;
    throw CapReached("near-critical search exhausted its move cap while delta kept halving");
}

}  // namespace hfl
