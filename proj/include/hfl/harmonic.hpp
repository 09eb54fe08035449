#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "hfl/affine.hpp"
#include "hfl/group.hpp"

namespace hfl {

/// weighted mean of finitely many points; weights must be a probability vector
Eigen::VectorXd barycenter(const std::vector<std::pair<double, Eigen::VectorXd>>& points);

/// rho-equivariant map f: Gamma -> R^d, determined by its value at the
/// identity: f(g) = rho(g) f(e).
class EquivariantMap {
public:
    EquivariantMap(AffineAction action, Eigen::VectorXd base);

    const AffineAction& action() const { return action_; }
    const Eigen::VectorXd& base() const { return base_; }  // f(e)
    Eigen::VectorXd evaluate(const GroupContext& ctx, const Element& g) const;

private:
    AffineAction action_;
    Eigen::VectorXd base_;
};

/// E(f)(x) = (1/(2#S)) sum_s ||f(x) - f(xs)||^2
double local_energy(const EquivariantMap& f, const GroupContext& ctx, const Element& x);

/// E^(n)(f)(x) = 1/2 sum_{x'} ||f(x) - f(x')||^2 mu^n(x -> x'), exact
double n_step_energy(const EquivariantMap& f, const GroupContext& ctx, const Element& x, int n,
                     std::size_t cap = kDefaultSupportCap);

/// the averaging operator H; (Hf)(e) = (1/2)(f(e) + (1/#S) sum_s f(s))
EquivariantMap averaging(const EquivariantMap& f);

/// Delta f(x) = f(x) - Hf(x) = A(x) (v - T v)
Eigen::VectorXd laplacian(const EquivariantMap& f, const GroupContext& ctx, const Element& x);

/// mean of the generator matrices / translations: T v = (1/2)((I + M) v + c)
Eigen::MatrixXd generator_mean_matrix(const AffineAction& action);    // M
Eigen::VectorXd generator_mean_translation(const AffineAction& action);  // c
Eigen::VectorXd flow_step(const AffineAction& action, const Eigen::VectorXd& v);  // T v

enum class Stability { Harmonic, Stable, Unstable, Undecided };

std::string to_string(Stability s);

struct FlowOptions {
    int ball_radius = 4;
    int max_iterations = 10'000;
    double harmonic_tol = 1e-8;
    double monotonicity_slack = 1e-10;
    std::size_t ball_cap = kDefaultSupportCap;
};

struct FlowTrace {
    std::vector<Eigen::VectorXd> iterates;       // v_0 .. v_k
    std::vector<double> laplacian_norm_at_e;     // ||Delta f_i(e)||
    std::vector<double> laplacian_norm_ball_max; // max over ball(R)
    std::vector<double> step_ratio;              // worst contraction ratio of step i -> i+1
    std::vector<double> monotonicity_excess;     // max violation of the neighbor-max bound
};

struct StabilityVerdict {
    Stability kind = Stability::Undecided;
    double lambda = 0.0;  // observed contraction factor (Stable)
    int i0 = -1;
    int ball_radius = 0;
    int iteration_cap = 0;
    // Unstable diagnostics: step and ball point where the ratio stayed at 1
    int witness_iteration = -1;
    Element witness_point;
    // rigidity clause: when equality held, was Delta f constant over the ball?
    bool equality_seen = false;
    bool delta_constant_on_ball = false;
};

struct FlowResult {
    FlowTrace trace;
    StabilityVerdict verdict;
};

FlowResult run_flow(const EquivariantMap& f0, const GroupContext& ctx, const FlowOptions& options = {});

/// v is harmonic iff (I - M) v = c; returns the full solution set of v = T v
struct HarmonicSolution {
    enum class Kind { NoSolution, Unique, AffineFamily };
    Kind kind = Kind::NoSolution;
    Eigen::VectorXd particular;  // valid unless NoSolution
    Eigen::MatrixXd kernel;      // columns span ker(I - M); 0 columns when Unique
    double residual = 0.0;
};

HarmonicSolution solve_harmonic(const AffineAction& action);

/// least-squares solve of rho(s) v = v over all generators; engaged iff the
/// residual certifies an exact common fixed point
std::optional<Eigen::VectorXd> find_fixed_point(const AffineAction& action, double tol = 1e-8);

/// minimizer of v -> E(f_v)(x) over base vectors (normal equations;
/// min-norm solution when the Hessian is singular)
Eigen::VectorXd min_energy_vector(const AffineAction& action, const GroupContext& ctx, const Element& x);

/// displacement delta(v) = max_s ||rho(s) v - v||
double displacement(const AffineAction& action, const Eigen::VectorXd& v);

struct NearCriticalOptions {
    int max_moves = 64;      // cap on accepted halving moves
    int samples = 64;        // random proposals per round
    std::uint64_t seed = 0;
    bool use_solver_candidate = true;  // propose the displacement least-squares point first
};

struct CapReached : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Moves to any point w with ||w - v|| <= j * delta(v) and delta(w) < delta(v)/2
/// while one can be found; the terminal point is j-near-critical for delta.
/// Throws CapReached after options.max_moves accepted moves.
Eigen::VectorXd near_critical_search(const AffineAction& action, const Eigen::VectorXd& start, double j,
                                     const NearCriticalOptions& options = {});

}  // namespace hfl
