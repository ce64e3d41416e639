#include "nlbellman/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "nlbellman/error.hpp"

namespace nlb {

BellmanSystem::BellmanSystem(const Discretization& disc, const ControlSet& controls, const OperatorConfig& config,
                             const QuadratureScheme& scheme, NearStencil stencil, bool check)
    : disc_(&disc), controls_(controls) {
    if (controls_.members.empty()) throw InvalidArgument("control set is empty");
    operators_.reserve(controls_.size());
    for (const auto& A : controls_.members) operators_.push_back(assemble(disc, A, config, scheme, stencil, check));
}

std::vector<double> BellmanSystem::evaluate(std::span<const double> u, std::vector<int>* policy,
                                            const std::vector<int>* previous) const {
    const std::size_t N = unknowns();
    std::vector<double> V(disc_->lattice().size());
    disc_->scatter(u, V);
    std::vector<double> best(N, std::numeric_limits<double>::infinity()), value(N);
    std::vector<int> arg(N, 0);
    for (std::size_t c = 0; c < operators_.size(); ++c) {
        operators_[c].apply(V, value);
        for (std::size_t i = 0; i < N; ++i)
            if (value[i] < best[i]) {
                best[i] = value[i];
                arg[i] = static_cast<int>(c);
            }
    }
    if (previous && previous->size() == N) {
        // Keep the previous control on near-ties so Howard does not cycle on rounding.
        for (std::size_t i = 0; i < N; ++i) {
            const int p = (*previous)[i];
            if (p == arg[i]) continue;
            const double vp = operators_[static_cast<std::size_t>(p)].apply_row(i, V.data()) +
                              operators_[static_cast<std::size_t>(p)].exterior(i);
            const double scale = std::abs(operators_[static_cast<std::size_t>(p)].diagonal(i)) *
                                 (std::abs(u[i]) + 1.0);
            if (vp <= best[i] + 1e-13 * scale) arg[i] = p;
        }
    }
    if (policy) *policy = std::move(arg);
    return best;
}

void BellmanSystem::apply_policy(const std::vector<int>& policy, double shift, std::span<const double> V,
                                 std::span<double> out) const {
    const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(unknowns());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < N; ++i) {
        const std::size_t row = static_cast<std::size_t>(i);
        const auto& op = operators_[static_cast<std::size_t>(policy[row])];
        out[row] = -op.apply_row(row, V.data()) + shift * V[disc_->node(row)];
    }
}

bool BellmanSystem::solve_linear(const std::vector<int>& policy, double shift, std::span<const double> rhs,
                                 std::span<double> u, const LinearSolveOptions& options) const {
    const std::size_t N = unknowns();
    Eigen::VectorXd b(static_cast<Eigen::Index>(N));
    for (std::size_t i = 0; i < N; ++i) b[static_cast<Eigen::Index>(i)] = rhs[i] + operators_[static_cast<std::size_t>(policy[i])].exterior(i);

    if (N <= options.dense_threshold) {
        if (!cache_valid_ || cached_shift_ != shift || cached_policy_ != policy) {
            Eigen::MatrixXd M(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
            for (std::size_t i = 0; i < N; ++i) {
                const auto& op = operators_[static_cast<std::size_t>(policy[i])];
                for (std::size_t j = 0; j < N; ++j)
                    M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = -op.coefficient(i, j);
                M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += shift;
            }
            cached_lu_.compute(M);
            cached_policy_ = policy;
            cached_shift_ = shift;
            cache_valid_ = true;
        }
        const Eigen::VectorXd x = cached_lu_.solve(b);
        for (std::size_t i = 0; i < N; ++i) u[i] = x[static_cast<Eigen::Index>(i)];
        return x.allFinite();
    }

    // Jacobi-preconditioned BiCGSTAB, matrix-free.
    std::vector<double> V(disc_->lattice().size(), 0.0), Av(N);
    auto apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        disc_->scatter(std::span<const double>(x.data(), N), V);
        apply_policy(policy, shift, V, Av);
        y = Eigen::Map<const Eigen::VectorXd>(Av.data(), static_cast<Eigen::Index>(N));
    };
    Eigen::VectorXd inv_diag(static_cast<Eigen::Index>(N));
    for (std::size_t i = 0; i < N; ++i)
        inv_diag[static_cast<Eigen::Index>(i)] = 1.0 / (-operators_[static_cast<std::size_t>(policy[i])].diagonal(i) + shift);

    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(N));
    Eigen::VectorXd Ax(x.size()), r(x.size()), rhat, p = Eigen::VectorXd::Zero(x.size()), v = p, y, s, z, t(x.size());
    apply(x, Ax);
    r = b - Ax;
    const double bnorm = std::max(b.norm(), 1e-300);
    rhat = r;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    bool converged = r.norm() <= options.tol * bnorm;
    for (int it = 0; it < options.max_iter && !converged; ++it) {
        const double rho_new = rhat.dot(r);
        if (rho_new == 0.0) {
            apply(x, Ax);
            r = b - Ax;
            rhat = r;
            rho = alpha = omega = 1.0;
            p.setZero();
            v.setZero();
            continue;
        }
        const double beta = (rho_new / rho) * (alpha / omega);
        p = r + beta * (p - omega * v);
        y = inv_diag.cwiseProduct(p);
        apply(y, v);
        alpha = rho_new / rhat.dot(v);
        s = r - alpha * v;
        if (s.norm() <= options.tol * bnorm) {
            x += alpha * y;
            converged = true;
            break;
        }
        z = inv_diag.cwiseProduct(s);
        apply(z, t);
        omega = t.dot(s) / t.dot(t);
        x += alpha * y + omega * z;
        r = s - omega * t;
        rho = rho_new;
        converged = r.norm() <= options.tol * bnorm;
    }
    for (std::size_t i = 0; i < N; ++i) u[i] = x[static_cast<Eigen::Index>(i)];
    return converged && x.allFinite();
}

BellmanSystem::HowardResult BellmanSystem::howard(double shift, std::span<const double> rhs, std::span<double> u,
                                                  int max_iter, const LinearSolveOptions& options,
                                                  std::vector<int> policy) const {
    HowardResult result;
    if (policy.size() != unknowns()) evaluate(u, &policy);
    for (int it = 0; it < max_iter; ++it) {
        ++result.iterations;
        if (!solve_linear(policy, shift, rhs, u, options))
            throw EvaluationError("linear solve did not converge inside policy iteration");
        std::vector<int> next;
        evaluate(u, &next, &policy);
        if (next == policy) {
            result.converged = true;
            break;
        }
        policy = std::move(next);
    }
    result.policy = std::move(policy);
    return result;
}

namespace {

double bellman_residual(const BellmanSystem& sys, std::span<const double> u, const Nonlinearity& f,
                        std::vector<int>* policy) {
    const std::vector<double> Fu = sys.evaluate(u, policy);
    double r = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) r = std::max(r, std::abs(-Fu[i] - f(u[i])));
    return r;
}

}  // namespace

SolveResult solve_dirichlet(const ProblemSpec& problem, const SolveOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    problem.validate();
    const Lattice lattice(problem.sampling_box(), problem.h);
    const Discretization disc(lattice, problem.geometry, problem.exterior);
    const QuadratureScheme scheme = problem.resolved_scheme();
    const ControlSet controls = build_control_set(problem.controls);
    const BellmanSystem sys(disc, controls, problem.config, scheme, problem.near_stencil, problem.check_monotone);
    const std::size_t N = disc.unknowns();

    SolveReport report;
    report.unknowns = N;
    std::vector<double> u(N, 0.0), zero(N, 0.0);

    // Initial guess: the solution with f frozen at zero.
    auto howard = sys.howard(0.0, zero, u, options.max_policy, options.linear);
    report.policy_iterations += howard.iterations;

    double lo = 0.0, hi = 0.0;
    for (double v : u) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const auto [ga, gb] = problem.exterior.growth_bound();
    (void)gb;
    hi = std::max(hi, ga);
    lo = std::min(lo, -ga);
    const double pad = 0.5 * std::max(hi - lo, 1.0);
    const double Lambda = problem.f.lipschitz(lo - pad, hi + pad);
    report.lipschitz_shift = Lambda;

    std::vector<int> policy = howard.policy;
    double residual = bellman_residual(sys, u, problem.f, &policy);
    report.residual_history.push_back(residual);
    double omega = options.damping;
    std::vector<double> rhs(N), next(N), trial(N);
    while (residual > options.tol && report.outer_iterations < options.max_iter) {
        ++report.outer_iterations;
        for (std::size_t i = 0; i < N; ++i) rhs[i] = problem.f(u[i]) + Lambda * u[i];
        next = u;
        howard = sys.howard(Lambda, rhs, next, options.max_policy, options.linear, policy);
        report.policy_iterations += howard.iterations;
        for (std::size_t i = 0; i < N; ++i) trial[i] = u[i] + omega * (next[i] - u[i]);
        std::vector<int> trial_policy;
        const double r = bellman_residual(sys, trial, problem.f, &trial_policy);
        if (r > residual && omega > 1.0 / 1024.0) {
            omega *= 0.5;
            report.residual_history.push_back(r);
            continue;
        }
        u.swap(trial);
        policy = std::move(trial_policy);
        residual = r;
        report.residual_history.push_back(r);
    }
    report.converged = residual <= options.tol;
    report.policy_map = policy;
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {disc.to_grid_function(u), std::move(report)};
}

EigenPair eigenpair_ball(double R, const OperatorConfig& config, const ControlSetSpec& controls, double h,
                         const EigenOptions& options, QuadratureScheme scheme) {
    if (!(R > 0.0)) throw InvalidArgument("ball radius must be positive");
    ProblemSpec p;
    p.geometry = Geometry::ball(config.n, R);
    p.config = config;
    p.controls = controls;
    p.h = h;
    p.scheme = scheme;
    p.validate();
    const Lattice lattice(p.sampling_box(), h);
    const Discretization disc(lattice, p.geometry, ExteriorRule::zero());
    const BellmanSystem sys(disc, build_control_set(controls), config, p.resolved_scheme());
    const std::size_t N = disc.unknowns();

    EigenPair out;
    std::vector<double> psi(N, 1.0), v(N, 0.0);
    std::vector<int> policy;
    double lambda = 0.0;
    for (int it = 0; it < options.max_iter; ++it) {
        ++out.iterations;
        auto hw = sys.howard(0.0, psi, v, options.max_policy, options.linear, policy);
        policy = hw.policy;
        double vmax = 0.0, vmin = std::numeric_limits<double>::infinity();
        for (double x : v) {
            vmax = std::max(vmax, x);
            vmin = std::min(vmin, x);
        }
        if (!(vmax > 0.0)) throw EvaluationError("inverse iteration lost positivity");
        if (vmin <= 0.0)
            for (double& x : v) x = std::max(x, 0.0);
        const double next_lambda = 1.0 / vmax;
        double change = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double np = v[i] / vmax;
            change = std::max(change, std::abs(np - psi[i]));
            psi[i] = np;
        }
        const double dl = std::abs(next_lambda - lambda);
        lambda = next_lambda;
        if (it > 0 && change <= options.tol && dl <= options.tol * lambda) {
            out.converged = true;
            break;
        }
    }
    const std::vector<double> Fpsi = sys.evaluate(psi);
    double res = 0.0;
    for (std::size_t i = 0; i < N; ++i) res = std::max(res, std::abs(Fpsi[i] + lambda * psi[i]));
    out.lambda1 = lambda;
    out.residual = res;
    out.psi = disc.to_grid_function(psi);
    return out;
}

double estimate_M0(const Nonlinearity& f, double lambda1, double s) {
    if (!(lambda1 > 0.0)) throw InvalidArgument("lambda1 must be positive");
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("s must lie in (0, 1)");
    const HypothesisReport r = hypothesis_report(f, std::max(1.0, 2.0 * f.delta0));
    if (!r.h2.holds) throw InvalidArgument("f fails (H2) with c0 = " + std::to_string(f.c0) + "; M0 is undefined");
    return std::pow(lambda1 / f.c0, 1.0 / (2.0 * s));
}

double estimate_M0(const Nonlinearity& f, const EigenPair& eig, double s) { return estimate_M0(f, eig.lambda1, s); }

}  // namespace nlb
