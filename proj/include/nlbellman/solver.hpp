#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nlbellman/grid_function.hpp"
#include "nlbellman/problem.hpp"
#include "nlbellman/quadrature.hpp"

namespace nlb {

/// Lattice of a Dirichlet problem split into unknown nodes (inside the domain)
/// and fixed nodes carrying exterior data.
class Discretization {
public:
    Discretization(const Lattice& lattice, const Geometry& geometry, ExteriorRule exterior);

    const Lattice& lattice() const { return lattice_; }
    const ExteriorRule& exterior() const { return exterior_; }
    const LayeredData& layers() const { return layers_; }
    std::size_t unknowns() const { return node_of_unknown_.size(); }
    std::size_t node(std::size_t unknown) const { return node_of_unknown_[unknown]; }
    /// Unknown index of a lattice node, or -1 for fixed nodes.
    long unknown(std::size_t node) const { return unknown_of_node_[node]; }

    /// Maximal runs of unknown nodes along axis 0: (first node, length).
    const std::vector<std::pair<std::size_t, std::size_t>>& runs() const { return runs_; }

    /// Exterior value at a (possibly out-of-box) lattice index.
    double fixed_value(const Index& idx) const;

    /// Lattice vector with U on unknown nodes and zero elsewhere.
    void scatter(std::span<const double> u, std::span<double> lattice_values) const;
    /// Grid function with U on unknown nodes and exterior data elsewhere.
    GridFunction to_grid_function(std::span<const double> u) const;

private:
    Lattice lattice_;
    ExteriorRule exterior_;
    LayeredData layers_;
    std::vector<long> unknown_of_node_;
    std::vector<std::size_t> node_of_unknown_;
    std::vector<std::pair<std::size_t, std::size_t>> runs_;
};

/// Monotone discrete surrogate of L_A on a Discretization:
///   (L_A U)_i = sum_j a_ij U_j + b_i,
/// off-diagonal a_ij >= 0, a_ii < 0, sum_j a_ij + exterior_mass_i = 0.
/// Mid-field weights come from the shell rule pushed onto lattice nodes by
/// multilinear interpolation, so they depend on j - i only.
class DiscreteOperator {
public:
    DiscreteOperator(const Discretization& disc, const ShellRule& rule, NearStencil stencil);

    const ControlMatrix& control() const { return control_; }

    /// sum_j a_ij U_j for one unknown row; `lattice_values` as from scatter().
    double apply_row(std::size_t row, const double* lattice_values) const;
    /// out = A U + b.
    void apply(std::span<const double> lattice_values, std::span<double> out) const;

    double exterior(std::size_t row) const { return b_[row]; }
    double exterior_mass(std::size_t row) const { return mass_[row]; }
    double diagonal(std::size_t row) const;
    /// Coefficient a_ij for unknown rows/columns (dense assembly, tests).
    double coefficient(std::size_t row, std::size_t col) const;
    /// Most negative off-diagonal coefficient (0 when monotone).
    double min_offdiagonal() const;
    /// max_i |sum_j a_ij + exterior_mass_i|.
    double max_row_sum_defect() const;

    /// Throws MonotonicityError if an off-diagonal is below -tol * |diag|,
    /// a diagonal is nonnegative or a row sum defect exceeds tol * |diag|.
    void check_monotone(double tol = 1e-10) const;

private:
    struct NearEntry {
        Index offset{};
        double weight = 0.0;
    };

    const Discretization* disc_;
    ControlMatrix control_;
    Index window_{0, 0, 0};
    std::array<std::size_t, kMaxDim> table_stride_{0, 0, 0};
    std::vector<double> table_;
    double mid_mass_ = 0.0;
    double far_mass_ = 0.0;
    std::vector<NearEntry> near_;
    double near_center_ = 0.0;
    double diagonal_shift_ = 0.0;
    std::vector<double> b_;
    std::vector<double> mass_;

    bool in_table(const Index& offset) const;
    std::size_t table_index(const Index& offset) const;
    /// sum over unknown j of W[j - i] V_j (mid-field part only).
    double table_row(std::size_t row, const double* lattice_values) const;
    double near_weight(const Index& offset) const;
};

/// Builds the discrete operator for one control on the problem lattice.
DiscreteOperator assemble(const Discretization& disc, const ControlMatrix& A, const OperatorConfig& config,
                          const QuadratureScheme& scheme, NearStencil stencil = NearStencil::selling,
                          bool check = true);

/// Nonnegative decomposition A = sum_k alpha_k e_k e_k^T over integer offsets
/// (Selling's formula; n = 2 or 3).
struct SellingTerm {
    Index offset{};
    double weight = 0.0;
};
std::vector<SellingTerm> selling_decomposition(const Mat& A);

struct LinearSolveOptions {
    double tol = 1e-12;
    int max_iter = 4000;
    std::size_t dense_threshold = 2000;
};

/// Discrete Bellman operator min_A L_A over a control set, with Howard
/// policy iteration for  max_A (-L_A U) + shift U = rhs.
class BellmanSystem {
public:
    BellmanSystem(const Discretization& disc, const ControlSet& controls, const OperatorConfig& config,
                  const QuadratureScheme& scheme, NearStencil stencil = NearStencil::selling, bool check = true);

    const Discretization& discretization() const { return *disc_; }
    const ControlSet& controls() const { return controls_; }
    const std::vector<DiscreteOperator>& operators() const { return operators_; }
    std::size_t unknowns() const { return disc_->unknowns(); }

    /// (F U)_i = min_A (L_A U)_i with the argmin policy.
    std::vector<double> evaluate(std::span<const double> u, std::vector<int>* policy = nullptr,
                                 const std::vector<int>* previous = nullptr) const;

    /// Solves (-L_policy + shift) U = rhs + b_policy, starting from `u`.
    /// Returns false if the iterative solver did not reach tolerance.
    bool solve_linear(const std::vector<int>& policy, double shift, std::span<const double> rhs, std::span<double> u,
                      const LinearSolveOptions& options) const;

    struct HowardResult {
        int iterations = 0;
        bool converged = false;
        std::vector<int> policy;
    };
    /// Howard iteration for max_A(-L_A U) + shift U = rhs; `u` holds the initial
    /// guess and the result.
    HowardResult howard(double shift, std::span<const double> rhs, std::span<double> u, int max_iter,
                        const LinearSolveOptions& options, std::vector<int> policy = {}) const;

private:
    const Discretization* disc_;
    ControlSet controls_;
    std::vector<DiscreteOperator> operators_;
    mutable std::vector<int> cached_policy_;
    mutable double cached_shift_ = -1.0;
    mutable Eigen::PartialPivLU<Eigen::MatrixXd> cached_lu_;
    mutable bool cache_valid_ = false;

    void apply_policy(const std::vector<int>& policy, double shift, std::span<const double> lattice_values,
                      std::span<double> out) const;
};

struct SolveOptions {
    double tol = 1e-8;
    int max_iter = 200;
    int max_policy = 50;
    double damping = 1.0;
    LinearSolveOptions linear;
};

struct SolveReport {
    int outer_iterations = 0;
    int policy_iterations = 0;
    std::vector<double> residual_history;
    std::vector<int> policy_map;  // argmin control index per unknown node
    bool converged = false;
    double lipschitz_shift = 0.0;
    std::size_t unknowns = 0;
    double seconds = 0.0;
};

struct SolveResult {
    GridFunction u;
    SolveReport report;
};

/// Damped Picard iteration with dominance shift around Howard policy
/// iteration. Non-convergence is reported, not thrown.
SolveResult solve_dirichlet(const ProblemSpec& problem, const SolveOptions& options = {});

struct EigenPair {
    double lambda1 = 0.0;
    GridFunction psi;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct EigenOptions {
    double tol = 1e-6;
    int max_iter = 200;
    int max_policy = 50;
    LinearSolveOptions linear;
};

/// First eigenpair of -F_s in B_R(0) with zero exterior by inverse power
/// iteration; psi is normalised to max psi = 1. `residual` is
/// max |F psi + lambda psi| over interior nodes.
EigenPair eigenpair_ball(double R, const OperatorConfig& config, const ControlSetSpec& controls, double h,
                         const EigenOptions& options = {}, QuadratureScheme scheme = {});

/// M_0 = (lambda_1 / c_0)^{1/(2s)}; throws InvalidArgument if f fails (H2).
double estimate_M0(const Nonlinearity& f, double lambda1, double s);
double estimate_M0(const Nonlinearity& f, const EigenPair& eig, double s);

}  // namespace nlb
