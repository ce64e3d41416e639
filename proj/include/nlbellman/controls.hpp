#pragma once

#include <string_view>
#include <vector>

#include "nlbellman/linalg.hpp"

namespace nlb {

/// Symmetric positive-definite control matrix with cached spectral data.
class ControlMatrix {
public:
    ControlMatrix() = default;
    /// Throws InvalidArgument unless `entries` is symmetric positive definite.
    explicit ControlMatrix(const Mat& entries);

    static ControlMatrix identity(int n);

    const Mat& entries() const { return entries_; }
    int dim() const { return static_cast<int>(entries_.rows()); }
    double lambda_min() const { return lambda_min_; }
    double lambda_max() const { return lambda_max_; }
    double det() const { return det_; }

    bool bellman_admissible(double theta, double Theta, double tol = 1e-10) const;
    bool monge_ampere_admissible(double theta, double tol = 1e-10) const;

    bool approx_equal(const ControlMatrix& other, double tol = 1e-12) const;

private:
    Mat entries_;
    double lambda_min_ = 0.0;
    double lambda_max_ = 0.0;
    double det_ = 0.0;
};

enum class ControlKind { bellman_box, monge_ampere, singleton_identity };

std::string_view control_kind_name(ControlKind kind);
ControlKind parse_control_kind(std::string_view name);

struct ControlSetSpec {
    ControlKind kind = ControlKind::singleton_identity;
    int n = 2;
    double theta = 1.0;
    double Theta = 1.0;
    /// Eigenvalue samples per axis, endpoints included (>= 2).
    int eig_resolution = 3;
    /// Rotation samples per quarter turn (bellman) or half turn (Monge-Ampere).
    int angle_resolution = 4;

    void validate() const;
};

/// Finite family over which the infimum is taken. Order is significant:
/// argmin ties resolve to the earliest member.
struct ControlSet {
    ControlSetSpec spec;
    std::vector<ControlMatrix> members;

    std::size_t size() const { return members.size(); }
    ControlKind kind() const { return spec.kind; }
    /// Every member satisfies the admissibility of the set kind.
    bool admissible(double tol = 1e-9) const;
    /// Conjugation by x_1 -> -x_1 maps the set into itself.
    bool reflection_closed(double tol = 1e-9) const;
};

ControlSet build_control_set(const ControlSetSpec& spec);

/// Doubles the sampling density: eigenvalue intervals and rotation steps are
/// halved, so the result contains the original as a subsequence.
ControlSet refine(const ControlSet& set);

/// True if every member of `sub` appears in `super` in the same relative order.
bool is_subsequence(const ControlSet& sub, const ControlSet& super, double tol = 1e-12);

}  // namespace nlb
