#include "nlbellman/controls.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nlbellman/error.hpp"

namespace nlb {

ControlMatrix::ControlMatrix(const Mat& entries) : entries_(entries) {
    const Eigen::Index n = entries.rows();
    if (n < 1 || n != entries.cols() || n > kMaxDim) throw InvalidArgument("control matrix must be square, size 1..3");
    if (!entries.allFinite()) throw InvalidArgument("control matrix has non-finite entries");
    const double scale = std::max(entries.cwiseAbs().maxCoeff(), 1.0);
    if ((entries - entries.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidArgument("control matrix must be symmetric");
    entries_ = 0.5 * (entries + entries.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> eig(entries_, Eigen::EigenvaluesOnly);
    lambda_min_ = eig.eigenvalues().minCoeff();
    lambda_max_ = eig.eigenvalues().maxCoeff();
    if (!(lambda_min_ > 0.0)) throw InvalidArgument("control matrix must be positive definite");
    det_ = eig.eigenvalues().prod();
}

ControlMatrix ControlMatrix::identity(int n) { return ControlMatrix(Mat::Identity(n, n)); }

bool ControlMatrix::bellman_admissible(double theta, double Theta, double tol) const {
    return lambda_min_ >= theta - tol && lambda_max_ <= Theta + tol;
}

bool ControlMatrix::monge_ampere_admissible(double theta, double tol) const {
    return std::abs(det_ - 1.0) <= tol && lambda_min_ >= theta - tol &&
           lambda_max_ <= std::pow(theta, 1 - dim()) + tol;
}

bool ControlMatrix::approx_equal(const ControlMatrix& other, double tol) const {
    return dim() == other.dim() && (entries_ - other.entries_).cwiseAbs().maxCoeff() <= tol;
}

std::string_view control_kind_name(ControlKind kind) {
    switch (kind) {
        case ControlKind::bellman_box: return "bellman_box";
        case ControlKind::monge_ampere: return "monge_ampere";
        case ControlKind::singleton_identity: return "singleton_identity";
    }
    return "unknown";
}

ControlKind parse_control_kind(std::string_view name) {
    for (ControlKind k : {ControlKind::bellman_box, ControlKind::monge_ampere, ControlKind::singleton_identity})
        if (control_kind_name(k) == name) return k;
    throw InvalidArgument("unknown control set kind '" + std::string(name) + "'");
}

void ControlSetSpec::validate() const {
    if (n < 2 || n > 3) throw InvalidArgument("controls.n must be 2 or 3");
    if (kind == ControlKind::singleton_identity) return;
    if (!(theta > 0.0) || !std::isfinite(theta)) throw InvalidArgument("controls.theta must be positive");
    if (eig_resolution < 2) throw InvalidArgument("controls.eig_resolution must be at least 2");
    if (angle_resolution < 1) throw InvalidArgument("controls.angle_resolution must be at least 1");
    if (kind == ControlKind::bellman_box && !(Theta >= theta && std::isfinite(Theta)))
        throw InvalidArgument("controls.theta must not exceed controls.Theta");
    if (kind == ControlKind::monge_ampere && theta > 1.0)
        throw InvalidArgument("Monge-Ampere controls need theta <= 1 (the admissible set is empty otherwise)");
}

bool ControlSet::admissible(double tol) const {
    if (members.empty()) return false;
    for (const auto& A : members) {
        switch (spec.kind) {
            case ControlKind::bellman_box:
                if (!A.bellman_admissible(spec.theta, spec.Theta, tol)) return false;
                break;
            case ControlKind::monge_ampere:
                if (!A.monge_ampere_admissible(spec.theta, tol)) return false;
                break;
            case ControlKind::singleton_identity:
                if (!A.approx_equal(ControlMatrix::identity(spec.n), tol)) return false;
                break;
        }
    }
    return true;
}

bool ControlSet::reflection_closed(double tol) const {
    for (const auto& A : members) {
        Mat R = A.entries();
        R.row(0) *= -1.0;
        R.col(0) *= -1.0;
        bool found = false;
        for (const auto& B : members)
            if ((B.entries() - R).cwiseAbs().maxCoeff() <= tol) {
                found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}

namespace {

std::vector<double> geometric_grid(double lo, double hi, int count) {
    if (hi <= lo * (1.0 + 1e-14)) return {lo};
    std::vector<double> out(count);
    for (int k = 0; k < count; ++k) out[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

Mat givens(int n, int i, int j, double phi) {
    Mat G = Mat::Identity(n, n);
    G(i, i) = G(j, j) = std::cos(phi);
    G(i, j) = -std::sin(phi);
    G(j, i) = std::sin(phi);
    return G;
}

Mat symmetric_from(const Mat& R, const Vec& eig) {
    Mat A = R * eig.asDiagonal() * R.transpose();
    return 0.5 * (A + A.transpose());
}

void push_unique(std::vector<ControlMatrix>& out, const Mat& A) {
    ControlMatrix C(A);
    for (const auto& M : out)
        if (M.approx_equal(C, 1e-12)) return;
    out.push_back(std::move(C));
}

// Rotations in each axis pair: n = 2 uses the single pair, n = 3 the three
// coordinate planes. Angle 0 appears once.
std::vector<Mat> rotation_grid(int n, int count, double span) {
    std::vector<Mat> out{Mat::Identity(n, n)};
    const std::vector<std::pair<int, int>> pairs =
        n == 2 ? std::vector<std::pair<int, int>>{{0, 1}} : std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}};
    for (int j = 1; j < count; ++j)
        for (auto [a, b] : pairs) out.push_back(givens(n, a, b, j * span / count));
    return out;
}

}  // namespace

ControlSet build_control_set(const ControlSetSpec& spec) {
    spec.validate();
    ControlSet set{spec, {}};
    const int n = spec.n;
    if (spec.kind == ControlKind::singleton_identity) {
        set.members.push_back(ControlMatrix::identity(n));
        return set;
    }
    const double pi = std::numbers::pi;
    if (spec.kind == ControlKind::bellman_box) {
        if (spec.theta <= 1.0 && 1.0 <= spec.Theta) set.members.push_back(ControlMatrix::identity(n));
        const auto grid = geometric_grid(spec.theta, spec.Theta, spec.eig_resolution);
        const auto rotations = rotation_grid(n, spec.angle_resolution, 0.5 * pi);
        for (std::size_t r = 0; r < rotations.size(); ++r) {
            const int m = static_cast<int>(grid.size());
            const int total = n == 2 ? m * m : m * m * m;
            for (int k = 0; k < total; ++k) {
                Vec eig(n);
                int rest = k;
                for (int d = n - 1; d >= 0; --d) {
                    eig[d] = grid[rest % m];
                    rest /= m;
                }
                if (r > 0 && (eig.maxCoeff() - eig.minCoeff()) <= 1e-14 * eig.maxCoeff()) continue;
                push_unique(set.members, symmetric_from(rotations[r], eig));
            }
        }
    } else {
        set.members.push_back(ControlMatrix::identity(n));
        const double top = std::pow(spec.theta, 1 - n);
        const auto grid = geometric_grid(spec.theta, n == 2 ? 1.0 : top, spec.eig_resolution);
        const auto rotations = rotation_grid(n, spec.angle_resolution, pi);
        for (std::size_t r = 0; r < rotations.size(); ++r) {
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (n == 2) {
                    Vec eig(2);
                    eig << grid[i], 1.0 / grid[i];
                    if (r > 0 && std::abs(grid[i] - 1.0) <= 1e-14) continue;
                    push_unique(set.members, symmetric_from(rotations[r], eig));
                    continue;
                }
                for (std::size_t j = 0; j < grid.size(); ++j) {
                    Vec eig(3);
                    eig << grid[i], grid[j], 1.0 / (grid[i] * grid[j]);
                    if (eig[2] < spec.theta * (1.0 - 1e-12) || eig[2] > top * (1.0 + 1e-12)) continue;
                    if (r > 0 && (eig.maxCoeff() - eig.minCoeff()) <= 1e-14 * eig.maxCoeff()) continue;
                    push_unique(set.members, symmetric_from(rotations[r], eig));
                }
            }
        }
    }
    return set;
}

ControlSet refine(const ControlSet& set) {
    if (set.spec.kind == ControlKind::singleton_identity) return set;
    ControlSetSpec spec = set.spec;
    spec.eig_resolution = 2 * spec.eig_resolution - 1;
    spec.angle_resolution = 2 * spec.angle_resolution;
    return build_control_set(spec);
}

bool is_subsequence(const ControlSet& sub, const ControlSet& super, double tol) {
    std::size_t j = 0;
    for (const auto& A : sub.members) {
        while (j < super.members.size() && !super.members[j].approx_equal(A, tol)) ++j;
        if (j == super.members.size()) return false;
        ++j;
    }
    return true;
}

}  // namespace nlb
