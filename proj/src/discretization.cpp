#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "nlbellman/error.hpp"
#include "nlbellman/solver.hpp"

namespace nlb {

Discretization::Discretization(const Lattice& lattice, const Geometry& geometry, ExteriorRule exterior)
    : lattice_(lattice), exterior_(std::move(exterior)) {
    if (geometry.dim != lattice.dim()) throw InvalidArgument("geometry and lattice dimensions differ");
    if (exterior_.is_layered()) layers_ = exterior_.as_layered();
    unknown_of_node_.assign(lattice_.size(), -1);
    const int n = lattice_.dim();
    for (std::size_t l = 0; l < lattice_.size(); ++l) {
        const Index idx = lattice_.multi(l);
        bool interior = true;
        for (int d = 0; d < n; ++d)
            if (idx[d] == 0 || idx[d] == lattice_.count(d) - 1) interior = false;
        if (!interior || !geometry.contains(lattice_.node(idx))) continue;
        unknown_of_node_[l] = static_cast<long>(node_of_unknown_.size());
        node_of_unknown_.push_back(l);
    }
    if (node_of_unknown_.empty()) throw InvalidArgument("the domain contains no lattice nodes; refine h");
    for (std::size_t k = 0; k < node_of_unknown_.size();) {
        const std::size_t start = node_of_unknown_[k];
        std::size_t len = 1;
        while (k + len < node_of_unknown_.size() && node_of_unknown_[k + len] == start + len &&
               lattice_.multi(start + len)[0] != 0)
            ++len;
        runs_.emplace_back(start, len);
        k += len;
    }
}

double Discretization::fixed_value(const Index& idx) const {
    Point p{};
    for (int d = 0; d < lattice_.dim(); ++d) p[d] = lattice_.box().lo[d] + lattice_.spacing() * idx[d];
    return exterior_(p, lattice_.dim());
}

void Discretization::scatter(std::span<const double> u, std::span<double> lattice_values) const {
    std::fill(lattice_values.begin(), lattice_values.end(), 0.0);
    for (std::size_t k = 0; k < node_of_unknown_.size(); ++k) lattice_values[node_of_unknown_[k]] = u[k];
}

GridFunction Discretization::to_grid_function(std::span<const double> u) const {
    std::vector<double> values(lattice_.size());
    for (std::size_t l = 0; l < values.size(); ++l) {
        const long k = unknown_of_node_[l];
        values[l] = k >= 0 ? u[static_cast<std::size_t>(k)] : fixed_value(lattice_.multi(l));
    }
    return GridFunction(lattice_, std::move(values), exterior_);
}

std::vector<SellingTerm> selling_decomposition(const Mat& M) {
    const int n = static_cast<int>(M.rows());
    auto dotM = [&](const Index& a, const Index& b) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) acc += a[i] * M(i, j) * b[j];
        return acc;
    };
    const double tol = 1e-14 * M.cwiseAbs().maxCoeff();
    std::vector<SellingTerm> out;
    if (n == 2) {
        std::array<Index, 3> b{Index{1, 0, 0}, Index{0, 1, 0}, Index{-1, -1, 0}};
        for (int it = 0; it < 10000; ++it) {
            bool changed = false;
            for (int i = 0; i < 3 && !changed; ++i)
                for (int j = 0; j < 3 && !changed; ++j) {
                    if (i == j || dotM(b[i], b[j]) <= tol) continue;
                    const int k = 3 - i - j;
                    const Index bi = b[i], bj = b[j];
                    b[i] = Index{-bi[0], -bi[1], 0};
                    b[k] = Index{bi[0] - bj[0], bi[1] - bj[1], 0};
                    changed = true;
                }
            if (!changed) break;
        }
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                const int k = 3 - i - j;
                const double w = -dotM(b[i], b[j]);
                if (w > tol) out.push_back({Index{-b[k][1], b[k][0], 0}, w});
            }
    } else if (n == 3) {
        std::array<Index, 4> b{Index{1, 0, 0}, Index{0, 1, 0}, Index{0, 0, 1}, Index{-1, -1, -1}};
        for (int it = 0; it < 10000; ++it) {
            bool changed = false;
            for (int i = 0; i < 4 && !changed; ++i)
                for (int j = 0; j < 4 && !changed; ++j) {
                    if (i == j || dotM(b[i], b[j]) <= tol) continue;
                    const Index bi = b[i];
                    for (int k = 0; k < 4; ++k) {
                        if (k == i || k == j) continue;
                        for (int d = 0; d < 3; ++d) b[k][d] += bi[d];
                    }
                    for (int d = 0; d < 3; ++d) b[i][d] = -bi[d];
                    changed = true;
                }
            if (!changed) break;
        }
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                int rest[2], r = 0;
                for (int k = 0; k < 4; ++k)
                    if (k != i && k != j) rest[r++] = k;
                const Index& p = b[rest[0]];
                const Index& q = b[rest[1]];
                const Index e{p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]};
                const double w = -dotM(b[i], b[j]);
                if (w > tol) out.push_back({e, w});
            }
    } else {
        throw InvalidArgument("Selling decomposition is implemented for n = 2 and 3");
    }
    return out;
}

DiscreteOperator::DiscreteOperator(const Discretization& disc, const ShellRule& rule, NearStencil stencil)
    : disc_(&disc), control_(rule.control) {
    const Lattice& L = disc.lattice();
    const int n = L.dim();
    const double h = L.spacing();
    if (rule.dim != n) throw InvalidArgument("rule dimension does not match the lattice");

    // Table window: largest index difference between two unknown nodes.
    Index lo{0, 0, 0}, hi{0, 0, 0};
    for (int d = 0; d < n; ++d) {
        lo[d] = std::numeric_limits<int>::max();
        hi[d] = std::numeric_limits<int>::min();
    }
    for (std::size_t k = 0; k < disc.unknowns(); ++k) {
        const Index idx = L.multi(disc.node(k));
        for (int d = 0; d < n; ++d) {
            lo[d] = std::min(lo[d], idx[d]);
            hi[d] = std::max(hi[d], idx[d]);
        }
    }
    std::size_t size = 1;
    for (int d = 0; d < n; ++d) {
        window_[d] = hi[d] - lo[d];
        table_stride_[d] = size;
        size *= static_cast<std::size_t>(2 * window_[d] + 1);
    }
    table_.assign(size, 0.0);

    // Mid field: every quadrature point spreads its weight to the corners of
    // its lattice cell. Corners outside the window are never unknown.
    const bool layered = disc.exterior().is_layered();
    std::unordered_map<long long, double> outside;
    std::vector<double> colsum;
    int col_lo = 0;
    double total = 0.0;
    for (std::size_t q = 0; q < rule.offsets.size(); ++q) {
        Index base{0, 0, 0};
        double frac[kMaxDim] = {0.0, 0.0, 0.0};
        for (int d = 0; d < n; ++d) {
            const double t = rule.offsets[q][d] / h;
            base[d] = static_cast<int>(std::floor(t));
            frac[d] = t - base[d];
        }
        for (int corner = 0; corner < (1 << n); ++corner) {
            double w = rule.weights[q];
            Index k = base;
            for (int d = 0; d < n; ++d) {
                const int bit = (corner >> d) & 1;
                w *= bit ? frac[d] : 1.0 - frac[d];
                k[d] += bit;
            }
            if (w == 0.0) continue;
            total += w;
            if (in_table(k)) {
                table_[table_index(k)] += w;
            } else if (!layered) {
                long long key = 0;
                for (int d = n - 1; d >= 0; --d) key = key * 2000003LL + (k[d] + 1000001LL);
                outside[key] += w;
            }
            if (layered) {
                const int kn = k[n - 1];
                if (colsum.empty()) {
                    col_lo = kn;
                    colsum.assign(1, 0.0);
                }
                if (kn < col_lo) {
                    colsum.insert(colsum.begin(), static_cast<std::size_t>(col_lo - kn), 0.0);
                    col_lo = kn;
                }
                if (kn >= col_lo + static_cast<int>(colsum.size())) colsum.resize(static_cast<std::size_t>(kn - col_lo + 1), 0.0);
                colsum[static_cast<std::size_t>(kn - col_lo)] += w;
            }
        }
    }
    mid_mass_ = total;
    far_mass_ = rule.far_mass;

    // Near field: near_coeff tr(A H A) = near_coeff tr(A^2 H).
    const Mat M = rule.control.entries() * rule.control.entries();
    const double c = rule.near_coeff / (h * h);
    if (stencil == NearStencil::selling) {
        for (const auto& term : selling_decomposition(M)) {
            const Index neg{-term.offset[0], -term.offset[1], -term.offset[2]};
            near_.push_back({term.offset, c * term.weight});
            near_.push_back({neg, c * term.weight});
        }
    } else {
        for (int i = 0; i < n; ++i) {
            Index e{0, 0, 0};
            e[i] = 1;
            near_.push_back({e, c * M(i, i)});
            e[i] = -1;
            near_.push_back({e, c * M(i, i)});
            for (int j = i + 1; j < n; ++j) {
                const double w = 0.5 * c * M(i, j);
                Index pp{0, 0, 0}, mm{0, 0, 0}, pm{0, 0, 0}, mp{0, 0, 0};
                pp[i] = pp[j] = 1;
                mm[i] = mm[j] = -1;
                pm[i] = mp[j] = 1;
                pm[j] = mp[i] = -1;
                near_.push_back({pp, w});
                near_.push_back({mm, w});
                near_.push_back({pm, -w});
                near_.push_back({mp, -w});
            }
        }
    }
    near_center_ = 0.0;
    for (const auto& e : near_) near_center_ -= e.weight;
    diagonal_shift_ = near_center_ - mid_mass_ - far_mass_;

    // Exterior contributions and exterior mass per row.
    const std::size_t N = disc.unknowns();
    b_.assign(N, 0.0);
    mass_.assign(N, 0.0);
    std::vector<double> indicator(L.size(), 0.0), gvals(L.size(), 0.0), fixed(L.size(), 0.0);
    for (std::size_t k = 0; k < N; ++k) indicator[disc.node(k)] = 1.0;
    for (std::size_t l = 0; l < L.size(); ++l) {
        const double g = disc.fixed_value(L.multi(l));
        if (disc.unknown(l) >= 0)
            gvals[l] = g;
        else
            fixed[l] = g;
    }
    std::vector<std::pair<Index, double>> outside_list;
    if (!layered) {
        outside_list.reserve(outside.size());
        for (const auto& [key, w] : outside) {
            Index k{0, 0, 0};
            long long rest = key;
            for (int d = 0; d < n; ++d) {
                k[d] = static_cast<int>(rest % 2000003LL - 1000001LL);
                rest /= 2000003LL;
            }
            outside_list.emplace_back(k, w);
        }
    }

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (std::ptrdiff_t row = 0; row < static_cast<std::ptrdiff_t>(N); ++row) {
        const std::size_t node = disc.node(static_cast<std::size_t>(row));
        const Index idx = L.multi(node);
        const Point x = L.node(idx);
        const double unknown_mass = table_row(static_cast<std::size_t>(row), indicator.data());
        double near_fixed_g = 0.0, near_fixed_mass = 0.0;
        for (const auto& e : near_) {
            Index j = idx;
            for (int d = 0; d < n; ++d) j[d] += e.offset[d];
            const bool unknown = L.in_range(j) && disc.unknown(L.linear(j)) >= 0;
            if (unknown) continue;
            near_fixed_mass += e.weight;
            near_fixed_g += e.weight * (L.in_range(j) ? fixed[L.linear(j)] : disc.fixed_value(j));
        }
        double mid_g = 0.0;
        if (layered) {
            const LayeredData& lay = disc.layers();
            for (std::size_t c2 = 0; c2 < colsum.size(); ++c2)
                mid_g += colsum[c2] * lay.at_height(x[n - 1] + (col_lo + static_cast<int>(c2)) * h);
            mid_g -= table_row(static_cast<std::size_t>(row), gvals.data());
        } else {
            std::vector<double> local;
            for (std::size_t t = 0; t < table_.size(); ++t) {
                if (table_[t] == 0.0) continue;
                Index k{0, 0, 0}, j = idx;
                std::size_t rest = t;
                for (int d = 0; d < n; ++d) {
                    const std::size_t span = static_cast<std::size_t>(2 * window_[d] + 1);
                    k[d] = static_cast<int>(rest % span) - window_[d];
                    rest /= span;
                    j[d] += k[d];
                }
                if (L.in_range(j)) {
                    const std::size_t lj = L.linear(j);
                    if (disc.unknown(lj) < 0) mid_g += table_[t] * fixed[lj];
                } else {
                    mid_g += table_[t] * disc.fixed_value(j);
                }
            }
            for (const auto& [k, w] : outside_list) {
                Index j = idx;
                for (int d = 0; d < n; ++d) j[d] += k[d];
                mid_g += w * disc.fixed_value(j);
            }
        }
        const TailIntegral tail = exterior_tail(disc.exterior(), x, rule);
        b_[static_cast<std::size_t>(row)] = mid_g + near_fixed_g + tail.value;
        mass_[static_cast<std::size_t>(row)] = (mid_mass_ - unknown_mass) + near_fixed_mass + far_mass_;
    }
}

bool DiscreteOperator::in_table(const Index& offset) const {
    for (int d = 0; d < disc_->lattice().dim(); ++d)
        if (offset[d] < -window_[d] || offset[d] > window_[d]) return false;
    return true;
}

std::size_t DiscreteOperator::table_index(const Index& offset) const {
    std::size_t t = 0;
    for (int d = 0; d < disc_->lattice().dim(); ++d)
        t += static_cast<std::size_t>(offset[d] + window_[d]) * table_stride_[d];
    return t;
}

double DiscreteOperator::table_row(std::size_t row, const double* V) const {
    const Lattice& L = disc_->lattice();
    const int n = L.dim();
    const Index idx = L.multi(disc_->node(row));
    double acc = 0.0;
    for (const auto& [start, len] : disc_->runs()) {
        const Index j = L.multi(start);
        Index k{0, 0, 0};
        for (int d = 0; d < n; ++d) k[d] = j[d] - idx[d];
        const double* w = table_.data() + table_index(k);
        const double* v = V + start;
        double part = 0.0;
        for (std::size_t t = 0; t < len; ++t) part += w[t] * v[t];
        acc += part;
    }
    return acc;
}

double DiscreteOperator::apply_row(std::size_t row, const double* V) const {
    const Lattice& L = disc_->lattice();
    const int n = L.dim();
    const std::size_t node = disc_->node(row);
    const Index idx = L.multi(node);
    double acc = table_row(row, V) + diagonal_shift_ * V[node];
    for (const auto& e : near_) {
        Index j = idx;
        for (int d = 0; d < n; ++d) j[d] += e.offset[d];
        if (!L.in_range(j)) continue;
        acc += e.weight * V[L.linear(j)];
    }
    return acc;
}

void DiscreteOperator::apply(std::span<const double> V, std::span<double> out) const {
    const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(disc_->unknowns());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t row = 0; row < N; ++row)
        out[static_cast<std::size_t>(row)] = apply_row(static_cast<std::size_t>(row), V.data()) + b_[static_cast<std::size_t>(row)];
}

double DiscreteOperator::near_weight(const Index& offset) const {
    double w = 0.0;
    for (const auto& e : near_)
        if (e.offset == offset) w += e.weight;
    return w;
}

double DiscreteOperator::diagonal(std::size_t) const {
    return table_[table_index(Index{0, 0, 0})] + diagonal_shift_;
}

double DiscreteOperator::coefficient(std::size_t row, std::size_t col) const {
    const Lattice& L = disc_->lattice();
    const int n = L.dim();
    if (row == col) return diagonal(row);
    const Index a = L.multi(disc_->node(row));
    const Index b = L.multi(disc_->node(col));
    Index k{0, 0, 0};
    for (int d = 0; d < n; ++d) k[d] = b[d] - a[d];
    return table_[table_index(k)] + near_weight(k);
}

double DiscreteOperator::min_offdiagonal() const {
    double m = 0.0;
    for (const auto& e : near_) {
        if (!in_table(e.offset)) {
            m = std::min(m, near_weight(e.offset));
            continue;
        }
        m = std::min(m, table_[table_index(e.offset)] + near_weight(e.offset));
    }
    for (double w : table_) m = std::min(m, w);
    return m;
}

double DiscreteOperator::max_row_sum_defect() const {
    const Lattice& L = disc_->lattice();
    std::vector<double> ones(L.size(), 0.0);
    for (std::size_t k = 0; k < disc_->unknowns(); ++k) ones[disc_->node(k)] = 1.0;
    double m = 0.0;
    for (std::size_t row = 0; row < disc_->unknowns(); ++row)
        m = std::max(m, std::abs(apply_row(row, ones.data()) + mass_[row]));
    return m;
}

void DiscreteOperator::check_monotone(double tol) const {
    const double diag = diagonal(0);
    if (!(diag < 0.0)) throw MonotonicityError("assembled diagonal is not negative");
    const double off = min_offdiagonal();
    if (off < -tol * std::abs(diag))
        throw MonotonicityError("assembled stencil has a negative off-diagonal weight " + std::to_string(off) +
                                " (diagonal " + std::to_string(diag) + ")");
    const double defect = max_row_sum_defect();
    if (defect > std::max(tol, 1e-9) * std::abs(diag))
        throw MonotonicityError("row sums do not balance the exterior mass (defect " + std::to_string(defect) + ")");
    for (double m : mass_)
        if (m < -tol * std::abs(diag)) throw MonotonicityError("negative exterior mass");
}

DiscreteOperator assemble(const Discretization& disc, const ControlMatrix& A, const OperatorConfig& config,
                          const QuadratureScheme& scheme, NearStencil stencil, bool check) {
    DiscreteOperator op(disc, make_shell_rule(A, config, scheme), stencil);
    if (check) op.check_monotone();
    return op;
}

}  // namespace nlb
