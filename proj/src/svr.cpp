#include "ares/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "ares/errors.hpp"

namespace ares {

namespace {

constexpr double kTau = 1e-12;  // floor for non-positive curvature along a pair
constexpr double kBoundSnap = 1e-12;  // relative distance at which a variable counts as bounded
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kPolishInterval = 1000;  // pair steps between Newton steps on the free set
constexpr std::size_t kPolishMaxFree = 400;

// The dual is solved over 2n box variables a_k in [0, C]. Variable k < n is
// alpha_k (sign +1), variable k >= n is alpha*_{k-n} (sign -1); beta = alpha - alpha*.
class SmoSolver {
public:
    SmoSolver(std::span<const double> gram, std::span<const double> targets, double c, double epsilon)
        : k_(gram), y_(targets), n_(targets.size()), c_(c), epsilon_(epsilon), a_(2 * n_, 0.0), grad_(2 * n_) {
        for (std::size_t i = 0; i < n_; ++i) {
            grad_[i] = epsilon - targets[i];
            grad_[i + n_] = epsilon + targets[i];
        }
    }

    void warm_start(std::span<const double> beta) {
        if (beta.size() > n_)
            throw ShapeError("warm start has " + std::to_string(beta.size()) + " entries for " + std::to_string(n_) + " rows");
        double peak = 0.0;
        for (double b : beta) peak = std::max(peak, std::abs(b));
        const double scale = peak > c_ ? c_ / peak : 1.0;
        for (std::size_t i = 0; i < beta.size(); ++i) {
            const double b = scale == 1.0 ? beta[i] : beta[i] * scale;
            a_[i] = std::clamp(b, 0.0, c_);
            a_[i + n_] = std::clamp(-b, 0.0, c_);
        }
        refresh_gradient();
    }

    DualSolution run(double tolerance, std::size_t max_iterations) {
        DualSolution out;
        const std::size_t polish_every = std::max<std::size_t>(kPolishInterval, 2 * n_);
        for (;;) {
            const auto [i, j, gap] = select_pair();
            out.violation = gap;
            if (gap < tolerance) break;
            if (out.iterations == max_iterations) throw ConvergenceError(gap, out.iterations);
            if (out.iterations > 0 && out.iterations % polish_every == 0) {
                Newton r = Newton::Blocked;
                std::size_t taken = 0;
                while (r == Newton::Blocked && out.iterations < max_iterations) {
                    r = newton_step();
                    if (r == Newton::Failed) break;
                    ++taken, ++out.iterations;
                }
                if (taken > 0) continue;
            }
            step(i, j);
            ++out.iterations;
        }
        out.beta.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) out.beta[i] = a_[i] - a_[i + n_];
        out.bias = bias();
        return out;
    }

private:
    double sign(std::size_t k) const noexcept { return k < n_ ? 1.0 : -1.0; }
    std::size_t sample(std::size_t k) const noexcept { return k < n_ ? k : k - n_; }
    double q(std::size_t k, std::size_t l) const noexcept {
        return sign(k) * sign(l) * k_[sample(k) * n_ + sample(l)];
    }
    bool in_up(std::size_t k) const noexcept { return k < n_ ? a_[k] < c_ : a_[k] > 0.0; }
    bool in_low(std::size_t k) const noexcept { return k < n_ ? a_[k] > 0.0 : a_[k] < c_; }

    struct Pair {
        std::size_t i, j;
        double gap;
    };

    // i is the maximal KKT violator: argmax of -s_k G_k over the up set. j is
    // the low-set partner giving the largest second-order decrease of the
    // objective for the pair. The gap is max(up) - min(low).
    Pair select_pair() const noexcept {
        double up_max = -kInf;
        std::size_t i = 0;
        for (std::size_t k = 0; k < 2 * n_; ++k) {
            const double v = -sign(k) * grad_[k];
            if (in_up(k) && v > up_max) up_max = v, i = k;
        }
        double low_min = kInf, best_gain = kInf;
        std::size_t j = 0;
        const double* ki = &k_[sample(i) * n_];
        const double kii = ki[sample(i)];
        for (std::size_t k = 0; k < 2 * n_; ++k) {
            if (!in_low(k)) continue;
            const double v = -sign(k) * grad_[k];
            low_min = std::min(low_min, v);
            const double diff = up_max - v;
            if (diff <= 0.0) continue;
            const std::size_t s = sample(k);
            double curv = kii + k_[s * n_ + s] - 2.0 * ki[s];
            if (curv <= 0.0) curv = kTau;
            const double gain = -(diff * diff) / curv;
            if (gain < best_gain) best_gain = gain, j = k;
        }
        return {i, j, up_max - low_min};
    }

    // Exact minimization over (a_i, a_j) along the equality constraint, clipped to the box.
    void step(std::size_t i, std::size_t j) {
        const double old_i = a_[i], old_j = a_[j];
        const double qii = q(i, i), qjj = q(j, j), qij = q(i, j);
        if (sign(i) != sign(j)) {
            double curv = qii + qjj + 2.0 * qij;
            if (curv <= 0.0) curv = kTau;
            const double delta = (-grad_[i] - grad_[j]) / curv;
            const double diff = a_[i] - a_[j];
            a_[i] += delta;
            a_[j] += delta;
            if (diff > 0.0) {
                if (a_[j] < 0.0) a_[j] = 0.0, a_[i] = diff;
            } else if (a_[i] < 0.0) {
                a_[i] = 0.0, a_[j] = -diff;
            }
            if (diff > 0.0) {
                if (a_[i] > c_) a_[i] = c_, a_[j] = c_ - diff;
            } else if (a_[j] > c_) {
                a_[j] = c_, a_[i] = c_ + diff;
            }
        } else {
            double curv = qii + qjj - 2.0 * qij;
            if (curv <= 0.0) curv = kTau;
            const double delta = (grad_[i] - grad_[j]) / curv;
            const double sum = a_[i] + a_[j];
            a_[i] -= delta;
            a_[j] += delta;
            if (sum > c_) {
                if (a_[i] > c_) a_[i] = c_, a_[j] = sum - c_;
            } else if (a_[j] < 0.0) {
                a_[j] = 0.0, a_[i] = sum;
            }
            if (sum > c_) {
                if (a_[j] > c_) a_[j] = c_, a_[i] = sum - c_;
            } else if (a_[i] < 0.0) {
                a_[i] = 0.0, a_[j] = sum;
            }
        }
        const double di = a_[i] - old_i, dj = a_[j] - old_j;
        const double si = sign(i) * di, sj = sign(j) * dj;
        const double* ki = &k_[sample(i) * n_];
        const double* kj = &k_[sample(j) * n_];
        for (std::size_t m = 0; m < n_; ++m) {
            const double g = si * ki[m] + sj * kj[m];
            grad_[m] += g;
            grad_[m + n_] -= g;
        }
    }

    // Pair steps stall when the kernel is rank deficient (a linear kernel on
    // collinear features). With the bounded variables held fixed, minimize the
    // dual exactly over the free ones subject to the equality constraint, then
    // move toward that point as far as the box allows.
    enum class Newton { Failed, Blocked, Full };

    Newton newton_step() {
        std::vector<std::size_t> free;
        for (std::size_t k = 0; k < 2 * n_; ++k)
            if (a_[k] > 0.0 && a_[k] < c_) free.push_back(k);
        const std::size_t m = free.size();
        if (m == 0 || m > kPolishMaxFree) return Newton::Failed;

        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m + 1), static_cast<Eigen::Index>(m + 1));
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m + 1));
        const auto em = static_cast<Eigen::Index>(m);
        for (Eigen::Index a = 0; a < em; ++a) {
            for (Eigen::Index b = 0; b <= a; ++b) kkt(a, b) = kkt(b, a) = q(free[a], free[b]);
            kkt(a, em) = kkt(em, a) = sign(free[a]);
            rhs(a) = -grad_[free[a]];
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(kkt);
        const Eigen::VectorXd delta = cod.solve(rhs).head(em);

        double slope = 0.0, drift = 0.0, scale = 0.0;
        for (Eigen::Index a = 0; a < em; ++a) {
            slope += grad_[free[a]] * delta(a);
            drift += sign(free[a]) * delta(a);
            scale += std::abs(delta(a));
        }
        if (!(slope < 0.0) || std::abs(drift) > 1e-9 * std::max(1.0, scale)) return Newton::Failed;
        const double curvature = delta.dot(kkt.topLeftCorner(em, em) * delta);

        double t = curvature > 0.0 ? -slope / curvature : kInf;
        Eigen::Index blocking = -1;
        for (Eigen::Index a = 0; a < em; ++a) {
            const double v = a_[free[a]];
            const double limit = delta(a) > 0.0 ? (c_ - v) / delta(a) : delta(a) < 0.0 ? -v / delta(a) : kInf;
            if (limit < t) t = limit, blocking = a;
        }
        if (!std::isfinite(t) || t <= 0.0) return Newton::Failed;

        for (Eigen::Index a = 0; a < em; ++a) a_[free[a]] = std::clamp(a_[free[a]] + t * delta(a), 0.0, c_);
        if (blocking >= 0) a_[free[blocking]] = delta(blocking) > 0.0 ? c_ : 0.0;
        refresh_gradient();
        return blocking >= 0 ? Newton::Blocked : Newton::Full;
    }

    void refresh_gradient() {
        std::vector<double> beta(n_);
        for (std::size_t i = 0; i < n_; ++i) beta[i] = a_[i] - a_[i + n_];
        for (std::size_t i = 0; i < n_; ++i) {
            const double* ki = &k_[i * n_];
            double kb = 0.0;
            for (std::size_t j = 0; j < n_; ++j) kb += ki[j] * beta[j];
            grad_[i] = kb + epsilon_ - y_[i];
            grad_[i + n_] = -kb + epsilon_ + y_[i];
        }
    }

    double bias() const noexcept {
        double ub = kInf, lb = -kInf, free_sum = 0.0;
        std::size_t free = 0;
        // Round-off residue from pair updates must not count as a free variable.
        const double snap = kBoundSnap * c_;
        for (std::size_t k = 0; k < 2 * n_; ++k) {
            const double yg = sign(k) * grad_[k];
            const bool at_upper = a_[k] >= c_ - snap, at_lower = a_[k] <= snap;
            if (at_upper) {
                if (sign(k) < 0) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else if (at_lower) {
                if (sign(k) > 0) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else {
                ++free;
                free_sum += yg;
            }
        }
        const double rho = free > 0 ? free_sum / static_cast<double>(free) : 0.5 * (ub + lb);
        return -rho;
    }

    std::span<const double> k_;
    std::span<const double> y_;
    std::size_t n_;
    double c_;
    double epsilon_;
    std::vector<double> a_;
    std::vector<double> grad_;
};

double quad_form(std::span<const double> gram, std::span<const double> beta) {
    const std::size_t n = beta.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (beta[i] == 0.0) continue;
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += gram[i * n + j] * beta[j];
        s += beta[i] * row;
    }
    return s;
}

void check_square(std::span<const double> gram, std::size_t n) {
    if (gram.size() != n * n)
        throw ShapeError("gram matrix has " + std::to_string(gram.size()) + " entries, expected " +
                         std::to_string(n * n));
}

}  // namespace

double Kernel::operator()(std::span<const double> x, std::span<const double> y) const noexcept {
    double s = 0.0;
    if (type == KernelType::Linear) {
        for (std::size_t j = 0; j < x.size(); ++j) s += x[j] * y[j];
        return s;
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = x[j] - y[j];
        s += d * d;
    }
    return std::exp(-gamma * s);
}

std::string Kernel::name() const { return type == KernelType::Linear ? "linear" : "rbf"; }

void SvrParams::validate() const {
    if (!(c > 0.0)) throw DomainError("SVR C must be positive");
    if (!(epsilon >= 0.0)) throw DomainError("SVR epsilon must be non-negative");
    if (kernel.type == KernelType::Rbf && !(kernel.gamma > 0.0)) throw DomainError("RBF gamma must be positive");
    if (!(tolerance > 0.0)) throw DomainError("SVR tolerance must be positive");
}

DualSolution solve_svr_dual(std::span<const double> gram, std::span<const double> targets, double c,
                            double epsilon, double tolerance, std::size_t max_iterations,
                            std::span<const double> start) {
    check_square(gram, targets.size());
    if (max_iterations == 0) max_iterations = std::max<std::size_t>(1'000'000, 100 * targets.size());
    SmoSolver solver(gram, targets, c, epsilon);
    if (!start.empty()) solver.warm_start(start);
    return solver.run(tolerance, max_iterations);
}

double dual_objective(std::span<const double> gram, std::span<const double> targets,
                      std::span<const double> beta, double epsilon) {
    check_square(gram, targets.size());
    double lin = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i < beta.size(); ++i) {
        lin += targets[i] * beta[i];
        l1 += std::abs(beta[i]);
    }
    return lin - epsilon * l1 - 0.5 * quad_form(gram, beta);
}

double primal_objective(std::span<const double> gram, std::span<const double> targets,
                        std::span<const double> beta, double bias, double c, double epsilon) {
    const std::size_t n = targets.size();
    check_square(gram, n);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = bias;
        for (std::size_t j = 0; j < n; ++j) f += gram[i * n + j] * beta[j];
        loss += std::max(0.0, std::abs(targets[i] - f) - epsilon);
    }
    return 0.5 * quad_form(gram, beta) + c * loss;
}

std::vector<double> gram_matrix(std::span<const double> rows, std::size_t cols, const Kernel& k) {
    const std::size_t n = cols ? rows.size() / cols : 0;
    std::vector<double> g(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            g[i * n + j] = g[j * n + i] = k(rows.subspan(i * cols, cols), rows.subspan(j * cols, cols));
    return g;
}

SvrModel::SvrModel(std::vector<double> support, std::vector<double> beta, double bias, SvrParams params,
                   ColumnStats stats, std::vector<std::string> feature_names)
    : support_(std::move(support)), beta_(std::move(beta)), bias_(bias), params_(params),
      stats_(std::move(stats)), names_(std::move(feature_names)) {}

double SvrModel::decision_value(std::span<const double> raw_features) const {
    if (raw_features.size() != dimension())
        throw ShapeError("model expects " + std::to_string(dimension()) + " features, got " +
                         std::to_string(raw_features.size()));
    const auto z = stats_.apply(raw_features);
    double f = bias_;
    for (std::size_t i = 0; i < beta_.size(); ++i) f += beta_[i] * params_.kernel(support_vector(i), z);
    return f;
}

SvrModel svr_fit(const DesignMatrix& x, const SvrParams& params) { return svr_fit_from(x, params, {}).model; }

WarmFit svr_fit_from(const DesignMatrix& x, const SvrParams& params, std::span<const double> start) {
    params.validate();
    if (x.rows() < 2) throw ShapeError("SVR fit needs at least 2 rows");
    ColumnStats stats = fit_column_stats(x.data, x.cols);
    std::vector<double> z = x.data;
    for (std::size_t i = 0; i < x.rows(); ++i) stats.apply_in_place({z.data() + i * x.cols, x.cols});

    const auto gram = gram_matrix(z, x.cols, params.kernel);
    auto sol = solve_svr_dual(gram, x.targets, params.c, params.epsilon, params.tolerance,
                              params.max_iterations, start);

    std::vector<double> support, beta;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        if (sol.beta[i] == 0.0) continue;
        beta.push_back(sol.beta[i]);
        support.insert(support.end(), z.begin() + static_cast<std::ptrdiff_t>(i * x.cols),
                       z.begin() + static_cast<std::ptrdiff_t>((i + 1) * x.cols));
    }
    auto names = x.feature_names;
    if (names.size() != x.cols) names.assign(x.cols, std::string{});
    return {SvrModel(std::move(support), std::move(beta), sol.bias, params, std::move(stats), std::move(names)),
            std::move(sol.beta), sol.iterations};
}

double svr_predict(const SvrModel& m, std::span<const double> raw_features) {
    return std::clamp(m.decision_value(raw_features), 0.0, 100.0);
}

LinearWeights extract_weights(const SvrModel& m) {
    if (m.params().kernel.type != KernelType::Linear)
        throw KernelError("linear weights are undefined for the " + m.params().kernel.name() + " kernel");
    const std::size_t d = m.dimension();
    LinearWeights out;
    out.names = m.feature_names();
    out.w.assign(d, 0.0);
    for (std::size_t i = 0; i < m.support_count(); ++i) {
        const auto sv = m.support_vector(i);
        for (std::size_t j = 0; j < d; ++j) out.w[j] += m.dual_coefs()[i] * sv[j];
    }
    out.b = m.bias();
    const auto& st = m.standardization();
    out.raw_w.assign(d, 0.0);
    out.raw_b = m.bias();
    for (std::size_t j = 0; j < d; ++j) {
        if (st.sd[j] == 0.0) continue;
        out.raw_w[j] = out.w[j] / st.sd[j];
        out.raw_b -= out.raw_w[j] * st.mean[j];
    }
    return out;
}

}  // namespace ares
