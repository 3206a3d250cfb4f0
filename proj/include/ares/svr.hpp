#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ares/features.hpp"

namespace ares {

enum class KernelType { Linear, Rbf };

struct Kernel {
    KernelType type = KernelType::Linear;
    double gamma = 0.0;  // Rbf only: K(x, y) = exp(-gamma * |x - y|^2)

    static Kernel linear() noexcept { return {KernelType::Linear, 0.0}; }
    static Kernel rbf(double gamma) noexcept { return {KernelType::Rbf, gamma}; }

    double operator()(std::span<const double> x, std::span<const double> y) const noexcept;
    std::string name() const;

    bool operator==(const Kernel&) const = default;
};

struct SvrParams {
    double c = 1.0;
    double epsilon = 0.1;
    Kernel kernel = Kernel::linear();
    /// Stop once the maximal KKT violation of the dual drops below this.
    double tolerance = 1e-3;
    /// SMO iteration cap; 0 picks max(1e6, 100 * rows).
    std::size_t max_iterations = 0;

    /// Throws DomainError on C <= 0, epsilon < 0, gamma <= 0 (Rbf) or tolerance <= 0.
    void validate() const;
    bool operator==(const SvrParams&) const = default;
};

/// Optimum of the epsilon-SVR dual for a fixed Gram matrix.
struct DualSolution {
    std::vector<double> beta;  // alpha_i - alpha*_i, one per training row
    double bias = 0.0;
    double violation = 0.0;  // final maximal KKT violation
    std::size_t iterations = 0;
};

/// SMO over the 2n-variable dual
///   min 0.5 beta' K beta - y' beta + epsilon * |beta|_1,  sum(beta) = 0,  |beta_i| <= C
/// with two-variable working sets: the maximal KKT violator (lowest index wins
/// ties) paired by second-order gain, plus periodic Newton steps on the free set.
/// `gram` is n x n row-major. Throws ConvergenceError past the cap.
/// `start`, when non-empty, seeds the solver: missing trailing entries are taken
/// as zero and the vector is scaled down if it leaves the [-C, C] box. Its sum
/// must be zero.
DualSolution solve_svr_dual(std::span<const double> gram, std::span<const double> targets, double c,
                            double epsilon, double tolerance, std::size_t max_iterations,
                            std::span<const double> start = {});

/// Dual objective in maximization form: y'beta - epsilon |beta|_1 - 0.5 beta' K beta.
double dual_objective(std::span<const double> gram, std::span<const double> targets,
                      std::span<const double> beta, double epsilon);
/// Primal objective 0.5 |w|^2 + C * sum max(0, |y_i - f(x_i)| - epsilon) of the
/// function defined by (beta, bias). Never below dual_objective.
double primal_objective(std::span<const double> gram, std::span<const double> targets,
                        std::span<const double> beta, double bias, double c, double epsilon);

/// n x n Gram matrix of row-major `rows`.
std::vector<double> gram_matrix(std::span<const double> rows, std::size_t cols, const Kernel& k);

/// Fitted epsilon-SVR. Support vectors live in standardized feature space.
class SvrModel {
public:
    SvrModel(std::vector<double> support, std::vector<double> beta, double bias, SvrParams params,
             ColumnStats stats, std::vector<std::string> feature_names);

    std::size_t dimension() const noexcept { return stats_.mean.size(); }
    std::size_t support_count() const noexcept { return beta_.size(); }
    std::span<const double> support_vector(std::size_t i) const noexcept {
        return {support_.data() + i * dimension(), dimension()};
    }
    std::span<const double> dual_coefs() const noexcept { return beta_; }
    double bias() const noexcept { return bias_; }
    const SvrParams& params() const noexcept { return params_; }
    const ColumnStats& standardization() const noexcept { return stats_; }
    const std::vector<std::string>& feature_names() const noexcept { return names_; }

    /// sum_i beta_i K(sv_i, z) + b on the standardized input z; no clamping.
    double decision_value(std::span<const double> raw_features) const;

private:
    std::vector<double> support_;
    std::vector<double> beta_;
    double bias_;
    SvrParams params_;
    ColumnStats stats_;
    std::vector<std::string> names_;
};

SvrModel svr_fit(const DesignMatrix& x, const SvrParams& params);

/// A fit together with its full dual vector (one entry per training row).
struct WarmFit {
    SvrModel model;
    std::vector<double> beta;
    std::size_t iterations = 0;
};

/// svr_fit seeded from `start`, typically the beta of an earlier fit on a
/// prefix of the same rows. An empty `start` is a cold start.
WarmFit svr_fit_from(const DesignMatrix& x, const SvrParams& params, std::span<const double> start);

/// Decision value clamped to [0, 100]. Throws ShapeError on a dimension mismatch.
double svr_predict(const SvrModel& m, std::span<const double> raw_features);

/// Primal weights of a linear-kernel model.
struct LinearWeights {
    std::vector<std::string> names;
    std::vector<double> w;      // standardized feature space
    double b = 0.0;
    std::vector<double> raw_w;  // original feature units
    double raw_b = 0.0;
};

/// Throws KernelError for non-linear kernels.
LinearWeights extract_weights(const SvrModel& m);

}  // namespace ares
