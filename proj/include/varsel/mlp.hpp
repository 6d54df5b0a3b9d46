#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "varsel/data.hpp"
#include "varsel/matrix.hpp"

namespace varsel {

/// Single-hidden-layer perceptron: tanh hidden units, linear output.
///
/// Parameters are stored flat. The first hidden * (inputs + 1) entries are the
/// hidden weights, row-major with each unit's bias last; the remaining
/// hidden + 1 entries are the output weights with the output bias last.
struct MlpParams {
    std::size_t inputs = 0;
    std::size_t hidden = 0;
    std::vector<double> weights;

    static std::size_t count(std::size_t inputs, std::size_t hidden) noexcept {
        return hidden * (inputs + 1) + hidden + 1;
    }
    std::size_t n_params() const noexcept { return count(inputs, hidden); }

    /// Hidden weights of unit k, length inputs + 1 (bias last).
    std::span<const double> hidden_row(std::size_t k) const {
        return std::span<const double>(weights).subspan(k * (inputs + 1), inputs + 1);
    }
    /// Output weights, length hidden + 1 (bias last).
    std::span<const double> output_weights() const {
        return std::span<const double>(weights).subspan(hidden * (inputs + 1), hidden + 1);
    }

    friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

struct TrainConfig {
    std::size_t hidden_units = 5;
    std::size_t max_iterations = 200;
    double lambda_init = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 0.1;
    double tol_rel = 1e-9;
    double lambda_max = 1e10;
    std::uint64_t weight_seed = 0;

    /// Throws ConfigError when a field violates its range.
    void validate() const;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

enum class StopReason { Tolerance, ZeroResidual, DampingCap, IterationLimit };

const char* to_string(StopReason r) noexcept;

struct TrainedModel {
    MlpParams params;
    double train_sse = 0.0;
    /// Damped solves attempted (accepted and rejected steps).
    std::size_t iterations_used = 0;
    bool converged = false;
    StopReason stop = StopReason::IterationLimit;
    /// SSE at the initial weights followed by the SSE of every accepted step.
    std::vector<double> sse_history;
    NormStats norm_stats;
};

/// Weights uniform in [-0.5, 0.5], determined by the seed.
MlpParams init_weights(std::size_t inputs, std::size_t hidden, std::uint64_t seed);

double forward(const MlpParams& p, std::span<const double> x);

/// Hidden activations tanh(w1 [x; 1]) for one input.
std::vector<double> hidden_activations(const MlpParams& p, std::span<const double> x);

struct ResidualJacobian {
    std::vector<double> residuals;  // forward(x_i) - y_i
    Matrix jacobian;                // n_samples x n_params, flat parameter order
};

ResidualJacobian residual_jacobian(const MlpParams& p, const Matrix& x, std::span<const double> y);

/// Sum over rows of (forward(x_i) - y_i)^2.
double sse(const MlpParams& p, const Matrix& x, std::span<const double> y);

/// Levenberg-Marquardt on the SSE with damping (J^T J + lambda I).
/// Throws SolveFailure when the damped system cannot be factored below
/// lambda_max, or when the Jacobian is not finite.
TrainedModel train_lm(const Matrix& x, std::span<const double> y, const TrainConfig& cfg);

/// Number of train_lm calls made by this process.
std::uint64_t lm_invocations() noexcept;

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainedModel& m, const TrainConfig& cfg);

}  // namespace varsel
