#include "varsel/mlp.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "varsel/errors.hpp"
#include "varsel/linalg.hpp"
#include "varsel/rng.hpp"
#include "varsel/simd/kernels.hpp"

namespace varsel {

namespace {

std::atomic<std::uint64_t> g_lm_calls{0};

void check_shapes(const MlpParams& p, const Matrix& x, std::size_t n_targets) {
    if (x.cols() != p.inputs)
        throw DimensionMismatch("input has " + std::to_string(x.cols()) +
                                " columns, network expects " + std::to_string(p.inputs));
    if (x.rows() != n_targets)
        throw DimensionMismatch(std::to_string(x.rows()) + " input rows vs " +
                                std::to_string(n_targets) + " targets");
}

// Fills `act` with the hidden activations and returns the network output.
double forward_into(const MlpParams& p, std::span<const double> x, std::span<double> act) {
    const std::size_t d = p.inputs;
    for (std::size_t k = 0; k < p.hidden; ++k) {
        const auto row = p.hidden_row(k);
        act[k] = std::tanh(simd::dot(row.first(d), x) + row[d]);
    }
    const auto w2 = p.output_weights();
    return simd::dot(w2.first(p.hidden), act) + w2[p.hidden];
}

double sse_of(const MlpParams& p, const Matrix& x, std::span<const double> y,
              std::vector<double>& scratch_act, std::vector<double>& scratch_res) {
    for (std::size_t i = 0; i < x.rows(); ++i)
        scratch_res[i] = forward_into(p, x.row(i), scratch_act) - y[i];
    return simd::sum_squares(scratch_res);
}

}  // namespace

void TrainConfig::validate() const {
    if (hidden_units < 1) throw ConfigError("hidden_units must be >= 1");
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    if (!(lambda_init > 0.0)) throw ConfigError("lambda_init must be > 0");
    if (!(lambda_up > 1.0)) throw ConfigError("lambda_up must be > 1");
    if (!(lambda_down > 0.0 && lambda_down < 1.0)) throw ConfigError("lambda_down must lie in (0, 1)");
    if (!(tol_rel > 0.0)) throw ConfigError("tol_rel must be > 0");
    if (!(lambda_max > lambda_init)) throw ConfigError("lambda_max must exceed lambda_init");
}

const char* to_string(StopReason r) noexcept {
    switch (r) {
        case StopReason::Tolerance: return "tolerance";
        case StopReason::ZeroResidual: return "zero_residual";
        case StopReason::DampingCap: return "damping_cap";
        case StopReason::IterationLimit: return "iteration_limit";
    }
    return "unknown";
}

MlpParams init_weights(std::size_t inputs, std::size_t hidden, std::uint64_t seed) {
    if (inputs < 1 || hidden < 1) throw ConfigError("network needs at least one input and one hidden unit");
    MlpParams p{inputs, hidden, std::vector<double>(MlpParams::count(inputs, hidden))};
    Rng rng(seed);
    for (double& w : p.weights) w = rng.uniform(-0.5, 0.5);
    return p;
}

double forward(const MlpParams& p, std::span<const double> x) {
    if (x.size() != p.inputs)
        throw DimensionMismatch("input of length " + std::to_string(x.size()) +
                                ", network expects " + std::to_string(p.inputs));
    std::vector<double> act(p.hidden);
    return forward_into(p, x, act);
}

std::vector<double> hidden_activations(const MlpParams& p, std::span<const double> x) {
    if (x.size() != p.inputs) throw DimensionMismatch("input length does not match the network");
    std::vector<double> act(p.hidden);
    forward_into(p, x, act);
    return act;
}

ResidualJacobian residual_jacobian(const MlpParams& p, const Matrix& x, std::span<const double> y) {
    check_shapes(p, x, y.size());
    const std::size_t d = p.inputs;
    const std::size_t h = p.hidden;
    const std::size_t out_off = h * (d + 1);
    const auto w2 = p.output_weights();

    ResidualJacobian rj{std::vector<double>(x.rows()), Matrix(x.rows(), p.n_params())};
    std::vector<double> act(h);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto xi = x.row(i);
        rj.residuals[i] = forward_into(p, xi, act) - y[i];
        auto ji = rj.jacobian.row(i);
        for (std::size_t k = 0; k < h; ++k) {
            const double g = w2[k] * (1.0 - act[k] * act[k]);
            double* dst = ji.data() + k * (d + 1);
            for (std::size_t j = 0; j < d; ++j) dst[j] = g * xi[j];
            dst[d] = g;
            ji[out_off + k] = act[k];
        }
        ji[out_off + h] = 1.0;
    }
    return rj;
}

double sse(const MlpParams& p, const Matrix& x, std::span<const double> y) {
    check_shapes(p, x, y.size());
    std::vector<double> act(p.hidden);
    std::vector<double> res(x.rows());
    return sse_of(p, x, y, act, res);
}

TrainedModel train_lm(const Matrix& x, std::span<const double> y, const TrainConfig& cfg) {
    g_lm_calls.fetch_add(1, std::memory_order_relaxed);
    cfg.validate();
    if (x.rows() == 0) throw DataError("training set is empty");

    TrainedModel m;
    m.params = init_weights(x.cols(), cfg.hidden_units, cfg.weight_seed);
    check_shapes(m.params, x, y.size());

    const std::size_t n_params = m.params.n_params();
    std::vector<double> act(cfg.hidden_units);
    std::vector<double> res(x.rows());

    ResidualJacobian rj = residual_jacobian(m.params, x, y);
    double current = simd::sum_squares(rj.residuals);
    m.sse_history.push_back(current);

    Matrix gram(n_params, n_params);
    Matrix damped(n_params, n_params);
    std::vector<double> grad(n_params);
    bool normal_stale = true;
    double lambda = cfg.lambda_init;
    MlpParams trial = m.params;

    while (true) {
        if (current == 0.0) {
            m.stop = StopReason::ZeroResidual;
            break;
        }
        if (m.iterations_used >= cfg.max_iterations) {
            m.stop = StopReason::IterationLimit;
            break;
        }
        if (normal_stale) {
            // Lower triangle of J^T J and the gradient J^T r, one sample row at a time.
            std::fill(gram.data().begin(), gram.data().end(), 0.0);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = 0; i < x.rows(); ++i) {
                const auto ji = rj.jacobian.row(i);
                for (std::size_t k = 0; k < n_params; ++k)
                    simd::axpy(ji[k], ji.first(k + 1), gram.row(k).first(k + 1));
                simd::axpy(rj.residuals[i], ji, grad);
            }
            for (double v : gram.data())
                if (!std::isfinite(v)) throw SolveFailure("Jacobian contains non-finite entries");
            normal_stale = false;
        }

        ++m.iterations_used;
        damped = gram;
        for (std::size_t k = 0; k < n_params; ++k) damped(k, k) += lambda;
        if (!cholesky_factor(damped)) {
            lambda *= cfg.lambda_up;
            if (lambda > cfg.lambda_max)
                throw SolveFailure("damped normal matrix is singular up to lambda " +
                                   std::to_string(cfg.lambda_max));
            continue;
        }
        const std::vector<double> step = cholesky_solve(damped, grad);
        for (std::size_t k = 0; k < n_params; ++k) trial.weights[k] = m.params.weights[k] - step[k];
        const double candidate = sse_of(trial, x, y, act, res);

        if (candidate < current) {
            const double rel = (current - candidate) / current;
            std::swap(m.params.weights, trial.weights);
            current = candidate;
            m.sse_history.push_back(current);
            lambda *= cfg.lambda_down;
            rj = residual_jacobian(m.params, x, y);
            normal_stale = true;
            if (rel < cfg.tol_rel) {
                m.stop = StopReason::Tolerance;
                break;
            }
        } else {
            lambda *= cfg.lambda_up;
            if (lambda > cfg.lambda_max) {
                m.stop = StopReason::DampingCap;
                break;
            }
        }
    }

    m.train_sse = current;
    m.converged = m.stop != StopReason::IterationLimit;
    return m;
}

std::uint64_t lm_invocations() noexcept { return g_lm_calls.load(std::memory_order_relaxed); }

nlohmann::json to_json(const TrainConfig& cfg) {
    return {
        {"hidden_units", cfg.hidden_units}, {"max_iterations", cfg.max_iterations},
        {"lambda_init", cfg.lambda_init},   {"lambda_up", cfg.lambda_up},
        {"lambda_down", cfg.lambda_down},   {"tol_rel", cfg.tol_rel},
        {"lambda_max", cfg.lambda_max},     {"weight_seed", cfg.weight_seed},
    };
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig cfg;
    cfg.hidden_units = j.at("hidden_units").get<std::size_t>();
    cfg.max_iterations = j.at("max_iterations").get<std::size_t>();
    cfg.lambda_init = j.at("lambda_init").get<double>();
    cfg.lambda_up = j.at("lambda_up").get<double>();
    cfg.lambda_down = j.at("lambda_down").get<double>();
    cfg.tol_rel = j.at("tol_rel").get<double>();
    cfg.lambda_max = j.at("lambda_max").get<double>();
    cfg.weight_seed = j.value("weight_seed", std::uint64_t{0});
    return cfg;
}

nlohmann::json to_json(const TrainedModel& m, const TrainConfig& cfg) {
    return {
        {"inputs", m.params.inputs},
        {"hidden", m.params.hidden},
        {"weights", m.params.weights},
        {"train_sse", m.train_sse},
        {"iterations_used", m.iterations_used},
        {"converged", m.converged},
        {"stop_reason", to_string(m.stop)},
        {"norm_mean", m.norm_stats.mean},
        {"norm_sd", m.norm_stats.sd},
        {"config", to_json(cfg)},
    };
}

}  // namespace varsel
