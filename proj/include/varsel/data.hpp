#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "varsel/genome.hpp"
#include "varsel/matrix.hpp"

namespace varsel {

/// Sample matrix (n_samples x n_vars) with its target vector.
struct Dataset {
    Matrix samples;
    std::vector<double> target;
    std::vector<std::string> var_names;

    std::size_t n_samples() const noexcept { return samples.rows(); }
    std::size_t n_vars() const noexcept { return samples.cols(); }

    /// Checks shape agreement, finiteness and unique names.
    /// Throws DataError (NonFiniteValue for NaN/Inf).
    void validate() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Per-variable z-score parameters.
struct NormStats {
    std::vector<double> mean;
    std::vector<double> sd;

    friend bool operator==(const NormStats&, const NormStats&) = default;
};

struct SplitDataset {
    Dataset train;
    Dataset cv;
    NormStats norm_stats;
    /// Train columns whose spread was zero; their sd was forced to 1.
    std::vector<std::size_t> constant_columns;

    std::size_t n_vars() const noexcept { return train.n_vars(); }
};

/// Reads a header-first comma-separated file; the named column becomes the target.
Dataset load_csv(const std::filesystem::path& path, std::string_view target_column);
/// Same as load_csv for an already-open stream. `source` labels error messages.
Dataset parse_csv(std::istream& in, std::string_view target_column, std::string_view source);

/// Writes the sensors followed by the target column. Values use shortest
/// round-trip formatting, so load_csv reproduces the dataset exactly.
void write_csv(const Dataset& d, const std::filesystem::path& path, std::string_view target_name);
void write_csv(const Dataset& d, std::ostream& out, std::string_view target_name);

/// Mean and sample standard deviation (n-1) of every column.
/// Columns with (numerically) zero spread get sd = 1; their indices are
/// appended to `constant_columns` when non-null.
NormStats compute_norm_stats(const Dataset& d, std::vector<std::size_t>* constant_columns = nullptr);

/// First n_train rows train, the rest cross-validate. Stats come from train only.
SplitDataset split_sequential(const Dataset& d, std::size_t n_train);

/// Projects onto c's columns in ascending index order.
Dataset select_columns(const Dataset& d, const Chromosome& c);
NormStats select_columns(const NormStats& stats, const Chromosome& c);

/// (x - mean) / sd per column; the target is untouched.
Dataset normalize_apply(const Dataset& d, const NormStats& stats);
/// x * sd + mean per column.
Dataset normalize_invert(const Dataset& d, const NormStats& stats);

/// Synthetic melter-style sensor data.
///
/// With t_i = i / (n_samples - 1) the target ("level") is
///   level(t) = 0.5 + 0.3 sin(pi t) + 0.4 sin(10 pi t) + 0.15 sin(26 pi t + 1)
/// which covers the same range in both halves of the time axis.
///
/// Every column j first draws gain_j ~ U[0.5, 1.0], scale_j ~ U[0.8, 1.5] and
/// bias_j ~ U[-2, 2] (in column order). Then, row by row:
///   informative:      x = bias_j + scale_j * tanh(gain_j * (level - 0.5)) + noise_sd * N(0,1)
///   non-informative:  x = bias_j + scale_j * N(0,1)
/// Columns are named s1..sN. The result is a pure function of the arguments.
Dataset synth_lfcm(std::size_t n_vars, std::size_t n_samples, const Chromosome& informative,
                   double noise_sd, std::uint64_t seed);

}  // namespace varsel
