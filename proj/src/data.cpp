#include "varsel/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "varsel/errors.hpp"
#include "varsel/rng.hpp"

namespace varsel {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void check_stats(const NormStats& stats, std::size_t n_vars) {
    if (stats.mean.size() != n_vars || stats.sd.size() != n_vars)
        throw DimensionMismatch("normalization stats cover " + std::to_string(stats.mean.size()) +
                                " variables, dataset has " + std::to_string(n_vars));
}

}  // namespace

void Dataset::validate() const {
    if (samples.rows() != target.size())
        throw DataError("dataset has " + std::to_string(samples.rows()) + " rows but " +
                        std::to_string(target.size()) + " targets");
    if (var_names.size() != samples.cols())
        throw DataError("dataset has " + std::to_string(samples.cols()) + " columns but " +
                        std::to_string(var_names.size()) + " names");
    std::set<std::string_view> seen;
    for (const auto& n : var_names)
        if (!seen.insert(n).second) throw DataError("duplicate variable name '" + n + "'");
    for (std::size_t r = 0; r < samples.rows(); ++r) {
        for (std::size_t c = 0; c < samples.cols(); ++c)
            if (!std::isfinite(samples(r, c)))
                throw NonFiniteValue("non-finite value at row " + std::to_string(r + 1) +
                                     ", column '" + var_names[c] + "'");
        if (!std::isfinite(target[r]))
            throw NonFiniteValue("non-finite target at row " + std::to_string(r + 1));
    }
}

Dataset load_csv(const std::filesystem::path& path, std::string_view target_column) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return parse_csv(in, target_column, path.string());
}

Dataset parse_csv(std::istream& in, std::string_view target_column, std::string_view source) {
    const std::string src(source);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(src + ": empty file, header row expected");

    std::vector<std::string> header;
    for (auto f : split_fields(line)) header.emplace_back(trim(f));
    const auto target_it = std::find(header.begin(), header.end(), target_column);
    if (target_it == header.end())
        throw MissingTarget(src + ": target column '" + std::string(target_column) +
                            "' not found in header");
    const std::size_t target_idx = static_cast<std::size_t>(target_it - header.begin());

    Dataset d;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (i != target_idx) d.var_names.push_back(header[i]);

    std::vector<double> values;
    std::size_t line_no = 1;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw ParseError(src + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, found " +
                             std::to_string(fields.size()));
        for (std::size_t i = 0; i < fields.size(); ++i) {
            std::string_view cell = trim(fields[i]);
            if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            const std::string where = src + ":" + std::to_string(line_no) + ": row " +
                                      std::to_string(rows + 1) + ", column '" + header[i] + "'";
            if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size())
                throw ParseError(where + ": cannot parse '" + std::string(trim(fields[i])) +
                                 "' as a number");
            if (!std::isfinite(v)) throw NonFiniteValue(where + ": non-finite value");
            if (i == target_idx)
                d.target.push_back(v);
            else
                values.push_back(v);
        }
        ++rows;
    }

    d.samples = Matrix(rows, d.var_names.size());
    std::copy(values.begin(), values.end(), d.samples.data().begin());
    d.validate();
    return d;
}

void write_csv(const Dataset& d, std::ostream& out, std::string_view target_name) {
    for (const auto& n : d.var_names) out << n << ',';
    out << target_name << '\n';
    for (std::size_t r = 0; r < d.n_samples(); ++r) {
        for (double v : d.samples.row(r)) out << format_double(v) << ',';
        out << format_double(d.target[r]) << '\n';
    }
}

void write_csv(const Dataset& d, const std::filesystem::path& path, std::string_view target_name) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_csv(d, out, target_name);
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

NormStats compute_norm_stats(const Dataset& d, std::vector<std::size_t>* constant_columns) {
    const std::size_t n = d.n_samples();
    NormStats s{std::vector<double>(d.n_vars(), 0.0), std::vector<double>(d.n_vars(), 1.0)};
    for (std::size_t c = 0; c < d.n_vars(); ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) sum += d.samples(r, c);
        const double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double dev = d.samples(r, c) - mean;
            ss += dev * dev;
        }
        const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
        s.mean[c] = mean;
        if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
            s.sd[c] = 1.0;
            if (constant_columns) constant_columns->push_back(c);
        } else {
            s.sd[c] = sd;
        }
    }
    return s;
}

SplitDataset split_sequential(const Dataset& d, std::size_t n_train) {
    if (n_train == 0 || n_train >= d.n_samples())
        throw BadSplit("n_train must lie strictly between 0 and " + std::to_string(d.n_samples()) +
                       ", got " + std::to_string(n_train));
    const std::size_t n_cv = d.n_samples() - n_train;
    const std::size_t cols = d.n_vars();

    SplitDataset s;
    s.train.var_names = d.var_names;
    s.cv.var_names = d.var_names;
    s.train.samples = Matrix(n_train, cols);
    s.cv.samples = Matrix(n_cv, cols);
    const auto all = d.samples.data();
    std::copy(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_train * cols),
              s.train.samples.data().begin());
    std::copy(all.begin() + static_cast<std::ptrdiff_t>(n_train * cols), all.end(),
              s.cv.samples.data().begin());
    s.train.target.assign(d.target.begin(), d.target.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.cv.target.assign(d.target.begin() + static_cast<std::ptrdiff_t>(n_train), d.target.end());
    s.norm_stats = compute_norm_stats(s.train, &s.constant_columns);
    return s;
}

Dataset select_columns(const Dataset& d, const Chromosome& c) {
    if (c.max_gene() >= d.n_vars())
        throw IndexOutOfRange("gene " + std::to_string(c.max_gene() + 1) +
                              " (1-based) exceeds the dataset's " + std::to_string(d.n_vars()) +
                              " variables");
    const auto& genes = c.genes();
    Dataset out;
    out.samples = Matrix(d.n_samples(), genes.size());
    for (std::size_t r = 0; r < d.n_samples(); ++r)
        for (std::size_t k = 0; k < genes.size(); ++k) out.samples(r, k) = d.samples(r, genes[k]);
    out.target = d.target;
    for (Gene g : genes) out.var_names.push_back(d.var_names[g]);
    return out;
}

NormStats select_columns(const NormStats& stats, const Chromosome& c) {
    if (c.max_gene() >= stats.mean.size())
        throw IndexOutOfRange("gene " + std::to_string(c.max_gene() + 1) +
                              " (1-based) exceeds the stats' " + std::to_string(stats.mean.size()) +
                              " variables");
    NormStats out;
    for (Gene g : c.genes()) {
        out.mean.push_back(stats.mean[g]);
        out.sd.push_back(stats.sd[g]);
    }
    return out;
}

Dataset normalize_apply(const Dataset& d, const NormStats& stats) {
    check_stats(stats, d.n_vars());
    Dataset out = d;
    for (std::size_t r = 0; r < out.n_samples(); ++r) {
        auto row = out.samples.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - stats.mean[c]) / stats.sd[c];
    }
    return out;
}

Dataset normalize_invert(const Dataset& d, const NormStats& stats) {
    check_stats(stats, d.n_vars());
    Dataset out = d;
    for (std::size_t r = 0; r < out.n_samples(); ++r) {
        auto row = out.samples.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] = row[c] * stats.sd[c] + stats.mean[c];
    }
    return out;
}

Dataset synth_lfcm(std::size_t n_vars, std::size_t n_samples, const Chromosome& informative,
                   double noise_sd, std::uint64_t seed) {
    if (n_vars == 0 || n_vars > kMaxVars)
        throw ConfigError("n_vars must lie in [1, " + std::to_string(kMaxVars) + "]");
    if (n_samples < 2) throw ConfigError("n_samples must be at least 2");
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd))
        throw ConfigError("noise_sd must be finite and non-negative");
    if (informative.max_gene() >= n_vars)
        throw IndexOutOfRange("informative gene " + std::to_string(informative.max_gene() + 1) +
                              " exceeds n_vars " + std::to_string(n_vars));

    Rng rng(derive_seed(seed, "synth_lfcm"));
    std::vector<double> gain(n_vars), scale(n_vars), bias(n_vars);
    for (std::size_t j = 0; j < n_vars; ++j) {
        gain[j] = rng.uniform(0.4, 0.8);
        scale[j] = rng.uniform(0.8, 1.5);
        bias[j] = rng.uniform(-2.0, 2.0);
    }

    using std::numbers::pi;
    Dataset d;
    d.samples = Matrix(n_samples, n_vars);
    d.target.resize(n_samples);
    for (std::size_t j = 0; j < n_vars; ++j) d.var_names.push_back("s" + std::to_string(j + 1));

    for (std::size_t i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n_samples - 1);
        const double level = 0.5 + 0.3 * std::sin(pi * t) + 0.4 * std::sin(10.0 * pi * t) +
                             0.15 * std::sin(26.0 * pi * t + 1.0);
        d.target[i] = level;
        for (std::size_t j = 0; j < n_vars; ++j) {
            const double z = rng.normal();
            if (informative.contains(static_cast<Gene>(j)))
                d.samples(i, j) =
                    bias[j] + scale[j] * std::tanh(gain[j] * (level - 0.5)) + noise_sd * z;
            else
                d.samples(i, j) = bias[j] + scale[j] * z;
        }
    }
    return d;
}

}  // namespace varsel
