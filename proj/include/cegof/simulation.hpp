#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cegof/copula_models.hpp"
#include "cegof/errors.hpp"
#include "cegof/gof_test.hpp"
#include "cegof/parallel.hpp"

namespace cegof {

/// One Monte Carlo grid: a generating family, its parameter values, and
/// margins applied before the pipeline sees the data.
struct ExperimentGrid {
    Family family = Family::gaussian;
    std::vector<double> param_values;
    Eigen::Index sample_size = 300;
    int replicates = 50;
    Margin margins = Margin::uniform;
    std::uint64_t seed = 42;
};

struct ResultRow {
    std::string family_true;
    double param = 0.0;
    int replicate = 0;
    std::string family_hyp;
    double t_stat = 0.0;
    double hypothesis_ce = 0.0;
    double true_ce = 0.0;
    double fitted_param = 0.0;
    std::uint64_t seed = 0;
    std::string error;
};

struct SummaryRow {
    double param = 0.0;
    std::string family_hyp;
    double mean_t = 0.0;
    std::optional<double> sd_t;
    double correct_rate = 0.0;
};

namespace detail {

inline void validate_grid(const ExperimentGrid& grid) {
    if (grid.param_values.empty()) throw input_error("experiment grid: empty parameter list");
    if (grid.sample_size < 10) throw input_error("experiment grid: sample_size must be >= 10");
    if (grid.replicates < 1) throw input_error("experiment grid: replicates must be >= 1");
    for (double v : grid.param_values) {
        if (grid.family == Family::gaussian && !(v > -1.0 && v < 1.0)) {
            throw input_error("experiment grid: gaussian rho must lie in (-1,1)");
        }
        if (grid.family == Family::gumbel && !(v >= 1.0)) {
            throw input_error("experiment grid: gumbel alpha must be >= 1");
        }
    }
}

inline Eigen::MatrixXd sample_true_copula(Family family, double param, Eigen::Index n,
                                          RngStream& rng) {
    if (family == Family::gaussian) {
        Eigen::MatrixXd sigma(2, 2);
        sigma << 1.0, param, param, 1.0;
        return sample_gaussian_copula(GaussianCopulaParams{sigma}, n, rng);
    }
    return sample_gumbel_copula(GumbelCopulaParams{param}, n, rng);
}

}  // namespace detail

/// Run the full grid: for each (param, replicate) sample the generating
/// copula, apply margins, and test both family hypotheses against it.
/// Exactly |param_values| * replicates * 2 rows come back, sorted by
/// (param, replicate, family_hyp); a failing cell is recorded in its rows'
/// error column. The copula-level draws depend only on (seed, param,
/// replicate), never on the margins, so margin choice cannot change any
/// statistic.
inline std::vector<ResultRow> run_experiment(const ExperimentGrid& grid, const EntropyConfig& cfg,
                                             unsigned n_threads = 0) {
    detail::validate_grid(grid);
    const std::vector<Family> hypotheses{Family::gaussian, Family::gumbel};
    const std::size_t n_cells = grid.param_values.size() * static_cast<std::size_t>(grid.replicates);
    std::vector<ResultRow> rows(n_cells * 2);
    RngStream base(grid.seed);

    parallel_for(n_cells, [&](std::size_t cell) {
        const std::size_t param_idx = cell / static_cast<std::size_t>(grid.replicates);
        const int rep = static_cast<int>(cell % static_cast<std::size_t>(grid.replicates));
        const double param = grid.param_values[param_idx];

        RngStream cell_stream = base.split(param_idx + 1).split(static_cast<std::uint64_t>(rep) + 1);
        std::uint64_t cell_seed = cell_stream.split(0xC5EDull).next_u64();

        ResultRow proto;
        proto.family_true = family_name(grid.family);
        proto.param = param;
        proto.replicate = rep;
        proto.seed = cell_seed;

        try {
            Eigen::MatrixXd u = detail::sample_true_copula(grid.family, param, grid.sample_size,
                                                           cell_stream);
            SampleMatrix x = apply_margins(u, grid.margins);
            auto reports = compare_families(x, hypotheses, cfg, cell_seed);
            std::sort(reports.begin(), reports.end(),
                      [](const TestReport& a, const TestReport& b) { return a.family < b.family; });
            for (std::size_t f = 0; f < reports.size(); ++f) {
                ResultRow row = proto;
                const TestReport& rep_f = reports[f];
                row.family_hyp = rep_f.family;
                row.t_stat = rep_f.t_stat;
                row.hypothesis_ce = rep_f.hypothesis_ce;
                row.true_ce = rep_f.true_ce;
                row.fitted_param = rep_f.error ? std::numeric_limits<double>::quiet_NaN()
                                              : fitted_param_scalar(rep_f.fitted_params);
                if (rep_f.error) row.error = *rep_f.error;
                rows[cell * 2 + f] = std::move(row);
            }
        } catch (const std::exception& ex) {
            for (std::size_t f = 0; f < hypotheses.size(); ++f) {
                ResultRow row = proto;
                row.family_hyp = family_name(hypotheses[f]);
                row.t_stat = std::numeric_limits<double>::quiet_NaN();
                row.error = ex.what();
                rows[cell * 2 + f] = std::move(row);
            }
        }
    }, n_threads);

    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.param != b.param) return a.param < b.param;
        if (a.replicate != b.replicate) return a.replicate < b.replicate;
        return a.family_hyp < b.family_hyp;
    });
    return rows;
}

/// Per (param, family_hyp): mean and sd of t_stat plus the fraction of
/// replicates in which the true family's statistic beat the rival's. The sd
/// is absent (not zero) for a single replicate.
inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& table) {
    if (table.empty()) throw input_error("summarize: empty result table");

    std::map<std::pair<double, std::string>, std::vector<double>> stats;
    // per (param, replicate): t_stat of the true family and of its rival
    std::map<std::pair<double, int>, std::map<std::string, double>> by_cell;
    std::map<double, std::string> true_family;

    for (const auto& row : table) {
        if (!row.error.empty()) continue;
        stats[{row.param, row.family_hyp}].push_back(row.t_stat);
        by_cell[{row.param, row.replicate}][row.family_hyp] = row.t_stat;
        true_family[row.param] = row.family_true;
    }

    std::map<double, double> correct_rate;
    std::map<double, int> cell_counts;
    for (const auto& [key, hyps] : by_cell) {
        if (hyps.size() < 2) continue;
        const std::string& truth = true_family[key.first];
        auto it = hyps.find(truth);
        if (it == hyps.end()) continue;
        bool correct = true;
        for (const auto& [hyp, t] : hyps) {
            if (hyp != truth && !(it->second < t)) correct = false;
        }
        ++cell_counts[key.first];
        if (correct) correct_rate[key.first] += 1.0;
    }
    for (auto& [param, rate] : correct_rate) rate /= cell_counts[param];

    std::vector<SummaryRow> summary;
    for (const auto& [key, values] : stats) {
        SummaryRow row;
        row.param = key.first;
        row.family_hyp = key.second;
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        row.mean_t = mean;
        if (values.size() > 1) {
            double ss = 0.0;
            for (double v : values) ss += (v - mean) * (v - mean);
            row.sd_t = std::sqrt(ss / static_cast<double>(values.size() - 1));
        }
        row.correct_rate = correct_rate.count(key.first) ? correct_rate[key.first] : 0.0;
        summary.push_back(std::move(row));
    }
    return summary;
}

namespace detail {

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << "# cegof results v1\n";
    os << "family_true,param,replicate,family_hyp,t_stat,hypothesis_ce,true_ce,"
          "fitted_param,seed,error\n";
    for (const auto& r : rows) {
        os << r.family_true << ',' << detail::format_double(r.param) << ',' << r.replicate << ','
           << r.family_hyp << ',' << detail::format_double(r.t_stat) << ','
           << detail::format_double(r.hypothesis_ce) << ',' << detail::format_double(r.true_ce)
           << ',' << detail::format_double(r.fitted_param) << ',' << r.seed << ',' << r.error
           << '\n';
    }
}

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << "# cegof summary v1\n";
    os << "param,family_hyp,mean_t,sd_t,correct_rate\n";
    for (const auto& r : rows) {
        os << detail::format_double(r.param) << ',' << r.family_hyp << ','
           << detail::format_double(r.mean_t) << ','
           << (r.sd_t ? detail::format_double(*r.sd_t) : std::string{}) << ','
           << detail::format_double(r.correct_rate) << '\n';
    }
}

}  // namespace cegof
