#pragma once

#include "protocols/registry.hpp"
#include "trees.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace radiogather
{
    struct ScalingTrial
    {
        int n = 0;
        int trial = 0;
        std::uint64_t tree_seed = 0;
        std::uint64_t run_seed = 0;
        std::int64_t completion = 0;
        bool complete = false;
    };

    struct ScalingRow
    {
        int n = 0;
        double mean_steps = 0;
        std::int64_t max_steps = 0;
        double bound_ratio = 0;
    };

    struct ScalingResult
    {
        std::string protocol;
        std::vector<ScalingRow> rows;
        std::vector<ScalingTrial> trials;
    };

    /// The running-time claim for each protocol, used for bound_ratio. `scale` is the
    /// fitted constant for the protocols whose claim is only asymptotic (unb2, bnd).
    inline double claimed_bound(std::string_view id, int n, DuplexMode mode, double scale = 1.0)
    {
        const double x = n;
        const double log2n = n > 1 ? std::log2(x) : 0.0;
        if (id == "rr-unb" || id == "rr-bnd") return x * x;
        if (id == "unb1") return 4 * x * (log2n + 1) + x;
        if (id == "unb2") return scale * x;
        if (id == "bnd") return scale * x * std::max(log2n, 1.0);
        if (id == "mls") return static_cast<double>(mls_config(n, mode).bound());
        if (id == "rtree") return 4 * x * std::max(std::log(x), 1.0);
        throw UnknownProtocol("unknown protocol '" + std::string(id) + "'");
    }

    inline bool bound_needs_fit(std::string_view id) { return id == "unb2" || id == "bnd"; }

    /// Least-squares slope of log y against log x.
    inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
    {
        if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 paired points");
        const auto k = static_cast<double>(x.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            const double lx = std::log(x[i]);
            const double ly = std::log(y[i]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        return (k * sxy - sx * sy) / (k * sxx - sx * sx);
    }

    /// Runs `trials` random recursive trees (random labels) per size. Seeds of tree and run
    /// are derived from (seed, n, trial) and recorded per trial so any row can be replayed.
    inline ScalingResult run_scaling(std::string_view id, const std::vector<int>& sizes, int trials, std::uint64_t seed,
                                     const ProtocolOptions& options = {})
    {
        if (trials < 1) throw std::invalid_argument("run_scaling: trials >= 1 required");
        ScalingResult result;
        result.protocol = std::string(id);
        double scale = 1.0;
        for (std::size_t si = 0; si < sizes.size(); ++si)
        {
            const int n = sizes[si];
            const auto proto = make_protocol(id, n, options);
            RunOptions opt;
            opt.mode = options.mode;
            opt.max_steps = step_budget(id, n, options.mode);
            std::int64_t sum = 0;
            std::int64_t worst = 0;
            for (int k = 0; k < trials; ++k)
            {
                ScalingTrial tr;
                tr.n = n;
                tr.trial = k;
                tr.tree_seed = derive_seed(seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(2 * k));
                tr.run_seed = derive_seed(seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(2 * k + 1));
                const Tree tree = shuffle_labels(make_random_tree(n, tr.tree_seed), tr.tree_seed ^ 0x5bd1e995ULL);
                opt.seed = tr.run_seed;
                const Trace trace = run(*proto, tree, opt);
                tr.complete = trace.complete();
                tr.completion = trace.completion_step.value_or(trace.steps_executed);
                sum += tr.completion;
                worst = std::max(worst, tr.completion);
                result.trials.push_back(tr);
            }
            ScalingRow row;
            row.n = n;
            row.mean_steps = static_cast<double>(sum) / trials;
            row.max_steps = worst;
            if (si == 0 && bound_needs_fit(id))
            {
                scale = static_cast<double>(worst) / claimed_bound(id, n, options.mode, 1.0);
            }
            row.bound_ratio = static_cast<double>(worst) / claimed_bound(id, n, options.mode, scale);
            result.rows.push_back(row);
        }
        return result;
    }

    inline void write_scaling_csv(std::ostream& out, const ScalingResult& r)
    {
        out << "n,mean_steps,max_steps,bound_ratio\n";
        for (const auto& row : r.rows)
        {
            out << row.n << ',' << row.mean_steps << ',' << row.max_steps << ',' << row.bound_ratio << '\n';
        }
    }

    inline void write_scaling_trials_csv(std::ostream& out, const ScalingResult& r)
    {
        out << "n,trial,tree_seed,run_seed,completion_step,complete\n";
        for (const auto& t : r.trials)
        {
            out << t.n << ',' << t.trial << ',' << t.tree_seed << ',' << t.run_seed << ',' << t.completion << ','
                << (t.complete ? 1 : 0) << '\n';
        }
    }
} // namespace radiogather
