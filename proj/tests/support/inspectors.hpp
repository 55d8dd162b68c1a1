#pragma once

// Whole-tree observers used by the unit and acceptance suites. They look at node states
// through the engine's observer hook; protocols never see any of this.

#include <radiogather/radiogather.hpp>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace rgtest
{
    using namespace radiogather;

    inline int phase_rank(NodePhase p)
    {
        switch (p)
        {
        case NodePhase::Retired: return 0;
        case NodePhase::SemiRetired: return 1;
        case NodePhase::Active: return 2;
        case NodePhase::Dormant: return 3;
        }
        return -1;
    }

    /// Checks, at the first step of every round, that phases along each leaf-to-root path
    /// read retired, semi-retired, active, dormant (ranks never decrease towards the
    /// root) and that every dormant node has an active or semi-retired descendant.
    class PhaseOrderInspector
    {
    public:
        PhaseOrderInspector(const Tree& tree, const UnbDTreeConfig& cfg) : tree_(&tree), cfg_(&cfg) {}

        StepObserver observer()
        {
            return [this](const StepRecord& rec, const SimulationView& sim) { inspect(rec, sim); };
        }

        int order_violations = 0;
        int dormant_violations = 0;
        int rounds_checked = 0;

    private:
        void inspect(const StepRecord& rec, const SimulationView& sim)
        {
            const auto& sch = cfg_->schedule;
            if (rec.step < sch.offset || sch.slot_of(rec.step) != 0) return;
            const std::int64_t s = sch.round_of(rec.step);
            const int n = tree_->size();
            std::vector<int> rank(static_cast<std::size_t>(n));
            for (NodeId v = 0; v < n; ++v)
            {
                const auto* node = dynamic_cast<const UnbDTreeNode*>(sim.states[static_cast<std::size_t>(v)].get());
                rank[static_cast<std::size_t>(v)] = phase_rank(node->phase(s));
            }
            // live[v]: some node in T_v is active or semi-retired
            std::vector<std::uint8_t> live(static_cast<std::size_t>(n), 0);
            for (NodeId v : tree_->bottom_up())
            {
                const auto r = rank[static_cast<std::size_t>(v)];
                if (r == 1 || r == 2) live[static_cast<std::size_t>(v)] = 1;
                if (!tree_->is_root(v))
                {
                    const auto p = static_cast<std::size_t>(tree_->parent(v));
                    if (r > rank[p]) ++order_violations;
                    live[p] = static_cast<std::uint8_t>(live[p] | live[static_cast<std::size_t>(v)]);
                }
            }
            for (NodeId v = 0; v < n; ++v)
            {
                if (rank[static_cast<std::size_t>(v)] != 3) continue;
                bool below = false;
                for (NodeId c : tree_->children(v)) below = below || live[static_cast<std::size_t>(c)] != 0;
                if (!below) ++dormant_violations;
            }
            ++rounds_checked;
        }

        const Tree* tree_;
        const UnbDTreeConfig* cfg_;
    };

    struct ActivationReport
    {
        int violations = 0;
        int never_activated = 0;
        std::int64_t worst_slack = 0; // max over v of alpha_v - 2 n height_2(v)
    };

    /// Runs unb1 and compares each activation round with 2 n height_2(v) + n.
    inline ActivationReport check_activation_bound(const Tree& tree, DuplexMode mode)
    {
        const int n = tree.size();
        const auto proto = unb_dtree1(n);
        const auto heights = gamma_heights(tree, 2);
        ActivationReport rep;
        rep.worst_slack = -1;
        std::vector<std::optional<std::int64_t>> alpha(static_cast<std::size_t>(n));
        RunOptions opt;
        opt.mode = mode;
        opt.max_steps = step_budget("unb1", n, mode);
        opt.stop_when_complete = false;
        opt.observer = [&](const StepRecord& rec, const SimulationView& sim) {
            if (rec.step + 1 != opt.max_steps) return;
            for (NodeId v = 0; v < n; ++v)
            {
                alpha[static_cast<std::size_t>(v)] =
                    dynamic_cast<const UnbDTreeNode*>(sim.states[static_cast<std::size_t>(v)].get())->alpha();
            }
        };
        run(*proto, tree, opt);
        for (NodeId v = 0; v < n; ++v)
        {
            const auto a = alpha[static_cast<std::size_t>(v)];
            if (!a)
            {
                ++rep.never_activated;
                continue;
            }
            const std::int64_t limit = 2LL * n * heights[v];
            rep.worst_slack = std::max(rep.worst_slack, *a - limit);
            if (*a > limit + n) ++rep.violations;
        }
        return rep;
    }

    /// Tracks the potential Phi over every maximal path of equal 2-height during the
    /// Stage All of its phase. Phi must never exceed 2n at the start and must drop by at
    /// least one per step (full duplex) or per two steps (half duplex) while positive.
    class PhiInspector
    {
    public:
        PhiInspector(const Tree& tree, const BndDTreeConfig& cfg) : tree_(&tree), cfg_(&cfg)
        {
            const auto h2 = gamma_heights(tree, 2);
            for (NodeId v = 0; v < tree.size(); ++v)
            {
                bool initial = true;
                for (NodeId c : tree.children(v)) initial = initial && h2[c] != h2[v];
                if (!initial) continue;
                std::vector<NodeId> path{v};
                NodeId u = v;
                while (!tree.is_root(u) && h2[tree.parent(u)] == h2[v])
                {
                    u = tree.parent(u);
                    path.push_back(u);
                }
                if (path.size() >= 2) paths_[h2[v]].push_back(std::move(path));
            }
            for (const auto& [h, ps] : paths_) series_[h].assign(ps.size(), {});
        }

        StepObserver observer()
        {
            return [this](const StepRecord& rec, const SimulationView& sim) { inspect(rec.step, sim); };
        }

        /// Number of windows in which Phi failed to decrease, plus start values above 2n.
        int violations() const
        {
            const int stride = cfg_->mode == DuplexMode::Half ? 2 : 1;
            int bad = 0;
            for (const auto& [h, per_path] : series_)
            {
                for (const auto& s : per_path)
                {
                    if (!s.empty() && s.front() > 2LL * cfg_->n) ++bad;
                    for (std::size_t i = 0; i + stride < s.size(); ++i)
                    {
                        if (s[i] > 0 && s[i + stride] >= s[i]) ++bad;
                    }
                }
            }
            return bad;
        }

        /// Paths whose potential did not reach zero by the end of Stage All.
        int unfinished() const
        {
            int bad = 0;
            for (const auto& [h, per_path] : series_)
            {
                for (const auto& s : per_path) bad += !s.empty() && s.back() != 0 ? 1 : 0;
            }
            return bad;
        }

        int windows_checked() const
        {
            int total = 0;
            for (const auto& [h, per_path] : series_)
            {
                for (const auto& s : per_path) total += static_cast<int>(s.size());
            }
            return total;
        }

        std::int64_t max_initial() const
        {
            std::int64_t m = 0;
            for (const auto& [h, per_path] : series_)
            {
                for (const auto& s : per_path) m = std::max(m, s.empty() ? 0 : s.front());
            }
            return m;
        }

    private:
        void inspect(std::int64_t t, const SimulationView& sim)
        {
            for (const auto& [h, ps] : paths_)
            {
                const std::int64_t start = cfg_->stage_all_start(h);
                // Phi after step start-1 is the value at the beginning of the stage.
                if (t < start - 1 || t >= start + cfg_->stage_all_length()) continue;
                for (std::size_t k = 0; k < ps.size(); ++k)
                {
                    series_[h][k].push_back(phi(ps[k], sim));
                }
            }
        }

        std::int64_t phi(const std::vector<NodeId>& path, const SimulationView& sim) const
        {
            std::int64_t total = 0;
            bool started = false;
            for (std::size_t i = 0; i + 1 < path.size(); ++i)
            {
                const auto v = static_cast<std::size_t>(path[i]);
                const auto* node = dynamic_cast<const BndDTreeNode*>(sim.states[v].get());
                const int phi_i = node->untransmitted_count(sim.inboxes[v]);
                if (!started && phi_i == 0) continue;
                started = true;
                total += std::max(phi_i, 1);
            }
            return total;
        }

        const Tree* tree_;
        const BndDTreeConfig* cfg_;
        std::map<int, std::vector<std::vector<NodeId>>> paths_;
        std::map<int, std::vector<std::vector<std::int64_t>>> series_;
    };

    /// Delivered rumors as a sorted list, for comparison with the oracle.
    inline std::vector<Rumor> all_rumors(int n)
    {
        std::vector<Rumor> out(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
        return out;
    }
} // namespace rgtest
