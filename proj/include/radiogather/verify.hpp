#pragma once

#include "protocols/registry.hpp"
#include "protocols/schedule.hpp"
#include "trees.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <variant>
#include <vector>

namespace radiogather
{
    class NotOblivious : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // ----------------------------------------------------------- schedule extraction

    namespace detail
    {
        inline Message probe_message(MessageClass cls, Rumor r, int n)
        {
            switch (cls)
            {
            case MessageClass::Unbounded:
            {
                auto set = std::make_shared<RumorSet>(n);
                set->insert(r);
                return UnboundedMessage{std::move(set), Aux{}};
            }
            case MessageClass::Bounded: return BoundedMessage{r, Aux{}};
            case MessageClass::FireAndForward: break;
            }
            return FnfMessage{r};
        }

        inline std::optional<Rumor> single_rumor(const Message& m)
        {
            std::optional<Rumor> out;
            int count = 0;
            for_each_rumor(m, [&](Rumor x) {
                out = x;
                ++count;
            });
            if (count != 1) return std::nullopt;
            return out;
        }
    } // namespace detail

    /// Replays every label's state machine on an all-silent history for T steps and
    /// records when it fires. At each step a copy of the state is also shown a foreign
    /// rumor received in the previous step: an oblivious fire-and-forward node must then
    /// stay silent if it was about to fire, and forward that rumor otherwise.
    inline FiringSchedule extract_schedule(const Protocol& protocol, int n, std::int64_t T)
    {
        if (n < 1 || T < 0) throw std::invalid_argument("extract_schedule: n >= 1 and T >= 0 required");
        FiringSchedule sched;
        sched.n = n;
        sched.T = T;
        sched.F.assign(static_cast<std::size_t>(n), {});
        const std::vector<Received> silent;
        for (Label l = 0; l < n; ++l)
        {
            auto state = protocol.instantiate(NodeContext{l, n, derive_seed(0, static_cast<std::uint64_t>(l))});
            const Rumor foreign = (l + 1) % n;
            for (std::int64_t t = 0; t < T; ++t)
            {
                std::unique_ptr<NodeProtocol> probe;
                if (n > 1 && t > 0) probe = state->clone();

                const auto action = state->act(NodeView{l, n, t, silent, l});
                bool fires = false;
                if (action)
                {
                    const auto r = detail::single_rumor(*action);
                    if (!r || *r != l)
                    {
                        throw NotOblivious(std::string(protocol.id()) + ": label " + std::to_string(l) +
                                           " transmitted something other than its own rumor on a silent history");
                    }
                    fires = true;
                    sched.F[static_cast<std::size_t>(l)].push_back(t);
                }
                if (probe)
                {
                    const std::vector<Received> inbox{Received{t - 1, detail::probe_message(protocol.message_class(), foreign, n)}};
                    const auto reaction = probe->act(NodeView{l, n, t, inbox, l});
                    const auto r = reaction ? detail::single_rumor(*reaction) : std::nullopt;
                    const bool ok = fires ? !reaction : (reaction && r && *r == foreign);
                    if (!ok)
                    {
                        throw NotOblivious(std::string(protocol.id()) + ": label " + std::to_string(l) + " at step " +
                                           std::to_string(t) + " does not follow the oblivious fire-and-forward rule");
                    }
                }
            }
        }
        return sched;
    }

    // ------------------------------------------------------------- adversary search

    struct MatchedFiring
    {
        std::int64_t time = 0;  // firing time of the victim
        Label blocker = 0;
        int offset = 0;         // blocker fires at time + offset, on spine node n + offset
    };

    struct CaterpillarWitness
    {
        Label victim = 0;
        std::vector<MatchedFiring> matching;
        Tree tree;
    };

    inline nlohmann::json to_json(const CaterpillarWitness& w)
    {
        nlohmann::json matching = nlohmann::json::array();
        for (const auto& m : w.matching)
        {
            matching.push_back({{"time", m.time}, {"blocker", m.blocker}, {"offset", m.offset}});
        }
        return {{"victim", w.victim},
                {"matching", matching},
                {"tree", {{"n", w.tree.size()}, {"parents", w.tree.parents()}, {"labels", w.tree.labels()}}}};
    }

    /// Maximum bipartite matching by augmenting paths. adj[i] lists right vertices of left i.
    /// Returns, for every left vertex, its matched right vertex or -1.
    inline std::vector<int> max_bipartite_matching(const std::vector<std::vector<int>>& adj, int right_count)
    {
        std::vector<int> left_of(static_cast<std::size_t>(right_count), -1);
        std::vector<int> right_of(adj.size(), -1);
        std::vector<std::uint8_t> seen;
        std::function<bool(int)> augment = [&](int i) {
            for (int r : adj[static_cast<std::size_t>(i)])
            {
                if (seen[static_cast<std::size_t>(r)]) continue;
                seen[static_cast<std::size_t>(r)] = 1;
                const int other = left_of[static_cast<std::size_t>(r)];
                if (other < 0 || augment(other))
                {
                    left_of[static_cast<std::size_t>(r)] = i;
                    right_of[static_cast<std::size_t>(i)] = r;
                    return true;
                }
            }
            return false;
        };
        for (int i = 0; i < static_cast<int>(adj.size()); ++i)
        {
            seen.assign(static_cast<std::size_t>(right_count), 0);
            augment(i);
        }
        return right_of;
    }

    /// Caterpillar on 2n nodes for a victim and its matched blockers: leaves 0..n-1 carry
    /// the schedule labels, spine nodes n..2n-1 carry labels n..2n-1 (deepest first, root
    /// 2n-1). The victim hangs off spine node n, each blocker off n + offset, and every
    /// other leaf off the root.
    inline Tree caterpillar_for(int n, Label victim, const std::vector<MatchedFiring>& matching)
    {
        std::vector<int> offsets(static_cast<std::size_t>(n), n - 1);
        offsets[static_cast<std::size_t>(victim)] = 0;
        for (const auto& m : matching)
        {
            offsets[static_cast<std::size_t>(m.blocker)] = m.offset;
        }
        return make_caterpillar(n, offsets);
    }

    /// True when running the schedule on the tree never delivers the victim's rumor.
    inline bool victim_blocked(const FiringSchedule& sched, const Tree& tree, Label victim,
                               DuplexMode mode = DuplexMode::Full)
    {
        const auto proto = schedule_protocol(sched, tree.size());
        RunOptions opt;
        opt.mode = mode;
        opt.max_steps = sched.T + 2LL * tree.size() + 1;
        const auto trace = run(*proto, tree, opt);
        return !trace.delivery[static_cast<std::size_t>(victim)].has_value();
    }

    /// Looks for a label w whose every firing can be matched to a distinct other label
    /// firing 0..n-1 steps later. Such a matching places each blocker on the spine where
    /// it collides with w's rumor. Every candidate is re-checked by simulation; the first
    /// confirmed witness is returned.
    inline std::optional<CaterpillarWitness> find_caterpillar_witness(const FiringSchedule& sched)
    {
        const int n = sched.n;
        if (n < 2) throw std::invalid_argument("find_caterpillar_witness: n >= 2 required");
        for (Label w = 0; w < n; ++w)
        {
            const auto& firings = sched.F[static_cast<std::size_t>(w)];
            if (static_cast<int>(firings.size()) > n - 1) continue;
            std::vector<std::vector<int>> adj(firings.size());
            for (std::size_t i = 0; i < firings.size(); ++i)
            {
                for (Label u = 0; u < n; ++u)
                {
                    if (u == w) continue;
                    const auto& fu = sched.F[static_cast<std::size_t>(u)];
                    const auto it = std::lower_bound(fu.begin(), fu.end(), firings[i]);
                    if (it != fu.end() && *it - firings[i] <= n - 1) adj[i].push_back(u);
                }
            }
            const auto match = max_bipartite_matching(adj, n);
            if (std::find(match.begin(), match.end(), -1) != match.end()) continue;

            std::vector<MatchedFiring> matching;
            for (std::size_t i = 0; i < firings.size(); ++i)
            {
                const Label u = match[i];
                const auto& fu = sched.F[static_cast<std::size_t>(u)];
                const auto it = std::lower_bound(fu.begin(), fu.end(), firings[i]);
                matching.push_back(MatchedFiring{firings[i], u, static_cast<int>(*it - firings[i])});
            }
            Tree tree = caterpillar_for(n, w, matching);
            if (victim_blocked(sched, tree, w))
            {
                return CaterpillarWitness{w, std::move(matching), std::move(tree)};
            }
        }
        return std::nullopt;
    }

    /// Every label fires exactly once, at a uniform time in [0, T).
    inline FiringSchedule random_single_firing_schedule(int n, std::int64_t T, std::uint64_t seed)
    {
        if (n < 1 || T < 1) throw std::invalid_argument("random schedule: n, T >= 1 required");
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::int64_t> pick(0, T - 1);
        FiringSchedule s{n, T, {}};
        for (int l = 0; l < n; ++l)
        {
            s.F.push_back({pick(rng)});
        }
        return s;
    }

    inline FiringSchedule all_fire_at_zero_schedule(int n)
    {
        FiringSchedule s{n, 1, {}};
        s.F.assign(static_cast<std::size_t>(n), std::vector<std::int64_t>{0});
        return s;
    }

    // ------------------------------------------------------------------ star trials

    /// T = ceil(c n ln n) split into ceil(c ln2 ln n) intervals of length ceil(n / ln 2);
    /// each leaf transmits at one uniform time per interval.
    struct IntervalDistribution
    {
        double c = 1.0;
    };

    /// Each of T steps chosen independently with probability p.
    struct IidDistribution
    {
        double p = 0.0;
        std::int64_t T = 0;
    };

    /// Any per-leaf sampler of transmission times.
    struct CustomDistribution
    {
        std::function<std::vector<std::int64_t>(std::mt19937_64&)> sample;
    };

    using StarDistribution = std::variant<IntervalDistribution, IidDistribution, CustomDistribution>;

    struct IntervalLayout
    {
        std::int64_t horizon = 0;
        std::int64_t intervals = 0;
        std::int64_t length = 0;
    };

    inline IntervalLayout interval_layout(double c, int n)
    {
        const double ln_n = std::log(static_cast<double>(n));
        return IntervalLayout{static_cast<std::int64_t>(std::ceil(c * n * ln_n)),
                              std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(c * std::numbers::ln2 * ln_n))),
                              static_cast<std::int64_t>(std::ceil(n / std::numbers::ln2))};
    }

    inline std::vector<std::int64_t> sample_transmissions(const StarDistribution& dist, int n, std::mt19937_64& rng)
    {
        std::vector<std::int64_t> times;
        if (const auto* iv = std::get_if<IntervalDistribution>(&dist))
        {
            const auto lay = interval_layout(iv->c, n);
            std::uniform_int_distribution<std::int64_t> within(0, lay.length - 1);
            for (std::int64_t k = 0; k < lay.intervals; ++k)
            {
                times.push_back(k * lay.length + within(rng));
            }
        }
        else if (const auto* iid = std::get_if<IidDistribution>(&dist))
        {
            std::bernoulli_distribution pick(iid->p);
            for (std::int64_t t = 0; t < iid->T; ++t)
            {
                if (pick(rng)) times.push_back(t);
            }
        }
        else
        {
            times = std::get<CustomDistribution>(dist).sample(rng);
        }
        return times;
    }

    /// Star with n leaves, every leaf drawing its transmission times independently from
    /// the same distribution. A leaf succeeds iff at some step it transmits alone.
    inline std::vector<bool> star_protocol_trial(const StarDistribution& dist, int n, std::uint64_t seed)
    {
        if (n < 2) throw std::invalid_argument("star_protocol_trial: n >= 2 required");
        std::vector<std::vector<std::int64_t>> times(static_cast<std::size_t>(n));
        std::unordered_map<std::int64_t, int> count;
        for (int leaf = 0; leaf < n; ++leaf)
        {
            std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(leaf)));
            auto& tv = times[static_cast<std::size_t>(leaf)];
            tv = sample_transmissions(dist, n, rng);
            std::sort(tv.begin(), tv.end());
            tv.erase(std::unique(tv.begin(), tv.end()), tv.end());
            for (auto t : tv) ++count[t];
        }
        std::vector<bool> success(static_cast<std::size_t>(n), false);
        for (int leaf = 0; leaf < n; ++leaf)
        {
            for (auto t : times[static_cast<std::size_t>(leaf)])
            {
                if (count[t] == 1)
                {
                    success[static_cast<std::size_t>(leaf)] = true;
                    break;
                }
            }
        }
        return success;
    }

    /// One interval of the INTERVAL protocol seen by a fixed leaf: true when none of the
    /// other n - 1 leaves picks its slot.
    inline bool interval_slot_alone(int n, std::mt19937_64& rng)
    {
        const auto len = static_cast<std::int64_t>(std::ceil(n / std::numbers::ln2));
        std::uniform_int_distribution<std::int64_t> within(0, len - 1);
        const auto mine = within(rng);
        for (int other = 1; other < n; ++other)
        {
            if (within(rng) == mine) return false;
        }
        return true;
    }

    inline double interval_slot_alone_probability(int n)
    {
        const double len = std::ceil(n / std::numbers::ln2);
        return std::pow(1.0 - 1.0 / len, n - 1);
    }

    // ---------------------------------------------------------------------- oracle

    /// Rumors the bounded round-robin protocol gathers on this tree (all of them on any
    /// tree, since it is collision-free there).
    inline std::vector<Rumor> delivery_oracle(const Tree& tree)
    {
        const auto proto = round_robin_bounded(tree.size());
        RunOptions opt;
        opt.max_steps = static_cast<std::int64_t>(tree.size()) * tree.size() + 1;
        return run(*proto, tree, opt).delivered_set();
    }
} // namespace radiogather
