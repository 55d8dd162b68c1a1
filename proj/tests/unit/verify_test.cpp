#include "support/inspectors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace radiogather;
using namespace rgtest;

namespace
{
    // Largest matching by trying every injective assignment (small sizes only).
    int brute_matching(const std::vector<std::vector<int>>& adj, std::size_t i, std::vector<bool>& used)
    {
        if (i == adj.size()) return 0;
        int best = brute_matching(adj, i + 1, used);
        for (int r : adj[i])
        {
            if (used[static_cast<std::size_t>(r)]) continue;
            used[static_cast<std::size_t>(r)] = true;
            best = std::max(best, 1 + brute_matching(adj, i + 1, used));
            used[static_cast<std::size_t>(r)] = false;
        }
        return best;
    }
} // namespace

TEST(Matching, AgreesWithExhaustiveSearch)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 300; ++trial)
    {
        const int left = 1 + static_cast<int>(rng() % 6);
        const int right = 1 + static_cast<int>(rng() % 6);
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(left));
        for (auto& row : adj)
        {
            for (int r = 0; r < right; ++r)
            {
                if (rng() % 3 == 0) row.push_back(r);
            }
        }
        const auto match = max_bipartite_matching(adj, right);
        ASSERT_EQ(match.size(), adj.size());
        int size = 0;
        std::vector<bool> taken(static_cast<std::size_t>(right), false);
        for (std::size_t i = 0; i < match.size(); ++i)
        {
            if (match[i] < 0) continue;
            ++size;
            ASSERT_TRUE(std::find(adj[i].begin(), adj[i].end(), match[i]) != adj[i].end());
            ASSERT_FALSE(taken[static_cast<std::size_t>(match[i])]);
            taken[static_cast<std::size_t>(match[i])] = true;
        }
        std::vector<bool> used(static_cast<std::size_t>(right), false);
        ASSERT_EQ(size, brute_matching(adj, 0, used));
    }
}

TEST(ScheduleExtraction, MlsScheduleEqualsItsFiringRule)
{
    for (int n : {2, 9, 30})
    {
        const auto proto = mls_dtree(n, DuplexMode::Full);
        const auto& cfg = proto->config();
        const auto sched = extract_schedule(*proto, n, cfg.bound());
        for (Label l = 0; l < n; ++l)
        {
            std::vector<std::int64_t> expect;
            for (std::int64_t t = 0; t < cfg.bound(); ++t)
            {
                if (cfg.fires(l, t)) expect.push_back(t);
            }
            EXPECT_EQ(sched.F[static_cast<std::size_t>(l)], expect);
        }
    }
}

TEST(ScheduleExtraction, RejectsNonObliviousProtocols)
{
    EXPECT_THROW(extract_schedule(*round_robin_bounded(6), 6, 20), NotOblivious);
    EXPECT_THROW(extract_schedule(*round_robin_unbounded(6), 6, 20), NotOblivious);
    EXPECT_NO_THROW(extract_schedule(*rtree(6), 6, 50));
}

TEST(Caterpillar, AllFireAtZeroIsBeaten)
{
    const auto sched = all_fire_at_zero_schedule(8);
    const auto w = find_caterpillar_witness(sched);
    ASSERT_TRUE(w);
    EXPECT_EQ(w->tree.size(), 16);
    EXPECT_TRUE(victim_blocked(sched, w->tree, w->victim));
    // The victim hangs off the deepest spine node.
    EXPECT_EQ(w->tree.parent(w->tree.node_of_label(w->victim)), 8);
    for (const auto& m : w->matching) EXPECT_EQ(m.offset, 0);
}

TEST(Caterpillar, TreeLayout)
{
    const Tree t = caterpillar_for(4, 1, {MatchedFiring{3, 2, 2}});
    EXPECT_EQ(t.size(), 8);
    EXPECT_EQ(t.root(), 7);
    EXPECT_EQ(t.parent(1), 4);
    EXPECT_EQ(t.parent(2), 6);
    EXPECT_EQ(t.parent(0), 7);
    EXPECT_EQ(t.parent(3), 7);
}

TEST(Caterpillar, CorrectProtocolsHaveNoWitness)
{
    for (int n : {2, 5, 16})
    {
        const auto proto = mls_dtree(n, DuplexMode::Full);
        EXPECT_FALSE(find_caterpillar_witness(extract_schedule(*proto, n, proto->config().bound())));
    }
    // Every label firing in n spread-out steps cannot be covered by n - 1 blockers.
    FiringSchedule sched{3, 30, {{0, 10, 20}, {1, 11, 21}, {2, 12, 22}}};
    EXPECT_FALSE(find_caterpillar_witness(sched));
    EXPECT_THROW(find_caterpillar_witness(FiringSchedule{1, 1, {{0}}}), std::invalid_argument);
}

TEST(Caterpillar, RandomSingleFiringSchedulesUsuallyLose)
{
    int found = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed)
    {
        const auto sched = random_single_firing_schedule(16, 16, seed);
        for (const auto& f : sched.F)
        {
            ASSERT_EQ(f.size(), 1u);
            ASSERT_LT(f[0], 16);
        }
        found += find_caterpillar_witness(sched) ? 1 : 0;
    }
    EXPECT_GE(found, 32);
}

TEST(StarTrials, IntervalLayout)
{
    const auto lay = interval_layout(2.0, 100);
    EXPECT_EQ(lay.horizon, static_cast<std::int64_t>(std::ceil(200 * std::log(100.0))));
    EXPECT_EQ(lay.intervals, static_cast<std::int64_t>(std::ceil(2 * std::log(2.0) * std::log(100.0))));
    EXPECT_EQ(lay.length, static_cast<std::int64_t>(std::ceil(100 / std::log(2.0))));

    std::mt19937_64 rng(1);
    const auto times = sample_transmissions(IntervalDistribution{2.0}, 100, rng);
    ASSERT_EQ(static_cast<std::int64_t>(times.size()), lay.intervals);
    for (std::size_t k = 0; k < times.size(); ++k)
    {
        EXPECT_GE(times[k], static_cast<std::int64_t>(k) * lay.length);
        EXPECT_LT(times[k], static_cast<std::int64_t>(k + 1) * lay.length);
    }
}

TEST(StarTrials, SuccessMeansTransmittingAlone)
{
    // Two leaves that always pick the same single step never succeed; distinct steps always do.
    const CustomDistribution same{[](std::mt19937_64&) { return std::vector<std::int64_t>{4}; }};
    const auto fail = star_protocol_trial(same, 2, 1);
    EXPECT_EQ(fail, (std::vector<bool>{false, false}));
    const auto all_steps = star_protocol_trial(IidDistribution{1.0, 3}, 3, 1);
    EXPECT_EQ(all_steps, (std::vector<bool>{false, false, false}));
    EXPECT_THROW(star_protocol_trial(same, 1, 1), std::invalid_argument);
}

TEST(StarTrials, SlotAloneProbability)
{
    const int n = 64;
    const double len = std::ceil(n / std::log(2.0));
    EXPECT_DOUBLE_EQ(interval_slot_alone_probability(n), std::pow((len - 1) / len, n - 1));
    std::mt19937_64 rng(8);
    const int samples = 40000;
    int alone = 0;
    for (int i = 0; i < samples; ++i) alone += interval_slot_alone(n, rng) ? 1 : 0;
    const double p = interval_slot_alone_probability(n);
    EXPECT_NEAR(alone / static_cast<double>(samples), p, 4 * std::sqrt(p * (1 - p) / samples));
}

TEST(RTreeStar, PerStepDeliveryMatchesExhaustiveProbability)
{
    // Star with n nodes: in a step t >= n the root hears a fixed leaf iff that leaf fires
    // and none of the other n - 2 leaves does. Exhaustive sum over all leaf decisions.
    const int n = 6;
    const double q = 1.0 / n;
    double exact = 0;
    for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask)
    {
        double pr = 1;
        for (int leaf = 0; leaf < n - 1; ++leaf) pr *= (mask >> leaf & 1u) ? q : 1 - q;
        if (mask == 1u) exact += pr;
    }
    EXPECT_NEAR(exact, q * std::pow(1 - q, n - 2), 1e-15);

    const Tree star = make_star(n);
    const Rumor watched = star.label(1);
    const auto proto = rtree(n);
    std::int64_t hits = 0;
    std::int64_t samples = 0;
    RunOptions opt;
    opt.seed = 12;
    opt.max_steps = 60000;
    opt.stop_when_complete = false;
    opt.observer = [&](const StepRecord& rec, const SimulationView&) {
        if (rec.step < n) return;
        ++samples;
        for (const auto& [node, msg] : rec.receptions)
        {
            if (star.is_root(node) && carries(msg, watched)) ++hits;
        }
    };
    run(*proto, star, opt);
    const double emp = static_cast<double>(hits) / static_cast<double>(samples);
    EXPECT_NEAR(emp, exact, 4 * std::sqrt(exact * (1 - exact) / static_cast<double>(samples)));
}

TEST(Oracle, GathersEverything)
{
    for (auto family : tree_families)
    {
        const Tree t = make_family_tree(family, 33, 4);
        EXPECT_EQ(delivery_oracle(t), all_rumors(33));
    }
}

TEST(Scaling, SlopeOfPowerLaw)
{
    std::vector<double> x{10, 20, 40, 80};
    std::vector<double> y;
    for (double v : x) y.push_back(3 * v * v);
    EXPECT_NEAR(loglog_slope(x, y), 2.0, 1e-12);
    EXPECT_THROW(loglog_slope({1.0}, {1.0}), std::invalid_argument);
}

TEST(Scaling, RowsAndReplaySeeds)
{
    const auto r = run_scaling("rr-bnd", {8, 16}, 3, 5);
    ASSERT_EQ(r.rows.size(), 2u);
    ASSERT_EQ(r.trials.size(), 6u);
    for (const auto& row : r.rows)
    {
        EXPECT_LE(row.max_steps, static_cast<std::int64_t>(row.n) * row.n);
        EXPECT_LE(row.mean_steps, static_cast<double>(row.max_steps));
        EXPECT_LE(row.bound_ratio, 1.0);
    }
    const auto again = run_scaling("rr-bnd", {8, 16}, 3, 5);
    for (std::size_t i = 0; i < r.trials.size(); ++i) EXPECT_EQ(r.trials[i].completion, again.trials[i].completion);
}
