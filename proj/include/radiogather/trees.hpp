#pragma once

#include "tree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace radiogather
{
    class EmptyResult : public std::out_of_range
    {
    public:
        using std::out_of_range::out_of_range;
    };

    class InvalidOffset : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// gamma-height of every node. A leaf has height 0; an internal node whose children
    /// reach maximum g gets g+1 when at least gamma children attain g, else g.
    /// gamma = 1 gives the ordinary height; gamma = 2 is the Strahler number.
    struct GammaHeights
    {
        int gamma = 1;
        std::vector<int> heights; // indexed by node id

        int operator[](NodeId v) const { return heights[static_cast<std::size_t>(v)]; }
    };

    inline GammaHeights gamma_heights(const Tree& tree, int gamma)
    {
        if (gamma < 1)
        {
            throw std::invalid_argument("gamma_heights: gamma >= 1 required");
        }
        GammaHeights out{gamma, std::vector<int>(static_cast<std::size_t>(tree.size()), 0)};
        for (NodeId v : tree.bottom_up())
        {
            const auto kids = tree.children(v);
            if (kids.empty())
            {
                continue;
            }
            int g = 0;
            int attaining = 0;
            for (NodeId c : kids)
            {
                const int hc = out[c];
                if (hc > g)
                {
                    g = hc;
                    attaining = 1;
                }
                else if (hc == g)
                {
                    ++attaining;
                }
            }
            out.heights[static_cast<std::size_t>(v)] = attaining >= gamma ? g + 1 : g;
        }
        return out;
    }

    /// gamma-depth: the root's gamma-height.
    inline int gamma_depth(const Tree& tree, int gamma) { return gamma_heights(tree, gamma)[tree.root()]; }

    /// An induced subtree with the map back to the original node ids. Labels are the
    /// ranks of the original labels, so they again form a permutation of [size).
    struct Subtree
    {
        Tree tree;
        std::vector<NodeId> to_original;
    };

    /// The subtree induced by nodes whose gamma-height is at least h. Heights are
    /// non-decreasing towards the root, so this is connected and keeps the root.
    inline Subtree subtree_above(const Tree& tree, int gamma, int h)
    {
        const auto heights = gamma_heights(tree, gamma);
        if (h < 0 || h > heights[tree.root()])
        {
            throw EmptyResult("subtree_above: h=" + std::to_string(h) + " exceeds the gamma-depth " +
                              std::to_string(heights[tree.root()]));
        }
        std::vector<NodeId> kept;
        std::vector<NodeId> new_id(static_cast<std::size_t>(tree.size()), -1);
        for (NodeId v = 0; v < tree.size(); ++v)
        {
            if (heights[v] >= h)
            {
                new_id[static_cast<std::size_t>(v)] = static_cast<NodeId>(kept.size());
                kept.push_back(v);
            }
        }
        std::vector<NodeId> parents(kept.size());
        std::vector<Label> old_labels(kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i)
        {
            parents[i] = new_id[static_cast<std::size_t>(tree.parent(kept[i]))];
            old_labels[i] = tree.label(kept[i]);
        }
        std::vector<std::size_t> order(kept.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return old_labels[a] < old_labels[b]; });
        std::vector<Label> labels(kept.size());
        for (std::size_t rank = 0; rank < order.size(); ++rank)
        {
            labels[order[rank]] = static_cast<Label>(rank);
        }
        return Subtree{build_tree(std::move(parents), std::move(labels)), std::move(kept)};
    }

    // Generators. Node ids double as labels unless noted; use shuffle_labels() to
    // randomize the labeling.

    /// Path rooted at node 0; node i hangs below node i-1.
    inline Tree make_path(int n)
    {
        if (n < 1) throw std::invalid_argument("make_path: n >= 1 required");
        std::vector<NodeId> parents(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
        {
            parents[static_cast<std::size_t>(i)] = i == 0 ? 0 : i - 1;
        }
        std::vector<Label> labels(static_cast<std::size_t>(n));
        std::iota(labels.begin(), labels.end(), 0);
        return build_tree(std::move(parents), std::move(labels));
    }

    /// Root 0 with n-1 leaves.
    inline Tree make_star(int n)
    {
        if (n < 1) throw std::invalid_argument("make_star: n >= 1 required");
        std::vector<NodeId> parents(static_cast<std::size_t>(n), 0);
        std::vector<Label> labels(static_cast<std::size_t>(n));
        std::iota(labels.begin(), labels.end(), 0);
        return build_tree(std::move(parents), std::move(labels));
    }

    /// Caterpillar on 2n nodes: spine nodes n..2n-1 run from the deepest (n) to the root
    /// (2n-1); leaf i in [0, n) hangs off spine node n + offsets[i].
    inline Tree make_caterpillar(int n, std::span<const int> offsets)
    {
        if (n < 1) throw std::invalid_argument("make_caterpillar: n >= 1 required");
        if (static_cast<int>(offsets.size()) != n)
        {
            throw InvalidOffset("make_caterpillar: need exactly one offset per leaf");
        }
        std::vector<NodeId> parents(static_cast<std::size_t>(2 * n));
        for (int i = 0; i < n; ++i)
        {
            const int off = offsets[static_cast<std::size_t>(i)];
            if (off < 0 || off > n - 1)
            {
                throw InvalidOffset("make_caterpillar: offset " + std::to_string(off) + " outside [0, " +
                                    std::to_string(n - 1) + "]");
            }
            parents[static_cast<std::size_t>(i)] = n + off;
        }
        for (int k = n; k < 2 * n; ++k)
        {
            parents[static_cast<std::size_t>(k)] = k == 2 * n - 1 ? k : k + 1;
        }
        std::vector<Label> labels(static_cast<std::size_t>(2 * n));
        std::iota(labels.begin(), labels.end(), 0);
        return build_tree(std::move(parents), std::move(labels));
    }

    /// Complete k-ary tree with `depth` edge levels, nodes in heap order.
    inline Tree make_complete_kary(int k, int depth)
    {
        if (k < 1 || depth < 0) throw std::invalid_argument("make_complete_kary: k >= 1, depth >= 0 required");
        long long count = 0;
        long long level = 1;
        for (int d = 0; d <= depth; ++d)
        {
            count += level;
            level *= k;
            if (count > (1LL << 24)) throw std::invalid_argument("make_complete_kary: tree too large");
        }
        std::vector<NodeId> parents(static_cast<std::size_t>(count));
        for (long long i = 0; i < count; ++i)
        {
            parents[static_cast<std::size_t>(i)] = i == 0 ? 0 : static_cast<NodeId>((i - 1) / k);
        }
        std::vector<Label> labels(static_cast<std::size_t>(count));
        std::iota(labels.begin(), labels.end(), 0);
        return build_tree(std::move(parents), std::move(labels));
    }

    /// First n nodes of the infinite k-ary heap: complete except for the last level.
    inline Tree make_kary_heap(int k, int n)
    {
        if (k < 1 || n < 1) throw std::invalid_argument("make_kary_heap: k, n >= 1 required");
        std::vector<NodeId> parents(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
        {
            parents[static_cast<std::size_t>(i)] = i == 0 ? 0 : (i - 1) / k;
        }
        std::vector<Label> labels(static_cast<std::size_t>(n));
        std::iota(labels.begin(), labels.end(), 0);
        return build_tree(std::move(parents), std::move(labels));
    }

    /// Random recursive tree: node i > 0 picks a uniform parent among 0..i-1.
    inline Tree make_random_tree(int n, std::uint64_t seed)
    {
        if (n < 1) throw std::invalid_argument("make_random_tree: n >= 1 required");
        std::mt19937_64 rng(seed);
        std::vector<NodeId> parents(static_cast<std::size_t>(n));
        parents[0] = 0;
        for (int i = 1; i < n; ++i)
        {
            parents[static_cast<std::size_t>(i)] = std::uniform_int_distribution<int>(0, i - 1)(rng);
        }
        std::vector<Label> labels(static_cast<std::size_t>(n));
        std::iota(labels.begin(), labels.end(), 0);
        return build_tree(std::move(parents), std::move(labels));
    }

    /// Families used by the CLI and the sweeps: "path", "star", "caterpillar", "kary3",
    /// "random". Labels are always a seeded random permutation.
    ///
    /// The sized caterpillar has a spine of n - n/2 nodes (top is the root) and n/2 leaves
    /// hung off uniformly chosen spine nodes.
    inline Tree make_family_tree(std::string_view family, int n, std::uint64_t seed)
    {
        if (n < 1) throw std::invalid_argument("tree family: n >= 1 required");
        std::vector<NodeId> parents;
        if (family == "path")
        {
            parents = make_path(n).parents();
        }
        else if (family == "star")
        {
            parents = make_star(n).parents();
        }
        else if (family == "caterpillar")
        {
            const int leaves = n / 2;
            const int spine = n - leaves;
            parents.resize(static_cast<std::size_t>(n));
            for (int i = 0; i < spine; ++i) parents[static_cast<std::size_t>(i)] = i == 0 ? 0 : i - 1;
            std::mt19937_64 rng(seed ^ 0xc2b2ae3d27d4eb4fULL);
            std::uniform_int_distribution<int> pick(0, spine - 1);
            for (int i = spine; i < n; ++i) parents[static_cast<std::size_t>(i)] = pick(rng);
        }
        else if (family == "kary3")
        {
            parents = make_kary_heap(3, n).parents();
        }
        else if (family == "random")
        {
            parents = make_random_tree(n, seed).parents();
        }
        else
        {
            throw std::invalid_argument("unknown tree family '" + std::string(family) + "'");
        }
        return build_tree(std::move(parents), std::nullopt, seed);
    }

    inline constexpr std::array<std::string_view, 5> tree_families{"path", "star", "caterpillar", "kary3", "random"};

    struct LemmaViolations
    {
        int depth_bound = 0;   // D_gamma > log_gamma n
        int subtree_size = 0;  // |T_v| < gamma^height
        int height_shift = 0;  // height in the subtree above h differs from height - h
        int checked_nodes = 0;

        int total() const noexcept { return depth_bound + subtree_size + height_shift; }
    };

    /// Checks the structural lemmas on one tree. The depth and size bounds are only
    /// claimed for 2 <= gamma <= n-1 and are skipped outside that range.
    inline LemmaViolations check_structural_lemmas(const Tree& tree, int gamma)
    {
        LemmaViolations out;
        const int n = tree.size();
        const auto heights = gamma_heights(tree, gamma);
        const int depth = heights[tree.root()];
        if (gamma >= 2 && gamma <= n - 1)
        {
            if (depth > std::log(static_cast<double>(n)) / std::log(static_cast<double>(gamma)) + 1e-9) ++out.depth_bound;
            std::vector<long long> size(static_cast<std::size_t>(n), 1);
            for (NodeId v : tree.bottom_up())
            {
                if (!tree.is_root(v)) size[static_cast<std::size_t>(tree.parent(v))] += size[static_cast<std::size_t>(v)];
                long double power = 1;
                for (int i = 0; i < heights[v]; ++i) power *= gamma;
                if (static_cast<long double>(size[static_cast<std::size_t>(v)]) < power) ++out.subtree_size;
            }
        }
        for (int h = 0; h <= depth; ++h)
        {
            const auto sub = subtree_above(tree, gamma, h);
            const auto sub_heights = gamma_heights(sub.tree, gamma);
            for (NodeId v = 0; v < sub.tree.size(); ++v)
            {
                ++out.checked_nodes;
                if (sub_heights[v] != heights[sub.to_original[static_cast<std::size_t>(v)]] - h) ++out.height_shift;
            }
        }
        return out;
    }
} // namespace radiogather
