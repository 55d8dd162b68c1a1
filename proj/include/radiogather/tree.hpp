#pragma once

#include "rumor_set.hpp"

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace radiogather
{
    using NodeId = int;
    using Label = int;

    class TreeError : public std::invalid_argument
    {
    public:
        enum class Kind
        {
            CycleDetected,
            MultipleRoots,
            UnreachableNode,
            LabelsNotBijective,
            EmptyTree,
            MalformedInput,
        };

        TreeError(Kind kind, const std::string& what) : std::invalid_argument(what), kind_(kind) {}

        Kind kind() const noexcept { return kind_; }

    private:
        Kind kind_;
    };

    /// Rooted tree with edges directed towards the root, plus a node -> label bijection.
    ///
    /// Node ids are positions in the parent array. The root is its own parent.
    /// Protocol code never sees this type; only the engine and analysis tools do.
    class Tree
    {
    public:
        int size() const noexcept { return static_cast<int>(parent_.size()); }
        NodeId root() const noexcept { return root_; }
        NodeId parent(NodeId v) const { return parent_[static_cast<std::size_t>(v)]; }
        bool is_root(NodeId v) const noexcept { return v == root_; }
        Label label(NodeId v) const { return label_[static_cast<std::size_t>(v)]; }
        NodeId node_of_label(Label l) const { return node_of_label_[static_cast<std::size_t>(l)]; }
        int depth(NodeId v) const { return depth_[static_cast<std::size_t>(v)]; }
        std::span<const NodeId> children(NodeId v) const
        {
            const auto b = child_offset_[static_cast<std::size_t>(v)];
            const auto e = child_offset_[static_cast<std::size_t>(v) + 1];
            return {child_list_.data() + b, child_list_.data() + e};
        }
        bool is_leaf(NodeId v) const { return children(v).empty(); }

        const std::vector<NodeId>& parents() const noexcept { return parent_; }
        const std::vector<Label>& labels() const noexcept { return label_; }

        /// Nodes ordered so that every child precedes its parent.
        const std::vector<NodeId>& bottom_up() const noexcept { return bottom_up_; }

        int max_depth() const
        {
            return depth_.empty() ? 0 : *std::max_element(depth_.begin(), depth_.end());
        }

        friend bool operator==(const Tree& a, const Tree& b)
        {
            return a.parent_ == b.parent_ && a.label_ == b.label_;
        }

        friend Tree build_tree(std::vector<NodeId> parents, std::optional<std::vector<Label>> labels,
                               std::uint64_t label_seed);

    private:
        std::vector<NodeId> parent_;
        std::vector<Label> label_;
        std::vector<NodeId> node_of_label_;
        std::vector<int> depth_;
        std::vector<std::size_t> child_offset_;
        std::vector<NodeId> child_list_;
        std::vector<NodeId> bottom_up_;
        NodeId root_ = 0;
    };

    /// Validates a parent array and builds a Tree.
    ///
    /// The root is the unique node whose parent is itself or -1. When labels are absent a
    /// permutation drawn from label_seed is assigned.
    inline Tree build_tree(std::vector<NodeId> parents, std::optional<std::vector<Label>> labels = std::nullopt,
                           std::uint64_t label_seed = 0)
    {
        const int n = static_cast<int>(parents.size());
        if (n == 0)
        {
            throw TreeError(TreeError::Kind::EmptyTree, "tree must have at least one node");
        }

        std::optional<NodeId> root;
        for (NodeId v = 0; v < n; ++v)
        {
            auto& p = parents[static_cast<std::size_t>(v)];
            if (p == -1)
            {
                p = v;
            }
            if (p < 0 || p >= n)
            {
                throw TreeError(TreeError::Kind::UnreachableNode,
                                "node " + std::to_string(v) + " has out-of-range parent " + std::to_string(p));
            }
            if (p == v)
            {
                if (root)
                {
                    throw TreeError(TreeError::Kind::MultipleRoots,
                                    "nodes " + std::to_string(*root) + " and " + std::to_string(v) + " are both roots");
                }
                root = v;
            }
        }
        if (!root)
        {
            throw TreeError(TreeError::Kind::CycleDetected, "no root: every node lies on a parent cycle");
        }

        // 0 = unvisited, 1 = on current walk, 2 = known to reach the root
        std::vector<std::uint8_t> state(static_cast<std::size_t>(n), 0);
        state[static_cast<std::size_t>(*root)] = 2;
        std::vector<NodeId> walk;
        for (NodeId start = 0; start < n; ++start)
        {
            walk.clear();
            NodeId v = start;
            while (state[static_cast<std::size_t>(v)] == 0)
            {
                state[static_cast<std::size_t>(v)] = 1;
                walk.push_back(v);
                v = parents[static_cast<std::size_t>(v)];
            }
            if (state[static_cast<std::size_t>(v)] == 1)
            {
                throw TreeError(TreeError::Kind::CycleDetected,
                                "parent cycle through node " + std::to_string(v));
            }
            for (NodeId w : walk)
            {
                state[static_cast<std::size_t>(w)] = 2;
            }
        }

        std::vector<Label> label;
        if (labels)
        {
            label = std::move(*labels);
            if (static_cast<int>(label.size()) != n)
            {
                throw TreeError(TreeError::Kind::LabelsNotBijective, "label count differs from node count");
            }
        }
        else
        {
            label.resize(static_cast<std::size_t>(n));
            std::iota(label.begin(), label.end(), 0);
            std::mt19937_64 rng(label_seed);
            std::shuffle(label.begin(), label.end(), rng);
        }
        std::vector<NodeId> node_of_label(static_cast<std::size_t>(n), -1);
        for (NodeId v = 0; v < n; ++v)
        {
            const Label l = label[static_cast<std::size_t>(v)];
            if (l < 0 || l >= n || node_of_label[static_cast<std::size_t>(l)] != -1)
            {
                throw TreeError(TreeError::Kind::LabelsNotBijective,
                                "labels are not a permutation of 0.." + std::to_string(n - 1));
            }
            node_of_label[static_cast<std::size_t>(l)] = v;
        }

        Tree t;
        t.root_ = *root;
        t.parent_ = std::move(parents);
        t.label_ = std::move(label);
        t.node_of_label_ = std::move(node_of_label);

        std::vector<std::size_t> degree(static_cast<std::size_t>(n) + 1, 0);
        for (NodeId v = 0; v < n; ++v)
        {
            if (v != t.root_)
            {
                ++degree[static_cast<std::size_t>(t.parent_[static_cast<std::size_t>(v)])];
            }
        }
        t.child_offset_.assign(static_cast<std::size_t>(n) + 1, 0);
        for (NodeId v = 0; v < n; ++v)
        {
            t.child_offset_[static_cast<std::size_t>(v) + 1] =
                t.child_offset_[static_cast<std::size_t>(v)] + degree[static_cast<std::size_t>(v)];
        }
        t.child_list_.assign(static_cast<std::size_t>(n) - 1, 0);
        std::vector<std::size_t> fill(t.child_offset_.begin(), t.child_offset_.end() - 1);
        for (NodeId v = 0; v < n; ++v)
        {
            if (v != t.root_)
            {
                const auto p = static_cast<std::size_t>(t.parent_[static_cast<std::size_t>(v)]);
                t.child_list_[fill[p]++] = v;
            }
        }

        // BFS from the root gives depths; reversing the order gives children before parents.
        t.depth_.assign(static_cast<std::size_t>(n), 0);
        std::vector<NodeId> order;
        order.reserve(static_cast<std::size_t>(n));
        order.push_back(t.root_);
        for (std::size_t i = 0; i < order.size(); ++i)
        {
            const NodeId v = order[i];
            for (NodeId c : t.children(v))
            {
                t.depth_[static_cast<std::size_t>(c)] = t.depth_[static_cast<std::size_t>(v)] + 1;
                order.push_back(c);
            }
        }
        t.bottom_up_.assign(order.rbegin(), order.rend());
        return t;
    }

    /// Same shape, labels replaced by a seeded random permutation.
    inline Tree shuffle_labels(const Tree& t, std::uint64_t seed)
    {
        return build_tree(t.parents(), std::nullopt, seed);
    }

    inline Tree with_labels(const Tree& t, std::vector<Label> labels)
    {
        return build_tree(t.parents(), std::move(labels));
    }

    inline int subtree_size(const Tree& t, NodeId v)
    {
        int count = 0;
        std::vector<NodeId> stack{v};
        while (!stack.empty())
        {
            const NodeId u = stack.back();
            stack.pop_back();
            ++count;
            for (NodeId c : t.children(u))
            {
                stack.push_back(c);
            }
        }
        return count;
    }

    // Parent-array text format: line 0 is n, then n parent lines (the root names itself),
    // then n label lines.

    inline void write_tree_text(std::ostream& out, const Tree& t)
    {
        out << t.size() << '\n';
        for (NodeId p : t.parents())
        {
            out << p << '\n';
        }
        for (Label l : t.labels())
        {
            out << l << '\n';
        }
    }

    inline Tree read_tree_text(std::istream& in)
    {
        long long n = 0;
        if (!(in >> n) || n <= 0 || n > (1LL << 26))
        {
            throw TreeError(TreeError::Kind::MalformedInput, "tree file: bad node count");
        }
        std::vector<NodeId> parents(static_cast<std::size_t>(n));
        for (auto& p : parents)
        {
            if (!(in >> p))
            {
                throw TreeError(TreeError::Kind::MalformedInput, "tree file: truncated parent list");
            }
        }
        std::vector<Label> labels(static_cast<std::size_t>(n));
        for (auto& l : labels)
        {
            if (!(in >> l))
            {
                throw TreeError(TreeError::Kind::MalformedInput, "tree file: truncated label list");
            }
        }
        return build_tree(std::move(parents), std::move(labels));
    }
} // namespace radiogather
