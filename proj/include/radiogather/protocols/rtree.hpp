#pragma once

#include "common.hpp"

#include <random>

namespace radiogather
{
    struct RTreeConfig
    {
        int n = 0;
    };

    /// Randomized fire-and-forward that never looks at its label: every step a node
    /// decides to fire with probability 1/n. It fires when it decided to and received
    /// nothing in the previous step, and forwards when it did not decide to but did
    /// receive a rumor.
    class RTreeNode : public NodeProtocol
    {
    public:
        RTreeNode(const NodeContext& ctx, std::shared_ptr<const RTreeConfig> cfg)
            : own_(ctx.label), rng_(ctx.stream_seed), decide_(1.0 / std::max(1, cfg->n))
        {
        }

        std::optional<Message> act(const NodeView& view) override
        {
            const bool decided = decide_(rng_);
            const Message* prev = view.previous_step_message();
            if (prev)
            {
                if (decided) return std::nullopt;
                return FnfMessage{std::get<FnfMessage>(*prev).rumor};
            }
            if (decided) return FnfMessage{own_};
            return std::nullopt;
        }

        std::unique_ptr<NodeProtocol> clone() const override { return std::make_unique<RTreeNode>(*this); }

    private:
        Rumor own_;
        std::mt19937_64 rng_;
        std::bernoulli_distribution decide_;
    };

    using RTree = NodeFactoryProtocol<RTreeNode, RTreeConfig>;

    inline std::unique_ptr<RTree> rtree(int n)
    {
        if (n < 1) throw std::invalid_argument("rtree: n >= 1 required");
        return std::make_unique<RTree>("rtree", MessageClass::FireAndForward, n,
                                       std::make_shared<const RTreeConfig>(RTreeConfig{n}));
    }
} // namespace radiogather
