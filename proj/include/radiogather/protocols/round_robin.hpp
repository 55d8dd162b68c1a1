#pragma once

#include "common.hpp"

namespace radiogather
{
    struct RoundRobinConfig
    {
        int n = 0;
    };

    /// Label t mod n transmits everything it has collected.
    class RoundRobinUnboundedNode : public NodeProtocol
    {
    public:
        RoundRobinUnboundedNode(const NodeContext& ctx, std::shared_ptr<const RoundRobinConfig>)
            : label_(ctx.label), n_(ctx.n), known_(std::make_shared<RumorSet>(ctx.n))
        {
            known_->insert(ctx.label);
        }

        std::optional<Message> act(const NodeView& view) override
        {
            cursor_.drain(view.inbox, [&](const Received& r) { absorb_shared(known_, r.message); });
            if (view.time % n_ != label_) return std::nullopt;
            return UnboundedMessage{known_, Aux{}};
        }

        std::unique_ptr<NodeProtocol> clone() const override
        {
            auto c = std::make_unique<RoundRobinUnboundedNode>(*this);
            c->known_ = std::make_shared<RumorSet>(*known_);
            return c;
        }

        const RumorSet& known() const { return *known_; }

    private:
        Label label_;
        int n_;
        std::shared_ptr<RumorSet> known_;
        InboxCursor cursor_;
    };

    /// In step t every holder of rumor t mod n transmits it, once per holder.
    class RoundRobinBoundedNode : public NodeProtocol
    {
    public:
        RoundRobinBoundedNode(const NodeContext& ctx, std::shared_ptr<const RoundRobinConfig>)
            : n_(ctx.n), held_(ctx.n), sent_(ctx.n)
        {
            held_.insert(ctx.label);
        }

        std::optional<Message> act(const NodeView& view) override
        {
            cursor_.drain(view.inbox, [&](const Received& r) { for_each_rumor(r.message, [&](Rumor x) { held_.insert(x); }); });
            const auto u = static_cast<Rumor>(view.time % n_);
            if (!held_.contains(u) || sent_.contains(u)) return std::nullopt;
            sent_.insert(u);
            return BoundedMessage{u, Aux{}};
        }

        std::unique_ptr<NodeProtocol> clone() const override { return std::make_unique<RoundRobinBoundedNode>(*this); }

        const RumorSet& held() const noexcept { return held_; }

    private:
        int n_;
        RumorSet held_;
        RumorSet sent_;
        InboxCursor cursor_;
    };

    using RoundRobinUnbounded = NodeFactoryProtocol<RoundRobinUnboundedNode, RoundRobinConfig>;
    using RoundRobinBounded = NodeFactoryProtocol<RoundRobinBoundedNode, RoundRobinConfig>;

    inline std::unique_ptr<Protocol> round_robin_unbounded(int n)
    {
        return std::make_unique<RoundRobinUnbounded>("rr-unb", MessageClass::Unbounded, n,
                                                     std::make_shared<const RoundRobinConfig>(RoundRobinConfig{n}));
    }

    inline std::unique_ptr<Protocol> round_robin_bounded(int n)
    {
        return std::make_unique<RoundRobinBounded>("rr-bnd", MessageClass::Bounded, n,
                                                   std::make_shared<const RoundRobinConfig>(RoundRobinConfig{n}));
    }
} // namespace radiogather
