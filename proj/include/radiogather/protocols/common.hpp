#pragma once

#include "../engine.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <utility>

namespace radiogather
{
    /// Protocol whose node states are all built by one factory callable.
    template <typename Node, typename Config>
    class NodeFactoryProtocol : public Protocol
    {
    public:
        NodeFactoryProtocol(std::string id, MessageClass cls, int n, std::shared_ptr<const Config> config)
            : id_(std::move(id)), class_(cls), n_(n), config_(std::move(config))
        {
        }

        std::string_view id() const override { return id_; }
        MessageClass message_class() const override { return class_; }
        int node_count() const override { return n_; }

        std::unique_ptr<NodeProtocol> instantiate(const NodeContext& ctx) const override
        {
            return std::make_unique<Node>(ctx, config_);
        }

        const Config& config() const noexcept { return *config_; }

    private:
        std::string id_;
        MessageClass class_;
        int n_;
        std::shared_ptr<const Config> config_;
    };

    /// Adds the rumors of m to a set that may be shared with messages already sent;
    /// copies before writing when needed. Returns true when something was new.
    inline bool absorb_shared(std::shared_ptr<RumorSet>& set, const Message& m)
    {
        bool changed = false;
        auto writable = [&]() -> RumorSet& {
            if (!changed && set.use_count() > 1) set = std::make_shared<RumorSet>(*set);
            changed = true;
            return *set;
        };
        if (const auto* u = std::get_if<UnboundedMessage>(&m))
        {
            if (u->rumors && !u->rumors->is_subset_of(*set)) writable().merge(*u->rumors);
        }
        else
        {
            for_each_rumor(m, [&](Rumor x) {
                if (!set->contains(x)) writable().insert(x);
            });
        }
        return changed;
    }

    /// Tracks how much of a node's inbox has already been absorbed.
    class InboxCursor
    {
    public:
        template <typename F>
        void drain(std::span<const Received> inbox, F&& f)
        {
            for (; seen_ < inbox.size(); ++seen_)
            {
                f(inbox[seen_]);
            }
        }

        std::span<const Received> unread(std::span<const Received> inbox) const { return inbox.subspan(seen_); }

    private:
        std::size_t seen_ = 0;
    };
} // namespace radiogather
