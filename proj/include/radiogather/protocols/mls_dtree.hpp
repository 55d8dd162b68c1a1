#pragma once

#include "../selectors.hpp"
#include "common.hpp"

#include <algorithm>

namespace radiogather
{
    struct MlsDTreeConfig
    {
        int n = 0;
        Disperser disperser; // always holds at least one set
        int batch_size = 1;  // m, at least 1
        long long phase_length = 0; // s' = s + n

        /// Worst-case completion: ceil(n / m) phases of s' steps.
        long long bound() const { return (static_cast<long long>(n) + batch_size - 1) / batch_size * phase_length; }

        bool fires(Label label, std::int64_t t) const
        {
            const long long q = label / batch_size;
            const auto& set = disperser.sets[static_cast<std::size_t>(label % batch_size)];
            const std::int64_t tau = t - q * phase_length;
            return tau >= 0 && tau < disperser.s && std::binary_search(set.begin(), set.end(), tau);
        }
    };

    /// Oblivious fire-and-forward. Batches of m consecutive labels take turns, one phase
    /// of s' steps each; the j-th node of a batch fires at the times of the j-th disperser
    /// set. A node forwards what it received in the previous step, unless it is scheduled
    /// to fire, in which case it stays silent.
    class MlsDTreeNode : public NodeProtocol
    {
    public:
        MlsDTreeNode(const NodeContext& ctx, std::shared_ptr<const MlsDTreeConfig> cfg)
            : cfg_(std::move(cfg)), label_(ctx.label)
        {
        }

        std::optional<Message> act(const NodeView& view) override
        {
            const bool scheduled = cfg_->fires(label_, view.time);
            if (const Message* prev = view.previous_step_message())
            {
                if (scheduled) return std::nullopt;
                return FnfMessage{std::get<FnfMessage>(*prev).rumor};
            }
            if (scheduled) return FnfMessage{label_};
            return std::nullopt;
        }

        std::unique_ptr<NodeProtocol> clone() const override { return std::make_unique<MlsDTreeNode>(*this); }

    private:
        std::shared_ptr<const MlsDTreeConfig> cfg_;
        Label label_;
    };

    using MlsDTree = NodeFactoryProtocol<MlsDTreeNode, MlsDTreeConfig>;

    /// Batch size and set family for n labels. The disperser formula gives zero sets for
    /// the smallest primes; one set is always enough for batches of a single node.
    inline MlsDTreeConfig mls_config(int n, DuplexMode mode)
    {
        if (n < 1) throw std::invalid_argument("mls_dtree: n >= 1 required");
        MlsDTreeConfig cfg;
        cfg.n = n;
        cfg.disperser = build_disperser(std::max(n, 2), mode);
        if (cfg.disperser.m == 0)
        {
            std::vector<long long> d1;
            for (int x = 0; x < cfg.disperser.p; ++x)
            {
                d1.push_back(disperser_value(cfg.disperser.p, 1, x));
            }
            std::sort(d1.begin(), d1.end());
            cfg.disperser.sets = {d1};
            cfg.disperser.m = 1;
        }
        cfg.batch_size = cfg.disperser.m;
        cfg.phase_length = cfg.disperser.s + n;
        return cfg;
    }

    inline std::unique_ptr<MlsDTree> mls_dtree(int n, DuplexMode mode)
    {
        return std::make_unique<MlsDTree>("mls", MessageClass::FireAndForward, n,
                                          std::make_shared<const MlsDTreeConfig>(mls_config(n, mode)));
    }
} // namespace radiogather
