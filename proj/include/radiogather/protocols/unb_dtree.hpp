#pragma once

#include "../selectors.hpp"
#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace radiogather
{
    enum class NodePhase
    {
        Dormant,
        Active,
        SemiRetired,
        Retired,
    };

    inline std::string_view to_string(NodePhase p)
    {
        switch (p)
        {
        case NodePhase::Dormant: return "dormant";
        case NodePhase::Active: return "active";
        case NodePhase::SemiRetired: return "semi-retired";
        case NodePhase::Retired: return "retired";
        }
        return "?";
    }

    class MissingSelectiveFamily : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// Round layout after the n-step child-discovery preprocessing.
    /// Round s occupies steps offset + L*s .. offset + L*s + L-1; slot 0 is the RR step,
    /// slot 1 the All step, slot 2 (three-step rounds only) the Sel step.
    struct RoundSchedule
    {
        int steps_per_round = 2;
        std::int64_t offset = 0;

        std::int64_t round_of(std::int64_t t) const { return (t - offset) / steps_per_round; }
        int slot_of(std::int64_t t) const { return static_cast<int>((t - offset) % steps_per_round); }
        std::int64_t start_of(std::int64_t round) const { return offset + round * steps_per_round; }
    };

    /// Child discovery plus activation bookkeeping shared by the round-based protocols.
    ///
    /// During discovery (steps 0..n-1) the node with label l transmits alone in step l,
    /// so every node learns the labels of its children. Afterwards a node becomes active
    /// in the first round that starts after it has heard every child at least once.
    class ActivationTracker
    {
    public:
        ActivationTracker() = default;
        explicit ActivationTracker(int n) : n_(n), heard_(static_cast<std::size_t>(n), 0) {}

        /// Records the sender of one received message.
        void note(std::int64_t step, const Aux& aux)
        {
            if (!aux.sender) return;
            const int c = *aux.sender;
            if (step < n_)
            {
                children_.push_back(c);
            }
            else if (heard_[static_cast<std::size_t>(c)] == 0)
            {
                heard_[static_cast<std::size_t>(c)] = 1;
                ++heard_count_;
            }
        }

        /// Call at the first step of every round.
        bool try_activate(std::int64_t round)
        {
            if (!alpha_ && heard_count_ == static_cast<int>(children_.size()))
            {
                alpha_ = round;
                return true;
            }
            return false;
        }

        std::optional<std::int64_t> alpha() const noexcept { return alpha_; }
        const std::vector<Label>& children() const noexcept { return children_; }

        /// Lifecycle phase in a given round: active for `selective_rounds` rounds, then
        /// semi-retired until n rounds have passed since activation.
        NodePhase phase(std::int64_t round, int selective_rounds) const
        {
            if (!alpha_ || round < *alpha_) return NodePhase::Dormant;
            const std::int64_t k = round - *alpha_;
            if (k < selective_rounds) return NodePhase::Active;
            if (k < n_) return NodePhase::SemiRetired;
            return NodePhase::Retired;
        }

    private:
        int n_ = 0;
        std::vector<Label> children_;
        std::vector<std::uint8_t> heard_;
        int heard_count_ = 0;
        std::optional<std::int64_t> alpha_;
    };

    struct UnbDTreeConfig
    {
        int n = 0;
        int variant = 1; // 1: two-step rounds; 2: three-step rounds with selective family
        RoundSchedule schedule;
        int selective_rounds = 0; // rounds of All (and Sel) transmissions after activation
        SelectiveFamily family;   // variant 2 only
        std::vector<std::vector<int>> membership; // label -> indices j with label in F_j
    };

    class UnbDTreeNode : public NodeProtocol
    {
    public:
        UnbDTreeNode(const NodeContext& ctx, std::shared_ptr<const UnbDTreeConfig> cfg)
            : cfg_(std::move(cfg)), label_(ctx.label), tracker_(ctx.n), known_(std::make_shared<RumorSet>(ctx.n))
        {
            known_->insert(ctx.label);
        }

        std::optional<Message> act(const NodeView& view) override
        {
            cursor_.drain(view.inbox, [&](const Received& r) {
                absorb_shared(known_, r.message);
                tracker_.note(r.step, std::get<UnboundedMessage>(r.message).aux);
            });
            const std::int64_t t = view.time;
            const int n = cfg_->n;
            if (t < n)
            {
                return t == label_ ? std::optional<Message>(message()) : std::nullopt;
            }
            const auto& sch = cfg_->schedule;
            const std::int64_t s = sch.round_of(t);
            const int slot = sch.slot_of(t);
            if (slot == 0) tracker_.try_activate(s);
            if (!tracker_.alpha() || s < *tracker_.alpha()) return std::nullopt;
            const std::int64_t k = s - *tracker_.alpha();
            if (k >= n) return std::nullopt;

            bool fire = false;
            switch (slot)
            {
            case 0: fire = s % n == label_; break;
            case 1: fire = k < cfg_->selective_rounds; break;
            default:
                if (k < cfg_->selective_rounds)
                {
                    const auto& mine = cfg_->membership[static_cast<std::size_t>(label_)];
                    const int j = static_cast<int>(s % cfg_->family.m());
                    fire = std::binary_search(mine.begin(), mine.end(), j);
                }
                break;
            }
            return fire ? std::optional<Message>(message()) : std::nullopt;
        }

        std::unique_ptr<NodeProtocol> clone() const override
        {
            auto c = std::make_unique<UnbDTreeNode>(*this);
            c->known_ = std::make_shared<RumorSet>(*known_);
            return c;
        }

        std::optional<std::int64_t> alpha() const noexcept { return tracker_.alpha(); }
        NodePhase phase(std::int64_t round) const { return tracker_.phase(round, cfg_->selective_rounds); }
        const std::vector<Label>& children() const noexcept { return tracker_.children(); }
        const RumorSet& known() const { return *known_; }

    private:
        Message message() const { return UnboundedMessage{known_, Aux{label_, std::nullopt, std::nullopt}}; }

        std::shared_ptr<const UnbDTreeConfig> cfg_;
        Label label_;
        ActivationTracker tracker_;
        std::shared_ptr<RumorSet> known_;
        InboxCursor cursor_;
    };

    using UnbDTree = NodeFactoryProtocol<UnbDTreeNode, UnbDTreeConfig>;

    /// Smallest k with k^3 >= n.
    inline int ceil_cube_root(int n)
    {
        int k = std::max(1, static_cast<int>(std::cbrt(static_cast<double>(n))) - 1);
        while (static_cast<long long>(k) * k * k < n) ++k;
        return k;
    }

    inline std::vector<std::vector<int>> family_membership(const SelectiveFamily& f)
    {
        std::vector<std::vector<int>> member(static_cast<std::size_t>(f.n));
        for (int j = 0; j < f.m(); ++j)
        {
            for (int x : f.sets[static_cast<std::size_t>(j)])
            {
                member[static_cast<std::size_t>(x)].push_back(j);
            }
        }
        return member;
    }

    inline std::unique_ptr<UnbDTree> unb_dtree1(int n)
    {
        if (n < 1) throw std::invalid_argument("unb_dtree1: n >= 1 required");
        auto cfg = std::make_shared<UnbDTreeConfig>();
        cfg->n = n;
        cfg->variant = 1;
        cfg->schedule = RoundSchedule{2, n};
        cfg->selective_rounds = n;
        return std::make_unique<UnbDTree>("unb1", MessageClass::Unbounded, n, std::move(cfg));
    }

    /// Three-step-round variant driven by a strong selective family on [n] with at most n sets.
    inline std::unique_ptr<UnbDTree> unb_dtree2(int n, SelectiveFamily family)
    {
        if (n < 1) throw std::invalid_argument("unb_dtree2: n >= 1 required");
        if (family.n != n || family.sets.empty())
        {
            throw MissingSelectiveFamily("unb_dtree2: need a non-empty selective family on [" + std::to_string(n) + "]");
        }
        if (family.m() > n) family = singleton_family(n, family.k);
        auto cfg = std::make_shared<UnbDTreeConfig>();
        cfg->n = n;
        cfg->variant = 2;
        cfg->schedule = RoundSchedule{3, n};
        cfg->selective_rounds = family.m();
        cfg->membership = family_membership(family);
        cfg->family = std::move(family);
        return std::make_unique<UnbDTree>("unb2", MessageClass::Unbounded, n, std::move(cfg));
    }

    /// kappa defaults to ceil(n^(1/3)).
    inline std::unique_ptr<UnbDTree> unb_dtree2(int n, std::optional<int> kappa = std::nullopt, std::uint64_t family_seed = 0)
    {
        if (n < 1) throw std::invalid_argument("unb_dtree2: n >= 1 required");
        const int k = kappa.value_or(ceil_cube_root(n));
        if (k < 1 || k > n) throw std::invalid_argument("unb_dtree2: kappa must lie in [1, n]");
        return unb_dtree2(n, build_selective_family(n, k, family_seed));
    }
} // namespace radiogather
