#pragma once

#include "unb_dtree.hpp"

#include <bit>
#include <deque>
#include <unordered_map>

namespace radiogather
{
    inline int floor_log2(std::int64_t x) { return x <= 1 ? 0 : static_cast<int>(std::bit_width(static_cast<std::uint64_t>(x)) - 1); }
    inline int ceil_log2(std::int64_t x) { return x <= 1 ? 0 : static_cast<int>(std::bit_width(static_cast<std::uint64_t>(x - 1))); }

    /// Rounds of height-computing preprocessing. A non-root node of 2-height h is active
    /// by round (n - 1) + (3n - 2) h, and non-root heights never exceed floor(log2(n - 1)).
    inline std::int64_t bnd_preprocessing_rounds(int n)
    {
        if (n < 2) return 0;
        return static_cast<std::int64_t>(n) + static_cast<std::int64_t>(3 * n - 2) * floor_log2(n - 1);
    }

    struct BndDTreeConfig
    {
        int n = 0;
        DuplexMode mode = DuplexMode::Full;
        RoundSchedule schedule;           // preprocessing rounds
        std::int64_t preprocessing_rounds = 0;
        std::int64_t phases_start = 0;    // first step of phase 0
        std::int64_t phase_length = 0;    // 3n full duplex, 6n half duplex
        int phase_count = 0;              // ceil(log2 n) + 1
        SelectiveFamily family;
        std::vector<std::vector<int>> membership;

        /// Step at which Stage All of phase h starts, and its length.
        std::int64_t stage_all_start(int h) const
        {
            return phases_start + phase_length * h + (mode == DuplexMode::Half ? n : 0);
        }
        std::int64_t stage_all_length() const { return mode == DuplexMode::Half ? 4LL * n : 2LL * n; }
        std::int64_t total_steps() const { return phases_start + phase_length * phase_count; }
    };

    class BndDTreeNode : public NodeProtocol
    {
    public:
        BndDTreeNode(const NodeContext& ctx, std::shared_ptr<const BndDTreeConfig> cfg)
            : cfg_(std::move(cfg)), label_(ctx.label), tracker_(ctx.n), held_(ctx.n), sent_(ctx.n)
        {
            held_.insert(label_);
            queue_.push_back(label_);
        }

        std::optional<Message> act(const NodeView& view) override
        {
            const std::int64_t t = view.time;
            bool relay_token = false;
            cursor_.drain(view.inbox, [&](const Received& r) {
                const auto& b = std::get<BoundedMessage>(r.message);
                if (held_.insert(b.rumor)) queue_.push_back(b.rumor);
                if (r.step < cfg_->phases_start)
                {
                    tracker_.note(r.step, b.aux);
                    if (b.aux.sender && b.aux.height && r.step >= cfg_->n)
                    {
                        child_height_[*b.aux.sender] = *b.aux.height;
                    }
                }
                else if (b.aux.parity && height_ && b.aux.height == height_ && r.step == t - 1)
                {
                    parity_ = *b.aux.parity ? 0 : 1;
                    relay_token = true;
                }
            });

            const int n = cfg_->n;
            if (t < n)
            {
                if (t != label_) return std::nullopt;
                return send(label_, Aux{label_, std::nullopt, std::nullopt});
            }
            if (t < cfg_->phases_start) return preprocessing_step(t);

            const std::int64_t rel = t - cfg_->phases_start;
            const std::int64_t h = rel / cfg_->phase_length;
            std::int64_t off = rel % cfg_->phase_length;
            if (!height_ || *height_ != h) return std::nullopt;

            if (cfg_->mode == DuplexMode::Half)
            {
                if (off < n)
                {
                    if (off == 0 && !has_same_height_child_)
                    {
                        parity_ = 0;
                        return send(label_, Aux{std::nullopt, height_, false});
                    }
                    if (relay_token) return send(label_, Aux{std::nullopt, height_, *parity_ == 1});
                    return std::nullopt;
                }
                off -= n;
                if (off < 4LL * n)
                {
                    if (!parity_ || off % 2 != *parity_) return std::nullopt;
                    return stage_all();
                }
                return stage_rr(static_cast<Rumor>(off - 4LL * n));
            }
            if (off < 2LL * n) return stage_all();
            return stage_rr(static_cast<Rumor>(off - 2LL * n));
        }

        std::unique_ptr<NodeProtocol> clone() const override { return std::make_unique<BndDTreeNode>(*this); }

        std::optional<int> height() const noexcept { return height_; }
        bool has_same_height_child() const noexcept { return has_same_height_child_; }
        std::optional<int> parity() const noexcept { return parity_; }
        std::optional<std::int64_t> alpha() const noexcept { return tracker_.alpha(); }
        const RumorSet& held() const noexcept { return held_; }

        /// Rumors this node holds, or has in its unread inbox, that it has not transmitted yet.
        int untransmitted_count(std::span<const Received> inbox) const
        {
            int count = 0;
            for (Rumor r : queue_)
            {
                count += sent_.contains(r) ? 0 : 1;
            }
            RumorSet fresh(held_.universe());
            for (const auto& r : cursor_.unread(inbox))
            {
                for_each_rumor(r.message, [&](Rumor x) {
                    if (!held_.contains(x) && fresh.insert(x)) ++count;
                });
            }
            return count;
        }

    private:
        std::optional<Message> preprocessing_step(std::int64_t t)
        {
            const auto& sch = cfg_->schedule;
            const std::int64_t s = sch.round_of(t);
            const int slot = sch.slot_of(t);
            if (slot == 0 && tracker_.try_activate(s)) compute_height();
            if (!tracker_.alpha() || s < *tracker_.alpha()) return std::nullopt;
            const std::int64_t k = s - *tracker_.alpha();
            const int n = cfg_->n;
            if (k >= n) return std::nullopt;
            bool fire = false;
            switch (slot)
            {
            case 0: fire = s % n == label_; break;
            case 1: fire = k < cfg_->family.m(); break;
            default:
                if (k < cfg_->family.m())
                {
                    const auto& mine = cfg_->membership[static_cast<std::size_t>(label_)];
                    fire = std::binary_search(mine.begin(), mine.end(), static_cast<int>(s % cfg_->family.m()));
                }
                break;
            }
            if (!fire) return std::nullopt;
            return send(label_, Aux{label_, height_, std::nullopt});
        }

        void compute_height()
        {
            int g = 0;
            int attaining = 0;
            for (Label c : tracker_.children())
            {
                const auto it = child_height_.find(c);
                const int hc = it == child_height_.end() ? 0 : it->second;
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
            height_ = tracker_.children().empty() ? 0 : (attaining >= 2 ? g + 1 : g);
            has_same_height_child_ = false;
            for (Label c : tracker_.children())
            {
                const auto it = child_height_.find(c);
                if (it != child_height_.end() && it->second == *height_) has_same_height_child_ = true;
            }
        }

        std::optional<Message> stage_all()
        {
            while (!queue_.empty() && sent_.contains(queue_.front())) queue_.pop_front();
            if (queue_.empty()) return std::nullopt;
            const Rumor r = queue_.front();
            queue_.pop_front();
            return send(r, Aux{});
        }

        std::optional<Message> stage_rr(Rumor u)
        {
            if (!held_.contains(u)) return std::nullopt;
            return send(u, Aux{});
        }

        Message send(Rumor r, Aux aux)
        {
            sent_.insert(r);
            return BoundedMessage{r, aux};
        }

        std::shared_ptr<const BndDTreeConfig> cfg_;
        Label label_;
        ActivationTracker tracker_;
        std::unordered_map<Label, int> child_height_;
        std::optional<int> height_;
        bool has_same_height_child_ = false;
        std::optional<int> parity_;
        RumorSet held_;
        RumorSet sent_;
        std::deque<Rumor> queue_; // received rumors in arrival order
        InboxCursor cursor_;
    };

    using BndDTree = NodeFactoryProtocol<BndDTreeNode, BndDTreeConfig>;

    inline std::unique_ptr<BndDTree> bnd_dtree(int n, DuplexMode mode, std::optional<int> kappa = std::nullopt,
                                               std::uint64_t family_seed = 0)
    {
        if (n < 1) throw std::invalid_argument("bnd_dtree: n >= 1 required");
        const int k = kappa.value_or(ceil_cube_root(n));
        if (k < 1 || k > n) throw std::invalid_argument("bnd_dtree: kappa must lie in [1, n]");
        auto family = build_selective_family(n, k, family_seed);
        if (family.m() > n) family = singleton_family(n, k);

        auto cfg = std::make_shared<BndDTreeConfig>();
        cfg->n = n;
        cfg->mode = mode;
        cfg->schedule = RoundSchedule{3, n};
        cfg->preprocessing_rounds = bnd_preprocessing_rounds(n);
        cfg->phases_start = n + 3 * cfg->preprocessing_rounds;
        cfg->phase_length = (mode == DuplexMode::Half ? 6LL : 3LL) * n;
        cfg->phase_count = ceil_log2(n) + 1;
        cfg->membership = family_membership(family);
        cfg->family = std::move(family);
        return std::make_unique<BndDTree>("bnd", MessageClass::Bounded, n, std::move(cfg));
    }
} // namespace radiogather
