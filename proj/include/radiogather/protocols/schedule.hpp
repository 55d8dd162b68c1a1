#pragma once

#include "common.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

namespace radiogather
{
    /// Firing times per label for an oblivious fire-and-forward protocol.
    struct FiringSchedule
    {
        int n = 0;
        std::int64_t T = 0;
        std::vector<std::vector<std::int64_t>> F; // F[label], ascending, every time < T

        bool fires(Label label, std::int64_t t) const
        {
            if (label < 0 || label >= static_cast<Label>(F.size())) return false;
            const auto& f = F[static_cast<std::size_t>(label)];
            return std::binary_search(f.begin(), f.end(), t);
        }

        std::size_t total_firings() const
        {
            std::size_t total = 0;
            for (const auto& f : F) total += f.size();
            return total;
        }
    };

    inline nlohmann::json to_json(const FiringSchedule& s)
    {
        nlohmann::json f = nlohmann::json::object();
        for (std::size_t l = 0; l < s.F.size(); ++l)
        {
            f[std::to_string(l)] = s.F[l];
        }
        return {{"n", s.n}, {"T", s.T}, {"F", f}};
    }

    inline FiringSchedule schedule_from_json(const nlohmann::json& j)
    {
        FiringSchedule s;
        s.n = j.at("n").get<int>();
        s.T = j.at("T").get<std::int64_t>();
        if (s.n < 1 || s.T < 0) throw std::invalid_argument("schedule: n >= 1 and T >= 0 required");
        s.F.assign(static_cast<std::size_t>(s.n), {});
        for (const auto& [key, times] : j.at("F").items())
        {
            const int label = std::stoi(key);
            if (label < 0 || label >= s.n) throw std::invalid_argument("schedule: label " + key + " out of range");
            auto& f = s.F[static_cast<std::size_t>(label)];
            f = times.get<std::vector<std::int64_t>>();
            std::sort(f.begin(), f.end());
            f.erase(std::unique(f.begin(), f.end()), f.end());
            if (!f.empty() && (f.front() < 0 || f.back() >= s.T))
            {
                throw std::invalid_argument("schedule: firing time outside [0, T) for label " + key);
            }
        }
        return s;
    }

    /// Runs a fixed firing schedule with the fire-and-forward relay rule. Labels beyond
    /// the schedule never fire but still forward.
    class ScheduleNode : public NodeProtocol
    {
    public:
        ScheduleNode(const NodeContext& ctx, std::shared_ptr<const FiringSchedule> sched)
            : sched_(std::move(sched)), label_(ctx.label)
        {
        }

        std::optional<Message> act(const NodeView& view) override
        {
            const bool scheduled = sched_->fires(label_, view.time);
            if (const Message* prev = view.previous_step_message())
            {
                if (scheduled) return std::nullopt;
                return FnfMessage{std::get<FnfMessage>(*prev).rumor};
            }
            if (scheduled) return FnfMessage{label_};
            return std::nullopt;
        }

        std::unique_ptr<NodeProtocol> clone() const override { return std::make_unique<ScheduleNode>(*this); }

    private:
        std::shared_ptr<const FiringSchedule> sched_;
        Label label_;
    };

    using ScheduleProtocol = NodeFactoryProtocol<ScheduleNode, FiringSchedule>;

    /// node_count is the size of the tree the schedule will run on.
    inline std::unique_ptr<ScheduleProtocol> schedule_protocol(FiringSchedule sched, int node_count)
    {
        return std::make_unique<ScheduleProtocol>("schedule", MessageClass::FireAndForward, node_count,
                                                  std::make_shared<const FiringSchedule>(std::move(sched)));
    }
} // namespace radiogather
