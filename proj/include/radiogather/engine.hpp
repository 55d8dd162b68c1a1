#pragma once

#include "duplex.hpp"
#include "message.hpp"
#include "random.hpp"
#include "tree.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace radiogather
{
    /// One message a node actually received.
    struct Received
    {
        std::int64_t step = 0;
        Message message;
    };

    /// Everything a node may base its decision on: its label, n, the clock and the
    /// messages it received. Collisions and silence both leave no inbox entry.
    struct NodeView
    {
        Label label = 0;
        int n = 0;
        std::int64_t time = 0;
        std::span<const Received> inbox;
        Rumor own_rumor = 0;

        /// The message received in step time-1, if any.
        const Message* previous_step_message() const noexcept
        {
            if (!inbox.empty() && inbox.back().step == time - 1)
            {
                return &inbox.back().message;
            }
            return nullptr;
        }
    };

    /// Per-node protocol state machine.
    class NodeProtocol
    {
    public:
        virtual ~NodeProtocol() = default;

        /// Called once per step in increasing time order; returns the message to transmit
        /// or nullopt to stay in the receive state.
        virtual std::optional<Message> act(const NodeView& view) = 0;

        virtual std::unique_ptr<NodeProtocol> clone() const = 0;
    };

    /// What a node learns at construction time. No topology.
    struct NodeContext
    {
        Label label = 0;
        int n = 0;
        std::uint64_t stream_seed = 0;
    };

    /// A gathering protocol built for a fixed n; hands out one state per node.
    class Protocol
    {
    public:
        virtual ~Protocol() = default;
        virtual std::string_view id() const = 0;
        virtual MessageClass message_class() const = 0;
        virtual int node_count() const = 0;
        virtual std::unique_ptr<NodeProtocol> instantiate(const NodeContext& ctx) const = 0;
    };

    class ProtocolViolation : public std::logic_error
    {
    public:
        enum class Kind
        {
            MessageBound,     // message class wider than the protocol declares
            FireAndForwardRule, // fnf message that is neither own nor previous-step rumor
        };

        ProtocolViolation(Kind kind, const std::string& what) : std::logic_error(what), kind_(kind) {}

        Kind kind() const noexcept { return kind_; }

    private:
        Kind kind_;
    };

    struct StepRecord
    {
        std::int64_t step = 0;
        std::vector<NodeId> transmitters;
        std::vector<std::pair<NodeId, Message>> receptions; // every node not listed heard silence
        std::vector<NodeId> collisions;                     // nodes where >= 2 children transmitted
    };

    struct Trace
    {
        int n = 0;
        std::vector<StepRecord> steps; // filled only when recording was requested
        /// delivery[r] = number of elapsed steps when rumor r first reached the root.
        std::vector<std::optional<std::int64_t>> delivery;
        std::optional<std::int64_t> completion_step; // empty when INCOMPLETE
        std::int64_t steps_executed = 0;
        std::int64_t collisions_total = 0;
        std::int64_t transmissions_total = 0;

        bool complete() const noexcept { return completion_step.has_value(); }

        int delivered_count() const
        {
            int c = 0;
            for (const auto& d : delivery)
            {
                c += d.has_value() ? 1 : 0;
            }
            return c;
        }

        std::vector<Rumor> delivered_set() const
        {
            std::vector<Rumor> out;
            for (Rumor r = 0; r < static_cast<Rumor>(delivery.size()); ++r)
            {
                if (delivery[static_cast<std::size_t>(r)])
                {
                    out.push_back(r);
                }
            }
            return out;
        }
    };

    /// Read-only window into a running simulation, handed to observers after each step.
    /// Observers are test and analysis harnesses; protocols never see this.
    struct SimulationView
    {
        const Tree* tree = nullptr;
        std::span<const std::unique_ptr<NodeProtocol>> states;
        std::span<const std::vector<Received>> inboxes;
    };

    using StepObserver = std::function<void(const StepRecord&, const SimulationView&)>;

    /// Collision resolution for a single step, reusable across steps to avoid allocation.
    class Channel
    {
    public:
        explicit Channel(const Tree& tree)
            : tree_(&tree), count_(static_cast<std::size_t>(tree.size()), 0),
              sender_(static_cast<std::size_t>(tree.size()), -1), transmitting_(static_cast<std::size_t>(tree.size()), 0)
        {
        }

        /// Resolves one step. For every node u with transmitting children S, u receives
        /// the unique message iff |S| = 1 and (mode is Full or u itself did not transmit).
        /// on_receive(u, sender) is called per successful reception, on_collision(u) per collision.
        template <typename OnReceive, typename OnCollision>
        void resolve(std::span<const NodeId> transmitters, DuplexMode mode, OnReceive&& on_receive,
                     OnCollision&& on_collision)
        {
            touched_.clear();
            for (NodeId v : transmitters)
            {
                transmitting_[static_cast<std::size_t>(v)] = 1;
            }
            for (NodeId v : transmitters)
            {
                if (tree_->is_root(v))
                {
                    continue;
                }
                const auto p = static_cast<std::size_t>(tree_->parent(v));
                if (count_[p]++ == 0)
                {
                    touched_.push_back(static_cast<NodeId>(p));
                }
                sender_[p] = v;
            }
            for (NodeId u : touched_)
            {
                const auto ui = static_cast<std::size_t>(u);
                if (count_[ui] >= 2)
                {
                    on_collision(u);
                }
                else if (mode == DuplexMode::Full || transmitting_[ui] == 0)
                {
                    on_receive(u, sender_[ui]);
                }
                count_[ui] = 0;
            }
            for (NodeId v : transmitters)
            {
                transmitting_[static_cast<std::size_t>(v)] = 0;
            }
        }

    private:
        const Tree* tree_;
        std::vector<int> count_;
        std::vector<NodeId> sender_;
        std::vector<std::uint8_t> transmitting_;
        std::vector<NodeId> touched_;
    };

    /// Single-step reception rule over explicit actions (one optional message per node).
    inline std::vector<std::optional<Message>> step(const Tree& tree, DuplexMode mode,
                                                    std::span<const std::optional<Message>> actions,
                                                    std::vector<NodeId>* collisions = nullptr)
    {
        if (static_cast<int>(actions.size()) != tree.size())
        {
            throw std::invalid_argument("step: one action slot per node required");
        }
        std::vector<NodeId> transmitters;
        for (NodeId v = 0; v < tree.size(); ++v)
        {
            if (actions[static_cast<std::size_t>(v)])
            {
                transmitters.push_back(v);
            }
        }
        std::vector<std::optional<Message>> received(static_cast<std::size_t>(tree.size()));
        Channel channel(tree);
        channel.resolve(
            transmitters, mode,
            [&](NodeId u, NodeId sender) { received[static_cast<std::size_t>(u)] = actions[static_cast<std::size_t>(sender)]; },
            [&](NodeId u) {
                if (collisions)
                {
                    collisions->push_back(u);
                }
            });
        return received;
    }

    struct RunOptions
    {
        DuplexMode mode = DuplexMode::Full;
        std::int64_t max_steps = 1;
        std::uint64_t seed = 0;
        bool stop_when_complete = true;
        bool record_steps = false;
        StepObserver observer;
    };

    /// Runs a protocol on a tree in lock-step until every rumor reached the root or
    /// max_steps elapsed.
    ///
    /// Each node gets its own state built from (label, n, stream seed derived from the
    /// master seed and node id). The root is the gathering target: it is asked to act like
    /// every node so its state stays current, but its transmissions are discarded.
    inline Trace run(const Protocol& protocol, const Tree& tree, const RunOptions& options)
    {
        if (options.max_steps < 1)
        {
            throw std::invalid_argument("run: max_steps must be >= 1");
        }
        const int n = tree.size();
        if (protocol.node_count() != n)
        {
            throw std::invalid_argument("run: protocol built for n=" + std::to_string(protocol.node_count()) +
                                        " but tree has " + std::to_string(n) + " nodes");
        }

        std::vector<std::unique_ptr<NodeProtocol>> states;
        states.reserve(static_cast<std::size_t>(n));
        for (NodeId v = 0; v < n; ++v)
        {
            states.push_back(protocol.instantiate(
                NodeContext{tree.label(v), n, derive_seed(options.seed, static_cast<std::uint64_t>(v))}));
        }
        std::vector<std::vector<Received>> inboxes(static_cast<std::size_t>(n));
        std::vector<std::optional<Message>> actions(static_cast<std::size_t>(n));
        std::vector<NodeId> transmitters;
        Channel channel(tree);
        const MessageClass declared = protocol.message_class();

        Trace trace;
        trace.n = n;
        trace.delivery.assign(static_cast<std::size_t>(n), std::nullopt);
        trace.delivery[static_cast<std::size_t>(tree.label(tree.root()))] = 0;
        int delivered = 1;
        const bool want_record = options.record_steps || static_cast<bool>(options.observer);
        const SimulationView sim_view{&tree, states, inboxes};

        if (delivered == n && options.stop_when_complete)
        {
            trace.completion_step = 0;
            return trace;
        }

        for (std::int64_t t = 0; t < options.max_steps; ++t)
        {
            transmitters.clear();
            for (NodeId v = 0; v < n; ++v)
            {
                const auto vi = static_cast<std::size_t>(v);
                const NodeView view{tree.label(v), n, t, inboxes[vi], tree.label(v)};
                actions[vi] = states[vi]->act(view);
                if (!actions[vi] || tree.is_root(v))
                {
                    actions[vi].reset();
                    continue;
                }
                const MessageClass emitted = message_class(*actions[vi]);
                if (!class_permits(declared, emitted))
                {
                    throw ProtocolViolation(ProtocolViolation::Kind::MessageBound,
                                            std::string(protocol.id()) + ": node " + std::to_string(v) +
                                                " emitted a message wider than its protocol allows");
                }
                if (emitted == MessageClass::FireAndForward)
                {
                    const Rumor r = std::get<FnfMessage>(*actions[vi]).rumor;
                    const Message* prev = view.previous_step_message();
                    if (r != view.own_rumor && !(prev && carries(*prev, r)))
                    {
                        throw ProtocolViolation(ProtocolViolation::Kind::FireAndForwardRule,
                                                std::string(protocol.id()) + ": node " + std::to_string(v) +
                                                    " transmitted a rumor it may not fire or forward");
                    }
                }
                transmitters.push_back(v);
            }
            trace.transmissions_total += static_cast<std::int64_t>(transmitters.size());

            StepRecord record;
            if (want_record)
            {
                record.step = t;
                record.transmitters = transmitters;
            }
            channel.resolve(
                transmitters, options.mode,
                [&](NodeId u, NodeId sender) {
                    const Message& msg = *actions[static_cast<std::size_t>(sender)];
                    inboxes[static_cast<std::size_t>(u)].push_back(Received{t, msg});
                    if (want_record)
                    {
                        record.receptions.emplace_back(u, msg);
                    }
                    if (tree.is_root(u))
                    {
                        for_each_rumor(msg, [&](Rumor r) {
                            auto& d = trace.delivery[static_cast<std::size_t>(r)];
                            if (!d)
                            {
                                d = t + 1;
                                ++delivered;
                            }
                        });
                    }
                },
                [&](NodeId u) {
                    ++trace.collisions_total;
                    if (want_record)
                    {
                        record.collisions.push_back(u);
                    }
                });

            trace.steps_executed = t + 1;
            if (want_record)
            {
                std::sort(record.receptions.begin(), record.receptions.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });
                std::sort(record.collisions.begin(), record.collisions.end());
                if (options.observer)
                {
                    options.observer(record, sim_view);
                }
                if (options.record_steps)
                {
                    trace.steps.push_back(std::move(record));
                }
            }
            if (delivered == n && options.stop_when_complete)
            {
                break;
            }
        }
        if (delivered == n)
        {
            std::int64_t last = 0;
            for (const auto& d : trace.delivery)
            {
                last = std::max(last, *d);
            }
            trace.completion_step = last;
        }
        return trace;
    }

    inline constexpr std::string_view trace_schema = "radiogather.trace/1";

    inline nlohmann::json to_json(const StepRecord& r)
    {
        nlohmann::json receptions = nlohmann::json::array();
        for (const auto& [node, msg] : r.receptions)
        {
            receptions.push_back({{"node", node}, {"message", to_json(msg)}});
        }
        return {{"schema", trace_schema}, {"type", "step"},
                {"step", r.step},        {"transmitters", r.transmitters},
                {"receptions", receptions}, {"collisions", r.collisions}};
    }

    inline nlohmann::json trace_summary_json(const Trace& t)
    {
        nlohmann::json delivery = nlohmann::json::object();
        for (Rumor r = 0; r < static_cast<Rumor>(t.delivery.size()); ++r)
        {
            if (const auto& d = t.delivery[static_cast<std::size_t>(r)])
            {
                delivery[std::to_string(r)] = *d;
            }
        }
        return {{"schema", trace_schema},
                {"type", "summary"},
                {"n", t.n},
                {"complete", t.complete()},
                {"completion_step", t.completion_step ? nlohmann::json(*t.completion_step) : nlohmann::json(nullptr)},
                {"steps_executed", t.steps_executed},
                {"collisions_total", t.collisions_total},
                {"delivery", delivery}};
    }

    /// Line-delimited JSON: one object per recorded step, then one summary object.
    inline void write_trace_jsonl(std::ostream& out, const Trace& t)
    {
        for (const auto& r : t.steps)
        {
            out << to_json(r).dump() << '\n';
        }
        out << trace_summary_json(t).dump() << '\n';
    }
} // namespace radiogather
