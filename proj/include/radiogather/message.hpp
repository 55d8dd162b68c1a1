#pragma once

#include "rumor_set.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <variant>

namespace radiogather
{
    /// Small fixed-width side channel. Every field fits in O(log n) bits, which is what
    /// bounded messages are allowed to carry next to their single rumor.
    struct Aux
    {
        std::optional<int> sender;  // sender label
        std::optional<int> height;  // sender's 2-height
        std::optional<bool> parity; // path position parity (half-duplex BndDTree)

        friend bool operator==(const Aux&, const Aux&) = default;
    };

    /// Any number of rumors aggregated in one transmission.
    struct UnboundedMessage
    {
        std::shared_ptr<const RumorSet> rumors;
        Aux aux;
    };

    /// Exactly one rumor plus bounded auxiliary data.
    struct BoundedMessage
    {
        Rumor rumor = 0;
        Aux aux;
    };

    /// Fire-and-forward: a single rumor and nothing else.
    struct FnfMessage
    {
        Rumor rumor = 0;
    };

    using Message = std::variant<UnboundedMessage, BoundedMessage, FnfMessage>;

    enum class MessageClass
    {
        Unbounded,
        Bounded,
        FireAndForward,
    };

    inline MessageClass message_class(const Message& m) noexcept
    {
        switch (m.index())
        {
        case 0: return MessageClass::Unbounded;
        case 1: return MessageClass::Bounded;
        default: return MessageClass::FireAndForward;
        }
    }

    /// A protocol declared with class `declared` may emit `emitted`.
    inline bool class_permits(MessageClass declared, MessageClass emitted) noexcept
    {
        switch (declared)
        {
        case MessageClass::Unbounded: return true;
        case MessageClass::Bounded: return emitted != MessageClass::Unbounded;
        case MessageClass::FireAndForward: return emitted == MessageClass::FireAndForward;
        }
        return false;
    }

    template <typename F>
    void for_each_rumor(const Message& m, F&& f)
    {
        if (const auto* u = std::get_if<UnboundedMessage>(&m))
        {
            if (u->rumors)
            {
                u->rumors->for_each(f);
            }
        }
        else if (const auto* b = std::get_if<BoundedMessage>(&m))
        {
            f(b->rumor);
        }
        else
        {
            f(std::get<FnfMessage>(m).rumor);
        }
    }

    inline bool carries(const Message& m, Rumor r)
    {
        bool found = false;
        for_each_rumor(m, [&](Rumor x) { found = found || x == r; });
        return found;
    }

    inline bool operator==(const UnboundedMessage& a, const UnboundedMessage& b)
    {
        const bool same_rumors = (a.rumors == b.rumors) || (a.rumors && b.rumors && *a.rumors == *b.rumors);
        return same_rumors && a.aux == b.aux;
    }
    inline bool operator==(const BoundedMessage& a, const BoundedMessage& b)
    {
        return a.rumor == b.rumor && a.aux == b.aux;
    }
    inline bool operator==(const FnfMessage& a, const FnfMessage& b) { return a.rumor == b.rumor; }

    inline nlohmann::json to_json(const Aux& aux)
    {
        nlohmann::json j = nlohmann::json::object();
        if (aux.sender) j["sender"] = *aux.sender;
        if (aux.height) j["height"] = *aux.height;
        if (aux.parity) j["parity"] = *aux.parity;
        return j;
    }

    inline nlohmann::json to_json(const Message& m)
    {
        if (const auto* u = std::get_if<UnboundedMessage>(&m))
        {
            return {{"kind", "unbounded"},
                    {"rumors", u->rumors ? u->rumors->to_vector() : std::vector<Rumor>{}},
                    {"aux", to_json(u->aux)}};
        }
        if (const auto* b = std::get_if<BoundedMessage>(&m))
        {
            return {{"kind", "bounded"}, {"rumor", b->rumor}, {"aux", to_json(b->aux)}};
        }
        return {{"kind", "fnf"}, {"rumor", std::get<FnfMessage>(m).rumor}};
    }
} // namespace radiogather
