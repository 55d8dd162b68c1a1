#pragma once

#include "bnd_dtree.hpp"
#include "mls_dtree.hpp"
#include "round_robin.hpp"
#include "rtree.hpp"
#include "unb_dtree.hpp"

#include <array>
#include <string_view>

namespace radiogather
{
    struct ProtocolOptions
    {
        DuplexMode mode = DuplexMode::Full;
        std::optional<int> kappa;       // unb2 / bnd selective-family parameter
        std::uint64_t family_seed = 0;  // seed of the randomized selective family
    };

    inline constexpr std::array<std::string_view, 7> protocol_ids{"rr-unb", "rr-bnd", "unb1", "unb2", "bnd", "mls", "rtree"};

    class UnknownProtocol : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    inline std::unique_ptr<Protocol> make_protocol(std::string_view id, int n, const ProtocolOptions& opt = {})
    {
        if (id == "rr-unb") return round_robin_unbounded(n);
        if (id == "rr-bnd") return round_robin_bounded(n);
        if (id == "unb1") return unb_dtree1(n);
        if (id == "unb2") return unb_dtree2(n, opt.kappa, opt.family_seed);
        if (id == "bnd") return bnd_dtree(n, opt.mode, opt.kappa, opt.family_seed);
        if (id == "mls") return mls_dtree(n, opt.mode);
        if (id == "rtree") return rtree(n);
        throw UnknownProtocol("unknown protocol '" + std::string(id) + "'");
    }

    /// Step budget large enough for the protocol to finish on any n-node tree
    /// (a generous multiple of the expected time for the randomized protocol).
    inline std::int64_t step_budget(std::string_view id, int n, DuplexMode mode)
    {
        const std::int64_t nn = n;
        if (id == "rr-unb" || id == "rr-bnd") return nn * nn + 1;
        if (id == "unb1") return nn + 2 * (2 * nn * (floor_log2(nn) + 1) + nn) + 2;
        if (id == "unb2") return nn + 3 * nn * nn + 3;
        if (id == "bnd") return bnd_dtree(n, mode)->config().total_steps() + 1;
        if (id == "mls") return mls_config(n, mode).bound() + 1;
        if (id == "rtree") return static_cast<std::int64_t>(std::ceil(40.0 * nn * std::log(std::max(nn, std::int64_t{2})))) + nn;
        throw UnknownProtocol("unknown protocol '" + std::string(id) + "'");
    }
} // namespace radiogather
