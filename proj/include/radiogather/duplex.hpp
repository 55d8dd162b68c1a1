#pragma once

#include <stdexcept>
#include <string_view>

namespace radiogather
{
    enum class DuplexMode
    {
        Full, // a node may receive and transmit in the same step
        Half, // a transmitting node receives nothing that step
    };

    inline std::string_view to_string(DuplexMode m) noexcept { return m == DuplexMode::Full ? "full" : "half"; }

    inline DuplexMode parse_duplex(std::string_view s)
    {
        if (s == "full") return DuplexMode::Full;
        if (s == "half") return DuplexMode::Half;
        throw std::invalid_argument("duplex mode must be 'full' or 'half'");
    }
} // namespace radiogather
