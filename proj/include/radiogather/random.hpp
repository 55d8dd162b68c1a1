#pragma once

#include <cstdint>

namespace radiogather
{
    inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    /// Independent stream seed for one (master seed, key) pair, e.g. a node id or trial index.
    inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t key) noexcept
    {
        return splitmix64(master ^ splitmix64(key + 0x632be59bd9b4e019ULL));
    }

    inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept
    {
        return derive_seed(derive_seed(master, a), b);
    }
} // namespace radiogather
