#pragma once

#include "duplex.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace radiogather
{
    class ParametersTooLarge : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline bool is_prime(long long x)
    {
        if (x < 2) return false;
        if (x % 2 == 0) return x == 2;
        for (long long d = 3; d * d <= x; d += 2)
        {
            if (x % d == 0) return false;
        }
        return true;
    }

    /// Smallest prime p with p*p >= n.
    inline long long smallest_prime_with_square_geq(long long n)
    {
        if (n < 1) throw std::invalid_argument("smallest_prime_with_square_geq: n >= 1 required");
        long long p = 2;
        while (p * p < n || !is_prime(p))
        {
            ++p;
        }
        // Bertrand: some prime lies in [ceil(sqrt n), 2 ceil(sqrt n)).
        if (n > 1)
        {
            const auto r = static_cast<long long>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-9));
            if (p >= 2 * r) throw std::logic_error("smallest_prime_with_square_geq: Bertrand bound violated");
        }
        return p;
    }

    // ---------------------------------------------------------------- dispersers

    /// d_a(x) = (a x mod p) + 2p (a x^2 mod p).
    inline long long disperser_value(long long p, long long a, long long x)
    {
        return (a * x % p) + 2 * p * (a * x % p * x % p);
    }

    struct Disperser
    {
        int n = 0;
        int p = 0;
        int m = 0;
        long long s = 0;
        DuplexMode mode = DuplexMode::Full;
        std::vector<std::vector<long long>> sets; // sets[i] is D_{i+1}, ascending
    };

    /// Kill cap the pairwise check uses for a mode: 2 for full duplex, 4 for half.
    inline int kill_cap_for(DuplexMode mode) { return mode == DuplexMode::Full ? 2 : 4; }

    /// Set count per mode: (p-1)/2 full duplex, floor((p-1)/4) half duplex.
    inline int disperser_set_count(int p, DuplexMode mode) { return mode == DuplexMode::Full ? (p - 1) / 2 : (p - 1) / 4; }

    inline Disperser build_disperser(int n, DuplexMode mode)
    {
        if (n < 2) throw std::invalid_argument("build_disperser: n >= 2 required");
        Disperser d;
        d.n = n;
        d.p = static_cast<int>(smallest_prime_with_square_geq(n));
        d.m = disperser_set_count(d.p, mode);
        d.s = 2LL * d.p * d.p + d.p;
        d.mode = mode;
        for (int a = 1; a <= d.m; ++a)
        {
            std::vector<long long> set;
            set.reserve(static_cast<std::size_t>(d.p));
            for (int x = 0; x < d.p; ++x)
            {
                set.push_back(disperser_value(d.p, a, x));
            }
            std::sort(set.begin(), set.end());
            d.sets.push_back(std::move(set));
        }
        return d;
    }

    /// For every ordered pair of distinct sets, counts how often each difference
    /// x - y (x in D_a, y in D_b) occurs and rejects if any count exceeds kill_cap.
    ///
    /// In half duplex a firing at t is also spoiled by a firing at t - 1 (the relay
    /// would be transmitting while its child's rumor arrives), so there the check runs
    /// on the two-wide window count H(t) + H(t + 1).
    inline bool verify_disperser_pairwise(const Disperser& d, int kill_cap)
    {
        long long lo = 0;
        long long hi = 0;
        for (const auto& set : d.sets)
        {
            if (!set.empty())
            {
                hi = std::max(hi, set.back());
                lo = std::min(lo, set.front());
            }
        }
        const long long span = hi - lo;
        std::vector<int> hist(static_cast<std::size_t>(2 * span + 2), 0);
        for (std::size_t a = 0; a < d.sets.size(); ++a)
        {
            for (std::size_t b = 0; b < d.sets.size(); ++b)
            {
                if (a == b) continue;
                std::fill(hist.begin(), hist.end(), 0);
                for (long long x : d.sets[a])
                {
                    for (long long y : d.sets[b])
                    {
                        ++hist[static_cast<std::size_t>(x - y + span)];
                    }
                }
                for (std::size_t t = 0; t + 1 < hist.size(); ++t)
                {
                    const int count = d.mode == DuplexMode::Full ? hist[t] : hist[t] + hist[t + 1];
                    if (count > kill_cap) return false;
                }
            }
        }
        return true;
    }

    /// Some tau in D_j whose shifted firing tau + delta[j] avoids every other shifted set
    /// (and, in half duplex, the step right after each of their firings). Set indices are
    /// zero-based here: delta[i] is the depth assigned to sets[i].
    inline std::optional<long long> uncovered_firing(const Disperser& d, std::span<const int> delta, int j)
    {
        if (delta.size() != d.sets.size()) throw std::invalid_argument("uncovered_firing: one depth per set required");
        if (j < 0 || j >= static_cast<int>(d.sets.size())) throw std::out_of_range("uncovered_firing: bad set index");
        std::vector<long long> blocked;
        for (std::size_t i = 0; i < d.sets.size(); ++i)
        {
            if (static_cast<int>(i) == j) continue;
            for (long long x : d.sets[i])
            {
                blocked.push_back(x + delta[i]);
                if (d.mode == DuplexMode::Half) blocked.push_back(x + delta[i] + 1);
            }
        }
        std::sort(blocked.begin(), blocked.end());
        for (long long tau : d.sets[static_cast<std::size_t>(j)])
        {
            if (!std::binary_search(blocked.begin(), blocked.end(), tau + delta[static_cast<std::size_t>(j)]))
            {
                return tau;
            }
        }
        return std::nullopt;
    }

    inline nlohmann::json to_json(const Disperser& d)
    {
        return {{"n", d.n}, {"p", d.p}, {"m", d.m}, {"s", d.s}, {"mode", to_string(d.mode)}, {"sets", d.sets}};
    }

    // -------------------------------------------------------- selective families

    struct SelectiveFamily
    {
        enum class Construction
        {
            WholeSet,
            Singletons,
            Random,
        };

        int n = 0;
        int k = 0;
        std::vector<std::vector<int>> sets;
        bool verified = false;
        Construction construction = Construction::Singletons;
        std::uint64_t seed = 0;

        int m() const noexcept { return static_cast<int>(sets.size()); }
    };

    inline std::string_view to_string(SelectiveFamily::Construction c)
    {
        switch (c)
        {
        case SelectiveFamily::Construction::WholeSet: return "whole-set";
        case SelectiveFamily::Construction::Singletons: return "singletons";
        case SelectiveFamily::Construction::Random: return "random";
        }
        return "?";
    }

    inline SelectiveFamily singleton_family(int n, int k)
    {
        SelectiveFamily f;
        f.n = n;
        f.k = k;
        f.construction = SelectiveFamily::Construction::Singletons;
        for (int x = 0; x < n; ++x)
        {
            f.sets.push_back({x});
        }
        return f;
    }

    /// Size of the randomized family: ceil(8 k^2 ln max(n, 2)).
    inline long long random_family_size(int n, int k)
    {
        return static_cast<long long>(std::ceil(8.0 * k * k * std::log(std::max(n, 2))));
    }

    /// The randomized construction alone: random_family_size sets, each element kept
    /// independently with probability 1/k. Not verified.
    inline SelectiveFamily build_random_selective_family(int n, int k, std::uint64_t seed)
    {
        if (n < 1 || k < 1 || k > n) throw std::invalid_argument("selective family: 1 <= k <= n required");
        SelectiveFamily f;
        f.n = n;
        f.k = k;
        f.seed = seed;
        f.construction = SelectiveFamily::Construction::Random;
        std::mt19937_64 rng(seed);
        std::bernoulli_distribution keep(1.0 / k);
        const long long m = random_family_size(n, k);
        f.sets.resize(static_cast<std::size_t>(m));
        for (auto& set : f.sets)
        {
            for (int x = 0; x < n; ++x)
            {
                if (keep(rng)) set.push_back(x);
            }
        }
        return f;
    }

    /// Strong k-selective family on [n]. k = 1 gives {[n]}; large k (k >= sqrt(n / log2 n))
    /// gives the n singletons; otherwise the randomized construction is used, falling back
    /// to singletons when it would need at least n sets.
    inline SelectiveFamily build_selective_family(int n, int k, std::uint64_t seed)
    {
        if (n < 1 || k < 1 || k > n) throw std::invalid_argument("selective family: 1 <= k <= n required");
        if (k == 1)
        {
            SelectiveFamily f;
            f.n = n;
            f.k = 1;
            f.construction = SelectiveFamily::Construction::WholeSet;
            f.sets.emplace_back();
            for (int x = 0; x < n; ++x)
            {
                f.sets.back().push_back(x);
            }
            return f;
        }
        const double threshold = n <= 2 ? 0.0 : std::sqrt(n / std::log2(static_cast<double>(n)));
        if (k >= threshold || random_family_size(n, k) >= n)
        {
            return singleton_family(n, k);
        }
        return build_random_selective_family(n, k, seed);
    }

    inline constexpr long long default_verify_budget = 400'000'000;

    /// Exhaustive check over all X of size 1..k. Returns true iff every x in every such X
    /// is isolated by some set. Needs n <= 64 and a work estimate within budget.
    inline bool verify_selective_family(const SelectiveFamily& f, long long work_budget = default_verify_budget)
    {
        const int n = f.n;
        const int k = std::min(f.k, n);
        if (n > 64)
        {
            throw ParametersTooLarge("verify_selective_family: n=" + std::to_string(n) + " exceeds 64");
        }
        // work ~ sum_{i<=k} C(n, i) * m
        long double subsets = 0;
        long double c = 1;
        for (int i = 1; i <= k; ++i)
        {
            c = c * (n - i + 1) / i;
            subsets += c;
        }
        if (subsets * std::max(1, f.m()) > static_cast<long double>(work_budget))
        {
            throw ParametersTooLarge("verify_selective_family: enumeration for n=" + std::to_string(n) +
                                     ", k=" + std::to_string(k) + " exceeds the work budget");
        }
        std::vector<std::uint64_t> masks;
        masks.reserve(f.sets.size());
        for (const auto& set : f.sets)
        {
            std::uint64_t mask = 0;
            for (int x : set)
            {
                if (x < 0 || x >= n) return false;
                mask |= std::uint64_t{1} << x;
            }
            masks.push_back(mask);
        }

        auto isolated_all = [&](std::uint64_t X) {
            std::uint64_t covered = 0;
            for (std::uint64_t mask : masks)
            {
                const std::uint64_t hit = mask & X;
                if (std::has_single_bit(hit))
                {
                    covered |= hit;
                    if (covered == X) return true;
                }
            }
            return covered == X;
        };

        // Enumerate combinations of size exactly `size` via index vectors.
        for (int size = 1; size <= k; ++size)
        {
            std::vector<int> idx(static_cast<std::size_t>(size));
            for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
            while (true)
            {
                std::uint64_t X = 0;
                for (int i : idx) X |= std::uint64_t{1} << i;
                if (!isolated_all(X)) return false;
                int pos = size - 1;
                while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - size + pos) --pos;
                if (pos < 0) break;
                ++idx[static_cast<std::size_t>(pos)];
                for (int i = pos + 1; i < size; ++i)
                {
                    idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
                }
            }
        }
        return true;
    }

    struct VerifiedFamilyResult
    {
        SelectiveFamily family;
        int retries = 0; // constructions thrown away before the accepted one
    };

    /// Builds and exhaustively verifies, redrawing the random construction with fresh
    /// seeds on failure. Returns nullopt when max_attempts constructions all failed.
    /// Parameters above the verifier's budget yield the unverified family. With
    /// force_random the randomized construction is used even where the deterministic
    /// shortcuts would apply.
    inline std::optional<VerifiedFamilyResult> build_verified_selective_family(int n, int k, std::uint64_t seed,
                                                                               int max_attempts = 6,
                                                                               bool force_random = false,
                                                                               long long work_budget = default_verify_budget)
    {
        for (int attempt = 0; attempt < max_attempts; ++attempt)
        {
            const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt) * 0x9e3779b97f4a7c15ULL;
            auto f = force_random ? build_random_selective_family(n, k, s) : build_selective_family(n, k, s);
            try
            {
                f.verified = verify_selective_family(f, work_budget);
            }
            catch (const ParametersTooLarge&)
            {
                return VerifiedFamilyResult{std::move(f), attempt};
            }
            if (f.verified) return VerifiedFamilyResult{std::move(f), attempt};
            if (f.construction != SelectiveFamily::Construction::Random) return std::nullopt;
        }
        return std::nullopt;
    }

    inline nlohmann::json to_json(const SelectiveFamily& f)
    {
        nlohmann::json j{{"n", f.n},
                         {"k", f.k},
                         {"m", f.m()},
                         {"construction", to_string(f.construction)},
                         {"verified", f.verified},
                         {"sets", f.sets}};
        if (f.construction == SelectiveFamily::Construction::Random) j["seed"] = f.seed;
        return j;
    }
} // namespace radiogather
