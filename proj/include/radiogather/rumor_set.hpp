#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace radiogather
{
    /// Rumor ids are the originating node's label, so they live in [0, n).
    using Rumor = int;

    /// Fixed-universe bitset of rumor ids. Unbounded messages carry one of these.
    class RumorSet
    {
    public:
        RumorSet() = default;
        explicit RumorSet(int universe)
            : universe_(universe), words_((static_cast<std::size_t>(universe) + 63) / 64, 0)
        {
        }

        int universe() const noexcept { return universe_; }

        bool contains(Rumor r) const noexcept
        {
            return r >= 0 && r < universe_ && ((words_[word(r)] >> bit(r)) & 1U) != 0;
        }

        /// Returns true when r was not already present.
        bool insert(Rumor r)
        {
            auto& w = words_[word(r)];
            const std::uint64_t mask = std::uint64_t{1} << bit(r);
            if ((w & mask) != 0)
            {
                return false;
            }
            w |= mask;
            ++count_;
            return true;
        }

        /// Union in place. Returns the number of newly added rumors.
        int merge(const RumorSet& other)
        {
            int added = 0;
            const std::size_t len = std::min(words_.size(), other.words_.size());
            for (std::size_t i = 0; i < len; ++i)
            {
                const std::uint64_t fresh = other.words_[i] & ~words_[i];
                if (fresh != 0)
                {
                    added += std::popcount(fresh);
                    words_[i] |= fresh;
                }
            }
            count_ += added;
            return added;
        }

        bool is_subset_of(const RumorSet& other) const noexcept
        {
            for (std::size_t i = 0; i < words_.size(); ++i)
            {
                const std::uint64_t theirs = i < other.words_.size() ? other.words_[i] : 0;
                if ((words_[i] & ~theirs) != 0) return false;
            }
            return true;
        }

        int size() const noexcept { return count_; }
        bool empty() const noexcept { return count_ == 0; }

        template <typename F>
        void for_each(F&& f) const
        {
            for (std::size_t i = 0; i < words_.size(); ++i)
            {
                std::uint64_t w = words_[i];
                while (w != 0)
                {
                    const int b = std::countr_zero(w);
                    f(static_cast<Rumor>(i * 64 + static_cast<std::size_t>(b)));
                    w &= w - 1;
                }
            }
        }

        std::vector<Rumor> to_vector() const
        {
            std::vector<Rumor> out;
            out.reserve(static_cast<std::size_t>(count_));
            for_each([&](Rumor r) { out.push_back(r); });
            return out;
        }

        friend bool operator==(const RumorSet& a, const RumorSet& b)
        {
            return a.universe_ == b.universe_ && a.words_ == b.words_;
        }

    private:
        static std::size_t word(Rumor r) noexcept { return static_cast<std::size_t>(r) / 64; }
        static unsigned bit(Rumor r) noexcept { return static_cast<unsigned>(r) % 64; }

        int universe_ = 0;
        int count_ = 0;
        std::vector<std::uint64_t> words_;
    };
} // namespace radiogather
