// Starves one rumor of a random single-firing schedule on a caterpillar, then shows
// that the disperser-based schedule admits no such caterpillar.
#include <radiogather/radiogather.hpp>

#include <iostream>

int main()
{
    using namespace radiogather;
    const int n = 16;
    const auto sched = random_single_firing_schedule(n, n, 3);
    if (const auto w = find_caterpillar_witness(sched))
    {
        std::cout << "random schedule: rumor " << w->victim << " is starved by\n  " << to_json(*w).dump() << '\n';
    }
    else
    {
        std::cout << "random schedule: no witness\n";
    }

    const auto mls = mls_dtree(n, DuplexMode::Full);
    const auto mls_sched = extract_schedule(*mls, n, mls->config().bound());
    std::cout << "disperser schedule (" << mls_sched.total_firings()
              << " firings): " << (find_caterpillar_witness(mls_sched) ? "witness found" : "no witness") << '\n';
}
