// Runs every protocol on the same random tree and prints completion times.
#include <radiogather/radiogather.hpp>

#include <cstdlib>
#include <iomanip>
#include <iostream>

int main(int argc, char** argv)
{
    using namespace radiogather;
    const int n = argc > 1 ? std::atoi(argv[1]) : 128;
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 7;
    const Tree tree = make_family_tree("random", n, seed);

    std::cout << "random recursive tree, n=" << n << ", depth " << tree.max_depth() << ", 2-depth "
              << gamma_depth(tree, 2) << "\n\n";
    std::cout << std::left << std::setw(8) << "id" << std::setw(8) << "duplex" << std::right << std::setw(12)
              << "completion" << std::setw(12) << "collisions" << '\n';
    for (auto id : protocol_ids)
    {
        for (DuplexMode mode : {DuplexMode::Full, DuplexMode::Half})
        {
            const auto proto = make_protocol(id, n, ProtocolOptions{mode, std::nullopt, 0});
            RunOptions opt;
            opt.mode = mode;
            opt.seed = seed;
            opt.max_steps = step_budget(id, n, mode);
            const Trace t = run(*proto, tree, opt);
            std::cout << std::left << std::setw(8) << id << std::setw(8) << to_string(mode) << std::right
                      << std::setw(12) << (t.complete() ? std::to_string(*t.completion_step) : "incomplete")
                      << std::setw(12) << t.collisions_total << '\n';
        }
    }
}
