#include <radiogather/radiogather.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace rg = radiogather;
using nlohmann::json;

namespace
{
    constexpr std::string_view run_schema = "radiogather.run/1";
    constexpr std::string_view constructs_schema = "radiogather.constructs/1";
    constexpr std::string_view adversary_schema = "radiogather.adversary/1";
    constexpr std::string_view lemmas_schema = "radiogather.lemmas/1";

    std::uint64_t default_seed()
    {
        if (const char* env = std::getenv("RADIO_GATHER_SEED"))
        {
            try
            {
                return std::stoull(env);
            }
            catch (const std::exception&)
            {
                std::cerr << "warning: ignoring non-numeric RADIO_GATHER_SEED\n";
            }
        }
        return 1;
    }

    struct Common
    {
        std::string protocol = "unb2";
        std::string tree = "random";
        std::string tree_file;
        int n = 64;
        std::uint64_t seed = default_seed();
        std::string duplex = "full";
        std::int64_t max_steps = 0;
        std::string out;
        std::optional<int> kappa;
        std::uint64_t family_seed = 0;
    };

    rg::ProtocolOptions protocol_options(const Common& c)
    {
        return rg::ProtocolOptions{rg::parse_duplex(c.duplex), c.kappa, c.family_seed};
    }

    rg::Tree load_tree(const Common& c)
    {
        if (!c.tree_file.empty())
        {
            std::ifstream in(c.tree_file);
            if (!in) throw std::runtime_error("cannot open tree file " + c.tree_file);
            return rg::read_tree_text(in);
        }
        return rg::make_family_tree(c.tree, c.n, c.seed);
    }

    /// Writes to the named file, or to stdout when the name is empty.
    template <typename F>
    void emit(const std::string& path, F&& writer)
    {
        if (path.empty())
        {
            writer(std::cout);
            return;
        }
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        writer(out);
    }

    int cmd_run(const Common& c, bool allow_incomplete, bool record)
    {
        const rg::Tree tree = load_tree(c);
        const auto options = protocol_options(c);
        const auto proto = rg::make_protocol(c.protocol, tree.size(), options);
        rg::RunOptions run;
        run.mode = options.mode;
        run.seed = c.seed;
        run.max_steps = c.max_steps > 0 ? c.max_steps : rg::step_budget(c.protocol, tree.size(), options.mode);
        run.record_steps = record && !c.out.empty();
        const rg::Trace trace = rg::run(*proto, tree, run);

        if (!c.out.empty())
        {
            emit(c.out, [&](std::ostream& os) { rg::write_trace_jsonl(os, trace); });
        }
        const json summary{{"schema", run_schema},
                           {"protocol", c.protocol},
                           {"n", trace.n},
                           {"duplex", rg::to_string(options.mode)},
                           {"seed", c.seed},
                           {"complete", trace.complete()},
                           {"completion_step", trace.completion_step ? json(*trace.completion_step) : json(nullptr)},
                           {"steps_executed", trace.steps_executed},
                           {"delivered", trace.delivered_count()},
                           {"collisions_total", trace.collisions_total}};
        std::cout << summary.dump() << '\n';
        if (!trace.complete() && !allow_incomplete)
        {
            std::cerr << "INCOMPLETE: " << trace.delivered_count() << " of " << trace.n << " rumors delivered after "
                      << trace.steps_executed << " steps\n";
            return 2;
        }
        return 0;
    }

    std::vector<int> parse_sizes(const std::string& text)
    {
        std::vector<int> sizes;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ','))
        {
            if (!item.empty()) sizes.push_back(std::stoi(item));
        }
        if (sizes.empty()) throw std::invalid_argument("--sizes needs at least one value");
        return sizes;
    }

    int cmd_scaling(const Common& c, const std::string& sizes, int trials, const std::string& trials_out)
    {
        const auto result = rg::run_scaling(c.protocol, parse_sizes(sizes), trials, c.seed, protocol_options(c));
        emit(c.out, [&](std::ostream& os) { rg::write_scaling_csv(os, result); });
        if (!trials_out.empty())
        {
            emit(trials_out, [&](std::ostream& os) { rg::write_scaling_trials_csv(os, result); });
        }
        for (const auto& t : result.trials)
        {
            if (!t.complete)
            {
                std::cerr << "warning: n=" << t.n << " trial " << t.trial << " did not complete\n";
            }
        }
        return 0;
    }

    void report(const std::string& property, const std::string& status)
    {
        std::cout << status << ' ' << property << '\n';
    }

    int cmd_constructs(const Common& c, const std::string& kind, int k)
    {
        const auto mode = rg::parse_duplex(c.duplex);
        int failures = 0;
        if (kind == "disperser")
        {
            const auto d = rg::build_disperser(c.n, mode);
            const json dump{{"schema", constructs_schema}, {"kind", "disperser"}, {"disperser", rg::to_json(d)}};
            emit(c.out, [&](std::ostream& os) { os << dump.dump() << '\n'; });

            const bool pairwise = rg::verify_disperser_pairwise(d, rg::kill_cap_for(mode));
            report("pairwise-kill-cap-" + std::to_string(rg::kill_cap_for(mode)), pairwise ? "PASS" : "FAIL");
            failures += pairwise ? 0 : 1;

            bool sizes_ok = d.s == 2LL * d.p * d.p + d.p;
            for (const auto& set : d.sets)
            {
                sizes_ok = sizes_ok && static_cast<int>(set.size()) == d.p && set.back() < d.s;
            }
            report("set-sizes", sizes_ok ? "PASS" : "FAIL");
            failures += sizes_ok ? 0 : 1;

            if (d.m > 0)
            {
                std::mt19937_64 rng(c.seed);
                std::uniform_int_distribution<int> depth(0, c.n - 1);
                bool covered = true;
                for (int trial = 0; trial < 50; ++trial)
                {
                    std::vector<int> delta(static_cast<std::size_t>(d.m));
                    for (auto& x : delta) x = depth(rng);
                    for (int j = 0; j < d.m; ++j)
                    {
                        covered = covered && rg::uncovered_firing(d, delta, j).has_value();
                    }
                }
                report("uncovered-firing-50-random-depths", covered ? "PASS" : "FAIL");
                failures += covered ? 0 : 1;
            }
        }
        else if (kind == "selfam")
        {
            auto f = rg::build_selective_family(c.n, k, c.family_seed);
            std::string status;
            try
            {
                f.verified = rg::verify_selective_family(f);
                status = f.verified ? "PASS" : "FAIL";
            }
            catch (const rg::ParametersTooLarge&)
            {
                status = "UNVERIFIED";
            }
            const json dump{{"schema", constructs_schema}, {"kind", "selfam"}, {"family", rg::to_json(f)}};
            emit(c.out, [&](std::ostream& os) { os << dump.dump() << '\n'; });
            report("strong-" + std::to_string(k) + "-selective", status);
            failures += status == "FAIL" ? 1 : 0;
        }
        else
        {
            throw std::invalid_argument("constructs: kind must be 'disperser' or 'selfam'");
        }
        return failures == 0 ? 0 : 1;
    }

    int cmd_adversary(const Common& c, const std::string& schedule_file, const std::string& generate, std::int64_t T)
    {
        rg::FiringSchedule sched;
        if (!schedule_file.empty())
        {
            std::ifstream in(schedule_file);
            if (!in) throw std::runtime_error("cannot open schedule file " + schedule_file);
            sched = rg::schedule_from_json(json::parse(in));
        }
        else if (generate == "random-single")
        {
            sched = rg::random_single_firing_schedule(c.n, T > 0 ? T : c.n, c.seed);
        }
        else if (generate == "all-zero")
        {
            sched = rg::all_fire_at_zero_schedule(c.n);
        }
        else
        {
            const auto proto = rg::make_protocol(c.protocol, c.n, protocol_options(c));
            const std::int64_t horizon = T > 0 ? T : rg::step_budget(c.protocol, c.n, rg::parse_duplex(c.duplex));
            sched = rg::extract_schedule(*proto, c.n, horizon);
        }
        const auto witness = rg::find_caterpillar_witness(sched);
        json out{{"schema", adversary_schema}, {"n", sched.n}, {"T", sched.T}};
        out["witness"] = witness ? rg::to_json(*witness) : json(nullptr);
        emit(c.out, [&](std::ostream& os) { os << out.dump() << '\n'; });
        if (!c.out.empty()) std::cout << (witness ? "witness" : "none") << '\n';
        return 0;
    }

    int cmd_verify_lemmas(const Common& c, int trees, int max_n)
    {
        std::mt19937_64 rng(c.seed);
        std::uniform_int_distribution<int> size(1, max_n);
        rg::LemmaViolations total;
        for (int i = 0; i < trees; ++i)
        {
            const auto tree = rg::make_random_tree(size(rng), rg::derive_seed(c.seed, static_cast<std::uint64_t>(i)));
            for (int gamma : {2, 3, 4})
            {
                const auto v = rg::check_structural_lemmas(tree, gamma);
                total.depth_bound += v.depth_bound;
                total.subtree_size += v.subtree_size;
                total.height_shift += v.height_shift;
                total.checked_nodes += v.checked_nodes;
            }
        }
        const json out{{"schema", lemmas_schema},
                       {"trees", trees},
                       {"max_n", max_n},
                       {"depth_bound_violations", total.depth_bound},
                       {"subtree_size_violations", total.subtree_size},
                       {"height_shift_violations", total.height_shift},
                       {"checked_nodes", total.checked_nodes}};
        emit(c.out, [&](std::ostream& os) { os << out.dump() << '\n'; });
        report("gamma-depth-and-subtree-size", total.depth_bound + total.subtree_size == 0 ? "PASS" : "FAIL");
        report("height-shift", total.height_shift == 0 ? "PASS" : "FAIL");
        return total.total() == 0 ? 0 : 1;
    }
} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Information gathering in tree radio networks"};
    app.require_subcommand(1);
    Common c;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--protocol", c.protocol, "rr-unb | rr-bnd | unb1 | unb2 | bnd | mls | rtree");
        sub->add_option("--n", c.n, "number of nodes")->check(CLI::PositiveNumber);
        sub->add_option("--seed", c.seed, "master seed (default: $RADIO_GATHER_SEED or 1)");
        sub->add_option("--duplex", c.duplex, "full | half")->check(CLI::IsMember({"full", "half"}));
        sub->add_option("--out", c.out, "output file (default: stdout)");
        sub->add_option("--kappa", c.kappa, "selective-family parameter for unb2/bnd");
        sub->add_option("--family-seed", c.family_seed, "seed of the randomized selective family");
    };

    auto* run = app.add_subcommand("run", "simulate one protocol on one tree");
    add_common(run);
    run->add_option("--tree", c.tree, "path | star | caterpillar | kary3 | random");
    run->add_option("--tree-file", c.tree_file, "parent-array tree file (overrides --tree/--n)");
    run->add_option("--max-steps", c.max_steps, "step limit (default: protocol budget)");
    bool allow_incomplete = false;
    bool record = true;
    run->add_flag("--allow-incomplete", allow_incomplete, "exit 0 even if not every rumor arrived");
    run->add_flag("!--summary-only", record, "with --out, write only the summary line");

    auto* scaling = app.add_subcommand("scaling", "completion time over random trees of several sizes");
    add_common(scaling);
    std::string sizes = "64,128,256,512,1024";
    int trials = 10;
    std::string trials_out;
    scaling->add_option("--sizes", sizes, "comma-separated sizes");
    scaling->add_option("--trials", trials, "random trees per size")->check(CLI::PositiveNumber);
    scaling->add_option("--trials-out", trials_out, "per-trial CSV with seeds");

    auto* constructs = app.add_subcommand("constructs", "build and verify a disperser or selective family");
    add_common(constructs);
    std::string kind;
    int k = 2;
    constructs->add_option("kind", kind, "disperser | selfam")->required();
    constructs->add_option("--k", k, "selectivity (selfam)")->check(CLI::PositiveNumber);

    auto* adversary = app.add_subcommand("adversary", "search a caterpillar that starves one rumor");
    add_common(adversary);
    std::string schedule_file;
    std::string generate;
    std::int64_t horizon = 0;
    adversary->add_option("--schedule-file", schedule_file, "schedule JSON {n, T, F}");
    adversary->add_option("--generate", generate, "random-single | all-zero")
        ->check(CLI::IsMember({"random-single", "all-zero"}));
    adversary->add_option("--T", horizon, "schedule horizon");

    auto* lemmas = app.add_subcommand("verify-lemmas", "check the gamma-height lemmas on random trees");
    add_common(lemmas);
    int lemma_trees = 1000;
    int max_n = 512;
    lemmas->add_option("--trials", lemma_trees, "number of random trees")->check(CLI::PositiveNumber);
    lemmas->add_option("--max-n", max_n, "largest tree size")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (run->parsed()) return cmd_run(c, allow_incomplete, record);
        if (scaling->parsed()) return cmd_scaling(c, sizes, trials, trials_out);
        if (constructs->parsed()) return cmd_constructs(c, kind, k);
        if (adversary->parsed()) return cmd_adversary(c, schedule_file, generate, horizon);
        if (lemmas->parsed()) return cmd_verify_lemmas(c, lemma_trees, max_n);
    }
    catch (const rg::NotOblivious& e)
    {
        std::cerr << "NotOblivious: " << e.what() << '\n';
        return 3;
    }
    catch (const rg::ParametersTooLarge& e)
    {
        std::cerr << "ParametersTooLarge: " << e.what() << '\n';
        return 4;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
