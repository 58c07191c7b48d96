#include <catch_amalgamated.hpp>
#include <sstream>

#include "ftncovert/ftncovert.hpp"

using namespace ftn;

TEST_CASE("config parsing: lists, ranges, precedence", "[experiment]") {
    const ExperimentConfig cfg = parse_config({
        "alpha=0.25",
        "tau=0.5,0.7",
        "eps=0.02",
        "n_prime=1000:3000:1000",
        "trials=5000",
        "seed=99",
        "spectrum=exact",
        "constraint=both",
        "trials=6000",  // later settings win
    });
    CHECK(cfg.alpha == 0.25);
    CHECK(cfg.taus == std::vector<double>{0.5, 0.7});
    CHECK(cfg.epsilons == std::vector<double>{0.02});
    CHECK(cfg.n_primes == std::vector<int>{1000, 2000, 3000});
    CHECK(cfg.trials == 6000);
    CHECK(cfg.seed == 99);
    CHECK(cfg.spectrum == SpectrumPath::exact);
    CHECK(cfg.constraints == std::vector<std::string>{"kl", "bayes"});
}

TEST_CASE("config parsing: diagnostics name the offending key", "[experiment]") {
    CHECK_THROWS_WITH(parse_config({"frobnicate=1"}),
                      Catch::Matchers::ContainsSubstring("frobnicate"));
    CHECK_THROWS_WITH(parse_config({"alpha=banana"}),
                      Catch::Matchers::ContainsSubstring("alpha"));
    CHECK_THROWS_WITH(parse_config({"n_prime=12.5"}),
                      Catch::Matchers::ContainsSubstring("n_prime"));
    CHECK_THROWS_WITH(parse_config({"tau=0.5;0.7"}),
                      Catch::Matchers::ContainsSubstring("tau"));
    CHECK_THROWS_WITH(parse_config({"just-a-token"}),
                      Catch::Matchers::ContainsSubstring("key=value"));
    // the two noise knobs describe one quantity
    CHECK_THROWS_WITH(parse_config({"sigma_w_sq=3"}),
                      Catch::Matchers::ContainsSubstring("n0"));
    CHECK_NOTHROW(parse_config({"sigma_w_sq=3", "allow_noise_mismatch=1"}));
    CHECK_NOTHROW(parse_config({"sigma_w_sq=3", "n0=6"}));
}

TEST_CASE("config hash tracks the science, not the presentation", "[experiment]") {
    ExperimentConfig a = parse_config({"tau=0.8", "seed=4"});
    ExperimentConfig b = a;
    b.out = "elsewhere.csv";
    b.workers = 7;
    b.cache_dir = "/tmp/x";
    b.strict = true;
    CHECK(config_hash(a) == config_hash(b));
    ExperimentConfig c = a;
    c.seed = 5;
    CHECK(config_hash(a) != config_hash(c));
    ExperimentConfig d = a;
    d.taus = {0.9};
    CHECK(config_hash(a) != config_hash(d));
}

TEST_CASE("figure defaults fill only what is unset", "[experiment]") {
    ExperimentConfig base;
    const ExperimentConfig f2 = figure_defaults(Figure::fig2, base);
    CHECK(f2.taus == std::vector<double>{0.8});
    CHECK(f2.n_primes.size() == 10);
    CHECK(f2.epsilons == std::vector<double>{0.01});
    CHECK(f2.constraints == std::vector<std::string>{"kl", "bayes"});

    const ExperimentConfig f3 = figure_defaults(Figure::fig3, base);
    CHECK(f3.taus.size() == 11);
    CHECK(f3.taus.front() == Catch::Approx(0.5));
    CHECK(f3.taus.back() == Catch::Approx(1.0));
    CHECK(f3.n_primes == std::vector<int>{5000});
    CHECK(f3.constraints == std::vector<std::string>{"kl"});

    const ExperimentConfig f4 = figure_defaults(Figure::fig4, base);
    CHECK(f4.epsilons == std::vector<double>{0.05});

    ExperimentConfig pinned;
    pinned.taus = {0.6};
    CHECK(figure_defaults(Figure::fig3, pinned).taus == std::vector<double>{0.6});
}

TEST_CASE("CSV encoding", "[experiment]") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("with,comma") == "\"with,comma\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("two\nlines") == "\"two\nlines\"");
    CHECK(csv_num(std::numeric_limits<double>::quiet_NaN()).empty());
    // %.17g round-trips exactly
    CHECK(std::stod(csv_num(0.8)) == 0.8);
    CHECK(std::stod(csv_num(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("a small run produces ordered, successful rows", "[experiment]") {
    ExperimentConfig cfg;
    cfg.taus = {0.8, 0.9};
    cfg.n_primes = {64};
    cfg.constraints = {"kl"};
    cfg.seed = 11;
    const auto rows = run_fig3(cfg);

    REQUIRE(rows.size() == 3);  // one baseline + one row per tau
    CHECK(rows[0].scheme == "nyquist");
    CHECK(rows[1].scheme == "ftn");
    CHECK(rows[1].tau == 0.8);
    CHECK(rows[2].tau == 0.9);
    for (const auto& r : rows) {
        CHECK(r.outcome == "ok");
        CHECK(r.error.empty());
        CHECK(r.p_max > 0.0);
        CHECK(r.rate_bps > 0.0);
        CHECK(!std::isnan(r.kl_nats));
        CHECK(std::isnan(r.xi));
    }
    // accelerating buys power at this desk scale
    CHECK(rows[1].p_max > rows[0].p_max);
    CHECK(rows[1].n == ftn_block_length(64, 0.8));

    // rerun, serialize, compare bytes; a second worker must change nothing
    std::ostringstream a, b;
    write_rows(a, figure_defaults(Figure::fig3, cfg), rows);
    ExperimentConfig two = cfg;
    two.workers = 2;
    write_rows(b, figure_defaults(Figure::fig3, two), run_fig3(two));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("# ftn-covert v", 0) == 0);
    CHECK(a.str().find("config-hash=") != std::string::npos);
}

TEST_CASE("error rows carry the message instead of poisoning the run", "[experiment]") {
    ExperimentConfig cfg;
    cfg.taus = {0.8};
    cfg.n_primes = {40};
    cfg.constraints = {"kl"};
    cfg.h_aw_sq = 0.0;  // every row is unbounded, not an error
    const auto rows = run_fig3(cfg);
    for (const auto& r : rows) {
        CHECK(r.outcome == "unbounded");
        CHECK(std::isinf(r.p_max));
    }
}
