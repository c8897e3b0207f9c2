#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ncup/cli.hpp"

int main(int argc, char** argv) {
    using ncup::cli::Command;
    ncup::cli::RunConfig cfg;
    std::string out_path;

    CLI::App app{"Uncertainty certificates for frames over finite-dimensional C*-algebras"};
    app.set_version_flag("--version", ncup::cli::kVersion);
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", out_path, "Write the report here instead of stdout");
        sub->add_option("--rel-tol", cfg.rel_tol, "Relative support threshold, in (0, 1)");
        sub->add_option("--seed", cfg.seed, "Seed for randomized runs");
    };
    auto add_frames = [&](CLI::App* sub) {
        sub->add_option("--frame-tau", cfg.frame_tau, "Frame file for tau")->required();
        sub->add_option("--frame-omega", cfg.frame_omega, "Frame file for omega")->required();
    };

    auto* certify = app.add_subcommand("certify", "Certify the sparsity bound for one vector");
    add_common(certify);
    add_frames(certify);
    certify->add_option("--vector", cfg.vector, "Module vector file")->required();

    auto* coherence = app.add_subcommand("coherence", "Cross coherence of two frames");
    add_common(coherence);
    add_frames(coherence);

    auto* parsevalize = app.add_subcommand("parsevalize", "Canonical Parseval frame of a frame file");
    add_common(parsevalize);
    parsevalize->add_option("--frame-tau", cfg.frame_tau, "Frame file")->required();

    auto* audit = app.add_subcommand("audit", "Randomized audit over Parseval frame pairs");
    add_common(audit);
    audit->add_option("--algebra", cfg.algebra, "Block sizes, e.g. [1,2] or 1,2");
    audit->add_option("--d", cfg.d, "Module rank");
    audit->add_option("--n-tau", cfg.n_tau, "Vectors in tau (default d+1)");
    audit->add_option("--n-omega", cfg.n_omega, "Vectors in omega (default 2d)");
    audit->add_option("--trials", cfg.trials, "Number of trials");

    auto* tao = app.add_subcommand("tao", "Minimum support sum for the prime-length DFT");
    add_common(tao);
    tao->add_option("--p", cfg.p, "Prime length")->required();
    tao->add_option("--mode", cfg.mode, "exhaustive or sampled");
    tao->add_option("--samples", cfg.samples, "Support pairs drawn in sampled mode");
    tao->add_flag("--long", cfg.long_run, "Allow exhaustive search beyond p = 7");

    auto* conjecture = app.add_subcommand("conjecture", "Audit the algebra-valued support-sum bound");
    add_common(conjecture);
    conjecture->add_option("--algebra", cfg.algebra, "Block sizes, e.g. [2]");
    conjecture->add_option("--p", cfg.p, "Prime length")->required();
    conjecture->add_option("--trials", cfg.trials, "Random vectors to test");
    conjecture->add_option("--exhaustive", cfg.exhaustive, "Run the support-pattern search (default: p <= 5)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ncup::cli::kInvalidInput;
    }

    if (*certify) cfg.command = Command::Certify;
    if (*coherence) cfg.command = Command::Coherence;
    if (*parsevalize) cfg.command = Command::Parsevalize;
    if (*audit) cfg.command = Command::Audit;
    if (*tao) cfg.command = Command::Tao;
    if (*conjecture) cfg.command = Command::Conjecture;
    // --trials defaults differ: the audit default is 1000, the conjecture default 10^4
    if (*conjecture && conjecture->count("--trials") == 0) cfg.trials = 10000;

    if (out_path.empty()) return ncup::cli::run(cfg, std::cout, std::cerr);
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "error: --out: cannot open " << out_path << '\n';
        return ncup::cli::kInvalidInput;
    }
    return ncup::cli::run(cfg, out, std::cerr);
}
