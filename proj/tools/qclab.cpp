#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qclab/harness.hpp"

namespace {

// accept "3/4", "0.75", or "3"
bool parse_rational(const std::string& text, mpq_class& out) {
    try {
        auto slash = text.find('/');
        if (slash != std::string::npos) {
            mpz_class num(text.substr(0, slash)), den(text.substr(slash + 1));
            if (den == 0)
                return false;
            out = mpq_class(num, den);
            out.canonicalize();
            return true;
        }
        auto dot = text.find('.');
        if (dot != std::string::npos) {
            std::string digits = text.substr(0, dot) + text.substr(dot + 1);
            mpz_class num(digits);
            mpz_class den;
            mpz_ui_pow_ui(den.get_mpz_t(), 10, text.size() - dot - 1);
            out = mpq_class(num, den);
            out.canonicalize();
            return true;
        }
        out = mpq_class(mpz_class(text));
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

int write_output(const std::string& path, const std::string& payload) {
    if (path.empty() || path == "-") {
        std::cout << payload;
        return 0;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        std::cerr << "cannot open output file: " << path << "\n";
        return 1;
    }
    f << payload;
    return f.good() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"workbench for the blinded modular-square-root outsourcing protocol "
                 "and its key-recovery attacks"};
    app.require_subcommand(1);

    std::string variant_str = "original";
    auto variant_opt = [&](CLI::App* cmd) {
        return cmd->add_option("--variant", variant_str, "original | corrected | koffset")
            ->check(CLI::IsMember({"original", "corrected", "koffset"}));
    };

    auto* cex = app.add_subcommand(
        "counterexample", "replay the x^2 = 9 (mod 83) session that breaks the protocol");
    variant_opt(cex);

    auto* demo = app.add_subcommand("demo-run", "one honest session with transcript JSON");
    unsigned demo_p_bits = 64;
    std::uint64_t demo_seed = 1;
    variant_opt(demo);
    demo->add_option("--p-bits", demo_p_bits, "bit length of the secret prime")
        ->check(CLI::Range(8u, 4096u));
    demo->add_option("--seed", demo_seed, "rng seed")->envname("QCLAB_SEED");

    auto* exp = app.add_subcommand("experiment", "seeded attack trials with summary stats");
    std::string attack_str;
    std::string beta_str, delta_str = "3/4", format = "json", out_path = "-";
    qclab::ExperimentConfig cfg;
    exp->add_option("--attack", attack_str, "gcd | gcd2 | cf | coppersmith")
        ->required()
        ->check(CLI::IsMember({"gcd", "gcd2", "cf", "coppersmith"}));
    auto* exp_variant = variant_opt(exp);
    exp->add_option("--p-bits", cfg.p_bits)->check(CLI::Range(8u, 4096u));
    auto* exp_k_bits =
        exp->add_option("--k-bits", cfg.k_bits, "bit length of k (default min(80, p_bits - 2))")
            ->check(CLI::Range(1u, 4094u));
    exp->add_option("--k1-max", cfg.k1_max);
    exp->add_option("--trials", cfg.trials)->check(CLI::Range(1u, 1000000u));
    exp->add_option("--seed", cfg.seed, "rng seed")->envname("QCLAB_SEED");
    exp->add_flag("--sweep", cfg.sweep, "gcd2: also try small divisors of the gcd");
    exp->add_option("--beta", beta_str, "Coppersmith divisor exponent (rational)");
    exp->add_option("--m", cfg.m, "Coppersmith shift depth");
    exp->add_option("--t", cfg.t, "Coppersmith extra shifts");
    exp->add_option("--delta", delta_str, "LLL parameter (rational in (1/4,1))");
    exp->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
    exp->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
    exp->add_option("--out", out_path, "output path ('-' = stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cex->parsed()) {
            auto v = qclab::variant_from_name(variant_str);
            return qclab::cmd_counterexample(std::cout, *v);
        }
        if (demo->parsed()) {
            auto v = qclab::variant_from_name(variant_str);
            return qclab::cmd_demo_run(std::cout, *v, demo_p_bits, demo_seed);
        }

        cfg.attack = *qclab::attack_from_name(attack_str);
        if (exp_k_bits->count() == 0)
            cfg.k_bits = std::min(80u, cfg.p_bits - 2);
        if (exp_variant->count() > 0) {
            cfg.variant = *qclab::variant_from_name(variant_str);
        } else {
            cfg.variant = cfg.attack == qclab::AttackKind::Cf ? qclab::Variant::KOffset
                                                              : qclab::Variant::Corrected;
        }
        if (cfg.attack == qclab::AttackKind::Cf && cfg.variant != qclab::Variant::KOffset) {
            std::cerr << "the cf attack requires --variant koffset\n";
            return 2;
        }
        if (!beta_str.empty()) {
            mpq_class beta;
            if (!parse_rational(beta_str, beta) || beta <= 0 || beta > 1) {
                std::cerr << "--beta must be a rational in (0, 1]\n";
                return 2;
            }
            cfg.beta = beta;
        }
        if (!parse_rational(delta_str, cfg.delta) || cfg.delta <= mpq_class(1, 4) ||
            cfg.delta >= 1) {
            std::cerr << "--delta must be a rational in (1/4, 1)\n";
            return 2;
        }

        qclab::ExperimentSummary summary = qclab::run_experiment(cfg);
        std::cerr << qclab::summary_note(summary) << "\n";
        std::string payload =
            format == "csv" ? qclab::summary_csv(summary) : qclab::summary_jsonl(summary);
        return write_output(out_path, payload);
    } catch (const qclab::parameter_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
