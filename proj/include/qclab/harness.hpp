#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qclab/attacks.hpp"
#include "qclab/protocol.hpp"

namespace qclab {

struct ExperimentConfig {
    AttackKind attack = AttackKind::GcdSingle;
    Variant variant = Variant::Corrected; // cf forces KOffset
    unsigned p_bits = 512;
    unsigned q_bits = 0; // 0 -> same as p_bits
    unsigned k_bits = 80;
    unsigned k1_max = 100;
    unsigned trials = 100;
    std::uint64_t seed = 1;
    bool sweep = false; // gcd_pair small-divisor sweep
    std::optional<mpq_class> beta; // Coppersmith; default derived per query
    unsigned m = 3;
    unsigned t = 1;
    mpq_class delta{3, 4};
    unsigned threads = 0; // 0 -> hardware concurrency
    bool check_lattice = false; // assert lattice rows vanish at the planted k
};

struct TrialRecord {
    unsigned trial = 0;
    bool success = false;   // attack success AND ground-truth validation
    bool validated = false; // recovered_p == planted p, recovered x^2 == n
    AttackReport report;
    mpz_class planted_p;
};

struct ExperimentSummary {
    ExperimentConfig config;
    unsigned trials = 0;
    unsigned successes = 0;
    double rate = 0.0;
    std::int64_t mean_micros = 0;
    std::int64_t p50_micros = 0;
    std::int64_t p90_micros = 0;
    std::vector<TrialRecord> records;
};

/// Run config.trials independent trials. Trial i draws all randomness from
/// Rng::derive(config.seed, i), so the summary is a pure function of
/// (config, seed) no matter how many worker threads execute it. Every
/// reported success is cross-checked against the planted ground truth.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

/// One JSON object per trial followed by a final summary object. Contains
/// only seed-determined fields: byte-identical across reruns and thread
/// counts. Timing lives in the CSV emission and in ExperimentSummary.
std::string summary_jsonl(const ExperimentSummary& s);

/// CSV with header trial,p_bits,k_bits,success,micros.
std::string summary_csv(const ExperimentSummary& s);

/// Human-readable timing/rate note (not part of the deterministic output).
std::string summary_note(const ExperimentSummary& s);

/// Replay the published counterexample session x^2 = 9 (mod 83) with the
/// fixed choices q=97, r1=21, r2=73, k=13, a=3345, printing each checkpoint.
/// Returns 0 when every intermediate matches the expected value. With
/// Variant::Corrected the same secrets end in a genuine root instead.
int cmd_counterexample(std::ostream& out, Variant variant = Variant::Original);

/// One honest session on a fresh random instance; prints the transcript JSON.
/// Exit 0 when the outcome matches the variant's expectation (Corrected ->
/// Root; Original/KOffset -> a failed recovery).
int cmd_demo_run(std::ostream& out, Variant variant, unsigned p_bits, std::uint64_t seed);

} // namespace qclab
