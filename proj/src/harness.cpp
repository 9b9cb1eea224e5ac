#include "qclab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace qclab {

namespace {

using json = nlohmann::ordered_json;

unsigned resolve_threads(unsigned requested, unsigned trials) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned t = requested == 0 ? hw : requested;
    return std::max(1u, std::min(t, trials));
}

struct PlantedQueries {
    ProblemInstance inst;
    BlindingSecrets secrets;
    BlindedQuery query;
    // second execution against the same p (gcd2 / cf)
    std::optional<BlindedQuery> query2;
};

PlantedQueries plant_trial(const ExperimentConfig& cfg, Rng& rng) {
    PlantedQueries out;
    out.inst.p = random_prime(cfg.p_bits, rng);
    auto [n, x] = plant_qr(out.inst.p, rng);
    out.inst.n = n;
    out.inst.known_root = x;
    Variant variant = cfg.variant;
    std::tie(out.secrets, out.query) = blind(out.inst, rng, variant, cfg.k_bits, cfg.k1_max);
    if (cfg.attack == AttackKind::GcdPair || cfg.attack == AttackKind::Cf) {
        ProblemInstance second;
        second.p = out.inst.p;
        auto [n2, x2] = plant_qr(out.inst.p, rng);
        second.n = n2;
        second.known_root = x2;
        BlindingSecrets s2;
        BlindedQuery q2;
        std::tie(s2, q2) = blind(second, rng, variant, cfg.k_bits, cfg.k1_max);
        out.query2 = std::move(q2);
    }
    return out;
}

// Post-hoc ground-truth check of a success: the recovered prime must be the
// planted one and must open the instance (x^2 = n mod p).
bool validate_success(const PlantedQueries& pq, AttackReport& rep, Rng& rng) {
    if (!rep.recovered_p || *rep.recovered_p != pq.inst.p)
        return false;
    try {
        auto [n, x] = recover_n_and_root(*rep.recovered_p, pq.query, rng);
        if (n != pq.inst.n)
            return false;
        if (x * x % pq.inst.p != pq.inst.n)
            return false;
        rep.recovered_n = std::move(n);
        rep.recovered_x = std::move(x);
    } catch (const not_a_residue_error&) {
        return false;
    }
    return true;
}

void check_lattice_rows(const PlantedQueries& pq, const CoppersmithParams& params) {
    CoppersmithLattice lat = build_coppersmith_lattice(pq.query, params);
    const mpz_class& k = pq.secrets.k;
    mpz_class pm;
    mpz_pow_ui(pm.get_mpz_t(), pq.inst.p.get_mpz_t(), lat.m);
    for (const auto& row : lat.basis.rows) {
        mpz_class acc = 0, xp = 1;
        for (std::size_t j = 0; j < row.size(); ++j) {
            mpz_class coeff;
            mpz_divexact(coeff.get_mpz_t(), row[j].get_mpz_t(), xp.get_mpz_t());
            acc += coeff * mod_pow(k, j, pm) % pm;
            xp *= lat.x_bound;
        }
        if (floor_mod(acc, pm) != 0)
            throw error("coppersmith lattice row does not vanish at the planted k mod p^m");
    }
}

TrialRecord run_trial(const ExperimentConfig& cfg, unsigned index) {
    Rng rng = Rng::derive(cfg.seed, index);
    TrialRecord rec;
    rec.trial = index;
    PlantedQueries pq = plant_trial(cfg, rng);
    rec.planted_p = pq.inst.p;

    switch (cfg.attack) {
    case AttackKind::GcdSingle:
        rec.report = gcd_single(pq.query, rng);
        break;
    case AttackKind::GcdPair:
        rec.report = gcd_pair(pq.query.d2_b, pq.query2->d2_b, pq.query.p_b, cfg.sweep);
        break;
    case AttackKind::Cf:
        rec.report = cf_attack(pq.query.d2_b, pq.query2->d2_b, pq.query.p_b, cfg.k1_max);
        break;
    case AttackKind::Coppersmith: {
        CoppersmithParams params = CoppersmithParams::defaults_for(pq.query.p_b);
        if (cfg.beta)
            params.beta = *cfg.beta;
        params.m = cfg.m;
        params.t = cfg.t;
        params.delta = cfg.delta;
        if (cfg.check_lattice)
            check_lattice_rows(pq, params);
        rec.report = coppersmith_attack(pq.query, params);
        break;
    }
    }

    rec.validated = rec.report.success && validate_success(pq, rec.report, rng);
    rec.success = rec.report.success && rec.validated;
    return rec;
}

} // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    if (cfg.trials < 1)
        throw parameter_error("run_experiment: trials must be >= 1");
    if (cfg.attack == AttackKind::Cf && cfg.variant != Variant::KOffset)
        throw parameter_error("run_experiment: the cf attack targets the koffset variant");
    if (cfg.q_bits != 0 && cfg.q_bits != cfg.p_bits)
        throw parameter_error("run_experiment: p and q must share a bit length");

    ExperimentSummary s;
    s.config = cfg;
    s.trials = cfg.trials;
    s.records.resize(cfg.trials);

    unsigned nthreads = resolve_threads(cfg.threads, cfg.trials);
    std::atomic<unsigned> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex err_mu;
    auto worker = [&] {
        for (;;) {
            unsigned i = next.fetch_add(1);
            if (i >= cfg.trials || failed.load())
                break;
            try {
                s.records[i] = run_trial(cfg, i);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!failed.exchange(true))
                    first_error = e.what();
            }
        }
    };
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (unsigned i = 0; i < nthreads; ++i)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (failed.load())
        throw error("run_experiment: trial failed: " + first_error);

    std::vector<std::int64_t> times;
    times.reserve(cfg.trials);
    for (const auto& r : s.records) {
        if (r.success)
            ++s.successes;
        times.push_back(r.report.micros);
    }
    s.rate = static_cast<double>(s.successes) / static_cast<double>(s.trials);
    std::sort(times.begin(), times.end());
    s.mean_micros = std::accumulate(times.begin(), times.end(), std::int64_t{0}) /
                    static_cast<std::int64_t>(times.size());
    s.p50_micros = times[times.size() / 2];
    s.p90_micros = times[std::min(times.size() - 1, (times.size() * 9) / 10)];
    return s;
}

namespace {

json trial_line(const TrialRecord& r) {
    json j;
    j["trial"] = r.trial;
    j["success"] = r.success;
    j["validated"] = r.validated;
    j["tries"] = r.report.tries;
    j["recovered_p"] = r.report.recovered_p ? json(r.report.recovered_p->get_str()) : json();
    if (r.report.recovered_k)
        j["recovered_k"] = r.report.recovered_k->get_str();
    if (r.report.recovered_r2)
        j["recovered_r2"] = r.report.recovered_r2->get_str();
    if (r.report.recovered_k1)
        j["recovered_k1"] = r.report.recovered_k1->get_str();
    return j;
}

json summary_line(const ExperimentSummary& s) {
    const ExperimentConfig& c = s.config;
    json j;
    j["summary"] = json{{"attack", attack_name(c.attack)},
                        {"variant", variant_name(c.variant)},
                        {"p_bits", c.p_bits},
                        {"k_bits", c.k_bits},
                        {"k1_max", c.k1_max},
                        {"trials", s.trials},
                        {"seed", c.seed},
                        {"successes", s.successes},
                        {"rate", s.rate}};
    return j;
}

} // namespace

std::string summary_jsonl(const ExperimentSummary& s) {
    std::string out;
    for (const auto& r : s.records) {
        out += trial_line(r).dump();
        out += '\n';
    }
    out += summary_line(s).dump();
    out += '\n';
    return out;
}

std::string summary_csv(const ExperimentSummary& s) {
    std::string out = "trial,p_bits,k_bits,success,micros\n";
    for (const auto& r : s.records) {
        out += std::to_string(r.trial);
        out += ',';
        out += std::to_string(s.config.p_bits);
        out += ',';
        out += std::to_string(s.config.k_bits);
        out += ',';
        out += r.success ? '1' : '0';
        out += ',';
        out += std::to_string(r.report.micros);
        out += '\n';
    }
    return out;
}

std::string summary_note(const ExperimentSummary& s) {
    std::ostringstream os;
    os << attack_name(s.config.attack) << ": " << s.successes << "/" << s.trials
       << " recovered (rate " << s.rate << "), micros mean=" << s.mean_micros
       << " p50=" << s.p50_micros << " p90=" << s.p90_micros;
    return os.str();
}

namespace {

struct Checkpoint {
    const char* label;
    std::string got;
    std::string expect;
};

int report_checkpoints(std::ostream& out, const std::vector<Checkpoint>& cps) {
    int rc = 0;
    for (const auto& cp : cps) {
        bool ok = cp.got == cp.expect;
        out << cp.label << " = " << cp.got;
        if (ok) {
            out << "   [ok]\n";
        } else {
            out << "   [MISMATCH, expected " << cp.expect << "]\n";
            rc = 1;
            break;
        }
    }
    return rc;
}

std::string quad_str(const mpz_class& u, const mpz_class& v, const mpz_class& w) {
    return u.get_str() + " + " + v.get_str() + "*sqrt(" + w.get_str() + ")";
}

} // namespace

int cmd_counterexample(std::ostream& out, Variant variant) {
    ProblemInstance inst;
    inst.p = 83;
    inst.n = 9;

    RunOverrides ov;
    ov.blind.q = 97;
    ov.blind.r1 = 21;
    ov.blind.r2 = 73;
    ov.blind.k = 13;
    ov.forced_a = {3345};

    Rng rng(0); // unused: every choice above is pinned
    out << "outsourcing x^2 = 9 (mod 83) with q=97 r1=21 r2=73 k=13, variant "
        << variant_name(variant) << "\n";

    Transcript t;
    try {
        t = honest_run(inst, rng, variant, 6, 100, &ov);
    } catch (const std::exception& e) {
        out << "protocol failure: " << e.what() << "\n";
        return 1;
    }

    if (variant == Variant::Corrected) {
        out << transcript_json(t) << "\n";
        if (t.outcome.kind == OutcomeKind::Root &&
            t.outcome.x * t.outcome.x % inst.p == inst.n) {
            out << "outcome: ROOT(" << t.outcome.x.get_str() << ") verifies x^2 = 9 (mod 83)\n";
            return 0;
        }
        out << "outcome: expected a verified root\n";
        return 1;
    }
    if (variant == Variant::KOffset) {
        // the offset variant stays incorrect: the client cannot undo k1
        out << transcript_json(t) << "\n";
        if (t.outcome.kind != OutcomeKind::Root) {
            out << "outcome: recovery fails as expected under the k1 offset\n";
            return 0;
        }
        out << "outcome: unexpected root\n";
        return 1;
    }

    std::vector<Checkpoint> cps;
    cps.push_back({"n'", t.query.n_b.get_str(), "-1734"});
    cps.push_back({"d'", t.query.d_b.get_str(), "28"});
    cps.push_back({"d2'", t.query.d2_b.get_str(), "6028"});
    cps.push_back({"p'", t.query.p_b.get_str(), "8051"});
    if (int rc = report_checkpoints(out, cps))
        return rc;

    const Round& r0 = t.rounds.front();
    out << "server picks a = " << r0.a.get_str() << ", a^2 - n' = "
        << mpz_class(r0.a * r0.a - t.query.n_b).get_str() << "\n";
    cps = {{"R1'", r0.r1_b.get_str(), "3927"},
           {"verdict", std::string(r0.accepted ? "Y" : "N"), "Y"}};
    if (int rc = report_checkpoints(out, cps))
        return rc;

    if (!t.r2_b) {
        out << "missing R2'\n";
        return 1;
    }
    cps = {{"R2'", quad_str(t.r2_b->u, t.r2_b->v, t.r2_b->w),
            "5592 + 3935*sqrt(7920)"}};
    if (int rc = report_checkpoints(out, cps))
        return rc;

    const Outcome& oc = t.outcome;
    cps = {{"x = R2' mod p", quad_str(oc.u, oc.v, oc.w), "31 + 34*sqrt(35)"}};
    if (int rc = report_checkpoints(out, cps))
        return rc;

    QuadExtElem x(oc.u, oc.v, oc.w, inst.p);
    QuadExtElem xsq = quad_mul(x, x);
    cps = {{"x^2", quad_str(xsq.u, xsq.v, xsq.w), "4 + 33*sqrt(35)"},
           {"outcome",
            std::string(oc.kind == OutcomeKind::NonInteger ? "NON_INTEGER" : "other"),
            "NON_INTEGER"}};
    if (int rc = report_checkpoints(out, cps))
        return rc;

    out << "all checkpoints match: the honest run fails to return an integer root\n";
    return 0;
}

int cmd_demo_run(std::ostream& out, Variant variant, unsigned p_bits, std::uint64_t seed) {
    Rng rng(seed);
    ProblemInstance inst;
    inst.p = random_prime(p_bits, rng);
    auto [n, x] = plant_qr(inst.p, rng);
    inst.n = n;
    inst.known_root = x;

    unsigned k_bits = std::min(80u, p_bits - 2);
    Transcript t;
    try {
        t = honest_run(inst, rng, variant, k_bits);
    } catch (const protocol_failure_error& e) {
        out << "protocol failure: " << e.what() << "\n";
        return 1;
    }
    out << transcript_json(t) << "\n";

    bool rooted = t.outcome.kind == OutcomeKind::Root &&
                  t.outcome.x * t.outcome.x % inst.p == floor_mod(inst.n, inst.p);
    if (variant == Variant::Corrected)
        return rooted ? 0 : 1;
    return rooted ? 1 : 0;
}

} // namespace qclab
