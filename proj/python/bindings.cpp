#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "qclab/attacks.hpp"
#include "qclab/harness.hpp"

#include <sstream>

namespace py = pybind11;

namespace pybind11::detail {

// mpz_class <-> python int, via decimal strings
template <>
struct type_caster<mpz_class> {
    PYBIND11_TYPE_CASTER(mpz_class, const_name("int"));

    bool load(handle src, bool) {
        if (!PyLong_Check(src.ptr()))
            return false;
        value = mpz_class(py::str(src).cast<std::string>(), 10);
        return true;
    }

    static handle cast(const mpz_class& v, return_value_policy, handle) {
        return PyLong_FromString(v.get_str().c_str(), nullptr, 10);
    }
};

// mpq_class <-> python Fraction (or int)
template <>
struct type_caster<mpq_class> {
    PYBIND11_TYPE_CASTER(mpq_class, const_name("Fraction"));

    bool load(handle src, bool) {
        if (PyLong_Check(src.ptr())) {
            value = mpq_class(mpz_class(py::str(src).cast<std::string>(), 10));
            return true;
        }
        if (py::hasattr(src, "numerator") && py::hasattr(src, "denominator")) {
            mpz_class num(py::str(src.attr("numerator")).cast<std::string>(), 10);
            mpz_class den(py::str(src.attr("denominator")).cast<std::string>(), 10);
            if (den == 0)
                return false;
            value = mpq_class(num, den);
            value.canonicalize();
            return true;
        }
        return false;
    }

    static handle cast(const mpq_class& v, return_value_policy, handle) {
        py::object fraction = py::module_::import("fractions").attr("Fraction");
        py::object num = py::reinterpret_steal<py::object>(
            PyLong_FromString(v.get_num().get_str().c_str(), nullptr, 10));
        py::object den = py::reinterpret_steal<py::object>(
            PyLong_FromString(v.get_den().get_str().c_str(), nullptr, 10));
        return fraction(num, den).release();
    }
};

} // namespace pybind11::detail

namespace {

py::object json_to_py(const std::string& text) {
    return py::module_::import("json").attr("loads")(text);
}

qclab::Variant variant_arg(const std::string& name) {
    auto v = qclab::variant_from_name(name);
    if (!v)
        throw py::value_error("unknown variant: " + name);
    return *v;
}

} // namespace

PYBIND11_MODULE(_qclab, m) {
    m.doc() = "blinded modular-square-root outsourcing workbench";

    py::register_exception<qclab::not_a_residue_error>(m, "NotAResidueError", PyExc_ValueError);
    py::register_exception<qclab::parameter_error>(m, "ParameterError", PyExc_ValueError);

    // number theory
    m.def("mod_pow", &qclab::mod_pow, py::arg("base"), py::arg("exp"), py::arg("m"));
    m.def("ext_gcd", [](const mpz_class& a, const mpz_class& b) {
        auto r = qclab::ext_gcd(a, b);
        return py::make_tuple(r.g, r.x, r.y);
    });
    m.def("is_prime", &qclab::is_prime, py::arg("n"), py::arg("rounds") = 16);
    m.def("euler_symbol", &qclab::euler_symbol, py::arg("a"), py::arg("p"));
    m.def("random_prime", [](unsigned bits, std::uint64_t seed) {
        qclab::Rng rng(seed);
        return qclab::random_prime(bits, rng);
    }, py::arg("bits"), py::arg("seed"));
    m.def("cipolla_sqrt", [](const mpz_class& n, const mpz_class& p, std::uint64_t seed) {
        qclab::Rng rng(seed);
        return qclab::cipolla_sqrt(n, p, rng);
    }, py::arg("n"), py::arg("p"), py::arg("seed") = 1);
    m.def("plant_qr", [](const mpz_class& p, std::uint64_t seed) {
        qclab::Rng rng(seed);
        auto [n, x] = qclab::plant_qr(p, rng);
        return py::make_tuple(n, x);
    }, py::arg("p"), py::arg("seed"));

    // diophantine engines
    m.def("cf_convergents", [](const mpz_class& num, const mpz_class& den) {
        py::list out;
        for (const auto& c : qclab::cf_convergents(num, den))
            out.append(py::make_tuple(c.h, c.l));
        return out;
    }, py::arg("num"), py::arg("den"));
    m.def("lll_reduce", [](const std::vector<std::vector<mpz_class>>& rows,
                           const mpq_class& delta) {
        qclab::LatticeBasis basis;
        basis.rows = rows;
        return qclab::lll_reduce(basis, delta).rows;
    }, py::arg("rows"), py::arg("delta") = mpq_class(3, 4));
    m.def("small_integer_roots", &qclab::small_integer_roots, py::arg("poly"),
          py::arg("bound"));

    // protocol
    m.def("blind", [](const mpz_class& p, const mpz_class& n, std::uint64_t seed,
                      const std::string& variant, unsigned k_bits, unsigned k1_max) {
        qclab::ProblemInstance inst{p, n, std::nullopt};
        qclab::Rng rng(seed);
        auto [secrets, query] = qclab::blind(inst, rng, variant_arg(variant), k_bits, k1_max);
        py::dict s, q;
        s["q"] = secrets.q;
        s["r1"] = secrets.r1;
        s["r2"] = secrets.r2;
        s["k"] = secrets.k;
        s["k1"] = secrets.k1 ? py::object(py::cast(*secrets.k1)) : py::object(py::none());
        s["variant"] = variant;
        q["n_b"] = query.n_b;
        q["d_b"] = query.d_b;
        q["d2_b"] = query.d2_b;
        q["p_b"] = query.p_b;
        return py::make_tuple(s, q);
    }, py::arg("p"), py::arg("n"), py::arg("seed"), py::arg("variant") = "corrected",
       py::arg("k_bits") = 80, py::arg("k1_max") = 100);
    m.def("honest_run", [](const mpz_class& p, const mpz_class& n, std::uint64_t seed,
                           const std::string& variant, unsigned k_bits, unsigned k1_max) {
        qclab::ProblemInstance inst{p, n, std::nullopt};
        qclab::Rng rng(seed);
        auto t = qclab::honest_run(inst, rng, variant_arg(variant), k_bits, k1_max);
        return json_to_py(qclab::transcript_json(t));
    }, py::arg("p"), py::arg("n"), py::arg("seed"), py::arg("variant") = "corrected",
       py::arg("k_bits") = 80, py::arg("k1_max") = 100);

    // attacks (queries given as the public tuple)
    auto query_from = [](const mpz_class& n_b, const mpz_class& d_b, const mpz_class& d2_b,
                         const mpz_class& p_b) {
        return qclab::BlindedQuery{n_b, d_b, d2_b, p_b};
    };
    m.def("gcd_single", [query_from](const mpz_class& n_b, const mpz_class& d_b,
                                     const mpz_class& d2_b, const mpz_class& p_b,
                                     std::uint64_t seed, unsigned max_tries) {
        qclab::Rng rng(seed);
        auto rep = qclab::gcd_single(query_from(n_b, d_b, d2_b, p_b), rng, max_tries);
        return json_to_py(qclab::attack_report_json(rep));
    }, py::arg("n_b"), py::arg("d_b"), py::arg("d2_b"), py::arg("p_b"), py::arg("seed") = 1,
       py::arg("max_tries") = 64);
    m.def("gcd_pair", [](const mpz_class& d2_a, const mpz_class& d2_b, const mpz_class& p_b,
                         bool sweep) {
        return json_to_py(qclab::attack_report_json(qclab::gcd_pair(d2_a, d2_b, p_b, sweep)));
    }, py::arg("d2_a"), py::arg("d2_b"), py::arg("p_b"), py::arg("sweep") = false);
    m.def("cf_attack", [](const mpz_class& d2_a, const mpz_class& d2_b, const mpz_class& p_b,
                          unsigned k1_max) {
        return json_to_py(qclab::attack_report_json(qclab::cf_attack(d2_a, d2_b, p_b, k1_max)));
    }, py::arg("d2_a"), py::arg("d2_b"), py::arg("p_b") = 0, py::arg("k1_max") = 100);
    m.def("recover_p_given_r2",
          [](const mpz_class& d2, const mpz_class& r2, unsigned k1_max) -> py::object {
        auto hit = qclab::recover_p_given_r2(d2, r2, k1_max);
        if (!hit)
            return py::none();
        return py::make_tuple(hit->first, hit->second);
    }, py::arg("d2"), py::arg("r2"), py::arg("k1_max") = 100);
    m.def("coppersmith_attack", [query_from](const mpz_class& n_b, const mpz_class& d_b,
                                             const mpz_class& d2_b, const mpz_class& p_b,
                                             unsigned m_, unsigned t_) {
        auto query = query_from(n_b, d_b, d2_b, p_b);
        auto params = qclab::CoppersmithParams::defaults_for(p_b);
        params.m = m_;
        params.t = t_;
        return json_to_py(qclab::attack_report_json(qclab::coppersmith_attack(query, params)));
    }, py::arg("n_b"), py::arg("d_b"), py::arg("d2_b"), py::arg("p_b"), py::arg("m") = 3,
       py::arg("t") = 1);
    m.def("recover_n_and_root", [query_from](const mpz_class& p, const mpz_class& n_b,
                                             const mpz_class& d_b, const mpz_class& d2_b,
                                             const mpz_class& p_b, std::uint64_t seed) {
        qclab::Rng rng(seed);
        auto [n, x] = qclab::recover_n_and_root(p, query_from(n_b, d_b, d2_b, p_b), rng);
        return py::make_tuple(n, x);
    }, py::arg("p"), py::arg("n_b"), py::arg("d_b"), py::arg("d2_b"), py::arg("p_b"),
       py::arg("seed") = 1);

    // harness
    m.def("run_experiment", [](const std::string& attack, const std::string& variant,
                               unsigned p_bits, unsigned k_bits, unsigned k1_max,
                               unsigned trials, std::uint64_t seed, bool sweep, unsigned m_,
                               unsigned t_, unsigned threads) {
        qclab::ExperimentConfig cfg;
        auto kind = qclab::attack_from_name(attack);
        if (!kind)
            throw py::value_error("unknown attack: " + attack);
        cfg.attack = *kind;
        cfg.variant = variant_arg(variant);
        cfg.p_bits = p_bits;
        cfg.k_bits = k_bits;
        cfg.k1_max = k1_max;
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.sweep = sweep;
        cfg.m = m_;
        cfg.t = t_;
        cfg.threads = threads;
        auto summary = qclab::run_experiment(cfg);
        py::dict out;
        out["trials"] = summary.trials;
        out["successes"] = summary.successes;
        out["rate"] = summary.rate;
        out["jsonl"] = qclab::summary_jsonl(summary);
        out["csv"] = qclab::summary_csv(summary);
        return out;
    }, py::arg("attack"), py::arg("variant") = "corrected", py::arg("p_bits") = 64,
       py::arg("k_bits") = 16, py::arg("k1_max") = 100, py::arg("trials") = 10,
       py::arg("seed") = 1, py::arg("sweep") = false, py::arg("m") = 3, py::arg("t") = 1,
       py::arg("threads") = 0);
    m.def("counterexample_report", [](const std::string& variant) {
        std::ostringstream os;
        int rc = qclab::cmd_counterexample(os, variant_arg(variant));
        return py::make_tuple(rc, os.str());
    }, py::arg("variant") = "original");
}
