"""Workbench for the blinded modular-square-root outsourcing protocol.

Thin pure-Python facade over the C++ core: number-theoretic primitives
(Cipolla square roots, quadratic-extension arithmetic), exact LLL and
continued-fraction engines, the three blinding variants of the outsourcing
protocol, and the passive key-recovery attacks with a seeded experiment
runner.
"""

from ._qclab import (
    blind,
    cf_attack,
    cf_convergents,
    cipolla_sqrt,
    coppersmith_attack,
    counterexample_report,
    euler_symbol,
    ext_gcd,
    gcd_pair,
    gcd_single,
    honest_run,
    is_prime,
    lll_reduce,
    mod_pow,
    plant_qr,
    random_prime,
    recover_n_and_root,
    recover_p_given_r2,
    run_experiment,
    small_integer_roots,
    NotAResidueError,
    ParameterError,
)

__all__ = [
    "blind",
    "cf_attack",
    "cf_convergents",
    "cipolla_sqrt",
    "coppersmith_attack",
    "counterexample_report",
    "euler_symbol",
    "ext_gcd",
    "gcd_pair",
    "gcd_single",
    "honest_run",
    "is_prime",
    "lll_reduce",
    "mod_pow",
    "plant_qr",
    "random_prime",
    "recover_n_and_root",
    "recover_p_given_r2",
    "run_experiment",
    "small_integer_roots",
    "NotAResidueError",
    "ParameterError",
]

__version__ = "0.1.0"
