"""Command-line interface: ``swapsteer <command> ...``.

Exit codes: 0 success, 2 input validation, 3 internal inconsistency,
4 I/O, 5 optimizer non-convergence, 6 self-test gate, 7 Eve search
infeasible. The default seed can be overridden with ``SWAPSTEER_SEED``.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys

import numpy as np

from .assemblage import ppt_min_eigenvalue
from .errors import CertificationGateError, FullRankError, InconsistencyError, SeparableSourceError
from .formats import (
    FormatError,
    certificate_to_dict,
    load_scenario,
    nlhv_to_dict,
    prob_table_from_dict,
    prob_table_to_dict,
    read_json,
    report_to_dict,
    write_json,
)
from .linalg import hermitian_eig, kron, max_abs, permute_subsystems, random_state
from .network import (
    is_swap_steerable,
    joint_probability,
    werner_scenario,
    werner_witness_analytic,
    witness_value,
    witness_value_correlator_form,
)
from .qobj import Povm, bell_basis, observable_from_povm, werner_state
from .randomness import MAX_EVE_DIM, RandomnessReport, certified_guessing_probability, eve_search
from .selftest import Realization, extract_local_unitaries
from .sohs import OptimizerConfig, build_nlhv_model, nlhv_prob_table, sohs_bound_optimize

EXIT_OK, EXIT_INPUT, EXIT_INCONSISTENT, EXIT_IO, EXIT_NONCONVERGED, EXIT_GATE, EXIT_INFEASIBLE = 0, 2, 3, 4, 5, 6, 7
SEED_ENV = "SWAPSTEER_SEED"
WITNESS_FORM_TOL = 1e-9

log = logging.getLogger("swapsteer")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise CliError(EXIT_INPUT, f"{SEED_ENV}={raw!r} is not an integer") from None


def _resolve_seed(flag, file_seed) -> int:
    if flag is not None:
        return flag
    return file_seed if file_seed is not None else default_seed()


def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from None


def _load(path):
    try:
        return load_scenario(path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from None


def bob_observable(sf) -> np.ndarray:
    """Bob's four-outcome observable with the eigenphases of the shared Bell ordering."""
    return observable_from_povm(sf.scenario.bob, 1, exponents=sf.ordering.eigenphases)


def decomposition_from_sources(ensemble, cutoff: float = 1e-12) -> list:
    """Pure product terms from the eigendecompositions of every source component."""
    terms = []
    for w, r1, r2 in ensemble.components:
        v1, e1 = hermitian_eig(r1)
        v2, e2 = hermitian_eig(r2)
        for a in np.flatnonzero(v1 > cutoff):
            for b in np.flatnonzero(v2 > cutoff):
                terms.append((w * v1[a] * v2[b], e1[:, a], e2[:, b]))
    return terms


# commands ---------------------------------------------------------------

def cmd_witness(args) -> int:
    sf = _load(args.scenario)
    p = joint_probability(sf.scenario)
    w = witness_value(p)
    wc = witness_value_correlator_form(p)
    report = {
        "p": prob_table_to_dict(p)["p"],
        "witness": w,
        "witness_correlator_form": wc,
        "tolerance": args.tol,
        "verdict": "swap-steerable" if is_swap_steerable(w, args.tol) else "not demonstrated",
    }
    _emit(write_json(report), args.output)
    if abs(w - wc) > WITNESS_FORM_TOL:
        raise CliError(EXIT_INCONSISTENT, f"witness forms disagree by {abs(w - wc):.3e}")
    return EXIT_OK


def _grid(args) -> np.ndarray:
    if not -1 / 3 <= args.lo < args.hi <= 1:
        raise CliError(EXIT_INPUT, "grid bounds must satisfy -1/3 <= lo < hi <= 1")
    if args.n < 2:
        raise CliError(EXIT_INPUT, "grid needs at least two points")
    return np.linspace(args.lo, args.hi, args.n)


SWEEP_COLUMNS = ("alpha1", "alpha2", "witness", "analytic", "abs_error", "steerable",
                 "ppt_min_eig_1", "ppt_min_eig_2")


def werner_sweep_rows(alpha1s, alpha2s, tol: float = 1e-9):
    ppt = {a: ppt_min_eigenvalue(werner_state(a)) for a in set(alpha1s) | set(alpha2s)}
    rows = []
    for a1 in alpha1s:
        for a2 in alpha2s:
            w = witness_value(joint_probability(werner_scenario(a1, a2)))
            exact = werner_witness_analytic(a1, a2)
            rows.append((a1, a2, w, exact, abs(w - exact), int(is_swap_steerable(w, tol)), ppt[a1], ppt[a2]))
    return rows


def cmd_werner_sweep(args) -> int:
    alphas = [float(a) for a in _grid(args)]
    if args.alpha1 is not None:
        if not -1 / 3 <= args.alpha1 <= 1:
            raise CliError(EXIT_INPUT, "alpha1 outside [-1/3, 1]")
        rows = werner_sweep_rows([args.alpha1], alphas, args.tol)
    else:
        rows = werner_sweep_rows(alphas, alphas, args.tol)
    if args.format == "json":
        text = write_json([dict(zip(SWEEP_COLUMNS, r)) for r in rows])
    else:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(SWEEP_COLUMNS)
        for r in rows:
            out.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in r])
        text = buf.getvalue()
    _emit(text, args.output)
    return EXIT_OK


def cmd_sohs_bound(args) -> int:
    if args.restarts < 1:
        raise CliError(EXIT_INPUT, "restarts must be at least 1")
    cfg = OptimizerConfig(restarts=args.restarts, max_iters=args.max_iters, step_tol=args.step_tol,
                          spread_tol=args.spread_tol, seed=_resolve_seed(args.seed, None))
    alice = bell_basis() if args.povm == "bell" else Povm.computational(4)
    res = sohs_bound_optimize(alice, cfg)
    report = {
        "bound": res.bound,
        "spread": res.spread,
        "angles": list(res.angles),
        "outcome": res.outcome,
        "iterations": res.iterations,
        "restarts": cfg.restarts,
        "seed": cfg.seed,
        "converged": res.converged,
        "warning": res.warning,
    }
    _emit(write_json(report), args.output)
    if not res.converged:
        raise CliError(EXIT_NONCONVERGED, res.warning)
    return EXIT_OK


def _realization(sf, decomposition) -> Realization:
    r = Realization.from_decomposition(decomposition, bob_observable(sf), sf.scenario.bob_dims)
    gap = max_abs(r.rho_ab - sf.scenario.ensemble.state_ab())
    if gap > 1e-9:
        raise CliError(EXIT_INPUT, f"decomposition differs from the source state by {gap:.3e}")
    return r


def cmd_selftest(args) -> int:
    sf = _load(args.scenario)
    if sf.decomposition is None:
        raise CliError(EXIT_INPUT, "self-test needs a 'decomposition' field")
    r = _realization(sf, sf.decomposition)
    try:
        cert = extract_local_unitaries(r)
    except (CertificationGateError, SeparableSourceError, FullRankError) as exc:
        raise CliError(EXIT_GATE, f"self-test gate: {exc}") from None
    _emit(write_json(certificate_to_dict(cert)), args.output)
    if not cert.passed(args.tol):
        raise CliError(EXIT_GATE, "certificate residuals above tolerance")
    return EXIT_OK


def eve_register_povm(d_e: int) -> Povm:
    """Outcome ``b`` collects the basis states ``e`` with ``e = b mod 4``."""
    els = np.zeros((4, d_e, d_e), dtype=complex)
    for e in range(d_e):
        els[e % 4, e, e] = 1
    return Povm(els)


def certified_report(sf, rng, d_e: int) -> RandomnessReport | None:
    """Guessing probability in the self-tested frame, or ``None`` if certification fails."""
    decomp = sf.decomposition or decomposition_from_sources(sf.scenario.ensemble)
    try:
        cert = extract_local_unitaries(_realization(sf, decomp))
    except (CertificationGateError, SeparableSourceError, FullRankError, ValueError) as exc:
        log.info("certification unavailable: %s", exc)
        return None
    if not cert.passed():
        return None
    d1, d2 = sf.scenario.bob_dims
    m1, m2 = d1 // 2, d2 // 2
    u_b = kron(*cert.extracted_unitaries)
    rotated = Povm(np.array([permute_subsystems(u_b @ n @ u_b.conj().T, [2, m1, 2, m2], [0, 2, 1, 3])
                             for n in sf.scenario.bob.elements]))
    try:
        return certified_guessing_probability(rotated, random_state(m1 * m2 * d_e, rng), eve_register_povm(d_e))
    except ValueError as exc:
        log.info("Bob's measurement is not certified: %s", exc)
        return None


def cmd_randomness(args) -> int:
    if not 1 <= args.eve_dim <= MAX_EVE_DIM:
        raise CliError(EXIT_INPUT, f"--eve-dim must be in 1..{MAX_EVE_DIM}")
    if args.restarts < 1:
        raise CliError(EXIT_INPUT, "restarts must be at least 1")
    sf = _load(args.scenario)
    seed = _resolve_seed(args.seed, sf.seed)
    report = certified_report(sf, np.random.default_rng(seed), args.eve_dim)
    if report is None:
        p = joint_probability(sf.scenario)
        if p.shape != (4, 4):
            raise CliError(EXIT_INPUT, "Eve search needs four outcomes per party")
        cfg = OptimizerConfig(restarts=args.restarts, max_iters=args.max_iters, seed=seed,
                              constraint_tol=args.constraint_tol)
        report = eve_search(p, args.eve_dim, cfg, alice=sf.scenario.alice, sources=args.sources)
    _emit(write_json(report_to_dict(report)), args.output)
    if not report.feasible:
        raise CliError(EXIT_INFEASIBLE, f"no feasible Eve strategy (violation {report.constraint_violation:.3e})")
    return EXIT_OK


def cmd_nlhv(args) -> int:
    try:
        data = read_json(args.table)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {args.table}: {exc}") from None
    p = prob_table_from_dict(data, tol=args.tol)
    model = build_nlhv_model(p)
    err = max_abs(nlhv_prob_table(model).p - p.p)
    _emit(write_json(nlhv_to_dict(model, err)), args.output)
    return EXIT_OK


# parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swapsteer", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("-o", "--output", help="output file (default: stdout)")
        p.set_defaults(func=func)
        return p

    p = command("witness", cmd_witness, "evaluate the witness of a scenario file")
    p.add_argument("scenario")
    p.add_argument("--tol", type=float, default=1e-9, help="margin above 1/2 for the verdict")

    p = command("werner-sweep", cmd_werner_sweep, "witness and PPT data over a Werner grid")
    p.add_argument("--n", type=int, default=101, help="points per axis")
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--alpha1", type=float, help="fix alpha1 and sweep alpha2 only")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = command("sohs-bound", cmd_sohs_bound, "optimize the classical bound of the witness")
    p.add_argument("--povm", choices=("bell", "computational-product"), default="bell")
    p.add_argument("--restarts", type=int, default=100)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--step-tol", type=float, default=1e-9)
    p.add_argument("--spread-tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int)

    p = command("selftest", cmd_selftest, "run the self-test extraction and write a certificate")
    p.add_argument("scenario")
    p.add_argument("--tol", type=float, default=1e-8)

    p = command("randomness", cmd_randomness, "certified or searched guessing probability")
    p.add_argument("scenario")
    p.add_argument("--eve-dim", type=int, default=4)
    p.add_argument("--restarts", type=int, default=100)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--constraint-tol", type=float, default=1e-9)
    p.add_argument("--sources", choices=("correlated", "independent"), default="correlated")
    p.add_argument("--seed", type=int)

    p = command("nlhv", cmd_nlhv, "build an NLHV model for a probability table")
    p.add_argument("table")
    p.add_argument("--tol", type=float, default=1e-9, help="normalization tolerance")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except InconsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (FormatError, ValueError, KeyError, TypeError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
