"""Scenario fixtures shipped with the package.

``python3 -m swapsteer.bundled`` rewrites the JSON files from the
constructors below; the test suite checks that the shipped files and the
constructors agree.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from .formats import ScenarioFile, prob_table_to_dict, save_scenario, write_json
from .linalg import kron, permute_subsystems, proj
from .network import ProbTable, Scenario, SourceEnsemble, ideal_scenario, saturating_scenario, werner_scenario
from .qobj import BELL_VECTORS, BellOrdering, PHI_PLUS, Povm, bell_basis
from .selftest import disguised_ideal_realization

FIXTURE_DIR = Path(__file__).parent / "fixtures"
DISGUISE_SEED = 20240607


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture, e.g. ``fixture_path("ideal")``."""
    path = FIXTURE_DIR / f"{name}.json"
    if not path.exists():
        raise FileNotFoundError(f"no bundled fixture {name!r} in {FIXTURE_DIR}")
    return path


def werner_terms(alpha1: float, alpha2: float) -> list:
    """Bell-basis eigendecomposition of two Werner sources as pure product terms.

    The noise eigenvalue is threefold degenerate, so a numerical
    eigensolver may return product vectors; the Bell basis is explicit.
    """
    def spectrum(alpha):
        return {lab: (1 - alpha) / 4 + (alpha if lab == "phi+" else 0.0) for lab in BELL_VECTORS}

    s1, s2 = spectrum(alpha1), spectrum(alpha2)
    return [(s1[a] * s2[b], BELL_VECTORS[a], BELL_VECTORS[b])
            for a in s1 for b in s2 if s1[a] * s2[b] > 0]


def ideal_file() -> ScenarioFile:
    return ScenarioFile(ideal_scenario(), BellOrdering.canonical(), 0, [(1.0, PHI_PLUS, PHI_PLUS)])


def saturating_file() -> ScenarioFile:
    return ScenarioFile(saturating_scenario(), BellOrdering.canonical(), 0)


def werner_file(alpha: float = 0.8) -> ScenarioFile:
    s = werner_scenario(alpha, alpha)
    return ScenarioFile(s, BellOrdering.canonical(), 0, werner_terms(alpha, alpha))


def disguised_ideal_file(aux_dims=(2, 2), seed: int = DISGUISE_SEED) -> ScenarioFile:
    """Ideal sources with junk, Bob's side rotated by Haar-random ``D1 (x) D2``."""
    r, (d1, d2) = disguised_ideal_realization(aux_dims, np.random.default_rng(seed))
    m1, m2 = aux_dims
    u_b = kron(d1, d2)
    # reference Bell measurement on B1' B2' (x) junk, reordered to B1 = B1'B1'', B2 = B2'B2''
    els = [u_b @ permute_subsystems(kron(el, np.eye(m1 * m2)), [2, 2, m1, m2], [0, 2, 1, 3]) @ u_b.conj().T
           for el in bell_basis().elements]
    comps = tuple((w, proj(a), proj(b)) for w, a, b in r.decomposition)
    s = Scenario(SourceEnsemble(comps), bell_basis(), Povm(np.array(els)))
    return ScenarioFile(s, BellOrdering.canonical(), seed, list(r.decomposition))


def correlated_bell_file() -> ScenarioFile:
    """Both sources emit the same uniformly chosen Bell state.

    Separable across the sources and maximally violating, yet Bob's outcome
    is a function of the shared label.
    """
    bells = [BELL_VECTORS[lab] for lab in BellOrdering.canonical().labels]
    comps = tuple((0.25, proj(v), proj(v)) for v in bells)
    s = Scenario(SourceEnsemble(comps), bell_basis(), bell_basis())
    return ScenarioFile(s, BellOrdering.canonical(), 0, [(0.25, v, v) for v in bells])


SCENARIOS = {
    "ideal": ideal_file,
    "saturating": saturating_file,
    "werner_0.8": werner_file,
    "disguised_ideal": disguised_ideal_file,
    "correlated_bell": correlated_bell_file,
}
TABLES = {
    "ideal_table": ProbTable.ideal,
    "uniform_table": ProbTable.uniform,
}


def write_fixtures(directory: Path = FIXTURE_DIR) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, build in SCENARIOS.items():
        save_scenario(build(), directory / f"{name}.json")
        written.append(directory / f"{name}.json")
    for name, build in TABLES.items():
        write_json(prob_table_to_dict(build()), directory / f"{name}.json")
        written.append(directory / f"{name}.json")
    return written


if __name__ == "__main__":
    for path in write_fixtures(Path(sys.argv[1]) if len(sys.argv) > 1 else FIXTURE_DIR):
        print(path)
