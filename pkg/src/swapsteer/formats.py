"""On-disk formats.

Complex arrays are nested lists whose leaves are ``[re, im]`` pairs,
row-major. A scenario file looks like::

    {"sources": [{"weight": 1.0, "rho1": M, "rho2": M}],
     "alice": "bell",
     "bob": "bell" | {"elements": [M, ...]},
     "bell_ordering": ["phi+", "phi-", "psi+", "psi-"],
     "seed": 0,
     "decomposition": [{"weight": w, "psi1": v, "psi2": v}]}

``alice`` may also be an explicit POVM. ``decomposition`` (pure product
terms) and ``seed`` are optional; any other key is an error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .network import ProbTable, Scenario, SourceEnsemble
from .qobj import BellOrdering, Povm, bell_basis

SCENARIO_KEYS = {"sources", "alice", "bob", "bell_ordering", "seed", "decomposition"}
SOURCE_KEYS = {"weight", "rho1", "rho2"}
TERM_KEYS = {"weight", "psi1", "psi2"}


class FormatError(ValueError):
    """Malformed or inconsistent file content."""


def encode_complex(arr) -> list:
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def decode_complex(data, ndim: int | None = None) -> np.ndarray:
    try:
        raw = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"not a numeric [re, im] array: {exc}") from None
    if raw.ndim == 0 or raw.shape[-1] != 2:
        raise FormatError("complex entries must be [re, im] pairs")
    out = raw[..., 0] + 1j * raw[..., 1]
    if ndim is not None and out.ndim != ndim:
        raise FormatError(f"expected a {ndim}-d array, got shape {out.shape}")
    return out


def _check_keys(obj, allowed: set, what: str, required: set | None = None):
    if not isinstance(obj, dict):
        raise FormatError(f"{what} must be an object")
    extra = set(obj) - allowed
    if extra:
        raise FormatError(f"unknown field(s) in {what}: {sorted(extra)}")
    missing = (allowed if required is None else required) - set(obj)
    if missing:
        raise FormatError(f"missing field(s) in {what}: {sorted(missing)}")


def _povm(data, ordering: BellOrdering, who: str) -> Povm:
    if data == "bell":
        return bell_basis(ordering)
    _check_keys(data, {"elements"}, f"{who} POVM")
    return Povm(decode_complex(data["elements"], ndim=3))


def encode_povm(povm: Povm) -> dict:
    return {"elements": encode_complex(povm.elements)}


@dataclass
class ScenarioFile:
    scenario: Scenario
    ordering: BellOrdering
    seed: int | None = None
    decomposition: list | None = None

    @classmethod
    def from_dict(cls, data) -> ScenarioFile:
        _check_keys(data, SCENARIO_KEYS, "scenario", required={"sources", "alice", "bob"})
        ordering = BellOrdering(tuple(data.get("bell_ordering", BellOrdering.canonical().labels)))
        comps = []
        for src in data["sources"]:
            _check_keys(src, SOURCE_KEYS, "source")
            comps.append((float(src["weight"]), decode_complex(src["rho1"], 2), decode_complex(src["rho2"], 2)))
        scenario = Scenario(SourceEnsemble(tuple(comps)), _povm(data["alice"], ordering, "Alice"),
                            _povm(data["bob"], ordering, "Bob"))
        decomp = None
        if "decomposition" in data:
            decomp = []
            for term in data["decomposition"]:
                _check_keys(term, TERM_KEYS, "decomposition term")
                decomp.append((float(term["weight"]), decode_complex(term["psi1"], 1),
                               decode_complex(term["psi2"], 1)))
        seed = data.get("seed")
        if seed is not None and not isinstance(seed, int):
            raise FormatError("seed must be an integer")
        return cls(scenario, ordering, seed, decomp)

    def to_dict(self) -> dict:
        out = {
            "sources": [{"weight": w, "rho1": encode_complex(r1), "rho2": encode_complex(r2)}
                        for w, r1, r2 in self.scenario.ensemble.components],
            "alice": encode_povm(self.scenario.alice),
            "bob": encode_povm(self.scenario.bob),
            "bell_ordering": list(self.ordering.labels),
        }
        if self.seed is not None:
            out["seed"] = self.seed
        if self.decomposition is not None:
            out["decomposition"] = [{"weight": w, "psi1": encode_complex(a), "psi2": encode_complex(b)}
                                    for w, a, b in self.decomposition]
        return out


def prob_table_from_dict(data, tol: float = 1e-9) -> ProbTable:
    """``{"p": [[...], ...]}``; normalization is checked to ``tol``."""
    _check_keys(data, {"p"}, "probability table")
    try:
        p = np.asarray(data["p"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"probability table is not numeric: {exc}") from None
    if p.ndim != 2:
        raise FormatError("probability table must be a matrix")
    return ProbTable(p, tol=tol)


def prob_table_to_dict(p: ProbTable) -> dict:
    return {"p": p.p.tolist()}


def read_json(path) -> dict:
    """Raises ``OSError`` for I/O problems and :class:`FormatError` for bad JSON."""
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from None


def write_json(data, path=None) -> str:
    text = json.dumps(data, indent=2, allow_nan=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def load_scenario(path) -> ScenarioFile:
    return ScenarioFile.from_dict(read_json(path))


def save_scenario(sf: ScenarioFile, path) -> None:
    write_json(sf.to_dict(), path)


def certificate_to_dict(cert) -> dict:
    return {
        "passed": cert.passed(),
        "state_fidelity": cert.state_fidelity,
        "observable_residual": cert.observable_residual,
        "sos_residuals": list(cert.sos_residuals),
        "max_sos_residual": cert.max_sos_residual,
        "bob_unitarity_residual": cert.bob_unitarity_residual,
        "commutant_residual": cert.commutant_residual,
        "support_overlap": cert.support_overlap,
        "witness": cert.witness,
        "extracted_unitaries": [encode_complex(u) for u in cert.extracted_unitaries],
        "p_operators": [[encode_complex(p) for p in ps] for ps in cert.p_operators],
    }


def report_to_dict(report) -> dict:
    return {
        "guessing_probability": report.guessing_probability,
        "min_entropy_bits": report.min_entropy_bits,
        "constraint_violation": report.constraint_violation,
        "feasible": report.feasible,
        "certified": report.certified,
        "assumption": report.assumption,
    }


def nlhv_to_dict(model, reproduction_error: float) -> dict:
    return {
        "p1": model.p1.tolist(),
        "p2": model.p2.tolist(),
        "alice": model.alice.tolist(),
        "bob": model.bob.tolist(),
        "atom_count": model.atom_count,
        "reproduction_error": reproduction_error,
    }
