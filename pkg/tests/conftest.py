import itertools

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def loop_partial_trace(mat, dims, keep):
    """Entry-by-entry partial trace, used as an oracle."""
    dims = list(dims)
    kept = [d for i, d in enumerate(dims) if i in keep]
    out = np.zeros((int(np.prod(kept)),) * 2, dtype=complex)
    for row in itertools.product(*[range(d) for d in dims]):
        for col in itertools.product(*[range(d) for d in dims]):
            if any(row[i] != col[i] for i in range(len(dims)) if i not in keep):
                continue
            r = np.ravel_multi_index([row[i] for i in keep], kept)
            c = np.ravel_multi_index([col[i] for i in keep], kept)
            out[r, c] += mat[np.ravel_multi_index(row, dims), np.ravel_multi_index(col, dims)]
    return out


def permutation_matrix(dims, perm):
    """Matrix sending basis state |i_0 ... i_n> to |i_perm[0] ... i_perm[n]>."""
    dims = list(dims)
    new_dims = [dims[p] for p in perm]
    n = int(np.prod(dims))
    out = np.zeros((n, n))
    for idx in itertools.product(*[range(d) for d in dims]):
        out[np.ravel_multi_index([idx[p] for p in perm], new_dims), np.ravel_multi_index(idx, dims)] = 1
    return out


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report_line():
    """Record a one-line acceptance verdict; all lines are printed in the summary."""
    def record(criterion, ok: bool, detail: str):
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
