"""Shared fixtures and small numeric helpers for the test suite."""

from __future__ import annotations

import io
import json
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import numpy as np
import pytest

import folcontact as fc
from folcontact.cli import main as cli_main

REPO_ROOT = Path(__file__).resolve().parents[1]
SCHEMA_DIR = REPO_ROOT / "schemas"


def run_cli(argv) -> tuple[int, str, str]:
    """Invoke the CLI in-process; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli_main(argv)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def diag321() -> fc.SymMatrix:
    return fc.SymMatrix(np.diag([3.0, 2.0, 1.0]).astype(complex))


@pytest.fixture
def form321(diag321) -> fc.PolyOneForm:
    return fc.linear_form(diag321)


@pytest.fixture
def integral321(diag321) -> fc.Polynomial:
    return fc.quadratic_first_integral(diag321)


@pytest.fixture
def identity3() -> fc.SymMatrix:
    return fc.SymMatrix(np.eye(3, dtype=complex))


@pytest.fixture
def symplectic4() -> fc.PolyOneForm:
    return fc.symplectic_form(4)


@pytest.fixture
def cubic3() -> fc.Polynomial:
    """First integral z1^3 + z2^3 + z3^3."""
    return fc.Polynomial(3, [(1.0, (3, 0, 0)), (1.0, (0, 3, 0)), (1.0, (0, 0, 3))])


def load_schema(name: str) -> dict:
    with open(SCHEMA_DIR / name, "r", encoding="utf-8") as fh:
        return json.load(fh)


def random_symmetric(rng: np.random.Generator, n: int, max_cond: float | None = None) -> fc.SymMatrix:
    """Random complex symmetric matrix, optionally capped in condition number."""
    while True:
        M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        M = 0.5 * (M + M.T)
        sv = np.linalg.svd(M, compute_uv=False)
        if sv[-1] == 0.0:
            continue
        if max_cond is not None and sv[0] / sv[-1] > max_cond:
            continue
        return fc.SymMatrix(M)


def random_morse(
    rng: np.random.Generator, n: int, min_rel_gap: float = 1e-3
) -> fc.SymMatrix:
    """Random Morse-type symmetric matrix with a comfortable sigma gap."""
    while True:
        A = random_symmetric(rng, n, max_cond=1e3)
        tk = fc.takagi(A)
        gaps = np.diff(tk.sigma[::-1])
        if np.min(np.abs(gaps)) > min_rel_gap * tk.sigma[0]:
            return A


def axis_distance(z: np.ndarray, j: int) -> float:
    """Distance of z from the j-th complex coordinate axis."""
    rest = np.delete(np.asarray(z, dtype=complex), j)
    return float(np.linalg.norm(rest))


def line_distance(z: np.ndarray, direction: np.ndarray) -> float:
    """Distance of z from the complex line spanned by a unit direction."""
    proj = np.sum(z * direction.conj()) * direction
    return float(np.linalg.norm(z - proj))
