"""Exact contact theory of linear one-forms.

For an invertible complex symmetric A the contact equation on the sphere,
A z = conj(z) / conj(mu), forces z to be an eigenvector of the hermitian
positive matrix B = (conj(A) A)^{-1} with eigenvalue |mu|^2. The eigenvector
directions are conjugated Takagi columns of A: each w satisfies
A w = sigma conj(w), so the whole complex line C w lies in the contact
variety with |mu| = 1/sigma along it.

A is of Morse type exactly when the Takagi values are pairwise distinct;
then the contact variety is the union of the n lines and the line with the
j-th largest sigma carries critical points of Morse index j-1 (closed-form
leaf-Hessian eigenvalues 1 +- sigma_i/sigma_j, i != j).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    GAP_TOL,
    SymMatrix,
    TakagiFactors,
    _require_invertible,
    linear_form,
    takagi,
)
from .contact import ACCEPT_TOL, ContactPoint, contact_residual, mu_of
from .errors import NotMorseError

LINE_RESIDUAL_TOL = 1e-9


@dataclass
class ContactLine:
    """One complex contact line through the origin."""

    direction: np.ndarray  # unit vector, largest-modulus entry real positive
    sigma: float
    mu_modulus: float
    morse_index: int | None = None
    residual: float = 0.0


@dataclass
class ContactLineSet:
    """The validated contact lines of a symmetric matrix.

    Candidates that fail residual validation are kept in `rejected` as
    diagnostics and never silently retained among the lines.
    """

    lines: list[ContactLine]
    source: SymMatrix
    rejected: list[ContactLine]


@dataclass
class MorseVerdict:
    is_morse: bool
    sigma: list[float]  # descending
    min_gap: float
    gap_tol: float


def _canonical_direction(w: np.ndarray) -> np.ndarray:
    """Scale to unit norm with the largest-modulus entry real positive."""
    w = w / np.linalg.norm(w)
    k = int(np.argmax(np.abs(w)))
    phase = np.angle(w[k])
    return w * np.exp(-1j * phase)


def hessian_eigenvalues_closed_form(sigma, line_index: int) -> np.ndarray:
    """Leaf-Hessian eigenvalues {1 +- sigma_i/sigma_j : i != j} at line j.

    sigma is the descending Takagi value list; line_index is 0-based. The
    scale convention is half the squared-distance Hessian, which makes the
    values dimensionless. Sorted ascending; 2(n-1) values.
    """
    sigma = np.asarray(sigma, dtype=float)
    sj = sigma[line_index]
    if sj <= 0:
        raise ValueError("closed form requires a positive sigma")
    ratios = np.delete(sigma, line_index) / sj
    return np.sort(np.concatenate([1.0 + ratios, 1.0 - ratios]))


def verdict_from_takagi(tk: TakagiFactors, gap_tol: float = GAP_TOL) -> MorseVerdict:
    sigma = np.asarray(tk.sigma, dtype=float)
    gaps = np.abs(sigma[:, None] - sigma[None, :])
    min_gap = float(np.min(gaps[~np.eye(len(sigma), dtype=bool)]))
    smax = float(sigma[0]) if sigma[0] > 0 else 1.0
    return MorseVerdict(
        is_morse=bool(min_gap > gap_tol * smax),
        sigma=[float(s) for s in sigma],
        min_gap=min_gap,
        gap_tol=gap_tol,
    )


def analyze(A: SymMatrix, gap_tol: float = GAP_TOL) -> tuple[MorseVerdict, ContactLineSet]:
    """Morse verdict and validated contact-line candidates of A.

    Every reported direction is checked against the contact residual at
    radius 1; the eigen route supplies candidates only. Raises
    SingularMatrixError for singular A.
    """
    _require_invertible(A)
    tk = takagi(A)
    verdict = verdict_from_takagi(tk, gap_tol)
    form = linear_form(A)
    lines: list[ContactLine] = []
    rejected: list[ContactLine] = []
    for j, s in enumerate(tk.sigma):
        if s <= 0:
            continue  # unreachable for invertible A; takagi allows sigma = 0
        w = _canonical_direction(tk.U[:, j].conj())
        res = contact_residual(form, w)
        line = ContactLine(
            direction=w, sigma=float(s), mu_modulus=float(1.0 / s), residual=res
        )
        (lines if res <= LINE_RESIDUAL_TOL else rejected).append(line)
    return verdict, ContactLineSet(lines=lines, source=A, rejected=rejected)


def morse_indices(A: SymMatrix) -> ContactLineSet:
    """Contact lines with Morse indices filled; requires a Morse matrix.

    The index of line j (descending sigma) is the negative count of the
    closed-form leaf-Hessian eigenvalues, cross-checked against the positional
    value j-1 implied by the descending order.
    """
    verdict, lineset = analyze(A)
    if not verdict.is_morse:
        raise NotMorseError(
            f"matrix is not of Morse type (min sigma gap {verdict.min_gap:.3e})"
        )
    sigma = np.array([line.sigma for line in lineset.lines])
    for j, line in enumerate(lineset.lines):
        evs = hessian_eigenvalues_closed_form(sigma, j)
        negatives = int(np.sum(evs < 0.0))
        if negatives != j:
            raise AssertionError(
                f"closed-form negative count {negatives} disagrees with line order {j}"
            )
        line.morse_index = negatives
    return lineset


def morseify(A: SymMatrix, eps: float) -> SymMatrix:
    """A Morse-type matrix within eps of A in Frobenius norm.

    No-op for already-Morse input. Otherwise the Takagi values are spread by
    a staircase delta = eps/(2n) (shrunk if needed to respect the Frobenius
    budget, which the plain staircase can exceed for n > 12) and the matrix
    reassembled as U diag(sigma') U^T. Raises ValueError when eps is too
    small for the perturbed gaps to clear the Morse gap tolerance.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    tk = takagi(A)
    if verdict_from_takagi(tk).is_morse:
        return A
    n = A.n
    sigma = np.asarray(tk.sigma, dtype=float)
    delta = eps / (2.0 * n)
    stair = np.arange(n - 1, -1, -1, dtype=float)  # descending order keeps gaps >= delta
    budget = 0.99 * eps
    if delta * np.linalg.norm(stair) > budget:
        delta = budget / np.linalg.norm(stair)
    smax_new = sigma[0] + delta * (n - 1)
    if delta <= GAP_TOL * smax_new:
        raise ValueError(
            f"eps={eps:.3e} is below the Morse gap tolerance at this matrix scale"
        )
    sigma_new = sigma + delta * stair
    M = tk.U @ np.diag(sigma_new) @ tk.U.T
    out = SymMatrix(0.5 * (M + M.T))
    if not verdict_from_takagi(takagi(out)).is_morse:
        raise AssertionError("morseify produced a non-Morse matrix")
    if np.linalg.norm(out.array - A.array) > eps * (1.0 + 1e-12):
        raise AssertionError("morseify exceeded the Frobenius budget")
    return out


def unit_sphere_tangencies(A: SymMatrix) -> list[ContactPoint]:
    """One contact-point witness per line on the unit sphere.

    Nonempty for every invertible symmetric A: the contact lines exist even
    in the non-Morse case, so the sphere is never free of tangencies.
    """
    _, lineset = analyze(A)
    form = linear_form(A)
    out = []
    for line in lineset.lines:
        w = line.direction
        out.append(
            ContactPoint(
                z=w,
                mu=mu_of(form, w),
                radius=1.0,
                residual=line.residual,
                morse_index=line.morse_index,
            )
        )
    return out
