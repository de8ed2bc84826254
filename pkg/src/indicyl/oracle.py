"""Numeric ground truth for the closed-form indicial roots.

Characteristic roots of the mode ODE systems are recomputed here by
general-purpose eigenvalue methods (block companion linearization plus a
QR-type iteration), and the full flat-torus mode reduction of the wrapped
deformation operator is solved as a quadratic matrix pencil.  Nothing in
this module uses the closed-form root expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import fields
from .fields import CylOneForm, CylTensor, FourierOneForm, FourierScalar, FourierSymTensor, ModeGrid

__all__ = [
    "OdeSystem",
    "RootSetComparison",
    "companion_roots",
    "polynomial_eigenvalues",
    "matrix_a",
    "matrixA_system",
    "ode_tt_branch",
    "ode_mixed_b",
    "flat_mode_pencil",
    "pencil_roots",
    "RootCluster",
    "cluster_roots",
    "compare_root_sets",
]

_SYM_PAIRS = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))
# Five independent rows of a trace-free symmetric 3x3 tensor.
_TF_PICK = ((0, 0), (1, 1), (0, 1), (0, 2), (1, 2))


@dataclass(frozen=True)
class OdeSystem:
    """Constant-coefficient system sum_k M_k d^k/dt^k acting on C^n."""

    mats: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.mats) < 2:
            raise ValueError("need at least order 1 (two coefficient matrices)")
        n = self.mats[0].shape[0]
        for m in self.mats:
            if m.shape != (n, n):
                raise ValueError("all coefficient matrices must be square and equal-sized")

    @property
    def order(self) -> int:
        return len(self.mats) - 1

    @property
    def dim(self) -> int:
        return self.mats[0].shape[0]

    def eval(self, lam: complex) -> np.ndarray:
        out = np.zeros_like(np.asarray(self.mats[0], dtype=complex))
        for k, m in enumerate(self.mats):
            out = out + (lam**k) * m
        return out


def companion_roots(ode: OdeSystem) -> np.ndarray:
    """Eigenvalues of the block companion linearization (QR iteration).

    Requires the leading coefficient to be invertible; use
    polynomial_eigenvalues for pencils with singular leading blocks.
    """
    n, r = ode.dim, ode.order
    lead = np.asarray(ode.mats[-1], dtype=complex)
    if abs(np.linalg.det(lead)) < 1e-12 * max(1.0, np.linalg.norm(lead) ** n):
        raise ValueError("singular leading block; the companion form does not exist")
    inv = np.linalg.inv(lead)
    comp = np.zeros((n * r, n * r), dtype=complex)
    for k in range(r - 1):
        comp[n * k : n * (k + 1), n * (k + 1) : n * (k + 2)] = np.eye(n)
    for k in range(r):
        comp[n * (r - 1) :, n * k : n * (k + 1)] = -inv @ ode.mats[k]
    return np.linalg.eigvals(comp)


def polynomial_eigenvalues(ode: OdeSystem, finite_bound: float = 1e8) -> np.ndarray:
    """Finite eigenvalues of the matrix polynomial via the generalized
    companion pencil; infinite eigenvalues from a singular leading block are
    discarded."""
    n, r = ode.dim, ode.order
    A = np.zeros((n * r, n * r), dtype=complex)
    B = np.eye(n * r, dtype=complex)
    for k in range(r - 1):
        A[n * k : n * (k + 1), n * (k + 1) : n * (k + 2)] = np.eye(n)
    for k in range(r):
        A[n * (r - 1) :, n * k : n * (k + 1)] = -np.asarray(ode.mats[k], dtype=complex)
    B[n * (r - 1) :, n * (r - 1) :] = ode.mats[-1]
    vals = scipy.linalg.eigvals(A, B)
    vals = vals[np.isfinite(vals)]
    return vals[np.abs(vals) < finite_bound]


# ---------------------------------------------------------------------------
# The explicit small systems
# ---------------------------------------------------------------------------


def matrix_a(mu: float, kappa: int) -> np.ndarray:
    """First-order 4x4 matrix of the scalar-driven mixed system in the
    variables (l, l', m, m'):

        l'' = (2/3) mu l + (mu/3) m',
        m'' = -(1/2) l' + ((3/2) mu - 4 kappa) m.
    """
    if mu < -1e-12:
        raise ValueError(f"scalar eigenvalue must be >= 0, got {mu}")
    return np.array(
        [
            [0.0, 1.0, 0.0, 0.0],
            [2.0 * mu / 3.0, 0.0, 0.0, mu / 3.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, -0.5, 1.5 * mu - 4.0 * kappa, 0.0],
        ]
    )


def matrixA_system(mu: float, kappa: int) -> OdeSystem:
    """The mixed system as a first-order OdeSystem, X' - A X = 0."""
    A = matrix_a(mu, kappa)
    return OdeSystem((np.asarray(-A, dtype=complex), np.eye(4, dtype=complex)))


def ode_tt_branch(lam: float, kappa: int, sign: int) -> OdeSystem:
    """Scalar ODE -(1/2) f'' + s*sqrt(lam+3k) f' - (k + lam/2) f = 0 for one
    eigentensor branch of the Dirac-type operator (s = +-1)."""
    if lam + 3 * kappa < -1e-12:
        raise ValueError(f"no real branch rate for eigenvalue {lam} at kappa={kappa}")
    beta = math.sqrt(max(lam + 3 * kappa, 0.0))
    return OdeSystem(
        (
            np.array([[-(kappa + lam / 2.0)]], dtype=complex),
            np.array([[sign * beta]], dtype=complex),
            np.array([[-0.5]], dtype=complex),
        )
    )


def ode_mixed_b(nu: float, kappa: int) -> OdeSystem:
    """Scalar ODE m'' - nu m + 4 kappa m = 0 of the co-closed mixed family."""
    if nu < -1e-12:
        raise ValueError(f"co-closed eigenvalue must be >= 0, got {nu}")
    return OdeSystem(
        (
            np.array([[4.0 * kappa - nu]], dtype=complex),
            np.array([[0.0]], dtype=complex),
            np.array([[1.0]], dtype=complex),
        )
    )


# ---------------------------------------------------------------------------
# Flat-torus mode pencil of the wrapped deformation operator
# ---------------------------------------------------------------------------


def _mode_basis(grid: ModeGrid, k: tuple[int, int, int]):
    """Single-mode basis tensors of the 9-dimensional reduced space
    (alpha: 3, h: 6 with h00 = -tr h)."""
    idx = tuple(grid.band + ki for ki in k)
    out = []
    for i in range(3):
        alpha = FourierOneForm.zero(grid)
        alpha.data[(i,) + idx] = 1.0
        out.append({"alpha": alpha})
    for i, j in _SYM_PAIRS:
        h = FourierSymTensor.zero(grid)
        h.data[(i, j) + idx] = 1.0
        h.data[(j, i) + idx] = 1.0
        h00 = FourierScalar.zero(grid)
        h00.data[idx] = -np.einsum("ii", h.data[(slice(None), slice(None)) + idx])
        out.append({"h00": h00, "h": h})
    return out, idx


def _mode_matrix(grid: ModeGrid, k, lam: complex) -> np.ndarray:
    """The 9x9 action of (linearized curvature, 2 divergence) on exponential
    solutions of one Fourier mode, at rate lam."""
    basis, idx = _mode_basis(grid, k)
    M = np.zeros((9, 9), dtype=complex)
    for col, parts in enumerate(basis):
        ht = CylTensor(grid)
        ht.add_term(lam, 0, **parts)
        dpart, divpart = fields.f_forward(ht)
        rows = np.zeros(9, dtype=complex)
        for (rk, d), slot in dpart.terms.items():
            if d != 0:
                raise AssertionError("exponential input produced polynomial output")
            for r, (i, j) in enumerate(_TF_PICK):
                rows[r] += slot["h"].data[(i, j) + idx]
        for (rk, d), slot in divpart.terms.items():
            rows[5] += slot["f"].data[idx]
            for i in range(3):
                rows[6 + i] += slot["omega"].data[(i,) + idx]
        M[:, col] = rows
    return M


def flat_mode_pencil(
    k: tuple[int, int, int], lengths=(2 * math.pi,) * 3
) -> OdeSystem:
    """Quadratic matrix pencil of the wrapped deformation operator restricted
    to the Fourier mode k on a flat torus.

    The 10 tensor components reduce to 9 after eliminating h00 = -tr h; the
    rows are the 5 trace-free curvature equations plus the 4 divergence
    equations.  Rate lam is an indicial root exactly when the pencil is
    singular at lam.
    """
    k = tuple(int(x) for x in k)
    grid = ModeGrid(lengths, band=max(1, max(abs(x) for x in k)))
    m0 = _mode_matrix(grid, k, 0.0)
    mp = _mode_matrix(grid, k, 1.0)
    mm = _mode_matrix(grid, k, -1.0)
    m1 = 0.5 * (mp - mm)
    m2 = 0.5 * (mp + mm) - m0
    return OdeSystem((m0, m1, m2))


@dataclass(frozen=True)
class RootCluster:
    value: complex
    algebraic: int
    geometric: int

    @property
    def jordan(self) -> bool:
        return self.algebraic > self.geometric


def cluster_roots(values: np.ndarray, tol: float = 1e-6) -> list[tuple[complex, int]]:
    """Greedy clustering of near-coincident roots; returns (center, count)."""
    clusters: list[list[complex]] = []
    for v in sorted(values, key=lambda z: (z.real, z.imag)):
        for c in clusters:
            if abs(v - c[0]) <= tol * max(1.0, abs(c[0])):
                c.append(v)
                break
        else:
            clusters.append([complex(v)])
    return [(complex(np.mean(c)), len(c)) for c in clusters]


def clustered_multiset(values, tol: float = 1e-6) -> list[complex]:
    """Replace near-coincident roots by their cluster mean, replicated by
    cluster size.  Means of defective (Jordan) eigenvalue pairs are accurate
    to rounding error even though the individual eigenvalues split by the
    square root of machine precision."""
    out: list[complex] = []
    for center, count in cluster_roots(np.asarray(values, dtype=complex), tol):
        out.extend([center] * count)
    return out


def pencil_roots(ode: OdeSystem, cluster_tol: float = 1e-6, null_tol: float = 1e-7):
    """Indicial roots of a mode pencil with multiplicities and Jordan flags.

    A cluster is Jordan when its algebraic multiplicity (cluster size among
    the generalized eigenvalues) exceeds the nullity of the pencil at the
    cluster center, i.e. when genuine t-polynomial solutions occur.
    """
    vals = polynomial_eigenvalues(ode)
    out = []
    for center, count in cluster_roots(vals, cluster_tol):
        mat = ode.eval(center)
        svals = np.linalg.svd(mat, compute_uv=False)
        smax = svals[0] if svals[0] > 0 else 1.0
        geometric = int(np.sum(svals < null_tol * smax))
        out.append(RootCluster(center, count, geometric))
    return out


# ---------------------------------------------------------------------------
# Root-set comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootSetComparison:
    expected: tuple[complex, ...]
    actual: tuple[complex, ...]
    max_mismatch: float
    matched: bool


def compare_root_sets(
    expected,
    actual,
    tol: float,
    truncation_bound: float = math.inf,
) -> RootSetComparison:
    """Match two root multisets within tol.

    Matched means every expected root pairs with a distinct actual root at
    distance < tol, and no unmatched actual root of magnitude below the
    truncation bound remains.  The pairing is greedy with an exact bipartite
    fallback.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    exp = [complex(z) for z in expected]
    act = [complex(z) for z in actual]
    if not exp:
        leftovers = [z for z in act if abs(z) < truncation_bound]
        return RootSetComparison((), tuple(act), 0.0, not leftovers)

    used = [False] * len(act)
    pairing: list[int | None] = [None] * len(exp)
    for i, z in enumerate(exp):
        best, best_d = None, math.inf
        for j, w in enumerate(act):
            if not used[j] and abs(z - w) < best_d:
                best, best_d = j, abs(z - w)
        if best is not None and best_d < tol:
            used[best] = True
            pairing[i] = best

    if any(p is None for p in pairing) and act:
        # Greedy failure does not prove mismatch; redo with exact assignment.
        from scipy.optimize import linear_sum_assignment

        cost = np.array([[abs(z - w) for w in act] for z in exp])
        if cost.shape[0] <= cost.shape[1]:
            rows, cols = linear_sum_assignment(cost)
            used = [False] * len(act)
            pairing = [None] * len(exp)
            for r, c in zip(rows, cols):
                if cost[r, c] < tol:
                    pairing[r] = c
                    used[c] = True

    mismatch = 0.0
    ok = True
    for i, p in enumerate(pairing):
        if p is None:
            ok = False
            mismatch = math.inf
        else:
            mismatch = max(mismatch, abs(exp[i] - act[p]))
    for j, w in enumerate(act):
        if not used[j] and abs(w) < truncation_bound:
            ok = False
    return RootSetComparison(tuple(exp), tuple(act), mismatch, ok)
