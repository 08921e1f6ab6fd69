"""Brute-force finite sections: dense matrices of the tuple on |n| <= N.

This module is the independent oracle for every closed form in
``shift``: it builds T_1..T_m as explicit matrices from the weights alone,
forms adjoints, commutators and the iterated positive map by matrix
arithmetic, and compares entrywise on interior indices.

Hard truncation drops images above degree N, so an operator assembled
from s factors of the tuple is only trustworthy on columns with
|n| <= N - s; that is the margin discipline enforced here. All compared
operators preserve the degree level, which is also why their gram matrices
C*C are diagonal and yield singular values without any factorization
library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .multiindex import enumerate_level, multinomial
from .shift import SphericalShift


class StructuralAssumptionError(Exception):
    """The operator under test does not have the promised shift structure."""


@dataclass(frozen=True)
class Basis:
    """Orthonormal basis {e_n : |n| <= N}, levels concatenated in order."""

    m: int
    N: int
    indices: tuple = field(repr=False)
    offsets: tuple = field(repr=False)  # offsets[k] = first row of level k

    @property
    def dimension(self) -> int:
        return len(self.indices)

    def index_of(self, n) -> int:
        return self._index_map()[tuple(n)]

    def level_slice(self, k: int) -> slice:
        end = self.offsets[k + 1] if k + 1 < len(self.offsets) else self.dimension
        return slice(self.offsets[k], end)

    def _index_map(self):
        cached = getattr(self, "_imap", None)
        if cached is None:
            cached = {tuple(n): i for i, n in enumerate(self.indices)}
            object.__setattr__(self, "_imap", cached)
        return cached


def build_basis(m: int, N: int) -> Basis:
    if N < 0:
        raise ValueError("maximum degree N must be >= 0")
    indices = []
    offsets = []
    for k in range(N + 1):
        offsets.append(len(indices))
        indices.extend(enumerate_level(m, k))
    basis = Basis(m=m, N=N, indices=tuple(indices), offsets=tuple(offsets))
    assert basis.dimension == math.comb(N + m, m)
    return basis


@dataclass
class DenseOperator:
    matrix: np.ndarray
    basis: Basis
    provenance: str

    def adjoint(self) -> "DenseOperator":
        return DenseOperator(self.matrix.T.copy(), self.basis, f"adjoint({self.provenance})")

    def restrict_to_levels(self, kmax: int) -> np.ndarray:
        """Principal sub-block on basis indices with |n| <= kmax."""
        stop = self.basis.level_slice(kmax).stop
        return self.matrix[:stop, :stop]


def build_shift_matrix(shift: SphericalShift, j: int, basis: Basis) -> DenseOperator:
    """Matrix of T_j: entry w_j(n) at (row of n+eps_j, column of n) for
    |n| < N; columns at the top level are zero (hard truncation)."""
    if shift.m != basis.m:
        raise ValueError("shift and basis arity mismatch")
    dim = basis.dimension
    mat = np.zeros((dim, dim))
    for col, n in enumerate(basis.indices):
        if n.degree() >= basis.N:
            continue
        mat[basis.index_of(n.add_unit(j)), col] = shift.weight(j, n)
    return DenseOperator(mat, basis, f"shift-matrix T_{j}")


def build_tuple_matrices(shift: SphericalShift, basis: Basis) -> list:
    return [build_shift_matrix(shift, j, basis) for j in range(1, shift.m + 1)]


def commutator(a: DenseOperator, b: DenseOperator) -> DenseOperator:
    if a.matrix.shape != b.matrix.shape:
        raise ValueError(
            f"dimension mismatch: {a.matrix.shape} vs {b.matrix.shape}"
        )
    mat = a.matrix @ b.matrix - b.matrix @ a.matrix
    return DenseOperator(mat, a.basis, f"[{a.provenance}, {b.provenance}]")


def q_power_bruteforce(ts: Sequence[DenseOperator], k: int) -> DenseOperator:
    """sum over |alpha| = k of (k!/alpha!) (T^alpha)* T^alpha, assembled from
    the shift matrices by plain matrix products."""
    if k < 0:
        raise ValueError("power k must be >= 0")
    basis = ts[0].basis
    dim = basis.dimension
    out = np.zeros((dim, dim))
    if k == 0:
        np.fill_diagonal(out, 1.0)
        return DenseOperator(out, basis, "q-power 0")
    m = len(ts)
    for alpha in enumerate_level(m, k):
        t_alpha = np.eye(dim)
        for i, a in enumerate(alpha):
            for _ in range(a):
                t_alpha = ts[i].matrix @ t_alpha
        out += multinomial(alpha) * (t_alpha.T @ t_alpha)
    return DenseOperator(out, basis, f"q-power {k}")


def bq_bruteforce(ts: Sequence[DenseOperator], q: int) -> DenseOperator:
    """Order-q defect operator sum_s (-1)^s C(q,s) Q^s(I) from matrices."""
    if q < 1:
        raise ValueError("order q must be >= 1")
    basis = ts[0].basis
    out = np.zeros((basis.dimension, basis.dimension))
    for s in range(q + 1):
        out += (-1) ** s * math.comb(q, s) * q_power_bruteforce(ts, s).matrix
    return DenseOperator(out, basis, f"bq-defect {q}")


def required_margin(kind: Tuple) -> int:
    op = kind[0]
    if op in ("self_comm", "cross_comm"):
        return 1
    if op in ("q_power", "bq"):
        return kind[1]
    raise ValueError(f"unknown comparison kind {kind!r}")


def _expected_interior(shift: SphericalShift, kind: Tuple, basis: Basis, dim: int) -> np.ndarray:
    expected = np.zeros((dim, dim))
    op = kind[0]
    for col in range(dim):
        n = basis.indices[col]
        if op == "self_comm":
            expected[col, col] = shift.self_comm_coeff(kind[1], n)
        elif op == "cross_comm":
            coeff, target = shift.cross_comm_coeff(kind[1], kind[2], n)
            if target is not None:
                expected[basis.index_of(target), col] = coeff
        elif op == "q_power":
            expected[col, col] = shift.q_diag(n.degree(), kind[1])
        elif op == "bq":
            expected[col, col] = shift.bq_diag(n.degree(), kind[1])
    return expected


def compare_with_closed_form(
    shift: SphericalShift,
    kind: Tuple,
    N: int,
    margin: Optional[int] = None,
    ts: Optional[Sequence[DenseOperator]] = None,
) -> float:
    """Max absolute deviation |matrix entry - closed form| over the interior
    block |n| <= N - margin.

    kind is ("self_comm", j), ("cross_comm", j, l), ("q_power", k) or
    ("bq", q). The margin must cover the operator's reach; boundary rows
    are never compared.
    """
    need = required_margin(kind)
    margin = need if margin is None else margin
    if margin < need:
        raise ValueError(f"margin {margin} too small for kind {kind!r}; need >= {need}")
    if margin > N:
        raise ValueError(f"margin {margin} exceeds truncation degree {N}")
    basis = build_basis(shift.m, N) if ts is None else ts[0].basis
    if ts is None:
        ts = build_tuple_matrices(shift, basis)

    op = kind[0]
    if op == "self_comm":
        j = kind[1]
        built = commutator(ts[j - 1].adjoint(), ts[j - 1])
    elif op == "cross_comm":
        j, l = kind[1], kind[2]
        built = commutator(ts[j - 1].adjoint(), ts[l - 1])
    elif op == "q_power":
        built = q_power_bruteforce(ts, kind[1])
    elif op == "bq":
        built = bq_bruteforce(ts, kind[1])
    else:
        raise ValueError(f"unknown comparison kind {kind!r}")

    interior = basis.level_slice(N - margin).stop
    block = built.matrix[:interior, :interior]
    expected = _expected_interior(shift, kind, basis, interior)
    return float(np.max(np.abs(block - expected))) if interior else 0.0


def gram_diagonal_singular_values(c: DenseOperator, tol: float = 1e-10) -> np.ndarray:
    """Singular values of C via the diagonal of C*C, sorted ascending.

    Requires C*C to be diagonal up to ``tol``; the operators produced by
    the closed forms here send basis vectors to multiples of distinct basis
    vectors, so a violation means the structural assumption failed and is
    reported, never papered over with a general SVD.
    """
    gram = c.matrix.T @ c.matrix
    off = gram - np.diag(np.diag(gram))
    worst = float(np.max(np.abs(off))) if off.size else 0.0
    if worst > tol:
        raise StructuralAssumptionError(
            f"C*C has off-diagonal magnitude {worst:.3e} > {tol:.1e} for "
            f"{c.provenance}; not a shift-structured operator"
        )
    diag = np.clip(np.diag(gram), 0.0, None)
    return np.sort(np.sqrt(diag))


def schatten_power_sum(c: DenseOperator, p: float, kmax: Optional[int] = None) -> float:
    """sum of sigma^p over the singular values of C, optionally restricted
    to the interior levels |n| <= kmax."""
    if kmax is not None:
        sub = DenseOperator(c.restrict_to_levels(kmax).copy(), c.basis, c.provenance)
        svals = gram_diagonal_singular_values(sub)
    else:
        svals = gram_diagonal_singular_values(c)
    return float(np.sum(svals ** p))


def oracle_suite(shift: SphericalShift, N: int, tol: float = 1e-10) -> list:
    """Run every comparison kind for one shift; returns a list of dicts
    {kind, margin, max_deviation, pass}."""
    basis = build_basis(shift.m, N)
    ts = build_tuple_matrices(shift, basis)
    results = []

    def record(kind, margin):
        dev = compare_with_closed_form(shift, kind, N, margin, ts=ts)
        results.append(
            {
                "kind": "/".join(str(x) for x in kind),
                "margin": margin,
                "max_deviation": dev,
                "pass": bool(dev <= tol),
            }
        )

    for j in range(1, shift.m + 1):
        record(("self_comm", j), 1)
    for j in range(1, shift.m + 1):
        for l in range(1, shift.m + 1):
            if j != l:
                record(("cross_comm", j, l), 1)
    for k in range(0, 4):
        record(("q_power", k), max(k, 0))
    for q in range(1, 4):
        record(("bq", q), q)
    return results
