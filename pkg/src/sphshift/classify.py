"""Structural classification of the tuple from its scalar sequence.

Every verdict records its epistemic status: "analytic" when the family
declares the fact, "exact" when rational arithmetic certified it over the
stated horizon, "sampled" when only floating evidence exists. Definitive
algebraic yes-answers (isometry orders, the constant-weight detection)
require the exact path; floating families can only earn "consistent".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from .scalarseq import BoundednessReport, ScalarSequence
from .spectra import _suspect_unbounded

DEFAULT_K_EXACT = 200
DEFAULT_K_SAMPLED = 10_000
DEFAULT_P = 8
DEFAULT_Q = 6
FLOAT_SIGN_TOL = 1e-12


@dataclass(frozen=True)
class Verdict:
    value: Optional[bool]
    mode: str                    # "analytic" | "exact" | "sampled"
    horizon: Optional[int] = None
    witness: Optional[tuple] = None
    note: str = ""

    def to_dict(self) -> dict:
        witness = None
        if self.witness is not None:
            witness = [str(w) if isinstance(w, Fraction) else w for w in self.witness]
        return {
            "value": self.value,
            "mode": self.mode,
            "horizon": self.horizon,
            "witness": witness,
            "note": self.note,
        }


def _gamma_list(seq: ScalarSequence, upto: int):
    """(values, exact_flag): exact Fractions when the family has them."""
    g0 = seq.gamma_exact(upto)
    if g0 is not None:
        return [seq.gamma_exact(k) for k in range(upto + 1)], True
    return [seq.gamma(k) for k in range(upto + 1)], False


def _diff(vals):
    return [b - a for a, b in zip(vals, vals[1:])]


def is_compact(seq: ScalarSequence, K: int = DEFAULT_K_SAMPLED) -> Verdict:
    """delta_k -> 0, i.e. the tuple consists of compact operators."""
    if seq.delta2_limit is not None:
        return Verdict(seq.delta2_limit == 0, "analytic", note="declared limit of delta2")
    if seq.delta2_liminf is not None and seq.delta2_liminf > 0:
        return Verdict(False, "analytic", note="declared liminf of delta2 is positive")
    d2 = seq.delta2_array(K)
    tail = d2[-max(1, K // 10):]
    return Verdict(
        bool(np.max(tail) < 1e-8),
        "sampled",
        horizon=K,
        note=f"tail max delta2 = {float(np.max(tail)):.3e}",
    )


def is_essentially_normal(seq: ScalarSequence, K: int = DEFAULT_K_SAMPLED) -> Verdict:
    """delta2(k) - delta2(k-1) -> 0: all commutators compact."""
    if seq.essentially_normal_declared is not None:
        witness = None
        if not seq.essentially_normal_declared:
            a, b = seq.delta2_exact(1), seq.delta2_exact(0)
            if a is not None and b is not None:
                witness = (0, abs(a - b))
        return Verdict(
            bool(seq.essentially_normal_declared),
            "analytic",
            witness=witness,
            note="declared by family",
        )
    d2 = seq.delta2_array(K)
    diffs = np.abs(np.diff(d2[-max(2, K // 10):]))
    worst = float(np.max(diffs))
    return Verdict(
        bool(worst < 1e-6),
        "sampled",
        horizon=K,
        note=f"tail max |delta2 difference| = {worst:.3e}",
    )


def is_hyponormal(seq: ScalarSequence, K: int = DEFAULT_K_EXACT) -> Verdict:
    """delta_k nondecreasing for k <= K (joint hyponormality of the tuple)."""
    if K < 1:
        raise ValueError("K must be >= 1")
    if seq.monotone_nondecreasing is True:
        return Verdict(True, "analytic", note="declared monotone nondecreasing")
    exact0 = seq.delta2_exact(0)
    if exact0 is not None:
        prev = exact0
        for k in range(1, K + 1):
            cur = seq.delta2_exact(k)
            if cur is None:
                break
            if cur < prev:
                return Verdict(False, "exact", horizon=K, witness=(k - 1,),
                               note=f"delta2 drops from {prev} to {cur} at k = {k - 1} -> {k}")
            prev = cur
        else:
            return Verdict(True, "exact", horizon=K, note="no drop up to the horizon")
    d2 = seq.delta2_array(K)
    drops = np.nonzero(np.diff(d2) < -FLOAT_SIGN_TOL)[0]
    if len(drops):
        k = int(drops[0])
        return Verdict(False, "sampled", horizon=K, witness=(k,))
    return Verdict(True, "sampled", horizon=K, note="no drop up to the horizon")


def q_isometry_order(
    seq: ScalarSequence, qmax: int = DEFAULT_Q, K: int = DEFAULT_K_EXACT
) -> Tuple[Optional[int], str]:
    """Smallest q <= qmax with the q-th gamma differences all zero, k <= K.

    Returns (order, mode). A definitive order needs the exact path; on
    floats the answer is only "consistent" with being a q-isometry.
    """
    if qmax < 1:
        raise ValueError("qmax must be >= 1")
    vals, exact = _gamma_list(seq, K + qmax)
    mode = "exact" if exact else "consistent-sampled"
    tol = 0.0 if exact else FLOAT_SIGN_TOL * max(abs(float(v)) for v in vals)
    diffs = vals
    for q in range(1, qmax + 1):
        diffs = _diff(diffs)
        window = diffs[: K + 1]
        if all(abs(d) <= tol for d in window):
            return q, mode
    return None, mode


def is_q_expansion(seq: ScalarSequence, q: int, K: int = DEFAULT_K_EXACT) -> Verdict:
    """(-1)^q * (q-th difference of gamma at k) <= 0 for all k <= K."""
    if q < 1:
        raise ValueError("q must be >= 1")
    vals, exact = _gamma_list(seq, K + q)
    diffs = vals
    for _ in range(q):
        diffs = _diff(diffs)
    sign = (-1) ** q
    tol = 0.0 if exact else FLOAT_SIGN_TOL * max(abs(float(v)) for v in vals)
    for k in range(K + 1):
        if sign * diffs[k] > tol:
            return Verdict(
                False,
                "exact" if exact else "sampled",
                horizon=K,
                witness=(k, diffs[k] if exact else float(diffs[k])),
            )
    return Verdict(True, "exact" if exact else "sampled", horizon=K)


def complete_hyperexpansion_up_to(
    seq: ScalarSequence, Q: int = DEFAULT_Q, K: int = DEFAULT_K_EXACT
) -> int:
    """Largest Q' <= Q with the expansion property at every order 1..Q'."""
    for q in range(1, Q + 1):
        if not is_q_expansion(seq, q, K).value:
            return q - 1
    return Q


def subnormal_consistency(
    seq: ScalarSequence, P: int = DEFAULT_P, K: int = DEFAULT_K_EXACT
) -> dict:
    """Necessary moment-type inequalities for joint subnormality.

    The criterion applies to a contraction, so gamma is first rescaled by
    the sup of delta2 (gt_k = gamma_k / S^k, which squashes the weights
    below 1); subnormality itself is scale-invariant, so nothing is lost.
    The check is (-1)^p * (p-th difference of gt at k) >= 0 for p <= P,
    k <= K: a pass means "consistent with subnormality up to order P",
    a failure is definitive and returns the violating (p, k).
    """
    if P < 1 or K < 1:
        raise ValueError("P and K must be >= 1")
    sup_exact = seq.sup_delta2_exact()
    if sup_exact is None and seq.sup_delta2_declared is None:
        probe = seq.delta2_array(max(K, 1000))
        if _suspect_unbounded(probe):
            raise ValueError(
                f"{seq.name}: delta2 keeps growing over the probe horizon; "
                "rescaling by sup delta is undefined for an unbounded sequence"
            )
        sup_val = float(np.max(probe))
        mode = "sampled"
    elif sup_exact is not None:
        sup_val = sup_exact
        mode = "exact"
    else:
        sup_val = float(seq.sup_delta2_declared)
        mode = "analytic"

    vals, exact = _gamma_list(seq, K + P)
    if exact and isinstance(sup_val, Fraction):
        scaled = [v / sup_val ** k for k, v in enumerate(vals)]
        tol = 0
    else:
        scaled = [float(v) / float(sup_val) ** k for k, v in enumerate(vals)]
        exact = False
        tol = FLOAT_SIGN_TOL
    diffs = scaled
    for p in range(1, P + 1):
        diffs = _diff(diffs)
        sign = (-1) ** p
        for k in range(K + 1):
            if sign * diffs[k] < -tol:
                return {
                    "pass": False,
                    "witness": (p, k),
                    "witness_value": str(diffs[k]) if exact else float(diffs[k]),
                    "order": P,
                    "horizon": K,
                    "mode": "exact" if exact else "sampled",
                    "rescale_mode": mode,
                }
    return {
        "pass": True,
        "witness": None,
        "order": P,
        "horizon": K,
        "mode": "exact" if exact else "sampled",
        "rescale_mode": mode,
    }


def is_szego(seq: ScalarSequence, K: int = DEFAULT_K_EXACT) -> Verdict:
    """delta2(k) = 1 for all k <= K: the tuple is the constant-one shift
    (equivalently, the iterated positive map fixes the identity)."""
    exact0 = seq.delta2_exact(0)
    if exact0 is not None:
        for k in range(K + 1):
            v = seq.delta2_exact(k)
            if v is None or v != 1:
                return Verdict(False, "exact", horizon=K, witness=(k,))
        return Verdict(True, "exact", horizon=K)
    for k in range(K + 1):
        if seq.delta2(k) != 1.0:
            return Verdict(False, "sampled", horizon=K, witness=(k,))
    return Verdict(True, "sampled", horizon=K)


@dataclass
class Classification:
    bounded: BoundednessReport
    compact: Verdict
    essentially_normal: Verdict
    szego: Verdict
    hyponormal: Verdict
    q_isometry_order: Optional[int]
    q_isometry_mode: str
    q_expansion: dict = field(default_factory=dict)
    complete_hyperexpansion_up_to: int = 0
    subnormal: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "bounded": {
                "verdict": self.bounded.verdict,
                "sup_delta2": self.bounded.sup_delta2,
                "horizon": self.bounded.horizon,
                "qualifier": self.bounded.qualifier,
            },
            "compact": self.compact.to_dict(),
            "essentially_normal": self.essentially_normal.to_dict(),
            "szego": self.szego.to_dict(),
            "hyponormal": self.hyponormal.to_dict(),
            "q_isometry_order": self.q_isometry_order,
            "q_isometry_mode": self.q_isometry_mode,
            "q_expansion": {str(q): v.to_dict() for q, v in self.q_expansion.items()},
            "complete_hyperexpansion_up_to": self.complete_hyperexpansion_up_to,
            "subnormal": {
                k: (list(v) if isinstance(v, tuple) else v)
                for k, v in self.subnormal.items()
            },
        }


def classification(
    seq: ScalarSequence,
    P: int = DEFAULT_P,
    Q: int = DEFAULT_Q,
    K: int = DEFAULT_K_EXACT,
    horizon: int = DEFAULT_K_SAMPLED,
    qmax: Optional[int] = None,
) -> Classification:
    """Run the whole battery on one sequence."""
    qmax = Q if qmax is None else qmax
    order, order_mode = q_isometry_order(seq, qmax, K)
    return Classification(
        bounded=seq.is_bounded(horizon),
        compact=is_compact(seq, horizon),
        essentially_normal=is_essentially_normal(seq, horizon),
        szego=is_szego(seq, K),
        hyponormal=is_hyponormal(seq, K),
        q_isometry_order=order,
        q_isometry_mode=order_mode,
        q_expansion={q: is_q_expansion(seq, q, K) for q in range(1, Q + 1)},
        complete_hyperexpansion_up_to=complete_hyperexpansion_up_to(seq, Q, K),
        subnormal=subnormal_consistency(seq, P, K),
    )
