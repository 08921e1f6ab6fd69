"""Spectral-part geometry from the limit formulas on the scalar data.

Three radii drive everything:

  * R: outer radius of the joint spectrum,
        lim_j sup_k (bbeta_{k+j}/bbeta_k)^(1/j),
  * r: radius of the largest open ball where every member series converges,
        liminf_j bbeta_j^(1/j),
  * i: inner radius of the approximate point spectrum,
        lim_j inf_k (bbeta_{k+j}/bbeta_k)^(1/j),

with i <= r <= R always. The limits over j get a three-tier answer:
analytic when the family declares a convergent delta, a stabilized sampled
estimate otherwise, and an explicitly inconclusive sampled answer when the
j-sequence refuses to settle. Divergence diagnostics are attached rather
than hidden: every estimate carries its j-sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .scalarseq import ScalarSequence

DEFAULT_K = 100_000
DEFAULT_J = 60
STABLE_WINDOW = 5
STABLE_TOL = 1e-4
MINFTY_RTOL = 1e-9
ESSNORM_SAMPLED_TOL = 1e-6


class NotEssentiallyNormalError(Exception):
    """The essential-spectrum shell formula requires essential normality."""


@dataclass
class RadiusEstimate:
    value: float
    mode: str                      # "analytic" | "sampled-stable" | "sampled-inconclusive" | "unbounded-suspected"
    j_grid: list = field(default_factory=list)
    sequence: list = field(default_factory=list)
    richardson: Optional[float] = None
    note: str = ""
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "mode": self.mode,
            "j_grid": list(self.j_grid),
            "sequence": [float(x) for x in self.sequence],
            "richardson": self.richardson,
            "note": self.note,
            **{k: v for k, v in self.extra.items()},
        }


@dataclass
class SpectralReport:
    m: int
    K: int
    J: int
    outer: RadiusEstimate
    convergence: RadiusEstimate
    inner: RadiusEstimate
    m_infty: list
    essentially_normal: dict
    essential_inner: Optional[float]
    essential_outer: Optional[float]
    essential_refusal: Optional[str]
    point_spectrum_boundary: str
    point_spectrum_exponent: Optional[float]

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "K": self.K,
            "J": self.J,
            "outer_radius": self.outer.to_dict(),
            "convergence_radius": self.convergence.to_dict(),
            "inner_radius": self.inner.to_dict(),
            "m_infty": [float(x) for x in self.m_infty],
            "essentially_normal": self.essentially_normal,
            "essential_inner": self.essential_inner,
            "essential_outer": self.essential_outer,
            "essential_refusal": self.essential_refusal,
            "point_spectrum_boundary": self.point_spectrum_boundary,
            "point_spectrum_exponent": self.point_spectrum_exponent,
        }


def _lag_sequence(logbb: np.ndarray, J: int, reduce) -> Tuple[list, list]:
    """Per-lag extreme of the window averages (logbb[k+j]-logbb[k])/j."""
    js, vals = [], []
    K = len(logbb) - 1
    for j in range(1, J + 1):
        if j >= K:
            break
        window = (logbb[j:] - logbb[: K + 1 - j]) / j
        js.append(j)
        vals.append(float(reduce(window)))
    return js, vals


def _stabilized(seq_vals) -> bool:
    if len(seq_vals) < STABLE_WINDOW:
        return False
    tail = seq_vals[-STABLE_WINDOW:]
    return max(tail) - min(tail) < STABLE_TOL


def _richardson(js, log_vals) -> Optional[float]:
    """1/j-extrapolation of the log-scale sequence from lags J/2 and J."""
    if len(js) < 4:
        return None
    j2 = js[-1]
    half = j2 // 2
    try:
        idx1 = js.index(half)
    except ValueError:
        return None
    a1, a2 = log_vals[idx1], log_vals[-1]
    j1 = js[idx1]
    return math.exp((j2 * a2 - j1 * a1) / (j2 - j1))


def _suspect_unbounded(d2: np.ndarray) -> bool:
    quarters = np.array_split(d2, 4)
    sups = [float(np.max(q)) for q in quarters]
    return all(b > a for a, b in zip(sups, sups[1:])) and sups[-1] > 2.0 * sups[0]


def outer_radius(seq: ScalarSequence, J: int = DEFAULT_J, K: int = DEFAULT_K) -> RadiusEstimate:
    """R: radius of the closed ball that is the joint spectrum."""
    if J < 1 or K < 2:
        raise ValueError("need J >= 1 and K >= 2")
    logbb = seq.log_bbeta_array(K)
    js, logvals = _lag_sequence(logbb, J, np.max)
    vals = [math.exp(v) for v in logvals]
    est = RadiusEstimate(value=math.nan, mode="", j_grid=js, sequence=vals)
    est.richardson = _richardson(js, logvals)
    if seq.delta2_limit is not None:
        est.value = math.sqrt(seq.delta2_limit)
        est.mode = "analytic"
        est.note = "family declares lim delta2"
        return est
    if _suspect_unbounded(seq._d2[:K]):
        est.value = math.inf
        est.mode = "unbounded-suspected"
        est.note = "delta2 quarter-sups increase without settling; sup may be infinite"
        return est
    # sup_k over a window never exceeds the true sup, and R = inf_j of the
    # per-lag sups, so the min over computed lags is the tightest estimate.
    est.value = min(vals)
    est.mode = "sampled-stable" if _stabilized(vals) else "sampled-inconclusive"
    est.note = f"sampled over k <= {K}, lags j <= {js[-1]}"
    return est


def convergence_radius(seq: ScalarSequence, K: int = DEFAULT_K) -> RadiusEstimate:
    """r: liminf_j bbeta_j^(1/j), the member-series convergence radius."""
    if K < 2:
        raise ValueError("K must be >= 2")
    logbb = seq.log_bbeta_array(K)
    j = np.arange(1, K + 1)
    a = logbb[1:] / j
    tail_start = K // 2
    tail = a[tail_start - 1 :]
    est = RadiusEstimate(
        value=math.exp(float(np.min(tail))),
        mode="sampled-stable",
        j_grid=[tail_start, K],
        sequence=[math.exp(float(np.min(tail))), math.exp(float(a[-1]))],
        note=f"running infimum over the tail j in [{tail_start}, {K}]",
    )
    if seq.delta2_limit is not None:
        est.value = math.sqrt(seq.delta2_limit)
        est.mode = "analytic"
        est.note = "family declares lim delta2"
    return est


def inner_radius(seq: ScalarSequence, J: int = DEFAULT_J, K: int = DEFAULT_K) -> RadiusEstimate:
    """i: inner radius of the approximate point spectrum.

    The per-lag infima are cross-checked against the independent route
    through the diagonal of the iterated positive map: both are window
    products of delta2, computed from separately accumulated sums. A
    relative mismatch beyond 1e-9 at any lag is a hard error.
    """
    if J < 1 or K < 2:
        raise ValueError("need J >= 1 and K >= 2")
    logbb = seq.log_bbeta_array(K)
    js, logvals = _lag_sequence(logbb, J, np.min)
    vals = [math.exp(v) for v in logvals]

    # independent accumulation: full log delta2 sums, halved only at the end
    s_full = np.empty(K + 1)
    s_full[0] = 0.0
    np.cumsum(np.log(seq._d2[:K]), out=s_full[1:])
    m_infty = []
    for j in js:
        window = (s_full[j:] - s_full[: K + 1 - j]) / (2 * j)
        m_infty.append(math.exp(float(np.min(window))))
    for j, a, b in zip(js, vals, m_infty):
        if abs(a - b) > MINFTY_RTOL * max(abs(a), abs(b), 1e-300):
            raise RuntimeError(
                f"m-infinity cross-check failed at lag {j}: {a!r} vs {b!r}"
            )

    est = RadiusEstimate(value=math.nan, mode="", j_grid=js, sequence=vals)
    est.extra["m_infty"] = [float(x) for x in m_infty]
    est.richardson = _richardson(js, logvals)
    if seq.delta2_limit is not None:
        est.value = math.sqrt(seq.delta2_limit)
        est.mode = "analytic"
        est.note = "family declares lim delta2"
        return est
    # inf_k over a window never undershoots the true inf; i = sup_j of the
    # per-lag infima, so the max over computed lags is the tightest estimate.
    est.value = max(vals)
    est.mode = "sampled-stable" if _stabilized(vals) else "sampled-inconclusive"
    est.note = f"sampled over k <= {K}, lags j <= {js[-1]}"
    return est


def essential_normality_gate(seq: ScalarSequence, K: int, window: int) -> dict:
    """Affirm or refuse delta2(k) - delta2(k-1) -> 0."""
    if seq.essentially_normal_declared is not None:
        return {
            "value": bool(seq.essentially_normal_declared),
            "mode": "analytic",
            "detail": "declared by family",
        }
    d2 = seq.delta2_array(K)
    lo = max(1, K - window)
    diffs = np.abs(np.diff(d2[lo - 1 :]))
    worst = float(np.max(diffs))
    return {
        "value": bool(worst < ESSNORM_SAMPLED_TOL),
        "mode": "sampled",
        "detail": f"max |delta2(k)-delta2(k-1)| = {worst:.3e} over k in [{lo}, {K}]",
        "horizon": K,
    }


def essential_shell(
    seq: ScalarSequence, K: int = DEFAULT_K, window: Optional[int] = None
) -> Tuple[float, float]:
    """(inner, outer) radii of the essential-spectrum shell.

    Only meaningful under essential normality; refuses loudly otherwise.
    """
    window = K // 10 if window is None else window
    gate = essential_normality_gate(seq, K, window)
    if not gate["value"]:
        raise NotEssentiallyNormalError(
            f"{seq.name}: not essentially normal ({gate['detail']}); "
            "the shell formula does not apply"
        )
    if seq.delta2_limit is not None:
        lam = math.sqrt(seq.delta2_limit)
        return (lam, lam)
    if seq.delta2_liminf is not None and seq.delta2_limsup is not None:
        return (math.sqrt(seq.delta2_liminf), math.sqrt(seq.delta2_limsup))
    d2 = seq.delta2_array(K)
    lo = max(0, K - window)
    tail = d2[lo:]
    return (math.sqrt(float(np.min(tail))), math.sqrt(float(np.max(tail))))


def point_spectrum_boundary(
    seq: ScalarSequence, m: int, K: int = DEFAULT_K, r: Optional[float] = None
) -> Tuple[str, Optional[float]]:
    """Whether the adjoint's point spectrum is the open or the closed ball.

    Decided by a log-log tail-exponent fit of the boundary test series
    terms C(m-1+k, k) r^(2k) / gamma(k); slopes within 0.1 of -1 are
    reported as inconclusive rather than guessed.
    """
    if r is None:
        r = convergence_radius(seq, K).value
    if not math.isfinite(r) or r <= 0:
        return "inconclusive", None
    logbb = seq.log_bbeta_array(K)
    ks = np.arange(K // 2, K + 1)
    lgamma = np.vectorize(math.lgamma)
    logterms = (
        lgamma(m + ks)
        - math.lgamma(m)
        - lgamma(ks + 1.0)
        + 2.0 * ks * math.log(r)
        - 2.0 * logbb[ks]
    )
    slope = float(np.polyfit(np.log(ks), logterms, 1)[0])
    if slope < -1.1:
        return "closed-ball", slope
    if slope > -0.9:
        return "open-ball", slope
    return "inconclusive", slope


def spectral_report(
    seq: ScalarSequence,
    m: int,
    K: int = DEFAULT_K,
    J: int = DEFAULT_J,
    window: Optional[int] = None,
) -> SpectralReport:
    window = K // 10 if window is None else window
    outer = outer_radius(seq, J, K)
    conv = convergence_radius(seq, K)
    inner = inner_radius(seq, J, K)
    gate = essential_normality_gate(seq, K, window)
    ess_in = ess_out = refusal = None
    try:
        ess_in, ess_out = essential_shell(seq, K, window)
    except NotEssentiallyNormalError as exc:
        refusal = str(exc)
    psb, slope = point_spectrum_boundary(seq, m, K, r=conv.value)
    return SpectralReport(
        m=m,
        K=K,
        J=J,
        outer=outer,
        convergence=conv,
        inner=inner,
        m_infty=inner.extra.get("m_infty", []),
        essentially_normal=gate,
        essential_inner=ess_in,
        essential_outer=ess_out,
        essential_refusal=refusal,
        point_spectrum_boundary=psb,
        point_spectrum_exponent=slope,
    )
