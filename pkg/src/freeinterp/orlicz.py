"""Orlicz functions, sampled growth predicates and the non-Carleson example.

All growth predicates are checked on finite samples; results carry the label
"sampled" and report the empirical threshold from which the inequality holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .certificates import Certificate, _certificate, _check_shadow_disjoint, verify_majorant
from .geometry import TWO_PI, log_delta, pseudo_hyperbolic_polar
from .potential import Measure, StepWeight, poisson_extend
from .sequences import Sequence, attach_partner_points, gen_disjoint_shadow, separation_constant

REL_TOL = 1e-12


@dataclass
class OrliczFunction:
    name: str
    func: Callable
    params: dict = field(default_factory=dict)

    def __call__(self, t):
        return self.func(t)

    @classmethod
    def power(cls, p: float = 2.0) -> "OrliczFunction":
        if p <= 1:
            raise ValueError("power Orlicz functions need p > 1")

        def f(t):
            t = np.asarray(t, dtype=float)
            out = np.where(t > 0, np.abs(t) ** p, 0.0)
            return float(out) if out.ndim == 0 else out

        return cls(f"power({p:g})", f, {"p": p})

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "OrliczFunction":
        def f(t):
            out = np.exp(rate * np.asarray(t, dtype=float))
            return float(out) if out.ndim == 0 else out

        return cls(f"exp({rate:g}t)", f, {"rate": rate})

    def spot_checks(self, ts=None) -> dict:
        """Convexity, monotonicity and the phi(t)/t growth trend on a sample grid."""
        ts = np.linspace(-2.0, 50.0, 521) if ts is None else np.sort(np.asarray(ts, dtype=float))
        v = np.asarray(self(ts), dtype=float)
        scale = np.maximum(np.abs(v), 1.0)
        second = v[:-2] - 2.0 * v[1:-1] + v[2:]
        pos = ts > 0
        ratio = v[pos] / ts[pos]
        tail = ratio[len(ratio) // 2:]
        return {
            "nonnegative": bool(np.all(v >= 0)),
            "monotone": bool(np.all(np.diff(v) >= -REL_TOL * scale[1:])),
            "convex": bool(np.all(second >= -1e-9 * scale[1:-1])),
            "superlinear_trend": bool(len(tail) > 1 and np.all(np.diff(tail) > 0) and tail[-1] > tail[0]),
            "label": "sampled",
        }


def _threshold(ok, ts, tail_fraction=0.1):
    """Smallest sample from which ok holds to the end, or None if it fails near the end."""
    ok = np.asarray(ok, dtype=bool)
    if not ok[-1]:
        return None
    bad = np.flatnonzero(~ok)
    start = 0 if len(bad) == 0 else bad[-1] + 1
    if start > int((1.0 - tail_fraction) * (len(ts) - 1)):
        return None
    return float(ts[start])


def check_delta2(phi: OrliczFunction, M: float, K: float, ts) -> float | None:
    """Empirical t0 with phi(t+2) <= M phi(t) + K for all sampled t >= t0."""
    ts = np.sort(np.asarray(ts, dtype=float))
    lhs = np.asarray(phi(ts + 2.0), dtype=float)
    rhs = M * np.asarray(phi(ts), dtype=float) + K
    return _threshold(lhs <= rhs * (1 + REL_TOL), ts)


def check_v2(phi: OrliczFunction, alpha: float, ts) -> float | None:
    """Empirical t1 with 2 phi(t) <= phi(t + alpha) for all sampled t >= t1."""
    ts = np.sort(np.asarray(ts, dtype=float))
    lhs = 2.0 * np.asarray(phi(ts), dtype=float)
    rhs = np.asarray(phi(ts + alpha), dtype=float)
    return _threshold(lhs <= rhs * (1 + REL_TOL), ts)


def subadditive_constant(phi: OrliczFunction, ts, t0: float = 0.0) -> float | None:
    """Smallest c >= 1 with phi(a+b) <= c(phi(a) + phi(b)) over sampled a, b >= t0.

    None when the constant keeps growing with the sample range.
    """
    ts = np.sort(np.asarray(ts, dtype=float))
    ts = ts[ts >= t0]
    if len(ts) < 10:
        return None

    def worst(s):
        a, b = s[:, None], s[None, :]
        den = np.asarray(phi(a), dtype=float) + np.asarray(phi(b), dtype=float)
        num = np.asarray(phi(a + b), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(den > 0, num / den, np.where(num > 0, np.inf, 0.0))
        return float(np.max(r))

    head = ts[: int(0.9 * len(ts))]
    full, part = worst(ts), worst(head)
    if not math.isfinite(full) or full > part * (1 + 1e-9):
        return None
    return max(full, 1.0)


DEFAULT_M = (1.5, 2.0, 4.0, 8.0, 16.0, 32.0)
DEFAULT_K = (0.0, 1.0, 2.0, 4.0)
DEFAULT_ALPHA = (math.log(2.0), 1.0, 2.0, 4.0, 8.0, 16.0)


def check_growth(phi: OrliczFunction, t_range=(0.0, 100.0), params: dict | None = None) -> dict:
    """Search small parameter grids for Delta_2, V_2 and subadditivity witnesses."""
    params = params or {}
    lo, hi = t_range
    ts = np.linspace(lo, hi, int(params.get("samples", 401)))
    delta2 = None
    for M in params.get("M", DEFAULT_M):
        for K in params.get("K", DEFAULT_K):
            t0 = check_delta2(phi, M, K, ts)
            if t0 is not None:
                delta2 = {"M": M, "K": K, "t0": t0}
                break
        if delta2:
            break
    v2 = None
    for alpha in params.get("alpha", DEFAULT_ALPHA):
        t1 = check_v2(phi, alpha, ts)
        if t1 is not None:
            v2 = {"alpha": alpha, "t1": t1}
            break
    sub_ts = np.linspace(max(lo, params.get("t0", 0.0)), hi, int(params.get("pair_samples", 201)))
    c = subadditive_constant(phi, sub_ts, params.get("t0", 0.0))
    return {"delta2": delta2, "V2": v2, "subadditive_c": c, "t_range": [lo, hi], "label": "sampled"}


# --- sufficiency and the example --------------------------------------------

def phi_integral_quadrature(w: StepWeight, phi: OrliczFunction) -> float:
    """Independent quadrature of phi(w) against normalized arc length."""
    edges = sorted({0.0, TWO_PI} | {x for a, b, _ in w.elementary_intervals() for x in (a, b)})
    parts = []
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        val, _ = integrate.quad(lambda s: float(phi(w(s))), a, b, epsabs=0.0, epsrel=1e-12)
        parts.append(val)
    return math.fsum(parts) / TWO_PI


def orlicz_sufficiency_check(seq: Sequence, w: StepWeight, phi: OrliczFunction, tol: float = 1e-9) -> dict:
    """Majorant certificate for w together with the integral of phi(w)."""
    if len(w) == 0 or np.all(w.values <= 0):
        raise ValueError("weight must be positive")
    cert = verify_majorant(seq, Measure(w), tol)
    integral = w.integrate_phi(phi)
    return {"majorant_cert": cert, "phi_integral": integral,
            "verdict": bool(cert.verdict and math.isfinite(integral))}


@dataclass
class OrliczExample:
    seq: Sequence
    u: StepWeight
    report: dict
    certificate: Certificate

    def to_dict(self) -> dict:
        out = self.certificate.to_dict()
        out.update({k: v for k, v in self.report.items()})
        return out


def default_base(n: int) -> Sequence:
    return gen_disjoint_shadow(4.0 ** -np.arange(1, n + 1))


def build_orlicz_example(p: float = 2.0, base: Sequence | None = None, gamma=None, N: int = 15,
                         tol: float = 1e-9) -> OrliczExample:
    """Non-Carleson sequence with an integrable majorant weight for phi_p.

    eps_n = (1-|lam_n|) gamma_n^{1/p}; u = sum gamma_n^{1/p} chi_{I_n}; partners
    lam'_n sit at pseudo-hyperbolic distance exp(-gamma_n^{1/p}) from lam_n.
    """
    if p <= 1:
        raise ValueError("p must exceed 1")
    base = default_base(N) if base is None else base
    n = len(base)
    gamma = np.arange(1, n + 1, dtype=float) ** 2 if gamma is None else np.asarray(gamma, dtype=float)
    if gamma.shape != (n,):
        raise ValueError("gamma must be aligned with the base sequence")
    if np.any(gamma <= 0) or np.any(np.diff(gamma) <= 0):
        raise ValueError("gamma must be positive and strictly increasing")
    _check_shadow_disjoint(base)

    g = base.gap
    root = gamma ** (1.0 / p)
    eps = g * root
    u = StepWeight(base.theta, math.pi * g, root)
    seq = attach_partner_points(base, eps)

    phi = OrliczFunction.power(p)
    step_integral = u.integrate_phi(phi)
    closed_form = math.fsum(g * gamma)
    partial = np.cumsum(g * gamma)

    pair = pseudo_hyperbolic_polar(g, base.theta, seq.gap[n:], seq.theta[n:])
    a = -log_delta(seq)
    pu = poisson_extend(Measure(u), seq)
    need = a / pu
    scale = float(need.max())
    # minimal scale for each truncation: base and partner of the first k pairs
    history = []
    for k in range(1, n + 1):
        sub = seq.subset(np.r_[np.arange(k), n + np.arange(k)])
        history.append(float(np.max(-log_delta(sub) / poisson_extend(Measure(u), sub))))
    target = scale * pu[:n] - root
    cert = _certificate(seq, Measure(u).scaled(scale), "orlicz-example", tol,
                        {"p": p, "scale": scale, "N": n})
    report = {
        "phi_integral": step_integral,
        "closed_form_integral": closed_form,
        "integral_partial_sums": partial.tolist(),
        "min_pair_distance": float(pair.min()),
        "pair_distances": pair.tolist(),
        "expected_pair_distances": np.exp(-root).tolist(),
        "separation_constant": separation_constant(seq),
        "scale": scale,
        "scale_history": history,
        "base_target_margins": target.tolist(),
        "scale_bounded": _bounded(history),
    }
    return OrliczExample(seq, u, report, cert)


def _bounded(history) -> bool:
    """Sampled boundedness: the required scale settles rather than growing.

    The increments over the last third must shrink relative to the first third.
    """
    h = np.asarray(history, dtype=float)
    if len(h) < 6 or not np.all(np.isfinite(h)):
        return bool(np.all(np.isfinite(h)))
    d = np.abs(np.diff(h))
    third = max(len(d) // 3, 1)
    return bool(d[-third:].max() <= max(d[:third].max(), 1e-12))
