"""Finite sequences in the disk and the families used throughout the library."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityExceeded, DuplicatePoint, InvalidPoint, Underflow
from .geometry import (
    TWO_PI,
    DiskPoint,
    arcs_disjoint,
    as_polar,
    check_guard,
    family_index,
    log_delta,
    pseudo_hyperbolic_polar,
    square_of_point,
)


@dataclass
class Sequence:
    """Finite, pairwise distinct sequence of disk points.

    ``gap`` holds 1 - |lambda| exactly; ``theta`` the arguments in [0, 2pi).
    """

    gap: np.ndarray
    theta: np.ndarray
    label: str = ""
    generator_params: dict = field(default_factory=dict)
    guard: float = 0.0

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.gap, dtype=float)).copy()
        t = np.atleast_1d(np.asarray(self.theta, dtype=float)).copy()
        if g.shape != t.shape or g.ndim != 1:
            raise InvalidPoint("gap and theta must be 1-d arrays of equal length")
        if len(g):
            check_guard(g, self.guard)
            if not np.all(np.isfinite(t)):
                raise InvalidPoint("non-finite angle")
        t = np.mod(t, TWO_PI)
        t[t >= TWO_PI] = 0.0
        t[g == 1.0] = 0.0
        self.gap, self.theta = g, t
        if len(g) > 1:
            keys = np.stack([g, t], axis=1)
            if len(np.unique(keys, axis=0)) != len(g):
                raise DuplicatePoint("sequence contains repeated points")

    @classmethod
    def from_points(cls, points, label: str = "", guard: float = 0.0, **params) -> "Sequence":
        pts = list(points)
        if not pts:
            return cls(np.empty(0), np.empty(0), label, dict(params), guard)
        gt = [as_polar(p) for p in pts]
        return cls(np.array([float(a) for a, _ in gt]), np.array([float(b) for _, b in gt]),
                   label, dict(params), guard)

    @classmethod
    def from_polar(cls, r, theta, label: str = "", **params) -> "Sequence":
        return cls(1.0 - np.asarray(r, dtype=float), theta, label, dict(params))

    @property
    def r(self) -> np.ndarray:
        return 1.0 - self.gap

    @property
    def z(self) -> np.ndarray:
        return self.r * np.exp(1j * self.theta)

    def __len__(self):
        return len(self.gap)

    def __getitem__(self, i) -> DiskPoint:
        return DiskPoint(self.gap[i], self.theta[i])

    def points(self):
        return [self[i] for i in range(len(self))]

    def subset(self, idx, label=None) -> "Sequence":
        idx = np.asarray(idx, dtype=int)
        return Sequence(self.gap[idx], self.theta[idx], label if label is not None else self.label,
                        dict(self.generator_params), self.guard)

    def concat(self, other: "Sequence", label: str = "") -> "Sequence":
        return Sequence(np.concatenate([self.gap, other.gap]), np.concatenate([self.theta, other.theta]),
                        label or self.label, {}, self.guard)

    @property
    def blaschke_sum(self) -> float:
        return math.fsum(self.gap)


# --- generators -------------------------------------------------------------

def gen_radial(q: float, n: int, theta: float = 0.0, guard: float = 0.0) -> Sequence:
    """lambda_k = (1 - q^k) e^{i theta}, k = 1..n."""
    if not 0 < q < 1:
        raise ValueError("ratio q must lie in (0, 1)")
    if n < 1:
        raise ValueError("count must be positive")
    gap = q ** np.arange(1, n + 1, dtype=float)
    return Sequence(gap, np.full(n, float(theta)), f"radial q={q}", {"kind": "radial", "q": q, "n": n,
                    "theta": theta}, guard)


def gen_stolz(q: float, n: int, theta: float = 0.0, spread: float = 0.5) -> Sequence:
    """Points with gaps q^k oscillating inside a Stolz angle at e^{i theta}.

    The angular offset is ``spread * (-1)^k * gap``, so every point lies in
    Gamma_alpha(e^{i theta}) once alpha >= sqrt(1 + spread^2).
    """
    if not 0 < q < 1:
        raise ValueError("ratio q must lie in (0, 1)")
    if n < 1:
        raise ValueError("count must be positive")
    k = np.arange(1, n + 1, dtype=float)
    gap = q ** k
    ang = theta + spread * np.where(k % 2 == 0, 1.0, -1.0) * gap
    return Sequence(gap, ang, f"stolz q={q}", {"kind": "stolz", "q": q, "n": n, "theta": theta,
                    "spread": spread})


def pack_arcs(half_widths) -> np.ndarray:
    """Centers placing closed arcs of the given half-widths disjointly around the circle.

    Arcs are laid out in order with equal slack between neighbours (including
    the wrap-around gap).
    """
    h = np.asarray(half_widths, dtype=float)
    total = 2.0 * math.fsum(h)
    if total >= TWO_PI:
        raise CapacityExceeded(f"arcs of total measure {total / TWO_PI:.6g} cannot be disjoint")
    slack = (TWO_PI - total) / len(h)
    centers = np.empty(len(h))
    pos = slack / 2.0
    for i, hw in enumerate(h):
        centers[i] = pos + hw
        pos += 2.0 * hw + slack
    return centers


def default_tangent_gaps(n: int, fill: float = 0.5) -> np.ndarray:
    """Gaps with sqrt(gap_k) = kappa / k^2 so that the tangent arcs fill at most ``fill``."""
    kappa = fill * 6.0 / math.pi ** 2
    k = np.arange(1, n + 1, dtype=float)
    return (kappa / k ** 2) ** 2


def gen_disjoint_tangent(n: int, gaps=None, fill: float = 0.5) -> Sequence:
    """Sequence whose tangent arcs K_lambda are pairwise disjoint.

    Angles are packed greedily in order; disjointness is re-checked afterwards.
    """
    if n < 1:
        raise ValueError("count must be positive")
    gaps = default_tangent_gaps(n, fill) if gaps is None else np.asarray(gaps, dtype=float)
    if len(gaps) != n:
        raise ValueError("gaps must have length n")
    check_guard(gaps)
    hw = math.pi * np.sqrt(gaps)
    centers = pack_arcs(hw)
    if not arcs_disjoint(centers, hw):
        raise CapacityExceeded("tangent arcs overlap after packing")
    return Sequence(gaps, centers, f"disjoint-tangent n={n}",
                    {"kind": "disjoint-tangent", "n": n, "fill": fill})


def gen_disjoint_shadow(gaps, label: str = "disjoint-shadow") -> Sequence:
    """Sequence with the given gaps and pairwise disjoint shadow arcs I_lambda."""
    gaps = np.asarray(gaps, dtype=float)
    check_guard(gaps)
    hw = math.pi * gaps
    centers = pack_arcs(hw)
    if not arcs_disjoint(centers, hw):
        raise CapacityExceeded("shadow arcs overlap after packing")
    return Sequence(gaps, centers, label, {"kind": "disjoint-shadow", "n": len(gaps)})


def gen_random_separated(n: int, delta: float = 0.5, seed: int = 0, min_gap: float = 1e-4,
                         max_tries: int = 100000) -> Sequence:
    """Rejection sample ``n`` points with pairwise pseudo-hyperbolic distance >= delta."""
    rng = np.random.default_rng(seed)
    gaps, thetas = [], []
    tries = 0
    while len(gaps) < n:
        tries += 1
        if tries > max_tries:
            raise CapacityExceeded(f"could only place {len(gaps)} separated points")
        g = float(np.exp(rng.uniform(math.log(min_gap), 0.0)))
        t = float(rng.uniform(0.0, TWO_PI))
        if gaps and np.min(pseudo_hyperbolic_polar(g, t, np.array(gaps), np.array(thetas))) < delta:
            continue
        gaps.append(g)
        thetas.append(t)
    return Sequence(np.array(gaps), np.array(thetas), f"random separated n={n}",
                    {"kind": "random-separated", "n": n, "delta": delta, "seed": seed})


def _outward(gap, d):
    """Gap of the point radially outward at pseudo-hyperbolic distance d."""
    return gap * (1.0 - d) / (1.0 + (1.0 - gap) * d)


def attach_partner_points(seq: Sequence, eps) -> Sequence:
    """Add lambda'_n on the radius through lambda_n with |b_{lambda'_n}(lambda_n)| = exp(-eps_n/(1-|lambda_n|)).

    The result lists the base points first, then the partners in the same order.
    """
    eps = np.asarray(eps, dtype=float)
    if eps.shape != seq.gap.shape:
        raise ValueError("eps must be aligned with the sequence")
    if np.any(eps <= 0):
        raise ValueError("eps must be positive")
    d = np.exp(-eps / seq.gap)
    bad = np.flatnonzero(d == 0.0)
    if len(bad):
        raise Underflow(f"partner distance underflows at n={int(bad[0])}", index=int(bad[0]))
    new_gap = _outward(seq.gap, d)
    bad = np.flatnonzero(new_gap == seq.gap)
    if len(bad):
        raise Underflow(f"partner point rounds onto its base point at n={int(bad[0])}", index=int(bad[0]))
    bad = np.flatnonzero(new_gap <= max(seq.guard, 0.0))
    if len(bad):
        raise Underflow(f"partner point reaches the circle at n={int(bad[0])}", index=int(bad[0]))
    out = Sequence(np.concatenate([seq.gap, new_gap]), np.concatenate([seq.theta, seq.theta]),
                   f"{seq.label} + partners", dict(seq.generator_params), seq.guard)
    out.generator_params.update({"partnered": True, "base_count": len(seq), "eps": eps.tolist()})
    return out


def gen_clustered(base: Sequence, size: int, delta: float = 0.5) -> Sequence:
    """Replace every base point by a radial cluster of ``size`` points of diameter ``delta``.

    Consecutive cluster points are at equal hyperbolic steps, so every pair
    inside a cluster has pseudo-hyperbolic distance at most ``delta``.
    """
    if size < 1:
        raise ValueError("cluster size must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    gaps = [base.gap]
    if size > 1:
        step = math.tanh(math.atanh(delta) / (size - 1))
        for _ in range(size - 1):
            gaps.append(_outward(gaps[-1], step))
    out = Sequence(np.concatenate(gaps), np.tile(base.theta, size), f"{base.label} clustered x{size}",
                   dict(base.generator_params), base.guard)
    out.generator_params.update({"cluster_size": size, "cluster_delta": delta})
    return out


# --- classification ---------------------------------------------------------

@dataclass
class ClassificationReport:
    blaschke_sum: float
    separation_constant: float
    terms_CN: np.ndarray
    verdicts: dict

    def to_dict(self) -> dict:
        return {
            "blaschke_sum": self.blaschke_sum,
            "separation_constant": self.separation_constant,
            "terms_CN": [float(x) for x in self.terms_CN],
            "verdicts": dict(self.verdicts),
        }


def separation_constant(seq: Sequence) -> float:
    """inf over distinct pairs of |b_lambda(lambda')|; 1 for fewer than two points."""
    if len(seq) < 2:
        return 1.0
    g, t = seq.gap, seq.theta
    m = pseudo_hyperbolic_polar(g[:, None], t[:, None], g[None, :], t[None, :])
    np.fill_diagonal(m, np.inf)
    return float(m.min())


def cn_terms(seq: Sequence) -> np.ndarray:
    """(1-|lambda|) log(1/delta_lambda) for every point."""
    return seq.gap * -log_delta(seq)


def classify(seq: Sequence) -> ClassificationReport:
    if len(seq) == 0:
        raise ValueError("cannot classify an empty sequence")
    t = cn_terms(seq)
    order = np.argsort(-seq.gap, kind="stable")  # increasing |lambda|
    ordered = t[order]
    quart = max(1, int(math.ceil(len(t) / 4)))
    first, last = float(ordered[:quart].max()), float(ordered[-quart:].max())
    verdicts = {
        "CN_trend": bool(last < first) if len(t) > 1 else True,
        "CN_first_quartile_max": first,
        "CN_last_quartile_max": last,
        "CNN_bound": float(t.max()),
        "CS_sum": math.fsum(t),
        "truncation_limited": True,
    }
    return ClassificationReport(seq.blaschke_sum, separation_constant(seq), t, verdicts)


# --- dyadic splitting -------------------------------------------------------

def family_labels(seq: Sequence) -> np.ndarray:
    return np.array([family_index(square_of_point(p)) for p in seq.points()], dtype=int)


def split_four_families(seq: Sequence) -> list:
    """Partition by the parity family of each point's dyadic square."""
    fam = family_labels(seq)
    return [seq.subset(np.flatnonzero(fam == i), f"{seq.label} family {i}") for i in (1, 2, 3, 4)]


def same_family_separation(seq: Sequence) -> float:
    """Min |b_z(w)| over pairs lying in distinct squares of the same family (1 if none)."""
    squares = [square_of_point(p) for p in seq.points()]
    fam = np.array([family_index(q) for q in squares])
    nn = np.array([q.n for q in squares])
    kk = np.array([q.k for q in squares])
    g, t = seq.gap, seq.theta
    best = 1.0
    for f in (1, 2, 3, 4):
        idx = np.flatnonzero(fam == f)
        if len(idx) < 2:
            continue
        m = pseudo_hyperbolic_polar(g[idx][:, None], t[idx][:, None], g[idx][None, :], t[idx][None, :])
        distinct = (nn[idx][:, None] != nn[idx][None, :]) | (kk[idx][:, None] != kk[idx][None, :])
        if distinct.any():
            best = min(best, float(m[distinct].min()))
    return best
