"""Poisson and Herglotz transforms of step weights and atomic measures.

Arc integrals of the Poisson kernel are evaluated in closed form.  With
p(t) = cos(t/2) + i K sin(t/2), K = (1+r)/(1-r), the increase of
arg p over [a, b] equals pi times the harmonic measure of the arc, which gives

    omega(z, [a, b]) = atan2(K sin((b-a)/2),
                             cos(a/2)cos(b/2) + K^2 sin(a/2)sin(b/2)) / pi

for angles measured from arg z.  Multiplying both arguments by (1-r)^2 keeps
the evaluation finite and free of cancellation near the circle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import HypothesisViolated, NumericAccuracyWarning
from .geometry import TWO_PI, CircleArc, Polar, as_polar, log_delta, stolz_mask, stolz_shadow_half_width


# --- measures ---------------------------------------------------------------

@dataclass
class StepWeight:
    """Sum of constant multiples of arc indicators; overlapping arcs add."""

    centers: np.ndarray = field(default_factory=lambda: np.empty(0))
    half_widths: np.ndarray = field(default_factory=lambda: np.empty(0))
    values: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        self.centers = np.mod(np.atleast_1d(np.asarray(self.centers, dtype=float)), TWO_PI)
        self.half_widths = np.minimum(np.atleast_1d(np.asarray(self.half_widths, dtype=float)), math.pi)
        self.values = np.atleast_1d(np.asarray(self.values, dtype=float))
        if not (self.centers.shape == self.half_widths.shape == self.values.shape):
            raise ValueError("step weight arrays must have equal length")
        if np.any(self.half_widths <= 0):
            raise ValueError("arc half-widths must be positive")
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise ValueError("step values must be finite and nonnegative")

    @classmethod
    def from_pieces(cls, pieces) -> "StepWeight":
        pieces = list(pieces)
        return cls([a.center for a, _ in pieces], [a.half_width for a, _ in pieces], [v for _, v in pieces])

    @classmethod
    def constant(cls, value: float) -> "StepWeight":
        return cls([0.0], [math.pi], [value])

    @classmethod
    def on_grid(cls, values) -> "StepWeight":
        """Cells of width 2pi/G centered at the grid angles 2pi j/G."""
        values = np.asarray(values, dtype=float)
        g = len(values)
        return cls(TWO_PI * np.arange(g) / g, np.full(g, math.pi / g), values)

    def __len__(self):
        return len(self.values)

    @property
    def pieces(self):
        return [(CircleArc(c, h), float(v)) for c, h, v in zip(self.centers, self.half_widths, self.values)]

    @property
    def sigmas(self) -> np.ndarray:
        return self.half_widths / math.pi

    def l1_norm(self) -> float:
        return math.fsum(self.values * self.sigmas)

    def scaled(self, s: float) -> "StepWeight":
        return StepWeight(self.centers, self.half_widths, s * self.values)

    def __call__(self, angle):
        """Pointwise value (sum over arcs containing the angle)."""
        ang = np.atleast_1d(np.asarray(angle, dtype=float))
        d = np.abs(np.mod(ang[:, None] - self.centers[None, :] + math.pi, TWO_PI) - math.pi)
        # closed arcs, with rounding slack so shared endpoints are never missed
        out = (d <= self.half_widths[None, :] + 4e-15) @ self.values
        return out if np.ndim(angle) else float(out[0])

    def elementary_intervals(self):
        """Disjoint intervals of [0, 2pi) with the summed value on each."""
        pos, delta = [0.0, TWO_PI], [0.0, 0.0]
        for c, h, v in zip(self.centers, self.half_widths, self.values):
            for a, b in CircleArc(c, h).intervals():
                pos += [a, b]
                delta += [v, -v]
        pos = np.asarray(pos)
        delta = np.asarray(delta)
        order = np.argsort(pos, kind="stable")
        pos, level = pos[order], np.cumsum(delta[order])
        out = []
        for i in range(len(pos) - 1):
            a, b = pos[i], pos[i + 1]
            if b > a:
                out.append((float(a), float(b), max(float(level[i]), 0.0)))
        return out

    def integrate_phi(self, phi) -> float:
        """Integral of phi(w) against normalized arc length."""
        return math.fsum(phi(v) * (b - a) / TWO_PI for a, b, v in self.elementary_intervals())


@dataclass
class AtomicMeasure:
    angles: np.ndarray = field(default_factory=lambda: np.empty(0))
    masses: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        self.angles = np.mod(np.atleast_1d(np.asarray(self.angles, dtype=float)), TWO_PI)
        self.masses = np.atleast_1d(np.asarray(self.masses, dtype=float))
        if self.angles.shape != self.masses.shape:
            raise ValueError("atom arrays must have equal length")
        if np.any(self.masses <= 0) or not np.all(np.isfinite(self.masses)):
            raise ValueError("atom masses must be finite and positive")

    def __len__(self):
        return len(self.masses)

    def total(self) -> float:
        return math.fsum(self.masses)


@dataclass
class Measure:
    """Absolutely continuous step part plus finitely many atoms."""

    ac: StepWeight = field(default_factory=StepWeight)
    sing: AtomicMeasure = field(default_factory=AtomicMeasure)

    @classmethod
    def dirac(cls, angle: float = 0.0, mass: float = 1.0) -> "Measure":
        if mass == 0:
            return cls()
        return cls(sing=AtomicMeasure([angle], [mass]))

    @classmethod
    def zero(cls) -> "Measure":
        return cls()

    @property
    def total_mass(self) -> float:
        return math.fsum([self.ac.l1_norm(), self.sing.total()])

    def scaled(self, s: float) -> "Measure":
        if s == 0:
            return Measure()
        return Measure(self.ac.scaled(s), AtomicMeasure(self.sing.angles, s * self.sing.masses))

    def to_dict(self) -> dict:
        return {
            "steps": [{"center": float(c), "half_width": float(h), "value": float(v)}
                      for c, h, v in zip(self.ac.centers, self.ac.half_widths, self.ac.values)],
            "atoms": [{"angle": float(a), "mass": float(m)} for a, m in zip(self.sing.angles, self.sing.masses)],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Measure":
        steps = d.get("steps", [])
        atoms = d.get("atoms", [])
        return cls(StepWeight([s["center"] for s in steps], [s["half_width"] for s in steps],
                              [s["value"] for s in steps]),
                   AtomicMeasure([a["angle"] for a in atoms], [a["mass"] for a in atoms]))


# --- kernels ----------------------------------------------------------------

def _points(z):
    g, t = as_polar(z)
    scalar = np.ndim(g) == 0
    return np.atleast_1d(np.asarray(g, dtype=float)), np.atleast_1d(np.asarray(t, dtype=float)), scalar


def _chord_sq(g, t, angle):
    """|e^{i angle} - z|^2 for z = (1-g) e^{i t}."""
    s = np.sin((angle - t) / 2.0)
    return g * g + 4.0 * (1.0 - g) * s * s


def poisson_kernel(z, zeta_angle):
    """P(z, zeta) = (1-|z|^2)/|zeta - z|^2."""
    g, t, scalar = _points(z)
    ang = np.asarray(zeta_angle, dtype=float)
    if scalar:
        out = g[0] * (2.0 - g[0]) / _chord_sq(g[0], t[0], ang)
        return float(out) if np.ndim(out) == 0 else out
    return g[:, None] * (2.0 - g[:, None]) / _chord_sq(g[:, None], t[:, None], np.atleast_1d(ang)[None, :])


def arc_harmonic_measure(gap, theta, center, half_width):
    """Harmonic measure of the arcs at the points, matrix [point, arc]."""
    g = np.asarray(gap, dtype=float)[:, None]
    t = np.asarray(theta, dtype=float)[:, None]
    c = np.asarray(center, dtype=float)[None, :]
    h = np.asarray(half_width, dtype=float)[None, :]
    u = np.mod(c - t + math.pi, TWO_PI) - math.pi
    a2 = (u - h) / 2.0
    b2 = (u + h) / 2.0
    imag = g * (2.0 - g) * np.sin(h)
    real = g * g * np.cos(a2) * np.cos(b2) + (2.0 - g) ** 2 * np.sin(a2) * np.sin(b2)
    om = np.arctan2(imag, real) / math.pi
    return np.where(h >= math.pi, 1.0, np.clip(om, 0.0, 1.0))


def _rowsum(m, weights):
    if m.shape[1] == 0:
        return np.zeros(m.shape[0])
    prod = m * weights[None, :]
    return np.array([math.fsum(row) for row in prod])


def poisson_extend(mu: Measure, z, verify: bool = False, rtol: float = 1e-8):
    """P[mu](z) for a single point or an array/sequence of points."""
    g, t, scalar = _points(z)
    out = _poisson_arrays(mu, g, t)
    if verify:
        for i in range(len(g)):
            ref = poisson_extend_quadrature(mu, Polar(g[i], t[i]))
            if abs(ref - out[i]) > rtol * max(abs(ref), 1e-300):
                warnings.warn(f"Poisson extension disagrees with quadrature at point {i}: "
                              f"closed form {out[i]!r}, quadrature {ref!r}", NumericAccuracyWarning)
    return float(out[0]) if scalar else out


def _quad_arc(f, a, b, g, t):
    """Adaptive quadrature of f over [a, b] with breakpoints near the singular direction."""
    pts = []
    for k in (-1, 0, 1):
        base = t + k * TWO_PI
        for off in (0.0, -g, g, -10 * g, 10 * g):
            x = base + off
            if a < x < b:
                pts.append(x)
    pts = sorted(set(pts))
    edges = [a] + pts + [b]
    total = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-12, limit=400)
        total.append(val)
    return math.fsum(total)


def poisson_extend_quadrature(mu: Measure, z) -> float:
    """Independent evaluation of P[mu](z): adaptive quadrature on each arc, exact atoms."""
    g, t = as_polar(z)
    g, t = float(g), float(t)

    def kern(s):
        return g * (2.0 - g) / _chord_sq(g, t, s) / TWO_PI

    parts = []
    for c, h, v in zip(mu.ac.centers, mu.ac.half_widths, mu.ac.values):
        parts.append(v * _quad_arc(kern, c - h, c + h, g, t))
    for a, m in zip(mu.sing.angles, mu.sing.masses):
        parts.append(m * g * (2.0 - g) / _chord_sq(g, t, a))
    return math.fsum(parts)


def poisson_normalization_quadrature(z) -> float:
    """Quadrature of P(z, .) against normalized arc length (should be 1)."""
    return poisson_extend_quadrature(Measure(StepWeight.constant(1.0)), z)


# --- Herglotz ---------------------------------------------------------------

def herglotz(mu: Measure, z):
    """h(z) = integral of (zeta+z)/(zeta-z) dmu(zeta); Re h = P[mu]."""
    g, t, scalar = _points(z)
    re = _poisson_arrays(mu, g, t)
    ac = mu.ac
    if len(ac):
        gg, tt = g[:, None], t[:, None]
        a = (ac.centers - ac.half_widths)[None, :]
        b = (ac.centers + ac.half_widths)[None, :]
        dlog = 0.5 * (np.log(_chord_sq(gg, tt, b)) - np.log(_chord_sq(gg, tt, a)))
        dlog = np.where(ac.half_widths[None, :] >= math.pi, 0.0, dlog)
        im = -_rowsum(dlog, ac.values) / math.pi
    else:
        im = np.zeros(len(g))
    if len(mu.sing):
        gg, tt = g[:, None], t[:, None]
        ang = mu.sing.angles[None, :]
        im = im + _rowsum(2.0 * (1.0 - gg) * np.sin(tt - ang) / _chord_sq(gg, tt, ang), mu.sing.masses)
    out = re + 1j * im
    return complex(out[0]) if scalar else out


def _poisson_arrays(mu, g, t):
    ac = mu.ac
    out = _rowsum(arc_harmonic_measure(g, t, ac.centers, ac.half_widths), ac.values)
    if len(mu.sing):
        pk = g[:, None] * (2.0 - g[:, None]) / _chord_sq(g[:, None], t[:, None], mu.sing.angles[None, :])
        out = out + _rowsum(pk, mu.sing.masses)
    return out


def big_H(mu: Measure, z):
    """H = (2 + h)^2."""
    return (2.0 + herglotz(mu, z)) ** 2


def garnett_phi(t):
    """Decreasing integrable weight (1 + t)^-2 used with Garnett's theorem."""
    return 1.0 / (1.0 + np.asarray(t, dtype=float)) ** 2


def gamma_lambda(seq, mu: Measure, tol: float = 1e-9):
    """gamma_lam = 1 / (H(lam) phi(log(e/delta_lam))) for every point.

    Raises HypothesisViolated unless P[mu] majorizes log(1/delta_lam).
    """
    a = -log_delta(seq)
    p = poisson_extend(mu, seq)
    bad = np.flatnonzero(p < a - tol)
    if len(bad):
        i = int(bad[0])
        raise HypothesisViolated(f"P[mu] = {p[i]!r} < log(1/delta) = {a[i]!r} at point {i}")
    H = big_H(mu, seq)
    return (2.0 + a) ** 2 / H


# --- maximal function -------------------------------------------------------

@dataclass
class MaximalProfile:
    grid: np.ndarray
    values: np.ndarray
    aperture: float

    def rows(self):
        return list(zip(self.grid.tolist(), self.values.tolist()))


def uniform_grid(grid_size: int) -> np.ndarray:
    return TWO_PI * np.arange(grid_size) / grid_size


def maximal_function(seq, grid_size: int = 4096, alpha: float = 2.0) -> MaximalProfile:
    """M(zeta) = sup of log(1/delta_lam) over lam in the Stolz angle at zeta (0 if none)."""
    if not alpha > 1:
        raise ValueError("aperture must exceed 1")
    if grid_size < 1:
        raise ValueError("grid_size must be positive")
    grid = uniform_grid(grid_size)
    a = -log_delta(seq) if len(seq) else np.empty(0)
    vals = np.zeros(grid_size)
    if len(seq):
        mask = stolz_mask(grid, seq.gap, seq.theta, alpha)
        vals = np.max(np.where(mask, a[None, :], 0.0), axis=1)
    return MaximalProfile(grid, np.maximum(vals, 0.0), alpha)


def maximal_envelope(seq, grid_size: int = 4096, alpha: float = 2.0) -> StepWeight:
    """Grid step function whose value on each cell is the sup of M over the cell.

    A point contributes to every cell meeting the arc of boundary angles whose
    Stolz angle contains it, so the result dominates M everywhere.
    """
    a = np.maximum(-log_delta(seq), 0.0) if len(seq) else np.empty(0)
    cells = np.zeros(grid_size)
    width = TWO_PI / grid_size
    beta = stolz_shadow_half_width(seq.gap, alpha) if len(seq) else np.empty(0)
    for ai, th, b in zip(a, seq.theta, beta):
        if b >= math.pi:
            cells = np.maximum(cells, ai)
            continue
        # cell j covers [ (j - 1/2) width, (j + 1/2) width ]
        lo = int(math.floor((th - b) / width + 0.5))
        hi = int(math.floor((th + b) / width + 0.5))
        idx = np.arange(lo, hi + 1) % grid_size
        cells[idx] = np.maximum(cells[idx], ai)
    return StepWeight.on_grid(cells)


def default_t_samples(values, count: int = 64, top: float = 2.0) -> np.ndarray:
    """Geometric ladder from the smallest positive value to ``top`` times the largest."""
    pos = values[values > 0]
    if len(pos) == 0:
        return np.empty(0)
    lo, hi = float(pos.min()), top * float(pos.max())
    if lo >= hi:
        return np.array([hi])
    return np.geomspace(lo, hi, count)


def weak_l1_stats(profile: MaximalProfile, t_samples=None) -> dict:
    """Distribution statistics t * sigma{M > t} on the grid."""
    v = np.asarray(profile.values)
    ts = default_t_samples(v) if t_samples is None else np.asarray(t_samples, dtype=float)
    tail = [(float(t), float(t * np.count_nonzero(v > t) / len(v))) for t in ts]
    sup = max((x for _, x in tail), default=0.0)
    return {"sup_t_sigma": sup, "tail": [[t, x] for t, x in tail],
            "largest_t_value": tail[-1][1] if tail else 0.0}


# --- Harnack ----------------------------------------------------------------

@dataclass
class HarnackResult:
    ok: bool
    side: str | None
    lower: float
    value: float
    upper: float

    def __bool__(self):
        return self.ok


def harnack_check(mu: Measure, z, rtol: float = 1e-12) -> HarnackResult:
    """((1-r)/(1+r)) P[mu](0) <= P[mu](z) <= ((1+r)/(1-r)) P[mu](0)."""
    g, _ = as_polar(z)
    g = float(g)
    p0 = mu.total_mass
    val = float(poisson_extend(mu, z))
    lower = g / (2.0 - g) * p0
    upper = (2.0 - g) / g * p0
    slack = rtol * max(abs(p0), abs(val))
    if val < lower - slack:
        return HarnackResult(False, "lower", lower, val, upper)
    if val > upper + slack:
        return HarnackResult(False, "upper", lower, val, upper)
    return HarnackResult(True, None, lower, val, upper)
