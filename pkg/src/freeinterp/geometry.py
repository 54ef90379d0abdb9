"""Disk and circle geometry.

Points of the disk are kept in polar form ``(gap, theta)`` with
``gap = 1 - |z|`` stored exactly.  All pseudo-hyperbolic quantities are
evaluated from these coordinates with cancellation-free formulas:

    |z - w|^2      = (g_z - g_w)^2 + 4 r_z r_w sin^2((t_z - t_w)/2)
    |1 - conj(z)w|^2 = (g_z + g_w - g_z g_w)^2 + 4 r_z r_w sin^2((t_z - t_w)/2)

so that points within a few ulps of each other near the circle still have a
well resolved distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidPoint, NonFinite

TWO_PI = 2.0 * math.pi


def wrap_angle(t):
    """Reduce angles to [0, 2pi)."""
    t = np.mod(t, TWO_PI)
    # np.mod can return exactly 2pi for tiny negative input
    return np.where(t >= TWO_PI, 0.0, t) if isinstance(t, np.ndarray) else (0.0 if t >= TWO_PI else float(t))


def angular_distance(s, t):
    """Distance on the circle between two angles, in [0, pi]."""
    d = np.abs(np.mod(np.asarray(s) - np.asarray(t) + math.pi, TWO_PI) - math.pi)
    return d


@dataclass(frozen=True)
class DiskPoint:
    """A point of the open unit disk, stored as ``gap = 1 - |z|`` and angle."""

    gap: float
    theta: float = 0.0

    def __post_init__(self):
        g = float(self.gap)
        if not (math.isfinite(g) and 0.0 < g <= 1.0):
            raise InvalidPoint(f"point with 1-|z| = {g!r} is not in the open unit disk")
        object.__setattr__(self, "gap", g)
        object.__setattr__(self, "theta", 0.0 if g == 1.0 else wrap_angle(float(self.theta)))

    @classmethod
    def from_complex(cls, z, guard: float = 0.0) -> "DiskPoint":
        z = complex(z)
        r = abs(z)
        p = cls(1.0 - r, math.atan2(z.imag, z.real) if r > 0 else 0.0)
        check_guard(p.gap, guard)
        return p

    @classmethod
    def polar(cls, r: float, theta: float = 0.0) -> "DiskPoint":
        return cls(1.0 - float(r), theta)

    @property
    def r(self) -> float:
        return 1.0 - self.gap

    @property
    def z(self) -> complex:
        return complex(self.r * math.cos(self.theta), self.r * math.sin(self.theta))

    @property
    def re(self) -> float:
        return self.z.real

    @property
    def im(self) -> float:
        return self.z.imag

    def __complex__(self):
        return self.z


class Polar(NamedTuple):
    """Bare polar coordinates (gap, theta); scalars or arrays."""

    gap: object
    theta: object


def check_guard(gap, guard: float = 0.0):
    g = np.asarray(gap, dtype=float)
    if np.any(~np.isfinite(g)) or np.any(g > 1.0) or np.any(g <= guard):
        raise InvalidPoint(f"points must satisfy {guard} < 1-|z| <= 1")


def as_polar(p):
    """Return ``(gap, theta)`` for a DiskPoint, a complex number, or an array of them."""
    if isinstance(p, DiskPoint):
        return p.gap, p.theta
    if hasattr(p, "gap") and hasattr(p, "theta"):
        return np.asarray(p.gap, dtype=float), np.asarray(p.theta, dtype=float)
    z = np.asarray(p, dtype=complex)
    gap = 1.0 - np.abs(z)
    if np.any(gap <= 0):
        raise InvalidPoint("point outside the open unit disk")
    theta = np.where(gap < 1.0, np.mod(np.angle(z), TWO_PI), 0.0)
    if z.ndim == 0:
        return float(gap), float(theta)
    return gap, theta


def as_complex(p):
    if isinstance(p, DiskPoint):
        return p.z
    if hasattr(p, "gap") and hasattr(p, "theta"):
        return (1.0 - np.asarray(p.gap)) * np.exp(1j * np.asarray(p.theta))
    return np.asarray(p, dtype=complex) if np.ndim(p) else complex(p)


# --- Moebius factors and the pseudo-hyperbolic metric -----------------------

def mobius(lam, z):
    """Blaschke factor b_lam(z) = (|lam|/lam) (lam - z)/(1 - conj(lam) z).

    For lam = 0 the unimodular prefactor is undefined; b_0(z) := z.
    """
    lam = as_complex(lam)
    z = as_complex(z)
    lam_a = np.asarray(lam)
    unit = np.exp(-1j * np.angle(lam_a))
    with np.errstate(invalid="ignore", divide="ignore"):
        val = unit * (lam_a - z) / (1.0 - np.conj(lam_a) * z)
    val = np.where(lam_a == 0, z, val)
    return complex(val) if np.ndim(val) == 0 else val


def _parts(g1, t1, g2, t2):
    """Numerator, denominator and complement of |b_z(w)|^2 in polar form."""
    s = np.sin((np.asarray(t1) - np.asarray(t2)) / 2.0)
    cross = 4.0 * (1.0 - g1) * (1.0 - g2) * s * s
    num = (g1 - g2) ** 2 + cross
    omrr = g1 + g2 - g1 * g2
    den = omrr * omrr + cross
    comp = g1 * (2.0 - g1) * g2 * (2.0 - g2)
    return num, den, comp


def pseudo_hyperbolic_polar(g1, t1, g2, t2):
    num, den, _ = _parts(g1, t1, g2, t2)
    return np.sqrt(num / den)


def one_minus_rho_sq_polar(g1, t1, g2, t2):
    """1 - |b_z(w)|^2 = (1-|z|^2)(1-|w|^2)/|1-conj(z)w|^2."""
    _, den, comp = _parts(g1, t1, g2, t2)
    return comp / den


def log_pseudo_hyperbolic_polar(g1, t1, g2, t2):
    """log |b_z(w)|, accurate both for close pairs and for pairs far apart."""
    num, den, comp = _parts(g1, t1, g2, t2)
    ratio = num / den
    with np.errstate(divide="ignore", invalid="ignore"):
        near = 0.5 * np.log(ratio)
        far = 0.5 * np.log1p(-comp / den)
    return np.where(ratio < 0.5, near, far)


def pseudo_hyperbolic(z, w) -> float:
    """|b_z(w)|; symmetric, in [0, 1), zero iff z == w."""
    g1, t1 = as_polar(z)
    g2, t2 = as_polar(w)
    out = pseudo_hyperbolic_polar(g1, t1, g2, t2)
    return float(out) if np.ndim(out) == 0 else out


def log_delta_matrix(gap, theta):
    """Matrix of log|b_{lam_i}(lam_j)| with zeros on the diagonal."""
    g = np.asarray(gap, dtype=float)
    t = np.asarray(theta, dtype=float)
    m = log_pseudo_hyperbolic_polar(g[:, None], t[:, None], g[None, :], t[None, :])
    np.fill_diagonal(m, 0.0)
    if not np.all(np.isfinite(m)):
        i, j = np.argwhere(~np.isfinite(m))[0]
        raise NonFinite(f"Blaschke factor vanishes: points {i} and {j} coincide")
    return m


def log_delta(seq):
    """log(delta_lam) = log|B_lam(lam)| for every point of the sequence."""
    m = log_delta_matrix(seq.gap, seq.theta)
    return np.array([math.fsum(row) for row in m])


def log_blaschke_at(seq, idx: int) -> float:
    """log|B_lam(lam)| at ``seq[idx]``, summed in the log domain.

    Returns 0 for a singleton (empty product).
    """
    g = np.asarray(seq.gap, dtype=float)
    t = np.asarray(seq.theta, dtype=float)
    mask = np.arange(len(g)) != idx
    if not mask.any():
        return 0.0
    terms = log_pseudo_hyperbolic_polar(g[idx], t[idx], g[mask], t[mask])
    if not np.all(np.isfinite(terms)):
        raise NonFinite(f"Blaschke factor vanishes at point {idx} (duplicate point)")
    return math.fsum(terms)


# --- Boundary arcs ----------------------------------------------------------

@dataclass(frozen=True)
class CircleArc:
    """Closed arc of the unit circle given by its center angle and half-width.

    The half-width is capped at pi, so the normalized measure never exceeds 1.
    """

    center: float
    half_width: float

    def __post_init__(self):
        hw = float(self.half_width)
        if not hw > 0:
            raise ValueError("arc half-width must be positive")
        object.__setattr__(self, "half_width", min(hw, math.pi))
        object.__setattr__(self, "center", wrap_angle(float(self.center)))

    @property
    def sigma(self) -> float:
        return self.half_width / math.pi

    @property
    def is_full(self) -> bool:
        return self.half_width >= math.pi

    def contains(self, angle):
        return angular_distance(angle, self.center) <= self.half_width

    def intervals(self):
        """The arc as one or two sub-intervals of [0, 2pi)."""
        if self.is_full:
            return [(0.0, TWO_PI)]
        a = self.center - self.half_width
        b = self.center + self.half_width
        if a < 0:
            return [(0.0, b), (a + TWO_PI, TWO_PI)]
        if b > TWO_PI:
            return [(a, TWO_PI), (0.0, b - TWO_PI)]
        return [(a, b)]


def shadow_arc(lam) -> CircleArc:
    """Arc of half-width pi(1-|lam|) centered at arg lam."""
    g, t = as_polar(lam)
    return CircleArc(t, math.pi * g)


def tangent_arc(lam) -> CircleArc:
    """Arc of half-width pi*sqrt(1-|lam|) centered at arg lam."""
    g, t = as_polar(lam)
    return CircleArc(t, math.pi * math.sqrt(g))


def arcs_disjoint(centers, half_widths) -> bool:
    """Exact pairwise disjointness test for closed arcs."""
    c = np.asarray(centers, dtype=float)
    h = np.asarray(half_widths, dtype=float)
    if len(c) < 2:
        return True
    if np.any(h >= math.pi):
        return False
    d = angular_distance(c[:, None], c[None, :])
    reach = h[:, None] + h[None, :]
    off = ~np.eye(len(c), dtype=bool)
    return bool(np.all(d[off] > reach[off]))


def arc_overlap(c1, h1, c2, h2):
    """Normalized measure of the intersection of arcs (c1, h1) and (c2, h2); broadcasts."""
    c1, h1, c2, h2 = (np.asarray(x, dtype=float) for x in (c1, h1, c2, h2))
    h1 = np.minimum(h1, math.pi)
    h2 = np.minimum(h2, math.pi)
    d = np.mod(c2 - c1 + math.pi, TWO_PI) - math.pi
    total = 0.0
    for k in (-1, 0, 1):
        c = d + k * TWO_PI
        lo = np.maximum(-h1, c - h2)
        hi = np.minimum(h1, c + h2)
        total = total + np.maximum(hi - lo, 0.0)
    # a full arc counted against itself on both shifted copies
    total = np.minimum(total, 2.0 * np.minimum(h1, h2))
    return total / TWO_PI


# --- Stolz angles -----------------------------------------------------------

@dataclass(frozen=True)
class StolzAngle:
    vertex_angle: float
    aperture: float = 2.0

    def __post_init__(self):
        if not self.aperture > 1:
            raise ValueError("Stolz aperture must exceed 1")


def stolz_mask(grid_angles, gap, theta, alpha: float):
    """Boolean matrix [grid, point]: point lies in Gamma_alpha(e^{i grid})."""
    grid = np.asarray(grid_angles, dtype=float)[:, None]
    g = np.asarray(gap, dtype=float)[None, :]
    t = np.asarray(theta, dtype=float)[None, :]
    s = np.sin((t - grid) / 2.0)
    dist_sq = g * g + 4.0 * (1.0 - g) * s * s
    rhs = alpha * g * (2.0 - g)
    return dist_sq <= rhs * rhs


def stolz_contains(gamma: StolzAngle, z) -> bool:
    """Exact test |z - zeta| <= alpha (1 - |z|^2)."""
    g, t = as_polar(z)
    return bool(stolz_mask([gamma.vertex_angle], [g], [t], gamma.aperture)[0, 0])


def stolz_shadow_half_width(gap, alpha: float):
    """Half-width of the set of boundary angles whose Stolz angle contains the point.

    A point at angle theta lies in Gamma_alpha(e^{i psi}) iff
    |psi - theta| <= the returned value.
    """
    g = np.asarray(gap, dtype=float)
    r = 1.0 - g
    rhs = alpha * g * (2.0 - g)
    with np.errstate(divide="ignore", invalid="ignore"):
        s2 = (rhs * rhs - g * g) / (4.0 * r)
    s = np.sqrt(np.clip(s2, 0.0, 1.0))
    out = np.where((r <= 0) | (s2 >= 1.0), math.pi, 2.0 * np.arcsin(s))
    return out


# --- Dyadic squares ---------------------------------------------------------

@dataclass(frozen=True)
class DyadicSquare:
    n: int
    k: int

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.k < 2 ** self.n:
            raise ValueError(f"invalid dyadic square ({self.n}, {self.k})")

    def contains(self, z) -> bool:
        return square_of_point(z) == self


def _generation(gap: float) -> int:
    # 2^-(n+1) < gap <= 2^-n
    m, e = math.frexp(gap)
    return 1 - e if m == 0.5 else -e


def square_of_point(z) -> DyadicSquare:
    g, t = as_polar(z)
    n = _generation(float(g))
    k = min(int(math.floor(float(t) * 2 ** n / TWO_PI)), 2 ** n - 1)
    return DyadicSquare(n, k)


def family_index(q: DyadicSquare) -> int:
    """1: (even n, even k), 2: (even, odd), 3: (odd, even), 4: (odd, odd)."""
    return 1 + 2 * (q.n % 2) + (q.k % 2)
