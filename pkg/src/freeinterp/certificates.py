"""Harmonic-majorant certificates.

A certificate is a positive measure mu together with the margins
P[mu](lam) - log(1/delta_lam) over a finite sequence.  Each constructor below
builds mu from the geometry of the sequence and records the constants it had
to choose (the implicit constants of the estimates become explicit numbers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArcsOverlap, DegenerateWeight, GridTooCoarse, ModeMismatch, NotRadial
from .geometry import (
    TWO_PI,
    angular_distance,
    arc_overlap,
    arcs_disjoint,
    log_delta,
    one_minus_rho_sq_polar,
    pseudo_hyperbolic_polar,
)
from .potential import (
    Measure,
    StepWeight,
    _chord_sq,
    arc_harmonic_measure,
    garnett_phi,
    herglotz,
    maximal_envelope,
    maximal_function,
    poisson_extend,
)
from .sequences import Sequence

DEFAULT_TOL = 1e-9
MAXIMAL_SCALE = 1.0 + math.pi ** 2


@dataclass
class Certificate:
    construction: str
    measure: Measure
    margins: np.ndarray
    verdict: bool
    tolerance: float
    constants: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def min_margin(self) -> float:
        return float(self.margins.min()) if len(self.margins) else 0.0

    def to_dict(self) -> dict:
        return {
            "construction": self.construction,
            "constants": _plain(self.constants),
            "measure": self.measure.to_dict(),
            "margins": [float(x) for x in self.margins],
            "verdict": bool(self.verdict),
            "tolerance": float(self.tolerance),
            "diagnostics": _plain(self.diagnostics),
        }


def _plain(d):
    if isinstance(d, dict):
        return {k: _plain(v) for k, v in d.items()}
    if isinstance(d, (list, tuple, np.ndarray)):
        return [_plain(v) for v in d]
    if isinstance(d, (np.floating,)):
        return float(d)
    if isinstance(d, (np.integer,)):
        return int(d)
    if isinstance(d, np.bool_):
        return bool(d)
    return d


def _certificate(seq, measure, construction, tol, constants=None, diagnostics=None, extra_margins=()):
    a = -log_delta(seq)
    p = poisson_extend(measure, seq) if len(seq) else np.empty(0)
    margins = np.atleast_1d(p - a)
    verdict = bool(np.all(margins >= -tol)) and all(bool(np.all(m >= -tol)) for m in extra_margins)
    return Certificate(construction, measure, margins, verdict, tol, constants or {}, diagnostics or {})


def verify_majorant(seq: Sequence, mu: Measure, tol: float = DEFAULT_TOL) -> Certificate:
    """Check log(1/delta_lam) <= P[mu](lam) for every point."""
    if len(seq) == 0:
        raise ValueError("sequence is empty")
    return _certificate(seq, mu, "custom-measure", tol, {"total_mass": mu.total_mass})


def _shadow_weight(seq, values=None) -> StepWeight:
    vals = np.ones(len(seq)) if values is None else np.asarray(values, dtype=float)
    return StepWeight(seq.theta, math.pi * seq.gap, vals)


def _arc_integral(weight: StepWeight, seq) -> np.ndarray:
    """Integral of the weight over each shadow arc I_lam (normalized measure)."""
    if len(weight) == 0:
        return np.zeros(len(seq))
    ov = arc_overlap(seq.theta[:, None], math.pi * seq.gap[:, None],
                     weight.centers[None, :], weight.half_widths[None, :])
    return np.array([math.fsum(row) for row in ov * weight.values[None, :]])


# --- separated sequences ----------------------------------------------------

def near_factor_sums(seq: Sequence, threshold: float = 0.5) -> np.ndarray:
    """sum over mu != lam with |b_lam(mu)| >= threshold of log(1/|b_lam(mu)|)."""
    g, t = seq.gap, seq.theta
    rho = pseudo_hyperbolic_polar(g[:, None], t[:, None], g[None, :], t[None, :])
    logs = -np.log(np.where(rho > 0, rho, 1.0))
    np.fill_diagonal(logs, 0.0)
    keep = rho >= threshold
    np.fill_diagonal(keep, False)
    return np.array([math.fsum(row) for row in np.where(keep, logs, 0.0)])


def certify_propsep(seq: Sequence, threshold: float = 0.5, tol: float = DEFAULT_TOL) -> Certificate:
    """Weight c* sum chi_{I_lam} dominating the near factors of B_lam at lam.

    c* is the smallest constant with c* P[w](lam) >= near-factor sum for all
    lam.  When the sequence is separated with constant >= threshold the near
    factors are all factors, and the result certifies log(1/delta_lam) itself.
    """
    if len(seq) == 0:
        raise ValueError("sequence is empty")
    w = _shadow_weight(seq)
    pw = poisson_extend(Measure(w), seq)
    if np.all(pw <= 0):
        raise DegenerateWeight("shadow arcs carry no harmonic measure")
    near = near_factor_sums(seq, threshold)
    ratio = np.where(near > 0, near / pw, 0.0)
    c_star = float(ratio.max()) if len(ratio) else 0.0
    measure = Measure(w).scaled(c_star)
    near_margins = c_star * pw - near
    sep = float(np.min(pseudo_hyperbolic_polar(seq.gap[:, None], seq.theta[:, None], seq.gap[None, :],
                                               seq.theta[None, :]) + np.eye(len(seq)))) if len(seq) > 1 else 1.0
    constants = {"c_star": c_star, "threshold": threshold, "separation_constant": sep,
                 "separated": sep >= threshold}
    return _certificate(seq, measure, "propsep", tol, constants, {"near_margins": near_margins.tolist()})


def propsep_case_ratios(lams, mus) -> dict:
    """Worst constants in the two-case lower bound for arc integrals of the kernel.

    For each pair the ratio

        integral over I_mu of P(lam, .)  /  (1-|lam|^2)(1-|mu|^2)/|1 - conj(lam) mu|^2

    is computed; the minimum is reported separately for lam inside and outside
    D(mu*) = {|z - mu/|mu|| <= 2(1-|mu|)}.
    """
    lg, lt = np.asarray(lams.gap), np.asarray(lams.theta)
    mg, mt = np.asarray(mus.gap), np.asarray(mus.theta)
    hm = arc_harmonic_measure(lg, lt, mt, math.pi * mg)
    target = one_minus_rho_sq_polar(lg[:, None], lt[:, None], mg[None, :], mt[None, :])
    ratio = hm / target
    inside = np.sqrt(_chord_sq(lg[:, None], lt[:, None], mt[None, :])) <= 2.0 * mg[None, :]
    return {
        "inside": float(ratio[inside].min()) if inside.any() else math.inf,
        "outside": float(ratio[~inside].min()) if (~inside).any() else math.inf,
        "pairs_inside": int(inside.sum()),
        "pairs_outside": int((~inside).sum()),
    }


# --- maximal function chain -------------------------------------------------

def _chain(seq, weight_unscaled: StepWeight, construction, tol, constants, min_cells=0, grid_size=None):
    """P[(1+pi^2) v](lam) >= (1/(1-|lam|)) int_{I_lam} v >= log(1/delta_lam)."""
    if min_cells and grid_size:
        cell = TWO_PI / grid_size
        counts = np.floor(2.0 * math.pi * seq.gap / cell)
        if np.any(counts < min_cells):
            i = int(np.argmin(counts))
            raise GridTooCoarse(f"shadow arc of point {i} spans {int(counts[i])} grid cells < {min_cells}")
    w = weight_unscaled.scaled(MAXIMAL_SCALE)
    measure = Measure(w)
    first = poisson_extend(measure, seq)
    middle = _arc_integral(weight_unscaled, seq) / seq.gap
    last = -log_delta(seq)
    stage1 = first - middle
    stage2 = middle - last
    cert = _certificate(seq, measure, construction, tol, constants,
                        {"poisson": first.tolist(), "arc_average": middle.tolist(),
                         "stage1_margins": stage1.tolist(), "stage2_margins": stage2.tolist()},
                        extra_margins=(stage1, stage2))
    cert.constants.setdefault("l1_norm", measure.total_mass)
    return cert


def certify_maximal(seq: Sequence, grid_size: int = 4096, alpha: float = 2.0, min_cells: int = 0,
                    tol: float = DEFAULT_TOL) -> Certificate:
    """Certificate with weight (1+pi^2) M, M replaced by its cell-wise upper envelope."""
    if len(seq) == 0:
        raise ValueError("sequence is empty")
    env = maximal_envelope(seq, grid_size, alpha)
    constants = {"scale": MAXIMAL_SCALE, "grid_size": grid_size, "aperture": alpha,
                 "discretization": "cell upper envelope"}
    return _chain(seq, env, "maximal", tol, constants, min_cells, grid_size)


def certify_cs(seq: Sequence, grid_size: int = 4096, alpha: float = 2.0, tol: float = DEFAULT_TOL) -> Certificate:
    """Certificate from u = sum_lam log(1/delta_lam) chi_{I_lam}, with ||u||_1 the CS sum."""
    if len(seq) == 0:
        raise ValueError("sequence is empty")
    a = np.maximum(-log_delta(seq), 0.0)
    u = _shadow_weight(seq, a)
    l1 = math.fsum(seq.gap * -log_delta(seq))
    prof = maximal_function(seq, grid_size, alpha)
    violation = float(np.max(prof.values - u(prof.grid)))
    constants = {"l1_norm_u": l1, "scale": MAXIMAL_SCALE, "grid_size": grid_size, "aperture": alpha,
                 "max_domination_violation": violation}
    return _chain(seq, u, "cs", tol, constants)


# --- radial constructions ---------------------------------------------------

def _radial_order(seq: Sequence, angle_tol: float = 1e-12):
    inner = seq.gap < 1.0
    if inner.any():
        ref = seq.theta[inner][0]
        if np.any(angular_distance(seq.theta[inner], ref) > angle_tol):
            raise NotRadial("points do not share a common argument")
        ref = float(ref)
    else:
        ref = 0.0
    order = np.argsort(-seq.gap, kind="stable")
    if np.any(np.diff(seq.gap[order]) >= 0):
        raise NotRadial("moduli must be strictly increasing")
    return order, ref


def staircase_weights(gaps, eps_tilde, theta: float = 0.0):
    """Least nonincreasing majorant eps, increments beta and the weight sum beta_n/|J_n| chi_{J_n}.

    ``gaps`` must be strictly decreasing; J_n = I_n minus I_{n+1}, J_N = I_N.
    """
    g = np.asarray(gaps, dtype=float)
    et = np.asarray(eps_tilde, dtype=float)
    eps = np.maximum.accumulate(et[::-1])[::-1]
    beta = eps - np.append(eps[1:], 0.0)
    centers, hws, vals = [], [], []
    n = len(g)
    for k in range(n):
        if beta[k] <= 0:
            continue
        if k == n - 1:
            measure = min(g[k], 1.0)
            centers.append(theta)
            hws.append(math.pi * g[k])
            vals.append(beta[k] / measure)
            continue
        hi, lo = min(g[k], 1.0), g[k + 1]
        measure = hi - lo
        half = math.pi * measure / 2.0
        mid = math.pi * (hi + lo) / 2.0
        for c in (theta + mid, theta - mid):
            centers.append(c)
            hws.append(half)
            vals.append(beta[k] / measure)
    return eps, beta, StepWeight(centers, hws, vals)


def certify_staircase_radial(seq: Sequence, tol: float = DEFAULT_TOL) -> Certificate:
    """Staircase weight on the rings J_n, scaled minimally to dominate eps_n/(1-|lam_n|)."""
    if len(seq) == 0:
        raise ValueError("sequence is empty")
    order, theta = _radial_order(seq)
    g = seq.gap[order]
    a = -log_delta(seq)[order]
    eps_tilde = g * a
    eps, beta, w = staircase_weights(g, eps_tilde, theta)
    pw = poisson_extend(Measure(w), seq.subset(order)) if len(w) else np.zeros(len(g))
    target = eps / g
    pos = target > 0
    if np.any(pos & (pw <= 0)):
        raise DegenerateWeight("staircase weight has no mass near a point with positive target")
    scale = float(np.max(target[pos] / pw[pos])) if pos.any() else 0.0
    tele = max((abs(math.fsum(beta[k:]) - eps[k]) for k in range(len(eps))), default=0.0)
    constants = {"scale": scale, "telescoping_max_error": tele, "angle": theta}
    diagnostics = {"order": order.tolist(), "eps_tilde": eps_tilde.tolist(), "eps": eps.tolist(),
                   "beta": beta.tolist(),
                   "target_margins": (scale * pw - target).tolist()}
    return _certificate(seq, Measure(w).scaled(scale), "staircase", tol, constants, diagnostics)


def certify_dirac(seq: Sequence, angle: float | None = None, tol: float = DEFAULT_TOL) -> Certificate:
    """Point mass M at the common argument, M = max (1-|lam|) log(1/delta_lam).

    At a radial point P[delta](r) = (1+r)/(1-r) >= 1/(1-r), so this mass suffices.
    """
    if len(seq) == 0:
        raise ValueError("sequence is empty")
    _, common = _radial_order(seq)
    where = common if angle is None else float(angle)
    a = -log_delta(seq)
    mass = float(np.max(seq.gap * a))
    measure = Measure.dirac(where, mass) if mass > 0 else Measure()
    return _certificate(seq, measure, "dirac", tol, {"mass": mass, "angle": where})


# --- trace space and Garnett machinery --------------------------------------

@dataclass
class TraceCheck:
    values: np.ndarray
    margins: np.ndarray
    verdict: bool
    tolerance: float


def log_plus(values) -> np.ndarray:
    v = np.abs(np.asarray(values, dtype=complex))
    with np.errstate(divide="ignore"):
        return np.maximum(np.log(np.where(v > 0, v, 1.0)), 0.0)


def trace_membership(seq: Sequence, values, mu: Measure, mode: str = "N", tol: float = DEFAULT_TOL) -> TraceCheck:
    """P[mu](lam) >= log+|a_lam|; mode "N+" admits only absolutely continuous measures."""
    if mode not in ("N", "N+"):
        raise ValueError("mode must be 'N' or 'N+'")
    if mode == "N+" and len(mu.sing):
        raise ModeMismatch("Smirnov-class trace test requires a measure without atoms")
    vals = np.asarray(values, dtype=complex)
    if vals.shape != seq.gap.shape:
        raise ValueError("values must be aligned with the sequence")
    margins = np.atleast_1d(poisson_extend(mu, seq) - log_plus(vals))
    return TraceCheck(vals, margins, bool(np.all(margins >= -tol)), tol)


def garnett_bound_log(log_delta_values) -> np.ndarray:
    """log of delta * phi(log(e/delta)) with phi(t) = (1+t)^-2."""
    ld = np.asarray(log_delta_values, dtype=float)
    return ld - 2.0 * np.log(2.0 - ld)


def garnett_precondition(seq: Sequence, values) -> np.ndarray:
    """|a_lam| <= delta_lam (1 + log(e/delta_lam))^-2, evaluated in the log domain."""
    v = np.abs(np.asarray(values, dtype=complex))
    bound = garnett_bound_log(log_delta(seq))
    with np.errstate(divide="ignore"):
        lv = np.log(v)
    return lv <= bound


def garnett_split(seq: Sequence, mu: Measure, omega=None) -> dict:
    """Transported values a_lam = omega gamma (gS)(lam) phi(log(e/delta_lam)).

    gS = exp(-h) with h the Herglotz transform of mu.  When mu certifies the
    sequence, |omega gamma gS / delta| <= sup|omega|, so the values satisfy the
    decrease condition.
    """
    ld = log_delta(seq)
    om = np.ones(len(seq), dtype=complex) if omega is None else np.asarray(omega, dtype=complex)
    h = np.atleast_1d(herglotz(mu, seq))
    H = (2.0 + h) ** 2
    gamma = (2.0 - ld) ** 2 / H
    phi = garnett_phi(1.0 - ld)
    with np.errstate(divide="ignore"):
        log_om = np.log(np.abs(om))
    log_factor = log_om + np.log(np.abs(gamma)) - h.real - ld
    values = om * gamma * np.exp(-h) * phi
    log_values = log_om + np.log(np.abs(gamma)) - h.real + np.log(phi)
    passes = log_values <= garnett_bound_log(ld) + 1e-12
    return {"values": values, "gamma": gamma, "H": H, "log_factor": log_factor, "passes": passes}


# --- refutation bound for very tangential sequences -------------------------

@dataclass
class NoOuterReport:
    partial_sums: list
    rhs_bound: float
    crossing_index: int | None

    def to_dict(self):
        return {"partial_sums": list(self.partial_sums), "rhs_bound": self.rhs_bound,
                "crossing_index": self.crossing_index}


def _check_tangent_disjoint(seq):
    if not arcs_disjoint(seq.theta, math.pi * np.sqrt(seq.gap)):
        raise ArcsOverlap("tangent arcs K_lambda are not pairwise disjoint")


def _check_shadow_disjoint(seq):
    if not arcs_disjoint(seq.theta, math.pi * seq.gap):
        raise ArcsOverlap("shadow arcs I_lambda are not pairwise disjoint")


def _running_sums(x):
    out, s, comp = [], 0.0, 0.0
    for v in x:
        t = s + v
        comp += (s - t) + v if abs(s) >= abs(v) else (v - t) + s
        s = t
        out.append(s + comp)
    return out


def noouter_bound(seq: Sequence, eps, c_mu: float) -> NoOuterReport:
    """Compare partial sums of eps with c_mu (sum(1-|lam|) + 2).

    Any measure of mass c_mu with eps_lam/(1-|lam|) <= P[mu](lam) forces
    sum eps <= c_mu (sum (1-|lam|) + 2); the first index where the partial sum
    exceeds this bound witnesses that no such measure exists.
    """
    _check_tangent_disjoint(seq)
    eps = np.asarray(eps, dtype=float)
    if eps.shape != seq.gap.shape:
        raise ValueError("eps must be aligned with the sequence")
    partial = _running_sums(eps)
    rhs = c_mu * (seq.blaschke_sum + 2.0)
    crossing = next((i + 1 for i, s in enumerate(partial) if s > rhs), None)
    return NoOuterReport(partial, rhs, crossing)


def noouter_pointwise(seq: Sequence, mu: Measure):
    """Per point: (1-|lam|) P[mu](lam) and its bound c_mu (1-|lam|) + 2 mu(K_lam)."""
    _check_tangent_disjoint(seq)
    lhs = seq.gap * poisson_extend(mu, seq)
    kw = math.pi * np.sqrt(seq.gap)
    ac = mu.ac
    mass_k = np.zeros(len(seq))
    if len(ac):
        ov = arc_overlap(seq.theta[:, None], kw[:, None], ac.centers[None, :], ac.half_widths[None, :])
        mass_k += ov @ ac.values
    if len(mu.sing):
        inside = angular_distance(mu.sing.angles[None, :], seq.theta[:, None]) <= kw[:, None]
        mass_k += inside @ mu.sing.masses
    rhs = mu.total_mass * seq.gap + 2.0 * mass_k
    return lhs, rhs


__all__ = [
    "Certificate", "TraceCheck", "NoOuterReport",
    "verify_majorant", "certify_propsep", "propsep_case_ratios", "certify_maximal", "certify_cs",
    "certify_staircase_radial", "staircase_weights", "certify_dirac", "trace_membership",
    "garnett_precondition", "garnett_split", "noouter_bound", "noouter_pointwise", "near_factor_sums",
    "log_plus",
]
