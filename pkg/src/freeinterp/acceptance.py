"""Acceptance suite: ten desk-scale checks, each with its own tolerance and time budget."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .certificates import (
    certify_maximal,
    certify_propsep,
    certify_staircase_radial,
    noouter_bound,
    verify_majorant,
)
from .geometry import log_blaschke_at, log_delta, mobius
from .orlicz import build_orlicz_example
from .potential import (
    AtomicMeasure,
    Measure,
    StepWeight,
    big_H,
    default_t_samples,
    gamma_lambda,
    harnack_check,
    maximal_function,
    poisson_normalization_quadrature,
    weak_l1_stats,
)
from .sequences import (
    Sequence,
    cn_terms,
    gen_disjoint_tangent,
    gen_radial,
    gen_random_separated,
    gen_stolz,
    separation_constant,
)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    runtime: float
    limit: float | None = None
    details: dict = field(default_factory=dict)

    @property
    def within_time(self) -> bool:
        return self.limit is None or self.runtime < self.limit

    @property
    def ok(self) -> bool:
        return self.passed and self.within_time

    def line(self) -> str:
        budget = f" (limit {self.limit:g} s)" if self.limit else ""
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.number:2d} {self.name}: {self.runtime:.2f} s{budget}"

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.ok, "checks_passed": self.passed,
                "runtime": self.runtime, "limit": self.limit, "details": self.details}


def _timed(number, name, limit, fn, *args):
    t0 = time.perf_counter()
    passed, details = fn(*args)
    return CriterionResult(number, name, bool(passed), time.perf_counter() - t0, limit, details)


def _random_disk(rng, n, rmax):
    r = rmax * np.sqrt(rng.uniform(0.0, 1.0, n))
    return r * np.exp(1j * rng.uniform(0.0, 2 * math.pi, n))


# --- individual criteria ----------------------------------------------------

def _metric_identity(pairs, seed):
    rng = np.random.default_rng(seed)
    lam = _random_disk(rng, pairs, 0.999)
    mu = _random_disk(rng, pairs, 0.999)
    b = mobius(lam, mu)
    lhs = 1.0 - np.abs(b) ** 2
    rhs = (1 - np.abs(lam) ** 2) * (1 - np.abs(mu) ** 2) / np.abs(1 - np.conj(lam) * mu) ** 2
    err = float(np.max(np.abs(lhs - rhs)))
    return err <= 1e-12, {"pairs": pairs, "max_abs_error": err}


def _oracle_equivalence(count, nmax, seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(2, nmax + 1))
        z = _random_disk(rng, n, 0.99)
        seq = Sequence.from_points(z)
        zz = seq.z
        for i in range(n):
            direct = float(np.prod(np.abs(mobius(np.delete(zz, i), zz[i]))))
            worst = max(worst, abs(math.exp(log_blaschke_at(seq, i)) - direct))
    return worst <= 1e-10, {"sequences": count, "max_abs_error": worst}


def _random_measure(rng):
    k = int(rng.integers(0, 4))
    steps = StepWeight(rng.uniform(0, 2 * math.pi, k), rng.uniform(0.01, math.pi, k), rng.uniform(0.0, 3.0, k))
    m = int(rng.integers(0, 3))
    atoms = AtomicMeasure(rng.uniform(0, 2 * math.pi, m), rng.uniform(0.1, 2.0, m))
    if k == 0 and m == 0:
        steps = StepWeight.constant(1.0)
    return Measure(steps, atoms)


def _poisson_harnack(count, seed):
    rng = np.random.default_rng(seed)
    worst_norm = 0.0
    harnack_fail = 0
    for z in _random_disk(rng, count, 0.999):
        worst_norm = max(worst_norm, abs(poisson_normalization_quadrature(complex(z)) - 1.0))
        if not harnack_check(_random_measure(rng), complex(z)):
            harnack_fail += 1
    return worst_norm <= 1e-8 and harnack_fail == 0, {
        "samples": count, "max_normalization_error": worst_norm, "harnack_failures": harnack_fail}


def _propsep_threshold(seq):
    return min(0.5, separation_constant(seq))


def _separated_certificates(n_radial, n_random, seed):
    seqs = [gen_radial(0.5, n_radial), gen_random_separated(n_random, delta=0.5, seed=seed)]
    out = []
    for s in seqs:
        out.append((s, certify_propsep(s, threshold=_propsep_threshold(s))))
    return out


def _propsep(n_radial, n_random, seed):
    details, ok = {}, True
    for s, cert in _separated_certificates(n_radial, n_random, seed):
        check = verify_majorant(s, cert.measure)
        c = cert.constants["c_star"]
        good = cert.verdict and math.isfinite(c) and check.verdict
        ok &= good
        details[s.label] = {"c_star": c, "threshold": cert.constants["threshold"],
                            "separation": cert.constants["separation_constant"],
                            "min_margin": cert.min_margin, "verdict": good}
        if s.label.startswith("random"):
            ok &= cert.constants["separation_constant"] >= 0.5
    return ok, details


def _chain_sequences(n):
    return [gen_radial(0.5, n), gen_stolz(0.5, n), gen_disjoint_tangent(n)]


def _maximal_chain(n, grid):
    details, ok = {}, True
    for s in _chain_sequences(n):
        cert = certify_maximal(s, grid_size=grid, alpha=2.0)
        m1 = min(cert.diagnostics["stage1_margins"])
        m2 = min(cert.diagnostics["stage2_margins"])
        good = min(m1, m2, cert.min_margin) >= -1e-9
        ok &= good
        details[s.label] = {"stage1_min": m1, "stage2_min": m2, "full_min": cert.min_margin}
    return ok, details


def _staircase_sequences(n):
    return [gen_radial(q, n) for q in (0.3, 0.5, 0.7)]


def _staircase(n):
    details, ok = {}, True
    for s in _staircase_sequences(n):
        # t is reported, not gated: for q = 0.7 the first step rises and the majorant absorbs it
        t = cn_terms(s)
        decreasing = bool(np.all(np.diff(t) < 0))
        cert = certify_staircase_radial(s)
        tele = cert.constants["telescoping_max_error"]
        good = cert.verdict and tele <= 1e-12
        ok &= good
        details[s.label] = {"t_decreasing": decreasing, "verdict": cert.verdict, "scale": cert.constants["scale"],
                            "telescoping_error": tele}
    return ok, details


def _noouter(n):
    seq = gen_disjoint_tangent(n)
    k = np.arange(1, n + 1, dtype=float)
    details, ok = {}, True
    for c in (1.0, 10.0, 100.0):
        rep = noouter_bound(seq, 1.0 / k, c)
        ok &= rep.crossing_index is not None
        details[f"harmonic c={c:g}"] = {"crossing_index": rep.crossing_index, "rhs_bound": rep.rhs_bound,
                                        "final_partial_sum": rep.partial_sums[-1]}
    rep = noouter_bound(seq, 1.0 / k ** 2, 10.0)
    ok &= rep.crossing_index is None
    details["square c=10"] = {"crossing_index": rep.crossing_index, "rhs_bound": rep.rhs_bound,
                              "final_partial_sum": rep.partial_sums[-1]}
    return ok, details


def _orlicz(n):
    ex = build_orlicz_example(p=2.0, N=n)
    r = ex.report
    integral_err = abs(r["phi_integral"] - r["closed_form_integral"])
    expected = math.exp(-n)
    dist_err = abs(r["min_pair_distance"] - expected) / expected
    monotone = bool(np.all(np.diff(r["pair_distances"]) < 0))
    ok = (integral_err <= 1e-10 and math.isfinite(r["phi_integral"]) and dist_err <= 1e-6 and monotone
          and ex.certificate.verdict and r["scale_bounded"])
    return ok, {"phi_integral": r["phi_integral"], "integral_error": integral_err,
                "min_pair_distance": r["min_pair_distance"], "relative_distance_error": dist_err,
                "distances_decreasing": monotone, "verdict": ex.certificate.verdict, "scale": r["scale"],
                "scale_bounded": r["scale_bounded"]}


def _garnett(n_radial, n_random, n_chain, n_stair, grid, seed):
    certs = [c for c in _separated_certificates(n_radial, n_random, seed)]
    certs += [(s, certify_maximal(s, grid_size=grid)) for s in _chain_sequences(n_chain)]
    certs += [(s, certify_staircase_radial(s)) for s in _staircase_sequences(n_stair)]
    details, ok, used = {}, True, 0
    for s, cert in certs:
        if not cert.verdict:
            continue
        used += 1
        gam = np.abs(gamma_lambda(s, cert.measure))
        H = np.abs(big_H(cert.measure, s))
        need = (2.0 - log_delta(s)) ** 2
        gmax = float(gam.max())
        hgood = bool(np.all(H >= need * (1 - 1e-12)))
        ok &= gmax <= 1 + 1e-9 and hgood
        details[f"{cert.construction}:{s.label}"] = {"max_gamma": gmax, "H_bound_holds": hgood}
    return ok and used > 0, details


def _weak_l1(n, grid):
    seq = gen_radial(0.5, n)
    prof = maximal_function(seq, grid, 2.0)
    # ladder ending just below max M, so the top sample still sees a nonempty level set
    ts = default_t_samples(prof.values, top=1.0 - 1e-9)
    st = weak_l1_stats(prof, ts)
    st2 = weak_l1_stats(maximal_function(seq, 2 * grid, 2.0), ts)
    tail = st["tail"]
    median = tail[len(tail) // 2][1]
    last = tail[-1][1]
    change = abs(st2["sup_t_sigma"] - st["sup_t_sigma"]) / st["sup_t_sigma"]
    return last < median and change < 0.05, {
        "median_t_value": median, "largest_t_value": last, "sup_t_sigma": st["sup_t_sigma"],
        "sup_t_sigma_doubled_grid": st2["sup_t_sigma"], "relative_change": change}


# --- driver -----------------------------------------------------------------

def run_all(quick: bool = False, seed: int = 0) -> list:
    h = 2 if quick else 1
    grid = 4096 // h
    results = [
        _timed(1, "metric identity", 1.0, _metric_identity, 10_000 // h, seed),
        _timed(2, "oracle equivalence", 5.0, _oracle_equivalence, 100 // h, 100 // h, seed),
        _timed(3, "Poisson normalization and Harnack", 10.0, _poisson_harnack, 1000 // h, seed),
        _timed(4, "separated sequences certified", 10.0, _propsep, 20 // h, 30 // h, seed),
        _timed(5, "maximal-function chain", 30.0, _maximal_chain, 30 // h, grid),
        _timed(6, "radial staircase", None, _staircase, 15 // h),
        _timed(7, "tangential refutation bound", None, _noouter, 200 // h),
        _timed(8, "Orlicz example", None, _orlicz, 15 // h),
        _timed(9, "Garnett transport", None, _garnett, 20 // h, 30 // h, 30 // h, 15 // h, grid, seed),
        _timed(10, "weak-L1 trend", None, _weak_l1, 20 // h, grid),
    ]
    return results


def summary_markdown(results) -> str:
    lines = ["# Acceptance summary", "", "| # | criterion | result | runtime (s) | limit (s) |",
             "|---|---|---|---|---|"]
    for r in results:
        lim = f"{r.limit:g}" if r.limit else ""
        lines.append(f"| {r.number} | {r.name} | {'pass' if r.ok else 'FAIL'} | {r.runtime:.2f} | {lim} |")
    passed = sum(r.ok for r in results)
    lines += ["", f"{passed}/{len(results)} criteria passed.", ""]
    return "\n".join(lines)
