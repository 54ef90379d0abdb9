import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freeinterp.certificates import (
    certify_cs,
    certify_dirac,
    certify_maximal,
    certify_propsep,
    certify_staircase_radial,
    garnett_precondition,
    garnett_split,
    near_factor_sums,
    noouter_bound,
    noouter_pointwise,
    propsep_case_ratios,
    staircase_weights,
    trace_membership,
    verify_majorant,
)
from freeinterp.errors import ArcsOverlap, GridTooCoarse, ModeMismatch, NotRadial
from freeinterp.geometry import log_delta
from freeinterp.potential import AtomicMeasure, Measure, StepWeight, gamma_lambda, poisson_extend, poisson_kernel
from freeinterp.sequences import (
    Sequence,
    classify,
    gen_disjoint_tangent,
    gen_radial,
    gen_random_separated,
    gen_stolz,
    separation_constant,
)

LOG2 = math.log(2)


def test_verify_singleton_zero_measure():
    cert = verify_majorant(Sequence.from_points([0.5]), Measure())
    assert cert.margins.tolist() == [0.0]
    assert cert.verdict


def test_verify_two_points_dirac():
    seq = Sequence.from_points([0, 0.5])
    cert = verify_majorant(seq, Measure.dirac(0.0, LOG2))
    assert cert.margins == pytest.approx([0.0, 2 * LOG2], abs=1e-15)
    assert cert.verdict


def test_verify_empty_sequence_rejected():
    with pytest.raises(ValueError):
        verify_majorant(Sequence(np.empty(0), np.empty(0)), Measure())


@given(st.floats(0.1, 10.0), st.floats(1.0, 10.0))
def test_margins_monotone_in_scale(s, factor):
    seq = gen_random_separated(8, 0.3, seed=11)
    mu = Measure(StepWeight([0.5, 3.0], [0.4, 1.0], [1.0, 2.0]), AtomicMeasure([1.0], [0.3]))
    lo = verify_majorant(seq, mu.scaled(s)).margins
    hi = verify_majorant(seq, mu.scaled(s * factor)).margins
    assert np.all(hi >= lo - 1e-12)


def test_propsep_singleton():
    cert = certify_propsep(Sequence.from_points([0.2j]))
    assert cert.constants["c_star"] == 0
    assert cert.verdict


def test_propsep_radial_constant():
    seq = gen_radial(0.5, 20)
    sep = separation_constant(seq)
    cert = certify_propsep(seq, threshold=sep)
    # mpmath quadrature oracle
    assert cert.constants["c_star"] == pytest.approx(0.9088663957785392, rel=1e-12)
    assert cert.verdict
    assert verify_majorant(seq, cert.measure).verdict


def test_propsep_default_threshold_on_radial_covers_far_factors_only():
    # radial q = 1/2 has separation 1/3 < 1/2
    seq = gen_radial(0.5, 20)
    cert = certify_propsep(seq)
    assert min(cert.diagnostics["near_margins"]) >= -1e-12
    assert not cert.verdict


def test_propsep_separated_is_full_certificate():
    seq = gen_random_separated(30, 0.5, seed=0)
    cert = certify_propsep(seq)
    assert cert.constants["separated"]
    assert np.allclose(near_factor_sums(seq), -log_delta(seq), rtol=1e-13)
    assert cert.verdict
    assert verify_majorant(seq, cert.measure).verdict
    half = verify_majorant(seq, cert.measure.scaled(0.5))
    assert not half.verdict


def test_propsep_gamma_bound():
    seq = gen_radial(0.5, 10)
    cert = certify_propsep(seq, threshold=separation_constant(seq))
    assert np.max(np.abs(gamma_lambda(seq, cert.measure))) <= 1 + 1e-9


def test_propsep_case_ratios_positive():
    lams = gen_random_separated(40, 0.2, seed=1)
    mus = gen_random_separated(40, 0.2, seed=2)
    r = propsep_case_ratios(lams, mus)
    assert r["pairs_inside"] + r["pairs_outside"] == 1600
    assert 0 < r["outside"] < math.inf
    # the arc integral over I_mu at lam is bounded below by a fixed multiple
    assert r["inside"] > 0.1


def test_maximal_singleton():
    cert = certify_maximal(Sequence.from_points([0.6]), grid_size=256)
    d = cert.diagnostics
    assert d["poisson"] == [0.0] and d["arc_average"] == [0.0] and cert.margins.tolist() == [0.0]


def test_maximal_two_points_constant_weight():
    seq = Sequence.from_points([0, 0.5])
    cert = certify_maximal(seq, grid_size=512)
    assert cert.measure.ac.values == pytest.approx(np.full(512, (1 + math.pi ** 2) * LOG2))
    assert cert.diagnostics["poisson"] == pytest.approx([(1 + math.pi ** 2) * LOG2] * 2)
    assert cert.verdict


@given(st.floats(1e-9, 1.0), st.floats(-1.0, 1.0))
def test_kernel_lower_bound_on_shadow(g, frac):
    # P(lam, zeta) >= 1/(1-|lam|) on I_lam, up to the constant 1 + pi^2
    z = 1.0 - g
    zeta = frac * math.pi * min(g, 1.0)
    assert poisson_kernel(z, zeta) * (1 + math.pi ** 2) >= (1 / g) * (1 - 1e-12)


@pytest.mark.parametrize("seq", [gen_radial(0.5, 30), gen_stolz(0.5, 30), gen_disjoint_tangent(30)],
                         ids=["radial", "stolz", "tangent"])
def test_maximal_chain_stages(seq):
    cert = certify_maximal(seq, grid_size=4096, alpha=2.0)
    assert min(cert.diagnostics["stage1_margins"]) >= -1e-9
    assert min(cert.diagnostics["stage2_margins"]) >= -1e-9
    assert cert.verdict


def test_maximal_grid_guard():
    with pytest.raises(GridTooCoarse):
        certify_maximal(gen_radial(0.5, 15), grid_size=256, min_cells=2)


def test_cs_singleton():
    cert = certify_cs(Sequence.from_points([0.1]), grid_size=128)
    assert cert.constants["l1_norm_u"] == 0


def test_cs_l1_matches_classify():
    seq = gen_stolz(0.5, 20)
    cert = certify_cs(seq, grid_size=512)
    assert cert.constants["l1_norm_u"] == classify(seq).verdicts["CS_sum"]
    assert cert.verdict
    assert math.isfinite(cert.constants["max_domination_violation"])


def test_staircase_weights_constant_tail():
    eps, beta, w = staircase_weights([0.5, 0.25, 0.125], [0.3, 0.3, 0.3])
    assert beta.tolist() == [0.0, 0.0, 0.3]
    assert len(w) == 1


def test_staircase_weights_majorant():
    eps, beta, _ = staircase_weights([0.5, 0.25, 0.125, 0.0625], [0.1, 0.4, 0.2, 0.3])
    assert eps.tolist() == [0.4, 0.4, 0.3, 0.3]
    assert np.all(beta >= 0)


@given(st.lists(st.floats(0.0, 5.0), min_size=2, max_size=30))
def test_staircase_telescoping(values):
    gaps = 0.9 ** np.arange(1, len(values) + 1)
    eps, beta, w = staircase_weights(gaps, values)
    for k in range(len(eps)):
        assert math.fsum(beta[k:]) == pytest.approx(eps[k], abs=1e-12)
    # ring masses add back up to eps_1
    assert w.l1_norm() == pytest.approx(eps[0], rel=1e-12)


@pytest.mark.parametrize("q", [0.3, 0.5, 0.7])
def test_staircase_radial(q):
    seq = gen_radial(q, 15)
    cert = certify_staircase_radial(seq)
    s = cert.constants["scale"]
    assert cert.verdict and math.isfinite(s)
    assert cert.constants["telescoping_max_error"] <= 1e-12
    assert min(cert.diagnostics["target_margins"]) >= -1e-12
    half = s / 2 * poisson_extend(cert.measure.scaled(1 / s), seq) - np.array(cert.diagnostics["eps"]) / seq.gap
    assert half.min() < 0


def test_staircase_unsorted_input():
    seq = gen_radial(0.5, 10)
    perm = np.random.default_rng(0).permutation(10)
    assert certify_staircase_radial(seq.subset(perm)).verdict


def test_staircase_not_radial():
    with pytest.raises(NotRadial):
        certify_staircase_radial(gen_stolz(0.5, 10))


def test_dirac_certificate():
    seq = gen_radial(0.5, 15)
    cert = certify_dirac(seq)
    assert cert.verdict
    m = cert.constants["mass"]
    assert m == pytest.approx(np.max(seq.gap * -log_delta(seq)))
    assert np.all(cert.margins >= m / seq.gap - (-log_delta(seq)) - 1e-12)


def test_dirac_not_radial():
    with pytest.raises(NotRadial):
        certify_dirac(gen_stolz(0.5, 5))


def test_trace_small_values():
    seq = gen_radial(0.5, 5)
    chk = trace_membership(seq, np.full(5, 0.9), Measure())
    assert chk.verdict


def test_trace_equality_case():
    seq = gen_radial(0.5, 5)
    mu = Measure.dirac(0.0, 0.2)
    chk = trace_membership(seq, np.exp(poisson_extend(mu, seq)), mu)
    assert np.allclose(chk.margins, 0, atol=1e-12)


def test_trace_single_point():
    chk = trace_membership(Sequence.from_points([0.5]), [math.e ** 3], Measure.dirac(0.0, 1.0))
    assert chk.margins[0] == pytest.approx(0, abs=1e-12)


def test_trace_zero_value_and_mode():
    chk = trace_membership(Sequence.from_points([0.5]), [0.0], Measure())
    assert chk.margins.tolist() == [0.0]
    with pytest.raises(ModeMismatch):
        trace_membership(Sequence.from_points([0.5]), [1.0], Measure.dirac(0.0, 1.0), mode="N+")


def test_garnett_precondition_examples():
    single = Sequence.from_points([0.5])
    assert garnett_precondition(single, [0.25]).tolist() == [True]
    assert garnett_precondition(single, [0.2500001]).tolist() == [False]
    close = Sequence(np.array([1e-3, 1e-3]), np.array([0.0, 1e-12]))
    assert garnett_precondition(close, [1e-3, 1e-3]).tolist() == [False, False]


def test_garnett_split_passes():
    seq = gen_radial(0.5, 12)
    cert = certify_staircase_radial(seq)
    out = garnett_split(seq, cert.measure)
    assert np.all(out["passes"])
    assert np.all(garnett_precondition(seq, out["values"]))
    assert np.max(np.abs(out["gamma"])) <= 1 + 1e-9


def test_noouter_summable_no_crossing():
    seq = gen_disjoint_tangent(200)
    rep = noouter_bound(seq, 1.0 / np.arange(1, 201) ** 2, 10.0)
    assert rep.crossing_index is None


def test_noouter_harmonic_unit_mass():
    seq = gen_disjoint_tangent(200)
    rep = noouter_bound(seq, 1.0 / np.arange(1, 201), 1.0)
    h = np.cumsum(1.0 / np.arange(1, 201))
    assert rep.crossing_index == int(np.argmax(h > seq.blaschke_sum + 2)) + 1
    assert rep.crossing_index == 5


def test_noouter_linear_in_mass():
    seq = gen_disjoint_tangent(50)
    eps = np.ones(50)
    assert noouter_bound(seq, eps, 2.0).rhs_bound == 2 * noouter_bound(seq, eps, 1.0).rhs_bound


def test_noouter_compensated_sums():
    seq = gen_disjoint_tangent(200)
    eps = 1.0 / np.arange(1, 201)
    rep = noouter_bound(seq, eps, 1.0)
    assert rep.partial_sums[-1] == math.fsum(eps)


def test_noouter_overlap_error():
    with pytest.raises(ArcsOverlap):
        noouter_bound(gen_radial(0.5, 3), [1, 1, 1], 1.0)


def test_noouter_pointwise_bound():
    seq = gen_disjoint_tangent(30)
    mu = Measure(StepWeight([0.3, 4.0], [0.5, 1.0], [2.0, 1.0]), AtomicMeasure([seq.theta[3]], [0.5]))
    lhs, rhs = noouter_pointwise(seq, mu)
    assert np.all(lhs <= rhs + 1e-12)
