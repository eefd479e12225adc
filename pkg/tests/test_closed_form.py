import cmath
import math

import numpy as np
import pytest

from dwkb import (
    BranchCutCrossing,
    CoefficientSequence,
    RootPairSequence,
    SplitState,
    WindowMismatch,
    assign_branches,
    coeffs_from_phase,
    delta_p_estimate,
    delta_p_sum,
    linear_ramp_profile,
    propagate,
    transfer_wkb_riccati,
    wkb_expsum_direct,
    wkb_expsum_riccati,
    wkb_product,
)

PI3 = math.pi / 3


def ramp(L, n_h=100):
    seq = coeffs_from_phase(linear_ramp_profile(PI3, 2 * PI3, n_h, 2 * n_h + L))
    return seq, assign_branches(seq.window(1, 2 * n_h + L))


def test_constant_coefficients_are_geometric():
    phi = 0.9
    seq = CoefficientSequence.constant(-2 * math.cos(phi), 1.0, 0, 12)
    roots = assign_branches(seq)
    k = np.arange(3, 11)
    want = (0.5 - 1j) * np.exp(1j * phi * (k - 3))
    for form in (wkb_product(roots, 1, 3, 10, 0.5 - 1j),
                 wkb_expsum_riccati(seq, roots, 1, 3, 10, 0.5 - 1j),
                 wkb_expsum_direct(seq, roots, 1, 3, 10, 0.5 - 1j)):
        assert form.k0 == 3
        assert np.max(np.abs(form.values - want)) < 1e-13


@pytest.mark.parametrize("branch", [1, 2])
def test_product_equals_diagonal_propagation(bench_chain, branch):
    roots = bench_chain.roots
    start = SplitState(1.0, 0.0) if branch == 1 else SplitState(0.0, 1.0)
    prop = propagate(transfer_wkb_riccati(roots), start, k0=1)
    vals = prop.y1 if branch == 1 else prop.y2
    prod = wkb_product(roots, branch, 1, bench_chain.N, 1.0)
    assert np.max(np.abs(prod.values - vals)) < 1e-12


def test_product_transmission_regression(bench_chain):
    # frozen from this implementation; see the notes on the |T| discrepancy
    prod = wkb_product(bench_chain.roots, 1, 1, bench_chain.N)
    assert abs(prod.values[-1]) == pytest.approx(1.7373363083933004, abs=1e-12)


def test_expsum_amplitude_is_sqrt3(bench_chain):
    # the drift sum is imaginary, the amplitude is sqrt(f0 products) times the prefactor
    for form in (wkb_expsum_riccati, wkb_expsum_direct):
        cf = form(bench_chain.seq, bench_chain.roots, 1, 1, bench_chain.N)
        assert abs(cf.values[-1]) == pytest.approx(math.sqrt(3), abs=1e-12)


def test_variant_ratio_is_the_drift(bench_chain):
    seq, roots, N = bench_chain.seq, bench_chain.roots, bench_chain.N
    r = wkb_expsum_riccati(seq, roots, 1, 1, N).values
    d = wkb_expsum_direct(seq, roots, 1, 1, N).values
    dp = delta_p_sum(seq, 1, N)
    assert abs(r[-1] / d[-1] - cmath.exp(dp)) < 1e-12


def test_branches_are_conjugate_for_real_chain(bench_chain):
    seq, roots, N = bench_chain.seq, bench_chain.roots, bench_chain.N
    b1 = wkb_expsum_riccati(seq, roots, 1, 1, N).values
    b2 = wkb_expsum_riccati(seq, roots, 2, 1, N).values
    assert np.max(np.abs(b2 - np.conj(b1))) < 1e-12


def test_prefactor_is_quarter_root(bench_chain):
    cf = wkb_expsum_direct(bench_chain.seq, bench_chain.roots, 1, 1, bench_chain.N)
    d = bench_chain.roots.discriminant
    assert np.allclose(cf.prefactor ** 4 * d, 1.0, atol=1e-12)


def test_expsum_deviation_is_first_order():
    devs = []
    for L in (50, 100):
        seq, roots = ramp(L)
        N = roots.k_max
        prod = wkb_product(roots, 1, 1, N).values[-1]
        cf = wkb_expsum_riccati(seq, roots, 1, 1, N).values[-1]
        devs.append(abs(cmath.log(cf / prod)))
    assert devs[0] / devs[1] == pytest.approx(2.0, abs=0.1)


def test_delta_p_sum_benchmark_values(bench_chain):
    full = delta_p_sum(bench_chain.seq, 1, bench_chain.N)
    assert abs(full.real) < 1e-15
    assert abs(abs(full) - math.pi / 6) < 0.02 * math.pi / 6
    # canonical index 124 carries the step centred on cell 125, the ramp midpoint
    half = delta_p_sum(bench_chain.seq, 1, 124)
    assert abs(abs(half) - math.pi / 12) < 0.02 * math.pi / 12
    assert full.imag == pytest.approx(-0.5174155533851507, abs=1e-12)


def test_delta_p_sum_converges_to_estimate():
    est = abs(delta_p_estimate(PI3, 2 * PI3))
    errs = []
    for L in (50, 100, 200):
        seq, _ = ramp(L)
        errs.append(abs(abs(delta_p_sum(seq, 1, seq.k_max)) - est))
    assert errs[0] > errs[1] > errs[2]
    assert errs[0] / errs[1] == pytest.approx(2.0, abs=0.4)


def test_delta_p_sum_constant_f1():
    seq = CoefficientSequence.constant(-0.3, 1.0, 0, 9)
    assert delta_p_sum(seq, 0, 9) == 0


def test_delta_p_estimate():
    assert delta_p_estimate(PI3, 2 * PI3) == pytest.approx(-1j * math.pi / 6, abs=1e-15)
    assert delta_p_estimate(1.0, 1.0) == 0
    assert delta_p_estimate(PI3, math.pi / 2) == pytest.approx(-1j * math.pi / 12, abs=1e-15)
    with pytest.raises(ValueError):
        delta_p_estimate(0.0, 1.0)


def test_branch_cut_crossing():
    rho1 = np.array([1.0, cmath.exp(2.0j), cmath.exp(2.1j)])
    roots = RootPairSequence(0, rho1, -rho1)
    seq = CoefficientSequence.constant(0.0, -1.0, 0, 2)
    with pytest.raises(BranchCutCrossing) as info:
        wkb_expsum_direct(seq, roots, 1, 0, 2)
    assert info.value.cell == 1


def test_window_and_branch_checks(bench_chain):
    with pytest.raises(WindowMismatch):
        wkb_product(bench_chain.roots, 1, 0, 10)
    with pytest.raises(WindowMismatch):
        wkb_expsum_riccati(bench_chain.seq, bench_chain.roots, 1, 10, 5)
    with pytest.raises(ValueError):
        wkb_product(bench_chain.roots, 3, 1, 10)
