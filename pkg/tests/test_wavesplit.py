import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dwkb import (
    CoefficientSequence,
    GaugeCollision,
    GaugeSequences,
    SplitState,
    TransferSequence,
    Variant,
    WindowMismatch,
    WindowTooSmall,
    assign_branches,
    build_transfer_general,
    iterate_recurrence,
    propagate,
    riccati_approx_roots,
    riccati_quadratic_residual,
    riccati_residual,
    split_from_solution,
    transfer_exact,
    transfer_wkb_direct,
    transfer_wkb_riccati,
)


def random_seq(rng, n=20, k_min=0, forcing=False):
    f1 = rng.normal(size=n) + 1j * rng.normal(size=n)
    f0 = rng.uniform(0.5, 1.5, n) * np.exp(1j * rng.uniform(-np.pi, np.pi, n))
    frc = rng.normal(size=n) + 1j * rng.normal(size=n) if forcing else None
    return CoefficientSequence(k_min, f0, f1, frc)


def reference(seq, y0, y1):
    return iterate_recurrence(seq, y0, y1)


def run_gauge(seq, g, y0, y1):
    """Split at the first cell, propagate, and return total values on the chain."""
    T = build_transfer_general(seq, g)
    start = split_from_solution(y0, y1, g, T.k_min - 1)
    return propagate(T, start)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.booleans())
def test_any_gauge_reproduces_the_recurrence(seed, forced):
    rng = np.random.default_rng(seed)
    n = 20
    seq = random_seq(rng, n, k_min=-3, forcing=forced)
    g1 = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    g2 = g1 + (0.5 + rng.uniform(size=n + 1)) * np.exp(1j * rng.uniform(-np.pi, np.pi, n + 1))
    g = GaugeSequences(seq.k_min, g1, g2)
    y0, y1 = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
    ref = reference(seq, y0, y1)
    out = run_gauge(seq, g, y0, y1)
    want = ref.y[out.k_min - ref.k_min: out.k_max - ref.k_min + 1]
    assert np.max(np.abs(out.y - want)) <= 1e-10 * max(1.0, np.max(np.abs(want)))


def test_exact_transfer_matches_general_builder(bench_chain):
    seq, roots = bench_chain.seq, bench_chain.roots
    gen = build_transfer_general(seq.window(1, bench_chain.N), GaugeSequences.from_roots(roots))
    exact = transfer_exact(roots)
    lo, hi = max(gen.k_min, exact.k_min), min(gen.k_max, exact.k_max)
    assert np.max(np.abs(gen.window(lo, hi).T - exact.window(lo, hi).T)) < 1e-13


def test_exact_determinant(bench_chain):
    roots, f0 = bench_chain.roots, bench_chain.seq.f0
    T = transfer_exact(roots)
    D = roots.sqrt_discriminant
    k = np.arange(T.k_min, T.k_max + 1)
    det = np.linalg.det(T.T)
    want = f0[k - 1 - bench_chain.seq.k_min] * D[k - 1 - roots.k_min] / D[k - roots.k_min]
    assert np.max(np.abs(det - want)) < 1e-13
    # only constant roots reduce it to f0
    plateau = k < 95
    assert np.allclose(det[plateau], 1.0, atol=1e-13)


def test_exact_transfer_is_diagonal_for_constant_roots():
    seq = CoefficientSequence.constant(-2 * math.cos(0.8), 1.0, 0, 6)
    T = transfer_exact(assign_branches(seq)).T
    assert np.all(np.abs(T[:, 0, 1]) < 1e-15) and np.all(np.abs(T[:, 1, 0]) < 1e-15)
    assert np.allclose(T[:, 0, 0], np.exp(0.8j), atol=1e-15)


@pytest.mark.parametrize("build", [transfer_wkb_riccati, transfer_wkb_direct])
def test_wkb_transfers_are_exactly_diagonal(bench_chain, build):
    T = build(bench_chain.roots)
    assert T.variant.diagonal
    assert np.all(T.T[:, 0, 1] == 0) and np.all(T.T[:, 1, 0] == 0)


def test_riccati_transfer_is_exact_diagonal(bench_chain):
    ex, wk = transfer_exact(bench_chain.roots).T, transfer_wkb_riccati(bench_chain.roots).T
    assert np.max(np.abs(ex[:, 0, 0] - wk[:, 0, 0])) < 1e-15
    assert np.max(np.abs(ex[:, 1, 1] - wk[:, 1, 1])) < 1e-15


def test_transfer_sequence_rejects_offdiagonal_wkb():
    T = np.tile(np.eye(2, dtype=complex), (3, 1, 1))
    T[1, 0, 1] = 1e-3
    with pytest.raises(ValueError):
        TransferSequence(Variant.WKB_DIRECT, 0, T, np.zeros((3, 2)))


def test_root_gauge_solves_riccati_for_constant_coefficients():
    seq = CoefficientSequence.constant(-1.3, 0.7, 0, 10)
    g = GaugeSequences.from_roots(assign_branches(seq))
    assert riccati_residual(g, seq, 1) < 1e-15
    assert riccati_residual(g, seq, 2) < 1e-15


def test_quadratic_defect_is_second_order():
    from dwkb import coeffs_from_phase, linear_ramp_profile
    vals = []
    for L in (50, 100):
        seq = coeffs_from_phase(linear_ramp_profile(math.pi / 3, 2 * math.pi / 3, 20, 40 + L))
        roots = assign_branches(seq)
        g = riccati_approx_roots(roots)
        vals.append(riccati_quadratic_residual(g, roots, seq, 1, (23, 20 + L - 4)))
    assert vals[0] / vals[1] == pytest.approx(4.0, rel=0.1)


def test_riccati_approx_single_branch(bench_chain):
    g = riccati_approx_roots(bench_chain.roots, branch=1)
    assert np.array_equal(g.g2, bench_chain.roots.rho2[:-1])
    with pytest.raises(ValueError):
        riccati_approx_roots(bench_chain.roots, branch=3)


def test_gauge_collision():
    with pytest.raises(GaugeCollision) as info:
        GaugeSequences(2, [1.0, 2.0, 3.0], [0.5, 2.0, 1.0])
    assert info.value.cell == 3


def test_split_roundtrip():
    g = GaugeSequences(0, [0.3 + 1j, 0.2], [-0.5j, 1.1])
    st = split_from_solution(1.0 + 2j, -0.4 + 0.1j, g, 0)
    assert abs(st.y - (1.0 + 2j)) < 1e-15
    assert abs((0.3 + 1j) * st.y1 - 0.5j * st.y2 - (-0.4 + 0.1j)) < 1e-15


def test_propagate_windows(bench_chain):
    T = transfer_exact(bench_chain.roots)
    out = propagate(T, SplitState(1.0, 0.0), k0=10, k_end=12)
    assert (out.k_min, out.k_max) == (10, 12)
    with pytest.raises(WindowMismatch):
        propagate(T, SplitState(1.0, 0.0), k0=0)
    with pytest.raises(WindowTooSmall):
        transfer_exact(bench_chain.roots.window(5, 5))
