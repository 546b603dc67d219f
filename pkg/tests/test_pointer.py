"""Checks for the Gaussian pointer calculus.

Oracles used here, all independent of the library internals:
  - trapezoid quadrature of the Gaussian kernels for overlaps and moments,
  - a brute-force term-bookkeeping expansion of the two-coupling chain,
  - scipy root finding for the threshold and stationarity conditions.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from seqweak.errors import NonUnitary
from seqweak.pointer import (
    Axis,
    DeflectionTriple,
    GaussianPointerSpec,
    GaussianSuperposition,
    Pol,
    PointerTerm,
    anomaly_threshold,
    apply_coupling,
    apply_polarization,
    closed_form_sequential,
    closed_form_single_coupling,
    closed_form_two_qubit,
    first_moment,
    initial_pointer_state,
    max_reversal_delta,
    moments,
    overlap,
    superposition_norm,
)
from seqweak.qubit import HORIZONTAL, waveplate_hwp

SQ3 = np.sqrt(3.0)

sigmas = st.floats(min_value=0.02, max_value=3.0, allow_nan=False)
ratios = st.floats(min_value=0.0, max_value=4.0, allow_nan=False)


def gauss_amp(x, shift, sigma):
    """Normalized Gaussian amplitude, intensity standard deviation sigma."""
    norm = (2.0 * np.pi * sigma**2) ** -0.25
    return norm * np.exp(-((x - shift) ** 2) / (4.0 * sigma**2))


def quad_overlap(a, b, sigma, weight=None):
    lim = max(abs(a), abs(b)) + 12.0 * sigma
    x = np.linspace(-lim, lim, 4001)
    w = np.ones_like(x) if weight is None else weight(x)
    return np.trapezoid(gauss_amp(x, a, sigma) * w * gauss_amp(x, b, sigma), x)


def brute_chain_terms(delta):
    """Term bookkeeping for HWP(30) -> X coupling -> HWP(-30) -> Y coupling."""
    hwp30 = np.array([[0.5, SQ3 / 2], [SQ3 / 2, -0.5]])
    hwp_m30 = np.array([[0.5, -SQ3 / 2], [-SQ3 / 2, -0.5]])

    def pol(terms, u):
        out = {}
        for (p, sx, sy), c in terms.items():
            col = 0 if p == "H" else 1
            for row, q in enumerate("HV"):
                out[(q, sx, sy)] = out.get((q, sx, sy), 0j) + c * u[row, col]
        return {k: v for k, v in out.items() if abs(v) > 1e-14}

    def shift_h(terms, axis, d):
        out = {}
        for (p, sx, sy), c in terms.items():
            if p == "H":
                sx, sy = (sx + d, sy) if axis == "x" else (sx, sy + d)
            out[(p, sx, sy)] = out.get((p, sx, sy), 0j) + c
        return out

    terms = {("H", 0.0, 0.0): 1.0 + 0j}
    terms = pol(terms, hwp30)
    terms = shift_h(terms, "x", delta)
    terms = pol(terms, hwp_m30)
    terms = shift_h(terms, "y", delta)
    return terms


def quad_moments(terms, sigma, delta):
    """2-D trapezoid quadrature of <x>, <y>, <xy> for a term dictionary."""
    lim = delta + 10.0 * sigma
    x = np.linspace(-lim, lim, 701)
    y = np.linspace(-lim, lim, 701)
    xg, yg = np.meshgrid(x, y, indexing="xy")
    planes = {"H": np.zeros_like(xg, dtype=complex), "V": np.zeros_like(xg, dtype=complex)}
    for (p, sx, sy), c in terms.items():
        planes[p] += c * gauss_amp(xg, sx, sigma) * gauss_amp(yg, sy, sigma)
    density = abs(planes["H"]) ** 2 + abs(planes["V"]) ** 2

    def integrate(values):
        return np.trapezoid(np.trapezoid(values, x, axis=1), y)

    total = integrate(density)
    return (
        integrate(density * xg) / total,
        integrate(density * yg) / total,
        integrate(density * xg * yg) / total,
    )


def run_sequential_chain(delta, prep_deg=30.0, mid_deg=-30.0):
    state = initial_pointer_state(HORIZONTAL)
    state = apply_polarization(state, waveplate_hwp(prep_deg))
    state = apply_coupling(state, Axis.X, delta)
    state = apply_polarization(state, waveplate_hwp(mid_deg))
    state = apply_coupling(state, Axis.Y, delta)
    return state


def test_pointer_spec_rejects_nonpositive_width():
    with pytest.raises(ValueError):
        GaussianPointerSpec(sigma_mm=0.0)
    assert GaussianPointerSpec(sigma_mm=0.1116).sigma_mm == 0.1116


def test_overlap_against_quadrature():
    for a, b, sigma in [(0.0, 0.0, 0.3), (0.1, -0.2, 0.25), (1.0, 0.2, 0.5), (0.0, 0.7, 0.1116)]:
        assert overlap(a, b, sigma) == pytest.approx(quad_overlap(a, b, sigma), abs=1e-9)


def test_overlap_special_values():
    assert overlap(0.4, 0.4, 0.2) == pytest.approx(1.0, abs=1e-12)
    gap = 0.37 * np.sqrt(8.0 * np.log(3.0))
    assert overlap(0.0, gap, 0.37) == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_first_moment_against_quadrature():
    for a, b, sigma in [(0.0, 0.0, 0.3), (0.1, -0.2, 0.25), (1.0, 0.2, 0.5), (0.3, 0.0, 0.1116)]:
        want = quad_overlap(a, b, sigma, weight=lambda x: x)
        assert first_moment(a, b, sigma) == pytest.approx(want, abs=1e-9)
    assert first_moment(0.6, 0.6, 0.2) == pytest.approx(0.6, abs=1e-12)


def test_chain_matches_brute_force_expansion():
    delta = 0.29
    want = brute_chain_terms(delta)
    assert want[("H", delta, delta)] == pytest.approx(0.25, abs=1e-12)
    assert want[("H", 0.0, delta)] == pytest.approx(-0.75, abs=1e-12)
    assert want[("V", delta, 0.0)] == pytest.approx(-SQ3 / 4, abs=1e-12)
    assert want[("V", 0.0, 0.0)] == pytest.approx(-SQ3 / 4, abs=1e-12)

    state = run_sequential_chain(delta)
    assert len(state.terms) == 4
    got = {(t.pol.name, t.shift_x, t.shift_y): t.coeff for t in state.terms}
    assert set(got) == set(want)
    for key in want:
        assert got[key] == pytest.approx(want[key], abs=1e-12)


def test_moments_against_quadrature():
    for delta, sigma in [(0.1, 0.2), (0.3, 0.2), (0.45, 0.1116), (0.0, 0.3)]:
        state = run_sequential_chain(delta)
        got = moments(state, sigma)
        want = quad_moments(brute_chain_terms(delta), sigma, delta)
        assert got.x_mm == pytest.approx(want[0], abs=1e-8)
        assert got.y_mm == pytest.approx(want[1], abs=1e-8)
        assert got.xy_mm2 == pytest.approx(want[2], abs=1e-8)


def test_closed_form_sequential_formulas():
    delta, sigma = 0.31, 0.1116
    damp = np.exp(-(delta**2) / (8.0 * sigma**2))
    triple = closed_form_sequential(delta, sigma)
    assert triple.x_mm == pytest.approx(delta / 4.0, abs=1e-12)
    assert triple.y_mm == pytest.approx(delta / 8.0 * (5.0 - 3.0 * damp), abs=1e-12)
    assert triple.xy_mm2 == pytest.approx(delta**2 / 16.0 * (1.0 - 3.0 * damp), abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(sigmas, ratios)
def test_calculus_agrees_with_closed_form(sigma, ratio):
    delta = ratio * sigma
    got = moments(run_sequential_chain(delta), sigma)
    want = closed_form_sequential(delta, sigma)
    assert got.x_mm == pytest.approx(want.x_mm, abs=1e-10)
    assert got.y_mm == pytest.approx(want.y_mm, abs=1e-10)
    assert got.xy_mm2 == pytest.approx(want.xy_mm2, abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(sigmas, ratios)
def test_first_marginal_is_width_independent(sigma, ratio):
    delta = ratio * sigma
    got = moments(run_sequential_chain(delta), sigma)
    assert got.x_mm == pytest.approx(delta / 4.0, abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(sigmas, ratios)
def test_chain_preserves_norm(sigma, ratio):
    state = run_sequential_chain(ratio * sigma)
    assert superposition_norm(state, sigma) == pytest.approx(1.0, abs=1e-10)


def test_polarization_merges_repeated_terms():
    state = initial_pointer_state(HORIZONTAL)
    state = apply_polarization(state, waveplate_hwp(30.0))
    assert len(state.terms) == 2
    state = apply_polarization(state, waveplate_hwp(30.0))
    assert len(state.terms) == 1
    term = state.terms[0]
    assert term.pol is Pol.H
    assert term.coeff == pytest.approx(1.0 + 0j, abs=1e-12)


def test_apply_coupling_requires_nonnegative_shift():
    state = initial_pointer_state(HORIZONTAL)
    with pytest.raises(ValueError):
        apply_coupling(state, Axis.X, -0.1)


def test_apply_polarization_rejects_nonunitary():
    state = initial_pointer_state(HORIZONTAL)
    with pytest.raises(NonUnitary):
        apply_polarization(state, np.array([[1.0, 0.0], [0.0, 0.5]]))


def test_two_qubit_closed_form():
    triple = closed_form_two_qubit(0.3)
    assert triple.x_mm == pytest.approx(0.075, abs=1e-12)
    assert triple.y_mm == pytest.approx(0.075, abs=1e-12)
    assert triple.xy_mm2 == pytest.approx(0.075**2, abs=1e-12)


def test_two_qubit_matches_product_chain():
    # Particle A: prep, X coupling, second plate.  Particle B: prep, Y coupling.
    delta, sigma = 0.4, 0.17
    a_state = initial_pointer_state(HORIZONTAL)
    a_state = apply_polarization(a_state, waveplate_hwp(30.0))
    a_state = apply_coupling(a_state, Axis.X, delta)
    a_state = apply_polarization(a_state, waveplate_hwp(-30.0))
    b_state = initial_pointer_state(HORIZONTAL)
    b_state = apply_polarization(b_state, waveplate_hwp(30.0))
    b_state = apply_coupling(b_state, Axis.Y, delta)
    x_a = moments(a_state, sigma).x_mm
    y_b = moments(b_state, sigma).y_mm
    want = closed_form_two_qubit(delta)
    assert x_a == pytest.approx(want.x_mm, abs=1e-10)
    assert y_b == pytest.approx(want.y_mm, abs=1e-10)
    assert x_a * y_b == pytest.approx(want.xy_mm2, abs=1e-10)


@settings(max_examples=200)
@given(st.floats(min_value=0.0, max_value=5.0, allow_nan=False), sigmas)
def test_two_qubit_joint_never_negative(delta, sigma):
    triple = closed_form_two_qubit(delta)
    assert triple.xy_mm2 >= 0.0
    assert triple.xy_mm2 == pytest.approx(triple.x_mm * triple.y_mm, abs=1e-12)


def test_single_coupling_closed_form():
    triple = closed_form_single_coupling(0.237)
    assert triple.x_mm == pytest.approx(0.237 / 4.0, abs=1e-12)
    assert triple.y_mm == 0.0
    assert triple.xy_mm2 == 0.0


def test_anomaly_threshold_is_damping_root():
    for sigma in (0.1116, 1.0, 0.4):
        want = brentq(
            lambda d: closed_form_sequential(d, sigma).xy_mm2,
            0.5 * sigma,
            5.0 * sigma,
            xtol=1e-12,
        )
        got = anomaly_threshold(sigma)
        assert got == pytest.approx(sigma * np.sqrt(8.0 * np.log(3.0)), abs=1e-12)
        assert got == pytest.approx(want, abs=1e-9)


def test_joint_sign_structure_around_threshold():
    sigma = 0.1116
    star = anomaly_threshold(sigma)
    for frac in (0.2, 0.5, 0.9):
        assert closed_form_sequential(frac * star, sigma).xy_mm2 < 0.0
    for frac in (1.1, 2.0, 5.0):
        assert closed_form_sequential(frac * star, sigma).xy_mm2 > 0.0


def test_max_reversal_matches_stationarity_root():
    # d/dt [t (1 - 3 e^-t)] = 0  <=>  3 e^-t (1 - t) = 1, with t = delta^2/(8 sigma^2).
    t_root = brentq(lambda t: 3.0 * np.exp(-t) * (1.0 - t) - 1.0, 0.1, 0.9, xtol=1e-14)
    for sigma in (1.0, 0.1116):
        want = sigma * np.sqrt(8.0 * t_root)
        got = max_reversal_delta(sigma)
        assert got == pytest.approx(want, abs=1e-7)
        assert closed_form_sequential(got, sigma).xy_mm2 == pytest.approx(
            -0.20562999526589 * sigma**2, abs=1e-9 * sigma**2
        )
    assert round(max_reversal_delta(1.0), 3) == 1.935


def test_superposition_requires_terms():
    with pytest.raises(ValueError):
        GaussianSuperposition(terms=())


def test_term_tuple_shape():
    term = PointerTerm(coeff=1.0, shift_x=0.0, shift_y=0.0, pol=Pol.H)
    state = GaussianSuperposition(terms=(term,))
    triple = moments(state, 0.2)
    assert isinstance(triple, DeflectionTriple)
    assert triple.x_mm == pytest.approx(0.0, abs=1e-12)
