import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ptqed.engineer import DriveParams, GCoefficients, bessel_g
from ptqed.lindblad import adiabatic_single_resonator_model, integrate
from ptqed.ptspectrum import (
    DominanceError, EffectiveRates, Phase, build_m, char_poly, classify, critical_couplings,
    effective_rates, eigenvalues_closed_form, eigenvalues_numeric, match_multisets, phase_transitions,
    pt_defect, sweep_spectrum,
)
from ptqed.qcore import DensityMatrix, annihilation, coherent

G_LOSS = bessel_g(DriveParams.derived(5, 2, 2, 1, 0.1))
BAL = EffectiveRates.balanced(0.1)
IMB = EffectiveRates(0.1, 0.3)


# ---- effective rates -----------------------------------------------------------


def test_equal_g_gives_zero_rate():
    r = effective_rates(0.05, 2, GCoefficients(0.3, 0.3), G_LOSS.swapped())
    assert r.gamma_tilde_1 == 0


def test_rate_value_and_g_scaling():
    r = effective_rates(0.05, 2, G_LOSS, G_LOSS.swapped())
    expected = 2 * 0.05**2 / 2 * (G_LOSS.g_plus**2 - G_LOSS.g_minus**2)
    assert r.gamma_tilde_1 == pytest.approx(expected, rel=1e-14)
    assert r.gamma_tilde_1 == pytest.approx(2.657e-4, rel=1e-3)
    assert r.gamma_tilde_2 == r.gamma_tilde_1
    r2 = effective_rates(0.1, 2, G_LOSS, G_LOSS.swapped())
    assert r2.gamma_tilde_1 == pytest.approx(4 * r.gamma_tilde_1, rel=1e-14)


def test_rate_matches_exponential_fit_of_lindblad_trajectory():
    g, gamma = 0.5, 1.0
    model = adiabatic_single_resonator_model(g, gamma, G_LOSS, 0.1, 30)
    rho0 = DensityMatrix.from_ket(model.layout, coherent(30, 0.1))
    res = integrate(model, rho0, 20.0, dt=0.01, observables={"a": annihilation(model.layout, 0)},
                    record_every=100)
    slope = np.polyfit(res.times, np.log(np.abs(res["a"])), 1)[0]
    expected = effective_rates(g, gamma, G_LOSS, G_LOSS.swapped()).gamma_tilde_1
    assert -slope == pytest.approx(expected, rel=1e-6)


def test_dominance_errors():
    with pytest.raises(DominanceError):
        effective_rates(0.05, 2, G_LOSS.swapped(), G_LOSS.swapped())
    with pytest.raises(DominanceError):
        effective_rates(0.05, 2, G_LOSS, G_LOSS)
    with pytest.raises(ValueError):
        EffectiveRates(-0.1, 0.1)


# ---- moment matrix ------------------------------------------------------------


def test_free_evolution_matrix():
    m = build_m(1.0, 0.0, EffectiveRates(0, 0))
    assert np.array_equal(m.data, np.diag([1, -1, 1, -1]).astype(complex))


def test_matrix_layout():
    m = build_m(1.0, 0.3, BAL).data
    assert m[0, 3] == m[0, 2] == 0.3
    assert m[1, 2] == m[1, 3] == -0.3
    rwa = build_m(1.0, 0.3, IMB, "rwa").data
    assert np.array_equal(rwa[np.ix_([0, 2], [0, 2])], [[1 - 0.1j, 0.3], [0.3, 1 + 0.3j]])
    # no coupling between a-type and a^+-type components
    assert np.all(rwa[np.ix_([0, 2], [1, 3])] == 0) and np.all(rwa[np.ix_([1, 3], [0, 2])] == 0)


def test_pt_defect():
    assert pt_defect(build_m(1.0, 0.3, BAL)) < 1e-14
    assert pt_defect(build_m(1.0, 0.3, IMB)) == pytest.approx(0.2, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.floats(-2, 2), st.floats(0, 2))
def test_pt_defect_independent_of_j_and_delta(delta, J):
    assert pt_defect(build_m(delta, J, IMB)) == pytest.approx(0.2, abs=1e-15)
    assert pt_defect(build_m(delta, J, BAL, "rwa")) < 1e-14


# ---- eigenvalues ----------------------------------------------------------------


def test_closed_form_reference_values():
    w = eigenvalues_closed_form(1.0, 0.3, BAL)
    assert w[0] == pytest.approx(1.24727, abs=1e-5) and w[1] == pytest.approx(0.65140, abs=1e-5)
    assert np.all(np.abs(w.imag) < 1e-15)
    assert match_multisets(w, np.linalg.eigvals(build_m(1.0, 0.3, BAL).data)) < 1e-12


def test_closed_form_uncoupled_lossless():
    w = eigenvalues_closed_form(0.7, 0.0, EffectiveRates(0, 0))
    assert match_multisets(w, [0.7, 0.7, -0.7, -0.7]) == 0


def test_closed_form_imbalanced_offset():
    for J in (0.05, 0.3, 0.8):
        shifted = eigenvalues_closed_form(1.0, J, IMB) - 0.1j
        assert match_multisets(shifted, eigenvalues_closed_form(1.0, J, EffectiveRates.balanced(0.2))) < 1e-15


def test_numeric_diagonal():
    w = eigenvalues_numeric(np.diag([1, -1, 1, -1]).astype(complex))
    assert np.allclose(w, [-1, -1, 1, 1], atol=1e-14)


def test_char_poly_against_numpy(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert np.allclose(char_poly(a), np.poly(a), atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 2), st.floats(0, 1.5), st.floats(0, 0.5), st.floats(0, 0.5),
       st.booleans(), st.sampled_from(["rwa", "nonrwa"]))
def test_closed_form_matches_numeric(delta, J, g1, g2, balanced, mode):
    rates = EffectiveRates(g1, g1 if balanced else g2)
    cf = eigenvalues_closed_form(delta, J, rates, mode)
    num = eigenvalues_numeric(build_m(delta, J, rates, mode))
    # k coalescing eigenvalues limit any method to ~eps**(1/k)
    gaps = np.abs(cf[:, None] - cf[None, :])
    cluster = int(np.max(np.sum(gaps < 1e-3, axis=1)))
    tol = {1: 1e-10, 2: 1e-6}.get(cluster, 1e-3)
    assert match_multisets(cf, num) < tol


def test_coalescence_at_lower_critical_coupling():
    w = eigenvalues_numeric(build_m(1.0, 0.1, BAL))
    gaps = [abs(a - b) for i, a in enumerate(w) for b in w[i + 1:]]
    assert min(gaps) < 1e-6


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 2), st.floats(0, 1.5), st.floats(0, 0.5))
def test_pt_partner_pairs(delta, J, g):
    w = eigenvalues_closed_form(delta, J, EffectiveRates.balanced(g))
    for z in w:
        assert min(abs(-np.conj(z) - y) for y in w) < 1e-10


def test_rwa_and_nonrwa_spectra_agree_only_at_zero_coupling():
    assert match_multisets(eigenvalues_numeric(build_m(1.0, 0.0, BAL)),
                           eigenvalues_numeric(build_m(1.0, 0.0, BAL, "rwa"))) < 1e-12
    for J in (0.05, 0.3, 0.7):
        assert match_multisets(eigenvalues_numeric(build_m(1.0, J, BAL)),
                               eigenvalues_numeric(build_m(1.0, J, BAL, "rwa"))) > 1e-4


def test_imbalanced_is_shifted_balanced_matrix():
    for J in np.linspace(0, 1, 11):
        diff = build_m(1.0, J, IMB).data - 0.1j * np.eye(4) - build_m(1.0, J, EffectiveRates.balanced(0.2)).data
        assert np.max(np.abs(diff)) < 1e-15


# ---- critical couplings and phases -------------------------------------------------


def test_critical_couplings():
    assert critical_couplings(1.0, BAL) == pytest.approx((0.1, 0.505), abs=1e-15)
    assert critical_couplings(1.0, IMB) == pytest.approx((0.2, 0.52), abs=1e-15)
    assert critical_couplings(1.0, EffectiveRates(0, 0)) == pytest.approx((0.0, 0.5))
    with pytest.raises(ValueError):
        critical_couplings(0.0, BAL)


def test_classify_examples():
    assert classify(1.0, 0.05, BAL).phase is Phase.BROKEN
    assert classify(1.0, 0.3, BAL).phase is Phase.EXACT
    assert classify(1.0, 0.7, BAL).phase is Phase.UNSTABLE
    assert classify(1.0, 0.6, BAL, "rwa").phase is Phase.EXACT
    ep = classify(1.0, 0.1, BAL)
    assert ep.is_ep and ep.min_gap < 1e-6 and ep.condition > 1e6
    assert not classify(1.0, 0.3, BAL).is_ep


def test_upper_critical_coupling_is_defective():
    # At J_c2 the pair w_+- and w_-- meets at zero with a single eigenvector:
    # M has rank 3, so the eigenvector matrix is singular there as well.
    m = build_m(1.0, 0.505, BAL).data
    s = np.linalg.svd(m, compute_uv=False)
    assert s[-1] < 1e-12 * s[0] and s[-2] > 1e-3
    assert np.linalg.matrix_rank(m, tol=1e-10) == 3
    pt = classify(1.0, 0.505, BAL)
    assert pt.phase is Phase.EXACT
    assert pt.is_ep


def test_sweep_boundaries_balanced():
    grid = np.linspace(0, 1, 201)
    step = grid[1] - grid[0]
    pts = sweep_spectrum(grid, 1.0, BAL)
    tr = phase_transitions(pts)
    assert [(t.before, t.after) for t in tr] == [(Phase.BROKEN, Phase.EXACT), (Phase.EXACT, Phase.UNSTABLE)]
    assert abs(tr[0].J_after - 0.1) <= step and abs(tr[1].J_before - 0.505) <= step
    assert max(p.pt_defect for p in pts) < 1e-14
    rwa = phase_transitions(sweep_spectrum(grid, 1.0, BAL, "rwa"))
    assert len(rwa) == 1 and abs(rwa[0].J_after - 0.1) <= step


def test_sweep_imbalanced_offset_floor():
    pts = sweep_spectrum(np.linspace(0, 1, 201), 1.0, IMB)
    exact = [p for p in pts if p.phase is Phase.EXACT]
    assert exact
    for p in exact:
        assert np.allclose(np.imag(p.eigenvalues), 0.1, atol=1e-10)
    # imaginary parts pair up symmetrically about the offset in every phase
    for p in pts:
        im = np.sort(np.imag(p.eigenvalues))
        assert np.allclose(im + im[::-1], 0.2, atol=1e-9)


def test_sweep_validation():
    with pytest.raises(ValueError):
        sweep_spectrum([], 1.0, BAL)
    with pytest.raises(ValueError):
        sweep_spectrum([0.2, 0.1], 1.0, BAL)
