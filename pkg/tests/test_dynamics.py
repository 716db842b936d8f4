"""Numeric evaluation, integration, and trajectory diagnostics."""

import math

import numpy as np
import pytest

from bilax.dynamics import (
    SingularityError,
    conserved_channels,
    convergence_order,
    csv_rows,
    dn_x0_relation_residual,
    evaluate,
    integrate,
    random_phase_point,
    ring_values,
    state_names,
    vector_field,
    write_csv,
    write_svg,
    zero_curvature_residual,
)
from bilax.phase_ring import Fraction, StructureError
from bilax.toda_models import build_bcn, build_dn, displayed_hamiltonian, hamiltonian

ZERO_PARAMS = {p: 0.0 for p in ("th1", "a1", "b1", "thN", "aN", "bN")}


# ---------------------------------------------------------------------------
# evaluation


def test_evaluate_square(bcn1):
    ring = bcn1.ring
    x1 = ring.gen("X1")
    assert evaluate(Fraction(x1 * x1), {"X1": 3.0, "x1": 0.0}) == 9.0


def test_evaluate_casimir_quarter(dn2):
    from bilax.toda_models import sl2_casimir

    c = sl2_casimir(dn2)
    val = evaluate(Fraction(c), {"H": 0.5, "E": 1.0, "F": 0.0})
    assert val == 0.25


def test_evaluate_closed_form_origin():
    # one site, all boundary parameters off, at the phase-space origin
    m = build_bcn(1, ZERO_PARAMS)
    h = displayed_hamiltonian(m)
    val = evaluate(h, {"x1": 0.0, "X1": 0.0}, model=m)
    assert val == 0.0


def test_evaluate_singularity_guard(dn2):
    h = hamiltonian(dn2)
    point = {"x1": 0.0, "x2": 0.0, "X1": 0.0, "X2": 0.0, "E": 0.0, "H": 0.0, "F": 1.0}
    with pytest.raises(SingularityError):
        evaluate(h, point, model=dn2)


# ---------------------------------------------------------------------------
# vector field


def test_vector_field_free_chain_forces():
    m = build_bcn(2, ZERO_PARAMS)
    f = vector_field(m)
    y = np.zeros(4)
    out = f(y)
    assert out[0] == 0.0 and out[1] == 0.0
    assert out[2] == 1.0 and out[3] == -1.0


def test_vector_field_equilibrium():
    # symmetric walls beta > 0, alpha = theta = 0: origin is a fixed point
    params = dict(ZERO_PARAMS, b1=1.0, bN=1.0)
    m = build_bcn(1, params)
    f = vector_field(m)
    assert np.allclose(f(np.zeros(2)), 0.0)


def test_vector_field_sources_agree(bcn2):
    rng = np.random.default_rng(12)
    fb = vector_field(bcn2, "bracket")
    fp = vector_field(bcn2, "closed-form")
    for _ in range(100):
        p = random_phase_point(bcn2, rng)
        y = np.array([p[n] for n in state_names(bcn2)])
        assert np.max(np.abs(fb(y) - fp(y))) <= 1e-14 * max(
            1.0, float(np.max(np.abs(fb(y))))
        )


def test_vector_field_closed_form_source_dn_rejected(dn2):
    with pytest.raises(StructureError):
        vector_field(dn2, "closed-form")


def test_dn_level_set_is_flow_invariant(dn2):
    f = vector_field(dn2)
    rng = np.random.default_rng(4)
    names = state_names(dn2)
    for _ in range(20):
        p = random_phase_point(dn2, rng)
        y = np.array([p[n] for n in names])
        dy = f(y)
        # d/dT(F - e^{x1}) = Fdot - e^{x1} xdot1
        fdot = dy[names.index("F")]
        xdot1 = dy[0]
        assert abs(fdot - math.exp(p["x1"]) * xdot1) < 1e-13


# ---------------------------------------------------------------------------
# sampling


def test_random_phase_point_invariants(dn2):
    rng = np.random.default_rng(8)
    c0 = dn2.params["c0"]
    c1 = dn2.params["c1"]
    for _ in range(20):
        p = random_phase_point(dn2, rng)
        u1 = math.exp(p["x1"])
        assert u1 > 0
        assert abs(p["F"] - u1 - c0 / 2.0) < 1e-14
        cas = p["H"] ** 2 + p["E"] * p["F"]
        assert abs(cas - c1 / 4.0) < 1e-14


def test_sampler_rejects_singular_level_set():
    m = build_dn(2, {"c0": 1e-14, "c1": -1.0})
    with pytest.raises(StructureError):
        random_phase_point(m, np.random.default_rng(0))


# ---------------------------------------------------------------------------
# integration


def test_integrate_validation(bcn1):
    p = {"x1": 0.0, "X1": 0.0}
    with pytest.raises(StructureError):
        integrate(bcn1, p, -1.0, 10)
    with pytest.raises(StructureError):
        integrate(bcn1, p, 1e-3, 10, scheme="euler")


def test_momentum_conservation_free_chain():
    m = build_bcn(2, ZERO_PARAMS)
    p0 = {"x1": 0.3, "x2": -0.2, "X1": 0.1, "X2": -0.4}
    traj = integrate(m, p0, 1e-3, 2000)
    ptot = traj.states[:, 2] + traj.states[:, 3]
    assert float(np.max(np.abs(ptot - ptot[0]))) < 1e-13


def test_zero_data_breathing_mode():
    # from the origin with no boundary terms, the chain breathes
    # antisymmetrically: x1 = -x2 along the flow, total momentum stays 0
    m = build_bcn(2, ZERO_PARAMS)
    p0 = {"x1": 0.0, "x2": 0.0, "X1": 0.0, "X2": 0.0}
    traj = integrate(m, p0, 1e-3, 2000)
    assert float(np.max(np.abs(traj.states[:, 0] + traj.states[:, 1]))) < 1e-12
    assert float(np.max(np.abs(traj.states[:, 2] + traj.states[:, 3]))) < 1e-12
    assert float(np.max(np.abs(traj.states[:, 0]))) > 0.1


def test_deterministic_csv(tmp_path, bcn2):
    rng = np.random.default_rng(0)
    p0 = random_phase_point(bcn2, rng)
    out = []
    for k in range(2):
        traj = integrate(bcn2, p0, 1e-3, 200)
        conserved_channels(bcn2, traj)
        zero_curvature_residual(bcn2, traj, (0.3, 0.7))
        path = tmp_path / ("run%d.csv" % k)
        write_csv(bcn2, traj, str(path))
        out.append(path.read_bytes())
    assert out[0] == out[1]


def test_csv_column_contract(tmp_path, bcn2, dn2):
    for m in (bcn2, dn2):
        rng = np.random.default_rng(1)
        p0 = random_phase_point(m, rng, amplitude=0.2)
        traj = integrate(m, p0, 1e-3, 10)
        header = next(iter(csv_rows(m, traj)))
        cols = header.split(",")
        want = ["t"] + ["x_%d" % j for j in range(1, m.N + 1)]
        want += ["X_%d" % j for j in range(1, m.N + 1)]
        if m.name == "dn":
            want += ["E", "F", "H"]
        want += ["H_drift", "casimir_drift", "zc_residual"]
        assert cols == want


def test_halved_step_reduces_drift_16x(bcn2):
    rng = np.random.default_rng(5)
    p0 = random_phase_point(bcn2, rng)
    drifts = []
    for dt in (1e-2, 5e-3):
        traj = integrate(bcn2, p0, dt, int(round(2.0 / dt)))
        ch = conserved_channels(bcn2, traj)
        drifts.append(float(ch["H_drift"].max()))
    ratio = drifts[0] / drifts[1]
    assert 10.0 < ratio < 26.0


def test_rk4_measured_order(bcn2):
    rng = np.random.default_rng(5)
    p0 = random_phase_point(bcn2, rng)
    order = convergence_order(bcn2, p0, [1e-2, 5e-3, 2.5e-3], 1.0)
    assert 3.7 <= order <= 4.3


def test_adaptive_scheme(bcn2):
    rng = np.random.default_rng(7)
    p0 = random_phase_point(bcn2, rng)
    traj = integrate(bcn2, p0, 1e-2, 100, scheme="rk4-adaptive", tol=1e-10)
    assert not traj.truncated
    assert abs(float(traj.times[-1]) - 1.0) < 1e-9
    ch = conserved_channels(bcn2, traj)
    assert float(ch["H_drift"].max()) < 1e-7


def test_singularity_truncates(dn2):
    p0 = {
        "x1": 0.0,
        "x2": 0.0,
        "X1": 0.5,
        "X2": 0.0,
        "H": 0.1,
        "F": 1.0 + 1e-13,
        "E": -0.3,
    }
    traj = integrate(dn2, p0, 1e-3, 100)
    assert traj.truncated
    assert "threshold" in traj.error or "overflow" in traj.error


# ---------------------------------------------------------------------------
# diagnostics


def test_zero_curvature_residual_machine_precision(bcn2):
    rng = np.random.default_rng(2)
    p0 = random_phase_point(bcn2, rng)
    traj = integrate(bcn2, p0, 1e-3, 500, store_every=5)
    ch = zero_curvature_residual(bcn2, traj)
    assert float(ch["zc_residual"].max()) <= 1e-12
    assert float(ch["boundary_residual"].max()) <= 1e-12


def test_zero_curvature_mu_independent(bcn2):
    # the residual is polynomial in mu; its size must not depend on the
    # sample point beyond rounding
    rng = np.random.default_rng(2)
    p0 = random_phase_point(bcn2, rng)
    traj = integrate(bcn2, p0, 1e-3, 50)
    peaks = []
    for mu_v in (0.3, 0.7, 1.1, 1.9, 2.3):
        ch = zero_curvature_residual(bcn2, traj, (mu_v,))
        peaks.append(float(ch["zc_residual"].max()))
    assert max(peaks) - min(peaks) <= 1e-12


def test_dn_conservation_channels(dn2):
    rng = np.random.default_rng(0)
    p0 = random_phase_point(dn2, rng, amplitude=0.2)
    traj = integrate(dn2, p0, 5e-4, 4000)
    ch = conserved_channels(dn2, traj)
    assert float(ch["casimir_drift"].max()) <= 1e-10
    assert float(ch["f_minus_ex1_drift"].max()) <= 1e-10
    x0 = dn_x0_relation_residual(dn2, traj)
    assert float(x0.max()) <= 1e-8


def test_dn_boundary_flow_residual_small(dn2):
    # dk-/dT matches the extracted boundary flow matrices pointwise
    rng = np.random.default_rng(1)
    p0 = random_phase_point(dn2, rng, amplitude=0.2)
    traj = integrate(dn2, p0, 1e-3, 100)
    ch = zero_curvature_residual(dn2, traj)
    assert float(ch["boundary_residual"].max()) <= 1e-12


def test_hk_channels_present(bcn2):
    rng = np.random.default_rng(3)
    p0 = random_phase_point(bcn2, rng)
    traj = integrate(bcn2, p0, 1e-3, 100)
    ch = conserved_channels(bcn2, traj)
    assert "H_drift" in ch
    assert any(k.startswith("H") and k.endswith("_drift") and k != "H_drift" for k in ch)


def test_svg_output(tmp_path, bcn2):
    rng = np.random.default_rng(0)
    p0 = random_phase_point(bcn2, rng)
    traj = integrate(bcn2, p0, 1e-3, 50)
    conserved_channels(bcn2, traj)
    path = tmp_path / "plot.svg"
    write_svg(traj, str(path))
    text = path.read_text()
    assert text.startswith("<svg") and "<polyline" in text


def test_ring_values_layout(dn2):
    p = {
        "x1": 0.0, "x2": 1.0, "X1": 2.0, "X2": 3.0,
        "E": 4.0, "F": 5.0, "H": 6.0,
    }
    v = ring_values(dn2, p, mu_value=9.0)
    ring = dn2.ring
    assert v[ring.slot("u1")] == 1.0
    assert v[ring.slot("u2")] == math.exp(1.0)
    assert v[ring.slot("mu")] == 9.0
    assert v[ring.slot("c0")] == dn2.params["c0"]
