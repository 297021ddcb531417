from __future__ import annotations

import json
import math

import numpy as np
import pytest

from g2coclosed.analytic import bryant_salamon, cone_family
from g2coclosed.ode import CoclosedSystem, solve
from g2coclosed.scalar import T, odd_polynomial
from g2coclosed.exterior import d, mask_indices
from g2coclosed.structures import ProfileSet, build_g2
from g2coclosed.verify import (
    FLUX_MONOMIALS,
    SCHEMA_VERSION,
    CheckResult,
    boundary_report,
    closed_residual,
    coclosed_residual,
    compact_obstruction_demo,
    continuity_ratio,
    default_grid,
    parity_fit,
    run_checks,
    taylor_relations,
    torsion_report,
    verify_profiles,
    verify_solution,
)
from oracles import dense_d


def test_default_grid_shape():
    t = default_grid(10.0)
    assert t[0] > 0 and t[-1] == pytest.approx(10.0)
    assert np.all(np.diff(t) > 0)
    assert 1500 < t.size < 1700


def test_coclosed_residual_of_solution_and_negative_control():
    sol = solve(CoclosedSystem.from_odd_poly([[0.5, 0.1], [0.5, -0.01], [0.5]], 1.0), t_max=5.0)
    t = default_grid(5.0)
    p = sol.profiles()
    assert coclosed_residual(build_g2(p), t) <= 1e-7
    assert coclosed_residual(build_g2(cone_family(1.0).scaled_B(1.1, (0,))), t) >= 1e-2


def test_boundary_cone_passes():
    rep = boundary_report(cone_family(1.0))
    assert rep.passed, [c for c in rep.checks if not c.passed]
    assert rep.A[0][1] == pytest.approx(0.5)
    assert rep.B[0][0] == pytest.approx(1.0)


def test_boundary_wrong_slope_fails():
    p = cone_family(1.0)
    bad = ProfileSet((1.0 * T, p.A[1], p.A[2]), p.B, p.b0)
    rep = boundary_report(bad)
    assert not rep["A_slope"].passed
    assert rep["A_odd"].passed


def test_boundary_even_parity_violation_fails():
    p = cone_family(1.0)
    bad = ProfileSet(p.A, (p.B[0] + 0.01 * T, p.B[1], p.B[2]), p.b0)
    rep = boundary_report(bad)
    assert not rep["B_even"].passed


def test_boundary_rejects_low_degree_and_sparse_samples():
    with pytest.raises(ValueError, match="degree"):
        boundary_report(cone_family(1.0), degree=3)
    with pytest.raises(ValueError, match="insufficient samples"):
        boundary_report(cone_family(1.0), samples=10)


def test_taylor_examples():
    sol = solve(CoclosedSystem.from_odd_poly([[0.5, 0.1], [0.5, -0.05], [0.5, 0.0]], 1.0), t_max=0.2)
    d4, b2 = taylor_relations(sol)
    assert d4.passed and d4.residual == 0.0
    assert d4.details["d4"] == pytest.approx([0.0125, 0.0875, 0.0625], abs=1e-15)
    assert b2.passed
    assert b2.details["expected"] == pytest.approx(0.075)
    assert b2.details["fitted"] == pytest.approx([0.075] * 3, abs=1e-6)


def test_taylor_cone():
    sol = solve(CoclosedSystem.from_odd_poly([[0.5]] * 3, 2.0), t_max=0.2)
    d4, _ = taylor_relations(sol)
    assert d4.details["d4"] == [0.0625] * 3


def test_parity_fit_small_leak():
    sol = solve(CoclosedSystem.from_odd_poly([[0.5, 0.03, -0.001]] * 2 + [[0.5, 0.12]], -0.5), t_max=0.2)
    assert parity_fit(sol).passed


def test_tau0_vanishes_for_arbitrary_profiles():
    # not a solution: tau0 = 0 holds for the whole ansatz
    A = (odd_polynomial([0.5, 0.2]), odd_polynomial([0.5, -0.03]), 0.7 * T)
    B = (1.0 + 0.3 * T * T, 1.2 + 0 * T, 0.9 + 0.5 * T)
    g = build_g2(ProfileSet(A, B, 1.0))
    rep = torsion_report(g, np.linspace(0.05, 3.0, 100))
    assert rep.tau0 <= 1e-10
    assert rep.H is None  # not coclosed: tau3 shortcut refused
    assert [c.name for c in rep.checks] == ["tau0"]


def test_torsion_bryant_salamon():
    bs = bryant_salamon()
    p = bs.profiles()
    t = np.geomspace(1e-2, 100.0, 400)
    rep = torsion_report(build_g2(p), t, profiles=p, coclosed_tol=1e-6)
    assert rep.tau0 <= 1e-10
    assert rep.dH_max <= 1e-6
    assert rep.formula_bracket_max <= 1e-6


def test_flux_orbital_support_for_cone():
    p = cone_family(1.0)
    t = np.linspace(0.1, 4.0, 80)
    rep = torsion_report(build_g2(p), t, profiles=p)
    assert rep.dH_orbital_support == frozenset(m for _, m in FLUX_MONOMIALS)
    assert rep.checks[-1].name == "flux_support" and rep.checks[-1].passed
    # H depends on t, so dH also carries dt-components
    assert rep.dH_support - rep.dH_orbital_support
    assert all(m & 1 for m in rep.dH_support - rep.dH_orbital_support)
    assert math.isfinite(rep.formula_factor)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_dH_matches_dense_oracle_including_dt_part(t):
    g = build_g2(cone_family(1.0))
    H = -g.star(d(g.phi))

    def sample(x):
        return {mask_indices(m): float(v) for m, v in H.evaluate(np.array(x)).items()}

    ref = dense_d(sample, t)
    got = {mask_indices(m): float(v) for m, v in d(H).evaluate(np.array(t)).items()}
    for k in set(ref) | set(got):
        assert got.get(k, 0.0) == pytest.approx(ref.get(k, 0.0), abs=1e-8)
    assert any(0 in k and abs(v) > 0.1 for k, v in ref.items())


def test_flux_monomials_are_distinct_4_forms():
    masks = [m for _, m in FLUX_MONOMIALS]
    assert len(set(masks)) == 3
    assert all(bin(m).count("1") == 4 and not m & 1 for m in masks)


def test_compact_demo_default():
    rep = compact_obstruction_demo()
    assert rep.passed
    assert rep.verdict.startswith("no compact extension")
    assert rep.sumD_end > rep.sumD_half > 0
    assert min(rep.growth) >= 10
    assert list(rep.B_end) == sorted(rep.B_end)


def test_compact_demo_needs_finite_interval():
    with pytest.raises(ValueError, match="finite"):
        compact_obstruction_demo(CoclosedSystem.from_odd_poly([[0.5]] * 3, 1.0))


def test_continuity_linear_scaling():
    sys = CoclosedSystem.from_odd_poly([[0.5, 0.1], [0.5], [0.5, -0.02]], 1.0)
    d1, d2, ratio = continuity_ratio(sys)
    assert d1 > 0 and d2 > 0
    assert 0.05 <= ratio <= 0.2


def test_closed_residual_distinguishes_torsion():
    t = np.linspace(0.1, 3.0, 50)
    nk = ProfileSet((T / 3,) * 3, (T / math.sqrt(3),) * 3, 1.0)
    assert closed_residual(build_g2(nk), t) < 1e-13
    assert closed_residual(build_g2(cone_family(1.0)), t) > 1e-2


def test_run_checks_order_and_crash_isolation():
    def boom():
        raise RuntimeError("x")

    jobs = [
        ("a", lambda: CheckResult("a", "x", True, 0.0, 1.0)),
        ("b", boom),
        ("c", lambda: [CheckResult("c1", "x", True, 0.0, 1.0), CheckResult("c2", "x", True, 0.0, 1.0)]),
    ]
    for threads in (1, 4):
        rep = run_checks(jobs, threads=threads)
        assert rep.names() == ["a", "b", "c1", "c2"]
        assert not rep.passed and not rep["b"].passed
        assert "RuntimeError" in rep["b"].details["error"]


def test_report_json_schema_and_determinism():
    p = cone_family(1.0)
    r1 = verify_profiles(p, t_max=2.0, threads=1)
    r2 = verify_profiles(p, t_max=2.0, threads=4)
    assert r1.to_json() == r2.to_json()
    doc = json.loads(r1.to_json())
    assert doc["schema_version"] == SCHEMA_VERSION == 1
    for c in doc["checks"]:
        assert {"name", "anchor", "status", "residual", "tolerance", "grid"} <= set(c)
        assert c["anchor"]
    assert r1.passed


def test_verify_solution_full_suite():
    sol = solve(CoclosedSystem.from_odd_poly([[0.5, 0.05], [0.5, 0.02], [0.5, -0.01]], -1.0), t_max=3.0)
    rep = verify_solution(sol)
    assert rep.passed, [c.name for c in rep.checks if not c.passed]
    for name in ("coclosed", "positivity", "consistency", "sumD_increasing", "parity_D", "taylor_d4", "taylor_b2", "tau0"):
        assert rep[name].passed
