import math

import numpy as np
import pytest

from plsec.design import (
    INFEASIBLE,
    SOLVED,
    UNCONSTRAINED,
    DesignTarget,
    solve_d_th,
    solve_pj_th,
    solve_ps_th,
    threshold_d_o,
    threshold_d_sat,
    threshold_r_sat,
)
from plsec.model import AttackMode, reference_defaults
from plsec.sop import sop_asym_eav, sop_asym_jam, sop_exact_jam, sop_ineffective


def test_d_o_reference(ref):
    assert threshold_d_o(ref) == pytest.approx(100.0, rel=1e-9)


def test_d_o_limits(ref):
    assert threshold_d_o(ref.replace(c_st=60.0)) < 1e-3 * threshold_d_o(ref)
    assert threshold_d_o(ref.replace(c_st=0.0)) == math.inf
    assert threshold_d_o(ref.replace(p_s=0.2)) == pytest.approx(100.0 * 2 ** (1 / 3), rel=1e-12)


def test_r_sat_reference():
    assert threshold_r_sat(reference_defaults(D=60.0)) == pytest.approx(60.0 * 2 ** (1 / 3), rel=1e-12)


def test_d_sat_algebra():
    p = reference_defaults(D=50.0, r=50.0)
    assert threshold_d_sat(p) == pytest.approx(50.0 * 2 ** (-1 / 3), rel=1e-12)


@pytest.mark.parametrize("r", [30.0, 60.0, 90.0])
def test_r_sat_inverts_d_sat(r):
    p = reference_defaults(r=r, a_sa=2e-5)
    d_sat = threshold_d_sat(p)
    assert threshold_r_sat(p.replace(D=d_sat)) == pytest.approx(r, rel=1e-12)


def test_branch_flips_at_r_sat():
    p = reference_defaults(R=150.0, D=60.0)
    r_sat = threshold_r_sat(p)
    above = [sop_asym_eav(p.replace(r=r_sat * f)).value for f in (1.0 + 1e-9, 1.3, 1.9)]
    assert max(above) - min(above) < 1e-9
    below = sop_asym_eav(p.replace(r=0.9 * r_sat)).value
    assert below < above[0] - 1e-4


def test_d_o_zeroes_ineffective_outage(ref):
    d_o = threshold_d_o(ref)
    for D in (0.3 * d_o, 0.9 * d_o, d_o):
        assert sop_ineffective(ref.replace(D=D)) == 0.0
    assert sop_ineffective(ref.replace(D=1.05 * d_o)) > 0.0


def test_target_validation():
    with pytest.raises(ValueError):
        DesignTarget(0.0)
    with pytest.raises(ValueError):
        DesignTarget(0.5, bounds=(2.0, 1.0))
    assert DesignTarget(0.5, "jam").mode is AttackMode.JAM


@pytest.mark.parametrize("mode", list(AttackMode))
@pytest.mark.parametrize("p_th", [0.02, 0.1, 0.3])
def test_d_th_round_trip(ref, mode, p_th):
    res = solve_d_th(ref, DesignTarget(p_th, mode))
    assert res.status == SOLVED and res.feasible
    sop = sop_asym_eav if mode is AttackMode.EAVESDROP else sop_asym_jam
    assert sop(ref.replace(D=res.value)).value == pytest.approx(p_th, abs=1e-6)


def test_d_th_unconstrained(ref):
    weak = ref.replace(p_j=1e-6)
    res = solve_d_th(weak, DesignTarget(0.99, AttackMode.JAM))
    assert res.status == UNCONSTRAINED and res.value == 2 * ref.R


def test_d_th_infeasible_flag(ref):
    # the outage floor at the lower bound exceeds the target
    res = solve_d_th(ref, DesignTarget(1e-3, AttackMode.JAM, bounds=(60.0, 150.0)))
    assert not res.feasible and res.status == INFEASIBLE


@pytest.mark.parametrize("mode", list(AttackMode))
def test_d_th_monotone_in_target(ref, mode):
    vals = [solve_d_th(ref, DesignTarget(p, mode)).value for p in np.linspace(0.01, 0.6, 12)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_d_th_linear_in_r_under_jamming():
    ratios = []
    for R in (60.0, 100.0, 150.0, 250.0):
        p = reference_defaults(R=R, r=R / 2, p_s=10.0)
        ratios.append(solve_d_th(p, DesignTarget(0.05, AttackMode.JAM)).value / R)
    assert max(ratios) / min(ratios) - 1.0 < 1e-8


def test_d_th_exact_method(ref):
    res = solve_d_th(ref, DesignTarget(0.3, AttackMode.JAM), method="exact")
    assert sop_exact_jam(ref.replace(D=res.value)).value == pytest.approx(0.3, abs=1e-6)


def test_power_round_trips(ref):
    t = DesignTarget(0.1, AttackMode.JAM)
    ps = solve_ps_th(ref, t)
    assert ps.status == SOLVED
    assert sop_asym_jam(ref.replace(p_s=ps.value)).value == pytest.approx(0.1, abs=1e-6)
    pj = solve_pj_th(ref, DesignTarget(0.3, AttackMode.JAM))
    assert sop_asym_jam(ref.replace(p_j=pj.value)).value == pytest.approx(0.3, abs=1e-6)


def test_pj_th_scales_with_ps(ref):
    t = DesignTarget(0.3, AttackMode.JAM)
    a = solve_pj_th(ref, t).value
    b = solve_pj_th(ref.replace(p_s=2 * ref.p_s), t).value
    assert b == pytest.approx(2 * a, rel=1e-8)


def test_ps_th_decreasing_in_target(ref):
    vals = [solve_ps_th(ref, DesignTarget(p, AttackMode.JAM)).value for p in (0.05, 0.1, 0.2, 0.4)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_power_solvers_need_jamming(ref):
    with pytest.raises(ValueError):
        solve_ps_th(ref, DesignTarget(0.1, AttackMode.EAVESDROP))


def test_power_infeasible_bracket(ref):
    res = solve_pj_th(ref, DesignTarget(0.01, AttackMode.JAM, bounds=(1e-9, 1e-6)))
    assert not res.feasible and res.status == INFEASIBLE
