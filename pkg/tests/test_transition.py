import math

import numpy as np
import pytest

from disham.dynamics import ArcKind, IntegratorConfig, ParamKind
from disham.errors import (
    DegenerateDiscontinuity,
    GrazingContact,
    NoCrossing,
    UnboundedCharacteristic,
)
from disham.geometry import (
    ExtendedPhasePoint,
    MetricSpace,
    configuration_surface,
    eval_A,
    momentum_split,
    normalize_surface,
)
from disham.hamiltonian import (
    ConstantPotential,
    DiscontinuityStack,
    DiscontinuousPair,
    FunctionHamiltonian,
    HarmonicPotential,
    NaturalHamiltonian,
    constant_step_pair,
)
from disham.transition import (
    DecisiveBranch,
    ImpactState,
    OutcomeKind,
    cascade,
    decisive_points,
    jump_arc,
    make_impact,
    prolong_modified,
    prolong_vinogradov,
    simulate_limit_scenario,
    step_closed_form,
)

from conftest import free_start

SPACE1 = MetricSpace.euclidean(1)
B1 = np.array([1.0])


def impact(pair, p0, q0=(0.0,), side="MINUS"):
    return make_impact(pair, np.array(q0, float), np.array(p0, float), 0.0, side)


# -- jump characteristics ----------------------------------------------------


@pytest.mark.parametrize(
    "U_minus,U_plus,p0,kind,s1,p1",
    [
        (0.0, 1.0, 1.0, OutcomeKind.REFLECTED, 2.0, -1.0),
        (0.0, 1.5, 2.0, OutcomeKind.TRANSMITTED, 1.0, 1.0),
        (1.0, 0.0, 1.0, OutcomeKind.TRANSMITTED, math.sqrt(3.0) - 1.0, math.sqrt(3.0)),
    ],
)
def test_jump_arc_examples(step, U_minus, U_plus, p0, kind, s1, p1):
    pair = step(U_minus, U_plus)
    imp = impact(pair, [p0])
    out = jump_arc(pair, imp)
    assert out.kind is kind
    assert out.s1 == pytest.approx(s1, abs=1e-9)
    assert out.terminal.p[0] == pytest.approx(p1, abs=1e-9)
    assert out.terminal.t == imp.x.t and out.terminal.e == imp.x.e
    assert out.jump_arc.kind is ArcKind.JUMP
    assert out.jump_arc.parameterization is ParamKind.S_PARAM
    assert out.exit_side == ("MINUS" if kind is OutcomeKind.REFLECTED else "PLUS")


def test_jump_arc_stays_on_surface():
    space = MetricSpace([[2.0, 0.3], [0.3, 1.0]])
    surf = normalize_surface([0.0, 0.0], [0.0, 0.0], [0.2, 0.1], [1.0, 0.4], space)
    h_minus = NaturalHamiltonian(space, 1.0, HarmonicPotential(0.3, [0.0, 0.0], space))
    h_plus = NaturalHamiltonian(space, 1.0, ConstantPotential(0.8))
    pair = DiscontinuousPair(h_minus, h_plus, surf)
    q, p = np.array([0.0, 0.0]), np.array([1.0, 1.0])
    p = p - eval_A(surf, ExtendedPhasePoint(q, p)) * surf.shift_p / space.norm2_vector(surf.a)
    imp = make_impact(pair, q, p)
    out = jump_arc(pair, imp)
    for row in out.jump_arc.states:
        assert abs(eval_A(surf, ExtendedPhasePoint.from_array(row))) < 1e-12
    assert out.kind in (OutcomeKind.REFLECTED, OutcomeKind.TRANSMITTED)
    H_exit = pair.side(out.exit_side)
    assert H_exit.value(out.terminal.q, out.terminal.p) == pytest.approx(imp.x.e, abs=1e-10)


@pytest.mark.parametrize("nu", [0.5, 1.0, 2.0, 4.0])
@pytest.mark.parametrize("dU", [-2.0, -1.0, -0.25, 0.25, 1.0, 3.0])
def test_jump_arc_agrees_with_closed_form(step, nu, dU):
    if abs(nu * nu / 2 - dU) < 1e-6:
        pytest.skip("grazing band")
    pair = step(0.0, dU)
    out = jump_arc(pair, impact(pair, [nu]))
    ref = step_closed_form(0.0, dU, [nu], B1, 1.0, SPACE1)
    assert out.kind is ref.kind
    assert out.s1 == pytest.approx(ref.s1, abs=1e-9)
    assert out.terminal.p[0] == pytest.approx(ref.terminal.p[0], abs=1e-9)


def test_jump_arc_grazing(step):
    pair = step(0.0, 0.5)
    out = jump_arc(pair, impact(pair, [1.0]))
    assert out.kind is OutcomeKind.GRAZING and out.exit_side is None


def test_jump_arc_degenerate(step):
    pair = step(0.3, 0.3)
    with pytest.raises(DegenerateDiscontinuity):
        jump_arc(pair, impact(pair, [1.0]))


def test_jump_arc_unbounded():
    # H+ stays above e along the characteristic
    space = SPACE1
    surf = configuration_surface([0.0], [1.0], space)
    h_minus = NaturalHamiltonian(space, 1.0, ConstantPotential(0.0))
    h_plus = FunctionHamiltonian(
        space, lambda q, p: 1.0, lambda q, p: np.zeros(1), lambda q, p: np.zeros(1)
    )
    pair = DiscontinuousPair(h_minus, h_plus, surf)
    imp = impact(pair, [1e-2])
    # H- returns to e only at s = 2 nu, beyond s_max
    with pytest.raises(UnboundedCharacteristic) as info:
        jump_arc(pair, imp, s_max=1e-3)
    assert info.value.partial is not None


def test_impact_validation(step):
    pair = step(0.0, 1.0)
    with pytest.raises(ValueError):
        ImpactState(ExtendedPhasePoint([0.5], [1.0], 0.0, 0.5)).validate(pair)
    with pytest.raises(ValueError):
        ImpactState(ExtendedPhasePoint([0.0], [1.0], 0.0, 0.6)).validate(pair)
    with pytest.raises(ValueError):
        ImpactState(ExtendedPhasePoint([0.0], [-1.0], 0.0, 0.5)).validate(pair)
    with pytest.raises(GrazingContact):
        ImpactState(ExtendedPhasePoint([0.0], [0.0], 0.0, 0.0)).validate(pair)
    with pytest.raises(ValueError):
        ImpactState(ExtendedPhasePoint([0.0], [1.0], 0.0, 0.5), "UP")


def test_impact_from_plus_side(step):
    pair = step(0.0, 1.0)
    imp = impact(pair, [-2.0], side="PLUS")
    out = jump_arc(pair, imp)
    assert out.kind is OutcomeKind.TRANSMITTED and out.exit_side == "MINUS"
    assert out.terminal.p[0] == pytest.approx(-math.sqrt(6.0), abs=1e-9)


# -- closed forms ------------------------------------------------------------


def test_closed_form_examples():
    out = step_closed_form(0.0, 1.0, [1.0], B1, 1.0, SPACE1)
    assert out.kind is OutcomeKind.REFLECTED and out.terminal.p[0] == -1.0 and out.s1 == 2.0
    out = step_closed_form(0.0, 1.5, [2.0], B1, 1.0, SPACE1)
    assert out.kind is OutcomeKind.TRANSMITTED
    assert out.terminal.p[0] == pytest.approx(1.0, abs=1e-12)
    out = step_closed_form(0.0, 1.0, [2.0], B1, 1.0, SPACE1)
    assert out.terminal.p[0] == pytest.approx(1.41421356, abs=1e-8)
    out = step_closed_form(1.0, 0.0, [1.0], B1, 1.0, SPACE1)
    assert out.terminal.p[0] == pytest.approx(1.73205081, abs=1e-8)
    out = step_closed_form(0.0, 0.0, [1.0], B1, 1.0, SPACE1)
    assert out.kind is OutcomeKind.TRANSMITTED and out.s1 == 0.0


def test_closed_form_grazing_and_errors():
    out = step_closed_form(0.0, 0.5, [1.0], B1, 1.0, SPACE1)
    assert out.kind is OutcomeKind.GRAZING and out.exit_side is None
    with pytest.raises(ValueError):
        step_closed_form(0.0, 1.0, [-1.0], B1, 1.0, SPACE1)


def test_closed_form_conserves_tangential_momentum():
    space = MetricSpace.euclidean(2)
    b = np.array([1.0, 0.0])
    p0 = np.array([2.0, 0.7])
    for U_plus in (1.5, 3.0, -1.0):
        out = step_closed_form(0.0, U_plus, p0, b, 1.0, space)
        _, before = momentum_split(p0, b, space)
        _, after = momentum_split(out.terminal.p, b, space)
        assert np.max(np.abs(after - before)) <= 1e-12
        assert out.terminal.t == 0.0 and out.terminal.e == pytest.approx(0.5 * p0 @ p0)


def test_closed_form_with_metric_and_mass():
    space = MetricSpace([[4.0]])
    b = np.array([2.0])  # <b, g^-1 b> = 1
    p0 = np.array([6.0])  # nu = 3
    out = step_closed_form(0.0, 1.0, p0, b, 2.0, space)
    # normal energy nu^2/2m = 2.25 > 1: normal momentum sqrt(9 - 4) = sqrt(5)
    assert out.kind is OutcomeKind.TRANSMITTED
    nu1, _ = momentum_split(out.terminal.p, b, space)
    assert nu1 == pytest.approx(math.sqrt(5.0), abs=1e-12)


def test_cascade_examples():
    outcomes, final = cascade([0.0, 1.0, 0.0], [2.0], B1, 1.0, SPACE1)
    assert [o.kind for o in outcomes] == [OutcomeKind.TRANSMITTED] * 2
    assert final.p[0] == pytest.approx(2.0, abs=1e-9)
    outcomes, final = cascade([0.0, 1.0, 0.0], [1.0], B1, 1.0, SPACE1)
    assert outcomes[0].kind is OutcomeKind.REFLECTED and len(outcomes) == 1
    assert final.p[0] == pytest.approx(-1.0, abs=1e-9)
    single, final = cascade([0.0, 1.0], [2.0], B1, 1.0, SPACE1)
    ref = step_closed_form(0.0, 1.0, [2.0], B1, 1.0, SPACE1)
    assert single[0].kind is ref.kind and final.p[0] == ref.terminal.p[0]


def test_cascade_depends_only_on_end_levels():
    _, a = cascade([0.0, 0.5, 1.0, 0.2], [3.0], B1, 1.0, SPACE1)
    _, b = cascade([0.0, 0.2], [3.0], B1, 1.0, SPACE1)
    assert abs(a.p[0] - b.p[0]) < 1e-9
    assert a.p[0] == pytest.approx(math.sqrt(9.0 - 0.4), abs=1e-9)


def test_cascade_reflection_after_partial_transmission():
    # passes 0 -> 0.5, bounces off 2, comes back out through 0.5 -> 0
    outcomes, final = cascade([0.0, 0.5, 2.0], [1.5], B1, 1.0, SPACE1)
    kinds = [o.kind for o in outcomes]
    assert kinds == [OutcomeKind.TRANSMITTED, OutcomeKind.REFLECTED, OutcomeKind.TRANSMITTED]
    assert final.p[0] == pytest.approx(-1.5, abs=1e-12)


def test_cascade_grazing_carries_partial():
    with pytest.raises(GrazingContact) as info:
        cascade([0.0, 0.5, 1.0], [math.sqrt(2.0)], B1, 1.0, SPACE1)
    assert len(info.value.partial) == 2
    with pytest.raises(ValueError):
        cascade([0.0], [1.0], B1, 1.0, SPACE1)


# -- decisive points ---------------------------------------------------------


def branches(points):
    return sorted((d.branch.value, round(float(d.point.p[0]), 9)) for d in points)


def test_decisive_points_examples(step):
    pair = step(0.0, 0.0)
    assert branches(decisive_points(pair, impact(pair, [1.0]))) == [
        ("IN_POINT_H_MINUS", -1.0),
        ("IN_POINT_H_PLUS", 1.0),
    ]
    pair = step(0.0, 1.0)
    assert branches(decisive_points(pair, impact(pair, [1.0]))) == [("IN_POINT_H_MINUS", -1.0)]
    pair = step(0.0, 1.5)
    assert branches(decisive_points(pair, impact(pair, [2.0]))) == [
        ("IN_POINT_H_MINUS", -2.0),
        ("IN_POINT_H_PLUS", 1.0),
    ]


def test_decisive_points_energy_match(step):
    pair = step(0.0, 1.5)
    imp = impact(pair, [2.0])
    for dp in decisive_points(pair, imp):
        H = pair.h_minus if dp.branch is DecisiveBranch.IN_POINT_H_MINUS else pair.h_plus
        assert H.value(dp.point.q, dp.point.p) == pytest.approx(imp.x.e, abs=1e-12)
        assert dp.point.p[0] == pytest.approx(imp.x.p[0] + dp.s, abs=1e-12)


def test_decisive_tangent_point_at_graze(step):
    pair = step(0.0, 0.5)
    pts = decisive_points(pair, impact(pair, [1.0]))
    plus = [d for d in pts if d.branch is DecisiveBranch.IN_POINT_H_PLUS]
    assert len(plus) == 1 and abs(plus[0].point.p[0]) < 1e-12


def test_decisive_points_unsupported(line):
    space, surf = line
    h = NaturalHamiltonian(space, 1.0, HarmonicPotential(1.0, [0.0], space))
    pair = DiscontinuousPair(h, NaturalHamiltonian(space, 1.0, ConstantPotential(2.0)), surf)
    with pytest.raises(ValueError):
        decisive_points(pair, impact(pair, [1.0]))


def test_vinogradov_prolongations(step):
    pair = step(0.0, 0.0)
    trajs = prolong_vinogradov(pair, impact(pair, [1.0]), 1.0)
    assert len(trajs) == 2
    ends = sorted(t.final_state.p[0] for t in trajs)
    assert ends == pytest.approx([-1.0, 1.0])
    for t in trajs:
        t.check_continuity()
    pair = step(0.0, 1.0)
    trajs = prolong_vinogradov(pair, impact(pair, [1.0]), 1.0)
    assert len(trajs) == 1 and trajs[0].final_state.q[0] == pytest.approx(-1.0)


def test_vinogradov_split(step):
    pair = step(0.0, 1.5)
    trajs = prolong_vinogradov(pair, impact(pair, [2.0]), 1.0)
    kinds = sorted(t.arcs[-1].kind.value for t in trajs)
    assert kinds == ["SMOOTH_MINUS", "SMOOTH_PLUS"]


def test_vinogradov_tangent_prolongation_stays_on_surface(step):
    pair = step(0.0, 0.5)
    trajs = prolong_vinogradov(pair, impact(pair, [1.0]), 2.0)
    tangent = [t for t in trajs if t.branch == "IN_POINT_H_PLUS"][0]
    assert np.max(np.abs(tangent.arcs[-1].q)) < 1e-12


@pytest.mark.parametrize(
    "U_plus,p0,branch,p_end",
    [(0.0, 1.0, "IN_POINT_H_PLUS", 1.0), (1.5, 2.0, "IN_POINT_H_PLUS", 1.0), (1.0, 1.0, "IN_POINT_H_MINUS", -1.0)],
)
def test_prolong_modified(step, U_plus, p0, branch, p_end):
    pair = step(0.0, U_plus)
    imp = impact(pair, [p0])
    traj = prolong_modified(pair, imp, 1.0)
    assert traj.branch == branch
    assert traj.final_state.p[0] == pytest.approx(p_end, abs=1e-9)
    members = [
        d for d in decisive_points(pair, imp) if d.branch.value == branch and abs(d.point.p[0] - p_end) <= 1e-9
    ]
    assert len(members) == 1
    traj.check_continuity()
    if U_plus == 0.0:
        assert ArcKind.JUMP not in traj.kinds


def test_prolong_modified_grazing(step):
    pair = step(0.0, 0.5)
    with pytest.raises(GrazingContact):
        prolong_modified(pair, impact(pair, [1.0]), 1.0)


# -- limit scenarios ---------------------------------------------------------


def test_limit_reflection(step):
    traj = simulate_limit_scenario(step(0.0, 1.0), free_start([-1.0], [1.0]), 3.0)
    assert traj.kinds == [ArcKind.SMOOTH_MINUS, ArcKind.JUMP, ArcKind.SMOOTH_MINUS]
    assert traj.final_state.p[0] == pytest.approx(-1.0, abs=1e-9)
    assert traj.final_state.q[0] == pytest.approx(-2.0, abs=1e-9)
    assert traj.junction_mismatch() <= 1e-9


def test_limit_transmission(step):
    traj = simulate_limit_scenario(step(0.0, 1.5), free_start([-1.0], [2.0]), 3.0)
    assert traj.kinds == [ArcKind.SMOOTH_MINUS, ArcKind.JUMP, ArcKind.SMOOTH_PLUS]
    assert traj.final_state.p[0] == pytest.approx(1.0, abs=1e-9)


def test_limit_two_layer_barrier_has_four_components(line):
    space, surf = line
    hs = [NaturalHamiltonian(space, 1.0, ConstantPotential(u)) for u in (0.0, 1.0, 0.0)]
    traj = simulate_limit_scenario(DiscontinuityStack(hs, surf), free_start([-1.0], [2.0]), 3.0)
    assert traj.kinds == [ArcKind.SMOOTH_MINUS, ArcKind.JUMP, ArcKind.JUMP, ArcKind.SMOOTH_PLUS]
    assert traj.final_state.p[0] == pytest.approx(2.0, abs=1e-9)
    # the middle component starts at the intermediate momentum sqrt(2)
    assert traj.arcs[2].first.p[0] == pytest.approx(math.sqrt(2.0), abs=1e-9)


def test_limit_starting_on_plus_side(step):
    pair = step(0.0, 1.0)
    traj = simulate_limit_scenario(pair, free_start([1.0], [-1.0], level=1.0), 3.0)
    assert traj.kinds[-1] is ArcKind.SMOOTH_MINUS
    # energy 1.5 on the plus side becomes all kinetic below the step
    assert traj.final_state.p[0] == pytest.approx(-math.sqrt(3.0), abs=1e-9)


def test_limit_errors_carry_partial(step):
    with pytest.raises(NoCrossing) as info:
        simulate_limit_scenario(step(0.0, 1.0), free_start([-1.0], [-1.0]), 1.0)
    assert info.value.partial is not None
    with pytest.raises(GrazingContact) as info:
        simulate_limit_scenario(step(0.0, 0.5), free_start([-1.0], [1.0]), 3.0)
    assert ArcKind.JUMP in info.value.partial.kinds
    with pytest.raises(ValueError):
        simulate_limit_scenario(step(0.0, 0.5), free_start([0.0], [1.0]), 3.0)


def test_limit_without_crossing_allowed(step):
    traj = simulate_limit_scenario(
        step(0.0, 1.0), free_start([-1.0], [-1.0]), 1.0, require_crossing=False
    )
    assert traj.meta["impacts"] == []


def test_limit_two_dimensional_oblique():
    space = MetricSpace.euclidean(2)
    surf = configuration_surface([0.0, 0.0], [1.0, 0.0], space)
    pair = constant_step_pair(space, 1.0, 0.0, 1.5, surf)
    x0 = free_start([-1.0, 0.0], [2.0, 0.7])
    traj = simulate_limit_scenario(pair, x0, 2.0, IntegratorConfig())
    np.testing.assert_allclose(traj.final_state.p, [1.0, 0.7], atol=1e-9)
