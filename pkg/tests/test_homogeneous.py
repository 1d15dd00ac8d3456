import numpy as np
import pytest

from disham.errors import DegenerateDiscontinuity
from disham.geometry import ExtendedPhasePoint, MetricSpace, eval_A, normalize_surface
from disham.hamiltonian import (
    ConstantPotential,
    DiscontinuousPair,
    HarmonicPotential,
    NaturalHamiltonian,
    constant_step_pair,
)
from disham.homogeneous import (
    CharacteristicDirection,
    LimitRegionLabel,
    characteristic_direction,
    classify_limit_region,
    energy_level_function,
    generating_family_eval,
    is_dynamics_solution,
    orientation_contains,
    oriented_pairing,
)

E_DIR = CharacteristicDirection(np.zeros(1), np.zeros(1), 0.0, 1.0)


def on_shell(H, q, p, t=0.0):
    q, p = np.atleast_1d(np.asarray(q, float)), np.atleast_1d(np.asarray(p, float))
    return ExtendedPhasePoint(q, p, t, H.value(q, p))


def test_generating_family(line):
    space, _ = line
    H = NaturalHamiltonian(space, 1.0, ConstantPotential(1.0))
    x = on_shell(H, [0.3], [2.0])
    assert generating_family_eval(H, x, 4.0) == 0.0
    off = x.replace(e=x.e - 3.0)
    assert generating_family_eval(H, off, 2.0) == pytest.approx(6.0)
    assert generating_family_eval(H, off, 5.0) == pytest.approx(5.0 * generating_family_eval(H, off, 1.0))
    with pytest.raises(ValueError):
        generating_family_eval(H, x, 0.0)


def test_classification(step):
    pair = step(0.0, 1.0)
    q_left, q_on = np.array([-0.5]), np.array([0.0])
    p = np.array([1.0])
    assert classify_limit_region(pair, ExtendedPhasePoint(q_left, p, 0.0, 0.5)) is LimitRegionLabel.N_MINUS
    assert classify_limit_region(pair, ExtendedPhasePoint(-q_left, p, 0.0, 1.5)) is LimitRegionLabel.N_PLUS
    assert classify_limit_region(pair, ExtendedPhasePoint(q_on, p, 0.0, 1.0)) is LimitRegionLabel.M
    assert classify_limit_region(pair, ExtendedPhasePoint(q_on, p, 0.0, 0.5)) is LimitRegionLabel.M_MINUS_EDGE
    assert classify_limit_region(pair, ExtendedPhasePoint(q_on, p, 0.0, 1.5)) is LimitRegionLabel.M_PLUS_EDGE
    assert classify_limit_region(pair, ExtendedPhasePoint(q_on, p, 0.0, 3.0)) is LimitRegionLabel.OUTSIDE
    assert classify_limit_region(pair, ExtendedPhasePoint(q_left, p, 0.0, 0.7)) is LimitRegionLabel.OUTSIDE


def test_classification_labels_are_exclusive_at_tolerance(step):
    pair = step(0.0, 1e-10)  # band thinner than the tolerance
    x = ExtendedPhasePoint(np.zeros(1), np.array([1.0]), 0.0, 0.5 + 5e-11)
    assert classify_limit_region(pair, x) is LimitRegionLabel.M_MINUS_EDGE


def test_direction_on_N_minus_is_free_flight():
    space = MetricSpace([[4.0]])
    surf = normalize_surface([0.0], [0.0], [0.0], [1.0], space)
    pair = constant_step_pair(space, 2.0, 0.0, 1.0, surf)
    x = on_shell(pair.h_minus, [-1.0], [3.0])
    v = characteristic_direction(pair, LimitRegionLabel.N_MINUS, x)
    assert v.dq[0] == pytest.approx(3.0 / 4.0 / 2.0)
    assert v.dp[0] == 0.0 and v.dt == 1.0 and v.de == 0.0


@pytest.mark.parametrize("U_minus,U_plus,sigma", [(0.0, 1.0, 1.0), (1.0, 0.0, -1.0)])
def test_direction_on_M_follows_jump_sign(U_minus, U_plus, sigma):
    space = MetricSpace.euclidean(2)
    surf = normalize_surface([0.0, 0.0], [0.0, 0.0], [0.6, 0.0], [0.0, 0.8], space)
    pair = constant_step_pair(space, 1.0, U_minus, U_plus, surf)
    x = ExtendedPhasePoint(np.zeros(2), np.array([0.0, 1.0]), 0.0, 0.75)
    assert eval_A(surf, x) == 0.0
    v = characteristic_direction(pair, LimitRegionLabel.M, x)
    assert np.array_equal(v.dq, sigma * surf.a)
    assert np.array_equal(v.dp, -sigma * surf.b)
    assert v.dt == 0.0 and v.de == 0.0
    # the jump arc stays on the surface
    for s in np.linspace(0.0, 3.0, 7):
        moved = ExtendedPhasePoint(x.q + s * v.dq, x.p + s * v.dp, 0.0, 0.75)
        assert abs(eval_A(surf, moved)) < 1e-12


def test_direction_on_M_degenerate(step):
    pair = step(0.5, 0.5)
    x = ExtendedPhasePoint(np.zeros(1), np.ones(1), 0.0, 1.0)
    with pytest.raises(DegenerateDiscontinuity):
        characteristic_direction(pair, LimitRegionLabel.M, x)


def test_direction_needs_a_flow_region(step):
    x = ExtendedPhasePoint(np.zeros(1), np.ones(1), 0.0, 0.5)
    with pytest.raises(ValueError):
        characteristic_direction(step(0.0, 1.0), LimitRegionLabel.M_MINUS_EDGE, x)


def test_orientation_contains(line):
    space, _ = line
    H = NaturalHamiltonian(space, 1.0, HarmonicPotential(1.0, [0.0], space))
    F = energy_level_function(H)
    x = on_shell(H, [0.4], [0.3])
    assert orientation_contains(F, x, E_DIR)
    assert not orientation_contains(F, x, E_DIR.scaled(-1.0))
    tangent = CharacteristicDirection(H.grad_p(x.q, x.p), -H.grad_q(x.q, x.p), 1.0, 0.0)
    assert not orientation_contains(F, x, tangent)
    with pytest.raises(ValueError):
        orientation_contains(F, x.replace(e=x.e + 1.0), E_DIR)


def test_dynamics_solution_and_homogeneity(line):
    space, _ = line
    H = NaturalHamiltonian(space, 1.0, HarmonicPotential(1.0, [0.0], space))
    x = on_shell(H, [0.4], [0.3])
    v = CharacteristicDirection(H.grad_p(x.q, x.p), -H.grad_q(x.q, x.p), 1.0, 0.0)
    assert is_dynamics_solution(H, x, v)
    assert is_dynamics_solution(H, x, v.scaled(2.0))
    assert not is_dynamics_solution(H, x, v.scaled(-1.0))
    assert not is_dynamics_solution(H, x.replace(e=x.e + 0.1), v)
    wrong = CharacteristicDirection(v.dq, v.dp + 1e-3, 1.0, 0.0)
    assert not is_dynamics_solution(H, x, wrong)


def test_N_directions_are_dynamics_solutions_and_oriented():
    space = MetricSpace([[2.0, 0.5], [0.5, 1.0]])
    surf = normalize_surface(np.zeros(2), np.zeros(2), np.zeros(2), [1.0, 0.0], space)
    h_minus = NaturalHamiltonian(space, 1.5, HarmonicPotential(0.5, [1.0, 0.0], space))
    h_plus = NaturalHamiltonian(space, 1.5, ConstantPotential(2.0))
    pair = DiscontinuousPair(h_minus, h_plus, surf)
    rng = np.random.default_rng(3)
    orient = CharacteristicDirection(np.zeros(2), np.zeros(2), 0.0, 1.0)
    for _ in range(10):
        q, p = rng.normal(size=2), rng.normal(size=2)
        label = LimitRegionLabel.N_MINUS if eval_A(surf, ExtendedPhasePoint(q, p)) < 0 else LimitRegionLabel.N_PLUS
        H = pair.side("MINUS" if label is LimitRegionLabel.N_MINUS else "PLUS")
        x = on_shell(H, q, p)
        assert classify_limit_region(pair, x) is label
        v = characteristic_direction(pair, label, x)
        assert is_dynamics_solution(H, x, v)
        assert oriented_pairing(v, orient) > 0.0
        # tangent to F = e - H
        fq, fp, ft, fe = energy_level_function(H).gradient(x)
        assert abs(fq @ v.dq + v.dp @ fp + ft * v.dt + fe * v.de) < 1e-10
