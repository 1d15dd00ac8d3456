# %% [markdown]
# # Decisive points and the directed jump
#
# A rule that accepts every decisive point on the surface characteristic can
# give several continuations.  Following the directed jump characteristic
# picks exactly one of them.

# %%
from disham import MetricSpace, configuration_surface, constant_step_pair, make_impact
from disham.transition import decisive_points, prolong_modified, prolong_vinogradov

space = MetricSpace.euclidean(1)
surface = configuration_surface([0.0], [1.0], space)

# %%
for U_plus, p0 in ((0.0, 1.0), (1.5, 2.0), (1.0, 1.0)):
    pair = constant_step_pair(space, 1.0, 0.0, U_plus, surface)
    impact = make_impact(pair, [0.0], [p0])
    print(f"step {U_plus}, p0 = {p0}")
    for dp in decisive_points(pair, impact):
        print(f"  decisive {dp.branch.value:16s} p = {dp.point.p[0]:+.6f}")
    all_branches = prolong_vinogradov(pair, impact, 1.0)
    chosen = prolong_modified(pair, impact, 1.0)
    print(f"  all decisive points: {len(all_branches)} continuation(s)")
    print(f"  directed jump picks {chosen.branch}, final p = {chosen.final_state.p[0]:+.6f}")

# %% [markdown]
# A barrier made of two steps collapsed onto the same surface is crossed as a
# chain of two jumps.

# %%
from disham import DiscontinuityStack, ExtendedPhasePoint, NaturalHamiltonian, simulate_limit_scenario
from disham.hamiltonian import ConstantPotential

stack = DiscontinuityStack(
    [NaturalHamiltonian(space, 1.0, ConstantPotential(u)) for u in (0.0, 1.0, 0.0)], surface
)
traj = simulate_limit_scenario(stack, ExtendedPhasePoint([-1.0], [2.0], 0.0, 2.0), 3.0)
print([k.value for k in traj.kinds], "final p", traj.final_state.p[0])
