# %% [markdown]
# # Thin layers approach the limit
#
# The step is spread over a layer of width delta with the smooth step chi.
# As delta shrinks the smooth trajectory approaches the zero-width one.  The
# exit momentum is fixed by energy conservation for every delta, so its error
# is only integrator noise; the position at the final time carries the
# O(delta) delay spent inside the layer.

# %%
import numpy as np

from disham import (
    ExtendedPhasePoint,
    MetricSpace,
    MollifiedHamiltonian,
    configuration_surface,
    constant_step_pair,
    simulate_limit_scenario,
    simulate_smooth_scenario,
)

space = MetricSpace.euclidean(1)
surface = configuration_surface([0.0], [1.0], space)


def start(p0):
    return ExtendedPhasePoint([-1.0], [p0], 0.0, 0.5 * p0 * p0)


# %%
for U_plus, p0 in ((1.0, 1.0), (1.5, 2.0)):
    pair = constant_step_pair(space, 1.0, 0.0, U_plus, surface)
    ref = simulate_limit_scenario(pair, start(p0), 3.0).final_state
    print(f"U+ = {U_plus}, p0 = {p0}: limit q = {ref.q[0]:+.6f}, p = {ref.p[0]:+.10f}")
    for delta in (0.1, 0.05, 0.025, 0.0125):
        Hd = MollifiedHamiltonian(pair, delta)
        x0 = start(p0)
        x0 = x0.replace(e=Hd.value(x0.q, x0.p))
        end = simulate_smooth_scenario(Hd, x0, 3.0).final_state
        print(
            f"  delta = {delta:<7g} |dp| = {abs(end.p[0] - ref.p[0]):.2e}  "
            f"|dq| = {abs(end.q[0] - ref.q[0]):.2e}"
        )

# %% [markdown]
# Inside a thin layer the time field is stiff.  Above the layer factor
# threshold the integrator switches to the renormalized field; both routes
# leave the layer at the same state.

# %%
import math

from disham import IntegratorConfig

pair = constant_step_pair(space, 1.0, 0.0, 1.5, surface)
Hd = MollifiedHamiltonian(pair, 0.05)
x0 = start(2.0).replace(e=Hd.value(np.array([-1.0]), np.array([2.0])))
plain = simulate_smooth_scenario(Hd, x0, 3.0, IntegratorConfig(k_threshold=math.inf))
renorm = simulate_smooth_scenario(Hd, x0, 3.0, IntegratorConfig(k_threshold=1.0))
gap = np.max(np.abs(plain.final_state.as_array() - renorm.final_state.as_array()))
print(f"time field vs renormalized field: {gap:.2e}")
