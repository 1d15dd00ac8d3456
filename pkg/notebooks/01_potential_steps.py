# %% [markdown]
# # Potential steps in the zero-width limit
#
# A particle of unit mass moves freely on a line and meets a step of the
# potential at q = 0.  In the limit picture it follows a jump characteristic
# along the surface until one of the two energy shells is reached again.

# %%
import math

import numpy as np

from disham import MetricSpace, configuration_surface, constant_step_pair, jump_arc, make_impact
from disham.transition import step_closed_form

space = MetricSpace.euclidean(1)
surface = configuration_surface([0.0], [1.0], space)
b = np.array([1.0])

# %% [markdown]
# Three classic cases: a wall that is too high, a step that can be climbed
# and a step down.  The jump characteristic and the closed form agree.

# %%
for U_minus, U_plus, p0 in ((0.0, 1.0, 1.0), (0.0, 1.5, 2.0), (1.0, 0.0, 1.0)):
    pair = constant_step_pair(space, 1.0, U_minus, U_plus, surface)
    out = jump_arc(pair, make_impact(pair, [0.0], [p0]))
    ref = step_closed_form(U_minus, U_plus, [p0], b, 1.0, space)
    print(
        f"U- = {U_minus}, U+ = {U_plus}, p0 = {p0}: {out.kind.value:11s} "
        f"p1 = {out.terminal.p[0]:+.10f} (closed form {ref.terminal.p[0]:+.10f}), s1 = {out.s1:.10f}"
    )

# %% [markdown]
# Sweeping the incoming momentum over a unit step shows the threshold at
# p0 = sqrt 2 where the jump ends tangentially.

# %%
pair = constant_step_pair(space, 1.0, 0.0, 1.0, surface)
for p0 in np.linspace(0.5, 2.5, 9):
    out = jump_arc(pair, make_impact(pair, [0.0], [p0]))
    print(f"p0 = {p0:.2f}  {out.kind.value:11s}  p1 = {out.terminal.p[0]:+.6f}")
print("threshold", math.sqrt(2.0))
