# coding: utf-8
# Asymptotic spreading speeds from semi-waves, compared with a long run.

# %%

from sisfront import constant_example
from sisfront.dynamics import estimate_speeds
from sisfront.frontfix import run
from sisfront.semiwave import semiwave_profile, speeds
from sisfront.steady import solve_equilibrium

spec = constant_example(mu=6.0, alpha=1.5)
left, right, k0 = speeds(spec)
print(f"k_left = {left.k_star:.8f}  k0 = {k0:.8f}  k_right = {right.k_star:.8f}")

# %% Each speed matches mu q'(0) = k for its semi-wave.

for r in (left, right):
    print(r.direction, r.k_star, spec.mu * r.slope0)

# %% The profile rises monotonically to a/b.

z, q, slope = semiwave_profile(right.k_star - spec.alpha, spec.a, spec.b, spec.d_I)
print(z[-1], q[-1], spec.a / spec.b)

# %% A fine run to t = 40 (about 20 s); fit the front positions over the
# second half.

traj = run(spec, dt=1e-3, n=2000, t_end=40.0, output_stride=1000)
est = estimate_speeds(traj)
print(f"fitted left {est.left_speed:.5f}  right {est.right_speed:.5f}")

# %% Behind the fronts the density settles to the equilibrium.

eq = solve_equilibrium(spec)
print(abs(traj.final.sup - eq.values.max()))
