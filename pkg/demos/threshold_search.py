# coding: utf-8
# The critical expanding capability: below it the infection vanishes, above
# it spreads.  Each probe is a full simulation, classified on the fly.

# %%

from sisfront import reference_example
from sisfront.dynamics import ProbeSettings, find_mu_star, probe
from sisfront.spectral import r0_dirichlet_advection

spec = reference_example()
print("R0 on the initial range:", r0_dirichlet_advection((-1, 1), spec))

# %% Single probes.

settings = ProbeSettings()
for mu in (1.0, 6.0):
    print(mu, probe(spec, mu, settings).verdict)

# %% Bisection on the verdict (a few seconds).

result = find_mu_star(spec, bracket=(1.0, 6.0), width=0.25, settings=settings)
print(f"mu* in [{result.mu_lo}, {result.mu_hi}]")
for mu, verdict, t0 in sorted(result.probes):
    print(f"  mu = {mu:<8g} {verdict:<10} {'' if t0 is None else t0}")

# %% If the initial range is already high-risk, any mu spreads.

wide = spec.replace(h0=3.0, i0_expr="cos(pi*x/6)")
print(find_mu_star(wide).mu_hi)
