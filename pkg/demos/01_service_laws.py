"""
Service-time laws
=================

Build a few service distributions, evaluate their Laplace transforms and
moments, and check the moments against samples.
"""

import numpy as np

from infserv.dist import Convolution, Deterministic, Erlang, Exponential, Mixture, Uniform, lt_derivatives

# base repair: exponential, mean one week; transport: one week flat
repair = Exponential(1.0)
transport = Deterministic(1.0)
transport_then_repair = Convolution((transport, repair))

for name, d in [("repair", repair), ("transport", transport), ("transport+repair", transport_then_repair)]:
    m = d.moments()
    print(f"{name:18s} mean {m.mean:.3f}  var {m.variance:.3f}  cv {m.cv:.3f}  LT(1) {d.laplace(1.0):.6f}")

# the transform derivative at zero recovers the mean
m1, m2 = lt_derivatives(transport_then_repair.laplace, scale=2.0)
print(f"\nfinite-difference mean {m1:.6f}, second moment {m2:.4f}")

# a two-point mixture, sampled
mix = Mixture(((0.5, Deterministic(1.0)), (0.5, Uniform(2.0, 4.0))))
draws = mix.sample(np.random.default_rng(1), size=200_000)
print(f"mixture mean exact {mix.moments().mean:.4f}, sampled {draws.mean():.4f}")
print(f"Erlang(3) cv {Erlang(3, 1.5).moments().cv:.4f} (1/sqrt(3) = {3 ** -0.5:.4f})")
