"""Known-exponent sample generator for the tail-estimator recovery test.

Draws integer degrees from a discrete power law P(k) ~ k^-alpha for k >= kmin
by inverse-transform sampling of the continuous envelope shifted by one half,
then rounding — the construction the half-shift maximum-likelihood formula
models. Rounding distorts the log terms near the cutoff (worst at kmin = 1,
where it pulls the estimate down by about 0.4 at alpha = 2.5), so recovery
tests should use kmin >= 5, where the distortion is below 0.03. No package
code is imported.
"""

import random


def powerlaw_sample(alpha: float, n: int, kmin: int = 5,
                    seed: int = 0) -> list:
    if alpha <= 1.0:
        raise ValueError("tail exponent must exceed 1")
    rng = random.Random(seed)
    exponent = -1.0 / (alpha - 1.0)
    shift = kmin - 0.5
    out = []
    for _ in range(n):
        u = rng.random()
        out.append(int(shift * (1.0 - u) ** exponent + 0.5))
    return out
