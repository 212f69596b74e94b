"""
Near-field identities on a sphere enclosing the source.

The field and its curl on the sphere |x| = R' determine the Fourier
transform of the modified source on the wavenumber sphere. For the dipole
the two surface integrals U and V reproduce it; for the curl-curl source
all three vanish together.
"""

import numpy as np

from nonrad import WaveContext
from nonrad.fields import (
    cube_directions,
    fourier_source_transform,
    nearfield_rule,
    nearfield_U,
    nearfield_V,
    surface_field,
    surface_rule,
)
from nonrad.sources import curlcurl_source, dipole_ball_source, source_scale

ctx = WaveContext(1.0, 1.0)
xi = ctx.kappa * cube_directions()[:12]

for name, src in (("dipole", dipole_ball_source(ctx)), ("curlcurl", curlcurl_source(ctx))):
    scale = source_scale(src)
    for Rp in (1.25, 1.6):
        surf = surface_rule(ctx, Rp)
        # one surface evaluation of E and its Jacobian serves both integrals
        cache = surface_field(src, ctx, surf, nearfield_rule(src, ctx, Rp))
        U = nearfield_U(src, ctx, surf, xi, cache=cache)
        V = nearfield_V(src, ctx, surf, xi, cache=cache)
        Jhat = fourier_source_transform(src, ctx, None, xi)
        print(f"{name:8s} R'={Rp:4.2f}  max|Jhat|/scale={np.max(np.linalg.norm(Jhat, axis=1)) / scale:.2e}"
              f"  |U-Jhat|/scale={np.max(np.linalg.norm(U - Jhat, axis=1)) / scale:.1e}"
              f"  |V-Jhat|/scale={np.max(np.linalg.norm(V - Jhat, axis=1)) / scale:.1e}")
