"""
Far field of a radiating dipole ball.

Compares three routes to the far-field pattern (volume quadrature, the
multipole series and the source's Fourier transform on the wavenumber
sphere), then watches the scaled field at finite distance approach it.
"""

import numpy as np

from nonrad import WaveContext, coeff_table, dipole_ball_source
from nonrad.fields import (
    asymptotic_amplitude,
    farfield_direct,
    farfield_series,
    field_direct,
    field_series,
    fourier_source_transform,
    sphere_directions,
)

ctx = WaveContext(1.0, 1.0)
src = dipole_ball_source(ctx, p=(0.3, -0.5, 1.0), rho=0.5)
table = coeff_table(src, ctx)
dirs = sphere_directions(40)

# %% three routes to the far-field pattern
direct = farfield_direct(src, ctx, None, dirs)
series = farfield_series(table, dirs)
fourier = fourier_source_transform(src, ctx, None, ctx.kappa * dirs)
peak = np.max(np.abs(direct))
print(f"series vs direct : {np.max(np.abs(series - direct)) / peak:.1e}")
print(f"Fourier vs direct: {np.max(np.abs(fourier - direct)) / peak:.1e}")
print(f"radial component : {np.max(np.abs(np.sum(direct * dirs, axis=1))) / peak:.1e}")

# %% exterior field: series against quadrature
rng = np.random.default_rng(0)
x = dirs[:10] * rng.uniform(1.2, 4.0, 10)[:, None]
Ed, Es = field_direct(src, ctx, None, x), field_series(table, ctx, x)
print(f"\nexterior field, series vs direct: {np.max(np.linalg.norm(Es - Ed, axis=1) / np.linalg.norm(Ed, axis=1)):.1e}")

# %% approach to the far field
# the error of the scaled field decays like 1/|x|, so it halves per doubling
xh = dirs[3]
prev = None
for r in (25, 50, 100, 200, 400):
    err = np.linalg.norm(asymptotic_amplitude(src, ctx, None, r * xh) - direct[3])
    note = "" if prev is None else f"  ratio {err / prev:.3f}"
    print(f"|x| = {r:4d}: error {err:.3e}{note}")
    prev = err
