"""
A curvature field peaking on a ring
===================================

Targets follow a quadratic profile in the distance from a point on the
negative x axis: negative near that point, maximal at a chosen distance.
"""

import numpy as np

from curvdesign import RunConfig, run_pipeline
from curvdesign.meshgen import DomeSpec, generate_hex_dome, radial_quadratic_targets

c, b, x0 = 0.0168, 0.7, -12.86
mesh, coords = generate_hex_dome(DomeSpec(n=7, span=30, height=10))
K = radial_quadratic_targets(coords, mesh.interior_vertices, c, b, x0)
print("targets: min %.4f, max %.4f, total %.3f" % (K.min(), K.max(), K.sum()))

config = RunConfig.from_dict({
    "generator": {"plan": "hexagon", "n": 7, "span": 30, "height": 10},
    "targets": {"kind": "radial-quadratic", "c": c, "b": b, "x0": x0},
})
result, code = run_pipeline(config, out="")
print("A_K = %.2e rad, exit code %d" % (result["metrics"].A_K, code))

# a coarse profile of the final heights along the x axis
final = result["coords"]
on_axis = np.abs(final[:, 1]) < 1e-6
order = np.argsort(final[on_axis, 0])
for x, z in final[on_axis][order][:, [0, 2]]:
    print("x = %6.2f  z = %5.2f" % (x, z))
