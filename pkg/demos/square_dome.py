"""
A square grid shell
===================

The same workflow on a square plan split into four triangles per cell, read
back through OBJ files as one would with a mesh from a modelling tool.
"""

import os
import tempfile

from curvdesign import RunConfig, run_pipeline
from curvdesign.mesh import save_obj
from curvdesign.meshgen import DomeSpec, generate_square_dome

work = tempfile.mkdtemp()
mesh, coords = generate_square_dome(DomeSpec("square", 9, 30, 6))
save_obj(os.path.join(work, "square.obj"), mesh, coords)
print("%d vertices, %d faces" % (mesh.vertex_count, mesh.face_count))

config = RunConfig.from_dict({
    "input": os.path.join(work, "square.obj"),
    "targets": {"kind": "constant-total", "total": 1.2},
    # grid panels are right isosceles, so keep their conformal structure
    "conformal": "from-initial",
})
result, code = run_pipeline(config, out=work)
m = result["metrics"]
print("A_K = %.2e rad, A_v = %.3f m, A_theta = %.2f deg" % (m.A_K, m.A_v, m.A_theta))
print("outputs in", work, sorted(os.listdir(work)))
