"""
Keeping a shallow shell convex
==============================

A very flat dome with positive curvature targets can buckle inwards at a few
vertices. A reward on the gap between each interior vertex and the mean
height of its neighbours keeps the surface convex.
"""

from curvdesign import RunConfig, run_pipeline
from curvdesign.embed_opt import convexity_gaps

base = {
    "generator": {"plan": "hexagon", "n": 7, "span": 30, "height": 0.57},
    "targets": {"kind": "constant-total", "total": 1.5},
}

for lam in (0.0, 1.0):
    result, _ = run_pipeline(RunConfig.from_dict(dict(base, lambda_c=lam)), out="")
    gaps = convexity_gaps(result["design"].mesh, result["coords"])
    bad = (gaps > 1e-3).sum()
    print("lambda_c = %.1f: largest gap %+.3f m, %d non-convex vertices" % (lam, gaps.max(), bad))
