"""
Boundary precision against curvature precision
===============================================

The same design is run with light and with heavy penalties on the boundary.
Pinning the boundary hard moves it less but leaves larger curvature errors.
A third run keeps the conformal structure of the initial mesh, which keeps
panel shapes close to the original ones.
"""

from curvdesign import RunConfig, run_pipeline

base = {
    "generator": {"plan": "hexagon", "n": 7, "span": 30, "height": 10},
    "targets": {"kind": "constant-total", "total": 1.5},
}

runs = {
    "light penalties": dict(base, lambda_e=0.01, lambda_v=0.01),
    "heavy penalties": dict(base, lambda_e=100.0, lambda_v=100.0),
    "initial conformal": dict(base, conformal="from-initial", target_angles="initial"),
}

print("%-18s %10s %10s %10s" % ("run", "A_K rad", "A_v m", "A_theta"))
for name, cfg in runs.items():
    result, _ = run_pipeline(RunConfig.from_dict(cfg), out="")
    m = result["metrics"]
    print("%-18s %10.2e %10.4f %10.3f" % (name, m.A_K, m.A_v, m.A_theta))
