"""Command-line workflow on a CSV file.

Writes a synthetic data set with a few informative columns, then fits
post-boosting and the cross-validated LASSO with a 25% holdout, the way one
would on real data.  Outputs and a manifest with SHA-256 digests land in a
temporary directory.

    python demos/05_csv_workflow.py
"""

import json
import os
import tempfile

import numpy as np

from hdboost.cli import main

rng = np.random.default_rng(7)
n, p = 200, 60
x = rng.standard_normal((n, p)) * rng.uniform(0.5, 3, p) + rng.uniform(-5, 5, p)
y = 10 + x[:, 0] - 0.5 * x[:, 3] + 0.8 * x[:, 10] + rng.standard_normal(n)

work = tempfile.mkdtemp(prefix="hdboost-demo-")
data = os.path.join(work, "data.csv")
header = "y," + ",".join(f"x{j}" for j in range(p))
np.savetxt(data, np.column_stack([y, x]), delimiter=",", header=header, comments="")

for method, extra in (("post-ba", []), ("oba", []), ("lasso", ["--penalty", "cv"])):
    out = os.path.join(work, method)
    print(f"--- {method}")
    main(["fit", data, "--response", "y", "--method", method, "--test-frac", "0.25",
          "--seed", "1", "--out", out] + extra)
    with open(os.path.join(out, "coefficients.csv")) as fh:
        rows = [line.strip().split(",") for line in fh][1:]
    nonzero = [(name, float(v)) for name, v in rows if float(v) != 0]
    print("nonzero coefficients:", ", ".join(f"{k}={v:.2f}" for k, v in nonzero[:8]),
          "..." if len(nonzero) > 8 else "")

manifest = json.load(open(os.path.join(work, "post-ba", "manifest.json")))
print("\nmanifest for post-ba:", json.dumps(manifest["outputs"], indent=1))
print("outputs in", work)
