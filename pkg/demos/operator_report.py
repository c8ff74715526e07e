"""Assemble the diffusion operator for a small random image, print the
well-posedness report, and picture the sparsity pattern."""
import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from pmdiff import DiffusivityModel, ScalarField, assemble, continuity_check, verify_operator_properties

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

field = ScalarField(np.random.default_rng(0).uniform(0.0, 1.0, (12, 12)))
model = DiffusivityModel(kind="rational", lam=1.0)
op = assemble(field, model)

for line in continuity_check(field, model).lines():
    print(line)
for line in verify_operator_properties(op).lines():
    print(line)

fig, ax = plt.subplots(figsize=(5, 5))
ax.spy(op.matrix, markersize=1.5)
ax.set_title("five-point operator, 12x12 grid, Neumann boundary")
fig.tight_layout()
fig.savefig(OUT / "operator_sparsity.png", dpi=120)
print(f"wrote {OUT / 'operator_sparsity.png'}")
