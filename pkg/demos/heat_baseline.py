# Sanity anchor: with constant diffusivity the stepped scheme must track the
# closed-form heat solution (Gaussian convolution, sigma = sqrt(2t)).
import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from pmdiff import DiffusivityModel, ScalarField, SchemeConfig, heat_closed_form, run

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

x = np.arange(256, dtype=np.float64)
u0 = ScalarField(np.exp(-((x - 127.5) ** 2) / 128.0))
model = DiffusivityModel(kind="rational", lam=1.0)  # ignored by the gaussian scheme

tau = 0.1
fig, (ax_prof, ax_err) = plt.subplots(1, 2, figsize=(10, 4))
ax_prof.plot(u0.values[0], "k--", label="t=0")

u = u0
done = 0
for n in [50, 200, 800]:
    u, _ = run(u, model, SchemeConfig(scheme="gaussian", tau=tau), n - done)
    done = n
    exact = heat_closed_form(u0, n * tau)
    err = np.abs(u.values - exact.values).max()
    ax_prof.plot(u.values[0], label=f"t={n * tau:g}")
    ax_err.semilogy(np.abs(u.values - exact.values)[0], label=f"t={n * tau:g}")
    print(f"t={n * tau:>4g}: max |stepped - closed form| = {err:.2e}")

ax_prof.set_title("stepped heat evolution")
ax_prof.set_xlabel("pixel")
ax_err.set_title("pointwise error vs closed form")
ax_err.set_xlabel("pixel")
for ax in (ax_prof, ax_err):
    ax.legend()
fig.tight_layout()
fig.savefig(OUT / "heat_baseline.png", dpi=120)
print(f"wrote {OUT / 'heat_baseline.png'}")
