"""Estimating an upper bound on the distance from the exact solution.

After training, a small perturbation network is pushed through the same
condition projection (with zero prescribed values), so the perturbed trial
still satisfies every condition.  Training the perturbation from eta == 0
gives errors s^2 (before) and delta^2 (after); the pointwise estimate

    |eta_ex(x)| = |eta(x)| / (1 - delta^2/s^2)

upper-bounds the true deviation where the underlying linearization holds.
The exact solution is known here, so the claim can be checked directly.
"""

import numpy as np

import odeforms as of
from odeforms import grids
from odeforms.bound import estimate_bound
from odeforms.metrics import deviation_metrics, estimated_deviation_metrics
from odeforms.train import TrainConfig, train

problem = of.registry("tp1")
train_grid = grids.equidistant(*problem.domain, 80)
test_grid = grids.test_grid(*problem.domain)

template = of.build_form(problem, of.AUGMENTED, 36, np.random.default_rng(0))
result = train(problem, template, train_grid, TrainConfig(budget=40000, seed=0))
print(f"trained: error s^2 = {result.error_final:.3e}")

br = estimate_bound(problem, result, pert_neurons=6, grid=train_grid,
                    eval_grid=test_grid, budget=10000)
print(f"perturbation trained: delta^2 = {br.delta2:.3e}  ratio = {br.ratio:.4f}"
      + ("  (low confidence)" if br.low_confidence else ""))

msd, mxd = deviation_metrics(problem, result.form, test_grid)
msed, mxed = estimated_deviation_metrics(br)
print(f"true deviation:      MSD = {msd:.3e}  MXD = {mxd:.3e}")
print(f"estimated deviation: MSED = {msed:.3e}  MXED = {mxed:.3e}")

true_dev = np.abs(of.trial_eval(result.form, test_grid.points).value
                  - problem.exact(test_grid.points))
covered = float(np.mean(br.bound_abs >= true_dev))
print(f"bound covers the true deviation at {100*covered:.1f}% of 1000 test points")

with open("bound_curves.csv", "w") as fh:
    fh.write("x,true_deviation,estimated_bound\n")
    for x, d, u in zip(test_grid.points, true_dev, br.bound_abs):
        fh.write(f"{x!r},{d!r},{u!r}\n")
print("wrote bound_curves.csv (x, true deviation, estimated bound)")
