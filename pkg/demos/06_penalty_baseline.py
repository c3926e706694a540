"""Penalty baseline versus the condition-matching trial.

The baseline uses a bare network as the trial and adds the squared
condition violations (weighted by zeta) to the training error.  It can fit
just as well, but its conditions hold only approximately; the matching
construction carries them exactly at every point of training.
"""

import numpy as np

import odeforms as of
from odeforms import grids
from odeforms.metrics import deviation_metrics
from odeforms.train import TrainConfig, condition_violation, train

problem = of.registry("tp1")
train_grid = grids.chebyshev(*problem.domain, 80)
test_grid = grids.test_grid(*problem.domain)

print("tp1, 36 parameters, 30000 evaluations, one seed:\n")
print("  method           test MSD      condition violation")
for mode in (of.AUGMENTED, of.BASELINE):
    template = of.build_form(problem, mode, 36, np.random.default_rng(0))
    result = train(problem, template, train_grid,
                   TrainConfig(budget=30000, seed=0, zeta=1.0))
    msd, _ = deviation_metrics(problem, result.form, test_grid)
    viol = condition_violation(problem, result.form)
    print(f"  {mode:15s}  {float(msd):.3e}    {viol:.3e}")

print("\nthe matched trial's violation is exactly rounding-level at any budget;")
print("the baseline's shrinks only as far as training pushes it.")
