"""First-order systems: per-component trials with shared training.

Each component gets its own main and match networks; one flat parameter
vector covers them all, and the training error sums squared residuals over
components.  The stiff system (tp5) and the nonlinear system (tp4) both
pin their initial values exactly.
"""

import numpy as np

import odeforms as of
from odeforms import grids
from odeforms.metrics import deviation_metrics
from odeforms.train import TrainConfig, train
from odeforms.trial import system_trial_eval

for name, budget in (("tp4", 60000), ("tp5", 60000)):
    problem = of.registry(name)
    train_grid = grids.chebyshev(*problem.domain, 130)
    test_grid = grids.test_grid(*problem.domain)
    template = of.build_form(problem, of.AUGMENTED, 120, np.random.default_rng(0))
    result = train(problem, template, train_grid, TrainConfig(budget=budget, seed=0))
    msd, mxd = deviation_metrics(problem, result.form, test_grid)
    t0 = system_trial_eval(result.form, problem.domain[0])
    print(f"{name}: error={result.error_final:.3e}")
    for i in range(problem.n_components):
        print(f"  psi_{i+1}: initial value {float(t0[i].value):.12f}, "
              f"test MSD {float(msd[i]):.3e}, MXD {float(mxd[i]):.3e}")
    print()
