"""Exact condition satisfaction, the core construction guarantee.

Every trial solution is assembled as

    Psi(x) = N(x) + sum_j (xi_j - c_j(N)) * Phi_j(x),

where the basis Phi is built so the condition functionals c_j return the
prescribed values xi_j no matter what the network parameters are.  This
script draws random parameters for every condition type and reports the
worst violation it can find.
"""

import numpy as np

from odeforms import conditions as C
from odeforms import net, trial

rng = np.random.default_rng(0)
DRAWS = 300


def augmented(spec, k=4):
    arity = C.match_arity(spec)
    mp = C.MatchParams(net.random_init(k, rng), net.random_init(k, rng) if arity == 2 else None)
    return trial.NeuralForm(spec, mp, net.random_init(k + 1, rng), trial.AUGMENTED)


def worst_violation(make_spec, reduced=False):
    worst = 0.0
    for _ in range(DRAWS):
        spec = make_spec()
        if reduced:
            form = trial.NeuralForm(spec, None, net.random_init(4, rng), trial.RIGID_REDUCED)
        else:
            form = augmented(spec)
        got = C.condition_values(spec, [trial.trial_eval(form, p)
                                        for p in C.condition_points(spec)])
        worst = max(worst, max(abs(float(g) - w)
                               for g, w in zip(got, C.prescribed_values(spec))))
    return worst


def rand_vals(n=2):
    return (float(v) for v in rng.uniform(-3, 3, n))


def rand_robin():
    while True:
        lam, mu, gam, delta = (float(v) for v in rng.uniform(0.5, 2, 4) * rng.choice([-1, 1], 4))
        xa, xb = rand_vals()
        spec = C.Robin(0.0, 2.5, lam, mu, gam, delta, xa, xb)
        try:
            spec.ensure_matchable()
            if 2.5 * lam != 2 * mu and 2.5 * gam != -2 * delta:
                return spec
        except ValueError:
            pass


cases = [
    ("first-order initial", lambda: C.InitialValue(0.0, next(rand_vals(1))), False),
    ("Dirichlet", lambda: C.Dirichlet(0.0, 2.5, *rand_vals()), False),
    ("mixed value/slope", lambda: C.MixedDN(0.0, 2.5, *rand_vals()), False),
    ("Neumann", lambda: C.Neumann(0.0, 2.5, *rand_vals()), False),
    ("Cauchy", lambda: C.Cauchy(0.0, *rand_vals()), False),
    ("Robin", rand_robin, False),
    ("mixed, reduced form", lambda: C.MixedDN(0.0, 2.5, *rand_vals()), True),
    ("Robin, reduced form", rand_robin, True),
]

print(f"worst condition violation over {DRAWS} random parameter draws:")
for name, make, reduced in cases:
    print(f"  {name:22s} {worst_violation(make, reduced):.3e}")
print("\nall violations sit at rounding level: the conditions are carried by")
print("the functional form, not by the optimizer.")
