#!/usr/bin/env python3
"""Measure convergence orders the same way the acceptance suite does.

With the controller disabled and the step halved repeatedly, the global
error slope on a log-log grid exposes each family's real order.  The
averaged corrector is included to show why it is not the default: its
quadratic-residual defect drags the measured order down to one.
"""

import math

from pece import CorrectorVariant, convergence_study, startup_order_probe
from pece.problems import exp_decay, forced_linear, harmonic_oscillator


def show(label, result):
    pairs = "  ".join(f"h={h:.4g}: {e:.2e}" for h, e in result.table())
    print(f"{label:42s} slope {result.slope:5.2f}   {pairs}")


grid10 = [0.1 / 2**j for j in range(4)]
show("first-order family, exp decay",
     convergence_study(exp_decay("first-order", t_end=1.0, n_global=10), grid10))
show("first-order family, forced linear",
     convergence_study(forced_linear("first-order", t_end=2.0, n_global=10),
                       [0.2 / 2**j for j in range(4)]))
show("kinematic family (type2), exp decay",
     convergence_study(exp_decay("second-order", t_end=1.0, n_global=10), grid10))

harmonic = harmonic_oscillator(t_end=2 * math.pi, n_global=64)
dt = harmonic.problem.t_end / harmonic.problem.n_global
grid = [dt / 4 / 2**j for j in range(4)]
show("dynamic family (type2), harmonic", convergence_study(harmonic, grid))
show("dynamic family (averaged), harmonic",
     convergence_study(harmonic, grid, variant=CorrectorVariant.AVERAGED))

print()
show("heun startup, single step", startup_order_probe(exp_decay("first-order"),
                                                      [0.1 / 2**j for j in range(5)]))
show("dynamic startup, single step", startup_order_probe(harmonic,
                                                         [0.2 / 2**j for j in range(5)]))
