#!/usr/bin/env python3
"""Reproduce the isentropic-vortex L2 convergence table for P2 and P3.

Runs a full pass-through (t = 20) per resolution; set ENTROFILT_THREADS
to spread the runs over processes.
"""

import logging

from entrofilt.harness import convergence_study

logging.basicConfig(level=logging.WARNING)

REF_P3 = {33: 1.79e-3, 40: 7.58e-4, 50: 3.02e-4}
REF_RATE = {2: 2.59, 3: 4.00}


def main():
    for order in (3, 2):
        res = convergence_study("vortex", order, sorted(REF_P3))
        print(f"vortex P{order} (density L2; reference column is sqrt(|domain|) * eps_l2)")
        print(f"{'N':>5} {'eps_l2':>12}" + ("  {:>12} {:>7}".format("reference", "ratio") if order == 3 else ""))
        for n, e in zip(res.ns, res.eps_l2):
            line = f"{n:>5} {e:>12.3e}"
            if order == 3:
                line += f" {REF_P3[n]:>12.3e} {20.0 * e / REF_P3[n]:>7.3f}"
            print(line)
        print(f"fitted RoC: {res.rate_l2:.2f} (reference {REF_RATE[order]})\n")


if __name__ == "__main__":
    main()
