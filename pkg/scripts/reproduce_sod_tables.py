#!/usr/bin/env python3
"""Reproduce the Sod shock-tube convergence tables (P3) and print the
fitted rates next to the reference values."""

import logging

import numpy as np

from entrofilt.harness import convergence_study

logging.basicConfig(level=logging.WARNING)

REF_L1 = {40: 8.57e-3, 80: 4.30e-3, 160: 2.33e-3, 320: 1.30e-3}
REF_L2 = {20: 2.04e-3, 40: 1.08e-3, 80: 4.39e-4}


def main():
    print("Sod L1 (point-mean), P3")
    res = convergence_study("sod", 3, sorted(REF_L1))
    print(f"{'N':>5} {'eps_l1':>12} {'reference':>12} {'ratio':>7}")
    for n, e in zip(res.ns, res.eps_l1):
        print(f"{n:>5} {e:>12.3e} {REF_L1[n]:>12.3e} {e / REF_L1[n]:>7.3f}")
    print(f"fitted RoC: {res.rate_l1:.3f} (reference 0.94)\n")

    print("Sod L2 (table-normalized ||e||_2 / M), P3")
    res = convergence_study("sod", 3, sorted(REF_L2))
    print(f"{'N':>5} {'eps_l2':>12} {'reference':>12} {'ratio':>7}")
    tab = [e / np.sqrt(4 * n) for n, e in zip(res.ns, res.eps_l2)]
    for n, e in zip(res.ns, tab):
        print(f"{n:>5} {e:>12.3e} {REF_L2[n]:>12.3e} {e / REF_L2[n]:>7.3f}")
    rate = float(-np.polyfit(np.log(res.ns), np.log(tab), 1)[0])
    print(f"fitted RoC: {rate:.3f} (reference 0.98)")


if __name__ == "__main__":
    main()
