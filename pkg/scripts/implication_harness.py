"""Randomized check that a holding certificate always means a passing audit.

Exits 2 if any trial produces a certificate that holds while the probe
audit fails, 0 otherwise.
"""

import argparse
import sys

from pcpsketch import implication_harness


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--probes", type=int, default=6)
    args = ap.parse_args()

    summary = implication_harness(args.trials, seed=args.seed, n_random_probes=args.probes)
    print(f"trials:            {summary.trials}")
    print(f"matrix cert held:  {summary.t1_holds}")
    print(f"spectral cert held:{summary.t2_holds}")
    print(f"worst probe error: {summary.max_err_over_trials:.3e}")
    print(f"violations:        {len(summary.violations)}")
    for v in summary.violations:
        print(f"  {v}")
    return 2 if summary.violations else 0


if __name__ == "__main__":
    sys.exit(main())
