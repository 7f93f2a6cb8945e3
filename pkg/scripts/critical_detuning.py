"""Compare the closed-form critical detuning with the true maximiser of D.

For each (gamma1/2, gamma2/2) pair the script prints the closed-form value,
the stationary point of D and the numerically refined maximiser.
"""
import argparse

from bandgap_esd.errors import DomainError, InvalidParameters
from bandgap_esd.spectral import (
    SpectralDensity,
    critical_detuning_numeric,
    critical_detuning_paper,
    critical_detuning_stationary,
)


def _safe(fn, sd):
    try:
        return f"{fn(sd):.6f}"
    except (DomainError, InvalidParameters):
        return "-"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--w1", type=float, default=1.1)
    ap.add_argument("--w2", type=float, default=0.1)
    ap.add_argument("--gamma1-half", type=float, default=10.0)
    ap.add_argument("--gamma2-half", type=float, nargs="+", default=[1.0, 2.0, 4.0, 9.0])
    args = ap.parse_args()

    print("gamma2_half,closed_form,stationary,numeric")
    for g2 in args.gamma2_half:
        sd = SpectralDensity.from_half_widths(args.w1, args.w2, args.gamma1_half, g2)
        print(
            f"{g2!r},{_safe(critical_detuning_paper, sd)},"
            f"{_safe(critical_detuning_stationary, sd)},{_safe(critical_detuning_numeric, sd)}"
        )


if __name__ == "__main__":
    main()
