"""Watch the A-truncated edge kernel act as a delta function on two test functions.

For a Gaussian of width w the pairing error behaves like erfc(A w / 2), so
a log-log fit of the residual against A has no fixed slope: it steepens as A
grows.  (x-i)^-2 is analytic in the strip |Im x| < 1, and its residual falls
like exp(-A) down to rounding level by A = 50.
"""

import math

from nhresolve import EdgeModel, delta_probe, parse_test_function
from nhresolve.kernels import edge_kernel_slice


def main():
    model = EdgeModel(0, 1j)
    grid = [25.0, 50.0, 100.0, 200.0]
    for text in ("gaussian(0,0.1)", "inverse_square(1j)"):
        phi = parse_test_function(text)
        for xp in (0.0, 0.3):
            domain = "truncated" if phi.support else "oscillatory_tail"
            rep = delta_probe(lambda A: edge_kernel_slice(model, A, xp), phi, xp, grid, domain=domain)
            print(f"{text:<20} x'={xp:.1f}  verdict={rep.verdict:<10} fitted rate={rep.fitted_rate:+.1f}")
            for A, r in zip(grid, rep.residuals):
                extra = f"  erfc(A w/2)={math.erfc(A * 0.05):.1e}" if text.startswith("gaussian") and xp == 0 else ""
                print(f"    A={A:>5.0f}  residual={r:.2e}{extra}")


if __name__ == "__main__":
    main()
