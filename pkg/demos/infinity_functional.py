"""Evaluate two functionals supported at infinity and show that they ignore compact parts.

The x'-family converges to (pi/16)/(x'-z)^2 on (x-z)^-2, and the same value
comes back when the test function is cut off near the origin.
"""

import math

from nhresolve import parse_test_function
from nhresolve.limits import infinity_functional_probe, locality_at_infinity_check


def main():
    xp, z = 0.0, 1j
    grid = [0.2 * 2.0**-k for k in range(15)]
    phi = parse_test_function("inverse_square(1j)")
    rep = infinity_functional_probe("fun96a", phi, xp, grid)
    print(f"fun96a on {phi.label}: {rep.verdict}, limit {complex(rep.extrapolated):.8f}")
    print(f"  closed form (pi/16)/(x'-z)^2 = {(math.pi / 16) / (xp - z) ** 2:.8f}")

    for text in ("gaussian(0,1)", "bump(0,1)"):
        r = infinity_functional_probe("fun96a", parse_test_function(text), xp, grid)
        print(f"fun96a on {text}: {r.verdict}, last value {abs(r.values[-1]):.1e}")

    loc = locality_at_infinity_check("fun96a", phi, xp, [10.0, 50.0], grid)
    for row in loc["rows"]:
        print(f"  far part beyond R={row['R']:.0f}: relative change {row['rel_diff']:.1e}")
    print(f"  near part: {loc['near_verdict']}")


if __name__ == "__main__":
    main()
