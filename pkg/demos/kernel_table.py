"""Print closed-form edge and inner kernels next to their contour quadratures.

Run with ``python3 demos/kernel_table.py``.
"""

import numpy as np

from nhresolve import (EdgeModel, InnerModel, edge_kernel_closed, edge_kernel_direct, inner_kernel_closed,
                       inner_kernel_direct)


def main():
    xs = np.linspace(-2.0, 2.0, 5)
    xp = 0.3
    print("edge model n=2, z=i, A=10")
    edge = EdgeModel(2, 1j)
    for x in xs:
        closed = complex(edge_kernel_closed(edge, 10.0, x, xp).total)
        direct = complex(edge_kernel_direct(edge, 10.0, None, float(x), xp))
        print(f"  x={x:+.1f}  closed={closed:.10f}  |closed-direct|={abs(closed - direct):.1e}")

    print("inner model alpha=1, z=i, A=5")
    inner = InnerModel(1.0, 1j)
    for x in xs:
        kv = inner_kernel_closed(inner, 5.0, x, xp)
        direct = complex(inner_kernel_direct(inner, 5.0, None, float(x), xp))
        parts = "  ".join(f"{k}={complex(v):.4f}" for k, v in kv.terms.items())
        print(f"  x={x:+.1f}  {parts}  |closed-direct|={abs(complex(kv.total) - direct):.1e}")


if __name__ == "__main__":
    main()
