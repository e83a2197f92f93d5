"""Quadrature reference solution for the delayed Langevin density and its
self-consistency residual."""

import math

import numpy as np

from ddesplit.oracle import OhiraParams, oo_residual, oo_solution


def main():
    p = OhiraParams(a=-0.15, b=-6.0, tau=-8.0)
    times = np.linspace(0.0, 10.0, 6)
    values = oo_solution(times, p)
    print("  t      u(t)           residual")
    for t, v in zip(times, values):
        print(f"{t:>5.1f}  {v: .9e}  {oo_residual(float(t), p):.3e}")

    # b = 0 collapses the transform to a pure Gaussian.
    q = OhiraParams(a=-0.15, b=0.0, tau=-8.0)
    t = np.linspace(0.0, 6.0, 61)
    exact = math.sqrt(-q.a / (2.0 * math.pi)) * np.exp(q.a * t ** 2 / 2.0)
    gap = np.abs(oo_solution(t, q) - exact).max()
    print(f"uncoupled Gaussian gap: {gap:.3e}")


if __name__ == "__main__":
    main()
