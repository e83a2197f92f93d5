"""Fit the growth rate of an oscillatory delay solution against the
rightmost characteristic root of u' = a u + b u(t + tau)."""

from ddesplit.harness import char_root_rightmost, exp_growth_fit
from ddesplit.oracle import poly_history
from ddesplit.scalar import ScalarDelayProblem, SchemeConfig, run

A, B, TAU = -0.15, -6.0, -8.0


def main():
    root = char_root_rightmost(A, B, TAU)
    print(f"rightmost root lambda* = {root.real:.6f} + {root.imag:.6f}i")
    problem = ScalarDelayProblem(a=A, b=B, tau=TAU, history=poly_history)
    for scheme in ("ie", "lt"):
        config = SchemeConfig(h=0.01, T=200.0, scheme=scheme)
        result = run(problem, config)
        fit = exp_growth_fit(result, t_start=50.0)
        print(f"{scheme}: omega = {fit.omega:.6f} "
              f"(off by {abs(fit.omega - root.real):.2e}), "
              f"u(T) = {result.values[-1]:.6e}, "
              f"{result.wall_clock:.3f} s")


if __name__ == "__main__":
    main()
