"""Finite-dimensional stability lab for the scalar one-step maps.

The two grid-mode recurrences are (m+1)-dimensional linear maps on the state
(u_n, u_{n-1}, ..., u_{n-m}).  This module assembles them as matrices
together with the shift/coupling factors they are built from, computes
spectral radii and summability/Ritt diagnostics, and verifies the exact
telescoping and summation-by-parts identities that drive the error analysis.

All operator norms are the induced infinity norm (max absolute row sum);
spectral radii are norm independent.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import NumericalError, ParameterError, RootConvergenceError
from .history import DelayGrid
from .scalar import ScalarDelayProblem, StepCoefficients, ie_step, lt_step


def _inf_norm(a: np.ndarray) -> float:
    return float(np.abs(a).sum(axis=-1).max())


@dataclass
class CompanionOperator:
    """Matrix-free companion form of the Lie-Trotter recurrence.

    Acts on x = (x_0, ..., x_m) as (alpha x_0 + beta x_m, x_0, ..., x_{m-1});
    x_j holds the value j steps old.
    """

    m: int
    alpha: float
    beta: float

    def __post_init__(self):
        if self.m < 1:
            raise ParameterError(f"delay depth must be >= 1, got {self.m}")

    @property
    def dimension(self) -> int:
        return self.m + 1

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        out[0] = self.alpha * x[0] + self.beta * x[self.m]
        out[1:] = x[:-1]
        return out

    def dense(self) -> np.ndarray:
        """Dense matrix realization (test oracle and small-scale diagnostics)."""
        d = self.dimension
        mat = np.zeros((d, d))
        mat[0, 0] = self.alpha
        mat[0, self.m] = self.beta
        mat[np.arange(1, d), np.arange(0, d - 1)] = 1.0
        return mat


@dataclass
class DiscretePropagators:
    """Matrix realizations of one implicit Euler / splitting step.

    Attributes
    ----------
    Sigma : ndarray
        Exact shift with inflow: (x_0, x_0, x_1, ..., x_{m-1}).
    D : ndarray
        Coupling row map (a x_0 + b x_m, 0, ..., 0).
    H : ndarray
        h * D * Sigma, the operational-smallness factor.
    P : ndarray
        Splitting step: top row alpha at column 0, beta at column m.
    R : ndarray
        Implicit Euler step: top row alpha at column 0, beta at column m-1;
        equals (I - h D)^{-1} Sigma exactly.
    E : ndarray
        Defect R - P (single nonzero row with entries +-beta).
    """

    m: int
    h: float
    coeffs: StepCoefficients
    Sigma: np.ndarray
    D: np.ndarray
    H: np.ndarray
    P: np.ndarray
    R: np.ndarray
    E: np.ndarray


def build_discrete_propagators(problem: ScalarDelayProblem,
                               h: float) -> DiscretePropagators:
    """Assemble Sigma, D, H and the one-step matrices P, R, E.

    Requires constant coefficients and an integer lag.  P and R are checked
    against single steps of the scalar maps on a few deterministic states
    before being returned.
    """
    if problem.a_mode != "constant":
        raise ParameterError("matrix lab requires constant coefficients")
    grid = DelayGrid(h, problem.tau)
    if not grid.is_integer_lag:
        raise ParameterError("matrix lab requires an integer lag (delta = 0)")
    m = grid.m
    d = m + 1
    a, b = problem.a, problem.b
    coeffs = StepCoefficients.from_params(a, b, h)

    Sigma = np.zeros((d, d))
    Sigma[0, 0] = 1.0
    Sigma[np.arange(1, d), np.arange(0, d - 1)] = 1.0
    D = np.zeros((d, d))
    D[0, 0] = a
    D[0, m] = b
    H = h * (D @ Sigma)

    P = np.zeros((d, d))
    P[0, 0] = coeffs.alpha
    P[0, m] = coeffs.beta
    P[np.arange(1, d), np.arange(0, d - 1)] = 1.0
    R = np.zeros((d, d))
    R[0, 0] = coeffs.alpha
    # += : for m = 1 the delay column coincides with the diagonal entry.
    R[0, m - 1] += coeffs.beta
    R[np.arange(1, d), np.arange(0, d - 1)] = 1.0
    E = R - P

    # Cross-check both matrices against the scalar one-step maps.
    rng = np.random.default_rng(20240211)
    for _ in range(3):
        x = rng.standard_normal(d)
        p_ref = np.concatenate(([lt_step(x[0], x[m], a, b, h)], x[:-1]))
        r_ref = np.concatenate(([ie_step(x[0], x[m - 1], a, b, h)], x[:-1]))
        if not (np.allclose(P @ x, p_ref, rtol=0, atol=1e-12)
                and np.allclose(R @ x, r_ref, rtol=0, atol=1e-12)):
            raise NumericalError("propagator matrices disagree with scalar steps")
    return DiscretePropagators(m=m, h=h, coeffs=coeffs, Sigma=Sigma, D=D,
                               H=H, P=P, R=R, E=E)


def defect_norm(props: DiscretePropagators) -> float:
    """Infinity norm of the one-step defect R - P (equals 2|beta| exactly)."""
    return _inf_norm(props.E)


def estimate_os_norm(problem: ScalarDelayProblem, h: float) -> float:
    """Norm of the smallness factor ||h D Sigma||_inf.

    Equals h(|a| + |b|) when the delay column is distinct from the diagonal
    (m >= 2); for m = 1 both couplings land in one column and the norm is
    h|a + b|.
    """
    props = build_discrete_propagators(problem, h)
    return _inf_norm(props.H)


def spectral_radius(op: CompanionOperator, tol: float = 1e-12) -> float:
    """Largest root modulus of p(z) = z^{m+1} - alpha z^m - beta.

    Durand-Kerner iteration on the sparse-coefficient polynomial; all m+1
    roots are polished simultaneously.  Deterministic initial guesses sit on
    a circle of radius max(1, |alpha|+|beta|)^{1/(m+1)} with a fixed phase
    offset to break symmetry.
    """
    if tol <= 0:
        raise ParameterError(f"tolerance must be positive, got {tol}")
    n = op.m + 1
    alpha, beta = op.alpha, op.beta
    if beta == 0.0:
        return abs(alpha)

    def p(z):
        return z ** op.m * (z - alpha) - beta

    radius = max(1.0, abs(alpha) + abs(beta)) ** (1.0 / n)
    z = radius * np.exp(1j * (2.0 * np.pi * np.arange(n) / n + 0.4))
    max_sweeps = 10 * n
    for _ in range(max_sweeps):
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        step = p(z) / diff.prod(axis=1)
        z = z - step
        if np.abs(step).max() < tol:
            return float(np.abs(z).max())
    raise RootConvergenceError(
        f"no convergence after {max_sweeps} sweeps",
        residual=float(np.abs(p(z)).max()),
    )


def dense_spectral_radius(op: CompanionOperator) -> float:
    """Eigensolver route on the dense companion matrix (test oracle)."""
    return float(np.abs(np.linalg.eigvals(op.dense())).max())


def stability_profiles(op: np.ndarray, N: int) -> Tuple[np.ndarray, np.ndarray]:
    """Exact summability and Ritt sequences by repeated multiplication.

    Returns (S, r) with S[k-1] = ||sum_{j<k} op^j||_inf for k = 1..N and
    r[n-1] = n * ||op^n - op^{n-1}||_inf.  Dense and exact to rounding (no
    eigendecomposition), so only suitable for desk-scale N and dimension.
    """
    op = np.asarray(op, dtype=float)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ParameterError("operator must be a square matrix")
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    d = op.shape[0]
    power_prev = np.eye(d)
    partial = np.eye(d)
    S = np.empty(N)
    r = np.empty(N)
    S[0] = _inf_norm(partial)
    # Overflow is detected and reported below, not left to hardware warnings.
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, N + 1):
            power = power_prev @ op
            if not np.isfinite(power).all():
                raise NumericalError(f"power overflow at n = {n}")
            r[n - 1] = n * _inf_norm(power - power_prev)
            if n < N:
                partial = partial + power
                S[n] = _inf_norm(partial)
            power_prev = power
    return S, r


def companion_profiles(op: CompanionOperator, checkpoints: Sequence[int]
                       ) -> Tuple[np.ndarray, np.ndarray]:
    """Summability and Ritt values of a companion operator at checkpoints.

    Exploits the shift structure: row i of op^j equals the first row of
    op^{j-i} (a unit vector when j < i), so powers and partial sums are
    generated by an O(m) vector recurrence and only sliding windows of the
    last m+2 first rows / partial-sum rows are kept.  Total cost is
    O(max(checkpoints) * m) plus O(m^2) per checkpoint, which is what makes
    six-figure horizons affordable.

    Returns (S_values, r_values) aligned with the sorted deduplicated
    checkpoint list; entries match the dense :func:`stability_profiles`
    exactly to rounding.
    """
    ks = sorted(set(int(k) for k in checkpoints))
    if not ks or ks[0] < 1:
        raise ParameterError("checkpoints must be positive integers")
    m = op.m
    d = m + 1
    alpha, beta = op.alpha, op.beta
    N = ks[-1]
    want = set(ks)

    # r_j = first row of op^j, B_j = sum_{q<=j} r_q.  Window offset i from
    # the newest entry holds index j_current - i.
    r_win: deque = deque(maxlen=m + 2)
    B_win: deque = deque(maxlen=m + 2)
    r0 = np.zeros(d)
    r0[0] = 1.0
    r_win.appendleft(r0)
    B_win.appendleft(r0.copy())
    S_out: dict = {}
    r_out: dict = {}

    def s_value(k: int) -> float:
        # ||A_{k-1}||_inf; row i = sum of units e_{i-l}, l < min(i,k),
        # plus B_{k-1-i} when k-1 >= i.  Called right after B_{k-1} lands
        # in the window, so B_{k-1-i} sits at offset i.
        best = 0.0
        for i in range(d):
            vec = np.zeros(d)
            nunits = min(i, k)
            if nunits > 0:
                vec[i - nunits + 1:i + 1] = 1.0
            if k - 1 >= i:
                vec = vec + B_win[i]
            best = max(best, float(np.abs(vec).sum()))
        return best

    def ritt_value(n: int) -> float:
        # n * ||op^n - op^{n-1}||_inf; rows with i >= n differ by two unit
        # vectors (1-norm exactly 2).  Called right after r_n lands in the
        # window, so r_{n-i} sits at offset i.
        best = 2.0 if n <= m else 0.0
        for i in range(min(n - 1, m) + 1):
            vec = r_win[i] - r_win[i + 1]
            best = max(best, float(np.abs(vec).sum()))
        return n * best

    if 1 in want:
        S_out[1] = s_value(1)
    cur = r0
    B_cur = r0.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(1, N + 1):
            new = np.empty(d)
            new[0] = alpha * cur[0] + cur[1]
            new[1:-1] = cur[2:]
            new[-1] = beta * cur[0]
            cur = new
            if not np.isfinite(cur[0]):
                raise NumericalError(f"power overflow at n = {j}")
            B_cur = B_cur + cur
            r_win.appendleft(cur)
            B_win.appendleft(B_cur)
            if j in want:
                r_out[j] = ritt_value(j)
            if j + 1 in want:
                S_out[j + 1] = s_value(j + 1)
    S_vals = np.array([S_out[k] for k in ks], dtype=float)
    r_vals = np.array([r_out[k] for k in ks], dtype=float)
    return S_vals, r_vals


def power_norm_sum(op: np.ndarray, N: int) -> float:
    """Sum of power norms sum_{n<N} ||op^n||_inf by repeated multiplication.

    Distinct from the partial-sum norms of :func:`stability_profiles`: this
    is the series whose uniform boundedness the modulus heuristic
    1/(1 - rho) tries to estimate.  Dense; test-scale only.
    """
    op = np.asarray(op, dtype=float)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ParameterError("operator must be a square matrix")
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    power = np.eye(op.shape[0])
    total = 1.0
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, N):
            power = power @ op
            if not np.isfinite(power).all():
                raise NumericalError(f"power overflow at n = {n}")
            total += _inf_norm(power)
    return total


def companion_power_norm_sum(op: CompanionOperator, N: int) -> float:
    """Sum of power norms sum_{n<N} ||op^n||_inf for a companion operator.

    Row i of op^n is the first row of op^{n-i} (or a unit vector), so
    ||op^n||_inf is the maximum of the last m+1 first-row 1-norms; one O(m)
    recurrence plus a circular window of norms covers six-figure N.
    """
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    m = op.m
    d = m + 1
    cur = np.zeros(d)
    cur[0] = 1.0
    norms = np.empty(d)
    norms[0] = 1.0
    total = 1.0
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(1, N):
            new = np.empty(d)
            new[0] = op.alpha * cur[0] + cur[1]
            new[1:-1] = cur[2:]
            new[-1] = op.beta * cur[0]
            cur = new
            if not np.isfinite(cur[0]):
                raise NumericalError(f"power overflow at n = {j}")
            norms[j % d] = float(np.abs(cur).sum())
            total += float(norms[:j + 1].max()) if j < m else float(norms.max())
    return total


def verify_telescoping(R_list: Sequence[np.ndarray],
                       P_list: Sequence[np.ndarray],
                       return_scale: bool = False):
    """Residual of the time-ordered telescoping identity.

    Checks prod R - prod P = sum_k R_{n-1:k+1} (R_k - P_k) P_{k-1:0}
    entrywise; the result must vanish to rounding.  With ``return_scale``
    the largest intermediate magnitude is returned as well.
    """
    if len(R_list) != len(P_list) or not R_list:
        raise ParameterError("need equally many R and P factors, at least one")
    d = R_list[0].shape[0]
    for mat in (*R_list, *P_list):
        if mat.shape != (d, d):
            raise ParameterError("all factors must share one square dimension")
    n = len(R_list)
    # Suffix products of R (R_{n-1:k}) and prefix products of P (P_{k-1:0}).
    suffix = [np.eye(d)]
    for k in range(n - 1, -1, -1):
        suffix.append(suffix[-1] @ R_list[k])
    suffix.reverse()  # suffix[k] = R_{n-1} ... R_k, suffix[n] = I
    prefix = [np.eye(d)]
    for k in range(n):
        prefix.append(P_list[k] @ prefix[-1])
    lhs = suffix[0] - prefix[n]
    rhs = np.zeros((d, d))
    for k in range(n):
        rhs += suffix[k + 1] @ (R_list[k] - P_list[k]) @ prefix[k]
    residual = float(np.abs(lhs - rhs).max())
    if not return_scale:
        return residual
    scale = max(
        float(np.abs(lhs).max()),
        max(float(np.abs(s).max()) for s in suffix),
        max(float(np.abs(p).max()) for p in prefix),
        1.0,
    )
    return residual, scale


def verify_abel(T: np.ndarray, tau_list: Sequence[np.ndarray],
                return_scale: bool = False):
    """Residual of the summation-by-parts identity for matrix powers.

    Checks sum_{k=0}^{n-1} T^{n-1-k} tau_k = A_{n-1}
    - sum_{m=1}^{n-1} (T^{m-1} - T^m) A_{n-1-m}, with A_k the partial sums
    of the tau vectors.  Both sides are evaluated directly.
    """
    T = np.asarray(T, dtype=float)
    taus = [np.asarray(v, dtype=float) for v in tau_list]
    if not taus:
        raise ParameterError("need at least one tau vector")
    d = T.shape[0]
    if T.shape != (d, d) or any(v.shape != (d,) for v in taus):
        raise ParameterError("dimension mismatch between T and tau vectors")
    n = len(taus)
    powers = [np.eye(d)]
    for _ in range(n):
        powers.append(powers[-1] @ T)
    partial = np.cumsum(taus, axis=0)  # partial[k] = A_k
    lhs = sum(powers[n - 1 - k] @ taus[k] for k in range(n))
    rhs = partial[n - 1].copy()
    for mm in range(1, n):
        rhs -= (powers[mm - 1] - powers[mm]) @ partial[n - 1 - mm]
    residual = float(np.abs(lhs - rhs).max())
    if not return_scale:
        return residual
    scale = max(
        float(np.abs(lhs).max()),
        max(float(np.abs(p).max()) for p in powers),
        float(np.abs(partial).max()),
        1.0,
    )
    return residual, scale
