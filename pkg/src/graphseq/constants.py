"""Excursion-area laws, the absorbing area chain, and the growth constants.

The area of the first excursion of the lazy walk away from zero has
probability generating function g(x, y) (x marks area, y marks length)
satisfying

    g(x, y) = x y^2 / (16 (1 - x y / 2 - g(x, x y)))

and every substituted term has strictly higher x-degree, so the truncation to
any x-order is computed exactly.  Summing signed excursion areas gives a
heavy-tailed walk; rho is the probability that this walk returns to zero
before going negative, obtained here by solving an absorbing chain on
{-, 0, 1, ..., n-1, *} with rigorous lower/upper bounds and a Richardson
extrapolation of the estimates in 1/n.  The leading constant of the graphic
sequence count is then Gamma(3/4) / (4 pi sqrt(2 (1 - rho))).

The simple +/-1 walk admits the same treatment without the flat-step term:
g_s(x, y) = x y^2 / (4 (1 - g_s(x, x y))); its excursion-area law feeds the
same chain to produce the bridge-persistence constant of the simple walk.
An independent first-passage dynamic program over (height, spent area)
cross-checks both generating functions and is the scalable source of the
probabilities at large truncation orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

LONG = np.longdouble

#: Gamma(3/4); the test suite re-derives it from an independent evaluation.
GAMMA_3_4 = 1.2254167024651776

EXACT_CHAIN_LIMIT = 8
DEFAULT_SWEEP_TOL = 1e-12
MAX_SWEEPS = 200_000


class ChainConvergenceError(Exception):
    """The hitting-probability sweep did not reach the residual target."""


# ---------------------------------------------------------------------------
# generating function


@dataclass(frozen=True)
class TruncatedSeries:
    """Bivariate series in x (area) and y (length), truncated at x-degree K."""

    K: int
    coefficients: dict  # (i, j) -> Fraction, i >= 1, j >= 2

    def x_coefficient(self, i: int) -> dict:
        return {j: c for (ii, j), c in self.coefficients.items() if ii == i}

    def area_weights(self) -> list:
        """[x^i] at y = 1 for i = 0..K (index 0 is always zero)."""
        out = [Fraction(0)] * (self.K + 1)
        for (i, _), c in self.coefficients.items():
            out[i] += c
        return out

    def eval_truncated(self, x: Fraction, y: Fraction) -> Fraction:
        return sum(
            (c * x**i * y**j for (i, j), c in self.coefficients.items()),
            Fraction(0),
        )


def series_g(K: int, kind: str = "lazy") -> TruncatedSeries:
    """Excursion-area/length generating function truncated at x-degree K.

    Coefficients are extracted degree by degree from the defining relation
    (lazy)  g = x y^2 / 16 + (x y / 2) g + g * g(x, x y)
    (simple) g = x y^2 / 4 + g * g(x, x y)
    where [x^q] g(x, x y) only involves x-degrees <= q - 2.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if kind == "lazy":
        seed = Fraction(1, 16)
        flat = True
    elif kind == "simple":
        seed = Fraction(1, 4)
        flat = False
    else:
        raise ValueError(f"unknown walk kind {kind!r}")

    # per_x[i] : dict j -> Fraction
    per_x = [dict() for _ in range(K + 1)]
    for i in range(1, K + 1):
        acc: dict = {}
        if i == 1:
            acc[2] = seed
        if flat:
            for j, c in per_x[i - 1].items():
                acc[j + 1] = acc.get(j + 1, Fraction(0)) + c / 2
        for p in range(1, i - 2):
            q = i - p
            # [x^q] g(x, xy) = sum_j coefficient(q - j, j) y^j
            for j_sub in range(2, q):
                c_sub = per_x[q - j_sub].get(j_sub)
                if c_sub:
                    for j, c in per_x[p].items():
                        acc[j + j_sub] = acc.get(j + j_sub, Fraction(0)) + c * c_sub
        per_x[i] = {j: c for j, c in acc.items() if c}

    coeffs = {(i, j): c for i in range(1, K + 1) for j, c in per_x[i].items()}
    return TruncatedSeries(K, coeffs)


# ---------------------------------------------------------------------------
# excursion-area pmf


@dataclass
class AreaPmf:
    """P(first excursion positive with area i) for i = 1..K, plus tail masses.

    The full signed step law of the reduced area walk is: 0 with the flat
    mass (1/2 for lazy, 0 for simple), +/-i each with weight p[i], and the
    remaining +/-tail of sign_mass - sum(p).
    """

    K: int
    p: Sequence  # index 0 unused; Fractions (exact) or longdoubles
    kind: str
    exact: bool

    @property
    def sign_mass(self):
        if self.exact:
            return Fraction(1, 4) if self.kind == "lazy" else Fraction(1, 2)
        return LONG(0.25) if self.kind == "lazy" else LONG(0.5)

    @property
    def zero_mass(self):
        if self.exact:
            return Fraction(1, 2) if self.kind == "lazy" else Fraction(0)
        return LONG(0.5) if self.kind == "lazy" else LONG(0.0)

    @property
    def pos_tail(self):
        return self.sign_mass - sum(self.p[1:])


def _area_pmf_dp(K: int, kind: str, exact: bool):
    """First-passage DP: probability the excursion spends exactly i of area.

    States are (height >= 1, area spent); every transition adds the new
    height, so the area strictly increases and a single pass in area order
    suffices.  The first up-step carries the excursion's positivity weight.
    """
    if kind == "lazy":
        up, flat, down = (Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)) if exact else (
            LONG(0.25), LONG(0.5), LONG(0.25))
    elif kind == "simple":
        up, flat, down = (Fraction(1, 2), Fraction(0), Fraction(1, 2)) if exact else (
            LONG(0.5), LONG(0.0), LONG(0.5))
    else:
        raise ValueError(f"unknown walk kind {kind!r}")
    hmax = int(math.isqrt(2 * K)) + 2
    zero = Fraction(0) if exact else LONG(0.0)
    if exact:
        live = [[zero] * (hmax + 2) for _ in range(K + 1)]
    else:
        live = np.zeros((K + 1, hmax + 2), dtype=LONG)
    if K >= 1:
        live[1][1] = up
    out = [zero] * (K + 1)
    for a in range(1, K + 1):
        row = live[a]
        out[a] = row[1] * down
        for h in range(1, hmax + 1):
            m = row[h]
            if not m:
                continue
            a_up = a + h + 1
            if a_up <= K:
                live[a_up][h + 1] += m * up
            if flat:
                a_flat = a + h
                if a_flat <= K:
                    live[a_flat][h] += m * flat
            if h >= 2:
                a_down = a + h - 1
                if a_down <= K:
                    live[a_down][h - 1] += m * down
    return out


def area_pmf(K: int, kind: str = "lazy", method: str = "gf", exact: bool | None = None) -> AreaPmf:
    """Excursion-area weights by generating function or by first-passage DP.

    The two methods agree exactly wherever both run; gf is always exact and
    practical to a few thousand terms, dp scales much further and defaults to
    80-bit floats above K = 128.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if method == "gf":
        if exact is False:
            raise ValueError("the gf method is always exact")
        weights = series_g(K, kind).area_weights()
        return AreaPmf(K, weights, kind, exact=True)
    if method == "dp":
        if exact is None:
            exact = K <= 128
        weights = _area_pmf_dp(K, kind, exact)
        if not exact:
            weights = np.asarray(weights, dtype=LONG)
        return AreaPmf(K, weights, kind, exact=exact)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# the absorbing chain


@dataclass
class ChainSpec:
    """Absorbing chain on {-, 0, 1, ..., n-1, *} driven by signed area steps.

    From state i the walk adds a signed excursion area; landing exactly on 0
    is the success we are measuring, going below 0 absorbs at '-', and
    landing at n or above absorbs at '*'.  Truncation tails are routed to '*'
    and '-' respectively, which preserves both bounds.
    """

    n: int
    pmf: AreaPmf

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("grid size must be >= 2")
        if self.pmf.K < self.n:
            raise ValueError("need K >= n so no interior mass is reassigned")

    @property
    def states(self) -> tuple:
        return ("-",) + tuple(range(self.n)) + ("*",)

    def transition_matrix(self) -> list:
        """Dense exact matrix over ('-', 0, .., n-1, '*'); rows sum to 1."""
        if not self.pmf.exact:
            raise ValueError("dense matrix requires an exact pmf")
        n, p = self.n, self.pmf.p
        sign, zero_mass = self.pmf.sign_mass, self.pmf.zero_mass
        size = n + 2
        rows = [[Fraction(0)] * size for _ in range(size)]
        rows[0][0] = Fraction(1)
        rows[size - 1][size - 1] = Fraction(1)
        for i in range(0, n):
            r = rows[i + 1]
            below = sign - sum(p[1 : i + 1])        # steps < -i
            above = sign - sum(p[1 : n - i])        # steps >= n - i
            r[0] = below
            r[size - 1] = above
            r[i + 1] += zero_mass
            for j in range(0, n):
                d = abs(j - i)
                if d >= 1:
                    r[j + 1] += p[d]
        return rows


def _landing_vectors(n: int, pmf: AreaPmf):
    """(to-zero, to-star, from-start) landing masses for transient states 1..n-1."""
    p = pmf.p
    sign = pmf.sign_mass
    b_zero = [p[i] for i in range(1, n)]
    b_star = [sign - sum(p[1 : n - i]) for i in range(1, n)]
    start_star = sign - sum(p[1:n])
    return b_zero, b_star, start_star


def _solve_exact(matrix: list, rhs: list) -> list:
    """Gaussian elimination over Fractions (small systems only)."""
    m = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(m):
        piv = next(r for r in range(col, m) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col]
        a[col] = [v / inv for v in a[col]]
        for r in range(m):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[r][m] for r in range(m)]


def chain_hitting_exact(n: int, pmf: AreaPmf, amalgamate: bool = False) -> dict:
    """Exact hitting probabilities h[i -> 0] and h[i -> *] for i = 1..n-1.

    Returns {"zero": [...], "star": [...]} (star omitted when amalgamated).
    """
    if not pmf.exact:
        raise ValueError("exact solve requires an exact pmf")
    if n > EXACT_CHAIN_LIMIT:
        raise ValueError(f"exact solve supports n <= {EXACT_CHAIN_LIMIT}")
    p = pmf.p
    zero_mass = pmf.zero_mass
    b_zero, b_star, _ = _landing_vectors(n, pmf)
    m = n - 1
    system = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        system[i][i] = Fraction(1) - zero_mass
        for j in range(m):
            if j != i:
                system[i][j] = -p[abs(j - i)]
        if amalgamate:
            system[i][m - 1] -= b_star[i]
    h_zero = _solve_exact(system, b_zero)
    if amalgamate:
        return {"zero": h_zero}
    h_star = _solve_exact(system, b_star)
    return {"zero": h_zero, "star": h_star}


def _sweep_solve(kernel, rhs, diag, tol, amalg_extra=None):
    h = np.zeros(len(rhs), dtype=LONG)
    m = len(rhs)
    for sweep in range(MAX_SWEEPS):
        interior = np.convolve(h, kernel)[m - 1 : 2 * m - 1]
        if amalg_extra is not None:
            interior = interior + amalg_extra * h[m - 1]
        h_next = (rhs + interior) / diag
        residual = float(np.max(np.abs(h_next - h)))
        h = h_next
        if residual < tol:
            return h, sweep + 1
    raise ChainConvergenceError(
        f"no convergence to {tol} within {MAX_SWEEPS} sweeps (n = {m + 1})"
    )


def chain_hitting_iterative(
    n: int, pmf: AreaPmf, amalgamate: bool = False, tol: float = DEFAULT_SWEEP_TOL
) -> dict:
    """Hitting probabilities by diagonally-preconditioned Jacobi sweeps.

    The interior operator is Toeplitz (the step law only depends on j - i),
    so one sweep is a single convolution.  The operator is non-negative and
    the iteration starts from zero, so iterates increase monotonically toward
    the solution: a truncated run still yields valid lower bounds.
    """
    p = np.asarray(
        [float(v) if isinstance(v, Fraction) else v for v in pmf.p], dtype=LONG
    )
    zero_mass = LONG(float(pmf.zero_mass)) if pmf.exact else pmf.zero_mass
    sign = LONG(float(pmf.sign_mass)) if pmf.exact else pmf.sign_mass
    m = n - 1
    kernel = np.zeros(2 * m - 1, dtype=LONG)
    for d in range(1, m):
        kernel[m - 1 + d] = p[d]
        kernel[m - 1 - d] = p[d]
    b_zero = p[1:n].copy()
    cum = np.cumsum(p[1:], dtype=LONG)
    b_star = np.empty(m, dtype=LONG)
    for i in range(1, n):
        top = n - i - 1
        b_star[i - 1] = sign - (cum[top - 1] if top >= 1 else LONG(0.0))
    diag = LONG(1.0) - zero_mass
    out = {}
    if amalgamate:
        h_zero, sweeps = _sweep_solve(kernel, b_zero, diag, tol, amalg_extra=b_star)
        out["zero"] = h_zero
        out["sweeps"] = sweeps
    else:
        h_zero, s1 = _sweep_solve(kernel, b_zero, diag, tol)
        h_star, s2 = _sweep_solve(kernel, b_star, diag, tol)
        out["zero"] = h_zero
        out["star"] = h_star
        out["sweeps"] = s1 + s2
    return out


@dataclass
class RhoEstimate:
    """Bounds (or a point estimate) for a return-before-negative probability."""

    lower: object
    upper: object
    mode: str  # "exact-rational" | "iterative" | "amalgamated"
    n: int
    K: int
    kind: str

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError("lower bound exceeds upper bound")

    @property
    def rigorous(self) -> bool:
        return self.mode in ("exact-rational", "iterative")

    @property
    def estimate(self):
        return self.lower if self.mode == "amalgamated" else (self.lower + self.upper) / 2


def rho_bounds(n: int, pmf: AreaPmf, tol: float = DEFAULT_SWEEP_TOL) -> RhoEstimate:
    """Rigorous bounds: P(hit 0) <= rho <= P(hit 0) + P(hit *).

    Positive tail mass is routed to '*' and negative tail mass to '-', which
    can only widen the bracket, never invalidate it.
    """
    ChainSpec(n, pmf)  # validates the grid/truncation contract
    if pmf.exact and n <= EXACT_CHAIN_LIMIT:
        h = chain_hitting_exact(n, pmf)
        _, _, start_star = _landing_vectors(n, pmf)
        lower = pmf.zero_mass + sum(
            pmf.p[j] * h["zero"][j - 1] for j in range(1, n)
        )
        to_star = start_star + sum(pmf.p[j] * h["star"][j - 1] for j in range(1, n))
        return RhoEstimate(lower, lower + to_star, "exact-rational", n, pmf.K, pmf.kind)
    h = chain_hitting_iterative(n, pmf, tol=tol)
    p = np.asarray(
        [float(v) if isinstance(v, Fraction) else v for v in pmf.p], dtype=LONG
    )
    zero_mass = LONG(float(pmf.zero_mass)) if pmf.exact else pmf.zero_mass
    sign = LONG(float(pmf.sign_mass)) if pmf.exact else pmf.sign_mass
    lower = zero_mass + np.dot(p[1:n], h["zero"])
    start_star = sign - np.sum(p[1:n])
    to_star = start_star + np.dot(p[1:n], h["star"])
    return RhoEstimate(float(lower), float(lower + to_star), "iterative", n, pmf.K, pmf.kind)


def rho_amalgamated(n: int, pmf: AreaPmf, tol: float = DEFAULT_SWEEP_TOL) -> RhoEstimate:
    """Point estimate with states n-1 and '*' merged; NOT a rigorous bound.

    Merging is only sound if the hit-zero probability decreases in the start
    state, which is unproven, so the result is flagged non-rigorous.
    """
    ChainSpec(n, pmf)  # validates the grid/truncation contract
    if pmf.exact and n <= EXACT_CHAIN_LIMIT:
        h = chain_hitting_exact(n, pmf, amalgamate=True)
        _, _, start_star = _landing_vectors(n, pmf)
        est = pmf.zero_mass + sum(pmf.p[j] * h["zero"][j - 1] for j in range(1, n))
        est = est + start_star * h["zero"][n - 2]
        return RhoEstimate(est, est, "amalgamated", n, pmf.K, pmf.kind)
    h = chain_hitting_iterative(n, pmf, amalgamate=True, tol=tol)
    p = np.asarray(
        [float(v) if isinstance(v, Fraction) else v for v in pmf.p], dtype=LONG
    )
    zero_mass = LONG(float(pmf.zero_mass)) if pmf.exact else pmf.zero_mass
    sign = LONG(float(pmf.sign_mass)) if pmf.exact else pmf.sign_mass
    est = zero_mass + np.dot(p[1:n], h["zero"])
    est = est + (sign - np.sum(p[1:n])) * h["zero"][n - 2]
    return RhoEstimate(float(est), float(est), "amalgamated", n, pmf.K, pmf.kind)


# ---------------------------------------------------------------------------
# extrapolation and the constants


def richardson(points: Sequence) -> float:
    """Neville extrapolation of (n, estimate) points to 1/n -> 0.

    Recovers a + b/n models exactly from two points and eliminates one more
    power of 1/n per additional point.
    """
    pts = list(points)
    if len(pts) < 2:
        raise ValueError("need at least two points")
    ns = [n for n, _ in pts]
    if len(set(ns)) != len(ns):
        raise ValueError("duplicate n in extrapolation points")
    tab = [v for _, v in pts]
    if all(isinstance(v, Fraction) for v in tab):
        ts = [Fraction(1, n) for n in ns]
    else:
        ts = [1.0 / n for n in ns]
    m = len(tab)
    for level in range(1, m):
        nxt = []
        for i in range(m - level):
            t0, t1 = ts[i], ts[i + level]
            nxt.append((t0 * tab[i + 1] - t1 * tab[i]) / (t0 - t1))
        tab = nxt
    return tab[0]


def c_from_rho(rho: float) -> float:
    """Leading constant Gamma(3/4) / (4 pi sqrt(2 (1 - rho)))."""
    if not 0 <= rho < 1:
        raise ValueError("rho must lie in [0, 1)")
    return GAMMA_3_4 / (4 * math.pi * math.sqrt(2 * (1 - rho)))


def c_empirical(counts: Sequence[int]) -> list:
    """(n, count * n^0.75 / 4^n) for each n; entry i of counts is n = i + 1.

    The big-integer ratio is formed exactly and rounded once, so no
    intermediate overflows regardless of how large the counts are.
    """
    out = []
    for i, g in enumerate(counts):
        n = i + 1
        out.append((n, float(Fraction(g, 4**n)) * n**0.75))
    return out


def parity_gap(g_counts: Sequence[int], h_counts: Sequence[int]) -> list:
    """(n, (G - H) * n^2.5 / 4^n): the scaled even/odd imbalance."""
    if len(g_counts) != len(h_counts):
        raise ValueError("count lists must have equal length")
    out = []
    for i, (g, h) in enumerate(zip(g_counts, h_counts)):
        n = i + 1
        out.append((n, float(Fraction(g - h, 4**n)) * n**2.5))
    return out
