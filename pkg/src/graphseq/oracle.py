"""Brute-force ground truth for graphic-sequence counting.

Everything here works directly on degree sequences n-1 >= d_1 >= ... >= d_n
>= 0: exhaustive enumeration, two independent graphicality tests, the
deterministic sequence-to-walk mapping, and an exhaustive count of
sign/permutation ballot arrangements.  These are the oracles the fast layer
recursion is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence


def check_degree_sequence(d: Sequence[int]) -> None:
    n = len(d)
    if n < 1:
        raise ValueError("empty degree sequence")
    if d[0] > n - 1 or d[-1] < 0:
        raise ValueError(f"entries must lie in [0, {n - 1}]: {d}")
    if any(d[i] < d[i + 1] for i in range(n - 1)):
        raise ValueError(f"sequence must be non-increasing: {d}")


@dataclass(frozen=True)
class ConjugateData:
    """Conjugate view of a degree sequence.

    dprime[i-1] counts the entries >= i; s[i-1] = (n-1) - d_i and
    sprime[i-1] = n - dprime[i-1] are the complement sums entering the
    dominating condition; ell is the largest j with d_j >= j.
    """

    dprime: tuple
    s: tuple
    sprime: tuple
    ell: int


def conjugate(d: Sequence[int]) -> ConjugateData:
    n = len(d)
    dprime = tuple(sum(1 for x in d if x >= i) for i in range(1, n + 1))
    s = tuple((n - 1) - x for x in d)
    sprime = tuple(n - x for x in dprime)
    ell = 0
    for j in range(n):
        if d[j] >= j + 1:
            ell = j + 1
    return ConjugateData(dprime, s, sprime, ell)


def is_graphic(d: Sequence[int]) -> tuple:
    """(dominates, even): the sequence is graphic iff both are true.

    `dominates` holds when sum(s[:k]) >= sum(sprime[:k]) for every k <= ell.
    """
    check_degree_sequence(d)
    c = conjugate(d)
    s_run = sp_run = 0
    dominates = True
    for k in range(c.ell):
        s_run += c.s[k]
        sp_run += c.sprime[k]
        if s_run < sp_run:
            dominates = False
            break
    return dominates, sum(d) % 2 == 0


def havel_hakimi(d: Sequence[int]) -> bool:
    """Graphicality by repeated reduction: independent of the conjugate test."""
    check_degree_sequence(d)
    seq = sorted(d, reverse=True)
    while seq and seq[0] > 0:
        first = seq.pop(0)
        if first > len(seq):
            return False
        for i in range(first):
            seq[i] -= 1
            if seq[i] < 0:
                return False
        seq.sort(reverse=True)
    return True


def enumerate_sequences(n: int) -> Iterator[tuple]:
    """Every sequence n-1 >= d_1 >= ... >= d_n >= 0, exactly once."""
    if n < 1:
        raise ValueError("n must be >= 1")
    d = [0] * n

    def rec(m: int, bound: int) -> Iterator[tuple]:
        if m == n:
            yield tuple(d)
            return
        for v in range(bound, -1, -1):
            d[m] = v
            yield from rec(m + 1, v)

    yield from rec(0, n - 1)


# ---------------------------------------------------------------------------
# sequence -> walk


@dataclass(frozen=True)
class MappedWalk:
    """Walk image of a degree sequence.

    steps lie in {-1, 0, +1}; positions()[k] is the walk height after k+1
    steps; areas() are the running integrals whose non-negativity is the
    dominating condition.  One walk stands for 2**lazy_steps sequences.
    """

    steps: tuple
    end_value: int
    lazy_steps: int

    def positions(self) -> list:
        out, y = [], 0
        for s in self.steps:
            y += s
            out.append(y)
        return out

    def areas(self) -> list:
        out, a = [], 0
        for y in self.positions():
            a += y
            out.append(a)
        return out


def to_walk(d: Sequence[int]) -> MappedWalk:
    """Deterministic mapping of a degree sequence to its certifying walk.

    The sequence is drawn as a staircase lattice path from (0, n-1) to (n, 0);
    the path's first half and its reflected reversal walk in lockstep, and the
    half-sum of their +/-1 step codes is a walk with steps in {-1, 0, +1} and
    n-1 steps ending in {0, -1}.  The sequence dominates iff the walk's
    running integral stays non-negative, and the degree sum has the parity of
    the final integral.
    """
    check_degree_sequence(d)
    n = len(d)
    down, right = True, False
    path = [down] * (n - 1 - d[0]) + [right]
    for i in range(1, n):
        path += [down] * (d[i - 1] - d[i]) + [right]
    path += [down] * d[-1]
    assert len(path) == 2 * n - 1

    first = path[: n - 1] + [down]
    reflected = [right if step is down else down for step in reversed(path)][:n]

    steps = []
    lazy = 0
    for w_step, r_step in zip(first[: n - 1], reflected[: n - 1]):
        z = 1 if w_step is down else -1
        zp = -1 if r_step is down else 1
        step = (z + zp) // 2
        if step == 0:
            lazy += 1
        steps.append(step)
    end = sum(steps)
    assert end in (0, -1)
    return MappedWalk(tuple(steps), end, lazy)


# ---------------------------------------------------------------------------
# exhaustive counts

# tail_table(n)[r][v][p] = number of non-increasing sequences of length r with
# entries in [0, v] and sum parity p


def tail_table(n: int) -> list:
    table = [[[0, 0] for _ in range(n)] for _ in range(n + 1)]
    for v in range(n):
        table[0][v][0] = 1
    for r in range(1, n + 1):
        for v in range(n):
            pv = v & 1
            eq = table[r - 1][v]
            cur = table[r][v]
            cur[0] = eq[pv]
            cur[1] = eq[1 - pv]
            if v >= 1:
                below = table[r][v - 1]
                cur[0] += below[0]
                cur[1] += below[1]
    return table


def brute_counts(n: int) -> tuple:
    """(G, H, D): graphic, dominating-but-odd, and dominating counts.

    Recursive descent over non-increasing sequences keeping, per prefix, the
    still-undecided dominating conditions with their slack
    (k(k-1) + sum_{j>k} min(k, d_j) - sum_{j<=k} d_j so far).  A condition
    whose slack is non-negative can never fail later and is dropped; a
    condition that cannot recover even if every later entry contributes its
    maximum kills the subtree.  Once no condition is undecided and no new one
    can arise, the whole subtree is counted from the tail table in O(1).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    table = tail_table(n)
    counts = [0, 0]  # indexed by total parity

    def rec(m: int, prev: int, total: int, active: list) -> None:
        if not active and prev <= m:
            tails = table[n - m][prev]
            counts[total & 1] += tails[0]
            counts[1 - (total & 1)] += tails[1]
            return
        if m == n:
            # all still-active conditions have negative slack: not dominating
            return
        rem_after = n - m - 1
        for v in range(prev, -1, -1):
            survived = []
            dead = False
            for k, slack in active:
                gain = k if v >= k else v
                slack += gain
                if slack + rem_after * gain < 0:
                    dead = True
                    break
                if slack < 0:
                    survived.append((k, slack))
            if dead:
                break  # the slack bound is monotone in v: smaller v also dies
            k_new = m + 1
            if v >= k_new:
                slack = k_new * (k_new - 1) - (total + v)
                if slack + rem_after * k_new < 0:
                    continue  # smaller v may recover since slack grows as v falls
                if slack < 0:
                    survived = survived + [(k_new, slack)]
            rec(m + 1, v, total + v, survived)

    rec(0, n - 1, 0, [])
    return counts[0], counts[1], counts[0] + counts[1]


def brute_counts_naive(n: int) -> tuple:
    """Same counts by checking every sequence; for cross-validating the fast path."""
    g = h = 0
    for d in enumerate_sequences(n):
        dominates, even = is_graphic(d)
        if dominates:
            if even:
                g += 1
            else:
                h += 1
    return g, h, g + h


# ---------------------------------------------------------------------------
# ballot arrangements


def ballot_count(x: Sequence) -> int:
    """Number of (permutation, sign) pairs keeping all prefix sums >= 0.

    Exhaustive over all n! * 2**n arrangements of the positive weights x; for
    sum-distinct x the count is (2n-1)!!, and it can only be larger when
    subset-sum ties create extra prefix equalities.
    """
    from itertools import permutations

    x = tuple(x)
    n = len(x)
    if n > 8:
        raise ValueError("exhaustive ballot count is limited to n <= 8")
    if any(v <= 0 for v in x):
        raise ValueError("weights must be strictly positive")
    count = 0
    for perm in permutations(range(n)):
        # depth-first over sign choices with prefix pruning
        stack = [(0, 0)]  # (index, prefix sum)
        while stack:
            i, acc = stack.pop()
            if i == n:
                count += 1
                continue
            v = x[perm[i]]
            if acc + v >= 0:
                stack.append((i + 1, acc + v))
            if acc - v >= 0:
                stack.append((i + 1, acc - v))
    return count


def double_factorial_odd(n: int) -> int:
    """(2n-1)!! = 1 * 3 * ... * (2n-1)."""
    out = 1
    for k in range(3, 2 * n, 2):
        out *= k
    return out


def is_sum_distinct(x: Iterable[Fraction]) -> bool:
    sums = {Fraction(0)}
    for v in x:
        new = set()
        for s in sums:
            t = s + v
            if t in sums or t in new:
                return False
            new.add(t)
        sums |= new
    return True


def random_sum_distinct_vector(n: int, rng, max_denominator: int = 64) -> tuple:
    """Strictly positive rationals with pairwise-distinct subset sums."""
    while True:
        x = tuple(
            Fraction(int(rng.integers(1, 8 * max_denominator)), max_denominator)
            for _ in range(n)
        )
        if is_sum_distinct(x):
            return x
