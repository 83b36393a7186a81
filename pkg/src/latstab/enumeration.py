"""Complete depth-first enumeration of short and close lattice vectors.

Fincke-Pohst style search over integer coordinates against the Gram-Schmidt
quadratic form. Callers are expected to pass reduced bases (the search stays
complete on any basis, just slower). Node budgets are hard errors, never
silent truncation.
"""

from __future__ import annotations

from math import ceil, floor, gcd, sqrt

from .errors import BudgetExceededError, DegenerateBasisError
from .reduction import dot, gso

DEFAULT_BUDGET = 10**8

# relative slack on squared radii inside the search tree; authoritative
# acceptance happens in the callers on recomputed norms
TREE_SLACK = 1 + 1e-9


class NodeCounter:
    """Mutable node budget shared across several enumeration calls."""

    __slots__ = ("nodes", "budget")

    def __init__(self, budget: int = DEFAULT_BUDGET):
        self.nodes = 0
        self.budget = budget

    def spend(self, amount: int) -> None:
        self.nodes += amount
        if self.nodes > self.budget:
            raise BudgetExceededError(
                f"enumeration exceeded its node budget of {self.budget}"
            )


def short_vectors(rows, radius: float, counter: NodeCounter | None = None,
                  half: bool = True):
    """All nonzero x with |x @ rows| <= radius (up to tree slack).

    With half=True one representative per +-pair is produced, normalized so
    the highest-index nonzero coordinate is positive. Returns a list of
    (coords, norm_sq) pairs in no particular order; norm_sq comes from the
    search recurrence, so callers should re-check borderline vectors against
    their own exact norms.
    """
    if counter is None:
        counter = NodeCounter()
    m = len(rows)
    if m == 0 or radius <= 0.0:
        return []
    mu, c = gso(rows)
    if min(c) <= 0.0:
        raise DegenerateBasisError("dependent rows passed to enumeration")
    r2 = radius * radius * TREE_SLACK
    out: list[tuple[tuple[int, ...], float]] = []
    x = [0] * m

    def descend(i: int, rho: float, top_zero: bool) -> None:
        if i < 0:
            out.append((tuple(x), rho))
            return
        center = 0.0
        for j in range(i + 1, m):
            xj = x[j]
            if xj:
                center -= xj * mu[j][i]
        width = sqrt(max(r2 - rho, 0.0) / c[i]) + 1e-12
        lo = ceil(center - width)
        hi = floor(center + width)
        if half and top_zero:
            lo = max(lo, 0)
        if hi < lo:
            return
        counter.spend(hi - lo + 1)
        for xi in range(lo, hi + 1):
            d = xi - center
            rho2 = rho + d * d * c[i]
            if rho2 <= r2:
                if i == 0 and xi == 0 and top_zero:
                    continue  # the zero vector
                x[i] = xi
                descend(i - 1, rho2, top_zero and xi == 0)
        x[i] = 0

    descend(m - 1, 0.0, True)
    return out


def close_vectors(rows, target, radius: float,
                  counter: NodeCounter | None = None):
    """All x with |x @ rows - target| <= radius (up to tree slack)."""
    if counter is None:
        counter = NodeCounter()
    m = len(rows)
    if m == 0:
        return []
    mu, c = gso(rows)
    if min(c) <= 0.0:
        raise DegenerateBasisError("dependent rows passed to enumeration")
    # express target in the Gram-Schmidt frame
    bstar = [list(map(float, r)) for r in rows]
    for i in range(m):
        for j in range(i):
            mij = mu[i][j]
            bi = bstar[i]
            bj = bstar[j]
            for t in range(len(bi)):
                bi[t] -= mij * bj[t]
    tau = [dot(target, bstar[i]) / c[i] for i in range(m)]
    r2 = radius * radius * TREE_SLACK + 1e-18
    out: list[tuple[tuple[int, ...], float]] = []
    x = [0] * m

    def descend(i: int, rho: float) -> None:
        if i < 0:
            out.append((tuple(x), rho))
            return
        center = tau[i]
        for j in range(i + 1, m):
            xj = x[j]
            if xj:
                center -= xj * mu[j][i]
        width = sqrt(max(r2 - rho, 0.0) / c[i]) + 1e-12
        lo = ceil(center - width)
        hi = floor(center + width)
        if hi < lo:
            return
        counter.spend(hi - lo + 1)
        for xi in range(lo, hi + 1):
            d = xi - center
            rho2 = rho + d * d * c[i]
            if rho2 <= r2:
                x[i] = xi
                descend(i - 1, rho2)
        x[i] = 0

    descend(m - 1, 0.0)
    return out


def primitive_half_vectors(rows, radius: float,
                           counter: NodeCounter | None = None):
    """Primitive half-vectors within radius, sorted by ascending norm."""
    vecs = short_vectors(rows, radius, counter=counter, half=True)
    prim = []
    for coords, norm_sq in vecs:
        g = 0
        for v in coords:
            g = gcd(g, v)
            if g == 1:
                break
        if g == 1:
            prim.append((norm_sq, coords))
    prim.sort()
    return [(coords, norm_sq) for norm_sq, coords in prim]
