"""Ambient lattices and sublattices, with exact integer backing when available.

A Lattice is a full-rank lattice in R^n given by basis rows. Lattices built
by the samplers carry an exact form: an integer matrix M and a positive
scale s with basis == s * M. All sublattice covolumes, saturations and
indices are then evaluated in exact integer arithmetic; floating point is
used only for norms, Gram-Schmidt data and enumeration pruning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import intmat
from .enumeration import DEFAULT_BUDGET, NodeCounter, close_vectors, short_vectors
from .errors import DegenerateBasisError, LatticeParseError
from .reduction import DEFAULT_DELTA, lll_rows, nearest_plane

COVOLUME_RTOL = 1e-9
EXACT_FORM_RTOL = 1e-12
CONDITION_LIMIT = 1e12

IntRows = tuple[tuple[int, ...], ...]


def _freeze_rows(rows) -> IntRows:
    return tuple(tuple(int(x) for x in row) for row in rows)


@dataclass(frozen=True, eq=False)
class Lattice:
    """Full-rank lattice; rows of `basis` are the basis vectors."""

    basis: np.ndarray
    exact_basis: IntRows | None = None
    scale: float = 1.0
    provenance: str | None = None

    def __post_init__(self):
        b = np.array(self.basis, dtype=float)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ValueError(f"basis must be square, got shape {b.shape}")
        n = b.shape[0]
        if n < 2:
            raise ValueError("ambient dimension must be at least 2")
        if not np.all(np.isfinite(b)):
            raise DegenerateBasisError("basis contains non-finite entries")
        if np.linalg.cond(b) > CONDITION_LIMIT:
            raise DegenerateBasisError(
                "basis condition number exceeds 1e12; reduce or rescale first"
            )
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)
        if self.exact_basis is not None:
            m = _freeze_rows(self.exact_basis)
            if len(m) != n or any(len(r) != n for r in m):
                raise ValueError("exact form shape does not match the basis")
            if not (self.scale > 0):
                raise ValueError("exact form scale must be positive")
            object.__setattr__(self, "exact_basis", m)
            approx = self.scale * np.array(
                [[float(x) for x in row] for row in m]
            )
            ref = np.abs(approx).max()
            if ref == 0 or np.abs(approx - b).max() > EXACT_FORM_RTOL * ref:
                raise ValueError("basis and exact form disagree")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rows(cls, rows, provenance: str | None = None) -> "Lattice":
        return cls(basis=np.array(rows, dtype=float), provenance=provenance)

    @classmethod
    def from_exact(cls, int_rows, scale: float,
                   provenance: str | None = None) -> "Lattice":
        m = _freeze_rows(int_rows)
        basis = scale * np.array([[float(x) for x in row] for row in m])
        return cls(basis=basis, exact_basis=m, scale=float(scale),
                   provenance=provenance)

    @classmethod
    def identity(cls, n: int) -> "Lattice":
        return cls.from_exact(np.eye(n, dtype=int), 1.0)

    # -- cached views ------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @cached_property
    def covolume(self) -> float:
        if self.exact_basis is not None:
            d = abs(intmat.bareiss_det([list(r) for r in self.exact_basis]))
            if d == 0:
                raise DegenerateBasisError("exact basis is singular")
            return math.exp(math.log(d) + self.dim * math.log(self.scale))
        d = abs(float(np.linalg.det(self.basis)))
        if d <= 0.0:
            raise DegenerateBasisError("basis determinant vanished")
        return d

    @cached_property
    def gram_matrix(self) -> np.ndarray:
        g = self.basis @ self.basis.T
        g = 0.5 * (g + g.T)
        g.setflags(write=False)
        return g

    @cached_property
    def _rows(self) -> list[list[float]]:
        return [list(map(float, row)) for row in self.basis]

    @cached_property
    def _gram_rows(self) -> list[list[float]]:
        return [list(map(float, row)) for row in self.gram_matrix]

    @cached_property
    def _exact_gram(self) -> IntRows | None:
        if self.exact_basis is None:
            return None
        return _freeze_rows(intmat.gram([list(r) for r in self.exact_basis]))

    @cached_property
    def _reduced(self) -> tuple[list[list[float]], IntRows]:
        rows, u = lll_rows(self._rows, DEFAULT_DELTA)
        return rows, _freeze_rows(u)

    @cached_property
    def _reduced_inverse(self) -> IntRows:
        """Exact integer inverse of the reduction transform."""
        _, u = self._reduced
        adj, det = intmat.adjugate([list(r) for r in u])
        if det == -1:
            adj = [[-x for x in row] for row in adj]
        return _freeze_rows(adj)

    def is_unimodular(self, rtol: float = COVOLUME_RTOL) -> bool:
        return abs(self.covolume - 1.0) <= rtol


@dataclass(frozen=True)
class Sublattice:
    """Rank-k subgroup given by integer coordinates in the ambient basis."""

    rank: int
    coords: IntRows
    covolume: float
    primitive: bool


# -- basic operations ------------------------------------------------------


def gram(lattice: Lattice) -> np.ndarray:
    """Gram matrix B @ B.T of the basis rows."""
    return lattice.gram_matrix


def dual(lattice: Lattice) -> Lattice:
    """Dual lattice (inverse-transpose basis)."""
    if lattice.exact_basis is not None:
        m = [list(r) for r in lattice.exact_basis]
        adj, det = intmat.adjugate(m)
        if det == 0:
            raise DegenerateBasisError("exact basis is singular")
        sign = 1 if det > 0 else -1
        rows = [[sign * adj[j][i] for j in range(len(adj))]
                for i in range(len(adj))]
        return Lattice.from_exact(rows, 1.0 / (lattice.scale * abs(det)))
    inv_t = np.linalg.inv(lattice.basis).T
    return Lattice.from_rows(inv_t)


def lll_reduce(lattice: Lattice, delta: float = DEFAULT_DELTA,
               return_transform: bool = False):
    """LLL-reduced basis of the same lattice.

    The reduction is computed in floating point while the unimodular integer
    change of basis is tracked exactly, so exact forms survive reduction.
    """
    rows, u = lll_rows(lattice._rows, delta)
    if lattice.exact_basis is not None:
        m2 = intmat.matmul(u, [list(r) for r in lattice.exact_basis])
        reduced = Lattice.from_exact(m2, lattice.scale,
                                     provenance=lattice.provenance)
    else:
        reduced = Lattice.from_rows(rows, provenance=lattice.provenance)
    if return_transform:
        return reduced, _freeze_rows(u)
    return reduced


# -- covolumes of subgroups ------------------------------------------------


def _float_det(rows) -> float:
    """Determinant of a small float matrix by Gaussian elimination."""
    a = [row[:] for row in rows]
    n = len(a)
    det = 1.0
    for i in range(n):
        p = max(range(i, n), key=lambda r: abs(a[r][i]))
        if a[p][i] == 0.0:
            return 0.0
        if p != i:
            a[i], a[p] = a[p], a[i]
            det = -det
        piv = a[i][i]
        det *= piv
        for r in range(i + 1, n):
            f = a[r][i] / piv
            if f:
                ar = a[r]
                ai = a[i]
                for c in range(i, n):
                    ar[c] -= f * ai[c]
    return det


def exact_gram_determinant(lattice: Lattice, coords) -> int:
    """det(C G C^T) over the integers, G the exact Gram of the lattice."""
    gz = lattice._exact_gram
    if gz is None:
        raise ValueError("lattice carries no exact form")
    cg = [[sum(int(ci) * gz[i][j] for i, ci in enumerate(row))
           for j in range(len(gz))] for row in coords]
    small = [[sum(x * int(y) for x, y in zip(r, row)) for row in coords]
             for r in cg]
    return intmat.bareiss_det(small)


def subgroup_covolume(lattice: Lattice, coords) -> float:
    """Covolume of the subgroup spanned by the given coordinate rows.

    Exact integer arithmetic is used whenever the lattice has an exact form;
    every covolume comparison in the package funnels through here so that
    independently computed paths agree bit for bit.
    """
    k = len(coords)
    if lattice.exact_basis is not None:
        d = exact_gram_determinant(lattice, coords)
        if d <= 0:
            raise ValueError("coordinate rows are not independent")
        if d.bit_length() < 1000:
            return math.sqrt(float(d)) * lattice.scale**k
        return math.exp(0.5 * math.log(d) + k * math.log(lattice.scale))
    # express the rows in the reduced basis first: the integer transform is
    # exact, and forming the vectors against reduced rows avoids the
    # cancellation that direct C G C^T evaluation suffers on skewed bases
    red_rows, _ = lattice._reduced
    uinv = lattice._reduced_inverse
    n = lattice.dim
    dred = [[sum(int(ci) * uinv[i][j] for i, ci in enumerate(row) if ci)
             for j in range(n)] for row in coords]
    vecs = [[sum(di * red_rows[i][c] for i, di in enumerate(drow) if di)
             for c in range(n)] for drow in dred]
    small = [[sum(x * y for x, y in zip(u, v)) for v in vecs] for u in vecs]
    d = _float_det(small)
    if d <= 0.0:
        raise ValueError("coordinate rows are not independent")
    return math.sqrt(d)


def canonical_form(coords) -> IntRows:
    """Canonical Hermite-normal-form basis of the integer row span."""
    h = intmat.hnf_rows(coords)
    if any(not any(row) for row in h):
        raise ValueError("coordinate rows are not independent")
    return _freeze_rows(h)


def saturate(coords) -> IntRows:
    """Canonical basis of the saturation of the row span.

    The saturation is the intersection of the rational row space with Z^n.
    The result is idempotent and independent of the generators chosen for
    the same row space.
    """
    sat, _ = intmat.saturation([list(map(int, r)) for r in coords])
    return _freeze_rows(sat)


def saturation_index(coords) -> int:
    """Index of the row span inside its saturation."""
    _, index = intmat.saturation([list(map(int, r)) for r in coords])
    return index


def sublattice(lattice: Lattice, coords) -> Sublattice:
    """Build a Sublattice record, computing covolume and primitivity."""
    rows = _freeze_rows(coords)
    k = len(rows)
    if not 1 <= k <= lattice.dim:
        raise ValueError(f"rank {k} out of range for dimension {lattice.dim}")
    if intmat.row_rank([list(r) for r in rows]) != k:
        raise ValueError("coordinate rows are not independent")
    sat = saturate(rows)
    primitive = sat == canonical_form(rows)
    return Sublattice(
        rank=k,
        coords=rows,
        covolume=subgroup_covolume(lattice, rows),
        primitive=primitive,
    )


# -- enumeration-backed operations ------------------------------------------


def vector_norm(lattice: Lattice, coords) -> float:
    """Norm of the lattice vector with the given integer coordinates."""
    return subgroup_covolume(lattice, [list(map(int, coords))])


def enumerate_short_vectors(lattice: Lattice, radius: float,
                            budget: int = DEFAULT_BUDGET):
    """All nonzero lattice vectors with norm <= radius.

    Returns a list of (coords, norm) pairs sorted by ascending norm, with
    both v and -v listed. Coordinates refer to the lattice's own basis rows.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    rows, u = lattice._reduced
    counter = NodeCounter(budget)
    found = short_vectors(rows, radius, counter=counter, half=True)
    limit = radius * (1 + 1e-12)
    out = []
    for x, _ in found:
        coords = tuple(
            sum(x[i] * u[i][j] for i in range(len(x)))
            for j in range(lattice.dim)
        )
        norm = vector_norm(lattice, coords)
        if norm <= limit:
            out.append((coords, norm))
            out.append((tuple(-c for c in coords), norm))
    out.sort(key=lambda item: (item[1], item[0]))
    return out


@dataclass(frozen=True)
class ClosestVector:
    vector: np.ndarray
    distance: float
    coords: tuple[int, ...]


def _cvp_tie_key(coords):
    first = next((c for c in coords if c != 0), 0)
    return (0 if first >= 0 else 1, coords)


def closest_vector(lattice: Lattice, target,
                   budget: int = DEFAULT_BUDGET) -> ClosestVector:
    """Exact closest lattice point to the target.

    The search is seeded with the Babai nearest-plane candidate and then
    enumerates the closed ball of that radius. Among equal-distance
    solutions the coordinate vector that is lexicographically smallest with
    first nonzero entry positive wins.
    """
    t = [float(v) for v in np.asarray(target, dtype=float).ravel()]
    n = lattice.dim
    if len(t) != n:
        raise ValueError("target dimension mismatch")
    rows, u = lattice._reduced
    # recenter at the Babai point so the search works on a small residual;
    # far targets would otherwise lose the radius to cancellation
    seed = nearest_plane(rows, t)
    shift = [sum(seed[i] * rows[i][c] for i in range(n)) for c in range(n)]
    t0 = [tv - sv for tv, sv in zip(t, shift)]
    seed_dist = math.sqrt(sum(v * v for v in t0))
    counter = NodeCounter(budget)
    cands = close_vectors(rows, t0, seed_dist * (1 + 1e-12) + 1e-15,
                          counter=counter)
    best_d2 = None
    best = []
    for x, _ in cands:
        resid = [
            sum(x[i] * rows[i][c] for i in range(n) if x[i]) - t0[c]
            for c in range(n)
        ]
        d2 = sum(v * v for v in resid)
        full = [xi + si for xi, si in zip(x, seed)]
        coords = tuple(
            sum(full[i] * u[i][j] for i in range(n)) for j in range(n)
        )
        if best_d2 is None or d2 < best_d2 * (1 - 1e-12):
            best_d2 = d2
            best = [(coords, resid, d2)]
        elif d2 <= best_d2 * (1 + 1e-12):
            best.append((coords, resid, d2))
            best_d2 = min(best_d2, d2)
    if not best:
        raise AssertionError("CVP search returned no candidate")
    coords, resid, d2 = min(best, key=lambda item: _cvp_tie_key(item[0]))
    vec = np.array([tv + rv for tv, rv in zip(t, resid)])
    return ClosestVector(vector=vec, distance=math.sqrt(d2), coords=coords)


# -- text format -------------------------------------------------------------


def _parse_entry(token: str, lineno: int) -> tuple[float, int | None]:
    """Parse one basis entry; returns (value, int_value or None)."""
    try:
        if "/" in token:
            frac = Fraction(token)
            as_int = int(frac) if frac.denominator == 1 else None
            return float(frac), as_int
        if token.lstrip("+-").isdigit():
            v = int(token)
            return float(v), v
        return float(token), None
    except (ValueError, ZeroDivisionError) as exc:
        raise LatticeParseError(f"bad entry {token!r}", lineno) from exc


def parse_lattice_text(text: str) -> Lattice:
    """Parse the lattice text format.

    Line 1 holds n; the next n lines hold n whitespace-separated entries
    each, decimals or exact rationals "p/q". An optional trailing line
    "scale: <decimal>" marks the rows as an exact integer form M with
    basis = scale * M.
    """
    lines = text.splitlines()
    idx = 0
    while idx < len(lines) and not lines[idx].strip():
        idx += 1
    if idx >= len(lines):
        raise LatticeParseError("empty lattice file", 1)
    header = lines[idx].strip()
    try:
        n = int(header)
    except ValueError as exc:
        raise LatticeParseError(
            f"expected dimension, found {header!r}", idx + 1
        ) from exc
    if n < 2:
        raise LatticeParseError(f"dimension must be >= 2, got {n}", idx + 1)
    rows: list[list[float]] = []
    int_rows: list[list[int] | None] = []
    lineno = idx + 1
    for r in range(n):
        lineno += 1
        if lineno - 1 >= len(lines):
            raise LatticeParseError(f"missing basis row {r + 1}", lineno)
        tokens = lines[lineno - 1].split()
        if len(tokens) != n:
            raise LatticeParseError(
                f"expected {n} entries, found {len(tokens)}", lineno
            )
        parsed = [_parse_entry(tok, lineno) for tok in tokens]
        rows.append([p[0] for p in parsed])
        if all(p[1] is not None for p in parsed):
            int_rows.append([p[1] for p in parsed])  # type: ignore[misc]
        else:
            int_rows.append(None)
    scale = None
    for extra in range(lineno, len(lines)):
        stripped = lines[extra].strip()
        if not stripped:
            continue
        if stripped.lower().startswith("scale:"):
            if scale is not None:
                raise LatticeParseError("duplicate scale line", extra + 1)
            try:
                scale = float(stripped.split(":", 1)[1])
            except ValueError as exc:
                raise LatticeParseError("bad scale value", extra + 1) from exc
            if not scale > 0:
                raise LatticeParseError("scale must be positive", extra + 1)
        else:
            raise LatticeParseError(
                f"unexpected content {stripped!r}", extra + 1
            )
    if scale is not None:
        if any(row is None for row in int_rows):
            raise LatticeParseError(
                "scale line requires integer basis rows", lineno
            )
        return Lattice.from_exact(int_rows, scale)
    if all(row is not None for row in int_rows):
        return Lattice.from_exact(int_rows, 1.0)
    return Lattice.from_rows(rows)


def format_lattice_text(lattice: Lattice) -> str:
    lines = [str(lattice.dim)]
    if lattice.exact_basis is not None:
        for row in lattice.exact_basis:
            lines.append(" ".join(str(x) for x in row))
        if lattice.scale != 1.0:
            lines.append(f"scale: {lattice.scale!r}")
    else:
        for row in lattice.basis:
            lines.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def read_lattice(path) -> Lattice:
    with open(path, "r", encoding="ascii") as fh:
        return parse_lattice_text(fh.read())


def write_lattice(lattice: Lattice, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_lattice_text(lattice))
