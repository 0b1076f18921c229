"""Step-function kernels on the unit square: algebra and norms.

A step kernel is a function on [0,1]^2 that is constant on the cells of a
product grid; rows and columns may carry different block structures.  Two
arithmetic modes are supported: exact rationals (``fractions.Fraction``
end to end) and floats.  Exact mode matters because the certificate
thresholds (2^-8m and friends) underflow naive float comparisons.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .bigraph import Bigraph, BigraphError, PlainGraph

MEASURE_TOL = 1e-12
CUT_ENUM_CAP = 24


class KernelError(ValueError):
    """Malformed kernel or incompatible kernel operation."""


def _as_value(x, mode):
    if mode == "rational":
        if isinstance(x, float):
            raise KernelError(f"float {x!r} in rational mode; pass Fraction or int")
        return Fraction(x)
    return float(x)


@dataclass(frozen=True)
class StepKernel:
    row_measures: tuple
    col_measures: tuple
    values: tuple  # tuple of row tuples
    mode: str = "rational"

    def __post_init__(self):
        if self.mode not in ("rational", "float"):
            raise KernelError(f"unknown mode {self.mode!r}")
        for measures in (self.row_measures, self.col_measures):
            if not measures:
                raise KernelError("kernel needs at least one block per side")
            if any(m <= 0 for m in measures):
                raise KernelError("block measures must be strictly positive")
            total = sum(measures)
            if self.mode == "rational":
                if total != 1:
                    raise KernelError(f"block measures must sum to 1 exactly, got {total}")
            elif abs(total - 1.0) > MEASURE_TOL:
                raise KernelError(f"block measures must sum to 1 within {MEASURE_TOL}, got {total}")
        if len(self.values) != len(self.row_measures):
            raise KernelError("value matrix row count does not match row measures")
        for row in self.values:
            if len(row) != len(self.col_measures):
                raise KernelError("value matrix column count does not match column measures")

    @property
    def n_rows(self) -> int:
        return len(self.row_measures)

    @property
    def n_cols(self) -> int:
        return len(self.col_measures)

    def value(self, i: int, j: int):
        return self.values[i][j]

    def integral(self):
        """Mean value of the kernel (the edge density t(K_2, .))."""
        return sum(
            self.row_measures[i] * self.col_measures[j] * self.values[i][j]
            for i in range(self.n_rows)
            for j in range(self.n_cols)
        )

    def is_symmetric(self) -> bool:
        if self.row_measures != self.col_measures:
            return False
        return all(
            self.values[i][j] == self.values[j][i]
            for i in range(self.n_rows)
            for j in range(self.n_cols)
        )

    def __repr__(self):
        return f"StepKernel({self.n_rows}x{self.n_cols}, mode={self.mode})"


def step_kernel(values, row_measures=None, col_measures=None, mode="rational") -> StepKernel:
    """Build a kernel; omitted measures default to equal blocks."""
    vals = tuple(tuple(_as_value(x, mode) for x in row) for row in values)
    r = len(vals)
    c = len(vals[0]) if vals else 0
    if row_measures is None:
        row_measures = [Fraction(1, r)] * r if mode == "rational" else [1.0 / r] * r
    if col_measures is None:
        col_measures = [Fraction(1, c)] * c if mode == "rational" else [1.0 / c] * c
    rm = tuple(_as_value(m, mode) for m in row_measures)
    cm = tuple(_as_value(m, mode) for m in col_measures)
    return StepKernel(rm, cm, vals, mode)


def constant_kernel(c, mode="rational") -> StepKernel:
    return step_kernel([[c]], mode=mode)


def kernel_from_graph(g: PlainGraph | Bigraph) -> StepKernel:
    """Symmetric 0/1 kernel of a simple graph on equal 1/N blocks."""
    if isinstance(g, Bigraph):
        if not g.is_simple():
            raise KernelError("graph kernel requires a simple graph")
        nodes = list(g.nodes)
        adj = {v: set(nbrs) for v, nbrs in g.adjacency().items()}
    else:
        nodes = list(g.nodes)
        adj = g.adjacency_set()
    n = len(nodes)
    if n < 1:
        raise KernelError("graph kernel needs at least one node")
    values = [[1 if nodes[j] in adj[nodes[i]] else 0 for j in range(n)] for i in range(n)]
    return step_kernel(values, mode="rational")


def in_w1(u: StepKernel) -> bool:
    lo, hi = kernel_bounds(u)
    return -1 <= lo and hi <= 1


def kernel_bounds(u: StepKernel):
    flat = [x for row in u.values for x in row]
    return min(flat), max(flat)


def affine(u: StepKernel, scale, shift) -> StepKernel:
    scale = _as_value(scale, u.mode)
    shift = _as_value(shift, u.mode)
    vals = tuple(tuple(scale * x + shift for x in row) for row in u.values)
    return StepKernel(u.row_measures, u.col_measures, vals, u.mode)


def transpose_kernel(u: StepKernel) -> StepKernel:
    vals = tuple(tuple(u.values[i][j] for i in range(u.n_rows)) for j in range(u.n_cols))
    return StepKernel(u.col_measures, u.row_measures, vals, u.mode)


def _boundaries(measures):
    out, acc = [], 0
    for m in measures[:-1]:
        acc = acc + m
        out.append(acc)
    return out


def _merge_boundaries(a, b, mode):
    if mode == "rational":
        return sorted(set(a) | set(b))
    merged = sorted(set(a) | set(b))
    out = []
    for x in merged:
        if not out or x - out[-1] > MEASURE_TOL:
            out.append(x)
    return out


def _refinement_map(measures, boundaries, mode):
    """Split blocks at the given boundary points.

    Returns (new_measures, owner) where owner[i] is the original block
    containing new block i.
    """
    cuts = [0] + list(boundaries) + [sum(measures)]
    new_measures, owner = [], []
    acc = 0
    idx = 0
    for bi, m in enumerate(measures):
        lo, hi = acc, acc + m
        inner = [c for c in cuts if (lo < c < hi if mode == "rational" else lo + MEASURE_TOL < c < hi - MEASURE_TOL)]
        pts = [lo] + inner + [hi]
        for a, b in zip(pts, pts[1:]):
            new_measures.append(b - a)
            owner.append(bi)
        acc = hi
    return tuple(new_measures), tuple(owner)


def refine_kernel(u: StepKernel, row_boundaries=(), col_boundaries=()) -> StepKernel:
    rm, rown = _refinement_map(u.row_measures, row_boundaries, u.mode)
    cm, cown = _refinement_map(u.col_measures, col_boundaries, u.mode)
    vals = tuple(tuple(u.values[rown[i]][cown[j]] for j in range(len(cm))) for i in range(len(rm)))
    return StepKernel(rm, cm, vals, u.mode)


def common_refinement(a: StepKernel, b: StepKernel) -> tuple[StepKernel, StepKernel]:
    """Re-grid both kernels onto the union of their block boundaries."""
    if a.mode != b.mode:
        raise KernelError("cannot mix rational and float kernels")
    rb = _merge_boundaries(_boundaries(a.row_measures), _boundaries(b.row_measures), a.mode)
    cb = _merge_boundaries(_boundaries(a.col_measures), _boundaries(b.col_measures), a.mode)
    return refine_kernel(a, rb, cb), refine_kernel(b, rb, cb)


def add_kernels(a: StepKernel, b: StepKernel) -> StepKernel:
    a, b = common_refinement(a, b)
    vals = tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a.values, b.values))
    return StepKernel(a.row_measures, a.col_measures, vals, a.mode)


def sub_kernels(a: StepKernel, b: StepKernel) -> StepKernel:
    return add_kernels(a, affine(b, -1, 0))


def compose(u: StepKernel, v: StepKernel) -> StepKernel:
    """Operator product: (u o v)(x, y) = integral of u(x, z) v(z, y) dz."""
    if u.mode != v.mode:
        raise KernelError("cannot mix rational and float kernels")
    zb = _merge_boundaries(_boundaries(u.col_measures), _boundaries(v.row_measures), u.mode)
    uu = refine_kernel(u, (), zb)
    vv = refine_kernel(v, zb, ())
    mid = uu.col_measures
    vals = tuple(
        tuple(
            sum(mid[z] * uu.values[i][z] * vv.values[z][j] for z in range(len(mid)))
            for j in range(vv.n_cols)
        )
        for i in range(uu.n_rows)
    )
    return StepKernel(uu.row_measures, vv.col_measures, vals, u.mode)


def square_grid(u: StepKernel) -> StepKernel:
    """Re-grid so rows and columns share one block structure."""
    if u.row_measures == u.col_measures:
        return u
    b = _merge_boundaries(_boundaries(u.row_measures), _boundaries(u.col_measures), u.mode)
    return refine_kernel(u, b, b)


# -- norms ---------------------------------------------------------------------

def l2_norm(u: StepKernel) -> float:
    s = sum(
        u.row_measures[i] * u.col_measures[j] * u.values[i][j] ** 2
        for i in range(u.n_rows)
        for j in range(u.n_cols)
    )
    return math.sqrt(float(s))


def linf_norm(u: StepKernel):
    return max(abs(x) for row in u.values for x in row)


@dataclass(frozen=True)
class CutNormResult:
    value: object  # Fraction in rational mode, float otherwise
    exact: bool
    rows: tuple  # maximizing row-block subset
    cols: tuple


def cut_norm(u: StepKernel, enum_cap: int = CUT_ENUM_CAP, seed: int = 0) -> CutNormResult:
    """Exact cut norm by vertex enumeration.

    The objective |sum over (i,j) of lam_i mu_j s_i t_j U_ij| is bilinear in
    the fractional block-inclusion vectors s, t, so an optimum lies at a 0/1
    vertex.  We enumerate the smaller side (Gray-code order) and pick the
    other side sign-greedily.  Past ``enum_cap`` blocks a seeded hill climb
    reports a lower bound flagged as non-exact.
    """
    swap = u.n_rows > u.n_cols
    k = transpose_kernel(u) if swap else u
    weighted = [
        [k.row_measures[i] * k.col_measures[j] * k.values[i][j] for j in range(k.n_cols)]
        for i in range(k.n_rows)
    ]
    r, c = k.n_rows, k.n_cols
    zero = Fraction(0) if u.mode == "rational" else 0.0

    def greedy(colsum):
        pos = sum(x for x in colsum if x > 0)
        neg = -sum(x for x in colsum if x < 0)
        if pos >= neg:
            return pos, tuple(j for j in range(c) if colsum[j] > 0)
        return neg, tuple(j for j in range(c) if colsum[j] < 0)

    if r <= enum_cap:
        best, best_rows, best_cols = zero, (), ()
        colsum = [zero] * c
        mask = 0
        # Gray-code walk: flip one row per step, keep column sums incremental
        for g in range(1, 1 << r):
            flip = (g ^ (g >> 1)) ^ mask
            mask ^= flip
            i = flip.bit_length() - 1
            sgn = 1 if mask >> i & 1 else -1
            wrow = weighted[i]
            for j in range(c):
                colsum[j] += sgn * wrow[j]
            val, cols = greedy(colsum)
            if val > best:
                best = val
                best_rows = tuple(i for i in range(r) if mask >> i & 1)
                best_cols = cols
        if swap:
            best_rows, best_cols = best_cols, best_rows
        return CutNormResult(best, True, best_rows, best_cols)

    # hill climb fallback: lower bound only
    rng = random.Random(seed)
    best, best_rows, best_cols = zero, (), ()
    for _ in range(32):
        s = [rng.random() < 0.5 for _ in range(r)]
        improved = True
        while improved:
            improved = False
            colsum = [sum(weighted[i][j] for i in range(r) if s[i]) for j in range(c)]
            val, cols = greedy(colsum)
            for i in range(r):
                s[i] = not s[i]
                cs = [colsum[j] + (1 if s[i] else -1) * weighted[i][j] for j in range(c)]
                nval, ncols = greedy(cs)
                if nval > val:
                    val, cols, colsum = nval, ncols, cs
                    improved = True
                else:
                    s[i] = not s[i]
            if val > best:
                best = val
                best_rows = tuple(i for i in range(r) if s[i])
                best_cols = cols
    if swap:
        best_rows, best_cols = best_cols, best_rows
    return CutNormResult(best, False, best_rows, best_cols)


def schatten_norm(u: StepKernel, r: int) -> float:
    """r-th Schatten norm, computed as t(C_2r, U)^(1/2r)."""
    if r < 1 or int(r) != r:
        raise KernelError("schatten order must be a positive integer")
    from .density import density  # late import: density builds on kernels
    from .bigraph import cycle_graph

    t = density(cycle_graph(2 * int(r)), u)
    t = float(t)
    if t < 0:
        if t < -1e-9:
            raise KernelError(f"negative even-cycle density {t}")
        t = 0.0
    return t ** (1.0 / (2 * r))


def norm(u: StepKernel, kind: str, r: int | None = None, enum_cap: int = CUT_ENUM_CAP):
    """Dispatch: kind in {'l2', 'linf', 'cut', 'schatten'} (schatten needs r)."""
    if kind == "l2":
        return l2_norm(u)
    if kind == "linf":
        return linf_norm(u)
    if kind == "cut":
        return cut_norm(u, enum_cap=enum_cap).value
    if kind == "schatten":
        if r is None:
            raise KernelError("schatten norm needs the order r")
        return schatten_norm(u, r)
    raise KernelError(f"unknown norm kind {kind!r}")


# -- partitions and averaging ----------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """Partition of [0,1] into unions of blocks of a square-grid kernel."""

    classes: tuple  # tuple of tuples of block indices
    n_blocks: int

    def __post_init__(self):
        seen = [b for cls in self.classes for b in cls]
        if sorted(seen) != list(range(self.n_blocks)):
            raise KernelError("partition classes must cover every block exactly once")
        if any(len(cls) == 0 for cls in self.classes):
            raise KernelError("empty partition class")

    def class_of(self) -> dict:
        return {b: ci for ci, cls in enumerate(self.classes) for b in cls}


def identity_partition(u: StepKernel) -> Partition:
    g = square_grid(u)
    return Partition(tuple((i,) for i in range(g.n_rows)), g.n_rows)


def single_class_partition(u: StepKernel) -> Partition:
    g = square_grid(u)
    return Partition((tuple(range(g.n_rows)),), g.n_rows)


def step_average(w: StepKernel, p: Partition) -> StepKernel:
    """Average the kernel over the partition classes (grid preserved).

    The result is constant on each class pair; averaging twice with the
    same partition is a no-op, and the overall integral is unchanged.
    """
    g = square_grid(w)
    if p.n_blocks != g.n_rows:
        raise KernelError(f"partition covers {p.n_blocks} blocks, kernel grid has {g.n_rows}")
    lam = g.row_measures
    cls_measure = [sum(lam[b] for b in cls) for cls in p.classes]
    avg = {}
    for ci, ca in enumerate(p.classes):
        for cj, cb in enumerate(p.classes):
            s = sum(lam[i] * lam[j] * g.values[i][j] for i in ca for j in cb)
            avg[ci, cj] = s / (cls_measure[ci] * cls_measure[cj])
    of = p.class_of()
    vals = tuple(
        tuple(avg[of[i], of[j]] for j in range(g.n_cols)) for i in range(g.n_rows)
    )
    return StepKernel(g.row_measures, g.col_measures, vals, g.mode)


# -- sampling -------------------------------------------------------------------

def sample_kernel(
    blocks: int,
    value_range=(-1, 1),
    symmetric: bool = False,
    seed: int = 0,
    mean_zero: bool = False,
    mode: str = "float",
    denominator: int = 1024,
) -> StepKernel:
    """Deterministic random kernel on equal blocks.

    Values are uniform in ``value_range``; with ``mean_zero`` the kernel is
    shifted to integral zero and rescaled back into the (symmetric) range,
    exactly in rational mode.
    """
    if blocks < 1:
        raise KernelError("need at least one block")
    rng = random.Random(seed)
    lo, hi = value_range

    def draw():
        if mode == "rational":
            lo_n = math.ceil(lo * denominator)
            hi_n = math.floor(hi * denominator)
            return Fraction(rng.randint(lo_n, hi_n), denominator)
        return rng.uniform(lo, hi)

    vals = [[draw() for _ in range(blocks)] for _ in range(blocks)]
    if symmetric:
        for i in range(blocks):
            for j in range(i):
                vals[i][j] = vals[j][i]
    k = step_kernel(vals, mode=mode)
    if mean_zero:
        if not (lo < 0 < hi and -lo == hi):
            raise KernelError("mean_zero needs a symmetric value range")
        mu = k.integral()
        scale = hi / (hi + abs(mu))
        k = affine(k, scale, -mu * scale)
    return k


# -- JSON -------------------------------------------------------------------------

def _format_value(x, mode):
    if mode == "rational":
        f = Fraction(x)
        return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)
    return float(x)


def parse_rational(s) -> Fraction:
    if isinstance(s, str):
        return Fraction(s)
    if isinstance(s, int):
        return Fraction(s)
    raise KernelError(f"expected a rational string like 'p/q', got {s!r}")


def kernel_to_json(u: StepKernel) -> dict:
    fmt = lambda x: _format_value(x, u.mode)
    return {
        "row_measures": [fmt(m) for m in u.row_measures],
        "col_measures": [fmt(m) for m in u.col_measures],
        "values": [[fmt(x) for x in row] for row in u.values],
        "mode": u.mode,
    }


def kernel_from_json(obj: Mapping) -> StepKernel:
    try:
        mode = obj.get("mode", "rational")
        conv = parse_rational if mode == "rational" else float
        rm = [conv(m) for m in obj["row_measures"]]
        cm = [conv(m) for m in obj["col_measures"]]
        vals = [[conv(x) for x in row] for row in obj["values"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise KernelError(f"kernel object must have row_measures/col_measures/values: {exc}") from exc
    return StepKernel(tuple(rm), tuple(cm), tuple(tuple(r) for r in vals), mode)
