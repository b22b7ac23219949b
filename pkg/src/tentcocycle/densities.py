"""Piecewise-constant densities on [-1,1] and the exact transfer pushforward.

A `PCDensity` is a step function given by strictly increasing breakpoints
from -1 to 1 (always containing 0) and one value per cell.  Densities are
equivalence classes mod null sets: values are only ever read cell-wise,
never at a breakpoint.

Two arithmetic modes share the type:

* exact  -- breakpoints/values are tuples of `fractions.Fraction`; the
  pushforward, masking, norms and integrals are all exact rational
  arithmetic (the branches of a paired tent map are affine, so the class
  of piecewise-constant functions is preserved exactly);
* float  -- numpy arrays, the fast path for long cocycle runs.

The norm used throughout is max(var0c, L1), where var0c is the variation
over [-1,0) plus the variation over (0,1] -- the jump across 0 is excluded.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigurationError, DomainError
from .interval_maps import PairedTentMap, branch_decomposition, eval_map, holes

Scalar = Union[Fraction, int, float]
IntervalSet = Sequence[Tuple[Scalar, Scalar]]


def _as_fraction(x) -> Fraction:
    # Fraction(float) is exact: binary floats are dyadic rationals.
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class PCDensity:
    """Step function on [-1,1]; cell i lives on (breakpoints[i], breakpoints[i+1])."""

    breakpoints: Union[Tuple[Fraction, ...], np.ndarray]
    values: Union[Tuple[Fraction, ...], np.ndarray]

    def __post_init__(self):
        bps, vals = self.breakpoints, self.values
        if isinstance(bps, np.ndarray):
            if bps.dtype != np.float64:
                object.__setattr__(self, "breakpoints", np.asarray(bps, dtype=np.float64))
                bps = self.breakpoints
            if not isinstance(vals, np.ndarray) or vals.dtype != np.float64:
                object.__setattr__(self, "values", np.asarray(vals, dtype=np.float64))
                vals = self.values
            ok = (
                len(bps) >= 2
                and len(vals) == len(bps) - 1
                and bps[0] == -1.0
                and bps[-1] == 1.0
                and bool(np.all(np.diff(bps) > 0))
                and bool(np.any(bps == 0.0))
            )
        else:
            ok = (
                len(bps) >= 2
                and len(vals) == len(bps) - 1
                and bps[0] == -1
                and bps[-1] == 1
                and all(b1 > b0 for b0, b1 in zip(bps, bps[1:]))
                and any(b == 0 for b in bps)
            )
        if not ok:
            raise ConfigurationError("invalid PCDensity: breakpoints must increase from -1 to 1 and contain 0")

    # -- mode helpers -------------------------------------------------

    @property
    def exact(self) -> bool:
        return not isinstance(self.breakpoints, np.ndarray)

    def to_float(self) -> "PCDensity":
        if not self.exact:
            return self
        return PCDensity(
            np.array([float(b) for b in self.breakpoints]),
            np.array([float(v) for v in self.values]),
        )

    def to_exact(self) -> "PCDensity":
        if self.exact:
            return self
        return PCDensity(
            tuple(_as_fraction(float(b)) for b in self.breakpoints),
            tuple(_as_fraction(float(v)) for v in self.values),
        )

    @property
    def n_cells(self) -> int:
        return len(self.values)

    # -- functionals --------------------------------------------------

    def integral(self) -> Scalar:
        if self.exact:
            return sum(
                v * (b1 - b0)
                for v, b0, b1 in zip(self.values, self.breakpoints, self.breakpoints[1:])
            )
        return float(np.dot(self.values, np.diff(self.breakpoints)))

    def l1(self) -> Scalar:
        if self.exact:
            return sum(
                abs(v) * (b1 - b0)
                for v, b0, b1 in zip(self.values, self.breakpoints, self.breakpoints[1:])
            )
        return float(np.dot(np.abs(self.values), np.diff(self.breakpoints)))

    def linf(self) -> Scalar:
        if self.exact:
            return max(abs(v) for v in self.values)
        return float(np.max(np.abs(self.values))) if len(self.values) else 0.0

    def integral_on(self, lo: Scalar, hi: Scalar) -> Scalar:
        """Integral over [lo, hi] (clipped to [-1,1])."""
        if hi <= lo:
            return (self.values[0] - self.values[0]) if self.exact else 0.0
        if self.exact:
            total = Fraction(0)
            for v, b0, b1 in zip(self.values, self.breakpoints, self.breakpoints[1:]):
                o0, o1 = max(b0, lo), min(b1, hi)
                if o1 > o0:
                    total += v * (o1 - o0)
            return total
        left = np.clip(self.breakpoints[:-1], lo, hi)
        right = np.clip(self.breakpoints[1:], lo, hi)
        return float(np.dot(self.values, right - left))

    def integral_jplus(self) -> Scalar:
        return self.integral_on(0, 1)

    def integral_jminus(self) -> Scalar:
        return self.integral_on(-1, 0)

    def value_on_cell_containing(self, x: Scalar) -> Scalar:
        """Value on the cell whose interior contains x (BV-class reading of f(x))."""
        if not (-1 < x < 1):
            raise DomainError(f"x={x} must be interior to [-1,1]")
        if self.exact:
            i = bisect.bisect_right(self.breakpoints, x) - 1
            i = min(i, self.n_cells - 1)
            return self.values[i]
        i = int(np.searchsorted(self.breakpoints, x, side="right")) - 1
        return float(self.values[min(i, self.n_cells - 1)])

    # -- linear structure ---------------------------------------------

    def scale(self, c: Scalar) -> "PCDensity":
        if self.exact:
            c = _as_fraction(c)
            return PCDensity(self.breakpoints, tuple(v * c for v in self.values))
        return PCDensity(self.breakpoints, self.values * float(c))

    def __add__(self, other: "PCDensity") -> "PCDensity":
        return _linear_combine(self, other, 1, 1)

    def __sub__(self, other: "PCDensity") -> "PCDensity":
        return _linear_combine(self, other, 1, -1)

    def __mul__(self, c: Scalar) -> "PCDensity":
        return self.scale(c)

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# constructors


def constant(c: Scalar, exact: bool = False) -> PCDensity:
    if exact:
        return PCDensity((Fraction(-1), Fraction(0), Fraction(1)), (_as_fraction(c), _as_fraction(c)))
    return PCDensity(np.array([-1.0, 0.0, 1.0]), np.array([float(c), float(c)]))


def zero(exact: bool = False) -> PCDensity:
    return constant(0, exact=exact)


def sign_density(exact: bool = False) -> PCDensity:
    """The sign function: -1 on [-1,0], +1 on [0,1]; var0c(sign) = 0."""
    if exact:
        return PCDensity((Fraction(-1), Fraction(0), Fraction(1)), (Fraction(-1), Fraction(1)))
    return PCDensity(np.array([-1.0, 0.0, 1.0]), np.array([-1.0, 1.0]))


def indicator(lo: Scalar, hi: Scalar, exact: bool = False) -> PCDensity:
    """The indicator of [lo, hi] as a density."""
    if not (-1 <= lo < hi <= 1):
        raise DomainError(f"bad indicator interval ({lo}, {hi})")
    if exact:
        pts = sorted({Fraction(-1), Fraction(0), Fraction(1), _as_fraction(lo), _as_fraction(hi)})
        vals = tuple(Fraction(1) if (b0 >= lo and b1 <= hi) else Fraction(0) for b0, b1 in zip(pts, pts[1:]))
        return PCDensity(tuple(pts), vals)
    pts = np.unique(np.array([-1.0, 0.0, 1.0, float(lo), float(hi)]))
    mids = 0.5 * (pts[:-1] + pts[1:])
    vals = ((mids > lo) & (mids < hi)).astype(np.float64)
    return PCDensity(pts, vals)


def from_cells(breakpoints: Sequence[Scalar], values: Sequence[Scalar], exact: bool = False) -> PCDensity:
    """Build a density, inserting 0 as a breakpoint if missing."""
    if exact:
        bps = [_as_fraction(b) for b in breakpoints]
        vals = list(values)
        if not any(b == 0 for b in bps):
            i = bisect.bisect_left(bps, Fraction(0))
            bps.insert(i, Fraction(0))
            vals.insert(i - 1, vals[i - 1])
        return PCDensity(tuple(bps), tuple(_as_fraction(v) for v in vals))
    bps = np.asarray(breakpoints, dtype=np.float64)
    vals = np.asarray(values, dtype=np.float64)
    if not np.any(bps == 0.0):
        i = int(np.searchsorted(bps, 0.0))
        bps = np.insert(bps, i, 0.0)
        vals = np.insert(vals, i - 1, vals[i - 1])
    return PCDensity(bps, vals)


# ---------------------------------------------------------------------------
# refinement / linear combinations


def _refined_values(f: PCDensity, grid) -> Union[Tuple[Fraction, ...], np.ndarray]:
    """Values of f on every cell of `grid` (grid must contain f's breakpoints)."""
    if f.exact:
        out = []
        for b0, b1 in zip(grid, grid[1:]):
            mid = (b0 + b1) / 2
            i = bisect.bisect_right(f.breakpoints, mid) - 1
            out.append(f.values[min(i, f.n_cells - 1)])
        return tuple(out)
    mids = 0.5 * (grid[:-1] + grid[1:])
    idx = np.clip(np.searchsorted(f.breakpoints, mids, side="right") - 1, 0, f.n_cells - 1)
    return f.values[idx]


def refine(f: PCDensity, extra: Iterable[Scalar]) -> PCDensity:
    """Insert extra breakpoints (cell values unchanged)."""
    if f.exact:
        pts = sorted(set(f.breakpoints) | {_as_fraction(x) for x in extra if -1 <= x <= 1})
        return PCDensity(tuple(pts), _refined_values(f, pts))
    extra = np.asarray(list(extra), dtype=np.float64)
    extra = extra[(extra >= -1.0) & (extra <= 1.0)]
    grid = np.union1d(f.breakpoints, extra)
    return PCDensity(grid, _refined_values(f, grid))


def _linear_combine(f: PCDensity, g: PCDensity, cf: Scalar, cg: Scalar) -> PCDensity:
    if f.exact != g.exact:
        f, g = f.to_float(), g.to_float()
    if f.exact:
        grid = sorted(set(f.breakpoints) | set(g.breakpoints))
        fv = _refined_values(f, grid)
        gv = _refined_values(g, grid)
        cf, cg = _as_fraction(cf), _as_fraction(cg)
        return PCDensity(tuple(grid), tuple(cf * a + cg * b for a, b in zip(fv, gv)))
    grid = np.union1d(f.breakpoints, g.breakpoints)
    return PCDensity(grid, float(cf) * _refined_values(f, grid) + float(cg) * _refined_values(g, grid))


def linear_combination(cf: Scalar, f: PCDensity, cg: Scalar, g: PCDensity) -> PCDensity:
    return _linear_combine(f, g, cf, cg)


# ---------------------------------------------------------------------------
# norms


@dataclass(frozen=True)
class BVNormReport:
    l1: Scalar
    var0c: Scalar
    bv: Scalar


def var0c(f: PCDensity) -> Scalar:
    """Variation over [-1,0) plus variation over (0,1]; the jump at 0 is excluded."""
    if f.exact:
        total = Fraction(0)
        for i in range(1, len(f.breakpoints) - 1):
            if f.breakpoints[i] != 0:
                total += abs(f.values[i] - f.values[i - 1])
        return total
    jumps = np.abs(np.diff(f.values))
    if len(jumps) == 0:
        return 0.0
    inner = f.breakpoints[1:-1]
    return float(np.sum(jumps[inner != 0.0]))


def bv_norm(f: PCDensity) -> BVNormReport:
    """The non-standard BV norm max(var0c, L1), with its two ingredients."""
    l1 = f.l1()
    v = var0c(f)
    return BVNormReport(l1=l1, var0c=v, bv=max(v, l1))


# ---------------------------------------------------------------------------
# masking


def _normalize_intervals(s: Union[Tuple[Scalar, Scalar], IntervalSet]) -> List[Tuple[Scalar, Scalar]]:
    if len(s) == 2 and not isinstance(s[0], (tuple, list)):
        s = [tuple(s)]
    out = []
    for lo, hi in s:
        if hi > lo:
            out.append((max(lo, -1), min(hi, 1)))
    return sorted(out)


def masked(f: PCDensity, s: Union[Tuple[Scalar, Scalar], IntervalSet]) -> PCDensity:
    """1_s * f for an interval or finite union of intervals.

    Cells are split exactly at the interval endpoints first, so
    masked(f, s) + masked(f, complement) == f cell-wise.
    """
    ivs = _normalize_intervals(s)
    if not ivs:
        return f.scale(0)
    pts = [p for iv in ivs for p in iv]
    g = refine(f, pts)
    if g.exact:
        vals = []
        for b0, b1 in zip(g.breakpoints, g.breakpoints[1:]):
            mid = (b0 + b1) / 2
            inside = any(lo <= mid <= hi for lo, hi in ivs)
            vals.append(g.values[len(vals)] if inside else Fraction(0))
        return PCDensity(g.breakpoints, tuple(vals))
    mids = 0.5 * (g.breakpoints[:-1] + g.breakpoints[1:])
    keep = np.zeros(len(mids), dtype=bool)
    for lo, hi in ivs:
        keep |= (mids > lo) & (mids < hi)
    return PCDensity(g.breakpoints, np.where(keep, g.values, 0.0))


def complement_intervals(s: Union[Tuple[Scalar, Scalar], IntervalSet]) -> List[Tuple[Scalar, Scalar]]:
    """[-1,1] minus a finite union of intervals."""
    ivs = _normalize_intervals(s)
    out = []
    cur = -1
    for lo, hi in ivs:
        if lo > cur:
            out.append((cur, lo))
        cur = max(cur, hi)
    if cur < 1:
        out.append((cur, 1))
    return out


# ---------------------------------------------------------------------------
# the transfer operator


def transfer_pc(m: PairedTentMap, f: PCDensity) -> PCDensity:
    """Exact Perron-Frobenius pushforward of a step function.

    (Lf)(y) = sum over preimages x of f(x)/|T'(x)|.  Each affine branch maps
    a step function to a step function, so the result is assembled exactly
    branch by branch; total mass is conserved (exactly in rational mode).
    Adds at most (number of breakpoints + 8) breakpoints.
    """
    if m.exact and f.exact:
        return _transfer_exact(m, f)
    return _transfer_float(m.to_float(), f.to_float())


def _transfer_float(m: PairedTentMap, f: PCDensity) -> PCDensity:
    bps, vals = f.breakpoints, f.values
    pieces = []
    pts = [np.array([-1.0, 0.0, 1.0])]
    for lo, hi, s, t in branch_decomposition(m):
        i0 = int(np.searchsorted(bps, lo, side="right"))
        i1 = int(np.searchsorted(bps, hi, side="left"))
        xs = np.concatenate(([lo], bps[i0:i1], [hi]))
        vs = vals[i0 - 1 : i0 - 1 + len(xs) - 1]
        ys = s * xs + t
        if s < 0:
            ys = ys[::-1]
            vs = vs[::-1]
        pieces.append((ys, vs / abs(s)))
        pts.append(ys)
    grid = np.unique(np.concatenate(pts))
    mids = 0.5 * (grid[:-1] + grid[1:])
    out = np.zeros(len(mids))
    for ys, vs in pieces:
        idx = np.searchsorted(ys, mids, side="right") - 1
        sel = (idx >= 0) & (idx < len(vs))
        out[sel] += vs[idx[sel]]
    return PCDensity(grid, out)


def _transfer_exact(m: PairedTentMap, f: PCDensity) -> PCDensity:
    bps, vals = f.breakpoints, f.values
    pieces = []
    pts = {Fraction(-1), Fraction(0), Fraction(1)}
    for lo, hi, s, t in branch_decomposition(m):
        i0 = bisect.bisect_right(bps, lo)
        i1 = bisect.bisect_left(bps, hi)
        xs = [lo] + list(bps[i0:i1]) + [hi]
        vs = list(vals[i0 - 1 : i0 - 1 + len(xs) - 1])
        ys = [s * x + t for x in xs]
        if s < 0:
            ys.reverse()
            vs.reverse()
        inv = abs(s)
        pieces.append((ys, [v / inv for v in vs]))
        pts.update(ys)
    grid = sorted(pts)
    out = [Fraction(0)] * (len(grid) - 1)
    for ys, vs in pieces:
        for i in range(len(grid) - 1):
            mid = (grid[i] + grid[i + 1]) / 2
            j = bisect.bisect_right(ys, mid) - 1
            if 0 <= j < len(vs):
                out[i] += vs[j]
    return PCDensity(tuple(grid), tuple(out))


def pullback(m: PairedTentMap, g: PCDensity) -> PCDensity:
    """g o T as a step function (used for the exact duality oracle
    int (Lf) g = int f (g o T))."""
    ex = m.exact and g.exact
    if not ex:
        m, g = m.to_float(), g.to_float()
    pts = {b for b in ([Fraction(-1), Fraction(0), Fraction(1)] if ex else [-1.0, 0.0, 1.0])}
    brs = branch_decomposition(m)
    for lo, hi, s, t in brs:
        pts.add(lo)
        pts.add(hi)
        for b in g.breakpoints[1:-1]:
            x = (b - t) / s
            if lo < x < hi:
                pts.add(x)
    grid = sorted(pts)
    vals = []
    for b0, b1 in zip(grid, grid[1:]):
        mid = (b0 + b1) / 2
        vals.append(g.value_on_cell_containing(eval_map(m, mid)))
    if ex:
        return PCDensity(tuple(grid), tuple(vals))
    return PCDensity(np.array(grid), np.array(vals))


def inner(f: PCDensity, g: PCDensity) -> Scalar:
    """integral of f*g over [-1,1]."""
    if f.exact != g.exact:
        f, g = f.to_float(), g.to_float()
    if f.exact:
        grid = sorted(set(f.breakpoints) | set(g.breakpoints))
        fv = _refined_values(f, grid)
        gv = _refined_values(g, grid)
        return sum(a * b * (b1 - b0) for a, b, b0, b1 in zip(fv, gv, grid, grid[1:]))
    grid = np.union1d(f.breakpoints, g.breakpoints)
    fv = _refined_values(f, grid)
    gv = _refined_values(g, grid)
    return float(np.dot(fv * gv, np.diff(grid)))


# ---------------------------------------------------------------------------
# coarsening


def coarsen(f: PCDensity, tol: Scalar) -> PCDensity:
    """Merge adjacent cells whose values stay within a band of width tol.

    Merged runs are replaced by their mass-preserving average; since every
    merged value sits within tol of the run's band, |coarsen(f)-f| <= tol
    pointwise, so the L1 error is at most 2*tol.  Never merges across 0.
    With tol = 0 only exactly-equal neighbours merge.
    """
    if tol < 0:
        raise DomainError("tol must be >= 0")
    bps, vals = f.breakpoints, f.values
    n = len(vals)
    if n <= 1:
        return f
    exact = f.exact
    new_bps = [bps[0]]
    new_vals = []
    # run accumulators
    r_mass = vals[0] * (bps[1] - bps[0])
    r_w = bps[1] - bps[0]
    r_min = r_max = vals[0]
    for i in range(1, n):
        v = vals[i]
        cross_zero = bps[i] == 0
        lo, hi = min(r_min, v), max(r_max, v)
        if (not cross_zero) and (hi - lo) <= tol:
            r_mass = r_mass + v * (bps[i + 1] - bps[i])
            r_w = r_w + (bps[i + 1] - bps[i])
            r_min, r_max = lo, hi
        else:
            new_bps.append(bps[i])
            new_vals.append(r_mass / r_w)
            r_mass = v * (bps[i + 1] - bps[i])
            r_w = bps[i + 1] - bps[i]
            r_min = r_max = v
    new_bps.append(bps[n])
    new_vals.append(r_mass / r_w)
    if exact:
        return PCDensity(tuple(new_bps), tuple(new_vals))
    return PCDensity(np.array(new_bps), np.array(new_vals))


def auto_coarsen(f: PCDensity, rel_tol: float = 1e-14) -> PCDensity:
    """Float-mode maintenance coarsening: tol = rel_tol * ||f||_inf."""
    if f.exact:
        return coarsen(f, 0)
    m = f.linf()
    return coarsen(f, rel_tol * m if m > 0 else 0.0)


# ---------------------------------------------------------------------------
# leak decomposition


def leak_decomposition(orbit: Sequence[PairedTentMap], f: PCDensity):
    """Push f forward in stages, splitting off the leaked part at each step.

    With h0 = f, step j applies the j-th fibre map after masking:
    g_j = L(1_H h_{j-1}) collects what leaks, h_j = L(1_{H^c} h_{j-1}) what
    does not.  Returns (h_k, [g_1..g_k]); the reconstruction identity
    L^(k) f = h_k + sum_j L^(k-j) g_j holds (exactly in rational mode).
    """
    if len(orbit) == 0:
        raise DomainError("orbit must contain at least one map")
    h = f
    leaks: List[PCDensity] = []
    for m in orbit:
        hp = holes(m)
        hole_ivs = hp.nondegenerate_intervals()
        if hole_ivs:
            leaked = masked(h, hole_ivs)
            kept = masked(h, complement_intervals(hole_ivs))
        else:
            leaked = h.scale(0)
            kept = h
        leaks.append(transfer_pc(m, leaked))
        h = transfer_pc(m, kept)
    return h, leaks


# ---------------------------------------------------------------------------
# serialization (two-column text format)


def dump_two_column(f: PCDensity, path, header: dict | None = None) -> None:
    """Write (breakpoint, value-on-right-cell) rows; header entries become
    '# key=value' lines.  The last row repeats the final cell value so step
    plots close at x=1."""
    g = f.to_float()
    lines = []
    for key, val in (header or {}).items():
        lines.append(f"# {key}={val}")
    for b, v in zip(g.breakpoints[:-1], g.values):
        lines.append(f"{float(b)!r} {float(v)!r}")
    lines.append(f"{float(g.breakpoints[-1])!r} {float(g.values[-1])!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_two_column(path):
    """Read the format written by `dump_two_column`; returns (density, header)."""
    header = {}
    xs: List[float] = []
    vs: List[float] = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    header[k.strip()] = v.strip()
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ConfigurationError(f"bad two-column line: {line!r}")
            xs.append(float(parts[0]))
            vs.append(float(parts[1]))
    if len(xs) < 2:
        raise ConfigurationError("two-column dump needs at least two rows")
    return from_cells(np.array(xs), np.array(vs[:-1])), header
