"""Paired tent maps on J = [-1,1]: branch structure, holes, exact preimages.

A paired tent map couples two tent maps, one on [-1,0] and one on [0,1].
Two leakage parameters in [0,1] steepen the branches to 2*(1+leak), which
makes a subinterval of each half (the "hole") land in the other half.

Geometry is exact whenever the leakages are `fractions.Fraction`; float
parameters get the usual 1e-12 tolerance semantics.  All functions here are
pure and the value types are immutable, so concurrent use is unrestricted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple, Union

from .errors import DomainError

Scalar = Union[Fraction, int, float]
Interval = Tuple[Scalar, Scalar]


def is_exact_scalar(x: Scalar) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


@dataclass(frozen=True)
class PairedTentMap:
    """One fibre map, parametrised by the two leakage products.

    ``eps_a`` controls the right half [0,1] (slope 2*(1+eps_a)); ``eps_b``
    the left half.  Both must lie in [0,1], so every branch slope has
    magnitude >= 2.
    """

    eps_a: Scalar
    eps_b: Scalar

    def __post_init__(self):
        if not (0 <= self.eps_a <= 1 and 0 <= self.eps_b <= 1):
            raise DomainError(
                f"leakage parameters must lie in [0,1], got ({self.eps_a}, {self.eps_b})"
            )

    @property
    def exact(self) -> bool:
        return is_exact_scalar(self.eps_a) and is_exact_scalar(self.eps_b)

    def to_exact(self) -> "PairedTentMap":
        return PairedTentMap(Fraction(self.eps_a), Fraction(self.eps_b))

    def to_float(self) -> "PairedTentMap":
        return PairedTentMap(float(self.eps_a), float(self.eps_b))


@dataclass(frozen=True)
class HolePair:
    """The two leakage channels: h_minus in [-1,0], h_plus in [0,1]."""

    h_minus: Interval
    h_plus: Interval

    @property
    def measure_minus(self) -> Scalar:
        return self.h_minus[1] - self.h_minus[0]

    @property
    def measure_plus(self) -> Scalar:
        return self.h_plus[1] - self.h_plus[0]

    @property
    def intervals(self) -> Tuple[Interval, Interval]:
        return (self.h_minus, self.h_plus)

    def nondegenerate_intervals(self) -> List[Interval]:
        return [iv for iv in self.intervals if iv[1] > iv[0]]


def _consts(m: PairedTentMap):
    if m.exact:
        one = Fraction(1)
        a, b = Fraction(m.eps_a), Fraction(m.eps_b)
    else:
        one = 1.0
        a, b = float(m.eps_a), float(m.eps_b)
    return one, a, b


def branch_decomposition(m: PairedTentMap) -> List[Tuple[Scalar, Scalar, Scalar, Scalar]]:
    """The four affine branches as (lo, hi, slope, intercept).

    Domains tile [-1,1]; the fixed point x=0 is measure zero and handled by
    `eval_map` alone.  Slopes are (2(1+eps_b), -2(1+eps_b), -2(1+eps_a),
    2(1+eps_a)) from left to right.
    """
    one, a, b = _consts(m)
    half = one / 2
    sb, sa = 2 * (one + b), 2 * (one + a)
    return [
        (-one, -half, sb, sb - one),
        (-half, one * 0, -sb, -one),
        (one * 0, half, -sa, one),
        (half, one, sa, one - sa),
    ]


def eval_map(m: PairedTentMap, x: Scalar) -> Scalar:
    """Evaluate the five-branch formula; x=0 maps to 0 exactly."""
    if not (-1 <= x <= 1):
        raise DomainError(f"x={x} outside [-1,1]")
    if x == 0:
        return x * 0
    br = branch_decomposition(m)
    if x <= br[0][1]:
        lo, hi, s, t = br[0]
    elif x < 0:
        lo, hi, s, t = br[1]
    elif x <= br[2][1]:
        lo, hi, s, t = br[2]
    else:
        lo, hi, s, t = br[3]
    return s * x + t


def holes(m: PairedTentMap) -> HolePair:
    """The intervals that swap halves under one application of the map.

    h_plus has measure eps_a/(1+eps_a) and maps into [-1,0]; h_minus has
    measure eps_b/(1+eps_b) and maps into [0,1].  At zero leakage the holes
    degenerate to the points +-1/2.
    """
    one, a, b = _consts(m)
    ra = one / (2 * (one + a))
    rb = one / (2 * (one + b))
    return HolePair(h_minus=(-one + rb, -rb), h_plus=(ra, one - ra))


def _merge_touching(ivs: List[Interval]) -> List[Interval]:
    ivs = sorted(ivs)
    out: List[Interval] = []
    for lo, hi in ivs:
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def preimage_of_interval(m: PairedTentMap, target: Interval) -> List[Interval]:
    """Disjoint intervals whose union is T^{-1}(target), up to a finite set.

    At most four intervals come back (one per branch, merged where they
    touch at the turning points +-1/2).
    """
    u, v = target
    if v < u:
        raise DomainError(f"empty target interval {target}")
    pieces: List[Interval] = []
    for lo, hi, s, t in branch_decomposition(m):
        if s > 0:
            xlo, xhi = (u - t) / s, (v - t) / s
        else:
            xlo, xhi = (v - t) / s, (u - t) / s
        xlo = max(xlo, lo)
        xhi = min(xhi, hi)
        if xlo < xhi:
            pieces.append((xlo, xhi))
    return _merge_touching(pieces)


def branch_images(m: PairedTentMap) -> List[Interval]:
    """Image interval of each branch, in branch order."""
    out = []
    for lo, hi, s, t in branch_decomposition(m):
        y0, y1 = s * lo + t, s * hi + t
        out.append((min(y0, y1), max(y0, y1)))
    return out


def preimage_measure_oracle(m: PairedTentMap, target: Interval) -> Scalar:
    """Independent measure of T^{-1}(target): sum over branches of
    |target ∩ branch image| / |slope|."""
    u, v = target
    total = (u - u)
    for (lo, hi, s, t), (ylo, yhi) in zip(branch_decomposition(m), branch_images(m)):
        olo, ohi = max(u, ylo), min(v, yhi)
        if ohi > olo:
            total += (ohi - olo) / abs(s)
    return total
