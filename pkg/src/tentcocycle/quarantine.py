"""Quarantine tuples, the invariant cone, and the machine-checked trials.

A quarantine tuple (f_0, ..., f_k) tracks recently leaked mass separately
for k steps before merging it back; k is chosen from the leakage strength
so that 2^k eps < 1/4 <= 2^{k+1} eps.  The one-step update is

    (f_0, ..., f_k) -> (L(f_0 1_{H^c} + f_k), L(1_H f_0), L f_1, ..., L f_{k-1}).

The cone conditions checked here, with r = 1 - 39*eps:

    (C1)  var0c(f_j) <= 4 * (2r)^{-j} * ||f_0||_1      for j = 1..k
    (C2)  ||f_j||_1  <= 3 * r^{-j} * eps * ||f_0||_1   for j = 1..k
    (C3)  var0c(f_0) <= 33 * eps * ||f_0||_1

All trial arithmetic is exact rational: leakages coming from a driver are
floats, i.e. dyadic rationals, so conversion to Fraction is lossless and
every pass/fail decision below is a statement about exact numbers.
"""

from __future__ import annotations

import bisect
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from . import densities as dn
from .densities import PCDensity
from .driving import DriverSpec, generate
from .errors import ConfigurationError, DomainError
from .interval_maps import PairedTentMap, holes

Scalar = Union[Fraction, int, float]

EPS_PROVEN = Fraction(1, 2000)   # strictest stated sufficient bound for invariance
EPS_SOFT = Fraction(1, 33)       # beyond this the cone constants stop making sense


def k_from_epsilon(eps: Scalar) -> int:
    """The unique k with 2^k * eps < 1/4 <= 2^{k+1} * eps."""
    if not (0 < eps < Fraction(1, 4)):
        raise DomainError(f"eps={eps} outside (0, 1/4)")
    e = Fraction(eps) if not isinstance(eps, Fraction) else eps
    k = 0
    while (1 << (k + 1)) * e < Fraction(1, 4):
        k += 1
    return k


@dataclass(frozen=True)
class ConeParams:
    """Cone constants for one leakage strength."""

    eps: Scalar
    k: int
    c1_base: int = 4
    c2_coef: int = 3
    c3_coef: int = 33

    @property
    def rate(self) -> Scalar:
        return 1 - 39 * self.eps

    @property
    def c1_rate(self) -> Scalar:
        return 2 * self.rate

    @property
    def c2_rate(self) -> Scalar:
        return self.rate

    @staticmethod
    def from_epsilon(eps: Scalar) -> "ConeParams":
        e = Fraction(eps)
        k = k_from_epsilon(e)
        if e > EPS_SOFT:
            raise DomainError(f"eps={eps} > 1/33: the cone constants degenerate")
        if e > EPS_PROVEN:
            warnings.warn(
                f"eps={float(e):g} exceeds the proven invariance threshold 1/2000; "
                "cone checks are exploratory here",
                stacklevel=2,
            )
        return ConeParams(eps=e, k=k)

    def c1_bound(self, j: int, f0_l1: Scalar) -> Scalar:
        return self.c1_base * f0_l1 / self.c1_rate ** j

    def c2_bound(self, j: int, f0_l1: Scalar) -> Scalar:
        return self.c2_coef * self.eps * f0_l1 / self.c2_rate ** j

    def c3_bound(self, f0_l1: Scalar) -> Scalar:
        return self.c3_coef * self.eps * f0_l1


@dataclass(frozen=True)
class QuarantineTuple:
    """State (f_0, ..., f_k) on which the quarantine update acts."""

    components: Tuple[PCDensity, ...]

    def __post_init__(self):
        if len(self.components) < 2:
            raise ConfigurationError("quarantine tuples need k >= 1, i.e. at least 2 components")

    @property
    def k(self) -> int:
        return len(self.components) - 1

    @property
    def f0(self) -> PCDensity:
        return self.components[0]

    @property
    def exact(self) -> bool:
        return all(f.exact for f in self.components)

    def phi(self) -> PCDensity:
        """The physical density f_0 + ... + f_k."""
        total = self.components[0]
        for f in self.components[1:]:
            total = total + f
        return total

    def l1_total(self) -> Scalar:
        return sum(f.l1() for f in self.components)

    def to_float(self) -> "QuarantineTuple":
        return QuarantineTuple(tuple(f.to_float() for f in self.components))


def tuple_from_density(f: PCDensity, k: int) -> QuarantineTuple:
    """(f, 0, ..., 0) with k trailing zeros."""
    z = dn.zero(exact=f.exact)
    return QuarantineTuple((f,) + (z,) * k)


def lambda_step(m: PairedTentMap, t: QuarantineTuple) -> QuarantineTuple:
    """One quarantine update along the fibre map m.

    Mass bookkeeping: the unleaked part of f_0 plus the oldest quarantined
    block f_k feed the new f_0; what f_0 leaks through the holes opens a new
    quarantine block; everything else shifts one slot.
    """
    hp = holes(m)
    hole_ivs = hp.nondegenerate_intervals()
    f = t.components
    if hole_ivs:
        kept = dn.masked(f[0], dn.complement_intervals(hole_ivs))
        leaked = dn.masked(f[0], hole_ivs)
    else:
        kept = f[0]
        leaked = f[0].scale(0)
    new0 = dn.transfer_pc(m, kept + f[-1])
    new1 = dn.transfer_pc(m, leaked)
    rest = tuple(dn.transfer_pc(m, fj) for fj in f[1:-1])
    return QuarantineTuple((new0, new1) + rest)


def phi_pm(t: QuarantineTuple) -> Tuple[Scalar, Scalar]:
    """(phi_plus, phi_minus): integrals of the physical density over each half."""
    plus = sum(f.integral_on(0, 1) for f in t.components)
    minus = sum(f.integral_on(-1, 0) for f in t.components)
    return plus, minus


@dataclass(frozen=True)
class ConeReport:
    """Per-condition outcome of a cone membership check."""

    c1: Tuple[bool, ...]
    c2: Tuple[bool, ...]
    c3: bool
    margins: dict
    f0_l1: float

    @property
    def passed(self) -> bool:
        return self.c3 and all(self.c1) and all(self.c2)

    def failures(self) -> List[str]:
        out = []
        if not self.c3:
            out.append("c3")
        out.extend(f"c1[{j + 1}]" for j, ok in enumerate(self.c1) if not ok)
        out.extend(f"c2[{j + 1}]" for j, ok in enumerate(self.c2) if not ok)
        return out


def cone_check(t: QuarantineTuple, p: ConeParams) -> ConeReport:
    """Check (C1)-(C3); margins report bound - value (negative = violated)."""
    if t.k != p.k:
        raise ConfigurationError(f"tuple has k={t.k} but the cone expects k={p.k}")
    f0_l1 = t.f0.l1()
    c1_flags, c2_flags = [], []
    m1, m2 = [], []
    for j in range(1, t.k + 1):
        fj = t.components[j]
        v = dn.var0c(fj)
        l = fj.l1()
        b1 = p.c1_bound(j, f0_l1)
        b2 = p.c2_bound(j, f0_l1)
        c1_flags.append(v <= b1)
        c2_flags.append(l <= b2)
        m1.append(float(b1 - v))
        m2.append(float(b2 - l))
    v0 = dn.var0c(t.f0)
    b3 = p.c3_bound(f0_l1)
    margins = {"c1": tuple(m1), "c2": tuple(m2), "c3": float(b3 - v0)}
    return ConeReport(
        c1=tuple(c1_flags), c2=tuple(c2_flags), c3=v0 <= b3, margins=margins, f0_l1=float(f0_l1)
    )


# ---------------------------------------------------------------------------
# sampling


def _rand_fraction(rng: random.Random, lo: float, hi: float, q: int = 10**6) -> Fraction:
    return Fraction(rng.randint(int(lo * q), int(hi * q)), q)


def _rand_points(rng: random.Random, count: int) -> List[Fraction]:
    pts = set()
    while len(pts) < count:
        x = _rand_fraction(rng, -0.999, 0.999)
        if x != 0:
            pts.add(x)
    return sorted(pts)


def _staircase(rng: random.Random, halfsign: int, level: Fraction, var_budget: Fraction) -> PCDensity:
    """A step perturbation on one half (J- for halfsign<0), total |jumps| <= var_budget,
    zero integral on that half."""
    lo, hi = (Fraction(-1), Fraction(0)) if halfsign < 0 else (Fraction(0), Fraction(1))
    njumps = rng.randint(0, 3)
    pts = sorted({lo + (hi - lo) * Fraction(rng.randint(1, 9999), 10000) for _ in range(njumps)})
    grid = [lo] + pts + [hi]
    vals = [Fraction(0)]
    budget = var_budget
    for _ in pts:
        step = _rand_fraction(rng, -1, 1) * budget / max(len(pts), 1)
        vals.append(vals[-1] + step)
    # zero mean on the half (length 1), then embed into [-1,1]
    mean = sum(v * (g1 - g0) for v, g0, g1 in zip(vals, grid, grid[1:]))
    vals = [v - mean for v in vals]
    full_grid = sorted({Fraction(-1), Fraction(0), Fraction(1)} | set(grid))
    out_vals = []
    for g0, g1 in zip(full_grid, full_grid[1:]):
        mid = (g0 + g1) / 2
        if lo < mid < hi:
            i = bisect.bisect_right(grid, mid) - 1
            out_vals.append(vals[min(i, len(vals) - 1)])
        else:
            out_vals.append(Fraction(0))
    return PCDensity(tuple(full_grid), tuple(out_vals))


def _random_block_density(rng: random.Random, zero_integral: bool) -> PCDensity:
    """A few random cells with O(1) values; optionally with zero total integral."""
    ncells = rng.randint(1, 3)
    pts = _rand_points(rng, 2 * ncells)
    bps = sorted({Fraction(-1), Fraction(0), Fraction(1)} | set(pts))
    vals = [Fraction(0)] * (len(bps) - 1)
    cells = []
    for c in range(ncells):
        lo, hi = pts[2 * c], pts[2 * c + 1]
        v = _rand_fraction(rng, 0.2, 1) * rng.choice((-1, 1))
        for i, (g0, g1) in enumerate(zip(bps, bps[1:])):
            if lo <= g0 and g1 <= hi:
                vals[i] += v
                cells.append(i)
    f = PCDensity(tuple(bps), tuple(vals))
    if zero_integral:
        total = f.integral()
        if total != 0 and cells:
            # balance on the last touched cell
            i = cells[-1]
            width = bps[i + 1] - bps[i]
            vals[i] -= total / width
            f = PCDensity(tuple(bps), tuple(vals))
    return f


def sample_cone_element(seed: int, p: ConeParams, zero_mass: bool = False) -> QuarantineTuple:
    """Draw one exact-rational element of the cone (of its zero-mass slice
    when `zero_mass`): per-half levels plus a variation-budgeted staircase
    for f_0, independently scaled random blocks for f_1..f_k."""
    rng = random.Random(seed)
    alpha = _rand_fraction(rng, 0.5, 2) * rng.choice((-1, 1))
    if zero_mass:
        beta = -alpha
    else:
        beta = _rand_fraction(rng, 0.5, 2) * rng.choice((-1, 1))
    u0 = _rand_fraction(rng, 0, 1)
    base_l1 = abs(alpha) + abs(beta)
    budget = Fraction(p.c3_coef) * Fraction(p.eps) * base_l1 * u0 / 2
    while True:
        pert_m = _staircase(rng, -1, alpha, budget)
        pert_p = _staircase(rng, +1, beta, budget)
        levels = dn.from_cells((-1, 0, 1), (alpha, beta), exact=True)
        f0 = levels + pert_m + pert_p
        rep_f0 = dn.var0c(f0) <= p.c3_bound(f0.l1())
        if rep_f0 and f0.l1() > 0:
            break
        budget = budget / 2
    comps = [f0]
    f0_l1 = f0.l1()
    for j in range(1, p.k + 1):
        if rng.random() < 0.25:
            comps.append(dn.zero(exact=True))
            continue
        raw = _random_block_density(rng, zero_integral=zero_mass)
        v, l = dn.var0c(raw), raw.l1()
        uj = _rand_fraction(rng, 0, 1)
        caps = []
        if v > 0:
            caps.append(p.c1_bound(j, f0_l1) / v)
        if l > 0:
            caps.append(p.c2_bound(j, f0_l1) / l)
        scale = uj * min(caps) if caps else Fraction(0)
        comps.append(raw.scale(scale))
    t = QuarantineTuple(tuple(comps))
    rep = cone_check(t, p)
    if not rep.passed:  # defensive: the construction should guarantee this
        raise ConfigurationError(f"cone sampler produced an invalid element: {rep.failures()}")
    return t


# ---------------------------------------------------------------------------
# trials


@dataclass
class TrialRecord:
    """One counterexample (or near-miss) from an invariance trial."""

    sample_index: int
    seed: int
    eps: float
    ab: Tuple[float, float]
    failures: List[str]
    margins: dict
    l1_lower_ok: bool
    tuple_repr: Optional[dict] = None

    def to_json_dict(self) -> dict:
        return {
            "sample_index": self.sample_index,
            "seed": self.seed,
            "eps": self.eps,
            "a": self.ab[0],
            "b": self.ab[1],
            "failures": self.failures,
            "margins": self.margins,
            "l1_lower_ok": self.l1_lower_ok,
            "tuple": self.tuple_repr,
        }


@dataclass
class TrialReport:
    """Aggregate outcome of an invariance trial."""

    eps: float
    n_samples: int
    violations: List[TrialRecord] = field(default_factory=list)
    worst_margins: dict = field(default_factory=dict)
    phi_ratio_max: float = 0.0
    phi_ratio_scaled_max: float = 0.0
    l1_lower_failures: int = 0
    invariance_asserted: bool = True

    @property
    def passed(self) -> bool:
        return not self.violations and self.l1_lower_failures == 0

    def to_json_dict(self) -> dict:
        return {
            "eps": self.eps,
            "n_samples": self.n_samples,
            "n_violations": len(self.violations),
            "l1_lower_failures": self.l1_lower_failures,
            "passed": self.passed,
            "invariance_asserted": self.invariance_asserted,
            "worst_margins": self.worst_margins,
            "phi_ratio_max": self.phi_ratio_max,
            "phi_ratio_scaled_max": self.phi_ratio_scaled_max,
            "violations": [v.to_json_dict() for v in self.violations[:16]],
        }


def _tuple_repr(t: QuarantineTuple) -> dict:
    comps = []
    for f in t.components:
        comps.append(
            {
                "breakpoints": [str(b) for b in f.breakpoints],
                "values": [str(v) for v in f.values],
            }
        )
    return {"components": comps}


def invariance_trial(
    spec: DriverSpec,
    eps: Scalar,
    n_samples: int,
    seed: int = 0,
    zero_mass: bool = False,
    keep_counterexamples: bool = True,
) -> TrialReport:
    """Machine check of the cone's one-step invariance, in exact arithmetic.

    For each sample: draw a cone element and a fibre map from the driver,
    apply the quarantine update, and re-check (C1)-(C3) with zero tolerance,
    together with the mass lower bound ||g_0||_1 >= (1 - 39 eps) ||f_0||_1.
    On the zero-mass slice the one-step ratio phi+(Lambda t)/phi+(t) is
    compared against 1 - eps (a+b); the worst |deviation| / (eps^2 |ln eps|)
    is reported (measured, never asserted a priori).

    Any violation is returned with a full counterexample dump; this is a
    falsification harness, not a formality.
    """
    import math

    e = Fraction(eps)
    p = ConeParams.from_epsilon(e)
    orbit = generate(spec, n_samples)
    report = TrialReport(eps=float(e), n_samples=n_samples)
    report.invariance_asserted = e <= EPS_PROVEN
    worst = {"c1": float("inf"), "c2": float("inf"), "c3": float("inf"), "l1_lower": float("inf")}
    denom = float(e) ** 2 * abs(math.log(float(e)))
    for i in range(n_samples):
        a, b = float(orbit.a[i]), float(orbit.b[i])
        m = PairedTentMap(e * Fraction(a), e * Fraction(b))
        t = sample_cone_element(seed * 1_000_003 + i, p, zero_mass=zero_mass)
        g = lambda_step(m, t)
        rep = cone_check(g, p)
        f0_l1 = t.f0.l1()
        g0_l1 = g.f0.l1()
        lower_ok = g0_l1 >= (1 - 39 * e) * f0_l1
        slack = float(g0_l1 - (1 - 39 * e) * f0_l1)
        worst["c1"] = min(worst["c1"], min(rep.margins["c1"], default=float("inf")))
        worst["c2"] = min(worst["c2"], min(rep.margins["c2"], default=float("inf")))
        worst["c3"] = min(worst["c3"], rep.margins["c3"])
        worst["l1_lower"] = min(worst["l1_lower"], slack)
        if not lower_ok:
            report.l1_lower_failures += 1
        if not rep.passed or not lower_ok:
            rec = TrialRecord(
                sample_index=i,
                seed=seed * 1_000_003 + i,
                eps=float(e),
                ab=(a, b),
                failures=rep.failures() + ([] if lower_ok else ["l1_lower"]),
                margins=rep.margins,
                l1_lower_ok=lower_ok,
                tuple_repr=_tuple_repr(t) if keep_counterexamples else None,
            )
            report.violations.append(rec)
        # conservation of signed mass is a theorem of the bookkeeping; verify exactly
        tp, tm = phi_pm(t)
        gp, gm = phi_pm(g)
        if (tp + tm) != (gp + gm):
            raise AssertionError("exact mass conservation failed: arithmetic bug")
        if zero_mass and tp != 0:
            ratio = gp / tp
            dev = abs(float(ratio - (1 - e * (Fraction(a) + Fraction(b)))))
            report.phi_ratio_max = max(report.phi_ratio_max, dev)
            report.phi_ratio_scaled_max = max(report.phi_ratio_scaled_max, dev / denom)
    report.worst_margins = worst
    return report
