"""Lyapunov-spectrum estimators for the transfer-operator cocycle.

Estimators provided:

* lambda1 -- push the normalized constant density; mass conservation plus
  bounded norms pin the top exponent at zero.  The estimate is the tail
  growth rate of the BV norm (a burn-in removes the O(log c / n) transient,
  which would otherwise dominate any tolerance near machine precision).
* lambda2 -- push the sign function and average the one-step ratios of its
  integral over [0,1]; the BV-norm growth of the same orbit is tracked as a
  cross-check (the two rates agree for step-like pushes).
* psi functionals -- the normalized half-line integrals whose limit
  separates the second Oseledets direction from the rest.
* lambda3 -- push a twice-deflated density (zero integral and zero psi),
  re-deflating against the constant and the running sign push at every
  renormalization so floating-point reinjection of the leading modes
  cannot surface; the BV growth rate of the deflated orbit is the estimate.
* qr_spectrum -- a QR-reorthonormalized multi-vector push on the Ulam
  backend.
* the second Oseledets vector via pullback of the sign function.

Two backends drive all of them: exact_pc pushes piecewise-constant
densities through the exact operator (float arithmetic, maintenance
coarsening), ulam pushes bin-mass vectors through sparse Ulam matrices.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np

from . import densities as dn
from . import ulam as ul
from .densities import PCDensity
from .driving import DriverSpec, generate, generate_past
from .errors import ConfigurationError, NumericalAnomalyError
from .interval_maps import PairedTentMap
from .quarantine import k_from_epsilon


@dataclass(frozen=True)
class UlamBackend:
    """Push bin-mass vectors through per-fibre Ulam matrices."""

    n_bins: int = 4096


@dataclass(frozen=True)
class ExactPCBackend:
    """Push piecewise-constant densities through the exact operator.

    coarsen_tol: None selects maintenance coarsening at 1e-14 * ||f||_inf
    per step; 0 merges only exactly-equal neighbouring cells.
    """

    coarsen_tol: Optional[float] = None


Backend = Union[UlamBackend, ExactPCBackend]


@dataclass(frozen=True)
class CocycleRun:
    """One reproducible cocycle experiment."""

    spec: DriverSpec
    eps: float
    n_steps: int
    backend: Backend = UlamBackend()
    reortho_period: int = 32

    def __post_init__(self):
        if self.n_steps < 1:
            raise ConfigurationError("n_steps must be >= 1")
        if self.reortho_period < 1:
            raise ConfigurationError("reortho_period must be >= 1")
        if isinstance(self.backend, UlamBackend) and self.eps > 0:
            if self.backend.n_bins < 64.0 / self.eps:
                warnings.warn(
                    f"{self.backend.n_bins} bins do not resolve the holes at eps={self.eps:g} "
                    f"(want >= {64.0 / self.eps:.0f}); exponent estimates may be biased",
                    stacklevel=2,
                )


@dataclass
class SpectrumReport:
    """Estimated exponents with per-block diagnostics."""

    lambda_1: float
    lambda_2: float
    lambda_3: float
    error_bars: dict = field(default_factory=dict)
    block_logs: dict = field(default_factory=dict)
    renorm_count: int = 0
    flags: Tuple[str, ...] = ()
    diagnostics: dict = field(default_factory=dict)

    def exponents(self) -> Tuple[float, float, float]:
        return (self.lambda_1, self.lambda_2, self.lambda_3)

    def to_json_dict(self) -> dict:
        return {
            "lambda_1": self.lambda_1,
            "lambda_2": self.lambda_2,
            "lambda_3": self.lambda_3,
            "error_bars": self.error_bars,
            "renorm_count": self.renorm_count,
            "flags": list(self.flags),
            "diagnostics": self.diagnostics,
            "block_logs": {k: list(map(float, v)) for k, v in self.block_logs.items()},
        }


# ---------------------------------------------------------------------------
# backend adapters


class _PCState:
    """exact_pc backend: state is a float PCDensity."""

    def __init__(self, run: CocycleRun):
        self.tol = run.backend.coarsen_tol

    def fibre_map(self, a: float, b: float, eps: float) -> PairedTentMap:
        return PairedTentMap(eps * a, eps * b)

    def start(self, f: PCDensity) -> PCDensity:
        return f.to_float()

    def step(self, m: PairedTentMap, f: PCDensity) -> PCDensity:
        g = dn.transfer_pc(m, f)
        if self.tol is None:
            return dn.auto_coarsen(g)
        if self.tol > 0:
            return dn.coarsen(g, self.tol)
        return dn.coarsen(g, 0)

    @staticmethod
    def iplus(f: PCDensity) -> float:
        return f.integral_on(0, 1)

    @staticmethod
    def itotal(f: PCDensity) -> float:
        return f.integral()

    @staticmethod
    def bv(f: PCDensity) -> float:
        return dn.bv_norm(f).bv

    @staticmethod
    def scale(f: PCDensity, c: float) -> PCDensity:
        return f.scale(c)

    @staticmethod
    def combine(f: PCDensity, cf: float, g: PCDensity, cg: float) -> PCDensity:
        return dn.linear_combination(cf, f, cg, g)

    @staticmethod
    def to_density(f: PCDensity, run: CocycleRun) -> PCDensity:
        return f


class _UlamState:
    """ulam backend: state is a bin-mass vector; matrices are cached per fibre."""

    def __init__(self, run: CocycleRun):
        self.n = run.backend.n_bins
        self._cache: dict = {}

    def fibre_map(self, a: float, b: float, eps: float) -> Tuple[float, float]:
        return (eps * a, eps * b)

    def _matrix(self, key: Tuple[float, float]):
        mat = self._cache.get(key)
        if mat is None:
            mat = ul.build_ulam(PairedTentMap(key[0], key[1]), self.n).csr
            if len(self._cache) >= 8:
                self._cache.clear()
            self._cache[key] = mat
        return mat

    def start(self, f: PCDensity) -> np.ndarray:
        return np.asarray(ul.discretize(f.to_float(), self.n))

    def step(self, key, v: np.ndarray) -> np.ndarray:
        return v @ self._matrix(key)

    def iplus(self, v: np.ndarray) -> float:
        return float(np.sum(v[self.n // 2 :]))

    @staticmethod
    def itotal(v: np.ndarray) -> float:
        return float(np.sum(v))

    def bv(self, v: np.ndarray) -> float:
        dens = v * (self.n / 2.0)
        jumps = np.abs(np.diff(dens))
        half = self.n // 2
        v0c = float(np.sum(jumps)) - (abs(dens[half] - dens[half - 1]) if self.n >= 2 else 0.0)
        return max(v0c, float(np.sum(np.abs(v))))

    @staticmethod
    def scale(v: np.ndarray, c: float) -> np.ndarray:
        return v * c

    @staticmethod
    def combine(v: np.ndarray, cv: float, w: np.ndarray, cw: float) -> np.ndarray:
        return cv * v + cw * w

    def to_density(self, v: np.ndarray, run: CocycleRun) -> PCDensity:
        return ul.lift(v, self.n)


def _adapter(run: CocycleRun):
    if isinstance(run.backend, UlamBackend):
        return _UlamState(run)
    return _PCState(run)


def _fibres(run: CocycleRun, state, n: Optional[int] = None, past: bool = False):
    n = run.n_steps if n is None else n
    orbit = generate_past(run.spec, n) if past else generate(run.spec, n)
    for j in range(n):
        yield state.fibre_map(float(orbit.a[j]), float(orbit.b[j]), run.eps)


def _jackknife(series: np.ndarray, blocks: int = 10) -> float:
    """Delete-one-block jackknife standard error of the mean of `series`."""
    n = len(series)
    if n < 2 * blocks:
        return float("nan")
    cut = (n // blocks) * blocks
    chunks = series[:cut].reshape(blocks, -1)
    total = chunks.sum()
    count = chunks.shape[1]
    leave_out = (total - chunks.sum(axis=1)) / (cut - count)
    mean = leave_out.mean()
    return float(math.sqrt((blocks - 1) / blocks * np.sum((leave_out - mean) ** 2)))


# ---------------------------------------------------------------------------
# lambda_1


def lambda1_estimate(run: CocycleRun, burn_in_fraction: float = 0.5) -> float:
    """Top exponent from the bounded push of the constant density 1/2.

    Mass is conserved exactly and the BV norms stay bounded, so the true
    rate is 0; the returned tail rate (log-norm difference between the
    burn-in checkpoint and the end) is free of the O(log c / n) transient.
    """
    ad = _adapter(run)
    s = ad.start(dn.constant(0.5))
    n = run.n_steps
    n0 = min(int(n * burn_in_fraction), n - 1)
    log_at_n0 = None
    for j, key in enumerate(_fibres(run, ad)):
        s = ad.step(key, s)
        if j + 1 == n0:
            log_at_n0 = math.log(ad.bv(s))
    if log_at_n0 is None:
        log_at_n0 = 0.0
        n0 = 0
    return (math.log(ad.bv(s)) - log_at_n0) / (n - n0)


# ---------------------------------------------------------------------------
# lambda_2


@dataclass
class SignPushStats:
    phi_rate: float
    bv_rate: float
    err: float
    step_logs: np.ndarray
    renorm_count: int
    flags: Tuple[str, ...]


def sign_push_stats(run: CocycleRun, burn_in: Optional[int] = None) -> SignPushStats:
    """Push the sign function; per-step log ratios of the mass on [0,1].

    The state is renormalized by that mass every reortho_period steps.  Each
    renormalization also subtracts the (exactly conserved) total-mass
    component: roundoff otherwise reinjects the zero-exponent mode, which
    outgrows the decaying sign push after ~ log(1e16)/(2 eps) steps.  The
    accumulated logs also give the BV-norm growth rate of the same orbit.
    """
    ad = _adapter(run)
    s = ad.start(dn.sign_density())
    unit_mass = ad.start(dn.constant(0.5))
    n = run.n_steps
    burn = min(n // 10, 1000) if burn_in is None else burn_in
    logs = np.empty(n)
    flags: List[str] = []
    c_prev = ad.iplus(s)
    bv0 = ad.bv(s)
    log_scale = 0.0
    renorms = 0
    for j, key in enumerate(_fibres(run, ad)):
        s = ad.step(key, s)
        c = ad.iplus(s)
        if not np.isfinite(c) or c <= 0:
            flags.append(f"nonpositive_halfline_mass_at_step_{j}")
            logs = logs[:j]
            break
        logs[j] = math.log(c / c_prev)
        if (j + 1) % run.reortho_period == 0:
            s = ad.scale(s, 1.0 / c)
            s = ad.combine(s, 1.0, unit_mass, -ad.itotal(s))
            log_scale += math.log(c)
            renorms += 1
            c_prev = ad.iplus(s)
        else:
            c_prev = c
    steps_done = len(logs)
    tail = logs[burn:] if steps_done > burn else logs
    phi_rate = float(np.mean(tail))
    bv_rate = (math.log(ad.bv(s)) + log_scale - math.log(bv0)) / max(steps_done, 1)
    return SignPushStats(
        phi_rate=phi_rate,
        bv_rate=bv_rate,
        err=_jackknife(tail),
        step_logs=logs,
        renorm_count=renorms,
        flags=tuple(flags),
    )


def lambda2_estimate(run: CocycleRun, burn_in: Optional[int] = None) -> float:
    """Second exponent: decay rate of the sign push's mass on [0,1]."""
    stats = sign_push_stats(run, burn_in=burn_in)
    if stats.flags:
        raise NumericalAnomalyError(f"sign push anomaly: {stats.flags}")
    return stats.phi_rate


# ---------------------------------------------------------------------------
# psi functionals


def _psi_checkpoint_period(run: CocycleRun) -> int:
    if 0 < run.eps < 0.25:
        return max(k_from_epsilon(run.eps), 1)
    return 8  # no quarantine length is defined at eps=0; use a fixed cadence


def _psi_push(run: CocycleRun, f: PCDensity, n: int, checkpoints: Iterable[int]):
    """Yield (step, psi-value) at the requested steps (sorted ascending)."""
    ad = _adapter(run)
    half_mass = 0.5 * float(f.to_float().integral())
    num = ad.start(dn.linear_combination(1.0, f.to_float(), -half_mass, dn.constant(1.0)))
    den = ad.start(dn.sign_density())
    unit_mass = ad.start(dn.constant(0.5))
    want = sorted(set(checkpoints))
    for j, key in enumerate(_fibres(run, ad, n=n)):
        num = ad.step(key, num)
        den = ad.step(key, den)
        d = ad.iplus(den)
        if d == 0 or not np.isfinite(d):
            raise NumericalAnomalyError(f"sign push lost its half-line mass at step {j}")
        if j + 1 in want:
            yield j + 1, ad.iplus(num) / d
        if (j + 1) % run.reortho_period == 0:
            num = ad.scale(num, 1.0 / d)
            den = ad.scale(den, 1.0 / d)
            num = ad.combine(num, 1.0, unit_mass, -ad.itotal(num))
            den = ad.combine(den, 1.0, unit_mass, -ad.itotal(den))


def psi_n(run: CocycleRun, f: PCDensity, n: int) -> float:
    """The n-step functional: integral over [0,1] of the pushed, centred f,
    normalized by the pushed sign.  Affine shift law:
    psi_n(f + a*sign) = psi_n(f) + a."""
    if n < 1:
        raise ConfigurationError("n must be >= 1")
    for _, val in _psi_push(run, f, n, [n]):
        return float(val)
    raise NumericalAnomalyError("psi push produced no checkpoint")


def psi_star(
    run: CocycleRun,
    f: PCDensity,
    tol: float = 1e-10,
    max_blocks: int = 400,
) -> float:
    """Limit of psi_n, iterated at multiples of the quarantine length until
    successive values differ by less than tol."""
    if tol <= 0:
        raise ConfigurationError("tol must be > 0")
    k = _psi_checkpoint_period(run)
    checkpoints = [k * (m + 1) for m in range(max_blocks)]
    prev = None
    for step, val in _psi_push(run, f, checkpoints[-1], checkpoints):
        if prev is not None and abs(val - prev) < tol:
            return float(val)
        prev = val
    raise NumericalAnomalyError(
        f"psi_star did not converge to {tol:g} within {max_blocks} blocks of {k} steps"
    )


def psi_convergence_ratios(run: CocycleRun, f: PCDensity, blocks: int = 8) -> List[float]:
    """|a_{(m+1)k} - a_{mk}| ratios between consecutive blocks (raw diagnostic;
    individual ratios oscillate when a diff is accidentally small)."""
    k = _psi_checkpoint_period(run)
    vals = [val for _, val in _psi_push(run, f, k * (blocks + 1), [k * (m + 1) for m in range(blocks + 1)])]
    diffs = [abs(v1 - v0) for v0, v1 in zip(vals, vals[1:])]
    out = []
    for d0, d1 in zip(diffs, diffs[1:]):
        if d0 > 1e-15:
            out.append(d1 / d0)
    return out


def psi_convergence_rate(run: CocycleRun, f: PCDensity, blocks: int = 8) -> float:
    """Measured per-block geometric convergence ratio of psi toward its limit.

    Fits |psi_{mk} - psi*| with a geometric sequence (endpoint ratio to the
    1/(m-1) power), using a much later checkpoint as the limit proxy and
    truncating at the float noise floor."""
    k = _psi_checkpoint_period(run)
    cps = [k * (m + 1) for m in range(blocks)] + [k * (blocks + 8)]
    vals = [val for _, val in _psi_push(run, f, cps[-1], cps)]
    lim = vals[-1]
    floor = 1e-12 * (1.0 + abs(lim))
    errs = [abs(v - lim) for v in vals[:blocks]]
    while errs and errs[-1] <= floor:
        errs.pop()
    if len(errs) < 2:
        return 0.0  # converged below the noise floor within one block
    return (errs[-1] / errs[0]) ** (1.0 / (len(errs) - 1))


# ---------------------------------------------------------------------------
# lambda_3


@dataclass
class DeflatedPushStats:
    rate: float
    err: float
    block_logs: np.ndarray
    renorm_count: int
    flags: Tuple[str, ...]
    deflation_health: float  # worst |int_{J+} g| / ||g||_BV just before deflation


def deflated_push_stats(
    run: CocycleRun,
    f_raw: Optional[PCDensity] = None,
    burn_in_blocks: int = 4,
    psi_tol: float = 1e-9,
) -> DeflatedPushStats:
    """Push a density deflated against the two leading modes.

    Start: f = f_raw - (int f_raw / 2) * 1 - psi_star(f_raw) * sign, which has
    zero integral and (numerically) zero limit functional.  Along the orbit
    the state is re-deflated at every renormalization against the constant
    and the *running* sign push -- the pushed sign is the second Oseledets
    direction up to an exponentially small error, whereas static sign would
    reinject the second mode at rate eps.  Norms are read off immediately
    after deflation, so the reported rate is that of the remainder modes.
    """
    if f_raw is None:
        f_raw = dn.from_cells(
            (-1.0, -0.7, -0.2, 0.0, 0.4, 0.8, 1.0), (0.3, -1.1, 0.45, 1.2, -0.5, 0.15)
        )
    ad = _adapter(run)
    f_raw = f_raw.to_float()
    half_mass = 0.5 * f_raw.integral()
    centred = dn.linear_combination(1.0, f_raw, -half_mass, dn.constant(1.0))
    c = psi_star(run, centred, tol=psi_tol)
    g = ad.start(dn.linear_combination(1.0, centred, -c, dn.sign_density()))
    s = ad.start(dn.sign_density())
    unit_mass = ad.start(dn.constant(0.5))
    n = run.n_steps
    period = run.reortho_period
    block_logs: List[float] = []
    flags: List[str] = []
    health = 0.0
    renorms = 0
    bv_prev = ad.bv(g)
    if bv_prev == 0:
        return DeflatedPushStats(float("-inf"), 0.0, np.array([]), 0, ("zero_initial_state",), 0.0)
    g = ad.scale(g, 1.0 / bv_prev)
    for j, key in enumerate(_fibres(run, ad)):
        g = ad.step(key, g)
        s = ad.step(key, s)
        if (j + 1) % period == 0 or j + 1 == n:
            cs = ad.iplus(s)
            if cs == 0 or not np.isfinite(cs):
                flags.append(f"sign_push_anomaly_at_step_{j}")
                break
            s = ad.scale(s, 1.0 / cs)
            s = ad.combine(s, 1.0, unit_mass, -ad.itotal(s))
            bvg = ad.bv(g)
            if bvg > 0:
                health = max(health, abs(ad.iplus(g)) / bvg)
            # deflate: kill the total integral, then the half-line mass
            g = ad.combine(g, 1.0, unit_mass, -ad.itotal(g))
            g = ad.combine(g, 1.0, s, -ad.iplus(g))
            bvg = ad.bv(g)
            if bvg == 0.0:
                # exact kill (possible at zero leakage where slopes are exactly 2);
                # the rate is measured from the completed blocks
                flags.append(f"state_annihilated_at_step_{j + 1}")
                break
            block_logs.append(math.log(bvg))
            g = ad.scale(g, 1.0 / bvg)
            renorms += 1
    if not block_logs:
        return DeflatedPushStats(float("-inf"), 0.0, np.array([]), 0, tuple(flags), health)
    logs = np.array(block_logs)
    steps = np.minimum(period, n - period * np.arange(len(logs)))
    per_step = logs / steps
    tail = per_step[burn_in_blocks:] if len(per_step) > burn_in_blocks else per_step
    rate = float(np.mean(tail))
    return DeflatedPushStats(
        rate=rate,
        err=_jackknife(tail, blocks=min(10, max(2, len(tail) // 4))),
        block_logs=logs,
        renorm_count=renorms,
        flags=tuple(flags),
        deflation_health=health,
    )


def lambda3_estimate(run: CocycleRun, f_raw: Optional[PCDensity] = None) -> float:
    """Upper-spectrum remainder rate: BV growth of the twice-deflated push."""
    return deflated_push_stats(run, f_raw=f_raw).rate


# ---------------------------------------------------------------------------
# QR spectrum (Ulam backend)


def qr_spectrum(run: CocycleRun, q: int = 3, seed: int = 1234, _flags: Tuple[str, ...] = ()) -> SpectrumReport:
    """Exponents of the Ulam matrix chain from a QR-reorthonormalized push
    of q mass vectors.  Exponents are time averages of the log diagonal of
    the triangular factor; the leading two must reproduce the dedicated
    estimators."""
    if not isinstance(run.backend, UlamBackend):
        raise ConfigurationError("qr_spectrum needs the ulam backend")
    if not (1 <= q <= 16):
        raise ConfigurationError("q must lie in 1..16")
    ad = _UlamState(run)
    nb = run.backend.n_bins
    rng = np.random.default_rng(seed)
    V = rng.standard_normal((q, nb))
    V[0] = 1.0 / nb  # put the conserved mass direction in the frame
    Q, _ = np.linalg.qr(V.T)
    V = Q.T
    n = run.n_steps
    period = run.reortho_period
    logs = []
    renorms = 0
    for j, key in enumerate(_fibres(run, ad)):
        V = V @ ad._matrix(key)
        if (j + 1) % period == 0 or j + 1 == n:
            Q, R = np.linalg.qr(V.T)
            diag = np.abs(np.diag(R))
            if np.any(diag < 1e-280):
                if q <= 1:
                    raise NumericalAnomalyError("rank collapse with a single vector")
                return qr_spectrum(run, q - 1, seed=seed, _flags=_flags + ("rank_collapse",))
            logs.append(np.log(diag))
            V = Q.T
            renorms += 1
    logs = np.array(logs)
    burn = max(1, len(logs) // 10)
    steps_used = n - burn * period
    expo = np.sort(logs[burn:].sum(axis=0) / steps_used)[::-1]
    lam = list(expo) + [float("nan")] * (3 - len(expo))
    per_block = logs[burn:] / period
    bars = {
        f"lambda_{i + 1}": _jackknife(per_block[:, i], blocks=min(10, max(2, len(per_block) // 4)))
        for i in range(min(q, 3))
    }
    return SpectrumReport(
        lambda_1=float(lam[0]),
        lambda_2=float(lam[1]),
        lambda_3=float(lam[2]),
        error_bars=bars,
        block_logs={"qr_diag": logs.sum(axis=1)},
        renorm_count=renorms,
        flags=_flags,
        diagnostics={"q": q, "n_bins": nb, "all_exponents": [float(x) for x in expo]},
    )


# ---------------------------------------------------------------------------
# Oseledets vector


def oseledets_vector_2(run: CocycleRun, pullback_depth: int) -> PCDensity:
    """Second Oseledets vector approximation: the sign function pushed
    forward from pullback_depth steps in the past, normalized to unit mass
    on [0,1].  Step-likeness: its BV norm is bounded by 15."""
    if pullback_depth < 1:
        raise ConfigurationError("pullback_depth must be >= 1")
    ad = _adapter(run)
    s = ad.start(dn.sign_density())
    unit_mass = ad.start(dn.constant(0.5))
    for j, key in enumerate(_fibres(run, ad, n=pullback_depth, past=True)):
        s = ad.step(key, s)
        if (j + 1) % run.reortho_period == 0:
            c = ad.iplus(s)
            if c == 0 or not np.isfinite(c):
                raise NumericalAnomalyError(f"pullback push degenerated at step {j}")
            s = ad.scale(s, 1.0 / c)
            s = ad.combine(s, 1.0, unit_mass, -ad.itotal(s))
    c = ad.iplus(s)
    if c == 0 or not np.isfinite(c):
        raise NumericalAnomalyError("pullback push has no half-line mass")
    s = ad.scale(s, 1.0 / c)
    return ad.to_density(s, run)


# ---------------------------------------------------------------------------
# orchestration


def spectrum(run: CocycleRun, q: int = 3, with_qr: Optional[bool] = None) -> SpectrumReport:
    """Full spectrum report: dedicated estimators for the top three
    exponents, the QR routine as a cross-check on the Ulam backend."""
    lam1 = lambda1_estimate(run)
    s2 = sign_push_stats(run)
    d3 = deflated_push_stats(run)
    flags = s2.flags + d3.flags
    diag = {
        "phi_rate": s2.phi_rate,
        "bv_rate": s2.bv_rate,
        "phi_vs_bv_gap": abs(s2.phi_rate - s2.bv_rate),
        "deflation_health": d3.deflation_health,
    }
    if with_qr is None:
        with_qr = isinstance(run.backend, UlamBackend)
    if with_qr:
        qr = qr_spectrum(run, q=q)
        diag["qr_lambda_1"] = qr.lambda_1
        diag["qr_lambda_2"] = qr.lambda_2
        diag["qr_lambda_3"] = qr.lambda_3
        flags = flags + qr.flags
    lam = sorted([lam1, s2.phi_rate, d3.rate], reverse=True)
    return SpectrumReport(
        lambda_1=lam[0],
        lambda_2=lam[1],
        lambda_3=lam[2],
        error_bars={"lambda_2": s2.err, "lambda_3": d3.err},
        block_logs={"lambda_3_blocks": d3.block_logs},
        renorm_count=s2.renorm_count + d3.renorm_count,
        flags=flags,
        diagnostics=diag,
    )
