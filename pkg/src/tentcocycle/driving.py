"""Ergodic driving systems for the leakage sequences (a_j, b_j).

Four kinds of driver are supported: constant, iid_uniform, finite_markov
(a stationary finite-state chain with per-state leakage pairs) and rotation
(an irrational circle rotation with trigonometric-polynomial observables).
Orbits are bit-reproducible functions of (spec, n).

Forward orbits are what the cocycle consumes; the two-sided extension
needed by pullback constructions is exact for constant/rotation/markov
drivers and uses an independent past sample stream for iid drivers.

The module also carries the two-state reference cocycle: the 2x2 matrices
A = [[1-eps*b, eps*a], [eps*b, 1-eps*a]] (columns sum to 1) whose exponents
are 0 and the orbit average of log det = log(1 - eps*(a+b)).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from .errors import ConfigurationError, SingularCocycleError

_KINDS = ("constant", "iid_uniform", "finite_markov", "rotation")


@dataclass(frozen=True)
class DriverSpec:
    """Configuration of one driving system; immutable and hashable."""

    kind: str
    seed: int = 0
    # constant
    ab: Tuple[float, float] = (1.0, 1.0)
    # iid_uniform
    a_range: Tuple[float, float] = (0.0, 1.0)
    b_range: Tuple[float, float] = (0.0, 1.0)
    # finite_markov
    transition: Optional[Tuple[Tuple[float, ...], ...]] = None
    state_ab: Optional[Tuple[Tuple[float, float], ...]] = None
    # rotation: observables c0 + sum_m (c_m cos(2 pi m x) + s_m sin(2 pi m x)),
    # coefficients flattened as (c0, c1, s1, c2, s2, ...)
    angle: float = 0.0
    phase: float = 0.0
    a_coeffs: Tuple[float, ...] = (0.5,)
    b_coeffs: Tuple[float, ...] = (0.5,)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigurationError(f"unknown driver kind {self.kind!r}; expected one of {_KINDS}")
        self.validate()

    # -- constructors -------------------------------------------------

    @staticmethod
    def constant(a: float, b: float, seed: int = 0) -> "DriverSpec":
        return DriverSpec(kind="constant", ab=(float(a), float(b)), seed=seed)

    @staticmethod
    def iid_uniform(a_range=(0.0, 1.0), b_range=(0.0, 1.0), seed: int = 0) -> "DriverSpec":
        return DriverSpec(
            kind="iid_uniform",
            a_range=(float(a_range[0]), float(a_range[1])),
            b_range=(float(b_range[0]), float(b_range[1])),
            seed=seed,
        )

    @staticmethod
    def finite_markov(transition, state_ab, seed: int = 0) -> "DriverSpec":
        return DriverSpec(
            kind="finite_markov",
            transition=tuple(tuple(float(x) for x in row) for row in transition),
            state_ab=tuple((float(a), float(b)) for a, b in state_ab),
            seed=seed,
        )

    @staticmethod
    def rotation(angle, a_coeffs=(0.5, 0.3), b_coeffs=(0.5, 0.0, 0.3), phase=0.0, seed: int = 0) -> "DriverSpec":
        return DriverSpec(
            kind="rotation",
            angle=float(angle),
            phase=float(phase),
            a_coeffs=tuple(float(c) for c in a_coeffs),
            b_coeffs=tuple(float(c) for c in b_coeffs),
            seed=seed,
        )

    # -- validation ----------------------------------------------------

    def validate(self) -> None:
        if self.kind == "constant":
            a, b = self.ab
            if not (0 <= a <= 1 and 0 <= b <= 1):
                raise ConfigurationError("constant driver needs a, b in [0,1]")
            if a == 0 and b == 0:
                raise ConfigurationError("a and b must not both be identically zero")
        elif self.kind == "iid_uniform":
            for lo, hi in (self.a_range, self.b_range):
                if not (0 <= lo <= hi <= 1):
                    raise ConfigurationError("iid_uniform ranges must satisfy 0 <= lo <= hi <= 1")
            if self.a_range[1] == 0 and self.b_range[1] == 0:
                raise ConfigurationError("a and b must not both be identically zero")
        elif self.kind == "finite_markov":
            if self.transition is None or self.state_ab is None:
                raise ConfigurationError("finite_markov needs a transition matrix and per-state (a,b)")
            P = np.array(self.transition, dtype=float)
            if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] != len(self.state_ab):
                raise ConfigurationError("transition matrix shape must match the state list")
            if np.any(P < 0) or not np.allclose(P.sum(axis=1), 1.0, atol=1e-12):
                raise ConfigurationError("transition matrix must be row-stochastic")
            for a, b in self.state_ab:
                if not (0 <= a <= 1 and 0 <= b <= 1):
                    raise ConfigurationError("per-state leakages must lie in [0,1]")
        elif self.kind == "rotation":
            for coeffs in (self.a_coeffs, self.b_coeffs):
                c0 = coeffs[0]
                rest = sum(abs(c) for c in coeffs[1:])
                if not (c0 - rest >= 0 and c0 + rest <= 1):
                    raise ConfigurationError(
                        "rotation observable may leave [0,1]: need c0 - sum|c| >= 0 and c0 + sum|c| <= 1"
                    )

    # -- (de)serialization ---------------------------------------------

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "seed": self.seed}
        if self.kind == "constant":
            d["ab"] = list(self.ab)
        elif self.kind == "iid_uniform":
            d["a_range"] = list(self.a_range)
            d["b_range"] = list(self.b_range)
        elif self.kind == "finite_markov":
            d["transition"] = [list(r) for r in self.transition]
            d["state_ab"] = [list(s) for s in self.state_ab]
        elif self.kind == "rotation":
            d.update(
                angle=self.angle,
                phase=self.phase,
                a_coeffs=list(self.a_coeffs),
                b_coeffs=list(self.b_coeffs),
            )
        return d

    @staticmethod
    def from_dict(d: dict) -> "DriverSpec":
        kind = d.get("kind")
        seed = int(d.get("seed", 0))
        if kind == "constant":
            return DriverSpec.constant(*d["ab"], seed=seed)
        if kind == "iid_uniform":
            return DriverSpec.iid_uniform(d.get("a_range", (0, 1)), d.get("b_range", (0, 1)), seed=seed)
        if kind == "finite_markov":
            return DriverSpec.finite_markov(d["transition"], d["state_ab"], seed=seed)
        if kind == "rotation":
            return DriverSpec.rotation(
                d["angle"],
                d.get("a_coeffs", (0.5, 0.3)),
                d.get("b_coeffs", (0.5, 0.0, 0.3)),
                d.get("phase", 0.0),
                seed=seed,
            )
        raise ConfigurationError(f"cannot build driver from {d!r}")

    def with_seed(self, seed: int) -> "DriverSpec":
        return replace(self, seed=int(seed))


def parse_driver(text: str) -> DriverSpec:
    """Parse a CLI driver string.

    Accepts JSON ('{"kind": "constant", "ab": [1,1]}') or the shorthands
    constant(a,b) and iid_uniform(a_lo,a_hi,b_lo,b_hi).
    """
    text = text.strip()
    if text.startswith("{"):
        try:
            return DriverSpec.from_dict(json.loads(text))
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise ConfigurationError(f"bad driver JSON: {e}") from e
    if "(" in text and text.endswith(")"):
        name, argstr = text[:-1].split("(", 1)
        name = name.strip()
        try:
            args = [float(x) for x in argstr.split(",")] if argstr.strip() else []
        except ValueError as e:
            raise ConfigurationError(f"bad driver arguments in {text!r}") from e
        if name == "constant" and len(args) == 2:
            return DriverSpec.constant(*args)
        if name == "iid_uniform" and len(args) in (0, 4):
            if args:
                return DriverSpec.iid_uniform((args[0], args[1]), (args[2], args[3]))
            return DriverSpec.iid_uniform()
        if name == "rotation" and len(args) >= 1:
            return DriverSpec.rotation(args[0])
    raise ConfigurationError(f"cannot parse driver spec {text!r}")


@dataclass(frozen=True)
class DriverOrbit:
    """A finite stretch of (a_j, b_j) samples, j = 0..n-1."""

    spec: DriverSpec
    samples: np.ndarray  # shape (n, 2)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def a(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def b(self) -> np.ndarray:
        return self.samples[:, 1]


def _trig_poly(coeffs: Tuple[float, ...], theta: np.ndarray) -> np.ndarray:
    out = np.full_like(theta, coeffs[0], dtype=float)
    rest = coeffs[1:]
    for m in range((len(rest) + 1) // 2):
        c = rest[2 * m]
        out = out + c * np.cos(2 * np.pi * (m + 1) * theta)
        if 2 * m + 1 < len(rest):
            s = rest[2 * m + 1]
            out = out + s * np.sin(2 * np.pi * (m + 1) * theta)
    return out


def _markov_stationary(P: np.ndarray) -> np.ndarray:
    k = P.shape[0]
    A = np.vstack([P.T - np.eye(k), np.ones(k)])
    rhs = np.zeros(k + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def _markov_states(spec: DriverSpec, n: int, rng: np.random.Generator, backward: bool) -> np.ndarray:
    P = np.array(spec.transition, dtype=float)
    pi = _markov_stationary(P)
    k = P.shape[0]
    init_rng = np.random.default_rng((spec.seed, 0x5EED))
    s0 = int(init_rng.choice(k, p=pi))
    states = np.empty(n, dtype=int)
    if not backward:
        s = s0
        for j in range(n):
            states[j] = s
            s = int(rng.choice(k, p=P[s]))
    else:
        # time reversal of the stationary chain
        Pb = (pi[None, :] * P.T) / pi[:, None]
        Pb = Pb / Pb.sum(axis=1, keepdims=True)
        s = s0
        for j in range(n):
            s = int(rng.choice(k, p=Pb[s]))
            states[n - 1 - j] = s
    return states


def generate(spec: DriverSpec, n: int) -> DriverOrbit:
    """Forward orbit of length n; bit-reproducible from (spec, n)."""
    if n < 1:
        raise ConfigurationError("orbit length must be >= 1")
    if spec.kind == "constant":
        samples = np.tile(np.array(spec.ab, dtype=float), (n, 1))
    elif spec.kind == "iid_uniform":
        rng = np.random.default_rng(spec.seed)
        a = rng.uniform(spec.a_range[0], spec.a_range[1], size=n)
        b = rng.uniform(spec.b_range[0], spec.b_range[1], size=n)
        samples = np.column_stack([a, b])
    elif spec.kind == "finite_markov":
        rng = np.random.default_rng(spec.seed)
        states = _markov_states(spec, n, rng, backward=False)
        tbl = np.array(spec.state_ab, dtype=float)
        samples = tbl[states]
    else:  # rotation
        j = np.arange(n, dtype=float)
        theta = np.mod(spec.phase + j * spec.angle, 1.0)
        samples = np.column_stack([_trig_poly(spec.a_coeffs, theta), _trig_poly(spec.b_coeffs, theta)])
    return DriverOrbit(spec=spec, samples=samples)


def generate_past(spec: DriverSpec, depth: int) -> DriverOrbit:
    """Samples at times j = -depth..-1, in chronological order.

    Constant, rotation and markov drivers extend exactly (rotation by
    negative multiples of the angle, markov through the time-reversed
    kernel); iid drivers use an independent stream from the same seed.
    """
    if depth < 1:
        raise ConfigurationError("pullback depth must be >= 1")
    if spec.kind == "constant":
        samples = np.tile(np.array(spec.ab, dtype=float), (depth, 1))
    elif spec.kind == "iid_uniform":
        rng = np.random.default_rng((spec.seed, 1))
        a = rng.uniform(spec.a_range[0], spec.a_range[1], size=depth)
        b = rng.uniform(spec.b_range[0], spec.b_range[1], size=depth)
        samples = np.column_stack([a, b])[::-1].copy()
    elif spec.kind == "finite_markov":
        rng = np.random.default_rng((spec.seed, 1))
        states = _markov_states(spec, depth, rng, backward=True)
        tbl = np.array(spec.state_ab, dtype=float)
        samples = tbl[states]
    else:
        j = np.arange(-depth, 0, dtype=float)
        theta = np.mod(spec.phase + j * spec.angle, 1.0)
        samples = np.column_stack([_trig_poly(spec.a_coeffs, theta), _trig_poly(spec.b_coeffs, theta)])
    return DriverOrbit(spec=spec, samples=samples)


def mean_ab(spec: DriverSpec) -> float:
    """Stationary expectation of a + b.

    Exact (closed form) for constant/iid_uniform/finite_markov; spectral
    quadrature (exact to ~1e-15 for trigonometric polynomials) for
    rotation drivers.
    """
    if spec.kind == "constant":
        return float(spec.ab[0] + spec.ab[1])
    if spec.kind == "iid_uniform":
        return float(
            0.5 * (spec.a_range[0] + spec.a_range[1]) + 0.5 * (spec.b_range[0] + spec.b_range[1])
        )
    if spec.kind == "finite_markov":
        pi = _markov_stationary(np.array(spec.transition, dtype=float))
        tbl = np.array(spec.state_ab, dtype=float)
        return float(np.dot(pi, tbl[:, 0] + tbl[:, 1]))
    ngrid = 1 << 16
    theta = (np.arange(ngrid) + 0.5) / ngrid
    return float(np.mean(_trig_poly(spec.a_coeffs, theta)) + np.mean(_trig_poly(spec.b_coeffs, theta)))


def mc_second_exponent(spec: DriverSpec, eps: float, n: int) -> float:
    """Birkhoff average of log det A = log(1 - eps*(a+b)) along one orbit."""
    orbit = generate(spec, n)
    d = 1.0 - eps * (orbit.a + orbit.b)
    if np.any(d <= 0):
        raise SingularCocycleError(f"eps*(a+b) >= 1 at some step for eps={eps}")
    return float(np.mean(np.log(d)))


def mc_cocycle_exponents_qr(spec: DriverSpec, eps: float, n: int) -> Tuple[float, float]:
    """Exponents (lambda1, lambda2) of the explicit 2x2 cocycle.

    The matrices are column-stochastic, so the probability simplex is
    invariant: the leading direction is tracked as a probability vector and
    renormalised by its (exactly conserved) mass, which pins lambda1 at 0
    to machine precision; the second exponent comes off the per-step volume
    growth log|det| = log(1 - eps*(a+b)).  A generic QR frame would carry
    an O(1/n) alignment wander that the stated 1e-8 contracts rule out.
    """
    orbit = generate(spec, n)
    a, b = orbit.a, orbit.b
    d = 1.0 - eps * (a + b)
    if np.any(d <= 0):
        raise SingularCocycleError(f"eps*(a+b) >= 1 at some step for eps={eps}")
    x = 0.5  # first coordinate of the tracked probability vector
    log1 = 0.0
    for j in range(n):
        u0 = (1.0 - eps * b[j]) * x + eps * a[j] * (1.0 - x)
        u1 = eps * b[j] * x + (1.0 - eps * a[j]) * (1.0 - x)
        s = u0 + u1
        log1 += math.log(s)
        x = u0 / s
    lam1 = log1 / n
    lam2 = float(np.mean(np.log(d))) - lam1
    return (lam1, lam2)


def two_state_matrix(eps: float, a: float, b: float) -> np.ndarray:
    """The reference 2x2 matrix [[1-eps b, eps a], [eps b, 1-eps a]]."""
    return np.array([[1.0 - eps * b, eps * a], [eps * b, 1.0 - eps * a]])
