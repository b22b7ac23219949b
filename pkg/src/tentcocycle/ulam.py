"""Ulam discretization of one fibre's transfer operator.

The matrix entries are the conditional transition measures
P_ij = m(I_i ∩ T^{-1} I_j) / m(I_i) on a uniform even partition of [-1,1]
(so 0 is a bin boundary).  Vectors store bin *masses*, and `apply` is the
left action v -> v P, which makes row-stochasticity the literal mass
conservation law.

Entries are computed exactly (Fractions) when the map is exact; the float
path is fully vectorized and is the one used inside long cocycle runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp

from .densities import PCDensity
from .errors import ConfigurationError
from .interval_maps import PairedTentMap, branch_decomposition

Scalar = Union[Fraction, int, float]


@dataclass
class UlamMatrix:
    """Sparse row-stochastic n x n discretization of one fibre map."""

    n: int
    exact: bool
    csr: Optional[sp.csr_matrix] = None
    rows: Optional[Tuple[dict, ...]] = None  # exact mode: per-row {col: Fraction}

    def row_sums(self):
        if self.exact:
            return [sum(r.values(), Fraction(0)) for r in self.rows]
        return np.asarray(self.csr.sum(axis=1)).ravel()

    def to_csr(self) -> sp.csr_matrix:
        if not self.exact:
            return self.csr
        data, rows, cols = [], [], []
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                rows.append(i)
                cols.append(j)
                data.append(float(v))
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def entry(self, i: int, j: int) -> Scalar:
        if self.exact:
            return self.rows[i].get(j, Fraction(0))
        return float(self.csr[i, j])

    def nnz(self) -> int:
        if self.exact:
            return sum(len(r) for r in self.rows)
        return int(self.csr.nnz)

    def iter_entries(self):
        if self.exact:
            for i, r in enumerate(self.rows):
                for j in sorted(r):
                    yield i, j, r[j]
        else:
            coo = self.csr.tocoo()
            order = np.lexsort((coo.col, coo.row))
            for idx in order:
                yield int(coo.row[idx]), int(coo.col[idx]), float(coo.data[idx])


def build_ulam(m: PairedTentMap, n: int) -> UlamMatrix:
    """Exact interval-overlap Ulam matrix on n uniform bins (n even >= 2).

    At zero leakage the two halves decouple into two tent-map blocks; for
    positive leakage the off-block mass equals the two hole measures.
    """
    if n < 2 or n % 2 != 0:
        raise ConfigurationError(f"bin count must be an even number >= 2, got {n}")
    if m.exact:
        return _build_exact(m, n)
    return _build_float(m.to_float(), n)


def _build_exact(m: PairedTentMap, n: int) -> UlamMatrix:
    w = Fraction(2, n)
    rows: List[dict] = [dict() for _ in range(n)]
    for lo, hi, s, t in branch_decomposition(m):
        i0 = int((lo + 1) / w)
        i1 = int(-((-(hi + 1)) // w))  # ceil
        for i in range(i0, min(i1, n)):
            plo = max(lo, -1 + i * w)
            phi = min(hi, -1 + (i + 1) * w)
            if phi <= plo:
                continue
            y0, y1 = s * plo + t, s * phi + t
            ylo, yhi = (y0, y1) if y0 <= y1 else (y1, y0)
            j0 = int((ylo + 1) / w)
            j0 = min(j0, n - 1)
            j = j0
            while True:
                elo = -1 + j * w
                ehi = elo + w
                olo, ohi = max(ylo, elo), min(yhi, ehi)
                if ohi > olo:
                    rows[i][j] = rows[i].get(j, Fraction(0)) + (ohi - olo) / (abs(s) * w)
                if ehi >= yhi or j == n - 1:
                    break
                j += 1
    return UlamMatrix(n=n, exact=True, rows=tuple(rows))


def _build_float(m: PairedTentMap, n: int) -> UlamMatrix:
    w = 2.0 / n
    edges = -1.0 + w * np.arange(n + 1)
    data_all, rows_all, cols_all = [], [], []
    for lo, hi, s, t in branch_decomposition(m):
        i0 = int(np.searchsorted(edges, lo, side="right")) - 1
        i1 = int(np.searchsorted(edges, hi, side="left"))
        idx = np.arange(max(i0, 0), min(i1, n))
        plo = np.maximum(lo, edges[idx])
        phi = np.minimum(hi, edges[idx + 1])
        keep = phi > plo
        idx, plo, phi = idx[keep], plo[keep], phi[keep]
        y0, y1 = s * plo + t, s * phi + t
        ylo, yhi = np.minimum(y0, y1), np.maximum(y0, y1)
        j0 = np.clip(np.floor((ylo + 1.0) / w).astype(np.int64), 0, n - 1)
        span = int(np.ceil(abs(s) * np.max(phi - plo) / w)) + 2 if len(idx) else 0
        for off in range(span):
            j = j0 + off
            ok = j < n
            if not np.any(ok):
                break
            elo = -1.0 + j[ok] * w
            overlap = np.minimum(yhi[ok], elo + w) - np.maximum(ylo[ok], elo)
            pos = overlap > 0
            if np.any(pos):
                rows_all.append(idx[ok][pos])
                cols_all.append(j[ok][pos])
                data_all.append(overlap[pos] / (abs(s) * w))
    csr = sp.csr_matrix(
        (np.concatenate(data_all), (np.concatenate(rows_all), np.concatenate(cols_all))),
        shape=(n, n),
    )
    csr.sum_duplicates()
    return UlamMatrix(n=n, exact=False, csr=csr)


def apply(mat: UlamMatrix, v) -> Union[np.ndarray, List[Fraction]]:
    """Left action on a mass vector: (v P)_j = sum_i v_i P_ij."""
    if mat.exact and not isinstance(v, np.ndarray):
        if len(v) != mat.n:
            raise ConfigurationError("vector length must match the bin count")
        out = [Fraction(0)] * mat.n
        for i, r in enumerate(mat.rows):
            vi = v[i]
            if vi:
                for j, p in r.items():
                    out[j] += vi * p
        return out
    v = np.asarray(v, dtype=np.float64)
    if v.shape[-1] != mat.n:
        raise ConfigurationError("vector length must match the bin count")
    return v @ (mat.csr if not mat.exact else mat.to_csr())


def discretize(f: PCDensity, n: int):
    """Bin masses of f on the uniform n-partition (preserves total integral)."""
    if n < 2 or n % 2 != 0:
        raise ConfigurationError(f"bin count must be an even number >= 2, got {n}")
    if f.exact:
        w = Fraction(2, n)
        return [f.integral_on(-1 + i * w, -1 + (i + 1) * w) for i in range(n)]
    edges = -1.0 + (2.0 / n) * np.arange(n + 1)
    left = edges[:-1]
    right = edges[1:]
    # vectorized overlap integral against f's cells
    b = f.breakpoints
    v = f.values
    lo = np.maximum(b[:-1][None, :], left[:, None])
    hi = np.minimum(b[1:][None, :], right[:, None])
    if len(b) * n > 4_000_000:  # avoid the dense outer product for huge inputs
        return np.array([f.integral_on(left[i], right[i]) for i in range(n)])
    return np.clip(hi - lo, 0.0, None) @ v


def lift(v, n: int) -> PCDensity:
    """Right inverse of discretize on bin-aligned densities (masses -> density)."""
    if n < 2 or n % 2 != 0:
        raise ConfigurationError(f"bin count must be an even number >= 2, got {n}")
    if isinstance(v, np.ndarray) or (len(v) and isinstance(v[0], float)):
        v = np.asarray(v, dtype=np.float64)
        if len(v) != n:
            raise ConfigurationError("vector length must match the bin count")
        edges = -1.0 + (2.0 / n) * np.arange(n + 1)
        return PCDensity(edges, v * (n / 2.0))
    if len(v) != n:
        raise ConfigurationError("vector length must match the bin count")
    w = Fraction(2, n)
    edges = tuple(Fraction(-1) + i * w for i in range(n + 1))
    return PCDensity(edges, tuple(Fraction(x) / w for x in v))


def coupling_mass(mat: UlamMatrix) -> Scalar:
    """Total transition mass between the two halves, weighted by bin measure.

    Equals m(H+) + m(H-) exactly in rational mode."""
    n = mat.n
    half = n // 2
    if mat.exact:
        w = Fraction(2, n)
        total = Fraction(0)
        for i, r in enumerate(mat.rows):
            for j, p in r.items():
                if (i < half) != (j < half):
                    total += p * w
        return total
    w = 2.0 / n
    coo = mat.csr.tocoo()
    cross = (coo.row < half) != (coo.col < half)
    return float(np.sum(coo.data[cross]) * w)


def dump_coordinate_text(mat: UlamMatrix, path) -> None:
    """Write the matrix as '(row, col, value)' coordinate text."""
    with open(path, "w") as fh:
        fh.write("# row col value\n")
        for i, j, v in mat.iter_entries():
            fh.write(f"{i} {j} {float(v)!r}\n")
