"""Spectrum of the interpolated Hamiltonian ``H(s) = (1 - s) H0 + s Hp``.

``Hp`` is diagonal in the computational basis (entry k is the Ising energy
of the spins encoded by the bits of k) and ``H0`` is a purely off-diagonal
driver. Both are applied matrix-free to vectors of length ``2^N``.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.linalg

from .encode import Decoded, EncodingMap, IsingModel, bits_of, decode_bits
from .errors import SpectralError
from .lanczos import lanczos_lowest

MAX_QUBITS = 24
DENSE_MAX_QUBITS = 8
EIG_TOL = 1e-9
DEGENERACY_RTOL = 1e-8
DEFAULT_GRID = 101
REFINE_POINTS = 20

TRANSVERSE, PAIRWISE = "transverse_field", "pairwise_xx"
_DRIVER_ALIASES = {"tf": TRANSVERSE, "xx": PAIRWISE, TRANSVERSE: TRANSVERSE, PAIRWISE: PAIRWISE}


@dataclass(frozen=True)
class DriverSpec:
    kind: str = TRANSVERSE
    h0: float = 1.0

    def __post_init__(self):
        if self.kind not in _DRIVER_ALIASES:
            raise ValueError(f"unknown driver {self.kind!r}")
        object.__setattr__(self, "kind", _DRIVER_ALIASES[self.kind])
        if not self.h0 > 0:
            raise ValueError(f"driver strength must be positive, got {self.h0}")

    def norm_bound(self, n: int) -> float:
        """Upper bound on the operator norm of H0."""
        if self.kind == TRANSVERSE:
            return self.h0 * n
        return self.h0 * n * (n - 1) / 2


@dataclass(frozen=True)
class DiagonalOperator:
    num_qubits: int
    diag: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.diag.shape != (1 << self.num_qubits,):
            raise SpectralError("LENGTH_MISMATCH", f"diag has shape {self.diag.shape}")
        self.diag.setflags(write=False)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits


@dataclass
class EigenResult:
    s: float
    eigenvalues: np.ndarray
    ground_vector: np.ndarray = field(repr=False)
    degenerate: bool
    method: str
    matvecs: int = 0

    @property
    def gap(self) -> float:
        return float(self.eigenvalues[1] - self.eigenvalues[0])

    @property
    def gap_distinct(self) -> float:
        return distinct_gap(self.eigenvalues)


@dataclass
class GapCurve:
    s: np.ndarray
    E0: np.ndarray
    E1: np.ndarray
    gap: np.ndarray
    gap_distinct: np.ndarray
    min_gap: float
    argmin_s: float
    refined_s: np.ndarray = field(default_factory=lambda: np.empty(0))
    refined_gap: np.ndarray = field(default_factory=lambda: np.empty(0))
    continuity_violations: int = 0

    @property
    def t_suggest(self) -> float:
        """Evolution-time scale ``1 / min_gap^2``."""
        return math.inf if self.min_gap <= 0 else 1.0 / self.min_gap**2

    def rows(self):
        for row in zip(self.s, self.E0, self.E1, self.gap, self.gap_distinct):
            yield tuple(float(v) for v in row)


def degeneracy_tol(e0: float) -> float:
    return DEGENERACY_RTOL * max(1.0, abs(e0))


def distinct_gap(eigenvalues) -> float:
    """Smallest ``E_k - E0`` above the degeneracy tolerance (NaN if none in range)."""
    e0 = eigenvalues[0]
    for e in eigenvalues[1:]:
        if e - e0 > degeneracy_tol(e0):
            return float(e - e0)
    return math.nan


# --- operators ----------------------------------------------------------------

def diagonalize_problem(ising: IsingModel, max_qubits: int = MAX_QUBITS) -> DiagonalOperator:
    """Tabulate the Ising energy of every basis state.

    Bit i of index k set means ``x_i = 1`` i.e. spin ``s_i = -1``.
    """
    n = ising.num_qubits
    if n > max_qubits:
        raise SpectralError("TOO_MANY_QUBITS", f"{n} qubits > cap {max_qubits}")
    k = np.arange(1 << n, dtype=np.int64)
    spins = [1.0 - 2.0 * ((k >> i) & 1) for i in range(n)]
    diag = np.full(1 << n, float(ising.offset))
    for i, hi in enumerate(ising.h):
        if hi:
            diag -= float(hi) * spins[i]
    for (i, j), Jij in ising.J.items():
        diag -= float(Jij) * (spins[i] * spins[j])
    return DiagonalOperator(n, diag)


def _flip(v, i, n):
    # v[k ^ (1 << i)] for every k
    return v.reshape(1 << (n - 1 - i), 2, 1 << i)[:, ::-1, :].reshape(-1)


def _sum_x(v, n):
    out = np.zeros_like(v)
    for i in range(n):
        out += _flip(v, i, n)
    return out


def apply_driver(driver: DriverSpec, n: int, v: np.ndarray) -> np.ndarray:
    """``H0 v`` without forming H0.

    The pairwise driver uses ``sum_{i<j} X_i X_j = ((sum_i X_i)^2 - N) / 2``.
    """
    if driver.kind == TRANSVERSE:
        return -driver.h0 * _sum_x(v, n)
    return -driver.h0 * 0.5 * (_sum_x(_sum_x(v, n), n) - n * v)


def apply_hamiltonian(s: float, driver: DriverSpec, d: DiagonalOperator, v: np.ndarray) -> np.ndarray:
    """``s (d * v) + (1 - s) H0 v``."""
    v = np.asarray(v, dtype=float)
    if v.shape != (d.dim,):
        raise SpectralError("LENGTH_MISMATCH", f"vector length {v.shape} != {d.dim}")
    out = s * (d.diag * v)
    if s != 1.0:
        out += (1.0 - s) * apply_driver(driver, d.num_qubits, v)
    return out


_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_I = np.eye(2)


def _kron_site(ops, n):
    # qubit 0 is the least significant bit, so it is the last Kronecker factor
    return reduce(np.kron, [ops.get(q, _I) for q in reversed(range(n))])


def dense_driver(driver: DriverSpec, n: int) -> np.ndarray:
    """Explicit ``2^N x 2^N`` driver built from Kronecker products."""
    H = np.zeros((1 << n, 1 << n))
    if driver.kind == TRANSVERSE:
        for i in range(n):
            H -= driver.h0 * _kron_site({i: _X}, n)
    else:
        for i in range(n):
            for j in range(i + 1, n):
                H -= driver.h0 * _kron_site({i: _X, j: _X}, n)
    return H


def dense_hamiltonian(s: float, driver: DriverSpec, d: DiagonalOperator) -> np.ndarray:
    return (1.0 - s) * dense_driver(driver, d.num_qubits) + s * np.diag(d.diag)


# --- eigenvalues ----------------------------------------------------------------

def lowest_two(
    s: float,
    driver: DriverSpec,
    d: DiagonalOperator,
    k_levels: int = 4,
    *,
    method: str = "auto",
    tol: float = EIG_TOL,
    seed: int = 0,
) -> EigenResult:
    """Lowest ``k_levels`` eigenvalues of ``H(s)`` and the ground vector.

    ``method="auto"`` solves densely up to ``DENSE_MAX_QUBITS`` and with
    restarted Lanczos above; ``s == 1`` is read off the sorted diagonal.

    With the transverse driver and ``0 < s < 1``, H(s) has non-positive
    off-diagonal entries and a connected hypercube graph, so its ground
    state is simple. For ``k_levels=2`` a single Krylov space then yields
    E0 and E1 exactly and the Lanczos verification pass is skipped.
    """
    n = d.num_qubits
    if n > MAX_QUBITS:
        raise SpectralError("TOO_MANY_QUBITS", f"{n} qubits > cap {MAX_QUBITS}")
    k = min(max(k_levels, 2), d.dim)
    if s == 1.0:
        idx = np.argsort(d.diag, kind="stable")[:k]
        vals = d.diag[idx].copy()
        g = np.zeros(d.dim)
        g[idx[0]] = 1.0
        return EigenResult(s, vals, g, vals[1] - vals[0] <= degeneracy_tol(vals[0]), "diagonal")
    if method == "auto":
        method = "dense" if n <= DENSE_MAX_QUBITS else "krylov"
    if method == "dense":
        vals, vecs = scipy.linalg.eigh(dense_hamiltonian(s, driver, d), subset_by_index=[0, k - 1])
        matvecs = 0
    elif method == "krylov":
        simple_ground = driver.kind == TRANSVERSE and 0.0 < s < 1.0
        try:
            res = lanczos_lowest(
                lambda v: apply_hamiltonian(s, driver, d, v), d.dim, k,
                tol=tol * 0.1, seed=seed, verify=not (simple_ground and k == 2),
            )
        except SpectralError as exc:
            raise SpectralError(
                "NO_CONVERGENCE", f"s={s}: {exc}", s=s,
                iterations=exc.iterations, residual=exc.residual,
            ) from None
        vals, vecs, matvecs = res.eigenvalues, res.eigenvectors, res.matvecs
    else:
        raise ValueError(f"unknown method {method!r}")
    g = vecs[:, 0]
    # fix the sign so the ground vector is reproducible
    if g[np.argmax(np.abs(g))] < 0:
        g = -g
    return EigenResult(s, np.asarray(vals), g, vals[1] - vals[0] <= degeneracy_tol(vals[0]), method, matvecs)


def default_grid(points: int = DEFAULT_GRID) -> np.ndarray:
    return np.linspace(0.0, 1.0, points)


def _solve_many(driver, d, s_values, k_levels, method, workers, seed):
    def one(args):
        i, s = args
        r = lowest_two(float(s), driver, d, k_levels, method=method, seed=seed + i)
        if k_levels < 4 and not np.isfinite(r.gap_distinct):
            # (near-)degenerate pair: look further up for the first distinct level
            r = lowest_two(float(s), driver, d, 4, method=method, seed=seed + i)
        return r

    tasks = list(enumerate(s_values))
    workers = workers or os.cpu_count() or 1
    if workers == 1 or len(tasks) < 2:
        return [one(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, tasks))


def sweep_gap(
    driver: DriverSpec,
    d: DiagonalOperator,
    s_grid=None,
    *,
    k_levels: int = 2,
    refine: int = REFINE_POINTS,
    method: str = "auto",
    workers: int | None = None,
    seed: int = 0,
) -> GapCurve:
    """Lowest two levels over the schedule, plus a refined interior minimum.

    Grid points are independent and may run in parallel; results are merged
    by grid index. Two levels are solved per point; a point whose two lowest
    levels are degenerate is re-solved with four so ``gap_distinct`` is
    defined. The minimum gap is taken over interior points (``0 < s < 1``)
    after adding ``refine`` points between the neighbours of the coarse argmin.
    """
    s_values = np.asarray(default_grid() if s_grid is None else s_grid, dtype=float)
    if s_values.ndim != 1 or len(s_values) == 0:
        raise ValueError("s grid must be a non-empty 1-D sequence")
    if np.any((s_values < 0) | (s_values > 1)):
        raise ValueError("s grid must lie in [0, 1]")
    s_values = np.sort(s_values)
    results = _solve_many(driver, d, s_values, k_levels, method, workers, seed)
    E0 = np.array([r.eigenvalues[0] for r in results])
    E1 = np.array([r.eigenvalues[1] for r in results])
    gap = E1 - E0
    gd = np.array([r.gap_distinct for r in results])

    interior = (s_values > 0) & (s_values < 1)
    if not interior.any():
        interior = np.ones_like(s_values, dtype=bool)
    cand = np.flatnonzero(interior)
    i_min = cand[np.argmin(gap[cand])]
    min_gap, argmin_s = float(gap[i_min]), float(s_values[i_min])

    refined_s = np.empty(0)
    refined_gap = np.empty(0)
    if refine and len(s_values) >= 3:
        lo = s_values[max(i_min - 1, 0)]
        hi = s_values[min(i_min + 1, len(s_values) - 1)]
        refined_s = np.linspace(lo, hi, refine + 2)[1:-1]
        refined_s = refined_s[(refined_s > 0) & (refined_s < 1)]
        extra = _solve_many(driver, d, refined_s, k_levels, method, workers, seed + len(s_values))
        refined_gap = np.array([r.gap for r in extra])
        if len(refined_gap) and refined_gap.min() < min_gap:
            j = int(np.argmin(refined_gap))
            min_gap, argmin_s = float(refined_gap[j]), float(refined_s[j])

    # |dE0/ds| <= ||Hp - H0||; a jump beyond that flags level mislabelling
    bound = float(np.max(np.abs(d.diag))) + driver.norm_bound(d.num_qubits)
    jumps = np.abs(np.diff(E0)) > np.diff(s_values) * bound * (1 + 1e-9) + 1e-9
    return GapCurve(
        s_values, E0, E1, gap, gd, min_gap, argmin_s,
        refined_s, refined_gap, int(jumps.sum()),
    )


def write_gap_csv(path, curve: GapCurve) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s", "E0", "E1", "gap", "gap_distinct"])
        for row in curve.rows():
            w.writerow([f"{v:.12g}" for v in row])


def read_gap_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {key: np.array([float(r[key]) for r in rows]) for key in rows[0]}


# --- ground-state readout -----------------------------------------------------

def ground_indices(d: DiagonalOperator, tolerance: float = 1e-9) -> np.ndarray:
    emin = d.diag.min()
    return np.flatnonzero(d.diag <= emin + tolerance * max(1.0, abs(emin)))


def ground_state_decode(d: DiagonalOperator, emap: EncodingMap, tolerance: float = 1e-9) -> list[Decoded]:
    """Decode every basis state within ``tolerance`` of the minimum energy.

    Raises ``GROUND_STATE_INFEASIBLE`` if any of them violates the constraint,
    which means the penalty constant is too weak for the objective scale.
    """
    if emap.num_qubits != d.num_qubits:
        raise SpectralError("LENGTH_MISMATCH", f"map has {emap.num_qubits} qubits, operator {d.num_qubits}")
    out = [decode_bits(emap, bits_of(int(k), d.num_qubits)) for k in ground_indices(d, tolerance)]
    bad = [dec for dec in out if not dec.feasible]
    if bad:
        raise SpectralError(
            "GROUND_STATE_INFEASIBLE",
            f"{len(bad)} of {len(out)} minimizers infeasible (A={emap.A}, B={emap.B}); "
            f"e.g. selection {bad[0].selection} with weight {bad[0].weight}",
        )
    return out
