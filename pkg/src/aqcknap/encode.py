"""Quadratic binary (QUBO) problem Hamiltonians and their Ising form.

Variable layout for knapsack encodings: item bits ``x_0..x_{n-1}`` occupy
indices ``0..n-1`` and slack bits follow. Bit i of a basis index equals
``x_i``; the spin map is ``x = (1 - s) / 2`` so ``x = 1`` is ``s = -1``.

Ising energies use ``E(s) = offset - sum_i h_i s_i - sum_{i<j} J_ij s_i s_j``.
All coefficients are exact (``int`` or :class:`fractions.Fraction`).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import EncodingError
from .knapcore import KnapsackInstance

UNARY, LOG, SEARCH = "unary", "log", "search"


def _exact(value):
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Rational):
        f = Fraction(value)
        return f.numerator if f.denominator == 1 else f
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"non-exact coefficient {value!r}")


def _pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class QuadraticBinaryModel:
    """``constant + sum_i linear[i] x_i + sum_{i<j} quadratic[i, j] x_i x_j``."""

    num_vars: int
    linear: dict[int, Any] = field(default_factory=dict)
    quadratic: dict[tuple[int, int], Any] = field(default_factory=dict)
    constant: Any = 0

    def __post_init__(self):
        for i in self.linear:
            if not 0 <= i < self.num_vars:
                raise EncodingError("BAD_INDEX", f"linear index {i}")
        for i, j in self.quadratic:
            if not (0 <= i < j < self.num_vars):
                raise EncodingError("BAD_INDEX", f"quadratic key {(i, j)}")

    @classmethod
    def from_terms(cls, num_vars, linear=(), quadratic=(), constant=0):
        """Build from ``(i, coef)`` and ``(i, j, coef)`` iterables, merging duplicates.

        ``i == j`` quadratic entries fold into the linear part (``x^2 = x``).
        """
        lin: dict[int, Any] = {}
        quad: dict[tuple[int, int], Any] = {}
        for i, a in linear:
            lin[i] = lin.get(i, 0) + _exact(a)
        for i, j, q in quadratic:
            if i == j:
                lin[i] = lin.get(i, 0) + _exact(q)
            else:
                key = _pair(i, j)
                quad[key] = quad.get(key, 0) + _exact(q)
        lin = {i: a for i, a in sorted(lin.items()) if a != 0}
        quad = {k: q for k, q in sorted(quad.items()) if q != 0}
        return cls(num_vars, lin, quad, _exact(constant))

    @property
    def is_integral(self) -> bool:
        vals = itertools.chain(self.linear.values(), self.quadratic.values(), [self.constant])
        return all(isinstance(v, int) for v in vals)


@dataclass(frozen=True)
class IsingModel:
    num_qubits: int
    h: tuple[Any, ...]
    J: dict[tuple[int, int], Any]
    offset: Any = 0

    def to_dict(self, encoding: "EncodingMap | None" = None) -> dict[str, Any]:
        out: dict[str, Any] = {
            "num_qubits": self.num_qubits,
            "h": [float(v) for v in self.h],
            "J": [[i, j, float(v)] for (i, j), v in sorted(self.J.items())],
            "offset": float(self.offset),
        }
        if encoding is not None:
            out["encoding"] = encoding.to_dict()
        return out

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "IsingModel":
        n = int(raw["num_qubits"])
        h = tuple(_exact(v) for v in raw["h"])
        if len(h) != n:
            raise EncodingError("LENGTH_MISMATCH", f"{len(h)} fields for {n} qubits")
        J: dict[tuple[int, int], Any] = {}
        for i, j, v in raw["J"]:
            i, j = int(i), int(j)
            if i == j or not (0 <= i < n and 0 <= j < n):
                raise EncodingError("BAD_INDEX", f"coupling {(i, j)}")
            key = _pair(i, j)
            J[key] = J.get(key, 0) + _exact(v)
        return cls(n, h, J, _exact(raw.get("offset", 0)))


@dataclass(frozen=True)
class EncodingMap:
    """Role of each qubit plus the penalty constants used to build the model."""

    kind: str
    item_qubits: tuple[int, ...]
    slack_qubits: tuple[int, ...]
    slack_coefficients: tuple[int, ...]
    A: int
    B: int
    M: int | None = None
    weights: tuple[int, ...] = ()
    profits: tuple[int, ...] = ()
    capacity: int | None = None

    @property
    def num_qubits(self) -> int:
        return len(self.item_qubits) + len(self.slack_qubits)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "item_qubits": list(self.item_qubits),
            "slack_qubits": list(self.slack_qubits),
            "slack_coefficients": list(self.slack_coefficients),
            "A": self.A,
            "B": self.B,
            "M": self.M,
            "weights": list(self.weights),
            "profits": list(self.profits),
            "capacity": self.capacity,
        }


@dataclass(frozen=True)
class Decoded:
    selection: tuple[int, ...]
    slack_value: int
    profit: int
    weight: int
    feasible: bool


def default_penalties(profits: Sequence[int]) -> tuple[int, int]:
    """Smallest integers with ``0 < B*max(p) < A``: B=1, A=max(p)+1."""
    return max(profits) + 1, 1


def sufficient_penalty(profits: Sequence[int], B=1):
    """A penalty that guarantees a correct ground state for both knapsack encodings.

    ``A > B*max(p)`` is enough for the log encoding but not for the one-hot
    one: switching on two slack bits costs only ``A`` yet lets the slack
    register reach weights near ``2c``, which can admit items worth more than
    ``A``. With ``A > B*sum(p)`` every constraint violation outweighs all profit.
    """
    return _exact(B) * sum(profits) + 1


def check_penalties(A, B, largest: int) -> None:
    if not (0 < B * largest < A):
        raise EncodingError(
            "PENALTY_CONDITION_VIOLATED",
            f"need 0 < B*max = {B}*{largest} = {B * largest} < A = {A}",
        )


def _add_square(lin, quad, weight, const, terms):
    """Accumulate ``weight * (const + sum c_v x_v)^2``; returns the constant part."""
    for v, c in terms:
        lin.append((v, weight * (2 * const * c + c * c)))
    for (u, cu), (v, cv) in itertools.combinations(terms, 2):
        quad.append((u, v, weight * 2 * cu * cv))
    return weight * const * const


def log_slack_coefficients(capacity: int) -> tuple[int, list[int]]:
    """Return ``M = floor(log2 c)`` and ``[1, 2, ..., 2^(M-1), c + 1 - 2^M]``."""
    if capacity < 1:
        raise EncodingError("OUT_OF_RANGE", f"capacity {capacity} < 1")
    M = capacity.bit_length() - 1
    return M, [1 << j for j in range(M)] + [capacity + 1 - (1 << M)]


def _penalties(inst, A, B):
    if A is None and B is None:
        A, B = default_penalties(inst.profits)
    elif A is None:
        A = B * max(inst.profits) + 1
    elif B is None:
        B = 1
    A, B = _exact(A), _exact(B)
    check_penalties(A, B, max(inst.profits))
    return A, B


def build_unary_knapsack(inst: KnapsackInstance, A=None, B=None):
    """One-hot slack encoding over ``n + c`` variables.

    ``A (1 - sum_j y_j)^2 + A (sum_j j y_j - sum_i w_i x_i)^2 - B sum_i p_i x_i``
    with ``y_j`` (j = 1..c) at index ``n + j - 1``.
    """
    A, B = _penalties(inst, A, B)
    n, c = inst.n, inst.capacity
    slack = list(range(n, n + c))
    coeffs = list(range(1, c + 1))
    lin: list = []
    quad: list = []
    const = _add_square(lin, quad, A, 1, [(v, -1) for v in slack])
    const += _add_square(
        lin, quad, A, 0,
        [(v, k) for v, k in zip(slack, coeffs)] + [(i, -w) for i, w in enumerate(inst.weights)],
    )
    lin.extend((i, -B * p) for i, p in enumerate(inst.profits))
    model = QuadraticBinaryModel.from_terms(n + c, lin, quad, const)
    emap = EncodingMap(
        UNARY, tuple(range(n)), tuple(slack), tuple(coeffs), A, B,
        weights=inst.weights, profits=inst.profits, capacity=c,
    )
    return model, emap


def build_log_knapsack(inst: KnapsackInstance, A=None, B=None):
    """Binary slack encoding over ``n + M + 1`` variables, ``M = floor(log2 c)``.

    ``A (sum_{j<M} 2^j y_j + (c + 1 - 2^M) y_M - sum_i w_i x_i)^2 - B sum_i p_i x_i``
    """
    A, B = _penalties(inst, A, B)
    n, c = inst.n, inst.capacity
    M, coeffs = log_slack_coefficients(c)
    slack = list(range(n, n + M + 1))
    lin: list = []
    quad: list = []
    const = _add_square(
        lin, quad, A, 0,
        [(v, k) for v, k in zip(slack, coeffs)] + [(i, -w) for i, w in enumerate(inst.weights)],
    )
    lin.extend((i, -B * p) for i, p in enumerate(inst.profits))
    model = QuadraticBinaryModel.from_terms(n + M + 1, lin, quad, const)
    emap = EncodingMap(
        LOG, tuple(range(n)), tuple(slack), tuple(coeffs), A, B, M=M,
        weights=inst.weights, profits=inst.profits, capacity=c,
    )
    return model, emap


def build_knapsack(inst: KnapsackInstance, encoding: str = LOG, A=None, B=None):
    if encoding == UNARY:
        return build_unary_knapsack(inst, A, B)
    if encoding == LOG:
        return build_log_knapsack(inst, A, B)
    raise EncodingError("UNKNOWN_ENCODING", encoding)


def qubit_counts(inst: KnapsackInstance) -> dict[str, int]:
    return {UNARY: inst.n + inst.capacity, LOG: inst.n + inst.capacity.bit_length()}


def build_search_model(values: Sequence[int], A=None, B=1, *, blind: bool = False):
    """Largest-element search: ``A (1 - sum_i x_i)^2 - B sum_i n_i x_i``.

    With ``blind=False`` the condition ``A > B*max(n_i)`` is enforced (and A
    defaults to ``B*max + 1``). ``blind=True`` takes A as given, which is the
    realistic setting where the maximum is unknown.
    """
    values = [int(v) for v in values]
    if len(values) < 2:
        raise EncodingError("TOO_FEW_VALUES", f"N={len(values)} < 2")
    if any(v <= 0 for v in values):
        raise EncodingError("NEGATIVE_OR_ZERO_VALUE", str(values))
    B = _exact(B)
    if A is None:
        if blind:
            raise EncodingError("MISSING_PENALTY", "blind mode needs an explicit A")
        A = B * max(values) + 1
    A = _exact(A)
    if not blind:
        check_penalties(A, B, max(values))
    N = len(values)
    lin: list = []
    quad: list = []
    const = _add_square(lin, quad, A, 1, [(i, -1) for i in range(N)])
    lin.extend((i, -B * v) for i, v in enumerate(values))
    model = QuadraticBinaryModel.from_terms(N, lin, quad, const)
    emap = EncodingMap(SEARCH, tuple(range(N)), (), (), A, B, profits=tuple(values))
    return model, emap


def to_ising(model: QuadraticBinaryModel) -> IsingModel:
    """Substitute ``x_i = (1 - s_i)/2``; exact for every assignment.

    ``a x_i`` gives ``a/2 - (a/2) s_i``; ``q x_i x_j`` gives
    ``q/4 (1 - s_i - s_j + s_i s_j)``.
    """
    h = [Fraction(0)] * model.num_vars
    J: dict[tuple[int, int], Fraction] = {}
    offset = Fraction(model.constant)
    for i, a in model.linear.items():
        offset += Fraction(a, 2)
        h[i] += Fraction(a, 2)
    for (i, j), q in model.quadratic.items():
        q4 = Fraction(q) / 4
        offset += q4
        h[i] += q4
        h[j] += q4
        J[(i, j)] = J.get((i, j), 0) - q4
    return IsingModel(
        model.num_vars,
        tuple(_exact(v) for v in h),
        {k: _exact(v) for k, v in sorted(J.items()) if v != 0},
        _exact(offset),
    )


def _check_length(n, assignment):
    if len(assignment) != n:
        raise EncodingError("LENGTH_MISMATCH", f"assignment length {len(assignment)} != {n}")


def model_energy(model: QuadraticBinaryModel, assignment: Sequence[int]):
    """Exact energy of a 0/1 assignment."""
    _check_length(model.num_vars, assignment)
    x = [int(b) for b in assignment]
    e = model.constant
    for i, a in model.linear.items():
        if x[i]:
            e += a
    for (i, j), q in model.quadratic.items():
        if x[i] and x[j]:
            e += q
    return e


def ising_energy(ising: IsingModel, spins: Sequence[int]):
    """Exact energy of a +/-1 spin configuration."""
    _check_length(ising.num_qubits, spins)
    e = ising.offset
    for hi, si in zip(ising.h, spins):
        e -= hi * si
    for (i, j), Jij in ising.J.items():
        e -= Jij * spins[i] * spins[j]
    return e


def bits_of(index: int, n: int) -> tuple[int, ...]:
    """Assignment whose bit i is ``(index >> i) & 1``."""
    return tuple((index >> i) & 1 for i in range(n))


def all_energies(model: QuadraticBinaryModel) -> np.ndarray:
    """Energies of all ``2^N`` assignments, entry k for ``bits_of(k)``.

    Integral models are evaluated in int64 (exact); otherwise in float64.
    """
    N = model.num_vars
    if model.is_integral:
        dtype, conv = np.int64, int
    else:
        dtype, conv = np.float64, float
    k = np.arange(1 << N, dtype=np.int64)
    out = np.full(1 << N, conv(model.constant), dtype=dtype)
    bits = [((k >> i) & 1).astype(dtype) for i in range(N)]
    for i, a in model.linear.items():
        out += conv(a) * bits[i]
    for (i, j), q in model.quadratic.items():
        out += conv(q) * (bits[i] * bits[j])
    return out


def decode_bits(emap: EncodingMap, assignment: Sequence[int]) -> Decoded:
    """Split an assignment into item selection and represented slack total."""
    _check_length(emap.num_qubits, assignment)
    sel = tuple(int(assignment[q]) for q in emap.item_qubits)
    slack = sum(c * int(assignment[q]) for q, c in zip(emap.slack_qubits, emap.slack_coefficients))
    profit = sum(p for p, b in zip(emap.profits, sel) if b)
    if emap.kind == SEARCH:
        return Decoded(sel, 0, profit, sum(sel), sum(sel) == 1)
    weight = sum(w for w, b in zip(emap.weights, sel) if b)
    return Decoded(sel, slack, profit, weight, weight <= emap.capacity)


def count_weight_representations(emap: EncodingMap, target_weight: int):
    """All slack bitstrings (tuples over the slack qubits) whose weighted sum hits the target."""
    if emap.kind == SEARCH:
        raise EncodingError("NO_SLACK", "search encodings carry no slack register")
    if not 0 <= target_weight <= emap.capacity:
        raise EncodingError("OUT_OF_RANGE", f"target {target_weight} not in [0, {emap.capacity}]")
    reps = [
        bits
        for bits in itertools.product((0, 1), repeat=len(emap.slack_coefficients))
        if sum(c * b for c, b in zip(emap.slack_coefficients, bits)) == target_weight
    ]
    return len(reps), reps


def brute_force_minimizers(model: QuadraticBinaryModel) -> tuple[Any, list[int]]:
    """Minimum energy and every basis index attaining it."""
    if model.num_vars > 26:
        raise EncodingError("TOO_MANY_VARIABLES", f"N={model.num_vars}")
    energies = all_energies(model)
    emin = energies.min()
    return emin.item(), np.flatnonzero(energies == emin).tolist()


def save_ising(path, ising: IsingModel, emap: EncodingMap | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(ising.to_dict(emap), fh, indent=1)
        fh.write("\n")


def load_ising(path) -> IsingModel:
    with open(path) as fh:
        return IsingModel.from_dict(json.load(fh))


def iter_assignments(n: int) -> Iterable[tuple[int, ...]]:
    for k in range(1 << n):
        yield bits_of(k, n)
