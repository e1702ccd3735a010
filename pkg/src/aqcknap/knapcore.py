"""Classical 0-1 knapsack: instance validation, DP by weights, greedy, brute force.

Items are 0-indexed internally. Selections are tuples of 0/1 in item order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .errors import InstanceError

# headroom for int64 accumulation in the DP and brute-force tables
_INT_LIMIT = 2**62

BRUTE_MAX_ITEMS = 25
_BRUTE_CHUNK = 1 << 18

METHODS = ("dp", "greedy-stop", "greedy-skip", "brute")


@dataclass(frozen=True)
class KnapsackInstance:
    profits: tuple[int, ...]
    weights: tuple[int, ...]
    capacity: int

    @property
    def n(self) -> int:
        return len(self.profits)

    def to_dict(self) -> dict[str, Any]:
        return {
            "profits": list(self.profits),
            "weights": list(self.weights),
            "capacity": self.capacity,
        }


@dataclass(frozen=True)
class KnapsackSolution:
    selection: tuple[int, ...]
    profit: int
    weight: int
    method: str

    @property
    def items(self) -> tuple[int, ...]:
        """1-based indices of the chosen items."""
        return tuple(j + 1 for j, b in enumerate(self.selection) if b)

    def to_dict(self) -> dict[str, Any]:
        return {
            "selection": list(self.selection),
            "profit": self.profit,
            "weight": self.weight,
            "method": self.method,
        }


@dataclass(frozen=True)
class DPResult:
    solution: KnapsackSolution
    profile: tuple[int, ...] = field(repr=False)
    """Optimal profit z_n(d) for every capacity d = 0..c."""


def _as_int(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InstanceError("NOT_AN_INTEGER", f"{name}={value!r}")
    return int(value)


def validate_instance(profits: Sequence[int], weights: Sequence[int], capacity: int) -> KnapsackInstance:
    """Check the input conditions and return an immutable instance.

    Raises :class:`InstanceError` with one of ``LENGTH_MISMATCH``,
    ``TOO_FEW_ITEMS``, ``NEGATIVE_OR_ZERO_VALUE``, ``WEIGHT_EXCEEDS_CAPACITY``,
    ``TOTAL_WEIGHT_NOT_EXCEEDING_CAPACITY`` or ``VALUE_OVERFLOW``.
    """
    profits = tuple(_as_int(p, "profit") for p in profits)
    weights = tuple(_as_int(w, "weight") for w in weights)
    capacity = _as_int(capacity, "capacity")
    if len(profits) != len(weights):
        raise InstanceError(
            "LENGTH_MISMATCH", f"{len(profits)} profits vs {len(weights)} weights"
        )
    if len(profits) < 2:
        raise InstanceError("TOO_FEW_ITEMS", f"n={len(profits)} < 2")
    if capacity <= 0:
        raise InstanceError("NEGATIVE_OR_ZERO_VALUE", f"capacity={capacity}")
    for j, (p, w) in enumerate(zip(profits, weights), start=1):
        if p <= 0:
            raise InstanceError("NEGATIVE_OR_ZERO_VALUE", f"p_{j}={p}")
        if w <= 0:
            raise InstanceError("NEGATIVE_OR_ZERO_VALUE", f"w_{j}={w}")
    for j, w in enumerate(weights, start=1):
        if w > capacity:
            raise InstanceError("WEIGHT_EXCEEDS_CAPACITY", f"w_{j}={w} > c={capacity}")
    if sum(weights) <= capacity:
        raise InstanceError(
            "TOTAL_WEIGHT_NOT_EXCEEDING_CAPACITY",
            f"sum(w)={sum(weights)} <= c={capacity}; every item fits",
        )
    n = len(profits)
    if n * max(profits) >= _INT_LIMIT or n * max(weights) >= _INT_LIMIT:
        raise InstanceError("VALUE_OVERFLOW", "profit/weight sums exceed 62-bit range")
    return KnapsackInstance(profits, weights, capacity)


def instance_from_dict(raw: dict[str, Any]) -> KnapsackInstance:
    try:
        return validate_instance(raw["profits"], raw["weights"], raw["capacity"])
    except KeyError as exc:
        raise InstanceError("MISSING_FIELD", str(exc)) from None
    except TypeError as exc:
        raise InstanceError("MALFORMED_INSTANCE", str(exc)) from None


def load_instance(path) -> KnapsackInstance:
    """Read a JSON instance file ``{"profits": [...], "weights": [...], "capacity": c}``."""
    with open(path) as fh:
        text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(
            "PARSE_ERROR", f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(raw, dict):
        raise InstanceError("MALFORMED_INSTANCE", f"{path}: expected a JSON object")
    return instance_from_dict(raw)


def make_solution(inst: KnapsackInstance, selection: Sequence[int], method: str) -> KnapsackSolution:
    selection = tuple(int(b) for b in selection)
    profit = sum(p for p, b in zip(inst.profits, selection) if b)
    weight = sum(w for w, b in zip(inst.weights, selection) if b)
    return KnapsackSolution(selection, profit, weight, method)


def solve_dp(inst: KnapsackInstance) -> DPResult:
    """Dynamic programming by weights, O(n*c) time and space.

    ``z[j, d]`` is the best profit using the first j items with capacity d.
    Backtracking excludes item j whenever ``z[j, d] == z[j-1, d]`` so the
    returned selection is canonical under ties.
    """
    n, c = inst.n, inst.capacity
    z = np.zeros((n + 1, c + 1), dtype=np.int64)
    for j in range(1, n + 1):
        p, w = inst.profits[j - 1], inst.weights[j - 1]
        prev = z[j - 1]
        row = prev.copy()
        if w <= c:
            np.maximum(row[w:], prev[: c + 1 - w] + p, out=row[w:])
        z[j] = row

    selection = [0] * n
    d = c
    for j in range(n, 0, -1):
        if z[j, d] != z[j - 1, d]:
            selection[j - 1] = 1
            d -= inst.weights[j - 1]
    sol = make_solution(inst, selection, "dp")
    assert sol.profit == z[n, c]
    return DPResult(sol, tuple(int(v) for v in z[n]))


def efficiency_order(inst: KnapsackInstance) -> list[int]:
    """Item indices by decreasing p/w; equal ratios keep the smaller index first."""
    return sorted(range(inst.n), key=lambda j: (-Fraction(inst.profits[j], inst.weights[j]), j))


def solve_greedy(inst: KnapsackInstance, variant: str = "skip") -> KnapsackSolution:
    """Greedy by efficiency ratio.

    ``variant="stop"`` halts at the first item that does not fit;
    ``variant="skip"`` passes over it and keeps filling.
    """
    if variant not in ("stop", "skip"):
        raise ValueError(f"unknown greedy variant {variant!r}")
    selection = [0] * inst.n
    room = inst.capacity
    for j in efficiency_order(inst):
        if inst.weights[j] <= room:
            selection[j] = 1
            room -= inst.weights[j]
        elif variant == "stop":
            break
    return make_solution(inst, selection, f"greedy-{variant}")


def solve_brute(inst: KnapsackInstance) -> KnapsackSolution:
    """Exhaustive search over all 2^n subsets.

    Among optimal subsets the lexicographically smallest bitstring
    ``x_1 x_2 ... x_n`` wins. Enumeration index k has x_1 as its most
    significant bit, so the first maximum in index order is that string.
    """
    n = inst.n
    if n > BRUTE_MAX_ITEMS:
        raise InstanceError("INSTANCE_TOO_LARGE", f"n={n} > {BRUTE_MAX_ITEMS}")
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    p = np.asarray(inst.profits, dtype=np.int64)
    w = np.asarray(inst.weights, dtype=np.int64)
    best_profit, best_k = -1, 0
    total = 1 << n
    for start in range(0, total, _BRUTE_CHUNK):
        k = np.arange(start, min(start + _BRUTE_CHUNK, total), dtype=np.int64)
        bits = (k[:, None] >> shifts) & 1
        profit = bits @ p
        weight = bits @ w
        profit[weight > inst.capacity] = -1
        i = int(np.argmax(profit))
        if profit[i] > best_profit:
            best_profit, best_k = int(profit[i]), int(k[i])
    selection = [(best_k >> (n - 1 - j)) & 1 for j in range(n)]
    return make_solution(inst, selection, "brute")
