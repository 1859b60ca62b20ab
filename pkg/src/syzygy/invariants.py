"""Dense-matrix invariants: power sums, principal invariants by three routes,
and exact generalized Kronecker delta components."""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from math import factorial
from typing import Sequence

import numpy as np

from .combinatorics import Permutation, cycle_decomposition, permutations_with_sign
from .errors import DomainError, ResourceLimitError

MAX_DELTA_ROUTE_ORDER = 6
MAX_DELTA_COMPONENT_ORDER = 8
LEIBNIZ_MAX = 6

ROUTES = ("newton", "delta", "minors")


def as_matrix(A) -> np.ndarray:
    """Validate ``A`` as a finite square matrix and return a read-only float64 copy."""
    arr = np.array(A, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DomainError(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("matrix entries must be finite")
    arr.flags.writeable = False
    return arr


def load_matrix(text: str) -> np.ndarray:
    """Parse ``{"dim": m, "rows": [[...], ...]}``."""
    try:
        data = json.loads(text)
        dim = data["dim"]
        rows = data["rows"]
    except (ValueError, KeyError, TypeError) as exc:
        raise DomainError(f"malformed matrix JSON: {exc}") from exc
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise DomainError("'dim' must be an integer")
    if not isinstance(rows, list) or len(rows) != dim or any(
        not isinstance(r, list) or len(r) != dim for r in rows
    ):
        raise DomainError(f"'rows' must be a {dim}x{dim} nested list")
    if any(isinstance(x, bool) or not isinstance(x, (int, float)) for r in rows for x in r):
        raise DomainError("matrix entries must be numbers")
    return as_matrix(rows)


def dump_matrix(A) -> str:
    A = as_matrix(A)
    return json.dumps({"dim": A.shape[0], "rows": A.tolist()})


@dataclass(frozen=True)
class InvariantVector:
    """``values[k-1]`` holds ``p_k`` (basis ``"p"``) or ``sigma_k`` (basis ``"sigma"``)."""

    basis: str
    values: tuple

    def __post_init__(self):
        if self.basis not in ("p", "sigma"):
            raise DomainError(f"unknown basis {self.basis!r}")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def to_json(self) -> str:
        return json.dumps({"basis": self.basis, "values": list(self.values)})


def matrix_powers(A, top: int) -> list[np.ndarray]:
    """``[I, A, A^2, ..., A^top]`` by repeated multiplication."""
    A = as_matrix(A)
    out = [np.eye(A.shape[0])]
    for _ in range(top):
        out.append(out[-1] @ A)
    return out


def power_sums(A) -> InvariantVector:
    A = as_matrix(A)
    m = A.shape[0]
    pw = matrix_powers(A, m)
    return InvariantVector("p", [np.trace(pw[k]) for k in range(1, m + 1)])


def newton_girard(p: InvariantVector) -> InvariantVector:
    """Elementary symmetric functions from power sums.

    Uses ``k*s_k = sum_{i=1..k} (-1)^(i-1) s_{k-i} p_i`` with ``s_0 = 1``.
    """
    if p.basis != "p":
        raise DomainError("newton_girard expects a power-sum vector")
    s = [1.0]
    for k in range(1, len(p) + 1):
        acc = 0.0
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * s[k - i] * p[i - 1]
        s.append(acc / k)
    return InvariantVector("sigma", s[1:])


def _check_order(k, m):
    if not 1 <= k <= m:
        raise DomainError(f"invariant order k={k} outside [1, {m}]")


def sigma_via_delta(A, k: int, cap: int = MAX_DELTA_ROUTE_ORDER) -> float:
    """``(1/k!) delta^{j_1..j_k}_{i_1..i_k} A^{i_1}_{j_1} ... A^{i_k}_{j_k}``.

    Summed over the k! permutations of the delta's determinant; each
    permutation's index sum factors into traces along its cycles.
    """
    A = as_matrix(A)
    m = A.shape[0]
    _check_order(k, m)
    if m > cap or k > cap:
        raise ResourceLimitError("order", max(m, k), cap)
    traces = [np.trace(P) for P in matrix_powers(A, k)]
    total = 0.0
    for perm, sign in permutations_with_sign(k):
        term = float(sign)
        for cyc in cycle_decomposition(perm):
            term *= traces[len(cyc)]
        total += term
    return total / factorial(k)


def leibniz_det(M) -> float:
    """Determinant by permutation expansion."""
    M = np.asarray(M)
    n = M.shape[0]
    total = 0.0
    for perm, sign in permutations_with_sign(n, cap=n):
        prod = float(sign)
        for r, c in enumerate(perm.images):
            prod *= M[r, c]
        total += prod
    return total


def principal_minors_sum(A, k: int) -> float:
    """Sum of all k x k principal minors (Leibniz up to 6x6, LU beyond)."""
    A = as_matrix(A)
    m = A.shape[0]
    _check_order(k, m)
    det = leibniz_det if k <= LEIBNIZ_MAX else np.linalg.det
    return float(sum(det(A[np.ix_(rows, rows)]) for rows in combinations(range(m), k)))


def principal_invariants(A, route: str = "newton") -> InvariantVector:
    """sigma_1..sigma_m of ``A`` by the named route."""
    A = as_matrix(A)
    m = A.shape[0]
    if route == "newton":
        return newton_girard(power_sums(A))
    if route == "delta":
        if m > MAX_DELTA_ROUTE_ORDER:
            raise ResourceLimitError("dim", m, MAX_DELTA_ROUTE_ORDER)
        return InvariantVector("sigma", [sigma_via_delta(A, k) for k in range(1, m + 1)])
    if route == "minors":
        return InvariantVector("sigma", [principal_minors_sum(A, k) for k in range(1, m + 1)])
    raise DomainError(f"unknown route {route!r}; expected one of {ROUTES}")


def generalized_delta_component(
    upper: Sequence[int], lower: Sequence[int], m: int, cap: int = MAX_DELTA_COMPONENT_ORDER
) -> int:
    """Exact ``delta^{upper}_{lower}`` in ``m`` dimensions.

    The determinant of ``[delta(lower[r], upper[c])]`` expanded over
    permutations, skipping branches that hit a zero entry.
    """
    upper = tuple(int(i) for i in upper)
    lower = tuple(int(i) for i in lower)
    k = len(upper)
    if len(lower) != k:
        raise DomainError("upper and lower index tuples must have equal length")
    if k > cap:
        raise ResourceLimitError("k", k, cap)
    for i in upper + lower:
        if not 0 <= i < m:
            raise DomainError(f"index {i} out of range [0, {m})")

    total = 0
    chosen = [0] * k
    used = [False] * k

    def rec(r):
        nonlocal total
        if r == k:
            total += Permutation._trusted(tuple(chosen)).sign
            return
        for c in range(k):
            if not used[c] and lower[r] == upper[c]:
                used[c] = True
                chosen[r] = c
                rec(r + 1)
                used[c] = False

    rec(0)
    return total

