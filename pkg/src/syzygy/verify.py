"""Brute-force oracles and seeded end-to-end checks.

Random matrices have i.i.d. entries uniform on [-1, 1] drawn from NumPy's
PCG64 generator.  Trial ``t`` under seed ``s`` uses its own stream seeded by
``SeedSequence([s, t])``, so a trial's matrix never depends on how trials are
scheduled.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from itertools import product
from math import factorial

import numpy as np

from .errors import DomainError, ResourceLimitError
from .invariants import as_matrix, generalized_delta_component, matrix_powers, newton_girard, power_sums
from .symbolic import MAX_EXPANSION_DIM, expand_delta_contraction

REL_TOL = 1e-9
ABS_TOL = 1e-12
MAX_ORACLE_DIM = 3
FORCED_ORACLE_DIM = 4


@dataclass(frozen=True)
class VerificationReport:
    check_name: str
    dimension: int
    trials: int
    max_relative_residual: float
    passed: bool
    seed: int

    def to_dict(self) -> dict:
        return {
            "check": self.check_name,
            "dim": self.dimension,
            "trials": self.trials,
            "max_rel_residual": float(self.max_relative_residual),
            "passed": bool(self.passed),
            "seed": str(self.seed),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    if seed < 0 or trial < 0:
        raise DomainError("seed and trial index must be non-negative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, trial])))


def random_matrix(dim: int, seed: int, trial: int = 0) -> np.ndarray:
    return as_matrix(trial_rng(seed, trial).uniform(-1.0, 1.0, size=(dim, dim)))


def _oracle_cap(n, force):
    cap = FORCED_ORACLE_DIM if force else MAX_ORACLE_DIM
    if n > cap:
        raise ResourceLimitError("dim", n, cap)


def check_delta_vanishes(m: int, force: bool = False) -> VerificationReport:
    """Evaluate every component of the (m+1)-index delta in m dimensions; all must be 0.

    ``trials`` in the report is the number of components inspected.
    """
    if m < 1:
        raise DomainError(f"dimension must be positive, got {m}")
    _oracle_cap(m, force)
    k = m + 1
    worst = 0
    count = 0
    for upper in product(range(m), repeat=k):
        for lower in product(range(m), repeat=k):
            worst = max(worst, abs(generalized_delta_component(upper, lower, m)))
            count += 1
    return VerificationReport("delta-vanishes", m, count, float(worst), worst == 0, 0)


@lru_cache(maxsize=None)
def _delta_support(n: int, order: int) -> tuple:
    """Nonzero ``delta^{p j..}_{q i..}`` components in ``n`` dimensions as
    ``(p, q, i_tuple, j_tuple, value)``."""
    out = []
    for p, q in product(range(n), repeat=2):
        for i_idx in product(range(n), repeat=order):
            for j_idx in product(range(n), repeat=order):
                v = generalized_delta_component((p,) + j_idx, (q,) + i_idx, n)
                if v:
                    out.append((p, q, i_idx, j_idx, v))
    return tuple(out)


def brute_force_delta_contract(A, order: int | None = None, force: bool = False) -> np.ndarray:
    """``delta^{p j_1..j_k}_{q i_1..i_k} A^{i_1}_{j_1} ... A^{i_k}_{j_k}`` by full index enumeration.

    ``order`` (the number of copies of ``A``) defaults to the dimension, where
    the result vanishes identically.  A smaller order gives a nonzero tensor,
    which makes this a sign and index-placement oracle for the expansion.
    """
    A = as_matrix(A)
    n = A.shape[0]
    order = n if order is None else order
    if order < 1:
        raise DomainError(f"order must be positive, got {order}")
    _oracle_cap(max(n, order), force)
    out = np.zeros((n, n))
    for p, q, i_idx, j_idx, v in _delta_support(n, order):
        prod = float(v)
        for i, j in zip(i_idx, j_idx):
            prod *= A[i, j]
        out[p, q] += prod
    return out


def ch_polynomial(A) -> np.ndarray:
    """``sum_k (-1)^k sigma_k A^(m-k)`` with sigma from Newton-Girard."""
    A = as_matrix(A)
    m = A.shape[0]
    sig = (1.0,) + newton_girard(power_sums(A)).values
    pw = matrix_powers(A, m)
    return sum((-1) ** k * sig[k] * pw[m - k] for k in range(m + 1))


def ch_residual(A) -> float:
    """Frobenius norm of the characteristic polynomial evaluated at ``A``, over ``max(1, |A|_F^m)``."""
    A = as_matrix(A)
    m = A.shape[0]
    R = ch_polynomial(A)
    return float(np.linalg.norm(R) / max(1.0, np.linalg.norm(A) ** m))


def scaled_sigma_form(A, m: int) -> np.ndarray:
    """``m! * sum_{k=0..m} (-1)^(m-k) sigma_k(A) A^(m-k)``; ``sigma_k = 0`` above dim."""
    A = as_matrix(A)
    n = A.shape[0]
    sig = (1.0,) + newton_girard(power_sums(A)).values + (0.0,) * max(0, m - n)
    pw = matrix_powers(A, m)
    return factorial(m) * sum((-1) ** (m - k) * sig[k] * pw[m - k] for k in range(m + 1))


def _run(fn, trials, threads):
    if threads and threads > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, range(trials)))
    return [fn(t) for t in range(trials)]


def _check_trials(trials, seed):
    if trials < 1:
        raise DomainError(f"trials must be at least 1, got {trials}")
    if seed < 0:
        raise DomainError(f"seed must be non-negative, got {seed}")


def verify_expansion_identity(
    m: int, trials: int, seed: int, tol: float = REL_TOL, threads: int | None = 1, cap: int = MAX_EXPANSION_DIM
) -> VerificationReport:
    """Evaluate the power-sum expansion on seeded random matrices and compare
    against ``m! * sum (-1)^(m-k) sigma_k A^(m-k)``; for ``m <= 3`` also against
    the brute-force contraction.

    Residuals are measured relative to the entrywise sum of absolute term
    values of the expansion (at least 1).
    """
    _check_trials(trials, seed)
    poly = expand_delta_contraction(m, cap=cap, threads=threads)

    def one(t):
        A = random_matrix(m, seed, t)
        E = poly.evaluate(A)
        scale = max(1.0, float(poly.evaluate_magnitude(A).max()))
        worst = float(np.abs(E - scaled_sigma_form(A, m)).max()) / scale
        if m <= MAX_ORACLE_DIM:
            worst = max(worst, float(np.abs(E - brute_force_delta_contract(A)).max()) / scale)
        return worst

    worst = max(_run(one, trials, threads))
    return VerificationReport("expansion-identity", m, trials, worst, worst <= tol, seed)


def verify_ch_residual(m: int, trials: int, seed: int, tol: float = REL_TOL, threads: int | None = 1) -> VerificationReport:
    _check_trials(trials, seed)
    if m < 1:
        raise DomainError(f"dimension must be positive, got {m}")
    worst = max(_run(lambda t: ch_residual(random_matrix(m, seed, t)), trials, threads))
    return VerificationReport("ch-residual", m, trials, worst, worst <= tol, seed)


def verify_embedded_contraction(
    order: int, trials: int, seed: int, tol: float = 1e-10, force: bool = False
) -> VerificationReport:
    """Compare the order-``k`` expansion with the brute-force contraction on
    ``(k+1) x (k+1)`` matrices, where neither side vanishes."""
    _check_trials(trials, seed)
    dim = order + 1
    _oracle_cap(dim, force)
    poly = expand_delta_contraction(order)
    worst = 0.0
    for t in range(trials):
        A = random_matrix(dim, seed, t)
        B = brute_force_delta_contract(A, order=order, force=force)
        scale = max(1.0, float(poly.evaluate_magnitude(A).max()))
        worst = max(worst, float(np.abs(poly.evaluate(A) - B).max()) / scale)
    return VerificationReport("embedded-contraction", dim, trials, worst, worst <= tol, seed)
