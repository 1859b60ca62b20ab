"""Exact expansion of the (m+1)-index generalized Kronecker delta against m
copies of a matrix, collected into trace monomials ``c * prod tr(A^l) * A^e``.

Index placement is ``delta^{p j_1..j_m}_{q i_1..i_m} A^{i_1}_{j_1} ... A^{i_m}_{j_m}``
with the free pair ``(p, q)`` in slot 0.  A permutation ``s`` of the delta's
determinant identifies upper slot ``r`` with lower slot ``s(r)``; following
the chain from ``p`` reaches ``q`` after the cycle of ``s`` through slot 0,
giving ``(A^(c-1))^p_q`` for a cycle of length ``c``.  Every other cycle of
length ``l`` closes into ``tr(A^l)``.
"""

from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Iterable, Mapping

import numpy as np

from .combinatorics import permutations_with_sign
from .errors import DomainError, InconsistencyError, ResourceLimitError
from .invariants import as_matrix, matrix_powers, newton_girard, power_sums

MAX_EXPANSION_DIM = 10
PYTHON_ENGINE_MAX_DIM = 4
_NUMPY_BLOCK_SUFFIX = 9

P_BASIS = "p"
SIGMA_BASIS = "sigma"


@dataclass(frozen=True, order=True)
class TraceMonomial:
    """``prod_i X_{l_i} * A^power`` where ``X`` is ``tr(A^l)`` or ``sigma_l`` by basis.

    ``trace_cycles`` is kept sorted in descending order; that tuple together
    with ``power`` is the canonical key.
    """

    power: int
    trace_cycles: tuple = ()

    def __post_init__(self):
        cycles = tuple(sorted((int(c) for c in self.trace_cycles), reverse=True))
        if self.power < 0 or any(c < 1 for c in cycles):
            raise DomainError(f"invalid monomial power={self.power} cycles={cycles}")
        object.__setattr__(self, "trace_cycles", cycles)

    @property
    def degree(self) -> int:
        return self.power + sum(self.trace_cycles)

    @property
    def key(self) -> tuple:
        return (self.power, self.trace_cycles)


@dataclass(frozen=True)
class InvariantSymbol:
    kind: str
    order: int

    def __str__(self):
        return f"{'p' if self.kind == P_BASIS else 's'}{self.order}"


def _sort_key(mono: TraceMonomial):
    return (-mono.power, mono.trace_cycles)


class SymbolicPolynomial:
    """Exact linear combination of trace monomials in one basis."""

    __slots__ = ("_terms", "basis")

    def __init__(self, terms: Mapping[TraceMonomial, object] | Iterable = (), basis: str = P_BASIS):
        if basis not in (P_BASIS, SIGMA_BASIS):
            raise DomainError(f"unknown basis {basis!r}")
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for mono, coeff in items:
            if not isinstance(mono, TraceMonomial):
                mono = TraceMonomial(*mono)
            acc[mono] = acc.get(mono, 0) + Fraction(coeff)
        self._terms = {k: v for k, v in acc.items() if v != 0}
        self.basis = basis

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """Terms in canonical order: descending power, then ascending trace key."""
        return sorted(self._terms.items(), key=lambda kv: _sort_key(kv[0]))

    def coefficient(self, power: int, cycles=()) -> Fraction:
        return self._terms.get(TraceMonomial(power, tuple(cycles)), Fraction(0))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if not isinstance(other, SymbolicPolynomial):
            return NotImplemented
        return self.basis == other.basis and self._terms == other._terms

    def __hash__(self):
        return hash((self.basis, frozenset(self._terms.items())))

    def __repr__(self):
        return f"SymbolicPolynomial({render(self)!r}, basis={self.basis!r})"

    def __add__(self, other: "SymbolicPolynomial") -> "SymbolicPolynomial":
        if self.basis != other.basis:
            raise DomainError("cannot add polynomials in different bases")
        return SymbolicPolynomial(list(self._terms.items()) + list(other._terms.items()), self.basis)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "SymbolicPolynomial":
        f = Fraction(factor)
        return SymbolicPolynomial({k: v * f for k, v in self._terms.items()}, self.basis)

    @property
    def degrees(self) -> set:
        return {mono.degree for mono in self._terms}

    def evaluate(self, A) -> np.ndarray:
        """Substitute a numeric matrix; ``p_k -> tr(A^k)`` or ``s_k -> sigma_k(A)``."""
        return _evaluate(self, A, absolute=False)

    def evaluate_magnitude(self, A) -> np.ndarray:
        """Entrywise sum of ``|term|``; the natural scale for relative comparisons."""
        return _evaluate(self, A, absolute=True)


def _evaluate(poly, A, absolute):
    A = as_matrix(A)
    n = A.shape[0]
    top = max([mono.power for mono in poly._terms] + [max(mono.trace_cycles, default=0) for mono in poly._terms] + [n])
    powers = matrix_powers(A, top)
    if poly.basis == P_BASIS:
        scalars = [1.0] + [float(np.trace(P)) for P in powers[1:]]
    else:
        sig = newton_girard(power_sums(A)).values
        # sigma_k vanishes identically above the matrix dimension
        scalars = [1.0] + list(sig) + [0.0] * (top - n)
    out = np.zeros((n, n))
    for mono, coeff in poly._terms.items():
        s = float(coeff)
        for c in mono.trace_cycles:
            s *= scalars[c]
        out += abs(s) * np.abs(powers[mono.power]) if absolute else s * powers[mono.power]
    return out


# ---------------------------------------------------------------------------
# permutation-sum kernels


def _collect_python(n, start=0, stop=None):
    """Cycle-type tally over lexicographic ranks ``[start, stop)`` of S_n."""
    counts: Counter = Counter()
    seen_total = 0
    for perm, sign in permutations_with_sign(n, start, stop, cap=n):
        images = perm.images
        seen = [False] * n
        j, c = 0, 0
        while not seen[j]:
            seen[j] = True
            j = images[j]
            c += 1
        others = []
        for s in range(1, n):
            if not seen[s]:
                length = 0
                j = s
                while not seen[j]:
                    seen[j] = True
                    j = images[j]
                    length += 1
                others.append(length)
        counts[(c - 1, tuple(sorted(others, reverse=True)))] += sign
        seen_total += 1
    return counts, seen_total


@lru_cache(maxsize=None)
def _lex_permutations(n):
    """All permutations of ``range(n)`` in lexicographic order, shape ``(n!, n)``."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    sub = _lex_permutations(n - 1)
    blocks = []
    for first in range(n):
        rest = np.array([v for v in range(n) if v != first], dtype=np.int8)
        block = np.empty((sub.shape[0], n), dtype=np.int8)
        block[:, 0] = first
        block[:, 1:] = rest[sub]
        blocks.append(block)
    out = np.concatenate(blocks)
    out.flags.writeable = False
    return out


def _collect_numpy(n, prefix):
    """Cycle-type tally over all permutations of S_n whose leading images are ``prefix``.

    Each row's cycles are labelled by their minimum element using pointer
    doubling; ``bincount`` over the labels then gives every cycle length.
    """
    k = len(prefix)
    rest = np.array([v for v in range(n) if v not in prefix], dtype=np.int8)
    suffix = _lex_permutations(n - k)
    rows = suffix.shape[0]
    P = np.empty((rows, n), dtype=np.int32)
    P[:, :k] = prefix
    P[:, k:] = rest[suffix]

    offsets = (np.arange(rows, dtype=np.int32) * n)[:, None]
    jump = (P + offsets).ravel()
    label = (np.arange(n, dtype=np.int32)[None, :] + offsets).ravel()
    reach = 1
    while reach < n:
        label = np.minimum(label, label[jump])
        reach *= 2
        if reach < n:
            jump = jump[jump]
    sizes = np.bincount(label, minlength=rows * n).reshape(rows, n)

    # the cycle labelled 0 is the open one; the rest are encoded as a
    # multiset of lengths in base n+1
    base = n + 1
    weights = np.zeros(n + 1, dtype=np.int64)
    weights[1:] = base ** np.arange(n, dtype=np.int64)
    keys = weights[sizes[:, 1:]].sum(axis=1) + sizes[:, 0] * base ** n

    _, first_idx, cnt = np.unique(keys, return_index=True, return_counts=True)
    counts: Counter = Counter()
    for row, c in zip(first_idx, cnt):
        sign = -1 if (n - int(np.count_nonzero(sizes[row]))) % 2 else 1
        others = tuple(sorted((int(x) for x in sizes[row, 1:] if x > 0), reverse=True))
        counts[(int(sizes[row, 0]) - 1, others)] += sign * int(c)
    return counts, rows


def collect_cycle_types(m: int, engine: str = "auto", threads: int | None = 1, partitions: int | None = None):
    """Signed tally of (open exponent, trace cycles) over all ``(m+1)!`` permutations.

    Returns ``(Counter, number_of_permutations_visited)``.  Work is split into
    disjoint pieces (rank ranges or fixed-prefix blocks) whose private
    tallies are summed, so the result does not depend on the split.
    """
    n = m + 1
    if engine == "auto":
        engine = "python" if m <= PYTHON_ENGINE_MAX_DIM else "numpy"
    if engine == "python":
        total = factorial(n)
        parts = partitions or 1
        bounds = [total * i // parts for i in range(parts + 1)]
        jobs = [(_collect_python, (n, a, b)) for a, b in zip(bounds, bounds[1:])]
    elif engine == "numpy":
        depth = max(0, n - _NUMPY_BLOCK_SUFFIX)
        if partitions and partitions > 1:
            while depth < n - 1 and factorial(n) // factorial(n - depth) < partitions:
                depth += 1
        blocks = [p for p in product(range(n), repeat=depth) if len(set(p)) == depth]
        jobs = [(_collect_numpy, (n, blk)) for blk in blocks]
    else:
        raise DomainError(f"unknown engine {engine!r}")

    if threads and threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: job[0](*job[1]), jobs))
    else:
        results = [fn(*args) for fn, args in jobs]

    merged: Counter = Counter()
    visited = 0
    for counts, seen in results:
        merged.update(counts)
        visited += seen
    return merged, visited


def expand_delta_contraction(
    m: int, cap: int = MAX_EXPANSION_DIM, engine: str = "auto", threads: int | None = 1
) -> SymbolicPolynomial:
    """Power-sum form of ``delta^{(m+1)} : A^{(x)m}`` with free indices ``(p, q)``.

    >>> from syzygy.symbolic import expand_delta_contraction, render
    >>> render(expand_delta_contraction(2))
    '2*A^2 - 2*p1*A + (p1^2 - p2)*I'
    """
    if m < 1:
        raise DomainError(f"dimension must be positive, got {m}")
    if m > cap:
        raise ResourceLimitError("m", m, cap)
    counts, _ = collect_cycle_types(m, engine=engine, threads=threads)
    return SymbolicPolynomial(
        {TraceMonomial(power, cycles): c for (power, cycles), c in counts.items()}, P_BASIS
    )


# ---------------------------------------------------------------------------
# basis changes


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            key = tuple(sorted(ka + kb, reverse=True))
            out[key] = out.get(key, 0) + va * vb
    return {k: v for k, v in out.items() if v != 0}


def _poly_add(a: dict, b: dict, scale=1) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + scale * v
    return {k: v for k, v in out.items() if v != 0}


@lru_cache(maxsize=None)
def _power_sum_in_sigma(k: int) -> dict:
    """p_k as a polynomial in sigma_1..sigma_k (integer coefficients).

    From ``k s_k = sum_{i=1..k} (-1)^(i-1) s_{k-i} p_i`` solved for the
    ``i = k`` term.
    """
    acc = {(k,): Fraction(k)}
    for i in range(1, k):
        acc = _poly_add(acc, _poly_mul({(k - i,): Fraction(1)}, _power_sum_in_sigma(i)), -((-1) ** (i - 1)))
    return _poly_add({}, acc, (-1) ** (k - 1))


@lru_cache(maxsize=None)
def _sigma_in_power_sums(k: int) -> dict:
    """sigma_k as a polynomial in p_1..p_k (rational coefficients)."""
    if k == 0:
        return {(): Fraction(1)}
    acc: dict = {}
    for i in range(1, k + 1):
        term = _poly_mul(_sigma_in_power_sums(k - i), {(i,): Fraction(1)})
        acc = _poly_add(acc, term, Fraction((-1) ** (i - 1), k))
    return acc


@lru_cache(maxsize=None)
def _rewrite_product(cycles: tuple, to_sigma: bool) -> dict:
    table = _power_sum_in_sigma if to_sigma else _sigma_in_power_sums
    out = {(): Fraction(1)}
    for c in cycles:
        out = _poly_mul(out, table(c))
    return out


def _rewrite(poly, m, to_sigma):
    want, target = (P_BASIS, SIGMA_BASIS) if to_sigma else (SIGMA_BASIS, P_BASIS)
    if poly.basis != want:
        raise DomainError(f"expected a polynomial in the {want!r} basis, got {poly.basis!r}")
    acc: dict = {}
    for mono, coeff in poly._terms.items():
        if any(c > m for c in mono.trace_cycles):
            raise DomainError(f"invariant order {max(mono.trace_cycles)} exceeds dimension {m}")
        for cycles, c in _rewrite_product(mono.trace_cycles, to_sigma).items():
            key = TraceMonomial(mono.power, cycles)
            acc[key] = acc.get(key, 0) + coeff * c
    return SymbolicPolynomial(acc, target)


def to_sigma_basis(poly: SymbolicPolynomial, m: int) -> SymbolicPolynomial:
    """Rewrite products of power sums as polynomials in sigma_1..sigma_m."""
    return _rewrite(poly, m, to_sigma=True)


def to_power_sum_basis(poly: SymbolicPolynomial, m: int) -> SymbolicPolynomial:
    return _rewrite(poly, m, to_sigma=False)


def normalize_ch(poly: SymbolicPolynomial, m: int) -> SymbolicPolynomial:
    """Divide by ``m!`` and the sign of the ``A^m`` coefficient so the result is monic."""
    lead = poly.coefficient(m)
    if lead == 0:
        raise InconsistencyError(f"expansion has no A^{m} term")
    out = poly.scale(Fraction(1 if lead > 0 else -1, factorial(m)))
    if out.coefficient(m) != 1:
        raise InconsistencyError(f"A^{m} coefficient is {lead}, expected +-{factorial(m)}")
    return out


def characteristic_form(m: int) -> SymbolicPolynomial:
    """``A^m - s1 A^(m-1) + s2 A^(m-2) - ... + (-1)^m s_m I`` in the sigma basis."""
    return SymbolicPolynomial(
        {TraceMonomial(m - k, (k,) if k else ()): (-1) ** k for k in range(m + 1)}, SIGMA_BASIS
    )


# ---------------------------------------------------------------------------
# rendering


def _fmt_coeff(c: Fraction, latex: bool) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    if latex:
        return rf"\frac{{{c.numerator}}}{{{c.denominator}}}"
    return f"{c.numerator}/{c.denominator}"


def _scalar_factors(cycles, basis, latex, det_order):
    counts = Counter(cycles)
    parts = []
    for order in sorted(counts):
        e = counts[order]
        if basis == SIGMA_BASIS:
            if det_order is not None and order == det_order:
                base = r"\det(A)" if latex else "det"
            else:
                base = rf"\sigma_{{{order}}}" if latex else f"s{order}"
            if e > 1:
                base = rf"{base}^{{{e}}}" if latex else f"{base}^{e}"
        elif latex:
            arg = "A" if order == 1 else f"A^{{{order}}}"
            base = rf"\mathrm{{tr}}^{{{e}}}({arg})" if e > 1 else rf"\mathrm{{tr}}({arg})"
        else:
            base = f"p{order}" + (f"^{e}" if e > 1 else "")
        parts.append(base)
    return parts


def _matrix_factor(power, latex):
    if power == 0:
        return r"\mathbf{I}" if latex else "I"
    if power == 1:
        return "A"
    return f"A^{{{power}}}" if latex else f"A^{power}"


def _join_signed(pieces, latex):
    """``pieces`` is a list of (negative, body); returns ``a - b + c``."""
    out = ""
    for i, (neg, body) in enumerate(pieces):
        if i == 0:
            out = f"-{body}" if neg else body
        else:
            out += f" - {body}" if neg else f" + {body}"
    return out


def _product(coeff, factors, latex):
    sep = " " if latex else "*"
    if coeff == 1 and factors:
        return sep.join(factors)
    return sep.join([_fmt_coeff(coeff, latex)] + factors)


def render(poly: SymbolicPolynomial, fmt: str = "text", det_alias: bool = False) -> str:
    """Render as ``text`` (``2*A^2 - 2*p1*A + (p1^2 - p2)*I``), ``latex`` or ``json``.

    Terms sharing a matrix power are grouped in parentheses.  With
    ``det_alias`` the top-order sigma is written as the determinant.
    """
    if fmt == "json":
        return json.dumps(to_json_dict(poly))
    if fmt not in ("text", "latex"):
        raise DomainError(f"unknown format {fmt!r}")
    latex = fmt == "latex"
    if not poly:
        return "0"
    det_order = max(poly.degrees) if det_alias and poly.basis == SIGMA_BASIS else None

    groups: dict = {}
    for mono, coeff in poly.items():
        groups.setdefault(mono.power, []).append((mono, coeff))

    pieces = []
    for power in sorted(groups, reverse=True):
        members = groups[power]
        mat = _matrix_factor(power, latex)
        sep = " " if latex else "*"
        if len(members) == 1:
            mono, coeff = members[0]
            factors = _scalar_factors(mono.trace_cycles, poly.basis, latex, det_order) + [mat]
            pieces.append((coeff < 0, _product(abs(coeff), factors, latex)))
            continue
        flip = members[0][1] < 0
        inner = [
            ((c < 0) != flip, _product(abs(c), _scalar_factors(mono.trace_cycles, poly.basis, latex, det_order), latex))
            for mono, c in members
        ]
        lp, rp = (r"\left(", r"\right)") if latex else ("(", ")")
        pieces.append((flip, f"{lp}{_join_signed(inner, latex)}{rp}{sep}{mat}"))
    return _join_signed(pieces, latex)


def to_json_dict(poly: SymbolicPolynomial) -> dict:
    return {
        "basis": poly.basis,
        "terms": [
            {
                "coeff_num": str(c.numerator),
                "coeff_den": str(c.denominator),
                "power": mono.power,
                "cycles": list(mono.trace_cycles),
            }
            for mono, c in poly.items()
        ],
    }


def from_json(text: str) -> SymbolicPolynomial:
    data = json.loads(text)
    terms = [
        (TraceMonomial(t["power"], tuple(t["cycles"])), Fraction(int(t["coeff_num"]), int(t["coeff_den"])))
        for t in data["terms"]
    ]
    return SymbolicPolynomial(terms, data["basis"])
