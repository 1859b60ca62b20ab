import json
from collections import Counter
from fractions import Fraction
from math import factorial

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syzygy.errors import DomainError, InconsistencyError, ResourceLimitError
from syzygy.symbolic import (
    P_BASIS,
    SIGMA_BASIS,
    SymbolicPolynomial,
    TraceMonomial,
    characteristic_form,
    collect_cycle_types,
    expand_delta_contraction,
    from_json,
    normalize_ch,
    render,
    to_power_sum_basis,
    to_sigma_basis,
)
from syzygy.verify import brute_force_delta_contract, random_matrix

TERM_SCHEMA = {
    "type": "object",
    "required": ["basis", "terms"],
    "additionalProperties": False,
    "properties": {
        "basis": {"enum": ["p", "sigma"]},
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["coeff_num", "coeff_den", "power", "cycles"],
                "additionalProperties": False,
                "properties": {
                    "coeff_num": {"type": "string", "pattern": "^-?[0-9]+$"},
                    "coeff_den": {"type": "string", "pattern": "^[1-9][0-9]*$"},
                    "power": {"type": "integer", "minimum": 0},
                    "cycles": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                },
            },
        },
    },
}


def partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def centralizer_size(parts):
    z = 1
    for length, mult in Counter(parts).items():
        z *= length**mult * factorial(mult)
    return z


def class_size_expansion(m):
    """Closed-form coefficients of the delta expansion.

    Permutations of m+1 slots whose cycle through slot 0 has length e+1 and
    whose other cycles have type mu number m!/z_mu (ordered choice of the
    open cycle's e other slots, times the class size in S_{m-e}); all share
    sign (-1)^(m - len(mu)).
    """
    terms = {}
    for e in range(m + 1):
        for mu in partitions(m - e):
            terms[TraceMonomial(e, mu)] = (-1) ** (m - len(mu)) * factorial(m) // centralizer_size(mu)
    return SymbolicPolynomial(terms, P_BASIS)


def test_dimension_one():
    poly = expand_delta_contraction(1)
    assert poly.terms == {TraceMonomial(1): -1, TraceMonomial(0, (1,)): 1}
    A = np.array([[2.5]])
    assert poly.evaluate(A)[0, 0] == 0.0


def test_dimension_two_matches_hand_expansion():
    poly = expand_delta_contraction(2)
    assert poly.terms == {
        TraceMonomial(2): 2,
        TraceMonomial(1, (1,)): -2,
        TraceMonomial(0, (1, 1)): 1,
        TraceMonomial(0, (2,)): -1,
    }


def test_dimension_three_top_coefficient():
    poly = expand_delta_contraction(3)
    # sign fixed by the 4-cycles through slot 0, cross-checked numerically below
    assert poly.coefficient(3) == -6
    A = random_matrix(4, 3, 0)
    assert np.allclose(poly.evaluate(A), brute_force_delta_contract(A, order=3, force=True), atol=1e-12)


@pytest.mark.parametrize("m", range(1, 9))
def test_expansion_matches_class_size_oracle(m):
    assert expand_delta_contraction(m) == class_size_expansion(m)


@pytest.mark.parametrize("m", range(1, 9))
def test_term_count_and_homogeneity(m):
    counts, visited = collect_cycle_types(m)
    assert visited == factorial(m + 1)
    assert sum(abs(c) for c in counts.values()) == factorial(m + 1)
    poly = expand_delta_contraction(m)
    assert poly.degrees == {m}
    # each monomial is an open exponent e plus a partition of m - e
    assert len(poly) == sum(len(list(partitions(j))) for j in range(m + 1))


@pytest.mark.parametrize("m", range(1, 8))
def test_engines_and_partitions_agree(m):
    reference = expand_delta_contraction(m, engine="python")
    for engine in ("python", "numpy"):
        for parts in (1, 3, 7):
            counts, visited = collect_cycle_types(m, engine=engine, partitions=parts, threads=2)
            assert visited == factorial(m + 1)
            got = SymbolicPolynomial({TraceMonomial(*k): v for k, v in counts.items()}, P_BASIS)
            assert got == reference


def test_unknown_engine():
    with pytest.raises(DomainError):
        collect_cycle_types(2, engine="gpu")


def test_expansion_caps():
    with pytest.raises(ResourceLimitError, match="10"):
        expand_delta_contraction(11)
    with pytest.raises(DomainError):
        expand_delta_contraction(0)


def test_sigma_examples():
    two = SymbolicPolynomial({TraceMonomial(0, (1, 1)): 1, TraceMonomial(0, (2,)): -1})
    assert to_sigma_basis(two, 2) == SymbolicPolynomial({TraceMonomial(0, (2,)): 2}, SIGMA_BASIS)
    one = SymbolicPolynomial({TraceMonomial(1, (1,)): 1})
    assert to_sigma_basis(one, 1) == SymbolicPolynomial({TraceMonomial(1, (1,)): 1}, SIGMA_BASIS)


def test_sigma_form_dimension_three():
    sig = to_sigma_basis(expand_delta_contraction(3), 3)
    # 3! * sum (-1)^(3-k) s_k A^(3-k)
    assert sig == characteristic_form(3).scale(-6)


@pytest.mark.parametrize("m", range(1, 9))
def test_sigma_coefficient_identity(m):
    sig = to_sigma_basis(expand_delta_contraction(m), m)
    assert len(sig) == m + 1
    for k in range(m + 1):
        assert sig.coefficient(m - k, (k,) if k else ()) == factorial(m) * (-1) ** (m - k)


def test_sigma_rewrite_rejects_high_orders():
    with pytest.raises(DomainError):
        to_sigma_basis(SymbolicPolynomial({TraceMonomial(0, (3,)): 1}), 2)
    with pytest.raises(DomainError):
        to_sigma_basis(SymbolicPolynomial({TraceMonomial(0, (1,)): 1}, SIGMA_BASIS), 2)


def test_known_newton_girard_rewrites():
    # s_3 = (p1^3 - 3 p1 p2 + 2 p3) / 6
    s3 = SymbolicPolynomial({TraceMonomial(0, (3,)): 1}, SIGMA_BASIS)
    assert to_power_sum_basis(s3, 3).terms == {
        TraceMonomial(0, (1, 1, 1)): Fraction(1, 6),
        TraceMonomial(0, (2, 1)): Fraction(-1, 2),
        TraceMonomial(0, (3,)): Fraction(1, 3),
    }
    # p_3 = s1^3 - 3 s1 s2 + 3 s3
    p3 = SymbolicPolynomial({TraceMonomial(0, (3,)): 1})
    assert to_sigma_basis(p3, 3).terms == {
        TraceMonomial(0, (1, 1, 1)): 1,
        TraceMonomial(0, (2, 1)): -3,
        TraceMonomial(0, (3,)): 3,
    }


monomials = st.integers(1, 6).flatmap(
    lambda m: st.tuples(
        st.just(m),
        st.dictionaries(
            st.integers(0, m).flatmap(lambda e: st.sampled_from(list(partitions(m - e))).map(lambda mu: TraceMonomial(e, mu))),
            st.fractions(max_denominator=12).filter(lambda f: f != 0),
            max_size=6,
        ),
    )
)


@settings(max_examples=150, deadline=None)
@given(monomials)
def test_basis_round_trip(data):
    m, terms = data
    sig = SymbolicPolynomial(terms, SIGMA_BASIS)
    assert to_sigma_basis(to_power_sum_basis(sig, m), m) == sig
    p = SymbolicPolynomial(terms, P_BASIS)
    assert to_power_sum_basis(to_sigma_basis(p, m), m) == p


@pytest.mark.parametrize("m", range(1, 7))
def test_sigma_and_power_forms_evaluate_equal(m):
    poly = expand_delta_contraction(m)
    sig = to_sigma_basis(poly, m)
    for t in range(3):
        # larger matrices keep every invariant nonzero
        A = random_matrix(m + 2, 11, t)
        a, b = poly.evaluate(A), sig.evaluate(A)
        assert np.abs(a - b).max() <= 1e-9 * max(1.0, poly.evaluate_magnitude(A).max())


@pytest.mark.parametrize("m", [1, 2, 3])
def test_evaluation_matches_brute_force(m):
    poly = expand_delta_contraction(m)
    for t in range(10):
        for dim in (m, m + 1):
            A = random_matrix(dim, 5, t)
            B = brute_force_delta_contract(A, order=m, force=True)
            scale = max(1.0, poly.evaluate_magnitude(A).max())
            assert np.abs(poly.evaluate(A) - B).max() <= 1e-10 * scale


@pytest.mark.parametrize("m", range(1, 8))
def test_normalize_gives_characteristic_form(m):
    assert normalize_ch(to_sigma_basis(expand_delta_contraction(m), m), m) == characteristic_form(m)


def test_normalize_examples():
    norm = [render(normalize_ch(to_sigma_basis(expand_delta_contraction(m), m), m)) for m in (1, 2, 3)]
    assert norm == ["A - s1*I", "A^2 - s1*A + s2*I", "A^3 - s1*A^2 + s2*A - s3*I"]


def test_normalize_inconsistency():
    with pytest.raises(InconsistencyError):
        normalize_ch(SymbolicPolynomial({TraceMonomial(1, (1,)): 2}), 2)
    with pytest.raises(InconsistencyError):
        normalize_ch(SymbolicPolynomial({TraceMonomial(2): 5}), 2)


def test_render_text():
    assert render(expand_delta_contraction(2)) == "2*A^2 - 2*p1*A + (p1^2 - p2)*I"
    assert render(SymbolicPolynomial()) == "0"
    assert render(expand_delta_contraction(3)) == (
        "-6*A^3 + 6*p1*A^2 - (3*p1^2 - 3*p2)*A + (p1^3 - 3*p1*p2 + 2*p3)*I"
    )
    half = SymbolicPolynomial({TraceMonomial(1, (1, 1)): Fraction(1, 2), TraceMonomial(1, (2,)): Fraction(-1, 2)})
    assert render(half) == "(1/2*p1^2 - 1/2*p2)*A"


def test_render_latex():
    norm3 = normalize_ch(to_sigma_basis(expand_delta_contraction(3), 3), 3)
    tex = render(norm3, "latex")
    assert "A^{3}" in tex and r"\sigma_{2}" in tex
    assert render(norm3, "latex", det_alias=True) == r"A^{3} - \sigma_{1} A^{2} + \sigma_{2} A - \det(A) \mathbf{I}"
    assert render(expand_delta_contraction(2), "latex") == (
        r"2 A^{2} - 2 \mathrm{tr}(A) A + \left(\mathrm{tr}^{2}(A) - \mathrm{tr}(A^{2})\right) \mathbf{I}"
    )


def test_render_det_alias_text():
    norm2 = normalize_ch(to_sigma_basis(expand_delta_contraction(2), 2), 2)
    assert render(norm2, det_alias=True) == "A^2 - s1*A + det*I"


@pytest.mark.parametrize("m", range(1, 6))
def test_render_json_schema_and_round_trip(m):
    for poly in (expand_delta_contraction(m), normalize_ch(expand_delta_contraction(m), m)):
        text = render(poly, "json")
        jsonschema.validate(json.loads(text), TERM_SCHEMA)
        assert from_json(text) == poly
        assert render(poly, "json") == text


def test_render_unknown_format():
    with pytest.raises(DomainError):
        render(SymbolicPolynomial(), "html")


def test_normalized_power_sum_form_dimension_three():
    norm = normalize_ch(expand_delta_contraction(3), 3)
    assert norm.coefficient(1, (1, 1)) == Fraction(1, 2)
    assert norm.coefficient(1, (2,)) == Fraction(-1, 2)


def test_polynomial_algebra():
    a = SymbolicPolynomial({TraceMonomial(1, (1,)): 2})
    b = SymbolicPolynomial({(1, (1,)): -2, (0, (2,)): 1})
    assert (a + b).terms == {TraceMonomial(0, (2,)): 1}
    assert (a - a) == SymbolicPolynomial()
    assert TraceMonomial(0, (1, 2, 1)).trace_cycles == (2, 1, 1)
    with pytest.raises(DomainError):
        a + SymbolicPolynomial(basis=SIGMA_BASIS)
    with pytest.raises(DomainError):
        TraceMonomial(-1)
