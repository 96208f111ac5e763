"""Exact arithmetic: prime fields, polynomials, reduced fractions, residue rings."""

import random

import pytest

from buildinglab.fields import (
    DegreeCapExceeded,
    IdealNotCoprimeError,
    LaurentElement,
    Poly,
    PrimeField,
    ResidueRing,
    canonical_reduce,
    is_irreducible,
    pmul,
    poly_from_csv,
    poly_from_text,
    poly_to_text,
    residue_reduce,
    valuation,
)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_field_axioms_exhaustive(p):
    F = PrimeField(p)
    els = list(F.elements())
    for a in els:
        assert F.add(a, 0) == a
        assert F.mul(a, 1) == a
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
        for b in els:
            assert F.add(a, b) == F.add(b, a)
            assert F.mul(a, b) == F.mul(b, a)
            for c in els:
                assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
                assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
                assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))


def test_prime_field_rejects_composite():
    with pytest.raises(ValueError):
        PrimeField(6)


def test_poly_basics():
    f = Poly([1, 0, 1], 2)  # 1 + y^2
    g = Poly([0, 1], 2)     # y
    assert f.degree == 2 and g.degree == 1
    assert (f + g).coeffs == (1, 1, 1)
    assert (f * g).coeffs == (0, 1, 0, 1)
    assert Poly.zero(2).degree == -1
    q, r = divmod(f, g)
    assert q * g + r == f
    assert (f % g).coeffs == (1,)


def test_poly_divmod_random_roundtrip():
    rng = random.Random(0)
    for _ in range(300):
        p = rng.choice([2, 3, 5])
        a = Poly([rng.randrange(p) for _ in range(rng.randrange(1, 9))], p)
        b = Poly([rng.randrange(p) for _ in range(rng.randrange(1, 6))], p)
        if b.is_zero():
            continue
        q, r = divmod(a, b)
        assert q * b + r == a
        assert r.degree < b.degree


def test_degree_cap():
    with pytest.raises(DegreeCapExceeded):
        Poly([1] * 70, 2)
    a = (0,) * 40 + (1,)
    with pytest.raises(DegreeCapExceeded):
        pmul(a, a, 2)


# ---------------------------------------------------------------------------
# valuation


def _series_lowest_index(num, yexp, y1exp, p, order=10):
    """Oracle: expand num / (y^yexp (y+1)^y1exp) as a Laurent series and read
    the lowest nonzero exponent.  Inverts (1+y) as a truncated power series,
    independent of the valuation implementation."""
    coeffs = list(num) + [0] * order
    for _ in range(y1exp):
        # divide by (1+y): s_k = c_k - s_{k-1}
        s = []
        for k in range(len(coeffs)):
            prev = s[k - 1] if k else 0
            s.append((coeffs[k] - prev) % p)
        coeffs = s
    for i, c in enumerate(coeffs):
        if c:
            return i - yexp
    return None


def test_valuation_monomial_sum():
    # lowest exponent of y^2 + y^3 is 2
    f = LaurentElement((0, 0, 1, 1), 0, 0, 2)
    assert valuation(f) == 2


def test_valuation_unit():
    assert valuation(LaurentElement.one(3)) == 0


def test_valuation_with_denominator_vs_series_oracle():
    # (y^3 + y^5) / y^2 over F_2
    f = LaurentElement((0, 0, 0, 1, 0, 1), 2, 0, 2)
    assert valuation(f) == 1
    assert _series_lowest_index((0, 0, 0, 1, 0, 1), 2, 0, 2) == 1


def test_valuation_random_against_series_oracle():
    rng = random.Random(1)
    for _ in range(200):
        p = rng.choice([2, 3])
        num = [rng.randrange(p) for _ in range(rng.randrange(1, 7))]
        if not any(num):
            continue
        a, b = rng.randrange(0, 3), rng.randrange(0, 3)
        f = LaurentElement(tuple(num), a, b, p)
        assert valuation(f) == _series_lowest_index(tuple(num), a, b, p)


def test_valuation_is_discrete_valuation():
    rng = random.Random(2)
    for _ in range(500):
        p = rng.choice([2, 3, 5])
        def rand_el():
            num = tuple(rng.randrange(p) for _ in range(rng.randrange(1, 6)))
            return LaurentElement(num, rng.randrange(0, 3), rng.randrange(0, 3), p)
        f, g = rand_el(), rand_el()
        if f.is_zero() or g.is_zero():
            continue
        assert valuation(f * g) == valuation(f) + valuation(g)
        s = f + g
        if not s.is_zero():
            assert valuation(s) >= min(valuation(f), valuation(g))


def test_valuation_of_zero_rejected():
    with pytest.raises(ValueError):
        valuation(LaurentElement.zero(2))


# ---------------------------------------------------------------------------
# residue reduction


def _long_division_mod(num, g, p):
    """Oracle: schoolbook polynomial long division remainder."""
    r = list(num)
    while len(r) >= len(g):
        if r[-1] == 0:
            r.pop()
            continue
        c = r[-1] * pow(g[-1], p - 2, p) % p
        off = len(r) - len(g)
        for i, x in enumerate(g):
            r[off + i] = (r[off + i] - c * x) % p
        r.pop()
    while r and r[-1] == 0:
        r.pop()
    return tuple(r)


def test_residue_inverse_of_y():
    # 1/y mod y^2+y+1 over F_2 is y+1, since y(y+1) = y^2+y = 1 mod g
    g = Poly([1, 1, 1], 2)
    r = residue_reduce(LaurentElement((1,), 1, 0, 2), g)
    assert r.value.coeffs == (1, 1)
    prod = pmul((0, 1), (1, 1), 2)
    assert _long_division_mod(prod, (1, 1, 1), 2) == (1,)


def test_residue_already_reduced():
    g = Poly([1, 1, 1], 2)
    r = residue_reduce(Poly([0, 1], 2), g)
    assert r.value.coeffs == (0, 1)


def test_residue_cube_vs_long_division():
    g = (1, 1, 0, 1)  # y^3 + y + 1
    r = residue_reduce(Poly([0, 0, 0, 1], 2), Poly(g, 2))
    assert r.value.coeffs == _long_division_mod((0, 0, 0, 1), g, 2) == (1, 1)


def test_residue_reduce_is_ring_homomorphism():
    rng = random.Random(3)
    g = Poly([1, 1, 0, 1], 2)
    for _ in range(500):
        def rand_el():
            num = tuple(rng.randrange(2) for _ in range(rng.randrange(1, 6)))
            return LaurentElement(num, rng.randrange(0, 2), rng.randrange(0, 2), 2)
        f, h = rand_el(), rand_el()
        assert residue_reduce(f + h, g) == residue_reduce(f, g) + residue_reduce(h, g)
        assert residue_reduce(f * h, g) == residue_reduce(f, g) * residue_reduce(h, g)


def test_residue_rejects_non_coprime_modulus():
    with pytest.raises(IdealNotCoprimeError):
        residue_reduce(Poly([1], 2), Poly([0, 1], 2))       # g(0) = 0
    with pytest.raises(IdealNotCoprimeError):
        residue_reduce(Poly([1], 2), Poly([1, 1], 2))       # g(-1) = 0 over F_2
    with pytest.raises(IdealNotCoprimeError):
        residue_reduce(Poly([1], 3), Poly([2, 0, 1], 3))    # y^2+2 has root -1 mod 3


def test_residue_non_monic_modulus_normalized():
    r = residue_reduce(Poly([0, 0, 0, 1], 3), Poly([2, 2, 0, 2], 3))
    assert r.modulus.coeffs == (1, 1, 0, 1)


# ---------------------------------------------------------------------------
# canonical reduction of fractions


def test_canonical_clears_cancelled_y():
    f = LaurentElement((0, 0, 1, 1), 1, 0, 2)  # (y^2+y^3)/y
    g = canonical_reduce(f)
    assert (g.num, g.yexp, g.y1exp) == ((0, 1, 1), 0, 0)


def test_canonical_zero():
    f = LaurentElement((), 5, 0, 2)
    assert canonical_reduce(f) == LaurentElement.zero(2)


def test_canonical_cancels_y_plus_one_with_evaluation_oracle():
    # ((y+1) * y) / (y+1)^2 over F_2 reduces to y/(y+1)
    f = LaurentElement(pmul((1, 1), (0, 1), 2), 0, 2, 2)
    g = canonical_reduce(f)
    assert (g.num, g.yexp, g.y1exp) == ((0, 1), 0, 1)
    # oracle: equality as rational functions at 5 sample points of F_16
    ring = ResidueRing.for_order(16)
    samples = 0
    for v in range(2, ring.q):
        num1 = ring.element(Poly(pmul((1, 1), (0, 1), 2), 2)).val
        den1 = ring.mul(ring.element(Poly((1, 1), 2)).val, ring.element(Poly((1, 1), 2)).val)
        num2 = ring.element(Poly((0, 1), 2)).val
        den2 = ring.element(Poly((1, 1), 2)).val
        x = v
        def ev(enc):
            # evaluate encoded polynomial at x by Horner in the field
            coeffs = ring.decode(enc)
            acc = 0
            for c in reversed(coeffs):
                acc = ring.add(ring.mul(acc, x), c)
            return acc
        lhs = ring.mul(ev(num1), ev(den2))
        rhs = ring.mul(ev(num2), ev(den1))
        assert lhs == rhs
        samples += 1
        if samples == 5:
            break


def test_canonical_idempotent_and_injective():
    rng = random.Random(4)
    for _ in range(300):
        p = rng.choice([2, 3])
        num = tuple(rng.randrange(p) for _ in range(rng.randrange(1, 6)))
        f = LaurentElement(num, rng.randrange(-2, 3), rng.randrange(-2, 3), p)
        assert canonical_reduce(f) == f
        # cross-multiplication equality oracle: equal reduced forms iff equal values
        g = LaurentElement(num, rng.randrange(-2, 3), rng.randrange(-2, 3), p)
        lhs_num = f.num
        rhs_num = g.num
        # f == g as values iff num_f * den_g == num_g * den_f
        def denom(e):
            d = (1,)
            d = pmul(d, tuple([0] * e.yexp + [1]), p) if e.yexp else d
            for _ in range(e.y1exp):
                d = pmul(d, (1, 1), p)
            return d
        cross_equal = pmul(lhs_num, denom(g), p) == pmul(rhs_num, denom(f), p)
        assert (f == g) == cross_equal


def test_laurent_unit_detection():
    assert LaurentElement((0, 1), 0, 0, 2).is_unit()          # y
    assert LaurentElement((1, 1), 0, 0, 2).is_unit()          # y+1
    assert LaurentElement((1,), 2, 3, 3).is_unit()            # 1/(y^2 (y+1)^3)
    assert not LaurentElement((1, 1, 1), 0, 0, 2).is_unit()   # y^2+y+1
    assert not LaurentElement.zero(2).is_unit()


def test_laurent_division_by_unit():
    f = LaurentElement((0, 0, 1), 0, 0, 2)  # y^2
    u = LaurentElement((0, 1), 0, 0, 2)     # y
    assert f / u == LaurentElement((0, 1), 0, 0, 2)
    with pytest.raises(ValueError):
        f / LaurentElement((1, 1, 1), 0, 0, 2)


# ---------------------------------------------------------------------------
# residue rings as finite fields


@pytest.mark.parametrize("q", [4, 8, 9])
def test_gf_tables_are_a_field(q):
    ring = ResidueRing.for_order(q)
    assert ring.q == q and ring.irreducible
    for a in range(q):
        assert ring.add(a, 0) == a
        assert ring.mul(a, 1) == a
        if a:
            assert ring.mul(a, ring.inv(a)) == 1
        for b in range(q):
            assert ring.add(a, b) == ring.add(b, a)
            assert ring.mul(a, b) == ring.mul(b, a)
            for c in range(q):
                assert ring.mul(a, ring.add(b, c)) == \
                    ring.add(ring.mul(a, b), ring.mul(a, c))


def test_is_irreducible():
    assert is_irreducible((1, 1, 1), 2)
    assert not is_irreducible((1, 0, 1), 2)   # (y+1)^2
    assert is_irreducible((1, 0, 1), 3)       # y^2+1 over F_3
    assert not is_irreducible((0, 1), 2) is None


def test_matrix_helpers_over_gf():
    ring = ResidueRing.for_order(4)
    A = ((1, 2), (0, 1))
    Ainv = ring.mat_inv(A)
    assert ring.mat_mul(A, Ainv) == ring.mat_identity(2)
    assert ring.mat_det(((1, 2), (2, 3))) == ring.sub(ring.mul(1, 3), ring.mul(2, 2))
    rows, piv = ring.mat_rref(((2, 2), (1, 1)))
    assert len(rows) == 1 and rows[0][0] == 1


def test_projective_normalization():
    ring = ResidueRing.for_order(4)
    M = ((0, 2), (3, 1))
    N = ring.normalize_projective(M)
    flat = [x for row in N for x in row]
    first = next(x for x in flat if x)
    assert first == 1
    N2 = ring.normalize_projective(tuple(tuple(ring.mul(3, x) for x in row) for row in M))
    assert N == N2


# ---------------------------------------------------------------------------
# text encodings


def test_poly_text_roundtrip():
    f = Poly([1, 0, 1], 2)
    text = poly_to_text(f.coeffs, 2)
    assert text == "p=2; [1,0,1]"
    assert poly_from_text(text) == f
    with pytest.raises(ValueError):
        poly_from_text("nope")


def test_poly_csv():
    assert poly_from_csv("1,1,0,1", 2).coeffs == (1, 1, 0, 1)
    with pytest.raises(ValueError):
        poly_from_csv("1,x", 2)
