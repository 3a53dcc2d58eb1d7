import itertools
import random
from fractions import Fraction

import pytest

from twistk.catalog import (
    AbcSeed,
    abc_seed_table,
    builtin_examples,
    conjugate_seed_table,
    equalize_abc,
    ex53_table,
    ex72_table,
    ex74_table,
    flip_fixture,
    line_algebras,
    normalize_abc,
)
from twistk.errors import BoundError, StructuralError
from twistk.fields import FieldSpec
from twistk.twisting import (
    SeparableSplit,
    TwistingMapTable,
    add_into,
    check_degree,
    classify,
    conjugate,
    separable_violation,
    verify_twisting_to_degree,
)


def _product_mul(tw, left, right):
    """``(a b)(a' b') = a tau(b a') b'`` on basis pairs, normal forms in each factor."""
    (a1, b1), (a2, b2) = left, right
    alg_l, alg_r = tw.alg_a, tw.alg_b
    p = tw.field.p
    out: dict = {}
    for (a3, b3), c in tw.apply(b1, a2).items():
        for a4, c2 in alg_l.mul_words(a1, a3).items():
            for b4, c3 in alg_r.mul_words(b3, b2).items():
                add_into(out, (a4, b4), c * c2 * c3, p)
    return out


def _mul_elem(tw, x: dict, y: dict) -> dict:
    p = tw.field.p
    out: dict = {}
    for k1, c1 in x.items():
        for k2, c2 in y.items():
            for k3, c3 in _product_mul(tw, k1, k2).items():
                add_into(out, k3, c1 * c2 * c3, p)
    return out


def _basis_pairs(tw, degree):
    alg_l, alg_r = tw.alg_a, tw.alg_b
    return [(a, b) for i in range(degree + 1) for a in alg_l.basis(i) for b in alg_r.basis(degree - i)]


def associative_to(tw, n) -> bool:
    """Independent oracle: associativity of the twisted multiplication in total degree ``n``."""
    for d1, d2 in itertools.product(range(1, n), repeat=2):
        d3 = n - d1 - d2
        if d3 < 1:
            continue
        for x in _basis_pairs(tw, d1):
            for y in _basis_pairs(tw, d2):
                for z in _basis_pairs(tw, d3):
                    lhs = _mul_elem(tw, _mul_elem(tw, {x: 1}, {y: 1}), {z: 1})
                    rhs = _mul_elem(tw, {x: 1}, _mul_elem(tw, {y: 1}, {z: 1}))
                    if lhs != rhs:
                        return False
    return True


def _perturb(tw, n, rng):
    images = tw.restrict(n).images()
    keys = [k for k in sorted(x for x in images) if len(k[0]) + len(k[1]) == n]
    keys += [k for k in ((b, a) for b in tw.alg_b.basis(1) for a in tw.alg_a.basis(n - 1)) if k not in images]
    key = rng.choice(keys)
    img = dict(images.get(key, {}))
    a_len = rng.randrange(n + 1)
    target = (rng.choice(tw.alg_a.basis(a_len)), rng.choice(tw.alg_b.basis(n - a_len)))
    img[target] = tw.field.norm(img.get(target, 0) + rng.choice([1, -1, 2]))
    images[key] = {k: v for k, v in img.items() if v}
    return TwistingMapTable(tw.alg_a, tw.alg_b, n, images)


def test_flip_is_twisting_and_strongly_graded():
    tw = flip_fixture(6)
    assert verify_twisting_to_degree(tw, 6)
    cl = classify(tw)
    assert cl.pure and cl.strongly_graded and cl.one_sided_toward_A and cl.one_sided_toward_B


def test_parity_map_lines():
    assert ex53_table(3).lines() == ["y|x -> x^2|1 - x|y + 1|y^2", "y|x^2 -> x^2|y", "y^2|x -> x|y^2"]


def test_two_parameter_family_negative_control():
    tw = ex72_table(0, 0, 4)
    assert check_degree(tw, 3)
    v = verify_twisting_to_degree(tw, 4)
    assert not v
    assert v.describe(tw) == "mu_A fails at y|x|x^2 in degree 4"


@pytest.mark.parametrize("name", ["ex5_3", "ex7_4", "flip"])
def test_verifier_agrees_with_associativity_oracle(name):
    tw = builtin_examples()[name].table(5)
    rng = random.Random(name)
    assert all(associative_to(tw, n) for n in (3, 4))
    for n in (3, 4):
        for _ in range(6):
            bad = _perturb(tw.restrict(n), n, rng)
            assert bool(check_degree(bad, n)) == associative_to(bad, n)


def test_corrupted_entry_is_reported_at_its_degree():
    tw = ex53_table(5)
    images = tw.images()
    images[((0,), (0, 0, 0))] = {((0, 0, 0), (0,)): 1, ((0, 0), (0, 0)): 1}
    bad = TwistingMapTable(tw.alg_a, tw.alg_b, 5, images)
    assert verify_twisting_to_degree(bad, 3)
    v = verify_twisting_to_degree(bad, 5)
    assert not v and v.degree == 4


def test_classification_implications():
    for fx in builtin_examples().values():
        cl = classify(fx.table(4))
        if cl.strongly_graded:
            assert cl.pure
        assert cl.pure == (cl.one_sided_toward_A and cl.one_sided_toward_B)


def test_separable_split_must_match():
    tw = ex74_table(3)
    good = SeparableSplit.from_names(tw.alg_b, ["u"], ["d"])
    swapped = SeparableSplit.from_names(tw.alg_b, ["d"], ["u"])
    assert separable_violation(tw, good) is None
    assert separable_violation(tw, swapped) is not None
    assert classify(tw, swapped).separable_with is False
    with pytest.raises(StructuralError):
        SeparableSplit.from_names(tw.alg_b, ["u"], ["u"])


def test_conjugation_round_trip_preserves_twisting():
    tw = ex74_table(5)
    alpha, beta = [[2]], [[1, 1], [0, 1]]
    conj = conjugate(tw, alpha, beta)
    assert verify_twisting_to_degree(conj, 5)
    back = conjugate(conj, [[Fraction(1, 2)]], [[1, -1], [0, 1]])
    assert back == tw


def test_normalization_conjugates_to_normal_form():
    seed = AbcSeed(3, 0, 5)
    new, aut_a, aut_b = normalize_abc(seed)
    assert (new.a, new.b, new.c) == (1, 0, 15)
    assert conjugate_seed_table(seed, aut_a, aut_b, 4) == abc_seed_table(new, 4)


def test_equalization_needs_square_root():
    F = FieldSpec(13)
    seed = AbcSeed(4, 0, 1, F)
    new, aut_a, aut_b = equalize_abc(seed)
    assert new.a == new.c
    algs = line_algebras(4, F)
    lhs = conjugate(abc_seed_table(seed, 4, algs), aut_a, aut_b)
    assert lhs == abc_seed_table(new, 4, algs)
    assert equalize_abc(AbcSeed(2, 0, 1, F)) is None  # 2 is not a square mod 13
    assert equalize_abc(AbcSeed(-1, 0, 1)) is None


def test_table_validation():
    alg_a, alg_b = line_algebras(3)
    with pytest.raises(StructuralError):
        TwistingMapTable(alg_a, alg_b, 2, {((), (0,)): {}})
    with pytest.raises(StructuralError):
        TwistingMapTable(alg_a, alg_b, 2, {((0,), (0,)): {((0,), ()): 1}})
    with pytest.raises(BoundError):
        TwistingMapTable(alg_a, alg_b, 4, {})
    tw = flip_fixture(3)
    with pytest.raises(BoundError):
        tw.apply((0, 0), (0, 0))
