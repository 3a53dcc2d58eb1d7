"""Two-generator theory and the named fixtures."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Optional

import sympy
from sympy.ntheory import sqrt_mod

from .algebra import Presentation, TruncatedAlgebra, truncate
from .errors import DomainError, InternalConsistencyError, StructuralError
from .extension import (
    TAKE_CANONICAL,
    extend_to_degree,
    induced_on_quotient,
    separable_seed_extend,
)
from .fields import QQ, FieldSpec
from .twisting import SeparableSplit, TwistingMapTable, conjugate, flip_table, verify_twisting_to_degree

_t = sympy.Symbol("t")


@dataclass(frozen=True)
class UnivariatePolynomial:
    """Rational polynomial in ``t``, coefficients in ascending degree."""

    coefficients: tuple

    def __post_init__(self):
        cs = [Fraction(c) for c in self.coefficients]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coefficients", tuple(cs))

    @classmethod
    def from_sympy(cls, poly: sympy.Poly) -> "UnivariatePolynomial":
        return cls(tuple(Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())))

    def to_sympy(self) -> sympy.Poly:
        return sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) for c in self.coefficients])) or [0], _t, domain="QQ")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, value, field: FieldSpec = QQ):
        acc = field.zero
        v = field(value)
        for c in reversed(self.coefficients):
            acc = field.norm(acc * v + field(c))
        return acc

    def __str__(self):
        return str(self.to_sympy().as_expr())


@lru_cache(maxsize=None)
def _s_recursive(n: int) -> sympy.Poly:
    if n in (1, 2):
        return sympy.Poly(1, _t, domain="QQ")
    return _s_recursive(n - 1) - sympy.Poly(_t, _t, domain="QQ") * _s_recursive(n - 2)


def s_closed_form(n: int) -> UnivariatePolynomial:
    if n < 1:
        raise DomainError("S_n is defined for n >= 1")
    cs = [0] * ((n - 1) // 2 + 1)
    for j in range((n - 1) // 2 + 1):
        cs[j] = (-1) ** j * comb(n - 1 - j, j)
    return UnivariatePolynomial(tuple(cs))


def s_poly(n: int) -> UnivariatePolynomial:
    if n < 1:
        raise DomainError("S_n is defined for n >= 1")
    out = UnivariatePolynomial.from_sympy(_s_recursive(n))
    if out != s_closed_form(n):
        raise InternalConsistencyError(f"S_{n}: recursion and binomial form disagree")
    return out


def lemma_identities(i: int, j: int) -> tuple:
    """The product identity for ``(i, j)`` and the square identity for ``n = i + j``."""
    if i < 1 or j < 1:
        raise DomainError("indices must be positive")
    S = _s_recursive
    t = sympy.Poly(_t, _t, domain="QQ")
    first = S(i + 1) * S(i + j) == t**i * S(j) + S(i + j + 1) * S(i)
    n = i + j
    second = S(n) ** 2 - t ** (n - 1) == S(n + 1) * S(n - 1)
    return first, second


def s_identity_check(n_max: int) -> bool:
    return all(all(lemma_identities(i, n - i)) for n in range(2, n_max + 1) for i in range(1, n))


# (a, b, c) family -----------------------------------------------------------------


@dataclass(frozen=True)
class AbcSeed:
    a: object
    b: object
    c: object
    field: FieldSpec = QQ

    def __post_init__(self):
        F = self.field
        for k in ("a", "b", "c"):
            object.__setattr__(self, k, F(getattr(self, k)))


def line_algebras(top_degree: int, field: FieldSpec = QQ) -> tuple:
    return truncate(Presentation.free(["x"], field), top_degree), truncate(Presentation.free(["y"], field), top_degree)


def abc_seed_table(seed: AbcSeed, top_degree: int = 8, algebras=None) -> TwistingMapTable:
    """Degree-2 table ``y|x -> a x^2|1 + b x|y + c 1|y^2``."""
    alg_l, alg_r = algebras or line_algebras(top_degree, seed.field)
    img = {((0, 0), ()): seed.a, ((0,), (0,)): seed.b, ((), (0, 0)): seed.c}
    return TwistingMapTable(alg_l, alg_r, 2, {((0,), (0,)): {k: v for k, v in img.items() if v}})


@dataclass(frozen=True)
class Obstruction:
    degree: int

    def __bool__(self):
        return False


def b0_closed_form(c, top_degree: int, field: FieldSpec = QQ, algebras=None):
    """Closed-form table for ``y|x -> x^2|1 + c 1|y^2``, or the first degree where none exists."""
    c = field(c)
    svals = {n: s_poly(n)(c, field) for n in range(1, top_degree + 1)}
    for n in range(2, top_degree + 1):
        if not svals[n]:
            return Obstruction(n)
    alg_l, alg_r = algebras or line_algebras(top_degree, field)
    images = {}
    for n in range(2, top_degree + 1):
        inv = field.inv(svals[n])
        for i in range(1, n):
            j = n - i
            img = {
                ((0,) * n, ()): field.norm(inv * svals[j]),
                ((), (0,) * n): field.norm(inv * field.norm(c**j) * svals[i]),
            }
            images[((0,) * i, (0,) * j)] = {k: v for k, v in img.items() if v}
    tw = TwistingMapTable(alg_l, alg_r, top_degree, images)
    v = verify_twisting_to_degree(tw, top_degree)
    if not v:
        raise InternalConsistencyError(f"closed form fails verification: {v.describe(tw)}")
    return tw


def s_coefficients(tw: TwistingMapTable) -> dict:
    """``{d: coefficient of 1|y^d in tau(y^(d-1) | x)}`` on a two-line table."""
    out = {}
    for d in range(2, tw.bound + 1):
        out[d] = tw.apply((0,) * (d - 1), (0,)).get(((), (0,) * d), tw.field.zero)
    return out


def lemma_trace_ok(tw: TwistingMapTable, a) -> bool:
    """``1 - a s_{d-1}^d != 0`` for every degree of the table."""
    F = tw.field
    return all(F.norm(1 - F(a) * s) for s in s_coefficients(tw).values())


def _field_sqrt(x, field: FieldSpec):
    x = field(x)
    if field.p:
        r = sqrt_mod(int(x), field.p)
        return None if r is None else r % field.p
    x = Fraction(x)
    if x < 0:
        return None
    num, den = sympy.integer_nthroot(x.numerator, 2), sympy.integer_nthroot(x.denominator, 2)
    if num[1] and den[1]:
        return field(Fraction(int(num[0]), int(den[0])))
    return None


def normalize_abc(seed: AbcSeed) -> tuple:
    """Rescale ``x`` by ``1/a`` so that a seed ``(a, 0, c)`` becomes ``(1, 0, a c)``.

    Returns ``(new seed, automorphism of A, automorphism of B)`` as degree-1 matrices.
    """
    F = seed.field
    if seed.b or not seed.a:
        raise DomainError("normalization applies to seeds (a, 0, c) with a != 0")
    lam = F.inv(seed.a)
    return AbcSeed(1, 0, F.norm(seed.a * seed.c), F), [[lam]], [[F.one]]


def equalize_abc(seed: AbcSeed):
    """Rescale ``y`` by a square root of ``a/c`` so the ``a`` and ``c`` coefficients agree.

    Returns ``None`` when the field has no such square root.
    """
    F = seed.field
    if seed.b or not (seed.a and seed.c):
        raise DomainError("equalization applies to seeds (a, 0, c) with a c != 0")
    mu = _field_sqrt(F.div(seed.a, seed.c), F)
    if mu is None:
        return None
    coef = F.div(seed.a, mu)
    return AbcSeed(coef, 0, coef, F), [[F.one]], [[mu]]


def conjugate_seed_table(seed: AbcSeed, aut_a, aut_b, top_degree: int = 8) -> TwistingMapTable:
    return conjugate(abc_seed_table(seed, top_degree), aut_a, aut_b)


# fixtures -------------------------------------------------------------------------


def ex53_table(top_degree: int = 8, field: FieldSpec = QQ) -> TwistingMapTable:
    """Parity-case closed form on ``k<x>``, ``k<y>``."""
    alg_l, alg_r = line_algebras(top_degree, field)
    one = field.one
    images = {}
    for n in range(2, top_degree + 1):
        for i in range(1, n):
            j = n - i
            yi, xj = (0,) * i, (0,) * j
            if i % 2 == 0 or j % 2 == 0:
                images[(yi, xj)] = {(xj, yi): one}
            else:
                images[(yi, xj)] = {
                    ((0,) * (j + 1), (0,) * (i - 1)): one,
                    (xj, yi): field(-1),
                    ((0,) * (j - 1), (0,) * (i + 1)): one,
                }
    return TwistingMapTable(alg_l, alg_r, top_degree, images)


def ex72_algebras(top_degree: int, field: FieldSpec = QQ) -> tuple:
    return (
        truncate(Presentation.parse(["x"], ["x^3"], field), top_degree),
        truncate(Presentation.parse(["y"], ["y^3"], field), top_degree),
    )


def ex72_table(lam=-1, mu=0, top_degree: int = 4, field: FieldSpec = QQ, algebras=None) -> TwistingMapTable:
    """The two-parameter family on ``k<x>/(x^3)``, ``k<y>/(y^3)``; zero beyond degree 4."""
    alg_l, alg_r = algebras or ex72_algebras(max(top_degree, 4), field)
    lam, mu = field(lam), field(mu)
    x, x2 = (0,), (0, 0)
    raw = {
        (x, x): {(x2, ()): 1, (x, x): -1, ((), x2): 1},
        (x2, x): {(x2, x): lam, (x, x2): mu},
        (x, x2): {(x2, x): lam + 1, (x, x2): mu - 1},
        (x2, x2): {(x2, x2): lam + mu * mu},
    }
    images = {k: v for k, v in raw.items() if len(k[0]) + len(k[1]) <= top_degree}
    return TwistingMapTable(alg_l, alg_r, top_degree, images)


def ex72_census(lams=range(-3, 4), mus=range(-3, 4), field: FieldSpec = QQ) -> list:
    """``[(lambda, mu, passes)]`` over a finite grid, checked at top degree 4."""
    algs = ex72_algebras(4, field)
    return [(l, m, bool(verify_twisting_to_degree(ex72_table(l, m, 4, field, algs), 4))) for l in lams for m in mus]


def ex71_algebras(top_degree: int, field: FieldSpec = QQ) -> tuple:
    return truncate(Presentation.free(["x", "y"], field), top_degree), truncate(Presentation.free(["d", "u"], field), top_degree)


def ex71_seed() -> dict:
    x, y, d, u = (0,), (1,), (0,), (1,)
    return {
        (d, x): {(x, d): 1, ((), (0, 0)): 1},
        (d, y): {(y, d): 1, ((), (0, 0)): 1},
        (u, x): {(x, u): 1, ((0, 0), ()): 1},
        (u, y): {(y, u): 1, ((1, 1), ()): 1},
    }


def ex71_table(top_degree: int = 8, field: FieldSpec = QQ) -> TwistingMapTable:
    alg_l, alg_r = ex71_algebras(top_degree, field)
    split = SeparableSplit.from_names(alg_r, ["u"], ["d"])
    return separable_seed_extend(alg_l, alg_r, ex71_seed(), split, top_degree)


def ex71_induced(top_degree: int = 6, field: FieldSpec = QQ, priority_a=None) -> TwistingMapTable:
    return induced_on_quotient(ex71_table(top_degree, field), ["x*y - y*x"], [], priority_a=priority_a, verified=True)


def ex74_algebras(top_degree: int, field: FieldSpec = QQ) -> tuple:
    return truncate(Presentation.free(["x"], field), top_degree), truncate(Presentation.free(["d", "u"], field), top_degree)


def ex74_seed() -> dict:
    x, d, u = (0,), (0,), (1,)
    return {(d, x): {(x, d): 1, ((), (0, 0)): 1}, (u, x): {((0, 0), ()): 1, (x, u): 1}}


def ex74_table(top_degree: int = 8, field: FieldSpec = QQ) -> TwistingMapTable:
    alg_l, alg_r = ex74_algebras(top_degree, field)
    split = SeparableSplit.from_names(alg_r, ["u"], ["d"])
    return separable_seed_extend(alg_l, alg_r, ex74_seed(), split, top_degree)


def abc_table(a, b, c, top_degree: int = 8, field: FieldSpec = QQ, policy: str = TAKE_CANONICAL) -> TwistingMapTable:
    out = extend_to_degree(abc_seed_table(AbcSeed(a, b, c, field), top_degree), top_degree, policy, verified=True)
    if not out.ok:
        raise StructuralError(f"seed ({a},{b},{c}) has no extension: stuck at degree {out.stuck_degree} ({out.reason})")
    return out.table


def b0_table(c, top_degree: int = 8, field: FieldSpec = QQ) -> TwistingMapTable:
    res = b0_closed_form(c, top_degree, field)
    if isinstance(res, Obstruction):
        raise StructuralError(f"no twisting map with c={c}: obstruction in degree {res.degree}")
    return res


def flip_fixture(top_degree: int = 8, field: FieldSpec = QQ) -> TwistingMapTable:
    alg_l, alg_r = line_algebras(top_degree, field)
    return flip_table(alg_l, alg_r, top_degree)


@dataclass(frozen=True)
class Fixture:
    """A named twisting map with the facts the test suites check against."""

    name: str
    summary: str
    build: Callable
    seed: Optional[Callable] = None
    split: Optional[tuple] = None
    default_degree: int = 8
    expected: dict = dc_field(default_factory=dict)

    def table(self, top_degree: Optional[int] = None, field: FieldSpec = QQ) -> TwistingMapTable:
        return self.build(self.default_degree if top_degree is None else top_degree, field)


def _ex72_seed(top_degree, field):
    return ex72_table(-1, 0, 2, field, ex72_algebras(top_degree, field))


def _lines_seed(a, b, c):
    return lambda top_degree, field: abc_seed_table(AbcSeed(a, b, c, field), top_degree)


def _split_seed(algebras, seed):
    return lambda top_degree, field: TwistingMapTable(*algebras(top_degree, field), 2, seed())


def builtin_examples() -> dict:
    return {
        "ex5_3": Fixture(
            "ex5_3",
            "k<x> and k<y> with the parity-case map; twisting but not quadratic",
            ex53_table,
            seed=_lines_seed(1, -1, 1),
            expected={
                "uep": {3: False, **{n: True for n in range(4, 9)}},
                "minimal_degrees": {2: 1, 3: 1},
                "dims": [n + 1 for n in range(9)],
                "koszul": ("not_quadratic", 3),
                "classification": {"one_sided_toward_B": False, "one_sided_toward_A": False, "pure": False, "strongly_graded": False},
            },
        ),
        "ex7_1": Fixture(
            "ex7_1",
            "k<x,y> and k<d,u> with a separable seed extended uniquely",
            ex71_table,
            seed=_split_seed(ex71_algebras, ex71_seed),
            split=(("u",), ("d",)),
            expected={"separable": True, "classification": {"one_sided_toward_B": False, "one_sided_toward_A": False}},
        ),
        "ex7_1_induced": Fixture(
            "ex7_1_induced",
            "the ex7_1 map induced on k[x,y] and k<d,u>",
            ex71_induced,
            split=(("u",), ("d",)),
            default_degree=6,
            expected={"dims": [1, 4, 11, 26, 57, 120, 247], "koszul": ("koszul_to_degree", 6)},
        ),
        "ex7_2": Fixture(
            "ex7_2",
            "k<x>/(x^3) and k<y>/(y^3) with the (-1, 0) member of the two-parameter family",
            lambda top_degree, field: ex72_table(-1, 0, top_degree, field),
            seed=_ex72_seed,
            expected={"uep": {3: False}},
        ),
        "ex7_4": Fixture(
            "ex7_4",
            "k<x> and k<d,u> with a separable map that is one-sided in neither direction",
            ex74_table,
            seed=_split_seed(ex74_algebras, ex74_seed),
            split=(("u",), ("d",)),
            expected={
                "separable": True,
                "classification": {"one_sided_toward_B": False, "one_sided_toward_A": False},
                "relations": ["d*x - x*d - d^2", "u*x - x^2 - x*u"],
                "minimal_degrees": {2: 2},
                "dims": [2 ** (n + 1) - 1 for n in range(9)],
                "koszul": ("koszul_to_degree", 6),
            },
        ),
        "flip": Fixture(
            "flip",
            "k<x> and k<y> with the flip map",
            flip_fixture,
            seed=_lines_seed(0, 1, 0),
            expected={"classification": {"one_sided_toward_B": True, "one_sided_toward_A": True, "pure": True, "strongly_graded": True}},
        ),
    }


def parametric_fixture(name: str, args: tuple) -> Fixture:
    """``abc(a,b,c)``, ``b0(c)`` and ``ex7_2(l,m)``."""
    if name == "abc":
        if len(args) != 3:
            raise StructuralError("abc takes three scalars")
        a, b, c = args
        return Fixture(f"abc({a},{b},{c})", "two-line seed extended canonically", lambda top_degree, F: abc_table(a, b, c, top_degree, F), seed=_lines_seed(a, b, c))
    if name == "b0":
        if len(args) != 1:
            raise StructuralError("b0 takes one scalar")
        (c,) = args
        return Fixture(f"b0({c})", "closed-form b = 0 family", lambda top_degree, F: b0_table(c, top_degree, F), seed=_lines_seed(1, 0, c))
    if name == "ex7_2":
        if len(args) != 2:
            raise StructuralError("ex7_2 takes two scalars")
        l, m = args
        return Fixture(
            f"ex7_2({l},{m})",
            "member of the two-parameter family",
            lambda top_degree, F: ex72_table(l, m, top_degree, F),
            seed=lambda top_degree, F: ex72_table(l, m, 2, F, ex72_algebras(top_degree, F)),
        )
    raise StructuralError(f"unknown fixture {name!r}")


def fixture(spec: str) -> Fixture:
    """Look up ``name`` or ``name(args)``."""
    spec = spec.strip()
    if "(" in spec:
        if not spec.endswith(")"):
            raise StructuralError(f"malformed fixture {spec!r}")
        name, _, rest = spec.partition("(")
        args = tuple(Fraction(x.strip()) for x in rest[:-1].split(",") if x.strip())
        return parametric_fixture(name.strip(), args)
    table = builtin_examples()
    if spec in ("abc", "b0"):
        raise StructuralError(f"fixture {spec} needs arguments")
    if spec not in table:
        raise StructuralError(f"unknown fixture {spec!r}; known: {', '.join(sorted(table))}, abc(a,b,c), b0(c), ex7_2(l,m)")
    return table[spec]
