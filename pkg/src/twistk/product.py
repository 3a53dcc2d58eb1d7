"""Presentations of twisted tensor products, quadratic duals and Koszul checks."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

from .algebra import (
    GeneratorSet,
    NcPoly,
    Presentation,
    TruncatedAlgebra,
    minimal_generator_degrees,
    truncate,
    words_of_length,
)
from .errors import InternalConsistencyError, PreconditionError, StructuralError
from .linalg import ExactMatrix, rank_and_kernel
from .polyparse import format_terms, format_word
from .tor import TorTable, tor_table
from .twisting import SeparableSplit, TwistingMapTable, add_into, separable_violation, x_basis


def kunneth_dims(alg_a: TruncatedAlgebra, alg_b: TruncatedAlgebra, top_degree: int) -> list:
    return [sum(alg_a.dim(p) * alg_b.dim(n - p) for p in range(n + 1)) for n in range(top_degree + 1)]


@dataclass(frozen=True)
class ProductPresentation:
    """``A (x)_tau B`` as a quotient of the free algebra on A- then B-generators."""

    presentation: Presentation
    rel_a: tuple
    rel_b: tuple
    tau_relations: dict
    minimal_degrees: dict
    dims: tuple
    top_degree: int
    _alg: Optional[TruncatedAlgebra] = dc_field(default=None, repr=False, compare=False)

    @property
    def algebra(self) -> TruncatedAlgebra:
        return self._alg if self._alg is not None else truncate(self.presentation, self.top_degree)

    def relation_strings(self, degree: Optional[int] = None) -> list:
        names = self.presentation.names
        F = self.presentation.field
        rels = list(self.rel_a) + list(self.rel_b)
        for n in sorted(self.tau_relations):
            rels.extend(self.tau_relations[n])
        return [r.format(names, F) for r in rels if degree is None or r.degree == degree]


def _shift(word, k: int) -> tuple:
    return tuple(x + k for x in word)


def tau_relation(tw: TwistingMapTable, b, a) -> NcPoly:
    """``b . a - tau(b (x) a)`` lifted along normal words."""
    ga = tw.alg_a.ngens
    F = tw.field
    d: dict = {}
    add_into(d, _shift(b, ga) + tuple(a), F.one, F.p)
    for (a2, b2), c in tw.apply(b, a).items():
        add_into(d, tuple(a2) + _shift(b2, ga), -c, F.p)
    return NcPoly.from_dict(d, F)


def _combined_generators(tw: TwistingMapTable) -> GeneratorSet:
    an = tw.alg_a.presentation.names
    bn = tw.alg_b.presentation.names
    if set(an) & set(bn):
        raise StructuralError(f"generator names shared by both factors: {sorted(set(an) & set(bn))}")
    return GeneratorSet(tuple(an) + tuple(bn))


def twisted_product_presentation(alg_a: TruncatedAlgebra, alg_b: TruncatedAlgebra, tw: TwistingMapTable, top_degree: Optional[int] = None) -> ProductPresentation:
    if tw.alg_a is not alg_a or tw.alg_b is not alg_b:
        raise StructuralError("table is defined over different algebras")
    top_degree = tw.bound if top_degree is None else top_degree
    if top_degree > tw.bound:
        raise PreconditionError(f"table known only to degree {tw.bound}")
    gens = _combined_generators(tw)
    F = tw.field
    ga = alg_a.ngens
    rel_a = tuple(r for r in alg_a.presentation.relations if not r.is_zero())
    rel_b = tuple(
        NcPoly.from_dict({_shift(w, ga): c for w, c in r.terms}, F)
        for r in alg_b.presentation.relations
        if not r.is_zero()
    )
    taus = {n: tuple(tau_relation(tw, b, a) for b, a in x_basis(alg_a, alg_b, n)) for n in range(2, top_degree + 1)}
    rels = rel_a + rel_b + tuple(r for n in sorted(taus) for r in taus[n])
    pres = Presentation(gens, tuple(r for r in rels if not r.is_zero()), F)
    alg = truncate(pres, top_degree)
    dims = alg.hilbert()
    expect = kunneth_dims(alg_a, alg_b, top_degree)
    if dims != expect:
        n = next(k for k in range(top_degree + 1) if dims[k] != expect[k])
        raise InternalConsistencyError(f"product dims {dims} differ from {expect} at degree {n}; table is not twisting")
    return ProductPresentation(pres, rel_a, rel_b, taus, alg.new_relation_counts(), tuple(dims), top_degree, alg)


@dataclass(frozen=True)
class QuadraticCheck:
    ok: bool
    witness_degree: Optional[int] = None
    dims: tuple = ()
    expected: tuple = ()

    def __bool__(self):
        return self.ok


def tau_quadratic_check(alg_a: TruncatedAlgebra, alg_b: TruncatedAlgebra, tw: TwistingMapTable, top_degree: Optional[int] = None) -> QuadraticCheck:
    """Whether ``J_A + J_B`` and the degree-2 tau-relations already cut out the product.

    Compares Hilbert functions; the ideal from the degree-2 tau-relations is
    contained in the full one, so equal dimensions mean equal ideals.
    """
    top_degree = tw.bound if top_degree is None else top_degree
    if top_degree > tw.bound:
        raise PreconditionError(f"table known only to degree {tw.bound}")
    gens = _combined_generators(tw)
    F = tw.field
    ga = alg_a.ngens
    rels = [r for r in alg_a.presentation.relations if not r.is_zero()]
    rels += [NcPoly.from_dict({_shift(w, ga): c for w, c in r.terms}, F) for r in alg_b.presentation.relations if not r.is_zero()]
    rels += [tau_relation(tw, b, a) for b, a in x_basis(alg_a, alg_b, 2)]
    dims = truncate(Presentation(gens, tuple(r for r in rels if not r.is_zero()), F), top_degree).hilbert()
    expect = kunneth_dims(alg_a, alg_b, top_degree)
    for n in range(top_degree + 1):
        if dims[n] != expect[n]:
            return QuadraticCheck(False, n, tuple(dims), tuple(expect))
    return QuadraticCheck(True, None, tuple(dims), tuple(expect))


def _require_quadratic(p: Presentation) -> None:
    if any(r.degree != 2 for r in p.relations if not r.is_zero()):
        raise PreconditionError("presentation is not quadratic")


def quadratic_dual(p: Presentation) -> Presentation:
    """Generators ``name_`` with relations spanning the annihilator of the relation space."""
    _require_quadratic(p)
    g = p.ngens
    words = words_of_length(g, 2)
    idx = {w: i for i, w in enumerate(words)}
    rows = [{idx[w]: c for w, c in r.terms} for r in p.relations if not r.is_zero()]
    M = ExactMatrix(p.field, len(rows), len(words), rows)
    _, ker = rank_and_kernel(M)
    rels = tuple(NcPoly.from_dict({words[j]: c for j, c in enumerate(v) if c}, p.field) for v in ker)
    return Presentation(GeneratorSet(tuple(n + "_" for n in p.names)), rels, p.field)


def hilbert_koszul_identity(p: Presentation, top_degree: int) -> bool:
    """``h_A(t) h_{A^!}(-t) = 1`` through ``top_degree``."""
    _require_quadratic(p)
    h = truncate(p, top_degree).hilbert()
    hd = truncate(quadratic_dual(p), top_degree).hilbert()
    for n in range(top_degree + 1):
        s = sum((-1) ** (n - k) * h[k] * hd[n - k] for k in range(n + 1))
        if s != (1 if n == 0 else 0):
            return False
    return True


@dataclass(frozen=True)
class KoszulVerdict:
    kind: str  # "koszul_to_degree" | "not_koszul" | "not_quadratic"
    degree: Optional[int] = None
    bidegree: Optional[tuple] = None
    tor: Optional[TorTable] = dc_field(default=None, repr=False, compare=False)

    def as_dict(self) -> dict:
        out = {"verdict": self.kind}
        if self.kind == "not_koszul":
            out["witness_bidegree"] = list(self.bidegree)
        else:
            out["degree"] = self.degree
        return out


def koszul_verdict(alg: TruncatedAlgebra, top_degree: Optional[int] = None, method: str = "auto") -> KoszulVerdict:
    top_degree = alg.top_degree if top_degree is None else top_degree
    if top_degree <= alg.top_degree:
        mins = {d: c for d, c in alg.new_relation_counts().items() if d <= top_degree}
    else:
        mins = minimal_generator_degrees(alg.presentation, top_degree)
    high = sorted(d for d, c in mins.items() if d >= 3 and c)
    if high:
        return KoszulVerdict("not_quadratic", degree=high[0])
    table = tor_table(alg, top_degree, top_degree, method=method)
    off = table.first_off_diagonal()
    if off is not None:
        return KoszulVerdict("not_koszul", bidegree=off, tor=table)
    return KoszulVerdict("koszul_to_degree", degree=top_degree, tor=table)


# separable side conditions -------------------------------------------------------


@dataclass(frozen=True)
class SeparableHypotheses:
    condition1: bool
    condition2: bool
    witness1: Optional[str] = None
    witness2: Optional[str] = None


def _degree2_relations(alg: TruncatedAlgebra) -> list:
    return [dict(r.terms) for r in alg.presentation.relations if not r.is_zero() and r.degree == 2]


def separable_hypotheses_check(alg_a: TruncatedAlgebra, alg_b: TruncatedAlgebra, tw: TwistingMapTable, split: SeparableSplit) -> SeparableHypotheses:
    """Evaluate the two corner composites on ``B_1 (x) I_2`` and ``J_2 (x) A_1``."""
    if tw.alg_a is not alg_a or tw.alg_b is not alg_b:
        raise StructuralError("table is defined over different algebras")
    _require_quadratic(alg_a.presentation)
    _require_quadratic(alg_b.presentation)
    if tw.bound < 3:
        raise PreconditionError("conditions need the table through degree 3")
    bad = separable_violation(tw, split)
    if bad:
        raise PreconditionError(f"table is not separable for this split: {bad}")
    p = tw.field.p
    an, bn = alg_a.presentation.names, alg_b.presentation.names

    def tau_corner_b(v, x):
        return {b2: c for (a2, b2), c in tw.apply(v, x).items() if not a2}

    def tau_corner_a(v, x):
        return {a2: c for (a2, b2), c in tw.apply(v, x).items() if not b2}

    w1 = None
    for v in alg_b.basis(1):
        for rel in _degree2_relations(alg_a):
            acc: dict = {}
            for w, c in rel.items():
                x, y = (w[0],), (w[1],)
                for b2, c2 in tau_corner_b(v, x).items():
                    for (a3, b3), c3 in tw.apply(b2, y).items():
                        if len(a3) == 2 and len(b3) == 1:
                            add_into(acc, (a3, b3), c * c2 * c3, p)
            if acc:
                w1 = f"{bn[v[0]]}|{_fmt(rel, an, tw)}"
                break
        if w1:
            break
    w2 = None
    for rel in _degree2_relations(alg_b):
        for x in alg_a.basis(1):
            acc = {}
            for w, c in rel.items():
                d, u = (w[0],), (w[1],)
                for a2, c2 in tau_corner_a(u, x).items():
                    for (a3, b3), c3 in tw.apply(d, a2).items():
                        if len(a3) == 1 and len(b3) == 2:
                            add_into(acc, (a3, b3), c * c2 * c3, p)
            if acc:
                w2 = f"{_fmt(rel, bn, tw)}|{an[x[0]]}"
                break
        if w2:
            break
    return SeparableHypotheses(w1 is None, w2 is None, w1, w2)


def _fmt(rel: dict, names, tw) -> str:
    return "(" + format_terms(sorted(rel.items()), lambda w: format_word(w, names), tw.field) + ")"
