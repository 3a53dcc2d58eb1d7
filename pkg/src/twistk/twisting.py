"""Graded twisting maps ``B (x) A -> A (x) B`` stored on positive-degree blocks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .algebra import TruncatedAlgebra
from .errors import BoundError, StructuralError
from .fields import FieldSpec
from .linalg import Echelon, ExactMatrix, rref_rows
from .polyparse import format_terms, format_word


def add_into(out: dict, key, val, p: int) -> None:
    val = out.get(key, 0) + val
    if p:
        val %= p
    if val:
        out[key] = val
    else:
        out.pop(key, None)


def x_basis(alg_a: TruncatedAlgebra, alg_b: TruncatedAlgebra, n: int) -> list:
    """Basis of ``(B_+ (x) A_+)_n`` as ``(b, a)`` pairs, B-degree ascending."""
    return [(b, a) for q in range(1, n) for b in alg_b.basis(q) for a in alg_a.basis(n - q)]


def y_basis(alg_a: TruncatedAlgebra, alg_b: TruncatedAlgebra, n: int) -> list:
    """Basis of ``(A (x) B)_n`` as ``(a, b)`` pairs, A-degree ascending."""
    return [(a, b) for p in range(n + 1) for a in alg_a.basis(p) for b in alg_b.basis(n - p)]


class TwistingMapTable:
    """Images ``tau(b (x) a)`` for normal words with ``|b|, |a| >= 1`` and ``|a| + |b| <= bound``.

    ``images`` maps ``(b, a)`` to ``{(a', b'): coeff}``; absent keys are zero.
    Unital values are a rule of ``apply``, never stored.
    """

    __slots__ = ("alg_a", "alg_b", "bound", "_img", "field")

    def __init__(self, alg_a: TruncatedAlgebra, alg_b: TruncatedAlgebra, bound: int, images: dict):
        if alg_a.field != alg_b.field:
            raise StructuralError("component algebras live over different fields")
        if bound > min(alg_a.top_degree, alg_b.top_degree):
            raise BoundError(f"table degree {bound} exceeds the algebra truncations")
        self.alg_a = alg_a
        self.alg_b = alg_b
        self.bound = bound
        self.field = alg_a.field
        F = self.field
        clean = {}
        for (b, a), img in images.items():
            b, a = tuple(b), tuple(a)
            if not b or not a:
                raise StructuralError("unital values are implicit and may not be stored")
            n = len(a) + len(b)
            if n > bound:
                raise BoundError(f"entry {b}|{a} beyond table degree {bound}")
            if not (alg_b.is_normal(b) and alg_a.is_normal(a)):
                raise StructuralError(f"key {b}|{a} is not a pair of normal words")
            out = {}
            for (a2, b2), c in img.items():
                a2, b2 = tuple(a2), tuple(b2)
                if len(a2) + len(b2) != n:
                    raise StructuralError(f"image of {b}|{a} leaves degree {n}")
                if not (alg_a.is_normal(a2) and alg_b.is_normal(b2)):
                    raise StructuralError(f"image of {b}|{a} uses non-normal words")
                c = F(c)
                if c:
                    out[(a2, b2)] = c
            clean[(b, a)] = out
        self._img = clean

    # access ---------------------------------------------------------------
    def apply(self, b, a) -> dict:
        if not b:
            return {(a, ()): self.field.one}
        if not a:
            return {((), b): self.field.one}
        if len(a) + len(b) > self.bound:
            raise BoundError(f"tau needed in degree {len(a) + len(b)} beyond {self.bound}")
        return self._img.get((b, a), {})

    def apply_elem(self, elem: dict) -> dict:
        """``tau`` on a combination ``{(b, a): c}``."""
        p = self.field.p
        out: dict = {}
        for (b, a), c in elem.items():
            for key, c2 in self.apply(b, a).items():
                add_into(out, key, c * c2, p)
        return out

    def images(self) -> dict:
        return {k: dict(v) for k, v in self._img.items()}

    def images_in_degree(self, n: int) -> dict:
        return {k: dict(v) for k, v in self._img.items() if len(k[0]) + len(k[1]) == n}

    def block(self, j: int, i: int) -> ExactMatrix:
        """Matrix of ``tau`` on ``B_j (x) A_i`` into ``(A (x) B)_{i+j}``."""
        if i < 1 or j < 1 or i + j > self.bound:
            raise BoundError(f"no stored block ({j},{i})")
        cols_keys = [(b, a) for b in self.alg_b.basis(j) for a in self.alg_a.basis(i)]
        rows_keys = y_basis(self.alg_a, self.alg_b, i + j)
        ridx = {k: r for r, k in enumerate(rows_keys)}
        cols = [{ridx[k]: c for k, c in self._img.get(key, {}).items()} for key in cols_keys]
        return ExactMatrix.from_columns(self.field, len(rows_keys), cols)

    def blocks(self) -> dict:
        return {(j, i): self.block(j, i) for j in range(1, self.bound) for i in range(1, self.bound - j + 1)}

    def restrict(self, n: int) -> "TwistingMapTable":
        if n > self.bound:
            raise BoundError(f"cannot restrict degree {self.bound} table to {n}")
        keep = {k: v for k, v in self._img.items() if len(k[0]) + len(k[1]) <= n}
        return TwistingMapTable(self.alg_a, self.alg_b, n, keep)

    def extended(self, new_images: dict, new_bound: int) -> "TwistingMapTable":
        imgs = self.images()
        imgs.update(new_images)
        return TwistingMapTable(self.alg_a, self.alg_b, new_bound, imgs)

    def __eq__(self, other):
        if not isinstance(other, TwistingMapTable) or other.bound != self.bound:
            return False
        a = {k: v for k, v in self._img.items() if v}
        b = {k: v for k, v in other._img.items() if v}
        return a == b and self.field == other.field

    def __repr__(self):
        return f"TwistingMapTable(bound={self.bound}, entries={len(self._img)})"

    # formatting -------------------------------------------------------------
    def format_key(self, b, a) -> str:
        return f"{format_word(b, self.alg_b.presentation.names)}|{format_word(a, self.alg_a.presentation.names)}"

    def format_image(self, img: dict) -> str:
        an = self.alg_a.presentation.names
        bn = self.alg_b.presentation.names
        items = sorted(img.items(), key=lambda t: (-len(t[0][0]), t[0][0], t[0][1]))
        return format_terms(items, lambda k: f"{format_word(k[0], an)}|{format_word(k[1], bn)}", self.field)

    def lines(self) -> list:
        """``b|a -> image`` for every basis pair, in canonical order."""
        out = []
        for n in range(2, self.bound + 1):
            for b, a in x_basis(self.alg_a, self.alg_b, n):
                out.append(f"{self.format_key(b, a)} -> {self.format_image(self._img.get((b, a), {}))}")
        return out


# verification ---------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    """Outcome of an identity check; ``witness`` is a basis triple of words."""

    ok: bool
    identity: Optional[str] = None
    witness: Optional[tuple] = None
    degree: Optional[int] = None

    def __bool__(self):
        return self.ok

    def describe(self, tw: Optional[TwistingMapTable] = None) -> str:
        if self.ok:
            return "ok"
        if tw is None:
            return f"{self.identity} fails at {self.witness} in degree {self.degree}"
        return f"{self.identity} fails at {format_triple(tw, self.identity, self.witness)} in degree {self.degree}"


def format_triple(tw: TwistingMapTable, identity: str, triple) -> str:
    an = tw.alg_a.presentation.names
    bn = tw.alg_b.presentation.names
    if identity == "mu_A":
        b, a1, a2 = triple
        return f"{format_word(b, bn)}|{format_word(a1, an)}|{format_word(a2, an)}"
    b1, b2, a = triple
    return f"{format_word(b1, bn)}|{format_word(b2, bn)}|{format_word(a, an)}"


def _lhs_a(tw, b, a1, a2, p):
    out: dict = {}
    for w, c in tw.alg_a.mul_words(a1, a2).items():
        for key, c2 in tw.apply(b, w).items():
            add_into(out, key, c * c2, p)
    return out


def _rhs_a(tw, b, a1, a2, p):
    """``(mu_A (x) 1)(1 (x) tau)(tau (x) 1)(b (x) a1 (x) a2)``."""
    alg_l = tw.alg_a
    out: dict = {}
    for (x1, y1), c in tw.apply(b, a1).items():
        for (x2, y2), c2 in tw.apply(y1, a2).items():
            for w, c3 in alg_l.mul_words(x1, x2).items():
                add_into(out, (w, y2), c * c2 * c3, p)
    return out


def _lhs_b(tw, b1, b2, a, p):
    out: dict = {}
    for w, c in tw.alg_b.mul_words(b1, b2).items():
        for key, c2 in tw.apply(w, a).items():
            add_into(out, key, c * c2, p)
    return out


def _rhs_b(tw, b1, b2, a, p):
    """``(1 (x) mu_B)(tau (x) 1)(b1 (x) tau(b2 (x) a))``."""
    alg_r = tw.alg_b
    out: dict = {}
    for (x1, y1), c in tw.apply(b2, a).items():
        for (x2, y2), c2 in tw.apply(b1, x1).items():
            for w, c3 in alg_r.mul_words(y2, y1).items():
                add_into(out, (x2, w), c * c2 * c3, p)
    return out


def check_degree(tw: TwistingMapTable, n: int, restricted: bool = False) -> Verdict:
    """Both identities on all positive basis triples of total degree ``n``.

    With ``restricted`` only triples ``b|a|x`` with ``x`` in degree 1 and
    ``v|b|a`` with ``v`` in degree 1 are tested.  Triples with a degree-0 factor
    satisfy both identities identically under the unital rules.
    """
    alg_l, alg_r = tw.alg_a, tw.alg_b
    p = tw.field.p
    for q in range(1, n - 1):
        for b in alg_r.basis(q):
            for i in range(1, n - q):
                k = n - q - i
                if restricted and k != 1:
                    continue
                for a1 in alg_l.basis(i):
                    for a2 in alg_l.basis(k):
                        if _lhs_a(tw, b, a1, a2, p) != _rhs_a(tw, b, a1, a2, p):
                            return Verdict(False, "mu_A", (b, a1, a2), n)
    for q1 in range(1, n - 1):
        if restricted and q1 != 1:
            continue
        for b1 in alg_r.basis(q1):
            for q2 in range(1, n - q1):
                for b2 in alg_r.basis(q2):
                    for a in alg_l.basis(n - q1 - q2):
                        if _lhs_b(tw, b1, b2, a, p) != _rhs_b(tw, b1, b2, a, p):
                            return Verdict(False, "mu_B", (b1, b2, a), n)
    return Verdict(True)


def verify_twisting_to_degree(tw: TwistingMapTable, n: int) -> Verdict:
    if n > tw.bound:
        raise BoundError(f"cannot verify degree {n} of a degree {tw.bound} table")
    for j in range(3, n + 1):
        v = check_degree(tw, j)
        if not v:
            return v
    return Verdict(True)


# classification ---------------------------------------------------------------


@dataclass(frozen=True)
class SeparableSplit:
    """``B_1 = B_1' + B_1''`` given by spanning vectors in generator coordinates."""

    primed: tuple
    double_primed: tuple

    @classmethod
    def from_names(cls, alg_b: TruncatedAlgebra, primed: Sequence[str], double_primed: Sequence[str]):
        idx = alg_b.presentation.generators.index()
        g = alg_b.ngens

        def vec(name):
            if name not in idx:
                raise StructuralError(f"unknown generator {name!r} in split")
            return tuple(1 if j == idx[name] else 0 for j in range(g))

        split = cls(tuple(vec(n) for n in primed), tuple(vec(n) for n in double_primed))
        split.validate(g, alg_b.field)
        return split

    def validate(self, dim: int, field: FieldSpec) -> None:
        vecs = list(self.primed) + list(self.double_primed)
        if any(len(v) != dim for v in vecs):
            raise StructuralError(f"split vectors must have length {dim}")
        rows = [{j: field(x) for j, x in enumerate(v) if x} for v in vecs]
        _, piv = rref_rows(rows, dim, field)
        if len(piv) != dim or len(vecs) != dim:
            raise StructuralError("split pieces are not complementary in B_1")


@dataclass(frozen=True)
class ClassificationReport:
    one_sided_toward_B: bool
    one_sided_toward_A: bool
    pure: bool
    strongly_graded: bool
    separable_with: Optional[bool] = None

    def as_dict(self) -> dict:
        return {
            "one_sided_toward_B": self.one_sided_toward_B,
            "one_sided_toward_A": self.one_sided_toward_A,
            "pure": self.pure,
            "strongly_graded": self.strongly_graded,
            "separable_with": self.separable_with,
        }


def _span(vecs, field) -> Echelon:
    ech = Echelon(field)
    for v in vecs:
        ech.add({j: field(x) for j, x in enumerate(v) if x})
    return ech


def separable_violation(tw: TwistingMapTable, split: SeparableSplit) -> Optional[str]:
    """First violated split containment on ``B_1 (x) A_1``, or None."""
    alg_l, alg_r = tw.alg_a, tw.alg_b
    F = tw.field
    p = F.p
    gb = alg_r.ngens
    split.validate(gb, F)
    gens_b = alg_r.basis(1)
    b1_index = alg_r.index(1)
    span1 = _span(split.primed, F)
    span2 = _span(split.double_primed, F)
    b2_index = alg_r.index(2)
    prod = Echelon(F)
    for u in gens_b:
        for v in split.double_primed:
            img: dict = {}
            for j, c in enumerate(v):
                if c:
                    for w, c2 in alg_r.mul_words(u, gens_b[j]).items():
                        add_into(img, b2_index[w], F(c) * c2, p)
            prod.add(img)
    for label, vecs in (("primed", split.primed), ("double_primed", split.double_primed)):
        for v in vecs:
            for x in alg_l.basis(1):
                img: dict = {}
                for j, c in enumerate(v):
                    if c:
                        for key, c2 in tw.apply(gens_b[j], x).items():
                            add_into(img, key, F(c) * c2, p)
                corner_a = {k: c for k, c in img.items() if len(k[1]) == 0}
                corner_b = {b2_index[k[1]]: c for k, c in img.items() if len(k[0]) == 0}
                mid: dict = {}
                for (a2, b2), c in img.items():
                    if len(a2) == 1 and len(b2) == 1:
                        mid.setdefault(a2, {})[b1_index[b2]] = c
                target = span1 if label == "primed" else span2
                if label == "primed" and corner_b:
                    return f"{label} image has an A_0 (x) B_2 component"
                if label == "double_primed" and corner_a:
                    return f"{label} image has an A_2 (x) B_0 component"
                if label == "double_primed" and corner_b and not prod.contains(corner_b):
                    return "A_0 (x) B_2 component outside mu_B(B_1 (x) B_1'')"
                for vec in mid.values():
                    if not target.contains(vec):
                        return f"{label} image has an A_1 (x) B_1 component outside its piece"
    return None


def classify(tw: TwistingMapTable, split: Optional[SeparableSplit] = None) -> ClassificationReport:
    toward_b = toward_a = strongly = True
    for (b, a), img in tw._img.items():
        for a2, b2 in img:
            if not a2:
                toward_b = False
            if not b2:
                toward_a = False
            if len(a2) != len(a) or len(b2) != len(b):
                strongly = False
    sep = None
    if split is not None:
        sep = separable_violation(tw, split) is None
    return ClassificationReport(toward_b, toward_a, toward_a and toward_b, strongly, sep)


# automorphisms ------------------------------------------------------------------


class AlgebraMap:
    """Graded algebra endomorphism determined by the images of generators."""

    def __init__(self, alg: TruncatedAlgebra, gen_images: Sequence[dict]):
        self.alg = alg
        self.gen_images = [dict(x) for x in gen_images]
        self._cache: dict = {(): {(): alg.field.one}}

    @classmethod
    def from_matrix(cls, alg: TruncatedAlgebra, matrix) -> "AlgebraMap":
        """Column ``i`` of ``matrix`` holds the coordinates of the image of generator ``i``."""
        F = alg.field
        g = alg.ngens
        rows = matrix.to_dense() if isinstance(matrix, ExactMatrix) else [list(r) for r in matrix]
        if len(rows) != g or any(len(r) != g for r in rows):
            raise StructuralError(f"automorphism must be a {g}x{g} matrix")
        imgs = []
        for i in range(g):
            imgs.append({(j,): F(rows[j][i]) for j in range(g) if F(rows[j][i])})
        return cls(alg, imgs)

    def matrix(self) -> list:
        g = self.alg.ngens
        F = self.alg.field
        return [[self.gen_images[i].get((j,), F.zero) for i in range(g)] for j in range(g)]

    def word(self, w) -> dict:
        got = self._cache.get(w)
        if got is None:
            got = self.alg.mul(self.gen_images[w[0]], self.word(w[1:]))
            self._cache[w] = got
        return got

    def elem(self, x: dict) -> dict:
        p = self.alg.field.p
        out: dict = {}
        for w, c in x.items():
            for w2, c2 in self.word(tuple(w)).items():
                add_into(out, w2, c * c2, p)
        return out

    def preserves_relations(self) -> bool:
        alg_l = self.alg
        for r in alg_l.presentation.relations:
            if r.is_zero() or r.degree > alg_l.top_degree:
                continue
            acc: dict = {}
            for w, c in r.terms:
                img = {(): alg_l.field.one}
                for letter in w:
                    img = alg_l.mul(img, self.gen_images[letter])
                for w2, c2 in img.items():
                    add_into(acc, w2, c * c2, alg_l.field.p)
            if acc:
                return False
        return True

    def inverse(self) -> "AlgebraMap":
        F = self.alg.field
        g = self.alg.ngens
        M = ExactMatrix.from_dense(F, self.matrix())
        rows = [dict(r) for r in M.sparse_rows()]
        aug = []
        for i, r in enumerate(rows):
            row = dict(r)
            row[g + i] = F.one
            aug.append(row)
        E, piv = rref_rows(aug, 2 * g, F)
        if len(piv) < g or piv[g - 1] >= g:
            raise StructuralError("degree-1 map is not invertible")
        inv = [[F.zero] * g for _ in range(g)]
        for k, row in enumerate(E[:g]):
            for j, x in row.items():
                if j >= g:
                    inv[k][j - g] = x
        return AlgebraMap.from_matrix(self.alg, inv)


def _checked_map(alg, matrix) -> AlgebraMap:
    m = AlgebraMap.from_matrix(alg, matrix)
    m.inverse()
    if not m.preserves_relations():
        raise StructuralError("degree-1 map does not preserve the relations")
    return m


def conjugate(tw: TwistingMapTable, aut_a, aut_b) -> TwistingMapTable:
    """``(alpha (x) beta) tau (beta^-1 (x) alpha^-1)`` for degree-1 automorphism matrices."""
    alpha = _checked_map(tw.alg_a, aut_a)
    beta = _checked_map(tw.alg_b, aut_b)
    ainv, binv = alpha.inverse(), beta.inverse()
    p = tw.field.p
    images = {}
    for n in range(2, tw.bound + 1):
        for b, a in x_basis(tw.alg_a, tw.alg_b, n):
            src: dict = {}
            for b2, c in binv.word(b).items():
                for a2, c2 in ainv.word(a).items():
                    add_into(src, (b2, a2), c * c2, p)
            mid = tw.apply_elem(src)
            out: dict = {}
            for (a3, b3), c in mid.items():
                for a4, c2 in alpha.word(a3).items():
                    for b4, c3 in beta.word(b3).items():
                        add_into(out, (a4, b4), c * c2 * c3, p)
            images[(b, a)] = out
    return TwistingMapTable(tw.alg_a, tw.alg_b, tw.bound, images)


def flip_table(alg_a: TruncatedAlgebra, alg_b: TruncatedAlgebra, bound: int) -> TwistingMapTable:
    one = alg_a.field.one
    images = {(b, a): {(a, b): one} for n in range(2, bound + 1) for b, a in x_basis(alg_a, alg_b, n)}
    return TwistingMapTable(alg_a, alg_b, bound, images)
