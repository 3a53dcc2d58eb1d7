"""Truncated connected graded algebras generated in degree one.

Elements are sparse dicts ``{word: coefficient}`` where a word is a tuple of
generator indices and every word of the dict has the same length.

Degree ``n`` of ``T(V)/I`` is built as a quotient of ``V (x) A_{n-1}``: modulo
``V.I_{n-1}`` the only new ideal elements are ``r.w`` with ``r`` a relation and
``w`` a normal word.  Eliminating with the largest word first makes the surviving
words exactly the greedy complement of ``I_n`` in degree-lexicographic priority.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import BoundError, StructuralError
from .fields import QQ, FieldSpec
from .linalg import Echelon, ExactMatrix, rref_rows
from .polyparse import format_terms, format_word, parse_poly

Word = tuple


@dataclass(frozen=True)
class GeneratorSet:
    names: tuple

    def __post_init__(self):
        if not self.names:
            raise StructuralError("at least one generator is required")
        if len(set(self.names)) != len(self.names):
            raise StructuralError(f"duplicate generator names in {self.names}")

    def __len__(self):
        return len(self.names)

    def index(self) -> dict:
        return {n: i for i, n in enumerate(self.names)}


@dataclass(frozen=True)
class NcPoly:
    """Homogeneous noncommutative polynomial; ``terms`` is a tuple of (word, coeff)."""

    terms: tuple
    degree: int

    @classmethod
    def from_dict(cls, d: dict, field: FieldSpec) -> "NcPoly":
        clean = {}
        for w, c in d.items():
            c = field(c)
            if c:
                clean[tuple(w)] = c
        degs = {len(w) for w in clean}
        if len(degs) > 1:
            raise StructuralError(f"relation is not homogeneous (degrees {sorted(degs)})")
        deg = degs.pop() if degs else 0
        return cls(tuple(sorted(clean.items())), deg)

    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def format(self, names, field) -> str:
        return format_terms(sorted(self.terms, key=lambda t: t[0], reverse=True), lambda w: format_word(w, names), field)


@dataclass(frozen=True)
class Presentation:
    generators: GeneratorSet
    relations: tuple
    field: FieldSpec = QQ

    def __post_init__(self):
        g = len(self.generators)
        for r in self.relations:
            if r.is_zero():
                continue
            if r.degree < 2:
                raise StructuralError("relations must have degree at least 2")
            for w, _ in r.terms:
                if any(not 0 <= x < g for x in w):
                    raise StructuralError("relation uses an unknown generator")

    @classmethod
    def parse(cls, names: Sequence[str], relations: Sequence[str] = (), field: FieldSpec = QQ) -> "Presentation":
        gens = GeneratorSet(tuple(names))
        idx = gens.index()
        rels = []
        for k, text in enumerate(relations):
            d = parse_poly(text, idx, line=k + 1)
            if not d:
                continue
            rels.append(NcPoly.from_dict(d, field))
        return cls(gens, tuple(rels), field)

    @classmethod
    def free(cls, names: Sequence[str], field: FieldSpec = QQ) -> "Presentation":
        return cls(GeneratorSet(tuple(names)), (), field)

    @property
    def ngens(self) -> int:
        return len(self.generators)

    @property
    def names(self) -> tuple:
        return self.generators.names

    def max_relation_degree(self) -> int:
        return max((r.degree for r in self.relations if not r.is_zero()), default=0)

    def is_quadratic(self) -> bool:
        return all(r.degree == 2 for r in self.relations if not r.is_zero())

    def relation_strings(self) -> list:
        return [r.format(self.names, self.field) for r in self.relations if not r.is_zero()]


def words_of_length(g: int, n: int, rank: Optional[Sequence[int]] = None) -> list:
    """All words of length ``n`` ascending in degree-lexicographic priority."""
    order = list(range(g)) if rank is None else sorted(range(g), key=lambda i: rank[i])
    out = [()]
    for _ in range(n):
        out = [w + (v,) for w in out for v in order]
    return out


class TruncatedAlgebra:
    """Degrees ``0..top_degree`` of a presented algebra with normal-word bases.

    ``priority`` optionally reorders generators for the normal-word choice
    (``priority[i]`` is the rank of generator ``i``); the default is listed order.
    """

    def __init__(self, presentation: Presentation, top_degree: int, priority: Optional[Sequence[int]] = None):
        if top_degree < 0:
            raise BoundError("truncation degree must be nonnegative")
        self.presentation = presentation
        self.top_degree = top_degree
        self.field = presentation.field
        g = presentation.ngens
        self.ngens = g
        self.priority = tuple(range(g)) if priority is None else tuple(priority)
        if sorted(self.priority) != list(range(g)):
            raise StructuralError("priority must rank every generator once")
        self._gen_order = sorted(range(g), key=lambda i: self.priority[i])
        self._rels: dict = {}
        for r in presentation.relations:
            if not r.is_zero():
                self._rels.setdefault(r.degree, []).append(r.as_dict())
        self._basis = [[()]]
        self._index = [{(): 0}]
        self._reducer: list = [{}]
        self._new_relations: dict = {}
        self._nf_cache: dict = {}
        for n in range(1, top_degree + 1):
            self._build(n)

    # construction -------------------------------------------------------
    def _key(self, w):
        pr = self.priority
        return tuple(pr[x] for x in w)

    def _build(self, n: int) -> None:
        F = self.field
        cand = [(v,) + w for v in self._gen_order for w in self._basis[n - 1]]
        m = len(cand)
        # column position: largest word first
        col = {w: m - 1 - k for k, w in enumerate(cand)}
        lower, top = [], []
        for k, rels in self._rels.items():
            if k > n:
                continue
            target = top if k == n else lower
            tails = self._basis[n - k]
            for r in rels:
                for w in tails:
                    row = self._relation_row(r, w, col)
                    if row or k == n:
                        target.append(row)
        E0, p0 = rref_rows(lower, m, F)
        E1, p1 = E0, p0
        if top:
            # keep only relations that enlarge the ideal; the others stay redundant
            # in every higher degree, so dropping them leaves the ideal unchanged
            ech = Echelon(F)
            ech.rows = dict(zip(p0, (dict(r) for r in E0)))
            kept = [r for r, row in zip(self._rels[n], top) if ech.add(row)]
            self._rels[n] = kept
            E1, p1 = ech.echelon()
        if len(p1) > len(p0):
            self._new_relations[n] = len(p1) - len(p0)
        word_at = {m - 1 - k: w for k, w in enumerate(cand)}
        reducer = {}
        p = F.p
        for c, row in zip(p1, E1):
            lead = word_at[c]
            reducer[lead] = {word_at[j]: ((-x) % p if p else -x) for j, x in row.items() if j != c}
        self._reducer.append(reducer)
        basis = [w for w in cand if w not in reducer]
        self._basis.append(basis)
        self._index.append({w: i for i, w in enumerate(basis)})

    def _relation_row(self, rel: dict, tail, col) -> dict:
        """Coordinates of ``rel . tail`` in the candidate words of its degree."""
        p = self.field.p
        row: dict = {}
        for u, c in rel.items():
            for w2, c2 in self.normal_form(u[1:] + tail).items():
                j = col[(u[0],) + w2]
                val = row.get(j, 0) + c * c2
                if p:
                    val %= p
                if val:
                    row[j] = val
                else:
                    row.pop(j, None)
        return row

    # queries --------------------------------------------------------------
    def basis(self, n: int) -> list:
        self._check(n)
        return list(self._basis[n])

    def index(self, n: int) -> dict:
        self._check(n)
        return self._index[n]

    def dim(self, n: int) -> int:
        if n < 0:
            return 0
        self._check(n)
        return len(self._basis[n])

    def hilbert(self) -> list:
        return [len(b) for b in self._basis]

    def ideal_dim(self, n: int) -> int:
        return self.ngens**n - self.dim(n)

    def is_normal(self, word) -> bool:
        n = len(word)
        return n <= self.top_degree and word in self._index[n]

    def new_relation_counts(self) -> dict:
        return dict(self._new_relations)

    def _check(self, n: int) -> None:
        if n > self.top_degree:
            raise BoundError(f"degree {n} exceeds truncation {self.top_degree}")
        if n < 0:
            raise BoundError("negative degree")

    def normal_form(self, word) -> dict:
        """Normal form of an arbitrary word as ``{normal word: coeff}``."""
        n = len(word)
        if n > self.top_degree:
            raise BoundError(f"degree {n} exceeds truncation {self.top_degree}")
        if word in self._index[n]:
            return {word: self.field.one}
        cached = self._nf_cache.get(word)
        if cached is not None:
            return cached
        p = self.field.p
        red = self._reducer[n]
        v = word[0]
        out: dict = {}
        for w2, c in self.normal_form(word[1:]).items():
            cw = (v,) + w2
            img = red.get(cw)
            if img is None:
                pairs = ((cw, 1),)
            else:
                pairs = img.items()
            for w3, c3 in pairs:
                val = out.get(w3, 0) + c * c3
                if p:
                    val %= p
                if val:
                    out[w3] = val
                else:
                    out.pop(w3, None)
        self._nf_cache[word] = out
        return out

    def reduce(self, elem: dict) -> dict:
        """Normal form of a combination of arbitrary words of one length."""
        p = self.field.p
        out: dict = {}
        for w, c in elem.items():
            for w2, c2 in self.normal_form(tuple(w)).items():
                val = out.get(w2, 0) + c * c2
                if p:
                    val %= p
                if val:
                    out[w2] = val
                else:
                    out.pop(w2, None)
        return out

    def mul_words(self, u, v) -> dict:
        if len(u) + len(v) > self.top_degree:
            raise BoundError(f"product degree {len(u) + len(v)} exceeds truncation {self.top_degree}")
        return self.normal_form(u + v)

    def mul(self, x: dict, y: dict) -> dict:
        p = self.field.p
        out: dict = {}
        for u, a in x.items():
            for v, b in y.items():
                for w, c in self.mul_words(u, v).items():
                    val = out.get(w, 0) + a * b * c
                    if p:
                        val %= p
                    if val:
                        out[w] = val
                    else:
                        out.pop(w, None)
        return out

    def element(self, text: str) -> dict:
        """Parse a homogeneous polynomial in the generators and reduce it."""
        d = parse_poly(text, self.presentation.generators.index())
        F = self.field
        return self.reduce({w: F(c) for w, c in d.items()})

    def coords(self, elem: dict, n: int) -> list:
        idx = self.index(n)
        out = [self.field.zero] * len(idx)
        for w, c in elem.items():
            out[idx[w]] = c
        return out

    def from_coords(self, vec: Sequence, n: int) -> dict:
        basis = self.basis(n)
        F = self.field
        return {basis[i]: F(c) for i, c in enumerate(vec) if c}

    def normal_form_matrix(self, n: int) -> ExactMatrix:
        """Matrix of the projection from all words of length ``n`` onto the basis."""
        idx = self.index(n)
        words = words_of_length(self.ngens, n)
        cols = [{idx[w]: c for w, c in self.normal_form(w).items()} for w in words]
        return ExactMatrix.from_columns(self.field, len(idx), cols)

    def multiplication_matrix(self, i: int, j: int) -> ExactMatrix:
        """``A_i (x) A_j -> A_{i+j}``; column ``a * dim A_j + b``."""
        bi, bj = self.basis(i), self.basis(j)
        idx = self.index(i + j)
        cols = [{idx[w]: c for w, c in self.mul_words(u, v).items()} for u in bi for v in bj]
        return ExactMatrix.from_columns(self.field, len(idx), cols)

    def format_element(self, elem: dict) -> str:
        names = self.presentation.names
        items = sorted(elem.items(), key=lambda t: self._key(t[0]), reverse=True)
        return format_terms(items, lambda w: format_word(w, names), self.field)

    def __repr__(self):
        return f"TruncatedAlgebra({list(self.presentation.names)}, top_degree={self.top_degree}, dims={self.hilbert()})"


def truncate(p: Presentation, top_degree: int, priority=None) -> TruncatedAlgebra:
    if top_degree < 2:
        raise BoundError("truncation degree must be at least 2")
    return TruncatedAlgebra(p, top_degree, priority)


def multiply(alg: TruncatedAlgebra, u: Sequence, v: Sequence, i: int, j: int) -> list:
    """Product of coordinate vectors ``u`` in degree ``i`` and ``v`` in degree ``j``."""
    if i + j > alg.top_degree:
        raise BoundError(f"product degree {i + j} exceeds truncation {alg.top_degree}")
    prod = alg.mul(alg.from_coords(u, i), alg.from_coords(v, j))
    return alg.coords(prod, i + j)


def hilbert(alg: TruncatedAlgebra) -> list:
    return alg.hilbert()


def minimal_generator_degrees(p: Presentation, top_degree: int) -> dict:
    """Number of minimal ideal generators needed in each degree ``2..top_degree``."""
    return truncate(p, top_degree).new_relation_counts()


def quadratic_part(p: Presentation, top_degree: int = 2) -> Presentation:
    """Keep the degree-two relation span, as a canonical echelon basis."""
    g = p.ngens
    words = words_of_length(g, 2)
    m = len(words)
    col = {w: m - 1 - k for k, w in enumerate(words)}
    rows = [{col[w]: c for w, c in r.terms} for r in p.relations if r.degree == 2]
    E, piv = rref_rows(rows, m, p.field)
    rels = tuple(NcPoly.from_dict({words[m - 1 - j]: x for j, x in row.items()}, p.field) for row in E)
    return Presentation(p.generators, rels, p.field)
