"""Degree-by-degree extension of truncated twisting maps.

The unknown degree-``n+1`` block ``f: (B_+ (x) A_+)_{n+1} -> (A (x) B)_{n+1}`` must
satisfy ``f . D = R`` where ``D`` collects the two twisting identities with the
unknown terms moved to one side and ``R`` the part already determined by lower
degrees.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from .algebra import Presentation, TruncatedAlgebra, truncate, words_of_length
from .errors import ContainmentFailure, InternalConsistencyError, PreconditionError
from .linalg import ExactMatrix, rank_and_kernel, rref_rows, solve_pairs
from .polyparse import format_terms, format_word
from .twisting import (
    SeparableSplit,
    TwistingMapTable,
    add_into,
    check_degree,
    separable_violation,
    verify_twisting_to_degree,
    x_basis,
    y_basis,
)

REQUIRE_UNIQUE = "require_unique"
TAKE_CANONICAL = "take_canonical"
POLICIES = (REQUIRE_UNIQUE, TAKE_CANONICAL)


def _domain_keys(tw: TwistingMapTable, m: int, full: bool):
    """Domain basis of ``D`` in total degree ``m``.

    The generating subset uses only ``b|a|x`` with ``|x| = 1`` and ``v|b|a`` with
    ``|v| = 1``; it has the same solution set and the same rank as the full domain.
    """
    alg_l, alg_r = tw.alg_a, tw.alg_b
    out = []
    for q in range(1, m - 1):
        for b in alg_r.basis(q):
            for i in range(1, m - q):
                k = m - q - i
                if not full and k != 1:
                    continue
                for a in alg_l.basis(i):
                    for a2 in alg_l.basis(k):
                        out.append(("A", b, a, a2))
    for q in range(1, m - 1):
        if not full and q != 1:
            continue
        for b in alg_r.basis(q):
            for q2 in range(1, m - q):
                for b2 in alg_r.basis(q2):
                    for a in alg_l.basis(m - q - q2):
                        out.append(("B", b, b2, a))
    return out


def _column(tw: TwistingMapTable, key, xidx: dict, yidx: dict):
    alg_l, alg_r = tw.alg_a, tw.alg_b
    p = tw.field.p
    dcol: dict = {}
    rcol: dict = {}
    if key[0] == "A":
        _, b, a, a2 = key
        for w, c in alg_l.mul_words(a, a2).items():
            add_into(dcol, xidx[(b, w)], c, p)
        for (a1, b1), c in tw.apply(b, a).items():
            if not a1:
                add_into(dcol, xidx[(b1, a2)], -c, p)
                continue
            for (a3, b3), c2 in tw.apply(b1, a2).items():
                for w, c3 in alg_l.mul_words(a1, a3).items():
                    add_into(rcol, yidx[(w, b3)], c * c2 * c3, p)
    else:
        _, b, b2, a = key
        for w, c in alg_r.mul_words(b, b2).items():
            add_into(dcol, xidx[(w, a)], c, p)
        for (a1, b1), c in tw.apply(b2, a).items():
            if not b1:
                add_into(dcol, xidx[(b, a1)], -c, p)
                continue
            for (a3, b3), c2 in tw.apply(b, a1).items():
                for w, c3 in alg_r.mul_words(b3, b1).items():
                    add_into(rcol, yidx[(a3, w)], c * c2 * c3, p)
    return dcol, rcol


def _system(tw: TwistingMapTable, full: bool):
    m = tw.bound + 1
    if m > min(tw.alg_a.top_degree, tw.alg_b.top_degree):
        raise PreconditionError(f"algebras are truncated below degree {m}")
    xs = x_basis(tw.alg_a, tw.alg_b, m)
    ys = y_basis(tw.alg_a, tw.alg_b, m)
    xidx = {k: i for i, k in enumerate(xs)}
    yidx = {k: i for i, k in enumerate(ys)}
    keys = _domain_keys(tw, m, full)
    cols = [_column(tw, k, xidx, yidx) for k in keys]
    return xs, ys, keys, cols


def build_delta_R(tw: TwistingMapTable, full: bool = True, verified: bool = False):
    """``(D, R)`` for extending ``tw`` from degree ``tw.bound`` to the next degree.

    Rows of ``D`` index ``(B_+ (x) A_+)_{n+1}`` and rows of ``R`` index ``(A (x) B)_{n+1}``
    (canonical orders of ``x_basis``/``y_basis``); columns index the domain triples.
    """
    if not verified:
        _require_twisting(tw)
    xs, ys, _, cols = _system(tw, full)
    F = tw.field
    D = ExactMatrix.from_columns(F, len(xs), [d for d, _ in cols])
    R = ExactMatrix.from_columns(F, len(ys), [r for _, r in cols])
    return D, R


def _require_twisting(tw: TwistingMapTable) -> None:
    v = verify_twisting_to_degree(tw, tw.bound)
    if not v:
        raise PreconditionError(f"table is not twisting to degree {tw.bound}: {v.describe(tw)}")


@dataclass(frozen=True)
class ExtensionReport:
    degree: int
    delta_rank: int
    delta_corank: int
    exists: bool
    unique: bool
    freedom_dim: int
    images: Optional[dict] = None
    witness: Optional[str] = None
    table: Optional[TwistingMapTable] = dc_field(default=None, repr=False, compare=False)

    @property
    def particular(self) -> Optional[ExactMatrix]:
        """Canonical degree-``n+1`` block as a matrix from ``X_{n+1}`` to ``Y_{n+1}``."""
        if self.table is None:
            return None
        tw = self.table
        xs = x_basis(tw.alg_a, tw.alg_b, self.degree)
        ys = y_basis(tw.alg_a, tw.alg_b, self.degree)
        yidx = {k: i for i, k in enumerate(ys)}
        cols = [{yidx[k]: c for k, c in self.images.get(x, {}).items()} for x in xs]
        return ExactMatrix.from_columns(tw.field, len(ys), cols)

    def summary(self) -> dict:
        return {
            "degree": self.degree,
            "delta_rank": self.delta_rank,
            "delta_corank": self.delta_corank,
            "exists": self.exists,
            "unique": self.unique,
            "freedom_dim": self.freedom_dim,
        }


def _witness_text(tw, keys, cols, nx) -> str:
    """A kernel vector of ``D`` on which ``R`` does not vanish, rendered as text."""
    F = tw.field
    D = ExactMatrix.from_columns(F, nx, [d for d, _ in cols])
    _, ker = rank_and_kernel(D)
    p = F.p
    an = tw.alg_a.presentation.names
    bn = tw.alg_b.presentation.names
    for v in ker:
        acc: dict = {}
        for j, c in enumerate(v):
            if c:
                for l, x in cols[j][1].items():
                    add_into(acc, l, c * x, p)
        if acc:
            items = []
            for j, c in enumerate(v):
                if c:
                    k = keys[j]
                    names = (bn, an, an) if k[0] == "A" else (bn, bn, an)
                    items.append(("|".join(format_word(w, nm) for w, nm in zip(k[1:], names)), c))
            return format_terms(items, lambda s: s, F)
    raise InternalConsistencyError("inconsistent system without a kernel witness")


def _flip_shifted(cols, xs, yidx, p):
    """Columns of ``R - flip . D``: solving for the offset from the flip map.

    The canonical solution is the one whose offset from the flip vanishes on the
    non-pivot coordinates, so a free coordinate keeps its flip value.
    """
    out = []
    for dcol, rcol in cols:
        r = dict(rcol)
        for i, c in dcol.items():
            b, a = xs[i]
            add_into(r, yidx[(a, b)], -c, p)
        out.append((dcol, r))
    return out


def extend_one_degree(tw: TwistingMapTable, verified: bool = False, full: bool = False) -> ExtensionReport:
    if not verified:
        _require_twisting(tw)
    xs, ys, keys, cols = _system(tw, full)
    F = tw.field
    nx, ny = len(xs), len(ys)
    m = tw.bound + 1
    yidx = {k: i for i, k in enumerate(ys)}
    ok, values, free = solve_pairs(_flip_shifted(cols, xs, yidx, F.p), nx, ny, F)
    if not ok:
        _, piv = rref_rows([d for d, _ in cols], nx, F)
        rank = len(piv)
        return ExtensionReport(m, rank, nx - rank, False, False, 0, witness=_witness_text(tw, keys, cols, nx))
    corank = len(free)
    images = {}
    for i, (b, a) in enumerate(xs):
        img = dict(values.get(i, {}))
        add_into(img, yidx[(a, b)], F.one, F.p)
        images[(b, a)] = {ys[l]: c for l, c in img.items()}
    new = tw.extended(images, m)
    v = check_degree(new, m)
    if not v:
        raise InternalConsistencyError(f"solved block fails re-verification: {v.describe(new)}")
    return ExtensionReport(m, nx - corank, corank, True, corank == 0, corank * ny, images, table=new)


@dataclass(frozen=True)
class ExtensionOutcome:
    table: Optional[TwistingMapTable]
    reports: tuple
    stuck_degree: Optional[int] = None
    reason: Optional[str] = None
    last_table: Optional[TwistingMapTable] = dc_field(default=None, repr=False, compare=False)

    @property
    def ok(self) -> bool:
        return self.table is not None


def extend_to_degree(seed: TwistingMapTable, top_degree: int, policy: str = TAKE_CANONICAL, verified: bool = False) -> ExtensionOutcome:
    if policy not in POLICIES:
        raise PreconditionError(f"unknown policy {policy!r}")
    if not verified:
        _require_twisting(seed)
    tw = seed
    reports = []
    while tw.bound < top_degree:
        rep = extend_one_degree(tw, verified=True)
        reports.append(rep)
        if not rep.exists:
            return ExtensionOutcome(None, tuple(reports), rep.degree, "inconsistent", tw)
        if policy == REQUIRE_UNIQUE and not rep.unique:
            return ExtensionOutcome(None, tuple(reports), rep.degree, "ambiguous", tw)
        tw = rep.table
    return ExtensionOutcome(tw, tuple(reports), last_table=tw)


def delta_rank(tw: TwistingMapTable, full: bool = False) -> tuple:
    """``(rank, dim X_{n+1})`` for the extension system of ``tw``."""
    xs, _, _, cols = _system(tw, full)
    _, piv = rref_rows([d for d, _ in cols], len(xs), tw.field)
    return len(piv), len(xs)


def uep_profile(tw: TwistingMapTable) -> dict:
    """``{n: delta_n surjective}`` for ``3 <= n <= bound``."""
    out = {}
    for n in range(3, tw.bound + 1):
        r, nx = delta_rank(tw.restrict(n - 1))
        out[n] = r == nx
    return out


def check_simpler_conditions(tw: TwistingMapTable, degree: Optional[int] = None):
    """Restricted identities on ``(B (x) A (x) A_1)`` and ``(B_1 (x) B (x) A)`` in the top degree."""
    return check_degree(tw, tw.bound if degree is None else degree, restricted=True)


def _is_free(alg: TruncatedAlgebra) -> bool:
    return all(r.is_zero() for r in alg.presentation.relations)


def seed_table(alg_a: TruncatedAlgebra, alg_b: TruncatedAlgebra, t1: dict) -> TwistingMapTable:
    """Degree-2 table from images of ``B_1 (x) A_1`` basis pairs."""
    return TwistingMapTable(alg_a, alg_b, 2, t1)


def separable_seed_extend(alg_a: TruncatedAlgebra, alg_b: TruncatedAlgebra, t1, split: SeparableSplit, top_degree: int) -> TwistingMapTable:
    if not (_is_free(alg_a) and _is_free(alg_b)):
        raise PreconditionError("separable seeds require free component algebras")
    seed = t1 if isinstance(t1, TwistingMapTable) else seed_table(alg_a, alg_b, t1)
    bad = separable_violation(seed, split)
    if bad:
        raise PreconditionError(f"seed violates the split containments: {bad}")
    out = extend_to_degree(seed, top_degree, REQUIRE_UNIQUE, verified=True)
    if not out.ok:
        raise InternalConsistencyError(f"separable seed stuck at degree {out.stuck_degree} ({out.reason})")
    return out.table


# induced maps -----------------------------------------------------------------


def _as_presentation(base: Presentation, ideal) -> Presentation:
    rels = [r if isinstance(r, str) else r for r in ideal]
    if all(isinstance(r, str) for r in rels):
        return Presentation.parse(base.names, rels, base.field)
    return Presentation(base.generators, tuple(rels), base.field)


def _sandwiches(g: int, rel: dict, room: int):
    """All ``w . r . w'`` with ``|w| + |w'| = room`` as word dictionaries."""
    for left in range(room + 1):
        for w in words_of_length(g, left):
            for w2 in words_of_length(g, room - left):
                yield {w + u + w2: c for u, c in rel.items()}


def _project(alg_a: TruncatedAlgebra, alg_b: TruncatedAlgebra, elem: dict, p: int) -> dict:
    out: dict = {}
    for (a, b), c in elem.items():
        na = alg_a.normal_form(a)
        if not na:
            continue
        nb = alg_b.normal_form(b)
        for a2, c2 in na.items():
            for b2, c3 in nb.items():
                add_into(out, (a2, b2), c * c2 * c3, p)
    return out


def induced_on_quotient(
    tw: TwistingMapTable,
    ideal_a: Sequence = (),
    ideal_b: Sequence = (),
    priority_a: Optional[Sequence[int]] = None,
    priority_b: Optional[Sequence[int]] = None,
    verified: bool = False,
) -> TwistingMapTable:
    """The map induced on ``A/I (x) B/J`` by a twisting map between free algebras.

    Raises ``ContainmentFailure`` with the first spanning element of
    ``B (x) I + J (x) A`` whose image leaves ``I (x) B + A (x) J``.
    """
    alg_l, alg_r = tw.alg_a, tw.alg_b
    if not (_is_free(alg_l) and _is_free(alg_r)):
        raise PreconditionError("induced maps start from free component algebras")
    if not verified:
        _require_twisting(tw)
    top_degree = tw.bound
    F = tw.field
    p = F.p
    qa = truncate(_as_presentation(alg_l.presentation, ideal_a), top_degree, priority_a)
    qb = truncate(_as_presentation(alg_r.presentation, ideal_b), top_degree, priority_b)
    ga, gb = alg_l.ngens, alg_r.ngens
    an, bn = alg_l.presentation.names, alg_r.presentation.names
    rels_a = [(r.degree, dict(r.terms)) for r in qa.presentation.relations if not r.is_zero()]
    rels_b = [(r.degree, dict(r.terms)) for r in qb.presentation.relations if not r.is_zero()]
    for n in range(2, top_degree + 1):
        for q in range(0, n - 1):
            for b in words_of_length(gb, q):
                for k, rel in rels_a:
                    if k > n - q:
                        continue
                    for elem in _sandwiches(ga, rel, n - q - k):
                        img = tw.apply_elem({(b, a): c for a, c in elem.items()})
                        if _project(qa, qb, img, p):
                            text = f"{format_word(b, bn)}|{_fmt_poly(elem, an, F)}"
                            raise ContainmentFailure(text, n, f"image of {text} leaves I(x)B + A(x)J")
        for q in range(0, n - 1):
            for a in words_of_length(ga, q):
                for k, rel in rels_b:
                    if k > n - q:
                        continue
                    for elem in _sandwiches(gb, rel, n - q - k):
                        img = tw.apply_elem({(b, a): c for b, c in elem.items()})
                        if _project(qa, qb, img, p):
                            text = f"{_fmt_poly(elem, bn, F)}|{format_word(a, an)}"
                            raise ContainmentFailure(text, n, f"image of {text} leaves I(x)B + A(x)J")
    images = {}
    for n in range(2, top_degree + 1):
        for b, a in x_basis(qa, qb, n):
            images[(b, a)] = _project(qa, qb, tw.apply(b, a), p)
    out = TwistingMapTable(qa, qb, top_degree, images)
    v = verify_twisting_to_degree(out, top_degree)
    if not v:
        raise InternalConsistencyError(f"induced map fails verification: {v.describe(out)}")
    return out


def _fmt_poly(elem: dict, names, F) -> str:
    items = sorted(elem.items(), key=lambda t: t[0])
    s = format_terms(items, lambda w: format_word(w, names), F)
    return s if len(items) == 1 else f"({s})"


def same_map(t1: TwistingMapTable, t2: TwistingMapTable) -> bool:
    """Whether two tables on the same presentations (possibly different normal words) agree."""
    if t1.bound != t2.bound:
        return False
    if t1.alg_a.presentation != t2.alg_a.presentation or t1.alg_b.presentation != t2.alg_b.presentation:
        return False
    p = t1.field.p
    A1, B1, A2, B2 = t1.alg_a, t1.alg_b, t2.alg_a, t2.alg_b
    for n in range(2, t1.bound + 1):
        for b, a in x_basis(A1, B1, n):
            src: dict = {}
            for b2, c in B2.normal_form(b).items():
                for a2, c2 in A2.normal_form(a).items():
                    add_into(src, (b2, a2), c * c2, p)
            img2 = _project(A1, B1, t2.apply_elem(src), p)
            if img2 != _project(A1, B1, t1.apply(b, a), p):
                return False
    return True
