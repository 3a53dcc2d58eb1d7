"""Line-oriented job files.

::

    [field]
    Q
    [algebra A]
    generators: x, y
    relations: x*y - y*x
    [algebra B]
    generators: d, u
    [twist]
    d|x -> x|d + 1|d^2
    [run]
    degree: 8
    policy: canonical
    split: u ; d

``[twist]`` holds either entry lines ``b|a -> sum c a'|b'`` or ``fixture: name``.
Relations may be separated by ``;`` or given on repeated ``relations:`` lines.
``#`` starts a comment.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

from .algebra import Presentation, TruncatedAlgebra
from .errors import ParseError, StructuralError, TwistkError
from .fields import FieldSpec
from .polyparse import parse_tensor, parse_tensor_key
from .twisting import TwistingMapTable

SECTIONS = ("field", "algebra A", "algebra B", "twist", "run")
POLICY_ALIASES = {
    "unique": "require_unique",
    "require_unique": "require_unique",
    "canonical": "take_canonical",
    "take_canonical": "take_canonical",
}


@dataclass
class AlgebraSpec:
    generators: list = dc_field(default_factory=list)
    relations: list = dc_field(default_factory=list)
    line: int = 0

    def presentation(self, field: FieldSpec) -> Presentation:
        try:
            return Presentation.parse(self.generators, self.relations, field)
        except ParseError:
            raise
        except TwistkError as exc:
            raise ParseError(str(exc), self.line, 1) from exc


@dataclass
class JobSpec:
    field: Optional[str] = None
    alg_a: Optional[AlgebraSpec] = None
    alg_b: Optional[AlgebraSpec] = None
    entries: list = dc_field(default_factory=list)  # (line, key text, image text)
    fixture: Optional[str] = None
    twist_degree: Optional[int] = None
    degree: Optional[int] = None
    policy: Optional[str] = None
    split: Optional[tuple] = None


def _kv(line: str, lineno: int):
    key, sep, value = line.partition(":")
    if not sep:
        raise ParseError(f"expected 'key: value', got {line!r}", lineno, 1)
    return key.strip().lower(), value.strip()


def _names(value: str, lineno: int) -> list:
    names = [n.strip() for n in value.replace(",", " ").split()]
    for n in names:
        if not (n[0].isalpha() or n[0] == "_") or not all(ch.isalnum() or ch in "_'" for ch in n):
            raise ParseError(f"bad generator name {n!r}", lineno, 1)
    return names


def _int(value: str, lineno: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"expected an integer, got {value!r}", lineno, 1) from None


def parse_split(value: str, lineno: int = 0) -> tuple:
    if ";" not in value:
        raise ParseError("split needs the form 'primed names ; double-primed names'", lineno, 1)
    left, _, right = value.partition(";")
    return tuple(_names(left, lineno)), tuple(_names(right, lineno))


def parse_job(text: str) -> JobSpec:
    job = JobSpec()
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError("unterminated section header", lineno, len(raw))
            section = line[1:-1].strip()
            if section not in SECTIONS:
                raise ParseError(f"unknown section [{section}]", lineno, 1)
            if section == "algebra A":
                job.alg_a = AlgebraSpec(line=lineno)
            elif section == "algebra B":
                job.alg_b = AlgebraSpec(line=lineno)
            continue
        if section is None:
            raise ParseError("content before the first section", lineno, 1)
        if section == "field":
            if job.field is not None:
                raise ParseError("field given twice", lineno, 1)
            job.field = line
        elif section in ("algebra A", "algebra B"):
            spec = job.alg_a if section == "algebra A" else job.alg_b
            key, value = _kv(line, lineno)
            if key == "generators":
                spec.generators.extend(_names(value, lineno))
            elif key == "relations":
                spec.relations.extend(r.strip() for r in value.split(";") if r.strip())
            else:
                raise ParseError(f"unknown key {key!r}", lineno, 1)
        elif section == "twist":
            if "->" in line:
                key, _, image = line.partition("->")
                job.entries.append((lineno, key.strip(), image.strip()))
                continue
            key, value = _kv(line, lineno)
            if key == "fixture":
                job.fixture = value
            elif key == "degree":
                job.twist_degree = _int(value, lineno)
            else:
                raise ParseError(f"unknown key {key!r}", lineno, 1)
        else:
            key, value = _kv(line, lineno)
            if key == "degree":
                job.degree = _int(value, lineno)
            elif key == "policy":
                if value not in POLICY_ALIASES:
                    raise ParseError(f"unknown policy {value!r}", lineno, 1)
                job.policy = POLICY_ALIASES[value]
            elif key == "split":
                job.split = parse_split(value, lineno)
            else:
                raise ParseError(f"unknown key {key!r}", lineno, 1)
    if job.fixture and job.entries:
        raise ParseError("[twist] holds either a fixture or entry lines, not both", job.entries[0][0], 1)
    return job


def parse_table(entries, alg_a: TruncatedAlgebra, alg_b: TruncatedAlgebra, bound: Optional[int] = None) -> TwistingMapTable:
    """Build a table from ``(line, key, image)`` triples; the bound defaults to the top key degree."""
    an = alg_a.presentation.generators.index()
    bn = alg_b.presentation.generators.index()
    F = alg_a.field
    images = {}
    top = 2
    for lineno, key_text, image_text in entries:
        b, a = parse_tensor_key(key_text, bn, an, lineno)
        if not b or not a:
            raise ParseError("entries must have positive degree on both sides", lineno, 1)
        if not (alg_b.is_normal(b) and alg_a.is_normal(a)):
            raise ParseError(f"{key_text} is not a pair of normal words", lineno, 1)
        if (b, a) in images:
            raise ParseError(f"entry {key_text} given twice", lineno, 1)
        terms = parse_tensor(image_text, an, bn, lineno)
        img: dict = {}
        for (a2, b2), c in terms.items():
            if len(a2) + len(b2) != len(a) + len(b):
                raise ParseError(f"image of {key_text} has a term of the wrong degree", lineno, 1)
            na = alg_a.normal_form(a2)
            nb = alg_b.normal_form(b2)
            for u, c2 in na.items():
                for v, c3 in nb.items():
                    val = F.norm(img.get((u, v), F.zero) + F(c) * c2 * c3)
                    if val:
                        img[(u, v)] = val
                    else:
                        img.pop((u, v), None)
        images[(b, a)] = img
        top = max(top, len(a) + len(b))
    try:
        return TwistingMapTable(alg_a, alg_b, top if bound is None else bound, images)
    except StructuralError as exc:
        raise ParseError(str(exc), entries[0][0] if entries else 0, 1) from exc


def format_table(tw: TwistingMapTable) -> str:
    return "\n".join(tw.lines()) + "\n"


def format_job(tw: TwistingMapTable) -> str:
    """A complete job file reproducing ``tw``."""
    def alg_lines(label, alg):
        out = [f"[algebra {label}]", "generators: " + ", ".join(alg.presentation.names)]
        rels = alg.presentation.relation_strings()
        if rels:
            out.append("relations: " + " ; ".join(rels))
        return out

    lines = ["[field]", str(tw.field)]
    lines += alg_lines("A", tw.alg_a) + alg_lines("B", tw.alg_b)
    lines += ["[twist]", f"degree: {tw.bound}"] + tw.lines()
    return "\n".join(lines) + "\n"
