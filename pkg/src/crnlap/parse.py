"""Reading reaction networks from ``.crn`` text or JSON.

``.crn`` format, one item per line::

    # comment
    X1 -> 2 X1 ; k=1
    A + B <-> C ; k=2, 0.5       # forward and reverse rate
    0 -> A ; k=1                  # 0 is the empty complex

Two optional directives pin the ordering of species and complexes (otherwise
both follow first appearance)::

    @species X1 X2 X3
    @complexes X2 | X2 + 2 X3 | 0

JSON documents carry ``species``, ``S`` (one list per complex, i.e. column
major) and ``edges`` as ``[tail, head, k]`` with 0-based complex indices,
plus optional ``complexes`` labels.  Real-valued ``S`` is allowed there, and
``"distinct_complexes": false`` admits repeated columns.
"""

from __future__ import annotations

import json
import re
import warnings
from pathlib import Path

import numpy as np

from .graph import DiGraph, Edge, GraphError
from .model import CrnSystem, ValidationError


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


class DuplicateReactionWarning(UserWarning):
    pass


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<rev><->)
  | (?P<arrow>->)
  | (?P<semi>;)
  | (?P<comma>,)
  | (?P<plus>\+)
  | (?P<rate>k\s*=)
  | (?P<number>[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<bar>\|)
    """,
    re.VERBOSE,
)


def _tokenize(text: str, lineno: int, offset: int = 0):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", lineno, offset + pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), offset + pos + 1))
        pos = m.end()
    tokens.append(("eol", "", offset + len(text) + 1))
    return tokens


class _LineParser:
    def __init__(self, tokens, lineno):
        self.toks = tokens
        self.i = 0
        self.lineno = lineno

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, what=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            found = tok[1] or "end of line"
            raise ParseError(f"expected {what or kind}, found {found!r}", self.lineno, tok[2])
        self.i += 1
        return tok

    def complex(self) -> dict[str, int]:
        tok = self.peek()
        if tok[0] == "number" and tok[1] == "0" and self.toks[self.i + 1][0] != "ident":
            self.take()
            return {}
        counts: dict[str, int] = {}
        while True:
            coef = 1
            tok = self.peek()
            if tok[0] == "number":
                if not re.fullmatch(r"\d+", tok[1]):
                    raise ParseError(
                        f"unknown coefficient format {tok[1]!r}: coefficients must be nonnegative integers",
                        self.lineno,
                        tok[2],
                    )
                coef = int(tok[1])
                self.take()
            name = self.take("ident", "species name")[1]
            if coef:
                counts[name] = counts.get(name, 0) + coef
            if self.peek()[0] != "plus":
                break
            self.take()
        if not counts:
            # "0 A" style terms collapse to the empty complex
            return {}
        return counts

    def rate(self) -> float:
        tok = self.take("number", "rate constant")
        k = float(tok[1])
        if not (np.isfinite(k) and k > 0):
            raise ParseError(f"rate constant must be strictly positive, got {tok[1]}", self.lineno, tok[2])
        return k


def _key(counts: dict[str, int]) -> tuple:
    return tuple(sorted(counts.items()))


def parse(text: str) -> CrnSystem:
    """Parse ``.crn`` text into a :class:`CrnSystem`."""
    species: list[str] = []
    complexes: list[dict[str, int]] = []
    complex_index: dict[tuple, int] = {}
    edges: list[tuple[int, int, float, int]] = []
    declared_species = None

    def add_species(names, lineno):
        for name in names:
            if name not in species:
                if declared_species is not None:
                    raise ParseError(f"species {name!r} not listed in @species", lineno)
                species.append(name)

    def vertex(counts, lineno):
        key = _key(counts)
        if key not in complex_index:
            add_species(counts, lineno)
            complex_index[key] = len(complexes)
            complexes.append(counts)
        return complex_index[key]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        stripped = line.lstrip()
        indent = len(line) - len(stripped)
        if stripped.startswith("@"):
            word, _, rest = stripped.partition(" ")
            rest_offset = indent + len(word) + 1
            if word == "@species":
                if species:
                    raise ParseError("@species must precede all reactions", lineno, indent + 1)
                names = rest.split()
                for n_ in names:
                    if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", n_):
                        raise ParseError(f"invalid species name {n_!r}", lineno, rest_offset + rest.find(n_) + 1)
                if len(set(names)) != len(names):
                    raise ParseError("duplicate name in @species", lineno, indent + 1)
                species.extend(names)
                declared_species = list(names)
            elif word == "@complexes":
                if edges:
                    raise ParseError("@complexes must precede all reactions", lineno, indent + 1)
                col = rest_offset
                for chunk in rest.split("|"):
                    p = _LineParser(_tokenize(chunk, lineno, col), lineno)
                    counts = p.complex()
                    p.take("eol", "'|' or end of line")
                    if _key(counts) in complex_index:
                        raise ParseError("complex listed twice in @complexes", lineno, col + 1)
                    vertex(counts, lineno)
                    col += len(chunk) + 1
            else:
                raise ParseError(f"unknown directive {word!r}", lineno, indent + 1)
            continue

        p = _LineParser(_tokenize(line, lineno), lineno)
        lhs = p.complex()
        tok = p.peek()
        if tok[0] not in ("arrow", "rev"):
            raise ParseError(f"expected '->' or '<->', found {tok[1] or 'end of line'!r}", lineno, tok[2])
        reversible = p.take()[0] == "rev"
        rhs = p.complex()
        p.take("semi", "';'")
        p.take("rate", "'k='")
        k_fwd = p.rate()
        k_rev = None
        if reversible:
            p.take("comma", "',' and a reverse rate constant")
            k_rev = p.rate()
        p.take("eol", "end of line")
        a, b = vertex(lhs, lineno), vertex(rhs, lineno)
        if a == b:
            raise ParseError("reactant and product complexes are identical", lineno, 1)
        edges.append((a, b, k_fwd, lineno))
        if reversible:
            edges.append((b, a, k_rev, lineno))

    if not edges and not complexes:
        raise ParseError("no reactions found")
    seen: dict[tuple[int, int], int] = {}
    for a, b, _, lineno in edges:
        if (a, b) in seen:
            warnings.warn(
                f"line {lineno}: reaction repeats line {seen[(a, b)]}; kept as a parallel edge",
                DuplicateReactionWarning,
                stacklevel=2,
            )
        else:
            seen[(a, b)] = lineno

    S = np.zeros((len(species), len(complexes)))
    for i, counts in enumerate(complexes):
        for name, coef in counts.items():
            S[species.index(name), i] = coef
    graph = DiGraph(len(complexes), tuple(Edge(a, b, k) for a, b, k, _ in edges))
    try:
        return CrnSystem(tuple(species), S, graph)
    except ValidationError as exc:
        raise ParseError(str(exc)) from exc


def from_dict(doc: dict) -> CrnSystem:
    try:
        species = [str(s) for s in doc["species"]]
        columns = doc["S"]
        S = np.array(columns, dtype=float).T.reshape(len(species), len(columns))
        edges = [Edge(int(t), int(h), float(k)) for t, h, k in doc["edges"]]
        graph = DiGraph(len(columns), tuple(edges))
        return CrnSystem(
            tuple(species),
            S,
            graph,
            tuple(doc.get("complexes", ())),
            bool(doc.get("distinct_complexes", True)),
        )
    except (KeyError, TypeError, ValueError, GraphError) as exc:
        if isinstance(exc, ValidationError):
            raise ParseError(str(exc)) from exc
        raise ParseError(f"invalid network document: {exc}") from exc


def to_dict(sys: CrnSystem) -> dict:
    S = sys.stoich
    as_num = (lambda a: int(a)) if np.all(S == np.round(S)) else float
    doc = {
        "species": list(sys.species_names),
        "complexes": list(sys.complex_labels),
        "S": [[as_num(a) for a in S[:, i]] for i in range(S.shape[1])],
        "edges": [[e.tail, e.head, e.weight] for e in sys.graph.edges],
    }
    if not sys.distinct_complexes:
        doc["distinct_complexes"] = False
    return doc


def parse_json(text: str) -> CrnSystem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    return from_dict(doc)


def load(path) -> CrnSystem:
    """Load a network from a ``.crn`` or ``.json`` file."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        return parse_json(text)
    return parse(text)
