"""Term algebras for signatures, realization of structures as finite
systems, and desk-scale colimits of system diagrams.

A signature's shape functor is a sum of products (one summand per
operation symbol); its closed terms form the free algebra.  Every functor
structure over closed terms is *realized* by a finite well-founded system
whose distinguished state unfolds back to the corresponding term; this
realization step is what makes the closed-term algebra a fixed point of
the functor, checkable fragment by fragment with
:func:`term_realization_report`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .coalgebras import (
    Algebra,
    FiniteCoalgebra,
    coproduct_extension,
    verify_coalgebra_morphism,
)
from .containers import (
    Const,
    ConstVal,
    Container,
    HStructure,
    Identity,
    InL,
    InR,
    Product,
    StateRef,
    Sum,
    TupleOf,
    hmap,
)
from .errors import InputError
from .wellfounded import is_well_founded, solve_recursion


@dataclass(frozen=True)
class Term:
    """A closed term: an operation symbol applied to subterms."""

    op: str
    args: tuple["Term", ...] = ()

    def __str__(self):
        if not self.args:
            return self.op
        return f"{self.op}({','.join(str(a) for a in self.args)})"

    @property
    def height(self) -> int:
        return 0 if not self.args else 1 + max(a.height for a in self.args)


def parse_term(text: str) -> Term:
    """Parse the compact form ``op(arg,...)`` (no whitespace significance)."""
    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def parse() -> Term:
        nonlocal pos
        skip_ws()
        start = pos
        while pos < len(text) and (text[pos].isalnum() or text[pos] in "_-'"):
            pos += 1
        name = text[start:pos]
        if not name:
            raise InputError(f"expected an operation name at offset {pos} in {text!r}")
        skip_ws()
        args = []
        if pos < len(text) and text[pos] == "(":
            pos += 1
            while True:
                args.append(parse())
                skip_ws()
                if pos >= len(text):
                    raise InputError(f"unclosed '(' in {text!r}")
                if text[pos] == ",":
                    pos += 1
                    continue
                if text[pos] == ")":
                    pos += 1
                    break
                raise InputError(f"expected ',' or ')' at offset {pos} in {text!r}")
        return Term(name, tuple(args))

    term = parse()
    skip_ws()
    if pos != len(text):
        raise InputError(f"trailing input at offset {pos} in {text!r}")
    return term


@dataclass(frozen=True)
class Signature:
    """Operation symbols with arities; symbols must be distinct.

    Without at least one constant the set of closed terms is empty (legal,
    but every enumeration is vacuous).
    """

    ops: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if not self.ops:
            raise InputError("signature needs at least one operation symbol")
        names = [n for n, _ in self.ops]
        if len(set(names)) != len(names):
            raise InputError(f"duplicate operation symbols: {names}")
        for n, a in self.ops:
            if not n:
                raise InputError("empty operation symbol")
            if a < 0:
                raise InputError(f"negative arity for {n!r}")

    def arity(self, op: str) -> int:
        for n, a in self.ops:
            if n == op:
                return a
        raise InputError(f"unknown operation symbol {op!r}")

    def index(self, op: str) -> int:
        for i, (n, _) in enumerate(self.ops):
            if n == op:
                return i
        raise InputError(f"unknown operation symbol {op!r}")


def signature_to_json(sig: Signature) -> dict:
    return {
        "version": 1,
        "kind": "signature",
        "ops": [{"name": n, "arity": a} for n, a in sig.ops],
    }


def signature_from_json(doc) -> Signature:
    if not isinstance(doc, dict):
        raise InputError("$: expected a JSON object")
    if doc.get("version") != 1:
        raise InputError("$.version: expected 1")
    if doc.get("kind") != "signature":
        raise InputError(f"$.kind: expected 'signature', got {doc.get('kind')!r}")
    ops = doc.get("ops")
    if not isinstance(ops, list):
        raise InputError("$.ops: expected a list")
    out = []
    for i, entry in enumerate(ops):
        if (
            not isinstance(entry, dict)
            or not isinstance(entry.get("name"), str)
            or not isinstance(entry.get("arity"), int)
        ):
            raise InputError(f"$.ops[{i}]: expected {{name, arity}}")
        out.append((entry["name"], entry["arity"]))
    return Signature(tuple(out))


def _op_container(name: str, arity: int) -> Container:
    if arity == 0:
        return Const((name,))
    if arity == 1:
        return Identity()
    return Product(tuple(Identity() for _ in range(arity)))


def signature_container(sig: Signature) -> Container:
    """The sum-of-products functor of a signature.

    One summand per symbol: a one-label constant for arity 0, a single
    state slot for arity 1, a product of state slots otherwise.  Summands
    nest to the right in declaration order.
    """
    parts = [_op_container(n, a) for n, a in sig.ops]
    container = parts[-1]
    for part in reversed(parts[:-1]):
        container = Sum(part, container)
    return container


def encode_structure(sig: Signature, op: str, children: Sequence[HStructure]) -> HStructure:
    """Wrap per-symbol payload into the signature functor's sum nesting."""
    i = sig.index(op)
    arity = sig.ops[i][1]
    if len(children) != arity:
        raise InputError(f"{op!r} takes {arity} children, got {len(children)}")
    if arity == 0:
        h: HStructure = ConstVal(op)
    elif arity == 1:
        h = children[0]
    else:
        h = TupleOf(tuple(children))
    if i < len(sig.ops) - 1:
        h = InL(h)
    for _ in range(i):
        h = InR(h)
    return h


def decode_structure(sig: Signature, h: HStructure) -> tuple[str, list[HStructure]]:
    """Inverse of :func:`encode_structure`."""
    k = len(sig.ops)
    i = 0
    while i < k - 1 and isinstance(h, InR):
        h = h.value
        i += 1
    if i < k - 1:
        if not isinstance(h, InL):
            raise InputError(f"structure does not match the signature functor: {h!r}")
        h = h.value
    name, arity = sig.ops[i]
    if arity == 0:
        if not isinstance(h, ConstVal) or h.label != name:
            raise InputError(f"bad constant payload for {name!r}: {h!r}")
        return name, []
    if arity == 1:
        return name, [h]
    if not isinstance(h, TupleOf) or len(h.items) != arity:
        raise InputError(f"bad payload for {name!r}: {h!r}")
    return name, list(h.items)


def term_algebra(sig: Signature) -> Algebra:
    """The free algebra: eval wraps an evaluated shape into a new term.

    Eval is injective (distinct shapes give distinct terms), which is what
    makes closed terms free over the signature.
    """
    k = len(sig.ops)

    def ev(shape) -> Term:
        i = 0
        s = shape
        while (
            i < k - 1
            and isinstance(s, tuple)
            and len(s) == 2
            and s[0] in ("inl", "inr")
        ):
            if s[0] == "inl":
                s = s[1]
                break
            s = s[1]
            i += 1
        name, arity = sig.ops[i]
        if arity == 0:
            args: tuple[Term, ...] = ()
        elif arity == 1:
            args = (s,)
        else:
            args = tuple(s)
        for a in args:
            if not isinstance(a, Term):
                raise InputError(f"term algebra applied to a non-term value: {a!r}")
        return Term(name, args)

    return Algebra(signature_container(sig), ev, name="term")


def validate_term(sig: Signature, term: Term) -> None:
    if sig.arity(term.op) != len(term.args):
        raise InputError(
            f"{term.op!r} takes {sig.arity(term.op)} arguments, got {len(term.args)}"
        )
    for a in term.args:
        validate_term(sig, a)


def unfold_to_term(sig: Signature, coalg: FiniteCoalgebra, state: str) -> Term:
    """Unfold one state of a signature-functor system into a closed term.

    Equals structural recursion into the term algebra; raises
    :class:`coalg.errors.CycleError` if the state reaches a cycle.
    """
    return solve_recursion(coalg, term_algebra(sig), roots=[state])[state]


def subterms(term: Term) -> list[Term]:
    """All distinct subterms, in dependency order (subterms first)."""
    seen: dict[Term, None] = {}

    def walk(t: Term):
        if t in seen:
            return
        for a in t.args:
            walk(a)
        seen[t] = None

    walk(term)
    return list(seen)


def realize_hstructure(
    sig: Signature, op: str, args: Sequence[Term]
) -> tuple[FiniteCoalgebra, str]:
    """Realize a functor structure over closed terms as a finite system.

    Builds the prefix system of the argument terms (one state per distinct
    subterm, named by the term's printed form, with the term's top node as
    structure), then extends it by one fresh state whose structure is the
    given top structure re-pointed at those states.  The result is finite
    and well-founded, and the fresh state unfolds back to ``op(args...)``.
    """
    if sig.arity(op) != len(args):
        raise InputError(f"{op!r} takes {sig.arity(op)} arguments, got {len(args)}")
    for a in args:
        validate_term(sig, a)
    container = signature_container(sig)
    prefix: dict[Term, None] = {}
    for a in args:
        for t in subterms(a):
            prefix[t] = None
    states = sorted((str(t) for t in prefix))
    structure = {
        str(t): encode_structure(sig, t.op, [StateRef(str(u)) for u in t.args])
        for t in prefix
    }
    base = FiniteCoalgebra(container, states, structure)
    new_state = str(Term(op, tuple(args)))
    extension = coproduct_extension(
        base,
        [new_state],
        {new_state: encode_structure(sig, op, [StateRef(str(a)) for a in args])},
    )
    return extension, new_state


def enumerate_terms(sig: Signature, depth: int, limit: int = 200_000) -> list[Term]:
    """All closed terms of height at most ``depth``, sorted by (height, text)."""
    if depth < 0:
        return []
    terms: set[Term] = {Term(n) for n, a in sig.ops if a == 0}
    for _ in range(depth):
        prev = sorted(terms, key=lambda t: (t.height, str(t)))
        for name, arity in sig.ops:
            if arity == 0:
                continue
            for combo in itertools.product(prev, repeat=arity):
                terms.add(Term(name, combo))
                if len(terms) > limit:
                    raise InputError(
                        f"term enumeration exceeded {limit} terms at depth {depth}"
                    )
    return sorted(terms, key=lambda t: (t.height, str(t)))


# ---------------------------------------------------------------------------
# colimits of finite diagrams


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:  # path compression
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int):
        i, j = self.find(i), self.find(j)
        if i == j:
            return
        if self.size[i] < self.size[j]:
            i, j = j, i
        self.parent[j] = i
        self.size[i] += self.size[j]


@dataclass
class DiagramSpec:
    """A finite diagram: systems over one container plus morphisms between
    them, each morphism given as (source index, target index, state map)."""

    coalgebras: list[FiniteCoalgebra]
    morphisms: list[tuple[int, int, dict[str, str]]]


@dataclass
class ColimitResult:
    """Colimit carrier as equivalence classes of (system index, state).

    ``injections[i]`` maps the states of system i to class ids.  The
    induced structure is reported per class; classes whose members induce
    conflicting structures are listed in ``partial_classes`` (this cannot
    happen when every diagram morphism verifies, but it is checked rather
    than assumed).
    """

    class_members: list[tuple[tuple[int, str], ...]]
    class_ids: list[str]
    injections: list[dict[str, str]]
    structure: dict[str, HStructure]
    partial_classes: list[str]
    coalgebra: Optional[FiniteCoalgebra]

    @property
    def total(self) -> bool:
        return not self.partial_classes


def diagram_colimit(diagram: DiagramSpec) -> ColimitResult:
    """Quotient the disjoint union of the diagram's carriers.

    Two tagged states are identified iff they are connected by a zig-zag
    of morphism edges (x, i) ~ (f(x), j); on filtered diagrams this is the
    usual cospan description, and on arbitrary finite diagrams it is the
    coequalizer-style closure.  Injections are the quotient maps, and the
    structure induced on each class is computed from its members.
    """
    if not diagram.coalgebras:
        raise InputError("diagram needs at least one system")
    container = diagram.coalgebras[0].container
    for c in diagram.coalgebras[1:]:
        if c.container != container:
            raise InputError("diagram systems must share one container")
    for i, j, f in diagram.morphisms:
        if not (0 <= i < len(diagram.coalgebras) and 0 <= j < len(diagram.coalgebras)):
            raise InputError(f"morphism endpoints out of range: ({i}, {j})")
        if not verify_coalgebra_morphism(f, diagram.coalgebras[i], diagram.coalgebras[j]):
            raise InputError(
                f"listed map from system {i} to system {j} is not a morphism"
            )
    nodes: list[tuple[int, str]] = []
    index: dict[tuple[int, str], int] = {}
    for i, c in enumerate(diagram.coalgebras):
        for x in c.states:
            index[(i, x)] = len(nodes)
            nodes.append((i, x))
    uf = UnionFind(len(nodes))
    for i, j, f in diagram.morphisms:
        for x in diagram.coalgebras[i].states:
            uf.union(index[(i, x)], index[(j, f[x])])
    groups: dict[int, list[tuple[int, str]]] = {}
    for node, k in index.items():
        groups.setdefault(uf.find(k), []).append(node)
    classes = sorted((tuple(sorted(g)) for g in groups.values()), key=lambda g: g[0])
    class_ids = [f"q{n}" for n in range(len(classes))]
    class_of: dict[tuple[int, str], str] = {}
    for cid, members in zip(class_ids, classes):
        for node in members:
            class_of[node] = cid
    injections = [
        {x: class_of[(i, x)] for x in c.states}
        for i, c in enumerate(diagram.coalgebras)
    ]
    structure: dict[str, HStructure] = {}
    partial: list[str] = []
    for cid, members in zip(class_ids, classes):
        candidates = {
            hmap(container, injections[i], diagram.coalgebras[i].structure_of(x))
            for i, x in members
        }
        if len(candidates) == 1:
            structure[cid] = candidates.pop()
        else:
            partial.append(cid)
    coalgebra = (
        FiniteCoalgebra(container, class_ids, structure) if not partial else None
    )
    return ColimitResult(classes, class_ids, injections, structure, partial, coalgebra)


# ---------------------------------------------------------------------------
# fragment check of the closed-term fixed point


@dataclass
class RealizationReport:
    """Counts from one realize-and-unfold sweep over a term fragment.

    * every closed term of height <= depth is realized and unfolds back to
      itself (the structure map reaches every term);
    * distinct structures over lower terms evaluate to distinct terms (the
      structure map is injective on the fragment).
    """

    signature: Signature
    depth: int
    term_count: int
    realized_ok: int
    structure_count: int
    distinct_terms: int
    mismatches: list[str]

    @property
    def injective(self) -> bool:
        return self.structure_count == self.distinct_terms

    @property
    def passed(self) -> bool:
        return self.injective and self.realized_ok == self.term_count and not self.mismatches

    def to_json(self) -> dict:
        return {
            "ops": [{"name": n, "arity": a} for n, a in self.signature.ops],
            "depth": self.depth,
            "terms": self.term_count,
            "realized": self.realized_ok,
            "structures": self.structure_count,
            "distinctTerms": self.distinct_terms,
            "injective": self.injective,
            "passed": self.passed,
            "counterexamples": self.mismatches,
        }


def term_realization_report(sig: Signature, depth: int) -> RealizationReport:
    """Check the closed-term fragment of height <= depth, both directions."""
    terms = enumerate_terms(sig, depth)
    mismatches: list[str] = []
    realized_ok = 0
    for t in terms:
        system, state = realize_hstructure(sig, t.op, t.args)
        if not is_well_founded(system):
            mismatches.append(f"realization of {t} is not well-founded")
            continue
        back = unfold_to_term(sig, system, state)
        if back == t:
            realized_ok += 1
        else:
            mismatches.append(f"{t} unfolded to {back}")
    lower = enumerate_terms(sig, depth - 1)
    evaluated: set[Term] = set()
    structure_count = 0
    for name, arity in sig.ops:
        for combo in itertools.product(lower, repeat=arity):
            structure_count += 1
            evaluated.add(Term(name, combo))
    return RealizationReport(
        sig,
        depth,
        len(terms),
        realized_ok,
        structure_count,
        len(evaluated),
        mismatches,
    )
