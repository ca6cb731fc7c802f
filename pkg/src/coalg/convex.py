"""Transition systems whose branching is convex, over exact rationals.

The carrier is the free convex set on n generators: points are rational
coefficient vectors that are nonnegative and sum to one.  A spec assigns
each generator a successor polytope (vertex representation, possibly
empty); successors of an arbitrary point are obtained by mixing the
per-generator polytopes with the point's coefficients, so the successor
map is affine in the point.

Well-foundedness (no infinite point paths) reduces to a finite alternating
fixpoint on generators:

    WF(g)  iff  every vertex of g's successor polytope has some
                WF generator in its support,

because a path from a mixed point projects to a path from some support
generator, and paths from component generators combine into a path from
the mix.  Non-WF verdicts are backed by constructive path witnesses whose
steps carry exact mixing certificates; WF verdicts are backed by a strict
rank-descent bound along sampled paths.  No floating point, no linear
programming: membership claims are always certified by explicit
combinations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .errors import InputError

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class CPoint:
    """A convex combination of the generators: nonnegative, sums to one."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.coeffs):
            raise InputError(f"negative coefficient in {self.coeffs}")
        if sum(self.coeffs) != 1:
            raise InputError(f"coefficients must sum to 1: {self.coeffs}")

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(i for i, c in enumerate(self.coeffs) if c > 0)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coeffs) + ")"


def point(values: Sequence) -> CPoint:
    return CPoint(tuple(Fraction(v) for v in values))


def unit(i: int, n: int) -> CPoint:
    if not 0 <= i < n:
        raise InputError(f"generator index {i} out of range for dimension {n}")
    return CPoint(tuple(ONE if j == i else ZERO for j in range(n)))


class CPolytope:
    """A finitely generated convex set, as a sorted duplicate-free vertex list.

    The list is a generator representation: affinely redundant generators
    are kept, since membership is certified by exhibiting combinations, not
    by minimizing the representation.  May be empty.
    """

    def __init__(self, points: Iterable[CPoint] = ()):
        vertices = sorted({p for p in points}, key=lambda p: p.coeffs)
        dims = {p.dim for p in vertices}
        if len(dims) > 1:
            raise InputError(f"mixed dimensions in polytope: {sorted(dims)}")
        self.vertices: tuple[CPoint, ...] = tuple(vertices)

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def __eq__(self, other):
        return isinstance(other, CPolytope) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"CPolytope({len(self.vertices)} vertices)"


def mix(x: CPoint, y: CPoint, r) -> CPoint:
    """The convex combination r*x + (1-r)*y, exactly."""
    r = Fraction(r)
    if not 0 <= r <= 1:
        raise InputError(f"mixing ratio {r} outside [0, 1]")
    if x.dim != y.dim:
        raise InputError("mixing points of different dimension")
    return CPoint(tuple(r * a + (1 - r) * b for a, b in zip(x.coeffs, y.coeffs)))


def mix_sets(s: CPolytope, t: CPolytope, r) -> CPolytope:
    """Pointwise mix of two polytopes.

    For interior ratios the vertex list is all pairwise vertex mixes (mixing
    is affine in each argument, so these generate the set); at the boundary
    ratios the operands are returned verbatim, which in particular makes the
    empty polytope a neutral operand there: S +_1 (empty) = S.
    """
    r = Fraction(r)
    if not 0 <= r <= 1:
        raise InputError(f"mixing ratio {r} outside [0, 1]")
    if r == 1:
        return s
    if r == 0:
        return t
    return CPolytope(mix(u, v, r) for u in s for v in t)


class ConvexSpec:
    """Per-generator successor polytopes over a shared basis."""

    def __init__(self, successor_polytopes: Sequence[CPolytope]):
        self.polytopes = tuple(successor_polytopes)
        n = len(self.polytopes)
        if n == 0:
            raise InputError("spec needs at least one generator")
        for i, poly in enumerate(self.polytopes):
            for v in poly:
                if v.dim != n:
                    raise InputError(
                        f"vertex of generator {i} has dimension {v.dim}, expected {n}"
                    )
        self.generators = n

    def __repr__(self):
        return f"ConvexSpec({self.generators} generators)"


def successors(spec: ConvexSpec, p: CPoint) -> CPolytope:
    """The successor polytope of an arbitrary point.

    Affine extension of the per-generator assignment: the vertices are all
    support-weighted combinations of one vertex per positive-support
    generator; empty as soon as any positive-support generator has an empty
    successor polytope.
    """
    if p.dim != spec.generators:
        raise InputError(f"point dimension {p.dim} != spec dimension {spec.generators}")
    supp = sorted(p.support)
    if any(spec.polytopes[i].is_empty for i in supp):
        return CPolytope()
    out = []
    choices = [spec.polytopes[i].vertices for i in supp]
    for combo in _product(choices):
        coeffs = [ZERO] * spec.generators
        for i, v in zip(supp, combo):
            w = p.coeffs[i]
            for j, c in enumerate(v.coeffs):
                if c:
                    coeffs[j] += w * c
        out.append(CPoint(tuple(coeffs)))
    return CPolytope(out)


def _product(choice_lists):
    if not choice_lists:
        yield ()
        return
    head, *rest = choice_lists
    for x in head:
        for tail in _product(rest):
            yield (x,) + tail


# ---------------------------------------------------------------------------
# membership certificates


@dataclass(frozen=True)
class SuccessorCertificate:
    """Witness that a point lies in successors(spec, p).

    For each positive-support generator i of p, ``components[i]`` gives
    convex coefficients over the vertices of generator i's successor
    polytope; the certified point is sum_i p_i * (combination_i).
    """

    components: tuple[tuple[int, tuple[Fraction, ...]], ...]

    def combine(self, spec: ConvexSpec, p: CPoint) -> CPoint:
        coeffs = [ZERO] * spec.generators
        for i, weights in self.components:
            poly = spec.polytopes[i]
            if len(weights) != len(poly.vertices):
                raise InputError(f"certificate arity mismatch at generator {i}")
            if any(w < 0 for w in weights) or sum(weights) != 1:
                raise InputError(f"certificate weights at generator {i} not convex")
            for w, v in zip(weights, poly.vertices):
                if w:
                    for j, c in enumerate(v.coeffs):
                        if c:
                            coeffs[j] += p.coeffs[i] * w * c
        return CPoint(tuple(coeffs))


def certify_membership(
    spec: ConvexSpec, p: CPoint, cert: SuccessorCertificate, z: CPoint
) -> bool:
    """Exact arithmetic re-check: the certificate covers all of p's support
    and combines to exactly z."""
    covered = {i for i, _ in cert.components}
    if covered != set(p.support):
        return False
    return cert.combine(spec, p) == z


def vertex_choice_certificate(
    spec: ConvexSpec, p: CPoint, choice: Mapping[int, int]
) -> SuccessorCertificate:
    """Certificate picking one vertex (by index) per support generator."""
    components = []
    for i in sorted(p.support):
        poly = spec.polytopes[i]
        k = choice[i]
        weights = tuple(ONE if m == k else ZERO for m in range(len(poly.vertices)))
        components.append((i, weights))
    return SuccessorCertificate(tuple(components))


# ---------------------------------------------------------------------------
# well-foundedness fixpoint


@dataclass(frozen=True)
class ConvexWfReport:
    """Per-generator verdicts of the alternating fixpoint.

    ``rank`` gives the fixpoint round at which a WF generator entered;
    generators with no rank admit infinite paths.  The whole system is
    well-founded iff every generator is WF, and then the full carrier is
    itself the finitely generated subsystem containing every node.
    """

    wf_generators: tuple[bool, ...]
    rank: dict[int, int]

    @property
    def is_well_founded(self) -> bool:
        return all(self.wf_generators)

    @property
    def non_wf(self) -> frozenset[int]:
        return frozenset(i for i, ok in enumerate(self.wf_generators) if not ok)

    def to_json(self) -> dict:
        return {
            "wellFounded": self.is_well_founded,
            "wfGenerators": list(self.wf_generators),
            "ranks": {str(i): r for i, r in sorted(self.rank.items())},
        }


def convex_wf_fixpoint(spec: ConvexSpec) -> ConvexWfReport:
    """Least fixpoint from below: WF(g) iff every successor vertex of g has
    a WF generator in its support.

    The two inference directions behind the rule: a path from a point
    projects to a path from any chosen support component, and paths from
    all support components of a vertex combine into a path from it.
    Generators with an empty successor polytope enter at rank 1.
    """
    n = spec.generators
    wf: dict[int, int] = {}
    round_no = 0
    changed = True
    while changed:
        changed = False
        round_no += 1
        entering = []
        for g in range(n):
            if g in wf:
                continue
            if all(any(k in wf for k in v.support) for v in spec.polytopes[g]):
                entering.append(g)
        for g in entering:
            wf[g] = round_no
            changed = True
    return ConvexWfReport(tuple(g in wf for g in range(n)), wf)


def non_wf_greatest_fixpoint(spec: ConvexSpec) -> frozenset[int]:
    """Greatest fixpoint from above: B(g) iff some successor vertex of g has
    support entirely inside B.  Dual of :func:`convex_wf_fixpoint`; the two
    complement each other exactly."""
    bad = set(range(spec.generators))
    changed = True
    while changed:
        changed = False
        for g in sorted(bad):
            if not any(v.support <= bad for v in spec.polytopes[g]):
                bad.discard(g)
                changed = True
    return frozenset(bad)


# ---------------------------------------------------------------------------
# path witnesses


@dataclass(frozen=True)
class WitnessStep:
    point: CPoint
    certificate: SuccessorCertificate


@dataclass(frozen=True)
class WitnessPath:
    """A verified path start -> steps[0].point -> steps[1].point -> ...

    Every step's certificate re-verifies against its predecessor, so the
    path is a genuine run of the system."""

    spec: ConvexSpec
    start: CPoint
    steps: tuple[WitnessStep, ...]

    def verify(self) -> bool:
        current = self.start
        for step in self.steps:
            if not certify_membership(self.spec, current, step.certificate, step.point):
                return False
            current = step.point
        return True

    def to_json(self) -> dict:
        return {
            "start": [str(c) for c in self.start.coeffs],
            "steps": [
                {
                    "point": [str(c) for c in s.point.coeffs],
                    "certificate": [
                        {"generator": i, "weights": [str(w) for w in ws]}
                        for i, ws in s.certificate.components
                    ],
                }
                for s in self.steps
            ],
        }


def convex_path_witness(spec: ConvexSpec, g: int, length: int) -> Optional[WitnessPath]:
    """A verified ``length``-step path from generator g, or None if g is WF.

    Construction: at each point, pick for every support generator the first
    successor vertex whose support consists of non-WF generators only (one
    exists, by the fixpoint rule), and mix the picks with the point's
    coefficients.  Every step is certified and re-checked exactly.
    """
    report = convex_wf_fixpoint(spec)
    if report.wf_generators[g]:
        return None
    bad = report.non_wf
    current = unit(g, spec.generators)
    steps = []
    for _ in range(length):
        choice: dict[int, int] = {}
        for i in sorted(current.support):
            poly = spec.polytopes[i]
            for k, v in enumerate(poly.vertices):
                if v.support <= bad:
                    choice[i] = k
                    break
            else:  # cannot happen for non-WF generators
                raise InputError(f"generator {i} has no all-non-WF successor vertex")
        cert = vertex_choice_certificate(spec, current, choice)
        nxt = cert.combine(spec, current)
        if not certify_membership(spec, current, cert, nxt):
            raise InputError("witness step failed its own certificate")
        if not nxt.support <= bad:
            raise InputError("witness step left the non-WF region")
        steps.append(WitnessStep(nxt, cert))
        current = nxt
    return WitnessPath(spec, unit(g, spec.generators), tuple(steps))


def sample_support_path(spec: ConvexSpec, g: int, rng, max_steps: int) -> list[frozenset[int]]:
    """Support evolution of a random successor path from generator g.

    At each step one successor vertex is drawn per support generator; the
    next point's support is exactly the union of the drawn vertices'
    supports (all coefficients are nonnegative, so nothing cancels).  Stops
    at a deadlock (some support generator has an empty polytope) or after
    ``max_steps``.
    """
    supports = [frozenset([g])]
    current = frozenset([g])
    for _ in range(max_steps):
        if any(spec.polytopes[i].is_empty for i in current):
            break
        nxt: set[int] = set()
        for i in sorted(current):
            v = rng.choice(spec.polytopes[i].vertices)
            nxt |= v.support
        current = frozenset(nxt)
        supports.append(current)
    return supports


# ---------------------------------------------------------------------------
# JSON


def convex_to_json(spec: ConvexSpec) -> dict:
    return {
        "version": 1,
        "kind": "convex",
        "generators": spec.generators,
        "successors": [
            [[str(c) for c in v.coeffs] for v in poly] for poly in spec.polytopes
        ],
    }


def convex_from_json(doc) -> ConvexSpec:
    if not isinstance(doc, dict):
        raise InputError("$: expected a JSON object")
    if doc.get("version") != 1:
        raise InputError("$.version: expected 1")
    if doc.get("kind") != "convex":
        raise InputError(f"$.kind: expected 'convex', got {doc.get('kind')!r}")
    n = doc.get("generators")
    succ = doc.get("successors")
    if not isinstance(n, int) or n < 1:
        raise InputError("$.generators: expected a positive integer")
    if not isinstance(succ, list) or len(succ) != n:
        raise InputError(f"$.successors: expected a list of {n} polytopes")
    polys = []
    for i, poly_doc in enumerate(succ):
        if not isinstance(poly_doc, list):
            raise InputError(f"$.successors[{i}]: expected a list of vertices")
        points = []
        for j, vec in enumerate(poly_doc):
            where = f"$.successors[{i}][{j}]"
            if not isinstance(vec, list) or len(vec) != n:
                raise InputError(f"{where}: expected {n} rational strings")
            try:
                coeffs = tuple(Fraction(str(c)) for c in vec)
            except (ValueError, ZeroDivisionError):
                raise InputError(f"{where}: bad rational") from None
            try:
                points.append(CPoint(coeffs))
            except InputError as exc:
                raise InputError(f"{where}: {exc}") from None
        polys.append(CPolytope(points))
    return ConvexSpec(polys)
