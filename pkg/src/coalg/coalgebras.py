"""State systems over the container grammar.

A coalgebra pairs a carrier of named states with a transition structure
assigning each state a container value.  Finite systems are tables and
get validated eagerly; lazy systems expose only a structure rule and are
meant for infinite carriers, so any global analysis on them must be
budget-guarded by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional

from .containers import (
    Container,
    FinPow,
    HStructure,
    Identity,
    StateRef,
    container_from_json,
    container_to_json,
    hmap,
    identity_values,
    interpret,
    set_of,
    structure_from_json,
    structure_to_json,
    support,
    validate,
)
from .errors import (
    ContainerMismatchError,
    DanglingRefError,
    InputError,
    NameClashError,
    UnknownStateError,
)


class FiniteCoalgebra:
    """A finite state system: every state has an explicit structure entry."""

    def __init__(self, container: Container, states: Iterable[str], structure: Mapping[str, HStructure]):
        states = tuple(states)
        if len(set(states)) != len(states):
            raise InputError("duplicate state ids in carrier")
        carrier = set(states)
        structure = dict(structure)
        if set(structure) != carrier:
            missing = carrier - set(structure)
            extra = set(structure) - carrier
            raise InputError(
                f"structure must be total on the carrier (missing {sorted(missing)}, extra {sorted(extra)})"
            )
        for x, h in structure.items():
            if not validate(container, h):
                raise InputError(f"structure of state {x!r} is not a value of the container")
            refs = support(container, h)
            if not refs <= carrier:
                raise InputError(
                    f"structure of state {x!r} references unknown states {sorted(refs - carrier)}"
                )
        self.container = container
        self.states = states
        self.structure = structure
        self._succ: Optional[dict[str, frozenset[str]]] = None

    @classmethod
    def _trusted(cls, container, states, structure, succ=None):
        # internal constructor for restrictions whose parts are already validated
        obj = cls.__new__(cls)
        obj.container = container
        obj.states = tuple(states)
        obj.structure = dict(structure)
        obj._succ = succ
        return obj

    def structure_of(self, state: str) -> HStructure:
        try:
            return self.structure[state]
        except KeyError:
            raise UnknownStateError(f"unknown state {state!r}") from None

    @property
    def successor_map(self) -> dict[str, frozenset[str]]:
        if self._succ is None:
            self._succ = {
                x: support(self.container, h) for x, h in self.structure.items()
            }
        return self._succ

    def successors(self, state: str) -> frozenset[str]:
        try:
            return self.successor_map[state]
        except KeyError:
            raise UnknownStateError(f"unknown state {state!r}") from None

    def restrict(self, subset: Iterable[str]) -> "FiniteCoalgebra":
        """Restriction to a successor-closed subset, keeping carrier order."""
        subset = set(subset)
        if not subset <= set(self.states):
            raise UnknownStateError(f"not a subset of the carrier: {sorted(subset - set(self.states))}")
        succ = self.successor_map
        for x in subset:
            if not succ[x] <= subset:
                raise InputError(f"subset is not successor-closed at {x!r}")
        states = tuple(x for x in self.states if x in subset)
        return FiniteCoalgebra._trusted(
            self.container,
            states,
            {x: self.structure[x] for x in states},
            {x: succ[x] for x in states},
        )

    def __eq__(self, other):
        return (
            isinstance(other, FiniteCoalgebra)
            and self.container == other.container
            and self.states == other.states
            and self.structure == other.structure
        )

    def __repr__(self):
        return f"FiniteCoalgebra({len(self.states)} states over {self.container!r})"


class LazyCoalgebra:
    """A state system given by a structure rule, for infinite carriers.

    The rule must be pure and deterministic; ``member`` is an optional,
    advisory membership predicate (traversals follow the rule, not the
    predicate).  Operations over lazy systems take explicit budgets.
    """

    def __init__(
        self,
        container: Container,
        rule: Callable[[str], HStructure],
        member: Optional[Callable[[str], bool]] = None,
        name: Optional[str] = None,
    ):
        self.container = container
        self.rule = rule
        self.member = member
        self.name = name

    def structure_of(self, state: str) -> HStructure:
        h = self.rule(state)
        if not validate(self.container, h):
            raise InputError(
                f"lazy rule produced an invalid structure at state {state!r}"
            )
        return h

    def successors(self, state: str) -> frozenset[str]:
        return support(self.container, self.structure_of(state))

    def __repr__(self):
        tag = self.name or "anonymous"
        return f"LazyCoalgebra({tag!r} over {self.container!r})"


@dataclass(frozen=True)
class BudgetExhausted:
    """Closure search gave up: the closure was not confirmed finite in budget.

    A signal, not a failure; ``visited`` holds the states seen so far.
    """

    visited: frozenset[str]
    budget: int


# ---------------------------------------------------------------------------
# morphisms and subobjects


def verify_coalgebra_morphism(
    h: Mapping[str, str], source: FiniteCoalgebra, target: FiniteCoalgebra
) -> bool:
    """Check the structure-preservation square of a state map, syntactically.

    ``h`` must be total on the source carrier with values in the target
    carrier; the check is that renaming the source structure of every state
    through ``h`` gives exactly the target structure of its image.
    """
    if source.container != target.container:
        raise ContainerMismatchError(
            f"source container {source.container!r} != target container {target.container!r}"
        )
    target_carrier = set(target.states)
    for x in source.states:
        if x not in h:
            raise UnknownStateError(f"morphism undefined on source state {x!r}")
        if h[x] not in target_carrier:
            raise UnknownStateError(f"morphism maps {x!r} outside the target carrier")
    return all(
        hmap(source.container, h, source.structure_of(x)) == target.structure_of(h[x])
        for x in source.states
    )


def canonical_graph(coalg):
    """The graph of a system: each state maps to the set of its successors."""
    graph_container = FinPow(Identity())
    if isinstance(coalg, FiniteCoalgebra):
        return FiniteCoalgebra._trusted(
            graph_container,
            coalg.states,
            {
                x: set_of(StateRef(s) for s in succ)
                for x, succ in coalg.successor_map.items()
            },
            dict(coalg.successor_map),
        )
    return LazyCoalgebra(
        graph_container,
        lambda x: set_of(StateRef(s) for s in coalg.successors(x)),
        member=coalg.member,
        name=coalg.name,
    )


def is_subcoalgebra(subset: Iterable[str], coalg: FiniteCoalgebra) -> bool:
    """True iff the subset is closed under successors."""
    subset = set(subset)
    succ = coalg.successor_map
    return all(succ[x] <= subset for x in subset)


def is_cartesian_subcoalgebra(subset: Iterable[str], coalg: FiniteCoalgebra) -> bool:
    """True iff membership is *equivalent* to all successors being members.

    Both directions of the biconditional are required: every member's
    successors are members (closure), and every state all of whose
    successors are members is itself a member.
    """
    subset = set(subset)
    succ = coalg.successor_map
    return all((x in subset) == (succ[x] <= subset) for x in coalg.states)


def least_subcoalgebra(coalg, seed: Iterable[str], budget: int):
    """Breadth-first successor closure of ``seed``.

    Returns the closure as a frozenset, or :class:`BudgetExhausted` if more
    than ``budget`` states are visited before the closure stabilizes.
    """
    seed = sorted(set(seed))
    if budget < len(seed):
        raise InputError(f"budget {budget} is below the seed size {len(seed)}")
    visited: set[str] = set()
    frontier = list(seed)
    while frontier:
        if len(visited) + len(frontier) > budget:
            taken = budget - len(visited)
            return BudgetExhausted(frozenset(visited | set(frontier[:taken])), budget)
        visited.update(frontier)
        nxt: set[str] = set()
        for x in frontier:
            nxt.update(coalg.successors(x))
        frontier = sorted(nxt - visited)
    return frozenset(visited)


def coproduct_extension(
    coalg: FiniteCoalgebra,
    new_states: Iterable[str],
    p: Mapping[str, HStructure],
) -> FiniteCoalgebra:
    """Add new states that transition only into the old carrier.

    Old states keep their structure verbatim, so the inclusion of the old
    system is a morphism of systems.  New states may not reference each
    other or themselves.
    """
    new_states = tuple(new_states)
    if len(set(new_states)) != len(new_states):
        raise InputError("duplicate new state ids")
    old = set(coalg.states)
    clash = old & set(new_states)
    if clash:
        raise NameClashError(f"new states already in carrier: {sorted(clash)}")
    p = dict(p)
    if set(p) != set(new_states):
        raise InputError("extension map must be total on exactly the new states")
    structure = dict(coalg.structure)
    succ = dict(coalg.successor_map)
    for x in new_states:
        h = p[x]
        if not validate(coalg.container, h):
            raise InputError(f"extension structure of {x!r} is not a value of the container")
        refs = support(coalg.container, h)
        if not refs <= old:
            raise DanglingRefError(
                f"extension structure of {x!r} references non-old states {sorted(refs - old)}"
            )
        structure[x] = h
        succ[x] = refs
    return FiniteCoalgebra._trusted(
        coalg.container, coalg.states + new_states, structure, succ
    )


# ---------------------------------------------------------------------------
# algebras


class Algebra:
    """An evaluation target: a container plus a total, deterministic eval.

    ``eval_fn`` consumes plain shapes as produced by
    :func:`coalg.containers.interpret` (identity slots already replaced by
    carrier values) and returns a carrier value.  Carrier values are opaque;
    equality is Python ``==``.
    """

    def __init__(self, container: Container, eval_fn: Callable, name: Optional[str] = None):
        self.container = container
        self.eval_fn = eval_fn
        self.name = name

    def eval(self, shape):
        return self.eval_fn(shape)

    def __repr__(self):
        return f"Algebra({self.name or 'anonymous'!r} over {self.container!r})"


def induction_algebra(container: Container) -> Algebra:
    """The 0/1 algebra of the induction principle.

    A shape evaluates to 1 exactly when every state value occurring in it
    is 1; in particular the empty set and the collapsed point evaluate
    to 1, and any occurrence of 0 forces 0.
    """

    def ev(shape):
        return 1 if all(v == 1 for v in identity_values(container, shape)) else 0

    return Algebra(container, ev, name="induction")


def count_algebra(container: Container) -> Algebra:
    """Height algebra: 1 + max over state values, with leaves at 0."""

    def ev(shape):
        return 1 + max(identity_values(container, shape), default=-1)

    return Algebra(container, ev, name="count")


def unfold_algebra(container: Container) -> Algebra:
    """The free algebra on shapes: eval is the identity.

    Solving recursion into this algebra yields, per state, its full
    transition unfolding as a nested plain shape.
    """
    return Algebra(container, lambda shape: shape, name="term")


# ---------------------------------------------------------------------------
# JSON files


def coalgebra_to_json(coalg: FiniteCoalgebra) -> dict:
    return {
        "version": 1,
        "kind": "set-coalgebra",
        "functor": container_to_json(coalg.container),
        "states": list(coalg.states),
        "structure": {x: structure_to_json(h) for x, h in coalg.structure.items()},
    }


def coalgebra_from_json(doc) -> FiniteCoalgebra:
    if not isinstance(doc, dict):
        raise InputError("$: expected a JSON object")
    if doc.get("version") != 1:
        raise InputError("$.version: expected 1")
    if doc.get("kind") != "set-coalgebra":
        raise InputError(f"$.kind: expected 'set-coalgebra', got {doc.get('kind')!r}")
    for field in ("functor", "states", "structure"):
        if field not in doc:
            raise InputError(f"$.{field}: missing")
    container = container_from_json(doc["functor"], "$.functor")
    states = doc["states"]
    if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
        raise InputError("$.states: expected a list of state ids")
    if not isinstance(doc["structure"], dict):
        raise InputError("$.structure: expected an object")
    structure = {
        x: structure_from_json(h, f"$.structure.{x}")
        for x, h in doc["structure"].items()
    }
    try:
        return FiniteCoalgebra(container, states, structure)
    except (UnknownStateError, InputError) as exc:
        raise InputError(f"$.structure: {exc}") from None


def evaluate_state_structure(coalg, alg: Algebra, state: str, env: Mapping[str, object]):
    """One step of recursion: evaluate a state's structure under ``env``."""
    return alg.eval(interpret(coalg.container, coalg.structure_of(state), env))
