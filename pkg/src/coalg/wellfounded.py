"""Well-foundedness analysis, closure extraction, and recursion solving.

The central computation is the least fixpoint of

    S  |->  { x | all successors of x lie in S }

on a finite system: its value (the *well-founded part*) is exactly the set
of states with no infinite outgoing transition path, and the system is
well-founded iff the fixpoint covers the whole carrier.  Every state of a
well-founded system lies in a finite successor-closed, well-founded
subsystem; ``koenig_extract`` computes that subsystem, budget-guarded so it
can also probe lazy systems with infinite carriers.

Recursion solving assigns each state a value in an algebra, satisfying

    h(x) = eval( structure of x, with successors replaced by their values )

which has a unique solution on well-founded systems.  The converse fails:
``integer_ladder`` is a system where the solver's structural recursion
cannot bottom out at any state, yet every algebra admits a (constant)
solution, exhibited by ``integer_ladder_recursion``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .coalgebras import (
    Algebra,
    BudgetExhausted,
    FiniteCoalgebra,
    LazyCoalgebra,
    least_subcoalgebra,
)
from .containers import (
    STAR,
    PairNeq,
    StateRef,
    interpret,
    make_pair,
    support,
    validate,
)
from .errors import (
    ContainerMismatchError,
    CycleError,
    DanglingRefError,
    FoundInfinitePathEvidence,
    InputError,
    NameClashError,
    NotWellFoundedError,
    VerificationFailedError,
    ZeroStateError,
)


@dataclass(frozen=True)
class WfReport:
    """Result of the well-founded-part fixpoint.

    ``rank`` maps each state of the well-founded part to the iteration
    round at which it entered the fixpoint (deadlocks have rank 1, and in
    general rank is 1 + the maximum rank of the successors).
    """

    wf_part: frozenset[str]
    is_well_founded: bool
    rank: dict[str, int]

    def to_json(self) -> dict:
        return {
            "wellFounded": self.is_well_founded,
            "wfPart": sorted(self.wf_part),
            "ranks": dict(sorted(self.rank.items())),
        }


def well_founded_part(coalg: FiniteCoalgebra) -> WfReport:
    """Least fixpoint of "all my successors are already in".

    Computed by peeling: a state is resolvable once all its successors are
    resolved, and its rank is one more than their maximum rank.  The
    complement of the result is exactly the set of states lying on an
    infinite outgoing path.
    """
    succ = coalg.successor_map
    preds: dict[str, list[str]] = {x: [] for x in coalg.states}
    pending: dict[str, int] = {}
    rank: dict[str, int] = {}
    queue = []
    for x in coalg.states:
        pending[x] = len(succ[x])
        for s in succ[x]:
            preds[s].append(x)
        if pending[x] == 0:
            rank[x] = 1
            queue.append(x)
    while queue:
        y = queue.pop()
        for x in preds[y]:
            pending[x] -= 1
            if pending[x] == 0 and x not in rank:
                rank[x] = 1 + max(rank[s] for s in succ[x])
                queue.append(x)
    wf = frozenset(rank)
    return WfReport(wf, len(wf) == len(coalg.states), rank)


def is_well_founded(coalg: FiniteCoalgebra) -> bool:
    return well_founded_part(coalg).is_well_founded


@dataclass
class KoenigFamily:
    """The finite well-founded subsystems covering a well-founded system.

    ``members`` are the successor closures of the single states, ordered by
    size; the family is directed: the union of any two members is again a
    successor-closed, well-founded subset (take ``join``).
    """

    carrier: frozenset[str]
    members: tuple[frozenset[str], ...]

    def join(self, a: frozenset[str], b: frozenset[str]) -> frozenset[str]:
        return a | b

    @property
    def union(self) -> frozenset[str]:
        out: set[str] = set()
        for m in self.members:
            out |= m
        return frozenset(out)


def koenig_family(coalg: FiniteCoalgebra, require_wf: bool = True) -> KoenigFamily:
    """Per-state successor closures of a (well-founded) finite system.

    With ``require_wf`` (the default) the input must be well-founded, which
    guarantees that every member and every finite union of members is a
    well-founded subsystem covering the carrier.
    """
    if require_wf and not is_well_founded(coalg):
        raise NotWellFoundedError("system is not well-founded")
    succ = coalg.successor_map
    seen: dict[frozenset[str], None] = {}
    for x in coalg.states:
        closure: set[str] = set()
        frontier = [x]
        while frontier:
            closure.update(frontier)
            nxt: set[str] = set()
            for y in frontier:
                nxt.update(succ[y])
            frontier = list(nxt - closure)
        seen[frozenset(closure)] = None
    members = tuple(sorted(seen, key=lambda m: (len(m), sorted(m))))
    return KoenigFamily(frozenset(coalg.states), members)


def koenig_extract(coalg, state: str, budget: int):
    """Finite well-founded subsystem around one state, within a budget.

    Delegates to the successor closure; on success the finite restriction
    is re-checked for well-foundedness before being returned.  Outcomes:

    * the closure as a frozenset (successor-closed and well-founded);
    * :class:`BudgetExhausted` if the closure was not confirmed finite;
    * :class:`FoundInfinitePathEvidence` (raised) if the restriction has a
      cycle reachable from ``state``, proving the input not well-founded.
    """
    closure = least_subcoalgebra(coalg, [state], budget)
    if isinstance(closure, BudgetExhausted):
        return closure
    if isinstance(coalg, FiniteCoalgebra):
        restriction = coalg.restrict(closure)
    else:
        restriction = FiniteCoalgebra(
            coalg.container,
            sorted(closure),
            {x: coalg.structure_of(x) for x in sorted(closure)},
        )
    report = well_founded_part(restriction)
    if not report.is_well_founded:
        raise FoundInfinitePathEvidence(state, report)
    return closure


# ---------------------------------------------------------------------------
# recursion


def solve_recursion(
    coalg: FiniteCoalgebra,
    alg: Algebra,
    roots: Optional[Iterable[str]] = None,
) -> dict[str, object]:
    """Memoized structural recursion h(x) = eval(structure(x)[successors := h]).

    Solves for the given roots (default: the whole carrier) and everything
    they reach.  Raises :class:`CycleError` naming a state on a transition
    cycle if the recursion cannot bottom out; this does *not* prove the
    system has no solution (see :func:`integer_ladder_recursion`).
    """
    if alg.container != coalg.container:
        raise ContainerMismatchError(
            f"algebra container {alg.container!r} != system container {coalg.container!r}"
        )
    if roots is None:
        roots = coalg.states
    values: dict[str, object] = {}
    in_progress: set[str] = set()
    for root in roots:
        if root in values:
            continue
        stack: list[tuple[str, bool]] = [(root, False)]
        while stack:
            x, expanded = stack.pop()
            if expanded:
                values[x] = alg.eval(
                    interpret(coalg.container, coalg.structure_of(x), values)
                )
                in_progress.discard(x)
                continue
            if x in values:
                continue
            if x in in_progress:
                raise CycleError(x)
            in_progress.add(x)
            stack.append((x, True))
            for s in sorted(coalg.successors(x), reverse=True):
                if s not in values:
                    if s in in_progress:
                        raise CycleError(s)
                    stack.append((s, False))
    return values


def verify_solution(coalg: FiniteCoalgebra, alg: Algebra, values: Mapping[str, object]) -> bool:
    """Check the recursion equation at every carrier state."""
    return all(
        values[x]
        == alg.eval(interpret(coalg.container, coalg.structure_of(x), values))
        for x in coalg.states
    )


def extend_recursion_solution(
    values: Mapping[str, object],
    p: Mapping[str, object],
    alg: Algebra,
) -> dict[str, object]:
    """Extend a recursion solution along new states transitioning into old ones.

    Each new state ``x`` receives eval of ``p[x]`` with old states replaced
    by their solved values; old states keep their values.  New state names
    must be fresh and their structures may only reference old states.
    """
    clash = set(p) & set(values)
    if clash:
        raise NameClashError(f"new states already solved: {sorted(clash)}")
    out = dict(values)
    for x in sorted(p):
        h = p[x]
        if not validate(alg.container, h):
            raise InputError(f"extension structure of {x!r} is not a value of the container")
        refs = support(alg.container, h)
        if not refs <= set(values):
            raise DanglingRefError(
                f"extension structure of {x!r} references unsolved states {sorted(refs - set(values))}"
            )
        out[x] = alg.eval(interpret(alg.container, h, values))
    return out


# ---------------------------------------------------------------------------
# the integer ladder: recursive but with no nonempty finite closed subsystem


def _ladder_state(state: str) -> int:
    try:
        k = int(state)
    except ValueError:
        raise InputError(f"integer-ladder states are integers, got {state!r}") from None
    if k == 0:
        raise ZeroStateError("0 is not a state of the integer ladder")
    return k


def integer_ladder(window_radius: Optional[int] = None) -> LazyCoalgebra:
    """The two-rail ladder over the nonzero integers.

    Every state k transitions to the distinct pair (-|k|-1, |k|+1), so each
    step strictly increases |k|: every state lies on an infinite path and
    the only finite successor-closed subset is empty.  ``window_radius``
    only installs an advisory membership predicate |k| <= radius; the
    structure rule is exact and unrestricted.
    """
    if window_radius is not None and window_radius < 1:
        raise InputError("window radius must be positive")

    def rule(state: str):
        k = _ladder_state(state)
        return make_pair(StateRef(str(-abs(k) - 1)), StateRef(str(abs(k) + 1)))

    def member(state: str) -> bool:
        try:
            k = int(state)
        except ValueError:
            return False
        if k == 0:
            return False
        return window_radius is None or abs(k) <= window_radius

    return LazyCoalgebra(PairNeq(), rule, member=member, name="integer-ladder")


def integer_ladder_window(radius: int) -> FiniteCoalgebra:
    """A finite window of the ladder with successors clamped at the rim.

    States are k with 1 <= |k| <= radius; successors -|k|-1 and |k|+1 are
    clamped back to +-radius, so the rim states form a cycle.  The result
    is a valid finite system that is *not* well-founded, standing in for
    the ladder in analyses that need a finite carrier.
    """
    if radius < 1:
        raise InputError("window radius must be positive")

    def clamp(m: int) -> int:
        return m if abs(m) <= radius else (radius if m > 0 else -radius)

    states = [str(k) for k in range(-radius, radius + 1) if k != 0]
    structure = {}
    for s in states:
        k = int(s)
        structure[s] = make_pair(
            StateRef(str(clamp(-abs(k) - 1))), StateRef(str(clamp(abs(k) + 1)))
        )
    return FiniteCoalgebra(PairNeq(), states, structure)


class _ConstantEnv(Mapping):
    """A total environment assigning one fixed value to every state."""

    def __init__(self, value):
        self._value = value

    def __getitem__(self, key):
        return self._value

    def __iter__(self):  # pragma: no cover - only Mapping protocol filler
        return iter(())

    def __len__(self):  # pragma: no cover
        return 0


def integer_ladder_recursion(alg: Algebra, states: Iterable) -> dict[str, object]:
    """The constant recursion solution on the ladder, verified per state.

    Every state is assigned eval(*) (the value of the collapsed point).
    For each listed state k the recursion square is re-checked: since the
    solution is constant, the pair structure of k collapses to * under it,
    so eval must reproduce the same value; a failing check raises
    :class:`VerificationFailedError` and indicates a bug.
    """
    if not isinstance(alg.container, PairNeq):
        raise InputError("the integer ladder needs an algebra over the distinct-pair container")
    star_value = alg.eval(STAR)
    ladder = integer_ladder()
    env = _ConstantEnv(star_value)
    out: dict[str, object] = {}
    for state in states:
        s = str(state)
        h = ladder.structure_of(s)
        lhs = alg.eval(interpret(alg.container, h, env))
        if lhs != star_value:
            raise VerificationFailedError(
                f"recursion square failed at state {s!r}: {lhs!r} != {star_value!r}"
            )
        out[s] = star_value
    return out
