"""Register-style transition systems over an infinite atom alphabet.

States are a control label plus a tuple of pairwise-distinct atoms
(natural numbers).  Transition rules are given per (source label, input
case) where the input either equals a specific register or is fresh;
successor templates assign each target register from a source register,
the input atom, or a fresh placeholder.  Renaming atoms by any finite
permutation maps transitions to transitions, so one label stands for one
orbit of states and the finite *orbit graph* on labels decides
well-foundedness of the whole (infinite) system: an infinite concrete run
exists iff the orbit graph has a cycle reachable from the start label.
Both directions of that reduction are witnessed constructively
(:func:`path_witness` lifts a cycle, :func:`simulate` projects runs).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .errors import InputError, NotWellFoundedError, UnknownLabelError

FRESH_CASE = ("fresh",)

# assignment slots
INPUT_SLOT = ("input",)


def reg(i: int) -> tuple:
    return ("reg", i)


def fresh_var(m: int) -> tuple:
    return ("fresh", m)


@dataclass(frozen=True)
class NState:
    label: str
    registers: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.registers)) != len(self.registers):
            raise InputError(f"registers must be pairwise distinct: {self.registers}")

    def __str__(self):
        return f"{self.label}[{','.join(str(a) for a in self.registers)}]"


@dataclass(frozen=True)
class Template:
    """One successor: a target label and one slot per target register."""

    label: str
    assign: tuple[tuple, ...]


@dataclass(frozen=True)
class Rule:
    source: str
    case: tuple  # FRESH_CASE or ("reg", i)
    templates: tuple[Template, ...]


class NLTSSpec:
    """Finite symbolic presentation of a register transition system."""

    def __init__(self, labels: Mapping[str, int], rules: Iterable[Rule]):
        self.labels = dict(labels)
        for lbl, ar in self.labels.items():
            if not lbl or ar < 0:
                raise InputError(f"bad label declaration: {lbl!r}/{ar}")
        self.rules = tuple(rules)
        for rule in self.rules:
            self._check_rule(rule)

    def _check_rule(self, rule: Rule):
        if rule.source not in self.labels:
            raise UnknownLabelError(f"rule source {rule.source!r} not declared")
        src_arity = self.labels[rule.source]
        if rule.case != FRESH_CASE:
            tag, i = rule.case
            if tag != "reg" or not (0 <= i < src_arity):
                raise InputError(f"bad input case {rule.case!r} for {rule.source!r}")
        for tpl in rule.templates:
            if tpl.label not in self.labels:
                raise UnknownLabelError(f"template target {tpl.label!r} not declared")
            if len(tpl.assign) != self.labels[tpl.label]:
                raise InputError(
                    f"template for {tpl.label!r} needs {self.labels[tpl.label]} slots"
                )
            if len(set(tpl.assign)) != len(tpl.assign):
                raise InputError(f"template slots must be distinct: {tpl.assign}")
            for slot in tpl.assign:
                if slot == INPUT_SLOT:
                    continue
                tag = slot[0]
                if tag == "reg":
                    if not (0 <= slot[1] < src_arity):
                        raise InputError(f"slot {slot!r} out of source range")
                elif tag != "fresh":
                    raise InputError(f"unknown slot {slot!r}")
            if rule.case != FRESH_CASE and rule.case in tpl.assign and INPUT_SLOT in tpl.assign:
                # under case reg(i) the input coincides with register i, so a
                # template using both would repeat an atom
                raise InputError(
                    f"template mixes {rule.case!r} and the input slot under case {rule.case!r}"
                )

    def templates_for(self, label: str, case: tuple) -> list[Template]:
        out: list[Template] = []
        for rule in self.rules:
            if rule.source == label and rule.case == case:
                out.extend(rule.templates)
        return out

    def check_state(self, state: NState):
        if state.label not in self.labels:
            raise UnknownLabelError(f"unknown label {state.label!r}")
        if len(state.registers) != self.labels[state.label]:
            raise InputError(
                f"state {state} has {len(state.registers)} registers, "
                f"label {state.label!r} declares {self.labels[state.label]}"
            )


def _fresh_atoms(count: int, used: set[int]) -> list[int]:
    out = []
    candidate = 0
    while len(out) < count:
        if candidate not in used:
            out.append(candidate)
        candidate += 1
    return out


def nominal_step(spec: NLTSSpec, state: NState, a: int) -> frozenset[NState]:
    """All successors of ``state`` on input atom ``a``.

    The input case is determined by whether ``a`` equals a register; every
    matching template is instantiated.  Fresh placeholders take the
    smallest atoms outside registers + input, assigned in placeholder
    order, which makes simulation deterministic.
    """
    spec.check_state(state)
    if a in state.registers:
        case = reg(state.registers.index(a))
    else:
        case = FRESH_CASE
    used = set(state.registers) | {a}
    out = set()
    for tpl in spec.templates_for(state.label, case):
        placeholders = sorted({s[1] for s in tpl.assign if s[0] == "fresh"})
        fresh_pool = dict(zip(placeholders, _fresh_atoms(len(placeholders), used)))
        registers = []
        for slot in tpl.assign:
            if slot == INPUT_SLOT:
                registers.append(a)
            elif slot[0] == "reg":
                registers.append(state.registers[slot[1]])
            else:
                registers.append(fresh_pool[slot[1]])
        out.add(NState(tpl.label, tuple(registers)))
    return frozenset(out)


def orbit_graph(spec: NLTSSpec) -> dict[str, frozenset[str]]:
    """The finite graph on labels: an edge per template target."""
    edges: dict[str, set[str]] = {lbl: set() for lbl in spec.labels}
    for rule in spec.rules:
        for tpl in rule.templates:
            edges[rule.source].add(tpl.label)
    return {lbl: frozenset(targets) for lbl, targets in edges.items()}


def _labels_with_infinite_paths(graph: Mapping[str, frozenset[str]]) -> frozenset[str]:
    # greatest fixpoint of "has a successor in the set": peel labels whose
    # every edge leaves the candidate set
    alive = set(graph)
    changed = True
    while changed:
        changed = False
        for lbl in sorted(alive):
            if not (graph[lbl] & alive):
                alive.discard(lbl)
                changed = True
    return frozenset(alive)


def nominal_is_well_founded(spec: NLTSSpec) -> bool:
    """True iff the orbit graph is acyclic.

    Acyclicity of the finite orbit graph is equivalent to the concrete
    (infinite) system having no infinite runs: concrete runs project to
    orbit paths, and any orbit cycle lifts to a concrete run because fresh
    atoms never run out.
    """
    return not _labels_with_infinite_paths(orbit_graph(spec))


def nominal_wf_labels(spec: NLTSSpec) -> frozenset[str]:
    """Labels from which no infinite concrete run exists."""
    graph = orbit_graph(spec)
    return frozenset(graph) - _labels_with_infinite_paths(graph)


def path_witness(spec: NLTSSpec, state: NState, length: int) -> list[tuple[int, NState]]:
    """A concrete run of ``length`` steps from ``state``, fully verified.

    Requires that the orbit graph has a cycle reachable from the state's
    label.  Each step is chosen deterministically (first applicable rule
    toward the smallest live successor label, smallest admissible atom) and
    is checked to be a genuine successor via :func:`nominal_step`.
    """
    spec.check_state(state)
    graph = orbit_graph(spec)
    alive = _labels_with_infinite_paths(graph)
    if state.label not in alive:
        raise InputError(f"no infinite run exists from label {state.label!r}")
    steps: list[tuple[int, NState]] = []
    current = state
    for _ in range(length):
        target = min(graph[current.label] & alive)
        chosen: Optional[tuple[tuple, Template]] = None
        for rule in spec.rules:
            if rule.source != current.label:
                continue
            for tpl in rule.templates:
                if tpl.label == target:
                    chosen = (rule.case, tpl)
                    break
            if chosen:
                break
        if chosen is None:  # unreachable given the orbit edge
            raise InputError(f"no rule from {current.label!r} to {target!r}")
        case, tpl = chosen
        if case == FRESH_CASE:
            a = _fresh_atoms(1, set(current.registers))[0]
        else:
            a = current.registers[case[1]]
        successors = nominal_step(spec, current, a)
        matching = sorted(
            (s for s in successors if s.label == target),
            key=lambda s: s.registers,
        )
        if not matching:
            raise InputError(f"template toward {target!r} did not instantiate")
        nxt = matching[0]
        steps.append((a, nxt))
        current = nxt
    return steps


def simulate(spec: NLTSSpec, state: NState, rng, max_steps: int) -> list[tuple[int, NState]]:
    """A random concrete run: random input atoms, random successor choice.

    Stops at a deadlock or after ``max_steps``.  Atoms are drawn from the
    current registers plus a small window of other atoms so both input
    cases get exercised.
    """
    spec.check_state(state)
    steps: list[tuple[int, NState]] = []
    current = state
    for _ in range(max_steps):
        pool = sorted(set(current.registers) | set(range(4)))
        a = rng.choice(pool)
        successors = sorted(
            nominal_step(spec, current, a), key=lambda s: (s.label, s.registers)
        )
        if not successors:
            break
        nxt = rng.choice(successors)
        steps.append((a, nxt))
        current = nxt
    return steps


def nominal_koenig_extract(spec: NLTSSpec, state: NState) -> frozenset[str]:
    """The labels reachable from the state's label in the orbit graph.

    On a well-founded spec this describes an orbit-finite, successor-closed
    subsystem containing the state: all states whose label is in the
    returned set.
    """
    if not nominal_is_well_founded(spec):
        raise NotWellFoundedError("system is not well-founded")
    spec.check_state(state)
    graph = orbit_graph(spec)
    reached = {state.label}
    frontier = [state.label]
    while frontier:
        nxt: set[str] = set()
        for lbl in frontier:
            nxt.update(graph[lbl])
        frontier = sorted(nxt - reached)
        reached.update(frontier)
    return frozenset(reached)


# ---------------------------------------------------------------------------
# atom permutations and canonical forms (used by the equivariance checks)


def permute_atom(pi: Mapping[int, int], a: int) -> int:
    return pi.get(a, a)


def permute_state(pi: Mapping[int, int], state: NState) -> NState:
    return NState(state.label, tuple(permute_atom(pi, a) for a in state.registers))


def canonical_successor(state: NState, source_registers: tuple[int, ...], input_atom: int):
    """Describe a successor relative to its source, forgetting fresh atoms.

    Each register atom is classified as a source register index, the input
    atom, or the n-th fresh atom in order of first occurrence.  Two
    successor sets of permuted steps agree exactly on these forms.
    """
    fresh_order: dict[int, int] = {}
    slots = []
    for a in state.registers:
        if a in source_registers:
            slots.append(("reg", source_registers.index(a)))
        elif a == input_atom:
            slots.append(("input",))
        else:
            slots.append(("fresh", fresh_order.setdefault(a, len(fresh_order))))
    return (state.label, tuple(slots))


# ---------------------------------------------------------------------------
# JSON


def _case_to_json(case: tuple):
    return "fresh" if case == FRESH_CASE else {"reg": case[1]}


def _case_from_json(doc, where: str) -> tuple:
    if doc == "fresh":
        return FRESH_CASE
    if isinstance(doc, dict) and set(doc) == {"reg"} and isinstance(doc["reg"], int):
        return reg(doc["reg"])
    raise InputError(f"{where}: expected 'fresh' or {{'reg': i}}")


def _slot_to_json(slot: tuple):
    if slot == INPUT_SLOT:
        return "input"
    return {slot[0]: slot[1]}


def _slot_from_json(doc, where: str) -> tuple:
    if doc == "input":
        return INPUT_SLOT
    if isinstance(doc, dict) and len(doc) == 1:
        tag, value = next(iter(doc.items()))
        if tag in ("reg", "fresh") and isinstance(value, int):
            return (tag, value)
    raise InputError(f"{where}: expected 'input', {{'reg': j}} or {{'fresh': m}}")


def nlts_to_json(spec: NLTSSpec) -> dict:
    return {
        "version": 1,
        "kind": "nlts",
        "labels": dict(sorted(spec.labels.items())),
        "rules": [
            {
                "from": rule.source,
                "case": _case_to_json(rule.case),
                "to": [
                    {
                        "label": tpl.label,
                        "assign": [_slot_to_json(s) for s in tpl.assign],
                    }
                    for tpl in rule.templates
                ],
            }
            for rule in spec.rules
        ],
    }


def nlts_from_json(doc) -> NLTSSpec:
    if not isinstance(doc, dict):
        raise InputError("$: expected a JSON object")
    if doc.get("version") != 1:
        raise InputError("$.version: expected 1")
    if doc.get("kind") != "nlts":
        raise InputError(f"$.kind: expected 'nlts', got {doc.get('kind')!r}")
    labels = doc.get("labels")
    if not isinstance(labels, dict) or not all(
        isinstance(k, str) and isinstance(v, int) for k, v in labels.items()
    ):
        raise InputError("$.labels: expected an object of label -> arity")
    rules_doc = doc.get("rules", [])
    if not isinstance(rules_doc, list):
        raise InputError("$.rules: expected a list")
    rules = []
    for i, rd in enumerate(rules_doc):
        where = f"$.rules[{i}]"
        if not isinstance(rd, dict) or "from" not in rd or "case" not in rd:
            raise InputError(f"{where}: expected {{from, case, to}}")
        templates = []
        for j, td in enumerate(rd.get("to", [])):
            if not isinstance(td, dict) or "label" not in td or "assign" not in td:
                raise InputError(f"{where}.to[{j}]: expected {{label, assign}}")
            templates.append(
                Template(
                    td["label"],
                    tuple(
                        _slot_from_json(s, f"{where}.to[{j}].assign[{k}]")
                        for k, s in enumerate(td["assign"])
                    ),
                )
            )
        rules.append(
            Rule(rd["from"], _case_from_json(rd["case"], f"{where}.case"), tuple(templates))
        )
    try:
        return NLTSSpec(labels, rules)
    except (InputError, UnknownLabelError) as exc:
        raise InputError(f"$.rules: {exc}") from None


def state_from_text(text: str) -> NState:
    """Parse ``label[a0,a1,...]`` (or a bare label for arity 0)."""
    text = text.strip()
    if "[" not in text:
        return NState(text, ())
    if not text.endswith("]"):
        raise InputError(f"bad state syntax: {text!r}")
    label, _, rest = text.partition("[")
    body = rest[:-1].strip()
    if not body:
        return NState(label, ())
    try:
        atoms = tuple(int(part) for part in body.split(","))
    except ValueError:
        raise InputError(f"bad register list in {text!r}") from None
    return NState(label, atoms)
