"""Shape functors over named states, and their structure values.

A ``Container`` is a finite description of a shape functor: identity (one
state slot), finite constants, binary sums, finite products, finite
powerset, finite exponents, and the built-in ``PairNeq`` functor of
distinct pairs with the diagonal collapsed to a single point ``*``.

An ``HStructure`` is a value of such a functor over named states.  All
values are immutable and hashable; set-like nodes are kept sorted and
duplicate-free so that structural equality is plain ``==``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .errors import InputError, UnknownStateError

# ---------------------------------------------------------------------------
# containers


@dataclass(frozen=True)
class Identity:
    """One state slot."""


@dataclass(frozen=True)
class Const:
    """A fixed finite set of labels; no state slots."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if not self.labels:
            raise InputError("Const needs at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise InputError(f"duplicate Const labels: {self.labels}")


@dataclass(frozen=True)
class Sum:
    left: "Container"
    right: "Container"


@dataclass(frozen=True)
class Product:
    parts: tuple["Container", ...]

    def __post_init__(self):
        if not self.parts:
            raise InputError("Product needs at least one component")


@dataclass(frozen=True)
class FinPow:
    """Finite sets of inner values."""

    inner: "Container"


@dataclass(frozen=True)
class Exp:
    """Functions from a fixed finite label set into inner values."""

    base: "Container"
    exponent: tuple[str, ...]

    def __post_init__(self):
        if not self.exponent:
            raise InputError("Exp needs a non-empty exponent")
        if len(set(self.exponent)) != len(self.exponent):
            raise InputError(f"duplicate Exp labels: {self.exponent}")


@dataclass(frozen=True)
class PairNeq:
    """Ordered pairs of *distinct* states, plus a point ``*``.

    The diagonal is collapsed: a pair whose components become equal under
    renaming is normalized to ``*``.
    """


Container = Union[Identity, Const, Sum, Product, FinPow, Exp, PairNeq]


# ---------------------------------------------------------------------------
# structure values


@dataclass(frozen=True)
class StateRef:
    state: str


@dataclass(frozen=True)
class ConstVal:
    label: str


@dataclass(frozen=True)
class InL:
    value: "HStructure"


@dataclass(frozen=True)
class InR:
    value: "HStructure"


@dataclass(frozen=True)
class TupleOf:
    items: tuple["HStructure", ...]


@dataclass(frozen=True)
class SetOf:
    """A finite set, stored sorted and duplicate-free (use :func:`set_of`)."""

    items: tuple["HStructure", ...]


@dataclass(frozen=True)
class FunOf:
    """A function as label/value entries sorted by label (use :func:`fun_of`)."""

    entries: tuple[tuple[str, "HStructure"], ...]


@dataclass(frozen=True)
class Star:
    """The collapsed-diagonal point of ``PairNeq``."""


@dataclass(frozen=True)
class Pair:
    left: "HStructure"
    right: "HStructure"


HStructure = Union[StateRef, ConstVal, InL, InR, TupleOf, SetOf, FunOf, Star, Pair]

STAR = Star()

_KEY_TAGS = {
    StateRef: 0,
    ConstVal: 1,
    InL: 2,
    InR: 3,
    TupleOf: 4,
    SetOf: 5,
    FunOf: 6,
    Star: 7,
    Pair: 8,
}


def structure_key(h: HStructure):
    """Total order key for structures; used to canonicalize set nodes."""
    tag = _KEY_TAGS[type(h)]
    if isinstance(h, StateRef):
        return (tag, h.state)
    if isinstance(h, ConstVal):
        return (tag, h.label)
    if isinstance(h, (InL, InR)):
        return (tag, structure_key(h.value))
    if isinstance(h, TupleOf):
        return (tag, tuple(structure_key(x) for x in h.items))
    if isinstance(h, SetOf):
        return (tag, tuple(structure_key(x) for x in h.items))
    if isinstance(h, FunOf):
        return (tag, tuple((lbl, structure_key(v)) for lbl, v in h.entries))
    if isinstance(h, Star):
        return (tag,)
    return (tag, structure_key(h.left), structure_key(h.right))


def set_of(items: Iterable[HStructure]) -> SetOf:
    """Build a canonical set node: duplicates removed, members sorted."""
    dedup = {structure_key(x): x for x in items}
    return SetOf(tuple(dedup[k] for k in sorted(dedup)))


def fun_of(entries) -> FunOf:
    """Build a canonical function node from a mapping or (label, value) pairs."""
    pairs = list(entries.items()) if isinstance(entries, Mapping) else list(entries)
    labels = [lbl for lbl, _ in pairs]
    if len(set(labels)) != len(labels):
        raise InputError(f"duplicate function labels: {labels}")
    return FunOf(tuple(sorted(pairs, key=lambda e: e[0])))


def make_pair(left: HStructure, right: HStructure) -> HStructure:
    """Pair constructor with diagonal normalization: equal components give ``*``."""
    if left == right:
        return STAR
    return Pair(left, right)


# ---------------------------------------------------------------------------
# the three functor operations


def validate(container: Container, h: HStructure) -> bool:
    """Check that ``h`` is a well-typed, canonical value of ``container``.

    Set nodes must be sorted and duplicate-free, and a ``PairNeq`` pair must
    have distinct components (the equal case is only legal as ``*``).
    """
    if isinstance(container, Identity):
        return isinstance(h, StateRef) and bool(h.state)
    if isinstance(container, Const):
        return isinstance(h, ConstVal) and h.label in container.labels
    if isinstance(container, Sum):
        if isinstance(h, InL):
            return validate(container.left, h.value)
        if isinstance(h, InR):
            return validate(container.right, h.value)
        return False
    if isinstance(container, Product):
        return (
            isinstance(h, TupleOf)
            and len(h.items) == len(container.parts)
            and all(validate(c, x) for c, x in zip(container.parts, h.items))
        )
    if isinstance(container, FinPow):
        if not isinstance(h, SetOf):
            return False
        keys = [structure_key(x) for x in h.items]
        if keys != sorted(set(keys)) or len(set(keys)) != len(keys):
            return False
        return all(validate(container.inner, x) for x in h.items)
    if isinstance(container, Exp):
        if not isinstance(h, FunOf):
            return False
        labels = [lbl for lbl, _ in h.entries]
        if labels != sorted(container.exponent):
            return False
        return all(validate(container.base, v) for _, v in h.entries)
    if isinstance(container, PairNeq):
        if isinstance(h, Star):
            return True
        if isinstance(h, Pair):
            return (
                validate(Identity(), h.left)
                and validate(Identity(), h.right)
                and h.left != h.right
            )
        return False
    raise InputError(f"unknown container: {container!r}")


def _shape_error(container, h):
    return InputError(f"structure {h!r} does not match container {container!r}")


def hmap(container: Container, f: Mapping[str, str], h: HStructure) -> HStructure:
    """Rename every state slot of ``h`` through ``f`` (the functor action).

    Set nodes are re-canonicalized after renaming, and a ``PairNeq`` pair
    whose components collide under ``f`` collapses to ``*``.
    """
    if isinstance(container, Identity):
        if not isinstance(h, StateRef):
            raise _shape_error(container, h)
        if h.state not in f:
            raise UnknownStateError(f"map undefined on state {h.state!r}")
        return StateRef(f[h.state])
    if isinstance(container, Const):
        if not isinstance(h, ConstVal):
            raise _shape_error(container, h)
        return h
    if isinstance(container, Sum):
        if isinstance(h, InL):
            return InL(hmap(container.left, f, h.value))
        if isinstance(h, InR):
            return InR(hmap(container.right, f, h.value))
        raise _shape_error(container, h)
    if isinstance(container, Product):
        if not isinstance(h, TupleOf) or len(h.items) != len(container.parts):
            raise _shape_error(container, h)
        return TupleOf(
            tuple(hmap(c, f, x) for c, x in zip(container.parts, h.items))
        )
    if isinstance(container, FinPow):
        if not isinstance(h, SetOf):
            raise _shape_error(container, h)
        return set_of(hmap(container.inner, f, x) for x in h.items)
    if isinstance(container, Exp):
        if not isinstance(h, FunOf):
            raise _shape_error(container, h)
        return FunOf(
            tuple((lbl, hmap(container.base, f, v)) for lbl, v in h.entries)
        )
    if isinstance(container, PairNeq):
        if isinstance(h, Star):
            return h
        if isinstance(h, Pair):
            return make_pair(
                hmap(Identity(), f, h.left), hmap(Identity(), f, h.right)
            )
        raise _shape_error(container, h)
    raise InputError(f"unknown container: {container!r}")


def support(container: Container, h: HStructure) -> frozenset[str]:
    """The set of states occurring in ``h``.

    For every container in the grammar this is the least state set over
    which ``h`` is expressible, so it doubles as the successor set of a
    state whose transition structure is ``h``.
    """
    out: set[str] = set()
    _collect_support(container, h, out)
    return frozenset(out)


def _collect_support(container, h, out):
    if isinstance(container, Identity):
        if not isinstance(h, StateRef):
            raise _shape_error(container, h)
        out.add(h.state)
    elif isinstance(container, Const):
        pass
    elif isinstance(container, Sum):
        if isinstance(h, InL):
            _collect_support(container.left, h.value, out)
        elif isinstance(h, InR):
            _collect_support(container.right, h.value, out)
        else:
            raise _shape_error(container, h)
    elif isinstance(container, Product):
        for c, x in zip(container.parts, h.items):
            _collect_support(c, x, out)
    elif isinstance(container, FinPow):
        for x in h.items:
            _collect_support(container.inner, x, out)
    elif isinstance(container, Exp):
        for _, v in h.entries:
            _collect_support(container.base, v, out)
    elif isinstance(container, PairNeq):
        if isinstance(h, Pair):
            _collect_support(Identity(), h.left, out)
            _collect_support(Identity(), h.right, out)
        elif not isinstance(h, Star):
            raise _shape_error(container, h)
    else:
        raise InputError(f"unknown container: {container!r}")


def interpret(container: Container, h: HStructure, env: Mapping[str, object]):
    """Replace state slots by values from ``env``, yielding a plain shape.

    The result uses ordinary Python data: labels stay strings, sums become
    ``("inl", x)`` / ``("inr", x)`` tags, products become tuples, sets
    become frozensets, functions become sorted (label, value) tuples, and
    ``PairNeq`` values become ``STAR`` or ``("pair", a, b)`` with the
    diagonal normalized to ``STAR``.  Algebra evaluation consumes these
    shapes.
    """
    if isinstance(container, Identity):
        if not isinstance(h, StateRef):
            raise _shape_error(container, h)
        try:
            return env[h.state]
        except KeyError:
            raise UnknownStateError(f"no value for state {h.state!r}") from None
    if isinstance(container, Const):
        return h.label
    if isinstance(container, Sum):
        if isinstance(h, InL):
            return ("inl", interpret(container.left, h.value, env))
        if isinstance(h, InR):
            return ("inr", interpret(container.right, h.value, env))
        raise _shape_error(container, h)
    if isinstance(container, Product):
        return tuple(
            interpret(c, x, env) for c, x in zip(container.parts, h.items)
        )
    if isinstance(container, FinPow):
        return frozenset(interpret(container.inner, x, env) for x in h.items)
    if isinstance(container, Exp):
        return tuple(
            (lbl, interpret(container.base, v, env)) for lbl, v in h.entries
        )
    if isinstance(container, PairNeq):
        if isinstance(h, Star):
            return STAR
        a = interpret(Identity(), h.left, env)
        b = interpret(Identity(), h.right, env)
        return STAR if a == b else ("pair", a, b)
    raise InputError(f"unknown container: {container!r}")


def identity_values(container: Container, shape):
    """Yield the values sitting in the identity slots of a plain shape."""
    if isinstance(container, Identity):
        yield shape
    elif isinstance(container, Const):
        return
    elif isinstance(container, Sum):
        tag, inner = shape
        side = container.left if tag == "inl" else container.right
        yield from identity_values(side, inner)
    elif isinstance(container, Product):
        for c, x in zip(container.parts, shape):
            yield from identity_values(c, x)
    elif isinstance(container, FinPow):
        for x in shape:
            yield from identity_values(container.inner, x)
    elif isinstance(container, Exp):
        for _, v in shape:
            yield from identity_values(container.base, v)
    elif isinstance(container, PairNeq):
        if shape != STAR:
            _, a, b = shape
            yield a
            yield b
    else:
        raise InputError(f"unknown container: {container!r}")


def enumerate_structures(container: Container, states) -> list[HStructure]:
    """All values of ``container`` over the given states, in canonical order.

    Intended for small oracles and exhaustive checks; the powerset and
    exponent cases grow fast, so inner domains are capped at 16 elements.
    """
    states = sorted(set(states))
    if isinstance(container, Identity):
        out = [StateRef(s) for s in states]
    elif isinstance(container, Const):
        out = [ConstVal(lbl) for lbl in container.labels]
    elif isinstance(container, Sum):
        out = [InL(x) for x in enumerate_structures(container.left, states)]
        out += [InR(x) for x in enumerate_structures(container.right, states)]
    elif isinstance(container, Product):
        parts = [enumerate_structures(c, states) for c in container.parts]
        out = [TupleOf(tuple(combo)) for combo in itertools.product(*parts)]
    elif isinstance(container, FinPow):
        inner = enumerate_structures(container.inner, states)
        if len(inner) > 16:
            raise InputError("powerset enumeration domain too large")
        out = []
        for r in range(len(inner) + 1):
            for combo in itertools.combinations(inner, r):
                out.append(set_of(combo))
    elif isinstance(container, Exp):
        inner = enumerate_structures(container.base, states)
        labels = sorted(container.exponent)
        if len(inner) ** len(labels) > 4096:
            raise InputError("exponent enumeration domain too large")
        out = [
            FunOf(tuple(zip(labels, combo)))
            for combo in itertools.product(inner, repeat=len(labels))
        ]
    elif isinstance(container, PairNeq):
        out = [STAR]
        for a in states:
            for b in states:
                if a != b:
                    out.append(Pair(StateRef(a), StateRef(b)))
    else:
        raise InputError(f"unknown container: {container!r}")
    return sorted(out, key=structure_key)


# ---------------------------------------------------------------------------
# JSON encoding (tagged single-key objects; round-trips exactly)


def container_to_json(container: Container):
    if isinstance(container, Identity):
        return {"id": None}
    if isinstance(container, Const):
        return {"const": list(container.labels)}
    if isinstance(container, Sum):
        return {"sum": [container_to_json(container.left), container_to_json(container.right)]}
    if isinstance(container, Product):
        return {"product": [container_to_json(c) for c in container.parts]}
    if isinstance(container, FinPow):
        return {"finpow": container_to_json(container.inner)}
    if isinstance(container, Exp):
        return {
            "exp": {
                "base": container_to_json(container.base),
                "labels": list(container.exponent),
            }
        }
    if isinstance(container, PairNeq):
        return {"pairneq": None}
    raise InputError(f"unknown container: {container!r}")


def _tagged(doc, where):
    if not isinstance(doc, dict) or len(doc) != 1:
        raise InputError(f"{where}: expected a single-key tagged object, got {doc!r}")
    return next(iter(doc.items()))


def container_from_json(doc, where: str = "$") -> Container:
    tag, body = _tagged(doc, where)
    if tag == "id":
        return Identity()
    if tag == "const":
        if not isinstance(body, list) or not all(isinstance(x, str) for x in body):
            raise InputError(f"{where}.const: expected a list of labels")
        return Const(tuple(body))
    if tag == "sum":
        if not isinstance(body, list) or len(body) != 2:
            raise InputError(f"{where}.sum: expected [left, right]")
        return Sum(
            container_from_json(body[0], f"{where}.sum[0]"),
            container_from_json(body[1], f"{where}.sum[1]"),
        )
    if tag == "product":
        if not isinstance(body, list):
            raise InputError(f"{where}.product: expected a list")
        return Product(
            tuple(
                container_from_json(c, f"{where}.product[{i}]")
                for i, c in enumerate(body)
            )
        )
    if tag == "finpow":
        return FinPow(container_from_json(body, f"{where}.finpow"))
    if tag == "exp":
        if not isinstance(body, dict) or set(body) != {"base", "labels"}:
            raise InputError(f"{where}.exp: expected {{base, labels}}")
        return Exp(
            container_from_json(body["base"], f"{where}.exp.base"),
            tuple(body["labels"]),
        )
    if tag == "pairneq":
        return PairNeq()
    raise InputError(f"{where}: unknown container tag {tag!r}")


def structure_to_json(h: HStructure):
    if isinstance(h, StateRef):
        return {"state": h.state}
    if isinstance(h, ConstVal):
        return {"const": h.label}
    if isinstance(h, InL):
        return {"inl": structure_to_json(h.value)}
    if isinstance(h, InR):
        return {"inr": structure_to_json(h.value)}
    if isinstance(h, TupleOf):
        return {"tuple": [structure_to_json(x) for x in h.items]}
    if isinstance(h, SetOf):
        return {"set": [structure_to_json(x) for x in h.items]}
    if isinstance(h, FunOf):
        return {"fun": {lbl: structure_to_json(v) for lbl, v in h.entries}}
    if isinstance(h, Star):
        return {"star": None}
    if isinstance(h, Pair):
        return {"pair": [structure_to_json(h.left), structure_to_json(h.right)]}
    raise InputError(f"unknown structure: {h!r}")


def structure_from_json(doc, where: str = "$") -> HStructure:
    tag, body = _tagged(doc, where)
    if tag == "state":
        if not isinstance(body, str) or not body:
            raise InputError(f"{where}.state: expected a non-empty string")
        return StateRef(body)
    if tag == "const":
        if not isinstance(body, str):
            raise InputError(f"{where}.const: expected a label string")
        return ConstVal(body)
    if tag == "inl":
        return InL(structure_from_json(body, f"{where}.inl"))
    if tag == "inr":
        return InR(structure_from_json(body, f"{where}.inr"))
    if tag == "tuple":
        return TupleOf(
            tuple(
                structure_from_json(x, f"{where}.tuple[{i}]")
                for i, x in enumerate(body)
            )
        )
    if tag == "set":
        return set_of(
            structure_from_json(x, f"{where}.set[{i}]") for i, x in enumerate(body)
        )
    if tag == "fun":
        if not isinstance(body, dict):
            raise InputError(f"{where}.fun: expected an object")
        return fun_of(
            {lbl: structure_from_json(v, f"{where}.fun.{lbl}") for lbl, v in body.items()}
        )
    if tag == "star":
        return STAR
    if tag == "pair":
        if not isinstance(body, list) or len(body) != 2:
            raise InputError(f"{where}.pair: expected [left, right]")
        return make_pair(
            structure_from_json(body[0], f"{where}.pair[0]"),
            structure_from_json(body[1], f"{where}.pair[1]"),
        )
    raise InputError(f"{where}: unknown structure tag {tag!r}")
