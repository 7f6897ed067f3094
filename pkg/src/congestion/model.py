"""Model representation: min-affine counter dynamics and timed Petri nets.

Two input shapes are accepted from model files: a `counters` section giving
the min-affine dynamics directly, or a `places`/`transitions`/`arcs` section
describing a timed Petri net with proportion or priority routing, which is
compiled to the dynamics (one counter per transition).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .rationals import LinForm, Q, ZERO, eval_expr, rat, rat_str


class ModelError(Exception):
    pass


class SchemaError(ModelError):
    pass


class SemanticError(ModelError):
    pass


class CompileError(ModelError):
    pass


class CycleError(ModelError):
    pass


@dataclass(frozen=True)
class ResourceForm:
    """A linear form over resource parameters plus a rational constant."""

    coefficients: tuple[tuple[str, object], ...]
    constant: object = ZERO

    @classmethod
    def from_linform(cls, form: LinForm) -> "ResourceForm":
        return cls(tuple(sorted(form.coeffs.items())), form.const)

    @classmethod
    def parameter(cls, name: str) -> "ResourceForm":
        return cls(((name, Q(1)),))

    @classmethod
    def const(cls, value) -> "ResourceForm":
        return cls((), Q(value))

    def as_linform(self) -> LinForm:
        return LinForm(dict(self.coefficients), self.constant)

    def evaluate(self, bindings):
        return self.as_linform().evaluate(bindings)

    def coefficient(self, name: str):
        return dict(self.coefficients).get(name, ZERO)

    def is_zero(self) -> bool:
        return not self.coefficients and self.constant == 0

    def __str__(self):
        parts = [("" if c == 1 else rat_str(c) + "*") + n for n, c in self.coefficients]
        if self.constant != 0 or not parts:
            parts.append(rat_str(self.constant))
        return " + ".join(parts)


@dataclass(frozen=True)
class DelayedTerm:
    counter_index: int
    delay: int
    coefficient: object
    left_limit: bool = False

    def __post_init__(self):
        if self.delay < 0:
            raise ModelError("negative delay")
        if self.left_limit and self.delay != 0:
            raise ModelError("left limits only make sense at delay 0")


@dataclass(frozen=True)
class Action:
    """One min-term: resource + rate*t + sum of delayed counter terms.

    The rate part models exogenous inflow at a constant rate (an arrival
    process "lambda * t"); it contributes to the slope of the action and
    nothing to its offset.
    """

    resource: ResourceForm
    terms: tuple[DelayedTerm, ...]
    label: str = ""
    rate: ResourceForm = ResourceForm(())


@dataclass(frozen=True)
class PWLDynamics:
    counter_names: tuple[str, ...]
    actions: tuple[tuple[Action, ...], ...]
    resource_parameters: tuple[str, ...]
    name: str = ""
    homogeneous: bool = False

    def __post_init__(self):
        if not self.counter_names:
            raise ModelError("dynamics needs at least one counter")
        params = set(self.resource_parameters)
        for acts in self.actions:
            if not acts:
                raise ModelError("every counter needs at least one action")
            for act in acts:
                for form in (act.resource, act.rate):
                    for name, _ in form.coefficients:
                        if name not in params:
                            raise SemanticError(f"undeclared resource parameter {name!r}")
                    if self.homogeneous and form.constant != 0:
                        raise SemanticError("homogeneous model with constant resource term")
                for term in act.terms:
                    if not 0 <= term.counter_index < len(self.counter_names):
                        raise ModelError("term counter index out of range")

    @property
    def n(self) -> int:
        return len(self.counter_names)

    @property
    def delay_set(self) -> tuple[int, ...]:
        delays = set()
        for acts in self.actions:
            for act in acts:
                delays.update(t.delay for t in act.terms)
        return tuple(sorted(delays))

    def action_counts(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.actions)

    def render(self) -> str:
        """Canonical one-line-per-counter text form of the dynamics."""
        lines = []
        for i, name in enumerate(self.counter_names):
            exprs = []
            for act in self.actions[i]:
                parts = []
                if not act.resource.is_zero():
                    parts.append(str(act.resource))
                if not act.rate.is_zero():
                    parts.append(f"({act.rate})*t")
                for t in act.terms:
                    cname = self.counter_names[t.counter_index]
                    arg = "t-" if t.left_limit else (
                        f"t-{t.delay}" if t.delay else "t")
                    c = t.coefficient
                    if c == 1:
                        parts.append(f"{cname}({arg})")
                    elif c == -1:
                        parts.append(f"-{cname}({arg})")
                    else:
                        parts.append(f"{rat_str(c)}*{cname}({arg})")
                if not parts:
                    parts = ["0"]
                exprs.append(" + ".join(parts).replace("+ -", "- "))
            body = exprs[0] if len(exprs) == 1 else "min( " + ", ".join(exprs) + " )"
            lines.append(f"{name}(t) = {body}")
        return "\n".join(lines)


@dataclass(frozen=True)
class Proportions:
    shares: tuple[tuple[str, object], ...]  # (transition name, rational)


@dataclass(frozen=True)
class Priority:
    order: tuple[str, ...]  # highest priority first


@dataclass(frozen=True)
class Place:
    name: str
    marking: ResourceForm
    holding_time: int
    routing: Union[Proportions, Priority, None] = None


@dataclass(frozen=True)
class Arc:
    source: str
    target: str
    weight: object = Q(1)


@dataclass(frozen=True)
class PetriNetSpec:
    name: str
    places: tuple[Place, ...]
    transitions: tuple[str, ...]
    arcs: tuple[Arc, ...]
    resource_parameters: tuple[str, ...]
    homogeneous: bool = False

    def place(self, name: str) -> Place:
        for p in self.places:
            if p.name == name:
                return p
        raise KeyError(name)


def _require_table(doc, key, optional=False):
    value = doc.get(key)
    if value is None:
        if optional:
            return []
        raise SchemaError(f"missing section {key!r}")
    if not isinstance(value, list):
        raise SchemaError(f"section {key!r} must be an array of tables")
    return value


def _check_fields(table, allowed, where):
    for k in table:
        if k not in allowed:
            raise SchemaError(f"unknown field {k!r} in {where}")


class _Scope:
    """Resolves names in model-file expressions.

    Resource parameters resolve to symbolic linear forms; every other name
    must be bound to an exact rational.
    """

    def __init__(self, resources, bindings):
        self.resources = set(resources)
        self.bindings = dict(bindings)

    def resolve(self, name):
        if name in self.resources:
            return LinForm.variable(name)
        if name in self.bindings:
            return LinForm.constant(self.bindings[name])
        raise SemanticError(f"unbound parameter {name!r}")

    def scalar(self, value, where):
        result = self.form(value, where)
        if not result.is_constant():
            raise SemanticError(f"{where}: expected a number, got a resource form")
        return result.const

    def form(self, value, where) -> LinForm:
        if isinstance(value, bool) or isinstance(value, float):
            raise SchemaError(f"{where}: floats are not exact")
        if isinstance(value, (int, Fraction)):
            return LinForm.constant(value)
        if isinstance(value, str):
            try:
                result = eval_expr(value, self.resolve)
            except (ValueError, ZeroDivisionError) as exc:
                raise SemanticError(f"{where}: {exc}") from None
            return result if isinstance(result, LinForm) else LinForm.constant(result)
        raise SchemaError(f"{where}: expected a number or expression string")

    def delay(self, value, where) -> int:
        d = self.scalar(value, where)
        if d.denominator != 1 or d < 0:
            raise SemanticError(f"{where}: delay must be a nonnegative integer, got {rat_str(d)}")
        return int(d)


def parse_model(text: Union[str, bytes], bindings: Optional[dict] = None):
    """Parse a model file into a PetriNetSpec or a PWLDynamics.

    `bindings` overrides the file's default [bindings] table (delays and
    routing proportions).  All numerals are exact rationals; decimal strings
    like "0.4" convert exactly to 2/5.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        # decimal literals are read exactly from their source text
        doc = tomllib.loads(text, parse_float=Fraction)
    except tomllib.TOMLDecodeError as exc:
        raise SchemaError(f"malformed model file: {exc}") from None

    allowed_top = {"name", "homogeneous", "resources", "bindings",
                   "counters", "places", "transitions", "arcs"}
    _check_fields(doc, allowed_top, "model file")
    name = doc.get("name", "")
    homogeneous = bool(doc.get("homogeneous", False))
    resources = doc.get("resources", [])
    if not isinstance(resources, list) or not all(isinstance(r, str) for r in resources):
        raise SchemaError("'resources' must be a list of names")
    defaults = doc.get("bindings", {})
    if not isinstance(defaults, dict):
        raise SchemaError("'bindings' must be a table")
    merged = {}
    for k, v in defaults.items():
        merged[k] = rat(v)
    for k, v in (bindings or {}).items():
        merged[k] = rat(v)
    scope = _Scope(resources, merged)

    has_counters = "counters" in doc
    has_net = any(k in doc for k in ("places", "transitions", "arcs"))
    if has_counters and has_net:
        raise SchemaError("model file mixes direct dynamics with a net description")
    if has_counters:
        return _parse_dynamics(doc, name, homogeneous, resources, scope)
    if has_net:
        return _parse_net(doc, name, homogeneous, resources, scope)
    raise SchemaError("model file has neither 'counters' nor net sections")


def _parse_dynamics(doc, name, homogeneous, resources, scope) -> PWLDynamics:
    tables = _require_table(doc, "counters")
    if not tables:
        raise SchemaError("empty counters list")
    names = []
    for t in tables:
        _check_fields(t, {"name", "actions"}, "counter")
        if "name" not in t:
            raise SchemaError("counter without a name")
        names.append(t["name"])
    if len(set(names)) != len(names):
        raise SchemaError("duplicate counter names")
    index = {n: i for i, n in enumerate(names)}

    all_actions = []
    for t in tables:
        acts = t.get("actions")
        if not isinstance(acts, list) or not acts:
            raise SchemaError(f"counter {t['name']!r} needs a nonempty actions list")
        parsed = []
        for a in acts:
            _check_fields(a, {"label", "resource", "rate", "terms"},
                          f"action of {t['name']}")
            resource = ResourceForm.from_linform(
                scope.form(a.get("resource", 0), f"resource of {t['name']}"))
            rate = ResourceForm.from_linform(
                scope.form(a.get("rate", 0), f"rate of {t['name']}"))
            terms = []
            for trm in a.get("terms", []):
                _check_fields(trm, {"counter", "delay", "coeff", "left"},
                              f"term of {t['name']}")
                cname = trm.get("counter")
                if cname not in index:
                    raise SemanticError(f"unknown counter {cname!r} in a term")
                delay = scope.delay(trm.get("delay", 0), f"delay in {t['name']}")
                coeff = scope.scalar(trm.get("coeff", 1), f"coeff in {t['name']}")
                terms.append(DelayedTerm(index[cname], delay, coeff,
                                         bool(trm.get("left", False))))
            parsed.append(Action(resource, tuple(terms), a.get("label", ""), rate))
        all_actions.append(tuple(parsed))
    return PWLDynamics(tuple(names), tuple(all_actions), tuple(resources),
                       name=name, homogeneous=homogeneous)


def _parse_net(doc, name, homogeneous, resources, scope) -> PetriNetSpec:
    ptables = _require_table(doc, "places")
    ttables = _require_table(doc, "transitions")
    atables = _require_table(doc, "arcs")
    if not ttables:
        raise SchemaError("empty transitions list")

    transitions = []
    for t in ttables:
        _check_fields(t, {"name"}, "transition")
        if "name" not in t:
            raise SchemaError("transition without a name")
        transitions.append(t["name"])
    if len(set(transitions)) != len(transitions):
        raise SchemaError("duplicate transition names")
    tset = set(transitions)

    places = []
    for p in ptables:
        _check_fields(p, {"name", "marking", "holding", "routing"}, "place")
        if "name" not in p:
            raise SchemaError("place without a name")
        marking = ResourceForm.from_linform(
            scope.form(p.get("marking", 0), f"marking of {p['name']}"))
        holding = scope.delay(p.get("holding", 0), f"holding of {p['name']}")
        routing = None
        r = p.get("routing")
        if r is not None:
            _check_fields(r, {"proportions", "priority"}, f"routing of {p['name']}")
            if "proportions" in r and "priority" in r:
                raise SchemaError(f"place {p['name']!r} has both routing kinds")
            if "proportions" in r:
                shares = []
                total = ZERO
                for tname, v in r["proportions"].items():
                    if tname not in tset:
                        raise SemanticError(f"proportion for unknown transition {tname!r}")
                    share = scope.scalar(v, f"proportion in {p['name']}")
                    if not (0 < share <= 1):
                        raise SemanticError(
                            f"proportion {rat_str(share)} of {p['name']!r} outside (0,1]")
                    shares.append((tname, share))
                    total += share
                if total != 1:
                    raise SemanticError(
                        f"proportions of {p['name']!r} sum to {rat_str(total)}, not 1")
                routing = Proportions(tuple(shares))
            else:
                order = tuple(r["priority"])
                if len(order) < 2 or len(set(order)) != len(order):
                    raise SemanticError(
                        f"priority order of {p['name']!r} needs >= 2 distinct transitions")
                for tname in order:
                    if tname not in tset:
                        raise SemanticError(f"priority over unknown transition {tname!r}")
                routing = Priority(order)
        places.append(Place(p["name"], marking, holding, routing))
    pset = {p.name for p in places}
    if len(pset) != len(places):
        raise SchemaError("duplicate place names")

    arcs = []
    for a in atables:
        _check_fields(a, {"from", "to", "weight"}, "arc")
        src, dst = a.get("from"), a.get("to")
        if src is None or dst is None:
            raise SchemaError("arc needs 'from' and 'to'")
        if not ((src in pset and dst in tset) or (src in tset and dst in pset)):
            raise SemanticError(f"arc {src!r} -> {dst!r} must join a place and a transition")
        weight = scope.scalar(a.get("weight", 1), "arc weight")
        if weight <= 0:
            raise SemanticError("arc weights must be positive")
        arcs.append(Arc(src, dst, weight))

    return PetriNetSpec(name, tuple(places), tuple(transitions), tuple(arcs),
                        tuple(resources), homogeneous)


def delay_zero_order(dyn: PWLDynamics) -> list[int]:
    """Topological order of the delay-0 dependency graph (left limits excluded).

    Raises CycleError when no such order exists.
    """
    deps = [set() for _ in range(dyn.n)]
    for i in range(dyn.n):
        for act in dyn.actions[i]:
            for t in act.terms:
                if t.delay == 0 and not t.left_limit and t.counter_index != i:
                    deps[i].add(t.counter_index)
    order, state = [], [0] * dyn.n  # 0 new, 1 open, 2 done

    def visit(i):
        if state[i] == 2:
            return
        if state[i] == 1:
            raise CycleError(
                f"delay-0 dependency cycle through {dyn.counter_names[i]!r}")
        state[i] = 1
        for j in sorted(deps[i]):
            visit(j)
        state[i] = 2
        order.append(i)

    for i in range(dyn.n):
        visit(i)
    return order


def compile_dynamics(net: PetriNetSpec) -> PWLDynamics:
    """Compile a timed Petri net with priorities into min-affine dynamics.

    One counter per transition; each upstream place of a transition yields
    one action: the place's marking plus its inflow shifted by the holding
    time, scaled by the routing proportion into that transition.  A priority
    place additionally subtracts the competing downstream counters at delay
    0; lower-priority competitors enter as left limits.
    """
    index = {name: i for i, name in enumerate(net.transitions)}
    in_arcs = {p.name: [] for p in net.places}     # transition -> place
    out_arcs = {p.name: [] for p in net.places}    # place -> transition
    for arc in net.arcs:
        if arc.source in index:
            in_arcs[arc.target].append(arc)
        else:
            out_arcs[arc.source].append(arc)

    actions: list[list[Action]] = [[] for _ in net.transitions]
    for place in net.places:
        downstream = [a.target for a in out_arcs[place.name]]
        if not downstream:
            continue
        proportions = {}
        if isinstance(place.routing, Proportions):
            proportions = dict(place.routing.shares)
            missing = set(downstream) - set(proportions)
            if missing:
                raise CompileError(
                    f"place {place.name!r} routes by proportions but {sorted(missing)} "
                    "have no share")
        if isinstance(place.routing, Priority):
            if proportions:
                raise CompileError(
                    f"place {place.name!r} mixes priority and proportions")
            rank = {t: k for k, t in enumerate(place.routing.order)}
            if set(rank) != set(downstream):
                raise CompileError(
                    f"place {place.name!r}: priority order must list exactly "
                    "its downstream transitions")
        elif len(downstream) > 1 and not proportions:
            raise CompileError(
                f"place {place.name!r} has several consumers but no routing rule")

        for out in out_arcs[place.name]:
            i = index[out.target]
            share = proportions.get(out.target, Q(1))
            terms = []
            for arc in in_arcs[place.name]:
                coeff = share * arc.weight
                terms.append(DelayedTerm(index[arc.source], place.holding_time, coeff))
            if isinstance(place.routing, Priority):
                my_rank = rank[out.target]
                for other in place.routing.order:
                    if other == out.target:
                        continue
                    terms.append(DelayedTerm(
                        index[other], 0, Q(-1), left_limit=rank[other] > my_rank))
            actions[i].append(Action(place.marking, tuple(terms), label=place.name))

    for tname, acts in zip(net.transitions, actions):
        if not acts:
            raise CompileError(f"transition {tname!r} has no upstream place")
    dyn = PWLDynamics(tuple(net.transitions), tuple(tuple(a) for a in actions),
                      net.resource_parameters, name=net.name,
                      homogeneous=net.homogeneous)
    delay_zero_order(dyn)  # reject dynamics whose simulation is ill-defined
    return dyn
