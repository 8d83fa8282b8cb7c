"""Finite quantum resource theories over a named state universe.

A theory is a set of named systems (each with finitely many named states),
a set of CPTP channels between them, and an optional trivial
one-dimensional system. Free states are never supplied: they are computed
as the states reachable from the trivial system's unique state.

Channels are identified extensionally by the function they induce on the
named universe; matching an output matrix to a named state uses the
nearest-within-eps_match rule, with ambiguity treated as a validation
error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES, MAX_CHANNELS, MAX_ISO_NODES, Tolerances
from .errors import ResourceLimitError, StructuralError
from .linalg import (
    DensityMatrix,
    KrausChannel,
    apply_channel,
    compose,
    identity_channel,
    is_cptp,
    trace_distance,
)
from .relations import reflexive_transitive_closure

ID_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

Node = tuple  # (system id, state id)


def node_name(node: Node) -> str:
    """The globally unique qualified name, 'system.state'."""
    return f"{node[0]}.{node[1]}"


@dataclass(frozen=True, eq=False)
class SystemDecl:
    id: str
    dim: int
    states: Mapping[str, DensityMatrix] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class ChannelDecl:
    id: str
    src: str
    dst: str
    channel: KrausChannel


@dataclass(frozen=True)
class Issue:
    code: str
    subject: str
    message: str

    def to_dict(self) -> dict:
        return {"code": self.code, "subject": self.subject, "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple

    @property
    def ok(self) -> bool:
        return not self.issues

    def to_dict(self) -> dict:
        return {"ok": self.ok, "issues": [i.to_dict() for i in self.issues]}

    def text(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(f"[{i.code}] {i.subject}: {i.message}" for i in self.issues)


@dataclass(frozen=True)
class StateGraph:
    """Named states as nodes; an edge per (channel, named source state)."""

    nodes: tuple
    edges: frozenset  # (src node, dst node, channel id)

    @property
    def simple_edges(self) -> frozenset:
        return frozenset((a, b) for a, b, _ in self.edges)


def _matrix_is_identity(c: KrausChannel) -> bool:
    if c.in_dim != c.out_dim or len(c.kraus_ops) != 1:
        return False
    return bool(np.allclose(c.kraus_ops[0], np.eye(c.in_dim), atol=1e-12))


class Qrt:
    """An immutable finite theory. Derived artifacts are cached."""

    def __init__(
        self,
        systems: Sequence[SystemDecl],
        channels: Sequence[ChannelDecl] = (),
        trivial: str | None = None,
        tol: Tolerances = DEFAULT_TOLERANCES,
    ):
        self._systems = tuple(systems)
        self._by_id = {s.id: s for s in self._systems}
        chans = list(channels)
        taken = {c.id for c in chans}
        # the identity channel on every system is mandatory; add it when absent
        for s in self._systems:
            if any(
                c.src == s.id and c.dst == s.id and _matrix_is_identity(c.channel)
                for c in chans
            ):
                continue
            cid = f"id_{s.id}"
            while cid in taken:
                cid += "_"
            taken.add(cid)
            chans.append(ChannelDecl(cid, s.id, s.id, identity_channel(s.dim)))
        self._channels = tuple(chans)
        if trivial is None:
            ones = [s.id for s in self._systems if s.dim == 1]
            trivial = ones[0] if len(ones) == 1 else None
        self._trivial = trivial
        self.tol = tol

    # immutability is by convention; derived data below is cached per instance

    @property
    def systems(self) -> tuple:
        return self._systems

    @property
    def channels(self) -> tuple:
        return self._channels

    @property
    def trivial_id(self) -> str | None:
        return self._trivial

    def system(self, sid: str) -> SystemDecl:
        return self._by_id[sid]

    @cached_property
    def nodes(self) -> tuple:
        return tuple(
            (s.id, st) for s in self._systems for st in sorted(s.states)
        )

    def match_named(self, sid: str, dm: DensityMatrix) -> str | None:
        """The unique named state of system sid within eps_match, or None.

        Raises StructuralError when more than one named state matches."""
        hits = [
            st
            for st, named in self._by_id[sid].states.items()
            if trace_distance(dm, named) <= self.tol.eps_match
        ]
        if len(hits) > 1:
            raise StructuralError(
                f"ambiguous match in system {sid}: {sorted(hits)}"
            )
        return hits[0] if hits else None

    def induced_function(self, decl: ChannelDecl) -> dict | None:
        """The map named-state -> named-state realized by the channel, or
        None when some image misses the named universe."""
        out: dict[str, str] = {}
        for st, dm in self._by_id[decl.src].states.items():
            image = apply_channel(decl.channel, dm, self.tol)
            hit = self.match_named(decl.dst, image)
            if hit is None:
                return None
            out[st] = hit
        return out

    @cached_property
    def functions(self) -> dict:
        """{(src, dst): {function key: representative channel id}} with
        extensional deduplication. Function keys are sorted item tuples."""
        table: dict = {}
        for decl in self._channels:
            fn = self.induced_function(decl)
            if fn is None:
                raise StructuralError(
                    f"channel {decl.id} does not preserve the named universe"
                )
            key = tuple(sorted(fn.items()))
            table.setdefault((decl.src, decl.dst), {}).setdefault(key, decl.id)
        return table

    def function_count(self) -> int:
        return sum(len(v) for v in self.functions.values())

    @cached_property
    def state_graph(self) -> StateGraph:
        edges = set()
        for decl in self._channels:
            fn = self.induced_function(decl)
            if fn is None:
                raise StructuralError(
                    f"channel {decl.id} does not preserve the named universe"
                )
            for st, img in fn.items():
                edges.add(((decl.src, st), (decl.dst, img), decl.id))
        return StateGraph(self.nodes, frozenset(edges))

    @cached_property
    def trivial_node(self) -> Node | None:
        if self._trivial is None:
            return None
        states = sorted(self._by_id[self._trivial].states)
        if len(states) != 1:
            return None
        return (self._trivial, states[0])

    # -- validation -----------------------------------------------------------

    def validate(self) -> ValidationReport:
        issues: list[Issue] = []
        seen_sys: set[str] = set()
        for s in self._systems:
            if not ID_RE.match(s.id):
                issues.append(Issue("bad-id", s.id, "system id is not an identifier"))
            if s.id in seen_sys:
                issues.append(Issue("duplicate-id", s.id, "duplicate system id"))
            seen_sys.add(s.id)
            for st, dm in s.states.items():
                if not ID_RE.match(st):
                    issues.append(
                        Issue("bad-id", f"{s.id}.{st}", "state id is not an identifier")
                    )
                if dm.dim != s.dim:
                    issues.append(
                        Issue(
                            "dim-mismatch",
                            f"{s.id}.{st}",
                            f"state dim {dm.dim} != system dim {s.dim}",
                        )
                    )
            # ambiguity: two named states closer than the matching radius allows
            names = sorted(s.states)
            for i, st1 in enumerate(names):
                for st2 in names[i + 1:]:
                    if s.states[st1].dim != s.states[st2].dim:
                        continue
                    d = trace_distance(s.states[st1], s.states[st2])
                    if d <= 2 * self.tol.eps_match:
                        issues.append(
                            Issue(
                                "ambiguous-states",
                                f"{s.id}.{st1}/{st2}",
                                f"named states only {d:.3e} apart",
                            )
                        )

        ones = [s for s in self._systems if s.dim == 1]
        if len(ones) > 1:
            issues.append(
                Issue("bad-trivial", ",".join(s.id for s in ones), "more than one one-dimensional system")
            )
        for s in ones:
            if len(s.states) != 1:
                issues.append(
                    Issue("bad-trivial", s.id, "the trivial system must have exactly one state")
                )
        if self._trivial is not None:
            t = self._by_id.get(self._trivial)
            if t is None:
                issues.append(Issue("bad-trivial", self._trivial, "trivial system not declared"))
            elif t.dim != 1:
                issues.append(Issue("bad-trivial", self._trivial, "trivial system must have dim 1"))

        seen_ch: set[str] = set()
        closure_ok = True
        for decl in self._channels:
            if decl.id in seen_ch:
                issues.append(Issue("duplicate-id", decl.id, "duplicate channel id"))
            seen_ch.add(decl.id)
            if decl.src not in self._by_id or decl.dst not in self._by_id:
                issues.append(
                    Issue("unknown-system", decl.id, f"endpoints {decl.src}->{decl.dst} undeclared")
                )
                closure_ok = False
                continue
            src, dst = self._by_id[decl.src], self._by_id[decl.dst]
            if decl.channel.in_dim != src.dim or decl.channel.out_dim != dst.dim:
                issues.append(
                    Issue(
                        "dim-mismatch",
                        decl.id,
                        f"kraus shape {decl.channel.out_dim}x{decl.channel.in_dim} "
                        f"!= {dst.dim}x{src.dim}",
                    )
                )
                closure_ok = False
                continue
            ok, why = is_cptp(decl.channel, self.tol)
            if not ok:
                issues.append(Issue("non-cptp", decl.id, why))
                closure_ok = False
                continue
            try:
                fn = self.induced_function(decl)
            except StructuralError as exc:
                issues.append(Issue("state-closure", decl.id, str(exc)))
                closure_ok = False
                continue
            if fn is None:
                issues.append(
                    Issue(
                        "state-closure",
                        decl.id,
                        "some named state's image matches no named state",
                    )
                )
                closure_ok = False

        if closure_ok:
            for s in self._systems:
                fns = self.functions.get((s.id, s.id), {})
                ident = tuple(sorted((st, st) for st in s.states))
                if ident not in fns:
                    issues.append(
                        Issue("missing-identity", s.id, "no channel induces the identity")
                    )
            missing = self._missing_compositions()
            for (a, b, c), key in missing:
                issues.append(
                    Issue(
                        "composition-closure",
                        f"{a}->{b}->{c}",
                        "composite state function is not induced by any channel",
                    )
                )
        return ValidationReport(tuple(issues))

    def _missing_compositions(self) -> list:
        """Composable function pairs whose composite is not in the table."""
        missing = []
        table = self.functions
        for (a, b), fns in sorted(table.items()):
            for (b2, c), gns in sorted(table.items()):
                if b2 != b:
                    continue
                have = table.get((a, c), {})
                for fkey in sorted(fns):
                    f = dict(fkey)
                    for gkey in sorted(gns):
                        g = dict(gkey)
                        comp = tuple(sorted((s, g[f[s]]) for s in f))
                        if comp not in have:
                            missing.append(((a, b, c), comp))
        return missing

    def is_composition_complete(self) -> bool:
        return not self._missing_compositions()

    # -- derived structure ----------------------------------------------------

    @cached_property
    def free_states(self) -> frozenset:
        """Named states reachable from the trivial state; the trivial
        state itself is excluded (it is neither free nor a resource)."""
        start = self.trivial_node
        if start is None:
            if any(
                self._by_id[d.src].dim == 1 for d in self._channels if d.src in self._by_id
            ):
                raise StructuralError("preparations declared but no trivial system")
            return frozenset()
        succ: dict = {}
        for a, b, _ in self.state_graph.edges:
            succ.setdefault(a, set()).add(b)
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for n in frontier:
                for m in succ.get(n, ()):
                    if m not in seen:
                        seen.add(m)
                        nxt.append(m)
            frontier = nxt
        return frozenset(seen - {start})

    @cached_property
    def resource_states(self) -> frozenset:
        start = self.trivial_node
        out = set(self.nodes) - self.free_states
        if start is not None:
            out.discard(start)
        return frozenset(out)

    @cached_property
    def preorder(self) -> frozenset:
        """Convertibility: reflexive-transitive reachability over edges."""
        return reflexive_transitive_closure(self.state_graph.simple_edges, self.nodes)


def validate_qrt(q: Qrt) -> ValidationReport:
    return q.validate()


def complete_composition(q: Qrt, max_channels: int = MAX_CHANNELS) -> Qrt:
    """Close the channel set under composition at the induced-function
    level. New channels are synthesized by Kraus composition and
    deduplicated extensionally; idempotent on already-closed theories."""
    decls = list(q.channels)
    by_fn: dict = {}
    for d in decls:
        fn = q.induced_function(d)
        if fn is None:
            raise StructuralError(f"channel {d.id} breaks state closure")
        by_fn[(d.src, d.dst, tuple(sorted(fn.items())))] = d
    counter = 0
    changed = True
    while changed:
        changed = False
        items = sorted(by_fn.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2]))
        for (a, b, fkey), fd in items:
            for (b2, c, gkey), gd in items:
                if b2 != b:
                    continue
                f, g = dict(fkey), dict(gkey)
                comp_key = tuple(sorted((s, g[f[s]]) for s in f))
                if (a, c, comp_key) in by_fn:
                    continue
                if len(by_fn) + 1 > max_channels:
                    raise ResourceLimitError(
                        f"composition closure exceeds {max_channels} functions"
                    )
                cid = f"comp_{counter}"
                counter += 1
                existing = {d.id for d in by_fn.values()}
                while cid in existing:
                    cid = f"comp_{counter}"
                    counter += 1
                new = ChannelDecl(cid, a, c, compose(gd.channel, fd.channel))
                by_fn[(a, c, comp_key)] = new
                changed = True
    order = {d.id: i for i, d in enumerate(decls)}
    out = sorted(
        by_fn.values(), key=lambda d: (order.get(d.id, len(order)), d.id)
    )
    return Qrt(q.systems, out, q.trivial_id, q.tol)


def free_states(q: Qrt) -> frozenset:
    return q.free_states


def resource_states(q: Qrt) -> frozenset:
    return q.resource_states


def convertibility_preorder(q: Qrt) -> frozenset:
    return q.preorder


def is_sub_qrt(x: Qrt, y: Qrt) -> bool:
    """x's systems embed by id into y's, and x's induced-function set is
    exactly y's restricted to those systems."""
    for s in x.systems:
        t = next((u for u in y.systems if u.id == s.id), None)
        if t is None or t.dim != s.dim or set(t.states) != set(s.states):
            return False
        for st in s.states:
            if trace_distance(s.states[st], t.states[st]) > x.tol.eps_match:
                return False
    kept = {s.id for s in x.systems}
    restricted: dict = {}
    for (a, b), fns in y.functions.items():
        if a in kept and b in kept:
            restricted[(a, b)] = set(fns)
    mine = {pair: set(fns) for pair, fns in x.functions.items()}
    return mine == restricted


def _free_local(q: Qrt, sid: str) -> frozenset:
    return frozenset(st for (s, st) in q.free_states if s == sid)


def _permutations_preserving(groups_x: list, groups_y: list, budget):
    """Bijections between grouped id lists, blockwise."""
    import itertools

    def rec(idx: int, acc: dict):
        if idx == len(groups_x):
            yield dict(acc)
            return
        xs, ys = groups_x[idx], groups_y[idx]
        for perm in itertools.permutations(ys):
            budget()
            acc.update(zip(xs, perm))
            yield from rec(idx + 1, acc)
            for k in xs:
                acc.pop(k, None)

    if any(len(a) != len(b) for a, b in zip(groups_x, groups_y)):
        return
    yield from rec(0, {})


def qrt_isomorphic(
    x: Qrt, y: Qrt, max_nodes: int = MAX_ISO_NODES
) -> tuple[bool, tuple[dict, dict] | None]:
    """Labeled-structure isomorphism: a bijection of systems (matching
    dims) plus per-system bijections of named states that carry x's
    induced state functions and free set onto y's.

    A positive answer certifies isomorphism of the induced labeled
    structures only; whether the bijection lifts to Hilbert-space
    isomorphisms intertwining the channel matrices is not decided here."""
    if len(x.systems) != len(y.systems):
        return False, None

    def profile(q: Qrt, s: SystemDecl):
        return (s.dim, len(s.states), len(_free_local(q, s.id)))

    if sorted(profile(x, s) for s in x.systems) != sorted(
        profile(y, s) for s in y.systems
    ):
        return False, None

    used = [0]

    def spend():
        used[0] += 1
        if used[0] > max_nodes:
            raise ResourceLimitError(f"isomorphism search exceeded {max_nodes} nodes")

    sys_ids = sorted(s.id for s in x.systems)
    cands = {
        s: sorted(
            t.id for t in y.systems if profile(y, t) == profile(x, x.system(s))
        )
        for s in sys_ids
    }
    order = sorted(sys_ids, key=lambda s: (len(cands[s]), s))

    sys_map: dict = {}
    state_map: dict = {}  # local per system: {sys: {state: state'}}

    def functions_ok(a: str, b: str) -> bool:
        fx = x.functions.get((a, b), {})
        fy = y.functions.get((sys_map[a], sys_map[b]), {})
        if len(fx) != len(fy):
            return False
        ma, mb = state_map[a], state_map[b]
        transported = {
            tuple(sorted((ma[s], mb[i]) for s, i in key)) for key in fx
        }
        return transported == set(fy)

    def rec(idx: int) -> bool:
        if idx == len(order):
            return True
        a = order[idx]
        sa = x.system(a)
        free_a = _free_local(x, a)
        for b in cands[a]:
            if b in sys_map.values():
                continue
            spend()
            sb = y.system(b)
            free_b = _free_local(y, b)
            groups_x = [sorted(set(sa.states) - free_a), sorted(free_a)]
            groups_y = [sorted(set(sb.states) - free_b), sorted(free_b)]
            sys_map[a] = b
            for smap in _permutations_preserving(groups_x, groups_y, spend):
                state_map[a] = smap
                ok = True
                for a2 in sys_map:
                    if not (
                        functions_ok(a, a2)
                        and functions_ok(a2, a)
                    ):
                        ok = False
                        break
                if ok and rec(idx + 1):
                    return True
                state_map.pop(a, None)
            sys_map.pop(a, None)
        return False

    if rec(0):
        node_map = {
            (a, s): (sys_map[a], state_map[a][s])
            for a in sys_map
            for s in state_map[a]
        }
        return True, (dict(sys_map), node_map)
    return False, None


def relabel_qrt(q: Qrt, sys_map: Mapping[str, str], state_maps: Mapping[str, Mapping[str, str]]) -> Qrt:
    """A copy of q with systems and states renamed. Channel matrices and
    structure are untouched."""
    systems = []
    for s in q.systems:
        smap = state_maps.get(s.id, {})
        systems.append(
            SystemDecl(
                sys_map.get(s.id, s.id),
                s.dim,
                {smap.get(st, st): dm for st, dm in s.states.items()},
            )
        )
    channels = [
        ChannelDecl(d.id, sys_map.get(d.src, d.src), sys_map.get(d.dst, d.dst), d.channel)
        for d in q.channels
    ]
    trivial = sys_map.get(q.trivial_id, q.trivial_id) if q.trivial_id else None
    return Qrt(systems, channels, trivial, q.tol)


def sub_qrt(q: Qrt, keep: Iterable[str]) -> Qrt:
    """The restriction of q to the given systems: channels with any
    dropped endpoint are removed."""
    kept = set(keep)
    systems = [s for s in q.systems if s.id in kept]
    if not systems:
        raise StructuralError("a sub-theory needs at least one system")
    channels = [d for d in q.channels if d.src in kept and d.dst in kept]
    trivial = q.trivial_id if q.trivial_id in kept else None
    return Qrt(systems, channels, trivial, q.tol)
