"""Translation of finite theories into variable-domain S4 models.

Worlds are the systems, atoms are the qualified named states, accessibility
records channel existence, and an atom is true exactly when its state is
free. The starred translation additionally carries the convertibility
preorder onto the global domain. The unit axiom is enforced on every
generated model: when a trivial system exists, its unique atom is true.

All theorem-condition oracles in this module work at the labeled
(named-state) level; reports should be read with that scope in mind.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .config import MAX_ISO_NODES
from .errors import ResourceLimitError, StructuralError
from .kripke import (
    KripkeModel,
    StarredModel,
    is_s4,
    is_sub_model,
    models_isomorphic,
    starred_isomorphic,
)
from .qrt import Qrt, node_name, qrt_isomorphic


@dataclass(frozen=True)
class TranslationRecord:
    """A translated theory with both name maps, so atoms can be
    round-tripped back to states."""

    source: Qrt
    model: KripkeModel
    world_of: dict        # system id -> world id
    atom_of: dict         # (system id, state id) -> atom id
    c_world: str | None
    order: frozenset | None = None

    @property
    def starred(self) -> StarredModel:
        if self.order is None:
            raise StructuralError("record was built without a preorder")
        return StarredModel(self.model, self.order)

    def atom_interp(self, atom: str) -> int:
        return self.model.interp[atom]


def _require_ready(q: Qrt) -> None:
    report = q.validate()
    if not report.ok:
        raise StructuralError(f"source theory is invalid: {report.text()}")
    if not q.is_composition_complete():
        raise StructuralError("source theory is not composition complete")


def to_model(q: Qrt) -> TranslationRecord:
    """Build the S4 model of a valid, composition-complete theory."""
    _require_ready(q)
    world_of = {s.id: s.id for s in q.systems}
    atom_of = {node: node_name(node) for node in q.nodes}
    worlds = set(world_of.values())
    access = {(a, b) for (a, b) in q.functions}
    domains = {s.id: frozenset(atom_of[(s.id, st)] for st in s.states) for s in q.systems}
    free = q.free_states
    interp = {atom_of[n]: 1 if n in free else 0 for n in q.nodes}
    c_world = None
    if q.trivial_node is not None:
        c_world = world_of[q.trivial_id]
        interp[atom_of[q.trivial_node]] = 1  # the unit atom is an axiom
    model = KripkeModel(worlds, access, set(atom_of.values()), domains, interp)
    ok, witness = is_s4(model)
    if not ok:
        raise StructuralError(f"translated model is not S4 (witness {witness})")
    return TranslationRecord(q, model, world_of, atom_of, c_world)


def to_starred_model(q: Qrt) -> TranslationRecord:
    """As to_model, with the convertibility preorder carried onto atoms."""
    rec = to_model(q)
    order = frozenset(
        (rec.atom_of[a], rec.atom_of[b]) for a, b in q.preorder
    )
    return TranslationRecord(
        rec.source, rec.model, rec.world_of, rec.atom_of, rec.c_world, order
    )


# -- conditions under which two translations are isomorphic -------------------


def _state_bijections(x: Qrt, y: Qrt, sys_map: dict, spend):
    """Per-system state bijections preserving the truth value of atoms
    (freeness, with the unit atom true)."""

    def truth(q: Qrt, sid: str, st: str) -> int:
        node = (sid, st)
        if node == q.trivial_node:
            return 1
        return 1 if node in q.free_states else 0

    per_system: list[list[dict]] = []
    for a, b in sys_map.items():
        sa, sb = x.system(a), y.system(b)
        if len(sa.states) != len(sb.states):
            return
        xs_by = {0: [], 1: []}
        ys_by = {0: [], 1: []}
        for st in sorted(sa.states):
            xs_by[truth(x, a, st)].append(st)
        for st in sorted(sb.states):
            ys_by[truth(y, b, st)].append(st)
        if any(len(xs_by[v]) != len(ys_by[v]) for v in (0, 1)):
            return
        options = []
        for perm0 in itertools.permutations(ys_by[0]):
            for perm1 in itertools.permutations(ys_by[1]):
                spend()
                options.append(
                    dict(zip(xs_by[0], perm0)) | dict(zip(xs_by[1], perm1))
                )
        per_system.append(options)
    sys_ids = list(sys_map)
    for combo in itertools.product(*per_system):
        spend()
        yield dict(zip(sys_ids, combo))


def _image_cover_ok(x: Qrt, y: Qrt, sys_map: dict, smaps: dict) -> bool:
    """Every induced function's image set must be exactly a union of
    image sets of functions in the other theory, both directions, under
    the given bijections."""

    def covers(src: Qrt, dst: Qrt, fwd_sys: dict, fwd_states: dict) -> bool:
        for (a, b), fns in src.functions.items():
            a2, b2 = fwd_sys[a], fwd_sys[b]
            dst_fns = dst.functions.get((a2, b2), {})
            dst_images = [frozenset(img for _, img in key) for key in dst_fns]
            for key in fns:
                target = frozenset(fwd_states[b][img] for _, img in key)
                union: set = set()
                for im in dst_images:
                    if im <= target:
                        union |= im
                if union != target:
                    return False
        return True

    inv_sys = {v: k for k, v in sys_map.items()}
    inv_states = {
        sys_map[a]: {v: k for k, v in smap.items()} for a, smap in smaps.items()
    }
    return covers(x, y, sys_map, smaps) and covers(y, x, inv_sys, inv_states)


def iso_conditions(
    x: Qrt, y: Qrt, max_nodes: int = MAX_ISO_NODES
) -> dict:
    """Evaluate, at the labeled level, the three conditions that govern
    when two theories have isomorphic translations:

      i   a system bijection with matching dimensions exists,
      ii  some such bijection also matches named-state counts and carries
          the free set (atom truth values) onto the other free set,
      iii under a bijection found in (ii), every induced function's image
          is exactly a union of images of the other theory's functions on
          the corresponding system pair (checked in both directions; true
          if at least one candidate bijection works).
    """
    used = [0]

    def spend():
        used[0] += 1
        if used[0] > max_nodes:
            raise ResourceLimitError(f"condition search exceeded {max_nodes} nodes")

    xs = sorted(s.id for s in x.systems)
    ys = sorted(s.id for s in y.systems)
    out = {"i": False, "ii": False, "iii": False}
    if len(xs) != len(ys):
        return out

    def bijections(match_dims: bool):
        for perm in itertools.permutations(ys):
            spend()
            m = dict(zip(xs, perm))
            if match_dims and any(
                x.system(a).dim != y.system(b).dim for a, b in m.items()
            ):
                continue
            yield m

    out["i"] = any(True for _ in bijections(match_dims=True))
    # (ii)/(iii) search over dim-matching bijections; if none exist the
    # remaining conditions are reported relative to count-matching ones.
    pool = list(bijections(match_dims=True)) or list(bijections(match_dims=False))
    for sys_map in pool:
        for smaps in _state_bijections(x, y, sys_map, spend):
            out["ii"] = True
            if _image_cover_ok(x, y, sys_map, smaps):
                out["iii"] = True
                return out
    return out


# -- conditions a model must satisfy to be a translation image ----------------


def true_atoms(m: KripkeModel, w: str) -> frozenset:
    return frozenset(p for p in m.domains[w] if m.interp[p] == 1)


def unit_world_candidates(m: KripkeModel) -> list:
    """Worlds that can play the unit role: singleton domain, disjoint
    from every other domain, with an edge to every world carrying a true
    atom. Sorted; possibly empty."""
    needy = [w for w in m.worlds if true_atoms(m, w)]
    out = []
    for c in sorted(m.worlds):
        if len(m.domains[c]) != 1:
            continue
        if any(m.domains[c] & m.domains[w] for w in m.worlds if w != c):
            continue
        if all((c, w) in m.access for w in needy):
            out.append(c)
    return out


def image_conditions(m: KripkeModel) -> dict:
    """Necessary conditions for a model to be the translation of some
    theory:

      i   truth is monotone along accessibility: an edge never leads from
          a world with true atoms to one with none,
      ii  a unit world exists: singleton domain, disjoint from every other
          domain, with an edge to every world carrying a true atom.

    Returns {"i": bool, "ii": bool, "c_world": world or None, "witness_i": ...}.
    """
    witness = None
    ok_i = True
    for (w, u) in sorted(m.access):
        if not true_atoms(m, u) and true_atoms(m, w):
            ok_i = False
            witness = (w, u)
            break
    candidates = unit_world_candidates(m)
    c_world = candidates[0] if candidates else None
    return {"i": ok_i, "ii": c_world is not None, "c_world": c_world, "witness_i": witness}


# -- functor laws --------------------------------------------------------------


def verify_functoriality(
    x: Qrt, relabelings: Sequence[Qrt] = (), sub_qrts: Sequence[Qrt] = ()
) -> dict:
    """Check that translation respects identity, isomorphism, and
    inclusion: relabeled sources give isomorphic models, restrictions give
    sub-models, and the identity inclusion is preserved."""
    base = to_model(x)
    report: dict = {"identity": False, "relabelings": [], "sub_models": [], "nested": None}
    rebuilt = to_model(x)
    report["identity"] = rebuilt.model == base.model and is_sub_model(base.model, base.model)
    for r in relabelings:
        ok, _ = models_isomorphic(base.model, to_model(r).model)
        report["relabelings"].append(bool(ok))
    subs = list(sub_qrts)
    for s in subs:
        report["sub_models"].append(bool(is_sub_model(to_model(s).model, base.model)))
    # a composite of two inclusions is itself an inclusion
    for s in subs:
        if len(s.systems) > 1:
            from .qrt import sub_qrt

            inner = sub_qrt(s, [t.id for t in s.systems][:-1])
            report["nested"] = bool(
                is_sub_model(to_model(inner).model, to_model(s).model)
                and is_sub_model(to_model(inner).model, base.model)
            )
            break
    oks = [report["identity"], *report["relabelings"], *report["sub_models"]]
    if report["nested"] is not None:
        oks.append(report["nested"])
    report["ok"] = all(oks)
    return report


def verify_starred_injectivity(
    pairs: Iterable[tuple[Qrt, Qrt]],
    max_nodes: int = MAX_ISO_NODES,
    labels: Sequence[str] | None = None,
) -> dict:
    """For each pair: starred-isomorphic translations must come from
    labeled-isomorphic sources. Reports every violation as a falsification
    candidate; search-cap overruns are recorded as inconclusive."""
    entries = []
    falsifications = 0
    inconclusive = 0
    for idx, (a, b) in enumerate(pairs):
        label = labels[idx] if labels else str(idx)
        entry: dict = {"pair": label}
        try:
            star_a = to_starred_model(a).starred
            star_b = to_starred_model(b).starred
            star_ok, star_wit = starred_isomorphic(star_a, star_b, max_nodes)
            entry["starred_isomorphic"] = bool(star_ok)
            if star_ok:
                src_ok, src_wit = qrt_isomorphic(a, b, max_nodes)
                entry["sources_isomorphic"] = bool(src_ok)
                if not src_ok:
                    entry["verdict"] = "falsification-candidate"
                    entry["witness"] = {
                        "world_map": star_wit[0],
                        "atom_map": star_wit[1],
                    }
                    falsifications += 1
                else:
                    entry["verdict"] = "consistent"
            else:
                entry["verdict"] = "consistent"
        except ResourceLimitError as exc:
            entry["verdict"] = "inconclusive"
            entry["reason"] = str(exc)
            inconclusive += 1
        entries.append(entry)
    return {
        "entries": entries,
        "falsifications": falsifications,
        "inconclusive": inconclusive,
        "ok": falsifications == 0,
    }
