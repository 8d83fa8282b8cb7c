"""The strict symmetric monoidal category built on a starred model.

Objects are finite atom sets (conjunctions) normalized by dropping the
unit atom and deduplicating; the tensor is normalized union and the unit
is the empty set. A one-component arrow x -> y exists when x precedes y in
the domain preorder and some accessible world pair hosts the two atoms;
multi-component arrows are tuples of such components, with unit padding
when the sides have different sizes.

Internally objects are bitmasks over the non-unit atoms, which keeps the
exhaustive law checks cheap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .config import OBJECT_CAP
from .errors import StructuralError
from .kripke import StarredModel
from .translate import unit_world_candidates


@dataclass(frozen=True)
class SmcMorphism:
    """A morphism as its component pairing. Every source atom appears on
    the left, every target atom on the right; the unit atom may pad either
    side. Morphism equality is pairing equality."""

    source: frozenset
    target: frozenset
    pairs: frozenset


class SmcCategory:
    """Category description: atoms, a hom-existence oracle, and the
    tensor. Objects are enumerated up to a size cap."""

    def __init__(self, sm: StarredModel, object_cap: int = OBJECT_CAP):
        m = sm.model
        candidates = unit_world_candidates(m)
        if not candidates:
            raise StructuralError("no unit world: the model cannot host the category")
        # the unit atom must be true; several worlds may qualify shape-wise
        c_world = next(
            (c for c in candidates if m.interp[next(iter(m.domains[c]))] == 1),
            None,
        )
        if c_world is None:
            raise StructuralError("the unit atom must be true")
        (p_c,) = m.domains[c_world]
        self.starred = sm
        self.c_world = c_world
        self.unit_atom = p_c
        self.atoms = tuple(sorted(m.domain - {p_c}))
        self.object_cap = object_cap
        self._index = {a: i for i, a in enumerate(self.atoms)}
        self._hosts = {
            a: frozenset(w for w in m.worlds if a in m.domains[w])
            for a in m.domain
        }

    def arrow(self, a: str, b: str) -> bool:
        """One-component arrow condition between atoms (unit included)."""
        sm = self.starred
        if (a, b) not in sm.order:
            return False
        access = sm.model.access
        return any(
            (w, u) in access for w in self._hosts[a] for u in self._hosts[b]
        )

    # -- objects as bitmasks ----------------------------------------------------

    def mask_of(self, atoms) -> int:
        mask = 0
        for a in atoms:
            if a == self.unit_atom:
                continue  # the unit is absorbed
            mask |= 1 << self._index[a]
        return mask

    def atoms_of(self, mask: int) -> frozenset:
        return frozenset(a for a, i in self._index.items() if mask >> i & 1)

    @cached_property
    def objects(self) -> tuple:
        """All normalized objects with at most object_cap atoms."""
        out = []
        for size in range(self.object_cap + 1):
            for combo in itertools.combinations(range(len(self.atoms)), size):
                out.append(sum(1 << i for i in combo))
        return tuple(sorted(out))

    def tensor(self, x: int, y: int) -> int:
        return x | y

    unit = 0

    @cached_property
    def _out_masks(self) -> tuple:
        """Per atom: bitmask of atoms it has an arrow into, plus a unit flag."""
        masks, to_unit = [], []
        for a in self.atoms:
            m = 0
            for b in self.atoms:
                if self.arrow(a, b):
                    m |= 1 << self._index[b]
            masks.append(m)
            to_unit.append(self.arrow(a, self.unit_atom))
        return tuple(masks), tuple(to_unit)

    @cached_property
    def _in_masks(self) -> tuple:
        masks, from_unit = [], []
        for b in self.atoms:
            m = 0
            for a in self.atoms:
                if self.arrow(a, b):
                    m |= 1 << self._index[a]
            masks.append(m)
            from_unit.append(self.arrow(self.unit_atom, b))
        return tuple(masks), tuple(from_unit)

    def hom_nonempty(self, x: int, y: int) -> bool:
        """A pairing exists iff every source atom has some arrow into the
        target (or the unit) and every target atom is hit from the source
        (or the unit)."""
        out_masks, to_unit = self._out_masks
        in_masks, from_unit = self._in_masks
        for i in range(len(self.atoms)):
            if x >> i & 1 and not (out_masks[i] & y or to_unit[i]):
                return False
            if y >> i & 1 and not (in_masks[i] & x or from_unit[i]):
                return False
        return True

    def canonical_morphism(self, x: int, y: int) -> SmcMorphism | None:
        """A concrete pairing witnessing hom(x, y), if any: each source
        atom goes to its least admissible target, uncovered target atoms
        are fed from the unit."""
        if not self.hom_nonempty(x, y):
            return None
        pairs = set()
        covered = 0
        xs = sorted(self.atoms_of(x))
        ys = sorted(self.atoms_of(y))
        for a in xs:
            choice = next((b for b in ys if self.arrow(a, b)), None)
            if choice is None:
                pairs.add((a, self.unit_atom))
            else:
                pairs.add((a, choice))
                covered |= 1 << self._index[choice]
        for b in ys:
            if covered >> self._index[b] & 1:
                continue
            # an uncovered target is fed from the unit when possible,
            # otherwise by a second component out of some source atom
            if self.arrow(self.unit_atom, b):
                pairs.add((self.unit_atom, b))
            else:
                a = next((a for a in xs if self.arrow(a, b)), None)
                if a is None:
                    return None
                pairs.add((a, b))
        return SmcMorphism(self.atoms_of(x), self.atoms_of(y), frozenset(pairs))

    def identity_morphism(self, x: int) -> SmcMorphism | None:
        atoms = self.atoms_of(x)
        if any(not self.arrow(a, a) for a in atoms):
            return None
        return SmcMorphism(atoms, atoms, frozenset((a, a) for a in atoms))

    def valid_morphism(self, mor: SmcMorphism) -> bool:
        lefts = {a for a, _ in mor.pairs}
        rights = {b for _, b in mor.pairs}
        if not mor.source <= lefts or not (lefts - mor.source) <= {self.unit_atom}:
            return False
        if not mor.target <= rights or not (rights - mor.target) <= {self.unit_atom}:
            return False
        return all(self.arrow(a, b) for a, b in mor.pairs)

    def compose_morphisms(self, g: SmcMorphism, f: SmcMorphism) -> SmcMorphism:
        """Componentwise composite of f: x -> y and g: y -> z."""
        if f.target != g.source:
            raise StructuralError("morphisms are not composable")
        pairs = set()
        for a, b in f.pairs:
            if b == self.unit_atom:
                pairs.add((a, self.unit_atom))
            else:
                for b2, c in g.pairs:
                    if b2 == b:
                        pairs.add((a, c))
        for b2, c in g.pairs:
            if b2 == self.unit_atom:
                pairs.add((self.unit_atom, c))
        pairs.discard((self.unit_atom, self.unit_atom))
        return SmcMorphism(f.source, g.target, frozenset(pairs))

    def free_objects(self) -> list:
        """Objects with a morphism out of the unit, as atom sets."""
        return [
            self.atoms_of(x) for x in self.objects if self.hom_nonempty(self.unit, x)
        ]


def build_smc(sm: StarredModel, object_cap: int = OBJECT_CAP) -> SmcCategory:
    return SmcCategory(sm, object_cap)


def category_summary(cat: SmcCategory) -> dict:
    """JSON-ready summary: object count, free objects, law report."""
    return {
        "unit_atom": cat.unit_atom,
        "n_atoms": len(cat.atoms),
        "n_objects": len(cat.objects),
        "object_cap": cat.object_cap,
        "free_objects": [sorted(x) for x in cat.free_objects()],
        "laws": verify_smc_laws(cat),
    }


def free_objects(cat: SmcCategory) -> list:
    return cat.free_objects()


def _hom_matrix(cat: SmcCategory) -> np.ndarray:
    objs = np.array(cat.objects, dtype=np.int64)
    n = len(objs)
    out_masks, to_unit = cat._out_masks
    in_masks, from_unit = cat._in_masks
    n_atoms = len(cat.atoms)
    # bad_src[y]: atoms with no arrow into y nor the unit
    bad_src = np.zeros(n, dtype=np.int64)
    bad_tgt = np.zeros(n, dtype=np.int64)
    for i in range(n_atoms):
        if not to_unit[i]:
            miss = (objs & out_masks[i]) == 0
            bad_src[miss] |= 1 << i
        if not from_unit[i]:
            miss = (objs & in_masks[i]) == 0
            bad_tgt[miss] |= 1 << i
    h = (objs[:, None] & bad_src[None, :]) == 0
    h &= (objs[None, :] & bad_tgt[:, None]) == 0
    return h


def verify_smc_laws(cat: SmcCategory, morphism_samples: int = 60) -> dict:
    """Exhaustively check the tensor laws over the enumerated objects and
    the hom-level laws (identities, transitivity, composition) with
    deterministic sampling for explicit morphism arithmetic."""
    objs = np.array(cat.objects, dtype=np.int64)
    n = len(objs)
    report: dict = {"n_objects": int(n)}

    sym = objs[:, None] | objs[None, :]
    report["tensor_symmetric"] = bool(np.array_equal(sym, sym.T))
    report["tensor_idempotent"] = bool(np.array_equal(np.diagonal(sym), objs))
    report["tensor_unit"] = bool(
        np.array_equal(objs | cat.unit, objs) and np.array_equal(cat.unit | objs, objs)
    )
    assoc_ok = True
    chunk = max(1, (1 << 22) // max(n * n, 1))
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        left = sym[lo:hi, :, None] | objs[None, None, :]
        right = objs[lo:hi, None, None] | sym[None, :, :]
        if not np.array_equal(left, right):
            assoc_ok = False
            break
    report["tensor_associative"] = bool(assoc_ok)

    ident_bad = [
        cat.atoms_of(x) for x in cat.objects if cat.identity_morphism(int(x)) is None
    ]
    report["identities"] = not ident_bad
    if ident_bad:
        report["identity_counterexample"] = sorted(map(sorted, ident_bad))[:3]

    h = _hom_matrix(cat)
    reach2 = (h.astype(np.float32) @ h.astype(np.float32)) > 0
    trans_bad = reach2 & ~h
    report["hom_transitive"] = not bool(trans_bad.any())
    if trans_bad.any():
        i, j = np.argwhere(trans_bad)[0]
        k = int(np.argmax(h[i].astype(np.uint8) & h[:, j].astype(np.uint8)))
        report["hom_counterexample"] = [
            sorted(cat.atoms_of(int(objs[i]))),
            sorted(cat.atoms_of(int(objs[k]))),
            sorted(cat.atoms_of(int(objs[j]))),
        ]

    # explicit morphism arithmetic on a deterministic sample of hom pairs
    pairs = [(i, j) for i in range(n) for j in range(n) if h[i, j]]
    step = max(1, len(pairs) // morphism_samples)
    sample = pairs[::step]
    compose_ok = True
    identity_ok = True
    assoc_m_ok = True
    for i, j in sample:
        f = cat.canonical_morphism(int(objs[i]), int(objs[j]))
        if f is None or not cat.valid_morphism(f):
            compose_ok = False
            continue
        idx = cat.identity_morphism(int(objs[i]))
        idy = cat.identity_morphism(int(objs[j]))
        if idx is None or idy is None:
            identity_ok = False
            continue
        if cat.compose_morphisms(f, idx) != f or cat.compose_morphisms(idy, f) != f:
            identity_ok = False
        for k in range(n):
            if h[j, k]:
                g = cat.canonical_morphism(int(objs[j]), int(objs[k]))
                gf = cat.compose_morphisms(g, f)
                if not cat.valid_morphism(gf):
                    compose_ok = False
                for l in range(n):
                    if h[k, l]:
                        e = cat.canonical_morphism(int(objs[k]), int(objs[l]))
                        if cat.compose_morphisms(e, gf) != cat.compose_morphisms(
                            cat.compose_morphisms(e, g), f
                        ):
                            assoc_m_ok = False
                        break
                break
    report["compose_closed"] = compose_ok
    report["compose_identity"] = identity_ok
    report["compose_associative"] = assoc_m_ok

    report["ok"] = all(
        report[k]
        for k in (
            "tensor_symmetric",
            "tensor_idempotent",
            "tensor_unit",
            "tensor_associative",
            "identities",
            "hom_transitive",
            "compose_closed",
            "compose_identity",
            "compose_associative",
        )
    )
    return report
