"""Seeded random generation of theories, models, and formulas.

The same seed always yields the same family. Channels are sampled from
isometry-based templates that act exactly on the named universe
(preparations, tracing, constant channels, deterministic basis-frame
functions); occasionally a raw random isometry channel is attempted and
kept only if its images land within the matching radius of named states,
otherwise it is rejected and the slot is resampled from the exact
templates. Exceeding the resampling budget raises GenerationError.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import GenerationError
from .formulas import Atom, Box, Diamond, Formula, Implies, Not
from .kripke import KripkeModel
from .linalg import (
    DensityMatrix,
    apply_channel,
    constant_channel,
    function_channel,
    preparation_channel,
    random_cptp_channel,
    random_density,
    random_isometry,
    scalar_one,
    trace_channel,
    trace_distance,
)
from .qrt import ChannelDecl, Qrt, SystemDecl, complete_composition, relabel_qrt, sub_qrt
from .relations import reflexive_transitive_closure

_SYSTEM_NAMES = ("A", "B", "G", "H")
_MIN_STATE_GAP = 1e-2  # named states must be clearly separated


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int
    n_systems: int = 3
    dims: tuple = (1, 2, 3)
    states_per_system: int = 3
    channel_density: float = 0.5
    ensure_trivial: bool = True

    def __post_init__(self):
        if not 1 <= self.n_systems <= 4:
            raise ValueError("n_systems must be between 1 and 4")
        if not self.dims or not set(self.dims) <= {1, 2, 3}:
            raise ValueError("dims must be a non-empty subset of {1, 2, 3}")
        if not 1 <= self.states_per_system <= 4:
            raise ValueError("states_per_system must be between 1 and 4")
        if not 0.0 <= self.channel_density <= 1.0:
            raise ValueError("channel_density must lie in [0, 1]")


class _Budget:
    def __init__(self, cap: int):
        self.cap = cap
        self.used = 0

    def reject(self):
        self.used += 1
        if self.used > self.cap:
            raise GenerationError(
                f"resampling budget exhausted after {self.used} rejections"
            )


def _random_frame(rng: np.random.Generator, dim: int) -> np.ndarray:
    return random_isometry(rng, dim, dim)


def _distinct_states(
    rng: np.random.Generator, dim: int, count: int, budget: _Budget
) -> list[DensityMatrix]:
    out: list[DensityMatrix] = []
    while len(out) < count:
        cand = random_density(rng, dim, pure=bool(rng.integers(2)))
        if all(trace_distance(cand, prev) > _MIN_STATE_GAP for prev in out):
            out.append(cand)
        else:
            budget.reject()
    return out


def _snap_test(q_states: dict, channel, src_states: dict, tol) -> bool:
    """True when every named source image lies within the matching radius
    of exactly one named target state."""
    for dm in src_states.values():
        image = apply_channel(channel, dm)
        hits = [
            st for st, named in q_states.items()
            if trace_distance(image, named) <= tol
        ]
        if len(hits) != 1:
            return False
    return True


def generate_qrt(
    cfg: GeneratorConfig,
    index: int = 0,
    max_resamples: int = 200,
    raw_probability: float = 0.1,
) -> Qrt:
    """One deterministic theory from (seed, index): validated and
    composition-complete."""
    rng = np.random.default_rng([cfg.seed, index])
    budget = _Budget(max_resamples)

    nontrivial_dims = [d for d in cfg.dims if d > 1] or [2]
    systems: list[SystemDecl] = []
    frames: dict[str, np.ndarray | None] = {}
    basis_index: dict[str, list[int]] = {}

    n_regular = cfg.n_systems - (1 if cfg.ensure_trivial else 0)
    if cfg.ensure_trivial:
        systems.append(SystemDecl("c", 1, {"one": scalar_one()}))
        frames["c"] = None
        basis_index["c"] = []
    for k in range(n_regular):
        sid = _SYSTEM_NAMES[k]
        dim = int(rng.choice(nontrivial_dims))
        classical = rng.random() < 0.6
        if classical:
            n_states = int(rng.integers(1, min(cfg.states_per_system, dim) + 1))
            frame = _random_frame(rng, dim)
            idx = list(rng.permutation(dim)[:n_states])
            states = {
                f"s{i}": DensityMatrix(
                    np.outer(frame[:, j], frame[:, j].conj())
                )
                for i, j in enumerate(idx)
            }
            frames[sid] = frame
            basis_index[sid] = [int(j) for j in idx]
        else:
            n_states = int(rng.integers(1, cfg.states_per_system + 1))
            states = {
                f"s{i}": dm
                for i, dm in enumerate(_distinct_states(rng, dim, n_states, budget))
            }
            frames[sid] = None
            basis_index[sid] = []
        systems.append(SystemDecl(sid, dim, states))

    by_id = {s.id: s for s in systems}
    channels: list[ChannelDecl] = []
    counter = 0

    def next_id() -> str:
        nonlocal counter
        counter += 1
        return f"ch{counter}"

    for src in systems:
        for dst in systems:
            if src.dim == 1 and dst.dim == 1:
                continue  # only the identity lives there
            if rng.random() >= cfg.channel_density:
                continue
            # an occasional raw isometry channel, kept only if it happens
            # to respect the named universe
            if src.dim > 1 and dst.dim > 1 and rng.random() < raw_probability:
                raw = random_cptp_channel(rng, src.dim, dst.dim)
                if _snap_test(dst.states, raw, src.states, DEFAULT_TOLERANCES.eps_match):
                    channels.append(ChannelDecl(next_id(), src.id, dst.id, raw))
                    continue
                budget.reject()
            channels.append(_template_channel(rng, src, dst, frames, basis_index, next_id))

    q = complete_composition(Qrt(systems, channels))
    report = q.validate()
    if not report.ok:
        raise GenerationError(f"generated theory failed validation: {report.text()}")
    return q


def _template_channel(rng, src, dst, frames, basis_index, next_id) -> ChannelDecl:
    dst_names = sorted(dst.states)
    if src.dim == 1:
        target = dst_names[int(rng.integers(len(dst_names)))]
        return ChannelDecl(
            next_id(), src.id, dst.id, preparation_channel(dst.states[target])
        )
    if dst.dim == 1:
        return ChannelDecl(next_id(), src.id, dst.id, trace_channel(src.dim))
    if frames.get(src.id) is not None and frames.get(dst.id) is not None:
        # deterministic function on basis indices; named states map to
        # named states exactly, unnamed basis vectors go to a named target
        src_named = basis_index[src.id]
        dst_named = basis_index[dst.id]
        f = [dst_named[int(rng.integers(len(dst_named)))] for _ in range(src.dim)]
        for k in src_named:
            f[k] = dst_named[int(rng.integers(len(dst_named)))]
        return ChannelDecl(
            next_id(),
            src.id,
            dst.id,
            function_channel(f, src.dim, dst.dim, frames[src.id], frames[dst.id]),
        )
    target = dst_names[int(rng.integers(len(dst_names)))]
    return ChannelDecl(
        next_id(), src.id, dst.id, constant_channel(dst.states[target], src.dim)
    )


def generate_family(cfg: GeneratorConfig, count: int, **kwargs) -> list[Qrt]:
    return [generate_qrt(cfg, index=i, **kwargs) for i in range(count)]


# -- random relabelings and restrictions ---------------------------------------


def random_relabeling(q: Qrt, rng: np.random.Generator) -> Qrt:
    sys_ids = [s.id for s in q.systems]
    new_sys = [f"X{i}" for i in rng.permutation(len(sys_ids))]
    sys_map = dict(zip(sys_ids, new_sys))
    state_maps = {}
    for s in q.systems:
        names = sorted(s.states)
        perm = rng.permutation(len(names))
        state_maps[s.id] = {names[i]: f"t{int(perm[i])}" for i in range(len(names))}
    return relabel_qrt(q, sys_map, state_maps)


def random_sub_qrt(q: Qrt, rng: np.random.Generator) -> Qrt:
    sys_ids = sorted(s.id for s in q.systems)
    if len(sys_ids) == 1:
        return sub_qrt(q, sys_ids)
    n_keep = int(rng.integers(1, len(sys_ids)))
    keep = [sys_ids[i] for i in sorted(rng.permutation(len(sys_ids))[:n_keep])]
    return sub_qrt(q, keep)


# -- random models and formulas (for the logic kernel checks) ------------------


def random_model(
    rng: np.random.Generator,
    max_worlds: int = 4,
    max_atoms: int = 6,
    s4: bool = False,
) -> KripkeModel:
    n_w = int(rng.integers(1, max_worlds + 1))
    n_a = int(rng.integers(1, max_atoms + 1))
    worlds = [f"w{i}" for i in range(n_w)]
    atoms = [f"a{i}" for i in range(n_a)]
    access = {
        (w, u) for w in worlds for u in worlds if rng.random() < 0.4
    }
    if s4:
        access = set(reflexive_transitive_closure(access, worlds))
    domains = {
        w: frozenset(a for a in atoms if rng.random() < 0.6) for w in worlds
    }
    interp = {a: int(rng.integers(2)) for a in atoms}
    return KripkeModel(worlds, access, atoms, domains, interp)


def random_formula(
    rng: np.random.Generator, atoms: list[str], max_depth: int = 5
) -> Formula:
    if max_depth == 0 or rng.random() < 0.3:
        return Atom(atoms[int(rng.integers(len(atoms)))])
    kind = int(rng.integers(4))
    if kind == 0:
        return Not(random_formula(rng, atoms, max_depth - 1))
    if kind == 1:
        return Box(random_formula(rng, atoms, max_depth - 1))
    if kind == 2:
        return Diamond(random_formula(rng, atoms, max_depth - 1))
    return Implies(
        random_formula(rng, atoms, max_depth - 1),
        random_formula(rng, atoms, max_depth - 1),
    )
