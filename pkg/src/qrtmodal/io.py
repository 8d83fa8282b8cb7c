"""JSON file formats.

Complex entries are two-element [re, im] arrays; a matrix is a nested
list of rows of such pairs. Field order in files is irrelevant; output is
canonical (sorted keys) so identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import QrtModalError, ShapeError
from .kripke import KripkeModel, StarredModel
from .linalg import DensityMatrix, KrausChannel
from .qrt import ChannelDecl, Qrt, SystemDecl
from .translate import TranslationRecord


class FormatError(QrtModalError):
    """A file does not match the expected JSON shape."""


def encode_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def decode_matrix(data: Any) -> np.ndarray:
    try:
        rows = [[complex(entry[0], entry[1]) for entry in row] for row in data]
    except (TypeError, IndexError) as exc:
        raise FormatError(f"malformed matrix: {exc}") from exc
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise FormatError("matrix rows are empty or ragged")
    return np.array(rows, dtype=complex)


def qrt_to_dict(q: Qrt) -> dict:
    return {
        "systems": [
            {
                "id": s.id,
                "dim": s.dim,
                "states": {st: encode_matrix(dm.mat) for st, dm in sorted(s.states.items())},
            }
            for s in q.systems
        ],
        "channels": [
            {
                "id": d.id,
                "from": d.src,
                "to": d.dst,
                "kraus": [encode_matrix(k) for k in d.channel.kraus_ops],
            }
            for d in q.channels
        ],
        **({"trivial": q.trivial_id} if q.trivial_id else {}),
    }


def qrt_from_dict(data: dict, tol: Tolerances = DEFAULT_TOLERANCES) -> Qrt:
    try:
        systems = [
            SystemDecl(
                str(s["id"]),
                int(s["dim"]),
                {
                    str(st): DensityMatrix(decode_matrix(mat), tol)
                    for st, mat in s.get("states", {}).items()
                },
            )
            for s in data["systems"]
        ]
        channels = [
            ChannelDecl(
                str(c["id"]),
                str(c["from"]),
                str(c["to"]),
                KrausChannel([decode_matrix(k) for k in c["kraus"]]),
            )
            for c in data.get("channels", [])
        ]
    except (KeyError, TypeError, ValueError, ShapeError) as exc:
        raise FormatError(f"malformed theory file: {exc}") from exc
    return Qrt(systems, channels, data.get("trivial"), tol)


def model_to_dict(m: KripkeModel, order=None) -> dict:
    out = {
        "worlds": sorted(m.worlds),
        "access": sorted([a, b] for a, b in m.access),
        "domain": sorted(m.domain),
        "domains": {w: sorted(m.domains[w]) for w in sorted(m.worlds)},
        "interp": {a: m.interp[a] for a in sorted(m.domain)},
    }
    if order is not None:
        out["order"] = sorted([a, b] for a, b in order)
    return out


def model_from_dict(data: dict) -> KripkeModel | StarredModel:
    try:
        model = KripkeModel(
            data["worlds"],
            [tuple(p) for p in data.get("access", [])],
            data["domain"],
            {w: set(v) for w, v in data.get("domains", {}).items()},
            {a: int(v) for a, v in data["interp"].items()},
        )
        if "order" in data:
            return StarredModel(model, [tuple(p) for p in data["order"]])
        return model
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed model file: {exc}") from exc


def record_to_dict(rec: TranslationRecord) -> dict:
    """A model file with the translation's name maps alongside, so the
    output can be fed straight back into model-consuming commands."""
    out = model_to_dict(rec.model, rec.order)
    out["world_of"] = dict(sorted(rec.world_of.items()))
    out["atom_of"] = {
        f"{s}.{st}": atom for (s, st), atom in sorted(rec.atom_of.items())
    }
    if rec.c_world is not None:
        out["c_world"] = rec.c_world
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def load_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def save_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))
