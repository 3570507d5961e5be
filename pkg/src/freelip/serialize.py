"""File-level JSON I/O for spaces, molecules, functions and maps."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .errors import InputError, SpaceMismatch
from .functions import LipFunction
from .molecule import Molecule
from .operators import PointMap
from .space import FiniteMetricSpace

PathLike = Union[str, Path]


def _read_json(path: PathLike) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def write_json(path: PathLike, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_space(path: PathLike) -> FiniteMetricSpace:
    return FiniteMetricSpace.from_json_dict(_read_json(path))


def save_space(path: PathLike, space: FiniteMetricSpace) -> None:
    write_json(path, space.to_json_dict())


def load_molecule(path: PathLike, space: FiniteMetricSpace) -> Molecule:
    data = _read_json(path)
    if data.get("space") != space.name:
        raise SpaceMismatch(
            f"molecule file names space {data.get('space')!r}, "
            f"got {space.name!r}")
    return Molecule.from_json_dict(space, data)


def save_molecule(path: PathLike, mu: Molecule) -> None:
    write_json(path, mu.to_json_dict())


def load_lip_function(path: PathLike, space: FiniteMetricSpace) -> LipFunction:
    data = _read_json(path)
    if data.get("space") != space.name:
        raise SpaceMismatch(
            f"function file names space {data.get('space')!r}, "
            f"got {space.name!r}")
    return LipFunction.from_json_dict(space, data)


def load_map(path: PathLike, domain: FiniteMetricSpace,
             codomain: FiniteMetricSpace) -> PointMap:
    data = _read_json(path)
    if data.get("domain") != domain.name or data.get("codomain") != codomain.name:
        raise SpaceMismatch("map file names different spaces")
    return PointMap.from_json_dict(domain, codomain, data)


def save_map(path: PathLike, pmap: PointMap) -> None:
    write_json(path, pmap.to_json_dict())
