"""Mine Petri-net runs and system nets from multi-agent event logs."""

import json
from os import PathLike
from typing import Iterable, Union

from . import _sysmine
from ._sysmine import Error, StepError

Path = Union[str, PathLike]
ModuleLike = Union[dict, str]

__all__ = [
    "Error",
    "StepError",
    "mine_run",
    "mine_system",
    "check",
    "compose",
    "commutes",
    "isomorphic",
    "harmonic_pairs",
    "to_dot",
]


def _text(module: ModuleLike) -> str:
    return module if isinstance(module, str) else json.dumps(module)


def _parsed(result: dict) -> dict:
    artifacts = {
        name: json.loads(body) if name.endswith(".json") else body
        for name, body in result["artifacts"].items()
    }
    return {**result, "artifacts": artifacts}


def mine_run(log: Path, roles: Path, dot: bool = False) -> dict:
    return _parsed(_sysmine.mine_run(str(log), str(roles), dot))


def mine_system(log: Path, roles: Path, structure: Path, place_roles: Path,
                priority: Iterable[str] = (), dot: bool = False) -> dict:
    return _parsed(_sysmine.mine_system(str(log), str(roles), str(structure),
                                        str(place_roles), list(priority), dot))


def check(a: ModuleLike, b: ModuleLike) -> list:
    return _sysmine.check(_text(a), _text(b))


def compose(a: ModuleLike, b: ModuleLike) -> dict:
    return json.loads(_sysmine.compose(_text(a), _text(b)))


def commutes(a: ModuleLike, b: ModuleLike) -> bool:
    return _sysmine.commutes(_text(a), _text(b))


def isomorphic(a: ModuleLike, b: ModuleLike) -> bool:
    return _sysmine.isomorphic(_text(a), _text(b))


def harmonic_pairs(a: ModuleLike, b: ModuleLike) -> list:
    return _sysmine.harmonic_pairs(_text(a), _text(b))


def to_dot(artifact: ModuleLike, structure: Path = "") -> str:
    return _sysmine.to_dot(_text(artifact), str(structure))
