"""The six benchmark problems, by id."""

from .base import KINDS, MKEY, Piece, Problem, ResidualReport, SupRequest
from .boussinesq import Boussinesq
from .heat import Heat
from .kdv import KdV
from .maxwell import Maxwell
from .poisson import Poisson
from .rayleigh import Rayleigh

REGISTRY = {c.name: c for c in (Heat, KdV, Maxwell, Boussinesq, Rayleigh, Poisson)}


def get(name: str):
    try:
        return REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(REGISTRY)}") from None


def make(name: str, p: float, q: float | None = None, **kw) -> Problem:
    return get(name)(p, q, **kw)


__all__ = ["KINDS", "MKEY", "Piece", "Problem", "ResidualReport", "SupRequest", "REGISTRY", "get", "make",
           "Heat", "KdV", "Maxwell", "Boussinesq", "Rayleigh", "Poisson"]
