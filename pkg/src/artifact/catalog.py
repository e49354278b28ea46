"""Named fusion systems used by the tests and the command line."""

from __future__ import annotations

from functools import lru_cache

from .fusion import FusionSystem, fusion_of_group, generated_fusion, inner_fusion
from .groups import GroupError, Hom, catalog_group, p_part, sylow_subgroups

P_GROUPS = ("C2", "C3", "C4", "V4", "C2xC4", "D8", "Q8")
GROUP_SYSTEMS = (("S3", 3), ("S3", 2), ("S4", 2), ("S4", 3), ("A4", 2), ("A4", 3), ("GL32", 2))


def _smallest_prime(n: int) -> int:
    return next(d for d in range(2, n + 1) if n % d == 0)


@lru_cache(maxsize=None)
def group_system(name: str, p: int) -> FusionSystem:
    """``F_G`` on the first Sylow p-subgroup of the catalog group ``name``."""
    G = catalog_group(name)
    if p_part(G.order, p) == 1:
        raise GroupError(f"{p} does not divide |{name}|")
    sylow = sylow_subgroups(G, p)[0]
    if len(sylow) == G.order:
        return inner_fusion(G, p)
    return fusion_of_group(G, sylow, p, name=f"F_{name}(p={p})")


def parse_fusion(spec: str) -> FusionSystem:
    """``NAME`` for ``F_P`` of a p-group, or ``NAME:p`` for a group with a Sylow p-subgroup."""
    name, _, prime = spec.partition(":")
    G = catalog_group(name)
    p = int(prime) if prime else _smallest_prime(G.order)
    if not prime and p_part(G.order, p) != G.order:
        raise GroupError(f"{name} is not a p-group; write {name}:p")
    return group_system(name, p)


def catalog_systems(include_large: bool = True) -> list[tuple[str, FusionSystem]]:
    out = [(n, parse_fusion(n)) for n in P_GROUPS]
    for name, p in GROUP_SYSTEMS:
        if name == "GL32" and not include_large:
            continue
        out.append((f"{name}:{p}", group_system(name, p)))
    return out


@lru_cache(maxsize=None)
def nonsaturated_example() -> FusionSystem:
    """``F_{D8}`` with the central involution fused to a noncentral one (not saturated)."""
    P = catalog_group("D8")
    z = sorted(P.center())[1]
    t = next(x for x in range(1, P.order) if P.element_order(x) == 2 and x != z)
    fuse = Hom((0, z), (0, t))
    return generated_fusion(P, 2, [fuse], name="F_D8+<z~t>")
