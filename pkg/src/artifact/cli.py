"""Command line workbench: JSON reports for every pipeline and the verification suites."""

from __future__ import annotations

import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any

import click

from .alperin import alperin_decompose, essential_subgroups, verify_chain
from .basic import frobenius_condition, is_basic
from .bisets import DomainError, frac_str, parse_frac
from .cache import CACHE_ENV, Cache, CacheMismatch, cached_fix_matrix, cached_lattice, digest, group_digest
from .fusion import FusionSystem, exterior_counts, fusion_of_group, sylow_group
from .group_hecke import GroupHeckeAlgebra, ReexpressionError, comparison_constants
from .groups import LIMITS, GroupError, Hom, ResourceLimitError, is_prime, p_part, parse_group, sylow_subgroups
from .hecke import (PSetClassModF, SaturationDefect, StableTrace, characteristic_idempotent, closure_defects,
                    evaluate_mod_F, hecke_basis, is_stable, multiply, stable_element_for)
from .linalg import LinearAlgebraError
from .suites import DEFAULT_SEED, SUITES, run_suite

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3


class CheckFailed(Exception):
    """A command finished but one of its verification checks is false."""


@dataclass
class WorkspaceConfig:
    max_group_order: int = LIMITS.max_group_order
    max_product_order: int = LIMITS.max_product_order
    p: int | None = None
    cache_dir: str | None = None
    cache: bool = True
    verify_cache: bool = False
    indent: int | None = 2
    timing: bool = False
    seed: int = DEFAULT_SEED

    @classmethod
    def load(cls, path: str | None) -> WorkspaceConfig:
        cfg = cls()
        if path:
            try:
                data = json.loads(Path(path).read_text(encoding="utf-8"))
            except (OSError, ValueError) as exc:
                raise click.BadParameter(f"cannot read config {path}: {exc}") from exc
            if not isinstance(data, dict):
                raise click.BadParameter("config must be a JSON object")
            unknown = set(data) - set(cls.__dataclass_fields__)
            if unknown:
                raise click.BadParameter(f"unknown config keys: {', '.join(sorted(unknown))}")
            for k, v in data.items():
                setattr(cfg, k, v)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.max_group_order <= 0 or self.max_product_order <= 0:
            raise click.BadParameter("limits must be positive")
        if self.p is not None and not is_prime(self.p):
            raise click.BadParameter(f"{self.p} is not prime")


@dataclass
class Workspace:
    config: WorkspaceConfig
    cache: Cache = field(default_factory=lambda: Cache(None))


def _dump(value: Any, indent: int | None) -> str:
    return json.dumps(value, indent=indent, sort_keys=True, ensure_ascii=False)


def _emit(ws: Workspace, command: str, inputs: dict, outputs: Any, checks: dict[str, bool],
          started: float, seed: int | None = None) -> None:
    report = {"command": command, "inputs": inputs, "inputs_digest": digest(inputs), "outputs": outputs,
              "checks": checks}
    if seed is not None:
        report["seed"] = seed
    if ws.config.timing:
        report["seconds"] = round(time.perf_counter() - started, 3)
    click.echo(_dump(report, ws.config.indent))
    if not all(checks.values()):
        raise CheckFailed(", ".join(k for k, v in checks.items() if not v))


def _prime_for(ws: Workspace, G, p: int | None) -> int:
    p = p or ws.config.p
    if p is None:
        n = G.order
        primes = [d for d in range(2, n + 1) if n % d == 0 and is_prime(d)]
        if len(primes) != 1:
            raise click.BadParameter(f"{G.name} is not a p-group; pass --p")
        p = primes[0]
    if not is_prime(p):
        raise click.BadParameter(f"{p} is not prime")
    if G.order % p:
        raise click.BadParameter(f"{p} does not divide |{G.name}| = {G.order}")
    return p


def _json_arg(text: str | None, what: str) -> Any:
    if text is None:
        return None
    try:
        return json.loads(text)
    except ValueError as exc:
        raise click.BadParameter(f"malformed JSON for {what}: {exc}") from exc


def _load_group(ws: Workspace, spec: str):
    G = parse_group(spec)
    # catalog groups are memoized, so the limit is checked here and not only at construction
    LIMITS.check(G.order, f"group {G.name}")
    cached_lattice(ws.cache, G, ws.config.verify_cache)
    return G


def _load_system(ws: Workspace, spec: str, p: int | None, sylow: str | None) -> tuple[FusionSystem, dict]:
    G = _load_group(ws, spec)
    p = _prime_for(ws, G, p)
    members = _json_arg(sylow, "--sylow")
    if members is None:
        members = sorted(sylow_subgroups(G, p)[0]) if p_part(G.order, p) < G.order else list(range(G.order))
    if not isinstance(members, list) or not all(isinstance(x, int) for x in members):
        raise click.BadParameter("--sylow must be a JSON list of element ids")
    P, _ = sylow_group(G, members, p)
    cached_lattice(ws.cache, P, ws.config.verify_cache)
    F = fusion_of_group(G, members, p)
    inputs = {"group": G.name, "group_digest": group_digest(G), "p": p, "sylow": sorted(members)}
    return F, inputs


def _basis(ws: Workspace, F: FusionSystem):
    B = hecke_basis(F)
    cached_fix_matrix(ws.cache, B, ws.config.verify_cache)
    return B


def _parse_hom(sub: list[int], img: list[int] | None) -> Hom:
    src = tuple(sorted(sub))
    if img is None:
        return Hom(src, src)
    if len(img) != len(src):
        raise click.BadParameter("--phi must list one image per subgroup element (in increasing order)")
    return Hom(src, tuple(img))


# ------------------------------------------------------------------------------

@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="JSON configuration file.")
@click.option("--cache-dir", default=None, help=f"Cache directory (default: ${CACHE_ENV}).")
@click.option("--no-cache", is_flag=True, help="Disable the cache.")
@click.option("--verify-cache", is_flag=True, help="Recompute cache hits and fail on any difference.")
@click.option("--timing", is_flag=True, help="Add wall time to reports (makes them nondeterministic).")
@click.option("--compact", is_flag=True, help="Single-line JSON.")
@click.pass_context
def main(ctx: click.Context, config_path, cache_dir, no_cache, verify_cache, timing, compact) -> None:
    """Exact computations with fusion systems, double Burnside rings and Hecke algebras."""
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s", stream=sys.stderr)
    cfg = WorkspaceConfig.load(config_path)
    if cache_dir is not None:
        cfg.cache_dir = cache_dir
    elif cfg.cache_dir is None:
        cfg.cache_dir = os.environ.get(CACHE_ENV) or None
    cfg.cache = cfg.cache and not no_cache
    cfg.verify_cache = cfg.verify_cache or verify_cache
    cfg.timing = cfg.timing or timing
    if compact:
        cfg.indent = None
    LIMITS.max_group_order = cfg.max_group_order
    LIMITS.max_product_order = cfg.max_product_order
    ctx.obj = Workspace(cfg, Cache(cfg.cache_dir if cfg.cache else None))


group_arg = click.argument("group")
p_opt = click.option("--p", "p", type=int, default=None, help="The prime (default: the only prime of a p-group).")
sylow_opt = click.option("--sylow", default=None, help="JSON list of element ids of the Sylow subgroup.")


@main.command()
@group_arg
@click.pass_obj
def subgroups(ws: Workspace, group: str) -> None:
    """Subgroup lattice and conjugacy classes."""
    t0 = time.perf_counter()
    G = _load_group(ws, group)
    classes = [{"order": len(c[0]), "members": [sorted(s) for s in c]} for c in G.subgroup_classes()]
    _emit(ws, "subgroups", {"group": G.name, "group_digest": group_digest(G)},
          {"order": G.order, "subgroup_count": len(G.subgroups()), "classes": classes}, {}, t0)


@main.command()
@group_arg
@p_opt
@sylow_opt
@click.pass_obj
def fusion(ws: Workspace, group: str, p: int | None, sylow: str | None) -> None:
    """Fusion system of a group on a Sylow subgroup."""
    t0 = time.perf_counter()
    F, inputs = _load_system(ws, group, p, sylow)
    report = F.report()
    report["exterior_counts"] = [exterior_counts(F, q).to_json() for q in F.subgroups()]
    _emit(ws, "fusion", inputs, report, {"saturated": report["frobenius"]}, t0)


@main.command("hecke-basis")
@group_arg
@p_opt
@sylow_opt
@click.pass_obj
def hecke_basis_cmd(ws: Workspace, group: str, p: int | None, sylow: str | None) -> None:
    """Canonical basis of the Hecke algebra of the fusion system."""
    t0 = time.perf_counter()
    F, inputs = _load_system(ws, group, p, sylow)
    B = _basis(ws, F)
    out = B.to_json()
    out["fixed_points"] = B.fix_matrix
    defects = closure_defects(F)
    _emit(ws, "hecke-basis", inputs, out, {"closed_under_subconjugation": not defects}, t0)


def _target(F: FusionSystem, text: str | None) -> PSetClassModF:
    data = _json_arg(text, "--target")
    if data is None:
        return PSetClassModF.s_bar(F, range(F.base.order))
    if not isinstance(data, list) or len(data) != len(F.classes):
        raise click.BadParameter(f"--target must list {len(F.classes)} coefficients, one per class")
    try:
        return PSetClassModF(F, {k: parse_frac(v) for k, v in enumerate(data)})
    except (ValueError, ZeroDivisionError) as exc:
        raise click.BadParameter(f"bad coefficient in --target: {exc}") from exc


@main.command()
@group_arg
@p_opt
@sylow_opt
@click.option("--target", default=None, help="JSON list of coefficients over the F-classes (default: the class of P).")
@click.pass_obj
def stable(ws: Workspace, group: str, p: int | None, sylow: str | None, target: str | None) -> None:
    """Stable element with a prescribed evaluation, built grade by grade."""
    t0 = time.perf_counter()
    F, inputs = _load_system(ws, group, p, sylow)
    B = _basis(ws, F)
    tgt = _target(F, target)
    inputs["target"] = tgt.to_json()
    trace = StableTrace()
    f = stable_element_for(B, tgt, trace)
    checks = {"stable": is_stable(f), "evaluation_matches": evaluate_mod_F(f) == tgt, "p_local": f.is_p_local()}
    _emit(ws, "stable", inputs, {"element": f.to_json(), "trace": trace.steps}, checks, t0)


@main.command()
@group_arg
@p_opt
@sylow_opt
@click.pass_obj
def idempotent(ws: Workspace, group: str, p: int | None, sylow: str | None) -> None:
    """Characteristic idempotent and its verification block."""
    t0 = time.perf_counter()
    F, inputs = _load_system(ws, group, p, sylow)
    B = _basis(ws, F)
    rep = characteristic_idempotent(B, report=True)
    w = rep.omega
    checks = {
        "idempotent": multiply(w, w) == w,
        "self_opposite": w.opposite() == w,
        "stable": is_stable(w),
        "frobenius_condition": frobenius_condition(w.biset),
        "length_one": w.length() == 1,
        "p_local": w.is_p_local(),
    }
    out = {"omega": w.to_json(), "stable_rank": rep.stable_rank, "idempotents_mod_p": rep.idempotents_mod_p,
           "lifts": rep.lifts}
    _emit(ws, "idempotent", inputs, out, checks, t0)


@main.command()
@group_arg
@p_opt
@sylow_opt
@click.pass_obj
def essential(ws: Workspace, group: str, p: int | None, sylow: str | None) -> None:
    """Essential subgroups, one report per F-class."""
    t0 = time.perf_counter()
    F, inputs = _load_system(ws, group, p, sylow)
    reports = [r.to_json() for r in essential_subgroups(F)]
    out = {"classes": reports, "essential": [r["subgroup"] for r in reports if r["essential"]]}
    _emit(ws, "essential", inputs, out, {}, t0)


@main.command()
@group_arg
@p_opt
@sylow_opt
@click.option("--subgroup", "sub", required=True, help="JSON list of element ids of Q (ids in P).")
@click.option("--phi", default=None, help="JSON list of images of the sorted elements of Q (default: inclusion).")
@click.pass_obj
def decompose(ws: Workspace, group: str, p: int | None, sylow: str | None, sub: str, phi: str | None) -> None:
    """Factor a morphism through automorphisms of P and the exchange transversal."""
    t0 = time.perf_counter()
    F, inputs = _load_system(ws, group, p, sylow)
    q = _json_arg(sub, "--subgroup")
    if not isinstance(q, list) or not F.base.is_subgroup(q):
        raise click.BadParameter("--subgroup must be a JSON list forming a subgroup of P")
    h = _parse_hom(q, _json_arg(phi, "--phi"))
    inputs.update({"subgroup": sorted(q), "phi": list(h.img)})
    chain = alperin_decompose(F, q, h)
    _emit(ws, "decompose", inputs, {"chain": [link.to_json() for link in chain]},
          {"chain_verified": verify_chain(F, q, h, chain)}, t0)


@main.command("basic-check")
@group_arg
@p_opt
@sylow_opt
@click.option("--element", default=None,
              help='JSON list of {"index": i, "coeff": "n/d"} over the Hecke basis (default: the idempotent).')
@click.option("--scale", default="1", help="Multiply the element by this rational.")
@click.pass_obj
def basic_check(ws: Workspace, group: str, p: int | None, sylow: str | None, element: str | None,
                scale: str) -> None:
    """Whether an element of the Hecke algebra is basic."""
    t0 = time.perf_counter()
    F, inputs = _load_system(ws, group, p, sylow)
    B = _basis(ws, F)
    data = _json_arg(element, "--element")
    try:
        if data is None:
            f = characteristic_idempotent(B)
        else:
            vec = [Fraction(0)] * B.rank
            for term in data:
                vec[int(term["index"])] += parse_frac(term["coeff"])
            f = B.element(vec)
        f = f.scale(parse_frac(scale))
    except (KeyError, TypeError, IndexError, ValueError, ZeroDivisionError) as exc:
        raise click.BadParameter(f"bad element: {exc}") from exc
    inputs.update({"element": f.to_json()})
    rep = is_basic(f.biset, F.p)
    _emit(ws, "basic-check", inputs, rep.to_json(), {"basic": rep.basic}, t0)


@main.command("group-hecke")
@group_arg
@p_opt
@sylow_opt
@click.pass_obj
def group_hecke(ws: Workspace, group: str, p: int | None, sylow: str | None) -> None:
    """Double-coset Hecke algebra and its comparison with the transporter category."""
    t0 = time.perf_counter()
    G = _load_group(ws, group)
    p = _prime_for(ws, G, p)
    members = _json_arg(sylow, "--sylow") or sorted(sylow_subgroups(G, p)[0])
    if not isinstance(members, list) or not all(isinstance(x, int) for x in members):
        raise click.BadParameter("--sylow must be a JSON list of element ids")
    A = GroupHeckeAlgebra(G, members, p)
    key = f"group-hecke:{group_digest(G)}:{sorted(members)}"
    direct = ws.cache.through(key, lambda: [[list(c) for c in row] for row in A.structure_constants()],
                              ws.config.verify_cache)
    via = comparison_constants(A)
    agree = all([Fraction(x) for x in direct[i][j]] == list(via[i][j]) for i in range(A.rank) for j in range(A.rank))
    inputs = {"group": G.name, "group_digest": group_digest(G), "p": p, "sylow": sorted(members)}
    out = dict(A.to_json(), structure_constants=direct)
    _emit(ws, "group-hecke", inputs, out, {"transporter_comparison": agree}, t0)


@main.command()
@click.argument("suite")
@click.option("--seed", type=int, default=None, help="Seed for randomized checks.")
@click.pass_obj
def verify(ws: Workspace, suite: str, seed: int | None) -> None:
    """Run a verification suite (or 'all'); one JSON line per check."""
    names = list(SUITES) if suite == "all" else [suite]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise click.BadParameter(f"unknown suite {suite!r}; known: all, {', '.join(SUITES)}")
    seed = ws.config.seed if seed is None else seed
    failed = []
    for name in names:
        res = run_suite(name, seed)
        for c in res.checks:
            click.echo(json.dumps({"suite": name, **c.to_json()}, sort_keys=True, default=str))
            if not c.ok:
                failed.append(f"{name}: {c.name}")
        summary = {"suite": name, "ok": res.ok, "checks": len(res.checks), "seed": seed}
        if ws.config.timing:
            summary["seconds"] = round(res.seconds, 3)
        click.echo(json.dumps(summary, sort_keys=True))
    if failed:
        raise CheckFailed("; ".join(failed))


def run(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit codes; resource limits are restored on return."""
    saved = replace(LIMITS)
    try:
        main.main(args=argv, prog_name="artifact", standalone_mode=False)
    except CheckFailed as exc:
        click.echo(f"check failed: {exc}", err=True)
        return EXIT_CHECK
    except (SaturationDefect, ReexpressionError, CacheMismatch, LinearAlgebraError) as exc:
        click.echo(f"check failed: {exc}", err=True)
        return EXIT_CHECK
    except ResourceLimitError as exc:
        click.echo(f"resource guard: {exc}", err=True)
        return EXIT_GUARD
    except click.exceptions.Abort:
        return EXIT_INPUT
    except click.ClickException as exc:
        exc.show()
        return EXIT_INPUT
    except (GroupError, DomainError) as exc:
        click.echo(f"input error: {exc}", err=True)
        return EXIT_INPUT
    finally:
        LIMITS.max_group_order = saved.max_group_order
        LIMITS.max_product_order = saved.max_product_order
    return EXIT_OK


def entry() -> None:
    sys.exit(run())
