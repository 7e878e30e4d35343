"""Command-line front end.

    selfclose nse "four-cell(a=1,b=1,c=1)"
    selfclose homology examples.spec --block X --max-degree 12
    selfclose mimura-toda 1 1 1 --format machine

Every command builds one payload dict; ``--format machine`` prints it as JSON
and ``--format human`` renders the same dict as indented text.
Exit codes: 0 success, 1 input error, 2 computation refused, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction
from typing import Callable

from . import __version__, dgl, endo, intmode, registry, specfile
from .constraints import InvariantError, UnsupportedError, auto_group, diagonal_system
from .dgl import ModelError, SpaceSpec
from .glie import LieError
from .sul import (AlgebraError, GCAlgebra, SullivanModel, connected_sum, csymplectic_check, formality_two_stage,
                  pd_check, sullivan_constraints, sullivan_diagonal_nse, wedge)
from .textparse import ParseError

EXIT_OK, EXIT_INPUT, EXIT_REFUSED, EXIT_INVARIANT = 0, 1, 2, 3
DEFAULT_MAX_DEGREE = 12


class Target:
    """A resolved input: one block from a spec file or a built-in example."""

    def __init__(self, source: str, text: str, obj, block: str | None = None):
        self.source = source
        self.text = text
        self.obj = obj
        self.block = block

    @property
    def digest(self) -> str:
        return "sha256:" + hashlib.sha256(self.text.encode("utf-8")).hexdigest()

    def describe(self) -> dict:
        out = {"source": self.source, "digest": self.digest}
        if self.block:
            out["block"] = self.block
        return out


def load(ref: str, block: str | None = None) -> Target:
    """Read a spec file if ``ref`` names one, otherwise look up the built-in registry."""
    if os.path.isfile(ref):
        with open(ref, encoding="utf-8") as fh:
            text = fh.read()
        sf = specfile.parse(text)
        obj = sf.get(block)
        if isinstance(obj, specfile.AlgebraPresentation):
            obj = obj.build()
        return Target(ref, text, obj, obj.name)
    if block is not None:
        raise ParseError(f"--block needs a spec file, got {ref!r}")
    obj = registry.build(ref)
    return Target(ref, _canonical_text(obj), obj)


def _canonical_text(obj) -> str:
    """Text whose digest identifies a built-in input by content rather than by name."""
    if isinstance(obj, GCAlgebra):
        return json.dumps(obj.to_dict(), sort_keys=True, default=str)
    return obj.format()


def _expect(t: Target, *kinds: type) -> None:
    if not isinstance(t.obj, kinds):
        want = " or ".join(_KIND_NAMES[k] for k in kinds)
        raise ParseError(f"{t.source}: expected a {want}, got a {_kind(t.obj)}")


_KIND_NAMES = {SpaceSpec: "space", SullivanModel: "Sullivan model", GCAlgebra: "algebra"}


def _kind(obj) -> str:
    return next((v for k, v in _KIND_NAMES.items() if isinstance(obj, k)), type(obj).__name__)


def _as_algebra(t: Target, max_degree: int) -> GCAlgebra:
    if isinstance(t.obj, SullivanModel):
        return GCAlgebra.from_sullivan(t.obj, max_degree)
    _expect(t, GCAlgebra)
    return t.obj


def _quillen(t: Target, args) -> dgl.DGLModel:
    _expect(t, SpaceSpec)
    return dgl.from_space(t.obj, args.max_degree)


# -- commands ------------------------------------------------------------------------

def cmd_model(args) -> dict:
    t = load(args.target, args.block)
    if isinstance(t.obj, SpaceSpec):
        model = dgl.from_space(t.obj, args.max_degree)
        result = {
            "kind": "quillen",
            "name": t.obj.name,
            "spec": t.obj.format(),
            "generators": [{"name": g.name, "degree": g.degree} for g in model.gens],
            "differential": {g.name: model.algebra.format(model.d_gen(g.name)) for g in model.gens},
            "problems": dgl.validate(model),
            "minimal": model.is_minimal(),
        }
    elif isinstance(t.obj, SullivanModel):
        sm = t.obj
        result = {
            "kind": "sullivan",
            "name": sm.name,
            "spec": sm.format(),
            "generators": [{"name": n, "degree": d} for n, d in zip(sm.names, sm.degrees)],
            "problems": sm.problems(),
            "minimal": sm.is_minimal(),
        }
    else:
        result = {"kind": "algebra", **t.obj.to_dict()}
    return _report("model", t, result, args)


def cmd_homology(args) -> dict:
    t = load(args.target, args.block)
    model = _quillen(t, args)
    top = args.max_degree or DEFAULT_MAX_DEGREE
    table = dgl.homology(model, top - 1)
    result = {
        "max_degree": top,
        "homology_dims": {str(d): n for d, n in table.dims.items()},
        "homotopy_ranks": {str(d): n for d, n in table.ranks().items()},
        "representatives": {str(d): [model.algebra.format(e) for e in reps]
                            for d, reps in table.reps.items() if reps},
    }
    return _report("homology", t, result, args)


def cmd_selfmaps(args) -> dict:
    t = load(args.target, args.block)
    if isinstance(t.obj, SullivanModel):
        cs = sullivan_constraints(t.obj)
    else:
        model = _quillen(t, args)
        pmap = endo.parametrize(model)
        cs = endo.derive_constraints(model, pmap)
    ms = diagonal_system(cs)
    result = {"constraints": cs.to_dict(), "diagonal_system": ms.to_dict()}
    return _report("selfmaps", t, result, args)


def cmd_group(args) -> dict:
    t = load(args.target, args.block)
    if isinstance(t.obj, SullivanModel):
        grp = auto_group(diagonal_system(sullivan_constraints(t.obj)))
    else:
        grp = endo.group(_quillen(t, args))
    return _report("group", t, grp.to_dict(), args)


def cmd_nse(args) -> dict:
    t = load(args.target, args.block)
    if isinstance(t.obj, SullivanModel):
        rep = sullivan_diagonal_nse(t.obj, allow_blocks=args.bounds)
    else:
        rep = endo.nse(_quillen(t, args), allow_blocks=args.bounds)
    return _report("nse", t, rep.to_dict(), args)


def cmd_formal(args) -> dict:
    t = load(args.target, args.block)
    _expect(t, SpaceSpec)
    return _report("formal", t, formality_two_stage(t.obj, args.max_degree).to_dict(), args)


def cmd_split(args) -> dict:
    t = load(args.target, args.block)
    _expect(t, SpaceSpec)
    spec = t.obj
    top = spec.cells[-1] if spec.cells else None
    if top is None or top.is_sphere:
        raise UnsupportedError("unsupported: the last cell must be a top cell e^n")
    base = SpaceSpec(f"{spec.name}:B", spec.cells[:-1])
    trivial = top.attach == dgl.TORSION or dgl.is_rationally_trivial(top.attach, dgl.from_space(base))
    rep = endo.nse(dgl.from_space(spec, args.max_degree))
    result = {"top_cell": top.dim, "attaching_class_rationally_trivial": trivial,
              "nse": rep.to_dict()["value"], "split": rep.split}
    return _report("split", t, result, args)


def cmd_cohomology(args) -> dict:
    t = load(args.target, args.block)
    top = args.max_degree or DEFAULT_MAX_DEGREE
    if isinstance(t.obj, SullivanModel):
        dims = t.obj.cohomology(top)
        A = GCAlgebra.from_sullivan(t.obj, top)
        result = {"max_degree": top, "dims": dims, "algebra": A.to_dict()}
    else:
        _expect(t, GCAlgebra)
        result = {"dims": t.obj.dims(), "algebra": t.obj.to_dict()}
    return _report("cohomology", t, result, args)


def cmd_pd(args) -> dict:
    t = load(args.target, args.block)
    A = _as_algebra(t, args.max_degree or DEFAULT_MAX_DEGREE)
    return _report("pd", t, pd_check(A).to_dict(A), args)


def cmd_csymplectic(args) -> dict:
    t = load(args.target, args.block)
    A = _as_algebra(t, args.max_degree or DEFAULT_MAX_DEGREE)
    return _report("csymplectic", t, csymplectic_check(A).to_dict(), args)


def _binary(command: str, op: Callable[[GCAlgebra, GCAlgebra, str], GCAlgebra], args) -> dict:
    if len(args.operands) != 2:
        raise ParseError(f"{command} needs exactly two algebras")
    targets = [load(r) for r in args.operands]
    algs = [_as_algebra(t, args.max_degree or DEFAULT_MAX_DEGREE) for t in targets]
    sym = "#" if command == "connsum" else "v"
    A = op(algs[0], algs[1], f"{algs[0].name}{sym}{algs[1].name}")
    result = {"algebra": A.to_dict()}
    try:
        result["poincare_duality"] = pd_check(A).to_dict(A)
    except AlgebraError as e:
        result["poincare_duality"] = {"poincare_duality": False, "reason": str(e)}
    joined = Target(" ".join(args.operands), "\n".join(t.text for t in targets), None)
    return _report(command, joined, result, args)


def _connsum_pairs(args) -> dict:
    rows = []
    for x, w in registry.CONNSUM_PAIRS:
        rx = sullivan_diagonal_nse(registry.build(x))
        rw = endo.nse(dgl.from_space(registry.build(w)), allow_blocks=True)
        rows.append({"connected_sum": x, "wedge": w, "connected_sum_bounds": [rx.lo, rx.hi],
                     "wedge_bounds": [rw.lo, rw.hi], "inequality_holds": rx.hi <= rw.lo})
    t = Target("connsum-pairs", "\n".join(f"{x} {w}" for x, w in registry.CONNSUM_PAIRS), None)
    return _report("connsum", t, {"pairs": rows}, args)


def cmd_connsum(args) -> dict:
    if not args.operands:
        return _connsum_pairs(args)
    return _binary("connsum", connected_sum, args)


def cmd_wedge(args) -> dict:
    return _binary("wedge", wedge, args)


def cmd_mimura_toda(args) -> dict:
    vals = args.coefficients
    if len(vals) == 1:
        family, values = registry.parse_call(vals[0])
        if family != "mimura-toda":
            raise ParseError(f"expected mimura-toda(a=,b=,c=), got {vals[0]!r}")
        a, b, c = values
    elif len(vals) == 3:
        try:
            a, b, c = (int(v) for v in vals)
        except ValueError:
            raise ParseError(f"coefficients must be integers, got {' '.join(vals)}") from None
    else:
        raise ParseError("mimura-toda takes three integers a b c or a name mimura-toda(a=,b=,c=)")
    bound = args.int_bound or intmode.DEFAULT_BOUND
    result = intmode.mimura_toda_analysis(a, b, c, bound=bound)
    t = Target(f"mimura-toda(a={a},b={b},c={c})", f"mimura-toda {a} {b} {c}", None)
    return _report("mimura-toda", t, result, args)


def cmd_examples(args) -> dict:
    t = Target("registry", "registry", None)
    result = {"examples": registry.listing(), "family_instances": registry.FAMILY_INSTANCES}
    return _report("examples", t, result, args)


COMMANDS: dict[str, Callable] = {
    "model": cmd_model,
    "homology": cmd_homology,
    "selfmaps": cmd_selfmaps,
    "group": cmd_group,
    "nse": cmd_nse,
    "formal": cmd_formal,
    "split": cmd_split,
    "cohomology": cmd_cohomology,
    "pd": cmd_pd,
    "csymplectic": cmd_csymplectic,
    "connsum": cmd_connsum,
    "wedge": cmd_wedge,
    "mimura-toda": cmd_mimura_toda,
    "examples": cmd_examples,
}


# -- reports -------------------------------------------------------------------------

def _report(command: str, t: Target, result: dict, args) -> dict:
    return {
        "command": command,
        "input": t.describe(),
        "result": result,
        "engine": {"name": "selfcloseness", "version": __version__},
        "seed": args.seed,
    }


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (set, frozenset, tuple)):
        return list(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def to_machine(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False, default=_json_default) + "\n"


def to_human(report: dict) -> str:
    lines: list[str] = []
    _render(report, 0, lines)
    return "\n".join(lines) + "\n"


def _scalar(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def _render(v, indent: int, lines: list[str], key: str | None = None) -> None:
    pad = "  " * indent
    head = None if key is None else f"{pad}-" if key == "-" else f"{pad}{key}:"
    if isinstance(v, dict) and not v:
        lines.append(f"{head} (none)" if head else pad + "(none)")
    elif isinstance(v, dict):
        if head:
            lines.append(head)
        for k, x in v.items():
            _render(x, indent + (1 if head else 0), lines, str(k))
    elif isinstance(v, list) and v and all(isinstance(x, dict) for x in v) and _flat(v):
        if head:
            lines.append(head)
        _table(v, indent + 1, lines)
    elif isinstance(v, list) and any(isinstance(x, (dict, list)) or "," in str(x) for x in v):
        if head:
            lines.append(head)
        for x in v:
            _render(x, indent + 1, lines, "-")
    elif isinstance(v, list):
        lines.append(f"{head} {', '.join(_scalar(x) for x in v) or '(none)'}" if head
                     else pad + ", ".join(map(_scalar, v)))
    elif isinstance(v, str) and "\n" in v:
        lines.append(head or pad)
        lines.extend(pad + "  " + ln for ln in v.splitlines())
    else:
        lines.append(f"{head} {_scalar(v)}" if head else pad + _scalar(v))


def _flat(rows: list[dict]) -> bool:
    keys = list(rows[0])
    return all(list(r) == keys and not any(isinstance(x, dict) for x in r.values()) for r in rows)


def _table(rows: list[dict], indent: int, lines: list[str]) -> None:
    pad = "  " * indent
    keys = list(rows[0])
    cells = [[_cell(r[k]) for k in keys] for r in rows]
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    lines.append(pad + "  ".join(k.ljust(w) for k, w in zip(keys, widths)).rstrip())
    lines.append(pad + "  ".join("-" * w for w in widths))
    for c in cells:
        lines.append(pad + "  ".join(x.ljust(w) for x, w in zip(c, widths)).rstrip())


def _cell(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_cell(x) for x in v) + "]"
    return _scalar(v)


# -- entry point ---------------------------------------------------------------------

class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors map to the input-error exit code."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="selfclose",
                                description="Rational self-closeness numbers and related invariants.")
    common = _Parser(add_help=False)
    common.add_argument("--max-degree", type=int, default=None, help="degree cap for models and homology")
    common.add_argument("--int-bound", type=int, default=None, help="search box for integer mode")
    common.add_argument("--seed", type=int, default=0, help="determinism seed recorded in the report")
    common.add_argument("--format", choices=("human", "machine"), default="human")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common], help=f"run {name}")
        if name in ("connsum", "wedge"):
            sp.add_argument("operands", nargs="*", help="two algebras (built-in names or spec files)")
        elif name == "mimura-toda":
            sp.add_argument("coefficients", nargs="*", default=["1", "1", "1"],
                            help="integers a b c, or a name mimura-toda(a=,b=,c=)")
        elif name != "examples":
            sp.add_argument("target", help="spec file or built-in example name")
            sp.add_argument("--block", default=None, help="block name inside a spec file")
        if name == "nse":
            sp.add_argument("--bounds", action="store_true",
                            help="allow same-degree generators and report sound bounds")
    return p


def run(argv: list[str] | None = None) -> tuple[int, str, str]:
    """Run a command; return (exit code, stdout text, stderr text)."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        return EXIT_INPUT, "", f"error: {e}\n"
    try:
        report = COMMANDS[args.command](args)
    except UnsupportedError as e:
        return EXIT_REFUSED, "", f"refused: {e}\n"
    except InvariantError as e:
        return EXIT_INVARIANT, "", f"internal invariant violated: {e}\n"
    except KeyError as e:
        return EXIT_INPUT, "", f"error: {e.args[0] if e.args else e}\n"
    except (ParseError, ModelError, AlgebraError, LieError, OSError) as e:
        return EXIT_INPUT, "", f"error: {e}\n"
    text = to_machine(report) if args.format == "machine" else to_human(report)
    return EXIT_OK, text, ""


def main(argv: list[str] | None = None) -> int:
    code, out, err = run(argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
