"""Execute the tasks of a model file and collect reports.

Every verdict is produced by a library call; this module only resolves
names and shapes the output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Optional

from .exterior import Form, format_form, hodge_star
from .g2 import G2Error, G2Structure, generalized_spinors, usual_spinors
from .integrability import (
    Admissible,
    ClosedStructure,
    CoclosedStructure,
    HClosed,
    InfeasibleError,
    cubic_obstruction,
    integrability_report,
    solve_h_space,
    twisted_differential,
)
from .lie import LieAlgebra, LieAlgebraError, SpanIdeal, ce_differential, center, jacobi_check
from .modelfile import ModelFile, Task
from .tduality import (
    CorrespondenceSpace,
    DualityError,
    DualResult,
    correspondence,
    double_dual_check,
    dualize,
    transport_spinor,
    validate_admissible,
    verify_duality_certificate,
)

SCHEMA = 1


class UsageError(ValueError):
    pass


@dataclass
class Report:
    task_id: str
    command: str
    args: list[str]
    verdicts: dict[str, bool] = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    @property
    def status(self) -> str:
        if not self.verdicts:
            return "info"
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "id": self.task_id,
            "command": self.command,
            "args": list(self.args),
            "status": self.status,
            "verdicts": dict(self.verdicts),
            "data": self.data,
        }


@dataclass
class RunResult:
    reports: list[Report]
    exit_code: int
    error: Optional[str] = None

    def to_json(self) -> str:
        payload = {
            "schema": SCHEMA,
            "status": {0: "pass", 1: "fail", 2: "error"}[self.exit_code],
            "tasks": [r.to_dict() for r in self.reports],
        }
        if self.error:
            payload["error"] = self.error
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_text(self, verbose: bool = False) -> str:
        lines = []
        for r in self.reports:
            lines.append(f"[{r.task_id}] {' '.join([r.command, *r.args])}: {r.status.upper()}")
            for k, v in r.verdicts.items():
                if verbose or not v:
                    lines.append(f"    {k}: {'pass' if v else 'FAIL'}")
            for k, v in r.data.items():
                lines.extend(_text_lines(k, v, "    "))
        if self.error:
            lines.append(f"error: {self.error}")
        return "\n".join(lines)


def _text_lines(key, value, indent):
    if isinstance(value, dict):
        out = [f"{indent}{key}:"]
        for k, v in value.items():
            out.extend(_text_lines(k, v, indent + "  "))
        return out
    if isinstance(value, list) and value and isinstance(value[0], (dict, list)):
        out = [f"{indent}{key}:"]
        for i, v in enumerate(value):
            out.extend(_text_lines(str(i), v, indent + "  "))
        return out
    if isinstance(value, list):
        return [f"{indent}{key}: [{', '.join(map(str, value))}]"]
    return [f"{indent}{key}: {value}"]


def _fmt(x) -> str:
    return format_form(x) if isinstance(x, Form) else str(x)


def _differentials(g: LieAlgebra) -> dict:
    return {f"d e{k}": format_form(f) for k, f in g.differentials().items() if f}


def _brackets(g: LieAlgebra) -> dict:
    out = {}
    for (i, j), vec in g.brackets.items():
        out[f"[e{i},e{j}]"] = format_form(Form(g.dim, {1 << (k - 1): c for k, c in vec.items()}))
    return out


class Context:
    def __init__(self, model: ModelFile):
        self.algebras: dict[str, LieAlgebra] = dict(model.algebras)
        self.forms: dict[str, tuple[str, Form]] = {k: (v.algebra, v.form) for k, v in model.forms.items()}
        self.fibers = {k: (v.algebra, v.generators) for k, v in model.fibers.items()}
        self.duality: Optional[tuple[DualResult, CorrespondenceSpace]] = None

    def algebra(self, name: str) -> LieAlgebra:
        try:
            return self.algebras[name]
        except KeyError:
            raise UsageError(f"unknown algebra {name!r}") from None

    def form(self, name: str) -> tuple[str, Form]:
        try:
            return self.forms[name]
        except KeyError:
            raise UsageError(f"unknown form {name!r}") from None

    def fiber(self, name: str, on: Optional[str] = None) -> tuple[str, tuple[int, ...]]:
        try:
            alg, gens = self.fibers[name]
        except KeyError:
            raise UsageError(f"unknown fiber {name!r}") from None
        if on is not None and alg != on:
            raise UsageError(f"fiber {name!r} is declared on {alg!r}, not {on!r}")
        return alg, gens

    def form_algebra(self, name: str) -> tuple[LieAlgebra, Form]:
        alg, f = self.form(name)
        return self.algebra(alg), f

    def last_duality(self) -> tuple[DualResult, CorrespondenceSpace]:
        if self.duality is None:
            raise UsageError("no preceding dualize task")
        return self.duality


class _Args:
    """Positional arguments followed by keyword sections."""

    def __init__(self, task: Task, keywords: dict[str, int]):
        self.task = task
        self.positional: list[str] = []
        self.sections: dict[str, list[str]] = {}
        args = list(task.args)
        i = 0
        while i < len(args) and args[i] not in keywords:
            self.positional.append(args[i])
            i += 1
        while i < len(args):
            key = args[i]
            if key not in keywords:
                raise UsageError(f"{task.command}: unexpected argument {key!r}")
            n = keywords[key]
            if n < 0:
                vals = []
                i += 1
                while i < len(args) and args[i] not in keywords:
                    vals.append(args[i])
                    i += 1
            else:
                vals = args[i + 1:i + 1 + n]
                if len(vals) != n:
                    raise UsageError(f"{task.command}: {key} takes {n} argument(s)")
                i += 1 + n
            self.sections.setdefault(key, []).extend(vals)

    def need(self, count: int, names: str) -> list[str]:
        if len(self.positional) != count:
            raise UsageError(f"{self.task.command}: expected {names}")
        return self.positional


def _cmd_check_jacobi(ctx: Context, task: Task, rep: Report):
    names = task.args or list(ctx.algebras)
    for name in names:
        g = ctx.algebra(name)
        rep.verdicts[f"{name}.jacobi"] = jacobi_check(g).ok
        if not jacobi_check(g).ok:
            j = jacobi_check(g)
            rep.data[f"{name}.failing_triple"] = list(j.triple)
            rep.data[f"{name}.residual"] = [str(x) for x in j.residual]
        limit = g.dim if g.dim <= 10 else 1
        dd_ok = True
        for k in range(1, limit + 1):
            for idx in combinations(range(1, g.dim + 1), k):
                f = Form(g.dim, {sum(1 << (i - 1) for i in idx): 1})
                if ce_differential(g, ce_differential(g, f)):
                    dd_ok = False
                    break
            if not dd_ok:
                break
        rep.verdicts[f"{name}.d_squared_zero"] = dd_ok
        rep.data[f"{name}.differentials"] = _differentials(g)
        rep.data[f"{name}.center_dimension"] = len(center(g))
        rep.data[f"{name}.ad_traces"] = [str(x) for x in g.ad_traces()]


def _expect_form(ctx: Context, rep: Report, args: _Args, value: Form, key: str = "expect"):
    for name in args.sections.get(key, []):
        _, f = ctx.form(name)
        rep.verdicts[f"equals {name}"] = f == value
        if f != value:
            rep.data[f"difference from {name}"] = format_form(value - f)


def _cmd_differential(ctx, task, rep):
    a = _Args(task, {"expect": 1})
    (name,) = a.need(1, "<form>")
    g, f = ctx.form_algebra(name)
    d = ce_differential(g, f)
    rep.data["form"] = format_form(f)
    rep.data["d"] = format_form(d)
    _expect_form(ctx, rep, a, d)


def _cmd_star(ctx, task, rep):
    a = _Args(task, {"expect": 1})
    (name,) = a.need(1, "<form>")
    _, f = ctx.form(name)
    s = hodge_star(f)
    rep.data["star"] = format_form(s)
    _expect_form(ctx, rep, a, s)


def _cmd_spinors(ctx, task, rep):
    a = _Args(task, {"angle": 2, "as": 2, "expect": 2})
    pos = a.positional
    if not 1 <= len(pos) <= 2:
        raise UsageError("spinors: expected <phi> [angle s c] [fiber]")
    alg, phi = ctx.form(pos[0])
    s, c = (Fraction(x) for x in a.sections.get("angle", ["0", "1"]))
    structure = G2Structure(phi)
    if len(pos) == 2:
        _, gens = ctx.fiber(pos[1], on=alg)
        if len(gens) != 1:
            raise UsageError("spinors: the unit covector needs a one-dimensional fiber")
        pair = generalized_spinors(structure, gens[0], s, c)
    elif s == 0:
        pair = usual_spinors(structure) if c == 1 else generalized_spinors(structure, 1, s, c)
    else:
        raise UsageError("spinors: a fiber is required when s != 0")
    rep.data["rho"] = format_form(pair.rho)
    rep.data["rho_hat"] = format_form(pair.rho_hat)
    rep.data["angle"] = [str(s), str(c)]
    rep.verdicts["parity"] = pair.rho.is_even() and pair.rho_hat.is_odd()
    if "as" in a.sections:
        r, rh = a.sections["as"]
        ctx.forms[r] = (alg, pair.rho)
        ctx.forms[rh] = (alg, pair.rho_hat)
    if "expect" in a.sections:
        r, rh = a.sections["expect"]
        rep.verdicts[f"rho equals {r}"] = ctx.form(r)[1] == pair.rho
        rep.verdicts[f"rho_hat equals {rh}"] = ctx.form(rh)[1] == pair.rho_hat


_PREDICATES: dict[str, Callable] = {
    "closed": lambda r: r.closed,
    "coclosed": lambda r: r.coclosed,
    "strong": lambda r: r.strongly_integrable,
    "not-closed": lambda r: not r.closed,
    "not-coclosed": lambda r: not r.coclosed,
    "not-strong": lambda r: not r.strongly_integrable,
    "weak-odd": lambda r: r.weak_odd is not None,
    "weak-even": lambda r: r.weak_even is not None,
    "H-closed": lambda r: r.H_closed,
}


def _report_data(r) -> dict:
    return {
        "d_H_rho": format_form(r.d_H_rho),
        "d_H_rho_hat": format_form(r.d_H_rho_hat),
        "H_closed": r.H_closed,
        "closed": r.closed,
        "coclosed": r.coclosed,
        "strongly_integrable": r.strongly_integrable,
        "weak_odd": None if r.weak_odd is None else str(r.weak_odd),
        "weak_even": None if r.weak_even is None else str(r.weak_even),
    }


def _cmd_integrability(ctx, task, rep):
    a = _Args(task, {"expect": -1})
    alg, hname, phiname = a.need(3, "<algebra> <H> <phi>")
    g = ctx.algebra(alg)
    _, H = ctx.form(hname)
    _, phi = ctx.form(phiname)
    r = integrability_report(g, H, usual_spinors(G2Structure(phi)))
    rep.data.update(_report_data(r))
    for p in a.sections.get("expect", []):
        if p not in _PREDICATES:
            raise UsageError(f"integrability: unknown predicate {p!r}")
        rep.verdicts[p] = bool(_PREDICATES[p](r))


def _cmd_solve_h(ctx, task, rep):
    a = _Args(task, {"--coclosed": 0, "expect-dim": 1, "contains": -1})
    alg, phiname, fibername = a.need(3, "<algebra> <phi> <fiber>")
    g = ctx.algebra(alg)
    _, phi = ctx.form(phiname)
    _, gens = ctx.fiber(fibername, on=alg)
    pair = usual_spinors(G2Structure(phi))
    coclosed = "--coclosed" in a.sections
    structure = CoclosedStructure(pair.rho) if coclosed else ClosedStructure(pair.rho_hat)
    try:
        space = solve_h_space(g, [HClosed(), structure, Admissible(SpanIdeal(g, gens))])
    except InfeasibleError as exc:
        rep.verdicts["feasible"] = False
        rep.data["certificate_row"] = [str(x) for x in exc.certificate]
        return
    rep.data["dimension"] = space.dimension
    rep.data["particular"] = format_form(space.particular)
    rep.data["kernel_basis"] = [format_form(k) for k in space.kernel_basis]
    if "expect-dim" in a.sections:
        want = int(a.sections["expect-dim"][0])
        rep.verdicts[f"dimension == {want}"] = space.dimension == want
    for name in a.sections.get("contains", []):
        _, H = ctx.form(name)
        rep.verdicts[f"contains {name}"] = space.contains(H)
    ok = True
    for H in [space.particular, *space.kernel_basis]:
        r = integrability_report(g, H, pair)
        if not (r.coclosed if coclosed else r.closed) or not r.H_closed:
            ok = False
            break
    rep.verdicts["members_integrable"] = ok


def _cmd_dualize(ctx, task, rep):
    a = _Args(task, {"as": 2, "expect-H": 1})
    alg, fibername, hname = a.need(3, "<algebra> <fiber> <H>")
    g = ctx.algebra(alg)
    _, gens = ctx.fiber(fibername, on=alg)
    _, H = ctx.form(hname)
    t = validate_admissible(g, gens, H)
    rep.data["checks"] = {
        "H_closed": t.H_closed,
        "fiber_abelian_ideal": t.fiber_abelian_ideal,
        "fiber_central": t.fiber_central,
        "H_fiber_degenerate": t.H_fiber_degenerate,
    }
    rep.verdicts["admissible"] = t.valid
    if not t.valid:
        return
    d = dualize(t)
    cs = correspondence(t, d)
    ctx.duality = (d, cs)
    gv = d.dual.algebra
    rep.verdicts["dual_admissible"] = d.dual.valid
    rep.data["psi"] = [format_form(p) for p in d.psis]
    rep.data["delta"] = format_form(d.delta)
    rep.data["dual_differentials"] = _differentials(gv)
    rep.data["dual_brackets"] = _brackets(gv)
    rep.data["dual_H"] = format_form(d.dual.H)
    rep.data["dual_center_dimension"] = len(center(gv))
    if "as" in a.sections:
        gname, hvname = a.sections["as"]
        gv.name = gname
        ctx.algebras[gname] = gv
        ctx.forms[hvname] = (gname, d.dual.H)
    _expect_form(ctx, rep, a, d.dual.H, "expect-H")


def _cmd_certificate(ctx, task, rep):
    if task.args:
        raise UsageError("certificate takes no arguments")
    d, cs = ctx.last_duality()
    cert = verify_duality_certificate(cs, d.original.H, d.dual.H)
    rep.verdicts["p*H - p_dual*H_dual == dF"] = cert.passed
    rep.verdicts["F_fiber_nondegenerate"] = cs.fiber_nondegenerate()
    rep.data["F"] = format_form(cs.F)
    rep.data["lhs"] = format_form(cert.lhs)
    rep.data["rhs"] = format_form(cert.rhs)
    rep.data["residual"] = format_form(cert.residual)


def _cmd_transport(ctx, task, rep):
    a = _Args(task, {"as": 1, "expect": 1, "expect-closed": 0})
    (name,) = a.need(1, "<form>")
    d, cs = ctx.last_duality()
    _, sigma = ctx.form(name)
    out = transport_spinor(cs, sigma)
    dv = twisted_differential(d.dual.algebra, d.dual.H, out)
    rep.data["transported"] = format_form(out)
    rep.data["d_Hdual_transported"] = format_form(dv)
    if "expect-closed" in a.sections:
        rep.verdicts["d_Hdual closed"] = not dv
    if "as" in a.sections:
        target = next((k for k, v in ctx.algebras.items() if v is d.dual.algebra), None)
        ctx.forms[a.sections["as"][0]] = (target or "", out)
    _expect_form(ctx, rep, a, out)


def _cmd_obstruct(ctx, task, rep):
    a = _Args(task, {"expect": 1})
    alg, z = a.need(2, "<algebra> <z>")
    g = ctx.algebra(alg)
    try:
        zi = int(z.lstrip("ef_"))
    except ValueError:
        raise UsageError(f"obstruct-closed-g2: bad index {z!r}") from None
    if not 1 <= zi <= g.dim:
        raise UsageError(f"obstruct-closed-g2: index {zi} out of range")
    r = cubic_obstruction(g, zi)
    rep.data["closed_3form_space_dimension"] = r.space_dimension
    rep.data["vanishes"] = r.vanishes
    if r.witness is not None:
        rep.data["witness"] = format_form(r.witness)
        rep.data["witness_cube"] = format_form(r.witness_cube)
    for want in a.sections.get("expect", []):
        if want not in ("vanishes", "witness"):
            raise UsageError("obstruct-closed-g2: expect vanishes|witness")
        rep.verdicts[f"expect {want}"] = r.vanishes == (want == "vanishes")


def _cmd_double_dual(ctx, task, rep):
    if task.args:
        raise UsageError("double-dual takes no arguments")
    d, _ = ctx.last_duality()
    r = double_dual_check(d.original)
    rep.verdicts["algebra_recovered"] = r.algebra_matches
    rep.verdicts["H_recovered"] = r.H_matches
    if not r.passed:
        rep.data["differing_brackets"] = {str(k): [str(v[0]), str(v[1])] for k, v in r.differing_brackets.items()}
        rep.data["H_difference"] = format_form(r.H_difference)


COMMANDS: dict[str, Callable] = {
    "check-jacobi": _cmd_check_jacobi,
    "differential": _cmd_differential,
    "star": _cmd_star,
    "spinors": _cmd_spinors,
    "integrability": _cmd_integrability,
    "solve-h": _cmd_solve_h,
    "dualize": _cmd_dualize,
    "certificate": _cmd_certificate,
    "transport": _cmd_transport,
    "obstruct-closed-g2": _cmd_obstruct,
    "double-dual": _cmd_double_dual,
}

_LIBRARY_ERRORS = (DualityError, LieAlgebraError, G2Error, InfeasibleError)


def run(model: ModelFile, only: Optional[str] = None) -> RunResult:
    """Run all tasks in order; ``only`` filters which reports are returned.

    Exit codes: 0 all verdicts pass, 1 some verdict fails, 2 usage error.
    """
    ctx = Context(model)
    reports: list[Report] = []
    failed = False
    for i, task in enumerate(model.tasks, start=1):
        handler = COMMANDS.get(task.command)
        if handler is None:
            return RunResult(reports, 2, f"line {task.line}: unknown command {task.command!r}")
        rep = Report(f"{i}", task.command, list(task.args))
        try:
            handler(ctx, task, rep)
        except UsageError as exc:
            return RunResult(reports, 2, f"line {task.line}: {exc}")
        except _LIBRARY_ERRORS as exc:
            rep.verdicts["completed"] = False
            rep.data["error"] = str(exc)
        if not rep.passed:
            failed = True
        if only is None or task.command == only:
            reports.append(rep)
    return RunResult(reports, 1 if failed else 0)
