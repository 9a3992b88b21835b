"""The ``.g2t`` model format: algebras, forms, fibers and tasks.

::

    # Example
    algebra g dim 7
      bracket [1,7] = -e3
      d e6 = e13
    form phi on g = e127 + e347 + e567 + e135 - e236 - e146 - e245
    fiber a on g = span(e6)
    task dualize g a H as gv Hv

Forms may be declared on an algebra that only comes into existence when a
``dualize ... as <name> <form>`` task runs; their dimension is taken from
the source algebra.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .exterior import Form, FormSyntaxError, blade_indices, format_form, parse_form
from .lie import LieAlgebra


class ModelSyntaxError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


@dataclass
class Task:
    command: str
    args: list[str]
    line: int = 0

    def text(self) -> str:
        return " ".join(["task", self.command, *self.args])


@dataclass
class FormDecl:
    algebra: str
    form: Form


@dataclass
class FiberDecl:
    algebra: str
    generators: tuple[int, ...]


@dataclass
class ModelFile:
    algebras: dict[str, LieAlgebra] = field(default_factory=dict)
    forms: dict[str, FormDecl] = field(default_factory=dict)
    fibers: dict[str, FiberDecl] = field(default_factory=dict)
    tasks: list[Task] = field(default_factory=list)

    def algebra_dims(self) -> dict[str, int]:
        """Declared algebras plus those introduced by ``dualize ... as``."""
        dims = {k: v.dim for k, v in self.algebras.items()}
        for t in self.tasks:
            produced = dualize_outputs(t)
            if produced and t.args and t.args[0] in dims:
                dims.setdefault(produced[0], dims[t.args[0]])
        return dims

    def __eq__(self, other):
        if not isinstance(other, ModelFile):
            return NotImplemented
        return (
            self.algebras == other.algebras
            and self.forms == other.forms
            and self.fibers == other.fibers
            and [(t.command, t.args) for t in self.tasks] == [(t.command, t.args) for t in other.tasks]
        )


def dualize_outputs(task: Task) -> Optional[tuple[str, str]]:
    if task.command == "dualize" and "as" in task.args:
        i = task.args.index("as")
        rest = task.args[i + 1:i + 3]
        if len(rest) == 2:
            return rest[0], rest[1]
    return None


_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_ALG = re.compile(rf"algebra\s+({_NAME})\s+dim\s+(\d+)\s*$")
_DIFF = re.compile(r"d\s+e_?(\{\s*\d+\s*\}|\d+)\s*=\s*(.*)$")
_BRACKET = re.compile(r"bracket\s*\[\s*(\d+)\s*,\s*(\d+)\s*\]\s*=\s*(.*)$")
_FORM = re.compile(rf"form\s+({_NAME})\s+on\s+({_NAME})\s*=\s*(.*)$")
_FIBER = re.compile(rf"fiber\s+({_NAME})\s+on\s+({_NAME})\s*=\s*span\s*\((.*)\)\s*$")
_TASK = re.compile(r"task\s+(\S+)(.*)$")


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_model(text: str) -> ModelFile:
    model = ModelFile()
    current: Optional[tuple[str, int, dict]] = None
    pending_forms: list[tuple[str, str, str, int, int]] = []

    def close_block():
        nonlocal current
        if current is None:
            return
        name, dim, table = current
        model.algebras[name] = LieAlgebra(dim, table, name=name)
        current = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        col0 = raw.find(line) + 1
        m = _DIFF.match(line) or _BRACKET.match(line)
        if m:
            if current is None:
                raise ModelSyntaxError("differential or bracket outside an algebra block", lineno, col0)
            name, dim, table = current
            if m.re is _DIFF:
                k = int(m.group(1).strip("{} "))
                if dim > 9 and not m.group(1).startswith("{"):
                    raise ModelSyntaxError(f"use braces for basis indices in dimension {dim}", lineno, col0)
                if not 1 <= k <= dim:
                    raise ModelSyntaxError(f"index {k} out of range 1..{dim}", lineno, col0)
                f = _parse(m.group(2), dim, lineno, col0 - 1 + m.start(2))
                if not f.is_homogeneous(2):
                    raise ModelSyntaxError(f"d e{k} must be a 2-form", lineno, col0)
                for mask, c in f.items():
                    i, j = blade_indices(mask)
                    slot = table.setdefault((i, j), {})
                    slot[k] = slot.get(k, 0) - c
            else:
                i, j = int(m.group(1)), int(m.group(2))
                for idx in (i, j):
                    if not 1 <= idx <= dim:
                        raise ModelSyntaxError(f"index {idx} out of range 1..{dim}", lineno, col0)
                if i == j:
                    raise ModelSyntaxError("bracket of a basis vector with itself", lineno, col0)
                v = _parse(m.group(3), dim, lineno, col0 - 1 + m.start(3))
                if not v.is_homogeneous(1):
                    raise ModelSyntaxError("bracket value must be a combination of basis vectors", lineno, col0)
                key, sign = ((i, j), 1) if i < j else ((j, i), -1)
                slot = table.setdefault(key, {})
                for mask, c in v.items():
                    k = mask.bit_length()
                    slot[k] = slot.get(k, 0) + sign * c
            continue
        close_block()
        if m := _ALG.match(line):
            name, dim = m.group(1), int(m.group(2))
            if name in model.algebras:
                raise ModelSyntaxError(f"duplicate algebra {name!r}", lineno, col0)
            if not 1 <= dim <= 30:
                raise ModelSyntaxError(f"unsupported dimension {dim}", lineno, col0)
            current = (name, dim, {})
        elif m := _FORM.match(line):
            name, alg, body = m.groups()
            if name in model.forms:
                raise ModelSyntaxError(f"duplicate form {name!r}", lineno, col0)
            pending_forms.append((name, alg, body, lineno, raw.find(body) if body else 0))
            model.forms[name] = None  # placeholder keeps declaration order
        elif m := _FIBER.match(line):
            name, alg, body = m.groups()
            if name in model.fibers:
                raise ModelSyntaxError(f"duplicate fiber {name!r}", lineno, col0)
            gens = []
            for part in body.split(","):
                tok = part.strip()
                mm = re.fullmatch(r"(?:e_?)?(\d+)", tok)
                if not mm:
                    raise ModelSyntaxError(f"bad fiber generator {tok!r}", lineno, col0)
                gens.append(int(mm.group(1)))
            model.fibers[name] = FiberDecl(alg, tuple(gens))
        elif m := _TASK.match(line):
            model.tasks.append(Task(m.group(1), m.group(2).split(), lineno))
        else:
            raise ModelSyntaxError(f"cannot parse {line!r}", lineno, col0)
    close_block()

    dims = model.algebra_dims()
    for name, alg, body, lineno, col in pending_forms:
        if alg not in dims:
            raise ModelSyntaxError(f"form {name!r} refers to unknown algebra {alg!r}", lineno)
        model.forms[name] = FormDecl(alg, _parse(body, dims[alg], lineno, col))
    for name, fib in model.fibers.items():
        if fib.algebra not in dims:
            raise ModelSyntaxError(f"fiber {name!r} refers to unknown algebra {fib.algebra!r}")
        for i in fib.generators:
            if not 1 <= i <= dims[fib.algebra]:
                raise ModelSyntaxError(f"fiber {name!r}: index {i} out of range")
        if len(set(fib.generators)) != len(fib.generators):
            raise ModelSyntaxError(f"fiber {name!r} repeats a generator")
    return model


def _parse(body: str, dim: int, lineno: int, offset: int) -> Form:
    try:
        return parse_form(body, dim)
    except FormSyntaxError as exc:
        col = None
        if exc.position is not None:
            col = offset + exc.position + 1
        msg = str(exc).split(" (at column")[0]
        raise ModelSyntaxError(msg, lineno, col) from None


def print_model(model: ModelFile) -> str:
    """Canonical text; ``parse_model(print_model(m)) == m``."""
    out = []
    for name, g in model.algebras.items():
        out.append(f"algebra {name} dim {g.dim}")
        for k, f in g.differentials().items():
            if f:
                idx = f"{{{k}}}" if g.dim > 9 else str(k)
                out.append(f"  d e{idx} = {format_form(f)}")
    for name, decl in model.forms.items():
        out.append(f"form {name} on {decl.algebra} = {format_form(decl.form)}")
    for name, fib in model.fibers.items():
        out.append(f"fiber {name} on {fib.algebra} = span({', '.join(f'e{i}' for i in fib.generators)})")
    for t in model.tasks:
        out.append(t.text())
    return "\n".join(out) + ("\n" if out else "")
