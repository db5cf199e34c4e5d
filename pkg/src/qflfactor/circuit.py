"""Gate-level circuit IR over a role-tagged qubit registry, plus OpenQASM 2.0 I/O.

Qubit ``i`` is position ``i`` in the registry.  Synthesized circuits order
the registry as data qubits (p bits ascending, then q bits), ancillas, then
labels.  All qubits start in ``|0>``.

Multi-controlled X gates carry one polarity flag per control (``False``
means the gate fires when that control is ``|0>``).  :func:`lower` rewrites
negative controls as X pairs around a positive-control gate, which is the
form written to QASM.
"""
from __future__ import annotations

import ast
import enum
import math
import operator
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ParseError, UnknownQubit
from .problem import Kind, Variable

__all__ = [
    "RoleKind",
    "QubitRole",
    "Gate",
    "Circuit",
    "X",
    "H",
    "RY",
    "CNOT",
    "CCX",
    "MCX",
    "append",
    "compose",
    "depth",
    "gate_counts",
    "lower",
    "export_qasm",
    "import_qasm",
]


class RoleKind(enum.IntEnum):
    DATA = 0
    ANCILLA = 1
    LABEL = 2


@dataclass(frozen=True, order=True)
class QubitRole:
    kind: RoleKind
    index: int
    variable: Variable | None = field(default=None, compare=False)

    @classmethod
    def data(cls, variable: Variable | None, index: int = 0) -> "QubitRole":
        return cls(RoleKind.DATA, index, variable)

    @classmethod
    def label(cls, index: int) -> "QubitRole":
        return cls(RoleKind.LABEL, index)

    @classmethod
    def ancilla(cls, index: int) -> "QubitRole":
        return cls(RoleKind.ANCILLA, index)

    @property
    def name(self) -> str:
        if self.kind is RoleKind.DATA:
            return str(self.variable) if self.variable is not None else f"d{self.index}"
        if self.kind is RoleKind.ANCILLA:
            return f"a{self.index}"
        return f"L{self.index}"

    def __eq__(self, other):
        if not isinstance(other, QubitRole):
            return NotImplemented
        return (self.kind, self.index, self.variable) == (other.kind, other.index, other.variable)

    def __hash__(self):
        return hash((self.kind, self.index, self.variable))

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Gate:
    """One gate.  ``kind`` is one of x, h, ry, cx, ccx, mcx."""

    kind: str
    target: int
    controls: tuple[int, ...] = ()
    polarity: tuple[bool, ...] = ()
    angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(self.controls))
        pol = tuple(self.polarity) if self.polarity else (True,) * len(self.controls)
        if len(pol) != len(self.controls):
            raise ValueError("one polarity flag per control")
        object.__setattr__(self, "polarity", pol)
        qubits = self.qubits
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"gate {self.kind} repeats a qubit: {qubits}")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + (self.target,)

    @property
    def is_permutation(self) -> bool:
        return self.kind not in ("h", "ry")

    def __str__(self):
        ctl = ",".join(f"{'' if p else '!'}{c}" for c, p in zip(self.controls, self.polarity))
        arg = f"({self.angle:g})" if self.kind == "ry" else ""
        return f"{self.kind}{arg} [{ctl}] -> {self.target}" if ctl else f"{self.kind}{arg} {self.target}"


def X(t: int) -> Gate:
    return Gate("x", t)


def H(t: int) -> Gate:
    return Gate("h", t)


def RY(t: int, angle: float) -> Gate:
    return Gate("ry", t, angle=float(angle))


def CNOT(c: int, t: int) -> Gate:
    return Gate("cx", t, (c,))


def CCX(c1: int, c2: int, t: int) -> Gate:
    return Gate("ccx", t, (c1, c2))


def MCX(controls: Sequence[int], t: int, polarity: Sequence[bool] | None = None) -> Gate:
    """Multi-controlled X; positive controls everywhere unless ``polarity`` says otherwise."""
    return Gate("mcx", t, tuple(controls), tuple(polarity) if polarity is not None else ())


@dataclass(frozen=True)
class Circuit:
    registry: tuple[QubitRole, ...] = ()
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "registry", tuple(self.registry))
        object.__setattr__(self, "gates", tuple(self.gates))
        n = len(self.registry)
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < n:
                    raise UnknownQubit(f"{g} references qubit {q}; registry has {n}")

    @classmethod
    def blank(cls, n: int, gates: Iterable[Gate] = ()) -> "Circuit":
        return cls(tuple(QubitRole.data(None, i) for i in range(n)), tuple(gates))

    @property
    def n_qubits(self) -> int:
        return len(self.registry)

    def qubits_of(self, kind: RoleKind) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.registry) if r.kind is kind)

    def index_of(self, role: QubitRole) -> int:
        return self.registry.index(role)

    def append(self, gate: Gate) -> "Circuit":
        return append(self, gate)

    def __len__(self):
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        return compose(self, other)


def append(circuit: Circuit, gate: Gate) -> Circuit:
    return Circuit(circuit.registry, circuit.gates + (gate,))


def compose(c1: Circuit, c2: Circuit) -> Circuit:
    if c1.registry != c2.registry:
        raise UnknownQubit("compose needs identical qubit registries")
    return Circuit(c1.registry, c1.gates + c2.gates)


def depth(circuit: Circuit) -> int:
    """Longest chain of gates where consecutive gates share a qubit."""
    level = [0] * circuit.n_qubits
    best = 0
    for g in circuit.gates:
        d = 1 + max(level[q] for q in g.qubits)
        for q in g.qubits:
            level[q] = d
        best = max(best, d)
    return best


def gate_counts(circuit: Circuit) -> dict[str, int]:
    return dict(sorted(Counter(g.kind for g in circuit.gates).items()))


_BY_ARITY = {0: "x", 1: "cx", 2: "ccx"}


def lower(circuit: Circuit) -> Circuit:
    """Rewrite negative controls as X conjugation and name gates by arity.

    ``mcx`` with 0, 1 or 2 controls becomes ``x``, ``cx`` or ``ccx``; three
    or more controls stay ``mcx`` with positive polarity.
    """
    out: list[Gate] = []
    for g in circuit.gates:
        if g.kind not in ("mcx", "cx", "ccx"):
            out.append(g)
            continue
        flips = [c for c, p in zip(g.controls, g.polarity) if not p]
        out.extend(X(c) for c in flips)
        out.append(Gate(_BY_ARITY.get(len(g.controls), "mcx"), g.target, g.controls))
        out.extend(X(c) for c in flips)
    return Circuit(circuit.registry, tuple(out))


# ------------------------------------------------------------------- QASM

_REG_NAMES = {RoleKind.DATA: "data", RoleKind.ANCILLA: "anc", RoleKind.LABEL: "label"}
_REG_KINDS = {v: k for k, v in _REG_NAMES.items()}
_QELIB_MCX = {3: "c3x", 4: "c4x"}


def _mcx_name(k: int) -> str:
    return _QELIB_MCX.get(k, f"c{k}x")


def export_qasm(circuit: Circuit) -> str:
    """Lower ``circuit`` and write it as OpenQASM 2.0.

    One ``qreg`` per role group; data qubit names ride in a trailing comment
    so :func:`import_qasm` can restore the registry.  Gates with five or more
    controls are written as ``c<k>x`` with an ``opaque`` declaration.
    """
    low = lower(circuit)
    kinds = [r.kind for r in low.registry]
    if kinds != sorted(kinds):
        raise ValueError("registry must list data, then ancilla, then label qubits")
    where: list[tuple[str, int]] = []
    groups: dict[RoleKind, list[QubitRole]] = {}
    for r in low.registry:
        grp = groups.setdefault(r.kind, [])
        where.append((_REG_NAMES[r.kind], len(grp)))
        grp.append(r)

    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    wide = sorted({len(g.controls) for g in low.gates if g.kind == "mcx" and len(g.controls) >= 5})
    for k in wide:
        args = ",".join(f"c{i}" for i in range(k))
        lines.append(f"opaque {_mcx_name(k)} {args},t;")
    for kind, roles in groups.items():
        names = " ".join(r.name for r in roles)
        lines.append(f"qreg {_REG_NAMES[kind]}[{len(roles)}]; // {names}")

    def ref(q):
        reg, i = where[q]
        return f"{reg}[{i}]"

    for g in low.gates:
        args = ",".join(ref(q) for q in g.qubits)
        if g.kind == "ry":
            lines.append(f"ry({g.angle!r}) {args};")
        elif g.kind == "mcx":
            lines.append(f"{_mcx_name(len(g.controls))} {args};")
        else:
            lines.append(f"{g.kind} {args};")
    return "\n".join(lines) + "\n"


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def _eval_angle(text: str) -> float:
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(text)

    return ev(ast.parse(text, mode="eval"))


_VAR_RE = re.compile(r"^(?:([pq])(\d+)|z(\d+)_(\d+))$")


def _parse_role_name(name: str, kind: RoleKind, index: int) -> QubitRole:
    if kind is RoleKind.ANCILLA:
        return QubitRole.ancilla(index + 1)
    if kind is RoleKind.LABEL:
        return QubitRole.label(index + 1)
    m = _VAR_RE.match(name)
    if not m:
        return QubitRole.data(None, index)
    if m.group(1):
        return QubitRole.data(Variable(Kind.P if m.group(1) == "p" else Kind.Q, int(m.group(2))), index)
    return QubitRole.data(Variable(Kind.CARRY, int(m.group(3)), int(m.group(4))), index)


_STMT_RE = re.compile(r"^([a-z][a-z0-9_]*)\s*(?:\(([^)]*)\))?\s+(.+)$")
_REF_RE = re.compile(r"^([A-Za-z_]\w*)\[(\d+)\]$")
_GATE_ARITY = {"x": 0, "h": 0, "ry": 0, "cx": 1, "ccx": 2, "c3x": 3, "c4x": 4}


def import_qasm(text: str) -> Circuit:
    """Parse the subset written by :func:`export_qasm` back into a circuit."""
    roles: list[QubitRole] = []
    offsets: dict[str, tuple[int, int]] = {}
    gates: list[Gate] = []
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        code, _, comment = raw.partition("//")
        line = code.strip()
        if not line:
            continue
        if not line.endswith(";"):
            raise ParseError(f"missing ';' in {raw.strip()!r}", lineno)
        line = line[:-1].strip()
        if line.startswith("OPENQASM"):
            if line.split()[1:] != ["2.0"]:
                raise ParseError("only OPENQASM 2.0 is supported", lineno)
            saw_header = True
            continue
        if not saw_header:
            raise ParseError("expected 'OPENQASM 2.0;' header", lineno)
        if line.startswith("include") or line.startswith("opaque"):
            continue
        if line.startswith("qreg"):
            m = re.match(r"^qreg\s+(\w+)\[(\d+)\]$", line)
            if not m:
                raise ParseError(f"bad qreg declaration {line!r}", lineno)
            reg, size = m.group(1), int(m.group(2))
            kind = _REG_KINDS.get(reg, RoleKind.DATA)
            names = comment.split()
            if names and len(names) != size:
                raise ParseError(f"qreg {reg} annotates {len(names)} names for {size} qubits", lineno)
            offsets[reg] = (len(roles), size)
            for i in range(size):
                roles.append(_parse_role_name(names[i] if names else "", kind, i))
            continue
        m = _STMT_RE.match(line)
        if not m:
            raise ParseError(f"cannot parse statement {line!r}", lineno)
        name, param, args = m.group(1), m.group(2), m.group(3)
        qubits = []
        for a in args.split(","):
            rm = _REF_RE.match(a.strip())
            if not rm or rm.group(1) not in offsets:
                raise ParseError(f"unknown qubit reference {a.strip()!r}", lineno)
            base, size = offsets[rm.group(1)]
            i = int(rm.group(2))
            if i >= size:
                raise ParseError(f"index {i} out of range for {rm.group(1)}[{size}]", lineno)
            qubits.append(base + i)
        cm = re.match(r"^c(\d+)x$", name)
        arity = _GATE_ARITY.get(name, int(cm.group(1)) if cm else None)
        if arity is None:
            raise ParseError(f"unsupported gate {name!r}", lineno)
        if len(qubits) != arity + 1:
            raise ParseError(f"{name} expects {arity + 1} qubits, got {len(qubits)}", lineno)
        if (param is not None) != (name == "ry"):
            raise ParseError(f"unexpected parameter list for {name}", lineno)
        try:
            if name == "ry":
                gates.append(RY(qubits[0], _eval_angle(param)))
            elif name in ("x", "h", "cx", "ccx"):
                gates.append(Gate(name, qubits[-1], tuple(qubits[:-1])))
            else:
                gates.append(Gate("mcx", qubits[-1], tuple(qubits[:-1])))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    if not saw_header:
        raise ParseError("empty input: expected 'OPENQASM 2.0;' header", 1)
    return Circuit(tuple(roles), tuple(gates))
