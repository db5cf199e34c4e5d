"""Symbolic pre-processing of the column clauses.

The simplifier repeatedly substitutes known values into the clauses and
applies a small set of deduction rules until nothing changes:

``bounds``
    A term with weight ``|c| >= 2`` (typically an outgoing carry) is fixed
    when only one of its two values keeps the clause inside the range the
    remaining terms can reach.
``unit`` / ``r25``
    ``c*x = r`` fixes ``x``; ``xy = 1`` gives ``x = y = 1``.
``r26``
    A sum of positive terms equal to 0 zeroes every term.
``r27``
    ``x + y = 2z`` gives ``x = y = z``.
``r28``
    ``x + 2y - 2z = 0`` gives ``x = 0`` and ``y = z``.
``r29``
    ``x - 2z + 1 = 0`` gives ``x = z = 1``.
``r23``
    ``x + y = 1`` records the fact ``xy = 0``; the product is then deleted
    wherever it occurs.  A fact that no residual clause implies on its own
    is restored as the clause ``xy = 0`` when the residual is built, so no
    information is lost.
``kill``
    Housekeeping for recorded facts: once ``x`` is known to be 1, the fact
    ``xy = 0`` fixes ``y = 0``.

Pinned products
---------------
When the final residual is built, a product ``x*y`` whose factor ``x`` was
fixed to 0 while ``y`` is still free is kept rather than erased.  The clause
then still checks the product explicitly, and ``x`` becomes a *pinned* data
variable held at its bound value.  Pass ``retain_pinned=False`` to erase such
products as well.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import TooLarge, Unsatisfiable
from .problem import Clause, ClauseSystem, Monomial, Variable

__all__ = [
    "Binding",
    "TraceStep",
    "RulePass",
    "ReducedSystem",
    "deduce_parity_bounds",
    "apply_rules",
    "simplify",
    "replay",
    "brute_force_solutions",
    "format_trace",
]


@dataclass(frozen=True, order=True)
class Binding:
    """``variable`` equals a constant (0/1) or another variable."""

    variable: Variable
    value: int | Variable

    @property
    def is_constant(self):
        return isinstance(self.value, int)

    def __str__(self):
        return f"{self.variable} = {self.value}"


@dataclass(frozen=True)
class TraceStep:
    rule: str
    clause: Clause | None
    produced: tuple = ()

    def __str__(self):
        src = str(self.clause) if self.clause is not None else "-"
        out = "; ".join(f"{x} = 0" if isinstance(x, Monomial) else str(x) for x in self.produced)
        return f"[{self.rule}] {src}  =>  {out or '-'}"


class RulePass(tuple):
    """Result of :func:`apply_rules`: ``(bindings, system, kills)``."""

    def __new__(cls, bindings, system, kills):
        return super().__new__(cls, (bindings, system, kills))

    bindings = property(lambda self: self[0])
    system = property(lambda self: self[1])
    kills = property(lambda self: self[2])


class _Store:
    """Union-find over variables whose roots may be tied to a constant."""

    def __init__(self):
        self.parent: dict[Variable, Variable | int] = {}
        self.kills: set[Monomial] = set()
        self.order: list[Variable] = []

    def resolve(self, v: Variable) -> Variable | int:
        path = []
        x: Variable | int = v
        while isinstance(x, Variable) and x in self.parent:
            path.append(x)
            x = self.parent[x]
        for node in path[:-1]:
            self.parent[node] = x
        return x

    def _link(self, v: Variable, target: Variable | int):
        self.parent[v] = target
        self.order.append(v)

    def bind(self, v: Variable, value: Variable | int) -> bool:
        a = self.resolve(v)
        b = self.resolve(value) if isinstance(value, Variable) else value
        if a == b:
            return False
        if isinstance(a, int) and isinstance(b, int):
            raise Unsatisfiable(f"{v} bound to both {a} and {b}")
        if isinstance(a, int):
            self._link(b, a)
        elif isinstance(b, int):
            self._link(a, b)
        else:
            lo, hi = sorted((a, b))
            self._link(hi, lo)
        return True

    def kill(self, m: Monomial) -> bool:
        if m in self.kills:
            return False
        self.kills.add(m)
        return True

    def substitute(self, clause: Clause, retain_pinned: bool = False) -> Clause:
        terms = []
        const = 0
        for c, m in clause.terms:
            vals = [self.resolve(v) for v in m.vars]
            if retain_pinned and len(vals) == 2:
                for keep, other in ((0, 1), (1, 0)):
                    if vals[keep] == 0 and isinstance(vals[other], Variable):
                        terms.append((c, Monomial((m.vars[keep], vals[other]))))
                        break
                else:
                    keep = None
                if keep is not None:
                    continue
            if 0 in vals:
                continue
            mono = Monomial(tuple(x for x in vals if isinstance(x, Variable)))
            if mono in self.kills:
                continue
            if mono.degree == 0:
                const += c
            else:
                terms.append((c, mono))
        return Clause.build(terms, clause.rhs - const, tag=clause.tag)

    def bindings(self, variables: Iterable[Variable]) -> tuple[Binding, ...]:
        out = []
        for v in sorted(set(variables)):
            r = self.resolve(v)
            if r != v:
                out.append(Binding(v, r))
        return tuple(out)


# --------------------------------------------------------------- deductions


def deduce_parity_bounds(clause: Clause) -> list[Binding]:
    """Fix heavy terms (``|coeff| >= 2``) that only one value keeps feasible.

    ``p1 + q1 = 1 + 2*z1_2`` gives ``z1_2 = 0``: with ``z1_2 = 1`` the left
    side would have to reach 3.  A heavy product forced to 1 binds both of
    its factors; a heavy product forced to 0 yields nothing here.
    """
    if clause.is_contradiction:
        raise Unsatisfiable(f"contradiction: {clause}")
    lo, hi = clause.bounds()
    if not lo <= clause.rhs <= hi:
        raise Unsatisfiable(f"{clause} cannot reach its right-hand side")
    out: list[Binding] = []
    for c, m in clause.terms:
        if abs(c) < 2:
            continue
        rest_lo = lo - min(c, 0)
        rest_hi = hi - max(c, 0)
        ok = [rest_lo <= clause.rhs - c * val <= rest_hi for val in (0, 1)]
        if not any(ok):
            raise Unsatisfiable(f"{clause}: term {m} has no feasible value")
        if all(ok):
            continue
        val = ok.index(True)
        if m.degree == 1:
            out.append(Binding(m.vars[0], val))
        elif val == 1:
            out.extend(Binding(v, 1) for v in m.vars)
    return out


def _signed(clause: Clause):
    coeffs = {m: c for c, m in clause.terms}
    yield coeffs, clause.rhs
    yield {m: -c for m, c in coeffs.items()}, -clause.rhs


def _linear(coeffs: Mapping[Monomial, int]) -> bool:
    return all(m.degree == 1 for m in coeffs)


def _by_coeff(coeffs, value):
    return sorted(m.vars[0] for m, c in coeffs.items() if c == value)


def _rule_unit(clause: Clause):
    """unit / r25: single-term clauses."""
    if len(clause.terms) != 1:
        return None
    (c, m), r = clause.terms[0], clause.rhs
    if r not in (0, c):
        raise Unsatisfiable(f"contradiction: {clause}")
    val = 0 if r == 0 else 1
    if m.degree == 1:
        return "unit", [Binding(m.vars[0], val)], []
    if val == 1:
        return "r25", [Binding(v, 1) for v in m.vars], []
    return "r26", [], [m]


def _rule_r26(clause: Clause):
    if clause.rhs != 0 or any(c < 0 for c, _ in clause.terms):
        return None
    binds = [Binding(m.vars[0], 0) for _, m in clause.terms if m.degree == 1]
    kills = [m for _, m in clause.terms if m.degree == 2]
    return "r26", binds, kills


def _rule_r27_28_29(clause: Clause):
    for coeffs, rhs in _signed(clause):
        if not _linear(coeffs):
            return None
        values = sorted(coeffs.values())
        if rhs == 0 and values == [-2, 1, 1]:
            x, y = _by_coeff(coeffs, 1)
            (z,) = _by_coeff(coeffs, -2)
            rep = min(x, y, z)
            return "r27", [Binding(v, rep) for v in (x, y, z) if v != rep], []
        if rhs == 0 and values == [-2, 1, 2]:
            (x,) = _by_coeff(coeffs, 1)
            (y,) = _by_coeff(coeffs, 2)
            (z,) = _by_coeff(coeffs, -2)
            lo, hi = sorted((y, z))
            return "r28", [Binding(x, 0), Binding(hi, lo)], []
        if rhs == -1 and values == [-2, 1]:
            (x,) = _by_coeff(coeffs, 1)
            (z,) = _by_coeff(coeffs, -2)
            return "r29", [Binding(x, 1), Binding(z, 1)], []
    return None


def _rule_r23(clause: Clause):
    if clause.rhs == 1 and len(clause.terms) == 2 and all(
        c == 1 and m.degree == 1 for c, m in clause.terms
    ):
        x, y = (m.vars[0] for _, m in clause.terms)
        return "r23", [], [Monomial((x, y))]
    return None


_RULE_STAGES = (
    (_rule_unit, _rule_r26),
    (_rule_r27_28_29,),
    (_rule_r23,),
)


def _run_stage(stage, clauses, store: _Store, trace: list[TraceStep]) -> bool:
    changed = False
    for clause in clauses:
        for rule in stage:
            hit = rule(clause)
            if hit is None:
                continue
            name, binds, kills = hit
            new = [b for b in binds if store.bind(b.variable, b.value)]
            new_kills = [m for m in kills if store.kill(m)]
            if new or new_kills:
                trace.append(TraceStep(name, clause, tuple(new) + tuple(new_kills)))
                changed = True
            break
    return changed


def apply_rules(system: ClauseSystem) -> RulePass:
    """One pass of the pattern rules over every clause.

    Returns the new bindings, the system with bindings and killed products
    substituted, and the recorded ``xy = 0`` facts.
    """
    store = _Store()
    for v, val in system.fixed:
        store.bind(v, val)
    trace: list[TraceStep] = []
    for stage in _RULE_STAGES:
        _run_stage(stage, system.clauses, store, trace)
    clauses = [store.substitute(c) for c in system.clauses]
    for c in clauses:
        if c.is_contradiction:
            raise Unsatisfiable(f"contradiction: {c}")
    clauses = _dedupe(c for c in clauses if not c.is_trivial)
    fixed = dict(system.fixed)
    bindings = [b for b in store.bindings(store.order) if b.variable not in fixed]
    return RulePass(bindings, ClauseSystem(clauses, system.fixed), sorted(store.kills))


def _dedupe(clauses: Iterable[Clause]) -> tuple[Clause, ...]:
    seen = set()
    out = []
    for c in clauses:
        if c not in seen:
            seen.add(c)
            out.append(c)
    return tuple(out)


# ---------------------------------------------------------------- pipeline


@dataclass(frozen=True)
class ReducedSystem:
    """Bindings plus the residual clauses that still need a search.

    ``pinned`` lists residual variables that are also bound to a constant
    (see *Pinned products* in the module docstring); ``free`` lists the
    residual variables the search has to explore.
    """

    bindings: tuple[Binding, ...]
    residual: tuple[Clause, ...]
    kills: tuple[Monomial, ...] = ()
    source: ClauseSystem = field(default_factory=ClauseSystem, repr=False)

    @property
    def binding_map(self) -> dict[Variable, int | Variable]:
        return {b.variable: b.value for b in self.bindings}

    @property
    def variables(self) -> tuple[Variable, ...]:
        return tuple(sorted({v for c in self.residual for v in c.variables}))

    @property
    def pinned(self) -> dict[Variable, int]:
        bm = self.binding_map
        return {v: bm[v] for v in self.variables if isinstance(bm.get(v), int)}

    @property
    def free(self) -> tuple[Variable, ...]:
        pinned = self.pinned
        return tuple(v for v in self.variables if v not in pinned)

    @property
    def unconstrained(self) -> tuple[Variable, ...]:
        """Unbound source variables that vanished from every residual clause."""
        bm = self.binding_map
        used = set(self.variables)
        return tuple(v for v in self.source.variables if v not in bm and v not in used)

    def as_system(self) -> ClauseSystem:
        return ClauseSystem(self.residual, self.pinned)

    def expand(self, assignment: Mapping[Variable, int]) -> dict[Variable, int]:
        """Extend an assignment of the residual variables to every source variable."""
        out = dict(assignment)
        for b in self.bindings:
            out[b.variable] = b.value if b.is_constant else assignment[b.value]
        return out

    def solutions(self, max_vars: int | None = 24) -> set[tuple[int, ...]]:
        """All source-system solutions implied by bindings + residual."""
        residual = self.as_system()
        names = residual.variables
        extra = self.unconstrained
        order = self.source.variables
        out = set()
        for sol in brute_force_solutions(residual, max_vars=max_vars):
            base = dict(zip(names, sol))
            for bits in itertools.product((0, 1), repeat=len(extra)):
                full = self.expand({**base, **dict(zip(extra, bits))})
                out.add(tuple(full[v] for v in order))
        return out

    def __str__(self):
        lines = [str(b) for b in self.bindings]
        lines += [str(c) for c in self.residual]
        return "\n".join(lines)


def _substitute_all(clauses, store: _Store, trace: list[TraceStep]) -> tuple[Clause, ...]:
    out = []
    for c in clauses:
        s = store.substitute(c)
        if s.is_contradiction:
            raise Unsatisfiable(f"contradiction: {c} became {s}")
        if s != c:
            trace.append(TraceStep("substitute", c, (s,)))
        if not s.is_trivial:
            out.append(s)
    return _dedupe(out)


def _normalize_kills(store: _Store, trace: list[TraceStep]) -> bool:
    """Re-express kill facts over current representatives; fire the ones that bind."""
    changed = False
    for m in sorted(store.kills):
        vals = [store.resolve(v) for v in m.vars]
        if 0 in vals:
            store.kills.discard(m)
            continue
        free = tuple(sorted({x for x in vals if isinstance(x, Variable)}))
        if not free:
            raise Unsatisfiable(f"fact {m} = 0 contradicts {m} = 1")
        if len(free) == 1:
            # x*1 = 0 or x*x = 0
            store.kills.discard(m)
            if store.bind(free[0], 0):
                trace.append(TraceStep("kill", None, (Binding(free[0], 0),)))
                changed = True
            continue
        mono = Monomial(free)
        if mono != m:
            store.kills.discard(m)
            store.kills.add(mono)
    return changed


def _implied(fact: Monomial, clauses: Iterable[Clause]) -> bool:
    """True if one clause alone rules out ``fact = 1``."""
    for c in clauses:
        names = sorted(c.variables)
        if not set(fact.vars) <= set(names) or len(names) > 16:
            continue
        rest = [v for v in names if v not in fact.vars]
        base = {v: 1 for v in fact.vars}
        if not any(c.holds({**base, **dict(zip(rest, bits))}) for bits in itertools.product((0, 1), repeat=len(rest))):
            return True
    return False


def _finalize(raw: ClauseSystem, store: _Store, retain_pinned: bool) -> ReducedSystem:
    residual = []
    for c in raw.clauses:
        s = store.substitute(c, retain_pinned=retain_pinned)
        if s.is_contradiction:
            raise Unsatisfiable(f"contradiction: {c} became {s}")
        if not s.is_trivial:
            residual.append(s)
    # a fact erased from every clause must survive as a clause of its own
    for m in sorted(store.kills):
        if not _implied(m, residual):
            residual.append(Clause.build([(1, m)], 0, tag="fact"))
    residual = _dedupe(residual)
    return ReducedSystem(
        bindings=store.bindings(raw.variables),
        residual=residual,
        kills=tuple(sorted(store.kills)),
        source=raw,
    )


def simplify(system: ClauseSystem, retain_pinned: bool = True, max_passes: int = 1000):
    """Run substitution and the deduction rules to a fixpoint.

    Returns ``(ReducedSystem, trace)``.  Raises :class:`Unsatisfiable` when
    the clauses contradict each other.
    """
    store = _Store()
    trace: list[TraceStep] = []
    for v, val in system.fixed:
        store.bind(v, val)
        trace.append(TraceStep("fixed", None, (Binding(v, val),)))
    clauses = tuple(system.clauses)
    for _ in range(max_passes):
        clauses = _substitute_all(clauses, store, trace)
        if _normalize_kills(store, trace):
            continue
        changed = False
        for clause in clauses:
            binds = deduce_parity_bounds(clause)
            new = [b for b in binds if store.bind(b.variable, b.value)]
            if new:
                trace.append(TraceStep("bounds", clause, tuple(new)))
                changed = True
        if changed:
            continue
        for stage in _RULE_STAGES:
            if _run_stage(stage, clauses, store, trace):
                changed = True
                break
        if not changed:
            break
    else:  # pragma: no cover - each pass strictly grows the store
        raise RuntimeError("simplification did not reach a fixpoint")
    reduced = _finalize(system, store, retain_pinned)
    trace.append(TraceStep("residual", None, reduced.residual))
    return reduced, tuple(trace)


def replay(system: ClauseSystem, trace: Iterable[TraceStep], retain_pinned: bool = True) -> ReducedSystem:
    """Rebuild the reduced system from the raw clauses and a recorded trace."""
    store = _Store()
    for step in trace:
        if step.rule == "residual":
            continue
        for item in step.produced:
            if isinstance(item, Binding):
                store.bind(item.variable, item.value)
            elif isinstance(item, Monomial):
                store.kill(item)
    _normalize_kills(store, [])
    return _finalize(system, store, retain_pinned)


def format_trace(trace: Iterable[TraceStep]) -> str:
    return "\n".join(str(s) for s in trace)


# ----------------------------------------------------------------- oracle


def brute_force_solutions(system: ClauseSystem, max_vars: int | None = 24) -> set[tuple[int, ...]]:
    """Exact solution set of ``system``, as tuples ordered by ``system.variables``.

    Fixed variables appear at their fixed value.  The enumeration walks the
    free variables depth-first and abandons a branch as soon as a clause can
    no longer reach its right-hand side, so the result equals the plain
    ``2**k`` enumeration while visiting far fewer leaves.
    """
    fixed = system.fixed_map
    names = system.variables
    free = [v for v in names if v not in fixed]
    if max_vars is not None and len(free) > max_vars:
        raise TooLarge(f"{len(free)} free variables exceeds the cap of {max_vars}")

    # order free variables by first appearance so clauses close early
    seen: dict[Variable, None] = {}
    for c in system.clauses:
        for v in sorted(c.variables):
            if v not in fixed:
                seen.setdefault(v)
    for v in free:
        seen.setdefault(v)
    order = list(seen)
    pos = {v: i for i, v in enumerate(order)}

    clauses = [(c.rhs, [(coef, [pos.get(v, -1) for v in m.vars], m.vars) for coef, m in c.terms]) for c in system.clauses]
    watch: list[list[int]] = [[] for _ in order]
    static_ok = True
    for ci, (rhs, terms) in enumerate(clauses):
        idx = [i for _, ids, _ in terms for i in ids if i >= 0]
        if idx:
            watch[max(idx)].append(ci)
            for i in set(idx):
                if ci not in watch[i]:
                    watch[i].append(ci)
        else:
            lhs = sum(coef * all(fixed[v] for v in vs) for coef, _, vs in terms)
            static_ok &= lhs == rhs
    if not static_ok:
        return set()

    values = [0] * len(order)

    def feasible(ci: int, depth: int) -> bool:
        rhs, terms = clauses[ci]
        lo = hi = 0
        for coef, ids, vs in terms:
            known = 1
            open_ = False
            for i, v in zip(ids, vs):
                if i < 0:
                    known &= fixed[v]
                elif i <= depth:
                    known &= values[i]
                else:
                    open_ = True
            if not known:
                continue
            if open_:
                if coef > 0:
                    hi += coef
                else:
                    lo += coef
            else:
                lo += coef
                hi += coef
        return lo <= rhs <= hi

    out: set[tuple[int, ...]] = set()

    def emit():
        full = dict(fixed)
        full.update(zip(order, values))
        out.add(tuple(full[v] for v in names))

    if not order:
        emit()
        return out

    def walk(depth: int):
        for bit in (0, 1):
            values[depth] = bit
            if all(feasible(ci, depth) for ci in watch[depth]):
                if depth + 1 == len(order):
                    emit()
                else:
                    walk(depth + 1)
        values[depth] = 0

    walk(0)
    return out
