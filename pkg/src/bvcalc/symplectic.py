"""Odd-symplectic structure: Laplacian, bracket, Hamiltonian fields.

Sign conventions, fixed once for the whole package:

  laplacian f   = sum_i d_i (d^i f)          (momentum derivative first)
  (f, g)        = (-1)^{|f|+1} X_f(g), which in a chart whose pair i has an
                  even position reads  (-1)^{|f|+1} d^i f d_i g - d_i f d^i g,
                  and with an odd position  -d^i f d_i g + (-1)^{|f|+1} d_i f d^i g
  X_f           = sum_i X^i d_i + X_i d^i with
                  X^i = (-1)^{|f|(|mom_i|+1)} d^i f,
                  X_i = (-1)^{|f|(|pos_i|+1)} d_i f

so that iota_{X_f} omega = df and (q1, p1) = -1 on the standard chart.
Here d_i is the left derivative along position i and d^i along momentum i.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParityMismatch, TableMismatch
from .superalg import (
    EVEN, ODD, DressedFunction, DressedSum, GeneratorTable, SuperFunction,
)


def _zero_like(table, *ops):
    if any(isinstance(o, DressedSum) for o in ops):
        return DressedSum(table)
    if any(isinstance(o, DressedFunction) for o in ops):
        return DressedFunction(SuperFunction.zero(table))
    return SuperFunction.zero(table)


def _hom_parts(f):
    """(parity, part) pairs with zero parts skipped."""
    if isinstance(f, DressedFunction):
        for par in (EVEN, ODD):
            part = DressedFunction(f.base.homogeneous_part(par), f.exponent)
            if not part.is_zero():
                yield par, part
        return
    for par in (EVEN, ODD):
        part = f.homogeneous_part(par)
        if not part.is_zero():
            yield par, part


def laplacian(f):
    """The odd Laplacian sum_i d_i d^i."""
    table = f.table
    out = None
    for i in range(table.n):
        term = f.left_deriv(table.momentum(i)).left_deriv(table.position(i))
        out = term if out is None else out + term
    return out if out is not None else _zero_like(table, f)


def bv_bracket(f, g):
    """The odd bracket (f, g)."""
    table = f.table
    if table != g.table:
        raise TableMismatch("bracket operands over different tables")
    if isinstance(f, DressedSum) or isinstance(g, DressedSum):
        fs = f.parts if isinstance(f, DressedSum) else (f,)
        gs = g.parts if isinstance(g, DressedSum) else (g,)
        return DressedSum(table, [bv_bracket(a, b) for a in fs for b in gs])
    out = None
    for i in range(table.n):
        pos, mom = table.position(i), table.momentum(i)
        dgp = g.left_deriv(pos)
        dgm = g.left_deriv(mom)
        flipped = table.position_parity(i) == ODD
        for par, fp in _hom_parts(f):
            lead = 1 if par else -1  # (-1)^{|f|+1}
            dfm = fp.left_deriv(mom)
            dfp = fp.left_deriv(pos)
            if not flipped:
                term = (dfm * dgp).scale(lead) + (dfp * dgm).scale(-1)
            else:
                term = (dfm * dgp).scale(-1) + (dfp * dgm).scale(lead)
            out = term if out is None else out + term
    return out if out is not None else _zero_like(table, f, g)


class SuperVectorField:
    """First-order operator sum_i X^i d_{pos_i} + X_i d_{mom_i}."""

    __slots__ = ("table", "pos_comps", "mom_comps")

    def __init__(self, table: GeneratorTable, pos_comps, mom_comps):
        pos_comps = tuple(pos_comps)
        mom_comps = tuple(mom_comps)
        if len(pos_comps) != table.n or len(mom_comps) != table.n:
            raise ValueError("need one component per generator")
        for c in (*pos_comps, *mom_comps):
            if c.table != table:
                raise TableMismatch("component over a different table")
        self.table = table
        self.pos_comps = pos_comps
        self.mom_comps = mom_comps

    @classmethod
    def zero(cls, table) -> "SuperVectorField":
        z = SuperFunction.zero(table)
        return cls(table, (z,) * table.n, (z,) * table.n)

    def component(self, name: str) -> SuperFunction:
        role, i = self.table.kind_of(name)
        if role == "pos":
            return self.pos_comps[i]
        if role == "mom":
            return self.mom_comps[i]
        raise ParityMismatch(f"{name} is a parameter, not a generator")

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in (*self.pos_comps, *self.mom_comps))

    def parity(self):
        """Parity of the operator, None when mixed."""
        table = self.table
        seen = set()
        for i in range(table.n):
            for comp, gen_par in (
                    (self.pos_comps[i], table.parity_of(table.position(i))),
                    (self.mom_comps[i], table.parity_of(table.momentum(i)))):
                if comp.is_zero():
                    continue
                cp = comp.parity()
                if cp is None:
                    return None
                seen.add((cp + gen_par) & 1)
        if not seen:
            return EVEN
        if len(seen) == 2:
            return None
        return seen.pop()

    def homogeneous_part(self, par: int) -> "SuperVectorField":
        table = self.table
        pos = tuple(
            self.pos_comps[i].homogeneous_part(
                (par + table.parity_of(table.position(i))) & 1)
            for i in range(table.n))
        mom = tuple(
            self.mom_comps[i].homogeneous_part(
                (par + table.parity_of(table.momentum(i))) & 1)
            for i in range(table.n))
        return SuperVectorField(table, pos, mom)

    def __call__(self, g):
        table = self.table
        out = None
        for i in range(table.n):
            for comp, name in ((self.pos_comps[i], table.position(i)),
                               (self.mom_comps[i], table.momentum(i))):
                if comp.is_zero():
                    continue
                term = comp * g.left_deriv(name)
                out = term if out is None else out + term
        return out if out is not None else _zero_like(table, g)

    def __add__(self, other):
        if not isinstance(other, SuperVectorField):
            return NotImplemented
        if self.table != other.table:
            raise TableMismatch("fields over different tables")
        return SuperVectorField(
            self.table,
            tuple(a + b for a, b in zip(self.pos_comps, other.pos_comps)),
            tuple(a + b for a, b in zip(self.mom_comps, other.mom_comps)))

    def __neg__(self):
        return SuperVectorField(self.table,
                                tuple(-c for c in self.pos_comps),
                                tuple(-c for c in self.mom_comps))

    def __sub__(self, other):
        if not isinstance(other, SuperVectorField):
            return NotImplemented
        return self + (-other)

    def scale(self, k) -> "SuperVectorField":
        return SuperVectorField(self.table,
                                tuple(c.scale(k) for c in self.pos_comps),
                                tuple(c.scale(k) for c in self.mom_comps))

    def __eq__(self, other):
        if not isinstance(other, SuperVectorField):
            return NotImplemented
        return (self.table == other.table
                and self.pos_comps == other.pos_comps
                and self.mom_comps == other.mom_comps)

    def __hash__(self):
        return hash((self.table, self.pos_comps, self.mom_comps))

    def __repr__(self):
        bits = []
        for i in range(self.table.n):
            if not self.pos_comps[i].is_zero():
                bits.append(f"({self.pos_comps[i]!r}) d/d{self.table.position(i)}")
            if not self.mom_comps[i].is_zero():
                bits.append(f"({self.mom_comps[i]!r}) d/d{self.table.momentum(i)}")
        return "SuperVectorField(" + (" + ".join(bits) or "0") + ")"


def hamiltonian_vf(f: SuperFunction) -> SuperVectorField:
    """X_f with iota_{X_f} omega = df."""
    table = f.table
    pos = [SuperFunction.zero(table)] * table.n
    mom = [SuperFunction.zero(table)] * table.n
    for par, fp in _hom_parts(f):
        for i in range(table.n):
            mp = table.parity_of(table.momentum(i))
            pp = table.parity_of(table.position(i))
            xi = fp.left_deriv(table.momentum(i))
            if par and ((mp + 1) & 1):
                xi = -xi
            yi = fp.left_deriv(table.position(i))
            if par and ((pp + 1) & 1):
                yi = -yi
            pos[i] = pos[i] + xi
            mom[i] = mom[i] + yi
    return SuperVectorField(table, pos, mom)


def commutator_vf(x: SuperVectorField, y: SuperVectorField) -> SuperVectorField:
    """Graded commutator [X, Y] as a vector field."""
    table = x.table
    if table != y.table:
        raise TableMismatch("fields over different tables")
    out = SuperVectorField.zero(table)
    for xpar, xp in _vf_parts(x):
        for ypar, yp in _vf_parts(y):
            sign = -1 if (xpar and ypar) else 1
            pos = tuple(xp(yp.pos_comps[i]) - yp(xp.pos_comps[i]).scale(sign)
                        for i in range(table.n))
            mom = tuple(xp(yp.mom_comps[i]) - yp(xp.mom_comps[i]).scale(sign)
                        for i in range(table.n))
            out = out + SuperVectorField(table, pos, mom)
    return out


def _vf_parts(x: SuperVectorField):
    for par in (EVEN, ODD):
        part = x.homogeneous_part(par)
        if not part.is_zero():
            yield par, part


def divergence_standard(x: SuperVectorField):
    """Divergence with respect to the coordinate reference density."""
    table = x.table
    out = SuperFunction.zero(table)
    for xpar, xp in _vf_parts(x):
        sgn_odd = 1 if xpar else -1  # -(-1)^{|X|}
        for i in range(table.n):
            for comp, name in ((xp.pos_comps[i], table.position(i)),
                               (xp.mom_comps[i], table.momentum(i))):
                if comp.is_zero():
                    continue
                d = comp.left_deriv(name)
                if table.parity_of(name) == ODD:
                    d = d.scale(sgn_odd)
                out = out + d
    return out
