"""Differential forms over a generator table.

The differential dz of a coordinate z carries parity |z| + 1, so the
differentials of odd coordinates are even objects: they commute with
everything and may repeat inside a word.  Differentials of even
coordinates anticommute among themselves and square to zero.

A form is a sum of canonical words

    F * dz(a_1) .. dz(a_k)

with the coefficient function on the left and the differentials sorted,
even differentials first in weakly increasing rank order, odd ones last
in strictly increasing rank order.  The rank of the position of pair i
is 2*i, the rank of its momentum is 2*i + 1.  Parameters have no
differential.
"""

from __future__ import annotations

from .errors import ParityMismatch, TableMismatch, UnknownGenerator
from .superalg import EVEN, ODD, GeneratorTable, SuperFunction
from .symplectic import SuperVectorField


def rank_of(table: GeneratorTable, name: str) -> int:
    role, i = table.kind_of(name)
    if role == "param":
        raise UnknownGenerator(f"{name} is a parameter, not a coordinate")
    return 2 * i + (1 if role == "mom" else 0)


def rank_name(table: GeneratorTable, rank: int) -> str:
    i, m = divmod(rank, 2)
    return table.momentum(i) if m else table.position(i)


def dz_parity(table: GeneratorTable, rank: int) -> int:
    # parity of dz is the coordinate parity shifted by one
    return (table.parity_of(rank_name(table, rank)) + 1) & 1


def _normalize_sequence(table: GeneratorTable, items):
    """Bring an alternating word of functions and differentials to
    canonical shape.

    `items` is a sequence of ("fn", SuperFunction) and ("dz", rank)
    entries read left to right.  Returns (coefficient, (eword, oword))
    or None when the word vanishes.
    """
    coeff = None
    ranks = []
    crossed = 0  # parity of the differential prefix walked so far
    for kind, val in items:
        if kind == "fn":
            f = val.parity_scale(1, -1) if crossed & 1 else val
            coeff = f if coeff is None else coeff * f
        else:
            crossed += dz_parity(table, val)
            ranks.append(val)
    if coeff is None:
        coeff = SuperFunction.one(table)
    if coeff.is_zero():
        return None
    sign = 1
    pars = [dz_parity(table, r) for r in ranks]
    for i in range(1, len(ranks)):
        j = i
        while j > 0 and (pars[j - 1], ranks[j - 1]) > (pars[j], ranks[j]):
            if pars[j - 1] and pars[j]:
                sign = -sign
            ranks[j - 1], ranks[j] = ranks[j], ranks[j - 1]
            pars[j - 1], pars[j] = pars[j], pars[j - 1]
            j -= 1
    split = 0
    while split < len(ranks) and pars[split] == EVEN:
        split += 1
    oword = tuple(ranks[split:])
    for a, b in zip(oword, oword[1:]):
        if a == b:
            return None
    if sign < 0:
        coeff = coeff.scale(-1)
    return coeff, (tuple(ranks[:split]), oword)


class SuperForm:
    """Finite sum of canonical words F * dz(..) .. dz(..)."""

    __slots__ = ("table", "terms")

    def __init__(self, table: GeneratorTable, terms=None):
        self.table = table
        self.terms = {}
        if terms:
            for key, coeff in terms.items():
                if not coeff.is_zero():
                    self.terms[key] = coeff

    @classmethod
    def zero(cls, table: GeneratorTable) -> "SuperForm":
        return cls(table)

    @classmethod
    def from_function(cls, f: SuperFunction) -> "SuperForm":
        return cls(f.table, {((), ()): f})

    def is_zero(self) -> bool:
        return not self.terms

    def word_parity(self, key) -> int:
        return len(key[1]) & 1

    def parity(self):
        seen = None
        for key, coeff in self.terms.items():
            cp = coeff.parity()
            if cp is None:
                return None
            p = (cp + len(key[1])) & 1
            if seen is None:
                seen = p
            elif seen != p:
                return None
        return EVEN if seen is None else seen

    def homogeneous_part(self, par: int) -> "SuperForm":
        out = {}
        for key, coeff in self.terms.items():
            part = coeff.homogeneous_part((par + len(key[1])) & 1)
            if not part.is_zero():
                out[key] = part
        return SuperForm(self.table, out)

    def _check(self, other: "SuperForm"):
        if self.table != other.table:
            raise TableMismatch("forms live over different tables")

    def __add__(self, other: "SuperForm") -> "SuperForm":
        self._check(other)
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            cur = out.get(key)
            out[key] = coeff if cur is None else cur + coeff
        return SuperForm(self.table, out)

    def __neg__(self) -> "SuperForm":
        return self.scale(-1)

    def __sub__(self, other: "SuperForm") -> "SuperForm":
        return self + (-other)

    def scale(self, k) -> "SuperForm":
        return SuperForm(
            self.table, {key: coeff.scale(k) for key, coeff in self.terms.items()}
        )

    def _accumulate(self, out: dict, normalized):
        if normalized is None:
            return
        coeff, key = normalized
        cur = out.get(key)
        out[key] = coeff if cur is None else cur + coeff

    def __mul__(self, other: "SuperForm") -> "SuperForm":
        """Wedge product."""
        self._check(other)
        out = {}
        for k1, c1 in self.terms.items():
            w1 = [("dz", r) for r in k1[0] + k1[1]]
            for k2, c2 in other.terms.items():
                items = [("fn", c1)] + w1 + [("fn", c2)]
                items += [("dz", r) for r in k2[0] + k2[1]]
                self._accumulate(out, _normalize_sequence(self.table, items))
        return SuperForm(self.table, out)

    def d(self) -> "SuperForm":
        """Exterior differential, placed to the left: d(F W) = dF ^ W."""
        table = self.table
        out = {}
        for key, coeff in self.terms.items():
            word = [("dz", r) for r in key[0] + key[1]]
            for rank in range(2 * table.n):
                df = coeff.left_deriv(rank_name(table, rank))
                if df.is_zero():
                    continue
                items = [("dz", rank), ("fn", df)] + word
                self._accumulate(out, _normalize_sequence(table, items))
        return SuperForm(table, out)

    def contract(self, x: SuperVectorField) -> "SuperForm":
        """Interior product with a vector field, acting from the left."""
        if x.table != self.table:
            raise TableMismatch("vector field lives over a different table")
        table = self.table
        out = {}
        for xpar in (EVEN, ODD):
            xp = x.homogeneous_part(xpar)
            if xp.is_zero():
                continue
            op_odd = xpar == EVEN  # the operator has parity |X| + 1
            for key, coeff in self.terms.items():
                pre = coeff.parity_scale(1, -1) if op_odd else coeff
                word = key[0] + key[1]
                sign = 1
                for k, rank in enumerate(word):
                    comp = xp.component(rank_name(table, rank))
                    if not comp.is_zero():
                        items = [("fn", pre.scale(sign)), ("fn", comp)]
                        # remaining differentials keep their order
                        items[1:1] = [("dz", r) for r in word[:k]]
                        items += [("dz", r) for r in word[k + 1 :]]
                        self._accumulate(out, _normalize_sequence(table, items))
                    if op_odd and dz_parity(table, rank):
                        sign = -sign
        return SuperForm(table, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SuperForm):
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.table, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "SuperForm(0)"
        bits = []
        for key in sorted(self.terms, key=lambda k: (len(k[0]) + len(k[1]), k)):
            word = "".join(
                f" d({rank_name(self.table, r)})" for r in key[0] + key[1]
            )
            bits.append(f"({self.terms[key]!r}){word}")
        return "SuperForm(" + " + ".join(bits) + ")"


def d_of_function(f: SuperFunction) -> SuperForm:
    return SuperForm.from_function(f).d()


def omega_form(table: GeneratorTable) -> SuperForm:
    """Canonical symplectic form, sum over pairs of d(momentum) d(position)."""
    out = SuperForm.zero(table)
    one = SuperFunction.one(table)
    for i in range(table.n):
        items = [("fn", one), ("dz", 2 * i + 1), ("dz", 2 * i)]
        got = _normalize_sequence(table, items)
        out = out + SuperForm(table, {got[1]: got[0]})
    return out


def one_form(table: GeneratorTable, comps: dict) -> SuperForm:
    """Build sum_z comps[z] * d(z) from coefficient superfunctions."""
    out = SuperForm.zero(table)
    for name, f in comps.items():
        got = _normalize_sequence(
            table, [("fn", f), ("dz", rank_of(table, name))])
        if got is not None:
            out = out + SuperForm(table, {got[1]: got[0]})
    return out


def lie_derivative(form: SuperForm, x: SuperVectorField) -> SuperForm:
    """Cartan formula: L_X = i_X d + (-1)^|X| d i_X, per homogeneous part."""
    out = SuperForm.zero(form.table)
    for xpar in (EVEN, ODD):
        xp = x.homogeneous_part(xpar)
        if xp.is_zero():
            continue
        term = form.d().contract(xp)
        exact = form.contract(xp).d()
        out = out + term + (exact if xpar == EVEN else -exact)
    return out


def pullback(form: SuperForm, exprs: dict, source: GeneratorTable) -> SuperForm:
    """Pull a form back along the map whose coordinate expressions over
    the source are given by `exprs` (target coordinate name -> image).

    Coefficients are pulled back by substitution, each differential
    dz(g) by the differential of the image of g.
    """
    target = form.table
    dpsi = {}
    for rank in range(2 * target.n):
        name = rank_name(target, rank)
        img = exprs.get(name)
        if img is None:
            img = SuperFunction.generator(source, name)
        elif not img.is_zero() and img.parity() != target.parity_of(name):
            raise ParityMismatch(f"image of {name} has the wrong parity")
        dpsi[rank] = d_of_function(img)
    out = SuperForm.zero(source)
    for key, coeff in form.terms.items():
        part = SuperForm.from_function(coeff.substitute(exprs, source))
        for rank in key[0] + key[1]:
            part = part * dpsi[rank]
        out = out + part
    return out
