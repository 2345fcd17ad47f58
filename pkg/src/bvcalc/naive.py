"""Brute-force Grassmann normalizer used as an independent cross-check.

Everything here works on raw factor words: a term is (coefficient, word)
where word is a tuple of generator names in the order they were written,
evens repeated for powers. Normalization bubble-sorts factors into a fixed
order, flipping the sign once per odd-odd transposition and killing words
with a repeated odd factor. No sparse-polynomial machinery is shared with
the main engine; agreement between the two routes is checked term by term.

parity: dict name -> 0/1. order: dict name -> sort rank.
pairs: list of (position_name, momentum_name).
"""

from __future__ import annotations

from fractions import Fraction

Term = tuple  # (Fraction, tuple[str, ...])


def n_normalize(terms, parity, order):
    """Canonical dict word -> coefficient, zero coefficients dropped."""
    out = {}
    for coeff, word in terms:
        coeff = Fraction(coeff)
        if not coeff:
            continue
        w = list(word)
        sign = 1
        # insertion sort; each adjacent swap of two odd factors flips the sign
        for i in range(1, len(w)):
            j = i
            while j > 0 and order[w[j - 1]] > order[w[j]]:
                if parity[w[j - 1]] and parity[w[j]]:
                    sign = -sign
                w[j - 1], w[j] = w[j], w[j - 1]
                j -= 1
        dead = False
        for a, b in zip(w, w[1:]):
            if a == b and parity[a]:
                dead = True
                break
        if dead:
            continue
        key = tuple(w)
        s = out.get(key, Fraction(0)) + sign * coeff
        if s:
            out[key] = s
        else:
            out.pop(key, None)
    return out


def n_mul(t1, t2):
    return [(c1 * c2, w1 + w2) for c1, w1 in t1 for c2, w2 in t2]


def n_left(name, terms, parity):
    """Left derivative: commute the matched factor to the front, then drop it."""
    odd = parity[name]
    out = []
    for coeff, word in terms:
        for i, f in enumerate(word):
            if f != name:
                continue
            sign = 1
            if odd:
                hops = sum(1 for g in word[:i] if parity[g])
                if hops & 1:
                    sign = -1
            out.append((coeff * sign, word[:i] + word[i + 1:]))
    return out


def n_right(name, terms, parity):
    """Right derivative: commute the matched factor to the back, then drop it."""
    odd = parity[name]
    out = []
    for coeff, word in terms:
        for i, f in enumerate(word):
            if f != name:
                continue
            sign = 1
            if odd:
                hops = sum(1 for g in word[i + 1:] if parity[g])
                if hops & 1:
                    sign = -1
            out.append((coeff * sign, word[:i] + word[i + 1:]))
    return out


def n_laplacian(terms, pairs, parity):
    out = []
    for pos, mom in pairs:
        out.extend(n_left(pos, n_left(mom, terms, parity), parity))
    return out


def n_bracket(t1, t2, pairs, parity):
    """Odd bracket, term by homogeneous term of the first argument."""
    out = []
    for coeff, word in t1:
        f = [(coeff, word)]
        fp = sum(parity[g] for g in word) & 1
        lead = -1 if fp == 0 else 1  # (-1)^{|f|+1}
        for pos, mom in pairs:
            pos_odd = parity[pos]
            df_mom = n_left(mom, f, parity)
            df_pos = n_left(pos, f, parity)
            for c2, w2 in t2:
                g = [(c2, w2)]
                dg_pos = n_left(pos, g, parity)
                dg_mom = n_left(mom, g, parity)
                if not pos_odd:
                    out.extend(n_mul([(Fraction(lead), ())], n_mul(df_mom, dg_pos)))
                    out.extend(n_mul([(Fraction(-1), ())], n_mul(df_pos, dg_mom)))
                else:
                    out.extend(n_mul([(Fraction(-1), ())], n_mul(df_mom, dg_pos)))
                    out.extend(n_mul([(Fraction(lead), ())], n_mul(df_pos, dg_mom)))
    return out
