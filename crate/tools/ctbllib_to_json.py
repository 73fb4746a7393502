#!/usr/bin/env python3
"""Convert the Monster table from GAP's CTblLib data file (ctomonst.tbl) to
the character-table JSON schema read by `moonshine`.

Usage:
    ctbllib_to_json.py ctomonst.tbl full.json [--rows 1-10,194 partial.json]

Values are stored as (a + b*sqrt(d))/2 with integers a, b and squarefree d.
"""
import argparse
import json
import math
import re
import sys
from fractions import Fraction

import mpmath

mpmath.mp.dps = 80
EPS = mpmath.mpf(10) ** -30


class Cyc:
    """Element of a cyclotomic field as {exponent in Q/Z: integer coefficient}."""

    def __init__(self, terms=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @staticmethod
    def of(x):
        if isinstance(x, Cyc):
            return x
        return Cyc({Fraction(0): x})

    def __add__(self, o):
        o = Cyc.of(o)
        t = dict(self.terms)
        for k, v in o.terms.items():
            t[k] = t.get(k, 0) + v
        return Cyc(t)

    __radd__ = __add__

    def __neg__(self):
        return Cyc({k: -v for k, v in self.terms.items()})

    def __sub__(self, o):
        return self + (-Cyc.of(o))

    def __rsub__(self, o):
        return Cyc.of(o) - self

    def __mul__(self, o):
        o = Cyc.of(o)
        t = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in o.terms.items():
                k = (k1 + k2) % 1
                t[k] = t.get(k, 0) + v1 * v2
        return Cyc(t)

    __rmul__ = __mul__

    def __pow__(self, n):
        r = Cyc.of(1)
        for _ in range(n):
            r = r * self
        return r

    def galois(self, k):
        t = {}
        for e, v in self.terms.items():
            kk = (e * k) % 1
            t[kk] = t.get(kk, 0) + v
        return Cyc(t)

    def conductor(self):
        m = 1
        for e in self.terms:
            m = m * e.denominator // math.gcd(m, e.denominator)
        return m

    def value(self):
        return mpmath.fsum(v * mpmath.expjpi(2 * mpmath.mpf(e.numerator) / e.denominator) for e, v in self.terms.items())


def E(n):
    return Cyc({Fraction(1, n): 1})


def squarefree_split(D):
    """D = b^2 * d with d squarefree; returns (b, d)."""
    sign = -1 if D < 0 else 1
    D = abs(D)
    b, d, p = 1, 1, 2
    while p * p <= D:
        while D % (p * p) == 0:
            D //= p * p
            b *= p
        p += 1
    return b, sign * D


def quadratic(c):
    """Express a cyclotomic integer lying in a quadratic field as (a, b, d)."""
    c = Cyc.of(c)
    n = c.conductor()
    v = c.value()
    conj = []
    for k in range(1, n + 1):
        if math.gcd(k, n) != 1:
            continue
        w = c.galois(k).value()
        if all(abs(w - u) > EPS for u in conj):
            conj.append(w)
    if len(conj) == 1:
        a = int(mpmath.nint(v.real))
        assert abs(v - a) < EPS, v
        return 2 * a, 0, 1
    assert len(conj) == 2, (c.terms, conj)
    w = conj[1] if abs(conj[0] - v) < EPS else conj[0]
    a = int(mpmath.nint((v + w).real))
    diff = v - w
    D = int(mpmath.nint((diff * diff).real))
    b, d = squarefree_split(D)
    root = mpmath.sqrt(mpmath.mpc(d))
    if abs(b * root - diff) > EPS:
        b = -b
    assert abs(b * root - diff) < EPS
    assert abs((a + b * root) / 2 - v) < EPS
    return a, b, d


def gap_to_python(src):
    src = src.replace("^", "**")
    # permutations in the automorphism list: (a,b)(c,d)
    src = re.sub(r"\)\s*\(", "),(", src)
    # holes in GAP lists
    prev = None
    while prev != src:
        prev = src
        src = re.sub(r"\[\s*,", "[None,", src)
        src = re.sub(r",\s*,", ",None,", src)
        src = re.sub(r",\s*\]", ",None]", src)
    return src


def extract_mot(text, name):
    start = text.index('MOT("%s",' % name)
    depth = 0
    i = text.index("(", start)
    j = i
    in_str = False
    while True:
        ch = text[j]
        if ch == '"' and text[j - 1] != "\\":
            in_str = not in_str
        elif not in_str:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    break
        j += 1
    return text[i + 1 : j]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("tbl")
    ap.add_argument("out")
    ap.add_argument("--rows", help="comma list of 1-based rows / ranges for a partial table")
    ap.add_argument("--partial-out")
    args = ap.parse_args()

    text = open(args.tbl).read()
    body = extract_mot(text, "M")
    GALOIS = "GALOIS"
    TENSOR = "TENSOR"
    parts = eval("[" + gap_to_python(body) + "]", {"E": E, "GALOIS": GALOIS, "TENSOR": TENSOR, "None": None})
    centralizers = parts[2]
    powermaps = parts[3]
    irr = parts[4]
    nclasses = len(centralizers)

    rows = []
    for r in irr:
        if isinstance(r, list) and r and r[0] == GALOIS:
            base, k = r[1]
            rows.append([Cyc.of(x).galois(k) for x in rows[base - 1]])
        elif isinstance(r, list) and r and r[0] == TENSOR:
            i, j = r[1]
            rows.append([Cyc.of(x) * Cyc.of(y) for x, y in zip(rows[i - 1], rows[j - 1])])
        else:
            rows.append([Cyc.of(x) for x in r])
    assert len(rows) == nclasses

    def power(k, cls):
        # compose prime power maps
        m = k
        p = 2
        while m > 1:
            while m % p == 0:
                cls = powermaps[p - 1][cls - 1]
                m //= p
            p += 1
        return cls

    primes = [i + 1 for i, x in enumerate(powermaps) if x is not None]

    def smooth(k):
        for q in primes:
            while k % q == 0:
                k //= q
        return k == 1

    orders = []
    for cls in range(1, nclasses + 1):
        k = 1
        while not (smooth(k) and power(k, cls) == 1):
            k += 1
        orders.append(k)

    names = []
    counters = {}
    for o in orders:
        idx = counters.get(o, 0)
        counters[o] = idx + 1
        letters = ""
        q = idx
        while True:
            letters = chr(ord("A") + q % 26) + letters
            q = q // 26 - 1
            if q < 0:
                break
        names.append("%d%s" % (o, letters))

    symbols = {}
    try:
        import os
        here = os.path.dirname(os.path.abspath(__file__))
        path = os.path.join(here, "..", "crates", "moonshine", "data", "monster_groups")
        for line in open(path):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            cname, sym = line.split(None, 1)
            m = re.match(r"(\d+)([A-Z]+)$", cname)
            for letter in m.group(2):
                symbols[m.group(1) + letter] = sym.strip()
    except OSError:
        pass

    classes = []
    for ci in range(nclasses):
        pm = {}
        for k in range(1, orders[ci] + 1):
            # g^k only depends on k mod o(g); pick a representative the stored maps cover
            kk = k
            while not smooth(kk):
                kk += orders[ci]
            pm[str(k)] = names[power(kk, ci + 1) - 1]
        classes.append(
            {
                "name": names[ci],
                "centralizer_order": str(centralizers[ci]),
                "element_order": orders[ci],
                "power_map": pm,
                "symbol": symbols.get(names[ci], ""),
            }
        )

    chars = []
    for i, r in enumerate(rows):
        vals = []
        for x in r:
            a, b, d = quadratic(x)
            vals.append({"a": str(a), "b": str(b), "d": d})
        chars.append({"index": i + 1, "values": vals})

    order = centralizers[0]
    table = {"group_order": str(order), "classes": classes, "characters": chars}
    json.dump(table, open(args.out, "w"))

    if args.rows and args.partial_out:
        keep = set()
        for tok in args.rows.split(","):
            if "-" in tok:
                lo, hi = tok.split("-")
                keep.update(range(int(lo), int(hi) + 1))
            else:
                keep.add(int(tok))
        partial = dict(table)
        partial["characters"] = [c for c in chars if c["index"] in keep]
        partial["dims"] = [str(int(c["values"][0]["a"]) // 2) for c in chars]
        json.dump(partial, open(args.partial_out, "w"), indent=None)


if __name__ == "__main__":
    main()
