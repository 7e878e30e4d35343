"""Polynomial constraint systems on self-map parameters and their analysis.

This is shared by the Quillen and Sullivan sides.  A self-map of a free model
whose generators have pairwise distinct degrees is written

    f(u) = l_u * u + sum_m c_{u,m} * m

with one diagonal parameter ``l_u`` per generator and one off-diagonal
parameter per other basis element of the same degree.  Commuting with the
differential gives polynomial equations, grouped by the generator whose image
they constrain.  In each group the generator's own parameters enter linearly
with rational coefficients, everything else involves lower generators only.

The analyses:

* ``zero_pattern_value``: the diagonal method.  Off-diagonal parameters are
  set to zero, every diagonal parameter is declared zero or nonzero, and the
  threshold at which forced nonzero parameters propagate to all of them is
  read off.
* ``deduce``: sound propagation of zero/nonzero facts through the full system
  (off-diagonal parameters free), giving an upper bound.
* ``solve_numeric``: triangular exact solver producing rational maps; used for
  verified lower-bound witnesses and for realizing automorphisms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from sympy import QQ
from sympy.polys.rings import ring as poly_ring

from . import linalg

Mono = tuple[tuple[int, int], ...]  # ((var, exponent), ...), sorted by var
Terms = list[tuple[Mono, Fraction]]

MAX_PATTERN_GENERATORS = 16


class UnsupportedError(ValueError):
    """Computation refused (outside the supported class of models)."""


class InvariantError(RuntimeError):
    """An internal consistency check failed."""


def _frac(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def poly_terms(p) -> Terms:
    out = []
    for monom, c in p.terms():
        out.append((tuple((i, e) for i, e in enumerate(monom) if e), _frac(c)))
    return out


def mono_vars(m: Mono) -> frozenset[int]:
    return frozenset(v for v, _ in m)


def eval_terms(terms: Terms, values: dict[int, Fraction]) -> Fraction:
    total = Fraction(0)
    for m, c in terms:
        t = c
        for v, e in m:
            t *= values[v] ** e
            if not t:
                break
        total += t
    return total


# -- systems -------------------------------------------------------------------

@dataclass
class GenInfo:
    name: str
    degree: int
    lam: int                 # variable index of the diagonal parameter
    own: list[int]           # [lam, c_1, c_2, ...]
    labels: list[str]        # basis labels matching ``own``
    threshold: int           # homotopy degree where the generator is seen
    forced: bool             # iso on pi_threshold forces l != 0
    linear: dict[int, int] = field(default_factory=dict)  # same-degree generator -> coefficient variable


@dataclass
class Equation:
    gen: int                 # position in ConstraintSystem.gens
    label: str               # basis element whose coefficient this is
    terms: Terms
    derived: bool = False

    def has_offdiag(self, cs: "ConstraintSystem") -> bool:
        return any(cs.is_offdiag(v) for m, _ in self.terms for v, _ in m)


class ConstraintSystem:
    def __init__(self, names: Sequence[str], gens: Sequence[GenInfo], equations: Sequence[Equation]):
        self.names = list(names)
        self.gens = list(gens)
        self.equations = list(equations)
        self._lams = {g.lam for g in gens}
        self._derived: list[Equation] | None = None

    @staticmethod
    def make_ring(names: Sequence[str]):
        return poly_ring(list(names), QQ)

    def is_offdiag(self, v: int) -> bool:
        return v not in self._lams

    @property
    def lam_vars(self) -> list[int]:
        return [g.lam for g in self.gens]

    def format_mono(self, m: Mono) -> str:
        if not m:
            return "1"
        return "*".join(self.names[v] + (f"^{e}" if e > 1 else "") for v, e in m)

    def format_terms(self, terms: Terms) -> str:
        if not terms:
            return "0"
        parts = []
        for m, c in sorted(terms, key=lambda t: (-sum(e for _, e in t[0]), t[0])):
            mono = self.format_mono(m)
            if mono == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def format_equation(self, eq: Equation) -> str:
        return f"{self.format_terms(eq.terms)} = 0"

    def to_dict(self) -> dict:
        return {
            "parameters": self.names,
            "equations": [
                {"generator": self.gens[e.gen].name, "coefficient_of": e.label,
                 "equation": self.format_equation(e), "off_diagonal": e.has_offdiag(self)}
                for e in self.equations
            ],
        }

    # -- linear structure per generator ------------------------------------
    def split_linear(self, eq: Equation) -> tuple[dict[int, Fraction], Terms]:
        """Split into (coefficients of the generator's own parameters, rest)."""
        own = set(self.gens[eq.gen].own)
        lin: dict[int, Fraction] = {}
        rest: Terms = []
        for m, c in eq.terms:
            hit = [v for v, _ in m if v in own]
            if not hit:
                rest.append((m, c))
            elif len(m) == 1 and m[0][1] == 1:
                lin[m[0][0]] = lin.get(m[0][0], Fraction(0)) + c
            else:
                raise InvariantError("own parameter enters nonlinearly")
        return lin, rest

    def derived_equations(self) -> list[Equation]:
        """Combinations of each generator's equations free of its own off-diagonal parameters."""
        if self._derived is not None:
            return self._derived
        out = []
        by_gen: dict[int, list[Equation]] = {}
        for e in self.equations:
            by_gen.setdefault(e.gen, []).append(e)
        for gi, eqs in sorted(by_gen.items()):
            cvars = self.gens[gi].own[1:]
            split = [self.split_linear(e) for e in eqs]
            if not cvars:
                continue
            rows = [[lin.get(v, Fraction(0)) for v in cvars] for lin, _ in split]
            if not any(any(r) for r in rows):
                continue
            for y in linalg.left_nullspace(rows, len(cvars)):
                acc: dict[Mono, Fraction] = {}
                for coef, e in zip(y, eqs):
                    if coef:
                        for m, c in e.terms:
                            acc[m] = acc.get(m, Fraction(0)) + coef * c
                terms = [(m, c) for m, c in acc.items() if c]
                if terms and len([1 for coef in y if coef]) > 1:
                    out.append(Equation(gi, "combination", sorted(terms), derived=True))
        self._derived = out
        return out


# -- monomial systems ----------------------------------------------------------

@dataclass(frozen=True)
class MonomialEquation:
    """``lhs = scalar * rhs`` with monomials in diagonal parameters.

    ``rhs`` is None for a single-monomial equation ``lhs = 0``.
    """
    lhs: Mono
    rhs: Mono | None
    scalar: Fraction
    certified: bool
    source: str


@dataclass
class MonomialSystem:
    variables: list[str]          # names of the diagonal parameters, generator order
    var_index: list[int]          # matching variable indices in the constraint system
    equations: list[MonomialEquation]
    uncertifiable: list[str] = field(default_factory=list)
    names: list[str] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return all(e.certified for e in self.equations)

    def certified_part(self) -> "MonomialSystem":
        return MonomialSystem(self.variables, self.var_index,
                              [e for e in self.equations if e.certified], [], self.names)

    def _fmt(self, m: Mono) -> str:
        if not m:
            return "1"
        return "*".join(self.names[v] + (f"^{e}" if e > 1 else "") for v, e in m)

    def format_equation(self, e: MonomialEquation) -> str:
        if e.rhs is None:
            return f"{self._fmt(e.lhs)} = 0"
        rhs = self._fmt(e.rhs)
        if e.scalar != 1:
            rhs = f"{e.scalar}*{rhs}"
        return f"{self._fmt(e.lhs)} = {rhs}"

    def exponent_rows(self) -> list[list[int]]:
        pos = {v: i for i, v in enumerate(self.var_index)}
        rows = []
        for e in self.equations:
            if e.rhs is None:
                continue
            r = [0] * len(self.var_index)
            for v, k in e.lhs:
                r[pos[v]] += k
            for v, k in e.rhs:
                r[pos[v]] -= k
            if any(r):
                rows.append(r)
        return rows

    def to_dict(self) -> dict:
        return {
            "variables": self.variables,
            "certified": self.certified,
            "equations": [{"equation": self.format_equation(e), "certified": e.certified,
                           "source": e.source} for e in self.equations],
            "uncertifiable": self.uncertifiable,
        }


def _binomial(terms: Terms, prefer: int | None, certified: bool, source: str) -> MonomialEquation | None:
    if len(terms) == 1:
        return MonomialEquation(terms[0][0], None, Fraction(0), certified, source)
    if len(terms) != 2:
        return None
    (m1, c1), (m2, c2) = terms
    if prefer is not None and m2 == ((prefer, 1),):
        (m1, c1), (m2, c2) = (m2, c2), (m1, c1)
    elif not (prefer is not None and m1 == ((prefer, 1),)) and m2 < m1:
        (m1, c1), (m2, c2) = (m2, c2), (m1, c1)
    return MonomialEquation(m1, m2, -c2 / c1, certified, source)


def diagonal_system(cs: ConstraintSystem) -> MonomialSystem:
    """Diagonal monomial subsystem (off-diagonal parameters set to zero)."""
    eqs: list[MonomialEquation] = []
    uncert: list[str] = []
    seen: dict[tuple, int] = {}

    def add(me: MonomialEquation):
        key = (me.lhs, me.rhs, me.scalar)
        if key in seen:
            if me.certified and not eqs[seen[key]].certified:
                old = eqs[seen[key]]
                eqs[seen[key]] = MonomialEquation(old.lhs, old.rhs, old.scalar, True,
                                                  old.source + "; " + me.source)
            return
        seen[key] = len(eqs)
        eqs.append(me)

    for e in cs.equations:
        gname = cs.gens[e.gen].name
        cert = not e.has_offdiag(cs)
        zeroed = [(m, c) for m, c in e.terms if not any(cs.is_offdiag(v) for v, _ in m)]
        if not zeroed:
            continue
        me = _binomial(zeroed, cs.gens[e.gen].lam, cert, f"{gname}: coefficient of {e.label}")
        if me is None:
            uncert.append(f"{gname}: coefficient of {e.label}: {cs.format_terms(e.terms)} = 0")
            continue
        if not cert:
            uncert.append(f"{gname}: coefficient of {e.label}: {cs.format_terms(e.terms)} = 0")
        add(me)
    for e in cs.derived_equations():
        if e.has_offdiag(cs):
            continue
        me = _binomial(e.terms, cs.gens[e.gen].lam, True,
                       f"{cs.gens[e.gen].name}: eliminated off-diagonal parameters")
        if me is not None:
            add(me)
    return MonomialSystem([cs.names[v] for v in cs.lam_vars], cs.lam_vars, eqs, uncert, cs.names)


# -- automorphism group ------------------------------------------------------

@dataclass
class GroupReport:
    rank: int
    free: list[str]
    dependents: dict[str, dict[str, Fraction]]
    invariant_factors: list[int]
    certified: bool
    consistent: bool = True

    def to_dict(self) -> dict:
        deps = {}
        for k, mono in self.dependents.items():
            deps[k] = "*".join(f"{v}^{e}" if e != 1 else v for v, e in mono.items()) or "1"
        return {"rank": self.rank, "free": self.free, "dependents": deps,
                "invariant_factors": self.invariant_factors, "certified": self.certified,
                "consistent": self.consistent}


def auto_group(ms: MonomialSystem, order: Sequence[int] | None = None) -> GroupReport:
    """Rank r with E/E_* = (Q*)^r on the solution set of ``ms`` with all parameters nonzero.

    ``order`` lists variable positions from the one most preferred as free.
    """
    n = len(ms.variables)
    consistent = all(e.rhs is not None for e in ms.equations)
    rows = ms.exponent_rows()
    inv = linalg.smith_normal_form(rows) if rows else []
    rank = n - len(inv)
    order = list(order) if order is not None else list(range(n))
    cols = list(reversed(order))  # least preferred first so they become pivots
    perm = [[r[c] for c in cols] for r in rows]
    deps: dict[str, dict[str, Fraction]] = {}
    free: list[str] = []
    if perm:
        R, piv = linalg.rref(perm, n)
        piv_set = set(piv)
        free_cols = [j for j in range(n) if j not in piv_set]
        for i, pc in enumerate(piv):
            name = ms.variables[cols[pc]]
            deps[name] = {ms.variables[cols[j]]: -R[i][j] for j in free_cols if R[i][j]}
        free = [ms.variables[cols[j]] for j in free_cols]
    else:
        free = list(ms.variables)
    free = [v for v in ms.variables if v in free]
    deps = {v: deps[v] for v in ms.variables if v in deps}
    return GroupReport(rank, free, deps, [d for d in inv if d > 1], ms.certified, consistent)


# -- zero patterns -------------------------------------------------------------

@dataclass
class Pattern:
    nonzero: frozenset[int]   # generator positions with l != 0


def _patterns(g: int) -> Iterable[frozenset[int]]:
    for bits in range(2 ** g):
        yield frozenset(i for i in range(g) if not bits >> i & 1)


def diagonal_supports(cs: ConstraintSystem) -> list[list[tuple[frozenset[int], Fraction]]]:
    """Equations with off-diagonal parameters zeroed, as (generator support, coeff)."""
    lam_pos = {g.lam: i for i, g in enumerate(cs.gens)}
    out = []
    for e in cs.equations:
        z = []
        for m, c in e.terms:
            if any(cs.is_offdiag(v) for v, _ in m):
                continue
            z.append((frozenset(lam_pos[v] for v, _ in m), c))
        if z:
            out.append(z)
    return out


def consistent_patterns(cs: ConstraintSystem) -> list[frozenset[int]]:
    g = len(cs.gens)
    if g > MAX_PATTERN_GENERATORS:
        raise UnsupportedError(f"unsupported: {g} generators exceed the pattern limit {MAX_PATTERN_GENERATORS}")
    sups = diagonal_supports(cs)
    out = []
    for nz in _patterns(g):
        if all(sum((c for s, c in eq if s <= nz), Fraction(0)) == 0 for eq in sups):
            out.append(nz)
    return out


def candidate_levels(cs: ConstraintSystem) -> list[int]:
    return sorted({0} | {g.threshold for g in cs.gens})


def forced_at(cs: ConstraintSystem, k: int) -> frozenset[int]:
    return frozenset(i for i, g in enumerate(cs.gens) if g.forced and g.threshold <= k)


def zero_pattern_value(cs: ConstraintSystem) -> tuple[int | None, dict[int, frozenset[int]]]:
    """Diagonal value and, for each candidate k below it, a consistent pattern refuting k."""
    pats = consistent_patterns(cs)
    g = len(cs.gens)
    everything = frozenset(range(g))
    refuters: dict[int, frozenset[int]] = {}
    for k in candidate_levels(cs):
        forced = forced_at(cs, k)
        bad = [p for p in pats if forced <= p and p != everything]
        if not bad:
            return k, refuters
        # prefer the pattern with the fewest zeros, then lexicographic
        refuters[k] = min(bad, key=lambda p: (g - len(p), sorted(everything - p)))
    return None, refuters


# -- sound deduction -----------------------------------------------------------

def blocks(cs: ConstraintSystem) -> list[list[int]]:
    """Generator positions grouped by degree."""
    by: dict[int, list[int]] = {}
    for i, g in enumerate(cs.gens):
        by.setdefault(g.degree, []).append(i)
    return [by[d] for d in sorted(by)]


def det_terms(cs: ConstraintSystem, positions: Sequence[int]) -> Terms:
    """Determinant of the linear part restricted to ``positions`` (Leibniz expansion)."""
    acc: dict[Mono, Fraction] = {}
    for perm in itertools.permutations(range(len(positions))):
        sign = 1
        for i in range(len(perm)):
            for j in range(i + 1, len(perm)):
                if perm[i] > perm[j]:
                    sign = -sign
        mono: dict[int, int] = {}
        ok = True
        for i, j in enumerate(perm):
            u, v = positions[i], positions[j]
            var = cs.gens[u].lam if u == v else cs.gens[u].linear.get(v)
            if var is None:
                ok = False
                break
            mono[var] = mono.get(var, 0) + 1
        if ok:
            m = tuple(sorted(mono.items()))
            acc[m] = acc.get(m, Fraction(0)) + sign
    return [(m, c) for m, c in acc.items() if c]


def certainly_nonzero(terms: Terms, nz: set[int], z: set[int]) -> bool:
    live = [m for m, _ in terms if not (mono_vars(m) & z)]
    return len(live) == 1 and mono_vars(live[0]) <= nz


def deduce(cs: ConstraintSystem, facts: Iterable[Terms]) -> tuple[set[int], set[int]]:
    """Facts implied by the full system for maps where each of ``facts`` is nonzero.

    Returns ``(nonzero, zero)`` variable sets.  Rules: a nonzero polynomial with
    a single surviving monomial has all its variables nonzero; an equation with
    a single surviving monomial whose variables are all nonzero but one forces
    that one to vanish; in a binomial one monomial is nonzero iff the other is.
    """
    pool = [e.terms for e in cs.equations] + [e.terms for e in cs.derived_equations()]
    facts = list(facts)
    nz: set[int] = set()
    z: set[int] = set()
    changed = True
    while changed:
        changed = False
        for terms in facts:
            live = [m for m, _ in terms if not (mono_vars(m) & z)]
            if not live:
                raise InvariantError("contradictory constraint deduction")
            if len(live) == 1 and not mono_vars(live[0]) <= nz:
                nz |= mono_vars(live[0])
                changed = True
        for terms in pool:
            live = [(mono_vars(m), c) for m, c in terms if not (mono_vars(m) & z)]
            if not live:
                continue
            if len(live) == 1:
                unknown = live[0][0] - nz
                if not unknown:
                    raise InvariantError("contradictory constraint deduction")
                if len(unknown) == 1:
                    z |= unknown
                    changed = True
            elif len(live) == 2:
                (a, _), (b, _) = live
                if a <= nz and not b <= nz:
                    nz |= b
                    changed = True
                elif b <= nz and not a <= nz:
                    nz |= a
                    changed = True
        if nz & z:
            raise InvariantError("contradictory constraint deduction")
    return nz, z


FactsFn = Callable[[int], list[Terms]]


def deduced_upper_bound(cs: ConstraintSystem, facts_at: FactsFn) -> int | None:
    """Least candidate k at which the forced facts make every block invertible."""
    targets = [det_terms(cs, b) for b in blocks(cs)]
    for k in candidate_levels(cs):
        nz, z = deduce(cs, facts_at(k))
        if all(certainly_nonzero(t, nz, z) for t in targets):
            return k
    return None


# -- numeric solving -----------------------------------------------------------

class _Prepared:
    def __init__(self, cs: ConstraintSystem):
        self.cs = cs
        by_gen: dict[int, list[tuple[dict[int, Fraction], Terms]]] = {}
        for e in cs.equations:
            by_gen.setdefault(e.gen, []).append(cs.split_linear(e))
        self.by_gen = by_gen
        self.order = sorted(range(len(cs.gens)), key=lambda i: (cs.gens[i].degree, i))


def solve_numeric(cs: ConstraintSystem, zero: Iterable[int] = (), prefer: dict[int, Fraction] | None = None,
                  prepared: _Prepared | None = None) -> dict[int, Fraction] | None:
    """Rational parameter values satisfying the system.

    Generators in ``zero`` get l = 0, all others l != 0 (taking ``prefer``
    values, default 1, whenever the equations leave l free).  Off-diagonal
    parameters take the particular solution with free coordinates 0.
    """
    prep = prepared or _Prepared(cs)
    zero = set(zero)
    prefer = prefer or {}
    values: dict[int, Fraction] = {}
    for gi in prep.order:
        g = cs.gens[gi]
        own = g.own
        eqs = prep.by_gen.get(gi, [])
        A = [[lin.get(v, Fraction(0)) for v in own] for lin, _ in eqs]
        rhs = [-eval_terms(rest, values) for _, rest in eqs]
        sol = _solve_gen(A, rhs, len(own), gi in zero, prefer.get(gi, Fraction(1)))
        if sol is None:
            return None
        for v, x in zip(own, sol):
            values[v] = x
    return values


def _solve_gen(A, rhs, n, zero: bool, pref: Fraction) -> list[Fraction] | None:
    if not A:
        return [Fraction(0) if zero else pref] + [Fraction(0)] * (n - 1)

    def fixed(val):
        sub = [row[1:] for row in A]
        b = [r - row[0] * val for r, row in zip(rhs, A)]
        if n == 1:
            return [val] if all(x == 0 for x in b) else None
        res = linalg.solve(sub, b, n - 1)
        return None if res is None else [val] + res[0]

    if zero:
        return fixed(Fraction(0))
    out = fixed(pref)
    if out is not None:
        return out
    res = linalg.solve(A, rhs, n)
    if res is None:
        return None
    x, kernel = res
    if x[0] != 0:
        return x
    for k in kernel:
        if k[0] != 0:
            return [a + b for a, b in zip(x, k)]
    return None


# -- reports -------------------------------------------------------------------

@dataclass
class Witness:
    level: int                        # proves the self-closeness number exceeds this
    zeros: list[str]                  # generators with vanishing diagonal parameter
    values: dict[str, Fraction]       # nonzero parameter values
    images: dict[str, str]            # printable generator images
    origin: str                       # "zero-pattern" or "solver"

    def to_dict(self) -> dict:
        return {"level": self.level, "zeros": self.zeros,
                "values": {k: str(v) for k, v in self.values.items()},
                "images": self.images, "origin": self.origin}


CERTIFIED = "CERTIFIED"
BOUNDS = "BOUNDS"
UNCERTIFIED = "UNCERTIFIED"


@dataclass
class NseReport:
    value: int | None
    lo: int
    hi: int
    status: str
    witnesses: list[Witness]
    group_rank: int | None
    group: GroupReport | None
    rational_group_rank: tuple[int, int] | None
    split: bool | None
    notes: list[str] = field(default_factory=list)

    @property
    def rational_value(self) -> int | None:
        return self.lo if self.lo == self.hi else None

    def to_dict(self) -> dict:
        return {
            "value": self.value if self.value is not None else "undefined",
            "status": self.status,
            "rational_bounds": [self.lo, self.hi],
            "rational_value": self.rational_value,
            "group_rank": self.group_rank,
            "group": self.group.to_dict() if self.group else None,
            "rational_group_rank": list(self.rational_group_rank) if self.rational_group_rank else None,
            "split": self.split,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "notes": self.notes,
        }


def classify(value: int | None, lo: int, hi: int) -> str:
    if value is not None and lo == hi == value:
        return CERTIFIED
    if value is not None and lo <= value <= hi:
        return BOUNDS
    return UNCERTIFIED


# -- shared driver -------------------------------------------------------------

LevelFn = Callable[[dict[int, Fraction]], int | None]


def search_witnesses(cs: ConstraintSystem, level_of: LevelFn, level_bound: Callable[[frozenset[int]], int],
                     describe: Callable[[dict[int, Fraction]], dict[str, str]],
                     seeds: dict[int, frozenset[int]] | None = None) -> list[Witness]:
    """Verified witnesses, best level per zero set; ``level_of`` certifies each map."""
    g = len(cs.gens)
    if g > MAX_PATTERN_GENERATORS:
        raise UnsupportedError(f"unsupported: {g} generators exceed the pattern limit {MAX_PATTERN_GENERATORS}")
    prep = _Prepared(cs)
    found: list[Witness] = []
    best = -1

    def record(values, origin):
        nonlocal best
        lvl = level_of(values)
        if lvl is None:
            return
        zeros = [cs.gens[i].name for i in range(g) if values[cs.gens[i].lam] == 0]
        found.append(Witness(lvl, zeros, {cs.names[v]: x for v, x in values.items() if x},
                             describe(values), origin))
        best = max(best, lvl)

    for nz in (seeds or {}).values():
        vals = {}
        for i, gen in enumerate(cs.gens):
            for v in gen.own:
                vals[v] = Fraction(0)
            vals[gen.lam] = Fraction(1 if i in nz else 0)
        if all(eval_terms(e.terms, vals) == 0 for e in cs.equations):
            record(vals, "zero-pattern")
    everything = frozenset(range(g))
    pats = [p for p in _patterns(g) if p != everything]
    pats.sort(key=lambda p: (-level_bound(p), g - len(p), sorted(everything - p)))
    for nz in pats:
        if level_bound(nz) <= best:
            break
        vals = solve_numeric(cs, zero=everything - nz, prepared=prep)
        if vals is not None:
            record(vals, "solver")
    # keep the best witness for each level, deterministic
    by_level: dict[int, Witness] = {}
    for w in found:
        if w.level not in by_level:
            by_level[w.level] = w
    return [by_level[k] for k in sorted(by_level)]


def valuation_rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    """Rank of the multiplicative span of nonzero rational vectors (signs ignored)."""
    from sympy import factorrat, Rational

    rows = []
    for vec in vectors:
        facs = [factorrat(Rational(x.numerator, x.denominator)) for x in vec]
        primes = sorted({p for f in facs for p in f if p != -1})
        for p in primes:
            rows.append([f.get(p, 0) for f in facs])
    return linalg.rank(rows) if rows else 0


def realized_group_rank(cs: ConstraintSystem, probes: Sequence[dict[int, Fraction]]) -> tuple[int, list]:
    """Lower bound on the automorphism rank from explicitly solved automorphisms."""
    prep = _Prepared(cs)
    vecs = []
    for pref in probes:
        vals = solve_numeric(cs, zero=(), prefer=pref, prepared=prep)
        if vals is None:
            continue
        lam = [vals[g.lam] for g in cs.gens]
        if all(lam):
            vecs.append(lam)
    return valuation_rank(vecs), vecs


def torus_probes(cs: ConstraintSystem, grp: GroupReport) -> list[dict[int, Fraction]]:
    """Target diagonal values: one free parameter at a prime power, the rest at 1."""
    pos = {cs.names[g.lam]: i for i, g in enumerate(cs.gens)}
    probes = []
    for f in grp.free:
        den = 1
        for mono in grp.dependents.values():
            if f in mono:
                den = den * mono[f].denominator // _gcd(den, mono[f].denominator)
        base = Fraction(2) ** den
        pref = {i: Fraction(1) for i in range(len(cs.gens))}
        pref[pos[f]] = base
        for dep, mono in grp.dependents.items():
            if f in mono:
                pref[pos[dep]] = Fraction(2) ** int(mono[f] * den)
        probes.append(pref)
    return probes


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def default_facts(cs: ConstraintSystem) -> FactsFn:
    """Forced generators with threshold <= k have a nonzero diagonal parameter."""
    def facts_at(k: int) -> list[Terms]:
        return [[(((g.lam, 1),), Fraction(1))] for g in cs.gens if g.forced and g.threshold <= k]
    return facts_at


def has_blocks(cs: ConstraintSystem) -> bool:
    return any(len(b) > 1 for b in blocks(cs))


def analyze(cs: ConstraintSystem, *, level_of: LevelFn, level_bound: Callable[[frozenset[int]], int],
            describe: Callable[[dict[int, Fraction]], dict[str, str]], fallback_hi: int,
            top_cell: int | None, facts_at: FactsFn | None = None) -> NseReport:
    """Full self-closeness analysis of a constraint system.

    With several generators in one degree only the sound bounds are computed:
    the diagonal value and the diagonal group are defined for distinct degrees.
    """
    notes: list[str] = []
    if not cs.gens:
        return NseReport(0, 0, 0, CERTIFIED, [], 0, None, (0, 0), None, ["no generators"])
    blocky = has_blocks(cs)
    if blocky:
        value, refuters = None, {}
        notes.append("same-degree generators: sound bounds only, no diagonal value")
    else:
        value, refuters = zero_pattern_value(cs)
    witnesses = search_witnesses(cs, level_of, level_bound, describe, refuters)
    lo = max((w.level + 1 for w in witnesses), default=0)
    hi = deduced_upper_bound(cs, facts_at or default_facts(cs))
    if hi is None:
        hi = fallback_hi
        notes.append(f"upper bound {hi} from the dimension bound; deduction did not close")
    if lo > hi:
        raise InvariantError(f"lower bound {lo} exceeds upper bound {hi}")
    if blocky:
        status = CERTIFIED if lo == hi else BOUNDS
        return NseReport(lo if lo == hi else None, lo, hi, status, witnesses, None, None, None,
                         None if top_cell is None or lo != hi else lo == top_cell, notes)
    status = classify(value, lo, hi)
    if value is not None and lo > value:
        notes.append(f"verified witness shows the rational value exceeds the diagonal value {value}")
    ms = diagonal_system(cs)
    order = sorted(range(len(cs.gens)), key=lambda i: (cs.gens[i].degree, i))
    grp = auto_group(ms, order)
    sound = auto_group(ms.certified_part(), order)
    probes = torus_probes(cs, sound) + torus_probes(cs, grp)
    r_lo, _ = realized_group_rank(cs, probes)
    r_lo = max(r_lo, 0)
    r_hi = sound.rank
    if r_lo > r_hi:
        raise InvariantError("realized automorphism rank exceeds the certified bound")
    if not ms.certified:
        notes.append("diagonal system contains equations with off-diagonal parameters")
    if (r_lo, r_hi) != (grp.rank, grp.rank):
        notes.append(f"rational automorphism rank lies in [{r_lo}, {r_hi}]; diagonal rank {grp.rank}")
    split = None if top_cell is None or value is None else value == top_cell
    return NseReport(value, lo, hi, status, witnesses, grp.rank, grp, (r_lo, r_hi), split, notes)
