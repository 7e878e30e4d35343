"""Monomial equations over the nonzero integers.

Each equation reads ``prod x^a = q * prod x^b``.  Writing |x| through prime
valuations turns the absolute-value part into a rational linear system on
valuation vectors, and the sign part into a linear system over GF(2).  When
every scalar is +-1 the valuation vectors are exactly the rational null space
of the exponent matrix, which is what makes the COMPLETE verdicts exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg
from .constraints import MonomialEquation, MonomialSystem

COMPLETE = "COMPLETE"
BOUNDED = "BOUNDED-SEARCH"
DEFAULT_BOUND = 64


@dataclass
class IntegerSolutions:
    status: str
    kind: str                                   # "finite" or "parametrized"
    variables: list[str]
    solutions: list[dict[str, int]] = field(default_factory=list)
    free: list[str] = field(default_factory=list)
    dependents: dict[str, dict[str, Fraction]] = field(default_factory=dict)
    sign_branches: list[dict] = field(default_factory=list)
    bound: int | None = None

    def to_dict(self) -> dict:
        out = {"status": self.status, "kind": self.kind, "variables": self.variables}
        if self.kind == "finite":
            out["solutions"] = self.solutions
        else:
            out["free"] = self.free
            out["dependents"] = {k: _fmt_mono(v) for k, v in self.dependents.items()}
            out["sign_branches"] = self.sign_branches
            if self.solutions:
                out["solutions_in_box"] = len(self.solutions)
        if self.bound is not None:
            out["bound"] = self.bound
        return out


def _fmt_mono(m: Mapping[str, Fraction]) -> str:
    if not m:
        return "1"
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in m.items())


def _rows(ms: MonomialSystem) -> tuple[list[list[int]], list[Fraction]]:
    pos = {v: i for i, v in enumerate(ms.var_index)}
    rows, qs = [], []
    for e in ms.equations:
        r = [0] * len(pos)
        for v, k in e.lhs:
            r[pos[v]] += k
        for v, k in e.rhs or ():
            r[pos[v]] -= k
        rows.append(r)
        qs.append(e.scalar)
    return rows, qs


def _holds(rows, qs, x: Sequence[int]) -> bool:
    for r, q in zip(rows, qs):
        val = Fraction(1)
        for xi, e in zip(x, r):
            val *= Fraction(xi) ** e
        if val != q:
            return False
    return True


def integer_monomial_analyze(ms: MonomialSystem, mode: str = "nonzero-all",
                             bound: int = DEFAULT_BOUND) -> IntegerSolutions:
    """Solutions with every variable a nonzero integer."""
    if mode != "nonzero-all":
        raise ValueError(f"unknown mode {mode}")
    names = list(ms.variables)
    n = len(names)
    if any(e.rhs is None for e in ms.equations):
        return IntegerSolutions(COMPLETE, "finite", names)
    rows, qs = _rows(ms)
    if any(abs(q) != 1 for q in qs):
        return _naive(names, rows, qs, bound)
    cols = list(reversed(range(n)))          # later variables become dependent
    perm = [[r[c] for c in cols] for r in rows if any(r)]
    R, piv = linalg.rref(perm, n) if perm else ([], [])
    if len(piv) == n:
        sols = []
        for signs in itertools.product((1, -1), repeat=n):
            if _holds(rows, qs, signs):
                sols.append(dict(zip(names, signs)))
        return IntegerSolutions(COMPLETE, "finite", names, solutions=sols)
    free_cols = [j for j in range(n) if j not in set(piv)]
    free = [names[cols[j]] for j in free_cols]
    deps: dict[str, dict[str, Fraction]] = {}
    for i, pc in enumerate(piv):
        deps[names[cols[pc]]] = {names[cols[j]]: -R[i][j] for j in free_cols if R[i][j]}
    free = [v for v in names if v in free]
    deps = {v: deps[v] for v in names if v in deps}
    integral = all(e.denominator == 1 and e >= 0 for m in deps.values() for e in m.values())
    branches = _sign_branches(names, rows, qs, free, deps)
    if integral:
        return IntegerSolutions(COMPLETE, "parametrized", names, free=free, dependents=deps,
                                sign_branches=branches)
    ray = _primitive_ray(deps, free, names)
    if ray is not None:
        # |x| = t^ray for a positive integer t; signs are independent of t.
        unit_qs = [Fraction(1 if q > 0 else -1) for q in qs]
        signs = [dict(zip(names, e)) for e in itertools.product((1, -1), repeat=n)
                 if _holds(rows, unit_qs, e)]
        return IntegerSolutions(COMPLETE, "parametrized", names, free=["t"],
                                dependents={v: {"t": Fraction(k)} for v, k in ray.items()},
                                sign_branches=[{"eps": e, "free_signs": "all"} for e in signs])
    sols = _free_box(names, rows, qs, free, deps, bound)
    return IntegerSolutions(BOUNDED, "parametrized", names, solutions=sols, free=free,
                            dependents=deps, sign_branches=branches, bound=bound)


def _primitive_ray(deps, free, names) -> dict[str, int] | None:
    """Integer generator of a one-dimensional valuation lattice, if it is nonnegative.

    Valuation vectors of solutions are the integer points of the kernel; for a
    single free variable these are the multiples of the primitive vector, and
    nonnegativity of valuations leaves exactly the nonnegative multiples.
    """
    if len(free) != 1:
        return None
    vec = {v: Fraction(1) if v == free[0] else deps[v].get(free[0], Fraction(0)) for v in names}
    den = 1
    for e in vec.values():
        den = den * e.denominator // _gcd(den, e.denominator)
    ints = {v: int(e * den) for v, e in vec.items()}
    g = 0
    for k in ints.values():
        g = _gcd(g, abs(k))
    if any(k < 0 for k in ints.values()) or g == 0:
        return None
    return {v: k // g for v, k in ints.items()}


def _sign_branches(names, rows, qs, free, deps) -> list[dict]:
    """Sign choices eps for dependents: dep = eps * prod free^e, per free sign pattern."""
    fpos = [names.index(v) for v in free]
    dnames = list(deps)
    out = []
    for eps in itertools.product((1, -1), repeat=len(dnames)):
        ok = []
        for fs in itertools.product((1, -1), repeat=len(free)):
            x = [1] * len(names)
            for p, s in zip(fpos, fs):
                x[p] = s
            for d, e in zip(dnames, eps):
                sign = e
                for v, k in deps[d].items():
                    if k.denominator == 1 and k.numerator % 2 and x[names.index(v)] < 0:
                        sign = -sign
                x[names.index(d)] = sign
            if _holds(rows, [Fraction(1 if q > 0 else -1) for q in qs],
                      [1 if xi > 0 else -1 for xi in x]):
                ok.append(dict(zip(free, fs)))
        if ok:
            cond = "all" if len(ok) == 2 ** len(free) else ok
            out.append({"eps": dict(zip(dnames, eps)), "free_signs": cond})
    return out


def _iroot(n: int, k: int) -> int | None:
    if n < 0:
        return None
    r = round(n ** (1.0 / k)) if n else 0
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** k == n:
            return c
    return None


def _free_box(names, rows, qs, free, deps, bound) -> list[dict[str, int]]:
    fpos = [names.index(v) for v in free]
    rng = [v for v in range(-bound, bound + 1) if v]
    sols = []
    for fv in itertools.product(rng, repeat=len(free)):
        mags = {}
        okm = True
        for d, mono in deps.items():
            den = 1
            for e in mono.values():
                den = den * e.denominator // _gcd(den, e.denominator)
            # |d| = prod |free|^e with rational e: take the common root
            root = _rational_root(mono, fv, free, den)
            if root is None:
                okm = False
                break
            mags[d] = root
        if not okm:
            continue
        dnames = list(deps)
        for eps in itertools.product((1, -1), repeat=len(dnames)):
            x = [0] * len(names)
            for p, v in zip(fpos, fv):
                x[p] = v
            for d, s in zip(dnames, eps):
                x[names.index(d)] = s * mags[d]
            if _holds(rows, qs, x):
                sols.append(dict(zip(names, x)))
    return sols


def _rational_root(mono, fv, free, den) -> int | None:
    num = Fraction(1)
    for v, e in mono.items():
        num *= Fraction(abs(fv[free.index(v)])) ** int(e * den)
    if num.denominator != 1:
        return None
    return _iroot(num.numerator, den)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _naive(names, rows, qs, bound) -> IntegerSolutions:
    n = len(names)
    b = bound
    while (2 * b) ** n > 2_000_000 and b > 1:
        b //= 2
    rng = [v for v in range(-b, b + 1) if v]
    sols = [dict(zip(names, x)) for x in itertools.product(rng, repeat=n) if _holds(rows, qs, x)]
    return IntegerSolutions(BOUNDED, "finite", names, solutions=sols, bound=b)


# -- unit thresholds -----------------------------------------------------------

@dataclass
class IntegerNse:
    value: int | None
    lo: int
    hi: int | None
    steps: list[str]

    def to_dict(self) -> dict:
        return {"value": self.value, "bounds": [self.lo, self.hi], "steps": self.steps}


def integer_unit_nse(ms: MonomialSystem, thresholds: Mapping[str, int], search: int = 2) -> IntegerNse:
    """Least k such that units on variables with threshold <= k force all units.

    A self-map is an equivalence iff every variable is +-1.  For each k the
    forced variables are units; propagation through the equations either
    shows the rest are units, or a small integer counterexample is found.
    """
    names = list(ms.variables)
    rows, qs = _rows(ms)
    steps = []
    lo = 0
    for k in sorted(set(thresholds.values())):
        units = {v for v in names if thresholds[v] <= k}
        changed = True
        while changed:
            changed = False
            for r in rows:
                unknown = [names[i] for i, e in enumerate(r) if e and names[i] not in units]
                if len(unknown) == 1:
                    units.add(unknown[0])
                    changed = True
        if units >= set(names):
            steps.append(f"k={k}: units on {sorted(v for v in names if thresholds[v] <= k)} force all units")
            return IntegerNse(k, lo, k, steps)
        cex = _counterexample(names, rows, qs, {v for v in names if thresholds[v] <= k}, search)
        if cex is None:
            steps.append(f"k={k}: undecided")
            return IntegerNse(None, lo, None, steps)
        steps.append(f"k={k}: not an equivalence: " + ", ".join(f"{v}={x}" for v, x in cex.items()))
        lo = k + 1
    return IntegerNse(None, lo, None, steps)


def _counterexample(names, rows, qs, units, search) -> dict[str, int] | None:
    choices = []
    for v in names:
        choices.append((1, -1) if v in units else tuple(range(-search, search + 1)))
    for x in itertools.product(*choices):
        if all(abs(t) == 1 for t in x):
            continue
        ok = True
        for r, q in zip(rows, qs):
            lhs = 1
            rhs = 1
            for xi, e in zip(x, r):
                if e > 0:
                    lhs *= xi ** e
                elif e < 0:
                    rhs *= xi ** (-e)
            if lhs != q * rhs:
                ok = False
                break
        if ok:
            return dict(zip(names, x))
    return None


def system_from_equations(variables: Sequence[str], eqs: Sequence[tuple[dict[str, int], dict[str, int]]],
                          source: str = "") -> MonomialSystem:
    """Build ``lhs = rhs`` monomial equations over named variables."""
    idx = {v: i for i, v in enumerate(variables)}

    def mono(d):
        return tuple(sorted((idx[v], e) for v, e in d.items() if e))

    out = [MonomialEquation(mono(l), mono(r), Fraction(1), True, source) for l, r in eqs]
    return MonomialSystem(list(variables), list(range(len(variables))), out, [], list(variables))


# -- attaching-map weights -------------------------------------------------------

_SUPERSCRIPT = str.maketrans("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")


def format_monomial(mono: Mapping[str, int]) -> str:
    """``{'λ': 2, 'μ': 4}`` -> ``λ²μ⁴``."""
    parts = [v if e == 1 else v + str(e).translate(_SUPERSCRIPT) for v, e in mono.items() if e]
    return "".join(parts) or "1"


def expr_weight(e, weights: Mapping[str, Mapping[str, int]]) -> dict[str, int]:
    """Multiplicative weight of a bracket monomial under a diagonal self-map.

    A self-map scaling each leaf by its weight scales an iterated bracket by
    the product of the leaf weights.
    """
    from .dgl import Br, Combo, Name

    if isinstance(e, Name):
        return dict(weights[e.name])
    if isinstance(e, Br):
        out = expr_weight(e.left, weights)
        for v, k in expr_weight(e.right, weights).items():
            out[v] = out.get(v, 0) + k
        return out
    if isinstance(e, Combo) and len(e.terms) == 1:
        return expr_weight(e.terms[0][1], weights)
    raise ValueError("weight is only defined for a single bracket monomial")


def _ordered(mono: Mapping[str, int], order) -> dict[str, int]:
    return {v: mono[v] for v in order if mono.get(v)}


@dataclass
class WeightSystem:
    """Equations ``coef_var = weight(term)`` for each nonzero term of a top attaching map."""
    variables: list[str]
    coef_var: str
    weights: dict[str, dict[str, int]]
    terms: list[dict[str, int]]
    system: MonomialSystem

    def format(self) -> str:
        if not self.terms:
            return f"{self.coef_var} free"
        return "=".join([self.coef_var] + [format_monomial(t) for t in self.terms])


def weight_system(spec, sphere_vars: Mapping[str, str], top: str, coef_var: str = "s") -> WeightSystem:
    """Integer weight equations for a cell complex with diagonal self-maps.

    Spheres get the named variables; each intermediate cell whose attaching
    map is a single bracket monomial inherits the product weight of its
    leaves.  Every nonzero term of the attaching map of ``top`` then yields
    ``coef_var = weight(term)``.
    """
    from .dgl import Combo

    weights: dict[str, dict[str, int]] = {}
    top_cell = None
    for c in spec.cells:
        if c.is_sphere:
            weights[c.name] = {sphere_vars[c.name]: 1}
        elif c.name == top:
            top_cell = c
        else:
            weights[c.name] = expr_weight(c.attach, weights)
    if top_cell is None:
        raise ValueError(f"no cell named {top}")
    attach = top_cell.attach
    raw = attach.terms if isinstance(attach, Combo) else ((1, attach),)
    terms = []
    for coef, term in raw:
        if coef:
            w = expr_weight(term, weights)
            terms.append(_ordered(w, sphere_vars.values()))
    variables = list(sphere_vars.values()) + [coef_var]
    eqs = [({coef_var: 1}, t) for t in terms]
    ms = system_from_equations(variables, eqs, f"attaching map of {top}")
    return WeightSystem(variables, coef_var, weights, terms, ms)


def mimura_toda_analysis(a: int, b: int, c: int, bound: int = DEFAULT_BOUND) -> dict:
    """Integer self-map analysis of the (S^3 v CP^2) 12-cell complex with coefficients a, b, c."""
    from .registry import mimura_toda
    from .textparse import parse_bracket_text

    spec = mimura_toda(a, b, c)
    ws = weight_system(spec, {"u1": "λ", "u2": "μ"}, "u11", "s")
    sols = integer_monomial_analyze(ws.system, bound=bound)
    thresholds = {"λ": 2, "μ": 3, "s": 12}
    verdict = integer_unit_nse(ws.system, thresholds)
    return {
        "space": spec.name,
        "coefficients": {"a": a, "b": b, "c": c},
        "weights": {k: format_monomial(_ordered(expr_weight(parse_bracket_text(t)[0], ws.weights), ws.variables))
                    for k, t in (("ι2", "u1"), ("ι3", "u2"), ("w", "[u2,u1]"), ("h", "[u1,u3]"))},
        "system": ws.format(),
        "solutions": sols.to_dict(),
        "nse": verdict.to_dict(),
        "conclusion": f"N𝓔={verdict.value}" if verdict.value is not None else "N𝓔 undecided",
    }
