"""Exact linear algebra over Q and Z.

Matrices are lists of rows; entries are ``Fraction`` (or ``int`` for the
integer routines).  Everything here is deterministic: pivots are always the
leftmost available column and the first available row.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def to_fractions(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form.  Returns ``(R, pivot_columns)``; zero rows dropped."""
    m = to_fractions(rows)
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> Matrix:
    """Basis of {x : A x = 0}, one vector per free column, in column order."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    R, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, pc in enumerate(piv):
            v[pc] = -R[i][f]
        basis.append(v)
    return basis


def left_nullspace(rows: Sequence[Sequence], ncols: int) -> Matrix:
    """Basis of {y : y^T A = 0}."""
    return nullspace(transpose(rows, ncols), len(rows))


def transpose(rows: Sequence[Sequence], ncols: int) -> Matrix:
    return [[Fraction(rows[i][j]) for i in range(len(rows))] for j in range(ncols)]


def solve(rows: Sequence[Sequence], rhs: Sequence, ncols: int) -> tuple[list[Fraction], Matrix] | None:
    """Solve ``A x = b``.

    Returns ``(particular, kernel_basis)`` with free variables of the
    particular solution set to zero, or ``None`` when inconsistent.
    """
    if not rows:
        return [Fraction(0)] * ncols, nullspace([], ncols)
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    R, piv = rref(aug, ncols + 1)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for i, pc in enumerate(piv):
        x[pc] = R[i][ncols]
    return x, nullspace(rows, ncols)


def is_invertible(rows: Sequence[Sequence]) -> bool:
    n = len(rows)
    if any(len(r) != n for r in rows):
        return False
    return rank(rows) == n


def mat_vec(rows: Sequence[Sequence], v: Sequence) -> list:
    return [sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in rows]


# -- integer lattices -------------------------------------------------------

def smith_normal_form(rows: Sequence[Sequence[int]]) -> list[int]:
    """Invariant factors d1 | d2 | ... (nonzero ones only) of an integer matrix."""
    m = [[int(x) for x in r] for r in rows]
    if not m or not m[0]:
        return []
    nr, nc = len(m), len(m[0])
    diag = []
    t = 0
    while t < min(nr, nc):
        entries = [(abs(m[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if m[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        m[t], m[pi] = m[pi], m[t]
        for row in m:
            row[t], row[pj] = row[pj], row[t]
        while True:
            done = True
            for i in range(t + 1, nr):
                if m[i][t]:
                    q = m[i][t] // m[t][t]
                    m[i] = [a - q * b for a, b in zip(m[i], m[t])]
                    if m[i][t]:
                        done = False
            for j in range(t + 1, nc):
                if m[t][j]:
                    q = m[t][j] // m[t][t]
                    for row in m:
                        row[j] -= q * row[t]
                    if m[t][j]:
                        done = False
            if done:
                # divisibility: fold any offending entry into row t
                bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc)
                            if m[i][j] % m[t][t]), None)
                if bad is None:
                    break
                m[t] = [a + b for a, b in zip(m[t], m[bad[0]])]
                done = False
            if not done:
                entries = [(abs(m[i][j]), i, j) for i in range(t, nr) for j in range(t, nc)
                           if m[i][j] and (i == t or j == t)]
                _, pi, pj = min(entries)
                m[t], m[pi] = m[pi], m[t]
                for row in m:
                    row[t], row[pj] = row[pj], row[t]
        diag.append(abs(m[t][t]))
        t += 1
    return diag
