"""Small exact linear algebra over any field whose elements support + - * /.

Used with ``QuadElem`` and ``mpq`` entries.  Matrices are lists of rows.
"""

from __future__ import annotations


def identity(n, one=1, zero=0):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def matmul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            s = A[i][0] * B[0][j]
            for k in range(1, m):
                s = s + A[i][k] * B[k][j]
            row.append(s)
        out.append(row)
    return out


def transpose(A):
    return [list(col) for col in zip(*A)]


def det(A):
    """Determinant by fraction-free cofactor expansion (n <= 4 in practice)."""
    n = len(A)
    if n == 1:
        return A[0][0]
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in A[1:]]
        term = A[0][j] * det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def inverse(A):
    """Inverse by Gauss-Jordan elimination; raises ZeroDivisionError if singular."""
    n = len(A)
    M = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]


def solve(A, b):
    """Solve A x = b for square nonsingular A."""
    Ainv = inverse(A)
    return [sum((Ainv[i][j] * b[j] for j in range(1, len(b))), Ainv[i][0] * b[0]) for i in range(len(b))]


class RowEchelon:
    """Incremental sparse row reduction.

    Rows are dicts ``column -> value``.  ``add`` reduces a row against the
    pivots collected so far and keeps it if something survives; ``reduce``
    answers membership queries without modifying the basis.
    """

    def __init__(self):
        self.pivots = {}  # pivot column -> normalized row (pivot entry 1)

    @property
    def rank(self):
        return len(self.pivots)

    def reduce(self, row):
        row = {c: v for c, v in row.items() if v}
        # pivot rows are fully reduced, so one pass over the pivot columns suffices
        for col in [c for c in row if c in self.pivots]:
            f = row.get(col)
            if not f:
                continue
            for c, v in self.pivots[col].items():
                nv = row.get(c, 0) - f * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
        return row

    def add(self, row):
        row = self.reduce(row)
        if not row:
            return False
        col = min(row)
        inv = 1 / row[col]
        row = {c: v * inv for c, v in row.items()}
        # keep existing pivot rows free of the new pivot column
        for pc, prow in self.pivots.items():
            f = prow.get(col)
            if f:
                for c, v in row.items():
                    nv = prow.get(c, 0) - f * v
                    if nv:
                        prow[c] = nv
                    else:
                        prow.pop(c, None)
        self.pivots[col] = row
        return True

    def contains(self, row):
        return not self.reduce(row)
