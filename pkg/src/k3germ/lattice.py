"""The rank-3 lattice M = Z h_x + Z h_y + Z h_z and the map rho: SL2(Z) -> SO+(M).

Matrices act on column vectors: column j of an isometry is the image of
basis vector j.  Two bases are used:

* H = (h_x, h_y, h_z), Gram [[0,2,2],[2,0,2],[2,2,0]];
* E = (e1, e2, e3) with e1 = h_x, e2 = -h_x + h_y - h_z, e3 = h_z,
  Gram [[0,0,2],[0,-4,0],[2,0,0]].

In the E basis, M is the lattice of integral trace-zero 2x2 matrices
alpha*e1 + beta*e2 + gamma*e3 = [[beta, -alpha], [gamma, -beta]] with
(v, w) = -2 Tr(vw), and rho(A) v = A v A^-1.

Everything here is integer arithmetic except :func:`orthogonal_decompose`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .errors import ContradictionError, NoPreimageError, PreconditionError

GRAM_H = ((0, 2, 2), (2, 0, 2), (2, 2, 0))
GRAM_E = ((0, 0, 2), (0, -4, 0), (2, 0, 0))
# columns are e1, e2, e3 written in the H basis
E_IN_H = ((1, -1, 0), (0, 1, 0), (0, -1, 1))
H_IN_E = ((1, 1, 0), (0, 1, 0), (0, 1, 1))
GRAMS = {"H": GRAM_H, "E": GRAM_E}

IOTA_H = {
    "X": ((-1, 0, 0), (2, 1, 0), (2, 0, 1)),
    "Y": ((1, 2, 0), (0, -1, 0), (0, 2, 1)),
    "Z": ((1, 0, 2), (0, 1, 2), (0, 0, -1)),
}

V0_E = (1, 0, 1)  # e1 + e3, (v0, v0) = 4 > 0


# -- small integer matrix helpers ---------------------------------------------

def mat(rows):
    return tuple(tuple(int(x) for x in r) for r in rows)


def mul(A, B):
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))) for i in range(len(A))
    )


def transpose(A):
    return tuple(zip(*A))


def ident(n):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def det(A):
    n = len(A)
    if n == 1:
        return A[0][0]
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    return sum((-1) ** j * A[0][j] * det([r[:j] + r[j + 1:] for r in A[1:]]) for j in range(n))


def trace(A):
    return sum(A[i][i] for i in range(len(A)))


def apply(A, v):
    return tuple(sum(A[i][j] * v[j] for j in range(len(v))) for i in range(len(A)))


def inner(u, v, basis="E"):
    G = GRAMS[basis]
    return sum(u[i] * G[i][j] * v[j] for i in range(3) for j in range(3))


def mpow(A, n):
    if n < 0:
        A = inv2(A) if len(A) == 2 else inv3_unimodular(A)
        n = -n
    R = ident(len(A))
    while n:
        if n & 1:
            R = mul(R, A)
        A = mul(A, A)
        n >>= 1
    return R


def inv2(A):
    (a, b), (c, d) = A
    if a * d - b * c != 1:
        raise PreconditionError("not in SL2")
    return ((d, -b), (-c, a))


def inv3_unimodular(A):
    """Integer inverse via the adjugate; A must have determinant +-1."""
    D = det(A)
    if D not in (1, -1):
        raise PreconditionError("matrix is not unimodular")
    cof = [[(-1) ** (i + j) * det([r[:j] + r[j + 1:] for k, r in enumerate(A) if k != i]) for j in range(3)]
           for i in range(3)]
    return tuple(tuple(cof[j][i] * D for j in range(3)) for i in range(3))


# -- bases and isometries -----------------------------------------------------

def iota_star(axis: str):
    """Action of iota_axis^* on M in the H basis."""
    try:
        return IOTA_H[axis.upper()]
    except KeyError:
        raise PreconditionError(f"unknown axis {axis!r}") from None


def basis_change(obj, src: str, dst: str):
    """Convert a vector (3-tuple) or an isometry (3x3) between the H and E bases."""
    if src not in GRAMS or dst not in GRAMS:
        raise PreconditionError("bases are 'H' and 'E'")
    is_matrix = isinstance(obj[0], (tuple, list))
    if src == dst:
        return mat(obj) if is_matrix else tuple(obj)
    # x_dst = C x_src
    C, Cinv = (E_IN_H, H_IN_E) if src == "E" else (H_IN_E, E_IN_H)
    if is_matrix:
        return mul(mul(C, mat(obj)), Cinv)
    return apply(C, tuple(obj))


def gram_in(basis: str):
    if basis == "H":
        return GRAM_H
    S = E_IN_H
    return mul(mul(transpose(S), GRAM_H), S)


def is_isometry(B, basis="E") -> bool:
    G = GRAMS[basis]
    return mul(mul(transpose(B), G), B) == G


def in_SO_plus(B) -> bool:
    """B (E basis) is an isometry of determinant 1 preserving the positive cone."""
    B = mat(B)
    return is_isometry(B, "E") and det(B) == 1 and inner(apply(B, V0_E), V0_E) > 0


# -- rho and its inverse --------------------------------------------------------

def _sl2(A):
    A = mat(A)
    if len(A) != 2 or any(len(r) != 2 for r in A):
        raise PreconditionError("expected a 2x2 matrix")
    if det(A) != 1:
        raise PreconditionError(f"det {det(A)} != 1")
    return A


def rho(A):
    """rho(A) in the E basis."""
    (a, b), (c, d) = _sl2(A)
    return (
        (a * a, 2 * a * b, b * b),
        (a * c, a * d + b * c, b * d),
        (c * c, 2 * c * d, d * d),
    )


def normalize_sign(A):
    """Representative of +-A with a > 0, or a = 0 and b > 0."""
    (a, b), (c, d) = A
    if a < 0 or (a == 0 and b < 0):
        return ((-a, -b), (-c, -d))
    return mat(A)


def rho_inverse(B):
    """The normalized A in SL2(Z) with rho(A) = B; NoPreimageError outside SO+(M)."""
    B = mat(B)
    if not in_SO_plus(B):
        raise NoPreimageError("matrix is not in SO+(M)")
    a2, b2 = B[0][0], B[0][2]
    a = math.isqrt(a2) if a2 >= 0 else -1
    if a < 0 or a * a != a2:
        raise NoPreimageError("a^2 entry is not a square")
    if a:
        b, rb = divmod(B[0][1], 2 * a)
        c, rc = divmod(B[1][0], a)
        if rb or rc or (1 + b * c) % a:
            raise NoPreimageError("entries are not integral")
        d = (1 + b * c) // a
    else:
        # ad - bc = 1 forces bc = -1; normalize b = 1
        if b2 != 1:
            raise NoPreimageError("a = 0 needs b^2 = 1")
        b, c, d = 1, -1, B[1][2]
    A = ((a, b), (c, d))
    if det(A) != 1 or rho(A) != B:
        raise NoPreimageError("no SL2(Z) preimage")
    return normalize_sign(A)


def char_poly(B, A=None) -> dict:
    """det(t I - B) = t^3 + c2 t^2 + c1 t + c0; checked against the factored form when A is given."""
    B = mat(B)
    minors = sum(B[i][i] * B[j][j] - B[i][j] * B[j][i] for i in range(3) for j in range(i + 1, 3))
    coeffs = (1, -trace(B), minors, -det(B))
    out = {"coefficients": list(coeffs)}
    if A is not None:
        tr = trace(_sl2(A))
        k = tr * tr - 2
        # (t - 1)(t^2 - k t + 1) = t^3 - (k+1) t^2 + (k+1) t - 1
        factored = (1, -(k + 1), k + 1, -1)
        if factored != coeffs:
            raise ContradictionError(f"characteristic polynomial {coeffs} is not (t-1)(t^2-{k}t+1)")
        out["factored"] = f"(t - 1)(t^2 - {k}t + 1)"
    return out


# -- fixed vectors ---------------------------------------------------------------

def vector_of_matrix(v):
    """E coordinates (alpha, beta, gamma) of the trace-zero matrix [[beta, -alpha], [gamma, -beta]]."""
    (p, q), (r, s) = v
    if p + s:
        raise PreconditionError("matrix is not trace-free")
    return (-q, p, r)


def matrix_of_vector(u):
    alpha, beta, gamma = u
    return ((beta, -alpha), (gamma, -beta))


def primitive_fixed_vector(A):
    """(2A - Tr(A) I) / gcd(a - d, 2b, 2c) in E coordinates.

    Sign: the first nonzero entry of the matrix read row by row is positive.
    """
    (a, b), (c, d) = _sl2(A)
    if abs(a + d) <= 2:
        raise PreconditionError("|Tr A| <= 2: the eigenvalue 1 of rho(A) is not simple")
    g = math.gcd(a - d, 2 * b, 2 * c)
    m = ((a - d) // g, 2 * b // g), (2 * c // g, (d - a) // g)
    first = next(x for row in m for x in row if x)
    if first < 0:
        m = tuple(tuple(-x for x in row) for row in m)
    return vector_of_matrix(m)


def self_intersection(u, basis="E") -> int:
    return inner(u, u, basis)


def selfIP_formula(A) -> int:
    """-4 (Tr^2 - 4) / gcd(a - d, 2b, 2c)^2."""
    (a, b), (c, d) = _sl2(A)
    if abs(a + d) <= 2:
        raise PreconditionError("|Tr A| <= 2")
    g = math.gcd(a - d, 2 * b, 2 * c)
    num = -4 * ((a + d) ** 2 - 4)
    if num % (g * g):
        raise ContradictionError("self-intersection formula is not integral")
    return num // (g * g)


# -- the surface's lattice data ----------------------------------------------------

def word_matrix(word: str, basis="H"):
    """Pullback of the composition spelled by ``word`` (letters applied right to left).

    (f o g)^* = g^* f^*, so "XY" gives Y^* X^*.
    """
    M = ident(3)
    for letter in word:
        M = mul(iota_star(letter), M)
    return M if basis == "H" else basis_change(M, "H", "E")


def phi_tilde_matrix(basis="H"):
    """(iota_x o iota_y)^* on M = Y^* X^*."""
    B = mul(iota_star("Y"), iota_star("X"))
    N = tuple(tuple(B[i][j] - (i == j) for j in range(3)) for i in range(3))
    if mul(mul(N, N), N) != ((0,) * 3,) * 3:
        raise ContradictionError("phi~^* is not unipotent")
    return B if basis == "H" else basis_change(B, "H", "E")


def psi_matrix(basis="H"):
    """(iota_z o iota_x o iota_y o iota_z)^* = Z^* Y^* X^* Z^*."""
    Z = iota_star("Z")
    B = mul(mul(Z, phi_tilde_matrix("H")), Z)
    return B if basis == "H" else basis_change(B, "H", "E")


def _ext_gcd(a, b):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def shear_frame():
    """(Phi, P, s): Phi in SL2(Z) with rho(Phi) = phi~^*|M, Tr Phi = 2, and P^-1 Phi P = [[1, s], [0, 1]]."""
    Phi = rho_inverse(phi_tilde_matrix("E"))
    if trace(Phi) == -2:
        Phi = tuple(tuple(-x for x in r) for r in Phi)
    if trace(Phi) != 2:
        raise ContradictionError(f"Tr(Phi~) = {trace(Phi)}, expected +-2")
    (a, b), (c, d) = Phi
    n11, n12, n21, n22 = a - 1, b, c, d - 1
    # primitive kernel vector of Phi - I, completed to a basis of determinant 1
    if n11 or n12:
        v = (n12, -n11)
    else:
        v = (n22, -n21)
    g = math.gcd(*v)
    v = (v[0] // g, v[1] // g)
    _, x, y = _ext_gcd(v[0], v[1])
    # det [[v0, w0], [v1, w1]] = v0 w1 - v1 w0 = 1 with w = (-y, x)
    P = ((v[0], -y), (v[1], x))
    if det(P) != 1:
        raise ContradictionError("basis completion failed")
    J = mul(mul(inv2(P), Phi), P)
    if J[0][0] != 1 or J[1][0] != 0 or J[1][1] != 1 or J[0][1] == 0:
        raise ContradictionError(f"Phi~ is not conjugate to a shear: {J}")
    return Phi, P, J[0][1]


def s_parameter() -> int:
    return shear_frame()[2]


@dataclass
class TowerLevel:
    i: int
    Gamma: tuple
    isometry: tuple
    trace: int
    closed_form: int | None

    def to_json(self):
        return {
            "i": self.i,
            "Gamma": [list(r) for r in self.Gamma],
            "isometry_E": [list(r) for r in self.isometry],
            "trace": self.trace,
            "closed_form": self.closed_form,
        }


def gamma_matrix_tower(n: int, N: int) -> list[TowerLevel]:
    """Gamma_0 = psi, Gamma_i = Gamma_{i-1} Phi^N Gamma_{i-1}^-1 Phi^-N in the shear frame.

    Every level is checked three ways: the trace against 2 + N^2 s^2 c^2, and
    rho(P Gamma_i P^-1) against the 3x3 product of the involution matrices.
    """
    if n < 1 or N < 1:
        raise PreconditionError("need n >= 1 and N >= 1")
    Phi, P, s = shear_frame()
    Pinv = inv2(P)
    shear = ((1, s), (0, 1))
    psi_E = psi_matrix("E")
    G = mul(mul(Pinv, rho_inverse(psi_E)), P)
    phi_E = phi_tilde_matrix("E")
    phiN, phimN = mpow(phi_E, N), mpow(phi_E, -N)
    direct = psi_E
    levels = [TowerLevel(0, G, direct, trace(G), None)]
    SN, SmN = mpow(shear, N), mpow(shear, -N)
    for i in range(1, n + 1):
        c = G[1][0]
        if c == 0:
            raise ContradictionError(f"Gamma_{i - 1} commutes with Phi~ (c = 0)")
        G = mul(mul(mul(G, SN), inv2(G)), SmN)
        closed = 2 + N * N * s * s * c * c
        # gamma_i^* = gamma_{i-1}^* phi^*N (gamma_{i-1}^*)^-1 phi^*-N
        direct = mul(mul(mul(direct, phiN), inv3_unimodular(direct)), phimN)
        if trace(G) != closed:
            raise ContradictionError(f"Tr(Gamma_{i}) = {trace(G)} but the closed form gives {closed}")
        if rho(mul(mul(P, G), Pinv)) != direct:
            raise ContradictionError(f"rho(Gamma_{i}) disagrees with the involution product")
        levels.append(TowerLevel(i, G, direct, trace(G), closed))
    return levels


def fixed_curve_bound(n: int, N: int, D: int = 1) -> dict:
    """-(u, u) for the primitive fixed vector u of Gamma_n, compared with 4 D^2."""
    if D < 1:
        raise PreconditionError("D must be positive")
    levels = gamma_matrix_tower(n, N)
    s = s_parameter()
    G = levels[-1].Gamma
    u = primitive_fixed_vector(G)
    neg = -self_intersection(u)
    if neg != -selfIP_formula(G):
        raise ContradictionError("self-intersection routes disagree")
    chain = neg >= N * N * s * s
    if not chain:
        raise ContradictionError(f"-(u,u) = {neg} < N^2 s^2 = {N * N * s * s}")
    return {
        "n": n,
        "N": N,
        "D": D,
        "s": s,
        "u": list(u),
        "minus_uu": neg,
        "N2s2": N * N * s * s,
        "four_D2": 4 * D * D,
        "exceeds": neg > 4 * D * D,
        "hypothesis_N_gt_2D": N > 2 * D,
        "min_N_for_chain": (2 * D) // abs(s) + 1,
    }


# -- orthogonal decomposition ------------------------------------------------------

def integer_kernel(rows):
    """Basis of {x in Z^n : R x = 0} (saturated), by unimodular column operations."""
    rows = [list(map(int, r)) for r in rows]
    n = len(rows[0])
    U = [[int(i == j) for j in range(n)] for i in range(n)]  # columns track the transform
    A = [r[:] for r in rows]
    pivot_cols = 0
    for r in range(len(A)):
        # clear A[r][pivot_cols+1:] into A[r][pivot_cols] with column gcd steps
        for j in range(pivot_cols + 1, n):
            while A[r][j]:
                q = A[r][pivot_cols] // A[r][j] if A[r][j] else 0
                for M in (A, U):
                    for row in M:
                        row[pivot_cols] -= q * row[j]
                for M in (A, U):
                    for row in M:
                        row[pivot_cols], row[j] = row[j], row[pivot_cols]
        if A[r][pivot_cols]:
            pivot_cols += 1
            if pivot_cols == n:
                break
    return [tuple(U[i][j] for i in range(n)) for j in range(pivot_cols, n)]


def orthogonal_complement(vectors, basis="E"):
    G = GRAMS[basis]
    rows = [apply(transpose(G), v) for v in vectors]
    return integer_kernel(rows)


def orthogonal_decompose(gram_L, basis_M1, basis_M2, v) -> dict:
    """v = w1 + w2 with w_i in Q M_i, plus the integrality certificates det(M2) w2 in M2 and det(M2) w1 in L."""
    G = mat(gram_L)

    def ip(x, y):
        return sum(x[i] * G[i][j] * y[j] for i in range(len(G)) for j in range(len(G)))

    if any(ip(m1, m2) for m1 in basis_M1 for m2 in basis_M2):
        raise PreconditionError("M1 and M2 are not orthogonal")
    cols = list(basis_M1) + list(basis_M2)
    n = len(G)
    if len(cols) != n:
        raise PreconditionError("M1 + M2 must have full rank")
    A = [[Fraction(cols[j][i]) for j in range(n)] for i in range(n)]
    if det(A) == 0:
        raise PreconditionError("M1 + M2 is not of finite index")
    x = linalg.solve(A, [Fraction(c) for c in v])
    k = len(basis_M1)

    def combo(coeffs, basis):
        return tuple(sum((c * b[i] for c, b in zip(coeffs, basis)), Fraction(0)) for i in range(n))

    w1, w2 = combo(x[:k], basis_M1), combo(x[k:], basis_M2)
    detM2 = det([[ip(a, b) for b in basis_M2] for a in basis_M2])
    cert_w2 = all((detM2 * c).denominator == 1 for c in x[k:])
    cert_w1 = all((detM2 * c).denominator == 1 for c in w1)
    if not (cert_w2 and cert_w1):
        raise ContradictionError("integrality certificate failed")
    return {
        "w1": [str(c) for c in w1],
        "w2": [str(c) for c in w2],
        "det_M2": detM2,
        "det_M2_w2_in_M2": cert_w2,
        "det_M2_w1_in_L": cert_w1,
    }


# -- freeness at bounded length ------------------------------------------------------

def free_word_check(maxLen: int) -> dict:
    """Multiply out every reduced word of length <= maxLen; none may be the identity."""
    if maxLen < 1:
        raise PreconditionError("maxLen must be at least 1")
    I3 = ident(3)
    count = 0
    stack = [("", I3)]
    while stack:
        word, M = stack.pop()
        if len(word) == maxLen:
            continue
        for letter in "XYZ":
            if word and word[-1] == letter:
                continue
            W = mul(M, iota_star(letter))
            count += 1
            if W == I3:
                raise ContradictionError(f"relation found: {word + letter} acts trivially on M")
            stack.append((word + letter, W))
    return {"max_len": maxLen, "words_checked": count, "relation_found": False}


def random_sl2(rng, bound: int = 20):
    """Random element of SL2(Z) as a product of elementary matrices."""
    A = ident(2)
    for _ in range(rng.randint(1, 6)):
        k = rng.randint(-bound // 4 or -1, bound // 4 or 1)
        E = ((1, k), (0, 1)) if rng.random() < 0.5 else ((1, 0), (k, 1))
        A = mul(A, E)
    if rng.random() < 0.5:
        A = tuple(tuple(-x for x in r) for r in A)
    return A

