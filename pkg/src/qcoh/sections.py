"""Flat sections of the quantum connection: the degree-by-degree solver for
the fundamental solution, closed-form hypergeometric J-series, assembly of
the solution matrix from J via row operators, Q-factorization, classical
(asymptotic) limits, and descendent invariant extraction.

Internally every solution row is gauge-normalized: row i equals
e^{t/h} * sum_D c_{i,D} q^D with c_{i,0} the i-th dual basis element, and
the scalar entries of the matrix carry the gauge factor on the right.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .algebra import H, H_ONE, HLaurent, NovikovSeries, TPoly, format_rational
from .model import CohClass, ModelSpec, invert_unit, _invert_rational_matrix
from .operators import QDEOperator, apply_gauge
from .series import CohSeries, GaugeSeries


class CheckFailure(Exception):
    """A mathematical verification failed; carries the full report."""

    def __init__(self, report):
        super().__init__(report.get("check", "check failed"))
        self.report = report


def _degrees_upto(rank, order):
    """All multidegrees with total degree <= order, ascending by (total, lex)."""
    out = [()]
    for _ in range(rank):
        out = [d + (k,) for d in out for k in range(order + 1 - sum(d))]
    return sorted(out, key=lambda d: (sum(d), d))


# -- exact matrices over HLaurent -----------------------------------------


def _lift_matrix(mat):
    return tuple(
        tuple(x if isinstance(x, HLaurent) else HLaurent.const(x) for x in row)
        for row in mat
    )


def _zero_matrix(size):
    return tuple((HLaurent(),) * size for _ in range(size))


def _identity_matrix(size):
    return tuple(
        tuple(H_ONE if i == j else HLaurent() for j in range(size))
        for i in range(size)
    )


def _mat_add(a, b):
    return tuple(
        tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b)
    )


def _mat_sub(a, b):
    return tuple(
        tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b)
    )


def _mat_mul(a, b):
    size = len(a)
    return tuple(
        tuple(
            sum((a[i][u] * b[u][j] for u in range(size)), HLaurent())
            for j in range(size)
        )
        for i in range(size)
    )


def _mat_scale(a, x):
    return tuple(tuple(v * x for v in row) for row in a)


def _mat_is_zero(a):
    return not any(any(row) for row in a)


# -- solver ----------------------------------------------------------------


class HMatrix:
    """Fundamental solution data: one gauge-normalized series per row."""

    __slots__ = ("model", "order", "rows")

    def __init__(self, model: ModelSpec, order: int, rows):
        rows = tuple(rows)
        if len(rows) != model.size:
            raise ValueError("expected %d rows" % model.size)
        self.model = model
        self.order = order
        self.rows = rows

    def jrow(self) -> GaugeSeries:
        """The last row: the J-series."""
        return self.rows[-1]

    def entry(self, i, k):
        """Scalar entry (i, k) as {multidegree: HLaurent} (gauge factor
        implied on the right)."""
        return self.rows[i].scalar_component(k)

    def gauge_matrices(self):
        """{multidegree: matrix of HLaurent} with entry[i][k] the degree-D
        part of the scalar entry (i, k)."""
        size = self.model.size
        comps = [
            [self.rows[i].scalar_component(k) for k in range(size)]
            for i in range(size)
        ]
        out = {}
        for D in _degrees_upto(self.model.rank, self.order):
            mat = tuple(
                tuple(comps[i][k].get(D, HLaurent()) for k in range(size))
                for i in range(size)
            )
            if not _mat_is_zero(mat):
                out[D] = mat
        return out

    def check_system(self) -> dict:
        """Verify h d_j(row i) = sum_u (M_j)_{iu} (row u) for all i, j."""
        model = self.model
        size = model.size
        witnesses = []
        for j in range(1, model.rank + 1):
            rhs_rows = [
                GaugeSeries(model, self.order, {}) for _ in range(size)
            ]
            for D in model.quantum_degrees(j):
                if sum(D) > self.order:
                    continue
                mat = model.quantum_part(j, D)
                if mat is None:
                    continue
                for i in range(size):
                    for u in range(size):
                        v = mat[i][u]
                        if not v:
                            continue
                        add = self.rows[u].scaled(v)
                        if any(D):
                            add = add.shifted(D)
                        rhs_rows[i] = rhs_rows[i] + add
            for i in range(size):
                lhs = self.rows[i].theta(j)
                if lhs != rhs_rows[i]:
                    diff = lhs - rhs_rows[i]
                    witnesses.append(
                        {
                            "direction": j,
                            "row": i,
                            "detail": diff.describe(),
                        }
                    )
        return {
            "check": "first-order-system",
            "model": model.name,
            "order": self.order,
            "status": "pass" if not witnesses else "fail",
            "witnesses": witnesses,
        }

    def to_json(self):
        return {
            "model": self.model.name,
            "order": self.order,
            "rows": [row.to_json() for row in self.rows],
        }


def solve_fundamental(model: ModelSpec, order: int) -> HMatrix:
    """Solve h d_j H = M_j H degree by degree.

    With the gauge factor peeled off on the right, the degree-D matrix G_D
    satisfies, for every direction j,

        d_j h G_D = [B_j, G_D] + sum_{D' != 0} m_{j,D'} G_{D-D'}

    where B_j is the cup matrix of b_j and m_{j,D'} the q^{D'} part of the
    quantum multiplication matrix.  Each step inverts (d_j h - ad B_j) by a
    finite geometric sum (ad B_j is nilpotent); directions not used for the
    solve are verified, which makes the step an integrability check.
    """
    size = model.size
    rank = model.rank
    cup = {j: _lift_matrix(model.cup_matrix(j)) for j in range(1, rank + 1)}
    mparts = {}
    for j in range(1, rank + 1):
        for D in model.quantum_degrees(j):
            if any(D):
                mat = model.quantum_part(j, D)
                if mat is not None:
                    mparts[(j, D)] = _lift_matrix(mat)

    def commutator(B, X):
        return _mat_sub(_mat_mul(B, X), _mat_mul(X, B))

    G = {(0,) * rank: _identity_matrix(size)}
    for D in _degrees_upto(rank, order):
        if not any(D):
            continue
        rhs = {}
        for j in range(1, rank + 1):
            acc = _zero_matrix(size)
            for (jj, Dp), mat in mparts.items():
                if jj != j:
                    continue
                rest = tuple(a - b for a, b in zip(D, Dp))
                if any(x < 0 for x in rest):
                    continue
                acc = _mat_add(acc, _mat_mul(mat, G[rest]))
            rhs[j] = acc
        jstar = next(j for j in range(1, rank + 1) if D[j - 1] > 0)
        inv = HLaurent.term(Fraction(1, D[jstar - 1]), -1)
        term = _mat_scale(rhs[jstar], inv)
        total = term
        guard = 0
        while not _mat_is_zero(term):
            guard += 1
            if guard > 2 * size + 2:
                raise CheckFailure(
                    {
                        "check": "solver-recursion",
                        "model": model.name,
                        "status": "fail",
                        "witnesses": [
                            {
                                "degree": list(D),
                                "detail": "commutator series did not terminate",
                            }
                        ],
                    }
                )
            term = _mat_scale(commutator(cup[jstar], term), inv)
            total = _mat_add(total, term)
        G[D] = total
        # every other direction must agree: integrability of the system
        for j in range(1, rank + 1):
            dj = D[j - 1]
            lhs = _mat_scale(G[D], HLaurent.term(Fraction(dj), 1)) if dj else _zero_matrix(size)
            lhs = _mat_sub(lhs, commutator(cup[j], G[D]))
            if lhs != rhs[j]:
                raise CheckFailure(
                    {
                        "check": "solver-consistency",
                        "model": model.name,
                        "status": "fail",
                        "witnesses": [
                            {"degree": list(D), "direction": j}
                        ],
                    }
                )

    duals = [cls.lifted() for cls in model.dual_basis()]
    rows = []
    for i in range(size):
        terms = {}
        for D, mat in G.items():
            acc = None
            for l in range(size):
                v = mat[i][l]
                if not v:
                    continue
                add = duals[l].scaled(v)
                acc = add if acc is None else acc + add
            if acc is not None and acc:
                terms[D] = acc
        rows.append(GaugeSeries(model, order, terms))
    return HMatrix(model, order, rows)


# -- closed forms ----------------------------------------------------------

_CP_NAME_RE = re.compile(r"^cp([1-9][0-9]*)$")


def _cup_linear_factor(model, cls, shift):
    """cls + shift*h as a cohomology class over HLaurent."""
    out = cls.lifted()
    unit = model.unit().lifted()
    return out + unit.scaled(HLaurent.term(Fraction(shift), 1))


def _cup_product(model, x, y):
    return model.cup(x, y)


def closed_form_cp(m: int, order: int, model: ModelSpec = None) -> GaugeSeries:
    """Hypergeometric series for projective m-space: the degree-d coefficient
    is the inverse of prod_{k=1..d} (x + k h)^{m+1}."""
    from .model import builtin_model

    if model is None:
        model = builtin_model("cp%d" % m)
    x = model.basis_class(1)
    terms = {}
    denom = model.unit().lifted()
    for d in range(order + 1):
        if d:
            factor = _cup_linear_factor(model, x, d)
            power = model.unit().lifted()
            for _ in range(m + 1):
                power = _cup_product(model, power, factor)
            denom = _cup_product(model, denom, power)
        terms[(d,)] = invert_unit(model, denom)
    return GaugeSeries(model, order, terms)


def closed_form_f3(order: int, model: ModelSpec = None) -> GaugeSeries:
    """Hypergeometric series for the flag threefold: coefficient at
    (d1, d2) is prod_{k<=d1+d2}(a+b+kh) / [prod(a+kh)^3 prod(b+kh)^3]."""
    from .model import builtin_model

    if model is None:
        model = builtin_model("f3")
    a = model.basis_class(1)
    b = model.basis_class(2)
    ab = a + b
    terms = {}
    for d1 in range(order + 1):
        for d2 in range(order + 1 - d1):
            numer = model.unit().lifted()
            for k in range(1, d1 + d2 + 1):
                numer = _cup_product(model, numer, _cup_linear_factor(model, ab, k))
            denom = model.unit().lifted()
            for k in range(1, d1 + 1):
                f = _cup_linear_factor(model, a, k)
                for _ in range(3):
                    denom = _cup_product(model, denom, f)
            for k in range(1, d2 + 1):
                f = _cup_linear_factor(model, b, k)
                for _ in range(3):
                    denom = _cup_product(model, denom, f)
            terms[(d1, d2)] = _cup_product(model, numer, invert_unit(model, denom))
    return GaugeSeries(model, order, terms)


def closed_form_sigma1(order: int, model: ModelSpec = None) -> GaugeSeries:
    """Hypergeometric series for the first Hirzebruch surface.  The Novikov
    degree is (e, d) for the two curve classes; the coefficient is

        ratio(d - e) / [prod_{k<=e}(x1+kh)^2 prod_{k<=d}(x4+kh)]

    where ratio resolves the formal quotient of semi-infinite products in
    x2 = x4 - x1: empty for d = e, the inverse of prod_{k=1..d-e}(x2+kh)
    for d > e, and the finite product prod_{k=d-e+1..0}(x2+kh) -- which
    includes the bare factor x2 at k = 0 -- for d < e."""
    from .model import builtin_model

    if model is None:
        model = builtin_model("sigma1")
    x1 = model.basis_class(1)
    x4 = model.basis_class(2)
    x2 = x4 - x1
    terms = {}
    for e in range(order + 1):
        for d in range(order + 1 - e):
            denom = model.unit().lifted()
            for k in range(1, e + 1):
                f = _cup_linear_factor(model, x1, k)
                denom = _cup_product(model, denom, _cup_product(model, f, f))
            for k in range(1, d + 1):
                denom = _cup_product(model, denom, _cup_linear_factor(model, x4, k))
            coeff = invert_unit(model, denom)
            if d > e:
                extra = model.unit().lifted()
                for k in range(1, d - e + 1):
                    extra = _cup_product(
                        model, extra, _cup_linear_factor(model, x2, k)
                    )
                coeff = _cup_product(model, coeff, invert_unit(model, extra))
            elif d < e:
                for k in range(d - e + 1, 1):
                    coeff = _cup_product(
                        model, coeff, _cup_linear_factor(model, x2, k)
                    )
            if coeff:
                terms[(e, d)] = coeff
    return GaugeSeries(model, order, terms)


def closed_form(model: ModelSpec, order: int) -> GaugeSeries:
    got = _CP_NAME_RE.match(model.name)
    if got:
        return closed_form_cp(int(got.group(1)), order, model)
    if model.name == "f3":
        return closed_form_f3(order, model)
    if model.name == "sigma1":
        return closed_form_sigma1(order, model)
    raise LookupError("no closed-form series for model %r" % model.name)


# -- verification ----------------------------------------------------------


def verify_annihilated(J: GaugeSeries, ops, names=None) -> dict:
    """Apply each operator to the series and report residuals."""
    witnesses = []
    for pos, op in enumerate(ops):
        residual = apply_gauge(op, J)
        if residual:
            degs = [list(D) for D, _ in residual.items_sorted()]
            witnesses.append(
                {
                    "operator": names[pos] if names else str(op),
                    "nonzero_degrees": degs,
                    "detail": residual.describe(),
                }
            )
    return {
        "check": "annihilation",
        "model": J.model.name,
        "order": J.order,
        "operators": len(list(ops)),
        "status": "pass" if not witnesses else "fail",
        "witnesses": witnesses,
    }


def build_H_from_J(model: ModelSpec, J: GaugeSeries, rowspec) -> HMatrix:
    """Assemble the solution matrix by applying one row operator per basis
    element to the J-series, then verify the first-order system."""
    if not rowspec or rowspec[-1] != QDEOperator.const(model.rank, 1):
        raise ValueError("row operators must end with the identity row")
    if len(rowspec) != model.size:
        raise ValueError("expected %d row operators" % model.size)
    rows = [apply_gauge(op, J) for op in rowspec]
    H = HMatrix(model, J.order, rows)
    report = H.check_system()
    if report["status"] != "pass":
        raise CheckFailure(report)
    return H


# -- Q-factorization -------------------------------------------------------


def _qmat_mul(A, B, size, rank, order):
    out = {}
    for Da, mata in A.items():
        for Db, matb in B.items():
            D = tuple(a + b for a, b in zip(Da, Db))
            if sum(D) > order:
                continue
            prod = _mat_mul(mata, matb)
            out[D] = _mat_add(out[D], prod) if D in out else prod
    return {D: m for D, m in out.items() if not _mat_is_zero(m)}


def _qmat_inverse(A, size, rank, order):
    """Inverse of a q-matrix series whose q^0 term is an invertible
    h-free matrix; finite geometric series in the q-positive part."""
    zero = (0,) * rank
    head = A[zero]
    rational_head = []
    for row in head:
        rrow = []
        for v in row:
            if v and set(v.c) != {0}:
                raise ValueError("series head is not h-free")
            rrow.append(v.coeff(0))
        rational_head.append(rrow)
    inv0 = _lift_matrix(_invert_rational_matrix(rational_head))
    tail = {D: m for D, m in A.items() if any(D)}
    # X = sum_k (-inv0 * tail)^k * inv0
    base = {
        D: _mat_scale(_mat_mul(inv0, m), HLaurent.const(Fraction(-1)))
        for D, m in tail.items()
    }
    out = {zero: inv0}
    power = {zero: _identity_matrix(size)}
    for _ in range(order):
        power = _qmat_mul(power, base, size, rank, order)
        if not power:
            break
        for D, m in _qmat_mul(power, {zero: inv0}, size, rank, order).items():
            out[D] = _mat_add(out[D], m) if D in out else m
    return {D: m for D, m in out.items() if not _mat_is_zero(m)}


def q_factorize(model: ModelSpec, Hm: HMatrix, rowspec):
    """Split H = Q * H_0 where H_0 is built from the q-free parts of the
    row operators and Q is a q-polynomial matrix with rational entries.

    Returns (Q, H_0) with Q a matrix of scalar Novikov series.
    """
    size = model.size
    rank = model.rank
    order = Hm.order
    J = Hm.jrow()
    theta_rows = [op.theta_part() for op in rowspec]
    H0 = HMatrix(model, order, [apply_gauge(op, J) for op in theta_rows])
    GH = Hm.gauge_matrices()
    GH0 = H0.gauge_matrices()
    Q = _qmat_mul(GH, _qmat_inverse(GH0, size, rank, order), size, rank, order)
    zero = (0,) * rank
    ident = _identity_matrix(size)
    if Q.get(zero) != ident:
        raise CheckFailure(
            {
                "check": "q-factorization",
                "model": model.name,
                "status": "fail",
                "witnesses": [{"detail": "q^0 part of Q is not the identity"}],
            }
        )
    entries = [[NovikovSeries(rank, order) for _ in range(size)] for _ in range(size)]
    for D, mat in Q.items():
        for i in range(size):
            for k in range(size):
                v = mat[i][k]
                if not v:
                    continue
                if set(v.c) != {0}:
                    raise CheckFailure(
                        {
                            "check": "q-factorization",
                            "model": model.name,
                            "status": "fail",
                            "witnesses": [
                                {
                                    "entry": [i, k],
                                    "degree": list(D),
                                    "detail": "entry depends on h: %s" % v,
                                }
                            ],
                        }
                    )
                entries[i][k] = entries[i][k] + NovikovSeries(
                    rank, order, {D: v.coeff(0)}
                )
    # confirm the factorization reproduces H exactly (to the truncation)
    recon = _qmat_mul(Q, GH0, size, rank, order)
    if recon != GH:
        raise CheckFailure(
            {
                "check": "q-factorization",
                "model": model.name,
                "status": "fail",
                "witnesses": [{"detail": "Q*H_0 does not reproduce H"}],
            }
        )
    return [list(row) for row in entries], H0


# -- classical (asymptotic) limit -------------------------------------------


def asymptotic_H(model: ModelSpec):
    """Matrix of cup multiplication by e^{t/h}: entry (i, k) is a polynomial
    in t over HLaurent.  Finite because degree-2 classes are nilpotent."""
    size = model.size
    rank = model.rank
    cup = {j: model.cup_matrix(j) for j in range(1, rank + 1)}
    zero_t = TPoly(rank)
    ident = [
        [TPoly.const(rank, H_ONE) if i == k else zero_t for k in range(size)]
        for i in range(size)
    ]
    result = [row[:] for row in ident]
    term = [row[:] for row in ident]
    l = 0
    while True:
        l += 1
        scale = HLaurent.term(Fraction(1, l), -1)
        new = [[zero_t for _ in range(size)] for _ in range(size)]
        nonzero = False
        for k in range(size):
            for i in range(size):
                acc = zero_t
                for j in range(1, rank + 1):
                    tj = TPoly.t(rank, j, one=H_ONE)
                    for u in range(size):
                        c = cup[j][k][u]
                        if not c or not term[u][i]:
                            continue
                        acc = acc + term[u][i].mul(tj).map_coeffs(
                            lambda v, m=c * scale: v * m
                        )
                if acc:
                    nonzero = True
                new[k][i] = acc
        if not nonzero:
            break
        term = new
        for i in range(size):
            for k in range(size):
                result[i][k] = result[i][k] + term[i][k]
    return result


def asymptotic_row(model: ModelSpec, i: int) -> TPoly:
    """Row i of the asymptotic solution as a cohomology-valued t-polynomial:
    cup multiplication of the i-th dual basis element by e^{t/h}."""
    rank = model.rank
    start = model.dual_basis()[i].lifted()
    out = TPoly.const(rank, start)
    term = out
    l = 0
    while term:
        l += 1
        scale = HLaurent.term(Fraction(1, l), -1)
        new = TPoly(rank)
        for e, cls in term.c.items():
            for j in range(1, rank + 1):
                prod = model.cup(model.basis_class(j).lifted(), cls).scaled(scale)
                if not prod:
                    continue
                ne = list(e)
                ne[j - 1] += 1
                new = new + TPoly(rank, {tuple(ne): prod})
        term = new
        out = out + term
    return out


def asymptotic_J(model: ModelSpec) -> TPoly:
    """The last asymptotic row: e^{t/h}, cup-applied to the unit."""
    return asymptotic_row(model, model.size - 1)


def tpoly_matrix_json(mat):
    """Deterministic JSON form of a matrix of t-polynomials over HLaurent."""
    return [
        [
            [{"t": list(e), "h": v.to_json()} for e, v in entry.items_sorted()]
            for entry in row
        ]
        for row in mat
    ]


# -- descendent extraction ---------------------------------------------------


def degree_axiom_allows(model: ModelSpec, insertion_degrees, levels, D) -> bool:
    """Dimension count for genus-0 descendent invariants: the insertion
    degrees plus twice the descendent levels must equal
    2(dim + #insertions - 3) plus twice the pairing of c1 with D."""
    lhs = sum(insertion_degrees) + 2 * sum(levels)
    c1 = sum(c * d for c, d in zip(model.chern, D))
    rhs = 2 * (model.dim + len(insertion_degrees) - 3) + 2 * c1
    return lhs == rhs


def extract_descendents(model: ModelSpec, Hm: HMatrix, max_degree: int, max_level: int):
    """Read two-point descendent invariants against the fundamental class
    from the J-row: the value at level n along the j-th dual basis element
    and degree D is the h^{-(n+1)} coefficient of the scalar entry.

    Positive or zero powers of h at D != 0 would contradict the generating
    function shape and raise CheckFailure.
    """
    J = Hm.jrow()
    records = []
    for j in range(model.size):
        comp = J.scalar_component(j)
        for D, lau in sorted(comp.items(), key=lambda kv: (sum(kv[0]), kv[0])):
            if not any(D) or sum(D) > max_degree:
                continue
            for exp, value in sorted(lau.c.items()):
                if exp >= 0:
                    raise CheckFailure(
                        {
                            "check": "descendent-extraction",
                            "model": model.name,
                            "status": "fail",
                            "witnesses": [
                                {
                                    "degree": list(D),
                                    "component": model.labels[j],
                                    "detail": "nonnegative h power %d" % exp,
                                }
                            ],
                        }
                    )
                level = -exp - 1
                if level > max_level:
                    continue
                axiom = degree_axiom_allows(
                    model, (model.degrees[j], 0), (level, 0), D
                )
                if not axiom:
                    raise CheckFailure(
                        {
                            "check": "descendent-extraction",
                            "model": model.name,
                            "status": "fail",
                            "witnesses": [
                                {
                                    "degree": list(D),
                                    "component": model.labels[j],
                                    "level": level,
                                    "value": format_rational(value),
                                    "detail": "nonzero value where the degree axiom forces zero",
                                }
                            ],
                        }
                    )
                records.append(
                    {
                        "degree": list(D),
                        "level": level,
                        "label": model.labels[j],
                        "j": j,
                        "value": value,
                        "axiom": True,
                    }
                )
    records.sort(key=lambda r: (sum(r["degree"]), r["degree"], r["level"], r["j"]))
    return records
