"""Cohomology models: a basis with grading, intersection pairing, cup table,
and the full small quantum product table over exact rationals.

A model fixes a free module with basis b_0..b_s, b_0 the unit, the degree-2
generators b_1..b_r, and for every pair (i,j) the finite q-expansion of
b_i o b_j (the D=0 part of which must be the cup product).  Built-in models
cover projective spaces, the three-dimensional flag variety, the first
Hirzebruch surface and the Grassmannian of 2-planes in C^4.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from importlib import resources

from .algebra import HLaurent, format_rational, rational


def data_path(name: str):
    """Path to a shipped data file."""
    return resources.files("qcoh").joinpath("data", name)


class ModelError(ValueError):
    """Raised when a model description violates a structural invariant."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class CohClass:
    """A cohomology class: dense coordinate vector over basis b_0..b_s.

    Coordinates may be Fractions or HLaurent values; the container is
    agnostic and instances are treated as immutable.
    """

    __slots__ = ("coords",)

    def __init__(self, coords):
        self.coords = tuple(coords)

    def __len__(self):
        return len(self.coords)

    def __bool__(self):
        return any(self.coords)

    def __eq__(self, other):
        if not isinstance(other, CohClass):
            return NotImplemented
        if len(self.coords) != len(other.coords):
            return False
        return all(a == b for a, b in zip(self.coords, other.coords))

    def __neg__(self):
        return CohClass(tuple(-a for a in self.coords))

    def __add__(self, other):
        if not isinstance(other, CohClass):
            return NotImplemented
        return CohClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, x):
        return CohClass(tuple(x * a for a in self.coords))

    def __mul__(self, x):
        if isinstance(x, CohClass):
            return NotImplemented
        return self.scaled(x)

    __rmul__ = __mul__

    def lifted(self):
        """Coerce rational coordinates to HLaurent constants."""
        return CohClass(
            tuple(
                a if isinstance(a, HLaurent) else HLaurent.const(a)
                for a in self.coords
            )
        )

    def describe(self, labels):
        parts = []
        for a, lab in zip(self.coords, labels):
            if not a:
                continue
            sa = str(a)
            if ("+" in sa[1:]) or (" - " in sa) or ("/" in sa and "h" in sa):
                sa = "(%s)" % sa
            parts.append(sa if lab == "1" else "%s*%s" % (sa, lab))
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return "CohClass%r" % (self.coords,)


class ModelSpec:
    """Complete description of one small quantum cohomology ring."""

    def __init__(
        self,
        name,
        dim,
        rank,
        labels,
        degrees,
        pairing,
        cup,
        quantum,
        chern,
        aliases=None,
    ):
        self.name = name
        self.dim = int(dim)
        self.rank = int(rank)
        self.labels = tuple(labels)
        self.degrees = tuple(int(d) for d in degrees)
        self.pairing = tuple(tuple(int(x) for x in row) for row in pairing)
        # cup[(i,j)] and quantum[(i,j)][D] are CohClass values over Fraction,
        # stored for every ordered pair
        self.cup_table = dict(cup)
        self.quantum_table = dict(quantum)
        self.chern = tuple(int(c) for c in chern)
        self.aliases = dict(aliases or {})
        self._dual = None

    # -- basic accessors ---------------------------------------------------

    @property
    def size(self):
        return len(self.labels)

    @property
    def top(self):
        return len(self.labels) - 1

    @property
    def qdegrees(self):
        """Degree of q_i: twice the pairing of c_1 with the i-th curve class."""
        return tuple(2 * c for c in self.chern)

    def zero_class(self):
        return CohClass((Fraction(0),) * self.size)

    def basis_class(self, i):
        coords = [Fraction(0)] * self.size
        coords[i] = Fraction(1)
        return CohClass(coords)

    def unit(self):
        return self.basis_class(0)

    def class_degree(self, x: CohClass):
        """Degree if homogeneous, None for 0, ValueError otherwise."""
        degs = {self.degrees[i] for i, a in enumerate(x.coords) if a}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("class is not homogeneous: %r" % (x,))
        return degs.pop()

    # -- classical structure -----------------------------------------------

    def cup_basis(self, i, j) -> CohClass:
        return self.cup_table[(i, j)]

    def cup(self, x: CohClass, y: CohClass) -> CohClass:
        out = [0] * self.size
        for i, xi in enumerate(x.coords):
            if not xi:
                continue
            for j, yj in enumerate(y.coords):
                if not yj:
                    continue
                for k, c in enumerate(self.cup_table[(i, j)].coords):
                    if c:
                        out[k] = out[k] + c * xi * yj
        return CohClass(tuple(a if a else Fraction(0) for a in out))

    def cup_matrix(self, j):
        """Matrix of cup multiplication by b_j: column i holds b_j cup b_i."""
        cols = [self.cup_basis(j, i).coords for i in range(self.size)]
        return tuple(
            tuple(cols[i][k] for i in range(self.size)) for k in range(self.size)
        )

    def pair(self, x: CohClass, y: CohClass):
        out = 0
        for i, xi in enumerate(x.coords):
            if not xi:
                continue
            for j, g in enumerate(self.pairing[i]):
                if g and y.coords[j]:
                    out = out + xi * y.coords[j] * g
        return out if out else Fraction(0)

    def dual_basis(self):
        """Classes a_0..a_s with <a_i, b_j> = delta_ij."""
        if self._dual is None:
            ginv = _invert_rational_matrix(self.pairing)
            self._dual = tuple(
                CohClass(tuple(ginv[i][j] for j in range(self.size)))
                for i in range(self.size)
            )
        return self._dual

    def coords_along_dual(self, x: CohClass):
        """Coefficients lambda_j in x = sum_j lambda_j a_j, i.e. <x, b_j>."""
        return tuple(self.pair(x, self.basis_class(j)) for j in range(self.size))

    # -- quantum structure ---------------------------------------------------

    def qprod_basis(self, i, j) -> dict:
        """Full product b_i o b_j as a dict {multidegree: CohClass}."""
        return self.quantum_table[(i, j)]

    def quantum_part(self, j, D):
        """Matrix of the q^D part of multiplication by b_j (None if absent)."""
        cols = []
        seen = False
        for i in range(self.size):
            cls = self.quantum_table[(j, i)].get(D)
            if cls is None:
                cols.append(None)
            else:
                cols.append(cls.coords)
                seen = True
        if not seen:
            return None
        zero = (Fraction(0),) * self.size
        cols = [c if c is not None else zero for c in cols]
        return tuple(
            tuple(cols[i][k] for i in range(self.size)) for k in range(self.size)
        )

    def quantum_degrees(self, j):
        """All multidegrees appearing in multiplication by b_j."""
        ds = set()
        for i in range(self.size):
            ds.update(self.quantum_table[(j, i)].keys())
        return sorted(ds, key=lambda d: (sum(d), d))

    # -- validation ----------------------------------------------------------

    def validate(self):
        """Return a list of human-readable problems (empty when consistent)."""
        problems = []
        s = self.size
        if len(set(self.labels)) != s:
            problems.append("basis labels are not distinct")
        if len(self.degrees) != s:
            problems.append("degree list length != basis size")
        if self.degrees[0] != 0:
            problems.append("b_0 must have degree 0")
        if sum(1 for d in self.degrees if d == 0) != 1:
            problems.append("the unit must be the only degree-0 basis element")
        for i in range(1, self.rank + 1):
            if self.degrees[i] != 2:
                problems.append("generator b_%d must have degree 2" % i)
        if self.degrees[self.top] != 2 * self.dim:
            problems.append("last basis element must have top degree 2*dim")
        if len(self.pairing) != s or any(len(r) != s for r in self.pairing):
            problems.append("pairing matrix is not (s+1)x(s+1)")
        else:
            for i in range(s):
                for j in range(s):
                    if self.pairing[i][j] != self.pairing[j][i]:
                        problems.append("pairing not symmetric at (%d,%d)" % (i, j))
                    if (
                        self.pairing[i][j]
                        and self.degrees[i] + self.degrees[j] != 2 * self.dim
                    ):
                        problems.append(
                            "pairing entry (%d,%d) violates the grading" % (i, j)
                        )
            try:
                _invert_rational_matrix(self.pairing)
            except ZeroDivisionError:
                problems.append("pairing matrix is singular")
        qdeg = self.qdegrees
        for i in range(s):
            for j in range(s):
                if (i, j) not in self.cup_table:
                    problems.append("cup table missing pair (%d,%d)" % (i, j))
                    continue
                if (i, j) not in self.quantum_table:
                    problems.append("quantum table missing pair (%d,%d)" % (i, j))
                    continue
                cup = self.cup_table[(i, j)]
                if cup != self.cup_table[(j, i)]:
                    problems.append("cup table not symmetric at (%d,%d)" % (i, j))
                deg = self.degrees[i] + self.degrees[j]
                for k, c in enumerate(cup.coords):
                    if c and self.degrees[k] != deg:
                        problems.append(
                            "cup product b_%d.b_%d has a component of wrong "
                            "degree (b_%d)" % (i, j, k)
                        )
                qp = self.quantum_table[(i, j)]
                if qp != self.quantum_table[(j, i)]:
                    problems.append(
                        "quantum product not commutative at (%d,%d)" % (i, j)
                    )
                q0 = qp.get((0,) * self.rank)
                q0_matches = (not cup) if q0 is None else (q0 == cup)
                if not q0_matches:
                    problems.append(
                        "q^0 part of b_%d o b_%d differs from the cup product"
                        % (i, j)
                    )
                for D, cls in qp.items():
                    if len(D) != self.rank or any(d < 0 for d in D):
                        problems.append(
                            "bad multidegree %r in product (%d,%d)" % (D, i, j)
                        )
                        continue
                    shift = sum(d * w for d, w in zip(D, qdeg))
                    for k, c in enumerate(cls.coords):
                        if c and self.degrees[k] + shift != deg:
                            problems.append(
                                "term q^%r b_%d in b_%d o b_%d violates the "
                                "grading" % (D, k, i, j)
                            )
        for j in range(s):
            if self.cup_table.get((0, j)) != self.basis_class(j):
                problems.append("b_0 does not act as the unit on b_%d" % j)
        return problems

    # -- serialization ---------------------------------------------------------

    def to_json(self):
        cup = []
        quantum = []
        for i in range(self.size):
            for j in range(i, self.size):
                for k, c in enumerate(self.cup_table[(i, j)].coords):
                    if c:
                        cup.append({"i": i, "j": j, "k": k, "c": int(c)})
                for D, cls in sorted(
                    self.quantum_table[(i, j)].items(), key=lambda kv: (sum(kv[0]), kv[0])
                ):
                    for k, c in enumerate(cls.coords):
                        if c:
                            quantum.append(
                                {
                                    "i": i,
                                    "j": j,
                                    "k": k,
                                    "D": list(D),
                                    "c": format_rational(c),
                                }
                            )
        return {
            "name": self.name,
            "dim": self.dim,
            "rank": self.rank,
            "basis": [
                {"label": lab, "degree": deg}
                for lab, deg in zip(self.labels, self.degrees)
            ],
            "pairing": [list(row) for row in self.pairing],
            "cup": cup,
            "quantum": quantum,
            "chern": list(self.chern),
            "aliases": dict(sorted(self.aliases.items())),
        }

    @classmethod
    def from_json(cls, data, check=True):
        problems = []
        for key in ("name", "dim", "rank", "basis", "pairing", "cup", "quantum", "chern"):
            if key not in data:
                problems.append("missing field %r" % key)
        if problems:
            raise ModelError(problems)
        labels = [b["label"] for b in data["basis"]]
        degrees = [b["degree"] for b in data["basis"]]
        size = len(labels)
        rank = int(data["rank"])
        cup_raw = {}
        for rec in data["cup"]:
            i, j, k = rec["i"], rec["j"], rec["k"]
            if not (0 <= i < size and 0 <= j < size and 0 <= k < size):
                raise ModelError("cup record %r out of range" % (rec,))
            cup_raw.setdefault((i, j), {})[k] = rational(rec["c"])
        quantum_raw = {}
        for rec in data["quantum"]:
            i, j, k = rec["i"], rec["j"], rec["k"]
            if not (0 <= i < size and 0 <= j < size and 0 <= k < size):
                raise ModelError("quantum record %r out of range" % (rec,))
            D = tuple(int(x) for x in rec["D"])
            if len(D) != rank:
                raise ModelError("quantum record %r has wrong rank" % (rec,))
            quantum_raw.setdefault((i, j), {}).setdefault(D, {})[k] = rational(rec["c"])

        def densify(table, inner=False):
            out = {}
            for key, val in table.items():
                if inner:
                    out[key] = {
                        D: CohClass(
                            tuple(coords.get(k, Fraction(0)) for k in range(size))
                        )
                        for D, coords in val.items()
                    }
                else:
                    out[key] = CohClass(
                        tuple(val.get(k, Fraction(0)) for k in range(size))
                    )
            return out

        cup = densify(cup_raw)
        quantum = densify(quantum_raw, inner=True)
        zero_cls = CohClass((Fraction(0),) * size)
        for i in range(size):
            for j in range(size):
                key, mirror = (i, j), (j, i)
                if key not in cup:
                    cup[key] = cup.get(mirror, zero_cls)
                if key not in quantum:
                    quantum[key] = dict(quantum.get(mirror, {}))
        model = cls(
            name=data["name"],
            dim=data["dim"],
            rank=rank,
            labels=labels,
            degrees=degrees,
            pairing=data["pairing"],
            cup=cup,
            quantum=quantum,
            chern=data["chern"],
            aliases=data.get("aliases", {}),
        )
        if check:
            problems = model.validate()
            if problems:
                raise ModelError(problems)
        return model

    def __repr__(self):
        return "<ModelSpec %s: dim %d, rank %d, basis %d>" % (
            self.name,
            self.dim,
            self.rank,
            self.size,
        )


def _invert_rational_matrix(m):
    """Exact inverse by Gauss-Jordan elimination; raises ZeroDivisionError
    when singular."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def invert_unit(model: ModelSpec, x: CohClass) -> CohClass:
    """Invert a class of the form (monomial in h) * 1 + nilpotent, e.g. the
    factors a + m*h appearing in hypergeometric denominators.

    The inverse is exact: the geometric series terminates because positive
    degree classes are nilpotent of depth <= dim.
    """
    x = x.lifted()
    scalar = x.coords[0]
    if not isinstance(scalar, HLaurent) or not scalar.is_monomial():
        raise ValueError(
            "class is not invertible: unit component %r is not a monomial in h"
            % (scalar,)
        )
    u = scalar.monomial_inverse()
    y = x.scaled(u)
    one = model.unit().lifted()
    n = y - one
    if n.coords[0]:
        raise ValueError("unit component did not normalize; class %r" % (x,))
    out = one
    power = one
    for _ in range(model.dim):
        power = model.cup(power, n).scaled(HLaurent.const(-1))
        if not power:
            break
        out = out + power
    return out.scaled(u)


# -- builtin models -------------------------------------------------------


def _dense(size, sparse):
    coords = [Fraction(0)] * size
    for k, v in sparse.items():
        coords[k] = Fraction(v)
    return CohClass(coords)


def _symmetric_tables(size, rank, cup_sparse, quantum_sparse):
    """Expand upper-triangular sparse {(i,j): ...} data to full tables."""
    zero = (0,) * rank
    cup = {}
    quantum = {}
    for i in range(size):
        for j in range(size):
            key = (i, j) if (i, j) in cup_sparse else (j, i)
            cup[(i, j)] = _dense(size, cup_sparse.get(key, {}))
    for i in range(size):
        for j in range(size):
            key = (i, j) if (i, j) in quantum_sparse else (j, i)
            terms = {
                tuple(D): _dense(size, cls)
                for D, cls in quantum_sparse.get(key, {}).items()
            }
            quantum[(i, j)] = terms
    return cup, quantum


def _apply_generator_chain(model_quantum, size, j, elem):
    """Multiply {D: CohClass} data by the generator b_j using the stored
    generator columns; exact, no truncation."""
    out = {}
    for D, cls in elem.items():
        for i, xi in enumerate(cls.coords):
            if not xi:
                continue
            for D2, add in model_quantum[(j, i)].items():
                nd = tuple(a + b for a, b in zip(D, D2))
                cur = out.get(nd)
                add = add.scaled(xi)
                out[nd] = add if cur is None else cur + add
    return {D: c for D, c in out.items() if c}


def _complete_from_lifts(size, rank, quantum, lifts):
    """Fill in products b_k o b_i for k > rank from quantum polynomial lifts.

    A lift is a list of (coeff, D, E) terms meaning coeff * q^D * b^oE, with
    E an exponent vector over the generators; the products of generators with
    everything must already be present in `quantum`.
    """
    zero_d = (0,) * rank
    for k in sorted(lifts):
        terms = lifts[k]
        for i in range(size):
            acc = {}
            for coeff, D, E in terms:
                elem = {zero_d: _dense(size, {i: 1})}
                for gen, exp in enumerate(E, start=1):
                    for _ in range(exp):
                        elem = _apply_generator_chain(quantum, size, gen, elem)
                for De, cls in elem.items():
                    nd = tuple(a + b for a, b in zip(D, De))
                    add = cls.scaled(Fraction(coeff))
                    cur = acc.get(nd)
                    acc[nd] = add if cur is None else cur + add
            acc = {D: c for D, c in acc.items() if c}
            prev = quantum.get((k, i))
            if prev is not None and prev != acc:
                raise ModelError(
                    "lift for b_%d is inconsistent with the stored product "
                    "(%d,%d)" % (k, k, i)
                )
            quantum[(k, i)] = acc
            quantum[(i, k)] = dict(acc)
    return quantum


def _model_cp(m: int) -> ModelSpec:
    size = m + 1
    labels = ["1"] + ["x" if k == 1 else "x^%d" % k for k in range(1, size)]
    degrees = [2 * k for k in range(size)]
    pairing = [[1 if i + j == m else 0 for j in range(size)] for i in range(size)]
    cup_sparse = {}
    quantum_sparse = {}
    for i in range(size):
        for j in range(i, size):
            if i + j <= m:
                cup_sparse[(i, j)] = {i + j: 1}
                quantum_sparse[(i, j)] = {(0,): {i + j: 1}}
            else:
                cup_sparse[(i, j)] = {}
                # x^{m+1} = q, so overflow products pick up one factor of q
                quantum_sparse[(i, j)] = {(1,): {i + j - m - 1: 1}}
    cup, quantum = _symmetric_tables(size, 1, cup_sparse, quantum_sparse)
    return ModelSpec(
        name="cp%d" % m,
        dim=m,
        rank=1,
        labels=labels,
        degrees=degrees,
        pairing=pairing,
        cup=cup,
        quantum=quantum,
        chern=[m + 1],
    )


def _model_f3() -> ModelSpec:
    # basis 1, a, b, a^2, b^2, z with z = a^2 b = a b^2;
    # classical relations a b = a^2 + b^2, a^3 = b^3 = 0
    size = 6
    labels = ["1", "a", "b", "a^2", "b^2", "z"]
    degrees = [0, 2, 2, 4, 4, 6]
    pairing = [
        [0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 1, 0],
        [0, 0, 0, 1, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [0, 1, 0, 0, 0, 0],
        [1, 0, 0, 0, 0, 0],
    ]
    cup_sparse = {
        (0, 0): {0: 1}, (0, 1): {1: 1}, (0, 2): {2: 1}, (0, 3): {3: 1},
        (0, 4): {4: 1}, (0, 5): {5: 1},
        (1, 1): {3: 1},
        (1, 2): {3: 1, 4: 1},
        (1, 3): {},
        (1, 4): {5: 1},
        (1, 5): {},
        (2, 2): {4: 1},
        (2, 3): {5: 1},
        (2, 4): {},
        (2, 5): {},
        (3, 3): {}, (3, 4): {}, (3, 5): {}, (4, 4): {}, (4, 5): {}, (5, 5): {},
    }
    # generator columns of the quantum product
    quantum_sparse = {
        (0, 0): {(0, 0): {0: 1}},
        (0, 1): {(0, 0): {1: 1}},
        (0, 2): {(0, 0): {2: 1}},
        (0, 3): {(0, 0): {3: 1}},
        (0, 4): {(0, 0): {4: 1}},
        (0, 5): {(0, 0): {5: 1}},
        (1, 1): {(0, 0): {3: 1}, (1, 0): {0: 1}},
        (1, 2): {(0, 0): {3: 1, 4: 1}},
        (1, 3): {(1, 0): {2: 1}},
        (1, 4): {(0, 0): {5: 1}},
        (1, 5): {(1, 1): {0: 1}, (1, 0): {4: 1}},
        (2, 2): {(0, 0): {4: 1}, (0, 1): {0: 1}},
        (2, 3): {(0, 0): {5: 1}},
        (2, 4): {(0, 1): {1: 1}},
        (2, 5): {(1, 1): {0: 1}, (0, 1): {3: 1}},
    }
    cup, quantum = _symmetric_tables(size, 2, cup_sparse, quantum_sparse)
    for key in list(quantum):
        # pairs of non-generators are not primitive data
        if key[0] > 2 and key[1] > 2:
            del quantum[key]
    # remaining products via quantum polynomial lifts of the basis:
    # a^2 = a o a - q1, b^2 = b o b - q2, z = a o a o b - q1 b
    lifts = {
        3: [(1, (0, 0), (2, 0)), (-1, (1, 0), (0, 0))],
        4: [(1, (0, 0), (0, 2)), (-1, (0, 1), (0, 0))],
        5: [(1, (0, 0), (2, 1)), (-1, (1, 0), (0, 1))],
    }
    quantum = _complete_from_lifts(size, 2, quantum, lifts)
    return ModelSpec(
        name="f3",
        dim=3,
        rank=2,
        labels=labels,
        degrees=degrees,
        pairing=pairing,
        cup=cup,
        quantum=quantum,
        chern=[2, 2],
    )


def _model_sigma1() -> ModelSpec:
    # basis 1, x1, x4, z with z = x1 x4; classically x1^2 = 0, x4^2 = x1 x4
    size = 4
    labels = ["1", "x1", "x4", "z"]
    degrees = [0, 2, 2, 4]
    pairing = [
        [0, 0, 0, 1],
        [0, 0, 1, 0],
        [0, 1, 1, 0],
        [1, 0, 0, 0],
    ]
    cup_sparse = {
        (0, 0): {0: 1}, (0, 1): {1: 1}, (0, 2): {2: 1}, (0, 3): {3: 1},
        (1, 1): {},
        (1, 2): {3: 1},
        (1, 3): {},
        (2, 2): {3: 1},
        (2, 3): {},
        (3, 3): {},
    }
    quantum_sparse = {
        (0, 0): {(0, 0): {0: 1}},
        (0, 1): {(0, 0): {1: 1}},
        (0, 2): {(0, 0): {2: 1}},
        (0, 3): {(0, 0): {3: 1}},
        (1, 1): {(1, 0): {1: -1, 2: 1}},
        (1, 2): {(0, 0): {3: 1}},
        (1, 3): {(1, 1): {0: 1}},
        (2, 2): {(0, 0): {3: 1}, (0, 1): {0: 1}},
        (2, 3): {(1, 1): {0: 1}, (0, 1): {1: 1}},
    }
    cup, quantum = _symmetric_tables(size, 2, cup_sparse, quantum_sparse)
    for key in list(quantum):
        if key[0] > 2 and key[1] > 2:
            del quantum[key]
    lifts = {3: [(1, (0, 0), (1, 1))]}
    quantum = _complete_from_lifts(size, 2, quantum, lifts)
    return ModelSpec(
        name="sigma1",
        dim=2,
        rank=2,
        labels=labels,
        degrees=degrees,
        pairing=pairing,
        cup=cup,
        quantum=quantum,
        chern=[1, 2],
        aliases={"q1": "r1", "q2": "r2"},
    )


def _model_gr24() -> ModelSpec:
    # Schubert basis 1, a, b, c, d, z: a the hyperplane class, b + c = a^2,
    # d = ab = ac, z the point class; bc = 0 classically and b o c = q
    size = 6
    labels = ["1", "a", "b", "c", "d", "z"]
    degrees = [0, 2, 4, 4, 6, 8]
    pairing = [
        [0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 1, 0],
        [0, 0, 1, 0, 0, 0],
        [0, 0, 0, 1, 0, 0],
        [0, 1, 0, 0, 0, 0],
        [1, 0, 0, 0, 0, 0],
    ]
    cup_sparse = {
        (0, 0): {0: 1}, (0, 1): {1: 1}, (0, 2): {2: 1}, (0, 3): {3: 1},
        (0, 4): {4: 1}, (0, 5): {5: 1},
        (1, 1): {2: 1, 3: 1},
        (1, 2): {4: 1},
        (1, 3): {4: 1},
        (1, 4): {5: 1},
        (1, 5): {},
        (2, 2): {5: 1},
        (2, 3): {},
        (2, 4): {},
        (2, 5): {},
        (3, 3): {5: 1},
        (3, 4): {},
        (3, 5): {},
        (4, 4): {},
        (4, 5): {},
        (5, 5): {},
    }
    # the six primitive products determine the rest by associativity;
    # the derived entries below follow from them
    quantum_sparse = {
        (0, 0): {(0,): {0: 1}},
        (0, 1): {(0,): {1: 1}},
        (0, 2): {(0,): {2: 1}},
        (0, 3): {(0,): {3: 1}},
        (0, 4): {(0,): {4: 1}},
        (0, 5): {(0,): {5: 1}},
        (1, 1): {(0,): {2: 1, 3: 1}},
        (1, 2): {(0,): {4: 1}},
        (1, 3): {(0,): {4: 1}},
        (1, 4): {(0,): {5: 1}, (1,): {0: 1}},
        (1, 5): {(1,): {1: 1}},
        (2, 2): {(0,): {5: 1}},
        (2, 3): {(1,): {0: 1}},
        (2, 4): {(1,): {1: 1}},
        (2, 5): {(1,): {3: 1}},
        (3, 3): {(0,): {5: 1}},
        (3, 4): {(1,): {1: 1}},
        (3, 5): {(1,): {2: 1}},
        (4, 4): {(1,): {2: 1, 3: 1}},
        (4, 5): {(1,): {4: 1}},
        (5, 5): {(2,): {0: 1}},
    }
    cup, quantum = _symmetric_tables(size, 1, cup_sparse, quantum_sparse)
    return ModelSpec(
        name="gr24",
        dim=4,
        rank=1,
        labels=labels,
        degrees=degrees,
        pairing=pairing,
        cup=cup,
        quantum=quantum,
        chern=[4],
        aliases={"q1": "q"},
    )


_CP_RE = re.compile(r"^cp\(?(\d+)\)?$")

BUILTIN_NAMES = ("cp1", "cp2", "cp3", "cp4", "cp5", "f3", "sigma1", "gr24")


def builtin_model(name: str) -> ModelSpec:
    """Construct a built-in model; cp accepts any positive dimension."""
    name = name.strip().lower()
    m = _CP_RE.match(name)
    if m:
        dim = int(m.group(1))
        if dim < 1:
            raise ModelError("projective space needs dimension >= 1")
        model = _model_cp(dim)
    elif name == "f3":
        model = _model_f3()
    elif name == "sigma1":
        model = _model_sigma1()
    elif name == "gr24":
        model = _model_gr24()
    else:
        raise ModelError("unknown model %r" % name)
    problems = model.validate()
    if problems:
        raise ModelError(["builtin %s failed validation" % name] + problems)
    return model


def load_model(path) -> ModelSpec:
    """Load and validate a .model JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelError("not valid JSON: %s" % exc) from exc
    return ModelSpec.from_json(data)


def save_model(model: ModelSpec, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_json(), fh, indent=1, sort_keys=True)
        fh.write("\n")


def resolve_model(name: str, search_path=None) -> ModelSpec:
    """Find a model by builtin name, file path, or NAME.model on the search
    path (a list of directories, e.g. from QCOH_MODEL_PATH)."""
    import os

    if os.path.exists(name):
        return load_model(name)
    try:
        return builtin_model(name)
    except ModelError:
        pass
    for d in search_path or ():
        cand = os.path.join(d, name + ".model")
        if os.path.exists(cand):
            return load_model(cand)
    raise ModelError("no model named %r (not builtin, not on the search path)" % name)
