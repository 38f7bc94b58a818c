"""Cohomology-valued Novikov series and the gauge form of flat sections.

A CohSeries stores, per Novikov multidegree D, a cohomology class with
HLaurent coordinates, truncated at a total degree.  A GaugeSeries is the
same data read as the section e^{t/h} * sum_D c_D q^D; in that reading the
operator theta_i = h d/dt_i acts on the q^D term as cup multiplication by
b_i plus the scalar d_i*h, and q_i shifts D.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import H_ONE, HLaurent
from .model import CohClass, ModelSpec


def _lift(cls: CohClass) -> CohClass:
    return cls.lifted()


class CohSeries:
    """Map {multidegree: CohClass over HLaurent}, truncated at total degree
    `order`; treated as immutable."""

    __slots__ = ("model", "order", "c")

    def __init__(self, model: ModelSpec, order: int, terms=None):
        self.model = model
        self.order = order
        c = {}
        if terms:
            for D, cls in terms.items():
                D = tuple(int(x) for x in D)
                if len(D) != model.rank or any(x < 0 for x in D):
                    raise ValueError("bad multidegree %r" % (D,))
                if sum(D) > order:
                    continue
                cls = _lift(cls)
                if cls:
                    c[D] = cls
        self.c = c

    def _new(self, terms):
        out = self.__class__(self.model, self.order)
        out.c = terms
        return out

    @classmethod
    def unit(cls, model, order):
        zero = (0,) * model.rank
        return cls(model, order, {zero: model.unit()})

    def coeff(self, D) -> CohClass:
        D = tuple(D)
        got = self.c.get(D)
        if got is None:
            return self.model.zero_class().lifted()
        return got

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if not isinstance(other, CohSeries):
            return NotImplemented
        return self.order == other.order and self.c == other.c

    def __neg__(self):
        return self._new({D: -cls for D, cls in self.c.items()})

    def __add__(self, other):
        if not isinstance(other, CohSeries):
            return NotImplemented
        if self.order != other.order:
            raise ValueError("order mismatch")
        c = dict(self.c)
        for D, cls in other.c.items():
            s = c[D] + cls if D in c else cls
            if s:
                c[D] = s
            else:
                c.pop(D, None)
        return self._new(c)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, x):
        """Scale every coefficient by a Fraction/int/HLaurent scalar."""
        if isinstance(x, (int, Fraction)):
            x = HLaurent.const(x)
        c = {}
        for D, cls in self.c.items():
            s = cls.scaled(x)
            if s:
                c[D] = s
        return self._new(c)

    def __mul__(self, x):
        return self.scaled(x)

    __rmul__ = __mul__

    def shifted(self, shift):
        """Multiply by the Novikov monomial q^shift (drops overflow)."""
        shift = tuple(shift)
        c = {}
        for D, cls in self.c.items():
            nd = tuple(a + b for a, b in zip(D, shift))
            if sum(nd) <= self.order:
                c[nd] = cls
        return self._new(c)

    def mul_scalar_series(self, ns):
        """Multiply by a scalar Novikov series (Fraction or HLaurent coeffs)."""
        out = self._new({})
        for D, v in ns.c.items():
            out = out + self.shifted(D).scaled(v)
        return out

    def items_sorted(self):
        return sorted(self.c.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def describe(self):
        if not self.c:
            return "0"
        labels = self.model.labels
        parts = []
        for D, cls in self.items_sorted():
            mono = "*".join(
                "q%d" % (i + 1) if e == 1 else "q%d^%d" % (i + 1, e)
                for i, e in enumerate(D)
                if e
            )
            body = cls.describe(labels)
            if mono:
                parts.append("(%s)*%s" % (body, mono))
            else:
                parts.append("(%s)" % body)
        return " + ".join(parts)

    def to_json(self):
        labels = self.model.labels
        out = []
        for D, cls in self.items_sorted():
            coeffs = {}
            for k, v in enumerate(cls.coords):
                if v:
                    coeffs[labels[k]] = v.to_json()
            out.append({"degree": list(D), "coeffs": coeffs})
        return out

    def __repr__(self):
        return "<%s %s: %d terms, order %d>" % (
            type(self).__name__,
            self.model.name,
            len(self.c),
            self.order,
        )


class GaugeSeries(CohSeries):
    """CohSeries read as e^{t/h} * sum c_D q^D, with the induced action of
    theta_i = h d/dt_i."""

    __slots__ = ()

    def theta(self, i: int) -> "GaugeSeries":
        """Apply theta_i: on the q^D coefficient this is cup-by-b_i plus
        multiplication by d_i*h."""
        model = self.model
        gen = model.basis_class(i)
        c = {}
        for D, cls in self.c.items():
            out = model.cup(gen, cls)
            d = D[i - 1]
            if d:
                out = out + cls.scaled(HLaurent.term(d, 1))
            if out:
                c[D] = out
        return self._new(c)

    def theta_monomial(self, exps) -> "GaugeSeries":
        out = self
        for i, e in enumerate(exps, start=1):
            for _ in range(e):
                out = out.theta(i)
        return out

    def scalar_component(self, j: int):
        """The coefficient along the dual class a_j, per multidegree."""
        model = self.model
        bj = model.basis_class(j)
        out = {}
        for D, cls in self.c.items():
            v = model.pair(cls, bj)
            if v:
                out[D] = v if isinstance(v, HLaurent) else HLaurent.const(v)
        return out
