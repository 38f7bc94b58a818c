"""Noncommutative differential operators in (h, q_i, theta_i) with
theta_i = h q_i d/dq_i, a parser for operator and relation expressions,
application of operators to flat-section data in three representations,
and the symbol map from operators to quantum-ring elements.

Normal form: every term is coeff * h^k * q^D * theta^E with the q-part on
the left, obtained by the rewrite theta_i q_j = q_j (theta_i + delta_ij h).
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import product
from math import comb

from .algebra import H, HLaurent, TPoly, format_rational, rational
from .model import ModelSpec
from .quantum import QElem, quantum_monomial
from .series import GaugeSeries


class ParseError(ValueError):
    def __init__(self, message, pos=None):
        if pos is not None:
            message = "%s (at position %d)" % (message, pos)
        super().__init__(message)
        self.pos = pos


def _vec_check(rank, v, what):
    v = tuple(int(x) for x in v)
    if len(v) != rank or any(x < 0 for x in v):
        raise ValueError("bad %s %r" % (what, v))
    return v


class QDEOperator:
    """Finite sum of normal-ordered terms (h-exponent, q-multidegree,
    theta-exponent) -> coefficient."""

    __slots__ = ("rank", "c")

    def __init__(self, rank: int, terms=None):
        self.rank = rank
        c = {}
        if terms:
            for (hexp, qdeg, thexp), v in terms.items():
                hexp = int(hexp)
                if hexp < 0:
                    raise ValueError("negative h exponent")
                key = (hexp, _vec_check(rank, qdeg, "q-degree"),
                       _vec_check(rank, thexp, "theta exponent"))
                v = rational(v) if not isinstance(v, Fraction) else v
                s = c.get(key, Fraction(0)) + v
                if s:
                    c[key] = s
                else:
                    c.pop(key, None)
        self.c = c

    @classmethod
    def const(cls, rank, v):
        return cls(rank, {(0, (0,) * rank, (0,) * rank): rational(v)})

    @classmethod
    def gen_h(cls, rank):
        return cls(rank, {(1, (0,) * rank, (0,) * rank): Fraction(1)})

    @classmethod
    def gen_q(cls, rank, i):
        d = [0] * rank
        d[i - 1] = 1
        return cls(rank, {(0, tuple(d), (0,) * rank): Fraction(1)})

    @classmethod
    def gen_theta(cls, rank, i):
        e = [0] * rank
        e[i - 1] = 1
        return cls(rank, {(0, (0,) * rank, tuple(e)): Fraction(1)})

    def _new(self, terms):
        out = QDEOperator(self.rank)
        out.c = terms
        return out

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if not isinstance(other, QDEOperator):
            return NotImplemented
        return self.rank == other.rank and self.c == other.c

    def __neg__(self):
        return self._new({k: -v for k, v in self.c.items()})

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QDEOperator.const(self.rank, other)
        if not isinstance(other, QDEOperator):
            return NotImplemented
        if self.rank != other.rank:
            raise ValueError("rank mismatch")
        c = dict(self.c)
        for k, v in other.c.items():
            s = c.get(k, Fraction(0)) + v
            if s:
                c[k] = s
            else:
                c.pop(k, None)
        return self._new(c)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QDEOperator.const(self.rank, other)
        if not isinstance(other, QDEOperator):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            v = rational(other)
            return self._new({k: c * v for k, c in self.c.items()}) if v else self._new({})
        if not isinstance(other, QDEOperator):
            return NotImplemented
        if self.rank != other.rank:
            raise ValueError("rank mismatch")
        out = {}
        for (h1, q1, e1), v1 in self.c.items():
            for (h2, q2, e2), v2 in other.c.items():
                # commute theta^{e1} past q^{q2}:
                # theta_i^e q_i^d = q_i^d (theta_i + d h)^e
                options = []
                for i in range(self.rank):
                    e, d = e1[i], q2[i]
                    if e == 0 or d == 0:
                        options.append(((e, 0, 1),))
                    else:
                        options.append(
                            tuple(
                                (k, e - k, comb(e, k) * d ** (e - k))
                                for k in range(e, -1, -1)
                            )
                        )
                qdeg = tuple(a + b for a, b in zip(q1, q2))
                for choice in product(*options):
                    hshift = sum(ch[1] for ch in choice)
                    mult = 1
                    for ch in choice:
                        mult *= ch[2]
                    key = (
                        h1 + h2 + hshift,
                        qdeg,
                        tuple(ch[0] + b for ch, b in zip(choice, e2)),
                    )
                    s = out.get(key, Fraction(0)) + v1 * v2 * mult
                    if s:
                        out[key] = s
                    else:
                        out.pop(key, None)
        return self._new(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative operator powers are not defined")
        out = QDEOperator.const(self.rank, 1)
        for _ in range(n):
            out = out * self
        return out

    def theta_degree(self):
        return max((sum(e) for (_, _, e) in self.c), default=0)

    def q_free_part(self):
        zero = (0,) * self.rank
        return self._new({k: v for k, v in self.c.items() if k[1] == zero})

    def theta_part(self):
        """Drop every term carrying an h or q factor."""
        zero = (0,) * self.rank
        return self._new(
            {k: v for k, v in self.c.items() if k[0] == 0 and k[1] == zero}
        )

    def items_sorted(self):
        return sorted(
            self.c.items(),
            key=lambda kv: (
                -sum(kv[0][2]),
                kv[0][2],
                sum(kv[0][1]),
                kv[0][1],
                kv[0][0],
            ),
        )

    def __str__(self):
        if not self.c:
            return "0"
        parts = []
        for (hexp, qdeg, thexp), v in self.items_sorted():
            factors = []
            if hexp:
                factors.append("h" if hexp == 1 else "h^%d" % hexp)
            for i, d in enumerate(qdeg):
                if d:
                    factors.append("q%d" % (i + 1) if d == 1 else "q%d^%d" % (i + 1, d))
            for i, e in enumerate(thexp):
                if e:
                    factors.append("D%d" % (i + 1) if e == 1 else "D%d^%d" % (i + 1, e))
            body = "*".join(factors)
            if v == 1 and body:
                term = body
            elif v == -1 and body:
                term = "-" + body
            else:
                sv = format_rational(v)
                term = "%s*%s" % (sv, body) if body else sv
            if not parts:
                parts.append(term)
            elif term.startswith("-"):
                parts.append("- " + term[1:])
            else:
                parts.append("+ " + term)
        return " ".join(parts)

    __repr__ = __str__


def normalize(op: QDEOperator) -> QDEOperator:
    """Rebuild the term dictionary; the result is always in normal form.
    Construction and multiplication already normalize, so this is a
    verification hook: the output equals the input."""
    return QDEOperator(op.rank, op.c)


class RelPoly:
    """Commutative polynomial in q_1..q_r and generator symbols b_1..b_r,
    used for quantum-ring relations."""

    __slots__ = ("rank", "terms")

    def __init__(self, rank, terms=None):
        self.rank = rank
        t = {}
        if terms:
            for (qdeg, bexp), v in terms.items():
                key = (_vec_check(rank, qdeg, "q-degree"),
                       _vec_check(rank, bexp, "generator exponent"))
                v = rational(v) if not isinstance(v, Fraction) else v
                s = t.get(key, Fraction(0)) + v
                if s:
                    t[key] = s
                else:
                    t.pop(key, None)
        self.terms = t

    @classmethod
    def const(cls, rank, v):
        return cls(rank, {((0,) * rank, (0,) * rank): rational(v)})

    @classmethod
    def gen_q(cls, rank, i):
        d = [0] * rank
        d[i - 1] = 1
        return cls(rank, {(tuple(d), (0,) * rank): Fraction(1)})

    @classmethod
    def gen_b(cls, rank, i):
        e = [0] * rank
        e[i - 1] = 1
        return cls(rank, {((0,) * rank, tuple(e)): Fraction(1)})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, RelPoly):
            return NotImplemented
        return self.rank == other.rank and self.terms == other.terms

    def __neg__(self):
        out = RelPoly(self.rank)
        out.terms = {k: -v for k, v in self.terms.items()}
        return out

    def __add__(self, other):
        if not isinstance(other, RelPoly):
            return NotImplemented
        t = dict(self.terms)
        for k, v in other.terms.items():
            s = t.get(k, Fraction(0)) + v
            if s:
                t[k] = s
            else:
                t.pop(k, None)
        out = RelPoly(self.rank)
        out.terms = t
        return out

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, RelPoly):
            return NotImplemented
        t = {}
        for (q1, b1), v1 in self.terms.items():
            for (q2, b2), v2 in other.terms.items():
                key = (
                    tuple(a + b for a, b in zip(q1, q2)),
                    tuple(a + b for a, b in zip(b1, b2)),
                )
                s = t.get(key, Fraction(0)) + v1 * v2
                if s:
                    t[key] = s
                else:
                    t.pop(key, None)
        out = RelPoly(self.rank)
        out.terms = t
        return out

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not defined")
        out = RelPoly.const(self.rank, 1)
        for _ in range(n):
            out = out * self
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (qdeg, bexp), v in sorted(
            self.terms.items(),
            key=lambda kv: (-sum(kv[0][1]), kv[0][1], sum(kv[0][0]), kv[0][0]),
        ):
            factors = []
            for i, d in enumerate(qdeg):
                if d:
                    factors.append("q%d" % (i + 1) if d == 1 else "q%d^%d" % (i + 1, d))
            for i, e in enumerate(bexp):
                if e:
                    factors.append("b%d" % (i + 1) if e == 1 else "b%d^%d" % (i + 1, e))
            body = "*".join(factors)
            if v == 1 and body:
                term = body
            elif v == -1 and body:
                term = "-" + body
            else:
                sv = format_rational(v)
                term = "%s*%s" % (sv, body) if body else sv
            if not parts:
                parts.append(term)
            elif term.startswith("-"):
                parts.append("- " + term[1:])
            else:
                parts.append("+ " + term)
        return " ".join(parts)

    __repr__ = __str__


# -- parsing -------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<op>[-+*/^()])|(?P<ws>\s+)|(?P<bad>.)"
)

_NAME_RE = re.compile(r"^(h|[qDb][1-9][0-9]*)$")


def _tokenize(text):
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        if kind == "ws":
            continue
        if kind == "bad":
            raise ParseError("unexpected character %r" % m.group(), m.start())
        tokens.append((kind, m.group(), m.start()))
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser over +, -, *, ^, parentheses; exponents are
    nonnegative integer literals; multiplication is always explicit."""

    def __init__(self, text, algebra):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.algebra = algebra

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, symbol):
        kind, val, pos = self.peek()
        if kind != "op" or val != symbol:
            raise ParseError("expected %r" % symbol, pos)
        return self.take()

    def parse(self):
        out = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError("unexpected %r" % val, pos)
        return out

    def expr(self):
        kind, val, _ = self.peek()
        negate = False
        if kind == "op" and val in "+-":
            self.take()
            negate = val == "-"
        out = self.term()
        if negate:
            out = -out
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                nxt = self.term()
                out = out - nxt if val == "-" else out + nxt
            else:
                return out

    def term(self):
        out = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                out = out * self.factor()
            else:
                return out

    def factor(self):
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, pos = self.peek()
            if kind != "int":
                raise ParseError("exponent must be a nonnegative integer literal", pos)
            self.take()
            return base ** int(val)
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "int":
            num = int(val)
            kind2, val2, _ = self.peek()
            if kind2 == "op" and val2 == "/":
                self.take()
                kind3, val3, pos3 = self.peek()
                if kind3 != "int":
                    raise ParseError("denominator must be an integer literal", pos3)
                self.take()
                if int(val3) == 0:
                    raise ParseError("zero denominator", pos3)
                return self.algebra.const(Fraction(num, int(val3)))
            return self.algebra.const(Fraction(num))
        if kind == "name":
            if not _NAME_RE.match(val):
                raise ParseError("unknown symbol %r" % val, pos)
            return self.algebra.symbol(val, pos)
        if kind == "op" and val == "(":
            out = self.expr()
            self.expect_op(")")
            return out
        if kind == "op" and val == "-":
            return -self.atom()
        raise ParseError("unexpected %r" % (val or "end of input"), pos)


class _OperatorAlgebra:
    def __init__(self, rank):
        self.rank = rank

    def const(self, v):
        return QDEOperator.const(self.rank, v)

    def symbol(self, name, pos):
        if name == "h":
            return QDEOperator.gen_h(self.rank)
        idx = int(name[1:])
        if idx > self.rank:
            raise ParseError("index %d exceeds rank %d" % (idx, self.rank), pos)
        if name[0] == "q":
            return QDEOperator.gen_q(self.rank, idx)
        if name[0] == "D":
            return QDEOperator.gen_theta(self.rank, idx)
        raise ParseError(
            "basis symbol %r is not valid in a differential operator" % name, pos
        )


class _RelationAlgebra:
    def __init__(self, rank):
        self.rank = rank

    def const(self, v):
        return RelPoly.const(self.rank, v)

    def symbol(self, name, pos):
        if name == "h" or name[0] == "D":
            raise ParseError(
                "symbol %r is not valid in a ring relation" % name, pos
            )
        idx = int(name[1:])
        if idx > self.rank:
            raise ParseError("index %d exceeds rank %d" % (idx, self.rank), pos)
        if name[0] == "q":
            return RelPoly.gen_q(self.rank, idx)
        return RelPoly.gen_b(self.rank, idx)


def parse_operator(src: str, rank: int) -> QDEOperator:
    return _Parser(src, _OperatorAlgebra(rank)).parse()


def parse_relation(src: str, rank: int) -> RelPoly:
    return _Parser(src, _RelationAlgebra(rank)).parse()


# -- expression files ----------------------------------------------------


def read_expression_lines(path, subs=None):
    """Expression-per-line text files; '#' starts a comment, blanks skipped.
    `subs` maps placeholder names to replacement text."""
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if subs:
                for key, val in subs.items():
                    line = line.replace(key, val)
            out.append(line)
    return out


def load_operators(path, rank, subs=None):
    return [parse_operator(line, rank) for line in read_expression_lines(path, subs)]


def load_relations(path, rank, subs=None):
    return [parse_relation(line, rank) for line in read_expression_lines(path, subs)]


def load_rowspec(path, rank, subs=None):
    ops = load_operators(path, rank, subs)
    if not ops or ops[-1] != QDEOperator.const(rank, 1):
        raise ValueError("rowspec file must end with the identity row '1'")
    return ops


# -- application ---------------------------------------------------------


def apply_gauge(op: QDEOperator, s: GaugeSeries) -> GaugeSeries:
    """Apply a normal-ordered operator to a gauge-normalized section: the
    theta-part acts termwise as cup-by-generator plus degree-weighted h,
    the q-part shifts the Novikov degree, h scales the coefficients."""
    if op.rank != s.model.rank:
        raise ValueError("rank mismatch")
    out = GaugeSeries(s.model, s.order, {})
    for (hexp, qdeg, thexp), v in op.c.items():
        part = s.theta_monomial(thexp)
        if any(qdeg):
            part = part.shifted(qdeg)
        part = part.scaled(HLaurent.term(v, hexp))
        out = out + part
    return out


def _theta_t(tp: TPoly, i: int) -> TPoly:
    return tp.derivative(i).map_coeffs(lambda v: v.scaled(H))


def apply_classical(op: QDEOperator, tp: TPoly, model: ModelSpec) -> TPoly:
    """Apply a q-free operator to a t-polynomial of cohomology classes with
    theta_i = h d/dt_i (exact polynomial differentiation)."""
    zero = (0,) * op.rank
    if any(k[1] != zero for k in op.c):
        raise ValueError("operator has Novikov terms; take the q-free part first")
    out = TPoly(tp.nvars)
    for (hexp, _, thexp), v in op.c.items():
        part = tp
        for i, e in enumerate(thexp, start=1):
            for _ in range(e):
                part = _theta_t(part, i)
        scale = HLaurent.term(v, hexp)
        part = part.map_coeffs(lambda cls: cls.scaled(scale))
        out = out + part
    return out


def apply_constq(op: QDEOperator, tp: TPoly, model: ModelSpec) -> TPoly:
    """Apply an operator to a t-polynomial of Novikov-series coefficients,
    with q_i a constant scalar (no t-coupling) and theta_i = h d/dt_i."""
    out = TPoly(tp.nvars)
    for (hexp, qdeg, thexp), v in op.c.items():
        part = tp
        for i, e in enumerate(thexp, start=1):
            for _ in range(e):
                part = _theta_t(part, i)
        scale = HLaurent.term(v, hexp)
        part = part.map_coeffs(
            lambda cs: cs.shifted(qdeg).scaled(scale)
            if any(qdeg)
            else cs.scaled(scale)
        )
        out = out + part
    return out


def symbol_map(op: QDEOperator, model: ModelSpec, order: int) -> QElem:
    """Send h to 0 and theta^E to the quantum monomial of generators applied
    to the unit; an annihilating operator maps to zero in the quantum ring."""
    if op.rank != model.rank:
        raise ValueError("rank mismatch")
    out = QElem.zero(model, order)
    for (hexp, qdeg, thexp), v in op.c.items():
        if hexp > 0:
            continue
        out = out + quantum_monomial(model, order, thexp, qdeg).scaled(v)
    return out


# -- shipped expression data ---------------------------------------------

_CP_NAME_RE = re.compile(r"^cp([1-9][0-9]*)$")


def _cp_dim(model: ModelSpec):
    m = _CP_NAME_RE.match(model.name)
    return int(m.group(1)) if m else None


def expression_substitutions(model: ModelSpec):
    """Textual substitutions honoured in expression files for this model
    (the projective-space family parametrizes its files by M1 = dim + 1)."""
    m = _cp_dim(model)
    if m is not None:
        return {"M1": str(m + 1)}
    return None


def builtin_operator_file(model: ModelSpec):
    """(path, substitutions) of the operator file shipped for the model."""
    from .model import data_path

    if _cp_dim(model) is not None:
        return data_path("cpm.ops"), expression_substitutions(model)
    candidate = data_path("%s.ops" % model.name)
    if candidate.is_file():
        return candidate, None
    raise LookupError("no operator file shipped for model %r" % model.name)


def builtin_operators(model: ModelSpec, defining_only=False):
    path, subs = builtin_operator_file(model)
    ops = load_operators(path, model.rank, subs)
    if defining_only:
        return ops[: defining_count(model)]
    return ops


def defining_count(model: ModelSpec) -> int:
    """How many leading operators in the shipped file generate the system
    (one per projective space, two for the rank-2 surfaces/flags)."""
    return 1 if _cp_dim(model) is not None else min(2, model.rank + 1)


def builtin_rowspec(model: ModelSpec):
    from .model import data_path

    m = _cp_dim(model)
    if m is not None:
        texts = ["D1^%d" % (m - i) for i in range(m)] + ["1"]
        ops = [parse_operator(t, 1) for t in texts]
        return ops
    candidate = data_path("%s.rows" % model.name)
    if candidate.is_file():
        return load_rowspec(candidate, model.rank)
    raise LookupError("no row expressions shipped for model %r" % model.name)


def builtin_relations(model: ModelSpec):
    from .model import data_path

    m = _cp_dim(model)
    if m is not None:
        return load_relations(data_path("cpm.rel"), 1, {"M1": str(m + 1)})
    candidate = data_path("%s.rel" % model.name)
    if candidate.is_file():
        return load_relations(candidate, model.rank)
    raise LookupError("no relation file shipped for model %r" % model.name)
