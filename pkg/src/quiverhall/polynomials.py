"""Exact integer polynomials in q and Laurent polynomials in v, q = v^2.

Everything is immutable and normalized (no trailing/leading zero
coefficients), so values can be compared, hashed and serialized directly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InexactDivisionError


def _trim(coeffs) -> tuple[int, ...]:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(int(x) for x in c)


@dataclass(frozen=True)
class IntPolyQ:
    """Polynomial in q with integer coefficients, ascending powers."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @staticmethod
    def const(c: int) -> "IntPolyQ":
        return IntPolyQ((c,))

    @staticmethod
    def q_power(k: int, c: int = 1) -> "IntPolyQ":
        return IntPolyQ((0,) * k + (c,))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __add__(self, other: "IntPolyQ") -> "IntPolyQ":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return IntPolyQ(tuple(
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
        ))

    def __neg__(self) -> "IntPolyQ":
        return IntPolyQ(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "IntPolyQ") -> "IntPolyQ":
        return self + (-other)

    def __mul__(self, other: "IntPolyQ") -> "IntPolyQ":
        if self.is_zero or other.is_zero:
            return ZERO_Q
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolyQ(tuple(out))

    def scale(self, c: int) -> "IntPolyQ":
        return IntPolyQ(tuple(c * x for x in self.coeffs))

    def __call__(self, q: int) -> int:
        val = 0
        for c in reversed(self.coeffs):
            val = val * q + c
        return val

    def divexact(self, other: "IntPolyQ") -> "IntPolyQ":
        """Exact division in Z[q]; raises if a remainder is left."""
        if other.is_zero:
            raise InexactDivisionError("division by zero polynomial")
        if self.is_zero:
            return ZERO_Q
        rem = list(self.coeffs)
        div = other.coeffs
        dd = len(div) - 1
        qdeg = len(rem) - 1 - dd
        if qdeg < 0:
            raise InexactDivisionError(f"degree {len(rem)-1} < divisor degree {dd}")
        quot = [0] * (qdeg + 1)
        for k in range(qdeg, -1, -1):
            lead = rem[k + dd]
            if lead % div[-1] != 0:
                raise InexactDivisionError(f"leading coefficient {lead} not divisible by {div[-1]}")
            f = lead // div[-1]
            quot[k] = f
            if f:
                for j, b in enumerate(div):
                    rem[k + j] -= f * b
        if any(rem):
            raise InexactDivisionError("nonzero remainder")
        return IntPolyQ(tuple(quot))

    def subst_q_is_v2(self) -> "LaurentPolyV":
        """Image under q -> v^2."""
        if self.is_zero:
            return ZERO_V
        out = [0] * (2 * len(self.coeffs) - 1)
        for i, c in enumerate(self.coeffs):
            out[2 * i] = c
        return LaurentPolyV(0, tuple(out))

    def subst_q_is_vminus2(self) -> "LaurentPolyV":
        """Image under q -> v^-2."""
        return self.subst_q_is_v2().bar()

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                mono = "q" if i == 1 else f"q^{i}"
                if c == 1:
                    parts.append(mono)
                elif c == -1:
                    parts.append(f"-{mono}")
                else:
                    parts.append(f"{c}*{mono}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")


ZERO_Q = IntPolyQ(())
ONE_Q = IntPolyQ((1,))


@dataclass(frozen=True)
class LaurentPolyV:
    """Laurent polynomial in v: coeffs ascending from exponent vmin."""

    vmin: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = list(self.coeffs)
        lead_zeros = 0
        while c and c[0] == 0:
            c.pop(0)
            lead_zeros += 1
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(int(x) for x in c))
        object.__setattr__(self, "vmin", self.vmin + lead_zeros if c else 0)

    @staticmethod
    def const(c: int) -> "LaurentPolyV":
        return LaurentPolyV(0, (c,))

    @staticmethod
    def v_power(k: int, c: int = 1) -> "LaurentPolyV":
        return LaurentPolyV(k, (c,))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def vmax(self) -> int:
        return self.vmin + len(self.coeffs) - 1

    def __add__(self, other: "LaurentPolyV") -> "LaurentPolyV":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        lo = min(self.vmin, other.vmin)
        hi = max(self.vmax, other.vmax)
        out = [0] * (hi - lo + 1)
        for i, c in enumerate(self.coeffs):
            out[self.vmin - lo + i] += c
        for i, c in enumerate(other.coeffs):
            out[other.vmin - lo + i] += c
        return LaurentPolyV(lo, tuple(out))

    def __neg__(self) -> "LaurentPolyV":
        return LaurentPolyV(self.vmin, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "LaurentPolyV") -> "LaurentPolyV":
        return self + (-other)

    def __mul__(self, other: "LaurentPolyV") -> "LaurentPolyV":
        if self.is_zero or other.is_zero:
            return ZERO_V
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return LaurentPolyV(self.vmin + other.vmin, tuple(out))

    def shift(self, k: int) -> "LaurentPolyV":
        """Multiply by v^k."""
        if self.is_zero:
            return self
        return LaurentPolyV(self.vmin + k, self.coeffs)

    def bar(self) -> "LaurentPolyV":
        """The involution v -> v^-1."""
        if self.is_zero:
            return self
        return LaurentPolyV(-self.vmax, tuple(reversed(self.coeffs)))

    def as_int_poly_q(self) -> IntPolyQ:
        """Inverse of q -> v^2; requires even non-negative exponents only."""
        if self.is_zero:
            return ZERO_Q
        if self.vmin < 0:
            raise InexactDivisionError("negative v-exponent cannot be a polynomial in q")
        out = [0] * (self.vmax // 2 + 1)
        for i, c in enumerate(self.coeffs):
            e = self.vmin + i
            if c and e % 2:
                raise InexactDivisionError("odd v-exponent cannot come from q = v^2")
            if c:
                out[e // 2] = c
        return IntPolyQ(tuple(out))

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            e = self.vmin + i
            if e == 0:
                parts.append(str(c))
            else:
                mono = "v" if e == 1 else f"v^{e}"
                if c == 1:
                    parts.append(mono)
                elif c == -1:
                    parts.append(f"-{mono}")
                else:
                    parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


ZERO_V = LaurentPolyV(0, ())
ONE_V = LaurentPolyV(0, (1,))


@dataclass(frozen=True)
class RatioV:
    """A quotient of Laurent polynomials; kept unreduced, compared by
    cross-multiplication. Used only for the Green form."""

    num: LaurentPolyV
    den: LaurentPolyV

    def __post_init__(self):
        if self.den.is_zero:
            raise ZeroDivisionError("zero denominator")

    @staticmethod
    def of(num: LaurentPolyV, den: LaurentPolyV = ONE_V) -> "RatioV":
        return RatioV(num, den)

    def __add__(self, other: "RatioV") -> "RatioV":
        return RatioV(self.num * other.den + other.num * self.den, self.den * other.den)

    def __mul__(self, other: "RatioV") -> "RatioV":
        return RatioV(self.num * other.num, self.den * other.den)

    def equals(self, other: "RatioV") -> bool:
        return self.num * other.den == other.num * self.den

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __str__(self) -> str:
        return f"({self.num}) / ({self.den})"
