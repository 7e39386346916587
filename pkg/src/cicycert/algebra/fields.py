"""Scalar contexts.

Elements are plain Python numbers so that polynomial and matrix code can use
native operators: ``int``/``Fraction`` for the rationals, ``int`` residues in
``[0, p)`` for a prime field, ``mpmath.mpf`` for the big-float context used by
continuation.  A context only supplies conversion, normalisation after ring
operations (``reduce``) and division.
"""
from __future__ import annotations

import random
from fractions import Fraction

import mpmath
import sympy

# Largest prime below 2**62.
DEFAULT_PRIME = 2**62 - 57


class FieldError(ValueError):
    pass


class RationalField:
    """The rationals; integers are kept as ``int`` until a division happens."""

    characteristic = 0
    name = "rational"
    exact = True

    def __call__(self, x):
        if isinstance(x, (int, Fraction)):
            return x
        return Fraction(x)

    @staticmethod
    def reduce(x):
        return x

    @staticmethod
    def is_zero(x) -> bool:
        return x == 0

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero in QQ")
        q = Fraction(a, b) if isinstance(a, int) and isinstance(b, int) else Fraction(a) / b
        return q.numerator if q.denominator == 1 else q

    def inv(self, a):
        return self.div(1, a)

    def to_json(self) -> str:
        return "rational"

    def __repr__(self) -> str:
        return "QQ"

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("QQ")


QQ = RationalField()


class PrimeField:
    """GF(p).  Residues are canonical ints in ``[0, p)``."""

    exact = True

    def __init__(self, p: int, check: bool = True):
        p = int(p)
        if check and not sympy.isprime(p):
            raise FieldError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.name = f"GF({p})"

    def __call__(self, x) -> int:
        p = self.p
        if isinstance(x, int):
            return x % p
        if isinstance(x, Fraction):
            den = x.denominator % p
            if den == 0:
                raise FieldError(f"denominator of {x} vanishes mod {p}")
            return x.numerator * pow(den, -1, p) % p
        raise FieldError(f"cannot coerce {x!r} into {self.name}")

    def reduce(self, x: int) -> int:
        return x % self.p

    @staticmethod
    def is_zero(x) -> bool:
        return x == 0

    def div(self, a: int, b: int) -> int:
        if b % self.p == 0:
            raise ZeroDivisionError(f"division by zero in {self.name}")
        return a * pow(b, -1, self.p) % self.p

    def inv(self, a: int) -> int:
        return self.div(1, a)

    def random_element(self, rng: random.Random) -> int:
        return rng.randrange(self.p)

    def random_distinct(self, rng: random.Random, k: int, exclude=()) -> list[int]:
        seen = {self(e) for e in exclude}
        out = []
        while len(out) < k:
            x = rng.randrange(self.p)
            if x not in seen:
                seen.add(x)
                out.append(x)
        return out

    def signed(self, x: int) -> int:
        """Symmetric representative, handy for printing."""
        return x - self.p if x > self.p // 2 else x

    def to_json(self) -> str:
        return str(self.p)

    def __repr__(self) -> str:
        return self.name

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("GF", self.p))


class BigFloatField:
    """Inexact context; only the continuation code is allowed to use it."""

    characteristic = 0
    exact = False

    def __init__(self, prec: int = 128):
        if prec < 64:
            raise FieldError("big-float precision must be at least 64 bits")
        self.prec = prec
        self.name = f"RR{prec}"

    def __call__(self, x):
        with mpmath.workprec(self.prec):
            if isinstance(x, Fraction):
                return mpmath.mpf(x.numerator) / x.denominator
            return mpmath.mpf(x)

    @staticmethod
    def reduce(x):
        return x

    @staticmethod
    def is_zero(x) -> bool:
        return x == 0

    def div(self, a, b):
        return a / b

    def inv(self, a):
        return 1 / a

    def to_json(self) -> str:
        return f"bigfloat:{self.prec}"

    def __repr__(self) -> str:
        return self.name

    def __eq__(self, other) -> bool:
        return type(other) is BigFloatField and other.prec == self.prec

    def __hash__(self) -> int:
        return hash(("RR", self.prec))


class BigComplexField(BigFloatField):
    """Complex big floats; used when a continuation path leaves the real line."""

    def __init__(self, prec: int = 128):
        super().__init__(prec)
        self.name = f"CC{prec}"

    def __call__(self, x):
        with mpmath.workprec(self.prec):
            if isinstance(x, Fraction):
                return mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator)
            return mpmath.mpc(x)

    def to_json(self) -> str:
        return f"bigcomplex:{self.prec}"

    def __eq__(self, other) -> bool:
        return isinstance(other, BigComplexField) and other.prec == self.prec

    def __hash__(self) -> int:
        return hash(("CC", self.prec))


def field_from_json(tag: str):
    if tag == "rational":
        return QQ
    if tag.startswith("bigcomplex:"):
        return BigComplexField(int(tag.split(":", 1)[1]))
    if tag.startswith("bigfloat:"):
        return BigFloatField(int(tag.split(":", 1)[1]))
    return PrimeField(int(tag), check=False)


def random_prime(rng: random.Random, bits: int = 62) -> int:
    """A uniformly placed prime with exactly ``bits`` bits."""
    lo = 1 << (bits - 1)
    while True:
        p = sympy.nextprime(rng.randrange(lo, 2 * lo))
        if p < 2 * lo:
            return int(p)
