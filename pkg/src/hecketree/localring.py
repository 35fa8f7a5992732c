"""Exact truncated arithmetic in Z_p and its unramified quadratic extension.

The base ring O_F is Z_p carried to ``precision`` p-adic digits, i.e. Z/p^N.
The extension O_E is represented as Z[x]/(p^N, f(x)) for a fixed monic
quadratic f that is irreducible modulo p, so an element is a pair (a, b)
standing for a + b*omega.  The nontrivial automorphism sends omega to the
second root of f, which for a quadratic is exactly -c1 - omega; a Hensel
iteration from the residue field converges to the same element (this is
checked in the test suite).

All arithmetic is exact modulo p^N.  Division happens only through
``inverse`` (units) or through explicit powers of p tracked by callers as
scale exponents, never through element-level division by p.
"""

from __future__ import annotations

from .errors import FieldMismatch, NonUnit, NoSolution


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def smallest_irreducible_quadratic(p: int) -> tuple[int, int]:
    """Lexicographically smallest (c1, c0) with x^2 + c1*x + c0 irreducible mod p.

    A quadratic over F_p is irreducible iff it has no root, so an exhaustive
    root scan decides irreducibility.
    """
    for c1 in range(p):
        for c0 in range(p):
            if all((x * x + c1 * x + c0) % p != 0 for x in range(p)):
                return (c1, c0)
    raise ValueError(f"no irreducible quadratic over F_{p}")  # unreachable for prime p


class LocalField:
    """Parameters of O_E over O_F = Z_p at a fixed working precision.

    q denotes the residue cardinality of the base; the artifact fixes the
    base completion to Q_p, so q = p throughout.
    """

    __slots__ = ("p", "precision", "c1", "c0", "modulus")

    def __init__(self, p: int, precision: int, quadratic: tuple[int, int] | None = None):
        if not is_prime(p):
            raise ValueError(f"p must be prime, got {p}")
        if precision < 1:
            raise ValueError(f"precision must be >= 1, got {precision}")
        self.p = p
        self.precision = precision
        self.modulus = p ** precision
        if quadratic is None:
            quadratic = smallest_irreducible_quadratic(p)
        c1, c0 = quadratic
        if any((x * x + c1 * x + c0) % p == 0 for x in range(p)):
            raise ValueError(f"x^2 + {c1}x + {c0} is reducible mod {p}")
        self.c1 = c1 % self.modulus
        self.c0 = c0 % self.modulus

    @property
    def q(self) -> int:
        return self.p

    def __eq__(self, other):
        return (
            isinstance(other, LocalField)
            and (self.p, self.precision, self.c1, self.c0)
            == (other.p, other.precision, other.c1, other.c0)
        )

    def __hash__(self):
        return hash((self.p, self.precision, self.c1, self.c0))

    def __repr__(self):
        return f"LocalField(p={self.p}, N={self.precision}, f=x^2+{self.c1}x+{self.c0})"

    # --- element constructors ---

    def element(self, a: int, b: int = 0) -> "LocalElement":
        return LocalElement(self, a % self.modulus, b % self.modulus)

    def zero(self) -> "LocalElement":
        return self.element(0)

    def one(self) -> "LocalElement":
        return self.element(1)

    def omega(self) -> "LocalElement":
        return self.element(0, 1)

    def from_int(self, n: int) -> "LocalElement":
        return self.element(n)

    def at_precision(self, precision: int) -> "LocalField":
        """Same field data carried at a different number of digits."""
        return LocalField(self.p, precision, (self.c1, self.c0))


class LocalElement:
    """An element a + b*omega of O_E/p^N.  Immutable value type."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field: LocalField, a: int, b: int):
        self.field = field
        self.a = a % field.modulus
        self.b = b % field.modulus

    # --- ring structure ---

    def _check(self, other: "LocalElement") -> None:
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other):
        self._check(other)
        return LocalElement(self.field, self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        self._check(other)
        return LocalElement(self.field, self.a - other.a, self.b - other.b)

    def __neg__(self):
        return LocalElement(self.field, -self.a, -self.b)

    def __mul__(self, other):
        if isinstance(other, int):
            return LocalElement(self.field, self.a * other, self.b * other)
        self._check(other)
        f = self.field
        # (a + b*w)(c + d*w) with w^2 = -c1*w - c0
        bd = self.b * other.b
        return LocalElement(
            f,
            self.a * other.a - f.c0 * bd,
            self.a * other.b + self.b * other.a - f.c1 * bd,
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LocalElement):
            return NotImplemented
        return self.field == other.field and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b, self.field.p, self.field.precision))

    def __repr__(self):
        if self.b == 0:
            return f"{self.a}"
        return f"({self.a} + {self.b}w)"

    # --- structure maps ---

    def conjugate(self) -> "LocalElement":
        """Image under the nontrivial automorphism of E/F.

        omega maps to the second root of the defining quadratic; since the two
        roots sum to -c1 this is -c1 - omega, i.e. the Hensel lift of the
        residue Frobenius omega -> omega^p.
        """
        f = self.field
        return LocalElement(f, self.a - f.c1 * self.b, -self.b)

    def trace(self) -> "LocalElement":
        return self + self.conjugate()

    def norm(self) -> "LocalElement":
        f = self.field
        n = self.a * self.a - f.c1 * self.a * self.b + f.c0 * self.b * self.b
        return LocalElement(f, n, 0)

    def valuation(self) -> int:
        """Largest k <= N with p^k dividing this element.

        A return value of N means "at least N": the element vanishes at the
        working precision, which is precision exhaustion rather than a claim
        that the element is zero.
        """
        f = self.field
        if self.a == 0 and self.b == 0:
            return f.precision
        v = 0
        a, b = self.a, self.b
        while v < f.precision:
            if a % f.p or b % f.p:
                return v
            a //= f.p
            b //= f.p
            v += 1
        return f.precision

    def is_unit(self) -> bool:
        return self.a % self.field.p != 0 or self.b % self.field.p != 0

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def inverse(self) -> "LocalElement":
        """Multiplicative inverse of a unit; x^-1 = conj(x) / norm(x)."""
        if not self.is_unit():
            raise NonUnit(f"cannot invert {self!r} (valuation > 0)")
        f = self.field
        n = (self.a * self.a - f.c1 * self.a * self.b + f.c0 * self.b * self.b) % f.modulus
        ninv = pow(n, -1, f.modulus)
        c = self.conjugate()
        return LocalElement(f, c.a * ninv, c.b * ninv)

    def reduce_to(self, field: LocalField) -> "LocalElement":
        """Truncate to a coarser precision of the same field data."""
        if (field.p, field.c1 % field.p, field.c0 % field.p) != (
            self.field.p,
            self.field.c1 % self.field.p,
            self.field.c0 % self.field.p,
        ):
            raise FieldMismatch("cannot reduce between unrelated fields")
        return LocalElement(field, self.a, self.b)


def frobenius_conjugate(x: LocalElement) -> LocalElement:
    """The nontrivial automorphism s -> s-bar of the quadratic extension."""
    return x.conjugate()


def quadratic_eval(field: LocalField, x: LocalElement) -> LocalElement:
    """Evaluate the defining quadratic f at x (for root verification)."""
    return x * x + field.element(field.c1) * x + field.element(field.c0)


def newton_conjugate_omega(field: LocalField) -> LocalElement:
    """Second root of f obtained by a Hensel/Newton iteration in O_E.

    Starts from the residue Frobenius image omega^p of omega and iterates
    x <- x - f(x)/f'(x).  The derivative 2x + c1 is a unit at the starting
    point for every p (for p = 2 because c1 is odd), so the iteration
    converges quadratically.  Used in tests to confirm the closed form.
    """
    x = field.omega()
    for _ in range(field.p - 1):
        x = x * field.omega()  # omega^p by repeated multiplication
    two = field.from_int(2)
    c1 = field.element(field.c1)
    for _ in range(field.precision.bit_length() + 2):
        fx = quadratic_eval(field, x)
        if fx.is_zero():
            break
        dfx = two * x + c1
        x = x - fx * dfx.inverse()
    if not quadratic_eval(field, x).is_zero():
        raise NoSolution("Newton iteration failed to find the conjugate root")
    return x


def solve_trace_equation(field: LocalField, target: LocalElement) -> LocalElement:
    """Return a unit gamma with gamma + conj(gamma) = target.

    The target must be a unit of the base ring (b-part zero).  For odd p the
    symmetric solution gamma = target/2 works; for p = 2 the ansatz
    gamma = -target * omega / c1 solves the equation because
    trace(omega) = -c1 and c1 is odd.
    """
    if target.b != 0:
        raise ValueError("target must lie in the base ring")
    if not target.is_unit():
        raise ValueError("target must be a unit of the base ring")
    if field.p != 2:
        gamma = target * field.from_int(2).inverse()
    else:
        c1inv = field.element(field.c1).inverse()
        gamma = -target * field.omega() * c1inv
    if gamma.trace() != target:
        raise NoSolution("trace equation not satisfied at working precision")
    assert gamma.is_unit(), "trace solution must be a unit"
    return gamma
