"""Total derivatives, horizontal forms, and the Euler-Lagrange operator.

The total derivative along the i-th base direction acts on a polynomial in
jet coordinates as

    D_i p = dp/dx^i + sum over fibers a and multi-indices J of
            u^a_{J+i} * dp/du^a_J,

the horizontal differential wedges it with dx^i, and the Euler-Lagrange
operator of a density P is

    E_a(P) = sum over distinct sorted multi-indices I of
             (-1)^|I| D_I (dP/du^a_I).

A polynomial density over a one-dimensional base is a total derivative if and
only if all its Euler components vanish; `invert_total_derivative` produces
the preimage in that case by peeling one jet order at a time.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .kernel import BundleSpec, Generator, JetcalcError, Monomial, MultiIndex, Poly


class DegreeError(JetcalcError):
    """A horizontal form of the wrong degree for the requested operation."""


class NotExact(JetcalcError):
    """The input is not a total derivative (or not exact), so no preimage exists."""


class Unsupported(JetcalcError):
    """Operation restricted to a smaller base dimension than the one supplied."""


def _direction(ctx: BundleSpec, direction: int | str) -> int:
    if isinstance(direction, str):
        return ctx.direction_index(direction)
    if not 0 <= direction < ctx.n:
        raise ValueError(f"direction {direction} out of range")
    return direction


def total_derivative(p: Poly, direction: int | str) -> Poly:
    """Apply the total derivative D_i, raising each jet order by one."""
    i = _direction(p.ctx, direction)
    out = p.partial(Generator.base(i))
    for g in p.generators():
        if not g.is_jet:
            continue
        lifted = Generator.jet(g.pos, g.index.extended(i))
        out = out + p.partial(g) * Poly.generator(p.ctx, lifted)
    return out


def iterated_total_derivative(p: Poly, index: MultiIndex) -> Poly:
    """Apply D_I, one direction at a time (total derivatives commute)."""
    out = p
    for i in index:
        out = total_derivative(out, i)
    return out


class HorizontalForm:
    """A horizontal k-form: polynomial coefficients on increasing dx-tuples.

    Stored canonically as a sorted tuple of (increasing index tuple, nonzero
    Poly) pairs; degree 0 uses the empty tuple as its single key.
    """

    __slots__ = ("ctx", "degree", "coeffs", "_lookup")

    def __init__(self, ctx: BundleSpec, degree: int,
                 coeffs: Mapping[tuple[int, ...], Poly] | Iterable[tuple[tuple[int, ...], Poly]] = ()):
        if not 0 <= degree <= ctx.n:
            raise DegreeError(f"form degree {degree} outside 0..{ctx.n}")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        lookup: dict[tuple[int, ...], Poly] = {}
        for idx, poly in items:
            idx = tuple(idx)
            if len(idx) != degree:
                raise DegreeError(f"index tuple {idx} has wrong length for degree {degree}")
            if list(idx) != sorted(set(idx)):
                raise ValueError(f"index tuple {idx} must be strictly increasing")
            if any(not 0 <= i < ctx.n for i in idx):
                raise ValueError(f"index tuple {idx} out of range")
            if poly.ctx != ctx:
                raise ValueError("coefficient over a different chart")
            if poly.is_zero:
                continue
            if idx in lookup:
                raise ValueError(f"duplicate index tuple {idx}")
            lookup[idx] = poly
        self.ctx = ctx
        self.degree = degree
        self.coeffs = tuple(sorted(lookup.items()))
        self._lookup = lookup

    @classmethod
    def scalar(cls, poly: Poly) -> "HorizontalForm":
        return cls(poly.ctx, 0, {(): poly})

    @classmethod
    def density(cls, poly: Poly) -> "HorizontalForm":
        """The top-degree form poly * dx^1 ^ ... ^ dx^n."""
        return cls(poly.ctx, poly.ctx.n, {tuple(range(poly.ctx.n)): poly})

    @classmethod
    def zero(cls, ctx: BundleSpec, degree: int) -> "HorizontalForm":
        return cls(ctx, degree)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, idx: tuple[int, ...]) -> Poly:
        return self._lookup.get(tuple(idx), Poly.zero(self.ctx))

    def density_coefficient(self) -> Poly:
        if self.degree != self.ctx.n:
            raise DegreeError("not a top-degree form")
        return self.coefficient(tuple(range(self.ctx.n)))

    def scalar_coefficient(self) -> Poly:
        if self.degree != 0:
            raise DegreeError("not a degree-zero form")
        return self.coefficient(())

    def map_coefficients(self, fn) -> "HorizontalForm":
        return HorizontalForm(self.ctx, self.degree,
                              [(idx, fn(poly)) for idx, poly in self.coeffs])

    def __add__(self, other: "HorizontalForm") -> "HorizontalForm":
        if not isinstance(other, HorizontalForm):
            return NotImplemented
        if self.ctx != other.ctx or self.degree != other.degree:
            raise DegreeError("cannot add forms of different degree or chart")
        keys = set(self._lookup) | set(other._lookup)
        return HorizontalForm(
            self.ctx, self.degree,
            [(idx, self.coefficient(idx) + other.coefficient(idx)) for idx in keys])

    def __sub__(self, other: "HorizontalForm") -> "HorizontalForm":
        return self + other * -1

    def __mul__(self, scalar) -> "HorizontalForm":
        return self.map_coefficients(lambda p: p * scalar)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (isinstance(other, HorizontalForm) and self.ctx == other.ctx
                and self.degree == other.degree and self.coeffs == other.coeffs)

    def __repr__(self) -> str:
        if self.is_zero:
            return f"HorizontalForm(degree={self.degree}, 0)"
        body = ", ".join(
            f"{'^'.join('d' + self.ctx.base_dims[i] for i in idx) or '1'}: {poly}"
            for idx, poly in self.coeffs)
        return f"HorizontalForm(degree={self.degree}, {body})"


def d_h(form: HorizontalForm) -> HorizontalForm:
    """Horizontal differential: d_h(a dx^I) = D_i(a) dx^i ^ dx^I."""
    ctx = form.ctx
    if form.degree >= ctx.n:
        raise DegreeError("d_h on a top-degree form")
    out: dict[tuple[int, ...], Poly] = {}
    for idx, poly in form.coeffs:
        for i in range(ctx.n):
            if i in idx:
                continue
            insert_at = sum(1 for j in idx if j < i)
            sign = -1 if insert_at % 2 else 1
            key = tuple(sorted(idx + (i,)))
            contribution = total_derivative(poly, i) * sign
            out[key] = out.get(key, Poly.zero(ctx)) + contribution
    return HorizontalForm(ctx, form.degree + 1, out)


def euler(p: Poly) -> tuple[Poly, ...]:
    """All Euler-Lagrange components of a density, one per fiber."""
    ctx = p.ctx
    out = [Poly.zero(ctx) for _ in range(ctx.m)]
    for g in sorted(p.generators()):
        if not g.is_jet:
            continue
        term = iterated_total_derivative(p.partial(g), g.index)
        if g.index.order % 2:
            term = -term
        out[g.pos] = out[g.pos] + term
    return tuple(out)


def is_divergence(p: Poly) -> bool:
    """True when every Euler component of the density vanishes."""
    return all(component.is_zero for component in euler(p))


def _antiderivative(p: Poly, g: Generator) -> Poly:
    """Antidifferentiate with respect to one generator, no integration constant."""
    ctx = p.ctx
    terms = []
    for mono, coeff in p.items():
        e = mono.exponent(g)
        terms.append((mono.with_exponent(g, e + 1), coeff / (e + 1)))
    return Poly.from_terms(ctx, terms)


def invert_total_derivative(h: Poly) -> Poly:
    """Produce g with D_x g = h over a one-dimensional base, if possible.

    Peels the top jet order k: an exact h is affine-linear in the order-k
    coordinates, and the coefficient of u^a_k is dg/du^a_{k-1}, which is
    antidifferentiated and stripped one fiber at a time.  The terminal
    remainder must be a polynomial in x alone.  The result is normalised to
    zero constant term.  Raises NotExact when any stage fails.
    """
    ctx = h.ctx
    if ctx.n != 1:
        raise Unsupported("invert_total_derivative requires a one-dimensional base")
    result = Poly.zero(ctx)
    current = h
    while not current.is_zero:
        k = current.max_order()
        if k == 0:
            if any(g.is_jet for g in current.generators()):
                raise NotExact("terminal remainder still depends on fiber coordinates")
            result = result + _antiderivative(current, Generator.base(0))
            break
        for mono, _ in current.items():
            top_degree = sum(e for g, e in mono.powers if g.is_jet and g.index.order == k)
            if top_degree > 1:
                raise NotExact(f"not affine-linear in jet coordinates of order {k}")
        for a in range(ctx.m):
            top = Generator.jet(a, MultiIndex((0,) * k))
            coeff = current.partial(top)
            if coeff.is_zero:
                continue
            piece = _antiderivative(coeff, Generator.jet(a, MultiIndex((0,) * (k - 1))))
            result = result + piece
            current = current - total_derivative(piece, 0)
        if not current.is_zero and current.max_order() >= k:
            raise NotExact(f"integrability failure at jet order {k}")
    return result - Poly.const(ctx, result.constant_term())


def homotopy_s(form: HorizontalForm) -> HorizontalForm:
    """Chain homotopy on exact top-degree forms over a one-dimensional base.

    s(h dx) = -g where D_x g = h, so that -(s(d_h f)) = f on zero-constant f
    and d_h(s(w)) = -w on exact w.  Raises NotExact when h has no preimage.
    """
    ctx = form.ctx
    if ctx.n != 1:
        raise Unsupported("the homotopy is implemented for a one-dimensional base")
    if form.degree != 1:
        raise DegreeError("the homotopy acts on top-degree forms")
    g = invert_total_derivative(form.density_coefficient())
    return HorizontalForm.scalar(-g)
