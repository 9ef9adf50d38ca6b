"""Bundle automorphisms over the identity base map, and the induced checks.

An automorphism here fixes every base coordinate and moves fiber coordinates
by polynomial maps psi^a(x, u) with an explicit polynomial inverse.  Its
prolongation to jet coordinates sends u^a_I to D_I(psi^a), so pulling back a
polynomial substitutes prolonged expressions for every jet generator.  The
base volume is preserved (unit Jacobian), hence densities pull back by plain
composition.

The checks packaged here verify, on concrete inputs, the structural facts the
rest of the package relies on: pullback commutes with the horizontal
differential; a structure matrix transforms covariantly; the bracket density
of a covariant structure is natural up to exact terms; Euler components
transform with the Jacobian of the fiber map; and averaging over a finite
group projects onto invariant forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .kernel import BundleSpec, Generator, JetcalcError, MultiIndex, Poly
from .poisson import OmegaSpec, l2_density
from .varcalc import HorizontalForm, d_h, euler, is_divergence, iterated_total_derivative


class PreconditionFailed(JetcalcError):
    """A documented precondition of a compound check does not hold."""


def _check_fiber_map(ctx: BundleSpec, polys: tuple[Poly, ...], label: str):
    if len(polys) != ctx.m:
        raise ValueError(f"{label} must give one polynomial per fiber")
    for p in polys:
        if p.ctx != ctx:
            raise ValueError(f"{label} entry over a different chart")
        for g in p.generators():
            if g.is_jet and g.index.order > 0:
                raise ValueError(
                    f"{label} entry depends on jet coordinate {g.name(ctx)}; "
                    "fiber maps may use base coordinates, fibers and parameters only")


@dataclass(frozen=True)
class Automorphism:
    """A fiber map with explicit inverse over the identity base map.

    Both directions are validated on construction by polynomial composition:
    psi(psi_inv) and psi_inv(psi) must be the identity on every fiber.
    """

    ctx: BundleSpec
    psi: tuple[Poly, ...]
    psi_inv: tuple[Poly, ...]

    def __post_init__(self):
        ctx = self.ctx
        _check_fiber_map(ctx, self.psi, "psi")
        _check_fiber_map(ctx, self.psi_inv, "psi_inv")
        forward = {Generator.jet(b): self.psi[b] for b in range(ctx.m)}
        backward = {Generator.jet(b): self.psi_inv[b] for b in range(ctx.m)}
        for a in range(ctx.m):
            u_a = Poly.generator(ctx, Generator.jet(a))
            if self.psi[a].substitute(backward) != u_a:
                raise ValueError(f"psi_inv is not a right inverse on fiber {ctx.fibers[a]}")
            if self.psi_inv[a].substitute(forward) != u_a:
                raise ValueError(f"psi_inv is not a left inverse on fiber {ctx.fibers[a]}")
        object.__setattr__(self, "_prolong_cache", {})

    @classmethod
    def identity(cls, ctx: BundleSpec) -> "Automorphism":
        coords = tuple(Poly.generator(ctx, Generator.jet(a)) for a in range(ctx.m))
        return cls(ctx, coords, coords)

    @property
    def is_identity(self) -> bool:
        return self == Automorphism.identity(self.ctx)

    def inverse(self) -> "Automorphism":
        return Automorphism(self.ctx, self.psi_inv, self.psi)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self after other: fibers map through other first, then self."""
        if self.ctx != other.ctx:
            raise ValueError("automorphisms over different charts")
        ctx = self.ctx
        through = {Generator.jet(b): other.psi[b] for b in range(ctx.m)}
        back = {Generator.jet(b): self.psi_inv[b] for b in range(ctx.m)}
        psi = tuple(p.substitute(through) for p in self.psi)
        psi_inv = tuple(p.substitute(back) for p in other.psi_inv)
        return Automorphism(ctx, psi, psi_inv)

    def prolong(self, a: int, index: MultiIndex) -> Poly:
        """Prolonged jet coordinate: u^a_I composed with the map is D_I(psi^a)."""
        key = (a, index)
        cached = self._prolong_cache.get(key)
        if cached is None:
            cached = iterated_total_derivative(self.psi[a], index)
            self._prolong_cache[key] = cached
        return cached


def prolong(auto: Automorphism, a: int, index: MultiIndex) -> Poly:
    return auto.prolong(a, index)


def pullback(p: Poly, auto: Automorphism) -> Poly:
    """Compose a polynomial with the prolonged automorphism."""
    if p.ctx != auto.ctx:
        raise ValueError("polynomial over a different chart")
    mapping = {}
    for g in p.generators():
        if g.is_jet:
            mapping[g] = auto.prolong(g.pos, g.index)
    return p.substitute(mapping)


def pullback_form(form: HorizontalForm, auto: Automorphism) -> HorizontalForm:
    """Pull back coefficientwise; the base map is the identity with unit volume."""
    return form.map_coefficients(lambda p: pullback(p, auto))


def check_pullback_dh_commute(form: HorizontalForm, auto: Automorphism) -> bool:
    """Does pullback of this form commute with the horizontal differential?"""
    return pullback_form(d_h(form), auto) == d_h(pullback_form(form, auto))


@dataclass(frozen=True)
class CovarianceReport:
    passed: bool
    failures: tuple[tuple[str, str, Poly], ...]


def check_covariance(omega: OmegaSpec, auto: Automorphism) -> CovarianceReport:
    """Does omega transform as a fiberwise bivector under the automorphism?

    For every pair (a, b) the residual

        omega^{ab}(psi(u)) - sum_{c,d} omega^{cd} dpsi^a/du^c dpsi^b/du^d

    must vanish; failing pairs are reported with their residuals.
    """
    ctx = omega.ctx
    if auto.ctx != ctx:
        raise ValueError("automorphism over a different chart")
    substitution = {Generator.jet(c): auto.psi[c] for c in range(ctx.m)}
    jacobian = [[auto.psi[a].partial(Generator.jet(c)) for c in range(ctx.m)]
                for a in range(ctx.m)]
    failures = []
    for a in range(ctx.m):
        for b in range(ctx.m):
            transported = Poly.zero(ctx)
            for c in range(ctx.m):
                if jacobian[a][c].is_zero:
                    continue
                for d in range(ctx.m):
                    entry = omega.entry(c, d)
                    if entry.is_zero or jacobian[b][d].is_zero:
                        continue
                    transported = transported + entry * jacobian[a][c] * jacobian[b][d]
            residual = omega.entry(a, b).substitute(substitution) - transported
            if not residual.is_zero:
                failures.append((ctx.fibers[a], ctx.fibers[b], residual))
    return CovarianceReport(passed=not failures, failures=tuple(failures))


def check_canonical_density(omega: OmegaSpec, auto: Automorphism, p: Poly, q: Poly) -> bool:
    """Is the bracket density natural under pullback, up to a divergence?"""
    moved = l2_density(pullback(p, auto), pullback(q, auto), omega)
    return is_divergence(moved - pullback(l2_density(p, q, omega), auto))


def check_el_transform(auto: Automorphism, p: Poly) -> bool:
    """Do Euler components transform with the Jacobian of the fiber map?

    Checks E_a(pullback p) = sum_c dpsi^c/du^a * pullback(E_c(p)) for every a.
    """
    ctx = auto.ctx
    lhs = euler(pullback(p, auto))
    rhs_parts = euler(p)
    for a in range(ctx.m):
        rhs = Poly.zero(ctx)
        for c in range(ctx.m):
            factor = auto.psi[c].partial(Generator.jet(a))
            if factor.is_zero or rhs_parts[c].is_zero:
                continue
            rhs = rhs + factor * pullback(rhs_parts[c], auto)
        if lhs[a] != rhs:
            return False
    return True


@dataclass(frozen=True)
class FiniteGroupAction:
    """A finite set of automorphisms, closed under composition and inverse."""

    elements: tuple[Automorphism, ...]

    def __post_init__(self):
        if not self.elements:
            raise ValueError("a group action needs at least the identity")
        ctx = self.elements[0].ctx
        for g in self.elements:
            if g.ctx != ctx:
                raise ValueError("group elements over different charts")
        seen: list[Automorphism] = []
        for g in self.elements:
            if any(g == h for h in seen):
                raise ValueError("duplicate group element")
            seen.append(g)
        identity = Automorphism.identity(ctx)
        if not any(g == identity for g in self.elements):
            raise ValueError("the identity automorphism must be listed")
        for g in self.elements:
            for h in self.elements:
                composed = g.compose(h)
                if not any(composed == k for k in self.elements):
                    raise ValueError("the listed elements are not closed under composition")
            if not any(g.inverse() == k for k in self.elements):
                raise ValueError("an element's inverse is not listed")

    @property
    def ctx(self) -> BundleSpec:
        return self.elements[0].ctx

    @property
    def order(self) -> int:
        return len(self.elements)

    @classmethod
    def generated_by(cls, *generators: Automorphism, max_order: int = 512) -> "FiniteGroupAction":
        """Close a generating set under composition (bounded search)."""
        if not generators:
            raise ValueError("at least one generator is required")
        ctx = generators[0].ctx
        elements: list[Automorphism] = [Automorphism.identity(ctx)]
        frontier = [g for g in generators]
        while frontier:
            g = frontier.pop()
            if any(g == h for h in elements):
                continue
            elements.append(g)
            if len(elements) > max_order:
                raise ValueError(f"group generation exceeded {max_order} elements")
            for h in list(elements):
                frontier.append(g.compose(h))
                frontier.append(h.compose(g))
        return cls(tuple(elements))


def group_average(form: HorizontalForm, group: FiniteGroupAction) -> HorizontalForm:
    """Average the pullbacks over the group: the invariance projection."""
    total = HorizontalForm.zero(form.ctx, form.degree)
    for g in group.elements:
        total = total + pullback_form(form, g)
    return total * Fraction(1, group.order)


def check_invariance(form: HorizontalForm, group: FiniteGroupAction) -> bool:
    """Is the form fixed by every group element?"""
    return all(pullback_form(form, g) == form for g in group.elements)


def check_invariant_closure(alpha: HorizontalForm, beta: HorizontalForm,
                            group: FiniteGroupAction, omega: OmegaSpec) -> bool:
    """Is the bracket density of two invariant densities again invariant?

    Preconditions (raising PreconditionFailed otherwise): alpha and beta are
    invariant top-degree forms and omega is covariant under every element.
    """
    ctx = omega.ctx
    if alpha.degree != ctx.n or beta.degree != ctx.n:
        raise PreconditionFailed("closure check expects top-degree forms")
    if not check_invariance(alpha, group):
        raise PreconditionFailed("alpha is not invariant under the group")
    if not check_invariance(beta, group):
        raise PreconditionFailed("beta is not invariant under the group")
    for g in group.elements:
        if not check_covariance(omega, g).passed:
            raise PreconditionFailed("omega is not covariant under every group element")
    density = l2_density(alpha.density_coefficient(), beta.density_coefficient(), omega)
    return check_invariance(HorizontalForm.density(density), group)
