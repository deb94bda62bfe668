"""Finitely supported module vectors over the symbolic crossed product
and the operator calculus that reduces the boundary cycle to the tree
shift.

A module vector is a finitely supported map from group elements to
algebra elements.  All operator identities here are certified on
explicit spanning sets: every indicator of bounded depth placed at every
label in a ball.  Right linearity extends such a certificate to general
coefficients with parameters in range, which is the only sense in which
the word "equal" is used below.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from .config import DomainError, check_depth, check_radius
from .crossed import CrossedElement, PairElement, dual_coefficient
from .cylinders import (
    BiCylinderFunction,
    CylinderFunction,
    chi,
    extend,
    f_prime_value,
)
from .jv import wbar_apply
from .scalars import ONE, Scalar
from .words import IDENTITY, ReducedWord, ball, multiply, sphere


def _freeze_inner(
    inner: Mapping[ReducedWord, CylinderFunction] | None,
) -> tuple | None:
    if inner is None:
        return None
    return tuple(sorted(inner.items(), key=lambda kv: kv[0].sort_key()))


@lru_cache(maxsize=None)
def _weight(F: BiCylinderFunction, inner_items: tuple | None, g: ReducedWord):
    inner = dict(inner_items) if inner_items is not None else None
    return f_prime_value(F, g, inner)


class ModuleVector:
    """A finitely supported function from group elements to the algebra."""

    __slots__ = ("rank", "entries")

    def __init__(self, rank: int, entries: Mapping[ReducedWord, CrossedElement]):
        self.rank = rank
        self.entries = {g: x for g, x in entries.items() if not x.is_zero()}

    @staticmethod
    def zero(rank: int) -> "ModuleVector":
        return ModuleVector(rank, {})

    @staticmethod
    def basis(rank: int, f: CylinderFunction, g: ReducedWord) -> "ModuleVector":
        return ModuleVector(rank, {g: CrossedElement.monomial(f, IDENTITY)})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ModuleVector)
            and self.rank == other.rank
            and self.entries == other.entries
        )

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        out = dict(self.entries)
        for g, x in other.entries.items():
            out[g] = out[g] + x if g in out else x
        return ModuleVector(self.rank, out)

    def __sub__(self, other: "ModuleVector") -> "ModuleVector":
        return self + other.scale(Scalar.of(-1))

    def scale(self, c: Scalar) -> "ModuleVector":
        return ModuleVector(self.rank, {g: x.scale(c) for g, x in self.entries.items()})

    def act(self, a: CrossedElement) -> "ModuleVector":
        """Right action, applied coefficientwise."""
        return ModuleVector(self.rank, {g: x * a for g, x in self.entries.items()})

    def is_zero(self) -> bool:
        return not self.entries

    def __repr__(self) -> str:
        return f"ModuleVector({len(self.entries)} labels)"


def inner_product(xi: ModuleVector, eta: ModuleVector) -> CrossedElement:
    total = CrossedElement.zero(xi.rank)
    for g, x in xi.entries.items():
        if g in eta.entries:
            total = total + x.star() * eta.entries[g]
    return total


class ModuleMap:
    """An operator on module vectors, carried as a name and a rule."""

    __slots__ = ("name", "rule")

    def __init__(self, name: str, rule: Callable[[ModuleVector], ModuleVector]):
        self.name = name
        self.rule = rule

    def __call__(self, xi: ModuleVector) -> ModuleVector:
        return self.rule(xi)

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(f"({self.name} . {other.name})", lambda xi: self(other(xi)))

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(f"({self.name} + {other.name})", lambda xi: self(xi) + other(xi))

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(f"({self.name} - {other.name})", lambda xi: self(xi) - other(xi))

    @staticmethod
    def identity() -> "ModuleMap":
        return ModuleMap("1", lambda xi: xi)


def op_phi_function(f: CylinderFunction) -> ModuleMap:
    """Pointwise left multiplication by a boundary function."""
    return ModuleMap(
        "phi(f)",
        lambda xi: ModuleVector(
            xi.rank, {g: x.left_mul_function(f) for g, x in xi.entries.items()}
        ),
    )


def op_phi_unitary(gamma: ReducedWord) -> ModuleMap:
    """Left multiplication by a group unitary with the matching label shift."""

    def rule(xi: ModuleVector) -> ModuleVector:
        ginv = gamma.inverse()
        return ModuleVector(
            xi.rank,
            {
                multiply(gamma, g): x.left_mul_unitary(gamma)
                for g, x in xi.entries.items()
            },
        )

    return ModuleMap(f"phi(u_{gamma})", rule)


def op_phi(x: CrossedElement) -> ModuleMap:
    """Left multiplication by a general algebra element, term by term."""

    def rule(xi: ModuleVector) -> ModuleVector:
        out = ModuleVector.zero(xi.rank)
        for gamma, f in x.terms.items():
            out = out + op_phi_function(f)(op_phi_unitary(gamma)(xi))
        return out

    return ModuleMap("phi(x)", rule)


def op_tau_gamma(gamma: ReducedWord) -> ModuleMap:
    """Label shift with no coefficient twisting."""
    return ModuleMap(
        f"tau(u_{gamma})",
        lambda xi: ModuleVector(
            xi.rank,
            {multiply(g, gamma.inverse()): x for g, x in xi.entries.items()},
        ),
    )


def op_tau_F(
    F: BiCylinderFunction,
    inner: Mapping[ReducedWord, CylinderFunction] | None = None,
) -> ModuleMap:
    """Diagonal action of a two-variable function: at each label, left
    multiplication by its one-variable specialization there."""
    if not F.vanishes_on_diagonal():
        raise DomainError("two-variable coefficient must vanish on the diagonal")
    frozen = _freeze_inner(inner)

    def rule(xi: ModuleVector) -> ModuleVector:
        return ModuleVector(
            xi.rank,
            {
                g: x.left_mul_function(_weight(F, frozen, g))
                for g, x in xi.entries.items()
            },
        )

    return ModuleMap("tau(F)", rule)


def op_tau_monomial(
    F: BiCylinderFunction,
    delta: ReducedWord,
    inner: Mapping[ReducedWord, CylinderFunction] | None = None,
) -> ModuleMap:
    return op_tau_F(F, inner) @ op_tau_gamma(delta)


def op_mult_label(f: CylinderFunction) -> ModuleMap:
    """Scalar multiplication of each coefficient by the extension value
    of f at its own label (the second-leg multiplier)."""
    return ModuleMap(
        "1 (x) M_f",
        lambda xi: ModuleVector(
            xi.rank, {g: x.scale(extend(f, g)) for g, x in xi.entries.items()}
        ),
    )


def untwist_U() -> ModuleMap:
    return ModuleMap(
        "U",
        lambda xi: ModuleVector(
            xi.rank, {g: x.left_mul_unitary(g) for g, x in xi.entries.items()}
        ),
    )


def untwist_U_star() -> ModuleMap:
    return ModuleMap(
        "U*",
        lambda xi: ModuleVector(
            xi.rank,
            {g: x.left_mul_unitary(g.inverse()) for g, x in xi.entries.items()},
        ),
    )


def conjugate_by_U(T: ModuleMap) -> ModuleMap:
    return untwist_U() @ T @ untwist_U_star()


# -- spanning sets and equality certificates -------------------------

def spanning_indicators(n: int, d: int) -> list[CylinderFunction]:
    out = [CylinderFunction.constant(n, ONE)]
    for k in range(1, d + 1):
        out.extend(chi(n, u) for u in sphere(n, k))
    return out


def spanning_vectors(n: int, R: int, d: int) -> Iterable[tuple[str, ModuleVector]]:
    """Basis-style vectors: every bounded-depth indicator at every label
    in the ball, in deterministic shortlex order."""
    for g in ball(n, R):
        for f in spanning_indicators(n, d):
            desc = f"{f!r} at {g}"
            yield desc, ModuleVector.basis(n, f, g)


@dataclass(frozen=True)
class EqualityCertificate:
    description: str
    rank: int
    radius: int
    depth: int
    checked: int
    equal: bool
    first_discrepancy: str | None = None
    discrepancy_labels: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "description": self.description,
            "scope": {"rank": self.rank, "R": self.radius, "d": self.depth},
            "checked": self.checked,
            "pass": self.equal,
            "discrepancy": self.first_discrepancy,
            "discrepancy_labels": list(self.discrepancy_labels),
        }


def maps_agree(
    T: ModuleMap, S: ModuleMap, n: int, R: int, d: int, description: str = ""
) -> EqualityCertificate:
    check_radius(R)
    check_depth(d)
    checked = 0
    first = None
    labels: list[str] = []
    for desc, xi in spanning_vectors(n, R, d):
        checked += 1
        if T(xi) == S(xi):
            continue
        if first is None:
            first = desc
        labels.append(desc)
    return EqualityCertificate(
        description or f"{T.name} = {S.name}",
        n, R, d, checked, first is None, first, tuple(labels[:16]),
    )


# -- decay and untwisting certificates -------------------------------

@dataclass(frozen=True)
class DecayCertificate:
    description: str
    radius: int
    threshold: int
    nonvanishing_labels: int
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "description": self.description,
            "radius": self.radius,
            "threshold": self.threshold,
            "nonvanishing_labels": self.nonvanishing_labels,
            "pass": self.passed,
        }


def decay_check(
    F: BiCylinderFunction,
    f: CylinderFunction,
    R: int,
    inner: Mapping[ReducedWord, CylinderFunction] | None = None,
    description: str = "",
) -> DecayCertificate:
    """At each label x, compare multiplying by the constant value of f
    near x against multiplying by f itself, weighted by the label's
    specialization of F; certify the difference dies beyond a threshold.
    """
    check_radius(R)
    n = f.rank
    frozen = _freeze_inner(inner)
    threshold = 0
    count = 0
    for x in ball(n, R):
        weight = _weight(F, frozen, x)
        diff = weight.scale(extend(f, x)) - weight * f
        if not diff.is_zero():
            count += 1
            threshold = max(threshold, len(x) + 1)
    return DecayCertificate(
        description or "decay of the near-constancy gap",
        R, threshold, count, threshold <= R,
    )


def iota_check(
    b: PairElement,
    f: CylinderFunction,
    R: int,
    d: int,
    inner_for: Callable[[ReducedWord], Mapping[ReducedWord, CylinderFunction]] | None = None,
) -> EqualityCertificate:
    """Compare the two untwisted pictures of multiplication by f under a
    two-variable coefficient: second-leg scalar extension against honest
    pointwise multiplication.  They must agree outside a finite label
    set no larger than the decay threshold allows."""
    n = f.rank
    checked = 0
    first = None
    bad: list[str] = []
    worst = 0
    max_shift = max((len(delta) for delta in b.terms), default=0)
    limit = 0
    for delta, F in sorted(b.terms.items(), key=lambda kv: kv[0].sort_key()):
        inner = inner_for(delta) if inner_for is not None else None
        T = op_tau_monomial(F, delta, inner) @ op_mult_label(f)
        S = op_tau_monomial(F, delta, inner) @ op_phi_function(f)
        cert = decay_check(F, f, R, inner)
        limit = max(limit, cert.threshold + max_shift)
        for desc, xi in spanning_vectors(n, R - max_shift, d):
            checked += 1
            delta_out = T(xi) - S(xi)
            if delta_out.is_zero():
                continue
            if first is None:
                first = desc
            bad.append(desc)
            worst = max(worst, max(len(g) for g in delta_out.entries))
    ok = worst <= limit
    return EqualityCertificate(
        "second-leg extension matches pointwise multiplication up to finite defect",
        n, R, d, checked, first is None or ok, first, tuple(bad[:16]),
    )


# -- the lifted shift ------------------------------------------------

def _dual_inner(n: int, gamma: ReducedWord) -> dict[ReducedWord, CylinderFunction]:
    """The preferred small-ball values for the specialized dual
    coefficient: at the origin it is the cylinder indicator itself."""
    return {IDENTITY: chi(n, gamma)}


def _shift_terms(n: int) -> list[tuple[ReducedWord, BiCylinderFunction, dict]]:
    out = []
    for letter_word in sphere(n, 1):
        out.append(
            (letter_word, dual_coefficient(n, letter_word), _dual_inner(n, letter_word))
        )
    return out


def build_Vbar(n: int, drop: ReducedWord | None = None, perturb: ReducedWord | None = None) -> ModuleMap:
    """Sum over generators of the weighted forward label shift.

    The optional drop and perturb arguments are fault-injection hooks
    for sensitivity tests; production callers leave them unset.
    """
    terms = []
    for gamma, F, inner in _shift_terms(n):
        if drop is not None and gamma == drop:
            continue
        if perturb is not None and gamma == perturb:
            F = F.scale(Scalar.of(2))
        terms.append((gamma, F, _freeze_inner(inner)))

    def rule(xi: ModuleVector) -> ModuleVector:
        out: dict[ReducedWord, CrossedElement] = {}
        for gamma, F, frozen in terms:
            for g, x in xi.entries.items():
                h = multiply(g, gamma.inverse())
                weight = _weight(F, frozen, h)
                if weight.is_zero():
                    continue
                contrib = x.left_mul_function(weight)
                out[h] = out[h] + contrib if h in out else contrib
        return ModuleVector(xi.rank, out)

    return ModuleMap("Vbar", rule)


def build_Vbar_closed_form(n: int) -> ModuleMap:
    """Independent construction: each nonorigin label hands its
    coefficient, cut to its own cylinder, to its parent."""

    def rule(xi: ModuleVector) -> ModuleVector:
        out: dict[ReducedWord, CrossedElement] = {}
        for g, x in xi.entries.items():
            if not len(g):
                continue
            h = g.parent()
            contrib = x.left_mul_function(chi(n, g))
            out[h] = out[h] + contrib if h in out else contrib
        return ModuleVector(xi.rank, out)

    return ModuleMap("Vbar-closed", rule)


def build_Pbar(n: int) -> ModuleMap:
    """Diagonal weight: at each label, the sum of all specialized dual
    coefficients, which is the indicator of the label's own cylinder."""
    terms = [(g, F, _freeze_inner(inner)) for g, F, inner in _shift_terms(n)]

    @lru_cache(maxsize=None)
    def total_weight(g: ReducedWord) -> CylinderFunction:
        total = CylinderFunction.zero(n)
        for _, F, frozen in terms:
            total = total + _weight(F, frozen, g)
        return total

    def rule(xi: ModuleVector) -> ModuleVector:
        out = {}
        for g, x in xi.entries.items():
            y = x.left_mul_function(total_weight(g))
            if not y.is_zero():
                out[g] = y
        return ModuleVector(xi.rank, out)

    return ModuleMap("Pbar", rule)


def build_Fbar(n: int, drop: ReducedWord | None = None, perturb: ReducedWord | None = None) -> ModuleMap:
    V = build_Vbar(n, drop=drop, perturb=perturb)
    P = build_Pbar(n)
    I = ModuleMap.identity()
    return ModuleMap("Fbar", lambda xi: V(xi) - P(xi) + I(xi))


def build_Wbar(n: int, R: int) -> ModuleMap:
    """Reference lifted shift: apply the tree shift fiberwise to each
    family of coefficients sharing a group-unitary part."""

    def rule(xi: ModuleVector) -> ModuleVector:
        families: dict[ReducedWord, dict[ReducedWord, CylinderFunction]] = {}
        for g, x in xi.entries.items():
            for h, f in x.terms.items():
                families.setdefault(h, {})[g] = f
        out: dict[ReducedWord, CrossedElement] = {}
        for h, family in families.items():
            shifted = wbar_apply(family, n, R)
            for label, f in shifted.items():
                term = CrossedElement.monomial(f, h)
                out[label] = out[label] + term if label in out else term
        return ModuleVector(xi.rank, out)

    return ModuleMap("Wbar", rule)


def final_identity_check(
    n: int,
    R: int,
    d: int,
    drop: ReducedWord | None = None,
    perturb: ReducedWord | None = None,
) -> EqualityCertificate:
    """The flagship comparison: the lift assembled from the dual element
    must coincide with the fiberwise tree shift on the full spanning set.
    """
    Fb = build_Fbar(n, drop=drop, perturb=perturb)
    Wb = build_Wbar(n, R + 1)
    return maps_agree(Fb, Wb, n, R, d, "assembled lift equals fiberwise shift")
