"""Combinatorial Morse-Bott orbit systems.

An orbit is a circle; evaluation data lives on circles R/Z with rational
coordinates.  One-dimensional moduli between orbits are recorded as
piecewise-linear components (circles or intervals) whose evaluation maps are
given as PL lifts to the universal cover, so winding numbers and crossing
counts are exact integer data.  Orientation local systems are trivialised at
a basepoint on each orbit; bad orbits have monodromy -1, so transporting a
sign past the basepoint flips it.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import NonDistinct, NonRegularValue

Pair = Tuple[str, str]


def frac_mod1(x: Fraction) -> Fraction:
    """Representative of x in [0, 1)."""
    return x - (x.numerator // x.denominator)


def cyclically_ordered(p: Fraction, a: Fraction, b: Fraction) -> bool:
    """True iff starting at p and moving positively one meets a before b.

    All three points are taken mod 1 and must be pairwise distinct.
    """
    p, a, b = frac_mod1(p), frac_mod1(a), frac_mod1(b)
    if p == a or p == b or a == b:
        raise NonDistinct(f"points not distinct: {p}, {a}, {b}")
    return frac_mod1(a - p) < frac_mod1(b - p)


@dataclass(frozen=True)
class Orbit:
    oid: str
    d: int  # covering multiplicity over the underlying simple orbit
    parity: int  # Conley-Zehnder parity, 0 or 1
    good: bool
    action: Fraction
    homotopy_class: str = ""
    grading: Optional[int] = None  # integer grading of the check generator

    def __post_init__(self):
        if self.parity not in (0, 1):
            raise ValueError(f"{self.oid}: parity must be 0 or 1")


def transport_sign(orbit: Orbit, raw_sign: int, windings: int) -> int:
    """Transport a sign around the orbit circle ``windings`` times.

    Good orbits have trivial orientation monodromy; bad orbits flip per loop.
    """
    if orbit.good or windings % 2 == 0:
        return raw_sign
    return -raw_sign


@dataclass(frozen=True)
class SignedPoint:
    """A point of a 0-dimensional moduli space with its sign."""

    e_plus: Fraction
    e_minus: Fraction
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +-1")


@dataclass(frozen=True)
class BoundaryLabel:
    """Broken-pair label for one end of an interval component.

    The end of an interval in M_1(g+, g-) converges to a two-level broken
    configuration through ``orbit``: with d_plus = 0 the upper level is the
    SignedPoint m0[(g+, orbit)][point_index] and the lower level is the point
    at parameter ``t`` on m1[(orbit, g-)][component_index]; with d_plus = 1
    the roles are swapped (upper level on m1[(g+, orbit)], lower level in
    m0[(orbit, g-)]).
    """

    orbit: str
    d_plus: int  # 0 or 1
    point_index: int
    component_index: int
    t: Fraction


@dataclass(frozen=True)
class PLComponent:
    """A component of a 1-dimensional moduli space, parametrised by [0, 1].

    ``e_plus_lift`` / ``e_minus_lift`` are breakpoint lists ((t, value), ...)
    of lifts of the evaluation maps to R; parameters strictly increase from
    0 to 1.  For circles the endpoints are identified, so each lift must
    close up to an integer (its winding number).  ``sign_start`` is the
    orientation sign at parameter 0, expressed in the basepoint
    trivialisations of both orientation local systems.
    """

    kind: str  # "circle" | "interval"
    sign_start: int
    e_plus_lift: Tuple[Tuple[Fraction, Fraction], ...]
    e_minus_lift: Tuple[Tuple[Fraction, Fraction], ...]
    boundary_labels: Dict[int, BoundaryLabel] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("circle", "interval"):
            raise ValueError(f"bad component kind {self.kind!r}")
        if self.sign_start not in (1, -1):
            raise ValueError("sign_start must be +-1")
        for lift in (self.e_plus_lift, self.e_minus_lift):
            if len(lift) < 2 or lift[0][0] != 0 or lift[-1][0] != 1:
                raise ValueError("lift must run from t=0 to t=1")
            ts = [t for t, _ in lift]
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise ValueError("lift parameters must strictly increase")

    def lift(self, side: str):
        return self.e_plus_lift if side == "plus" else self.e_minus_lift

    def value(self, side: str, t: Fraction) -> Fraction:
        """PL interpolation of the chosen lift at parameter t in [0, 1]."""
        pts = self.lift(side)
        if not 0 <= t <= 1:
            raise ValueError("parameter outside [0, 1]")
        for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
            if t0 <= t <= t1:
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        raise AssertionError("unreachable")

    def winding(self, side: str) -> int:
        pts = self.lift(side)
        delta = pts[-1][1] - pts[0][1]
        if delta.denominator != 1:
            raise ValueError("lift does not close up to an integer")
        return delta.numerator

    def slope_sign(self, side: str, t: Fraction) -> int:
        """Direction of the lift at an interior point of a segment."""
        pts = self.lift(side)
        for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
            if t0 < t < t1:
                return (v1 > v0) - (v1 < v0)
        raise NonRegularValue(f"parameter {t} sits on a breakpoint")


@dataclass(frozen=True)
class Preimage:
    """One transverse crossing from a signed-preimage query."""

    t: Fraction
    sign: int  # crossing direction times transported orientation
    direction: int  # +1 upward crossing, -1 downward
    residual: Fraction  # value of the *other* evaluation map at t, mod 1


@dataclass
class MorseBottSystem:
    """All combinatorial data of a Morse-Bott system of Reeb orbits."""

    orbits: Dict[str, Orbit]
    basepoints: Dict[str, Fraction] = field(default_factory=dict)
    m0: Dict[Pair, List[SignedPoint]] = field(default_factory=dict)
    m1: Dict[Pair, List[PLComponent]] = field(default_factory=dict)
    m2cc: Dict[Pair, int] = field(default_factory=dict)
    grading_modulus: object = 0  # 0, an even N >= 2, or "parity"

    def __post_init__(self):
        for oid in self.orbits:
            self.basepoints.setdefault(oid, Fraction(0))

    def orbit(self, oid: str) -> Orbit:
        return self.orbits[oid]

    def basepoint(self, oid: str) -> Fraction:
        return frac_mod1(self.basepoints[oid])

    def pairs(self):
        seen = set(self.m0) | set(self.m1) | set(self.m2cc)
        return sorted(seen)


def _crossings_of_lattice(v0: Fraction, v1: Fraction, p: Fraction) -> int:
    """Net signed crossings of the set p + Z by a path from v0 to v1 in R."""
    return (v1 - p).numerator // (v1 - p).denominator - (
        (v0 - p).numerator // (v0 - p).denominator
    )


def component_orientation(
    comp: PLComponent,
    t: Fraction,
    top: Tuple[Orbit, Fraction],
    bottom: Tuple[Orbit, Fraction],
) -> int:
    """Orientation sign of ``comp`` at parameter t, in basepoint frames.

    ``top`` and ``bottom`` are (orbit, basepoint) for the two evaluation
    circles.  The sign is transported from sign_start at t=0; each net
    crossing of a basepoint by an evaluation point flips it when the
    corresponding orbit is bad.
    """
    flips = 0
    for side, (orbit, basepoint) in (("plus", top), ("minus", bottom)):
        if orbit.good:
            continue
        start = comp.lift(side)[0][1]
        flips += _crossings_of_lattice(start, comp.value(side, t), basepoint)
    return comp.sign_start * (-1) ** (flips % 2)


def component_preimages(
    comp: PLComponent,
    side: str,
    q: Fraction,
    top: Tuple[Orbit, Fraction],
    bottom: Tuple[Orbit, Fraction],
) -> List[Preimage]:
    """All transverse preimages of q (mod 1) under one evaluation map.

    Each crossing carries sign = direction x orientation, where orientation
    is the local-system-transported component orientation at the crossing.
    Raises NonRegularValue if q is hit at a breakpoint, an interval end, or
    along a constant segment.
    """
    q = frac_mod1(q)
    other = "minus" if side == "plus" else "plus"
    pts = comp.lift(side)
    for t, v in pts:
        if frac_mod1(v) == q:
            raise NonRegularValue(
                f"value {q} hit at breakpoint t={t} of a {comp.kind}"
            )
    out = []
    for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
        if v0 == v1:
            continue  # constant segment away from q (checked above)
        lo, hi = (v0, v1) if v0 < v1 else (v1, v0)
        n = (lo - q).numerator // (lo - q).denominator + 1
        while q + n < hi:
            tc = t0 + (t1 - t0) * (q + n - v0) / (v1 - v0)
            direction = 1 if v1 > v0 else -1
            sign = direction * component_orientation(comp, tc, top, bottom)
            out.append(
                Preimage(tc, sign, direction, frac_mod1(comp.value(other, tc)))
            )
            n += 1
    out.sort(key=lambda pre: pre.t)
    return out


def _sides(sys: MorseBottSystem, pair: Pair):
    top, bottom = pair
    return (
        (sys.orbit(top), sys.basepoint(top)),
        (sys.orbit(bottom), sys.basepoint(bottom)),
    )


def orientation_at(sys: MorseBottSystem, pair: Pair, comp: PLComponent, t: Fraction) -> int:
    top, bottom = _sides(sys, pair)
    return component_orientation(comp, t, top, bottom)


def signed_preimages(
    sys: MorseBottSystem,
    pair: Pair,
    comp: PLComponent,
    side: str,
    q: Fraction,
) -> List[Preimage]:
    top, bottom = _sides(sys, pair)
    return component_preimages(comp, side, q, top, bottom)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    code: str
    location: str
    message: str


def _check(violations, ok, code, location, message):
    if not ok:
        violations.append(Violation(code, location, message))
    return ok


def _moduli_dim_ok(sys, pair, dim, violations, where):
    top, bottom = pair
    vio_before = len(violations)
    if top not in sys.orbits or bottom not in sys.orbits:
        violations.append(Violation("unknown-orbit", where, f"pair {pair}"))
        return False
    a, b = sys.orbit(top), sys.orbit(bottom)
    _check(
        violations,
        (a.parity - b.parity - dim) % 2 == 0,
        "parity-axiom",
        where,
        f"CZ parity gap != {dim} mod 2 for {pair}",
    )
    if a.grading is not None and b.grading is not None:
        gap = a.grading - b.grading
        if sys.grading_modulus not in (0, "parity"):
            gap %= sys.grading_modulus
            dim_mod = dim % sys.grading_modulus
        else:
            dim_mod = dim
        _check(
            violations,
            gap == dim_mod or sys.grading_modulus == "parity",
            "grading-axiom",
            where,
            f"grading gap {gap} != moduli dimension {dim} for {pair}",
        )
    _check(
        violations,
        b.action < a.action,
        "action-axiom",
        where,
        f"action does not decrease across {pair}",
    )
    return len(violations) == vio_before


def validate_system(sys: MorseBottSystem) -> List[Violation]:
    """All structural axiom checks; returns machine-readable violations."""
    v: List[Violation] = []

    for oid, orbit in sys.orbits.items():
        if not orbit.good:
            _check(v, orbit.d % 2 == 0, "bad-orbit-multiplicity", oid,
                   "bad orbit must have even multiplicity")
        if orbit.grading is not None and sys.grading_modulus != "parity":
            _check(v, (orbit.grading - orbit.parity) % 2 == 0,
                   "grading-parity", oid, "grading parity != CZ parity")

    for pair, points in sorted(sys.m0.items()):
        if points:
            _moduli_dim_ok(sys, pair, 0, v, f"m0{pair}")
    for pair, comps in sorted(sys.m1.items()):
        if comps:
            _moduli_dim_ok(sys, pair, 1, v, f"m1{pair}")
    for pair, count in sorted(sys.m2cc.items()):
        if count:
            _moduli_dim_ok(sys, pair, 2, v, f"m2cc{pair}")

    # basepoint genericity
    eval_values: Dict[str, set] = {oid: set() for oid in sys.orbits}
    for (top, bottom), points in sys.m0.items():
        for pt in points:
            if top in eval_values:
                eval_values[top].add(frac_mod1(pt.e_plus))
            if bottom in eval_values:
                eval_values[bottom].add(frac_mod1(pt.e_minus))
    for (top, bottom), comps in sys.m1.items():
        for comp in comps:
            for side, oid in (("plus", top), ("minus", bottom)):
                if oid in eval_values:
                    for _t, val in comp.lift(side):
                        eval_values[oid].add(frac_mod1(val))
    for oid in sys.orbits:
        p = sys.basepoint(oid)
        _check(v, p not in eval_values[oid], "basepoint-collision", oid,
               f"basepoint {p} equals an evaluation value")

    # PL component well-formedness, monodromy, boundary structure
    for pair, comps in sorted(sys.m1.items()):
        for ci, comp in enumerate(comps):
            where = f"m1{pair}[{ci}]"
            if comp.kind == "circle":
                ok = True
                try:
                    wplus, wminus = comp.winding("plus"), comp.winding("minus")
                except ValueError:
                    _check(v, False, "circle-not-closed", where,
                           "lift does not close up to an integer")
                    ok = False
                if ok:
                    flips = 0
                    for w, oid in ((wplus, pair[0]), (wminus, pair[1])):
                        if oid in sys.orbits and not sys.orbit(oid).good:
                            flips += w
                    _check(v, flips % 2 == 0, "monodromy-parity", where,
                           "orientation not consistent around the circle: "
                           f"(-1)^(w+ bad+ + w- bad-) = -1")
                _check(v, not comp.boundary_labels, "circle-with-labels",
                       where, "circle components have no boundary")
            else:
                for end in (0, 1):
                    if end not in comp.boundary_labels:
                        _check(v, False, "unlabeled-end", where,
                               f"interval end {end} has no broken-pair label")
                        continue
                    _validate_interval_end(sys, pair, comp, ci, end, v)

    # basepoints must be regular values of all PL evaluation maps
    for pair, comps in sorted(sys.m1.items()):
        for ci, comp in enumerate(comps):
            for side, oid in (("plus", pair[0]), ("minus", pair[1])):
                if oid not in sys.orbits:
                    continue
                try:
                    signed_preimages(sys, pair, comp, side, sys.basepoint(oid))
                except NonRegularValue as err:
                    _check(v, False, "basepoint-nonregular",
                           f"m1{pair}[{ci}]", str(err))
    return v


def _validate_interval_end(sys, pair, comp, ci, end, v):
    top, bottom = pair
    where = f"m1{pair}[{ci}].end{end}"
    label = comp.boundary_labels[end]
    mid = label.orbit
    if mid not in sys.orbits or mid == top or mid == bottom:
        _check(v, False, "bad-label-orbit", where, f"intermediate {mid!r}")
        return
    if label.d_plus == 0:
        upper_list = sys.m0.get((top, mid), [])
        lower_list = sys.m1.get((mid, bottom), [])
        if label.point_index >= len(upper_list) or label.component_index >= len(
            lower_list
        ):
            _check(v, False, "missing-broken-pair", where,
                   "label references a moduli element that does not exist")
            return
        point = upper_list[label.point_index]
        lower = lower_list[label.component_index]
        t = label.t
        cond_top = frac_mod1(comp.value("plus", Fraction(end))) == frac_mod1(
            point.e_plus
        )
        cond_bot = frac_mod1(comp.value("minus", Fraction(end))) == frac_mod1(
            lower.value("minus", t)
        )
        cond_fiber = frac_mod1(point.e_minus) == frac_mod1(lower.value("plus", t))
        try:
            direction = lower.slope_sign("plus", t)
        except NonRegularValue:
            _check(v, False, "label-nonregular", where,
                   "broken pair sits at a breakpoint of the lower component")
            return
        fiber_sign = point.sign * direction * orientation_at(
            sys, (mid, bottom), lower, t
        )
    elif label.d_plus == 1:
        upper_list = sys.m1.get((top, mid), [])
        lower_list = sys.m0.get((mid, bottom), [])
        if label.component_index >= len(upper_list) or label.point_index >= len(
            lower_list
        ):
            _check(v, False, "missing-broken-pair", where,
                   "label references a moduli element that does not exist")
            return
        upper = upper_list[label.component_index]
        point = lower_list[label.point_index]
        t = label.t
        cond_top = frac_mod1(comp.value("plus", Fraction(end))) == frac_mod1(
            upper.value("plus", t)
        )
        cond_bot = frac_mod1(comp.value("minus", Fraction(end))) == frac_mod1(
            point.e_minus
        )
        cond_fiber = frac_mod1(upper.value("minus", t)) == frac_mod1(point.e_plus)
        try:
            direction = upper.slope_sign("minus", t)
        except NonRegularValue:
            _check(v, False, "label-nonregular", where,
                   "broken pair sits at a breakpoint of the upper component")
            return
        fiber_sign = direction * orientation_at(sys, (top, mid), upper, t) * point.sign
    else:
        _check(v, False, "bad-label", where, f"d_plus = {label.d_plus}")
        return

    _check(v, cond_top, "label-eval-mismatch", where,
           "top evaluation does not match broken limit")
    _check(v, cond_bot, "label-eval-mismatch", where,
           "bottom evaluation does not match broken limit")
    _check(v, cond_fiber, "label-fiber-mismatch", where,
           "broken pair is not a fiber-product point")

    boundary_sign = orientation_at(sys, pair, comp, Fraction(end)) * (
        1 if end == 1 else -1
    )
    expected = (-1) ** label.d_plus * fiber_sign
    _check(v, boundary_sign == expected, "label-sign-mismatch", where,
           f"boundary sign {boundary_sign} != (-1)^d+ * fiber sign {expected}")


# ---------------------------------------------------------------------------
# basepoints


def assign_basepoints(sys: MorseBottSystem, seed: Optional[int] = None) -> MorseBottSystem:
    """Return a copy of the system with fresh generic basepoints.

    With ``seed=None`` every basepoint is 0, deterministically perturbed away
    from collisions; otherwise basepoints are drawn from a seeded RNG and
    re-drawn until the genericity checks pass.
    """
    import random

    rng = random.Random(seed)
    new = dict(sys.basepoints)

    def generic(oid, candidate):
        trial = MorseBottSystem(
            sys.orbits, {**new, oid: candidate}, sys.m0, sys.m1, sys.m2cc,
            sys.grading_modulus,
        )
        codes = {
            x.code
            for x in validate_system(trial)
            if oid in x.location or x.code == "basepoint-nonregular"
        }
        return not ({"basepoint-collision", "basepoint-nonregular"} & codes)

    denominators = [257, 263, 269, 271, 277, 281, 283, 293]
    for k, oid in enumerate(sorted(sys.orbits)):
        for attempt in range(64):
            if seed is None:
                q = denominators[(k + attempt) % len(denominators)]
                candidate = Fraction(0) if attempt == 0 else Fraction(1 + attempt, q)
            else:
                q = denominators[attempt % len(denominators)]
                candidate = Fraction(rng.randrange(q), q)
            if generic(oid, candidate):
                new[oid] = candidate
                break
        else:
            raise NonRegularValue(f"could not find a generic basepoint for {oid}")
    return MorseBottSystem(
        sys.orbits, new, sys.m0, sys.m1, sys.m2cc, sys.grading_modulus
    )
