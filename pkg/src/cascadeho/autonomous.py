"""Autonomous (S^1-symmetric) systems: cylinder counts and block formulas.

For autonomous data the whole differential is determined by integer counts
of simple cylinders between good orbits (``mj1``), the multiplicities of the
orbits, and a small set of user-supplied "extra" blocks that the symmetry
argument does not pin down.  From these we assemble:

* the cylindrical (EGH) differential delta.kappa over Q on good orbits,
* the integral block differential on check/hat generators,
* the BV operator (check a -> d(a) hat a on good orbits), and
* the U-truncated equivariant complex and its homology.

``compare_egh`` re-runs the standard spectral comparison: the span of
everything except the U^0 check generators of good orbits is an acyclic
(over Q) subcomplex whose quotient is exactly the EGH complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Tuple

from .errors import CascadehoError, ValidationFailure
from .exact import (
    ChainComplex,
    ChainGenerator,
    HomologyResult,
    IntMatrix,
    homology,
    verify_square_zero,
)
from .mbs import Orbit, Violation

Pair = Tuple[str, str]
GenKey = Tuple[str, str]  # (flavor, orbit)


@dataclass(frozen=True)
class CylinderRecord:
    """One simple holomorphic cylinder between good orbits.

    ``epsilon`` is its sign, ``du`` the covering multiplicity of the
    underlying somewhere-injective cylinder (du divides gcd(d+, d-)).
    """

    epsilon: int
    du: int

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise ValueError("epsilon must be +-1")
        if self.du < 1:
            raise ValueError("du must be a positive integer")


@dataclass
class AutonomousData:
    orbits: Dict[str, Orbit]
    mj1: Dict[Pair, List[CylinderRecord]] = field(default_factory=dict)
    extra: Dict[Tuple[GenKey, GenKey], int] = field(default_factory=dict)

    def orbit(self, oid: str) -> Orbit:
        return self.orbits[oid]

    def good_orbits(self) -> List[str]:
        return sorted(
            (o for o in self.orbits.values() if o.good),
            key=lambda o: (-o.action, o.oid),
        )


def _gen_grading(data: AutonomousData, key: GenKey) -> int:
    flavor, oid = key
    orbit = data.orbit(oid)
    if orbit.grading is None:
        raise ValidationFailure(
            [Violation("missing-grading", oid, "autonomous data needs gradings")]
        )
    return orbit.grading + (flavor == "hat")


def validate_data(data: AutonomousData) -> List[Violation]:
    v: List[Violation] = []

    def check(ok, code, where, msg):
        if not ok:
            v.append(Violation(code, where, msg))

    for oid, orbit in data.orbits.items():
        check(orbit.grading is not None, "missing-grading", oid,
              "integer grading required")
        if orbit.grading is not None:
            check((orbit.grading - orbit.parity) % 2 == 0, "grading-parity",
                  oid, "grading parity != CZ parity")
        if not orbit.good:
            check(orbit.d % 2 == 0, "bad-orbit-multiplicity", oid,
                  "bad orbit must have even multiplicity")

    for (top, bottom), cylinders in sorted(data.mj1.items()):
        where = f"mj1({top},{bottom})"
        if top not in data.orbits or bottom not in data.orbits:
            check(False, "unknown-orbit", where, "unknown orbit id")
            continue
        a, b = data.orbit(top), data.orbit(bottom)
        check(a.good and b.good, "cylinder-bad-orbit", where,
              "cylinder records live between good orbits")
        check(b.action < a.action, "action-axiom", where,
              "action does not decrease")
        check(a.homotopy_class == b.homotopy_class, "class-axiom", where,
              "cylinders preserve the homotopy class")
        if a.grading is not None and b.grading is not None:
            check(a.grading - b.grading == 1, "grading-axiom", where,
                  "cylinder grading gap != 1")
        for cyl in cylinders:
            check(gcd(a.d, b.d) % cyl.du == 0, "du-divisibility", where,
                  f"du = {cyl.du} does not divide gcd({a.d}, {b.d})")

    for (src, tgt), coeff in sorted(data.extra.items()):
        where = f"extra({src[0]}:{src[1]} -> {tgt[0]}:{tgt[1]})"
        if not coeff:
            continue
        if src[1] not in data.orbits or tgt[1] not in data.orbits:
            check(False, "unknown-orbit", where, "unknown orbit id")
            continue
        a, b = data.orbit(src[1]), data.orbit(tgt[1])
        slot = (src[0], tgt[0])
        if slot == ("check", "hat"):
            legal = True
        elif slot == ("hat", "hat"):
            legal = not a.good
        elif slot == ("check", "check"):
            legal = not b.good
        else:
            legal = False
        check(legal, "extra-slot", where,
              "coefficient sits in a slot the block formulas determine")
        check(b.action < a.action, "action-axiom", where,
              "action does not decrease")
        check(a.homotopy_class == b.homotopy_class, "class-axiom", where,
              "extra entries preserve the homotopy class")
        try:
            gap = _gen_grading(data, src) - _gen_grading(data, tgt)
            check(gap == 1, "grading-axiom", where, f"grading gap {gap} != 1")
        except ValidationFailure:
            pass  # reported above
    return v


def _require_valid(data: AutonomousData):
    violations = validate_data(data)
    if violations:
        raise ValidationFailure(violations)


def delta(data: AutonomousData) -> Dict[Pair, Fraction]:
    """<delta a, b> = sum of epsilon/du over simple cylinders a -> b."""
    out: Dict[Pair, Fraction] = {}
    for pair, cylinders in data.mj1.items():
        total = sum(Fraction(c.epsilon, c.du) for c in cylinders)
        if total:
            out[pair] = total
    return out


# ---------------------------------------------------------------------------
# cylindrical (EGH) complex over Q


def egh_differential(data: AutonomousData) -> Tuple[List[str], Dict[Pair, Fraction]]:
    """delta.kappa on good orbits: <d a, b> = d(a) * <delta a, b>.

    Returns the ordered list of good orbit ids and the nonzero entries.
    """
    _require_valid(data)
    dl = delta(data)
    order = [o.oid for o in data.good_orbits()]
    entries: Dict[Pair, Fraction] = {}
    for (a, b), val in dl.items():
        coeff = data.orbit(a).d * val
        if coeff:
            entries[(a, b)] = coeff
    _check_square_zero_rational(order, entries)
    return order, entries


def _check_square_zero_rational(order, entries):
    for a in order:
        for c in order:
            total = sum(
                entries.get((a, mid), 0) * entries.get((mid, c), 0)
                for mid in order
            )
            if total:
                raise CascadehoError(
                    f"EGH differential squares to {total} on ({a},{c})"
                )


def _dense_rank(rows: List[List[Fraction]]) -> int:
    a = [list(r) for r in rows]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    rank = col = 0
    while rank < nrows and col < ncols:
        piv = next((i for i in range(rank, nrows) if a[i][col]), None)
        if piv is None:
            col += 1
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(rank + 1, nrows):
            if a[i][col]:
                f = a[i][col] / a[rank][col]
                for j in range(col, ncols):
                    a[i][j] -= f * a[rank][j]
        rank += 1
        col += 1
    return rank


def egh_homology(data: AutonomousData) -> Dict[Tuple[str, int], int]:
    """Ranks of the cylindrical homology over Q, per (class, grading)."""
    order, entries = egh_differential(data)
    info = {oid: data.orbit(oid) for oid in order}
    blocks: Dict[Tuple[str, int], List[str]] = {}
    for oid in order:
        o = info[oid]
        blocks.setdefault((o.homotopy_class, o.grading), []).append(oid)

    def block_matrix(rows_key, cols_key):
        rows = blocks.get(rows_key, [])
        cols = blocks.get(cols_key, [])
        return [
            [entries.get((c, r), Fraction(0)) for c in cols] for r in rows
        ]

    out = {}
    for (cls, g), members in blocks.items():
        a = block_matrix((cls, g - 1), (cls, g))  # outgoing
        b = block_matrix((cls, g), (cls, g + 1))  # incoming
        rank_a = _dense_rank(a) if a and a[0] else 0
        rank_b = _dense_rank(b) if b and b[0] else 0
        free = len(members) - rank_a - rank_b
        if free:
            out[(cls, g)] = free
    return out


# ---------------------------------------------------------------------------
# integral block differential and the equivariant complex


def _gid(flavor: str, oid: str, k: Optional[int] = None) -> str:
    base = f"{flavor}:{oid}"
    return base if k is None else f"{base}:U{k}"


def block_entries(data: AutonomousData) -> Dict[Tuple[GenKey, GenKey], int]:
    """Integer matrix entries of the nonequivariant block differential."""
    dl = delta(data)
    entries: Dict[Tuple[GenKey, GenKey], int] = {}

    for (a, b), val in dl.items():
        da, db = data.orbit(a).d, data.orbit(b).d
        cc = da * val  # check block: +kappa-then-delta
        hh = -db * val  # hat block: -delta-then-kappa
        if cc:
            assert cc.denominator == 1, "du divisibility guarantees integrality"
            entries[(("check", a), ("check", b))] = cc.numerator
        if hh:
            assert hh.denominator == 1
            entries[(("hat", a), ("hat", b))] = hh.numerator

    for oid, orbit in data.orbits.items():
        if not orbit.good:
            entries[(("hat", oid), ("check", oid))] = -2

    for (src, tgt), coeff in data.extra.items():
        if coeff:
            entries[(src, tgt)] = entries.get((src, tgt), 0) + coeff
    return {k: v for k, v in entries.items() if v}


def _generator_list(data: AutonomousData, truncation: Optional[int]):
    order = sorted(data.orbits.values(), key=lambda o: (-o.action, o.oid))
    gens = []
    for orbit in order:
        for flavor in ("check", "hat"):
            base = _gen_grading(data, (flavor, orbit.oid))
            if truncation is None:
                gens.append(((flavor, orbit.oid, None), base, orbit))
            else:
                for k in range(truncation + 1):
                    gens.append(((flavor, orbit.oid, k), base + 2 * k, orbit))
    return gens


def _assemble(data, truncation):
    raw = block_entries(data)
    gens = _generator_list(data, truncation)
    index = {key: i for i, (key, _g, _o) in enumerate(gens)}
    entries: Dict[Tuple[int, int], int] = {}

    def add(src_key, tgt_key, val):
        if val:
            ij = (index[tgt_key], index[src_key])
            entries[ij] = entries.get(ij, 0) + val

    ks = [None] if truncation is None else list(range(truncation + 1))
    for ((sf, so), (tf, to)), val in raw.items():
        for k in ks:
            add((sf, so, k), (tf, to, k), val)
    if truncation is not None:
        # BV tail: d(check a (x) U^k) gains d(a) * hat a (x) U^{k-1}
        for oid, orbit in data.orbits.items():
            if orbit.good:
                for k in range(1, truncation + 1):
                    add(("check", oid, k), ("hat", oid, k - 1), orbit.d)

    chain_gens = tuple(
        ChainGenerator(
            _gid(key[0], key[1], key[2]),
            grading,
            orbit.homotopy_class,
            orbit.action,
            orbit.oid,
        )
        for key, grading, orbit in gens
    )
    n = len(chain_gens)
    return ChainComplex(chain_gens, IntMatrix(n, n, entries))


def block_differential(data: AutonomousData) -> ChainComplex:
    """Nonequivariant complex (check/hat generators, integral)."""
    _require_valid(data)
    complex_ = _assemble(data, None)
    _check_block_identities(data)
    verify_square_zero(complex_)
    return complex_


def bv_operator(data: AutonomousData) -> IntMatrix:
    """Degree-1 BV operator: check a -> d(a) hat a on good orbits."""
    gens = _generator_list(data, None)
    index = {key: i for i, (key, _g, _o) in enumerate(gens)}
    entries = {}
    for oid, orbit in data.orbits.items():
        if orbit.good:
            entries[(index[("hat", oid, None)], index[("check", oid, None)])] = orbit.d
    n = len(gens)
    return IntMatrix(n, n, entries)


def _check_block_identities(data: AutonomousData):
    """kappa . check-block + hat-block . kappa = 0 and d+ . kappa = 0."""
    raw = block_entries(data)
    kappa = {
        oid: (orbit.d if orbit.good else 0) for oid, orbit in data.orbits.items()
    }
    for a in data.orbits:
        for b in data.orbits:
            cc = raw.get((("check", a), ("check", b)), 0)
            hh = raw.get((("hat", a), ("hat", b)), 0)
            if kappa[b] * cc + hh * kappa[a]:
                raise CascadehoError(
                    f"kappa-block identity fails on ({a}, {b}): "
                    f"{kappa[b]}*{cc} + {hh}*{kappa[a]} != 0"
                )
            dplus = raw.get((("hat", a), ("check", b)), 0)
            if a != b and dplus:
                raise CascadehoError(f"d+ has an off-diagonal entry ({a}, {b})")
        if kappa[a] and raw.get((("hat", a), ("check", a)), 0):
            raise CascadehoError(f"d+ . kappa != 0 at {a}")


def equivariant_differential(data: AutonomousData, truncation: int) -> ChainComplex:
    """d (x) 1 + d_1 (x) U^{-1} on generators up to U^truncation."""
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    _require_valid(data)
    _check_block_identities(data)
    complex_ = _assemble(data, truncation)
    verify_square_zero(complex_)
    return complex_


def equivariant_homology(
    data: AutonomousData, truncation: int, max_workers: Optional[int] = None
) -> Tuple[HomologyResult, int]:
    """Integral equivariant homology and its certified stable range 2K - 2.

    The stable range is verified by recomputing at truncation K - 1 and
    diffing both results below the smaller range.
    """
    result = homology(equivariant_differential(data, truncation), max_workers)
    stable = 2 * truncation - 2
    if truncation >= 2:
        smaller = homology(equivariant_differential(data, truncation - 1))
        cutoff = 2 * (truncation - 1) - 2
        if smaller.restricted(cutoff).groups != result.restricted(cutoff).groups:
            raise CascadehoError(
                "equivariant homology is not truncation-stable below "
                f"degree {cutoff}"
            )
    return result, stable


# ---------------------------------------------------------------------------
# comparison with the cylindrical theory


@dataclass(frozen=True)
class CompareStep:
    name: str
    ok: bool
    details: str = ""


@dataclass(frozen=True)
class CompareReport:
    steps: Tuple[CompareStep, ...]
    stable_range: int

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.steps)

    def describe(self) -> List[str]:
        lines = []
        for s in self.steps:
            mark = "ok" if s.ok else "FAIL"
            suffix = f" ({s.details})" if s.details else ""
            lines.append(f"[{mark}] {s.name}{suffix}")
        lines.append(f"stable range: degrees <= {self.stable_range}")
        return lines


def compare_egh(data: AutonomousData, truncation: int) -> CompareReport:
    """Four-step comparison of equivariant and cylindrical homology."""
    complex_ = equivariant_differential(data, truncation)
    gens = complex_.generators
    good = {o.oid for o in data.orbits.values() if o.good}
    excluded = {_gid("check", oid, 0) for oid in good}
    idx_excluded = {
        i for i, g in enumerate(gens) if g.gid in excluded
    }
    steps = []

    # (i) everything else is a subcomplex
    leaks = [
        (gens[j].gid, gens[i].gid)
        for (i, j), _val in complex_.differential.entries.items()
        if j not in idx_excluded and i in idx_excluded
    ]
    steps.append(
        CompareStep(
            "complement of U^0 good check generators is a subcomplex",
            not leaks,
            "; ".join(f"{a} -> {b}" for a, b in leaks[:3]),
        )
    )

    stable = 2 * truncation - 2

    # (ii) that subcomplex is acyclic over Q in the stable range
    kept = [i for i in range(len(gens)) if i not in idx_excluded]
    remap = {old: new for new, old in enumerate(kept)}
    sub_entries = {
        (remap[i], remap[j]): val
        for (i, j), val in complex_.differential.entries.items()
        if i in remap and j in remap
    }
    sub = ChainComplex(
        tuple(gens[i] for i in kept),
        IntMatrix(len(kept), len(kept), sub_entries),
    )
    bad_degrees = _nonzero_rational_degrees(sub, stable)
    steps.append(
        CompareStep(
            "subcomplex is rationally acyclic in the stable range",
            not bad_degrees,
            ", ".join(map(str, sorted(bad_degrees)[:4])),
        )
    )

    # (iii) the quotient differential is the cylindrical one
    order, egh_entries = egh_differential(data)
    mismatches = []
    for a in good:
        for b in good:
            q = complex_.differential.get(
                complex_.index_of(_gid("check", b, 0)),
                complex_.index_of(_gid("check", a, 0)),
            )
            e = egh_entries.get((a, b), Fraction(0))
            if q != e:
                mismatches.append(f"({a},{b}): {q} != {e}")
    steps.append(
        CompareStep(
            "quotient differential equals the cylindrical differential",
            not mismatches,
            "; ".join(mismatches[:3]),
        )
    )

    # (iv) rationalised equivariant homology matches cylindrical ranks
    hom, stable = equivariant_homology(data, truncation)
    left = {
        k: v for k, v in hom.rationalize().items() if k[1] <= stable
    }
    right = {k: v for k, v in egh_homology(data).items() if k[1] <= stable}
    steps.append(
        CompareStep(
            "rationalised equivariant homology equals cylindrical homology",
            left == right,
            "" if left == right else f"{left} != {right}",
        )
    )
    return CompareReport(tuple(steps), stable)


def _nonzero_rational_degrees(complex_: ChainComplex, max_degree: int):
    gens = complex_.generators
    blocks: Dict[Tuple[str, int], List[int]] = {}
    for i, g in enumerate(gens):
        blocks.setdefault((g.homotopy_class, g.grading), []).append(i)

    d = complex_.differential

    def block(rows_key, cols_key):
        rows = blocks.get(rows_key, [])
        cols = blocks.get(cols_key, [])
        return [
            [Fraction(d.get(r, c)) for c in cols] for r in rows
        ]

    bad = set()
    for (cls, g), members in blocks.items():
        if g > max_degree:
            continue
        a = block((cls, g - 1), (cls, g))
        b = block((cls, g), (cls, g + 1))
        rank_a = _dense_rank(a) if a and a[0] else 0
        rank_b = _dense_rank(b) if b and b[0] else 0
        if len(members) - rank_a - rank_b:
            bad.add(g)
    return bad
