"""Detection models, observable families, and cover-instance assembly.

A detection model says which product operators one acquisition can read
out.  Conjugating that observable family by each candidate readout
operation yields one subset of the Pauli basis per candidate; stacking
their membership indicators gives the 0-1 incidence matrix of a set-cover
instance over the 4**n - 1 non-identity strings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .clifford import ReadoutOp, conjugate
from .pauli import PauliSet, PauliString, check_qubit_count, enumerate_basis


@dataclass(frozen=True)
class HamiltonianSpec:
    """Chemical shifts and scalar couplings of a weakly coupled spin system.

    ``offsets`` (one per spin, frequency units) are carried for
    completeness but play no role in observable generation; only the
    coupling topology matters here.  ``couplings`` holds (k, j, J_kj)
    triples with k < j and J_kj != 0; symmetry and zero diagonal are
    implied by that storage.
    """

    n: int
    offsets: tuple[float, ...]
    couplings: tuple[tuple[int, int, float], ...]

    def __post_init__(self) -> None:
        check_qubit_count(self.n)
        if len(self.offsets) != self.n:
            raise ValueError(f"expected {self.n} offsets, got {len(self.offsets)}")
        seen = set()
        for k, j, value in self.couplings:
            if not (1 <= k < j <= self.n):
                raise ValueError(f"coupling ({k},{j}) must satisfy 1 <= k < j <= n")
            if (k, j) in seen:
                raise ValueError(f"duplicate coupling ({k},{j})")
            if value == 0:
                raise ValueError(f"coupling ({k},{j}) is zero; omit it instead")
            seen.add((k, j))

    @classmethod
    def from_couplings(cls, n, couplings, offsets=None) -> "HamiltonianSpec":
        """Build from any iterable of (k, j, J) with unordered pairs."""
        canon = tuple(
            sorted((min(k, j), max(k, j), float(v)) for k, j, v in couplings)
        )
        offs = tuple(offsets) if offsets is not None else (0.0,) * n
        return cls(n, offs, canon)

    def neighbors(self, m: int) -> frozenset[int]:
        """Spins coupled to spin ``m``."""
        out = set()
        for k, j, _ in self.couplings:
            if k == m:
                out.add(j)
            elif j == m:
                out.add(k)
        return frozenset(out)


@dataclass(frozen=True)
class DetectionModel:
    """What one acquisition observes.

    Variants:

    * ``homonuclear`` -- every spin's multiplets resolved; one spectrum
      reads all single-quantum operators (n * 2**n of them).
    * ``single_probe`` -- only the probe spin is observed; a spectrum
      reads {X,Y} on the probe with {I,Z} on everything else.
    * ``coupling_graph`` -- observed spins resolve splittings only from
      spins they are coupled to: {X,Y} on each observed spin, {I,Z} on
      its neighbors in the coupling graph, I elsewhere.  This generalises
      the other two variants and goes beyond the closed-form families, so
      treat it as a modelling convenience rather than settled ground truth.
    """

    kind: str  # "homonuclear" | "single_probe" | "coupling_graph"
    probe: int | None = None
    observed: tuple[int, ...] | None = None
    hamiltonian: HamiltonianSpec | None = None

    def __post_init__(self) -> None:
        if self.kind == "homonuclear":
            if self.probe is not None or self.observed is not None:
                raise ValueError("homonuclear model takes no probe/observed")
        elif self.kind == "single_probe":
            if self.probe is None or self.probe < 1:
                raise ValueError("single_probe model needs a 1-based probe index")
        elif self.kind == "coupling_graph":
            if self.hamiltonian is None:
                raise ValueError("coupling_graph model needs a HamiltonianSpec")
            if not self.observed:
                raise ValueError("coupling_graph model needs a non-empty observed set")
        else:
            raise ValueError(f"unknown detection model {self.kind!r}")

    @classmethod
    def homonuclear(cls) -> "DetectionModel":
        return cls("homonuclear")

    @classmethod
    def single_probe(cls, probe: int) -> "DetectionModel":
        return cls("single_probe", probe=probe)

    @classmethod
    def coupling_graph(cls, hamiltonian: HamiltonianSpec, observed) -> "DetectionModel":
        return cls(
            "coupling_graph",
            observed=tuple(sorted(set(observed))),
            hamiltonian=hamiltonian,
        )


def _single_quantum(n: int, m: int, tail_sites: frozenset[int]) -> list[PauliString]:
    """{X,Y} on spin m, {I,Z} on ``tail_sites``, I elsewhere."""
    out = []
    free = sorted(tail_sites)
    for head in "XY":
        for zpattern in itertools.product("IZ", repeat=len(free)):
            letters = ["I"] * n
            letters[m - 1] = head
            for site, letter in zip(free, zpattern):
                letters[site - 1] = letter
            out.append(PauliString("".join(letters)))
    return out


def observables(model: DetectionModel, n: int) -> PauliSet:
    """Observable family of one acquisition under ``model``."""
    check_qubit_count(n)
    members: list[PauliString] = []
    if model.kind == "homonuclear":
        everyone = frozenset(range(1, n + 1))
        for m in range(1, n + 1):
            members.extend(_single_quantum(n, m, everyone - {m}))
    elif model.kind == "single_probe":
        if model.probe > n:
            raise ValueError(f"probe {model.probe} out of range 1..{n}")
        everyone = frozenset(range(1, n + 1))
        members.extend(_single_quantum(n, model.probe, everyone - {model.probe}))
    else:
        if model.hamiltonian.n != n:
            raise ValueError(
                f"hamiltonian is for {model.hamiltonian.n} spins, instance has {n}"
            )
        for m in model.observed:
            if not 1 <= m <= n:
                raise ValueError(f"observed spin {m} out of range 1..{n}")
            members.extend(_single_quantum(n, m, model.hamiltonian.neighbors(m)))
    return PauliSet(n, frozenset(members))


@dataclass(frozen=True)
class CostRule:
    """Per-operation cost.  ``unit`` charges 1 for everything;
    ``locality_penalty`` charges 1 + alpha per SWAP generator, steering
    the optimiser toward local pulses."""

    kind: str  # "unit" | "locality_penalty"
    alpha: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if self.kind not in ("unit", "locality_penalty"):
            raise ValueError(f"unknown cost rule {self.kind!r}")

    @classmethod
    def unit(cls) -> "CostRule":
        return cls("unit")

    @classmethod
    def locality_penalty(cls, alpha) -> "CostRule":
        return cls("locality_penalty", Fraction(alpha))

    def cost(self, op: ReadoutOp) -> Fraction:
        if self.kind == "unit":
            return Fraction(1)
        value = 1 + self.alpha * op.swap_count
        if value <= 0:
            raise ValueError(f"cost rule assigns non-positive cost {value} to {op.name}")
        return value


@dataclass(frozen=True)
class CoverInstance:
    """A concrete set-cover instance over the non-identity Pauli basis.

    ``universe`` is the full basis in lexicographic order.  ``columns[j]``
    is an integer bitmask over universe positions with bit k set iff
    universe[k] lies in the j-th conjugated observable family; ``rows[k]``
    is the transpose bitmask over columns.  ``uncoverable`` lists universe
    elements no candidate reaches -- a non-empty value means no feasible
    cover exists (surfaced here rather than raised, so callers can report
    it).
    """

    n: int
    universe: tuple[PauliString, ...]
    ops: tuple[ReadoutOp, ...]
    sets: tuple[frozenset[PauliString], ...]
    costs: tuple[Fraction, ...]
    columns: tuple[int, ...]
    rows: tuple[int, ...]
    uncoverable: tuple[PauliString, ...]

    @property
    def coverable(self) -> bool:
        return not self.uncoverable

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(op.name for op in self.ops)

    def family_set(self, j: int) -> PauliSet:
        return PauliSet(self.n, self.sets[j])

    def weight_masks(self) -> dict[int, int]:
        """Universe bitmask per Pauli weight class."""
        masks: dict[int, int] = {}
        for k, p in enumerate(self.universe):
            w = p.weight
            masks[w] = masks.get(w, 0) | (1 << k)
        return masks


def build_instance(
    model: DetectionModel,
    candidates: list[ReadoutOp],
    cost_rule: CostRule | None = None,
    n: int | None = None,
) -> CoverInstance:
    """Assemble the cover instance for ``model`` and candidate ops.

    Each candidate contributes the conjugated observable family; the
    ops keep their list order (duplicates by normal form are dropped,
    keeping the first).  Construction is pure and deterministic: the same
    inputs give the same orderings and the same incidence matrix.
    """
    if not candidates:
        raise ValueError("no candidate operations")
    width = n if n is not None else candidates[0].n
    for op in candidates:
        if op.n != width:
            raise ValueError(
                f"candidate {op.name} has width {op.n}, expected {width}"
            )
    cost_rule = cost_rule or CostRule.unit()
    obs = observables(model, width)
    universe = tuple(enumerate_basis(width))

    ops: list[ReadoutOp] = []
    seen = set()
    for op in candidates:
        key = (op.site_perms, op.sigma)
        if key not in seen:
            seen.add(key)
            ops.append(op)

    sets = []
    columns = []
    for op in ops:
        images = frozenset(conjugate(op, o) for o in obs)
        mask = 0
        for p in images:
            mask |= 1 << (p.index() - 1)
        sets.append(images)
        columns.append(mask)

    rows = []
    uncoverable = []
    for k, p in enumerate(universe):
        row = 0
        for j, col in enumerate(columns):
            if col >> k & 1:
                row |= 1 << j
        rows.append(row)
        if row == 0:
            uncoverable.append(p)

    return CoverInstance(
        n=width,
        universe=universe,
        ops=tuple(ops),
        sets=tuple(sets),
        costs=tuple(cost_rule.cost(op) for op in ops),
        columns=tuple(columns),
        rows=tuple(rows),
        uncoverable=tuple(uncoverable),
    )
