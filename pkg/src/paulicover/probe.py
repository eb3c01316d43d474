"""Closed-form optimal schemes for single-probe readout.

When only one spin is observable, every candidate readout operation is a
local rotation word optionally preceded by one SWAP of the probe with
another qubit.  All of these preserve Pauli weight, and each acquisition
reads exactly two maximum-weight strings, so at least ceil(3**n / 2) =
(3**n + 1) / 2 acquisitions are needed.  ``construct`` builds a scheme
that meets the bound, recursively:

* one local word per tail pattern of the non-probe qubits (3**(n-1) ops),
  whose probe rotation is chosen per-op,
* plus the (n-1)-qubit scheme on the remaining qubits, lifted by turning
  its swaps into swaps with the new probe and prepending a per-op probe
  rotation.

The per-op probe rotations are the load-bearing subtlety: if every local
word left the probe untouched, the string with Z on the probe and I
everywhere else would never be read (no swap op can produce it, and
untouched locals keep the probe letter in {X, Y}).  Varying the probe
rotation across the lifted block restores full coverage at the same op
count; the recursion below is verified exhaustively in the test suite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .clifford import (
    IDENTITY_PERM,
    ROTATION_PERMS,
    ReadoutOp,
    _make_op,
)
from .pauli import check_qubit_count
from .settings import CoverInstance

# Probe-letter bookkeeping: the letter a local op's probe CANNOT read is
# r; excluding r means rotating the probe by _ROT_FOR_EXCLUDED[r].  The
# same map sends a lifted op's Z-image m to its probe rotation.
_ROT_FOR_EXCLUDED = {"Z": None, "Y": "Rx", "X": "Ry"}

# Tail letters: which rotation makes Z land on the given letter.
_ROT_FOR_LETTER = {"Z": None, "Y": "Rx", "X": "Ry"}


def f_star(n: int) -> int:
    """Minimum acquisitions for full tomography through one probe."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"qubit count must be a positive integer, got {n!r}")
    return (3**n + 1) // 2


@dataclass(frozen=True)
class ProbeScheme:
    """An optimal single-probe pulse list.

    ``claimed_optimum`` equals (3**n + 1) / 2 and ``pulses`` has exactly
    that many entries, each a local word with at most one probe SWAP.
    """

    n: int
    probe: int
    pulses: tuple[ReadoutOp, ...]
    claimed_optimum: int

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(op.name for op in self.pulses)


class _SpecOp:
    """Recursion-internal op: letter rotations plus at most one probe swap."""

    __slots__ = ("rot", "swap")

    def __init__(self, rot: dict[int, str], swap: int | None):
        self.rot = rot
        self.swap = swap


def _scheme(lo: int, n: int):
    """Scheme for qubits lo..n with probe lo.

    Returns (ops, chooser) where chooser maps each full-weight word over
    the register (a tuple of letters, probe first) to the index of the op
    designated to read it.  The chooser is what threads the probe-rotation
    choices through the recursion.
    """
    k = n - lo + 1
    if k == 1:
        ops = [_SpecOp({}, None), _SpecOp({lo: "Rx"}, None)]
        chooser = {("X",): 0, ("Y",): 0, ("Z",): 1}
        return ops, chooser

    small_ops, small_chooser = _scheme(lo + 1, n)
    # Z-image assignment for each lifted op; any non-constant choice
    # works, and "all Z except the second op" keeps most lifts swap-only.
    mu = ["Z"] * len(small_ops)
    mu[1] = "Y"

    ops: list[_SpecOp] = []
    local_index: dict[tuple, int] = {}
    for tail in itertools.product("XYZ", repeat=k - 1):
        excluded = mu[small_chooser[tail]]
        rot: dict[int, str] = {}
        probe_rot = _ROT_FOR_EXCLUDED[excluded]
        if probe_rot:
            rot[lo] = probe_rot
        for offset, letter in enumerate(tail):
            kind = _ROT_FOR_LETTER[letter]
            if kind:
                rot[lo + 1 + offset] = kind
        local_index[tail] = len(ops)
        ops.append(_SpecOp(rot, None))

    lift_index: list[int] = []
    for i, sop in enumerate(small_ops):
        rot = dict(sop.rot)
        probe_rot = _ROT_FOR_EXCLUDED[mu[i]]
        if probe_rot:
            rot[lo] = probe_rot
        lift_index.append(len(ops))
        ops.append(_SpecOp(rot, sop.swap if sop.swap is not None else lo + 1))

    chooser: dict[tuple, int] = {}
    for tail, li in local_index.items():
        excluded = mu[small_chooser[tail]]
        for letter in "XYZ":
            word = (letter,) + tail
            if letter != excluded:
                chooser[word] = li
            else:
                chooser[word] = lift_index[small_chooser[tail]]
    return ops, chooser


def _materialise(spec: _SpecOp, n: int, relabel: dict[int, int]) -> ReadoutOp:
    perms = [IDENTITY_PERM] * n
    for q, kind in spec.rot.items():
        perms[relabel[q] - 1] = ROTATION_PERMS[kind]
    sigma = list(range(n))
    if spec.swap is not None:
        a, b = relabel[1] - 1, relabel[spec.swap] - 1
        sigma[a], sigma[b] = sigma[b], sigma[a]
    return _make_op(n, tuple(perms), tuple(sigma))


def construct(n: int, probe: int = 1) -> ProbeScheme:
    """Build an optimal single-probe scheme of exactly f_star(n) pulses.

    The construction targets probe 1; other probes are handled by
    relabelling qubit 1 with the probe (an index permutation, no extra
    swaps).  Every pulse lies in the single-probe candidate family.
    """
    check_qubit_count(n)
    if not 1 <= probe <= n:
        raise ValueError(f"probe {probe} out of range 1..{n}")
    ops, _ = _scheme(1, n)
    relabel = {q: q for q in range(1, n + 1)}
    relabel[1], relabel[probe] = probe, 1
    pulses = tuple(_materialise(spec, n, relabel) for spec in ops)
    target = f_star(n)
    if len(pulses) != target or len(set(pulses)) != target:
        raise AssertionError(
            f"construction produced {len(pulses)} pulses, expected {target}"
        )
    return ProbeScheme(n=n, probe=probe, pulses=pulses, claimed_optimum=target)


def weight_bound(instance: CoverInstance) -> int:
    """Weight-stratified lower bound on the cover optimum.

    Readout operations cannot change Pauli weight (their normal form maps
    letters to letters), so each weight class must be covered from within
    itself: at least ceil(#class / max per-set class count) sets are
    needed, and the bound is the max over classes.  For a single-probe
    instance every set holds exactly two maximum-weight strings, making
    the bound (3**n + 1) / 2 -- it certifies ``construct`` without search.
    """
    masks = instance.weight_masks()
    best = 0
    for w in sorted(masks, reverse=True):
        mask = masks[w]
        u = mask.bit_count()
        if u == 0:
            continue
        per_set = max((col & mask).bit_count() for col in instance.columns)
        if per_set == 0:
            raise ValueError(
                f"no candidate reaches any weight-{w} element; instance infeasible"
            )
        bound = -(-u // per_set)
        if bound > best:
            best = bound
    return best
