"""Phase-stripped readout operations acting on Pauli strings.

A readout operation is the action of a Clifford unitary on Pauli words
with all signs discarded.  Every operation supported here normalises to

* a qubit permutation (from SWAP generators), applied first, then
* one letter permutation of {X, Y, Z} per site (from pi/2 rotations).

That normal form is the identity of the operation: two generator words
with the same action compare (and hash) equal.  It also makes two facts
structural rather than checked: every operation is a bijection of the
Pauli basis, and every operation preserves Pauli weight (letters map to
letters, never to I).

Generator grammar (``*`` joins factors, the rightmost factor acts first,
matching the usual operator-product convention)::

    I | Rx<q> | Ry<q> | Rz<q> | SW<q1><q2>      e.g.  Rx1*Ry2*SW13

Rotations are pi/2 and sign-free: Rx swaps Y<->Z, Ry swaps X<->Z,
Rz swaps X<->Y.  SWAP indices are decimal and 1-based; for widths >= 10 a
token like ``SW112`` is split at the shortest valid first index (so
``SW112`` reads as qubits 1 and 12, never 11 and 2).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .pauli import PauliString, check_qubit_count

LetterPerm = tuple[str, str, str]  # images of (X, Y, Z)

IDENTITY_PERM: LetterPerm = ("X", "Y", "Z")

# Phase-stripped action of the pi/2 rotations on {X, Y, Z}.  The sign of
# the rotation angle is irrelevant once phases are dropped, so each is an
# involution.  tests/test_clifford.py re-derives these from 2x2 matrices.
ROTATION_PERMS: dict[str, LetterPerm] = {
    "Rx": ("X", "Z", "Y"),
    "Ry": ("Z", "Y", "X"),
    "Rz": ("Y", "X", "Z"),
}

_LETTER_POS = {"X": 0, "Y": 1, "Z": 2}

# Canonical generator word for each letter permutation (name order: the
# rightmost token acts first).  The two 3-cycles need two rotations.
_PERM_TOKENS: dict[LetterPerm, tuple[str, ...]] = {
    ("X", "Y", "Z"): (),
    ("X", "Z", "Y"): ("Rx",),
    ("Z", "Y", "X"): ("Ry",),
    ("Y", "X", "Z"): ("Rz",),
    ("Y", "Z", "X"): ("Rx", "Ry"),
    ("Z", "X", "Y"): ("Rx", "Rz"),
}

_TOKEN_RE = re.compile(r"^(I|R[xyz](\d+)|SW(\d+))$")


def _apply_perm(perm: LetterPerm, letter: str) -> str:
    if letter == "I":
        return "I"
    return perm[_LETTER_POS[letter]]


def _compose_perms(outer: LetterPerm, inner: LetterPerm) -> LetterPerm:
    return (
        _apply_perm(outer, inner[0]),
        _apply_perm(outer, inner[1]),
        _apply_perm(outer, inner[2]),
    )


@dataclass(frozen=True)
class Generator:
    """One generator token: identity, a pi/2 rotation, or a SWAP."""

    kind: str  # "I" | "Rx" | "Ry" | "Rz" | "SW"
    q1: int | None = None
    q2: int | None = None

    def __post_init__(self) -> None:
        if self.kind == "I":
            if self.q1 is not None or self.q2 is not None:
                raise ValueError("identity generator takes no qubit indices")
        elif self.kind in ROTATION_PERMS:
            if self.q1 is None or self.q1 < 1 or self.q2 is not None:
                raise ValueError(f"{self.kind} needs exactly one 1-based qubit index")
        elif self.kind == "SW":
            if self.q1 is None or self.q2 is None or self.q1 < 1 or self.q2 < 1:
                raise ValueError("SW needs two 1-based qubit indices")
            if self.q1 == self.q2:
                raise ValueError("SW qubits must differ")
        else:
            raise ValueError(f"unknown generator kind {self.kind!r}")

    def op(self, n: int) -> "ReadoutOp":
        check_qubit_count(n)
        if self.kind == "I":
            return identity_op(n)
        if self.kind == "SW":
            if max(self.q1, self.q2) > n:
                raise ValueError(f"qubit index {max(self.q1, self.q2)} exceeds width {n}")
            return swap_op(self.q1, self.q2, n)
        if self.q1 > n:
            raise ValueError(f"qubit index {self.q1} exceeds width {n}")
        return rotation_op(self.kind, self.q1, n)


@dataclass(frozen=True)
class ReadoutOp:
    """A readout operation in normal form.

    ``sigma[k]`` is the (0-based) position that qubit ``k``'s letter moves
    to; ``site_perms[q]`` is the letter permutation applied at final
    position ``q``.  ``name`` is the canonical generator word and does not
    take part in equality -- equal actions compare equal regardless of how
    they were spelt.
    """

    n: int
    site_perms: tuple[LetterPerm, ...]
    sigma: tuple[int, ...]
    name: str = field(compare=False)

    @property
    def is_identity(self) -> bool:
        return all(p == IDENTITY_PERM for p in self.site_perms) and all(
            self.sigma[k] == k for k in range(self.n)
        )

    @property
    def swap_count(self) -> int:
        """Number of SWAP generators in the canonical decomposition."""
        return sum(len(c) - 1 for c in _cycles(self.sigma))

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"ReadoutOp({self.name!r}, n={self.n})"


def _cycles(sigma: tuple[int, ...]) -> list[list[int]]:
    """Nontrivial cycles of sigma, each rotated to start at its minimum."""
    seen = [False] * len(sigma)
    cycles = []
    for start in range(len(sigma)):
        if seen[start] or sigma[start] == start:
            seen[start] = True
            continue
        cyc = []
        k = start
        while not seen[k]:
            seen[k] = True
            cyc.append(k)
            k = sigma[k]
        cycles.append(cyc)
    return cycles


def _canonical_name(n: int, site_perms: tuple[LetterPerm, ...], sigma: tuple[int, ...]) -> str:
    tokens: list[str] = []
    for q in range(n):
        for kind in _PERM_TOKENS[site_perms[q]]:
            tokens.append(f"{kind}{q + 1}")
    # A cycle (c1 c2 ... cm) factors into SWAPs applied in the order
    # (c1 c2), (c1 c3), ..., (c1 cm); name order is right-to-left.
    for cyc in _cycles(sigma):
        c1 = cyc[0]
        for cj in reversed(cyc[1:]):
            tokens.append(f"SW{c1 + 1}{cj + 1}")
    return "*".join(tokens) if tokens else "I"


def _make_op(n: int, site_perms: tuple[LetterPerm, ...], sigma: tuple[int, ...]) -> ReadoutOp:
    return ReadoutOp(n, site_perms, sigma, _canonical_name(n, site_perms, sigma))


def identity_op(n: int) -> ReadoutOp:
    check_qubit_count(n)
    return _make_op(n, (IDENTITY_PERM,) * n, tuple(range(n)))


def rotation_op(kind: str, q: int, n: int) -> ReadoutOp:
    """Pi/2 rotation ``kind`` in {"Rx","Ry","Rz"} on 1-based qubit ``q``."""
    check_qubit_count(n)
    if not 1 <= q <= n:
        raise ValueError(f"qubit index {q} out of range 1..{n}")
    perms = [IDENTITY_PERM] * n
    perms[q - 1] = ROTATION_PERMS[kind]
    return _make_op(n, tuple(perms), tuple(range(n)))


def swap_op(q1: int, q2: int, n: int) -> ReadoutOp:
    """SWAP of 1-based qubits ``q1`` and ``q2``."""
    check_qubit_count(n)
    if not (1 <= q1 <= n and 1 <= q2 <= n) or q1 == q2:
        raise ValueError(f"bad SWAP pair ({q1}, {q2}) for width {n}")
    sigma = list(range(n))
    sigma[q1 - 1], sigma[q2 - 1] = sigma[q2 - 1], sigma[q1 - 1]
    return _make_op(n, (IDENTITY_PERM,) * n, tuple(sigma))


def conjugate(op: ReadoutOp, p: PauliString) -> PauliString:
    """Image of ``p`` under ``op``: permute qubits, then permute letters.

    The identity operation fixes everything; every operation fixes the
    all-I string and preserves weight.
    """
    if op.n != p.n:
        raise ValueError(f"width mismatch: op on {op.n} qubits, string on {p.n}")
    out = [""] * op.n
    for k in range(op.n):
        dest = op.sigma[k]
        out[dest] = _apply_perm(op.site_perms[dest], p.letters[k])
    return PauliString("".join(out))


def compose(outer: ReadoutOp, inner: ReadoutOp) -> ReadoutOp:
    """Operation acting as ``outer`` after ``inner`` (name: outer*inner)."""
    if outer.n != inner.n:
        raise ValueError(f"width mismatch: {outer.n} vs {inner.n}")
    n = outer.n
    sigma = tuple(outer.sigma[inner.sigma[k]] for k in range(n))
    inv_outer = [0] * n
    for k in range(n):
        inv_outer[outer.sigma[k]] = k
    perms = tuple(
        _compose_perms(outer.site_perms[q], inner.site_perms[inv_outer[q]])
        for q in range(n)
    )
    return _make_op(n, perms, sigma)


def parse_op(text: str, n: int) -> ReadoutOp:
    """Parse a generator word in the op grammar into its normal form."""
    check_qubit_count(n)
    if not text or not text.strip():
        raise ValueError("empty operation text")
    op = identity_op(n)
    for raw in text.strip().split("*"):
        token = raw.strip()
        op = compose(op, _parse_token(token, n).op(n))
    return op


def _parse_token(token: str, n: int) -> Generator:
    m = _TOKEN_RE.match(token)
    if not m:
        raise ValueError(f"bad generator token {token!r}")
    if token == "I":
        return Generator("I")
    if token.startswith("SW"):
        return Generator("SW", *_split_swap_digits(token[2:], n, token))
    kind, digits = token[:2], token[2:]
    if digits.startswith("0"):
        raise ValueError(f"bad qubit index in {token!r}")
    q = int(digits)
    if not 1 <= q <= n:
        raise ValueError(f"qubit index {q} out of range 1..{n} in {token!r}")
    return Generator(kind, q)


def _split_swap_digits(digits: str, n: int, token: str) -> tuple[int, int]:
    # Shortest valid first index wins, so SW112 at width 12 is (1, 12).
    for cut in range(1, len(digits)):
        a, b = digits[:cut], digits[cut:]
        if a.startswith("0") or b.startswith("0"):
            continue
        q1, q2 = int(a), int(b)
        if 1 <= q1 <= n and 1 <= q2 <= n and q1 != q2:
            return q1, q2
    raise ValueError(f"cannot read SWAP indices from {token!r} at width {n}")


def canonical_local_set(n: int) -> list[ReadoutOp]:
    """The 3**n local ops {I, Rx, Ry} per qubit, in product order.

    This is the default candidate set for homonuclear instances.
    """
    check_qubit_count(n)
    identity_sigma = tuple(range(n))
    ops = []
    for choice in itertools.product((None, "Rx", "Ry"), repeat=n):
        perms = tuple(
            ROTATION_PERMS[kind] if kind else IDENTITY_PERM for kind in choice
        )
        ops.append(_make_op(n, perms, identity_sigma))
    return ops


def single_probe_set(n: int, probe: int) -> list[ReadoutOp]:
    """Candidate ops for probe readout: local words composed after one
    SWAP of the probe with each qubit (the probe itself giving no swap).

    Ordered by swap target then local word; duplicates by normal form are
    dropped, keeping the first (lexicographically smallest) word.
    """
    check_qubit_count(n)
    if not 1 <= probe <= n:
        raise ValueError(f"probe {probe} out of range 1..{n}")
    ops: list[ReadoutOp] = []
    seen: set[tuple] = set()
    for j in range(1, n + 1):
        if j == probe:
            sigma = tuple(range(n))
        else:
            s = list(range(n))
            s[probe - 1], s[j - 1] = s[j - 1], s[probe - 1]
            sigma = tuple(s)
        for choice in itertools.product((None, "Rx", "Ry"), repeat=n):
            perms = tuple(
                ROTATION_PERMS[kind] if kind else IDENTITY_PERM for kind in choice
            )
            key = (perms, sigma)
            if key in seen:
                continue
            seen.add(key)
            ops.append(_make_op(n, perms, sigma))
    return ops
