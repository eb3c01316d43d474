"""Phase-free n-qubit Pauli strings.

A Pauli string here is just a word over the letters ``I``, ``X``, ``Y``,
``Z`` -- one letter per qubit, no sign, no coefficient.  Signs are erased
at the type level: readout design only ever asks *which* product operator
a measurement reaches, never with what phase, so carrying phases around
would only invite bookkeeping bugs.

Strings order lexicographically with ``I < X < Y < Z``, which coincides
with reading the word as a base-4 number (I=0, X=1, Y=2, Z=3).  That
numeric index is what the cover machinery uses to address incidence-matrix
rows.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

LETTERS = "IXYZ"

MAX_QUBITS = 12

_LETTER_VALUE = {c: i for i, c in enumerate(LETTERS)}

_INDEXED_TOKEN = re.compile(r"([IXYZ])(\d+)")


@dataclass(frozen=True, order=True)
class PauliString:
    """An n-site word over {I, X, Y, Z}; immutable and phase-free."""

    letters: str

    def __post_init__(self) -> None:
        if not self.letters:
            raise ValueError("empty Pauli string")
        bad = set(self.letters) - set(LETTERS)
        if bad:
            raise ValueError(
                f"invalid Pauli letters {sorted(bad)!r} in {self.letters!r} "
                "(letters are case-sensitive, one of I, X, Y, Z)"
            )
        if len(self.letters) > MAX_QUBITS:
            raise ValueError(
                f"{len(self.letters)} qubits exceeds the supported maximum "
                f"of {MAX_QUBITS}"
            )

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        """Number of non-identity letters."""
        return len(self.letters) - self.letters.count("I")

    @property
    def is_identity(self) -> bool:
        return set(self.letters) == {"I"}

    def index(self) -> int:
        """Position in the base-4 ordering of all width-n strings.

        The all-I string has index 0, so the universe position of a
        non-identity string is ``index() - 1``.
        """
        value = 0
        for c in self.letters:
            value = value * 4 + _LETTER_VALUE[c]
        return value

    def __str__(self) -> str:
        return self.letters

    def __repr__(self) -> str:
        return f"PauliString({self.letters!r})"


def weight(p: PauliString) -> int:
    """Count of non-I letters in ``p`` (0 <= weight <= n)."""
    return p.weight


def parse_pauli(text: str, n: int | None = None) -> PauliString:
    """Parse a Pauli string from text.

    Two input forms are accepted:

    * positional -- ``"XZI"`` means X on qubit 1, Z on qubit 2, I on 3;
    * indexed    -- ``"X1Z2"`` lists only the non-identity sites (1-based).
      Width is taken from ``n`` when given, else from the largest index.

    The positional form is also what :func:`format_pauli` emits; the
    indexed form is accepted on input only.  Letters are case-sensitive.
    """
    if not text:
        raise ValueError("empty Pauli string")
    if any(c.isdigit() for c in text):
        return _parse_indexed(text, n)
    p = PauliString(text)
    if n is not None and p.n != n:
        raise ValueError(f"expected {n} qubits, got {p.n} in {text!r}")
    return p


def _parse_indexed(text: str, n: int | None) -> PauliString:
    pos = 0
    sites: dict[int, str] = {}
    for m in _INDEXED_TOKEN.finditer(text):
        if m.start() != pos:
            raise ValueError(f"malformed indexed Pauli string {text!r}")
        letter, q = m.group(1), int(m.group(2))
        if q < 1:
            raise ValueError(f"qubit index {q} out of range in {text!r}")
        if q in sites:
            raise ValueError(f"qubit {q} listed twice in {text!r}")
        sites[q] = letter
        pos = m.end()
    if pos != len(text) or not sites:
        raise ValueError(f"malformed indexed Pauli string {text!r}")
    width = n if n is not None else max(sites)
    if max(sites) > width:
        raise ValueError(f"qubit index {max(sites)} exceeds width {width}")
    return PauliString("".join(sites.get(q, "I") for q in range(1, width + 1)))


def format_pauli(p: PauliString) -> str:
    """Positional text form; inverse of :func:`parse_pauli`."""
    return p.letters


@dataclass(frozen=True)
class PauliSet:
    """A set of equal-width Pauli strings with a deterministic iteration order."""

    n: int
    members: frozenset[PauliString]

    def __post_init__(self) -> None:
        for p in self.members:
            if p.n != self.n:
                raise ValueError(
                    f"member {p} has width {p.n}, expected {self.n}"
                )

    @classmethod
    def of(cls, members) -> "PauliSet":
        members = frozenset(members)
        if not members:
            raise ValueError("cannot infer width of an empty PauliSet")
        return cls(next(iter(members)).n, members)

    def __contains__(self, p: PauliString) -> bool:
        return p in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[PauliString]:
        return iter(sorted(self.members))

    def to_strings(self) -> list[str]:
        """JSON-friendly form: sorted list of positional strings."""
        return [p.letters for p in self]


def enumerate_basis(n: int) -> PauliSet:
    """All 4**n - 1 non-identity width-n strings.

    Iterating the result yields them in lexicographic order (I < X < Y < Z),
    i.e. in increasing base-4 index.
    """
    check_qubit_count(n)
    members = []
    for value in range(1, 4**n):
        digits = []
        v = value
        for _ in range(n):
            digits.append(LETTERS[v % 4])
            v //= 4
        members.append(PauliString("".join(reversed(digits))))
    return PauliSet(n, frozenset(members))


def check_qubit_count(n: int) -> None:
    if not isinstance(n, int) or not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count must be an integer in 1..{MAX_QUBITS}, got {n!r}")
