"""CRN data model and firing semantics.

Species and reactions keep their declaration order; every matrix, report and
exploration in the package indexes them by that order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union


class NotEnabled(Exception):
    """Raised when a reaction is fired on a configuration that lacks reactants."""

    def __init__(self, reaction: str, species: str, needed: int, available: int,
                 position: int | None = None):
        self.reaction = reaction
        self.species = species
        self.needed = needed
        self.available = available
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(
            f"reaction {reaction!r}{where} needs {needed} {species} "
            f"but only {available} available")


@dataclass(frozen=True, order=False)
class ComplexVector:
    """Nonnegative integer vector over species indices.

    Used for complexes, configurations and reactant/product vectors. Only
    positive entries are stored, as sorted ``(index, count)`` pairs.
    """

    items: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        prev = -1
        for idx, cnt in self.items:
            if idx <= prev:
                raise ValueError("species indices must be strictly increasing")
            if cnt < 1:
                raise ValueError("stored counts must be positive")
            prev = idx

    @classmethod
    def from_mapping(cls, counts: Mapping[int, int]) -> "ComplexVector":
        for idx, cnt in counts.items():
            if cnt < 0:
                raise ValueError(f"negative count {cnt} for species {idx}")
        return cls(tuple(sorted((i, c) for i, c in counts.items() if c)))

    @classmethod
    def from_tuple(cls, counts: Sequence[int]) -> "ComplexVector":
        return cls.from_mapping(dict(enumerate(counts)))

    @classmethod
    def zero(cls) -> "ComplexVector":
        return cls(())

    def __getitem__(self, idx: int) -> int:
        for i, c in self.items:
            if i == idx:
                return c
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(self.items)

    def to_tuple(self, n: int) -> tuple[int, ...]:
        out = [0] * n
        for i, c in self.items:
            out[i] = c
        return tuple(out)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(i for i, _ in self.items)

    def size(self) -> int:
        return sum(c for _, c in self.items)

    def is_zero(self) -> bool:
        return not self.items

    def __le__(self, other: "ComplexVector") -> bool:
        mine = self.as_dict()
        theirs = other.as_dict()
        return all(theirs.get(i, 0) >= c for i, c in mine.items())

    def __lt__(self, other: "ComplexVector") -> bool:
        return self != other and self <= other

    def __ge__(self, other: "ComplexVector") -> bool:
        return other <= self

    def __gt__(self, other: "ComplexVector") -> bool:
        return other < self

    def __add__(self, other: "ComplexVector") -> "ComplexVector":
        acc = self.as_dict()
        for i, c in other.items:
            acc[i] = acc.get(i, 0) + c
        return ComplexVector.from_mapping(acc)

    def __sub__(self, other: "ComplexVector") -> "ComplexVector":
        acc = self.as_dict()
        for i, c in other.items:
            acc[i] = acc.get(i, 0) - c
        return ComplexVector.from_mapping(acc)

    def format(self, names: Sequence[str]) -> str:
        if not self.items:
            return "0"
        return " + ".join(
            names[i] if c == 1 else f"{c}{names[i]}" for i, c in self.items)


@dataclass(frozen=True)
class Species:
    name: str
    index: int


@dataclass(frozen=True)
class Reaction:
    name: str
    reactant: ComplexVector
    product: ComplexVector

    def displacement(self, n: int) -> tuple[int, ...]:
        r = self.reactant.to_tuple(n)
        p = self.product.to_tuple(n)
        return tuple(b - a for a, b in zip(r, p))


ReactionRef = Union[str, int, Reaction]


@dataclass(frozen=True)
class Crn:
    species: tuple[Species, ...]
    reactions: tuple[Reaction, ...]
    _reaction_index: dict = field(default=None, repr=False, compare=False,
                                  hash=False)

    def __post_init__(self):
        names = [s.name for s in self.species]
        if len(set(names)) != len(names):
            raise ValueError("species names must be unique")
        if [s.index for s in self.species] != list(range(len(self.species))):
            raise ValueError("species indices must be dense and ordered")
        rnames = [r.name for r in self.reactions]
        if len(set(rnames)) != len(rnames):
            raise ValueError("reaction names must be unique")
        n = len(self.species)
        for r in self.reactions:
            for idx in r.reactant.support | r.product.support:
                if not 0 <= idx < n:
                    raise ValueError(
                        f"reaction {r.name!r} references unknown species {idx}")
        object.__setattr__(self, "_reaction_index",
                           {name: i for i, name in enumerate(rnames)})

    @classmethod
    def build(cls, species: Iterable[str],
              reactions: Iterable[tuple[str, Mapping[str, int], Mapping[str, int]]]
              ) -> "Crn":
        """Build a CRN from species names and ``(name, reactants, products)``
        triples whose complexes map species names to counts."""
        sp = tuple(Species(name, i) for i, name in enumerate(species))
        idx = {s.name: s.index for s in sp}
        rx = tuple(
            Reaction(name,
                     ComplexVector.from_mapping({idx[k]: v for k, v in lhs.items()}),
                     ComplexVector.from_mapping({idx[k]: v for k, v in rhs.items()}))
            for name, lhs, rhs in reactions)
        return cls(sp, rx)

    @property
    def species_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.species)

    @property
    def reaction_names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.reactions)

    @property
    def num_species(self) -> int:
        return len(self.species)

    @property
    def num_reactions(self) -> int:
        return len(self.reactions)

    def reaction_index(self, ref: ReactionRef) -> int:
        if isinstance(ref, Reaction):
            ref = ref.name
        if isinstance(ref, int):
            if not 0 <= ref < len(self.reactions):
                raise KeyError(ref)
            return ref
        try:
            return self._reaction_index[ref]
        except KeyError:
            raise KeyError(f"unknown reaction {ref!r}") from None

    def reaction(self, ref: ReactionRef) -> Reaction:
        return self.reactions[self.reaction_index(ref)]

    def resolve_sequence(self, tau: Union[str, Sequence[ReactionRef]]) -> list[int]:
        """Turn a firing sequence into reaction indices.

        A string is split on whitespace/commas; a token that is not itself a
        reaction name is tokenized greedily by longest matching name, so
        ``"aabb"`` works when reactions are named with single letters.
        """
        if not isinstance(tau, str):
            return [self.reaction_index(r) for r in tau]
        out = []
        names = sorted(self._reaction_index, key=len, reverse=True)
        for token in re.split(r"[\s,]+", tau.strip()):
            if not token:
                continue
            if token in self._reaction_index:
                out.append(self._reaction_index[token])
                continue
            pos = 0
            while pos < len(token):
                for name in names:
                    if token.startswith(name, pos):
                        out.append(self._reaction_index[name])
                        pos += len(name)
                        break
                else:
                    raise KeyError(f"cannot resolve reaction at {token[pos:]!r}")
        return out

    def format_complex(self, c: ComplexVector) -> str:
        return c.format(self.species_names)

    def format_sequence(self, seq: Iterable[int]) -> str:
        names = [self.reactions[i].name for i in seq]
        if all(len(n) == 1 for n in names):
            return "".join(names)
        return " ".join(names)


@dataclass(frozen=True)
class ParikhVector:
    """Occurrence count of each reaction, indexed by declaration order."""

    counts: tuple[int, ...]

    @property
    def support(self) -> frozenset[int]:
        return frozenset(i for i, c in enumerate(self.counts) if c)

    def as_dict(self, crn: Crn) -> dict[str, int]:
        return {crn.reactions[i].name: c for i, c in enumerate(self.counts) if c}


def fire(c: ComplexVector, r: Reaction, crn: Crn | None = None) -> ComplexVector:
    """Fire ``r`` on configuration ``c``.

    Raises :class:`NotEnabled` naming the first species in short supply.
    """
    have = c.as_dict()
    for idx, need in r.reactant.items:
        if have.get(idx, 0) < need:
            name = crn.species[idx].name if crn is not None else str(idx)
            raise NotEnabled(r.name, name, need, have.get(idx, 0))
    for idx, need in r.reactant.items:
        have[idx] -= need
    for idx, made in r.product.items:
        have[idx] = have.get(idx, 0) + made
    return ComplexVector.from_mapping(have)


def enabled(c: ComplexVector, r: Reaction) -> bool:
    return r.reactant <= c


def fire_sequence(crn: Crn, c: ComplexVector,
                  tau: Union[str, Sequence[ReactionRef]]) -> ComplexVector:
    for pos, idx in enumerate(crn.resolve_sequence(tau)):
        try:
            c = fire(c, crn.reactions[idx], crn)
        except NotEnabled as exc:
            raise NotEnabled(exc.reaction, exc.species, exc.needed,
                             exc.available, position=pos) from None
    return c


def parikh(crn: Crn, tau: Union[str, Sequence[ReactionRef]]) -> ParikhVector:
    counts = [0] * crn.num_reactions
    for idx in crn.resolve_sequence(tau):
        counts[idx] += 1
    return ParikhVector(tuple(counts))
