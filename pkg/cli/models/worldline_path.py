"""Occupation-number paths with unit jumps along hopping bonds."""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass

from cli.core.exceptions import DomainError, InvalidPathError
from cli.models.hamiltonian import State


@dataclass(frozen=True)
class JumpEvent:
    """One quantum hop on ``bond = (i, j)``: ``+1`` moves j → i, ``-1`` moves i → j."""

    bond: tuple[int, int]
    direction: int

    def __post_init__(self) -> None:
        if self.direction not in (1, -1):
            raise DomainError(f"direction must be ±1, got {self.direction}")
        if self.bond[0] == self.bond[1]:
            raise DomainError(f"bond {self.bond} connects a site to itself")

    @property
    def receiver(self) -> int:
        return self.bond[0] if self.direction == 1 else self.bond[1]

    @property
    def source(self) -> int:
        return self.bond[1] if self.direction == 1 else self.bond[0]

    def apply(self, state: State) -> State:
        after = list(state)
        after[self.receiver] += 1
        after[self.source] -= 1
        return tuple(after)


@dataclass(frozen=True)
class WorldlinePath:
    initial_state: State
    events: tuple[JumpEvent, ...] = ()

    @property
    def order(self) -> int:
        return len(self.events)

    def states(self) -> tuple[State, ...]:
        """``n(0) → n(1) → … → n(p)``; raises if any occupation goes negative."""
        if any(n < 0 for n in self.initial_state):
            raise InvalidPathError(f"negative initial occupation {self.initial_state}")
        seq = [tuple(self.initial_state)]
        for k, event in enumerate(self.events):
            if max(event.bond) >= len(self.initial_state):
                raise InvalidPathError(f"event {k} uses bond {event.bond} outside the lattice")
            nxt = event.apply(seq[-1])
            if nxt[event.source] < 0:
                raise InvalidPathError(f"event {k} empties site {event.source} below zero")
            seq.append(nxt)
        return tuple(seq)

    def jumps(self) -> Iterator[tuple[State, JumpEvent]]:
        """Each event with the state just before it; open paths are rejected."""
        states = self.states()
        if states[-1] != tuple(self.initial_state):
            raise InvalidPathError(
                f"path from {tuple(self.initial_state)} ends at {states[-1]}; it must close"
            )
        return zip(states, self.events, strict=False)

    @property
    def is_closed(self) -> bool:
        return self.states()[-1] == tuple(self.initial_state)
