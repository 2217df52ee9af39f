"""Shared primitives: event-id space, sequence labels, core containers."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

# Event ids mined from log templates are dense integers starting at 0.
# The top of the 31-bit id space is reserved for sentinels so that padding
# events can never collide with a template id and so that the smallest-id
# tie-break prefers real events over sentinels.
RESERVED_FLOOR = 0x7FFFFFF0
SEQUENCE_START = 0x7FFFFFFF  # padding sentinel: context before the first event
SEQUENCE_END = 0x7FFFFFFE  # padding sentinel: predicted sequence termination
OVERFLOW_EVENT = 0x7FFFFFFD  # frozen-miner id for lines matching no template


class DataFormatError(Exception):
    """A file does not conform to one of the documented file contracts."""


class Label(enum.Enum):
    NORMAL = "Normal"
    ANOMALY = "Anomaly"
    UNLABELED = "Unlabeled"

    @classmethod
    def from_string(cls, text: str) -> "Label":
        try:
            return _LABELS_BY_NAME[text.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown label {text!r}") from None


_LABELS_BY_NAME = {label.value.lower(): label for label in Label}


@dataclass
class EventSequence:
    """One test run / session as an ordered list of event ids.

    Events never contain sentinels; padding is applied by the model.
    """

    session_id: str
    events: list[int] = field(default_factory=list)
    label: Label = Label.UNLABELED

    def __len__(self) -> int:
        return len(self.events)


def check_events(events, *, what: str = "sequence") -> None:
    """Reject sequences that already contain sentinel or negative ids."""
    for e in events:
        if e < 0 or e >= RESERVED_FLOOR:
            raise ValueError(f"{what} contains reserved event id {e}")
