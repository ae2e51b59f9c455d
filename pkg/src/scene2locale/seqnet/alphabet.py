from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

BLANK = "-"


@dataclass(frozen=True)
class Alphabet:
    """Label set of one recognizer head. Index 0 is always the blank."""

    labels: tuple[str, ...]
    blank: str = BLANK

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("alphabet labels must be unique")
        if self.blank in self.labels:
            raise ValueError(f"blank marker {self.blank!r} cannot be a real label")
        if not self.labels:
            raise ValueError("alphabet needs at least one label")

    @property
    def blank_index(self) -> int:
        return 0

    @property
    def size(self) -> int:
        return len(self.labels) + 1

    def symbol(self, index: int) -> str:
        if index == 0:
            return self.blank
        return self.labels[index - 1]

    def index(self, symbol: str) -> int:
        if symbol == self.blank:
            return 0
        try:
            return self.labels.index(symbol) + 1
        except ValueError:
            raise KeyError(f"{symbol!r} not in alphabet") from None

    def encode(self, text: str) -> list[int]:
        """Map a string (blank marker allowed) to class indices."""
        return [self.index(ch) for ch in text]

    def decode(self, indices) -> str:
        return "".join(self.symbol(int(i)) for i in indices)

    @classmethod
    def from_file(cls, path) -> "Alphabet":
        lines = [ln.rstrip("\r\n") for ln in Path(path).read_text(encoding="utf-8").splitlines()]
        lines = [ln for ln in lines if ln]
        if len(lines) < 2:
            raise ValueError(f"{path}: alphabet file needs a blank line marker and at least one label")
        return cls(tuple(lines[1:]), blank=lines[0])

    def to_file(self, path) -> None:
        Path(path).write_text("\n".join((self.blank,) + self.labels) + "\n", encoding="utf-8")


def builtin_alphabet(language: str) -> Alphabet:
    """Load one of the bundled alphabets (en, hi, te)."""
    ref = resources.files("scene2locale.data") / "alphabets" / f"{language}.txt"
    if not ref.is_file():
        raise KeyError(f"no bundled alphabet for language {language!r}")
    with resources.as_file(ref) as p:
        return Alphabet.from_file(p)
