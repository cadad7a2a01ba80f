"""Access paths: symbolic names for values reached from a package import.

A path starts at an imported package and records how a value was reached:
property reads, call results, argument positions, and ``new`` instances.
The canonical serialized form is the stable interchange format used in
JSONL/CSV files and model JSON::

    require(http).request(1)(0)
    require(events).EventEmitter[new]()

i.e. ``require(<pkg>)`` followed by steps ``.name`` (property read), ``()``
(call result), ``(<digits>)`` (argument position) or ``[new]()`` (instance).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

# Node-style listener registration methods. Calls to these return their
# receiver, so a trailing `.on()` in a path aliases the path before it.
REGISTRATION_METHODS = frozenset(
    {"on", "once", "addListener", "prependOnceListener", "prependListener"}
)

# Hard cap on path length (steps). Cycle collapsing keeps resolution finite
# but unbounded chains are useless for modelling; the miner drops longer
# paths and counts them in its diagnostics.
MAX_PATH_LEN = 16

_IDENT_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*\Z")


class PathSyntaxError(ValueError):
    """Raised when a serialized access path cannot be parsed."""


@dataclass(frozen=True)
class PropertyRead:
    name: str

    def __post_init__(self) -> None:
        if not _IDENT_RE.match(self.name):
            raise PathSyntaxError(f"invalid property name: {self.name!r}")


@dataclass(frozen=True)
class CallReturn:
    pass


@dataclass(frozen=True)
class Argument:
    index: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise PathSyntaxError(f"negative argument index: {self.index}")


@dataclass(frozen=True)
class Instance:
    pass


PathStep = PropertyRead | CallReturn | Argument | Instance


@dataclass(frozen=True)
class AccessPath:
    root_package: str
    steps: tuple[PathStep, ...] = ()

    def __post_init__(self) -> None:
        if not self.root_package:
            raise PathSyntaxError("empty root package")
        if any(ch in self.root_package for ch in "()") or any(
            ch.isspace() for ch in self.root_package
        ):
            raise PathSyntaxError(f"invalid root package: {self.root_package!r}")

    def extended(self, step: PathStep) -> AccessPath:
        return AccessPath(self.root_package, self.steps + (step,))

    def __str__(self) -> str:
        return serialize_path(self)


def serialize_path(path: AccessPath) -> str:
    parts = [f"require({path.root_package})"]
    for step in path.steps:
        if isinstance(step, PropertyRead):
            parts.append(f".{step.name}")
        elif isinstance(step, CallReturn):
            parts.append("()")
        elif isinstance(step, Argument):
            parts.append(f"({step.index})")
        else:
            parts.append("[new]()")
    return "".join(parts)


def parse_path(text: str) -> AccessPath:
    """Parse a canonical serialization back into an :class:`AccessPath`.

    Inverse of :func:`serialize_path` on all valid paths.
    """
    if not text.startswith("require("):
        raise PathSyntaxError(f"path must start with 'require(': {text!r}")
    end = text.find(")", len("require("))
    if end < 0:
        raise PathSyntaxError(f"unterminated package name: {text!r}")
    root = text[len("require(") : end]
    path = AccessPath(root)  # validates the root
    pos = end + 1
    steps: list[PathStep] = []
    while pos < len(text):
        ch = text[pos]
        if ch == ".":
            match = re.match(r"[A-Za-z_$][A-Za-z0-9_$]*", text[pos + 1 :])
            if not match:
                raise PathSyntaxError(f"expected property name at {pos} in {text!r}")
            steps.append(PropertyRead(match.group()))
            pos += 1 + match.end()
        elif ch == "(":
            close = text.find(")", pos)
            if close < 0:
                raise PathSyntaxError(f"unterminated '(' at {pos} in {text!r}")
            inner = text[pos + 1 : close]
            if inner == "":
                steps.append(CallReturn())
            elif inner.isdigit():
                steps.append(Argument(int(inner)))
            else:
                raise PathSyntaxError(f"bad step '({inner})' in {text!r}")
            pos = close + 1
        elif text.startswith("[new]()", pos):
            steps.append(Instance())
            pos += len("[new]()")
        else:
            raise PathSyntaxError(f"unexpected character {ch!r} at {pos} in {text!r}")
    return AccessPath(root, tuple(steps))


def rewrite_chained_aliases(path: AccessPath) -> AccessPath:
    """Collapse trailing registration-method calls onto their receiver.

    Every suffix ``.on()`` / ``.once()`` / ... denotes the same object as the
    path before it, so it is deleted, repeatedly, until no such suffix is
    left. Idempotent. Argument steps after a registration method (callback
    parameter paths such as ``require(http).request().on(1)(0)``) are kept:
    they denote the callback's arguments, not the receiver.
    """
    steps = path.steps
    while (
        len(steps) >= 2
        and isinstance(steps[-1], CallReturn)
        and isinstance(steps[-2], PropertyRead)
        and steps[-2].name in REGISTRATION_METHODS
    ):
        steps = steps[:-2]
    if steps is path.steps:
        return path
    return AccessPath(path.root_package, steps)
