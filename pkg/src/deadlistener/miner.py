"""Listener-registration mining over JavaScript source trees.

Finds calls to the Node-style registration methods (``on``, ``once``,
``addListener``, ``prependOnceListener``, ``prependListener``) whose first
argument is a constant string and whose second argument is function-valued,
then resolves each receiver to an access path with a context- and
flow-insensitive def-use analysis. Resolution is intra-file: a receiver
that cannot be traced to a package import inside its own file yields no
occurrence and is counted in the diagnostics.

The def-use map is flow-insensitive: a variable assigned several times
contributes every resolvable candidate path, and each candidate produces
its own pair occurrence. Cycles between bindings are cut at the first
revisit (a binding already on the resolution stack contributes the paths
computed for it so far), which keeps resolution finite.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .jsparse import Location, ParseError, SyntaxNode, SyntaxTree, parse_source
from .paths import (
    MAX_PATH_LEN,
    REGISTRATION_METHODS,
    AccessPath,
    Argument,
    CallReturn,
    Instance,
    PropertyRead,
    rewrite_chained_aliases,
)

# Member names whose calls perform reflective dispatch; paths through them
# conflate too many runtime values, so resolution stops there.
_REFLECTIVE_CALLS = frozenset({"apply", "bind", "call"})

DEFAULT_EXTENSIONS = (".js",)
OPTIONAL_EXTENSIONS = (".jsx", ".mjs", ".cjs")

_SKIPPED_DIRS = frozenset({"node_modules", "bower_components"})


@dataclass(frozen=True)
class RawRegistration:
    receiver_node: SyntaxNode
    method_name: str
    event_name: str
    callback_node: SyntaxNode
    location: Location


@dataclass(frozen=True)
class PairOccurrence:
    path: AccessPath
    event: str
    root_package: str
    project_id: str
    file: str
    line: int


@dataclass
class MiningDiagnostics:
    files_scanned: int = 0
    files_parsed: int = 0
    parse_errors: list[tuple[str, int, str]] = field(default_factory=list)
    registrations_seen: int = 0
    unresolved_receivers: int = 0
    dropped_long_paths: int = 0

    def merge(self, other: "MiningDiagnostics") -> None:
        self.files_scanned += other.files_scanned
        self.files_parsed += other.files_parsed
        self.parse_errors.extend(other.parse_errors)
        self.registrations_seen += other.registrations_seen
        self.unresolved_receivers += other.unresolved_receivers
        self.dropped_long_paths += other.dropped_long_paths

    def summary(self) -> dict:
        return {
            "files_scanned": self.files_scanned,
            "files_parsed": self.files_parsed,
            "parse_errors": len(self.parse_errors),
            "registrations_seen": self.registrations_seen,
            "unresolved_receivers": self.unresolved_receivers,
            "dropped_long_paths": self.dropped_long_paths,
        }


class _Scope:
    __slots__ = ("function", "parent", "bindings")

    def __init__(self, function: SyntaxNode | None, parent: "_Scope | None"):
        self.function = function
        self.parent = parent
        self.bindings: dict[str, _Binding] = {}

    def lookup(self, name: str) -> "_Binding | None":
        scope: _Scope | None = self
        while scope is not None:
            binding = scope.bindings.get(name)
            if binding is not None:
                return binding
            scope = scope.parent
        return None

    def declare(self, name: str) -> "_Binding":
        binding = self.bindings.get(name)
        if binding is None:
            binding = _Binding(name)
            self.bindings[name] = binding
        return binding


class _Binding:
    __slots__ = ("name", "param_of", "param_index", "assigned")

    def __init__(self, name: str):
        self.name = name
        self.param_of: SyntaxNode | None = None
        self.param_index: int | None = None
        self.assigned: list[SyntaxNode] = []


class DefUseAnalysis:
    """Flow-insensitive def-use map and access-path resolver for one file.

    Builds a scope tree (program scope plus one scope per function literal),
    records every expression assigned to each binding, and tracks which
    call-argument slots each function literal may flow into. ``resolve``
    then walks those facts to produce the candidate access paths of any
    expression in the tree.
    """

    def __init__(self, tree: SyntaxTree, diagnostics: MiningDiagnostics | None = None):
        self.tree = tree
        self.diagnostics = diagnostics or MiningDiagnostics()
        self.program_scope = _Scope(None, None)
        self._scope_of_function: dict[int, _Scope] = {}
        self._enclosing: dict[int, _Scope] = {}
        # function-literal id -> [(callee node, argument index)]
        self._placements: dict[int, list[tuple[SyntaxNode, int]]] = {}
        self._pending: list[tuple[SyntaxNode, SyntaxNode, int]] = []
        self._done: dict[int, tuple[AccessPath, ...]] = {}
        self._active: dict[int, list[AccessPath]] = {}
        self._declare_pass(tree.body, self.program_scope)
        self._use_pass(tree.body, self.program_scope)
        self._attach_indirect_placements()

    # -- construction passes

    def _function_scope(self, node: SyntaxNode, parent: _Scope) -> _Scope:
        scope = self._scope_of_function.get(id(node))
        if scope is None:
            scope = _Scope(node, parent)
            self._scope_of_function[id(node)] = scope
            for index, param in enumerate(node.params):
                if param is None:
                    continue
                binding = scope.declare(param)
                binding.param_of = node
                binding.param_index = index
            if node.name:  # named function expressions see their own name
                scope.declare(node.name).assigned.append(node)
        return scope

    def _declare_pass(self, nodes: Iterable[SyntaxNode], scope: _Scope) -> None:
        for node in nodes:
            if node.kind == "function-literal":
                inner = self._function_scope(node, scope)
                self._declare_pass(node.children, inner)
                continue
            if node.kind == "assignment" and node.declares:
                target = node.children[0]
                if target.kind == "identifier" and target.name:
                    scope.declare(target.name)
            self._declare_pass(node.children, scope)

    def _use_pass(self, nodes: Iterable[SyntaxNode], scope: _Scope) -> None:
        for node in nodes:
            self._enclosing[id(node)] = scope
            if node.kind == "function-literal":
                inner = self._function_scope(node, scope)
                self._use_pass(node.children, inner)
                continue
            if node.kind == "assignment":
                target = node.children[0]
                if target.kind == "identifier" and target.name and len(node.children) > 1:
                    binding = scope.lookup(target.name)
                    if binding is None:
                        # Undeclared assignment: implicit program-level name.
                        binding = self.program_scope.declare(target.name)
                    binding.assigned.append(node.children[1])
            elif node.kind in ("call", "instantiation") and not node.has_spread:
                callee = node.children[0]
                for index, arg in enumerate(node.children[1:]):
                    if arg.kind == "function-literal":
                        self._placements.setdefault(id(arg), []).append((callee, index))
                    elif arg.kind == "identifier":
                        self._pending.append((arg, callee, index))
            self._use_pass(node.children, scope)

    def _attach_indirect_placements(self) -> None:
        for ident, callee, index in self._pending:
            scope = self._enclosing.get(id(ident))
            if scope is None or not ident.name:
                continue
            binding = scope.lookup(ident.name)
            if binding is None:
                continue
            for func in self._function_values(binding, set()):
                self._placements.setdefault(id(func), []).append((callee, index))
        self._pending.clear()

    def _function_values(self, binding: _Binding, visited: set[int]) -> Iterator[SyntaxNode]:
        if id(binding) in visited:
            return
        visited.add(id(binding))
        for expr in binding.assigned:
            if expr.kind == "function-literal":
                yield expr
            elif expr.kind == "identifier" and expr.name:
                scope = self._enclosing.get(id(expr))
                if scope is not None:
                    inner = scope.lookup(expr.name)
                    if inner is not None:
                        yield from self._function_values(inner, visited)

    # -- queries

    def is_function_valued(self, node: SyntaxNode) -> bool:
        if node.kind == "function-literal":
            return True
        if node.kind == "identifier" and node.name:
            scope = self._enclosing.get(id(node))
            if scope is None:
                return False
            binding = scope.lookup(node.name)
            if binding is None:
                return False
            return next(self._function_values(binding, set()), None) is not None
        return False

    def binding_paths(self, name: str) -> tuple[AccessPath, ...]:
        """Candidate paths of every binding with this name, any scope."""
        found: list[AccessPath] = []
        scopes = [self.program_scope] + list(self._scope_of_function.values())
        for scope in scopes:
            binding = scope.bindings.get(name)
            if binding is not None:
                for path in self._resolve_binding(binding):
                    if path not in found:
                        found.append(path)
        return tuple(found)

    def resolve(self, node: SyntaxNode) -> tuple[AccessPath, ...]:
        """Candidate access paths of an expression; empty when untraceable."""
        key = id(node)
        cached = self._done.get(key)
        if cached is not None:
            return cached
        if key in self._active:
            return tuple(self._active[key])
        partial: list[AccessPath] = []
        self._active[key] = partial
        try:
            for path in self._resolve_inner(node):
                if path is not None and path not in partial:
                    partial.append(path)
        finally:
            del self._active[key]
        result = tuple(partial)
        self._done[key] = result
        return result

    def _resolve_binding(self, binding: _Binding) -> Iterator[AccessPath]:
        key = id(binding)
        if key in self._active:
            yield from tuple(self._active[key])
            return
        partial: list[AccessPath] = []
        self._active[key] = partial
        try:
            if binding.param_of is not None and binding.param_index is not None:
                for base in self.resolve(binding.param_of):
                    path = self._extend(base, Argument(binding.param_index))
                    if path is not None and path not in partial:
                        partial.append(path)
                        yield path
            for expr in binding.assigned:
                for path in self.resolve(expr):
                    if path not in partial:
                        partial.append(path)
                        yield path
        finally:
            del self._active[key]

    def _resolve_inner(self, node: SyntaxNode) -> Iterator[AccessPath | None]:
        kind = node.kind
        if kind == "import-call":
            spec = node.value or ""
            # Only package imports root access paths; relative/absolute
            # specifiers denote project-internal modules.
            if spec and not spec.startswith((".", "/")):
                yield AccessPath(spec)
            return
        if kind == "identifier":
            scope = self._enclosing.get(id(node))
            if scope is None or not node.name:
                return
            binding = scope.lookup(node.name)
            if binding is None:
                return
            yield from self._resolve_binding(binding)
            return
        if kind == "member-access":
            if node.computed or not node.name:
                return
            for base in self.resolve(node.children[0]):
                yield self._extend(base, PropertyRead(node.name))
            return
        if kind == "call":
            if node.has_spread:
                return
            callee = node.children[0]
            if callee.kind == "member-access" and callee.name in _REFLECTIVE_CALLS:
                return
            for base in self.resolve(callee):
                extended = self._extend(base, CallReturn())
                if extended is not None:
                    yield rewrite_chained_aliases(extended)
            return
        if kind == "instantiation":
            if node.has_spread:
                return
            for base in self.resolve(node.children[0]):
                yield self._extend(base, Instance())
            return
        if kind == "function-literal":
            for callee, index in self._placements.get(id(node), ()):
                for base in self.resolve(callee):
                    yield self._extend(base, Argument(index))
            return
        if kind == "assignment" and len(node.children) > 1:
            yield from self.resolve(node.children[1])
            return
        if kind == "other" and node.value in ("||", "&&", "??") and len(node.children) == 2:
            # short-circuit operators evaluate to one of their operands
            for child in node.children:
                yield from self.resolve(child)
            return
        if kind == "other" and node.value == "?:" and len(node.children) == 3:
            # conditional value: either branch, never the test
            for child in node.children[1:]:
                yield from self.resolve(child)
            return
        # string literals and everything else carry no path

    def _extend(self, base: AccessPath, step) -> AccessPath | None:
        if len(base.steps) >= MAX_PATH_LEN:
            self.diagnostics.dropped_long_paths += 1
            return None
        return base.extended(step)


def extract_registrations(
    tree: SyntaxTree, analysis: DefUseAnalysis | None = None
) -> list[RawRegistration]:
    """Every call to a registration method with a constant event name and a
    function-valued callback. Non-matching calls are silently skipped."""
    if analysis is None:
        analysis = DefUseAnalysis(tree)
    found: list[RawRegistration] = []
    for node in tree.walk():
        if node.kind != "call" or len(node.children) < 3:
            continue
        callee = node.children[0]
        if callee.kind != "member-access" or callee.computed:
            continue
        if callee.name not in REGISTRATION_METHODS:
            continue
        event_arg = node.children[1]
        callback_arg = node.children[2]
        if event_arg.kind != "string-literal" or not event_arg.value:
            continue
        if not analysis.is_function_valued(callback_arg):
            continue
        found.append(
            RawRegistration(
                receiver_node=callee.children[0],
                method_name=callee.name,
                event_name=event_arg.value,
                callback_node=callback_arg,
                location=node.loc,
            )
        )
    return found


def mine_source(
    text: str, file_id: str, project_id: str, diagnostics: MiningDiagnostics
) -> list[PairOccurrence]:
    """Mine one file's text; parse failures are recorded, never raised."""
    diagnostics.files_scanned += 1
    try:
        tree = parse_source(text, file_id)
    except ParseError as exc:
        diagnostics.parse_errors.append((exc.file, exc.line, exc.message))
        return []
    except RecursionError:
        diagnostics.parse_errors.append((file_id, 0, "nesting too deep"))
        return []
    diagnostics.files_parsed += 1
    analysis = DefUseAnalysis(tree, diagnostics)
    occurrences: list[PairOccurrence] = []
    for registration in extract_registrations(tree, analysis):
        diagnostics.registrations_seen += 1
        candidates = analysis.resolve(registration.receiver_node)
        if not candidates:
            diagnostics.unresolved_receivers += 1
            continue
        for path in candidates:
            path = rewrite_chained_aliases(path)
            occurrences.append(
                PairOccurrence(
                    path=path,
                    event=registration.event_name,
                    root_package=path.root_package,
                    project_id=project_id,
                    file=file_id,
                    line=registration.location.line,
                )
            )
    return occurrences


def iter_source_files(root: Path, extensions: Iterable[str] = DEFAULT_EXTENSIONS) -> list[Path]:
    suffixes = {e if e.startswith(".") else f".{e}" for e in extensions}
    files: list[Path] = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames[:] = sorted(
            d for d in dirnames if d not in _SKIPPED_DIRS and not d.startswith(".")
        )
        for name in sorted(filenames):
            if Path(name).suffix in suffixes:
                files.append(Path(dirpath) / name)
    return files


def mine_project(
    project_root: str | Path,
    project_id: str | None = None,
    extensions: Iterable[str] = DEFAULT_EXTENSIONS,
) -> tuple[list[PairOccurrence], MiningDiagnostics]:
    """Mine every matching file under a project root.

    Occurrences are not deduplicated: counts are occurrence-level. Raises
    OSError when the root is missing or unreadable (fatal for this project
    only); per-file problems land in the diagnostics instead.
    """
    root = Path(project_root)
    if not root.is_dir():
        raise OSError(f"project root is not a readable directory: {root}")
    if project_id is None:
        project_id = root.name or str(root)
    diagnostics = MiningDiagnostics()
    occurrences: list[PairOccurrence] = []
    for path in iter_source_files(root, extensions):
        rel = path.relative_to(root).as_posix()
        try:
            text = path.read_text(encoding="utf-8", errors="replace")
        except OSError as exc:
            diagnostics.parse_errors.append((rel, 0, f"unreadable: {exc}"))
            diagnostics.files_scanned += 1
            continue
        occurrences.extend(mine_source(text, rel, project_id, diagnostics))
    return occurrences, diagnostics
