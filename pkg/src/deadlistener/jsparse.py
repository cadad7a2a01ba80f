"""Best-effort parser for the JavaScript subset the miner understands.

Covers ES2017-style module code: ``require()`` calls and ES ``import``
declarations, const/let/var bindings (including destructuring), member
access, calls, ``new``, function/arrow/class literals, template strings and
the usual statement forms, with pragmatic automatic-semicolon insertion.
It is deliberately NOT a complete ECMAScript parser: files using syntax
outside the subset (e.g. JSX) raise :class:`ParseError` and are skipped
and recorded by corpus mining, which is best-effort by design.

The produced tree is flat-typed: every node is a :class:`SyntaxNode` whose
``kind`` is one of the nine values in :data:`NODE_KINDS`. Constructs the
miner does not reason about (binary operators, loops, object literals, ...)
become ``other`` nodes whose children are still fully parsed, so listener
registrations nested anywhere in a file are reachable by a plain walk.

Structural conventions:

* ``member-access``: children[0] is the object; ``name`` is the property
  (``computed`` member access keeps the index expression as children[1]
  and has no ``name``).
* ``call`` / ``instantiation``: children[0] is the callee, children[1:]
  are the arguments. Spread arguments set ``has_spread`` on the call.
* ``function-literal``: ``params`` holds positional parameter names
  (``None`` for patterns/rest), children are the body statements.
* ``assignment``: children are ``(target, value)`` or ``(target,)`` for a
  declaration without initializer; ``declares`` is True when the node
  came from a declaration (const/let/var, import, function/class name).
* ``import-call``: a leaf; ``value`` is the verbatim import specifier.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

NODE_KINDS = (
    "import-call",
    "identifier",
    "member-access",
    "call",
    "instantiation",
    "function-literal",
    "string-literal",
    "assignment",
    "other",
)


class Location(NamedTuple):
    file: str
    line: int  # 1-based
    col: int  # 0-based


class ParseError(Exception):
    def __init__(self, file: str, line: int, message: str):
        super().__init__(f"{file}:{line}: {message}")
        self.file = file
        self.line = line
        self.message = message


@dataclass
class SyntaxNode:
    kind: str
    loc: Location
    children: tuple["SyntaxNode", ...] = ()
    name: str | None = None  # identifier / member property / function name
    value: str | None = None  # string-literal value / import specifier
    params: tuple[str | None, ...] = ()  # function-literal positional params
    computed: bool = False  # member-access with [] indexing
    has_spread: bool = False  # call/instantiation with a spread argument
    declares: bool = False  # assignment introduced by a declaration

    def walk(self) -> Iterator["SyntaxNode"]:
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass
class SyntaxTree:
    file: str
    body: tuple[SyntaxNode, ...]

    def walk(self) -> Iterator[SyntaxNode]:
        for node in self.body:
            yield from node.walk()


# ---------------------------------------------------------------------------
# Tokenizer


@dataclass
class Token:
    type: str  # name | num | str | template | regex | punct | eof
    value: str
    line: int
    col: int
    nl_before: bool = False


_PUNCTS = [
    ">>>=",
    "===",
    "!==",
    "**=",
    "<<=",
    ">>=",
    ">>>",
    "...",
    "&&=",
    "||=",
    "??=",
    "?.",
    "??",
    "=>",
    "==",
    "!=",
    "<=",
    ">=",
    "&&",
    "||",
    "++",
    "--",
    "+=",
    "-=",
    "*=",
    "/=",
    "%=",
    "&=",
    "|=",
    "^=",
    "<<",
    ">>",
    "**",
    "{",
    "}",
    "(",
    ")",
    "[",
    "]",
    ";",
    ",",
    "<",
    ">",
    "+",
    "-",
    "*",
    "/",
    "%",
    "&",
    "|",
    "^",
    "!",
    "~",
    "?",
    ":",
    "=",
    ".",
    "@",
]

# Tokens after which a '/' starts a regex literal rather than division.
_REGEX_AFTER_NAME = {
    "return",
    "typeof",
    "instanceof",
    "in",
    "of",
    "new",
    "delete",
    "void",
    "throw",
    "case",
    "do",
    "else",
    "yield",
    "await",
}

_ID_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_$")
_ID_CONT = _ID_START | set("0123456789")

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", "v": "\v", "0": "\0"}


class _Tokenizer:
    def __init__(self, text: str, file: str):
        self.text = text
        self.file = file
        self.pos = 0
        self.line = 1
        self.line_start = 0
        self.tokens: list[Token] = []
        self.nl_pending = False

    def error(self, message: str) -> ParseError:
        return ParseError(self.file, self.line, message)

    def _advance_line(self, at: int) -> None:
        self.line += 1
        self.line_start = at + 1

    def run(self) -> list[Token]:
        text = self.text
        if text.startswith("#!"):  # hashbang scripts
            nl = text.find("\n")
            self.pos = len(text) if nl < 0 else nl
        while self.pos < len(text):
            ch = text[self.pos]
            if ch == "\n":
                self._advance_line(self.pos)
                self.nl_pending = True
                self.pos += 1
            elif ch in " \t\r\f\v ﻿":
                self.pos += 1
            elif text.startswith("//", self.pos):
                nl = text.find("\n", self.pos)
                self.pos = len(text) if nl < 0 else nl
            elif text.startswith("/*", self.pos):
                end = text.find("*/", self.pos + 2)
                if end < 0:
                    raise self.error("unterminated block comment")
                for i in range(self.pos, end):
                    if text[i] == "\n":
                        self._advance_line(i)
                        self.nl_pending = True
                self.pos = end + 2
            elif ch in _ID_START:
                self._name()
            elif ch == "#" and self.pos + 1 < len(text) and text[self.pos + 1] in _ID_START:
                self._name()  # private class member, e.g. #count
            elif ch.isdigit() or (ch == "." and self._peek_digit()):
                self._number()
            elif ch in "'\"":
                self._string(ch)
            elif ch == "`":
                self._template()
            elif ch == "/" and self._regex_allowed():
                self._regex()
            else:
                self._punct()
        self._emit("eof", "")
        return self.tokens

    def _peek_digit(self) -> bool:
        return self.pos + 1 < len(self.text) and self.text[self.pos + 1].isdigit()

    def _emit(self, type_: str, value: str, col: int | None = None) -> None:
        self.tokens.append(
            Token(
                type_,
                value,
                self.line,
                (self.pos if col is None else col) - self.line_start,
                self.nl_pending,
            )
        )
        self.nl_pending = False

    def _name(self) -> None:
        start = self.pos
        if self.text[self.pos] == "#":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos] in _ID_CONT:
            self.pos += 1
        value = self.text[start : self.pos]
        self.tokens.append(
            Token("name", value, self.line, start - self.line_start, self.nl_pending)
        )
        self.nl_pending = False

    def _number(self) -> None:
        start = self.pos
        text = self.text
        if text.startswith(("0x", "0X", "0o", "0O", "0b", "0B"), self.pos):
            self.pos += 2
            while self.pos < len(text) and (text[self.pos].isalnum() or text[self.pos] == "_"):
                self.pos += 1
        else:
            while self.pos < len(text) and (text[self.pos].isdigit() or text[self.pos] == "_"):
                self.pos += 1
            if self.pos < len(text) and text[self.pos] == ".":
                self.pos += 1
                while self.pos < len(text) and text[self.pos].isdigit():
                    self.pos += 1
            if self.pos < len(text) and text[self.pos] in "eE":
                self.pos += 1
                if self.pos < len(text) and text[self.pos] in "+-":
                    self.pos += 1
                while self.pos < len(text) and text[self.pos].isdigit():
                    self.pos += 1
        if self.pos < len(text) and text[self.pos] == "n":  # BigInt suffix
            self.pos += 1
        self.tokens.append(
            Token("num", text[start : self.pos], self.line, start - self.line_start, self.nl_pending)
        )
        self.nl_pending = False

    def _string(self, quote: str) -> None:
        start = self.pos
        text = self.text
        self.pos += 1
        out: list[str] = []
        while True:
            if self.pos >= len(text):
                raise self.error("unterminated string literal")
            ch = text[self.pos]
            if ch == quote:
                self.pos += 1
                break
            if ch == "\n":
                raise self.error("unterminated string literal")
            if ch == "\\":
                self.pos += 1
                if self.pos >= len(text):
                    raise self.error("unterminated string literal")
                esc = text[self.pos]
                if esc == "\n":  # line continuation
                    self._advance_line(self.pos)
                    self.pos += 1
                    continue
                if esc == "u":
                    if text[self.pos + 1 : self.pos + 2] == "{":
                        end = text.find("}", self.pos)
                        if end < 0:
                            raise self.error("bad unicode escape")
                        out.append(chr(int(text[self.pos + 2 : end], 16)))
                        self.pos = end + 1
                    else:
                        out.append(chr(int(text[self.pos + 1 : self.pos + 5], 16)))
                        self.pos += 5
                    continue
                if esc == "x":
                    out.append(chr(int(text[self.pos + 1 : self.pos + 3], 16)))
                    self.pos += 3
                    continue
                out.append(_ESCAPES.get(esc, esc))
                self.pos += 1
                continue
            out.append(ch)
            self.pos += 1
        self.tokens.append(
            Token("str", "".join(out), self.line, start - self.line_start, self.nl_pending)
        )
        self.nl_pending = False

    def _template(self) -> None:
        # Consume the whole template including ${...} interpolations as one
        # opaque token; expressions inside interpolations are not analyzed.
        start = self.pos
        start_col = self.pos - self.line_start
        text = self.text
        self.pos += 1
        depth = 0  # ${ } nesting
        while True:
            if self.pos >= len(text):
                raise self.error("unterminated template literal")
            ch = text[self.pos]
            if ch == "\\":
                self.pos += 2
                continue
            if ch == "\n":
                self._advance_line(self.pos)
                self.pos += 1
                continue
            if depth == 0 and ch == "`":
                self.pos += 1
                break
            if text.startswith("${", self.pos):
                depth += 1
                self.pos += 2
                continue
            if depth > 0 and ch == "{":
                depth += 1
            elif depth > 0 and ch == "}":
                depth -= 1
            self.pos += 1
        self.tokens.append(
            Token("template", text[start : self.pos], self.line, start_col, self.nl_pending)
        )
        self.nl_pending = False

    def _regex_allowed(self) -> bool:
        for tok in reversed(self.tokens):
            if tok.type == "punct":
                return tok.value not in (")", "]", "}")
            if tok.type == "name":
                return tok.value in _REGEX_AFTER_NAME
            return False  # num/str/template/regex end an expression
        return True

    def _regex(self) -> None:
        start = self.pos
        text = self.text
        self.pos += 1
        in_class = False
        while True:
            if self.pos >= len(text) or text[self.pos] == "\n":
                raise self.error("unterminated regex literal")
            ch = text[self.pos]
            if ch == "\\":
                self.pos += 2
                continue
            if ch == "[":
                in_class = True
            elif ch == "]":
                in_class = False
            elif ch == "/" and not in_class:
                self.pos += 1
                break
            self.pos += 1
        while self.pos < len(text) and text[self.pos] in _ID_CONT:
            self.pos += 1  # flags
        self.tokens.append(
            Token("regex", text[start : self.pos], self.line, start - self.line_start, self.nl_pending)
        )
        self.nl_pending = False

    def _punct(self) -> None:
        for punct in _PUNCTS:
            if self.text.startswith(punct, self.pos):
                self._emit("punct", punct)
                self.pos += len(punct)
                return
        raise self.error(f"unexpected character {self.text[self.pos]!r}")


# ---------------------------------------------------------------------------
# Parser

_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "**=", "<<=", ">>=", ">>>=", "&=", "|=", "^=", "&&=", "||=", "??="}

_BINARY_LEVELS = [
    {"??"},
    {"||"},
    {"&&"},
    {"|"},
    {"^"},
    {"&"},
    {"==", "!=", "===", "!=="},
    {"<", ">", "<=", ">=", "in", "instanceof"},
    {"<<", ">>", ">>>"},
    {"+", "-"},
    {"*", "/", "%"},
    {"**"},
]

_UNARY_OPS = {"!", "~", "+", "-", "typeof", "void", "delete", "await", "++", "--"}

_STMT_KEYWORDS = {
    "var",
    "let",
    "const",
    "function",
    "class",
    "return",
    "if",
    "for",
    "while",
    "do",
    "switch",
    "try",
    "throw",
    "break",
    "continue",
    "import",
    "export",
    "debugger",
}

# Names that may not start an arrow parameter / be a plain identifier
_RESERVED = {
    "var", "let", "const", "function", "class", "return", "if", "else", "for",
    "while", "do", "switch", "case", "default", "try", "catch", "finally",
    "throw", "break", "continue", "new", "delete", "typeof", "void",
    "instanceof", "in", "this", "null", "true", "false", "super", "import",
    "export", "extends",
}


class _Parser:
    def __init__(self, tokens: list[Token], file: str):
        self.tokens = tokens
        self.pos = 0
        self.file = file

    # -- token helpers

    def peek(self, offset: int = 0) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type != "eof":
            self.pos += 1
        return tok

    def at_punct(self, value: str) -> bool:
        tok = self.peek()
        return tok.type == "punct" and tok.value == value

    def at_name(self, value: str) -> bool:
        tok = self.peek()
        return tok.type == "name" and tok.value == value

    def eat_punct(self, value: str) -> bool:
        if self.at_punct(value):
            self.pos += 1
            return True
        return False

    def expect_punct(self, value: str) -> Token:
        if not self.at_punct(value):
            raise self.error(f"expected {value!r}, found {self._describe(self.peek())}")
        return self.next()

    def error(self, message: str) -> ParseError:
        return ParseError(self.file, self.peek().line, message)

    @staticmethod
    def _describe(tok: Token) -> str:
        return "end of file" if tok.type == "eof" else repr(tok.value)

    def loc(self, tok: Token | None = None) -> Location:
        tok = tok or self.peek()
        return Location(self.file, tok.line, tok.col)

    def _semicolon(self) -> None:
        # Automatic semicolon insertion: a real ';', a closing '}', end of
        # file, or a preceding line break all terminate a statement.
        if self.eat_punct(";"):
            return
        tok = self.peek()
        if tok.type == "eof" or self.at_punct("}") or tok.nl_before:
            return
        raise self.error(f"expected ';', found {self._describe(tok)}")

    # -- program

    def parse_program(self) -> list[SyntaxNode]:
        body: list[SyntaxNode] = []
        while self.peek().type != "eof":
            body.append(self.statement())
        return body

    # -- statements

    def statement(self) -> SyntaxNode:
        tok = self.peek()
        if tok.type == "punct":
            if tok.value == "{":
                return self.block()
            if tok.value == ";":
                self.next()
                return SyntaxNode("other", self.loc(tok))
            if tok.value == "@":  # decorators: consume expression, keep going
                self.next()
                self.parse_left_hand_side()
                return self.statement()
        if tok.type == "name":
            word = tok.value
            if word in ("var", "let", "const") and self._starts_binding(1):
                node = self.variable_declaration()
                self._semicolon()
                return node
            if word == "function" or (word == "async" and self.peek(1).type == "name" and self.peek(1).value == "function" and not self.peek(1).nl_before):
                return self.function_declaration()
            if word == "class":
                return self.class_declaration()
            if word == "return" or word == "throw":
                return self.return_or_throw()
            if word == "if":
                return self.if_statement()
            if word == "for":
                return self.for_statement()
            if word == "while":
                return self.while_statement()
            if word == "do":
                return self.do_statement()
            if word == "switch":
                return self.switch_statement()
            if word == "try":
                return self.try_statement()
            if word in ("break", "continue"):
                self.next()
                if self.peek().type == "name" and not self.peek().nl_before:
                    self.next()  # label
                self._semicolon()
                return SyntaxNode("other", self.loc(tok))
            if word == "debugger":
                self.next()
                self._semicolon()
                return SyntaxNode("other", self.loc(tok))
            if word == "import" and self.peek(1).type != "punct":
                return self.import_declaration()
            if word == "import" and self.peek(1).type == "punct" and self.peek(1).value not in ("(", "."):
                return self.import_declaration()
            if word == "export":
                return self.export_declaration()
            if self.peek(1).type == "punct" and self.peek(1).value == ":" and word not in _RESERVED:
                self.next()
                self.next()  # labeled statement
                return self.statement()
        expr = self.expression()
        self._semicolon()
        return expr

    def _starts_binding(self, offset: int) -> bool:
        tok = self.peek(offset)
        if tok.type == "name" and tok.value not in ("in", "instanceof"):
            return True
        return tok.type == "punct" and tok.value in ("{", "[")

    def block(self) -> SyntaxNode:
        start = self.expect_punct("{")
        body: list[SyntaxNode] = []
        while not self.eat_punct("}"):
            if self.peek().type == "eof":
                raise self.error("unterminated block")
            body.append(self.statement())
        return SyntaxNode("other", self.loc(start), tuple(body))

    def variable_declaration(self) -> SyntaxNode:
        start = self.next()  # var/let/const
        assigns: list[SyntaxNode] = []
        while True:
            assigns.extend(self.declarator())
            if not self.eat_punct(","):
                break
        if len(assigns) == 1:
            return assigns[0]
        return SyntaxNode("other", self.loc(start), tuple(assigns))

    def declarator(self) -> list[SyntaxNode]:
        tok = self.peek()
        if tok.type == "name":
            target = SyntaxNode("identifier", self.loc(tok), name=self.next().value)
            if self.eat_punct("="):
                value = self.assignment_expression()
                return [SyntaxNode("assignment", target.loc, (target, value), declares=True)]
            return [SyntaxNode("assignment", target.loc, (target,), declares=True)]
        if tok.type == "punct" and tok.value in ("{", "["):
            pattern = self.binding_pattern()
            if self.eat_punct("="):
                value = self.assignment_expression()
                return self._lower_pattern(pattern, value)
            return self._lower_pattern(pattern, None)
        raise self.error(f"expected binding, found {self._describe(tok)}")

    # Binding patterns are parsed into (name, accessor-chain) pairs, where
    # the chain is a list of property names; None marks a position that
    # cannot be expressed as property reads (array elements, rest, computed).
    def binding_pattern(self) -> list[tuple[str, list[str] | None, Location]]:
        out: list[tuple[str, list[str] | None, Location]] = []
        self._pattern_into(out, [])
        return out

    def _pattern_into(self, out: list, prefix: list[str] | None) -> None:
        if self.at_punct("{"):
            self.next()
            while not self.eat_punct("}"):
                if self.eat_punct("..."):
                    tok = self.next()
                    out.append((tok.value, None, self.loc(tok)))
                elif self.peek().type in ("name", "str", "num"):
                    key = self.next()
                    chain = None if prefix is None or key.type != "name" else prefix + [key.value]
                    if self.eat_punct(":"):
                        if self.peek().type == "name":
                            target = self.next()
                            self._maybe_default()
                            out.append((target.value, chain, self.loc(target)))
                        else:
                            self._pattern_into(out, chain)
                            self._maybe_default()
                    else:
                        self._maybe_default()
                        out.append((key.value, chain, self.loc(key)))
                elif self.at_punct("["):  # computed key
                    self.next()
                    self.assignment_expression()
                    self.expect_punct("]")
                    self.expect_punct(":")
                    if self.peek().type == "name":
                        tok = self.next()
                        self._maybe_default()
                        out.append((tok.value, None, self.loc(tok)))
                    else:
                        self._pattern_into(out, None)
                        self._maybe_default()
                else:
                    raise self.error("unsupported object pattern")
                if not self.eat_punct(","):
                    if not self.at_punct("}"):
                        raise self.error("expected ',' or '}' in pattern")
        elif self.at_punct("["):
            self.next()
            while not self.eat_punct("]"):
                if self.at_punct(","):
                    self.next()  # elision
                    continue
                if self.eat_punct("..."):
                    tok = self.next()
                    out.append((tok.value, None, self.loc(tok)))
                elif self.peek().type == "name":
                    tok = self.next()
                    self._maybe_default()
                    out.append((tok.value, None, self.loc(tok)))
                else:
                    self._pattern_into(out, None)
                    self._maybe_default()
                if not self.eat_punct(","):
                    if not self.at_punct("]"):
                        raise self.error("expected ',' or ']' in pattern")
        else:
            raise self.error("expected pattern")

    def _maybe_default(self) -> None:
        if self.eat_punct("="):
            self.assignment_expression()

    def _lower_pattern(
        self, pattern: list[tuple[str, list[str] | None, Location]], value: SyntaxNode | None
    ) -> list[SyntaxNode]:
        # const {request} = require('http')  =>  request = require(http).request
        assigns = []
        for name, chain, loc in pattern:
            target = SyntaxNode("identifier", loc, name=name)
            if value is not None and chain is not None:
                expr = value
                for prop in chain:
                    expr = SyntaxNode("member-access", loc, (expr,), name=prop)
                assigns.append(SyntaxNode("assignment", loc, (target, expr), declares=True))
            else:
                assigns.append(SyntaxNode("assignment", loc, (target,), declares=True))
        if value is not None and not any(chain is not None for _, chain, _ in pattern):
            # Keep the initializer reachable even if no name maps onto it.
            assigns.append(SyntaxNode("other", value.loc, (value,)))
        return assigns

    def function_declaration(self) -> SyntaxNode:
        start = self.peek()
        if self.at_name("async"):
            self.next()
        self.next()  # function
        self.eat_punct("*")
        if self.peek().type != "name":
            raise self.error("expected function name")
        name_tok = self.next()
        func = self._function_rest(self.loc(start), name_tok.value)
        target = SyntaxNode("identifier", self.loc(name_tok), name=name_tok.value)
        return SyntaxNode("assignment", self.loc(start), (target, func), declares=True)

    def _function_rest(self, loc: Location, name: str | None) -> SyntaxNode:
        params, synthetic = self.parameter_list()
        body = self.block()
        return SyntaxNode(
            "function-literal",
            loc,
            tuple(synthetic) + body.children,
            name=name,
            params=tuple(params),
        )

    def parameter_list(self) -> tuple[list[str | None], list[SyntaxNode]]:
        self.expect_punct("(")
        params: list[str | None] = []
        synthetic: list[SyntaxNode] = []  # bindings for pattern params
        while not self.eat_punct(")"):
            if self.eat_punct("..."):
                tok = self.next()
                params.append(None)
                synthetic.append(self._declare_only(tok.value, self.loc(tok)))
            elif self.peek().type == "name":
                tok = self.next()
                params.append(tok.value)
                self._maybe_default()
            elif self.peek().type == "punct" and self.peek().value in ("{", "["):
                pattern = self.binding_pattern()
                params.append(None)
                for pname, _, ploc in pattern:
                    synthetic.append(self._declare_only(pname, ploc))
                self._maybe_default()
            else:
                raise self.error(f"unsupported parameter {self._describe(self.peek())}")
            if not self.eat_punct(","):
                if not self.at_punct(")"):
                    raise self.error("expected ',' or ')' in parameters")
        return params, synthetic

    @staticmethod
    def _declare_only(name: str, loc: Location) -> SyntaxNode:
        target = SyntaxNode("identifier", loc, name=name)
        return SyntaxNode("assignment", loc, (target,), declares=True)

    def class_declaration(self) -> SyntaxNode:
        start = self.next()  # class
        name_tok = self.next() if self.peek().type == "name" else None
        cls = self._class_rest(self.loc(start))
        if name_tok is None:
            return cls
        target = SyntaxNode("identifier", self.loc(name_tok), name=name_tok.value)
        return SyntaxNode("assignment", self.loc(start), (target, cls), declares=True)

    def _class_rest(self, loc: Location) -> SyntaxNode:
        children: list[SyntaxNode] = []
        if self.at_name("extends"):
            self.next()
            children.append(self.parse_left_hand_side())
        self.expect_punct("{")
        while not self.eat_punct("}"):
            if self.eat_punct(";"):
                continue
            if self.peek().type == "eof":
                raise self.error("unterminated class body")
            children.append(self.class_member())
        return SyntaxNode("other", loc, tuple(children))

    def class_member(self) -> SyntaxNode:
        start = self.peek()
        while self.peek().type == "name" and self.peek().value in ("static", "async", "get", "set"):
            nxt = self.peek(1)
            if nxt.type == "punct" and nxt.value in ("(", "=", ";", "}"):
                break  # it was actually the member name
            self.next()
        self.eat_punct("*")
        if self.at_punct("["):  # computed member name
            self.next()
            self.assignment_expression()
            self.expect_punct("]")
        elif self.peek().type in ("name", "str", "num"):
            self.next()
        else:
            raise self.error(f"unsupported class member {self._describe(self.peek())}")
        if self.at_punct("("):
            return self._function_rest(self.loc(start), None)
        if self.eat_punct("="):
            value = self.assignment_expression()
            self._semicolon()
            return SyntaxNode("other", self.loc(start), (value,))
        self._semicolon()
        return SyntaxNode("other", self.loc(start))

    def return_or_throw(self) -> SyntaxNode:
        start = self.next()
        children: tuple[SyntaxNode, ...] = ()
        tok = self.peek()
        if not (tok.type == "eof" or self.at_punct(";") or self.at_punct("}") or tok.nl_before):
            children = (self.expression(),)
        self._semicolon()
        return SyntaxNode("other", self.loc(start), children)

    def if_statement(self) -> SyntaxNode:
        start = self.next()
        self.expect_punct("(")
        cond = self.expression()
        self.expect_punct(")")
        then = self.statement()
        children = [cond, then]
        if self.at_name("else"):
            self.next()
            children.append(self.statement())
        return SyntaxNode("other", self.loc(start), tuple(children))

    def for_statement(self) -> SyntaxNode:
        start = self.next()
        if self.at_name("await"):
            self.next()
        self.expect_punct("(")
        children: list[SyntaxNode] = []
        if not self.at_punct(";"):
            if self.peek().type == "name" and self.peek().value in ("var", "let", "const") and self._starts_binding(1):
                self.next()
                decls = self.declarator()
                if self.at_name("of") or self.at_name("in"):
                    self.next()
                    children.extend(decls)
                    children.append(self.assignment_expression())
                    self.expect_punct(")")
                    children.append(self.statement())
                    return SyntaxNode("other", self.loc(start), tuple(children))
                while self.eat_punct(","):
                    decls.extend(self.declarator())
                children.extend(decls)
            else:
                first = self.expression(no_in=True)
                if self.at_name("of") or self.at_name("in"):
                    self.next()
                    children.append(first)
                    children.append(self.assignment_expression())
                    self.expect_punct(")")
                    children.append(self.statement())
                    return SyntaxNode("other", self.loc(start), tuple(children))
                children.append(first)
        self.expect_punct(";")
        if not self.at_punct(";"):
            children.append(self.expression())
        self.expect_punct(";")
        if not self.at_punct(")"):
            children.append(self.expression())
        self.expect_punct(")")
        children.append(self.statement())
        return SyntaxNode("other", self.loc(start), tuple(children))

    def while_statement(self) -> SyntaxNode:
        start = self.next()
        self.expect_punct("(")
        cond = self.expression()
        self.expect_punct(")")
        return SyntaxNode("other", self.loc(start), (cond, self.statement()))

    def do_statement(self) -> SyntaxNode:
        start = self.next()
        body = self.statement()
        if not self.at_name("while"):
            raise self.error("expected 'while' after do body")
        self.next()
        self.expect_punct("(")
        cond = self.expression()
        self.expect_punct(")")
        self._semicolon()
        return SyntaxNode("other", self.loc(start), (body, cond))

    def switch_statement(self) -> SyntaxNode:
        start = self.next()
        self.expect_punct("(")
        children = [self.expression()]
        self.expect_punct(")")
        self.expect_punct("{")
        while not self.eat_punct("}"):
            if self.at_name("case"):
                self.next()
                children.append(self.expression())
                self.expect_punct(":")
            elif self.at_name("default"):
                self.next()
                self.expect_punct(":")
            elif self.peek().type == "eof":
                raise self.error("unterminated switch")
            else:
                children.append(self.statement())
        return SyntaxNode("other", self.loc(start), tuple(children))

    def try_statement(self) -> SyntaxNode:
        start = self.next()
        children = [self.block()]
        if self.at_name("catch"):
            self.next()
            synthetic: list[SyntaxNode] = []
            if self.eat_punct("("):
                if self.peek().type == "name":
                    tok = self.next()
                    synthetic.append(self._declare_only(tok.value, self.loc(tok)))
                else:
                    for pname, _, ploc in self.binding_pattern():
                        synthetic.append(self._declare_only(pname, ploc))
                self.expect_punct(")")
            handler = self.block()
            children.append(SyntaxNode("other", handler.loc, tuple(synthetic) + handler.children))
        if self.at_name("finally"):
            self.next()
            children.append(self.block())
        return SyntaxNode("other", self.loc(start), tuple(children))

    def import_declaration(self) -> SyntaxNode:
        start = self.next()  # import
        assigns: list[SyntaxNode] = []
        if self.peek().type == "str":  # bare `import 'mod'`
            spec = self.next()
            self._semicolon()
            return SyntaxNode(
                "other", self.loc(start), (SyntaxNode("import-call", self.loc(spec), value=spec.value),)
            )

        def import_root(loc: Location, spec: str) -> SyntaxNode:
            return SyntaxNode("import-call", loc, value=spec)

        default_name: Token | None = None
        namespace_name: Token | None = None
        named: list[tuple[str, Token]] = []
        if self.peek().type == "name" and not self.at_name("from"):
            default_name = self.next()
            self.eat_punct(",")
        if self.eat_punct("*"):
            if not self.at_name("as"):
                raise self.error("expected 'as' in namespace import")
            self.next()
            namespace_name = self.next()
        elif self.at_punct("{"):
            self.next()
            while not self.eat_punct("}"):
                if self.peek().type not in ("name", "str"):
                    raise self.error("bad import specifier")
                imported = self.next()
                local = imported
                if self.at_name("as"):
                    self.next()
                    local = self.next()
                named.append((imported.value, local))
                if not self.eat_punct(","):
                    if not self.at_punct("}"):
                        raise self.error("expected ',' or '}' in import")
        if not self.at_name("from"):
            raise self.error("expected 'from' in import declaration")
        self.next()
        if self.peek().type != "str":
            raise self.error("expected module specifier string")
        spec = self.next()
        self._semicolon()
        # Default and namespace imports map to the module root; named imports
        # map to a property read on the root, matching require() destructuring.
        if default_name is not None:
            target = SyntaxNode("identifier", self.loc(default_name), name=default_name.value)
            assigns.append(
                SyntaxNode("assignment", target.loc, (target, import_root(target.loc, spec.value)), declares=True)
            )
        if namespace_name is not None:
            target = SyntaxNode("identifier", self.loc(namespace_name), name=namespace_name.value)
            assigns.append(
                SyntaxNode("assignment", target.loc, (target, import_root(target.loc, spec.value)), declares=True)
            )
        for imported, local in named:
            target = SyntaxNode("identifier", self.loc(local), name=local.value)
            value: SyntaxNode = import_root(target.loc, spec.value)
            value = SyntaxNode("member-access", target.loc, (value,), name=imported)
            assigns.append(SyntaxNode("assignment", target.loc, (target, value), declares=True))
        return SyntaxNode("other", self.loc(start), tuple(assigns))

    def export_declaration(self) -> SyntaxNode:
        start = self.next()  # export
        if self.at_name("default"):
            self.next()
            tok = self.peek()
            if tok.type == "name" and (tok.value == "function" or tok.value == "class" or (tok.value == "async" and self.peek(1).type == "name" and self.peek(1).value == "function")):
                if tok.value == "class":
                    self.next()
                    if self.peek().type == "name":
                        self.next()  # optional class name
                    inner: SyntaxNode = self._class_rest(self.loc(tok))
                else:
                    if tok.value == "async":
                        self.next()
                    self.next()
                    self.eat_punct("*")
                    name = self.next().value if self.peek().type == "name" else None
                    inner = self._function_rest(self.loc(tok), name)
            else:
                inner = self.assignment_expression()
                self._semicolon()
            return SyntaxNode("other", self.loc(start), (inner,))
        if self.at_punct("*"):
            self.next()
            if self.at_name("as"):
                self.next()
                self.next()
            if self.at_name("from"):
                self.next()
                self.next()
            self._semicolon()
            return SyntaxNode("other", self.loc(start))
        if self.at_punct("{"):
            self.next()
            while not self.eat_punct("}"):
                self.next()
                if self.at_name("as"):
                    self.next()
                    self.next()
                if not self.eat_punct(","):
                    if not self.at_punct("}"):
                        raise self.error("expected ',' or '}' in export")
            if self.at_name("from"):
                self.next()
                self.next()
            self._semicolon()
            return SyntaxNode("other", self.loc(start))
        return SyntaxNode("other", self.loc(start), (self.statement(),))

    # -- expressions

    def expression(self, no_in: bool = False) -> SyntaxNode:
        expr = self.assignment_expression(no_in=no_in)
        if self.at_punct(","):
            parts = [expr]
            while self.eat_punct(","):
                parts.append(self.assignment_expression(no_in=no_in))
            return SyntaxNode("other", expr.loc, tuple(parts))
        return expr

    def assignment_expression(self, no_in: bool = False) -> SyntaxNode:
        arrow = self.try_arrow_function()
        if arrow is not None:
            return arrow
        left = self.conditional_expression(no_in=no_in)
        tok = self.peek()
        if tok.type == "punct" and tok.value in _ASSIGN_OPS:
            op = self.next().value
            right = self.assignment_expression(no_in=no_in)
            if op == "=":
                return SyntaxNode("assignment", left.loc, (left, right))
            return SyntaxNode("other", left.loc, (left, right))
        return left

    def try_arrow_function(self) -> SyntaxNode | None:
        tok = self.peek()
        start = self.pos
        if tok.type == "name" and tok.value == "async" and not self.peek(1).nl_before:
            nxt = self.peek(1)
            if nxt.type == "name" and nxt.value not in _RESERVED and self.peek(2).type == "punct" and self.peek(2).value == "=>":
                self.next()  # async marker does not affect the tree
                tok = self.peek()
            elif nxt.type == "punct" and nxt.value == "(" and self._arrow_ahead(self.pos + 1):
                self.next()
                tok = self.peek()
        if tok.type == "name" and tok.value not in _RESERVED:
            nxt = self.peek(1)
            if nxt.type == "punct" and nxt.value == "=>" and not nxt.nl_before:
                name_tok = self.next()
                self.next()  # =>
                return self._arrow_body(self.loc(name_tok), [name_tok.value], [])
        if tok.type == "punct" and tok.value == "(" and self._arrow_ahead(self.pos):
            params, synthetic = self.parameter_list()
            self.expect_punct("=>")
            return self._arrow_body(self.loc(tok), params, synthetic)
        self.pos = start  # undo a consumed 'async' that led nowhere
        return None

    def _arrow_ahead(self, open_pos: int) -> bool:
        # Look past the matching ')' for '=>'.
        depth = 0
        i = open_pos
        while i < len(self.tokens):
            tok = self.tokens[i]
            if tok.type == "punct":
                if tok.value in ("(", "[", "{"):
                    depth += 1
                elif tok.value in (")", "]", "}"):
                    depth -= 1
                    if depth == 0:
                        nxt = self.tokens[i + 1] if i + 1 < len(self.tokens) else None
                        return nxt is not None and nxt.type == "punct" and nxt.value == "=>"
            elif tok.type == "eof":
                return False
            i += 1
        return False

    def _arrow_body(self, loc: Location, params: list[str | None], synthetic: list[SyntaxNode]) -> SyntaxNode:
        if self.at_punct("{"):
            body = self.block()
            children = tuple(synthetic) + body.children
        else:
            children = tuple(synthetic) + (self.assignment_expression(),)
        return SyntaxNode("function-literal", loc, children, params=tuple(params))

    def conditional_expression(self, no_in: bool = False) -> SyntaxNode:
        test = self.binary_expression(0, no_in=no_in)
        if self.at_punct("?") and not self.at_punct("?."):
            self.next()
            consequent = self.assignment_expression()
            self.expect_punct(":")
            alternate = self.assignment_expression(no_in=no_in)
            # value marker: both branch children carry the expression value
            return SyntaxNode(
                "other", test.loc, (test, consequent, alternate), value="?:"
            )
        return test

    def binary_expression(self, level: int, no_in: bool = False) -> SyntaxNode:
        if level >= len(_BINARY_LEVELS):
            return self.unary_expression()
        left = self.binary_expression(level + 1, no_in=no_in)
        ops = _BINARY_LEVELS[level]
        while True:
            tok = self.peek()
            word = tok.value if tok.type in ("punct", "name") else None
            if word not in ops:
                return left
            if word == "in" and no_in:
                return left
            self.next()
            right = self.binary_expression(level + 1, no_in=no_in)
            # ||, && and ?? evaluate to one of their operands; mark them so
            # resolution can treat both sides as value candidates
            marker = word if word in ("||", "&&", "??") else None
            left = SyntaxNode("other", left.loc, (left, right), value=marker)

    def unary_expression(self) -> SyntaxNode:
        tok = self.peek()
        if (tok.type == "punct" and tok.value in _UNARY_OPS) or (
            tok.type == "name" and tok.value in ("typeof", "void", "delete", "await", "yield")
        ):
            self.next()
            if tok.value == "yield" and (self.at_punct(";") or self.at_punct(")") or self.at_punct("}") or self.peek().nl_before):
                return SyntaxNode("other", self.loc(tok))
            if tok.value == "yield":
                self.eat_punct("*")
            return SyntaxNode("other", self.loc(tok), (self.unary_expression(),))
        expr = self.parse_left_hand_side()
        if self.at_punct("++") or self.at_punct("--"):
            self.next()
            return SyntaxNode("other", expr.loc, (expr,))
        return expr

    def parse_left_hand_side(self) -> SyntaxNode:
        if self.at_name("new"):
            return self.new_expression()
        expr = self.primary_expression()
        return self.call_member_chain(expr)

    def new_expression(self) -> SyntaxNode:
        start = self.next()  # new
        if self.at_punct("."):  # new.target
            self.next()
            self.next()
            return SyntaxNode("other", self.loc(start))
        callee: SyntaxNode
        if self.at_name("new"):
            callee = self.new_expression()
        else:
            callee = self.primary_expression()
        # member accesses bind tighter than the constructor arguments
        while True:
            if self.at_punct("."):
                self.next()
                prop = self.next()
                callee = SyntaxNode("member-access", callee.loc, (callee,), name=prop.value)
            elif self.at_punct("["):
                self.next()
                index = self.expression()
                self.expect_punct("]")
                callee = SyntaxNode("member-access", callee.loc, (callee, index), computed=True)
            else:
                break
        args: list[SyntaxNode] = []
        has_spread = False
        if self.at_punct("("):
            args, has_spread = self.argument_list()
        node = SyntaxNode(
            "instantiation", self.loc(start), (callee, *args), has_spread=has_spread
        )
        return self.call_member_chain(node)

    def argument_list(self) -> tuple[list[SyntaxNode], bool]:
        self.expect_punct("(")
        args: list[SyntaxNode] = []
        has_spread = False
        while not self.eat_punct(")"):
            if self.eat_punct("..."):
                has_spread = True
                args.append(SyntaxNode("other", self.loc(), (self.assignment_expression(),)))
            else:
                args.append(self.assignment_expression())
            if not self.eat_punct(","):
                if not self.at_punct(")"):
                    raise self.error("expected ',' or ')' in arguments")
        return args, has_spread

    def call_member_chain(self, expr: SyntaxNode) -> SyntaxNode:
        while True:
            if self.at_punct(".") or self.at_punct("?."):
                optional = self.next().value == "?."
                if optional and self.at_punct("("):
                    args, has_spread = self.argument_list()
                    expr = self._make_call(expr, args, has_spread)
                    continue
                if optional and self.at_punct("["):
                    self.next()
                    index = self.expression()
                    self.expect_punct("]")
                    expr = SyntaxNode("member-access", expr.loc, (expr, index), computed=True)
                    continue
                prop = self.next()
                if prop.type not in ("name",):
                    raise self.error(f"expected property name, found {self._describe(prop)}")
                expr = SyntaxNode("member-access", expr.loc, (expr,), name=prop.value)
            elif self.at_punct("["):
                self.next()
                index = self.expression()
                self.expect_punct("]")
                expr = SyntaxNode("member-access", expr.loc, (expr, index), computed=True)
            elif self.at_punct("("):
                args, has_spread = self.argument_list()
                expr = self._make_call(expr, args, has_spread)
            elif self.peek().type == "template":
                tag = self.next()  # tagged template; contents are opaque
                expr = SyntaxNode("other", expr.loc, (expr,), value=tag.value)
            else:
                return expr

    def _make_call(self, callee: SyntaxNode, args: list[SyntaxNode], has_spread: bool) -> SyntaxNode:
        # require('pkg') is the access-path root form.
        if (
            callee.kind == "identifier"
            and callee.name == "require"
            and len(args) == 1
            and not has_spread
            and args[0].kind == "string-literal"
            and args[0].value
        ):
            return SyntaxNode("import-call", callee.loc, value=args[0].value)
        return SyntaxNode("call", callee.loc, (callee, *args), has_spread=has_spread)

    def primary_expression(self) -> SyntaxNode:
        tok = self.peek()
        if tok.type == "name":
            word = tok.value
            if word == "function" or (word == "async" and self.peek(1).type == "name" and self.peek(1).value == "function" and not self.peek(1).nl_before):
                start = self.peek()
                if word == "async":
                    self.next()
                self.next()
                self.eat_punct("*")
                name = self.next().value if self.peek().type == "name" else None
                return self._function_rest(self.loc(start), name)
            if word == "class":
                self.next()
                if self.peek().type == "name":
                    self.next()
                return self._class_rest(self.loc(tok))
            if word == "new":
                return self.new_expression()
            if word in ("this", "super", "null", "true", "false", "undefined"):
                self.next()
                return SyntaxNode("other", self.loc(tok))
            if word == "import":  # dynamic import: import('mod')
                self.next()
                return SyntaxNode("identifier", self.loc(tok), name="import")
            self.next()
            return SyntaxNode("identifier", self.loc(tok), name=word)
        if tok.type == "str":
            self.next()
            return SyntaxNode("string-literal", self.loc(tok), value=tok.value)
        if tok.type in ("num", "regex", "template"):
            self.next()
            return SyntaxNode("other", self.loc(tok), value=tok.value)
        if tok.type == "punct":
            if tok.value == "(":
                self.next()
                expr = self.expression()
                self.expect_punct(")")
                return expr
            if tok.value == "[":
                return self.array_literal()
            if tok.value == "{":
                return self.object_literal()
        raise self.error(f"unexpected token {self._describe(tok)}")

    def array_literal(self) -> SyntaxNode:
        start = self.expect_punct("[")
        elements: list[SyntaxNode] = []
        while not self.eat_punct("]"):
            if self.at_punct(","):
                self.next()
                continue
            if self.eat_punct("..."):
                elements.append(SyntaxNode("other", self.loc(), (self.assignment_expression(),)))
            else:
                elements.append(self.assignment_expression())
            if not self.eat_punct(","):
                if not self.at_punct("]"):
                    raise self.error("expected ',' or ']' in array")
        return SyntaxNode("other", self.loc(start), tuple(elements))

    def object_literal(self) -> SyntaxNode:
        start = self.expect_punct("{")
        values: list[SyntaxNode] = []
        while not self.eat_punct("}"):
            if self.eat_punct("..."):
                values.append(self.assignment_expression())
            else:
                prefix_start = self.peek()
                is_accessor = False
                if self.peek().type == "name" and self.peek().value in ("get", "set", "async"):
                    nxt = self.peek(1)
                    if not (nxt.type == "punct" and nxt.value in (",", ":", "(", "}")):
                        self.next()
                        is_accessor = True
                self.eat_punct("*")
                key_tok = self.peek()
                if self.at_punct("["):
                    self.next()
                    values.append(self.assignment_expression())
                    self.expect_punct("]")
                elif key_tok.type in ("name", "str", "num"):
                    self.next()
                else:
                    raise self.error(f"bad object key {self._describe(key_tok)}")
                if self.at_punct("("):
                    values.append(self._function_rest(self.loc(prefix_start), None))
                elif self.eat_punct(":"):
                    values.append(self.assignment_expression())
                elif self.eat_punct("="):  # cover pattern-ish defaults
                    values.append(self.assignment_expression())
                elif key_tok.type == "name" and not is_accessor:
                    values.append(SyntaxNode("identifier", self.loc(key_tok), name=key_tok.value))
                elif not is_accessor:
                    raise self.error("expected ':' in object literal")
            if not self.eat_punct(","):
                if not self.at_punct("}"):
                    raise self.error("expected ',' or '}' in object literal")
        return SyntaxNode("other", self.loc(start), tuple(values))


def parse_source(text: str, file_id: str) -> SyntaxTree:
    """Parse one JavaScript source file into a :class:`SyntaxTree`.

    Raises :class:`ParseError` on input outside the supported subset;
    corpus mining catches this per file and records it as a diagnostic.
    """
    tokens = _Tokenizer(text, file_id).run()
    parser = _Parser(tokens, file_id)
    body = parser.parse_program()
    return SyntaxTree(file_id, tuple(body))
