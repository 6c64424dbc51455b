"""Recursive-descent parser for a synthesizable Verilog-2005 subset.

Supported constructs: module definitions with ANSI or non-ANSI port lists,
parameter/localparam declarations, input/output/inout and wire/reg/integer/
real/time declarations with ranges and memories, continuous assigns, always
blocks with edge/level/star sensitivity lists, initial blocks, begin/end
blocks (optionally named), blocking and nonblocking assignments, if/else,
case/casez/casex with default, the full unary/binary/ternary operator set,
concatenation and replication, bit/part/indexed-part selects, module
instantiation with named or positional connections, and function/task
declarations and calls.

Generate blocks, specify blocks, UDPs, delays, and SystemVerilog constructs
are outside the subset and produce a ParseError.  There is no error
recovery: the first error wins.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from enum import Enum

from vsr.lexer import LexError, Token, TokenKind, lex
from vsr.trees import NodeKind, RawNode

# Combined statement/expression nesting cap.  Keeps pathological inputs from
# exhausting the interpreter stack; realistic RTL nests far shallower.
_MAX_NESTING = 128


class ParseError(ValueError):
    """Syntax failure; `span` points at the offending source range."""

    def __init__(self, message: str, span: tuple[int, int]):
        super().__init__(message)
        self.span = span


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    span: tuple[int, int]


class ValidityStatus(Enum):
    NOT_CODE = "not_code"
    PARSE_FAIL = "parse_fail"
    PARSED = "parsed"


@dataclass(frozen=True)
class Validity:
    """Outcome of `classify`: a status, the AST when parsed, diagnostics."""

    status: ValidityStatus
    ast: RawNode | None
    diagnostics: tuple[Diagnostic, ...]

    @property
    def is_parsed(self) -> bool:
        return self.status is ValidityStatus.PARSED


_BINARY_PREC = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4, "^~": 4, "~^": 4,
    "&": 5,
    "==": 6, "!=": 6, "===": 6, "!==": 6,
    "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8, "<<<": 8, ">>>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
    "**": 11,
}

_BINARY_KIND = {
    "||": NodeKind.LOGICAL_OR,
    "&&": NodeKind.LOGICAL_AND,
    "|": NodeKind.OR,
    "^": NodeKind.XOR,
    "^~": NodeKind.XNOR,
    "~^": NodeKind.XNOR,
    "&": NodeKind.AND,
    "==": NodeKind.EQ,
    "!=": NodeKind.NEQ,
    "===": NodeKind.CASE_EQ,
    "!==": NodeKind.CASE_NEQ,
    "<": NodeKind.LT,
    "<=": NodeKind.LTE,
    ">": NodeKind.GT,
    ">=": NodeKind.GTE,
    "<<": NodeKind.SHL,
    ">>": NodeKind.SHR,
    "<<<": NodeKind.ASHL,
    ">>>": NodeKind.ASHR,
    "+": NodeKind.PLUS,
    "-": NodeKind.MINUS,
    "*": NodeKind.MUL,
    "/": NodeKind.DIV,
    "%": NodeKind.MOD,
    "**": NodeKind.POW,
}

_UNARY_KIND = {
    "!": NodeKind.NOT,
    "~": NodeKind.BIT_NOT,
    "-": NodeKind.UNARY_MINUS,
    "+": NodeKind.UNARY_PLUS,
    "&": NodeKind.REDUCE_AND,
    "|": NodeKind.REDUCE_OR,
    "^": NodeKind.REDUCE_XOR,
    "~&": NodeKind.REDUCE_NAND,
    "~|": NodeKind.REDUCE_NOR,
    "~^": NodeKind.REDUCE_XNOR,
    "^~": NodeKind.REDUCE_XNOR,
}

_DIRECTION_KIND = {
    "input": NodeKind.INPUT_PORT,
    "output": NodeKind.OUTPUT_PORT,
    "inout": NodeKind.INOUT_PORT,
}

_VAR_KIND = {
    "integer": NodeKind.INTEGER_DECL,
    "real": NodeKind.REAL_DECL,
    "time": NodeKind.TIME_DECL,
}

_CASE_KIND = {
    "case": NodeKind.CASE_STMT,
    "casez": NodeKind.CASEZ_STMT,
    "casex": NodeKind.CASEX_STMT,
}


class Parser:
    def __init__(self, tokens: list[Token]):
        # Directives are lexed for span bookkeeping but never parsed.
        self._toks = [t for t in tokens if t.kind is not TokenKind.DIRECTIVE]
        self._pos = 0
        self._depth = 0

    # ---- Token plumbing ----

    def _peek(self, offset: int = 0) -> Token | None:
        pos = self._pos + offset
        return self._toks[pos] if pos < len(self._toks) else None

    def _at_end(self) -> bool:
        return self._pos >= len(self._toks)

    def _mark(self) -> int:
        tok = self._peek()
        return tok.span[0] if tok else self._end()

    def _end(self) -> int:
        if self._pos == 0:
            return 0
        return self._toks[self._pos - 1].span[1]

    def _error(self, message: str) -> None:
        tok = self._peek()
        if tok is None:
            raise ParseError(f"{message}, found end of input", (self._end(), self._end()))
        raise ParseError(f"{message}, found {tok.text!r}", tok.span)

    def _advance(self) -> Token:
        tok = self._peek()
        if tok is None:
            self._error("unexpected end of input")
        self._pos += 1
        return tok  # type: ignore[return-value]

    def _at_kw(self, word: str) -> bool:
        tok = self._peek()
        return tok is not None and tok.kind is TokenKind.KEYWORD and tok.text == word

    def _at_op(self, text: str) -> bool:
        tok = self._peek()
        return tok is not None and tok.kind is TokenKind.OPERATOR and tok.text == text

    def _at_punct(self, text: str) -> bool:
        tok = self._peek()
        return tok is not None and tok.kind is TokenKind.PUNCTUATION and tok.text == text

    def _at_ident(self) -> bool:
        tok = self._peek()
        return tok is not None and tok.kind is TokenKind.IDENTIFIER

    def _expect_kw(self, word: str) -> Token:
        if not self._at_kw(word):
            self._error(f"expected '{word}'")
        return self._advance()

    def _expect_op(self, text: str) -> Token:
        if not self._at_op(text):
            self._error(f"expected '{text}'")
        return self._advance()

    def _expect_punct(self, text: str) -> Token:
        if not self._at_punct(text):
            self._error(f"expected '{text}'")
        return self._advance()

    def _expect_ident(self) -> Token:
        if not self._at_ident():
            self._error("expected identifier")
        return self._advance()

    def _enter(self) -> None:
        self._depth += 1
        if self._depth > _MAX_NESTING:
            raise ParseError("nesting too deep", (self._mark(), self._mark() + 1))

    def _exit(self) -> None:
        self._depth -= 1

    # ---- Source structure ----

    def parse_source_unit(self) -> RawNode:
        modules = []
        while not self._at_end():
            modules.append(self._module())
        if not modules:
            raise ParseError("expected at least one module", (0, 0))
        span = (modules[0].span[0], modules[-1].span[1])
        return RawNode(NodeKind.SOURCE_UNIT, modules, span=span)

    def _module(self) -> RawNode:
        start = self._mark()
        self._expect_kw("module")
        name = self._expect_ident().text
        children: list[RawNode] = []
        mods: tuple[str, ...] = ()
        if self._at_punct("#"):
            self._advance()
            children.extend(self._header_params())
        if self._at_punct("("):
            self._advance()
            ports, ansi = self._port_header()
            children.extend(ports)
            if ansi:
                mods += ("ansi",)
        self._expect_punct(";")
        while not self._at_kw("endmodule"):
            if self._at_end():
                self._error("expected 'endmodule'")
            children.extend(self._module_item())
        end = self._advance().span[1]
        return RawNode(
            NodeKind.MODULE_DEF, children, name=name, mods=mods, span=(start, end)
        )

    def _header_params(self) -> list[RawNode]:
        nodes: list[RawNode] = []
        self._expect_punct("(")
        while True:
            start = self._mark()
            self._expect_kw("parameter")
            mods: tuple[str, ...] = ("header",)
            if self._at_kw("signed"):
                self._advance()
                mods += ("signed",)
            width = self._width() if self._at_punct("[") else None
            regroup = False
            while True:
                name = self._expect_ident().text
                self._expect_op("=")
                init = self._expr()
                kids = [copy.deepcopy(width)] if width else []
                kids.append(init)
                nodes.append(
                    RawNode(
                        NodeKind.PARAM_DECL,
                        kids,
                        name=name,
                        mods=mods,
                        span=(start, self._end()),
                    )
                )
                if self._at_punct(","):
                    self._advance()
                    if self._at_kw("parameter"):
                        regroup = True
                        break
                    continue
                break
            if regroup:
                continue
            self._expect_punct(")")
            break
        return nodes

    def _port_header(self) -> tuple[list[RawNode], bool]:
        """Parse the parenthesized port list; returns (ports, is_ansi)."""
        if self._at_punct(")"):
            self._advance()
            return [], True
        if self._at_ident():
            refs = []
            while True:
                tok = self._expect_ident()
                refs.append(
                    RawNode(
                        NodeKind.PORT_REF,
                        name=tok.text,
                        mods=("header",),
                        span=tok.span,
                    )
                )
                if self._at_punct(","):
                    self._advance()
                    continue
                break
            self._expect_punct(")")
            return refs, False
        ports: list[RawNode] = []
        direction: NodeKind | None = None
        group_start = self._mark()
        group_mods: tuple[str, ...] = ()
        width: RawNode | None = None
        while True:
            tok = self._peek()
            if tok is not None and tok.kind is TokenKind.KEYWORD and tok.text in _DIRECTION_KIND:
                group_start = tok.span[0]
                direction = _DIRECTION_KIND[tok.text]
                self._advance()
                group_mods = ("header",)
                if self._at_kw("wire"):
                    self._advance()
                elif self._at_kw("reg"):
                    self._advance()
                    group_mods += ("reg",)
                if self._at_kw("signed"):
                    self._advance()
                    group_mods += ("signed",)
                width = self._width() if self._at_punct("[") else None
            elif direction is None:
                self._error("expected port direction")
            name = self._expect_ident().text
            kids = [copy.deepcopy(width)] if width else []
            ports.append(
                RawNode(
                    direction,
                    kids,
                    name=name,
                    mods=group_mods,
                    span=(group_start, self._end()),
                )
            )
            if self._at_punct(","):
                self._advance()
                continue
            break
        self._expect_punct(")")
        return ports, True

    # ---- Module items ----

    def _module_item(self) -> list[RawNode]:
        tok = self._peek()
        if tok is None:
            self._error("expected module item")
        assert tok is not None
        if tok.kind is TokenKind.KEYWORD:
            word = tok.text
            if word in ("parameter", "localparam"):
                return self._param_decl()
            if word in _DIRECTION_KIND:
                return self._port_decl()
            if word == "wire":
                return self._net_decl()
            if word == "reg":
                return self._reg_decl()
            if word in _VAR_KIND:
                return self._var_decl()
            if word == "assign":
                return self._continuous_assign()
            if word == "always":
                return [self._always()]
            if word == "initial":
                start = tok.span[0]
                self._advance()
                stmt = self._statement()
                return [RawNode(NodeKind.INITIAL, [stmt], span=(start, self._end()))]
            if word == "function":
                return [self._func_decl()]
            if word == "task":
                return [self._task_decl()]
            self._error("unsupported construct at module level")
        if tok.kind is TokenKind.IDENTIFIER:
            return self._instances()
        self._error("expected module item")
        return []  # unreachable

    def _param_decl(self) -> list[RawNode]:
        start = self._mark()
        kw = self._advance().text
        kind = NodeKind.PARAM_DECL if kw == "parameter" else NodeKind.LOCAL_PARAM_DECL
        mods: tuple[str, ...] = ()
        if self._at_kw("signed"):
            self._advance()
            mods += ("signed",)
        width = self._width() if self._at_punct("[") else None
        nodes = []
        while True:
            name = self._expect_ident().text
            self._expect_op("=")
            init = self._expr()
            kids = [copy.deepcopy(width)] if width else []
            kids.append(init)
            nodes.append(
                RawNode(kind, kids, name=name, mods=mods, span=(start, self._end()))
            )
            if self._at_punct(","):
                self._advance()
                continue
            break
        self._expect_punct(";")
        return nodes

    def _port_decl(self) -> list[RawNode]:
        start = self._mark()
        direction = _DIRECTION_KIND[self._advance().text]
        mods: tuple[str, ...] = ()
        if self._at_kw("wire"):
            self._advance()
        elif self._at_kw("reg"):
            self._advance()
            mods += ("reg",)
        if self._at_kw("signed"):
            self._advance()
            mods += ("signed",)
        width = self._width() if self._at_punct("[") else None
        nodes = []
        while True:
            name = self._expect_ident().text
            kids = [copy.deepcopy(width)] if width else []
            nodes.append(
                RawNode(direction, kids, name=name, mods=mods, span=(start, self._end()))
            )
            if self._at_punct(","):
                self._advance()
                continue
            break
        self._expect_punct(";")
        return nodes

    def _net_decl(self) -> list[RawNode]:
        start = self._mark()
        self._expect_kw("wire")
        mods: tuple[str, ...] = ()
        if self._at_kw("signed"):
            self._advance()
            mods += ("signed",)
        width = self._width() if self._at_punct("[") else None
        nodes = []
        while True:
            name = self._expect_ident().text
            kids = [copy.deepcopy(width)] if width else []
            if self._at_op("="):
                self._advance()
                kids.append(self._expr())
            nodes.append(
                RawNode(
                    NodeKind.WIRE_DECL, kids, name=name, mods=mods, span=(start, self._end())
                )
            )
            if self._at_punct(","):
                self._advance()
                continue
            break
        self._expect_punct(";")
        return nodes

    def _reg_decl(self) -> list[RawNode]:
        start = self._mark()
        self._expect_kw("reg")
        mods: tuple[str, ...] = ()
        if self._at_kw("signed"):
            self._advance()
            mods += ("signed",)
        width = self._width() if self._at_punct("[") else None
        nodes = []
        while True:
            name = self._expect_ident().text
            kids = [copy.deepcopy(width)] if width else []
            if self._at_punct("["):
                kids.append(self._width())  # memory address range
            if self._at_op("="):
                self._advance()
                kids.append(self._expr())
            nodes.append(
                RawNode(
                    NodeKind.REG_DECL, kids, name=name, mods=mods, span=(start, self._end())
                )
            )
            if self._at_punct(","):
                self._advance()
                continue
            break
        self._expect_punct(";")
        return nodes

    def _var_decl(self) -> list[RawNode]:
        start = self._mark()
        kind = _VAR_KIND[self._advance().text]
        nodes = []
        while True:
            name = self._expect_ident().text
            kids = []
            if self._at_op("="):
                self._advance()
                kids.append(self._expr())
            nodes.append(RawNode(kind, kids, name=name, span=(start, self._end())))
            if self._at_punct(","):
                self._advance()
                continue
            break
        self._expect_punct(";")
        return nodes

    def _continuous_assign(self) -> list[RawNode]:
        start = self._mark()
        self._expect_kw("assign")
        nodes = []
        while True:
            lhs = self._lvalue()
            self._expect_op("=")
            rhs = self._expr()
            nodes.append(
                RawNode(
                    NodeKind.CONTINUOUS_ASSIGN,
                    [lhs, rhs],
                    span=(start, self._end()),
                )
            )
            if self._at_punct(","):
                self._advance()
                continue
            break
        self._expect_punct(";")
        return nodes

    def _always(self) -> RawNode:
        start = self._mark()
        self._expect_kw("always")
        sens = self._sens_list()
        stmt = self._statement()
        return RawNode(NodeKind.ALWAYS, [sens, stmt], span=(start, self._end()))

    def _sens_list(self) -> RawNode:
        start = self._mark()
        self._expect_punct("@")
        items: list[RawNode] = []
        if self._at_op("*"):
            tok = self._advance()
            items.append(RawNode(NodeKind.STAR_SENSE, span=tok.span))
        else:
            self._expect_punct("(")
            if self._at_op("*"):
                tok = self._advance()
                items.append(RawNode(NodeKind.STAR_SENSE, span=tok.span))
            else:
                while True:
                    items.append(self._sens_item())
                    if self._at_kw("or") or self._at_punct(","):
                        self._advance()
                        continue
                    break
            self._expect_punct(")")
        return RawNode(NodeKind.SENS_LIST, items, span=(start, self._end()))

    def _sens_item(self) -> RawNode:
        start = self._mark()
        if self._at_kw("posedge"):
            self._advance()
            expr = self._expr()
            return RawNode(NodeKind.EDGE_POSEDGE, [expr], span=(start, self._end()))
        if self._at_kw("negedge"):
            self._advance()
            expr = self._expr()
            return RawNode(NodeKind.EDGE_NEGEDGE, [expr], span=(start, self._end()))
        expr = self._expr()
        return RawNode(NodeKind.LEVEL_SENSE, [expr], span=(start, self._end()))

    def _instances(self) -> list[RawNode]:
        start = self._mark()
        modname = self._expect_ident().text
        params: list[RawNode] = []
        if self._at_punct("#"):
            self._advance()
            self._expect_punct("(")
            params = self._conn_list(param=True)
            self._expect_punct(")")
        nodes = []
        while True:
            inst = self._expect_ident().text
            self._expect_punct("(")
            conns = self._conn_list(param=False)
            self._expect_punct(")")
            kids = [copy.deepcopy(p) for p in params] if nodes else params
            nodes.append(
                RawNode(
                    NodeKind.INSTANCE,
                    kids + conns,
                    name=inst,
                    value=modname,
                    span=(start, self._end()),
                )
            )
            if self._at_punct(","):
                self._advance()
                continue
            break
        self._expect_punct(";")
        return nodes

    def _conn_list(self, param: bool) -> list[RawNode]:
        mods = ("param",) if param else ()
        conns: list[RawNode] = []
        if self._at_punct(")"):
            return conns
        while True:
            start = self._mark()
            if self._at_punct("."):
                self._advance()
                pname = self._expect_ident().text
                self._expect_punct("(")
                kids = [] if self._at_punct(")") else [self._expr()]
                self._expect_punct(")")
                conns.append(
                    RawNode(
                        NodeKind.PORT_CONN,
                        kids,
                        name=pname,
                        mods=mods,
                        span=(start, self._end()),
                    )
                )
            else:
                expr = self._expr()
                conns.append(
                    RawNode(
                        NodeKind.PORT_CONN,
                        [expr],
                        mods=mods,
                        span=(start, self._end()),
                    )
                )
            if self._at_punct(","):
                self._advance()
                continue
            break
        return conns

    def _func_decl(self) -> RawNode:
        start = self._mark()
        self._expect_kw("function")
        mods: tuple[str, ...] = ()
        if self._at_kw("automatic"):
            self._advance()
            mods += ("automatic",)
        if self._at_kw("signed"):
            self._advance()
            mods += ("signed",)
        kids: list[RawNode] = []
        for word in ("integer", "real", "time"):
            if self._at_kw(word):
                self._advance()
                mods += (word,)
                break
        else:
            if self._at_punct("["):
                kids.append(self._width())
        name = self._expect_ident().text
        self._expect_punct(";")
        kids.extend(self._routine_decls())
        kids.append(self._statement())
        end = self._expect_kw("endfunction").span[1]
        return RawNode(NodeKind.FUNC_DECL, kids, name=name, mods=mods, span=(start, end))

    def _task_decl(self) -> RawNode:
        start = self._mark()
        self._expect_kw("task")
        mods: tuple[str, ...] = ()
        if self._at_kw("automatic"):
            self._advance()
            mods += ("automatic",)
        name = self._expect_ident().text
        self._expect_punct(";")
        kids = self._routine_decls()
        if not self._at_kw("endtask"):
            kids.append(self._statement())
        end = self._expect_kw("endtask").span[1]
        return RawNode(NodeKind.TASK_DECL, kids, name=name, mods=mods, span=(start, end))

    def _routine_decls(self) -> list[RawNode]:
        decls: list[RawNode] = []
        while True:
            tok = self._peek()
            if tok is None or tok.kind is not TokenKind.KEYWORD:
                break
            word = tok.text
            if word in _DIRECTION_KIND:
                decls.extend(self._port_decl())
            elif word == "reg":
                decls.extend(self._reg_decl())
            elif word in _VAR_KIND:
                decls.extend(self._var_decl())
            elif word in ("parameter", "localparam"):
                decls.extend(self._param_decl())
            else:
                break
        return decls

    # ---- Statements ----

    def _statement(self) -> RawNode:
        self._enter()
        try:
            return self._statement_inner()
        finally:
            self._exit()

    def _statement_inner(self) -> RawNode:
        tok = self._peek()
        if tok is None:
            self._error("expected statement")
        assert tok is not None
        start = tok.span[0]
        if tok.kind is TokenKind.KEYWORD:
            if tok.text == "begin":
                return self._block()
            if tok.text == "if":
                return self._if_stmt()
            if tok.text in _CASE_KIND:
                return self._case_stmt()
            self._error("unsupported construct in statement position")
        if self._at_punct(";"):
            tok = self._advance()
            return RawNode(NodeKind.NULL_STMT, span=tok.span)
        if self._at_ident() or self._at_punct("{"):
            if self._at_ident():
                nxt = self._peek(1)
                is_call = nxt is not None and (
                    nxt.kind is TokenKind.PUNCTUATION and nxt.text in "(;"
                )
                if is_call:
                    return self._task_call()
            lhs = self._lvalue()
            if self._at_op("="):
                kind = NodeKind.BLOCKING_ASSIGN
            elif self._at_op("<="):
                kind = NodeKind.NONBLOCKING_ASSIGN
            else:
                self._error("expected '=' or '<='")
            self._advance()
            rhs = self._expr()
            self._expect_punct(";")
            return RawNode(kind, [lhs, rhs], span=(start, self._end()))
        self._error("expected statement")
        raise AssertionError  # unreachable

    def _task_call(self) -> RawNode:
        start = self._mark()
        name = self._expect_ident().text
        args: list[RawNode] = []
        if self._at_punct("("):
            self._advance()
            if not self._at_punct(")"):
                while True:
                    args.append(self._expr())
                    if self._at_punct(","):
                        self._advance()
                        continue
                    break
            self._expect_punct(")")
        self._expect_punct(";")
        return RawNode(NodeKind.TASK_CALL, args, name=name, span=(start, self._end()))

    def _block(self) -> RawNode:
        start = self._mark()
        self._expect_kw("begin")
        name = None
        if self._at_punct(":"):
            self._advance()
            name = self._expect_ident().text
        stmts = []
        while not self._at_kw("end"):
            if self._at_end():
                self._error("expected 'end'")
            stmts.append(self._statement())
        end = self._advance().span[1]
        return RawNode(NodeKind.BLOCK, stmts, name=name, span=(start, end))

    def _if_stmt(self) -> RawNode:
        start = self._mark()
        self._expect_kw("if")
        self._expect_punct("(")
        cond = self._expr()
        self._expect_punct(")")
        then = self._statement()
        kids = [cond, then]
        if self._at_kw("else"):
            self._advance()
            kids.append(self._statement())
        return RawNode(NodeKind.IF_STMT, kids, span=(start, self._end()))

    def _case_stmt(self) -> RawNode:
        start = self._mark()
        kind = _CASE_KIND[self._advance().text]
        self._expect_punct("(")
        subject = self._expr()
        self._expect_punct(")")
        items = [subject]
        while not self._at_kw("endcase"):
            if self._at_end():
                self._error("expected 'endcase'")
            items.append(self._case_item())
        end = self._advance().span[1]
        return RawNode(kind, items, span=(start, end))

    def _case_item(self) -> RawNode:
        start = self._mark()
        if self._at_kw("default"):
            self._advance()
            if self._at_punct(":"):
                self._advance()
            stmt = self._statement()
            return RawNode(NodeKind.CASE_ITEM, [stmt], span=(start, self._end()))
        labels = [self._expr()]
        while self._at_punct(","):
            self._advance()
            labels.append(self._expr())
        self._expect_punct(":")
        stmt = self._statement()
        return RawNode(NodeKind.CASE_ITEM, labels + [stmt], span=(start, self._end()))

    # ---- Expressions ----

    def _lvalue(self) -> RawNode:
        if self._at_punct("{"):
            start = self._mark()
            self._advance()
            parts = [self._lvalue()]
            while self._at_punct(","):
                self._advance()
                parts.append(self._lvalue())
            self._expect_punct("}")
            return RawNode(NodeKind.CONCAT, parts, span=(start, self._end()))
        tok = self._expect_ident()
        node = RawNode(NodeKind.ID, name=tok.text, span=tok.span)
        return self._select_suffix(node)

    def _expr(self) -> RawNode:
        self._enter()
        try:
            cond = self._binary(1)
            if self._at_op("?"):
                self._advance()
                then = self._expr()
                self._expect_punct(":")
                other = self._expr()
                return RawNode(
                    NodeKind.TERNARY,
                    [cond, then, other],
                    span=(cond.span[0], self._end()),
                )
            return cond
        finally:
            self._exit()

    def _binary(self, min_prec: int) -> RawNode:
        left = self._unary()
        while True:
            tok = self._peek()
            if tok is None or tok.kind is not TokenKind.OPERATOR:
                break
            prec = _BINARY_PREC.get(tok.text)
            if prec is None or prec < min_prec:
                break
            self._advance()
            right = self._binary(prec + 1)
            left = RawNode(
                _BINARY_KIND[tok.text],
                [left, right],
                span=(left.span[0], right.span[1]),
            )
        return left

    def _unary(self) -> RawNode:
        tok = self._peek()
        if tok is not None and tok.kind is TokenKind.OPERATOR and tok.text in _UNARY_KIND:
            self._enter()
            try:
                self._advance()
                operand = self._unary()
                return RawNode(
                    _UNARY_KIND[tok.text],
                    [operand],
                    span=(tok.span[0], operand.span[1]),
                )
            finally:
                self._exit()
        return self._primary()

    def _primary(self) -> RawNode:
        tok = self._peek()
        if tok is None:
            self._error("expected expression")
        assert tok is not None
        if tok.kind is TokenKind.NUMBER or tok.kind is TokenKind.STRING:
            self._advance()
            return RawNode(NodeKind.CONST, value=tok.text, span=tok.span)
        if tok.kind is TokenKind.IDENTIFIER:
            nxt = self._peek(1)
            if nxt is not None and nxt.kind is TokenKind.PUNCTUATION and nxt.text == "(":
                return self._func_call()
            self._advance()
            node = RawNode(NodeKind.ID, name=tok.text, span=tok.span)
            return self._select_suffix(node)
        if self._at_punct("("):
            self._advance()
            expr = self._expr()
            self._expect_punct(")")
            return expr
        if self._at_punct("{"):
            return self._concat_or_repeat()
        self._error("expected expression")
        raise AssertionError  # unreachable

    def _func_call(self) -> RawNode:
        start = self._mark()
        name = self._expect_ident().text
        self._expect_punct("(")
        args: list[RawNode] = []
        if not self._at_punct(")"):
            while True:
                args.append(self._expr())
                if self._at_punct(","):
                    self._advance()
                    continue
                break
        self._expect_punct(")")
        return RawNode(NodeKind.FUNC_CALL, args, name=name, span=(start, self._end()))

    def _select_suffix(self, target: RawNode) -> RawNode:
        while self._at_punct("["):
            start = target.span[0]
            self._advance()
            first = self._expr()
            if self._at_punct(":"):
                self._advance()
                second = self._expr()
                kind = NodeKind.PART_SELECT
                kids = [target, first, second]
            elif self._at_op("+:"):
                self._advance()
                second = self._expr()
                kind = NodeKind.PART_SELECT_PLUS
                kids = [target, first, second]
            elif self._at_op("-:"):
                self._advance()
                second = self._expr()
                kind = NodeKind.PART_SELECT_MINUS
                kids = [target, first, second]
            else:
                kind = NodeKind.BIT_SELECT
                kids = [target, first]
            self._expect_punct("]")
            target = RawNode(kind, kids, span=(start, self._end()))
        return target

    def _concat_or_repeat(self) -> RawNode:
        start = self._mark()
        self._expect_punct("{")
        first = self._expr()
        if self._at_punct("{"):
            self._advance()
            items = [self._expr()]
            while self._at_punct(","):
                self._advance()
                items.append(self._expr())
            self._expect_punct("}")
            self._expect_punct("}")
            return RawNode(
                NodeKind.REPEAT, [first] + items, span=(start, self._end())
            )
        items = [first]
        while self._at_punct(","):
            self._advance()
            items.append(self._expr())
        self._expect_punct("}")
        return RawNode(NodeKind.CONCAT, items, span=(start, self._end()))

    def _width(self) -> RawNode:
        start = self._mark()
        self._expect_punct("[")
        msb = self._expr()
        self._expect_punct(":")
        lsb = self._expr()
        end = self._expect_punct("]").span[1]
        return RawNode(NodeKind.WIDTH, [msb, lsb], span=(start, end))


# ---- Entry points ----


def parse(tokens: list[Token]) -> RawNode:
    """Parse a token stream into a SourceUnit tree; raises ParseError."""
    return Parser(tokens).parse_source_unit()


def parse_source(text: str) -> RawNode:
    """Lex and parse `text`; raises LexError or ParseError."""
    return parse(lex(text))


def _looks_like_code(tokens: list[Token]) -> bool:
    saw_module = False
    for tok in tokens:
        if tok.kind is not TokenKind.KEYWORD:
            continue
        if tok.text == "module":
            saw_module = True
        elif tok.text == "endmodule" and saw_module:
            return True
    return False


def classify(source: str) -> Validity:
    """Total three-way triage of arbitrary text.

    NotCode: does not lex, or lexes without a module/endmodule keyword pair.
    ParseFail: code-shaped but rejected by the grammar.
    Parsed: carries the raw AST.  Never raises.
    """
    try:
        tokens = lex(source)
    except LexError as exc:
        diag = Diagnostic("error", str(exc), exc.span)
        return Validity(ValidityStatus.NOT_CODE, None, (diag,))
    if not _looks_like_code(tokens):
        diag = Diagnostic(
            "error", "no module/endmodule pair in token stream", (0, len(source))
        )
        return Validity(ValidityStatus.NOT_CODE, None, (diag,))
    try:
        ast = parse(tokens)
    except ParseError as exc:
        diag = Diagnostic("error", str(exc), exc.span)
        return Validity(ValidityStatus.PARSE_FAIL, None, (diag,))
    except RecursionError:
        diag = Diagnostic("error", "parser recursion limit exceeded", (0, len(source)))
        return Validity(ValidityStatus.PARSE_FAIL, None, (diag,))
    return Validity(ValidityStatus.PARSED, ast, ())
