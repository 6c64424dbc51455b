"""Node kinds, raw and cleaned syntax trees, canonical text form, statistics.

Raw trees come out of the parser with identifiers, literal text, and source
spans still attached.  Cleaning keeps only the node kind and the child order
and drops everything else, so two pieces of code that differ in naming or in
constant values collapse to the same cleaned tree.  The cleaned tree is what
every similarity and statistics routine operates on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, unique


@unique
class NodeKind(Enum):
    """Closed enumeration of structural node kinds.

    The string values are the names used by the canonical text form, so they
    are stable: adding a kind is a format extension, renaming one is a
    breaking change.  Operators get one kind each; port direction and case
    flavor are part of the kind rather than node payload.
    """

    # source structure
    SOURCE_UNIT = "SourceUnit"
    MODULE_DEF = "ModuleDef"
    PORT_REF = "PortRef"
    INPUT_PORT = "InputPort"
    OUTPUT_PORT = "OutputPort"
    INOUT_PORT = "InoutPort"
    PARAM_DECL = "ParamDecl"
    LOCAL_PARAM_DECL = "LocalParamDecl"
    WIRE_DECL = "WireDecl"
    REG_DECL = "RegDecl"
    INTEGER_DECL = "IntegerDecl"
    REAL_DECL = "RealDecl"
    TIME_DECL = "TimeDecl"
    WIDTH = "Width"

    # module items and statements
    CONTINUOUS_ASSIGN = "ContinuousAssign"
    ALWAYS = "Always"
    INITIAL = "Initial"
    SENS_LIST = "SensList"
    EDGE_POSEDGE = "EdgePosedge"
    EDGE_NEGEDGE = "EdgeNegedge"
    LEVEL_SENSE = "LevelSense"
    STAR_SENSE = "StarSense"
    BLOCK = "Block"
    BLOCKING_ASSIGN = "BlockingAssign"
    NONBLOCKING_ASSIGN = "NonblockingAssign"
    IF_STMT = "IfStmt"
    CASE_STMT = "CaseStmt"
    CASEZ_STMT = "CasezStmt"
    CASEX_STMT = "CasexStmt"
    CASE_ITEM = "CaseItem"
    NULL_STMT = "NullStmt"
    INSTANCE = "Instance"
    PORT_CONN = "PortConn"
    FUNC_DECL = "FuncDecl"
    TASK_DECL = "TaskDecl"
    TASK_CALL = "TaskCall"

    # expressions
    TERNARY = "Ternary"
    CONCAT = "Concat"
    REPEAT = "Repeat"
    BIT_SELECT = "BitSelect"
    PART_SELECT = "PartSelect"
    PART_SELECT_PLUS = "PartSelectPlus"
    PART_SELECT_MINUS = "PartSelectMinus"
    FUNC_CALL = "FuncCall"
    ID = "Id"
    CONST = "Const"

    # binary operators
    PLUS = "Plus"
    MINUS = "Minus"
    MUL = "Mul"
    DIV = "Div"
    MOD = "Mod"
    POW = "Pow"
    AND = "And"
    OR = "Or"
    XOR = "Xor"
    XNOR = "Xnor"
    SHL = "Shl"
    SHR = "Shr"
    ASHL = "AShl"
    ASHR = "AShr"
    EQ = "Eq"
    NEQ = "Neq"
    CASE_EQ = "CaseEq"
    CASE_NEQ = "CaseNeq"
    LT = "Lt"
    LTE = "Lte"
    GT = "Gt"
    GTE = "Gte"
    LOGICAL_AND = "LogicalAnd"
    LOGICAL_OR = "LogicalOr"

    # unary operators
    NOT = "Not"
    BIT_NOT = "BitNot"
    UNARY_MINUS = "UnaryMinus"
    UNARY_PLUS = "UnaryPlus"
    REDUCE_AND = "ReduceAnd"
    REDUCE_OR = "ReduceOr"
    REDUCE_XOR = "ReduceXor"
    REDUCE_NAND = "ReduceNand"
    REDUCE_NOR = "ReduceNor"
    REDUCE_XNOR = "ReduceXnor"


_KIND_BY_NAME = {kind.value: kind for kind in NodeKind}

PORT_KINDS = frozenset(
    {NodeKind.INPUT_PORT, NodeKind.OUTPUT_PORT, NodeKind.INOUT_PORT}
)

DECL_KINDS = frozenset(
    {
        NodeKind.WIRE_DECL,
        NodeKind.REG_DECL,
        NodeKind.INTEGER_DECL,
        NodeKind.REAL_DECL,
        NodeKind.TIME_DECL,
        NodeKind.PARAM_DECL,
        NodeKind.LOCAL_PARAM_DECL,
    }
)


@dataclass
class RawNode:
    """One node of the raw parse tree.

    `name` holds the identifier for named nodes (declarations, Id, named
    blocks, Instance).  `value` holds the literal text for Const nodes and
    the referenced module name for Instance nodes.  `mods` carries modifiers
    that matter for re-printing but have no structural meaning ('header',
    'ansi', 'reg', 'signed', 'param', 'automatic', 'integer', 'real',
    'time').  Spans are (start, end) offsets into the source string.
    """

    kind: NodeKind
    children: list["RawNode"] = field(default_factory=list)
    name: str | None = None
    value: str | None = None
    mods: tuple[str, ...] = ()
    span: tuple[int, int] = (0, 0)


@dataclass(frozen=True, eq=False)
class CleanNode:
    """Structure-only tree node: a kind and an ordered child tuple."""

    kind: NodeKind
    children: tuple["CleanNode", ...] = ()

    # Equality is structural but must not recurse: trees can be deeper than
    # the interpreter stack, and every other routine here is iterative too.
    def __eq__(self, other: object) -> bool:
        if other is self:
            return True
        if not isinstance(other, CleanNode):
            return NotImplemented
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if a.kind is not b.kind or len(a.children) != len(b.children):
                return False
            stack.extend(zip(a.children, b.children))
        return True

    # Shallow on purpose: hashing the whole subtree would recurse.  Equal
    # trees agree on (kind, arity), which is all a hash has to promise.
    def __hash__(self) -> int:
        return hash((self.kind, len(self.children)))


@dataclass(frozen=True)
class TreeStats:
    """Shape summary of one tree.

    depth counts levels with the root at 1; mean_branching is the average
    child count over internal nodes, reported as 0.0 for a bare leaf.
    """

    depth: int
    node_count: int
    mean_branching: float


class TreeFormatError(ValueError):
    """Raised when canonical tree text cannot be decoded."""


def iter_tree(root):
    """Yield every node under `root` in preorder, without recursion.

    Works for both RawNode and CleanNode trees.
    """
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def clean(root: RawNode) -> CleanNode:
    """Erase names, values, modifiers, and spans; keep kinds and child order.

    The result has exactly the same shape as the input: one CleanNode per
    RawNode, children in the same order.
    """
    done: dict[int, CleanNode] = {}
    stack: list[tuple[RawNode, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            done[id(node)] = CleanNode(
                node.kind, tuple(done[id(c)] for c in node.children)
            )
        else:
            stack.append((node, True))
            for child in reversed(node.children):
                stack.append((child, False))
    return done[id(root)]


def serialize(tree: CleanNode) -> str:
    """Render a cleaned tree in the canonical text form.

    The form is `(Kind child child ...)` with single spaces and no trailing
    whitespace, e.g. `(ContinuousAssign (Id) (And (Id) (Id)))`.  Output is
    bit-exact for equal trees; `deserialize` is its inverse.
    """
    out: list[str] = []
    work: list[object] = [tree]
    while work:
        item = work.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        out.append("(" + item.kind.value)  # type: ignore[union-attr]
        work.append(")")
        for child in reversed(item.children):  # type: ignore[union-attr]
            work.append(child)
            work.append(" ")
    return "".join(out)


def deserialize(text: str) -> CleanNode:
    """Decode canonical tree text back into a CleanNode.

    Raises TreeFormatError on unknown kinds, unbalanced parentheses, or
    trailing garbage.  Whitespace between elements is accepted liberally.
    """
    pos = 0
    end = len(text)
    stack: list[tuple[NodeKind, list[CleanNode]]] = []
    result: CleanNode | None = None
    while pos < end:
        ch = text[pos]
        if ch in " \t\r\n":
            pos += 1
            continue
        if result is not None:
            raise TreeFormatError(f"trailing content at offset {pos}")
        if ch == "(":
            start = pos + 1
            cursor = start
            while cursor < end and (text[cursor].isalnum()):
                cursor += 1
            name = text[start:cursor]
            if not name:
                raise TreeFormatError(f"expected a node kind at offset {start}")
            kind = _KIND_BY_NAME.get(name)
            if kind is None:
                raise TreeFormatError(f"unknown node kind {name!r}")
            stack.append((kind, []))
            pos = cursor
        elif ch == ")":
            if not stack:
                raise TreeFormatError("unbalanced ')'")
            kind, kids = stack.pop()
            node = CleanNode(kind, tuple(kids))
            if stack:
                stack[-1][1].append(node)
            else:
                result = node
            pos += 1
        else:
            raise TreeFormatError(f"expected '(' at offset {pos}, found {ch!r}")
    if stack:
        raise TreeFormatError("unbalanced '('")
    if result is None:
        raise TreeFormatError("empty input")
    return result


def tree_stats(tree) -> TreeStats:
    """Compute depth, node count, and mean branching factor of a tree.

    Accepts cleaned or raw trees; only `children` is inspected.
    """
    depth = 0
    count = 0
    internal = 0
    stack = [(tree, 1)]
    while stack:
        node, level = stack.pop()
        count += 1
        if level > depth:
            depth = level
        if node.children:
            internal += 1
            for child in node.children:
                stack.append((child, level + 1))
    branching = (count - 1) / internal if internal else 0.0
    return TreeStats(depth=depth, node_count=count, mean_branching=branching)
