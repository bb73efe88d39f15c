"""Lightweight AST-level scanning of notebook cell code.

The analyzers work on surface patterns: call names, assignment targets,
string literals. Nothing is executed and there is no type analysis; when
the code does not parse, regex fallbacks keep the pipeline alive and the
ChangeSet stays the ground truth.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field


def call_name(node: ast.AST) -> str | None:
    """Trailing identifier of a call target: pd.read_csv -> read_csv."""
    if isinstance(node, ast.Name):
        return node.id
    if isinstance(node, ast.Attribute):
        return node.attr
    return None


@dataclass
class CallSite:
    name: str
    receiver: str | None  # variable the method was called on, if any
    chained_constructor: str | None  # Ctor().method(...) pattern
    positional_names: list[str]
    first_string_arg: str | None
    assign_targets: list[str]
    order: int


@dataclass
class CodeScan:
    parsed: bool
    calls: list[CallSite] = field(default_factory=list)
    string_literals: list[str] = field(default_factory=list)
    subscript_assignments: list[tuple[str, list[str]]] = field(default_factory=list)
    tuple_call_targets: list[tuple[list[str], str]] = field(default_factory=list)

    def calls_named(self, names: set[str] | dict) -> list[CallSite]:
        wanted = set(names)
        return [c for c in self.calls if c.name in wanted]


def _positional_names(call: ast.Call) -> list[str]:
    return [a.id for a in call.args if isinstance(a, ast.Name)]


def _first_string_arg(call: ast.Call) -> str | None:
    for a in call.args:
        if isinstance(a, ast.Constant) and isinstance(a.value, str):
            return a.value
    for kw in call.keywords:
        if isinstance(kw.value, ast.Constant) and isinstance(kw.value.value, str):
            return kw.value.value
    return None


def _subscript_string_keys(node: ast.AST) -> list[str]:
    keys = []
    for sub in ast.walk(node):
        if isinstance(sub, ast.Subscript):
            sl = sub.slice
            if isinstance(sl, ast.Constant) and isinstance(sl.value, str):
                keys.append(sl.value)
            elif isinstance(sl, (ast.List, ast.Tuple)):
                for elt in sl.elts:
                    if isinstance(elt, ast.Constant) and isinstance(elt.value, str):
                        keys.append(elt.value)
    return keys


def scan_code(code: str) -> CodeScan:
    try:
        tree = ast.parse(code)
    except SyntaxError:
        return CodeScan(parsed=False, string_literals=re.findall(r"['\"]([^'\"]+)['\"]", code))

    scan = CodeScan(parsed=True)

    for node in ast.walk(tree):
        if isinstance(node, ast.Constant) and isinstance(node.value, str):
            scan.string_literals.append(node.value)

    assign_parents: dict[int, list[str]] = {}
    tuple_parents: dict[int, list[str]] = {}
    for node in ast.walk(tree):
        if isinstance(node, ast.Assign) and isinstance(node.value, ast.Call):
            names = [t.id for t in node.targets if isinstance(t, ast.Name)]
            tuple_names: list[str] = []
            for t in node.targets:
                if isinstance(t, (ast.Tuple, ast.List)):
                    tuple_names = [e.id for e in t.elts if isinstance(e, ast.Name)]
            if names:
                assign_parents[id(node.value)] = names
            if tuple_names:
                tuple_parents[id(node.value)] = tuple_names

        if isinstance(node, ast.Assign):
            for target in node.targets:
                if (
                    isinstance(target, ast.Subscript)
                    and isinstance(target.slice, ast.Constant)
                    and isinstance(target.slice.value, str)
                ):
                    referenced = [
                        k for k in _subscript_string_keys(node.value) if k != target.slice.value
                    ]
                    scan.subscript_assignments.append((target.slice.value, referenced))

    for node in ast.walk(tree):
        if not isinstance(node, ast.Call):
            continue
        name = call_name(node.func)
        if name is None:
            continue
        receiver = None
        chained = None
        if isinstance(node.func, ast.Attribute):
            base = node.func.value
            if isinstance(base, ast.Name):
                receiver = base.id
            elif isinstance(base, ast.Call):
                chained = call_name(base.func)
        targets = assign_parents.get(id(node), [])
        tuple_targets = tuple_parents.get(id(node), [])
        order = node.lineno * 1000 + node.col_offset
        if tuple_targets:
            scan.tuple_call_targets.append((tuple_targets, name))
        scan.calls.append(
            CallSite(
                name=name,
                receiver=receiver,
                chained_constructor=chained,
                positional_names=_positional_names(node),
                first_string_arg=_first_string_arg(node),
                assign_targets=targets,
                order=order,
            )
        )
    scan.calls.sort(key=lambda c: c.order)
    return scan


def contains_call(code: str, names: set[str]) -> bool:
    scan = scan_code(code)
    if scan.parsed:
        return any(c.name in names for c in scan.calls)
    return any(re.search(rf"\b{re.escape(n)}\s*\(", code) for n in names)


def loaded_file_name(code: str, read_fns: set[str]) -> str | None:
    """File referenced by a dataset-loading call, if any."""
    scan = scan_code(code)
    if scan.parsed:
        for call in scan.calls:
            if call.name in read_fns and call.first_string_arg:
                return call.first_string_arg
    match = re.search(
        r"(?:{})\s*\(\s*['\"]([^'\"]+)['\"]".format("|".join(re.escape(f) for f in read_fns)),
        code,
    )
    return match.group(1) if match else None
