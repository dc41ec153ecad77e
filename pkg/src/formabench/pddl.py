"""Parsing, printing and compilation checking for STRIPS + typing PDDL.

The accepted subset is STRIPS with ``:typing`` and negative preconditions in
actions. Problem goals must be conjunctions of positive ground atoms. All
identifiers are lowercased at parse time so that model outputs with arbitrary
casing compare equal to hand-written files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union

ROOT_TYPE = "object"

# Keywords that are recognised but outside the supported subset.
_UNSUPPORTED_DOMAIN_SECTIONS = {
    ":functions": "numeric fluents",
    ":derived": "derived predicates",
    ":durative-action": "durative actions",
    ":process": "processes",
    ":event": "events",
    ":constraints": "constraints",
}
_UNSUPPORTED_PROBLEM_SECTIONS = {
    ":metric": "plan metrics",
    ":constraints": "constraints",
    ":length": "length constraints",
}
_UNSUPPORTED_CONNECTIVES = {
    "or": "disjunction",
    "imply": "implication",
    "forall": "universal quantification",
    "exists": "existential quantification",
    "when": "conditional effects",
    "=": "equality",
    "increase": "numeric effects",
    "decrease": "numeric effects",
    "assign": "numeric effects",
    "scale-up": "numeric effects",
    "scale-down": "numeric effects",
    ">": "numeric conditions",
    "<": "numeric conditions",
    ">=": "numeric conditions",
    "<=": "numeric conditions",
    "at": "timed literals",
    "over": "durative conditions",
}
KNOWN_REQUIREMENTS = {":strips", ":typing", ":negative-preconditions"}


# ── diagnostics ──────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Span:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: Optional[Span] = None
    kind: str = "SemanticError"

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        return f"{where}{self.severity}: {self.kind}: {self.message}"


class PDDLError(Exception):
    """Base class for PDDL parse failures."""

    kind = "PDDLError"

    def __init__(self, message: str, span: Optional[Span] = None,
                 diagnostics: Sequence[Diagnostic] = ()):
        self.message = message
        self.span = span
        self.diagnostics = list(diagnostics) or [
            Diagnostic("error", message, span, self.kind)
        ]
        where = f" (line {span.line}, column {span.column})" if span else ""
        super().__init__(f"{message}{where}")


class PDDLSyntaxError(PDDLError):
    kind = "SyntaxError"


class UnsupportedFeature(PDDLError):
    kind = "UnsupportedFeature"


class SemanticError(PDDLError):
    kind = "SemanticError"


# ── s-expressions ────────────────────────────────────────────────────────────


class Symbol(str):
    """A lowercased token that remembers where it came from."""

    span: Span

    def __new__(cls, value: str, span: Span) -> "Symbol":
        obj = super().__new__(cls, value.lower())
        obj.span = span
        return obj


class SList(list):
    """A parenthesised list with the span of its opening parenthesis."""

    def __init__(self, span: Span, items: Iterable = ()):
        super().__init__(items)
        self.span = span


SExpr = Union[Symbol, SList]


def _tokens(text: str) -> Iterator[tuple[str, Span]]:
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
        elif ch.isspace():
            i += 1
            col += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, Span(line, col)
            i += 1
            col += 1
        else:
            start, start_col = i, col
            while i < n and not text[i].isspace() and text[i] not in "();":
                i += 1
            col += i - start
            yield text[start:i], Span(line, start_col)


def parse_sexprs(text: str) -> list[SExpr]:
    """Read every top-level s-expression in ``text``."""
    stack: list[SList] = []
    top: list[SExpr] = []
    for tok, span in _tokens(text):
        if tok == "(":
            stack.append(SList(span))
        elif tok == ")":
            if not stack:
                raise PDDLSyntaxError("unexpected ')'", span)
            done = stack.pop()
            (stack[-1] if stack else top).append(done)
        else:
            (stack[-1] if stack else top).append(Symbol(tok, span))
    if stack:
        raise PDDLSyntaxError("unclosed '(' at end of input", stack[-1].span)
    return top


def _span(expr: SExpr) -> Optional[Span]:
    return getattr(expr, "span", None)


def _read_single(text: str, what: str) -> SList:
    exprs = parse_sexprs(text)
    if not exprs:
        raise PDDLSyntaxError(f"empty input, expected a {what} definition",
                              Span(1, 1))
    if len(exprs) > 1:
        raise PDDLSyntaxError(f"trailing content after {what} definition",
                              _span(exprs[1]))
    root = exprs[0]
    if not isinstance(root, SList) or not root or root[0] != "define":
        raise PDDLSyntaxError(f"expected (define ({what} ...) ...)",
                              _span(root))
    return root


# ── values ───────────────────────────────────────────────────────────────────


@dataclass(frozen=True, order=True)
class TypedName:
    name: str
    type: str = ROOT_TYPE

    def __str__(self) -> str:
        return f"{self.name} - {self.type}"


@dataclass(frozen=True, order=True)
class GroundAtom:
    predicate: str
    args: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "predicate", self.predicate.lower())
        object.__setattr__(self, "args", tuple(a.lower() for a in self.args))

    def __str__(self) -> str:
        return "(" + " ".join((self.predicate, *self.args)) + ")"

    @classmethod
    def parse(cls, text: str) -> "GroundAtom":
        """Parse a single ``(pred a b)`` string."""
        exprs = parse_sexprs(text)
        if len(exprs) != 1 or not isinstance(exprs[0], SList) or not exprs[0]:
            raise PDDLSyntaxError(f"not an atom: {text!r}")
        expr = exprs[0]
        if not all(isinstance(x, Symbol) for x in expr):
            raise PDDLSyntaxError(f"nested expression in atom: {text!r}",
                                  expr.span)
        return cls(expr[0], tuple(expr[1:]))


@dataclass(frozen=True)
class Literal:
    """An atom over action parameters (``?x``) or constants, maybe negated."""

    predicate: str
    args: tuple[str, ...]
    positive: bool = True

    def __str__(self) -> str:
        atom = "(" + " ".join((self.predicate, *self.args)) + ")"
        return atom if self.positive else f"(not {atom})"


@dataclass(frozen=True)
class TypeHierarchy:
    parents: tuple[tuple[str, str], ...] = ()

    @property
    def edges(self) -> dict[str, str]:
        return dict(self.parents)

    def declared(self) -> set[str]:
        return {ROOT_TYPE, *(child for child, _ in self.parents)}

    def ancestors(self, type_name: str) -> list[str]:
        """Chain from ``type_name`` up to and including the root."""
        edges = self.edges
        chain = [type_name]
        while chain[-1] != ROOT_TYPE:
            chain.append(edges[chain[-1]])
        return chain

    def is_subtype(self, child: str, parent: str) -> bool:
        return parent in self.ancestors(child)


@dataclass(frozen=True)
class PredicateSchema:
    name: str
    params: tuple[TypedName, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[TypedName, ...]
    preconditions: frozenset[Literal]
    add_effects: frozenset[Literal]
    del_effects: frozenset[Literal]


@dataclass(frozen=True)
class Domain:
    name: str
    types: TypeHierarchy
    predicates: tuple[PredicateSchema, ...]
    actions: tuple[ActionSchema, ...]
    requirements: tuple[str, ...] = ()
    constants: tuple[TypedName, ...] = ()
    source: str = field(default="", compare=False, repr=False)

    def predicate(self, name: str, arity: int) -> Optional[PredicateSchema]:
        for p in self.predicates:
            if p.name == name and p.arity == arity:
                return p
        return None

    def action(self, name: str) -> Optional[ActionSchema]:
        for a in self.actions:
            if a.name == name:
                return a
        return None


@dataclass(frozen=True)
class Problem:
    name: str
    domain_name: str
    objects: frozenset[TypedName]
    init: frozenset[GroundAtom]
    goal: frozenset[GroundAtom]

    def object_types(self) -> dict[str, str]:
        return {o.name: o.type for o in self.objects}


@dataclass(frozen=True)
class CompilationResult:
    ok: bool
    diagnostics: tuple[Diagnostic, ...] = ()
    problem: Optional[Problem] = field(default=None, compare=False)


# ── shared helpers ───────────────────────────────────────────────────────────


def _expect_symbol(expr: SExpr, what: str) -> Symbol:
    if not isinstance(expr, Symbol):
        raise PDDLSyntaxError(f"expected {what}, got a list", _span(expr))
    return expr


def _valid_name(name: str) -> bool:
    return bool(name) and not any(c.isspace() or c in "()" for c in name)


def _header(root: SList, keyword: str) -> Symbol:
    if len(root) < 2 or not isinstance(root[1], SList) or len(root[1]) != 2 \
            or root[1][0] != keyword:
        raise PDDLSyntaxError(f"expected ({keyword} <name>) after define",
                              _span(root[1]) if len(root) > 1 else root.span)
    return _expect_symbol(root[1][1], f"{keyword} name")


def _sections(root: SList) -> Iterator[tuple[Symbol, SList]]:
    for section in root[2:]:
        if not isinstance(section, SList) or not section \
                or not isinstance(section[0], Symbol):
            raise PDDLSyntaxError("expected a (:keyword ...) section",
                                  _span(section))
        yield section[0], section


def _typed_list(items: Sequence[SExpr], variables: bool) -> list[tuple[Symbol, Symbol]]:
    """Read ``a b - t c`` style lists into (name, type) pairs."""
    out: list[tuple[Symbol, Symbol]] = []
    pending: list[Symbol] = []
    i = 0
    while i < len(items):
        item = _expect_symbol(items[i], "a name")
        if item == "-":
            if i + 1 >= len(items):
                raise PDDLSyntaxError("'-' must be followed by a type",
                                      item.span)
            type_expr = items[i + 1]
            if isinstance(type_expr, SList):
                if type_expr and type_expr[0] == "either":
                    raise UnsupportedFeature("(either ...) types are not supported",
                                             type_expr.span)
                raise PDDLSyntaxError("expected a type name", type_expr.span)
            if not pending:
                raise PDDLSyntaxError("type given without names", item.span)
            out.extend((p, type_expr) for p in pending)
            pending = []
            i += 2
            continue
        if variables and not item.startswith("?"):
            raise PDDLSyntaxError(f"expected a variable, got {item!r}", item.span)
        if not variables and item.startswith("?"):
            raise PDDLSyntaxError(f"unexpected variable {item!r}", item.span)
        pending.append(item)
        i += 1
    out.extend((p, Symbol(ROOT_TYPE, p.span)) for p in pending)
    return out


def _connective_check(expr: SList) -> None:
    head = expr[0] if expr else None
    if isinstance(head, Symbol) and head in _UNSUPPORTED_CONNECTIVES:
        raise UnsupportedFeature(
            f"'{head}' ({_UNSUPPORTED_CONNECTIVES[head]}) is outside the "
            "STRIPS subset", expr.span)


def _conjuncts(expr: SExpr) -> list[SList]:
    """Flatten ``(and ...)`` into its members; a bare atom is a singleton."""
    if not isinstance(expr, SList):
        raise PDDLSyntaxError("expected a formula", _span(expr))
    if not expr:
        return []
    _connective_check(expr)
    if expr[0] == "and":
        out: list[SList] = []
        for sub in expr[1:]:
            out.extend(_conjuncts(sub))
        return out
    return [expr]


def _literal(expr: SList, allow_negative: bool, where: str) -> Literal:
    _connective_check(expr)
    if expr and expr[0] == "not":
        if not allow_negative:
            raise UnsupportedFeature(f"negation is not allowed in {where}",
                                     expr.span)
        if len(expr) != 2 or not isinstance(expr[1], SList):
            raise PDDLSyntaxError("(not ...) takes exactly one atom", expr.span)
        inner = _literal(expr[1], False, where)
        return Literal(inner.predicate, inner.args, positive=False)
    if not expr:
        raise PDDLSyntaxError("empty atom", expr.span)
    for item in expr:
        if isinstance(item, SList):
            _connective_check(item)
            raise PDDLSyntaxError("nested expression inside an atom", item.span)
    return Literal(expr[0], tuple(expr[1:]))


# ── domain ───────────────────────────────────────────────────────────────────


def parse_domain(text: str) -> Domain:
    """Parse a domain definition.

    Raises PDDLSyntaxError, UnsupportedFeature or SemanticError.
    """
    root = _read_single(text, "domain")
    name = _header(root, "domain")
    requirements: list[str] = []
    type_pairs: list[tuple[Symbol, Symbol]] = []
    constants: list[tuple[Symbol, Symbol]] = []
    raw_predicates: list[SList] = []
    raw_actions: list[SList] = []
    errors: list[Diagnostic] = []

    for keyword, section in _sections(root):
        if keyword == ":requirements":
            requirements.extend(_expect_symbol(r, "requirement") for r in section[1:])
        elif keyword == ":types":
            type_pairs.extend(_typed_list(section[1:], variables=False))
        elif keyword == ":constants":
            constants.extend(_typed_list(section[1:], variables=False))
        elif keyword == ":predicates":
            raw_predicates.extend(section[1:])
        elif keyword == ":action":
            raw_actions.append(section)
        elif keyword in _UNSUPPORTED_DOMAIN_SECTIONS:
            raise UnsupportedFeature(
                f"{keyword} ({_UNSUPPORTED_DOMAIN_SECTIONS[keyword]}) is not supported",
                section.span)
        else:
            raise PDDLSyntaxError(f"unknown domain section {keyword!r}", section.span)

    types = _build_types(type_pairs)

    def check_type(t: Symbol) -> None:
        if t not in types.declared():
            errors.append(Diagnostic("error", f"undeclared type {t!r}", t.span))

    for _, t in constants:
        check_type(t)

    predicates: list[PredicateSchema] = []
    seen_preds: set[tuple[str, int]] = set()
    for raw in raw_predicates:
        if not isinstance(raw, SList) or not raw:
            raise PDDLSyntaxError("expected a predicate declaration", _span(raw))
        pname = _expect_symbol(raw[0], "predicate name")
        params = _typed_list(raw[1:], variables=True)
        for _, t in params:
            check_type(t)
        key = (str(pname), len(params))
        if key in seen_preds:
            errors.append(Diagnostic(
                "error", f"duplicate predicate {pname}/{len(params)}", pname.span))
        seen_preds.add(key)
        predicates.append(PredicateSchema(
            str(pname), tuple(TypedName(str(v), str(t)) for v, t in params)))

    actions: list[ActionSchema] = []
    for raw in raw_actions:
        action = _parse_action(raw, errors, check_type)
        if any(a.name == action.name for a in actions):
            errors.append(Diagnostic("error", f"duplicate action {action.name!r}",
                                     raw.span))
        actions.append(action)

    domain = Domain(
        name=str(name),
        types=types,
        predicates=tuple(predicates),
        actions=tuple(actions),
        requirements=tuple(str(r) for r in requirements),
        constants=tuple(TypedName(str(c), str(t)) for c, t in constants),
        source=text,
    )
    for action in domain.actions:
        _check_action(domain, action, errors)
    if errors:
        raise SemanticError(errors[0].message, errors[0].span, errors)
    return domain


def _build_types(pairs: list[tuple[Symbol, Symbol]]) -> TypeHierarchy:
    edges: dict[str, str] = {}
    for child, parent in pairs:
        if child == ROOT_TYPE:
            continue
        if child in edges and edges[child] != parent:
            raise SemanticError(f"type {child!r} declared with two parents",
                                child.span)
        edges[str(child)] = str(parent)
    # parents that are never declared themselves hang off the root
    for parent in list(edges.values()):
        if parent != ROOT_TYPE and parent not in edges:
            edges[parent] = ROOT_TYPE
    for start in edges:
        seen = {start}
        cur = start
        while cur != ROOT_TYPE:
            cur = edges[cur]
            if cur in seen:
                raise SemanticError(f"cyclic type hierarchy through {start!r}")
            seen.add(cur)
    return TypeHierarchy(tuple(sorted(edges.items())))


def _parse_action(raw: SList, errors: list[Diagnostic], check_type) -> ActionSchema:
    if len(raw) < 2:
        raise PDDLSyntaxError("action without a name", raw.span)
    name = _expect_symbol(raw[1], "action name")
    params: list[tuple[Symbol, Symbol]] = []
    precondition: Optional[SExpr] = None
    effect: Optional[SExpr] = None
    i = 2
    while i < len(raw):
        key = _expect_symbol(raw[i], "an action keyword")
        if i + 1 >= len(raw):
            raise PDDLSyntaxError(f"{key} without a value", key.span)
        value = raw[i + 1]
        if key == ":parameters":
            if not isinstance(value, SList):
                raise PDDLSyntaxError(":parameters expects a list", _span(value))
            params = _typed_list(value, variables=True)
        elif key == ":precondition":
            precondition = value
        elif key == ":effect":
            effect = value
        else:
            raise PDDLSyntaxError(f"unknown action keyword {key!r}", key.span)
        i += 2
    for _, t in params:
        check_type(t)

    pre = frozenset(_literal(c, True, "preconditions")
                    for c in (_conjuncts(precondition) if precondition is not None else []))
    adds, dels = set(), set()
    for c in (_conjuncts(effect) if effect is not None else []):
        lit = _literal(c, True, "effects")
        if lit.positive:
            adds.add(lit)
        else:
            dels.add(Literal(lit.predicate, lit.args))
    overlap = adds & dels
    if overlap:
        errors.append(Diagnostic(
            "error", f"action {name!r} both adds and deletes "
                     f"{', '.join(sorted(map(str, overlap)))}", name.span))
    return ActionSchema(
        name=str(name),
        params=tuple(TypedName(str(v), str(t)) for v, t in params),
        preconditions=pre,
        add_effects=frozenset(adds),
        del_effects=frozenset(dels),
    )


def _check_action(domain: Domain, action: ActionSchema,
                  errors: list[Diagnostic]) -> None:
    bound = {p.name: p.type for p in action.params}
    bound.update({c.name: c.type for c in domain.constants})
    declared = domain.types.declared()
    for lit in (*action.preconditions, *action.add_effects, *action.del_effects):
        schema = domain.predicate(lit.predicate, len(lit.args))
        if schema is None:
            errors.append(Diagnostic(
                "error", f"action {action.name!r} uses undeclared predicate "
                         f"{lit.predicate}/{len(lit.args)}"))
            continue
        for arg, slot in zip(lit.args, schema.params):
            if arg not in bound:
                errors.append(Diagnostic(
                    "error", f"action {action.name!r} uses unbound term {arg!r}"))
            elif bound[arg] in declared and slot.type in declared and \
                    not domain.types.is_subtype(bound[arg], slot.type):
                errors.append(Diagnostic(
                    "error", f"action {action.name!r}: {arg} of type "
                             f"{bound[arg]!r} does not fit {lit.predicate} slot "
                             f"of type {slot.type!r}"))


# ── problem ──────────────────────────────────────────────────────────────────


def _parse_problem(text: str, domain: Domain,
                   warnings: list[Diagnostic]) -> Problem:
    root = _read_single(text, "problem")
    name = _header(root, "problem")
    domain_name: Optional[Symbol] = None
    objects: list[tuple[Symbol, Symbol]] = []
    init_exprs: list[SList] = []
    goal_expr: Optional[SList] = None
    errors: list[Diagnostic] = []

    for keyword, section in _sections(root):
        if keyword == ":domain":
            if len(section) != 2:
                raise PDDLSyntaxError("(:domain <name>) expected", section.span)
            domain_name = _expect_symbol(section[1], "domain name")
        elif keyword == ":objects":
            objects.extend(_typed_list(section[1:], variables=False))
        elif keyword == ":requirements":
            continue
        elif keyword == ":init":
            for item in section[1:]:
                if not isinstance(item, SList):
                    raise PDDLSyntaxError("expected an atom in :init", _span(item))
                init_exprs.append(item)
        elif keyword == ":goal":
            if len(section) != 2 or not isinstance(section[1], SList):
                raise PDDLSyntaxError("(:goal <formula>) expected", section.span)
            goal_expr = section[1]
        elif keyword in _UNSUPPORTED_PROBLEM_SECTIONS:
            raise UnsupportedFeature(
                f"{keyword} ({_UNSUPPORTED_PROBLEM_SECTIONS[keyword]}) is not supported",
                section.span)
        else:
            raise PDDLSyntaxError(f"unknown problem section {keyword!r}", section.span)

    if domain_name is None:
        warnings.append(Diagnostic("warning", "problem has no (:domain ...) section",
                                   root.span))
    elif domain_name != domain.name:
        warnings.append(Diagnostic(
            "warning", f"problem names domain {domain_name!r}, expected "
                       f"{domain.name!r}", domain_name.span))

    declared_types = domain.types.declared()
    types: dict[str, str] = {c.name: c.type for c in domain.constants}
    for obj, t in objects:
        if not _valid_name(obj):
            errors.append(Diagnostic("error", f"invalid object name {obj!r}", obj.span))
        if t not in declared_types:
            errors.append(Diagnostic("error", f"object {obj!r} has undeclared type {t!r}",
                                     t.span))
        if obj in types and types[obj] != t:
            errors.append(Diagnostic(
                "error", f"object {obj!r} declared as both {types[obj]!r} and {t!r}",
                obj.span))
        types[str(obj)] = str(t)

    def ground(expr: SList, where: str) -> Optional[GroundAtom]:
        lit = _literal(expr, False, where)
        atom = GroundAtom(lit.predicate, lit.args)
        schema = domain.predicate(atom.predicate, len(atom.args))
        if schema is None:
            errors.append(Diagnostic(
                "error", f"undeclared predicate {atom.predicate}/{len(atom.args)} "
                         f"in {where}", expr.span))
            return None
        ok = True
        for arg, slot in zip(atom.args, schema.params):
            if arg not in types:
                errors.append(Diagnostic(
                    "error", f"undeclared object {arg!r} in {where} atom {atom}",
                    expr.span))
                ok = False
            elif types[arg] in declared_types and \
                    not domain.types.is_subtype(types[arg], slot.type):
                errors.append(Diagnostic(
                    "error", f"{arg!r} of type {types[arg]!r} does not fit "
                             f"{atom.predicate} slot of type {slot.type!r}",
                    expr.span))
                ok = False
        return atom if ok else None

    init = {a for a in (ground(e, "init") for e in init_exprs) if a is not None}

    goal: set[GroundAtom] = set()
    if goal_expr is None:
        errors.append(Diagnostic("error", "problem has no :goal", root.span))
    else:
        for conj in _conjuncts(goal_expr):
            if conj and conj[0] == "not":
                raise UnsupportedFeature("negated goals are not supported", conj.span)
            atom = ground(conj, "goal")
            if atom is not None:
                goal.add(atom)
        if not goal and not errors:
            errors.append(Diagnostic("error", "goal is empty", goal_expr.span))

    if errors:
        raise SemanticError(errors[0].message, errors[0].span, errors)
    constant_names = {c.name for c in domain.constants}
    return Problem(
        name=str(name),
        domain_name=str(domain_name) if domain_name is not None else domain.name,
        objects=frozenset(TypedName(str(o), str(t)) for o, t in objects
                          if o not in constant_names),
        init=frozenset(init),
        goal=frozenset(goal),
    )


def parse_problem(text: str, domain: Domain) -> Problem:
    """Parse and type-check a problem file against ``domain``.

    A header naming a different domain only produces a warning; use
    :func:`check_compilation` to see warnings.
    """
    return _parse_problem(text, domain, [])


def check_compilation(problem_text: str, domain: Domain) -> CompilationResult:
    warnings: list[Diagnostic] = []
    try:
        problem = _parse_problem(problem_text, domain, warnings)
    except PDDLError as exc:
        diags = [d if d.kind == exc.kind else
                 Diagnostic(d.severity, d.message, d.span, exc.kind)
                 for d in exc.diagnostics]
        return CompilationResult(False, tuple(warnings + diags))
    return CompilationResult(True, tuple(warnings), problem)


# ── printing ─────────────────────────────────────────────────────────────────


def render_problem(problem: Problem) -> str:
    """Deterministic PDDL text for ``problem``; sections are sorted."""
    if not problem.goal:
        raise SemanticError("cannot render a problem with an empty goal")
    lines = [f"(define (problem {problem.name})",
             f"  (:domain {problem.domain_name})",
             "  (:objects"]
    lines += [f"    {o}" for o in sorted(map(str, problem.objects))]
    lines[-1] += ")"
    lines.append("  (:init")
    lines += [f"    {a}" for a in sorted(map(str, problem.init))]
    lines[-1] += ")"
    lines.append("  (:goal (and")
    lines += [f"    {a}" for a in sorted(map(str, problem.goal))]
    lines[-1] += ")))"
    return "\n".join(lines) + "\n"


def render_atoms(atoms: Iterable[GroundAtom]) -> list[str]:
    return sorted(map(str, atoms))
