"""Text format for sourcing worlds and plans.

Two document kinds share one lexer: equilibrium files (`.meq`) declare units,
subunits, sources, services, money streams and contracts; plan files (`.mpl`)
declare threads of guarded steps against a referenced equilibrium. Parsing
never raises for bad input; it returns a ParseResult whose diagnostics carry
1-based line/column positions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .catalog import get_source_type
from .errors import SourceqError, UnknownScale
from .model import (AdvantageFlags, ContractKind, CostCategory,
                    EquilibriumBuilder, SourcingEquilibrium, EXTERNAL)
from .planning import ContractPresent, EntityExists, GuardedStep, Plan, TitleAtLevel
from .steps import (AbandonTitle, AcquireSource, ChangeTitleLevel,
                    CreateSubunit, CreateUnit, DissolveSubunit, DissolveUnit,
                    FinancialTransfer, MoveService, SignContract,
                    TerminateContract, TransferTitle, TransformationScope)
from .validation import validate_equilibrium

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<number>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_-]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<punct>[{}(),;:=.])
    """,
    re.VERBOSE,
)

_CATEGORY_BY_TOKEN = {c.value: c for c in CostCategory}
_KIND_BY_TOKEN = {k.value: k for k in ContractKind}
_FLAG_LETTERS = {"v": "valuable", "r": "rare", "i": "inimitable",
                 "n": "non_substitutable"}


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    severity: str
    message: str
    token: str = ""
    #: "syntax" for lexing/grammar problems, "semantic" for resolution and
    #: validation problems in a grammatically well-formed document.
    category: str = "syntax"

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


@dataclass(frozen=True)
class ParseResult:
    value: object | None
    diagnostics: tuple = ()

    @property
    def ok(self) -> bool:
        return self.value is not None and not any(
            d.severity == "error" for d in self.diagnostics)

    @property
    def syntax_ok(self) -> bool:
        """True when the document is grammatically well formed, even if it
        fails reference resolution or validation."""
        return not any(d.severity == "error" and d.category == "syntax"
                       for d in self.diagnostics)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


class _Halt(Exception):
    """Internal signal: the current declaration cannot continue."""


def tokenize(text: str):
    tokens, diagnostics = [], []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            diagnostics.append(Diagnostic(
                line, col, "error", f"unexpected character {text[pos]!r}",
                text[pos]))
            pos += 1
            col += 1
            continue
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "newline":
            line += 1
            col = 1
        elif kind in ("ws", "comment"):
            col += len(lexeme)
        else:
            tokens.append(Token(kind, lexeme, line, col))
            col += len(lexeme)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens, diagnostics


def _unquote(text: str) -> str:
    body = text[1:-1]
    return body.replace('\\"', '"').replace("\\\\", "\\")


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics: list[Diagnostic] = []

    # -- token plumbing ----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_keyword(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text in words

    def error(self, message: str, tok: Token | None = None) -> _Halt:
        tok = tok or self.peek()
        self.diagnostics.append(Diagnostic(tok.line, tok.column, "error",
                                           message, tok.text))
        return _Halt()

    def semantic(self, message: str, tok: Token) -> None:
        self.diagnostics.append(Diagnostic(tok.line, tok.column, "error",
                                           message, tok.text,
                                           category="semantic"))

    def expect_punct(self, char: str) -> Token:
        tok = self.peek()
        if tok.kind != "punct" or tok.text != char:
            raise self.error(f"expected {char!r}")
        return self.advance()

    def expect_keyword(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind != "ident" or tok.text != word:
            raise self.error(f"expected keyword {word!r}")
        return self.advance()

    def expect_ident(self, what: str = "identifier") -> Token:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.error(f"expected {what}")
        return self.advance()

    def expect_int(self, what: str = "integer") -> tuple[int, Token]:
        tok = self.peek()
        if tok.kind != "number" or any(c in tok.text for c in ".eE"):
            raise self.error(f"expected {what}")
        self.advance()
        return int(tok.text), tok

    def expect_real(self, what: str = "number") -> tuple[float, Token]:
        tok = self.peek()
        if tok.kind != "number":
            raise self.error(f"expected {what}")
        self.advance()
        return float(tok.text), tok

    def expect_string(self, what: str = "string") -> tuple[str, Token]:
        tok = self.peek()
        if tok.kind != "string":
            raise self.error(f"expected {what}")
        self.advance()
        return _unquote(tok.text), tok

    def skip_to_sync(self, sync_words, also_punct=("}", ";")) -> None:
        depth = 0
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                return
            if tok.kind == "punct" and tok.text == "{":
                depth += 1
            elif tok.kind == "punct" and tok.text in also_punct and depth == 0:
                self.advance()
                return
            elif tok.kind == "punct" and tok.text == "}":
                depth -= 1
            elif depth == 0 and tok.kind == "ident" and tok.text in sync_words:
                return
            self.advance()

    # -- shared pieces -----------------------------------------------------

    def parse_dotted(self, what: str) -> tuple[str | None, str, Token]:
        """`a.b` or bare `b`: returns (qualifier, name, position token)."""
        first = self.expect_ident(what)
        if self.peek().kind == "punct" and self.peek().text == ".":
            self.advance()
            second = self.expect_ident(what)
            return first.text, second.text, first
        return None, first.text, first

    def parse_flags(self) -> AdvantageFlags:
        values = dict.fromkeys(_FLAG_LETTERS.values(), False)
        while True:
            tok = self.expect_ident("advantage flag")
            if tok.text not in _FLAG_LETTERS:
                raise self.error(
                    f"unknown advantage flag {tok.text!r} (use v, r, i, n)", tok)
            values[_FLAG_LETTERS[tok.text]] = True
            if self.peek().kind == "punct" and self.peek().text == ",":
                self.advance()
                continue
            return AdvantageFlags(**values)

    def parse_cost_pairs(self) -> dict:
        profile: dict = {}
        while (self.peek().kind == "ident"
               and self.peek(1).kind == "punct" and self.peek(1).text == "="):
            cat_tok = self.advance()
            self.advance()
            amount, _ = self.expect_real("cost amount")
            category = _CATEGORY_BY_TOKEN.get(cat_tok.text)
            if category is None:
                raise self.error(
                    f"unknown cost category {cat_tok.text!r}", cat_tok)
            if category in profile:
                raise self.error(
                    f"repeated cost category {cat_tok.text!r}", cat_tok)
            profile[category] = amount
        if not profile:
            raise self.error("expected at least one <category>=<amount> pair")
        return profile

    def parse_id_list(self) -> list[str]:
        names = [self.expect_ident().text]
        while self.peek().kind == "punct" and self.peek().text == ",":
            self.advance()
            names.append(self.expect_ident().text)
        return names

    def parse_source_attributes(self, decl: "_SourceDecl",
                                allow_title_slots: bool) -> None:
        seen: set[str] = set()

        def once(word: str, tok: Token) -> None:
            if word in seen:
                raise self.error(f"repeated {word!r} attribute", tok)
            seen.add(word)

        while True:
            tok = self.peek()
            if tok.kind != "ident":
                return
            word = tok.text
            if word == "holder" and allow_title_slots:
                once(word, tok)
                self.advance()
                decl.holder = self.expect_ident("holder unit").text
            elif word == "counterparty" and allow_title_slots:
                once(word, tok)
                self.advance()
                decl.counterparty = self.expect_ident("counterparty unit").text
            elif word == "critical" and allow_title_slots:
                once("critical", tok)
                self.advance()
                decl.critical = True
            elif word == "critical-for":
                once("critical", tok)
                self.advance()
                decl.critical_for = self.expect_ident("unit id").text
            elif word == "flags":
                once(word, tok)
                self.advance()
                decl.flags = self.parse_flags()
            elif word == "cost":
                once(word, tok)
                self.advance()
                decl.cost = self.parse_cost_pairs()
            else:
                return


# -- equilibrium documents -------------------------------------------------

@dataclass
class _SourceDecl:
    id: str
    type_id: str
    level: int
    using: str
    using_unit: str
    holder: str | None = None
    counterparty: str | None = None
    critical: bool = False
    critical_for: str | None = None
    flags: AdvantageFlags = AdvantageFlags()
    cost: dict = field(default_factory=dict)
    tok: Token | None = None


@dataclass
class _Decls:
    time: int = 0
    units: list = field(default_factory=list)
    subunits: list = field(default_factory=list)
    sources: list = field(default_factory=list)
    unsourced: list = field(default_factory=list)
    services: list = field(default_factory=list)
    money: list = field(default_factory=list)
    contracts: list = field(default_factory=list)


_TOP_KEYWORDS = ("time", "unit", "unsourced", "service", "money", "contract")


class _EquilibriumParser(_Parser):
    def parse_document(self) -> _Decls:
        decls = _Decls()
        seen_time = False
        while self.peek().kind != "eof":
            try:
                if self.at_keyword("time"):
                    tok = self.advance()
                    value, _ = self.expect_int("logical time")
                    if seen_time:
                        self.semantic("repeated time declaration", tok)
                    decls.time = value
                    seen_time = True
                elif self.at_keyword("unit"):
                    self.parse_unit(decls)
                elif self.at_keyword("unsourced"):
                    self.parse_unsourced(decls)
                elif self.at_keyword("service"):
                    self.parse_service(decls)
                elif self.at_keyword("money"):
                    self.parse_money(decls)
                elif self.at_keyword("contract"):
                    self.parse_contract(decls)
                else:
                    raise self.error(
                        "expected a declaration (one of: "
                        + ", ".join(_TOP_KEYWORDS) + ")")
            except _Halt:
                self.skip_to_sync(_TOP_KEYWORDS)
        return decls

    def parse_unit(self, decls: _Decls) -> None:
        self.expect_keyword("unit")
        unit_tok = self.expect_ident("unit id")
        name = ""
        mission = ""
        if self.peek().kind == "string":
            name, _ = self.expect_string()
        if self.at_keyword("identity"):
            self.advance()
            self.expect_punct(":")
            mission, _ = self.expect_string("identity text")
        decls.units.append((unit_tok.text, name, mission, unit_tok))
        self.expect_punct("{")
        while not (self.peek().kind == "punct" and self.peek().text == "}"):
            if self.at_keyword("subunit"):
                self.parse_subunit(decls, unit_tok.text)
            elif self.peek().kind == "eof":
                raise self.error("unclosed unit block")
            else:
                raise self.error("expected 'subunit' or '}'")
        self.expect_punct("}")

    def parse_subunit(self, decls: _Decls, unit_id: str) -> None:
        self.expect_keyword("subunit")
        sub_tok = self.expect_ident("subunit id")
        decls.subunits.append((unit_id, sub_tok.text, sub_tok))
        self.expect_punct("{")
        while not (self.peek().kind == "punct" and self.peek().text == "}"):
            if self.at_keyword("source"):
                self.parse_source(decls, unit_id, sub_tok.text)
            elif self.peek().kind == "eof":
                raise self.error("unclosed subunit block")
            else:
                raise self.error("expected 'source' or '}'")
        self.expect_punct("}")

    def parse_source(self, decls: _Decls, unit_id: str, subunit_id: str) -> None:
        self.expect_keyword("source")
        src_tok = self.expect_ident("source id")
        self.expect_punct(":")
        type_tok = self.expect_ident("source type")
        self.expect_keyword("level")
        level, level_tok = self.expect_int("level")
        decl = _SourceDecl(id=src_tok.text, type_id=type_tok.text, level=level,
                           using=subunit_id, using_unit=unit_id, tok=src_tok)
        self.parse_source_attributes(decl, allow_title_slots=True)
        decls.sources.append((decl, level_tok))

    def parse_unsourced(self, decls: _Decls) -> None:
        self.expect_keyword("unsourced")
        src_tok = self.expect_ident("source id")
        self.expect_punct(":")
        type_tok = self.expect_ident("source type")
        decl = _SourceDecl(id=src_tok.text, type_id=type_tok.text, level=0,
                           using="", using_unit="", tok=src_tok)
        self.parse_source_attributes(decl, allow_title_slots=False)
        decls.unsourced.append(decl)

    def parse_service(self, decls: _Decls) -> None:
        self.expect_keyword("service")
        svc_tok = self.expect_ident("service id")
        self.expect_keyword("from")
        provider = self.parse_dotted("provider")
        self.expect_keyword("to")
        if self.at_keyword("external"):
            self.advance()
            consumer = (None, EXTERNAL, svc_tok)
        else:
            consumer = self.parse_dotted("consumer")
        self.expect_keyword("volume")
        volume, _ = self.expect_real("volume")
        decls.services.append((svc_tok.text, provider, consumer, volume, svc_tok))

    def parse_money(self, decls: _Decls) -> None:
        self.expect_keyword("money")
        self.expect_keyword("from")
        payer_tok = self.expect_ident("payer unit")
        self.expect_keyword("to")
        payee_tok = self.expect_ident("payee unit")
        self.expect_keyword("amount")
        amount, _ = self.expect_real("amount")
        decls.money.append((payer_tok.text, payee_tok.text, amount, payer_tok))

    def parse_contract(self, decls: _Decls) -> None:
        self.expect_keyword("contract")
        c_tok = self.expect_ident("contract id")
        self.expect_keyword("kind")
        kind_tok = self.expect_ident("contract kind")
        kind = _KIND_BY_TOKEN.get(kind_tok.text)
        if kind is None:
            raise self.error(
                f"unknown contract kind {kind_tok.text!r} (one of: "
                + ", ".join(sorted(_KIND_BY_TOKEN)) + ")", kind_tok)
        self.expect_keyword("between")
        parties = self.parse_id_list()
        covers: list[str] = []
        expiry = None
        if self.at_keyword("covers"):
            self.advance()
            covers = self.parse_id_list()
        if self.at_keyword("expires"):
            self.advance()
            expiry, _ = self.expect_int("expiry time")
        decls.contracts.append(
            (c_tok.text, kind, tuple(parties), covers, expiry, c_tok))


def _build_equilibrium(decls: _Decls, parser: _Parser) -> SourcingEquilibrium | None:
    builder = EquilibriumBuilder()
    builder.set_time(decls.time)
    known_subunit_units: dict[str, str] = {}
    failed = False

    def attempt(tok: Token, fn, *args, **kwargs) -> bool:
        nonlocal failed
        try:
            fn(*args, **kwargs)
            return True
        except (ValueError, SourceqError) as exc:
            parser.semantic(str(exc), tok)
            failed = True
            return False

    for unit_id, name, mission, tok in decls.units:
        attempt(tok, builder.add_unit, unit_id, name, mission)
    for unit_id, sub_id, tok in decls.subunits:
        if attempt(tok, builder.add_subunit, unit_id, sub_id):
            known_subunit_units[sub_id] = unit_id
    for decl, level_tok in decls.sources:
        try:
            stype = get_source_type(decl.type_id)
        except UnknownScale as exc:
            parser.semantic(str(exc), decl.tok)
            failed = True
            continue
        first_half = (stype.scale.outsourcer_half(decl.level)
                      if 1 <= decl.level <= stype.scale.size else True)
        kwargs = dict(level=decl.level, using=decl.using,
                      third_party=decl.counterparty, cost=decl.cost,
                      advantage=decl.flags)
        if first_half:
            kwargs["insourcer"] = decl.holder
            outsourcer_unit = decl.using_unit
        else:
            kwargs["outsourcer"] = decl.holder
            outsourcer_unit = decl.holder
        critical_for = decl.critical_for
        if decl.critical and critical_for is None:
            critical_for = outsourcer_unit
        kwargs["critical_for"] = critical_for
        attempt(level_tok, builder.add_source, decl.id, decl.type_id, **kwargs)
    for decl in decls.unsourced:
        attempt(decl.tok, builder.add_untitled_source, decl.id, decl.type_id,
                cost=decl.cost, advantage=decl.flags,
                critical_for=decl.critical_for)
    for svc_id, provider, consumer, volume, tok in decls.services:
        p_unit, p_sub, p_tok = provider
        if p_unit is not None and known_subunit_units.get(p_sub) != p_unit:
            parser.semantic(
                f"subunit {p_sub!r} does not belong to unit {p_unit!r}", p_tok)
            failed = True
            continue
        c_unit, c_name, c_tok = consumer
        if c_unit is not None and known_subunit_units.get(c_name) != c_unit:
            parser.semantic(
                f"subunit {c_name!r} does not belong to unit {c_unit!r}", c_tok)
            failed = True
            continue
        attempt(tok, builder.add_service, svc_id, p_sub, c_name, volume)
    for payer, payee, amount, tok in decls.money:
        attempt(tok, builder.add_money, payer, payee, amount)
    for c_id, kind, parties, covers, expiry, tok in decls.contracts:
        attempt(tok, builder.add_contract, c_id, kind, parties, set(covers),
                expiry)
    if failed:
        return None
    return builder.build()


def parse_equilibrium(text: str) -> ParseResult:
    """Parse an equilibrium document; value is None when diagnostics have
    errors. The produced snapshot always passes validate_equilibrium."""
    tokens, tok_diags = tokenize(text)
    parser = _EquilibriumParser(tokens)
    parser.diagnostics.extend(tok_diags)
    decls = parser.parse_document()
    eq = None
    if not any(d.severity == "error" for d in parser.diagnostics):
        eq = _build_equilibrium(decls, parser)
    if eq is not None:
        report = validate_equilibrium(eq)
        for finding in report.findings:
            parser.semantic(f"{finding.rule}: {finding.message}",
                            Token("ident", finding.entity, 1, 1))
        if not report.ok:
            eq = None
    diags = tuple(sorted(parser.diagnostics, key=lambda d: (d.line, d.column)))
    if any(d.severity == "error" for d in diags):
        return ParseResult(None, diags)
    return ParseResult(eq, diags)


# -- plan documents ----------------------------------------------------------

_PLAN_TOP = ("use", "plan")
_STEP_WORDS = ("transfer", "retitle", "abandon", "acquire", "move-service",
               "create-unit", "create-subunit", "dissolve-subunit",
               "dissolve-unit", "sign", "terminate", "pay")


class _PlanParser(_Parser):
    def parse_document(self) -> Plan | None:
        equilibrium_ref = None
        plan = None
        while self.peek().kind != "eof":
            try:
                if self.at_keyword("use"):
                    tok = self.advance()
                    path, _ = self.expect_string("equilibrium path")
                    if equilibrium_ref is not None:
                        self.semantic("repeated use declaration", tok)
                    equilibrium_ref = path
                elif self.at_keyword("plan"):
                    if plan is not None:
                        self.semantic("only one plan per document",
                                      self.peek())
                        # Step past the keyword or resynchronization would
                        # land on it again, forever.
                        self.advance()
                        raise _Halt()
                    plan = self.parse_plan_block()
                else:
                    raise self.error("expected 'use' or 'plan'")
            except _Halt:
                self.skip_to_sync(_PLAN_TOP)
        if plan is None:
            self.semantic("document declares no plan",
                          self.tokens[-1])
            return None
        plan_id, scope, threads, tok = plan
        try:
            return Plan(id=plan_id, threads=threads, scope=scope,
                        equilibrium_ref=equilibrium_ref)
        except ValueError as exc:
            self.semantic(str(exc), tok)
            return None

    def parse_plan_block(self):
        plan_tok = self.expect_keyword("plan")
        id_tok = self.expect_ident("plan id")
        scope = None
        if self.at_keyword("scope"):
            scope = self.parse_scope()
        self.expect_punct("{")
        threads: dict[str, tuple] = {}
        while not (self.peek().kind == "punct" and self.peek().text == "}"):
            if self.peek().kind == "eof":
                raise self.error("unclosed plan block")
            name_tok, steps = self.parse_thread()
            if name_tok.text in threads:
                self.semantic(f"duplicate thread name {name_tok.text!r}",
                              name_tok)
            else:
                threads[name_tok.text] = tuple(steps)
        self.expect_punct("}")
        return id_tok.text, scope, threads, plan_tok

    def parse_scope(self) -> TransformationScope:
        self.expect_keyword("scope")
        self.expect_punct("(")
        values: dict[str, object] = {}
        first = True
        while not (self.peek().kind == "punct" and self.peek().text == ")"):
            if not first:
                self.expect_punct(",")
            first = False
            key_tok = self.expect_ident("scope key")
            key = key_tok.text
            if key not in ("A", "B", "X", "Y", "sources"):
                raise self.error(
                    f"unknown scope key {key!r} (A, B, X, Y, sources)", key_tok)
            if key in values:
                raise self.error(f"repeated scope key {key!r}", key_tok)
            self.expect_punct("=")
            if key == "sources":
                names = [self.expect_ident().text]
                while (self.peek().kind == "punct" and self.peek().text == ","
                       and not (self.peek(1).kind == "ident"
                                and self.peek(2).kind == "punct"
                                and self.peek(2).text == "=")):
                    self.advance()
                    names.append(self.expect_ident().text)
                values[key] = frozenset(names)
            else:
                values[key] = self.expect_ident("unit or subunit id").text
        close_tok = self.peek()
        self.expect_punct(")")
        for required in ("A", "B"):
            if required not in values:
                raise self.error(f"scope is missing {required}=", close_tok)
        return TransformationScope(
            outsourcer=values["A"], outsourcing_subunit=values["B"],
            insourcer=values.get("X"), insourcing_subunit=values.get("Y"),
            sources=values.get("sources", frozenset()))

    def parse_thread(self):
        self.expect_keyword("thread")
        name_tok = self.expect_ident("thread id")
        self.expect_punct("{")
        steps: list[GuardedStep] = []
        while not (self.peek().kind == "punct" and self.peek().text == "}"):
            if self.peek().kind == "eof":
                raise self.error("unclosed thread block")
            guard = None
            if self.at_keyword("when"):
                self.advance()
                guard = self.parse_guard()
            step = self.parse_step()
            self.expect_punct(";")
            steps.append(GuardedStep(step=step, guard=guard))
        self.expect_punct("}")
        return name_tok, steps

    def parse_guard(self):
        tok = self.peek()
        if self.at_keyword("exists"):
            self.advance()
            entity = self.expect_ident("entity id")
            return EntityExists(entity.text)
        if self.at_keyword("title"):
            self.advance()
            source = self.expect_ident("source id")
            self.expect_keyword("level")
            level, _ = self.expect_int("level")
            return TitleAtLevel(source.text, level)
        if self.at_keyword("contract"):
            self.advance()
            contract = self.expect_ident("contract id")
            return ContractPresent(contract.text)
        raise self.error("expected a guard (exists/title/contract)", tok)

    def parse_slot_override(self) -> str | None:
        if self.at_keyword("none"):
            self.advance()
            return None
        return self.expect_ident("unit id").text

    def parse_step(self):
        tok = self.peek()
        if tok.kind != "ident" or tok.text not in _STEP_WORDS:
            raise self.error(
                "expected a step (one of: " + ", ".join(_STEP_WORDS) + ")", tok)
        word = tok.text
        self.advance()
        if word == "transfer":
            source = self.expect_ident("source id").text
            self.expect_keyword("to")
            _, subunit, _ = self.parse_dotted("target subunit")
            self.expect_keyword("level")
            level, _ = self.expect_int("level")
            return TransferTitle(source, subunit, level)
        if word == "retitle":
            source = self.expect_ident("source id").text
            self.expect_keyword("level")
            level, _ = self.expect_int("level")
            slots = {}
            slot_words = {"outsourcer": "outsourcer", "holder": "insourcer",
                          "counterparty": "third_party"}
            while self.peek().kind == "ident" and self.peek().text in slot_words:
                slot_tok = self.advance()
                dest = slot_words[slot_tok.text]
                if dest in slots:
                    raise self.error(
                        f"repeated {slot_tok.text!r} override", slot_tok)
                slots[dest] = self.parse_slot_override()
            return ChangeTitleLevel(source, level, **slots)
        if word == "abandon":
            return AbandonTitle(self.expect_ident("source id").text)
        if word == "acquire":
            src_tok = self.expect_ident("source id")
            self.expect_punct(":")
            type_id = self.expect_ident("source type").text
            self.expect_keyword("level")
            level, _ = self.expect_int("level")
            decl = _SourceDecl(id=src_tok.text, type_id=type_id, level=level,
                               using="", using_unit="", tok=src_tok)
            self.parse_source_attributes(decl, allow_title_slots=False)
            self.expect_keyword("in")
            _, subunit, _ = self.parse_dotted("target subunit")
            return AcquireSource(subunit=subunit, source=decl.id,
                                 type_id=decl.type_id, level=decl.level,
                                 cost_profile=decl.cost, advantage=decl.flags,
                                 critical_for=decl.critical_for)
        if word == "move-service":
            service = self.expect_ident("service id").text
            self.expect_keyword("to")
            _, subunit, _ = self.parse_dotted("target subunit")
            return MoveService(service, subunit)
        if word == "create-unit":
            unit = self.expect_ident("unit id").text
            name = ""
            mission = ""
            if self.peek().kind == "string":
                name, _ = self.expect_string()
            if self.at_keyword("identity"):
                self.advance()
                self.expect_punct(":")
                mission, _ = self.expect_string("identity text")
            return CreateUnit(unit, name, mission)
        if word == "create-subunit":
            subunit = self.expect_ident("subunit id").text
            self.expect_keyword("in")
            unit = self.expect_ident("unit id").text
            return CreateSubunit(unit=unit, subunit=subunit)
        if word == "dissolve-subunit":
            _, subunit, _ = self.parse_dotted("subunit")
            return DissolveSubunit(subunit)
        if word == "dissolve-unit":
            return DissolveUnit(self.expect_ident("unit id").text)
        if word == "sign":
            contract = self.expect_ident("contract id").text
            self.expect_keyword("kind")
            kind_tok = self.expect_ident("contract kind")
            kind = _KIND_BY_TOKEN.get(kind_tok.text)
            if kind is None:
                raise self.error(
                    f"unknown contract kind {kind_tok.text!r}", kind_tok)
            self.expect_keyword("between")
            parties = tuple(self.parse_id_list())
            covers: frozenset = frozenset()
            expiry = None
            if self.at_keyword("covers"):
                self.advance()
                covers = frozenset(self.parse_id_list())
            if self.at_keyword("expires"):
                self.advance()
                expiry, _ = self.expect_int("expiry time")
            return SignContract(contract, kind, parties, covers, expiry)
        if word == "terminate":
            return TerminateContract(self.expect_ident("contract id").text)
        if word == "pay":
            payer = self.expect_ident("payer unit").text
            self.expect_keyword("to")
            payee = self.expect_ident("payee unit").text
            self.expect_keyword("amount")
            amount, _ = self.expect_real("amount")
            return FinancialTransfer(payer, payee, amount)
        raise self.error(f"unhandled step kind {word!r}", tok)


def parse_plan(text: str) -> ParseResult:
    """Parse a plan document; value is None when diagnostics have errors."""
    tokens, tok_diags = tokenize(text)
    parser = _PlanParser(tokens)
    parser.diagnostics.extend(tok_diags)
    plan = parser.parse_document()
    diags = tuple(sorted(parser.diagnostics, key=lambda d: (d.line, d.column)))
    if any(d.severity == "error" for d in diags):
        return ParseResult(None, diags)
    return ParseResult(plan, diags)
