"""Reader and writer for the Turtle subset used by rail topology instance data.

Supported: ``@prefix``/``PREFIX``, ``@base``/``BASE``, IRIs, prefixed names,
blank nodes (``_:x`` and ``[ ... ]``), collections, string/integer/decimal/
double/boolean literals, language tags (passed through), ``a`` and the
``;``/``,`` shorthands.
"""

from __future__ import annotations

import hashlib
import re
from typing import Iterable, Optional
from urllib.parse import urljoin

from .rdf import (
    DEFAULT_PREFIXES,
    RDF,
    RDF_LANGSTRING,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    BNode,
    IRI,
    Literal,
    Node,
    Term,
    Triple,
    TripleSet,
    term_key,
    triple_key,
)

DEFAULT_BASE = "http://example.org/"

_PN_PREFIX = r"(?:[^\W\d_](?:[\w.-]*[\w-])?)?"
_PN_LOCAL_CHAR = r"(?:[\w:-]|%[0-9A-Fa-f]{2}|\\[-_~.!$&'()*+,;=/?#@%])"
_PN_LOCAL = rf"(?:{_PN_LOCAL_CHAR}(?:(?:{_PN_LOCAL_CHAR}|\.)*{_PN_LOCAL_CHAR})?)?"
_PNAME_RE = re.compile(rf"({_PN_PREFIX}):({_PN_LOCAL})")
_BNODE_RE = re.compile(r"_:([\w](?:[\w.-]*[\w-])?)")
_DOUBLE_RE = re.compile(r"[+-]?(?:\d+\.\d*[eE][+-]?\d+|\.\d+[eE][+-]?\d+|\d+[eE][+-]?\d+)")
_DECIMAL_RE = re.compile(r"[+-]?\d*\.\d+")
_INTEGER_RE = re.compile(r"[+-]?\d+")
_LANG_RE = re.compile(r"@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*)")
_IRIREF_RE = re.compile(r"<([^<>\"{}|^`\\\x00-\x20]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*>")
_KEYWORD_END = re.compile(r"(?![\w:-])")

_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


class TurtleSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class CollectionError(ValueError):
    def __init__(self, message: str, node: Term) -> None:
        super().__init__(f"{message}: {node}")
        self.node = node


class _Parser:
    def __init__(self, text: str, base: str, bnode_prefix: str) -> None:
        self.text = text
        self.pos = 0
        self.base = base
        self.prefixes = dict(DEFAULT_PREFIXES)
        self.declared: dict[str, str] = {}
        self.triples: set[Triple] = set()
        self._bnode_prefix = bnode_prefix
        self._bnode_count = 0
        self._labels: dict[str, BNode] = {}

    # -- low level -------------------------------------------------------

    def error(self, message: str, pos: Optional[int] = None) -> TurtleSyntaxError:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        column = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return TurtleSyntaxError(message, line, column)

    def ws(self) -> None:
        text, n = self.text, len(self.text)
        while self.pos < n:
            c = text[self.pos]
            if c in " \t\r\n":
                self.pos += 1
            elif c == "#":
                end = text.find("\n", self.pos)
                self.pos = n if end < 0 else end + 1
            else:
                break

    def peek(self) -> str:
        self.ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            found = self.text[self.pos] if self.pos < len(self.text) else "end of input"
            raise self.error(f"expected '{ch}', found {found!r}")
        self.pos += 1

    def match_keyword(self, word: str, case_insensitive: bool = False) -> bool:
        self.ws()
        chunk = self.text[self.pos : self.pos + len(word)]
        if (chunk.lower() == word.lower()) if case_insensitive else (chunk == word):
            if _KEYWORD_END.match(self.text, self.pos + len(word)):
                self.pos += len(word)
                return True
        return False

    def fresh_bnode(self) -> BNode:
        node = BNode(f"{self._bnode_prefix}b{self._bnode_count}")
        self._bnode_count += 1
        return node

    # -- grammar ---------------------------------------------------------

    def parse(self) -> TripleSet:
        while self.peek():
            self.statement()
        return TripleSet(self.triples, self.declared)

    def statement(self) -> None:
        if self.match_keyword("@prefix"):
            self.prefix_decl()
            self.expect(".")
        elif self.match_keyword("@base"):
            self.base = self.iriref()
            self.expect(".")
        elif self.match_keyword("PREFIX", case_insensitive=True):
            self.prefix_decl()
        elif self.match_keyword("BASE", case_insensitive=True):
            self.base = self.iriref()
        else:
            self.triples_stmt()
            self.expect(".")

    def prefix_decl(self) -> None:
        self.ws()
        m = re.compile(rf"({_PN_PREFIX}):").match(self.text, self.pos)
        if not m:
            raise self.error("expected prefix name")
        self.pos = m.end()
        ns = self.iriref()
        self.prefixes[m.group(1)] = ns
        self.declared[m.group(1)] = ns

    def triples_stmt(self) -> None:
        c = self.peek()
        if c == "[":
            subject = self.blank_property_list()
            if self.peek() not in (".", ""):
                self.predicate_object_list(subject)
            return
        subject = self.subject()
        self.predicate_object_list(subject)

    def subject(self) -> Node:
        c = self.peek()
        if c == "(":
            return self.collection()
        if c == "<":
            return IRI(self.iriref())
        if self.text.startswith("_:", self.pos):
            return self.labeled_bnode()
        if c == "":
            raise self.error("unexpected end of input, expected subject")
        return self.prefixed_name()

    def predicate_object_list(self, subject: Node) -> None:
        self.verb_object_list(subject)
        while self.peek() == ";":
            while self.peek() == ";":
                self.pos += 1
            if self.peek() in (".", "]", ""):
                return
            self.verb_object_list(subject)

    def verb_object_list(self, subject: Node) -> None:
        predicate = self.verb()
        self.add(subject, predicate, self.object())
        while self.peek() == ",":
            self.pos += 1
            self.add(subject, predicate, self.object())

    def verb(self) -> IRI:
        if self.match_keyword("a"):
            return RDF.type
        c = self.peek()
        if c == "<":
            return IRI(self.iriref())
        if c == "":
            raise self.error("unexpected end of input, expected predicate")
        return self.prefixed_name()

    def object(self) -> Term:
        c = self.peek()
        if c == "":
            raise self.error("unexpected end of input, expected object")
        if c == "<":
            return IRI(self.iriref())
        if c == "(":
            return self.collection()
        if c == "[":
            return self.blank_property_list()
        if c in "\"'":
            return self.rdf_literal()
        if self.text.startswith("_:", self.pos):
            return self.labeled_bnode()
        if c in "+-.0123456789":
            return self.numeric_literal()
        if self.match_keyword("true"):
            return Literal("true", XSD_BOOLEAN)
        if self.match_keyword("false"):
            return Literal("false", XSD_BOOLEAN)
        return self.prefixed_name()

    def add(self, s: Term, p: IRI, o: Term) -> None:
        self.triples.add(Triple(s, p, o))

    def collection(self) -> Node:
        start = self.pos
        self.expect("(")
        items: list[Term] = []
        while True:
            c = self.peek()
            if c == "" or (c == "." and not self.text[self.pos + 1 : self.pos + 2].isdigit()):
                raise self.error("unterminated collection", start)
            if c == ")":
                self.pos += 1
                break
            items.append(self.object())
        if not items:
            return RDF.nil
        nodes = [self.fresh_bnode() for _ in items]
        for i, (node, item) in enumerate(zip(nodes, items)):
            self.add(node, RDF.first, item)
            self.add(node, RDF.rest, nodes[i + 1] if i + 1 < len(nodes) else RDF.nil)
        return nodes[0]

    def blank_property_list(self) -> BNode:
        start = self.pos
        self.expect("[")
        node = self.fresh_bnode()
        if self.peek() == "]":
            self.pos += 1
            return node
        self.predicate_object_list(node)
        if self.peek() == "":
            raise self.error("unterminated blank node property list", start)
        self.expect("]")
        return node

    def labeled_bnode(self) -> BNode:
        m = _BNODE_RE.match(self.text, self.pos)
        if not m:
            raise self.error("malformed blank node label")
        self.pos = m.end()
        label = m.group(1)
        if label not in self._labels:
            self._labels[label] = self.fresh_bnode()
        return self._labels[label]

    def iriref(self) -> str:
        self.ws()
        start = self.pos
        if not self.text.startswith("<", start):
            raise self.error("expected IRI")
        m = _IRIREF_RE.match(self.text, start)
        if not m:
            end = self.text.find(">", start)
            if end < 0:
                raise self.error("unterminated IRI", start)
            raise self.error("invalid character in IRI", start)
        self.pos = m.end()
        raw = _unescape_uchars(m.group(0)[1:-1])
        return urljoin(self.base, raw) if not _is_absolute(raw) else raw

    def prefixed_name(self) -> IRI:
        start = self.pos
        m = _PNAME_RE.match(self.text, start)
        if not m:
            raise self.error(f"unexpected {self.text[start]!r}")
        prefix, local = m.group(1), m.group(2)
        if prefix not in self.prefixes:
            raise self.error(f"undeclared prefix '{prefix}:'", start)
        self.pos = m.end()
        local = re.sub(r"\\(.)", r"\1", local)
        return IRI(self.prefixes[prefix] + local)

    def rdf_literal(self) -> Literal:
        lexical = self.string()
        if self.text.startswith("^^", self.pos):
            self.pos += 2
            dt = IRI(self.iriref()) if self.peek() == "<" else self.prefixed_name()
            return Literal(lexical, dt.value)
        m = _LANG_RE.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return Literal(lexical, RDF_LANGSTRING, m.group(1).lower())
        return Literal(lexical, XSD_STRING)

    def string(self) -> str:
        start = self.pos
        text = self.text
        quote = text[start]
        long_quote = text.startswith(quote * 3, start)
        delim = quote * 3 if long_quote else quote
        self.pos = start + len(delim)
        out: list[str] = []
        while True:
            if self.pos >= len(text):
                raise self.error("unterminated string", start)
            if text.startswith(delim, self.pos):
                self.pos += len(delim)
                return "".join(out)
            c = text[self.pos]
            if c == "\\":
                out.append(self.escape())
                continue
            if not long_quote and c in "\r\n":
                raise self.error("unterminated string", start)
            out.append(c)
            self.pos += 1

    def escape(self) -> str:
        text = self.text
        nxt = text[self.pos + 1 : self.pos + 2]
        if nxt in _ESCAPES:
            self.pos += 2
            return _ESCAPES[nxt]
        if nxt in ("u", "U"):
            width = 4 if nxt == "u" else 8
            digits = text[self.pos + 2 : self.pos + 2 + width]
            if len(digits) == width and all(d in "0123456789abcdefABCDEF" for d in digits):
                self.pos += 2 + width
                return chr(int(digits, 16))
        raise self.error("invalid escape sequence")

    def numeric_literal(self) -> Literal:
        for regex, dt in ((_DOUBLE_RE, XSD_DOUBLE), (_DECIMAL_RE, XSD_DECIMAL), (_INTEGER_RE, XSD_INTEGER)):
            m = regex.match(self.text, self.pos)
            if m:
                self.pos = m.end()
                return Literal(m.group(0), dt)
        raise self.error("expected object")


def _is_absolute(iri: str) -> bool:
    return re.match(r"[A-Za-z][A-Za-z0-9+.-]*:", iri) is not None


def _unescape_uchars(s: str) -> str:
    return re.sub(
        r"\\u([0-9A-Fa-f]{4})|\\U([0-9A-Fa-f]{8})",
        lambda m: chr(int(m.group(1) or m.group(2), 16)),
        s,
    )


def parse_turtle(text: str, base: str = DEFAULT_BASE, bnode_prefix: str = "") -> TripleSet:
    """Parse Turtle text into a :class:`TripleSet`.

    Relative IRIs resolve against ``base``. Every blank node, labeled or
    anonymous, receives a fresh parser-generated label beginning with
    ``bnode_prefix``; give distinct prefixes to documents that will be merged.

    Raises :class:`TurtleSyntaxError` carrying line and column.
    """
    return _Parser(text, base, bnode_prefix).parse()


# -- collections -----------------------------------------------------------


def expand_collection(data: TripleSet, head: Term) -> list[Term]:
    """Members of the first/rest chain starting at ``head``, in chain order."""
    members: list[Term] = []
    seen: set = set()
    node = head
    while node != RDF.nil:
        if isinstance(node, Literal):
            raise CollectionError("literal in list position", node)
        if node in seen:
            raise CollectionError("cycle in collection", node)
        seen.add(node)
        if node != head and len(data.subjects(RDF.rest, node)) > 1:
            raise CollectionError("shared tail in collection", node)
        firsts = data.objects(node, RDF.first)
        rests = data.objects(node, RDF.rest)
        if len(firsts) != 1:
            raise CollectionError("missing rdf:first" if not firsts else "multiple rdf:first", node)
        if len(rests) != 1:
            raise CollectionError("missing rdf:rest" if not rests else "multiple rdf:rest", node)
        members.append(next(iter(firsts)))
        node = next(iter(rests))
    return members


def build_collection(items: Iterable[Term], make_node) -> tuple[Node, list[Triple]]:
    """First/rest chain for ``items``; ``make_node()`` supplies fresh blank nodes."""
    items = list(items)
    if not items:
        return RDF.nil, []
    nodes = [make_node() for _ in items]
    triples = []
    for i, (node, item) in enumerate(zip(nodes, items)):
        triples.append(Triple(node, RDF.first, item))
        triples.append(Triple(node, RDF.rest, nodes[i + 1] if i + 1 < len(nodes) else RDF.nil))
    return nodes[0], triples


# -- serialization ---------------------------------------------------------

_SAFE_LOCAL = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*\Z")
_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _quote(s: str) -> str:
    out = []
    for ch in s:
        if ch in _STRING_ESCAPES:
            out.append(_STRING_ESCAPES[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return '"' + "".join(out) + '"'


class _Writer:
    def __init__(self, data: TripleSet) -> None:
        self.data = data
        self.prefixes = sorted(data.prefixes.items())
        self.list_heads, self.consumed = _sugarable_lists(data)

    def iri(self, iri: IRI) -> str:
        best = None
        for prefix, ns in self.prefixes:
            if iri.value.startswith(ns) and _SAFE_LOCAL.match(iri.value[len(ns) :]):
                if best is None or len(ns) > len(best[1]):
                    best = (prefix, ns)
        if best:
            return f"{best[0]}:{iri.value[len(best[1]):]}"
        escaped = "".join(
            f"\\u{ord(c):04X}" if c in '<>"{}|^`\\' or ord(c) <= 0x20 else c for c in iri.value
        )
        return f"<{escaped}>"

    def literal(self, lit: Literal) -> str:
        lex, dt = lit.lexical, lit.datatype
        if lit.lang:
            return f"{_quote(lex)}@{lit.lang}"
        if dt == XSD_STRING:
            return _quote(lex)
        if dt == XSD_INTEGER and _INTEGER_RE.fullmatch(lex):
            return lex
        if dt == XSD_DECIMAL and _DECIMAL_RE.fullmatch(lex):
            return lex
        if dt == XSD_DOUBLE and _DOUBLE_RE.fullmatch(lex):
            return lex
        if dt == XSD_BOOLEAN and lex in ("true", "false"):
            return lex
        return f"{_quote(lex)}^^{self.iri(IRI(dt))}"

    def term(self, term: Term) -> str:
        if isinstance(term, Literal):
            return self.literal(term)
        if isinstance(term, BNode):
            if term in self.list_heads:
                return "( " + " ".join(self.term(m) for m in self.list_heads[term]) + " )"
            return f"_:{term.label}"
        return self.iri(term)

    def subject_block(self, subject: Node) -> str:
        preds = sorted(self.data.predicates(subject), key=lambda p: (p != RDF.type, term_key(p)))
        lines = []
        for p in preds:
            objs = sorted(self.data.objects(subject, p), key=term_key)
            verb = "a" if p == RDF.type else self.iri(p)
            lines.append(f"{verb} " + ", ".join(self.term(o) for o in objs))
        head = self.term(subject)
        return head + " " + " ;\n    ".join(lines) + " ."

    def write(self) -> str:
        out = [f"@prefix {p}: <{ns}> ." for p, ns in self.prefixes]
        subjects = sorted(
            {t.subject for t in self.data} - self.consumed,
            key=term_key,
        )
        if subjects:
            out.append("")
        for s in subjects:
            out.append(self.subject_block(s))
        return "\n".join(out) + "\n"


def _sugarable_lists(data: TripleSet) -> tuple[dict[BNode, list[Term]], set[Node]]:
    """Blank-node chains that can be written as ``( ... )`` without loss."""
    incoming: dict[Term, list[Triple]] = {}
    for t in data:
        incoming.setdefault(t.object, []).append(t)

    def is_list_node(n: Term) -> bool:
        return (
            isinstance(n, BNode)
            and data.predicates(n) == {RDF.first, RDF.rest}
            and len(data.objects(n, RDF.first)) == 1
            and len(data.objects(n, RDF.rest)) == 1
            and len(incoming.get(n, ())) == 1
        )

    heads: dict[BNode, list[Term]] = {}
    chain_nodes: dict[BNode, list[BNode]] = {}
    for n in sorted({t.subject for t in data}, key=term_key):
        if not is_list_node(n):
            continue
        ref = incoming[n][0]
        if ref.predicate == RDF.rest and is_list_node(ref.subject):
            continue
        members, nodes, node, ok = [], [], n, True
        while node != RDF.nil:
            if not is_list_node(node) or node in nodes:
                ok = False
                break
            if node != n and incoming[node][0].subject != nodes[-1]:
                ok = False
                break
            nodes.append(node)
            members.append(data.value(node, RDF.first))
            node = data.value(node, RDF.rest)
        if ok:
            heads[n] = members
            chain_nodes[n] = nodes

    # drop heads only reachable from other consumed chains that are never emitted
    while True:
        consumed = {x for nodes in chain_nodes.values() for x in nodes}
        roots = {t.subject for t in data} - consumed
        reached: set = set()
        stack = [o for r in roots for t in data.triples(s=r) for o in [t.object] if o in heads]
        while stack:
            h = stack.pop()
            if h in reached:
                continue
            reached.add(h)
            for member in heads[h]:
                if member in heads:
                    stack.append(member)
        orphans = sorted(set(heads) - reached, key=term_key)
        if not orphans:
            return heads, consumed
        del heads[orphans[0]]
        del chain_nodes[orphans[0]]


def serialize_turtle(data: TripleSet) -> str:
    """Deterministic Turtle text for ``data``."""
    return _Writer(data).write()


# -- blank node canonicalization -------------------------------------------


def _digest(*parts: str) -> str:
    return hashlib.sha1("\x1f".join(parts).encode("utf-8")).hexdigest()[:16]


def _refine(triples: list[Triple], colors: dict[BNode, str]) -> dict[BNode, str]:
    def show(t: Term, colors: dict) -> str:
        if isinstance(t, BNode):
            return "_:" + colors[t]
        return repr(term_key(t))

    while True:
        sigs: dict[BNode, list[str]] = {b: [] for b in colors}
        for s, p, o in triples:
            if isinstance(s, BNode):
                sigs[s].append("+" + p.value + "|" + show(o, colors))
            if isinstance(o, BNode):
                sigs[o].append("-" + p.value + "|" + show(s, colors))
        new = {b: _digest(colors[b], *sorted(sig)) for b, sig in sigs.items()}
        if len(set(new.values())) == len(set(colors.values())):
            return new
        colors = new


def _canonical(triples: list[Triple], colors: dict[BNode, str]) -> tuple:
    colors = _refine(triples, colors)
    classes: dict[str, list[BNode]] = {}
    for b, c in colors.items():
        classes.setdefault(c, []).append(b)
    ties = sorted((c for c, members in classes.items() if len(members) > 1))
    if not ties:
        order = {c: f"c{i}" for i, c in enumerate(sorted(colors.values()))}
        relabel = {b: BNode(order[c]) for b, c in colors.items()}
        out = [
            Triple(relabel.get(s, s), p, relabel.get(o, o) if isinstance(o, BNode) else o)
            for s, p, o in triples
        ]
        return tuple(sorted(out, key=triple_key))
    best = None
    for b in sorted(classes[ties[0]], key=term_key):
        trial = dict(colors)
        trial[b] = _digest(colors[b], "*")
        candidate = _canonical(triples, trial)
        if best is None or [triple_key(t) for t in candidate] < [triple_key(t) for t in best]:
            best = candidate
    return best


def canonical_triples(data: TripleSet) -> frozenset[Triple]:
    """Triples with blank nodes relabeled canonically (c0, c1, ...)."""
    triples = list(data)
    bnodes = {t for tr in triples for t in (tr.subject, tr.object) if isinstance(t, BNode)}
    if not bnodes:
        return frozenset(triples)
    return frozenset(_canonical(triples, {b: "" for b in bnodes}))


def isomorphic(a: TripleSet, b: TripleSet) -> bool:
    if len(a) != len(b):
        return False
    return canonical_triples(a) == canonical_triples(b)
