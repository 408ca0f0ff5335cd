"""SMILES parsing into MolecularGraph.

Supports the OpenSMILES-style subset needed for public molecular property
datasets: organic-subset and bracket atoms, branches, ring closures
(including %nn), dot-separated components, and the usual bond symbols.
Aromaticity is taken syntactically (lowercase atoms / ':' bonds), never
perceived. Isotopes, charges, explicit H counts, stereo markers and atom
classes are parsed and discarded. Implicit hydrogens are never
materialized.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .molgraph import BondType, GraphError, MolecularGraph, build_graph

# fmt: off
_ELEMENTS = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al",
    "Si", "P", "S", "Cl", "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe",
    "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr",
    "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In", "Sn",
    "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm",
    "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W",
    "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At", "Rn",
    "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk", "Cf",
    "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds",
    "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
]
# fmt: on

ATOMIC_NUMBER = {sym: z for z, sym in enumerate(_ELEMENTS, start=1)}

# Bare (non-bracket) atoms: the organic subset plus the wildcard.
_ORGANIC_TWO = ("Cl", "Br")
_ORGANIC_ONE = ("B", "C", "N", "O", "P", "S", "F", "I")
_ORGANIC_AROMATIC = ("b", "c", "n", "o", "p", "s")
# Lowercase aromatic symbols allowed inside brackets.
_BRACKET_AROMATIC = {"b", "c", "n", "o", "p", "s", "se", "as", "te", "si"}

_BOND_CHARS = "-=#:$/\\"


class SmilesError(ValueError):
    """SMILES parse error carrying the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class TokenKind(enum.Enum):
    ATOM_ORGANIC = "atom_organic"
    ATOM_BRACKET = "atom_bracket"
    BOND = "bond"
    RING = "ring"
    BRANCH_OPEN = "branch_open"
    BRANCH_CLOSE = "branch_close"
    DOT = "dot"


@dataclass
class SmilesToken:
    """A lexical token covering s[start:stop] of the input string."""

    kind: TokenKind
    start: int
    stop: int
    element: str = ""
    aromatic: bool = False
    charge: int = 0
    isotope: Optional[int] = None
    hcount: Optional[int] = None
    bond: str = ""
    ring_index: int = -1


def _parse_bracket(s: str, start: int) -> SmilesToken:
    """Parse a bracket atom beginning at s[start] == '['."""
    i = start + 1
    n = len(s)

    isotope = None
    digits = i
    while i < n and s[i].isdigit():
        i += 1
    if i > digits:
        isotope = int(s[digits:i])

    if i >= n:
        raise SmilesError("unterminated bracket atom", start)

    element = ""
    aromatic = False
    if s[i] == "*":
        element = "*"
        i += 1
    elif s[i : i + 2].lower() in _BRACKET_AROMATIC and s[i].islower():
        two = s[i : i + 2]
        if two in _BRACKET_AROMATIC:
            element = two.capitalize()
            aromatic = True
            i += 2
        else:
            element = s[i].upper()
            aromatic = True
            i += 1
    elif s[i].islower():
        if s[i] in _BRACKET_AROMATIC:
            element = s[i].upper()
            aromatic = True
            i += 1
        else:
            raise SmilesError(f"unknown element symbol {s[i]!r}", i)
    else:
        sym = s[i : i + 2]
        if len(sym) == 2 and sym[1].islower() and sym in ATOMIC_NUMBER:
            element = sym
            i += 2
        elif s[i] in ATOMIC_NUMBER:
            element = s[i]
            i += 1
        else:
            raise SmilesError(f"unknown element symbol {s[i:i + 2]!r}", i)

    # Chirality markers: @, @@, or @ followed by a named class like @TH1.
    if i < n and s[i] == "@":
        i += 1
        if i < n and s[i] == "@":
            i += 1
        else:
            j = i
            while j < n and s[j].isalpha() and s[j].isupper():
                j += 1
            tag = s[i:j]
            if tag in ("TH", "AL", "SP", "TB", "OH"):
                i = j
                while i < n and s[i].isdigit():
                    i += 1

    hcount = None
    if i < n and s[i] == "H":
        i += 1
        digits = i
        while i < n and s[i].isdigit():
            i += 1
        hcount = int(s[digits:i]) if i > digits else 1

    charge = 0
    if i < n and s[i] in "+-":
        sign = 1 if s[i] == "+" else -1
        i += 1
        if i < n and s[i] == ("+" if sign > 0 else "-"):
            charge = 2 * sign
            i += 1
        else:
            digits = i
            while i < n and s[i].isdigit():
                i += 1
            charge = sign * (int(s[digits:i]) if i > digits else 1)

    if i < n and s[i] == ":":
        i += 1
        digits = i
        while i < n and s[i].isdigit():
            i += 1
        if i == digits:
            raise SmilesError("atom class ':' with no digits", i)

    if i >= n or s[i] != "]":
        raise SmilesError("unterminated bracket atom", start)

    return SmilesToken(
        kind=TokenKind.ATOM_BRACKET,
        start=start,
        stop=i + 1,
        element=element,
        aromatic=aromatic,
        charge=charge,
        isotope=isotope,
        hcount=hcount,
    )


def tokenize(s: str) -> List[SmilesToken]:
    """Split a SMILES string into tokens; every token spans s[start:stop]."""
    tokens: List[SmilesToken] = []
    i = 0
    n = len(s)
    while i < n:
        c = s[i]
        if c == "[":
            tok = _parse_bracket(s, i)
            tokens.append(tok)
            i = tok.stop
        elif s[i : i + 2] in _ORGANIC_TWO:
            tokens.append(
                SmilesToken(TokenKind.ATOM_ORGANIC, i, i + 2, element=s[i : i + 2])
            )
            i += 2
        elif c in _ORGANIC_ONE:
            tokens.append(SmilesToken(TokenKind.ATOM_ORGANIC, i, i + 1, element=c))
            i += 1
        elif c in _ORGANIC_AROMATIC:
            tokens.append(
                SmilesToken(
                    TokenKind.ATOM_ORGANIC, i, i + 1, element=c.upper(), aromatic=True
                )
            )
            i += 1
        elif c == "*":
            tokens.append(SmilesToken(TokenKind.ATOM_ORGANIC, i, i + 1, element="*"))
            i += 1
        elif c in _BOND_CHARS:
            tokens.append(SmilesToken(TokenKind.BOND, i, i + 1, bond=c))
            i += 1
        elif c.isdigit():
            tokens.append(SmilesToken(TokenKind.RING, i, i + 1, ring_index=int(c)))
            i += 1
        elif c == "%":
            if i + 2 >= n or not (s[i + 1].isdigit() and s[i + 2].isdigit()):
                raise SmilesError("'%' must be followed by two digits", i)
            tokens.append(
                SmilesToken(TokenKind.RING, i, i + 3, ring_index=int(s[i + 1 : i + 3]))
            )
            i += 3
        elif c == "(":
            tokens.append(SmilesToken(TokenKind.BRANCH_OPEN, i, i + 1))
            i += 1
        elif c == ")":
            tokens.append(SmilesToken(TokenKind.BRANCH_CLOSE, i, i + 1))
            i += 1
        elif c == ".":
            tokens.append(SmilesToken(TokenKind.DOT, i, i + 1))
            i += 1
        else:
            raise SmilesError(f"unexpected character {c!r}", i)
    return tokens


@dataclass
class _Atom:
    atomic_number: int
    aromatic: bool


def _bond_type(symbol: str, arom_u: bool, arom_v: bool) -> BondType:
    if symbol == "":
        return BondType.AROMATIC if (arom_u and arom_v) else BondType.SINGLE
    if symbol in ("-", "/", "\\"):
        return BondType.SINGLE
    if symbol == "=":
        return BondType.DOUBLE
    if symbol == "#":
        return BondType.TRIPLE
    if symbol == ":":
        return BondType.AROMATIC
    return BondType.MISC


def parse_smiles(s: str) -> MolecularGraph:
    """Parse a SMILES string into a heavy-atom MolecularGraph.

    Raises SmilesError (with byte offset) on malformed input: unbalanced
    parentheses, unmatched or conflicting ring closures, unknown element
    symbols, empty branches, dangling bonds.
    """
    if not s:
        raise SmilesError("empty SMILES string", 0)
    tokens = tokenize(s)

    atoms: List[_Atom] = []
    edges: List[Tuple[int, int, str]] = []  # (u, v, bond symbol or "")
    edge_set = set()

    prev: Optional[int] = None
    pending_bond = ""  # bond symbol awaiting its right-hand atom
    pending_offset = 0
    branch_stack: List[Tuple[Optional[int], int]] = []  # (return atom, offset)
    open_rings = {}  # ring index -> (atom, bond symbol, offset)
    branch_opened_at = -1  # token index of a '(' not yet followed by an atom

    def add_edge(u: int, v: int, symbol: str, offset: int) -> None:
        if u == v:
            raise SmilesError("ring closure bonds an atom to itself", offset)
        key = (min(u, v), max(u, v))
        if key in edge_set:
            raise SmilesError(f"duplicate bond between atoms {u} and {v}", offset)
        edge_set.add(key)
        edges.append((u, v, symbol))

    for ti, tok in enumerate(tokens):
        if tok.kind in (TokenKind.ATOM_ORGANIC, TokenKind.ATOM_BRACKET):
            if tok.element == "*":
                z = 0
            else:
                z = ATOMIC_NUMBER.get(tok.element, 0)
                if z == 0:
                    raise SmilesError(
                        f"unknown element symbol {tok.element!r}", tok.start
                    )
            atoms.append(_Atom(z, tok.aromatic))
            idx = len(atoms) - 1
            if prev is not None:
                add_edge(prev, idx, pending_bond, tok.start)
            elif pending_bond:
                raise SmilesError("bond symbol with no preceding atom", pending_offset)
            pending_bond = ""
            prev = idx
            branch_opened_at = -1
        elif tok.kind == TokenKind.BOND:
            if pending_bond:
                raise SmilesError("two consecutive bond symbols", tok.start)
            if prev is None:
                raise SmilesError("bond symbol with no preceding atom", tok.start)
            pending_bond = tok.bond
            pending_offset = tok.start
        elif tok.kind == TokenKind.RING:
            if prev is None:
                raise SmilesError("ring closure digit with no preceding atom", tok.start)
            r = tok.ring_index
            if r in open_rings:
                other, sym_open, _ = open_rings.pop(r)
                if pending_bond and sym_open and pending_bond != sym_open:
                    raise SmilesError(
                        f"conflicting bond symbols on ring closure {r}", tok.start
                    )
                symbol = pending_bond or sym_open
                add_edge(other, prev, symbol, tok.start)
            else:
                open_rings[r] = (prev, pending_bond, tok.start)
            pending_bond = ""
        elif tok.kind == TokenKind.BRANCH_OPEN:
            if prev is None:
                raise SmilesError("branch with no preceding atom", tok.start)
            if pending_bond:
                raise SmilesError(
                    "bond symbol before '(' (must follow it)", pending_offset
                )
            branch_stack.append((prev, tok.start))
            branch_opened_at = ti
        elif tok.kind == TokenKind.BRANCH_CLOSE:
            if not branch_stack:
                raise SmilesError("unbalanced ')'", tok.start)
            if pending_bond:
                raise SmilesError("dangling bond before ')'", pending_offset)
            if branch_opened_at == ti - 1:
                raise SmilesError("empty branch", tok.start)
            prev, _ = branch_stack.pop()
            branch_opened_at = -1
        elif tok.kind == TokenKind.DOT:
            if pending_bond:
                raise SmilesError("bond symbol before '.'", pending_offset)
            prev = None

    if branch_stack:
        raise SmilesError("unbalanced branch: '(' never closed", branch_stack[-1][1])
    if pending_bond:
        raise SmilesError("dangling bond at end of input", pending_offset)
    if open_rings:
        r, (_, _, offset) = min(open_rings.items(), key=lambda kv: kv[1][2])
        raise SmilesError(f"unmatched ring closure {r}", offset)
    if not atoms:
        raise SmilesError("no atoms in SMILES string", 0)

    typed = [
        (u, v, _bond_type(sym, atoms[u].aromatic, atoms[v].aromatic))
        for u, v, sym in edges
    ]
    try:
        return build_graph(len(atoms), [a.atomic_number for a in atoms], typed)
    except GraphError as exc:  # pragma: no cover - parser precludes these
        raise SmilesError(str(exc), 0) from exc
