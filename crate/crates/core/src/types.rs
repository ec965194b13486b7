//! Atoms, the atom order, and simple / compound / braced pregroup types.
//!
//! A simple type is an atom raised to an integer adjoint exponent
//! (`-1` is the left adjoint, `+1` the right adjoint, iterated adjoints
//! stack), optionally carrying a β tag. Compound types are strings of
//! simple types; braced types split a compound type into `k` segments.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const FORBIDDEN_ATOM_CHARS: [char; 5] = ['^', '(', ')', '<', '>'];

/// Name of an atomic grammatical type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Atom(String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Result<Self, TableIssue> {
        let name = name.into();
        if is_valid_atom_name(&name) {
            Ok(Atom(name))
        } else {
            Err(TableIssue::InvalidAtomName(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn is_valid_atom_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || FORBIDDEN_ATOM_CHARS.contains(&c))
}

/// A single problem found while building an [`AtomTable`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableIssue {
    #[error("invalid atom name {0:?}")]
    InvalidAtomName(String),
    #[error("duplicate atom {0}")]
    DuplicateAtom(String),
    #[error("order pair ({lesser}, {greater}) mentions unknown atom {atom}")]
    UnknownAtomInOrder {
        lesser: String,
        greater: String,
        atom: String,
    },
    #[error("order is cyclic: {0} <= {1} and {1} <= {0}")]
    Cycle(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid atom table: {}", join_issues(.issues))]
pub struct TableError {
    pub issues: Vec<TableIssue>,
}

fn join_issues(issues: &[TableIssue]) -> String {
    issues
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("unknown atom {0}")]
    UnknownAtom(String),
}

/// The atoms of a grammar together with their partial order.
///
/// The reflexive-transitive closure of the declared order pairs is computed
/// once at construction; antisymmetry is checked then.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomTable {
    atoms: Vec<Atom>,
    index: HashMap<Atom, usize>,
    order: Vec<(Atom, Atom)>,
    closure: Vec<Vec<bool>>,
}

impl AtomTable {
    pub fn new<A, P, S>(atoms: A, order: P) -> Result<Self, TableError>
    where
        A: IntoIterator,
        A::Item: Into<String>,
        P: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut issues = Vec::new();
        let mut table_atoms = Vec::new();
        let mut index = HashMap::new();
        for name in atoms {
            match Atom::new(name) {
                Ok(atom) => {
                    if index.contains_key(&atom) {
                        issues.push(TableIssue::DuplicateAtom(atom.0.clone()));
                    } else {
                        index.insert(atom.clone(), table_atoms.len());
                        table_atoms.push(atom);
                    }
                }
                Err(issue) => issues.push(issue),
            }
        }

        let n = table_atoms.len();
        let mut closure = vec![vec![false; n]; n];
        for (i, row) in closure.iter_mut().enumerate() {
            row[i] = true;
        }
        let pairs: Vec<(String, String)> =
            order.into_iter().map(|(a, b)| (a.into(), b.into())).collect();
        let mut order = Vec::new();
        for (lesser, greater) in pairs {
            let lookup = |name: &str| index.get(&Atom(name.to_string())).copied();
            match (lookup(&lesser), lookup(&greater)) {
                (Some(a), Some(b)) => {
                    closure[a][b] = true;
                    order.push((table_atoms[a].clone(), table_atoms[b].clone()));
                }
                (a, _) => {
                    let atom = if a.is_none() { &lesser } else { &greater };
                    issues.push(TableIssue::UnknownAtomInOrder {
                        lesser: lesser.clone(),
                        greater: greater.clone(),
                        atom: atom.clone(),
                    });
                }
            }
        }

        for k in 0..n {
            let via = closure[k].clone();
            for row in closure.iter_mut().filter(|row| row[k]) {
                for (cell, &reach) in row.iter_mut().zip(&via) {
                    *cell |= reach;
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if closure[i][j] && closure[j][i] {
                    issues.push(TableIssue::Cycle(
                        table_atoms[i].0.clone(),
                        table_atoms[j].0.clone(),
                    ));
                }
            }
        }

        if issues.is_empty() {
            Ok(AtomTable {
                atoms: table_atoms,
                index,
                order,
                closure,
            })
        } else {
            Err(TableError { issues })
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// The declared (not closed) order pairs, as `(lesser, greater)`.
    pub fn order_pairs(&self) -> &[(Atom, Atom)] {
        &self.order
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(&Atom(name.to_string()))
    }

    pub fn get(&self, name: &str) -> Option<&Atom> {
        self.index
            .get(&Atom(name.to_string()))
            .map(|&i| &self.atoms[i])
    }

    pub fn position(&self, atom: &Atom) -> Option<usize> {
        self.index.get(atom).copied()
    }

    /// `a <= b` in the reflexive-transitive closure of the order.
    pub fn leq(&self, a: &Atom, b: &Atom) -> Result<bool, CoreError> {
        let i = self
            .position(a)
            .ok_or_else(|| CoreError::UnknownAtom(a.0.clone()))?;
        let j = self
            .position(b)
            .ok_or_else(|| CoreError::UnknownAtom(b.0.clone()))?;
        Ok(self.closure[i][j])
    }

    /// Checks that every atom of `t` belongs to this table.
    pub fn check_type(&self, t: &CompoundType) -> Result<(), CoreError> {
        match t.iter().find(|p| !self.index.contains_key(&p.atom)) {
            Some(p) => Err(CoreError::UnknownAtom(p.atom.0.clone())),
            None => Ok(()),
        }
    }
}

/// `atom_leq` over a table.
pub fn atom_leq(a: &Atom, b: &Atom, table: &AtomTable) -> Result<bool, CoreError> {
    table.leq(a, b)
}

/// An atom with an adjoint exponent and a β tag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimpleType {
    pub atom: Atom,
    pub exponent: i32,
    pub beta: bool,
}

impl SimpleType {
    pub fn new(atom: Atom, exponent: i32, beta: bool) -> Self {
        SimpleType {
            atom,
            exponent,
            beta,
        }
    }

    pub fn plain(atom: Atom) -> Self {
        SimpleType::new(atom, 0, false)
    }

    pub fn left_adjoint(&self) -> Self {
        SimpleType {
            exponent: self.exponent - 1,
            ..self.clone()
        }
    }

    pub fn right_adjoint(&self) -> Self {
        SimpleType {
            exponent: self.exponent + 1,
            ..self.clone()
        }
    }

    pub fn is_plain(&self) -> bool {
        self.exponent == 0 && !self.beta
    }

    pub fn with_exponent(mut self, exponent: i32) -> Self {
        self.exponent = exponent;
        self
    }

    pub fn with_beta(mut self, beta: bool) -> Self {
        self.beta = beta;
        self
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.beta {
            write!(f, "b({})", self.atom)?;
        } else {
            write!(f, "{}", self.atom)?;
        }
        let suffix = if self.exponent < 0 { "^l" } else { "^r" };
        for _ in 0..self.exponent.unsigned_abs() {
            f.write_str(suffix)?;
        }
        Ok(())
    }
}

/// Order between simple types of equal exponent and tag.
///
/// Adjoints are contravariant, so odd exponents flip the atom order.
pub fn simple_leq(x: &SimpleType, y: &SimpleType, table: &AtomTable) -> Result<bool, CoreError> {
    if x.exponent != y.exponent || x.beta != y.beta {
        return Ok(false);
    }
    if x.exponent.rem_euclid(2) == 0 {
        table.leq(&x.atom, &y.atom)
    } else {
        table.leq(&y.atom, &x.atom)
    }
}

/// Whether `x y` may be contracted to the unit.
///
/// Atoms missing from `table` never contract.
pub fn contracts(x: &SimpleType, y: &SimpleType, table: &AtomTable) -> bool {
    if y.exponent != x.exponent + 1 || x.beta != y.beta {
        return false;
    }
    let related = if x.exponent.rem_euclid(2) == 0 {
        table.leq(&x.atom, &y.atom)
    } else {
        table.leq(&y.atom, &x.atom)
    };
    related.unwrap_or(false)
}

/// A string of simple types; the empty string is the monoid unit.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompoundType(Vec<SimpleType>);

impl CompoundType {
    pub fn new(parts: Vec<SimpleType>) -> Self {
        CompoundType(parts)
    }

    pub fn unit() -> Self {
        CompoundType(Vec::new())
    }

    pub fn parts(&self) -> &[SimpleType] {
        &self.0
    }

    pub fn into_parts(self) -> Vec<SimpleType> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SimpleType> {
        self.0.iter()
    }

    pub fn concat(&self, other: &CompoundType) -> CompoundType {
        let mut parts = self.0.clone();
        parts.extend(other.0.iter().cloned());
        CompoundType(parts)
    }

    /// `(xy)^l = y^l x^l`.
    pub fn left_adjoint(&self) -> CompoundType {
        self.0.iter().rev().map(SimpleType::left_adjoint).collect()
    }

    /// `(xy)^r = y^r x^r`.
    pub fn right_adjoint(&self) -> CompoundType {
        self.0.iter().rev().map(SimpleType::right_adjoint).collect()
    }

    /// Applies `|steps|` adjoint operations: right adjoints for positive
    /// steps, left adjoints for negative ones.
    pub fn adjoint_power(&self, steps: i32) -> CompoundType {
        let mut out = self.clone();
        for _ in 0..steps.unsigned_abs() {
            out = if steps > 0 {
                out.right_adjoint()
            } else {
                out.left_adjoint()
            };
        }
        out
    }
}

impl FromIterator<SimpleType> for CompoundType {
    fn from_iter<I: IntoIterator<Item = SimpleType>>(iter: I) -> Self {
        CompoundType(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a CompoundType {
    type Item = &'a SimpleType;
    type IntoIter = std::slice::Iter<'a, SimpleType>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for CompoundType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// A compound type split into `k >= 1` distinguished segments.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BracedType {
    segments: Vec<CompoundType>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("a braced type needs at least one segment")]
pub struct EmptyBracing;

impl BracedType {
    pub fn new(segments: Vec<CompoundType>) -> Result<Self, EmptyBracing> {
        if segments.is_empty() {
            Err(EmptyBracing)
        } else {
            Ok(BracedType { segments })
        }
    }

    pub fn k(&self) -> usize {
        self.segments.len()
    }

    pub fn segments(&self) -> &[CompoundType] {
        &self.segments
    }

    pub fn flatten(&self) -> CompoundType {
        self.segments.iter().flat_map(|s| s.iter().cloned()).collect()
    }
}

impl fmt::Display for BracedType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, seg) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if seg.is_empty() {
                f.write_str("< >")?;
            } else {
                write!(f, "< {seg} >")?;
            }
        }
        Ok(())
    }
}

/// Result of parsing a type string: braces produce a [`BracedType`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedType {
    Compound(CompoundType),
    Braced(BracedType),
}

impl ParsedType {
    pub fn flatten(&self) -> CompoundType {
        match self {
            ParsedType::Compound(t) => t.clone(),
            ParsedType::Braced(b) => b.flatten(),
        }
    }

    pub fn into_braced(self) -> BracedType {
        match self {
            ParsedType::Compound(t) => BracedType { segments: vec![t] },
            ParsedType::Braced(b) => b,
        }
    }
}

impl fmt::Display for ParsedType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParsedType::Compound(t) => t.fmt(f),
            ParsedType::Braced(b) => b.fmt(f),
        }
    }
}

/// Errors from [`parse_type`]. Columns are 1-based character offsets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unknown atom {atom:?} at column {column}")]
    UnknownAtom { atom: String, column: usize },
    #[error("malformed adjoint suffix {suffix:?} at column {column}")]
    MalformedSuffix { suffix: String, column: usize },
    #[error("invalid atom name {name:?} at column {column}")]
    InvalidAtomName { name: String, column: usize },
    #[error("unbalanced `b(` at column {column}")]
    UnbalancedBeta { column: usize },
    #[error("unbalanced `{delimiter}` at column {column}")]
    UnbalancedBrace { delimiter: char, column: usize },
    #[error("nested `<` at column {column}")]
    NestedBrace { column: usize },
    #[error("type material outside braces at column {column}")]
    OutsideBraces { column: usize },
}

impl ParseError {
    pub fn column(&self) -> usize {
        match self {
            ParseError::UnknownAtom { column, .. }
            | ParseError::MalformedSuffix { column, .. }
            | ParseError::InvalidAtomName { column, .. }
            | ParseError::UnbalancedBeta { column }
            | ParseError::UnbalancedBrace { column, .. }
            | ParseError::NestedBrace { column }
            | ParseError::OutsideBraces { column } => *column,
        }
    }
}

enum Token<'a> {
    Open,
    Close,
    Word(&'a str),
}

fn tokenize(text: &str) -> Vec<(usize, Token<'_>)> {
    let mut tokens = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut column = 0;
    for (byte, c) in text.char_indices() {
        column += 1;
        let delimiter = c.is_whitespace() || c == '<' || c == '>';
        if delimiter {
            if let Some((b, col)) = start.take() {
                tokens.push((col, Token::Word(&text[b..byte])));
            }
            match c {
                '<' => tokens.push((column, Token::Open)),
                '>' => tokens.push((column, Token::Close)),
                _ => {}
            }
        } else if start.is_none() {
            start = Some((byte, column));
        }
    }
    if let Some((b, col)) = start {
        tokens.push((col, Token::Word(&text[b..])));
    }
    tokens
}

fn parse_suffixes(suffixes: &str, column: usize) -> Result<i32, ParseError> {
    let mut exponent = 0;
    let mut rest = suffixes;
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix("^l") {
            exponent -= 1;
            rest = r;
        } else if let Some(r) = rest.strip_prefix("^r") {
            exponent += 1;
            rest = r;
        } else {
            return Err(ParseError::MalformedSuffix {
                suffix: rest.to_string(),
                column,
            });
        }
    }
    Ok(exponent)
}

fn split_name(token: &str) -> (&str, &str) {
    match token.find('^') {
        Some(i) => token.split_at(i),
        None => (token, ""),
    }
}

fn parse_simple(token: &str, column: usize) -> Result<SimpleType, ParseError> {
    let (beta, name, exponent) = if let Some(inner) = token.strip_prefix("b(") {
        let close = inner
            .find(')')
            .ok_or(ParseError::UnbalancedBeta { column })?;
        let (name, inner_suffix) = split_name(&inner[..close]);
        let outer = &inner[close + 1..];
        if outer.contains(')') || outer.contains('(') {
            return Err(ParseError::UnbalancedBeta { column });
        }
        // `b(n^l)` and `b(n)^l` denote the same simple type.
        let exponent = parse_suffixes(inner_suffix, column)? + parse_suffixes(outer, column)?;
        (true, name, exponent)
    } else {
        if token.contains(')') || token.contains('(') {
            return Err(ParseError::UnbalancedBeta { column });
        }
        let (name, suffix) = split_name(token);
        (false, name, parse_suffixes(suffix, column)?)
    };
    let atom = Atom::new(name).map_err(|_| ParseError::InvalidAtomName {
        name: name.to_string(),
        column,
    })?;
    Ok(SimpleType::new(atom, exponent, beta))
}

/// Parses a type string without checking atoms against a table.
pub fn parse_type_unchecked(text: &str) -> Result<ParsedType, ParseError> {
    parse_with(text, |_, _| Ok(()))
}

/// Parses a type string, rejecting atoms unknown to `table`.
///
/// Tokens are whitespace separated; `b(x)` marks a β-tagged atom, each
/// `^l` / `^r` suffix applies one more adjoint, and `<` ... `>` groups
/// delimit brace segments.
pub fn parse_type(text: &str, table: &AtomTable) -> Result<ParsedType, ParseError> {
    parse_with(text, |p, column| {
        if table.position(&p.atom).is_some() {
            Ok(())
        } else {
            Err(ParseError::UnknownAtom {
                atom: p.atom.0.clone(),
                column,
            })
        }
    })
}

/// Parses a type string that must not contain braces.
pub fn parse_compound(text: &str, table: &AtomTable) -> Result<CompoundType, ParseError> {
    match parse_type(text, table)? {
        ParsedType::Compound(t) => Ok(t),
        ParsedType::Braced(_) => Err(ParseError::UnbalancedBrace {
            delimiter: '<',
            column: text.chars().position(|c| c == '<').unwrap_or(0) + 1,
        }),
    }
}

fn parse_with<F>(text: &str, check: F) -> Result<ParsedType, ParseError>
where
    F: Fn(&SimpleType, usize) -> Result<(), ParseError>,
{
    let mut loose = Vec::new();
    let mut loose_column = None;
    let mut segments: Vec<CompoundType> = Vec::new();
    let mut open: Option<(usize, Vec<SimpleType>)> = None;

    for (column, token) in tokenize(text) {
        match token {
            Token::Open => {
                if open.is_some() {
                    return Err(ParseError::NestedBrace { column });
                }
                open = Some((column, Vec::new()));
            }
            Token::Close => match open.take() {
                Some((_, parts)) => segments.push(CompoundType(parts)),
                None => {
                    return Err(ParseError::UnbalancedBrace {
                        delimiter: '>',
                        column,
                    })
                }
            },
            Token::Word(word) => {
                let simple = parse_simple(word, column)?;
                check(&simple, column)?;
                match open.as_mut() {
                    Some((_, parts)) => parts.push(simple),
                    None => {
                        loose_column.get_or_insert(column);
                        loose.push(simple);
                    }
                }
            }
        }
    }
    if let Some((column, _)) = open {
        return Err(ParseError::UnbalancedBrace {
            delimiter: '<',
            column,
        });
    }
    if segments.is_empty() {
        return Ok(ParsedType::Compound(CompoundType(loose)));
    }
    if let Some(column) = loose_column {
        return Err(ParseError::OutsideBraces { column });
    }
    Ok(ParsedType::Braced(BracedType { segments }))
}
