//! Word-to-type dictionaries and the metarules that widen them.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{parse_compound, Atom, AtomTable, CompoundType, SimpleType, TableIssue};

/// Tokens standing for the inserted empty word.
pub const EMPTY_WORD_TOKENS: [&str; 2] = ["∅", "@0"];

/// Rounds of metarule application when closing a word's type set.
pub const METARULE_DEPTH: usize = 3;

pub fn is_empty_word(token: &str) -> bool {
    EMPTY_WORD_TOKENS.contains(&token)
}

/// A schema that derives further types from a lexical type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Metarule {
    /// `X^r Y^r T...` also has type `Y^r X^r T...` when `X`, `Y` are case
    /// atoms and `T...` starts with a sentence type.
    ArgumentSwap { cases: Vec<Atom>, sentence: Atom },
    /// A plain occurrence of `atom` may be replaced by `expansion`.
    AtomExpansion { atom: Atom, expansion: CompoundType },
    /// `S X^l W...` and `X^r S W...` are interchangeable when `S` is a
    /// sentence type and `X` is the given case.
    SlotFlip { case: Atom, sentence: Atom },
}

impl Metarule {
    fn sentence_headed(p: &SimpleType, sentence: &Atom, table: &AtomTable) -> bool {
        p.is_plain() && table.leq(&p.atom, sentence).unwrap_or(false)
    }

    /// Every type this rule derives from `t`, in either direction.
    pub fn derive(&self, t: &CompoundType, table: &AtomTable) -> Vec<CompoundType> {
        let mut out = Vec::new();
        match self {
            Metarule::SlotFlip { case, sentence } => {
                out.extend(self.rewrite(t, table));
                let p = t.parts();
                let is_case_right = |q: &SimpleType| q.atom == *case && q.exponent == 1 && !q.beta;
                if p.len() >= 2 && is_case_right(&p[0]) && Self::sentence_headed(&p[1], sentence, table) {
                    let mut parts = vec![p[1].clone(), p[0].clone().with_exponent(-1)];
                    parts.extend_from_slice(&p[2..]);
                    out.push(CompoundType::new(parts));
                }
            }
            _ => out.extend(self.rewrite(t, table)),
        }
        out
    }

    /// The forward direction of the rule, if it applies to `t`.
    pub fn rewrite(&self, t: &CompoundType, table: &AtomTable) -> Option<CompoundType> {
        let p = t.parts();
        match self {
            Metarule::ArgumentSwap { cases, sentence } => {
                let is_case = |q: &SimpleType| q.exponent == 1 && !q.beta && cases.contains(&q.atom);
                if p.len() >= 3
                    && is_case(&p[0])
                    && is_case(&p[1])
                    && p[0] != p[1]
                    && Self::sentence_headed(&p[2], sentence, table)
                {
                    let mut parts = p.to_vec();
                    parts.swap(0, 1);
                    Some(CompoundType::new(parts))
                } else {
                    None
                }
            }
            Metarule::AtomExpansion { atom, expansion } => {
                if !p.iter().any(|q| q.is_plain() && q.atom == *atom) {
                    return None;
                }
                let mut parts = Vec::new();
                for q in p {
                    if q.is_plain() && q.atom == *atom {
                        parts.extend(expansion.iter().cloned());
                    } else {
                        parts.push(q.clone());
                    }
                }
                Some(CompoundType::new(parts))
            }
            Metarule::SlotFlip { case, sentence } => {
                let is_case_left = |q: &SimpleType| q.atom == *case && q.exponent == -1 && !q.beta;
                if p.len() >= 2 && Self::sentence_headed(&p[0], sentence, table) && is_case_left(&p[1]) {
                    let mut parts = vec![p[1].clone().with_exponent(1), p[0].clone()];
                    parts.extend_from_slice(&p[2..]);
                    Some(CompoundType::new(parts))
                } else {
                    None
                }
            }
        }
    }

    pub fn to_spec(&self) -> MetaruleSpec {
        match self {
            Metarule::ArgumentSwap { cases, sentence } => MetaruleSpec::ArgumentSwap {
                cases: cases.iter().map(|a| a.as_str().to_string()).collect(),
                sentence: sentence.as_str().to_string(),
            },
            Metarule::AtomExpansion { atom, expansion } => MetaruleSpec::AtomExpansion {
                atom: atom.as_str().to_string(),
                expansion: expansion.to_string(),
            },
            Metarule::SlotFlip { case, sentence } => MetaruleSpec::SlotFlip {
                case: case.as_str().to_string(),
                sentence: sentence.as_str().to_string(),
            },
        }
    }
}

/// Serialized form of a [`Metarule`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MetaruleSpec {
    ArgumentSwap { cases: Vec<String>, sentence: String },
    AtomExpansion { atom: String, expansion: String },
    SlotFlip { case: String, sentence: String },
}

impl MetaruleSpec {
    pub fn resolve(&self, table: &AtomTable) -> Result<Metarule, String> {
        let atom = |name: &str| {
            table
                .get(name)
                .cloned()
                .ok_or_else(|| format!("metarule mentions unknown atom {name:?}"))
        };
        Ok(match self {
            MetaruleSpec::ArgumentSwap { cases, sentence } => Metarule::ArgumentSwap {
                cases: cases.iter().map(|c| atom(c)).collect::<Result<_, _>>()?,
                sentence: atom(sentence)?,
            },
            MetaruleSpec::AtomExpansion { atom: name, expansion } => Metarule::AtomExpansion {
                atom: atom(name)?,
                expansion: parse_compound(expansion, table).map_err(|e| format!("metarule expansion: {e}"))?,
            },
            MetaruleSpec::SlotFlip { case, sentence } => Metarule::SlotFlip {
                case: atom(case)?,
                sentence: atom(sentence)?,
            },
        })
    }
}

/// On-disk lexicon layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconFile {
    pub language: String,
    pub atoms: Vec<String>,
    #[serde(default)]
    pub order: Vec<(String, String)>,
    #[serde(default)]
    pub entries: Vec<EntryFile>,
    #[serde(default)]
    pub metarules: Vec<MetaruleSpec>,
    #[serde(default)]
    pub empty_words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryFile {
    pub word: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aliases: Vec<String>,
    pub types: Vec<String>,
}

/// One problem found while validating a lexicon file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconIssue {
    #[error(transparent)]
    Table(#[from] TableIssue),
    #[error("entry {word:?}, type {text:?}: {message}")]
    BadType { word: String, text: String, message: String },
    #[error("entry {0:?} has no types")]
    NoTypes(String),
    #[error("word {0:?} appears twice with different types")]
    ConflictingEntry(String),
    #[error("alias {alias:?} of {word:?} collides with {other:?}")]
    AliasClash { alias: String, word: String, other: String },
    #[error("empty word type {text:?}: {message}")]
    BadEmptyWord { text: String, message: String },
    #[error("metarule {index}: {message}")]
    BadMetarule { index: usize, message: String },
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: JSON error at line {line}, column {column}: {message}")]
    Syntax {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{origin}: {} validation error(s): {}", .issues.len(), join(.issues))]
    Invalid { origin: String, issues: Vec<LexiconIssue> },
    #[error("unknown word {word:?}{}", suggest(.near))]
    UnknownWord { word: String, near: Vec<String> },
    #[error("the lexicon defines no type for the empty word")]
    NoEmptyWord,
}

fn join(issues: &[LexiconIssue]) -> String {
    issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

fn suggest(near: &[String]) -> String {
    if near.is_empty() {
        String::new()
    } else {
        format!(" (did you mean {}?)", near.join(", "))
    }
}

/// A word's declared types and their metarule closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub word: String,
    pub aliases: Vec<String>,
    pub types: Vec<CompoundType>,
    closed: Vec<CompoundType>,
}

impl LexiconEntry {
    /// Declared types followed by derived ones, without repeats.
    pub fn closed_types(&self) -> &[CompoundType] {
        &self.closed
    }
}

/// A validated, immutable lexicon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    language: String,
    table: AtomTable,
    entries: BTreeMap<String, LexiconEntry>,
    aliases: BTreeMap<String, String>,
    metarules: Vec<Metarule>,
    empty_words: Vec<CompoundType>,
    empty_closed: Vec<CompoundType>,
}

impl Lexicon {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self, LexiconError> {
        let file: LexiconFile = serde_json::from_str(text).map_err(|e| LexiconError::Syntax {
            origin: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_file(file, origin)
    }

    /// Validates a parsed file, collecting every issue before failing.
    pub fn from_file(file: LexiconFile, origin: &str) -> Result<Self, LexiconError> {
        let invalid = |issues| LexiconError::Invalid {
            origin: origin.to_string(),
            issues,
        };
        let table = AtomTable::new(file.atoms.iter().cloned(), file.order.iter().cloned())
            .map_err(|e| invalid(e.issues.into_iter().map(LexiconIssue::from).collect()))?;
        let mut issues = Vec::new();

        let mut metarules = Vec::new();
        for (index, spec) in file.metarules.iter().enumerate() {
            match spec.resolve(&table) {
                Ok(rule) => metarules.push(rule),
                Err(message) => issues.push(LexiconIssue::BadMetarule { index, message }),
            }
        }

        let mut entries: BTreeMap<String, LexiconEntry> = BTreeMap::new();
        for entry in &file.entries {
            if entry.types.is_empty() {
                issues.push(LexiconIssue::NoTypes(entry.word.clone()));
                continue;
            }
            let mut types = Vec::new();
            for text in &entry.types {
                match parse_compound(text, &table) {
                    Ok(t) => types.push(t),
                    Err(e) => issues.push(LexiconIssue::BadType {
                        word: entry.word.clone(),
                        text: text.clone(),
                        message: e.to_string(),
                    }),
                }
            }
            if let Some(existing) = entries.get_mut(&entry.word) {
                if existing.types != types {
                    issues.push(LexiconIssue::ConflictingEntry(entry.word.clone()));
                }
                for alias in &entry.aliases {
                    if !existing.aliases.contains(alias) {
                        existing.aliases.push(alias.clone());
                    }
                }
                continue;
            }
            entries.insert(
                entry.word.clone(),
                LexiconEntry {
                    word: entry.word.clone(),
                    aliases: entry.aliases.clone(),
                    types,
                    closed: Vec::new(),
                },
            );
        }

        let mut aliases = BTreeMap::new();
        for entry in entries.values() {
            for alias in &entry.aliases {
                let clash = if entries.contains_key(alias) && *alias != entry.word {
                    Some(alias.clone())
                } else {
                    aliases.get(alias).filter(|w| **w != entry.word).cloned()
                };
                match clash {
                    Some(other) => issues.push(LexiconIssue::AliasClash {
                        alias: alias.clone(),
                        word: entry.word.clone(),
                        other,
                    }),
                    None => {
                        aliases.insert(alias.clone(), entry.word.clone());
                    }
                }
            }
        }

        let mut empty_words = Vec::new();
        for text in &file.empty_words {
            match parse_compound(text, &table) {
                Ok(t) => empty_words.push(t),
                Err(e) => issues.push(LexiconIssue::BadEmptyWord {
                    text: text.clone(),
                    message: e.to_string(),
                }),
            }
        }

        if !issues.is_empty() {
            return Err(invalid(issues));
        }

        for entry in entries.values_mut() {
            entry.closed = close_types(&entry.types, &metarules, &table);
        }
        let empty_closed = close_types(&empty_words, &metarules, &table);
        Ok(Lexicon {
            language: file.language,
            table,
            entries,
            aliases,
            metarules,
            empty_words,
            empty_closed,
        })
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn table(&self) -> &AtomTable {
        &self.table
    }

    pub fn metarules(&self) -> &[Metarule] {
        &self.metarules
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }

    pub fn empty_words(&self) -> &[CompoundType] {
        &self.empty_words
    }

    /// Resolves aliases (e.g. native script) to the canonical word.
    pub fn canonical<'a>(&'a self, token: &'a str) -> Option<&'a str> {
        if self.entries.contains_key(token) {
            Some(token)
        } else {
            self.aliases.get(token).map(String::as_str)
        }
    }

    /// The metarule-closed type set of `word` (or of the empty word).
    pub fn types_of(&self, word: &str) -> Result<&[CompoundType], LexiconError> {
        if is_empty_word(word) {
            return if self.empty_closed.is_empty() {
                Err(LexiconError::NoEmptyWord)
            } else {
                Ok(&self.empty_closed)
            };
        }
        match self.canonical(word) {
            Some(canonical) => Ok(self.entries[canonical].closed_types()),
            None => Err(LexiconError::UnknownWord {
                word: word.to_string(),
                near: self.near_matches(word),
            }),
        }
    }

    fn near_matches(&self, word: &str) -> Vec<String> {
        let mut scored: Vec<(usize, &String)> = self
            .entries
            .keys()
            .chain(self.aliases.keys())
            .map(|w| (strsim::levenshtein(word, w), w))
            .filter(|(d, _)| *d <= 2)
            .collect();
        scored.sort();
        scored.into_iter().take(5).map(|(_, w)| w.clone()).collect()
    }

    /// Candidate types per token, in input order.
    pub fn type_sentence<S: AsRef<str>>(
        &self,
        tokens: &[S],
    ) -> Result<Vec<(String, Vec<CompoundType>)>, LexiconError> {
        tokens
            .iter()
            .map(|t| {
                let t = t.as_ref();
                Ok((t.to_string(), self.types_of(t)?.to_vec()))
            })
            .collect()
    }

    pub fn to_file(&self) -> LexiconFile {
        LexiconFile {
            language: self.language.clone(),
            atoms: self.table.atoms().iter().map(|a| a.as_str().to_string()).collect(),
            order: self
                .table
                .order_pairs()
                .iter()
                .map(|(a, b)| (a.as_str().to_string(), b.as_str().to_string()))
                .collect(),
            entries: self
                .entries
                .values()
                .map(|e| EntryFile {
                    word: e.word.clone(),
                    aliases: e.aliases.clone(),
                    types: e.types.iter().map(ToString::to_string).collect(),
                })
                .collect(),
            metarules: self.metarules.iter().map(Metarule::to_spec).collect(),
            empty_words: self.empty_words.iter().map(ToString::to_string).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("lexicon files always serialize")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LexiconError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

impl fmt::Display for Lexicon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lexicon {} ({} atoms, {} words, {} metarules)",
            self.language,
            self.table.atoms().len(),
            self.entries.len(),
            self.metarules.len()
        )
    }
}

/// Closes `types` under `rules`, at most [`METARULE_DEPTH`] rounds.
pub fn close_types(types: &[CompoundType], rules: &[Metarule], table: &AtomTable) -> Vec<CompoundType> {
    let mut out: Vec<CompoundType> = Vec::new();
    for t in types {
        if !out.contains(t) {
            out.push(t.clone());
        }
    }
    let mut frontier = out.clone();
    for _ in 0..METARULE_DEPTH {
        let mut next = Vec::new();
        for t in &frontier {
            for rule in rules {
                for derived in rule.derive(t, table) {
                    if !out.contains(&derived) {
                        out.push(derived.clone());
                        next.push(derived);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "language": "ja",
        "atoms": ["pi", "n", "s1", "s", "o1", "o2", "o4"],
        "order": [["s1", "s"], ["n", "pi"]],
        "entries": [
            {"word": "taberu", "aliases": ["食べる"], "types": ["o2^r o1^r s1"]},
            {"word": "no", "types": ["pi^r o4"]},
            {"word": "neko", "types": ["n"]},
            {"word": "neko", "aliases": ["猫"], "types": ["n"]}
        ],
        "metarules": [
            {"kind": "argument-swap", "cases": ["o1", "o2"], "sentence": "s"},
            {"kind": "atom-expansion", "atom": "o4", "expansion": "n n^l"},
            {"kind": "slot-flip", "case": "o1", "sentence": "s"}
        ],
        "empty_words": ["o1 s^r n n^l"]
    }"#;

    fn small() -> Lexicon {
        Lexicon::from_json(SMALL, "small").unwrap()
    }

    fn strings(types: &[CompoundType]) -> Vec<String> {
        types.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn metarule_closure() {
        let lex = small();
        assert_eq!(strings(lex.types_of("taberu").unwrap()), ["o2^r o1^r s1", "o1^r o2^r s1"]);
        assert_eq!(strings(lex.types_of("食べる").unwrap()), ["o2^r o1^r s1", "o1^r o2^r s1"]);
        assert_eq!(strings(lex.types_of("no").unwrap()), ["pi^r o4", "pi^r n n^l"]);
        assert_eq!(strings(lex.types_of("∅").unwrap()), ["o1 s^r n n^l"]);
        assert_eq!(strings(lex.types_of("@0").unwrap()), ["o1 s^r n n^l"]);
        assert_eq!(strings(lex.types_of("猫").unwrap()), ["n"]);
    }

    #[test]
    fn slot_flip_both_directions() {
        let lex = small();
        let t = lex.table();
        let rule = &lex.metarules()[2];
        let forward = parse_compound("s o1^l o2^l", t).unwrap();
        let flipped = parse_compound("o1^r s o2^l", t).unwrap();
        assert_eq!(rule.derive(&forward, t), vec![flipped.clone()]);
        assert_eq!(rule.derive(&flipped, t), vec![forward.clone()]);
        assert_eq!(rule.rewrite(&forward, t), Some(flipped.clone()));
        assert_eq!(rule.rewrite(&flipped, t), None);
        // s1 <= s counts as sentence-headed
        let sub = parse_compound("s1 o1^l", t).unwrap();
        assert_eq!(rule.rewrite(&sub, t).unwrap().to_string(), "o1^r s1");
        let closed = close_types(std::slice::from_ref(&forward), lex.metarules(), t);
        assert_eq!(close_types(&closed, lex.metarules(), t), closed);
    }

    #[test]
    fn unknown_word_suggests() {
        let lex = small();
        match lex.types_of("nekko") {
            Err(LexiconError::UnknownWord { near, .. }) => assert_eq!(near, ["neko"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn type_sentence_keeps_order() {
        let lex = small();
        let typed = lex.type_sentence(&["neko", "taberu"]).unwrap();
        assert_eq!(typed[0].0, "neko");
        assert_eq!(typed[1].1.len(), 2);
        assert!(lex.type_sentence::<&str>(&[]).unwrap().is_empty());
        assert!(lex.type_sentence(&["inu"]).is_err());
    }

    #[test]
    fn validation_aggregates() {
        let bad = r#"{
            "language": "x",
            "atoms": ["s", "n"],
            "entries": [
                {"word": "a", "types": ["q"]},
                {"word": "b", "types": []},
                {"word": "c", "types": ["n"]},
                {"word": "c", "types": ["s"]},
                {"word": "d", "aliases": ["c"], "types": ["n"]}
            ],
            "metarules": [{"kind": "slot-flip", "case": "o9", "sentence": "s"}],
            "empty_words": ["n^x"]
        }"#;
        match Lexicon::from_json(bad, "bad") {
            Err(LexiconError::Invalid { issues, .. }) => {
                assert_eq!(issues.len(), 6, "{issues:?}");
                assert!(issues.iter().any(|i| matches!(i, LexiconIssue::BadType { .. })));
                assert!(issues.iter().any(|i| matches!(i, LexiconIssue::ConflictingEntry(_))));
                assert!(issues.iter().any(|i| matches!(i, LexiconIssue::AliasClash { .. })));
            }
            other => panic!("{other:?}"),
        }
        let cyclic = r#"{"language": "x", "atoms": ["s", "s1"], "order": [["s", "s1"], ["s1", "s"]]}"#;
        assert!(matches!(
            Lexicon::from_json(cyclic, "cyclic"),
            Err(LexiconError::Invalid { ref issues, .. }) if matches!(issues[0], LexiconIssue::Table(TableIssue::Cycle(..)))
        ));
        match Lexicon::from_json("{\"language\": 3}", "syntax") {
            Err(LexiconError::Syntax { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn save_load_round_trip() {
        let lex = small();
        let again = Lexicon::from_json(&lex.to_json(), "again").unwrap();
        assert_eq!(again, lex);
    }
}
