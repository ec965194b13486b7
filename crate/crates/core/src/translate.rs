//! Syntactic translation functors between pregroups.
//!
//! A functor sends each source atom to a target type. In homomorphism
//! mode word order and adjoints are kept; in anti-homomorphism mode the
//! order of a string is reversed and left and right adjoints swap. The
//! bracewise mode decides this per brace segment through a reversal mask,
//! which covers the two-segment "reverse both" and three-segment
//! "reverse the middle" constructions as well as any other mask.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{is_empty_word, Lexicon, LexiconError, Metarule, MetaruleSpec, EMPTY_WORD_TOKENS};
use crate::reduction::{reduce, ReduceError, ReductionWitness, TargetType};
use crate::types::{parse_compound, Atom, AtomTable, BracedType, CompoundType, SimpleType};

/// Upper bound on type selections tried per sentence.
pub const MAX_SELECTIONS: usize = 4096;

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error("atom {0} has no image under the functor")]
    UnmappedAtom(String),
    #[error("functor is in {found} mode, {expected} required")]
    WrongMode { expected: &'static str, found: &'static str },
    #[error("reversal mask has {mask} entries but the type has {segments} segments")]
    MaskLength { mask: usize, segments: usize },
    #[error("bracewise mode needs a non-empty reversal mask")]
    EmptyMask,
    #[error("image of atom {atom}: {message}")]
    InvalidImage { atom: String, message: String },
    #[error("functor is not monotone: {lesser} <= {greater} but their images are not ordered")]
    NotMonotone { lesser: String, greater: String },
    #[error("functor expects {expected} lexicon, got {found}")]
    LanguageMismatch { expected: String, found: String },
    #[error("bracing does not partition the {tokens} tokens: {reason}")]
    Bracing { tokens: usize, reason: String },
    #[error("no word map entry for {0:?}")]
    UnmappedWord(String),
    #[error("no type selection makes the source sentence reduce to {0}")]
    NoSourceReduction(String),
    #[error("post metarule: {0}")]
    Metarule(String),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: {message}")]
    Syntax { origin: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctorMode {
    Homomorphism,
    Antihomomorphism,
    Bracewise { reversal_mask: Vec<bool> },
}

impl FunctorMode {
    pub fn name(&self) -> &'static str {
        match self {
            FunctorMode::Homomorphism => "homomorphism",
            FunctorMode::Antihomomorphism => "antihomomorphism",
            FunctorMode::Bracewise { .. } => "bracewise",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Homomorphism,
    Antihomomorphism,
    Bracewise,
}

/// On-disk functor layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorFile {
    pub source_language: String,
    pub target_language: String,
    pub mode: ModeName,
    pub atom_map: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reversal_mask: Option<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub post_metarules: Vec<MetaruleSpec>,
}

/// A validated translation functor between two atom tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctorSpec {
    source_language: String,
    target_language: String,
    mode: FunctorMode,
    atom_map: BTreeMap<Atom, CompoundType>,
    post_metarules: Vec<Metarule>,
    source: AtomTable,
    target: AtomTable,
}

impl FunctorSpec {
    /// Checks that `atom_map` is total on `source`, that images live in
    /// `target`, and that single-atom images respect the atom order.
    pub fn new(
        source: &AtomTable,
        target: &AtomTable,
        mode: FunctorMode,
        atom_map: BTreeMap<Atom, CompoundType>,
        post_metarules: Vec<Metarule>,
    ) -> Result<Self, TranslateError> {
        if let FunctorMode::Bracewise { reversal_mask } = &mode {
            if reversal_mask.is_empty() {
                return Err(TranslateError::EmptyMask);
            }
        }
        if let Some(missing) = source.atoms().iter().find(|a| !atom_map.contains_key(*a)) {
            return Err(TranslateError::UnmappedAtom(missing.to_string()));
        }
        for (atom, image) in &atom_map {
            if source.position(atom).is_none() {
                return Err(TranslateError::InvalidImage {
                    atom: atom.to_string(),
                    message: "not a source atom".into(),
                });
            }
            target.check_type(image).map_err(|e| TranslateError::InvalidImage {
                atom: atom.to_string(),
                message: e.to_string(),
            })?;
        }
        for (lesser, greater) in source.order_pairs() {
            let (a, b) = (&atom_map[lesser], &atom_map[greater]);
            if let ([a], [b]) = (a.parts(), b.parts()) {
                if !crate::types::simple_leq(a, b, target).unwrap_or(false) {
                    return Err(TranslateError::NotMonotone {
                        lesser: lesser.to_string(),
                        greater: greater.to_string(),
                    });
                }
            }
        }
        Ok(FunctorSpec {
            source_language: String::new(),
            target_language: String::new(),
            mode,
            atom_map,
            post_metarules,
            source: source.clone(),
            target: target.clone(),
        })
    }

    pub fn with_languages(mut self, source: impl Into<String>, target: impl Into<String>) -> Self {
        self.source_language = source.into();
        self.target_language = target.into();
        self
    }

    pub fn from_file(file: &FunctorFile, source: &Lexicon, target: &Lexicon) -> Result<Self, TranslateError> {
        for (expected, lex) in [(&file.source_language, source), (&file.target_language, target)] {
            if expected != lex.language() {
                return Err(TranslateError::LanguageMismatch {
                    expected: expected.clone(),
                    found: lex.language().to_string(),
                });
            }
        }
        let mode = match (file.mode, &file.reversal_mask) {
            (ModeName::Homomorphism, _) => FunctorMode::Homomorphism,
            (ModeName::Antihomomorphism, _) => FunctorMode::Antihomomorphism,
            (ModeName::Bracewise, Some(mask)) => FunctorMode::Bracewise {
                reversal_mask: mask.clone(),
            },
            (ModeName::Bracewise, None) => return Err(TranslateError::EmptyMask),
        };
        let mut atom_map = BTreeMap::new();
        for (name, image) in &file.atom_map {
            let atom = source.table().get(name).cloned().ok_or_else(|| TranslateError::InvalidImage {
                atom: name.clone(),
                message: "not a source atom".into(),
            })?;
            let image = parse_compound(image, target.table()).map_err(|e| TranslateError::InvalidImage {
                atom: name.clone(),
                message: e.to_string(),
            })?;
            atom_map.insert(atom, image);
        }
        let post_metarules = file
            .post_metarules
            .iter()
            .map(|m| m.resolve(target.table()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(TranslateError::Metarule)?;
        Ok(Self::new(source.table(), target.table(), mode, atom_map, post_metarules)?
            .with_languages(&file.source_language, &file.target_language))
    }

    pub fn parse_file(text: &str, origin: &str) -> Result<FunctorFile, TranslateError> {
        serde_json::from_str(text).map_err(|e| TranslateError::Syntax {
            origin: origin.to_string(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>, source: &Lexicon, target: &Lexicon) -> Result<Self, TranslateError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| TranslateError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_file(&Self::parse_file(&text, &path.display().to_string())?, source, target)
    }

    pub fn mode(&self) -> &FunctorMode {
        &self.mode
    }

    pub fn source_language(&self) -> &str {
        &self.source_language
    }

    pub fn target_language(&self) -> &str {
        &self.target_language
    }

    pub fn source_table(&self) -> &AtomTable {
        &self.source
    }

    pub fn target_table(&self) -> &AtomTable {
        &self.target
    }

    pub fn image_of(&self, atom: &Atom) -> Option<&CompoundType> {
        self.atom_map.get(atom)
    }

    fn map_simple(&self, p: &SimpleType, reverse: bool) -> Result<CompoundType, TranslateError> {
        let image = self
            .atom_map
            .get(&p.atom)
            .ok_or_else(|| TranslateError::UnmappedAtom(p.atom.to_string()))?;
        // reversing functors send left adjoints to right adjoints
        let steps = if reverse { -p.exponent } else { p.exponent };
        let mut out = image.adjoint_power(steps);
        if p.beta {
            out = out.into_parts().into_iter().map(|q| q.with_beta(true)).collect();
        }
        Ok(out)
    }

    /// Order-preserving image, whatever the mode.
    pub fn map_covariant(&self, t: &CompoundType) -> Result<CompoundType, TranslateError> {
        let mut parts = Vec::new();
        for p in t {
            parts.extend(self.map_simple(p, false)?.into_parts());
        }
        Ok(CompoundType::new(parts))
    }

    /// Order-reversing image, whatever the mode.
    pub fn map_contravariant(&self, t: &CompoundType) -> Result<CompoundType, TranslateError> {
        let mut parts = Vec::new();
        for p in t.iter().rev() {
            parts.extend(self.map_simple(p, true)?.into_parts());
        }
        Ok(CompoundType::new(parts))
    }

    fn require(&self, expected: &'static str) -> Result<(), TranslateError> {
        if self.mode.name() == expected {
            Ok(())
        } else {
            Err(TranslateError::WrongMode {
                expected,
                found: self.mode.name(),
            })
        }
    }

    pub fn apply_homomorphism(&self, t: &CompoundType) -> Result<CompoundType, TranslateError> {
        self.require("homomorphism")?;
        self.map_covariant(t)
    }

    pub fn apply_antihomomorphism(&self, t: &CompoundType) -> Result<CompoundType, TranslateError> {
        self.require("antihomomorphism")?;
        self.map_contravariant(t)
    }

    /// Segment-wise image: masked segments are reversed, the others kept;
    /// post metarules then rewrite each segment once.
    pub fn apply_bracewise(&self, t: &BracedType) -> Result<BracedType, TranslateError> {
        self.require("bracewise")?;
        let mask = self.segment_mask(t.k())?;
        let segments = t
            .segments()
            .iter()
            .zip(mask)
            .map(|(seg, reverse)| {
                let image = if reverse {
                    self.map_contravariant(seg)?
                } else {
                    self.map_covariant(seg)?
                };
                Ok(self.apply_post_metarules(image))
            })
            .collect::<Result<Vec<_>, TranslateError>>()?;
        Ok(BracedType::new(segments).expect("k is preserved"))
    }

    /// Per-segment reversal flags for a type with `k` segments.
    pub fn segment_mask(&self, k: usize) -> Result<Vec<bool>, TranslateError> {
        match &self.mode {
            FunctorMode::Homomorphism => Ok(vec![false; k]),
            FunctorMode::Antihomomorphism => Ok(vec![true; k]),
            FunctorMode::Bracewise { reversal_mask } => {
                if reversal_mask.len() == k {
                    Ok(reversal_mask.clone())
                } else {
                    Err(TranslateError::MaskLength {
                        mask: reversal_mask.len(),
                        segments: k,
                    })
                }
            }
        }
    }

    /// Order in which source segments appear in the output.
    fn segment_order(&self, k: usize) -> Vec<usize> {
        match self.mode {
            FunctorMode::Antihomomorphism => (0..k).rev().collect(),
            _ => (0..k).collect(),
        }
    }

    /// Applies each post metarule's forward direction once, in order.
    pub fn apply_post_metarules(&self, mut t: CompoundType) -> CompoundType {
        for rule in &self.post_metarules {
            if let Some(rewritten) = rule.rewrite(&t, &self.target) {
                t = rewritten;
            }
        }
        t
    }

    pub fn map_target(&self, target: &TargetType) -> Result<TargetType, TranslateError> {
        Ok(TargetType::new(self.map_covariant(target.as_type())?))
    }
}

/// Source token to target word(s). Values are split on whitespace; an
/// empty value realizes as nothing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WordMap(BTreeMap<String, String>);

impl WordMap {
    pub fn new(pairs: BTreeMap<String, String>) -> Self {
        WordMap(pairs)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self, TranslateError> {
        serde_json::from_str(text).map_err(|e| TranslateError::Syntax {
            origin: origin.to_string(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TranslateError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| TranslateError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn realize(&self, token: &str) -> Result<Vec<String>, TranslateError> {
        let value = if is_empty_word(token) {
            EMPTY_WORD_TOKENS.iter().find_map(|t| self.0.get(*t))
        } else {
            self.0.get(token)
        };
        value
            .map(|v| v.split_whitespace().map(str::to_string).collect())
            .ok_or_else(|| TranslateError::UnmappedWord(token.to_string()))
    }
}

/// Segment boundaries over a token list, stored as segment end offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bracing {
    ends: Vec<usize>,
}

impl Bracing {
    /// `ends` must be strictly increasing and finish at `tokens`.
    pub fn new(ends: Vec<usize>, tokens: usize) -> Result<Self, TranslateError> {
        let fail = |reason: &str| TranslateError::Bracing {
            tokens,
            reason: reason.to_string(),
        };
        if ends.is_empty() {
            return Err(fail("no segments"));
        }
        if ends.last() != Some(&tokens) {
            return Err(fail("last segment must end at the final token"));
        }
        let mut prev = 0;
        for &end in &ends {
            if end <= prev {
                return Err(fail("segments must be non-empty and ordered"));
            }
            prev = end;
        }
        Ok(Bracing { ends })
    }

    pub fn single(tokens: usize) -> Result<Self, TranslateError> {
        Self::new(vec![tokens], tokens)
    }

    pub fn k(&self) -> usize {
        self.ends.len()
    }

    pub fn tokens(&self) -> usize {
        *self.ends.last().unwrap_or(&0)
    }

    pub fn segments(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.ends
            .iter()
            .map(|&end| {
                let r = start..end;
                start = end;
                r
            })
            .collect()
    }
}

/// Splits `"issya ga | tegami wo kaku"` into tokens and a bracing.
pub fn split_braced_sentence(text: &str) -> Result<(Vec<String>, Bracing), TranslateError> {
    let mut tokens = Vec::new();
    let mut ends = Vec::new();
    for chunk in text.split('|') {
        tokens.extend(chunk.split_whitespace().map(str::to_string));
        ends.push(tokens.len());
    }
    let bracing = Bracing::new(ends, tokens.len())?;
    Ok((tokens, bracing))
}

/// One source word and what the translation made of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslatedWord {
    pub source: String,
    pub source_type: CompoundType,
    pub image: CompoundType,
    pub target_words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationResult {
    /// Source tokens with the type selection that reduced.
    pub source_words: Vec<(String, CompoundType)>,
    pub source_type: BracedType,
    pub source_witness: ReductionWitness,
    pub translated: BracedType,
    /// Output segments, in target order, each word in target order.
    pub segments: Vec<Vec<TranslatedWord>>,
    pub target_witness: Option<ReductionWitness>,
    pub diagnostic: Option<String>,
}

impl TranslationResult {
    pub fn succeeded(&self) -> bool {
        self.target_witness.is_some()
    }

    pub fn words(&self) -> Vec<&str> {
        self.segments
            .iter()
            .flatten()
            .flat_map(|w| w.target_words.iter().map(String::as_str))
            .collect()
    }

    pub fn sentence(&self) -> String {
        self.words().join(" ")
    }

    /// Target-order word images, for diagram rendering.
    pub fn target_word_types(&self) -> Vec<(String, CompoundType)> {
        self.segments
            .iter()
            .flatten()
            .map(|w| (w.target_words.join(" "), w.image.clone()))
            .collect()
    }
}

fn translate_selection(
    f: &FunctorSpec,
    wm: &WordMap,
    words: &[(String, CompoundType)],
    bracing: &Bracing,
) -> Result<(BracedType, Vec<Vec<TranslatedWord>>), TranslateError> {
    let ranges = bracing.segments();
    let mask = f.segment_mask(ranges.len())?;
    let mut segments = Vec::new();
    let mut images = Vec::new();
    for s in f.segment_order(ranges.len()) {
        let mut indices: Vec<usize> = ranges[s].clone().collect();
        if mask[s] {
            indices.reverse();
        }
        let mut out = Vec::new();
        for i in indices {
            let (token, ty) = &words[i];
            let image = if mask[s] {
                f.map_contravariant(ty)?
            } else {
                f.map_covariant(ty)?
            };
            out.push(TranslatedWord {
                source: token.clone(),
                source_type: ty.clone(),
                image: f.apply_post_metarules(image),
                target_words: wm.realize(token)?,
            });
        }
        images.push(out.iter().flat_map(|w| w.image.iter().cloned()).collect());
        segments.push(out);
    }
    Ok((BracedType::new(images).expect("bracing has segments"), segments))
}

/// Types a sentence, finds a reducing type selection, and carries it
/// through the functor.
///
/// Type selections are tried in lexicon order (first token varies
/// slowest). The first selection whose image also reduces wins; if only
/// the source side reduces, the first such selection is returned with no
/// target witness and a diagnostic.
pub fn translate_sentence<S: AsRef<str>>(
    src: &Lexicon,
    tgt: &Lexicon,
    f: &FunctorSpec,
    wm: &WordMap,
    tokens: &[S],
    bracing: &Bracing,
    target: &TargetType,
) -> Result<TranslationResult, TranslateError> {
    if !f.source_language.is_empty() && f.source_language != src.language() {
        return Err(TranslateError::LanguageMismatch {
            expected: f.source_language.clone(),
            found: src.language().to_string(),
        });
    }
    if !f.target_language.is_empty() && f.target_language != tgt.language() {
        return Err(TranslateError::LanguageMismatch {
            expected: f.target_language.clone(),
            found: tgt.language().to_string(),
        });
    }
    if bracing.tokens() != tokens.len() {
        return Err(TranslateError::Bracing {
            tokens: tokens.len(),
            reason: format!("bracing covers {} tokens", bracing.tokens()),
        });
    }
    let typed = src.type_sentence(tokens)?;
    let canonical: Vec<String> = typed
        .iter()
        .map(|(t, _)| src.canonical(t).unwrap_or(t).to_string())
        .collect();
    let tgt_target = f.map_target(target)?;
    let ranges = bracing.segments();

    let mut fallback = None;
    let mut choice = vec![0usize; typed.len()];
    for _ in 0..MAX_SELECTIONS {
        let words: Vec<(String, CompoundType)> = canonical
            .iter()
            .zip(&typed)
            .zip(&choice)
            .map(|((w, (_, types)), &c)| (w.clone(), types[c].clone()))
            .collect();
        let flat: CompoundType = words.iter().flat_map(|(_, t)| t.iter().cloned()).collect();
        if let Some(source_witness) = reduce(&flat, target, src.table())? {
            let (translated, segments) = translate_selection(f, wm, &words, bracing)?;
            let target_witness = reduce(&translated.flatten(), &tgt_target, tgt.table())?;
            let source_type = BracedType::new(
                ranges
                    .iter()
                    .map(|r| words[r.clone()].iter().flat_map(|(_, t)| t.iter().cloned()).collect())
                    .collect(),
            )
            .expect("bracing has segments");
            let result = TranslationResult {
                source_words: words,
                source_type,
                source_witness,
                translated,
                segments,
                target_witness,
                diagnostic: None,
            };
            if result.target_witness.is_some() {
                return Ok(result);
            }
            if fallback.is_none() {
                fallback = Some(result);
            }
        }
        if !advance(&mut choice, &typed) {
            break;
        }
    }
    match fallback {
        Some(mut result) => {
            result.diagnostic = Some(format!(
                "translated type {} does not reduce to {}",
                result.translated, tgt_target
            ));
            Ok(result)
        }
        None => Err(TranslateError::NoSourceReduction(target.to_string())),
    }
}

/// Odometer step over per-token choices; the last token varies fastest.
fn advance(choice: &mut [usize], typed: &[(String, Vec<CompoundType>)]) -> bool {
    for i in (0..choice.len()).rev() {
        choice[i] += 1;
        if choice[i] < typed[i].1.len() {
            return true;
        }
        choice[i] = 0;
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Covariant,
    Contravariant,
}

/// Anything that maps compound types and claims to be a (possibly
/// order-reversing) monoid morphism.
pub trait TypeMorphism {
    fn variance(&self) -> Variance;
    fn map_type(&self, t: &CompoundType) -> Result<CompoundType, TranslateError>;
}

impl TypeMorphism for FunctorSpec {
    fn variance(&self) -> Variance {
        match self.mode {
            FunctorMode::Antihomomorphism => Variance::Contravariant,
            _ => Variance::Covariant,
        }
    }

    fn map_type(&self, t: &CompoundType) -> Result<CompoundType, TranslateError> {
        match self.mode {
            FunctorMode::Homomorphism => self.map_covariant(t),
            FunctorMode::Antihomomorphism => self.map_contravariant(t),
            FunctorMode::Bracewise { .. } => Err(TranslateError::WrongMode {
                expected: "homomorphism or antihomomorphism",
                found: "bracewise",
            }),
        }
    }
}

/// A map given by a lookup table on simple types, extended to strings by
/// concatenation (reversed when contravariant). Adjoints are looked up,
/// not derived, so such a map can break the adjoint laws.
#[derive(Debug, Clone)]
pub struct SimpleTypeMap {
    variance: Variance,
    table: HashMap<SimpleType, CompoundType>,
}

impl SimpleTypeMap {
    pub fn new(variance: Variance, table: HashMap<SimpleType, CompoundType>) -> Self {
        SimpleTypeMap { variance, table }
    }
}

impl TypeMorphism for SimpleTypeMap {
    fn variance(&self) -> Variance {
        self.variance
    }

    fn map_type(&self, t: &CompoundType) -> Result<CompoundType, TranslateError> {
        let images = t
            .iter()
            .map(|p| {
                self.table
                    .get(p)
                    .cloned()
                    .ok_or_else(|| TranslateError::UnmappedAtom(p.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let ordered: Box<dyn Iterator<Item = CompoundType>> = match self.variance {
            Variance::Covariant => Box::new(images.into_iter()),
            Variance::Contravariant => Box::new(images.into_iter().rev()),
        };
        Ok(ordered.flat_map(CompoundType::into_parts).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawViolation {
    pub law: &'static str,
    pub input: String,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for LawViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} fails on [{}]: expected [{}], got [{}]",
            self.law, self.input, self.expected, self.actual
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub checked: usize,
    pub violations: Vec<LawViolation>,
}

impl LawReport {
    pub fn is_lawful(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks unit preservation, (anti-)monoidality over all sample pairs,
/// and adjoint preservation (swapped when contravariant) on each sample.
pub fn check_functor_laws<M: TypeMorphism + ?Sized>(m: &M, samples: &[CompoundType]) -> LawReport {
    let mut report = LawReport::default();
    let show = |r: &Result<CompoundType, TranslateError>| match r {
        Ok(t) => t.to_string(),
        Err(e) => format!("error: {e}"),
    };
    let mut check = |law: &'static str,
                     input: String,
                     expected: Result<CompoundType, TranslateError>,
                     actual: Result<CompoundType, TranslateError>| {
        report.checked += 1;
        let ok = matches!((&expected, &actual), (Ok(a), Ok(b)) if a == b);
        if !ok {
            report.violations.push(LawViolation {
                law,
                input,
                expected: show(&expected),
                actual: show(&actual),
            });
        }
    };

    check(
        "unit",
        "1".into(),
        Ok(CompoundType::unit()),
        m.map_type(&CompoundType::unit()),
    );
    let contravariant = m.variance() == Variance::Contravariant;
    for x in samples {
        let fx = m.map_type(x);
        let (left_law, right_law) = if contravariant {
            ("F(x^l) = F(x)^r", "F(x^r) = F(x)^l")
        } else {
            ("F(x^l) = F(x)^l", "F(x^r) = F(x)^r")
        };
        let (left_expected, right_expected) = match &fx {
            Ok(t) if contravariant => (Ok(t.right_adjoint()), Ok(t.left_adjoint())),
            Ok(t) => (Ok(t.left_adjoint()), Ok(t.right_adjoint())),
            Err(e) => (
                Err(TranslateError::Metarule(e.to_string())),
                Err(TranslateError::Metarule(e.to_string())),
            ),
        };
        check(left_law, x.to_string(), left_expected, m.map_type(&x.left_adjoint()));
        check(right_law, x.to_string(), right_expected, m.map_type(&x.right_adjoint()));
    }
    for x in samples {
        for y in samples {
            let law = if contravariant {
                "F(xy) = F(y)F(x)"
            } else {
                "F(xy) = F(x)F(y)"
            };
            let expected = match (m.map_type(x), m.map_type(y)) {
                (Ok(fx), Ok(fy)) if contravariant => Ok(fy.concat(&fx)),
                (Ok(fx), Ok(fy)) => Ok(fx.concat(&fy)),
                (Err(e), _) | (_, Err(e)) => Err(e),
            };
            check(law, format!("{x} . {y}"), expected, m.map_type(&x.concat(y)));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::parse_type;

    fn table(atoms: &[&str]) -> AtomTable {
        AtomTable::new(atoms.iter().copied(), Vec::<(&str, &str)>::new()).unwrap()
    }

    fn functor(src: &AtomTable, tgt: &AtomTable, mode: FunctorMode, pairs: &[(&str, &str)]) -> FunctorSpec {
        let map = pairs
            .iter()
            .map(|(a, b)| (src.get(a).unwrap().clone(), parse_compound(b, tgt).unwrap()))
            .collect();
        FunctorSpec::new(src, tgt, mode, map, Vec::new()).unwrap()
    }

    #[test]
    fn homomorphism_examples() {
        let j = table(&["n", "s", "o4"]);
        let e = table(&["nE", "sE"]);
        let f = functor(&j, &e, FunctorMode::Homomorphism, &[("n", "nE"), ("s", "sE"), ("o4", "nE nE^l")]);
        let ct = |s: &str| parse_compound(s, &j).unwrap();
        assert_eq!(f.apply_homomorphism(&ct("n n^l n")).unwrap().to_string(), "nE nE^l nE");
        assert_eq!(f.apply_homomorphism(&CompoundType::unit()).unwrap(), CompoundType::unit());
        assert_eq!(f.apply_homomorphism(&ct("o4")).unwrap().to_string(), "nE nE^l");
        assert_eq!(f.apply_homomorphism(&ct("o4^l")).unwrap().to_string(), "nE^l^l nE^l");
        assert_eq!(f.apply_homomorphism(&ct("o4^r")).unwrap().to_string(), "nE nE^r");
        assert_eq!(f.apply_homomorphism(&ct("b(n)^l")).unwrap().to_string(), "b(nE)^l");
        assert!(matches!(
            f.apply_antihomomorphism(&ct("n")),
            Err(TranslateError::WrongMode { .. })
        ));
    }

    #[test]
    fn antihomomorphism_examples() {
        let j = table(&["n", "s"]);
        let r = table(&["nR", "sR"]);
        let f = functor(&j, &r, FunctorMode::Antihomomorphism, &[("n", "nR"), ("s", "sR")]);
        let ct = |s: &str| parse_compound(s, &j).unwrap();
        assert_eq!(f.apply_antihomomorphism(&ct("n n^l n")).unwrap().to_string(), "nR nR^r nR");
        assert_eq!(f.apply_antihomomorphism(&ct("n")).unwrap().to_string(), "nR");
        assert_eq!(f.apply_antihomomorphism(&ct("b(n)^l")).unwrap().to_string(), "b(nR)^r");
    }

    #[test]
    fn bracewise_mask_checks() {
        let j = table(&["n", "s"]);
        let e = table(&["nE", "sE"]);
        let f = functor(
            &j,
            &e,
            FunctorMode::Bracewise {
                reversal_mask: vec![true, false],
            },
            &[("n", "nE"), ("s", "sE")],
        );
        let braced = parse_type("< n n^l > < n^r s >", &j).unwrap().into_braced();
        assert_eq!(f.apply_bracewise(&braced).unwrap().to_string(), "< nE^r nE > < nE^r sE >");
        let three = parse_type("< n > < n > < n >", &j).unwrap().into_braced();
        assert!(matches!(
            f.apply_bracewise(&three),
            Err(TranslateError::MaskLength { mask: 2, segments: 3 })
        ));
    }

    #[test]
    fn construction_validates() {
        let j = AtomTable::new(["n", "pi"], [("n", "pi")]).unwrap();
        let e = AtomTable::new(["a", "b"], [("a", "b")]).unwrap();
        let build = |pairs: &[(&str, &str)]| {
            let map = pairs
                .iter()
                .map(|(x, y)| (j.get(x).unwrap().clone(), parse_compound(y, &e).unwrap()))
                .collect();
            FunctorSpec::new(&j, &e, FunctorMode::Homomorphism, map, Vec::new())
        };
        assert!(build(&[("n", "a"), ("pi", "b")]).is_ok());
        assert!(matches!(build(&[("n", "a")]), Err(TranslateError::UnmappedAtom(a)) if a == "pi"));
        assert!(matches!(
            build(&[("n", "b"), ("pi", "a")]),
            Err(TranslateError::NotMonotone { .. })
        ));
        assert!(matches!(
            FunctorSpec::new(
                &j,
                &e,
                FunctorMode::Bracewise { reversal_mask: vec![] },
                BTreeMap::new(),
                Vec::new()
            ),
            Err(TranslateError::EmptyMask)
        ));
    }

    #[test]
    fn bracing_partitions() {
        let (tokens, bracing) = split_braced_sentence("issya ga | tegami wo kaku").unwrap();
        assert_eq!(tokens.len(), 5);
        assert_eq!(bracing.segments(), vec![0..2, 2..5]);
        assert!(split_braced_sentence("a | | b").is_err());
        assert!(Bracing::new(vec![2, 4], 5).is_err());
        assert!(Bracing::new(vec![], 0).is_err());
        assert_eq!(Bracing::single(3).unwrap().k(), 1);
    }

    #[test]
    fn word_map_realization() {
        let wm = WordMap::from_json(r#"{"ni": "in the", "ha": "", "@0": "who"}"#, "wm").unwrap();
        assert_eq!(wm.realize("ni").unwrap(), ["in", "the"]);
        assert!(wm.realize("ha").unwrap().is_empty());
        assert_eq!(wm.realize("∅").unwrap(), ["who"]);
        assert!(matches!(wm.realize("x"), Err(TranslateError::UnmappedWord(_))));
    }

    #[test]
    fn law_checks() {
        let j = table(&["n", "s"]);
        let r = table(&["nR", "sR"]);
        let samples: Vec<CompoundType> = ["n", "n n^l", "s n^r", ""]
            .iter()
            .map(|s| parse_compound(s, &j).unwrap())
            .collect();
        let hom = functor(&j, &r, FunctorMode::Homomorphism, &[("n", "nR"), ("s", "sR")]);
        assert!(check_functor_laws(&hom, &samples).is_lawful());
        let anti = functor(&j, &r, FunctorMode::Antihomomorphism, &[("n", "nR"), ("s", "sR")]);
        assert!(check_functor_laws(&anti, &samples).is_lawful());

        // claims to be a homomorphism but sends n^l to nR^r
        let st = |s: &str, t: &AtomTable| parse_compound(s, t).unwrap().parts()[0].clone();
        let lookup = [("n", "nR"), ("n^l", "nR^r"), ("n^r", "nR^l"), ("s", "sR")]
            .iter()
            .map(|(a, b)| (st(a, &j), parse_compound(b, &r).unwrap()))
            .collect();
        let broken = SimpleTypeMap::new(Variance::Covariant, lookup);
        let report = check_functor_laws(&broken, &[parse_compound("n", &j).unwrap()]);
        assert!(!report.is_lawful());
        assert!(report.violations.iter().any(|v| v.law == "F(x^l) = F(x)^l"));
    }
}
