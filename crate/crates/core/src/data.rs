//! Lexicons, functors, word maps and tensor fixtures bundled with the crate.

use thiserror::Error;

use crate::lexicon::{Lexicon, LexiconError};
use crate::semantics::{SemanticsError, TensorFixture};
use crate::translate::{FunctorFile, FunctorSpec, TranslateError, WordMap};
use crate::types::AtomTable;

macro_rules! bundle {
    ($dir:literal, $ext:literal: $($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../data/", $dir, "/", $name, $ext)))),*]
    };
}

pub const LEXICONS: &[(&str, &str)] = bundle!("lexicons", ".lexicon": "ja", "en", "fa");
pub const FUNCTORS: &[(&str, &str)] = bundle!("functors", ".json": "jp-en-anti", "jp-en-hom", "psi", "psi3", "xi");
pub const WORDMAPS: &[(&str, &str)] = bundle!("wordmaps", ".json": "jp-en-anti", "jp-en-hom", "psi", "psi3", "xi");
pub const TENSORS: &[(&str, &str)] = bundle!("tensors", ".json": "adj-noun", "mori");

#[derive(Debug, Error)]
pub enum DataError {
    #[error("no bundled {kind} named {name:?} (available: {})", available.join(", "))]
    Unknown {
        kind: &'static str,
        name: String,
        available: Vec<&'static str>,
    },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

fn lookup(kind: &'static str, set: &[(&'static str, &'static str)], name: &str) -> Result<&'static str, DataError> {
    set.iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| DataError::Unknown {
            kind,
            name: name.to_string(),
            available: set.iter().map(|(n, _)| *n).collect(),
        })
}

pub fn lexicon(name: &str) -> Result<Lexicon, DataError> {
    let text = lookup("lexicon", LEXICONS, name)?;
    Ok(Lexicon::from_json(text, &format!("{name}.lexicon"))?)
}

pub fn functor_file(name: &str) -> Result<FunctorFile, DataError> {
    let text = lookup("functor", FUNCTORS, name)?;
    Ok(FunctorSpec::parse_file(text, &format!("{name}.json"))?)
}

pub fn functor(name: &str, source: &Lexicon, target: &Lexicon) -> Result<FunctorSpec, DataError> {
    Ok(FunctorSpec::from_file(&functor_file(name)?, source, target)?)
}

pub fn wordmap(name: &str) -> Result<WordMap, DataError> {
    let text = lookup("word map", WORDMAPS, name)?;
    Ok(WordMap::from_json(text, &format!("{name}.json"))?)
}

pub fn tensors(name: &str, table: &AtomTable) -> Result<TensorFixture, DataError> {
    let text = lookup("tensor fixture", TENSORS, name)?;
    Ok(TensorFixture::from_json(text, &format!("{name}.json"), table)?)
}
