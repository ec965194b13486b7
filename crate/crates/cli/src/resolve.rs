//! Turns command-line names into loaded data: a bundled name wins,
//! anything else is read as a file path.

use std::path::Path;

use pregroup_core::data::{self, FUNCTORS, LEXICONS, TENSORS, WORDMAPS};
use pregroup_core::translate::FunctorFile;
use pregroup_core::{FunctorSpec, Lexicon, TensorFixture, WordMap};

use crate::Failure;

fn bundled(set: &[(&str, &str)], name: &str) -> bool {
    set.iter().any(|(n, _)| *n == name)
}

fn missing(kind: &str, name: &str, set: &[(&str, &str)]) -> Failure {
    let names: Vec<&str> = set.iter().map(|(n, _)| *n).collect();
    Failure::Config(format!(
        "{kind} {name:?} is neither bundled ({}) nor an existing file",
        names.join(", ")
    ))
}

pub fn lexicon(name: &str) -> Result<Lexicon, Failure> {
    if bundled(LEXICONS, name) {
        return data::lexicon(name).map_err(Failure::config);
    }
    if !Path::new(name).is_file() {
        return Err(missing("lexicon", name, LEXICONS));
    }
    Lexicon::load(name).map_err(Failure::config)
}

pub fn functor_file(name: &str) -> Result<FunctorFile, Failure> {
    if bundled(FUNCTORS, name) {
        return data::functor_file(name).map_err(Failure::config);
    }
    if !Path::new(name).is_file() {
        return Err(missing("functor", name, FUNCTORS));
    }
    let text = std::fs::read_to_string(name).map_err(|e| Failure::Config(format!("{name}: {e}")))?;
    FunctorSpec::parse_file(&text, name).map_err(Failure::config)
}

/// Word map given explicitly, or else the bundled map named like the functor.
pub fn wordmap(explicit: Option<&str>, functor: &str) -> Result<WordMap, Failure> {
    match explicit {
        Some(name) if bundled(WORDMAPS, name) => data::wordmap(name).map_err(Failure::config),
        Some(name) if Path::new(name).is_file() => WordMap::load(name).map_err(Failure::config),
        Some(name) => Err(missing("word map", name, WORDMAPS)),
        None if bundled(WORDMAPS, functor) => data::wordmap(functor).map_err(Failure::config),
        None => Err(Failure::Config(format!(
            "no bundled word map for functor {functor:?}; pass --wordmap"
        ))),
    }
}

pub fn tensors(name: &str, lex: &Lexicon) -> Result<TensorFixture, Failure> {
    if bundled(TENSORS, name) {
        return data::tensors(name, lex.table()).map_err(Failure::config);
    }
    if !Path::new(name).is_file() {
        return Err(missing("tensor fixture", name, TENSORS));
    }
    TensorFixture::load(name, lex.table()).map_err(Failure::config)
}
