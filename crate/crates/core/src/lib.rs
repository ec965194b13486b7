//! Pregroup grammars with braces and β tags, reduction search, lexicons
//! with metarules, translation functors between languages, and tensor
//! semantics for reductions.

pub mod checks;
pub mod data;
pub mod diagram;
pub mod lexicon;
pub mod reduction;
pub mod semantics;
pub mod translate;
pub mod types;

pub use diagram::{render_diagram, render_sentence_diagram, DiagramError, DiagramFormat};
pub use lexicon::{close_types, Lexicon, LexiconEntry, LexiconError, Metarule, MetaruleSpec};
pub use reduction::{
    enumerate_reductions, is_reducible, oracle_reduce, reduce, Link, ReduceError, ReductionWitness, TargetType,
    WitnessError, DEFAULT_LIMIT,
};
pub use semantics::{
    apply_alpha, check_naturality, epsilon, eta, interpret, interpret_brute_force, interpret_ordered, AlphaSpec,
    Lcg64, NaturalityReport, SemanticsError, SpaceAssignment, Tensor, TensorFixture, WordTensor,
};
pub use translate::{
    check_functor_laws, split_braced_sentence, translate_sentence, Bracing, FunctorMode, FunctorSpec, LawReport,
    SimpleTypeMap, TranslateError, TranslationResult, TypeMorphism, Variance, WordMap,
};
pub use types::{
    atom_leq, contracts, parse_compound, parse_type, simple_leq, Atom, AtomTable, BracedType, CompoundType, CoreError,
    ParseError, ParsedType, SimpleType,
};
