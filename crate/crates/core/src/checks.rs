//! Self-check suites: algebraic identities, DP against brute force, and
//! numeric naturality of the bundled translation squares.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::data::{self, DataError};
use crate::reduction::{enumerate_reductions, oracle_reduce, reduce, TargetType};
use crate::semantics::{check_naturality, AlphaSpec, Lcg64, NaturalityReport, SemanticsError, TensorFixture};
use crate::translate::{check_functor_laws, FunctorSpec, SimpleTypeMap, TypeMorphism, Variance};
use crate::types::{contracts, parse_compound, AtomTable, CompoundType, SimpleType};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: Vec<CaseResult>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            cases: Vec::new(),
        }
    }

    fn record(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.cases.push(CaseResult {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }
}

/// Random simple type over `table`: exponent in -2..=2, β on one draw in eight.
pub fn random_simple(rng: &mut Lcg64, table: &AtomTable) -> SimpleType {
    let atoms = table.atoms();
    let atom = atoms[(rng.next_u64() >> 33) as usize % atoms.len()].clone();
    let exponent = ((rng.next_u64() >> 33) % 5) as i32 - 2;
    let beta = (rng.next_u64() >> 33).is_multiple_of(8);
    SimpleType::new(atom, exponent, beta)
}

pub fn random_type(rng: &mut Lcg64, table: &AtomTable, max_len: usize) -> CompoundType {
    let len = (rng.next_u64() >> 33) as usize % (max_len + 1);
    (0..len).map(|_| random_simple(rng, table)).collect()
}

/// Adjoint identities on random types, plus the functor laws of the
/// bundled homomorphism and anti-homomorphism and the detection of a map
/// that breaks them.
pub fn law_suite(samples: usize, seed: u64) -> Result<SuiteReport, DataError> {
    let ja = data::lexicon("ja")?;
    let en = data::lexicon("en")?;
    let table = ja.table();
    let mut rng = Lcg64::new(seed);
    let mut report = SuiteReport::new("laws");

    let mut failures: Vec<String> = Vec::new();
    let mut note = |law: &str, x: &CompoundType| {
        if failures.len() < 5 {
            failures.push(format!("{law} on [{x}]"));
        }
    };
    let mut counts = [0usize; 4];
    for _ in 0..samples {
        let x = random_type(&mut rng, table, 6);
        let y = random_type(&mut rng, table, 6);
        if x.left_adjoint().right_adjoint() != x || x.right_adjoint().left_adjoint() != x {
            note("involution", &x);
            counts[0] += 1;
        }
        if x.concat(&y).left_adjoint() != y.left_adjoint().concat(&x.left_adjoint())
            || x.concat(&y).right_adjoint() != y.right_adjoint().concat(&x.right_adjoint())
        {
            note("anti-distribution", &x);
            counts[1] += 1;
        }
        if x.concat(&CompoundType::unit()) != x || CompoundType::unit().concat(&x) != x {
            note("unit", &x);
            counts[2] += 1;
        }
        let p = random_simple(&mut rng, table).with_exponent(0).with_beta(false);
        if !contracts(&p, &p.right_adjoint(), table) || !contracts(&p.left_adjoint(), &p, table) {
            note("adjoint contraction", &CompoundType::new(vec![p]));
            counts[3] += 1;
        }
    }
    let unit_adjoints = CompoundType::unit().left_adjoint().is_empty() && CompoundType::unit().right_adjoint().is_empty();
    for (i, law) in ["involution", "anti-distribution", "unit", "adjoint contraction"].iter().enumerate() {
        report.record(
            *law,
            counts[i] == 0,
            format!("{} of {samples} samples failed {}", counts[i], failures.join("; ")).trim_end().to_string(),
        );
    }
    report.record("unit adjoints", unit_adjoints, "adjoints of the empty type");

    let functor_samples: Vec<CompoundType> = (0..40).map(|_| random_type(&mut rng, table, 4)).collect();
    for name in ["jp-en-hom", "jp-en-anti"] {
        let f = data::functor(name, &ja, &en)?;
        let laws = check_functor_laws(&f, &functor_samples);
        report.record(
            format!("functor laws: {name}"),
            laws.is_lawful(),
            format!("{} checks, {} violations", laws.checked, laws.violations.len()),
        );
    }

    let broken = order_preserving_swap();
    let laws = check_functor_laws(&broken.0, &broken.1);
    report.record(
        "order-preserving map on a reversing pair is rejected",
        !laws.is_lawful(),
        laws.violations
            .first()
            .map_or_else(|| "no violation found".to_string(), ToString::to_string),
    );
    Ok(report)
}

/// A covariant map that sends `n^l` to the right adjoint of its image,
/// which is what a word-order-reversing pair of languages asks of it.
pub fn order_preserving_swap() -> (SimpleTypeMap, Vec<CompoundType>) {
    let j = AtomTable::new(["n", "s"], Vec::<(&str, &str)>::new()).expect("valid table");
    let r = AtomTable::new(["nR", "sR"], Vec::<(&str, &str)>::new()).expect("valid table");
    let simple = |s: &str| parse_compound(s, &j).expect("valid type").parts()[0].clone();
    let image = |s: &str| parse_compound(s, &r).expect("valid type");
    let lookup = [
        ("n", "nR"),
        ("n^l", "nR^r"),
        ("n^r", "nR^l"),
        ("s", "sR"),
        ("s^l", "sR^l"),
        ("s^r", "sR^r"),
    ]
    .iter()
    .map(|(a, b)| (simple(a), image(b)))
    .collect();
    let samples = ["n n^l", "n"].iter().map(|s| parse_compound(s, &j).expect("valid type")).collect();
    (SimpleTypeMap::new(Variance::Covariant, lookup), samples)
}

/// Four atoms with `a <= b`.
pub fn oracle_table() -> AtomTable {
    AtomTable::new(["a", "b", "c", "d"], [("a", "b")]).expect("valid table")
}

fn random_oracle_string(rng: &mut Lcg64, table: &AtomTable, max_len: usize) -> CompoundType {
    let len = (rng.next_u64() >> 33) as usize % (max_len + 1);
    (0..len)
        .map(|_| {
            let atom = table.atoms()[(rng.next_u64() >> 33) as usize % 4].clone();
            // mostly -1..=1 so that contractions are common
            let exponent = match (rng.next_u64() >> 33) % 10 {
                0 => -2,
                1 => 2,
                k => (k % 3) as i32 - 1,
            };
            let beta = (rng.next_u64() >> 33).is_multiple_of(16);
            SimpleType::new(atom, exponent, beta)
        })
        .collect()
}

/// Compares the chart enumeration with brute-force search on random
/// strings, against the unit and a random single-atom target, and checks
/// every emitted witness is planar and contractible.
pub fn oracle_suite(strings: usize, max_len: usize, seed: u64) -> SuiteReport {
    let table = oracle_table();
    let mut rng = Lcg64::new(seed);
    let mut report = SuiteReport::new("oracle");
    let mut mismatches = Vec::new();
    let mut invalid = Vec::new();
    let mut compared = 0;
    let mut reducible = 0;
    let max_len = max_len.min(crate::reduction::ORACLE_MAX_LEN);
    for _ in 0..strings {
        let input = random_oracle_string(&mut rng, &table, max_len);
        let atom = table.atoms()[(rng.next_u64() >> 33) as usize % 4].clone();
        for target in [TargetType::unit(), TargetType::single(SimpleType::plain(atom))] {
            compared += 1;
            let fast = enumerate_reductions(&input, &target, &table, usize::MAX).expect("valid input");
            let slow = oracle_reduce(&input, &target, &table).expect("valid input");
            if !fast.is_empty() {
                reducible += 1;
            }
            let a: BTreeSet<_> = fast.iter().map(|w| w.link_set()).collect();
            let b: BTreeSet<_> = slow.iter().map(|w| w.link_set()).collect();
            if a != b || a.len() != fast.len() {
                mismatches.push(format!("[{input}] -> {target}: chart {} vs brute force {}", a.len(), b.len()));
            }
            for w in &fast {
                if let Err(e) = w.validate_against(&input, &table) {
                    invalid.push(format!("[{input}]: {e}"));
                }
            }
        }
    }
    report.record(
        "chart equals brute force",
        mismatches.is_empty(),
        format!(
            "{compared} comparisons over {strings} strings of length <= {max_len}, {reducible} reducible, {} mismatches{}",
            mismatches.len(),
            mismatches.first().map(|m| format!("; first: {m}")).unwrap_or_default()
        ),
    );
    report.record(
        "witnesses planar and contractible",
        invalid.is_empty(),
        format!("{} invalid{}", invalid.len(), invalid.first().map(|m| format!("; first: {m}")).unwrap_or_default()),
    );
    report
}

/// A source phrase with tensors, a functor, and both reductions.
pub struct NaturalitySquare {
    pub name: &'static str,
    pub functor: FunctorSpec,
    pub fixture: TensorFixture,
    pub source_table: AtomTable,
    pub words: Vec<(String, CompoundType)>,
    pub target: TargetType,
}

impl NaturalitySquare {
    pub fn check(&self, alpha: &AlphaSpec, tolerance: f64) -> Result<NaturalityReport, SemanticsError> {
        let tensors = self.fixture.sentence_tensors(&self.words)?;
        let flat: CompoundType = self.words.iter().flat_map(|(_, t)| t.iter().cloned()).collect();
        let no_reduction = |what: &str| SemanticsError::Structure(format!("{what} side of {} does not reduce", self.name));
        let src_witness = reduce(&flat, &self.target, &self.source_table)
            .map_err(|e| SemanticsError::Translate(e.to_string()))?
            .ok_or_else(|| no_reduction("source"))?;
        let image = self.functor.map_type(&flat).map_err(|e| SemanticsError::Translate(e.to_string()))?;
        let target = self
            .functor
            .map_target(&self.target)
            .map_err(|e| SemanticsError::Translate(e.to_string()))?;
        let tgt_witness = reduce(&image, &target, self.functor.target_table())
            .map_err(|e| SemanticsError::Translate(e.to_string()))?
            .ok_or_else(|| no_reduction("target"))?;
        check_naturality(
            alpha,
            &self.fixture.spaces,
            &src_witness,
            &tensors,
            &self.functor,
            &tgt_witness,
            tolerance,
        )
    }

    pub fn random_alpha(&self, seed: u64) -> AlphaSpec {
        AlphaSpec::random(&self.fixture.spaces, &self.source_table, seed)
    }
}

/// The adjective-noun square (homomorphism) and the five-word locative
/// square (anti-homomorphism).
pub fn shipped_squares() -> Result<Vec<NaturalitySquare>, DataError> {
    let ja = data::lexicon("ja")?;
    let en = data::lexicon("en")?;
    let t = |s: &str| parse_compound(s, ja.table()).expect("bundled type");
    let word = |w: &str, s: &str| (w.to_string(), t(s));
    Ok(vec![
        NaturalitySquare {
            name: "adjective-noun",
            functor: data::functor("jp-en-hom", &ja, &en)?,
            fixture: data::tensors("adj-noun", ja.table())?,
            source_table: ja.table().clone(),
            words: vec![word("akai", "n n^l"), word("neko", "n")],
            target: TargetType::new(t("n")),
        },
        NaturalitySquare {
            name: "five-word locative",
            functor: data::functor("jp-en-anti", &ja, &en)?,
            fixture: data::tensors("mori", ja.table())?,
            source_table: ja.table().clone(),
            words: vec![
                word("mori", "n"),
                word("ni", "n^r o5"),
                word("neko", "n"),
                word("ga", "n^r o1"),
                word("iru", "o1^r o5^r s"),
            ],
            target: TargetType::new(t("s")),
        },
    ])
}

/// Both squares under the identity and under `seeds` random invertible
/// components.
pub fn naturality_suite(seeds: u64, tolerance: f64) -> Result<SuiteReport, DataError> {
    let mut report = SuiteReport::new("naturality");
    for square in shipped_squares()? {
        match square.check(&AlphaSpec::identity(&square.fixture.spaces), 0.0) {
            Ok(r) => report.record(
                format!("{}: identity components", square.name),
                r.passed,
                format!("residual {:e}", r.residual),
            ),
            Err(e) => report.record(format!("{}: identity components", square.name), false, e.to_string()),
        }
        let mut worst: f64 = 0.0;
        let mut error = None;
        for seed in 0..seeds {
            match square.check(&square.random_alpha(seed), tolerance) {
                Ok(r) => worst = worst.max(r.residual),
                Err(e) => {
                    error = Some(format!("seed {seed}: {e}"));
                    break;
                }
            }
        }
        let name = format!("{}: {seeds} random components", square.name);
        match error {
            Some(e) => report.record(name, false, e),
            None => report.record(
                name,
                worst <= tolerance,
                format!("max residual {worst:e}, tolerance {tolerance:e}"),
            ),
        }
    }
    Ok(report)
}
