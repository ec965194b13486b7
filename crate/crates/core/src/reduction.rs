//! Contraction-only reduction search.
//!
//! In a free pregroup every derivation can be reordered so that all
//! contractions come first, so deciding `input <= target` only needs
//! planar, well-nested sets of contraction links. A span table records
//! which intervals reduce to the unit; witnesses are rebuilt from it by
//! always linking the leftmost position of a span, which makes each link
//! set appear exactly once.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{contracts, simple_leq, AtomTable, CompoundType, CoreError, SimpleType};

/// Default cap on the number of witnesses returned by enumeration.
pub const DEFAULT_LIMIT: usize = 1024;

/// Longest input accepted by [`oracle_reduce`].
pub const ORACLE_MAX_LEN: usize = 12;

/// A contraction between positions `left < right` of the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Link {
    pub left: usize,
    pub right: usize,
}

impl Link {
    pub fn new(left: usize, right: usize) -> Self {
        Link { left, right }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.left, self.right)
    }
}

/// Proof that an input reduces to a target: the contraction links and the
/// positions left over, in order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReductionWitness {
    links: Vec<Link>,
    residue: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("link {0} is not ordered left < right")]
    Unordered(Link),
    #[error("links {0} and {1} cross")]
    Crossing(Link, Link),
    #[error("position {0} is covered more than once")]
    Overlap(usize),
    #[error("position {0} is neither linked nor residue")]
    Uncovered(usize),
    #[error("position {0} is out of range for an input of length {1}")]
    OutOfRange(usize, usize),
    #[error("residue position {residue} sits inside link {link}")]
    ResidueInsideLink { residue: usize, link: Link },
    #[error("link {0} does not join contractible types")]
    NotContractible(Link),
}

impl ReductionWitness {
    /// Builds a witness with links sorted; residue is every unlinked
    /// position below `len`.
    pub fn from_links(mut links: Vec<Link>, len: usize) -> Self {
        links.sort();
        let linked: HashSet<usize> = links.iter().flat_map(|l| [l.left, l.right]).collect();
        let residue = (0..len).filter(|i| !linked.contains(i)).collect();
        ReductionWitness { links, residue }
    }

    pub fn empty() -> Self {
        ReductionWitness {
            links: Vec::new(),
            residue: Vec::new(),
        }
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn residue(&self) -> &[usize] {
        &self.residue
    }

    /// Number of input positions the witness covers.
    pub fn len(&self) -> usize {
        self.links.len() * 2 + self.residue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn link_set(&self) -> BTreeSet<(usize, usize)> {
        self.links.iter().map(|l| (l.left, l.right)).collect()
    }

    /// Checks the structural invariants: ordered links, planarity,
    /// partition of `0..len`, and no residue under a link.
    pub fn validate(&self, len: usize) -> Result<(), WitnessError> {
        let mut seen = vec![false; len];
        let mut mark = |i: usize| -> Result<(), WitnessError> {
            match seen.get_mut(i) {
                None => Err(WitnessError::OutOfRange(i, len)),
                Some(true) => Err(WitnessError::Overlap(i)),
                Some(slot) => {
                    *slot = true;
                    Ok(())
                }
            }
        };
        for link in &self.links {
            if link.left >= link.right {
                return Err(WitnessError::Unordered(*link));
            }
            mark(link.left)?;
            mark(link.right)?;
        }
        for &r in &self.residue {
            mark(r)?;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(WitnessError::Uncovered(i));
        }
        for (a, x) in self.links.iter().enumerate() {
            for y in &self.links[a + 1..] {
                let (p, q) = if x.left < y.left { (x, y) } else { (y, x) };
                if p.left < q.left && q.left < p.right && p.right < q.right {
                    return Err(WitnessError::Crossing(*p, *q));
                }
            }
            if let Some(&r) = self.residue.iter().find(|&&r| x.left < r && r < x.right) {
                return Err(WitnessError::ResidueInsideLink { residue: r, link: *x });
            }
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus a contraction check on each link.
    pub fn validate_against(&self, input: &CompoundType, table: &AtomTable) -> Result<(), WitnessError> {
        self.validate(input.len())?;
        let parts = input.parts();
        match self
            .links
            .iter()
            .find(|l| !contracts(&parts[l.left], &parts[l.right], table))
        {
            Some(l) => Err(WitnessError::NotContractible(*l)),
            None => Ok(()),
        }
    }

    /// The residual simple types, in order.
    pub fn residue_type(&self, input: &CompoundType) -> CompoundType {
        self.residue
            .iter()
            .map(|&i| input.parts()[i].clone())
            .collect()
    }
}

impl fmt::Display for ReductionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("links {")?;
        for (i, l) in self.links.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("} residue [")?;
        for (i, r) in self.residue.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

/// The goal of a reduction; the empty type is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TargetType(CompoundType);

impl TargetType {
    pub fn new(parts: CompoundType) -> Self {
        TargetType(parts)
    }

    pub fn unit() -> Self {
        TargetType(CompoundType::unit())
    }

    pub fn single(simple: SimpleType) -> Self {
        TargetType(CompoundType::new(vec![simple]))
    }

    pub fn parts(&self) -> &[SimpleType] {
        self.0.parts()
    }

    pub fn as_type(&self) -> &CompoundType {
        &self.0
    }
}

impl fmt::Display for TargetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("1")
        } else {
            self.0.fmt(f)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("enumeration limit must be at least 1")]
    ZeroLimit,
    #[error("oracle input has length {0}, above the limit of {ORACLE_MAX_LEN}")]
    OracleTooLong(usize),
}

/// Span table over one input/target pair.
struct Chart {
    n: usize,
    /// `link_ok[i][j]`: position `i` may contract with position `j`.
    link_ok: Vec<Vec<bool>>,
    /// `unit[i][j]`: the half-open span `i..j` reduces to the unit.
    unit: Vec<Vec<bool>>,
    /// `fits[t][i]`: position `i` may stand for target part `t`.
    fits: Vec<Vec<bool>>,
    /// `reach[t][i]`: positions `i..` can realise target parts `t..`.
    reach: Vec<Vec<bool>>,
    cap: usize,
    memo: HashMap<(usize, usize), Rc<Vec<Vec<Link>>>>,
}

impl Chart {
    fn build(
        input: &CompoundType,
        target: &TargetType,
        table: &AtomTable,
        cap: usize,
    ) -> Result<Self, ReduceError> {
        table.check_type(input)?;
        table.check_type(target.as_type())?;
        let parts = input.parts();
        let n = parts.len();
        let link_ok: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| i < j && contracts(&parts[i], &parts[j], table)).collect())
            .collect();
        let mut unit = vec![vec![false; n + 1]; n + 1];
        for (i, row) in unit.iter_mut().enumerate() {
            row[i] = true;
        }
        for len in (2..=n).step_by(2) {
            for i in 0..=(n - len) {
                let j = i + len;
                unit[i][j] = ((i + 1)..j)
                    .step_by(2)
                    .any(|k| link_ok[i][k] && unit[i + 1][k] && unit[k + 1][j]);
            }
        }
        let fits = target
            .parts()
            .iter()
            .map(|goal| {
                parts
                    .iter()
                    .map(|p| simple_leq(p, goal, table))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let m = fits.len();
        let mut reach = vec![vec![false; n + 1]; m + 1];
        for i in 0..=n {
            reach[m][i] = unit[i][n];
        }
        for t in (0..m).rev() {
            for i in 0..=n {
                reach[t][i] = (i..n).any(|r| unit[i][r] && fits[t][r] && reach[t + 1][r + 1]);
            }
        }
        Ok(Chart {
            n,
            link_ok,
            unit,
            fits,
            reach,
            cap,
            memo: HashMap::new(),
        })
    }

    /// All link sets reducing `i..j` to the unit, at most `cap` of them.
    fn unit_witnesses(&mut self, i: usize, j: usize) -> Rc<Vec<Vec<Link>>> {
        if let Some(hit) = self.memo.get(&(i, j)) {
            return Rc::clone(hit);
        }
        let mut out = Vec::new();
        if i == j {
            out.push(Vec::new());
        } else if self.unit[i][j] {
            'partners: for k in ((i + 1)..j).step_by(2) {
                if !(self.link_ok[i][k] && self.unit[i + 1][k] && self.unit[k + 1][j]) {
                    continue;
                }
                let inner = self.unit_witnesses(i + 1, k);
                let outer = self.unit_witnesses(k + 1, j);
                for a in inner.iter() {
                    for b in outer.iter() {
                        let mut links = Vec::with_capacity(1 + a.len() + b.len());
                        links.push(Link::new(i, k));
                        links.extend_from_slice(a);
                        links.extend_from_slice(b);
                        out.push(links);
                        if out.len() >= self.cap {
                            break 'partners;
                        }
                    }
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert((i, j), Rc::clone(&out));
        out
    }

    fn feasible(&self, pos: usize, goal: usize) -> bool {
        self.reach[goal][pos]
    }

    fn collect(
        &mut self,
        pos: usize,
        goal: usize,
        links: &mut Vec<Link>,
        residue: &mut Vec<usize>,
        out: &mut Vec<ReductionWitness>,
    ) {
        if out.len() >= self.cap {
            return;
        }
        if goal == self.fits.len() {
            if !self.unit[pos][self.n] {
                return;
            }
            for tail in self.unit_witnesses(pos, self.n).iter() {
                let mut all = links.clone();
                all.extend_from_slice(tail);
                all.sort();
                out.push(ReductionWitness {
                    links: all,
                    residue: residue.clone(),
                });
                if out.len() >= self.cap {
                    return;
                }
            }
            return;
        }
        for r in pos..self.n {
            if !(self.unit[pos][r] && self.fits[goal][r] && self.feasible(r + 1, goal + 1)) {
                continue;
            }
            let gaps = self.unit_witnesses(pos, r);
            for gap in gaps.iter() {
                let mark = links.len();
                links.extend_from_slice(gap);
                residue.push(r);
                self.collect(r + 1, goal + 1, links, residue, out);
                residue.pop();
                links.truncate(mark);
                if out.len() >= self.cap {
                    return;
                }
            }
        }
    }
}

/// Finds one witness that `input` reduces to `target`, or `None` when
/// no contraction-only reduction exists.
///
/// The residue must have the target's length and be pointwise below it.
pub fn reduce(
    input: &CompoundType,
    target: &TargetType,
    table: &AtomTable,
) -> Result<Option<ReductionWitness>, ReduceError> {
    Ok(enumerate_reductions(input, target, table, 1)?.into_iter().next())
}

/// Whether `input` reduces to `target`, without building a witness.
pub fn is_reducible(input: &CompoundType, target: &TargetType, table: &AtomTable) -> Result<bool, ReduceError> {
    let chart = Chart::build(input, target, table, 1)?;
    Ok(chart.feasible(0, 0))
}

/// Every distinct witness, up to `limit`, sorted by link list.
///
/// When more than `limit` witnesses exist, the first `limit` found in
/// search order are returned (sorted).
pub fn enumerate_reductions(
    input: &CompoundType,
    target: &TargetType,
    table: &AtomTable,
    limit: usize,
) -> Result<Vec<ReductionWitness>, ReduceError> {
    if limit == 0 {
        return Err(ReduceError::ZeroLimit);
    }
    let mut chart = Chart::build(input, target, table, limit)?;
    let mut out = Vec::new();
    if chart.feasible(0, 0) {
        chart.collect(0, 0, &mut Vec::new(), &mut Vec::new(), &mut out);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Brute-force reference: applies single adjacent contractions in every
/// order and keeps each distinct link set whose remaining types match the
/// target. Exponential; limited to [`ORACLE_MAX_LEN`] positions.
pub fn oracle_reduce(
    input: &CompoundType,
    target: &TargetType,
    table: &AtomTable,
) -> Result<Vec<ReductionWitness>, ReduceError> {
    let n = input.len();
    if n > ORACLE_MAX_LEN {
        return Err(ReduceError::OracleTooLong(n));
    }
    table.check_type(input)?;
    table.check_type(target.as_type())?;
    let parts = input.parts();
    let goal = target.parts();

    let matches_target = |remaining: &[usize]| -> Result<bool, ReduceError> {
        if remaining.len() != goal.len() {
            return Ok(false);
        }
        for (&i, g) in remaining.iter().zip(goal) {
            if !simple_leq(&parts[i], g, table)? {
                return Ok(false);
            }
        }
        Ok(true)
    };

    let mut found = BTreeSet::new();
    let mut visited = HashSet::new();
    let mut stack: Vec<(Vec<usize>, Vec<Link>)> = vec![((0..n).collect(), Vec::new())];
    while let Some((remaining, links)) = stack.pop() {
        let mut key = links.clone();
        key.sort();
        if !visited.insert(key.clone()) {
            continue;
        }
        if matches_target(&remaining)? {
            found.insert(ReductionWitness {
                links: key,
                residue: remaining.clone(),
            });
        }
        for w in remaining.windows(2) {
            let (a, b) = (w[0], w[1]);
            if contracts(&parts[a], &parts[b], table) {
                let next: Vec<usize> = remaining.iter().copied().filter(|&i| i != a && i != b).collect();
                let mut next_links = links.clone();
                next_links.push(Link::new(a, b));
                stack.push((next, next_links));
            }
        }
    }
    Ok(found.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{parse_compound, AtomTable};

    fn ja() -> AtomTable {
        AtomTable::new(
            [
                "pi", "n", "s1", "s2", "sbar", "s", "o1", "o2", "o3", "o4", "o5", "o6", "o7", "t",
            ],
            [("s1", "s"), ("s2", "s"), ("sbar", "s"), ("n", "pi")],
        )
        .unwrap()
    }

    fn target(text: &str, table: &AtomTable) -> TargetType {
        TargetType::new(parse_compound(text, table).unwrap())
    }

    fn links(pairs: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn pigeons_eat_bread() {
        let t = ja();
        let input = parse_compound("n n^r s n^l n", &t).unwrap();
        let w = reduce(&input, &target("s", &t), &t).unwrap().unwrap();
        assert_eq!(w.link_set(), links(&[(0, 1), (3, 4)]));
        assert_eq!(w.residue(), &[2]);
    }

    #[test]
    fn neko_uses_induced_order() {
        let t = ja();
        let input = parse_compound("n pi^r o1 n n^r o2 o2^r o1^r s1", &t).unwrap();
        let w = reduce(&input, &target("s", &t), &t).unwrap().unwrap();
        assert_eq!(w.link_set(), links(&[(0, 1), (3, 4), (5, 6), (2, 7)]));
        assert_eq!(w.residue(), &[8]);
    }

    #[test]
    fn bare_noun_is_not_a_sentence() {
        let t = ja();
        let input = parse_compound("n", &t).unwrap();
        assert_eq!(reduce(&input, &target("s", &t), &t).unwrap(), None);
        assert!(!is_reducible(&input, &target("s", &t), &t).unwrap());
    }

    #[test]
    fn ambiguity_and_beta_blocking() {
        let t = ja();
        let plain = parse_compound("n n^l n n^r n n^l n", &t).unwrap();
        let all = enumerate_reductions(&plain, &target("n", &t), &t, DEFAULT_LIMIT).unwrap();
        assert_eq!(all.len(), 2);

        let decorated = parse_compound("n b(n)^l b(n) n^r n n^l n", &t).unwrap();
        let one = enumerate_reductions(&decorated, &target("n", &t), &t, DEFAULT_LIMIT).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one[0].links().contains(&Link::new(1, 2)));
    }

    #[test]
    fn unit_target() {
        let t = ja();
        let input = parse_compound("n n^r", &t).unwrap();
        let all = enumerate_reductions(&input, &TargetType::unit(), &t, 10).unwrap();
        assert_eq!(all, vec![ReductionWitness::from_links(vec![Link::new(0, 1)], 2)]);
        let empty = enumerate_reductions(&CompoundType::unit(), &TargetType::unit(), &t, 10).unwrap();
        assert_eq!(empty, vec![ReductionWitness::empty()]);
    }

    #[test]
    fn limit_caps_output() {
        let t = ja();
        // n (n^r n)^k has a Catalan-many family of reductions to n
        let input = parse_compound("n n^l n n^l n n^l n n^r n n^r n n^r n", &t).unwrap();
        let all = enumerate_reductions(&input, &target("n", &t), &t, DEFAULT_LIMIT).unwrap();
        assert!(all.len() > 3);
        let capped = enumerate_reductions(&input, &target("n", &t), &t, 3).unwrap();
        assert_eq!(capped.len(), 3);
        assert!(matches!(
            enumerate_reductions(&input, &target("n", &t), &t, 0),
            Err(ReduceError::ZeroLimit)
        ));
    }

    #[test]
    fn unknown_atoms_are_reported() {
        let t = ja();
        let other = AtomTable::new(["q"], Vec::<(&str, &str)>::new()).unwrap();
        let input = parse_compound("q", &other).unwrap();
        assert_eq!(
            reduce(&input, &TargetType::unit(), &t),
            Err(ReduceError::Core(CoreError::UnknownAtom("q".into())))
        );
    }

    #[test]
    fn oracle_agrees_on_examples() {
        let t = ja();
        for (text, goal) in [
            ("n n^r s n^l n", "s"),
            ("n n^l n n^r n n^l n", "n"),
            ("n b(n)^l b(n) n^r n n^l n", "n"),
            ("n pi^r o1 n n^r o2 o2^r o1^r s1", "s"),
        ] {
            let input = parse_compound(text, &t).unwrap();
            let goal = target(goal, &t);
            assert_eq!(
                oracle_reduce(&input, &goal, &t).unwrap(),
                enumerate_reductions(&input, &goal, &t, DEFAULT_LIMIT).unwrap(),
                "{text}"
            );
        }
        assert_eq!(
            oracle_reduce(&CompoundType::unit(), &TargetType::unit(), &t).unwrap(),
            vec![ReductionWitness::empty()]
        );
        let long = parse_compound("n n n n n n n n n n n n n", &t).unwrap();
        assert_eq!(
            oracle_reduce(&long, &TargetType::unit(), &t),
            Err(ReduceError::OracleTooLong(13))
        );
    }

    #[test]
    fn witness_validation() {
        let crossing = ReductionWitness::from_links(vec![Link::new(0, 2), Link::new(1, 3)], 4);
        assert!(matches!(crossing.validate(4), Err(WitnessError::Crossing(..))));
        let inside = ReductionWitness::from_links(vec![Link::new(0, 2)], 3);
        assert!(matches!(
            inside.validate(3),
            Err(WitnessError::ResidueInsideLink { residue: 1, .. })
        ));
        let ok = ReductionWitness::from_links(vec![Link::new(0, 3), Link::new(1, 2)], 5);
        assert_eq!(ok.validate(5), Ok(()));
        assert!(matches!(ok.validate(4), Err(WitnessError::OutOfRange(4, 4))));

        let t = ja();
        let input = parse_compound("n s n^r n", &t).unwrap();
        let bad = ReductionWitness::from_links(vec![Link::new(0, 3)], 4);
        assert!(bad.validate_against(&input, &t).is_err());
    }
}
