use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use pregroup_core::checks::oracle_table;
use pregroup_core::semantics::Tensor;
use pregroup_core::translate::FunctorMode;
use pregroup_core::{
    contracts, enumerate_reductions, epsilon, eta, interpret, interpret_brute_force, interpret_ordered,
    oracle_reduce, parse_compound, AlphaSpec, Atom, AtomTable, CompoundType, FunctorSpec, Lcg64, SimpleType,
    SpaceAssignment, TargetType, WordTensor,
};

fn table() -> AtomTable {
    oracle_table()
}

fn simple() -> impl Strategy<Value = SimpleType> {
    let atoms: Vec<Atom> = table().atoms().to_vec();
    (0..atoms.len(), -2i32..=2, prop::bool::weighted(0.1))
        .prop_map(move |(i, z, beta)| SimpleType::new(atoms[i].clone(), z, beta))
}

fn compound(max: usize) -> impl Strategy<Value = CompoundType> {
    prop::collection::vec(simple(), 0..=max).prop_map(CompoundType::new)
}

/// Mostly exponents -1..=1 so that reductions are frequent.
fn reducible_ish(max: usize) -> impl Strategy<Value = CompoundType> {
    let atoms: Vec<Atom> = table().atoms().to_vec();
    prop::collection::vec((0..atoms.len(), -1i32..=1), 0..=max).prop_map(move |v| {
        v.into_iter()
            .map(|(i, z)| SimpleType::new(atoms[i].clone(), z, false))
            .collect()
    })
}

fn target() -> impl Strategy<Value = TargetType> {
    let atoms: Vec<Atom> = table().atoms().to_vec();
    prop_oneof![
        Just(TargetType::unit()),
        (0..atoms.len()).prop_map(move |i| TargetType::single(SimpleType::plain(atoms[i].clone()))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn adjoints_are_mutually_inverse(x in compound(8)) {
        prop_assert_eq!(x.left_adjoint().right_adjoint(), x.clone());
        prop_assert_eq!(x.right_adjoint().left_adjoint(), x);
    }

    #[test]
    fn adjoints_reverse_concatenation(a in compound(6), b in compound(6)) {
        prop_assert_eq!(a.concat(&b).left_adjoint(), b.left_adjoint().concat(&a.left_adjoint()));
        prop_assert_eq!(a.concat(&b).right_adjoint(), b.right_adjoint().concat(&a.right_adjoint()));
    }

    #[test]
    fn adjoint_power_composes(x in compound(5), i in -3i32..=3, j in -3i32..=3) {
        prop_assert_eq!(x.adjoint_power(i).adjoint_power(j), x.adjoint_power(i + j));
    }

    #[test]
    fn plain_types_contract_with_their_adjoints(p in simple()) {
        let p = p.with_exponent(0).with_beta(false);
        let t = table();
        prop_assert!(contracts(&p, &p.right_adjoint(), &t));
        prop_assert!(contracts(&p.left_adjoint(), &p, &t));
    }

    #[test]
    fn rendering_parses_back(x in compound(8)) {
        let text = x.to_string();
        prop_assert_eq!(parse_compound(&text, &table()).unwrap(), x);
    }

    #[test]
    fn chart_matches_brute_force(x in reducible_ish(8), goal in target()) {
        let t = table();
        let fast = enumerate_reductions(&x, &goal, &t, usize::MAX).unwrap();
        let slow = oracle_reduce(&x, &goal, &t).unwrap();
        let a: BTreeSet<_> = fast.iter().map(|w| w.link_set()).collect();
        let b: BTreeSet<_> = slow.iter().map(|w| w.link_set()).collect();
        prop_assert_eq!(a.len(), fast.len());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn witnesses_are_planar_and_sorted(x in reducible_ish(14), goal in target()) {
        let t = table();
        let ws = enumerate_reductions(&x, &goal, &t, 64).unwrap();
        for w in &ws {
            prop_assert!(w.validate_against(&x, &t).is_ok());
            prop_assert_eq!(w.residue().len(), goal.parts().len());
        }
        let mut sorted = ws.clone();
        sorted.sort();
        prop_assert_eq!(&sorted, &ws);
        prop_assert_eq!(enumerate_reductions(&x, &goal, &t, 64).unwrap(), ws);
    }

    #[test]
    fn antihomomorphism_keeps_contractions(x in compound(4)) {
        let src = table();
        let tgt = AtomTable::new(["A", "B", "C", "D"], [("A", "B")]).unwrap();
        let map: BTreeMap<Atom, CompoundType> = ["a", "b", "c", "d"]
            .iter()
            .zip(["A", "B", "C", "D"])
            .map(|(s, t)| (src.get(s).unwrap().clone(), parse_compound(t, &tgt).unwrap()))
            .collect();
        let f = FunctorSpec::new(&src, &tgt, FunctorMode::Antihomomorphism, map, Vec::new()).unwrap();
        let x = CompoundType::new(x.into_parts().into_iter().map(|p| p.with_beta(false)).collect());
        for contraction in [x.left_adjoint().concat(&x), x.concat(&x.right_adjoint())] {
            let image = f.apply_antihomomorphism(&contraction).unwrap();
            prop_assert!(enumerate_reductions(&image, &TargetType::unit(), &tgt, 1).unwrap().len() == 1);
        }
    }

    #[test]
    fn snake_identities(dim in 1usize..=5, seed in any::<u64>()) {
        let v = Lcg64::new(seed).tensor(vec![dim]);
        prop_assert!(v.tensordot(0, &eta(dim), 0).unwrap().max_abs_diff(&v) <= 1e-12);
        prop_assert!(eta(dim).tensordot(1, &v, 0).unwrap().max_abs_diff(&v) <= 1e-12);
    }

    #[test]
    fn pairing_survives_invertible_components(dim in 1usize..=5, seed in any::<u64>()) {
        let t = AtomTable::new(["n"], Vec::<(&str, &str)>::new()).unwrap();
        let n = t.get("n").unwrap().clone();
        let spaces = SpaceAssignment::new([(n, dim)].into_iter().collect(), &t).unwrap();
        let alpha = AlphaSpec::random(&spaces, &t, seed);
        let mut rng = Lcg64::new(seed ^ 0xabcdef);
        let (u, v) = (rng.tensor(vec![dim]), rng.tensor(vec![dim]));
        let u2 = alpha.transform(&u, &parse_compound("n", &t).unwrap(), false).unwrap();
        let v2 = alpha.transform(&v, &parse_compound("n^r", &t).unwrap(), false).unwrap();
        let before = epsilon(dim).pair(u.data(), v.data()).unwrap();
        let after = epsilon(dim).pair(u2.data(), v2.data()).unwrap();
        prop_assert!((before - after).abs() <= 1e-9 * (1.0 + before.abs()));
    }
}

fn spaces() -> SpaceAssignment {
    let t = table();
    let dims = [("a", 2), ("b", 2), ("c", 3), ("d", 1)]
        .iter()
        .map(|(a, d)| (t.get(a).unwrap().clone(), *d))
        .collect();
    SpaceAssignment::new(dims, &t).unwrap()
}

/// Splits `x` into consecutive words of one to three types with seeded data.
fn word_tensors(x: &CompoundType, cuts: &[usize], seed: u64) -> Vec<WordTensor> {
    let sp = spaces();
    let mut rng = Lcg64::new(seed);
    let mut out = Vec::new();
    let mut start = 0;
    let mut k = 0;
    while start < x.len() {
        let len = (cuts[k % cuts.len()] % 3 + 1).min(x.len() - start);
        let ty: CompoundType = x.parts()[start..start + len].iter().cloned().collect();
        let data: Tensor = rng.tensor(sp.shape_of(&ty).unwrap());
        out.push(WordTensor::new(format!("w{k}"), ty, data, &sp).unwrap());
        start += len;
        k += 1;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn interpretation_ignores_link_order(
        x in reducible_ish(10),
        goal in target(),
        cuts in prop::collection::vec(0usize..3, 1..6),
        seed in any::<u64>(),
        shuffle in any::<u64>(),
    ) {
        let t = table();
        let x = CompoundType::new(x.into_parts());
        let ws = enumerate_reductions(&x, &goal, &t, 4).unwrap();
        let words = word_tensors(&x, &cuts, seed);
        for w in ws {
            let base = interpret(&w, &words, &spaces()).unwrap();
            let mut order: Vec<usize> = (0..w.links().len()).collect();
            let mut rng = Lcg64::new(shuffle);
            for i in (1..order.len()).rev() {
                order.swap(i, (rng.next_u64() % (i as u64 + 1)) as usize);
            }
            let shuffled = interpret_ordered(&w, &words, &spaces(), &order).unwrap();
            prop_assert!(base.max_abs_diff(&shuffled) <= 1e-12);
            let brute = interpret_brute_force(&w, &words, &spaces()).unwrap();
            prop_assert!(base.max_abs_diff(&brute) <= 1e-12);
        }
    }
}
