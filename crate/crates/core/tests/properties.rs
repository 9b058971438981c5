//! Property tests against brute-force oracles on small lengths.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use perfcodes::canonical::{certify_code, certify_collection, find_isometry, Flavor};
use perfcodes::collection::Collection;
use perfcodes::exactcover::{all_solutions, CoverInstance};
use perfcodes::gf3::{Code, Isometry, TernaryWord};
use perfcodes::linalg::{affine_rank, hamming_code, kernel};
use perfcodes::perfect::{is_1perfect, is_mds2, parity_code};
use perfcodes::permgroup::{closure, double_cosets, Perm};
use perfcodes::rank1::{decode_assignment, rank1_build, QuasigroupAssignment};
use perfcodes::min_distance;

fn trits(idx: u32, n: usize) -> Vec<u8> {
    (0..n).map(|i| (idx / 3u32.pow(i as u32) % 3) as u8).collect()
}

fn index(t: &[u8]) -> u32 {
    t.iter().rev().fold(0, |a, &x| a * 3 + x as u32)
}

fn dist(a: u32, b: u32, n: usize) -> usize {
    trits(a, n).iter().zip(trits(b, n)).filter(|(x, y)| **x != *y).count()
}

fn sub(a: u32, b: u32, n: usize) -> u32 {
    let (x, y) = (trits(a, n), trits(b, n));
    index(&x.iter().zip(&y).map(|(p, q)| (p + 3 - q) % 3).collect::<Vec<_>>())
}

fn add(a: u32, b: u32, n: usize) -> u32 {
    let (x, y) = (trits(a, n), trits(b, n));
    index(&x.iter().zip(&y).map(|(p, q)| (p + q) % 3).collect::<Vec<_>>())
}

/// Size of the linear span of `vs`, by closure under addition.
fn span_size(vs: &[u32], n: usize) -> usize {
    let mut set: HashSet<u32> = HashSet::from([0]);
    let mut frontier = vec![0u32];
    while let Some(x) = frontier.pop() {
        for &v in vs {
            let y = add(x, v, n);
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set.len()
}

fn log3(mut k: usize) -> usize {
    let mut d = 0;
    while k > 1 {
        assert_eq!(k % 3, 0);
        k /= 3;
        d += 1;
    }
    d
}

fn code_strategy(n: usize, max: usize) -> impl Strategy<Value = Code> {
    prop::collection::btree_set(0..3u32.pow(n as u32), 1..=max)
        .prop_map(move |s| Code::from_indices(n, s))
}

fn isometry_strategy(n: usize) -> impl Strategy<Value = Isometry> {
    any::<u64>().prop_map(move |s| Isometry::random(n, &mut ChaCha8Rng::seed_from_u64(s)))
}

fn perm_strategy(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n as u8).collect::<Vec<u8>>())
        .prop_shuffle()
        .prop_map(|v| Perm::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn isometry_acts_coordinatewise(g in isometry_strategy(5), x in 0..243u32) {
        let t = trits(x, 5);
        let mut y = vec![0u8; 5];
        for i in 0..5 {
            let p = g.perm()[i] as usize;
            y[p] = g.sym()[p][t[i] as usize];
        }
        prop_assert_eq!(g.apply_index(x), index(&y));
    }

    #[test]
    fn isometries_compose_and_invert(g in isometry_strategy(5), h in isometry_strategy(5), x in 0..243u32) {
        let gh = g.compose(&h).unwrap();
        prop_assert_eq!(gh.apply_index(x), g.apply_index(h.apply_index(x)));
        prop_assert_eq!(g.inverse().apply_index(g.apply_index(x)), x);
    }

    #[test]
    fn isometries_preserve_distance(g in isometry_strategy(6), x in 0..729u32, y in 0..729u32) {
        prop_assert_eq!(dist(g.apply_index(x), g.apply_index(y), 6), dist(x, y, 6));
    }

    #[test]
    fn word_arithmetic_matches_trits(x in 0..729u32, y in 0..729u32) {
        let (a, b) = (TernaryWord::from_index(6, x), TernaryWord::from_index(6, y));
        prop_assert_eq!(a.add(&b).unwrap().index(), add(x, y, 6));
        prop_assert_eq!(a.sub(&b).unwrap().index(), sub(x, y, 6));
        prop_assert_eq!(a.to_string().parse::<TernaryWord>().unwrap(), a);
    }

    #[test]
    fn code_text_round_trips(c in code_strategy(5, 40)) {
        prop_assert_eq!(Code::from_text(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn collection_text_round_trips(a in code_strategy(4, 10), b in code_strategy(4, 10)) {
        let b = b.difference(&a).unwrap();
        prop_assume!(!b.is_empty());
        let col = Collection::new(4, vec![a, b]).unwrap();
        prop_assert_eq!(Collection::from_text(&col.to_text()).unwrap(), col);
    }

    #[test]
    fn minimum_distance_matches_pairs(c in code_strategy(5, 12)) {
        prop_assume!(c.len() > 1);
        let w = c.indices();
        let brute = w.iter().enumerate()
            .flat_map(|(i, &a)| w[i + 1..].iter().map(move |&b| dist(a, b, 5)))
            .min()
            .unwrap();
        prop_assert_eq!(min_distance(&c).unwrap(), brute);
    }

    #[test]
    fn affine_rank_matches_span_closure(c in code_strategy(5, 6)) {
        let w = c.indices();
        let diffs: Vec<u32> = w.iter().map(|&x| sub(x, w[0], 5)).collect();
        prop_assert_eq!(affine_rank(&c).unwrap(), log3(span_size(&diffs, 5)));
    }

    #[test]
    fn kernel_matches_periods(c in code_strategy(4, 30)) {
        let periods = (0..81u32)
            .filter(|&v| c.iter().all(|x| c.contains(add(x, v, 4))))
            .count();
        let k = kernel(&c).unwrap();
        prop_assert_eq!(3usize.pow(k.rank as u32), periods);
        for x in k.points().iter() {
            prop_assert!(c.iter().all(|y| c.contains(add(x, y, 4))));
        }
    }

    #[test]
    fn perfection_matches_ball_count(c in code_strategy(4, 12)) {
        let mut hits = vec![0u32; 81];
        for x in c.iter() {
            for y in 0..81u32 {
                if dist(x, y, 4) <= 1 {
                    hits[y as usize] += 1;
                }
            }
        }
        prop_assert_eq!(is_1perfect(&c), hits.iter().all(|&h| h == 1));
    }

    #[test]
    fn closure_matches_brute_force(a in perm_strategy(5), b in perm_strategy(5)) {
        let g = closure(5, &[a.clone(), b.clone()]).unwrap();
        let mut seen: BTreeSet<Vec<u8>> = BTreeSet::from([Perm::identity(5).images().to_vec()]);
        let mut stack = vec![Perm::identity(5)];
        while let Some(p) = stack.pop() {
            for q in [a.compose(&p), b.compose(&p)] {
                if seen.insert(q.images().to_vec()) {
                    stack.push(q);
                }
            }
        }
        prop_assert_eq!(g.order(), seen.len());
        prop_assert!(seen.iter().all(|p| g.contains(&Perm::new(p.clone()).unwrap())));
    }

    #[test]
    fn double_cosets_partition_the_symmetric_group(a in perm_strategy(5), b in perm_strategy(5)) {
        let l = closure(5, &[a]).unwrap();
        let r = closure(5, &[b]).unwrap();
        let cosets = double_cosets(&l, &r).unwrap();
        prop_assert_eq!(cosets.iter().map(|c| c.1).sum::<usize>(), 120);
        for (tau, size) in &cosets {
            let set: HashSet<Vec<u8>> = l.elements().iter()
                .flat_map(|x| r.elements().iter().map(move |y| x.compose(tau).compose(y).images().to_vec()))
                .collect();
            prop_assert_eq!(set.len(), *size);
            prop_assert_eq!(set.iter().min().unwrap(), &tau.images().to_vec());
        }
    }
}

fn brute_covers(rows: &[Vec<usize>], cols: usize) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for mask in 0u32..1 << rows.len() {
        let mut hit = vec![0; cols];
        for (r, row) in rows.iter().enumerate() {
            if mask >> r & 1 == 1 {
                for &c in row {
                    hit[c] += 1;
                }
            }
        }
        if hit.iter().all(|&h| h == 1) {
            out.insert((0..rows.len()).filter(|r| mask >> r & 1 == 1).collect());
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_cover_matches_subsets(
        rows in prop::collection::vec(prop::collection::btree_set(0..8usize, 1..4), 1..14)
    ) {
        let rows: Vec<Vec<usize>> = rows.into_iter().map(|s| s.into_iter().collect()).collect();
        let mut inst = CoverInstance::new(8);
        for (i, r) in rows.iter().enumerate() {
            inst.add_row(i, r.clone()).unwrap();
        }
        let got: BTreeSet<Vec<usize>> = all_solutions(&inst)
            .into_iter()
            .map(|mut s| { s.sort(); s })
            .collect();
        prop_assert_eq!(got, brute_covers(&rows, 8));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn certificates_are_isometry_invariant(c in code_strategy(5, 20), g in isometry_strategy(5)) {
        let d = g.apply_code(&c).unwrap();
        let (cc, cd) = (certify_code(&c, Flavor::Full).unwrap(), certify_code(&d, Flavor::Full).unwrap());
        prop_assert_eq!(cc.digest, cd.digest);
        prop_assert_eq!(&cc.aut_order, &cd.aut_order);
        let h = find_isometry(&c, &d, Flavor::Full).unwrap().unwrap();
        prop_assert_eq!(h.apply_code(&c).unwrap(), d);
    }

    #[test]
    fn certificates_respect_their_groups(c in code_strategy(4, 10), v in 1..81u32) {
        let t = Isometry::translation(&TernaryWord::from_index(4, v));
        let d = t.apply_code(&c).unwrap();
        prop_assert_eq!(certify_code(&c, Flavor::Full).unwrap().digest, certify_code(&d, Flavor::Full).unwrap().digest);
        let mut c0 = c.clone();
        c0.insert(0);
        let lin = Isometry::coordinate_permutation(vec![1, 0, 3, 2]).unwrap();
        prop_assert_eq!(
            certify_code(&c0, Flavor::Monomial).unwrap().digest,
            certify_code(&lin.apply_code(&c0).unwrap(), Flavor::Monomial).unwrap().digest
        );
    }

    #[test]
    fn collection_certificates_ignore_block_order(
        a in code_strategy(4, 8), b in code_strategy(4, 8), g in isometry_strategy(4)
    ) {
        let b = b.difference(&a).unwrap();
        prop_assume!(!b.is_empty());
        let col = Collection::new(4, vec![a, b]).unwrap();
        let moved = col.apply(&g).unwrap().reorder(&[1, 0]).unwrap();
        let (x, y) = (certify_collection(&col, Flavor::Full).unwrap(), certify_collection(&moved, Flavor::Full).unwrap());
        prop_assert_eq!(x.digest, y.digest);
        prop_assert_eq!(x.aut_order, y.aut_order);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn rank_one_codes_decode_to_their_assignment(seed in any::<u64>()) {
        let asg = QuasigroupAssignment::random(3, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(&QuasigroupAssignment::from_json(&asg.to_json()).unwrap(), &asg);
        let c = rank1_build(3, &asg).unwrap();
        prop_assert!(is_1perfect(&c));
        let r = affine_rank(&c).unwrap();
        prop_assert!(r == 10 || r == 11);
        prop_assert!(kernel(&c).unwrap().rank >= 4);
        prop_assert_eq!(decode_assignment(&c, 3).unwrap(), asg);
    }
}

#[test]
fn hamming_codes_are_perfect_and_linear() {
    for m in 2..=3 {
        let c = hamming_code(m).unwrap();
        let n = (3usize.pow(m as u32) - 1) / 2;
        assert_eq!(c.len(), 3usize.pow((n - m) as u32));
        assert!(is_1perfect(&c));
        assert_eq!(affine_rank(&c).unwrap(), n - m);
        assert_eq!(kernel(&c).unwrap().rank, n - m);
    }
    // |Aut| of the length-4 code: 6^4 * 4! / 72 equivalent codes
    let a = certify_code(&hamming_code(2).unwrap(), Flavor::Full).unwrap().aut_order;
    assert_eq!(a, BigUint::from(31_104u32 / 72));
}

#[test]
fn parity_codes_are_mds() {
    for n in 2..=6 {
        let p = parity_code(n);
        assert!(is_mds2(&p));
        let mut q = p.clone();
        q.remove(0);
        assert!(!is_mds2(&q));
    }
}
