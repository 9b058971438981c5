//! Acceptance checks, one printed line per criterion.
//!
//! Lines go straight to stdout, so they show without `--nocapture`.
//! A criterion whose only failure is a published figure that the
//! computation contradicts is reported as FAIL and tolerated; any other
//! failure fails the test.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::Zero;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use perfcodes::canonical::{certify_code, Flavor};
use perfcodes::classify::p4::{distinct_linear_parts, perfect_codes_len4, perfect_partitions_len4};
use perfcodes::classify::partial::{classify_closed, next_level, PartialCode};
use perfcodes::classify::rmlike::{MSet, M_SIZE};
use perfcodes::classify::*;
use perfcodes::collection::Collection;
use perfcodes::concat::*;
use perfcodes::exactcover::{all_solutions, CoverInstance};
use perfcodes::gf3::{Code, Isometry};
use perfcodes::linalg::{affine_rank, hamming_code, kernel};
use perfcodes::perfect::is_1perfect;
use perfcodes::permgroup::Perm;
use perfcodes::rank1::*;

struct Outcome {
    pass: bool,
    /// Set when the only failing part is a published figure contradicted by
    /// an independent computation.
    conflict: bool,
    detail: String,
}

impl Outcome {
    fn check(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            conflict: false,
            detail: detail.into(),
        }
    }
}

type Check = Result<Outcome, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Writes past the test harness's output capture.
fn report(line: String) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn run(n: u32, name: &str, limit: Duration, f: impl FnOnce() -> Check) -> (bool, bool) {
    let t = Instant::now();
    let out = f();
    let el = t.elapsed();
    let (pass, conflict, detail) = match out {
        Ok(o) => (o.pass, o.conflict, o.detail),
        Err(e) => (false, false, format!("error: {e}")),
    };
    let in_time = el <= limit;
    let ok = pass && in_time;
    report(format!(
        "criterion {n:>2} [{}] {name} ({:.1} s of {:.0} s){}: {detail}",
        if ok { "PASS" } else { "FAIL" },
        el.as_secs_f64(),
        limit.as_secs_f64(),
        if in_time { "" } else { " over time limit" },
    ));
    (ok, !ok && conflict && in_time)
}

// ---------------------------------------------------------------- oracles

/// All `4! * 6^4` isometries of `F_3^4` as point tables.
fn all_isometries_n4() -> Vec<[u8; 81]> {
    const S3: [[u8; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut perms = Vec::new();
    let mut p = Perm::identity(4);
    loop {
        perms.push(p.images().to_vec());
        if !p.next_lex() {
            break;
        }
    }
    let mut out = Vec::with_capacity(31104);
    for perm in &perms {
        for s in 0..1296usize {
            let syms = [S3[s % 6], S3[s / 6 % 6], S3[s / 36 % 6], S3[s / 216]];
            let mut t = [0u8; 81];
            for (x, slot) in t.iter_mut().enumerate() {
                let mut y = 0usize;
                let mut r = x;
                for i in 0..4 {
                    let d = syms[i][r % 3] as usize;
                    r /= 3;
                    y += d * 3usize.pow(perm[i] as u32);
                }
                *slot = y as u8;
            }
            out.push(t);
        }
    }
    out
}

fn mask(c: &Code) -> u128 {
    c.iter().fold(0u128, |m, i| m | 1 << i)
}

fn image(t: &[u8; 81], m: u128) -> u128 {
    let mut out = 0u128;
    let mut r = m;
    while r != 0 {
        let i = r.trailing_zeros() as usize;
        out |= 1 << t[i];
        r &= r - 1;
    }
    out
}

/// Whether the nonzero codewords split by their nonzero value into two
/// Steiner triple systems on nine points.
fn two_steiner_systems(c: &Code) -> bool {
    let mut fam: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
    for x in c.iter().filter(|&x| x != 0) {
        let d = perfcodes::gf3::digits(x, 9);
        let vals: Vec<u8> = d[..9].iter().copied().filter(|&v| v != 0).collect();
        if vals.len() != 3 || vals.iter().any(|&v| v != vals[0]) {
            return false;
        }
        let supp: u32 = (0..9).filter(|&i| d[i] != 0).map(|i| 1 << i).sum();
        fam[vals[0] as usize - 1].push(supp);
    }
    fam.iter().all(|f| {
        if f.len() != 12 {
            return false;
        }
        let mut pairs = HashSet::new();
        for &s in f {
            let pts: Vec<u32> = (0..9).filter(|i| s >> i & 1 == 1).collect();
            for a in 0..3 {
                for b in a + 1..3 {
                    if !pairs.insert((pts[a], pts[b])) {
                        return false;
                    }
                }
            }
        }
        pairs.len() == 36
    })
}

fn multiset(v: impl IntoIterator<Item = BigUint>) -> Vec<u64> {
    let mut out: Vec<u64> = v.into_iter().map(|a| u64::try_from(a).unwrap_or(u64::MAX)).collect();
    out.sort_unstable();
    out
}

fn sorted(v: &[u64]) -> Vec<u64> {
    let mut out = v.to_vec();
    out.sort_unstable();
    out
}

// -------------------------------------------------------------- criteria

fn counting() -> Check {
    let got = [
        count_fixed_span(3).map_err(e2s)?.to_string(),
        count_all(3).map_err(e2s)?.to_string(),
        count_classes_lower_bound(3).map_err(e2s)?.to_string(),
        count_fixed_span(2).map_err(e2s)?.to_string(),
    ];
    let want = ["1352605460594256", "9982462029409199967436800", "9942054", "0"];
    Ok(Outcome::check(got == want, format!("{got:?}")))
}

fn catalog_f34() -> Check {
    let codes = perfect_codes_len4().map_err(e2s)?;
    ensure(codes.len() == 72, || format!("{} codes", codes.len()))?;
    let parts = perfect_partitions_len4(&codes).map_err(e2s)?;
    ensure(parts.len() == 104, || format!("{} partitions", parts.len()))?;
    let c = classify_p4_partitions().map_err(e2s)?;
    let entries = c.registry.entries();
    ensure(entries.len() == 2, || format!("{} classes", entries.len()))?;
    let sizes: Vec<u64> = entries.iter().map(|e| e.counts["partitions"]).collect();
    ensure(sorted(&sizes) == [8, 96], || format!("class sizes {sizes:?}"))?;

    // every code is the Hamming code up to isometry, by brute force
    let group = all_isometries_n4();
    let ham = mask(&hamming_code(2).map_err(e2s)?);
    let ham_orbit: HashSet<u128> = group.iter().map(|t| image(t, ham)).collect();
    ensure(codes.iter().all(|c| ham_orbit.contains(&mask(c))), || "a code is not Hamming".into())?;

    // class sizes and automorphism orders by brute force over Aut(H(4,3))
    let key = |p: &Collection, t: &[u8; 81]| {
        let mut b: Vec<u128> = p.blocks().iter().map(|c| image(t, mask(c))).collect();
        b.sort_unstable();
        b
    };
    let all: HashSet<Vec<u128>> = parts.iter().map(|p| key(p, &group[0])).collect();
    let mut brute = Vec::new();
    for e in entries {
        let own = key(&e.rep, &group[0]);
        let orbit: HashSet<Vec<u128>> = group.iter().map(|t| key(&e.rep, t)).collect();
        let stab = group.iter().filter(|t| key(&e.rep, t) == own).count() as u64;
        ensure(orbit.is_subset(&all), || "orbit leaves the partitions".into())?;
        ensure(BigUint::from(stab) == e.aut_order, || format!("brute stabilizer {stab} vs {}", e.aut_order))?;
        brute.push((orbit.len() as u64, stab));
    }
    brute.sort_unstable();

    // the small class is made of the cosets of one Hamming code; the large
    // one of 6 and 3 cosets of two
    for e in entries {
        let parts = distinct_linear_parts(&e.rep).map_err(e2s)?;
        let mut counts: Vec<usize> = parts.values().copied().collect();
        counts.sort_unstable();
        let want: &[usize] = if e.counts["partitions"] == 8 { &[9] } else { &[3, 6] };
        ensure(counts == want, || format!("coset structure {counts:?}"))?;
    }

    let auts: Vec<u64> = brute.iter().map(|b| b.1).collect();
    let published = [384u64, 32];
    let pass = auts == published;
    Ok(Outcome {
        pass,
        conflict: !pass,
        detail: format!(
            "72 codes, 104 partitions, classes (size, aut) {brute:?}; published aut orders {published:?} \
             would need a group of order 3072, which does not divide |Aut H(4,3)| = 31104"
        ),
    })
}

fn rank_plus_one() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ranks = BTreeMap::new();
    for _ in 0..100 {
        let a = QuasigroupAssignment::random(3, &mut rng).map_err(e2s)?;
        let c = rank1_build(3, &a).map_err(e2s)?;
        ensure(is_1perfect(&c), || "random assignment gave a non-perfect code".into())?;
        let r = affine_rank(&c).map_err(e2s)?;
        let k = kernel(&c).map_err(e2s)?.rank;
        ensure((r == 10 || r == 11) && k >= 4, || format!("rank {r} kernel {k}"))?;
        *ranks.entry(r).or_insert(0) += 1;
    }
    let cosets = hamming_coset_assignments(3).map_err(e2s)?;
    ensure(cosets.len() == 432, || format!("{} coset assignments", cosets.len()))?;
    let mut seen = HashSet::new();
    for a in &cosets {
        let c = rank1_build(3, a).map_err(e2s)?;
        ensure(is_1perfect(&c) && affine_rank(&c).map_err(e2s)? == 10, || "coset assignment not rank 10".into())?;
        seen.insert(a.to_json());
    }
    ensure(seen.len() == 432, || "coset assignments repeat".into())?;
    Ok(Outcome::check(true, format!("random ranks {ranks:?}; 432 distinct rank-10 assignments")))
}

fn switching() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut steps = 0;
    for _ in 0..20 {
        let c1 = rank1_build(3, &QuasigroupAssignment::random(3, &mut rng).map_err(e2s)?).map_err(e2s)?;
        let c2 = rank1_build(3, &QuasigroupAssignment::random(3, &mut rng).map_err(e2s)?).map_err(e2s)?;
        let path = switching_path(&c1, &c2, 3).map_err(e2s)?;
        let mut cur = c1.clone();
        for (s, next) in &path {
            let (i, j) = s.coords();
            let b = s.beta();
            let moves_only_ij = (0..13).all(|k| k == i || k == j || (b.perm()[k] as usize == k && b.sym()[k] == [0, 1, 2]));
            ensure(i != j && moves_only_ij, || "switch moves other coordinates".into())?;
            let host = cur.union(&b.apply_code(&cur).map_err(e2s)?).map_err(e2s)?;
            ensure(next.is_subset(&host).map_err(e2s)?, || "step leaves C ∪ β(C)".into())?;
            ensure(is_1perfect(next), || "intermediate code not 1-perfect".into())?;
            cur = next.clone();
            steps += 1;
        }
        ensure(cur == c2, || "path misses its target".into())?;
    }
    Ok(Outcome::check(true, format!("20 paths, {steps} switchings verified")))
}

fn partial_codes() -> Check {
    let level3 = extend_partial(&PartialCode::root()).map_err(e2s)?;
    ensure(level3.len() == 705_600, || format!("{} level-3 codes", level3.len()))?;
    let bad = level3.iter().filter(|pc| !two_steiner_systems(pc.code())).count();
    ensure(bad == 0, || format!("{bad} codes without two Steiner systems"))?;
    let classes = classify_closed(level3, 0).map_err(e2s)?;
    let auts = multiset(classes.iter().map(|c| c.cert.aut_order.clone()));
    ensure(auts == sorted(&[864, 108, 32, 24, 18, 6, 6, 4, 4]), || format!("level-3 auts {auts:?}"))?;
    let reps: Vec<PartialCode> = classes.iter().map(|c| c.rep.clone()).collect();
    let next = next_level(&reps).map_err(e2s)?;
    let counts: Vec<usize> = next.iter().map(|v| v.len()).collect();
    ensure(counts == [4, 4, 0, 4, 0, 0, 0, 0, 0], || format!("continuations {counts:?}"))?;
    let auts4 = multiset(next.iter().flatten().map(|c| c.cert.aut_order.clone()));
    let want = sorted(&[864, 216, 72, 72, 108, 108, 36, 36, 12, 12, 12, 12]);
    ensure(auts4 == want, || format!("level-4 auts {auts4:?}"))?;
    Ok(Outcome::check(true, format!("9 classes {auts:?}; level 4 {counts:?}")))
}

fn rm_like(rm: &RmLikeClassification, orbits: &[ClassOrbit]) -> Check {
    let full: Vec<u64> = rm.registry.entries().iter().map(|e| u64::try_from(&e.aut_order).unwrap()).collect();
    ensure(full == [629_856, 78_732, 8_748, 5_832], || format!("full auts {full:?}"))?;
    let mono = multiset(rm.monomial.iter().map(|m| m.aut_order.clone()));
    ensure(mono == sorted(&[864, 108, 12, 72, 36, 12]), || format!("monomial auts {mono:?}"))?;
    let perm = multiset(rm.permutation.iter().map(|m| m.aut_order.clone()));
    ensure(perm == sorted(&[432, 54, 6, 36, 18, 12, 12]), || format!("permutation auts {perm:?}"))?;
    ensure(rm.with_zero == 158_760, || format!("{} codes through 0", rm.with_zero))?;
    // orbit sizes from the explicit orbits, not from automorphism orders
    let sizes: Vec<u64> = orbits.iter().map(|o| o.len()).collect();
    ensure(sizes == [7_560, 60_480, 544_320, 816_480], || format!("orbit sizes {sizes:?}"))?;
    ensure(sizes.iter().sum::<u64>() == 1_428_840 && rm.in_m == 1_428_840, || "total".into())?;
    let zero: u64 = orbits.iter().map(|o| o.with_zero() as u64).sum();
    ensure(zero == 158_760, || format!("{zero} stored codes through 0"))?;
    Ok(Outcome::check(true, format!("auts {full:?}, orbits {sizes:?}")))
}

fn random_stab_m<R: Rng>(rng: &mut R) -> Isometry {
    let mut perm: Vec<u8> = (0..9).collect();
    perm.shuffle(rng);
    let neg = rng.gen_bool(0.5);
    let g = Isometry::new(perm, vec![if neg { [0, 2, 1] } else { [0, 1, 2] }; 9]).unwrap();
    let v = perfcodes::classify::rmlike::full_index(rng.gen_range(0..M_SIZE as u16));
    Isometry::translation(&perfcodes::gf3::TernaryWord::from_index(9, v))
        .compose(&g)
        .unwrap()
}

fn collections_k2(rm: &RmLikeClassification, orbits: &[ClassOrbit], canon: &MCollectionCanon) -> Check {
    let k1 = collections_k1(rm, canon).map_err(e2s)?;
    let k2 = classify_collections(rm, canon, orbits, &k1, &CollectionOptions::default()).map_err(e2s)?;
    ensure(k2.len() == 131, || format!("{} classes", k2.len()))?;

    // normal forms are invariant under isometries of M and block order
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for e in k2.entries().iter().step_by(13) {
        let g = random_stab_m(&mut rng);
        let moved = e.rep.apply(&g).map_err(e2s)?.reorder(&[1, 0]).map_err(e2s)?;
        let c = canon.certify(&moved, false).map_err(e2s)?;
        ensure(c.digest == e.digest && c.aut_order == e.aut_order, || "normal form not invariant".into())?;
    }

    // number of unordered disjoint pairs in M, counted directly
    let mut ordered = BigUint::zero();
    for (t, o) in orbits.iter().enumerate() {
        let rep = MSet::from_code(rm.rep(t)).map_err(e2s)?;
        let mut disjoint = 0u64;
        for q in orbits {
            q.for_each_disjoint(&rep, |_, _| disjoint += 1);
        }
        ordered += BigUint::from(o.len()) * disjoint;
    }
    let stab_m = BigUint::from(M_SIZE as u64 * perfcodes::classify::partial::PARITY_MONOMIAL_ORDER);
    let from_classes: BigUint = k2.entries().iter().map(|e| &stab_m / &e.aut_order).sum();
    ensure(from_classes.clone() * 2u32 == ordered, || {
        format!("classes account for {from_classes} pairs, direct count {ordered}/2")
    })?;
    Ok(Outcome::check(true, format!("131 classes covering {from_classes} disjoint pairs")))
}

fn canonical_oracle() -> Check {
    let group = all_isometries_n4();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let random_code = |rng: &mut ChaCha8Rng, size: usize| {
        let mut pts: Vec<u32> = (0..81).collect();
        pts.shuffle(rng);
        Code::from_indices(4, pts[..size].iter().copied())
    };
    let mut equivalent = 0;
    for _ in 0..200 {
        let size = rng.gen_range(1..=12);
        let a = random_code(&mut rng, size);
        let b = if rng.gen_bool(0.5) {
            Isometry::random(4, &mut rng).apply_code(&a).map_err(e2s)?
        } else {
            random_code(&mut rng, size)
        };
        let (ma, mb) = (mask(&a), mask(&b));
        let brute_eq = group.iter().any(|t| image(t, ma) == mb);
        let brute_aut = group.iter().filter(|t| image(t, ma) == ma).count() as u64;
        let ca = certify_code(&a, Flavor::Full).map_err(e2s)?;
        let cb = certify_code(&b, Flavor::Full).map_err(e2s)?;
        ensure((ca.digest == cb.digest) == brute_eq, || format!("equivalence disagrees on {a:?} {b:?}"))?;
        ensure(ca.aut_order == BigUint::from(brute_aut), || format!("aut {} vs {brute_aut}", ca.aut_order))?;
        equivalent += brute_eq as u32;
    }
    for n in [4usize, 9] {
        for _ in 0..1000 {
            let size = rng.gen_range(1..=if n == 4 { 20 } else { 40 });
            let c = Code::from_indices(n, (0..size).map(|_| rng.gen_range(0..3u32.pow(n as u32))));
            let g = Isometry::random(n, &mut rng);
            let d1 = certify_code(&c, Flavor::Full).map_err(e2s)?;
            let d2 = certify_code(&g.apply_code(&c).map_err(e2s)?, Flavor::Full).map_err(e2s)?;
            ensure(d1.digest == d2.digest && d1.aut_order == d2.aut_order, || format!("not invariant at n={n}"))?;
        }
    }
    Ok(Outcome::check(true, format!("200 pairs ({equivalent} equivalent) match brute force; 2000 invariance checks")))
}

fn concatenation(orbits: &[ClassOrbit], canon: &MCollectionCanon) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sampler = MdsPartitionSampler::new(orbits);
    let mut inner = vec![linear_rm_partition()];
    for _ in 0..6 {
        inner.push(sampler.sample(&mut rng).map_err(e2s)?);
    }
    let inner: Vec<(Collection, PartitionGroup)> = inner
        .into_iter()
        .map(|c| {
            let (cert, blocks) = canon.certify_with_blocks(&c)?;
            Ok((c, PartitionGroup { aut_order: cert.aut_order, blocks }))
        })
        .collect::<perfcodes::error::Result<_>>()
        .map_err(e2s)?;
    let p4 = classify_p4_partitions().map_err(e2s)?;
    let outer: Vec<(Collection, PartitionGroup)> = p4
        .registry
        .entries()
        .iter()
        .map(|e| Ok((e.rep.clone(), block_group(&e.rep)?)))
        .collect::<perfcodes::error::Result<_>>()
        .map_err(e2s)?;
    let pick = |rng: &mut ChaCha8Rng, g: &PartitionGroup| g.blocks.elements()[rng.gen_range(0..g.blocks.order())].clone();

    let mut tab = Tabulation::default();
    let mut uni = 0;
    let front: Vec<usize> = (0..9).collect();
    for i in 0..50 {
        let (cbar, cg) = &inner[i % inner.len()];
        let (pbar, pg) = &outer[i % outer.len()];
        let mut imgs: Vec<u8> = (0..9).collect();
        imgs.shuffle(&mut rng);
        let tau = Perm::new(imgs).map_err(e2s)?;
        let code = build_concatenated(cbar, pbar, &tau).map_err(e2s)?;
        ensure(is_1perfect(&code), || format!("triple {i} not 1-perfect"))?;
        ensure(affine_rank(&code).map_err(e2s)? <= 12, || format!("triple {i} rank above 12"))?;
        tab.add(&code, false).map_err(e2s)?;
        let cert = certify_code(&code, Flavor::Full).map_err(e2s)?;
        ensure((&cert.aut_order % 27u32).is_zero(), || format!("aut {} not a multiple of 27", cert.aut_order))?;
        let supports = concat_supports(&code).map_err(e2s)?;
        ensure(supports.contains(&front), || "gluing support not found".into())?;
        if supports.len() == 1 {
            let size = double_coset_size(&cg.blocks, &pg.blocks, &tau);
            let predicted = &cg.aut_order * &pg.aut_order / BigUint::from(size);
            ensure(predicted == cert.aut_order, || format!("aut {} vs predicted {predicted}", cert.aut_order))?;
            uni += 1;
        }
        // another element of the same double coset gives an equivalent code
        let tau2 = pick(&mut rng, pg).compose(&tau).compose(&pick(&mut rng, cg));
        let other = build_concatenated(cbar, pbar, &tau2).map_err(e2s)?;
        ensure(certify_code(&other, Flavor::Full).map_err(e2s)?.digest == cert.digest, || {
            format!("triple {i}: double coset members differ")
        })?;
    }

    // multi-concatenated codes among the reductions of the coset partitions
    let mut multi = 0;
    let (cbar, cg) = &inner[0];
    for (pbar, pg) in &outer {
        for r in generate_reduced(cbar, cg, pbar, pg).map_err(e2s)? {
            tab.add(&r.code, false).map_err(e2s)?;
            if concat_supports(&r.code).map_err(e2s)?.len() > 1 {
                ensure(affine_rank(&r.code).map_err(e2s)? <= 11, || "multi-concatenated code of rank 12".into())?;
                multi += 1;
            }
        }
    }
    ensure(multi > 0, || "no multi-concatenated sample".into())?;
    Ok(Outcome::check(
        true,
        format!("50 triples ({uni} uni-concatenated match the aut formula), {multi} multi-concatenated of rank <= 11, {} codes tabulated", tab.total()),
    ))
}

fn exact_cover_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut with_solutions = 0;
    for _ in 0..500 {
        let cols = rng.gen_range(1..=10usize);
        let nrows = rng.gen_range(1..=20usize);
        let rows: Vec<u32> = (0..nrows).map(|_| rng.gen_range(1..1u32 << cols)).collect();
        let mut inst = CoverInstance::new(cols);
        for (j, &r) in rows.iter().enumerate() {
            inst.add_row(j, (0..cols).filter(|c| r >> c & 1 == 1).collect()).map_err(e2s)?;
        }
        let mut got = all_solutions(&inst);
        got.sort();
        // subsets by increasing mask; union and overlap built from the mask
        // without its lowest row
        let full = (1u32 << cols) - 1;
        let mut union = vec![0u32; 1 << nrows];
        let mut clash = vec![false; 1 << nrows];
        let mut want = Vec::new();
        for m in 1usize..1 << nrows {
            let low = m.trailing_zeros() as usize;
            let rest = m & (m - 1);
            clash[m] = clash[rest] || union[rest] & rows[low] != 0;
            union[m] = union[rest] | rows[low];
            if !clash[m] && union[m] == full {
                want.push((0..nrows).filter(|j| m >> j & 1 == 1).collect::<Vec<_>>());
            }
        }
        want.sort();
        ensure(got == want, || format!("solver {got:?} vs brute force {want:?}"))?;
        with_solutions += !want.is_empty() as u32;
    }
    Ok(Outcome::check(true, format!("500 instances agree ({with_solutions} solvable)")))
}

#[test]
fn acceptance() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let mut results = Vec::new();
    results.push(run(1, "counting formulas", Duration::from_secs(1), counting));
    results.push(run(2, "F_3^4 catalog", min(1), catalog_f34));
    results.push(run(3, "rank+1 construction", min(1), rank_plus_one));
    results.push(run(4, "switching paths", min(5), switching));
    results.push(run(5, "partial codes, levels 3 and 4", min(30), partial_codes));

    let mut setup = None;
    results.push(run(6, "RM-like classification", min(120), || {
        let rm = classify_rm_like().map_err(|e| e.to_string())?;
        let orbits = rm.orbits().map_err(|e| e.to_string())?;
        let out = rm_like(&rm, &orbits);
        setup = Some((rm, orbits));
        out
    }));
    match &setup {
        Some((rm, orbits)) => match MCollectionCanon::new(rm, orbits) {
            Ok(canon) => {
                results.push(run(7, "2-collections", min(240), || collections_k2(rm, orbits, &canon)));
                results.push(run(9, "concatenation properties", min(30), || concatenation(orbits, &canon)));
            }
            Err(e) => {
                for n in [7, 9] {
                    report(format!("criterion {n:>2} [FAIL] setup: {e}"));
                    results.push((false, false));
                }
            }
        },
        None => {
            for n in [7, 9] {
                report(format!("criterion {n:>2} [FAIL] needs the RM-like classification"));
                results.push((false, false));
            }
        }
    }
    results.push(run(8, "canonicalization oracle", min(10), canonical_oracle));
    results.push(run(10, "exact cover oracle", min(1), exact_cover_oracle));

    let failed = results.iter().filter(|(ok, conflict)| !ok && !conflict).count();
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
