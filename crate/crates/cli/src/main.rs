mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use perfcodes::canonical::{canonical_code, certify_code, certify_collection, Flavor};
use perfcodes::classify::{
    classify_collections, classify_p4_partitions, classify_rm_like, collections_k1, ClassOrbit, ClassRegistry,
    CollectionOptions, MCollectionCanon, RmLikeClassification,
};
use perfcodes::collection::Collection;
use perfcodes::concat::{
    block_group, build_concatenated, concat_supports, for_each_reduced, linear_rm_partition, tabulate,
    MdsPartitionSampler, PartitionGroup,
};
use perfcodes::linalg::{affine_rank, hamming_code, kernel};
use perfcodes::perfect::{is_1perfect, is_mds2, is_rm_like, parity_code};
use perfcodes::permgroup::{closure, double_cosets, Perm};
use perfcodes::rank1::{
    count_all, count_classes_lower_bound, count_fixed_span, rank1_build, switching_path, QuasigroupAssignment,
};
use perfcodes::{Code, Error};

use manifest::{recorded_command, Recorder};

#[derive(Parser)]
#[command(name = "perfcodes", version, about = "Ternary 1-perfect codes and their building blocks")]
struct Cli {
    /// Worker threads; never changes any output
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for artifacts and the run manifest
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Directory for resumable step checkpoints
    #[arg(long, global = true)]
    checkpoint_dir: Option<PathBuf>,
    /// Seed for randomized commands
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the Hamming code with m check symbols
    GenHamming {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a property of a code or collection; exits 1 when it fails
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        expect: Expect,
    },
    /// Dimension of the affine span
    Rank {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Dimension of the kernel; optionally write its points
    Kernel {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canonical certificate and automorphism order
    Canon {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "full")]
        flavor: String,
        /// The input is a collection
        #[arg(long)]
        collection: bool,
        /// Write the canonical representative (codes only)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a rank +1 code from a quasigroup assignment
    Rank1Build {
        #[arg(long)]
        m: usize,
        /// Assignment JSON; a seeded random assignment when absent
        #[arg(long)]
        assignment: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact counts of rank +1 codes
    Rank1Count {
        #[arg(long)]
        m: usize,
    },
    /// Two-coordinate switchings between two rank +1 codes in normal form
    SwitchPath {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Classification pipelines
    #[command(subcommand)]
    Classify(ClassifyCmd),
    /// Concatenated codes of length 13
    #[command(subcommand)]
    Concat(ConcatCmd),
    /// Orbit size of a code under the isometries of its space
    Orbit {
        #[arg(long = "in")]
        input: PathBuf,
        /// Also report the class and orbit of an RM-like subcode of the
        /// parity code of length 9 within that parity code
        #[arg(long)]
        parity: bool,
    },
    /// Double cosets L \ Sym(n) / R of two generated groups
    Dcosets {
        #[arg(long)]
        degree: usize,
        /// Generator of L as space-separated images; repeatable
        #[arg(long = "left")]
        left: Vec<String>,
        /// Generator of R; repeatable
        #[arg(long = "right")]
        right: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Expect {
    #[value(name = "1perfect")]
    OnePerfect,
    Mds2,
    /// RM-like subcode of the parity code of the same length
    RmLike,
    /// A collection partitioning the whole space into 1-perfect codes
    PerfectPartition,
    /// A collection of RM-like codes partitioning the parity code
    RmPartition,
}

#[derive(Subcommand)]
enum ClassifyCmd {
    /// RM-like subcodes of the parity code of length 9
    Rmlike,
    /// Collections of k disjoint RM-like codes
    Collections {
        #[arg(long)]
        k: usize,
        /// Largest class index allowed in a type vector
        #[arg(long)]
        max_type: Option<u8>,
    },
    /// Partitions of F_3^4 into 1-perfect codes
    P4,
}

#[derive(Subcommand)]
enum ConcatCmd {
    /// Glue an inner and an outer partition along a block permutation
    Build {
        #[command(flatten)]
        parts: Parts,
        /// Block permutation as space-separated images
        #[arg(long)]
        tau: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One code per double coset of the two block groups
    Reduce {
        #[command(flatten)]
        parts: Parts,
        /// Write at most this many codes
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Coordinate sets along which a code splits as a concatenation
    Supports {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Counts by rank and kernel dimension, and by automorphism order
    Tabulate {
        #[arg(long = "in", num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        aut: bool,
    },
}

#[derive(Args)]
struct Parts {
    /// Inner partition of the parity code of length 9; the linear
    /// partition when absent
    #[arg(long)]
    inner: Option<PathBuf>,
    /// Draw the inner partition at random from the seed
    #[arg(long, conflicts_with = "inner")]
    random_inner: bool,
    /// Outer partition of F_3^4 into 1-perfect codes
    #[arg(long)]
    outer: PathBuf,
}

/// How a command ended when it did not fail outright.
enum Outcome {
    Ok,
    /// A checked property does not hold.
    Failed,
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let mut rec = Recorder::new(&cli.out_dir);
    let res = dispatch(&cli, &mut rec).and_then(|o| {
        rec.finish(recorded_command(&args[1..]))?;
        Ok(o)
    });
    match res {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Invariant(_) => 3,
                _ => 2,
            })
        }
    }
}

type Res = perfcodes::Result<Outcome>;

fn dispatch(cli: &Cli, rec: &mut Recorder) -> Res {
    let out_dir = cli.out_dir.clone();
    match &cli.cmd {
        Cmd::GenHamming { m, out } => {
            let c = hamming_code(*m)?;
            let path = out.clone().unwrap_or_else(|| out_dir.join(format!("hamming-m{m}.txt")));
            rec.write(&path, &c.to_text())?;
            println!("{} words of length {} -> {}", c.len(), c.n(), path.display());
            Ok(Outcome::Ok)
        }
        Cmd::Verify { input, expect } => verify(rec, input, *expect),
        Cmd::Rank { input } => {
            let c = read_code(rec, input)?;
            println!("rank {}", affine_rank(&c)?);
            Ok(Outcome::Ok)
        }
        Cmd::Kernel { input, out } => {
            let c = read_code(rec, input)?;
            let k = kernel(&c)?;
            println!("kernel {}", k.rank);
            if let Some(p) = out {
                rec.write(p, &k.points().to_text())?;
            }
            Ok(Outcome::Ok)
        }
        Cmd::Canon {
            input,
            flavor,
            collection,
            out,
        } => {
            let flavor: Flavor = flavor.parse()?;
            let cert = if *collection {
                certify_collection(&read_collection(rec, input)?, flavor)?
            } else {
                let c = read_code(rec, input)?;
                let cert = certify_code(&c, flavor)?;
                if let Some(p) = out {
                    rec.write(p, &canonical_code(&c, &cert)?.to_text())?;
                }
                cert
            };
            println!("digest {}", cert.hex());
            println!("aut {}", cert.aut_order);
            Ok(Outcome::Ok)
        }
        Cmd::Rank1Build { m, assignment, out } => {
            let asg = match assignment {
                Some(p) => QuasigroupAssignment::from_json(&rec.read(p)?)?,
                None => {
                    let asg = QuasigroupAssignment::random(*m, &mut ChaCha8Rng::seed_from_u64(cli.seed))?;
                    rec.write(&out_dir.join(format!("assignment-m{m}-seed{}.json", cli.seed)), &(asg.to_json() + "\n"))?;
                    asg
                }
            };
            if asg.m() != *m {
                return Err(Error::Usage(format!("assignment is for m = {}", asg.m())));
            }
            let c = rank1_build(*m, &asg)?;
            let path = out.clone().unwrap_or_else(|| out_dir.join(format!("rank1-m{m}.txt")));
            rec.write(&path, &c.to_text())?;
            println!("rank {} kernel {} -> {}", affine_rank(&c)?, kernel(&c)?.rank, path.display());
            Ok(Outcome::Ok)
        }
        Cmd::Rank1Count { m } => {
            println!("fixed_span {}", count_fixed_span(*m)?);
            println!("all {}", count_all(*m)?);
            println!("classes_at_least {}", count_classes_lower_bound(*m)?);
            Ok(Outcome::Ok)
        }
        Cmd::SwitchPath { from, to, m } => switch_path(rec, from, to, *m),
        Cmd::Classify(c) => classify(cli, rec, c),
        Cmd::Concat(c) => concat(cli, rec, c),
        Cmd::Orbit { input, parity } => orbit(rec, input, *parity),
        Cmd::Dcosets { degree, left, right } => {
            let parse = |gens: &[String]| -> perfcodes::Result<_> {
                let gens = gens.iter().map(|s| s.parse()).collect::<perfcodes::Result<Vec<Perm>>>()?;
                if gens.iter().any(|g| g.degree() != *degree) {
                    return Err(Error::Usage(format!("generators must have degree {degree}")));
                }
                closure(*degree, &gens)
            };
            let (l, r) = (parse(left)?, parse(right)?);
            let cosets = double_cosets(&l, &r)?;
            println!("# |L| = {} |R| = {} double cosets = {}", l.order(), r.order(), cosets.len());
            for (rep, size) in cosets {
                println!("{rep}\t{size}");
            }
            Ok(Outcome::Ok)
        }
    }
}

fn read_code(rec: &mut Recorder, path: &Path) -> perfcodes::Result<Code> {
    Code::from_text(&rec.read(path)?)
}

fn read_collection(rec: &mut Recorder, path: &Path) -> perfcodes::Result<Collection> {
    Collection::from_text(&rec.read(path)?)
}

fn verify(rec: &mut Recorder, input: &Path, expect: Expect) -> Res {
    let (ok, what) = match expect {
        Expect::OnePerfect => (is_1perfect(&read_code(rec, input)?), "1-perfect"),
        Expect::Mds2 => (is_mds2(&read_code(rec, input)?), "distance-2 MDS"),
        Expect::RmLike => {
            let c = read_code(rec, input)?;
            (is_rm_like(&c, &parity_code(c.n()))?, "RM-like in the parity code")
        }
        Expect::PerfectPartition => {
            let col = read_collection(rec, input)?;
            let ok = col.is_partition_of(&Code::full(col.n())) && col.blocks().iter().all(is_1perfect);
            (ok, "a partition into 1-perfect codes")
        }
        Expect::RmPartition => {
            let col = read_collection(rec, input)?;
            let host = parity_code(col.n());
            let mut ok = col.is_partition_of(&host);
            for b in col.blocks() {
                ok = ok && is_rm_like(b, &host)?;
            }
            (ok, "a partition of the parity code into RM-like codes")
        }
    };
    if ok {
        println!("ok: {what}");
        Ok(Outcome::Ok)
    } else {
        println!("fail: not {what}");
        Ok(Outcome::Failed)
    }
}

#[derive(Serialize)]
struct PathStep {
    coords: (usize, usize),
    perm: Vec<u8>,
    sym: Vec<[u8; 3]>,
    file: String,
}

fn switch_path(rec: &mut Recorder, from: &Path, to: &Path, m: usize) -> Res {
    let c1 = read_code(rec, from)?;
    let c2 = read_code(rec, to)?;
    let path = switching_path(&c1, &c2, m)?;
    let dir = rec.out_dir().join("switch-path");
    let mut steps = Vec::new();
    let mut prev = c1;
    let mut ok = true;
    for (i, (s, c)) in path.iter().enumerate() {
        let file = format!("step-{:04}.txt", i + 1);
        rec.write(&dir.join(&file), &c.to_text())?;
        // C' lies in C ∪ β(C) and is again 1-perfect
        let moved = s.beta().apply_code(&prev)?;
        ok = ok && is_1perfect(c) && c.is_subset(&prev.union(&moved)?)?;
        steps.push(PathStep {
            coords: s.coords(),
            perm: s.beta().perm().to_vec(),
            sym: s.beta().sym().to_vec(),
            file,
        });
        prev = c.clone();
    }
    ok = ok && prev == c2;
    rec.write(&dir.join("path.json"), &(serde_json::to_string_pretty(&steps)? + "\n"))?;
    println!("{} switchings -> {}", steps.len(), dir.display());
    Ok(if ok { Outcome::Ok } else { Outcome::Failed })
}

fn rm_setup() -> perfcodes::Result<(RmLikeClassification, Vec<ClassOrbit>)> {
    let rm = classify_rm_like()?;
    let orbits = rm.orbits()?;
    Ok((rm, orbits))
}

fn save_registry(rec: &mut Recorder, reg: &ClassRegistry, dir: &Path) -> perfcodes::Result<()> {
    reg.save(dir)?;
    rec.record_dir(dir)
}

fn classify(cli: &Cli, rec: &mut Recorder, cmd: &ClassifyCmd) -> Res {
    let out_dir = cli.out_dir.clone();
    match cmd {
        ClassifyCmd::Rmlike => {
            let rm = classify_rm_like()?;
            let dir = out_dir.join("rmlike");
            save_registry(rec, &rm.registry, &dir)?;
            let auts = |v: &[perfcodes::classify::rmlike::RmSubclass]| -> Vec<String> {
                v.iter().map(|s| s.aut_order.to_string()).collect()
            };
            let full: Vec<String> = rm.registry.entries().iter().map(|e| e.aut_order.to_string()).collect();
            println!("full classes {}: aut {}", full.len(), full.join(" "));
            println!("monomial classes {}: aut {}", rm.monomial.len(), auts(&rm.monomial).join(" "));
            println!("permutation classes {}: aut {}", rm.permutation.len(), auts(&rm.permutation).join(" "));
            println!("codes through 0: {}; codes in M: {}", rm.with_zero, rm.in_m);
            println!("-> {}", dir.display());
        }
        ClassifyCmd::Collections { k, max_type } => {
            if *k == 0 {
                return Err(Error::Usage("k must be at least 1".into()));
            }
            let (rm, orbits) = rm_setup()?;
            let canon = MCollectionCanon::new(&rm, &orbits)?;
            let opts = CollectionOptions {
                max_type: *max_type,
                checkpoint_dir: cli.checkpoint_dir.clone(),
            };
            let mut reg: Option<ClassRegistry> = None;
            for j in 1..=*k {
                let dir = out_dir.join(format!("collections-k{j}"));
                // finished levels are reused
                let level = if dir.join("index.json").exists() {
                    ClassRegistry::load(&dir)?
                } else {
                    let level = match &reg {
                        None => collections_k1(&rm, &canon)?,
                        Some(prev) => classify_collections(&rm, &canon, &orbits, prev, &opts)?,
                    };
                    level.save(&dir)?;
                    level
                };
                rec.record_dir(&dir)?;
                println!("k={j}: {} classes -> {}", level.len(), dir.display());
                reg = Some(level);
            }
        }
        ClassifyCmd::P4 => {
            let p4 = classify_p4_partitions()?;
            let dir = out_dir.join("p4");
            save_registry(rec, &p4.registry, &dir)?;
            println!("{} codes, {} partitions", p4.codes, p4.partitions);
            for e in p4.registry.entries() {
                println!("class {}: size {} aut {}", e.hex(), e.counts["partitions"], e.aut_order);
            }
            println!("-> {}", dir.display());
        }
    }
    Ok(Outcome::Ok)
}

struct Glue {
    inner: Collection,
    outer: Collection,
}

fn load_parts(cli: &Cli, rec: &mut Recorder, parts: &Parts, setup: Option<&[ClassOrbit]>) -> perfcodes::Result<Glue> {
    let inner = match (&parts.inner, parts.random_inner) {
        (Some(p), _) => read_collection(rec, p)?,
        (None, true) => {
            let orbits = setup.ok_or_else(|| Error::Usage("random inner partitions need the RM-like orbits".into()))?;
            let c = MdsPartitionSampler::new(orbits).sample(&mut ChaCha8Rng::seed_from_u64(cli.seed))?;
            rec.write(&cli.out_dir.join(format!("inner-seed{}.txt", cli.seed)), &c.to_text())?;
            c
        }
        (None, false) => linear_rm_partition(),
    };
    let outer = read_collection(rec, &parts.outer)?;
    Ok(Glue { inner, outer })
}

fn inner_group(inner: &Collection, canon: &MCollectionCanon) -> perfcodes::Result<PartitionGroup> {
    let (cert, blocks) = canon.certify_with_blocks(inner)?;
    Ok(PartitionGroup {
        aut_order: cert.aut_order,
        blocks,
    })
}

fn concat(cli: &Cli, rec: &mut Recorder, cmd: &ConcatCmd) -> Res {
    let out_dir = cli.out_dir.clone();
    match cmd {
        ConcatCmd::Build { parts, tau, out } => {
            let setup = if parts.random_inner { Some(rm_setup()?) } else { None };
            let g = load_parts(cli, rec, parts, setup.as_ref().map(|s| s.1.as_slice()))?;
            let tau: Perm = tau.parse()?;
            let c = build_concatenated(&g.inner, &g.outer, &tau)?;
            let path = out.clone().unwrap_or_else(|| out_dir.join("concatenated.txt"));
            rec.write(&path, &c.to_text())?;
            let ok = is_1perfect(&c);
            println!("rank {} kernel {} -> {}", affine_rank(&c)?, kernel(&c)?.rank, path.display());
            Ok(if ok { Outcome::Ok } else { Outcome::Failed })
        }
        ConcatCmd::Reduce { parts, limit } => {
            let (rm, orbits) = rm_setup()?;
            let canon = MCollectionCanon::new(&rm, &orbits)?;
            let g = load_parts(cli, rec, parts, Some(&orbits))?;
            let cg = inner_group(&g.inner, &canon)?;
            let pg = block_group(&g.outer)?;
            let dir = out_dir.join("reduced");
            let mut csv = String::from("file,tau,coset_size,predicted_aut,rank,kernel\n");
            let mut written = 0usize;
            let mut files = Vec::new();
            let total = for_each_reduced(&g.inner, &cg, &g.outer, &pg, |r| {
                if limit.is_some_and(|l| written >= l) {
                    return Ok(());
                }
                written += 1;
                let file = format!("code-{written:05}.txt");
                csv.push_str(&format!(
                    "{file},{},{},{},{},{}\n",
                    r.tau,
                    r.coset_size,
                    r.predicted_aut,
                    affine_rank(&r.code)?,
                    kernel(&r.code)?.rank
                ));
                files.push((file, r.code.to_text()));
                Ok(())
            })?;
            for (f, text) in files {
                rec.write(&dir.join(f), &text)?;
            }
            rec.write(&dir.join("reduced.csv"), &csv)?;
            println!(
                "|Aut C| = {} |T(C)| = {}; |Aut P| = {} |T(P)| = {}",
                cg.aut_order,
                cg.blocks.order(),
                pg.aut_order,
                pg.blocks.order()
            );
            println!("{total} double cosets, {written} codes -> {}", dir.display());
            Ok(Outcome::Ok)
        }
        ConcatCmd::Supports { input } => {
            let c = read_code(rec, input)?;
            let s = concat_supports(&c)?;
            println!("# {} supports", s.len());
            for sup in s {
                let v: Vec<String> = sup.iter().map(|i| i.to_string()).collect();
                println!("{}", v.join(" "));
            }
            Ok(Outcome::Ok)
        }
        ConcatCmd::Tabulate { inputs, aut } => {
            let codes = inputs.iter().map(|p| read_code(rec, p)).collect::<perfcodes::Result<Vec<_>>>()?;
            let t = tabulate(&codes, *aut)?;
            rec.write(&out_dir.join("rank_kernel.csv"), &t.rank_kernel_csv())?;
            print!("{}", t.rank_kernel_csv());
            if *aut {
                rec.write(&out_dir.join("aut.csv"), &t.aut_csv())?;
                print!("{}", t.aut_csv());
            }
            Ok(Outcome::Ok)
        }
    }
}

fn orbit(rec: &mut Recorder, input: &Path, parity: bool) -> Res {
    let c = read_code(rec, input)?;
    let n = c.n();
    let cert = certify_code(&c, Flavor::Full)?;
    let group: BigUint = (1..=n as u64).product::<BigUint>() * BigUint::from(6u32).pow(n as u32);
    println!("aut {}", cert.aut_order);
    println!("orbit {}", group / &cert.aut_order);
    if parity {
        if !c.is_subset(&parity_code(n))? {
            return Err(Error::Usage("code does not lie in the parity code".into()));
        }
        let (rm, orbits) = rm_setup()?;
        let t = rm.class_of(&c)?;
        println!("class {t}");
        println!("orbit_in_parity {}", orbits[t].len());
    }
    Ok(Outcome::Ok)
}
