use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use perfcodes::classify::ClassRegistry;
use perfcodes::Code;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perfcodes"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_reports_through_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run(d, &["gen-hamming", "--m", "2", "--out", "h.txt"]).status.code(), Some(0));
    assert_eq!(run(d, &["verify", "--in", "h.txt", "--expect", "1perfect"]).status.code(), Some(0));
    assert_eq!(run(d, &["verify", "--in", "h.txt", "--expect", "mds2"]).status.code(), Some(1));
    assert_eq!(run(d, &["verify", "--in", "nope.txt", "--expect", "mds2"]).status.code(), Some(2));
    assert_eq!(run(d, &["verify", "--in", "h.txt", "--expect", "bogus"]).status.code(), Some(2));
    assert_eq!(run(d, &["no-such-command"]).status.code(), Some(2));

    fs::write(d.join("bad.txt"), "# q=3 n=4 size=1\n0120x\n").unwrap();
    assert_eq!(run(d, &["rank", "--in", "bad.txt"]).status.code(), Some(2));
}

#[test]
fn rank_and_kernel_of_hamming_13() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["gen-hamming", "--m", "3", "--out", "h.txt"]);
    assert_eq!(stdout(&run(d, &["rank", "--in", "h.txt"])).trim(), "rank 10");
    let o = run(d, &["kernel", "--in", "h.txt", "--out", "k.txt"]);
    assert_eq!(stdout(&o).trim(), "kernel 10");
    let k = Code::from_text(&fs::read_to_string(d.join("k.txt")).unwrap()).unwrap();
    let h = Code::from_text(&fs::read_to_string(d.join("h.txt")).unwrap()).unwrap();
    assert_eq!(k, h);
}

#[test]
fn rank1_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["rank1-count", "--m", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("fixed_span 1352605460594256"));
    assert!(s.contains("all 9982462029409199967436800"));
    assert!(s.contains("classes_at_least 9942054"));
}

#[test]
fn p4_registry() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = run(d, &["--out-dir", "out", "classify", "p4"]);
    assert_eq!(o.status.code(), Some(0));
    let reg = ClassRegistry::load(&d.join("out/p4")).unwrap();
    let mut sizes: Vec<u64> = reg.entries().iter().map(|e| e.counts["partitions"]).collect();
    sizes.sort_unstable();
    assert_eq!(sizes, [8, 96]);
    let files = fs::read_dir(d.join("out/p4")).unwrap().count();
    assert_eq!(files, 3);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("out/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["format"], "perfcodes-manifest/1");
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 3);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (threads, out) in [("1", "a"), ("2", "b")] {
        let o = run(d, &["--threads", threads, "--out-dir", out, "--seed", "9", "rank1-build", "--m", "3"]);
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["rank1-m3.txt", "assignment-m3-seed9.json", "manifest.json"] {
        let a = fs::read(d.join("a").join(f)).unwrap();
        let b = fs::read(d.join("b").join(f)).unwrap();
        if f == "manifest.json" {
            // only the output directory differs
            let s = String::from_utf8(a).unwrap().replace("\"a\"", "\"b\"");
            assert_eq!(s.into_bytes(), b);
        } else {
            assert_eq!(a, b, "{f} differs");
        }
    }
}

#[test]
fn switching_between_two_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["--seed", "1", "rank1-build", "--m", "3", "--out", "a.txt"]);
    run(d, &["--seed", "2", "rank1-build", "--m", "3", "--out", "b.txt"]);
    let o = run(d, &["--out-dir", "p", "switch-path", "--from", "a.txt", "--to", "b.txt", "--m", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let steps: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("p/switch-path/path.json")).unwrap()).unwrap();
    let steps = steps.as_array().unwrap();
    assert!(!steps.is_empty());
    let last = steps.last().unwrap()["file"].as_str().unwrap();
    let end = fs::read_to_string(d.join("p/switch-path").join(last)).unwrap();
    assert_eq!(Code::from_text(&end).unwrap(), Code::from_text(&fs::read_to_string(d.join("b.txt")).unwrap()).unwrap());
}

#[test]
fn concatenated_code_from_coset_partitions() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["--out-dir", "out", "classify", "p4"]);
    let reg = ClassRegistry::load(&d.join("out/p4")).unwrap();
    let outer = d.join("outer.txt");
    fs::write(&outer, reg.entries()[0].rep.to_text()).unwrap();
    let o = run(
        d,
        &["concat", "build", "--outer", "outer.txt", "--tau", "0 1 2 3 4 5 6 7 8", "--out", "c.txt"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(run(d, &["verify", "--in", "c.txt", "--expect", "1perfect"]).status.code(), Some(0));
    let o = run(d, &["--out-dir", "t", "concat", "tabulate", "--in", "c.txt"]);
    let csv = fs::read_to_string(d.join("t/rank_kernel.csv")).unwrap();
    assert_eq!(stdout(&o), csv);
    assert!(csv.lines().any(|l| l == "10,0,0,0,0,0,0,0,0,0,0,1"));
    let o = run(d, &["concat", "supports", "--in", "c.txt"]);
    assert!(stdout(&o).starts_with("# 13 supports"));
}

#[test]
fn double_cosets_of_small_groups() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["dcosets", "--degree", "3", "--left", "1 0 2", "--right", "0 2 1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let sizes: usize = s
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').nth(1).unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(sizes, 6);
    let bad = run(dir.path(), &["dcosets", "--degree", "3", "--left", "1 0"]);
    assert_eq!(bad.status.code(), Some(2));
}
