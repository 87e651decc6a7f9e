use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_linker-scout"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn demarcate(out: &Path, extra: &[&str]) -> Output {
    let smoke = fixtures().join("smoke");
    run(bin()
        .arg("demarcate")
        .arg("--pdb-dir")
        .arg(smoke.join("pdb"))
        .arg("--domains")
        .arg(smoke.join("domains.tsv"))
        .arg("--out")
        .arg(out)
        .args(extra))
}

fn meta(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("run_meta.json")).unwrap()).unwrap()
}

#[test]
fn smoke_run_writes_one_row_per_boundary() {
    let tmp = TempDir::new().unwrap();
    let o = demarcate(tmp.path(), &["--audit", "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let linkers = std::fs::read_to_string(tmp.path().join("linkers.tsv")).unwrap();
    let rows: Vec<&str> = linkers.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        let f: Vec<&str> = row.split('\t').collect();
        let (boundary, start, end): (i32, i32, i32) =
            (f[2].parse().unwrap(), f[3].parse().unwrap(), f[4].parse().unwrap());
        assert_eq!(end - start + 1, 12);
        assert_eq!(start, boundary - 5);
    }
    let m = meta(tmp.path());
    assert_eq!(m["config"]["k"], 6);
    assert_eq!(m["tetrapeptides"], 27);
    assert!(tmp.path().join("linkers.json").is_file());
    assert!(tmp.path().join("audit/cluster_scores.tsv").is_file());

    let stats = run(bin().arg("cluster-stats").arg(tmp.path()));
    assert!(stats.status.success());
    assert!(stdout(&stats).contains("members=27"));
}

#[test]
fn fixed_policy_recorded_and_config_round_trips() {
    let a = TempDir::new().unwrap();
    let o = demarcate(a.path(), &["--pc-policy", "fixed:8", "--audit"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = meta(a.path());
    assert_eq!(m["components_used"], 8);
    assert_eq!(m["config"]["pc_policy"]["kind"], "fixed");
    assert_eq!(m["config"]["pc_policy"]["value"], 8);

    let b = TempDir::new().unwrap();
    let cfg = a.path().join("run_meta.json");
    let o = demarcate(b.path(), &["--config", cfg.to_str().unwrap(), "--audit", "--threads", "1"]);
    assert!(o.status.success());
    for name in ["linkers.tsv", "run_meta.json", "audit/assignments.tsv", "audit/profiles.tsv"] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name} differs"
        );
    }
}

#[test]
fn rejections_give_exit_two() {
    let tmp = TempDir::new().unwrap();
    let smoke = fixtures().join("smoke");
    let mut domains = std::fs::read_to_string(smoke.join("domains.tsv")).unwrap();
    domains.push_str("syn000\tB\t50,100\n");
    let table = tmp.path().join("domains.tsv");
    std::fs::write(&table, domains).unwrap();
    let out = tmp.path().join("out");
    let o = run(bin()
        .arg("demarcate")
        .arg("--pdb-dir")
        .arg(smoke.join("pdb"))
        .arg("--domains")
        .arg(&table)
        .arg("--out")
        .arg(&out));
    assert_eq!(o.status.code(), Some(2));
    let rejections = std::fs::read_to_string(out.join("rejections.tsv")).unwrap();
    assert!(rejections.contains("syn000\tB\tchain not found"));
    assert_eq!(std::fs::read_to_string(out.join("linkers.tsv")).unwrap().lines().count(), 4);
}

#[test]
fn unreadable_input_is_a_hard_error() {
    let tmp = TempDir::new().unwrap();
    let o = run(bin()
        .arg("demarcate")
        .arg("--pdb-dir")
        .arg(tmp.path().join("missing"))
        .arg("--domains")
        .arg(fixtures().join("smoke/domains.tsv"))
        .arg("--out")
        .arg(tmp.path()));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

fn range(s: &str) -> (i32, i32) {
    let (a, b) = s.split_once('-').unwrap();
    (a.parse().unwrap(), b.parse().unwrap())
}

fn pred_row(id: &str, pred: Option<(i32, i32)>, boundary: i32) -> String {
    let k = 12;
    match pred {
        Some((s, e)) => format!(
            "{id}\tA\t{boundary}\t{}\t{}\tlinker\t{s}\t{e}\t1.0000\n",
            boundary - k + 1,
            boundary + k
        ),
        None => format!(
            "{id}\tA\t{boundary}\t{}\t{}\tno_linker\tNA\tNA\tNA\n",
            boundary - k + 1,
            boundary + k
        ),
    }
}

/// Pred and gold files for the published linker table, plus the
/// set-arithmetic totals.
fn benchmark_files(dir: &Path) -> (PathBuf, PathBuf, (usize, usize, usize)) {
    let text = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/benchmark_linkers.tsv"),
    )
    .unwrap();
    let mut pred = String::new();
    let mut gold = String::new();
    let mut totals = (0, 0, 0);
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let f: Vec<&str> = line.split('\t').collect();
        let (g, p) = (range(f[1]), range(f[2]));
        pred.push_str(&pred_row(f[0], Some(p), (p.0 + p.1) / 2));
        let _ = writeln!(gold, "{}\tA\t{}\t{}", f[0], g.0, g.1);
        let gs: std::collections::HashSet<i32> = (g.0..=g.1).collect();
        let ps: std::collections::HashSet<i32> = (p.0..=p.1).collect();
        totals.0 += gs.intersection(&ps).count();
        totals.1 += ps.difference(&gs).count();
        totals.2 += gs.difference(&ps).count();
    }
    let (pp, gp) = (dir.join("pred.tsv"), dir.join("gold.tsv"));
    std::fs::write(&pp, pred).unwrap();
    std::fs::write(&gp, gold).unwrap();
    (pp, gp, totals)
}

#[test]
fn evaluate_published_table() {
    let tmp = TempDir::new().unwrap();
    let (pred, gold, (tp, fp, fn_)) = benchmark_files(tmp.path());
    let o = run(bin().arg("evaluate").arg(&pred).arg(&gold).arg("--agreement"));
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains(&format!("# totals\ttp={tp}\tfp={fp}\tfn={fn_}")), "{text}");
    assert!(text.contains("1h03\tA\t65-68\t64-70\t4\t3\t0\t"));
    assert!(text.contains("1fcd\tA\t76-84\t77-80\t4\t0\t5\t"));
    let p = tp as f64 / (tp + fp) as f64;
    let r = tp as f64 / (tp + fn_) as f64;
    assert!(text.contains(&format!("f1={:.4}", 2.0 * p * r / (p + r))));

    let json = run(bin().arg("evaluate").arg(&pred).arg(&gold).arg("--json"));
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["totals"]["tp"], tp);
    assert_eq!(v["totals"]["fn"], fn_);
}

#[test]
fn evaluate_identical_and_no_linker() {
    let tmp = TempDir::new().unwrap();
    let pred = tmp.path().join("pred.tsv");
    let gold = tmp.path().join("gold.tsv");
    let mut p = String::new();
    p.push_str(&pred_row("1abc", Some((98, 103)), 100));
    p.push_str(&pred_row("2xyz", None, 60));
    std::fs::write(&pred, p).unwrap();
    std::fs::write(&gold, "1abc\tA\t98\t103\n2xyz\tA\t58\t62\n").unwrap();
    let o = run(bin().arg("evaluate").arg(&pred).arg(&gold));
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("precision=1.0000\trecall=1.0000\tf1=1.0000"), "{text}");
    assert!(text.contains("# totals\ttp=6\tfp=0\tfn=0"));
    assert!(text.contains("no_linker=1"));

    std::fs::write(&gold, "1abc\tA\t98\t103\n3new\tA\t10\t15\n").unwrap();
    let o = run(bin().arg("evaluate").arg(&pred).arg(&gold));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cluster_stats_histograms() {
    let tmp = TempDir::new().unwrap();
    let scores = tmp.path().join("cluster_scores.tsv");
    std::fs::write(&scores, "cluster\tsize\tevalue\tsus\n0\t1\t0\t0\n1\t1\t0\t0\n2\t2\t0\t0\n").unwrap();
    let o = run(bin().arg("cluster-stats").arg(&scores));
    assert_eq!(stdout(&o), "size\tcount\n1\t2\n2\t1\n# clusters=3\tmembers=4\n");

    let histogram = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/cluster_sizes.tsv");
    let o = run(bin().arg("cluster-stats").arg(histogram));
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("# clusters=2188\tmembers=6525\n"));

    let o = run(bin().arg("cluster-stats").arg(tmp.path().join("nope")));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dump_invariants_lists_every_fragment() {
    let smoke = fixtures().join("smoke");
    let o = run(bin()
        .arg("dump-invariants")
        .arg("--pdb-dir")
        .arg(smoke.join("pdb"))
        .arg("--domains")
        .arg(smoke.join("domains.tsv")));
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 28);
    assert!(text.starts_with("lpr_ref\tindex\tsigned_volume\tperimeter"));
}
