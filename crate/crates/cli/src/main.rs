mod input;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use linker_scout_core::artifacts::{
    audit_files, read_linkers_tsv, read_scores_sizes, size_histogram, write_invariants_tsv,
    write_linkers_tsv, SCORES_FILE,
};
use linker_scout_core::evaluation::{evaluate_run, parse_gold, prf, Aggregation, Prf, RowOutcome};
use linker_scout_core::features::ComponentPolicy;
use linker_scout_core::invariants::compute_invariants;
use linker_scout_core::lpr::{discretize_lpr, extract_all};
use linker_scout_core::{run_pipeline, PipelineConfig};
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(name = "linker-scout", version, about = "Demarcate domain linkers from Cα geometry")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "LINKER_SCOUT_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster all boundary windows of a dataset and call one linker per boundary.
    Demarcate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: PathBuf,
        /// Also write intermediate matrices, dendrogram and scores under <out>/audit.
        #[arg(long)]
        audit: bool,
        /// Also write linkers.json.
        #[arg(long)]
        json: bool,
    },
    /// Score predicted linkers against reference linkers residue by residue.
    Evaluate {
        pred: PathBuf,
        gold: PathBuf,
        /// Add Jaccard overlap and agreement band columns.
        #[arg(long)]
        agreement: bool,
        #[arg(long, value_enum, default_value = "micro")]
        aggregation: AggregationArg,
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Cluster size distribution of a run (audit directory or score table).
    ClusterStats { path: PathBuf },
    /// Write the geometric invariants of every window fragment.
    DumpInvariants {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 6)]
        k: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    pdb_dir: PathBuf,
    /// Tab-separated domain table: structure id, chain, comma-separated endpoints.
    #[arg(long)]
    domains: PathBuf,
}

/// Overrides on top of `--config` (or the defaults).
#[derive(Args)]
struct ParamArgs {
    /// A run_meta.json from an earlier run, or a bare config object.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    /// variance:<theta> or fixed:<m>
    #[arg(long)]
    pc_policy: Option<ComponentPolicy>,
    #[arg(long)]
    inconsistency_depth: Option<usize>,
    #[arg(long)]
    inconsistency_cutoff: Option<f64>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum AggregationArg {
    Micro,
    Macro,
}

impl From<AggregationArg> for Aggregation {
    fn from(a: AggregationArg) -> Self {
        match a {
            AggregationArg::Micro => Aggregation::Micro,
            AggregationArg::Macro => Aggregation::Macro,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RunMeta {
    config: PipelineConfig,
    dataset_hash: String,
    components_used: usize,
    entries: usize,
    rejected: usize,
    boundaries: usize,
    tetrapeptides: usize,
    clusters: usize,
    no_linker: usize,
    version: String,
}

impl ParamArgs {
    fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            None => PipelineConfig::default(),
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let value: serde_json::Value = serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", path.display()))?;
                let inner = value.get("config").cloned().unwrap_or(value);
                serde_json::from_value(inner).with_context(|| format!("config in {}", path.display()))?
            }
        };
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(p) = self.pc_policy {
            cfg.pc_policy = p;
        }
        if let Some(d) = self.inconsistency_depth {
            cfg.inconsistency_depth = d;
        }
        if let Some(c) = self.inconsistency_cutoff {
            cfg.inconsistency_cutoff = c;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn demarcate(input: &InputArgs, params: &ParamArgs, out: &Path, audit: bool, json: bool) -> Result<ExitCode> {
    let cfg = params.resolve()?;
    let loaded = input::load(&input.pdb_dir, &input.domains, cfg.k)?;
    for (d, r) in &loaded.rejected {
        eprintln!("rejected {}:{}: {r}", d.structure_id, d.chain_id);
    }
    let run = run_pipeline(&loaded.entries, &cfg)?;

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write(&out.join("linkers.tsv"), &write_linkers_tsv(&run.calls))?;
    if json {
        write(&out.join("linkers.json"), &serde_json::to_string_pretty(&run.calls)?)?;
    }
    let mut rejections = String::from("structure_id\tchain_id\treason\n");
    for (d, r) in &loaded.rejected {
        let _ = writeln!(rejections, "{}\t{}\t{r}", d.structure_id, d.chain_id);
    }
    write(&out.join("rejections.tsv"), &rejections)?;
    if audit {
        let dir = out.join("audit");
        fs::create_dir_all(&dir)?;
        for (name, text) in audit_files(&run) {
            write(&dir.join(name), &text)?;
        }
    }
    let meta = RunMeta {
        config: cfg,
        dataset_hash: run.dataset_hash.clone(),
        components_used: run.components_used,
        entries: loaded.entries.len(),
        rejected: loaded.rejected.len(),
        boundaries: run.calls.len(),
        tetrapeptides: run.registry.len(),
        clusters: run.assignment.cluster_count(),
        no_linker: run.calls.iter().filter(|c| c.range().is_none()).count(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    write(&out.join("run_meta.json"), &serde_json::to_string_pretty(&meta)?)?;
    eprintln!(
        "{} boundaries, {} tetrapeptides, {} clusters, {} components",
        meta.boundaries, meta.tetrapeptides, meta.clusters, meta.components_used
    );
    Ok(if loaded.rejected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.4}"))
}

fn prf_line(label: &str, m: &Prf) -> String {
    format!(
        "# {label}\tprecision={}\trecall={}\tf1={}",
        fmt_opt(m.precision),
        fmt_opt(m.recall),
        fmt_opt(m.f1)
    )
}

fn evaluate(pred: &Path, gold: &Path, agreement: bool, aggregation: Aggregation, json: bool) -> Result<ExitCode> {
    let read = |p: &Path| fs::read_to_string(p).with_context(|| format!("reading {}", p.display()));
    let preds = read_linkers_tsv(&read(pred)?).with_context(|| format!("parsing {}", pred.display()))?;
    let golds = parse_gold(&read(gold)?).with_context(|| format!("parsing {}", gold.display()))?;
    let report = match evaluate_run(&preds, &golds) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("join failure: {e}");
            return Ok(ExitCode::from(2));
        }
    };

    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        let mut out = String::from("structure_id\tchain_id\tgold\tpredicted\ttp\tfp\tfn\tprecision\trecall\tf1");
        if agreement {
            out.push_str("\tjaccard\tband");
        }
        out.push('\n');
        for row in &report.rows {
            let _ = write!(out, "{}\t{}\t{}\t", row.structure_id, row.chain_id, row.gold);
            match &row.outcome {
                RowOutcome::Scored {
                    predicted,
                    counts,
                    agreement: jaccard,
                    band,
                    ..
                } => {
                    let m = prf(counts);
                    let _ = write!(
                        out,
                        "{predicted}\t{}\t{}\t{}\t{}\t{}\t{}",
                        counts.tp,
                        counts.fp,
                        counts.fn_,
                        fmt_opt(m.precision),
                        fmt_opt(m.recall),
                        fmt_opt(m.f1)
                    );
                    if agreement {
                        let _ = write!(out, "\t{jaccard:.4}\t{band}");
                    }
                }
                RowOutcome::NoLinker { .. } => {
                    out.push_str("no_linker\tNA\tNA\tNA\tNA\tNA\tNA");
                    if agreement {
                        out.push_str("\tNA\tNA");
                    }
                }
                RowOutcome::Unmatched => {
                    out.push_str("unmatched\tNA\tNA\tNA\tNA\tNA\tNA");
                    if agreement {
                        out.push_str("\tNA\tNA");
                    }
                }
            }
            out.push('\n');
        }
        let t = report.totals;
        let label = match aggregation {
            Aggregation::Micro => "micro",
            Aggregation::Macro => "macro",
        };
        let _ = writeln!(out, "# totals\ttp={}\tfp={}\tfn={}", t.tp, t.fp, t.fn_);
        let _ = writeln!(out, "{}", prf_line(label, &report.aggregate(aggregation)));
        let _ = writeln!(
            out,
            "# no_linker={}\tunmatched={}\tunused_predictions={}",
            report.no_linker, report.unmatched, report.unused_predictions
        );
        print!("{out}");
    }

    for row in report.rows.iter().filter(|r| matches!(r.outcome, RowOutcome::Unmatched)) {
        eprintln!("join failure: no call on {}:{} for gold {}", row.structure_id, row.chain_id, row.gold);
    }
    Ok(if report.unmatched == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

/// Cluster sizes from a run directory, a score table, or a `size count`
/// histogram file.
fn load_sizes(path: &Path) -> Result<Vec<usize>> {
    let file = if path.is_dir() {
        [path.join("audit").join(SCORES_FILE), path.join(SCORES_FILE)]
            .into_iter()
            .find(|p| p.is_file())
            .with_context(|| format!("no {SCORES_FILE} under {}; rerun demarcate with --audit", path.display()))?
    } else {
        path.to_path_buf()
    };
    let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
    if text.starts_with("cluster\t") {
        return Ok(read_scores_sizes(&text)?);
    }
    let mut sizes = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("{}:{}: expected `size count`", file.display(), idx + 1))?;
        let [size, count] = nums[..] else {
            bail!("{}:{}: expected `size count`", file.display(), idx + 1);
        };
        sizes.extend(std::iter::repeat(size).take(count));
    }
    Ok(sizes)
}

fn cluster_stats(path: &Path) -> Result<ExitCode> {
    let sizes = load_sizes(path)?;
    let mut out = String::from("size\tcount\n");
    for (size, count) in size_histogram(&sizes) {
        let _ = writeln!(out, "{size}\t{count}");
    }
    let _ = writeln!(out, "# clusters={}\tmembers={}", sizes.len(), sizes.iter().sum::<usize>());
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn dump_invariants(input: &InputArgs, k: usize, out: Option<&Path>) -> Result<ExitCode> {
    let loaded = input::load(&input.pdb_dir, &input.domains, k)?;
    for (d, r) in &loaded.rejected {
        eprintln!("rejected {}:{}: {r}", d.structure_id, d.chain_id);
    }
    let mut rows = Vec::new();
    for e in &loaded.entries {
        for lpr in extract_all(e, k)? {
            for t in discretize_lpr(&lpr, 0) {
                rows.push((lpr.key.to_string(), t.index, compute_invariants(&t)));
            }
        }
    }
    let text = write_invariants_tsv(rows.iter().map(|(key, i, g)| (key.clone(), *i, g)));
    match out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    Ok(if loaded.rejected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring thread pool")?;
    }
    match cli.command {
        Command::Demarcate {
            input,
            params,
            out,
            audit,
            json,
        } => demarcate(&input, &params, &out, audit, json),
        Command::Evaluate {
            pred,
            gold,
            agreement,
            aggregation,
            json,
        } => evaluate(&pred, &gold, agreement, aggregation.into(), json),
        Command::ClusterStats { path } => cluster_stats(&path),
        Command::DumpInvariants { input, k, out } => dump_invariants(&input, k, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
