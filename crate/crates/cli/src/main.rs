//! `ist`: sample graphs, build and verify independent spanning trees, and
//! run seeded sweeps.
//!
//! Exit codes: 0 ok, 1 a build or verification failed, 2 bad configuration
//! or input, 130 sweep interrupted (partial output and resume token written).

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use ist_core::gnp::{core_violations, run_gnp, MatchingCase};
use ist_core::graph::{Graph, Vertex};
use ist_core::harness::{
    read_rows, run_sweep, write_rows, Format, Model, ResumeToken, RootMode, SweepConfig,
    TreeArtifact,
};
use ist_core::random::{sample_gnp, sample_matching_family, stream_rng, GnpParams};
use ist_core::regular::{
    diameter_deletion_check, run_regular_even, run_regular_odd, DiameterConstant, RegularOptions,
};
use ist_core::verify::{max_ists, verify_ist_family, verify_strong};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "ist",
    version,
    about = "Independent spanning trees in random graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenModel {
    Gnp,
    Regular,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepModel {
    Gnp,
    RegularEven,
    RegularOdd,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph and write it out.
    Gen {
        #[arg(long, value_enum)]
        model: GenModel,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: GraphFormat,
        /// Write the colour classes instead of the union (regular only).
        #[arg(long)]
        matchings: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the G(n, p) construction once.
    BuildGnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        root: Option<Vertex>,
        /// Write the tree artifact here on success.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the regular-graph construction once (odd n uses the vertex addition).
    BuildRegular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        root: Option<Vertex>,
        #[arg(long)]
        no_anchor_gate: bool,
        /// Report direct witnesses for rerouted vertices that may stay bad.
        #[arg(long)]
        triage: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a tree artifact.
    Verify { artifact: PathBuf },
    /// Seeded Monte-Carlo sweep over a parameter grid.
    Sweep {
        #[arg(long, value_enum)]
        model: SweepModel,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        p: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        d: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fixed root; default is a uniform root per trial.
        #[arg(long, conflicts_with = "roots_per_graph")]
        root: Option<Vertex>,
        /// Try this many distinct uniform roots on every sampled graph.
        #[arg(long)]
        roots_per_graph: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "IST_WORKERS", default_value_t = 1)]
        workers: usize,
        /// Directory for tree artifacts of successful trials.
        #[arg(long)]
        artifacts: Option<PathBuf>,
        /// Continue an interrupted sweep whose partial output is at --out.
        #[arg(long, requires = "out")]
        resume: Option<String>,
        #[arg(long)]
        no_anchor_gate: bool,
        /// Record wall time per trial (output is then not reproducible).
        #[arg(long)]
        record_time: bool,
    },
    /// Diameter of random cubic-style graphs after random edge deletions.
    DiameterStudy {
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Number of deleted edges; default is ceil((ln n)^2).
        #[arg(long)]
        deletions: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the constant 4 + eps instead of 16 + eps.
        #[arg(long)]
        constant_appendix: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive maximum number of independent trees on a small graph.
    Oracle {
        /// Edge-list text or adjacency JSON.
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        root: Vertex,
    },
}

/// Errors that map to exit code 2.
#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn print_json(value: &serde_json::Value) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn write_artifact(path: &Path, artifact: &TreeArtifact) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer(BufWriter::new(file), artifact)?;
    Ok(())
}

fn read_graph(path: &Path) -> anyhow::Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        Graph::from_text(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| config_err(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> anyhow::Result<u8> {
    match command {
        Command::Gen {
            model,
            n,
            p,
            eps,
            d,
            seed,
            format,
            matchings,
            out,
        } => {
            let mut rng = stream_rng(seed, 0, 0);
            let mut w = output(out.as_deref())?;
            match model {
                GenModel::Gnp => {
                    let p = p.ok_or_else(|| config_err("--p is required for gnp"))?;
                    let graph = match eps {
                        Some(eps) => {
                            let params =
                                GnpParams::new(n, p, eps).map_err(|e| config_err(e.to_string()))?;
                            let first = sample_gnp(n, params.p1, &mut rng)?;
                            first.union(&sample_gnp(n, params.p2, &mut rng)?)
                        }
                        None => {
                            sample_gnp(n, p, &mut rng).map_err(|e| config_err(e.to_string()))?
                        }
                    };
                    write_graph(&mut w, &graph, format)?;
                }
                GenModel::Regular => {
                    let d = d.ok_or_else(|| config_err("--d is required for regular"))?;
                    let fam = sample_matching_family(n, d, &mut rng)
                        .map_err(|e| config_err(e.to_string()))?;
                    if matchings {
                        match format {
                            GraphFormat::Text => w.write_all(fam.to_text().as_bytes())?,
                            GraphFormat::Json => serde_json::to_writer(&mut w, &fam)?,
                        }
                    } else {
                        write_graph(&mut w, &fam.union_graph(), format)?;
                    }
                }
            }
            w.flush()?;
            Ok(0)
        }
        Command::BuildGnp {
            n,
            p,
            eps,
            seed,
            root,
            out,
        } => {
            let params = GnpParams::new(n, p, eps).map_err(|e| config_err(e.to_string()))?;
            if root.is_some_and(|r| r >= n) {
                return Err(config_err("root out of range"));
            }
            let mut rng = stream_rng(seed, 0, 0);
            let (layers, result) = run_gnp(&params, root, &mut rng);
            match result {
                Err(e) => {
                    print_json(&json!({
                        "model": "gnp", "seed": seed, "params": params,
                        "outcome": e.stage(), "message": e.to_string(),
                    }))?;
                    Ok(1)
                }
                Ok(build) => {
                    let union = layers.first.union(&layers.second);
                    let report = verify_ist_family(&union, build.root, &build.trees);
                    let violations = (build.case == MatchingCase::BoundaryNeighbourhoods)
                        .then(|| core_violations(&build, &layers.first));
                    print_json(&json!({
                        "model": "gnp", "seed": seed, "params": params, "root": build.root,
                        "outcome": "success", "k": build.trees.len(), "case": build.case,
                        "matched_vertices": build.matched_vertices,
                        "core_violations": violations,
                        "verified": report.ok,
                    }))?;
                    if let Some(path) = out {
                        let artifact = TreeArtifact {
                            graph: union,
                            root: build.root,
                            trees: build.trees,
                            strong: None,
                        };
                        write_artifact(&path, &artifact)?;
                    }
                    Ok(if report.ok { 0 } else { 1 })
                }
            }
        }
        Command::BuildRegular {
            n,
            d,
            seed,
            root,
            no_anchor_gate,
            triage,
            out,
        } => {
            let opts = RegularOptions {
                unique_anchor_gate: !no_anchor_gate,
                group_diameters: true,
                triage,
            };
            let mut rng = stream_rng(seed, 0, 0);
            let base = json!({ "model": if n % 2 == 0 { "regular-even" } else { "regular-odd" }, "n": n, "d": d, "seed": seed });
            let result = if n % 2 == 0 {
                run_regular_even(n, d, root, &opts, &mut rng).map(|(fam, b)| {
                    let graph = fam.union_graph();
                    let report = verify_ist_family(&graph, b.root, &b.trees);
                    let record = json!({ "root": b.root, "k": b.trees.len(), "diagnostics": b.diagnostics, "verified": report.ok });
                    (record, report.ok, TreeArtifact { graph, root: b.root, trees: b.trees, strong: None })
                })
            } else {
                run_regular_odd(n, d, root, &opts, &mut rng).map(|(fam, b)| {
                    let small = fam.union_graph();
                    let strong = verify_strong(&small, b.strong.root, &b.strong.trees, &b.matching);
                    let ist = verify_ist_family(&b.graph, b.strong.root, &b.trees);
                    let ok = strong.ok && ist.ok;
                    let record = json!({
                        "root": b.strong.root, "k": b.trees.len(), "matching": b.matching,
                        "diagnostics": b.strong.diagnostics, "verified": ist.ok, "strong_verified": strong.ok,
                    });
                    let artifact = TreeArtifact {
                        graph: b.graph,
                        root: b.strong.root,
                        trees: b.trees,
                        strong: Some(ist_core::harness::StrongArtifact { graph: small, matching: b.matching, trees: b.strong.trees }),
                    };
                    (record, ok, artifact)
                })
            };
            match result {
                Err((_, e)) => {
                    if e.failure.stage() == "domain" {
                        return Err(config_err(e.failure.to_string()));
                    }
                    let mut record = base;
                    record["outcome"] = json!(e.failure.stage());
                    record["message"] = json!(e.failure.to_string());
                    record["diagnostics"] = json!(e.diagnostics);
                    print_json(&record)?;
                    Ok(1)
                }
                Ok((extra, ok, artifact)) => {
                    let mut record = base;
                    record["outcome"] = json!("success");
                    for (k, v) in extra.as_object().expect("object") {
                        record[k] = v.clone();
                    }
                    print_json(&record)?;
                    if let Some(path) = out {
                        write_artifact(&path, &artifact)?;
                    }
                    Ok(if ok { 0 } else { 1 })
                }
            }
        }
        Command::Verify { artifact } => {
            let text = fs::read_to_string(&artifact)
                .with_context(|| format!("reading {}", artifact.display()))?;
            let a: TreeArtifact = serde_json::from_str(&text)
                .map_err(|e| config_err(format!("{}: {e}", artifact.display())))?;
            let ist = verify_ist_family(&a.graph, a.root, &a.trees);
            let strong = a
                .strong
                .as_ref()
                .map(|s| verify_strong(&s.graph, a.root, &s.trees, &s.matching));
            let ok = ist.ok && strong.as_ref().is_none_or(|s| s.ok);
            print_json(&json!({ "ok": ok, "trees": a.trees.len(), "ist": ist, "strong": strong }))?;
            Ok(if ok { 0 } else { 1 })
        }
        Command::Sweep {
            model,
            n,
            p,
            d,
            eps,
            trials,
            seed,
            root,
            roots_per_graph,
            format,
            out,
            workers,
            artifacts,
            resume,
            no_anchor_gate,
            record_time,
        } => {
            let model = match model {
                SweepModel::Gnp => Model::Gnp,
                SweepModel::RegularEven => Model::RegularEven,
                SweepModel::RegularOdd => Model::RegularOdd,
            };
            let root_mode = match (root, roots_per_graph) {
                (Some(r), _) => RootMode::Fixed(r),
                (None, Some(c)) => RootMode::AllRootsSample(c),
                (None, None) => RootMode::Random,
            };
            let format = match format {
                OutFormat::Csv => Format::Csv,
                OutFormat::Json => Format::Json,
            };
            let config = SweepConfig {
                model,
                n,
                p,
                d,
                eps,
                trials,
                seed_base: seed,
                root_mode,
                no_anchor_gate,
                record_time,
            };
            config.validate().map_err(|e| config_err(e.to_string()))?;
            let previous = match &resume {
                None => None,
                Some(token) => {
                    let token: ResumeToken = token
                        .parse()
                        .map_err(|e: ist_core::harness::HarnessError| config_err(e.to_string()))?;
                    let path = out.as_deref().expect("clap requires --out");
                    let file =
                        File::open(path).with_context(|| format!("opening {}", path.display()))?;
                    let rows = read_rows(file, format).map_err(|e| config_err(e.to_string()))?;
                    Some((token, rows))
                }
            };
            let stop = Arc::new(AtomicBool::new(false));
            let flag = Arc::clone(&stop);
            ctrlc::set_handler(move || flag.store(true, Ordering::SeqCst))
                .context("installing interrupt handler")?;
            let result = run_sweep(
                &config,
                workers,
                &stop,
                previous.as_ref().map(|(t, rows)| (t, rows.clone())),
                artifacts.is_some(),
            )
            .map_err(|e| config_err(e.to_string()))?;
            let mut w = output(out.as_deref())?;
            write_rows(&result.rows, format, &mut w)?;
            w.flush()?;
            if let Some(dir) = &artifacts {
                fs::create_dir_all(dir)?;
                for ((cell, trial), a) in &result.artifacts {
                    write_artifact(&dir.join(format!("cell{cell}_trial{trial}.json")), a)?;
                }
            }
            if let Some(token) = result.resume {
                eprintln!("interrupted; resume with --resume {token}");
                return Ok(130);
            }
            let unverified = result.rows.iter().any(|r| r.verified == Some(false));
            Ok(if unverified { 1 } else { 0 })
        }
        Command::DiameterStudy {
            n,
            d,
            eps,
            trials,
            deletions,
            seed,
            constant_appendix,
            out,
        } => {
            let deletions = deletions.unwrap_or_else(|| ((n as f64).ln().powi(2)).ceil() as usize);
            let constant = if constant_appendix {
                DiameterConstant::Four
            } else {
                DiameterConstant::Sixteen
            };
            let mut rng = stream_rng(seed, 0, 0);
            let report = diameter_deletion_check(n, d, eps, deletions, trials, constant, &mut rng)
                .map_err(|e| config_err(e.to_string()))?;
            let mut w = output(out.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
            w.flush()?;
            Ok(0)
        }
        Command::Oracle { graph, root } => {
            let g = read_graph(&graph)?;
            let (k, trees) = max_ists(&g, root).map_err(|e| config_err(e.to_string()))?;
            let report = verify_ist_family(&g, root, &trees);
            if !report.ok {
                bail!("oracle witness failed verification");
            }
            print_json(&json!({ "n": g.n(), "root": root, "max_trees": k, "witness": trees }))?;
            Ok(0)
        }
    }
}

fn write_graph(w: &mut dyn Write, graph: &Graph, format: GraphFormat) -> anyhow::Result<()> {
    match format {
        GraphFormat::Text => w.write_all(graph.to_text().as_bytes())?,
        GraphFormat::Json => {
            serde_json::to_writer(&mut *w, graph)?;
            writeln!(w)?;
        }
    }
    Ok(())
}
