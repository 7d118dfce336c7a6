//! Seeded Monte-Carlo sweeps over the constructions.
//!
//! Every trial draws from its own stream keyed by `(seed_base, cell, trial)`,
//! so results do not depend on worker count or on other cells. Rows come out
//! ordered by `(cell, trial)` followed by one summary row per cell.

use std::io::Write;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::gnp::{build_ists_gnp, core_violations, GnpLayers, MatchingCase};
use crate::graph::{Edge, Graph, RootedTree, Vertex, VertexOrder};
use crate::random::{
    sample_gnp, sample_matching_family, stream_rng, GnpParams, MatchingFamily, TrialRng,
};
use crate::regular::{
    build_ists_regular_even, build_ists_regular_odd, RegularDiagnostics, RegularError,
    RegularOptions, RegularParams,
};
use crate::verify::{verify_ist_family, verify_strong};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Gnp,
    RegularEven,
    RegularOdd,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Gnp => "gnp",
            Model::RegularEven => "regular-even",
            Model::RegularOdd => "regular-odd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootMode {
    /// One uniform root per trial.
    Random,
    Fixed(Vertex),
    /// Up to this many distinct uniform roots on the same sampled graph.
    AllRootsSample(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid sweep configuration: {0}")]
    Config(String),
    #[error("resume token does not match this configuration")]
    ResumeMismatch,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub model: Model,
    pub n: Vec<usize>,
    /// Edge probabilities (G(n, p) only).
    #[serde(default)]
    pub p: Vec<f64>,
    /// Degrees (regular models only).
    #[serde(default)]
    pub d: Vec<usize>,
    /// Slack values (G(n, p) only).
    #[serde(default)]
    pub eps: Vec<f64>,
    pub trials: usize,
    pub seed_base: u64,
    pub root_mode: RootMode,
    /// Skip the unique-anchor gate in the regular pipelines.
    #[serde(default)]
    pub no_anchor_gate: bool,
    /// Record wall time per trial (makes output non-reproducible).
    #[serde(default)]
    pub record_time: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        match self.model {
            Model::Gnp if !self.d.is_empty() => bad("degree grid given for gnp"),
            Model::RegularEven | Model::RegularOdd
                if !self.p.is_empty() || !self.eps.is_empty() =>
            {
                bad("p or eps grid given for a regular model")
            }
            _ if self.p.iter().chain(&self.eps).any(|x| !x.is_finite()) => {
                bad("non-finite grid value")
            }
            _ => Ok(()),
        }
    }

    /// Cells in grid order: `n` outermost, then `p` or `d`, then `eps`.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &n in &self.n {
            match self.model {
                Model::Gnp => {
                    for &p in &self.p {
                        for &eps in &self.eps {
                            out.push(Cell {
                                index: out.len(),
                                n,
                                p: Some(p),
                                eps: Some(eps),
                                d: None,
                            });
                        }
                    }
                }
                Model::RegularEven | Model::RegularOdd => {
                    for &d in &self.d {
                        out.push(Cell {
                            index: out.len(),
                            n,
                            p: None,
                            eps: None,
                            d: Some(d),
                        });
                    }
                }
            }
        }
        out
    }

    /// Hex digest of the fields that determine the output.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    pub n: usize,
    pub p: Option<f64>,
    pub eps: Option<f64>,
    pub d: Option<usize>,
}

/// One table row. Trial rows leave the summary columns empty and vice versa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    /// `trial` or `summary`.
    pub kind: String,
    pub model: String,
    pub cell: usize,
    pub trial: Option<usize>,
    pub n: usize,
    pub p: Option<f64>,
    pub d: Option<usize>,
    pub eps: Option<f64>,
    pub seed: Option<u64>,
    pub root: Option<Vertex>,
    /// `success` or the failing stage.
    pub outcome: Option<String>,
    pub message: Option<String>,
    /// Trees produced on success.
    pub k: Option<usize>,
    pub verified: Option<bool>,
    pub bad_vertices: Option<usize>,
    pub unsafe_vertices: Option<usize>,
    pub max_height: Option<usize>,
    pub max_group_diameter: Option<usize>,
    pub core_violations: Option<usize>,
    pub roots_tried: Option<usize>,
    pub root_success_fraction: Option<f64>,
    pub wall_ms: Option<u64>,
    pub trials: Option<usize>,
    pub successes: Option<usize>,
    pub success_fraction: Option<f64>,
    pub mean_bad_vertices: Option<f64>,
    pub mean_unsafe_vertices: Option<f64>,
    pub mean_max_height: Option<f64>,
}

impl TrialResult {
    fn blank(kind: &str, model: Model, cell: &Cell) -> Self {
        TrialResult {
            kind: kind.into(),
            model: model.name().into(),
            cell: cell.index,
            trial: None,
            n: cell.n,
            p: cell.p,
            d: cell.d,
            eps: cell.eps,
            seed: None,
            root: None,
            outcome: None,
            message: None,
            k: None,
            verified: None,
            bad_vertices: None,
            unsafe_vertices: None,
            max_height: None,
            max_group_diameter: None,
            core_violations: None,
            roots_tried: None,
            root_success_fraction: None,
            wall_ms: None,
            trials: None,
            successes: None,
            success_fraction: None,
            mean_bad_vertices: None,
            mean_unsafe_vertices: None,
            mean_max_height: None,
        }
    }

    pub fn is_success(&self) -> bool {
        self.outcome.as_deref() == Some("success")
    }
}

/// Pre-extension data of an odd-order success.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongArtifact {
    pub graph: Graph,
    pub matching: Vec<Edge>,
    pub trees: Vec<RootedTree>,
}

/// Everything needed to re-verify a success.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeArtifact {
    pub graph: Graph,
    pub root: Vertex,
    pub trees: Vec<RootedTree>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strong: Option<StrongArtifact>,
}

impl TreeArtifact {
    /// Re-runs the IST check, and the strong check when present.
    pub fn reverify(&self) -> bool {
        let ist = verify_ist_family(&self.graph, self.root, &self.trees).ok;
        let strong = self
            .strong
            .as_ref()
            .is_none_or(|s| verify_strong(&s.graph, self.root, &s.trees, &s.matching).ok);
        ist && strong
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRun {
    pub row: TrialResult,
    pub artifact: Option<TreeArtifact>,
}

enum Instance {
    Gnp {
        params: GnpParams,
        layers: GnpLayers,
        union: Graph,
    },
    Even {
        fam: MatchingFamily,
        union: Graph,
    },
    Odd {
        fam: MatchingFamily,
    },
}

impl Instance {
    fn root_range(&self) -> usize {
        match self {
            Instance::Gnp { params, .. } => params.n,
            Instance::Even { fam, .. } | Instance::Odd { fam } => fam.n,
        }
    }
}

struct Attempt {
    stage: String,
    message: Option<String>,
    k: Option<usize>,
    verified: Option<bool>,
    diagnostics: Option<RegularDiagnostics>,
    max_height: Option<usize>,
    core_violations: Option<usize>,
    artifact: Option<TreeArtifact>,
}

impl Attempt {
    fn failed(stage: &str, message: String) -> Self {
        Attempt {
            stage: stage.into(),
            message: Some(message),
            k: None,
            verified: None,
            diagnostics: None,
            max_height: None,
            core_violations: None,
            artifact: None,
        }
    }

    fn from_regular(e: RegularError) -> Self {
        let mut a = Attempt::failed(e.failure.stage(), e.failure.to_string());
        a.max_height = e
            .diagnostics
            .as_ref()
            .and_then(|d| d.heights.iter().copied().max());
        a.diagnostics = e.diagnostics.map(|d| *d);
        a
    }
}

fn sample_instance(
    cell: &Cell,
    model: Model,
    rng: &mut TrialRng,
) -> Result<Instance, Box<Attempt>> {
    let domain = |m: String| Box::new(Attempt::failed("domain", m));
    match model {
        Model::Gnp => {
            let p = cell.p.ok_or_else(|| domain("missing p".into()))?;
            let eps = cell.eps.ok_or_else(|| domain("missing eps".into()))?;
            let params = GnpParams::new(cell.n, p, eps).map_err(|e| domain(e.to_string()))?;
            let first = sample_gnp(cell.n, params.p1, rng).map_err(|e| domain(e.to_string()))?;
            let second = sample_gnp(cell.n, params.p2, rng).map_err(|e| domain(e.to_string()))?;
            let union = first.union(&second);
            Ok(Instance::Gnp {
                params,
                layers: GnpLayers { first, second },
                union,
            })
        }
        Model::RegularEven | Model::RegularOdd => {
            let d = cell.d.ok_or_else(|| domain("missing d".into()))?;
            let n = cell.n;
            let odd = model == Model::RegularOdd;
            if odd && (n.is_multiple_of(2) || d % 2 != 0) {
                return Err(domain(format!(
                    "odd pipeline needs odd n and even d, got n = {n}, d = {d}"
                )));
            }
            if !odd && !n.is_multiple_of(2) {
                return Err(domain(format!("even pipeline needs even n, got {n}")));
            }
            RegularParams::new(n, d)
                .map_err(|e| Box::new(Attempt::failed(e.stage(), e.to_string())))?;
            let size = if odd { n - 1 } else { n };
            let fam = sample_matching_family(size, d, rng)
                .map_err(|e| Box::new(Attempt::failed("sampling", e.to_string())))?;
            if odd {
                Ok(Instance::Odd { fam })
            } else {
                let union = fam.union_graph();
                Ok(Instance::Even { fam, union })
            }
        }
    }
}

fn attempt(
    instance: &Instance,
    root: Vertex,
    opts: &RegularOptions,
    rng: &mut TrialRng,
) -> Attempt {
    match instance {
        Instance::Gnp {
            params,
            layers,
            union,
        } => {
            match build_ists_gnp(
                &layers.first,
                &layers.second,
                params,
                root,
                &VertexOrder::Natural,
            ) {
                Err(e) => Attempt::failed(e.stage(), e.to_string()),
                Ok(b) => {
                    let verified =
                        b.trees.len() == params.k() && verify_ist_family(union, root, &b.trees).ok;
                    let violations = (b.case == MatchingCase::BoundaryNeighbourhoods)
                        .then(|| core_violations(&b, &layers.first).len());
                    Attempt {
                        stage: "success".into(),
                        message: None,
                        k: Some(b.trees.len()),
                        verified: Some(verified),
                        diagnostics: None,
                        max_height: b.trees.iter().filter_map(RootedTree::height).max(),
                        core_violations: violations,
                        artifact: Some(TreeArtifact {
                            graph: union.clone(),
                            root,
                            trees: b.trees,
                            strong: None,
                        }),
                    }
                }
            }
        }
        Instance::Even { fam, union } => {
            match build_ists_regular_even(fam, root, &VertexOrder::Natural, opts) {
                Err(e) => Attempt::from_regular(e),
                Ok(b) => {
                    let verified =
                        b.trees.len() == fam.d() / 4 && verify_ist_family(union, root, &b.trees).ok;
                    Attempt {
                        stage: "success".into(),
                        message: None,
                        k: Some(b.trees.len()),
                        verified: Some(verified),
                        max_height: b.diagnostics.heights.iter().copied().max(),
                        diagnostics: Some(b.diagnostics),
                        core_violations: None,
                        artifact: Some(TreeArtifact {
                            graph: union.clone(),
                            root,
                            trees: b.trees,
                            strong: None,
                        }),
                    }
                }
            }
        }
        Instance::Odd { fam } => match build_ists_regular_odd(fam, root, opts, rng) {
            Err(e) => Attempt::from_regular(e),
            Ok(b) => {
                let strong = StrongArtifact {
                    graph: fam.union_graph(),
                    matching: b.matching.clone(),
                    trees: b.strong.trees.clone(),
                };
                let artifact = TreeArtifact {
                    graph: b.graph,
                    root,
                    trees: b.trees,
                    strong: Some(strong),
                };
                let verified = artifact.trees.len() == fam.d() / 4 && artifact.reverify();
                Attempt {
                    stage: "success".into(),
                    message: None,
                    k: Some(artifact.trees.len()),
                    verified: Some(verified),
                    max_height: b.strong.diagnostics.heights.iter().copied().max(),
                    diagnostics: Some(b.strong.diagnostics),
                    core_violations: None,
                    artifact: Some(artifact),
                }
            }
        },
    }
}

/// Runs trial `trial` of `cell`. A pure function of its arguments.
pub fn run_trial(config: &SweepConfig, cell: &Cell, trial: usize) -> TrialRun {
    let start = Instant::now();
    let seed = crate::random::stream_seed(config.seed_base, cell.index as u64, trial as u64);
    let mut rng = stream_rng(config.seed_base, cell.index as u64, trial as u64);
    let opts = RegularOptions {
        unique_anchor_gate: !config.no_anchor_gate,
        group_diameters: true,
        triage: false,
    };
    let mut row = TrialResult::blank("trial", config.model, cell);
    row.trial = Some(trial);
    row.seed = Some(seed);
    let mut artifact = None;
    match sample_instance(cell, config.model, &mut rng) {
        Err(a) => {
            row.outcome = Some(a.stage);
            row.message = a.message;
        }
        Ok(instance) => {
            let range = instance.root_range();
            let roots: Vec<Vertex> = match config.root_mode {
                RootMode::Random => vec![rng.random_range(0..range)],
                RootMode::Fixed(r) => vec![r],
                RootMode::AllRootsSample(c) => {
                    let mut r = sample(&mut rng, range, c.clamp(1, range)).into_vec();
                    r.sort_unstable();
                    r
                }
            };
            let mut attempts = Vec::with_capacity(roots.len());
            for &r in &roots {
                let a = if r >= range {
                    Attempt::failed("domain", format!("root {r} out of range"))
                } else {
                    attempt(&instance, r, &opts, &mut rng)
                };
                attempts.push(a);
            }
            let successes = attempts.iter().filter(|a| a.stage == "success").count();
            let shown = attempts
                .iter()
                .find(|a| a.stage != "success")
                .unwrap_or(&attempts[0]);
            row.root = Some(roots[0]);
            row.outcome = Some(shown.stage.clone());
            row.message = shown.message.clone();
            row.k = shown.k;
            row.verified = shown.verified;
            if let Some(d) = &shown.diagnostics {
                row.bad_vertices = Some(d.bad_vertices);
                row.unsafe_vertices = Some(d.unsafe_vertices);
                row.max_group_diameter = d
                    .group_diameters
                    .as_ref()
                    .and_then(|g| g.iter().flatten().copied().max());
            }
            row.max_height = shown.max_height;
            row.core_violations = shown.core_violations;
            if matches!(config.root_mode, RootMode::AllRootsSample(_)) {
                row.roots_tried = Some(roots.len());
                row.root_success_fraction = Some(successes as f64 / roots.len() as f64);
            }
            if successes == attempts.len() {
                artifact = attempts.swap_remove(0).artifact;
            }
        }
    }
    if config.record_time {
        row.wall_ms = Some(start.elapsed().as_millis() as u64);
    }
    TrialRun { row, artifact }
}

/// Per-cell summary of trial rows.
pub fn summarize(model: Model, cell: &Cell, rows: &[TrialResult]) -> TrialResult {
    let mut s = TrialResult::blank("summary", model, cell);
    let successes = rows.iter().filter(|r| r.is_success()).count();
    let mean = |f: fn(&TrialResult) -> Option<usize>| {
        let vals: Vec<usize> = rows.iter().filter_map(f).collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<usize>() as f64 / vals.len() as f64)
    };
    s.trials = Some(rows.len());
    s.successes = Some(successes);
    s.success_fraction = (!rows.is_empty()).then(|| successes as f64 / rows.len() as f64);
    s.mean_bad_vertices = mean(|r| r.bad_vertices);
    s.mean_unsafe_vertices = mean(|r| r.unsafe_vertices);
    s.mean_max_height = mean(|r| r.max_height);
    s
}

/// Where an interrupted sweep stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResumeToken {
    pub digest: String,
    /// Number of trials (in global order) already completed.
    pub next: usize,
}

impl std::fmt::Display for ResumeToken {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.digest, self.next)
    }
}

impl std::str::FromStr for ResumeToken {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (digest, next) = s
            .split_once(':')
            .ok_or_else(|| HarnessError::Config(format!("malformed resume token {s:?}")))?;
        let next = next
            .parse()
            .map_err(|_| HarnessError::Config(format!("malformed resume token {s:?}")))?;
        Ok(ResumeToken {
            digest: digest.to_string(),
            next,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    /// Trial rows in `(cell, trial)` order, then summary rows when complete.
    pub rows: Vec<TrialResult>,
    /// Artifacts of successful trials, keyed by `(cell, trial)`.
    pub artifacts: Vec<((usize, usize), TreeArtifact)>,
    /// Present when the sweep was interrupted.
    pub resume: Option<ResumeToken>,
}

/// Runs the sweep on `workers` threads.
///
/// `previous` holds trial rows from an interrupted run and must match
/// `resume`. The `stop` flag is checked between batches; when it is set the
/// completed prefix is returned with a resume token.
pub fn run_sweep(
    config: &SweepConfig,
    workers: usize,
    stop: &AtomicBool,
    resume: Option<(&ResumeToken, Vec<TrialResult>)>,
    keep_artifacts: bool,
) -> Result<SweepOutput, HarnessError> {
    config.validate()?;
    let cells = config.cells();
    let total = cells.len() * config.trials;
    let (mut rows, start) = match resume {
        None => (Vec::new(), 0),
        Some((token, prev)) => {
            if token.digest != config.digest() || token.next != prev.len() || token.next > total {
                return Err(HarnessError::ResumeMismatch);
            }
            (prev, token.next)
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let batch = workers.max(1) * 4;
    let mut artifacts = Vec::new();
    let mut next = start;
    while next < total {
        if stop.load(Ordering::SeqCst) {
            return Ok(SweepOutput {
                rows,
                artifacts,
                resume: Some(ResumeToken {
                    digest: config.digest(),
                    next,
                }),
            });
        }
        let end = (next + batch).min(total);
        let runs: Vec<TrialRun> = pool.install(|| {
            (next..end)
                .into_par_iter()
                .map(|g| run_trial(config, &cells[g / config.trials], g % config.trials))
                .collect()
        });
        for run in runs {
            if keep_artifacts {
                if let (Some(a), Some(t)) = (run.artifact, run.row.trial) {
                    artifacts.push(((run.row.cell, t), a));
                }
            }
            rows.push(run.row);
        }
        next = end;
    }
    for cell in &cells {
        let lo = cell.index * config.trials;
        let summary = summarize(config.model, cell, &rows[lo..lo + config.trials]);
        rows.push(summary);
    }
    Ok(SweepOutput {
        rows,
        artifacts,
        resume: None,
    })
}

pub fn write_rows<W: Write>(
    rows: &[TrialResult],
    format: Format,
    out: W,
) -> Result<(), HarnessError> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(out);
            w.write_record(CSV_COLUMNS)?;
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn read_rows<R: std::io::Read>(
    input: R,
    format: Format,
) -> Result<Vec<TrialResult>, HarnessError> {
    match format {
        Format::Csv => {
            let mut r = csv::Reader::from_reader(input);
            Ok(r.deserialize().collect::<Result<_, _>>()?)
        }
        Format::Json => Ok(serde_json::from_reader(input)?),
    }
}

/// Column order of CSV output (the field order of [`TrialResult`]).
pub const CSV_COLUMNS: [&str; 28] = [
    "kind",
    "model",
    "cell",
    "trial",
    "n",
    "p",
    "d",
    "eps",
    "seed",
    "root",
    "outcome",
    "message",
    "k",
    "verified",
    "bad_vertices",
    "unsafe_vertices",
    "max_height",
    "max_group_diameter",
    "core_violations",
    "roots_tried",
    "root_success_fraction",
    "wall_ms",
    "trials",
    "successes",
    "success_fraction",
    "mean_bad_vertices",
    "mean_unsafe_vertices",
    "mean_max_height",
];
