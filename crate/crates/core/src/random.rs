//! Seeded samplers for the random models: G(n,p), the sprinkling split,
//! perfect matchings and edge-disjoint matching families, the random overlay
//! model, and uniform random regular graphs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{edge, Edge, Graph, GraphError, Vertex};

/// Generator used for every trial: ChaCha with 8 rounds.
pub type TrialRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RandomError {
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("{what}: gave up after {attempts} restarts")]
    SamplingFailed { what: &'static str, attempts: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the stream for `(seed_base, cell, trial)`.
///
/// Each coordinate is folded in through a SplitMix64 round, so streams of
/// distinct triples are unrelated and adding cells never shifts old ones.
pub fn stream_seed(seed_base: u64, cell: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed_base) ^ cell) ^ trial.rotate_left(32))
}

pub fn stream_rng(seed_base: u64, cell: u64, trial: u64) -> TrialRng {
    TrialRng::seed_from_u64(stream_seed(seed_base, cell, trial))
}

/// Parameters of a sprinkled G(n,p) experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnpParams {
    pub n: usize,
    pub p: f64,
    pub eps: f64,
    pub p1: f64,
    pub p2: f64,
}

impl GnpParams {
    pub fn new(n: usize, p: f64, eps: f64) -> Result<Self, RandomError> {
        if n < 2 {
            return Err(RandomError::Domain(format!("need n >= 2, got {n}")));
        }
        let (p1, p2) = sprinkle_split(p, eps)?;
        Ok(GnpParams { n, p, eps, p1, p2 })
    }

    /// Number of trees sought: `ceil((1 - eps) n p)`.
    pub fn k(&self) -> usize {
        ceil_tol((1.0 - self.eps) * self.n as f64 * self.p)
    }

    /// Core set size `ceil(eps / 3p)`.
    pub fn core_size(&self) -> usize {
        ceil_tol(self.eps / (3.0 * self.p))
    }

    /// Lower bound `ceil(eps / 6p)` on boundary sizes.
    pub fn boundary_floor(&self) -> usize {
        ceil_tol(self.eps / (6.0 * self.p))
    }

    /// Core sets are singletons exactly when `eps < 3p` (up to rounding noise).
    pub fn singleton_cores(&self) -> bool {
        self.eps < 3.0 * self.p * (1.0 - 1e-9)
    }
}

/// Ceiling that ignores floating-point noise just above an integer.
pub(crate) fn ceil_tol(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r.max(0.0) as usize
    } else {
        x.ceil().max(0.0) as usize
    }
}

/// Splits `p` into `(p1, p2)` with `(1 - p1)(1 - p2) = 1 - p`.
///
/// `p1 = 0.01 eps^2 p / (1 - p + 0.01 eps^2 p)` and `p2 = (1 - 0.01 eps^2) p`.
pub fn sprinkle_split(p: f64, eps: f64) -> Result<(f64, f64), RandomError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(RandomError::Domain(format!("p must lie in (0,1), got {p}")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(RandomError::Domain(format!(
            "eps must lie in (0,1/2), got {eps}"
        )));
    }
    let a = 0.01 * eps * eps * p;
    let p1 = a / (1.0 - p + a);
    let p2 = (1.0 - 0.01 * eps * eps) * p;
    Ok((p1, p2))
}

/// G(n,p): each of the `n(n-1)/2` pairs independently with probability `p`.
///
/// Uses geometric skipping over the lexicographic pair sequence, which
/// draws the same distribution as independent coin flips.
pub fn sample_gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph, RandomError> {
    if n == 0 {
        return Err(RandomError::Domain("need n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(RandomError::Domain(format!("p must lie in [0,1], got {p}")));
    }
    if p == 0.0 {
        return Ok(Graph::empty(n));
    }
    if p == 1.0 {
        return Ok(Graph::complete(n));
    }
    let log_q = (1.0 - p).ln();
    let mut edges = Vec::new();
    // pairs (w, v) with w < v, v ascending then w ascending
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor();
        w += 1 + if skip.is_finite() && skip < 1e15 {
            skip as i64
        } else {
            i64::MAX / 4
        };
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    Ok(Graph::from_edges(n, edges)?)
}

/// `d` perfect matchings of `K_n`, indexed by colour `0..d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingFamily {
    pub n: usize,
    /// Each matching holds `n/2` canonical edges, sorted.
    pub matchings: Vec<Vec<Edge>>,
}

impl MatchingFamily {
    pub fn new(n: usize, mut matchings: Vec<Vec<Edge>>) -> Result<Self, RandomError> {
        for m in &mut matchings {
            for e in m.iter_mut() {
                *e = edge(e.0, e.1);
            }
            m.sort_unstable();
        }
        let fam = MatchingFamily { n, matchings };
        fam.check()?;
        Ok(fam)
    }

    pub fn d(&self) -> usize {
        self.matchings.len()
    }

    /// Checks that every matching is perfect and all are pairwise edge-disjoint.
    pub fn check(&self) -> Result<(), RandomError> {
        if !self.n.is_multiple_of(2) {
            return Err(RandomError::Domain(format!("n = {} is odd", self.n)));
        }
        let mut all: Vec<Edge> = Vec::with_capacity(self.d() * self.n / 2);
        for (c, m) in self.matchings.iter().enumerate() {
            if m.len() != self.n / 2 {
                return Err(RandomError::Domain(format!(
                    "colour {c} has {} edges, expected {}",
                    m.len(),
                    self.n / 2
                )));
            }
            let mut covered = vec![false; self.n];
            for &(u, v) in m {
                if u >= self.n || v >= self.n || u == v || covered[u] || covered[v] {
                    return Err(RandomError::Domain(format!(
                        "colour {c} is not a perfect matching at edge {u}-{v}"
                    )));
                }
                covered[u] = true;
                covered[v] = true;
            }
            all.extend_from_slice(m);
        }
        all.sort_unstable();
        if let Some(w) = all.windows(2).find(|w| w[0] == w[1]) {
            return Err(RandomError::Domain(format!(
                "edge {}-{} appears in two colours",
                w[0].0, w[0].1
            )));
        }
        Ok(())
    }

    /// `mates(c)[v]` is the partner of `v` in colour `c`.
    pub fn mates(&self, color: usize) -> Vec<Vertex> {
        let mut mate = vec![usize::MAX; self.n];
        for &(u, v) in &self.matchings[color] {
            mate[u] = v;
            mate[v] = u;
        }
        mate
    }

    /// Union of the colours in `colors`.
    pub fn union_of(&self, colors: impl IntoIterator<Item = usize>) -> Graph {
        let edges: Vec<Edge> = colors
            .into_iter()
            .flat_map(|c| self.matchings[c].iter().copied())
            .collect();
        Graph::from_edges(self.n, edges).expect("matching family colours are edge-disjoint")
    }

    /// The `d`-regular graph formed by all colours.
    pub fn union_graph(&self) -> Graph {
        self.union_of(0..self.d())
    }

    /// Text form: `n d`, then `d` blocks of `n/2` lines `u v`.
    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.d());
        for m in &self.matchings {
            for &(u, v) in m {
                let _ = writeln!(out, "{u} {v}");
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, RandomError> {
        let bad = |msg: String| RandomError::Graph(GraphError::Parse(msg));
        let mut pairs = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                let mut it = l.split_whitespace().map(str::parse::<usize>);
                match (it.next(), it.next(), it.next()) {
                    (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
                    _ => Err(bad(format!("expected two integers, got {l:?}"))),
                }
            });
        let (n, d) = pairs.next().ok_or_else(|| bad("missing header".into()))??;
        let rest: Vec<Edge> = pairs.collect::<Result<_, _>>()?;
        if n % 2 != 0 || rest.len() != d * (n / 2) {
            return Err(bad(format!(
                "expected {} edge lines for n = {n}, d = {d}, found {}",
                d * (n / 2),
                rest.len()
            )));
        }
        let matchings = if n == 0 {
            vec![Vec::new(); d]
        } else {
            rest.chunks(n / 2).map(<[Edge]>::to_vec).collect()
        };
        MatchingFamily::new(n, matchings)
    }
}

/// Uniform perfect matching of `K_n` (`n` even).
pub fn sample_perfect_matching<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Edge> {
    assert!(n.is_multiple_of(2), "perfect matching needs even n");
    let mut perm: Vec<Vertex> = (0..n).collect();
    perm.shuffle(rng);
    let mut m: Vec<Edge> = perm.chunks(2).map(|c| edge(c[0], c[1])).collect();
    m.sort_unstable();
    m
}

/// Restart budget per colour for [`sample_disjoint_matchings`].
pub const MATCHING_RESTART_CAP: usize = 1000;

/// Restarts of a single colour before the whole family is redrawn.
const COLOUR_RESTARTS: usize = 50;

/// `d` pairwise edge-disjoint perfect matchings, drawn sequentially.
///
/// Colour `c` repeatedly pairs the lowest unmatched vertex with a uniform
/// unmatched partner not already adjacent to it in colours `< c`. A dead end
/// restarts colour `c`; too many of those redraw the family from colour 0,
/// up to [`MATCHING_RESTART_CAP`] times. The law is close to, not exactly,
/// uniform.
pub fn sample_disjoint_matchings<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    rng: &mut R,
) -> Result<MatchingFamily, RandomError> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(RandomError::Domain(format!(
            "n must be even and positive, got {n}"
        )));
    }
    if d == 0 || d > n - 1 {
        return Err(RandomError::Domain(format!(
            "need 1 <= d <= n-1, got d = {d}"
        )));
    }
    'family: for _ in 0..MATCHING_RESTART_CAP {
        let mut mates: Vec<Vec<Vertex>> = Vec::with_capacity(d);
        for _ in 0..d {
            let Some(mate) = (0..COLOUR_RESTARTS).find_map(|_| try_matching(n, &mates, rng)) else {
                continue 'family;
            };
            mates.push(mate);
        }
        let matchings = mates
            .iter()
            .map(|mate| {
                (0..n)
                    .filter(|&v| v < mate[v])
                    .map(|v| (v, mate[v]))
                    .collect()
            })
            .collect();
        let fam = MatchingFamily { n, matchings };
        fam.check()?;
        return Ok(fam);
    }
    Err(RandomError::SamplingFailed {
        what: "edge-disjoint perfect matchings",
        attempts: MATCHING_RESTART_CAP,
    })
}

fn try_matching<R: Rng + ?Sized>(
    n: usize,
    earlier: &[Vec<Vertex>],
    rng: &mut R,
) -> Option<Vec<Vertex>> {
    // `pool` holds unmatched vertices; `pos` indexes into it.
    let mut pool: Vec<Vertex> = (0..n).collect();
    let mut pos: Vec<usize> = (0..n).collect();
    let mut mate = vec![usize::MAX; n];
    let remove = |pool: &mut Vec<Vertex>, pos: &mut Vec<usize>, v: Vertex| {
        let i = pos[v];
        let last = *pool.last().unwrap();
        pool.swap_remove(i);
        if last != v {
            pos[last] = i;
        }
        pos[v] = usize::MAX;
    };
    let mut low = 0;
    while !pool.is_empty() {
        while mate[low] != usize::MAX {
            low += 1;
        }
        let v = low;
        let forbidden = |w: Vertex| earlier.iter().any(|m| m[v] == w);
        let blocked = earlier.iter().filter(|m| pos[m[v]] != usize::MAX).count();
        if pool.len() - 1 <= blocked {
            return None;
        }
        let w = loop {
            let w = pool[rng.random_range(0..pool.len())];
            if w != v && !forbidden(w) {
                break w;
            }
        };
        mate[v] = w;
        mate[w] = v;
        remove(&mut pool, &mut pos, v);
        remove(&mut pool, &mut pos, w);
    }
    Some(mate)
}

/// Exactly uniform edge-disjoint family by rejection: overlay `d`
/// independent uniform perfect matchings until no edge repeats.
///
/// Acceptance probability tends to `exp(-d(d-1)/4)`, so this is meant for
/// `d <= 4`.
pub fn sample_disjoint_matchings_exact<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    max_attempts: usize,
    rng: &mut R,
) -> Result<MatchingFamily, RandomError> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(RandomError::Domain(format!(
            "n must be even and positive, got {n}"
        )));
    }
    if d == 0 || d > n - 1 {
        return Err(RandomError::Domain(format!(
            "need 1 <= d <= n-1, got d = {d}"
        )));
    }
    for _ in 0..max_attempts {
        let matchings: Vec<Vec<Edge>> = (0..d).map(|_| sample_perfect_matching(n, rng)).collect();
        let mut all: Vec<Edge> = matchings.iter().flatten().copied().collect();
        all.sort_unstable();
        if all.windows(2).all(|w| w[0] != w[1]) {
            return Ok(MatchingFamily { n, matchings });
        }
    }
    Err(RandomError::SamplingFailed {
        what: "overlay rejection for disjoint matchings",
        attempts: max_attempts,
    })
}

/// Largest degree for which the rejection sampler is used automatically.
pub const EXACT_SAMPLER_MAX_D: usize = 4;

/// Picks the exact overlay sampler for `d <= 4` and the sequential one above.
pub fn sample_matching_family<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    rng: &mut R,
) -> Result<MatchingFamily, RandomError> {
    if d <= EXACT_SAMPLER_MAX_D {
        sample_disjoint_matchings_exact(n, d, 100_000, rng)
    } else {
        sample_disjoint_matchings(n, d, rng)
    }
}

/// Skeletons for the random overlay model, all on `n` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlayInput {
    pub n: usize,
    pub skeletons: Vec<Graph>,
}

impl OverlayInput {
    pub fn new(skeletons: Vec<Graph>) -> Result<Self, RandomError> {
        let n = skeletons
            .first()
            .map(Graph::n)
            .ok_or_else(|| RandomError::Domain("overlay needs at least one skeleton".into()))?;
        if skeletons.iter().any(|g| g.n() != n) {
            return Err(RandomError::Domain(
                "skeletons differ in vertex count".into(),
            ));
        }
        Ok(OverlayInput { n, skeletons })
    }
}

/// Labelled union of independently and uniformly relabelled skeletons.
///
/// The flag is true when some edge is produced by two or more skeletons.
pub fn random_overlay<R: Rng + ?Sized>(input: &OverlayInput, rng: &mut R) -> (Graph, bool) {
    let n = input.n;
    let mut all = Vec::with_capacity(input.skeletons.iter().map(Graph::m).sum());
    let mut sigma: Vec<Vertex> = (0..n).collect();
    for h in &input.skeletons {
        sigma.shuffle(rng);
        all.extend(h.edges().iter().map(|&(u, v)| edge(sigma[u], sigma[v])));
    }
    all.sort_unstable();
    let collision = all.windows(2).any(|w| w[0] == w[1]);
    all.dedup();
    let g = Graph::from_edges(n, all).expect("relabelled skeleton edges are simple");
    (g, collision)
}

/// Restart budget for [`sample_random_regular`].
pub const REGULAR_RESTART_CAP: usize = 100_000;

/// Uniform simple `d`-regular graph via the configuration model, restarting
/// until the pairing has no loops or multi-edges.
pub fn sample_random_regular<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    rng: &mut R,
) -> Result<Graph, RandomError> {
    if !(n * d).is_multiple_of(2) {
        return Err(RandomError::Domain(format!(
            "n*d must be even (n = {n}, d = {d})"
        )));
    }
    if n == 0 || d > n - 1 {
        return Err(RandomError::Domain(format!(
            "need d <= n-1 (n = {n}, d = {d})"
        )));
    }
    let mut points: Vec<Vertex> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut edges = Vec::with_capacity(n * d / 2);
    'attempt: for _ in 0..REGULAR_RESTART_CAP {
        points.shuffle(rng);
        edges.clear();
        for pair in points.chunks(2) {
            if pair[0] == pair[1] {
                continue 'attempt;
            }
            edges.push(edge(pair[0], pair[1]));
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        return Ok(Graph::from_edges(n, edges.iter().copied())?);
    }
    Err(RandomError::SamplingFailed {
        what: "configuration model",
        attempts: REGULAR_RESTART_CAP,
    })
}
