//! LDPC codes built by progressive edge growth, with a lower-triangular parity
//! part for encoding by substitution, flooding sum-product decoding, and
//! puncturing.
//!
//! Variable nodes `0..k` carry the (scrambled) message and `k..n` the parity
//! bits. Check `j` always contains parity bit `k + j`, and any other parity
//! bit it contains has a smaller index, so `H = [H_i | H_p]` with `H_p` lower
//! triangular with unit diagonal.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LdpcError {
    #[error("invalid code parameters: {0}")]
    InvalidParams(String),
    #[error("infeasible degree profile: {0}")]
    Infeasible(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("parity part of H is not lower triangular with unit diagonal (check {check})")]
    NotTriangular { check: usize },
    #[error("length mismatch: {what} ({got} vs {expected})")]
    Length {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("non-finite input LLR at position {0}")]
    NonFiniteLlr(usize),
    #[error("malformed alist at line {line}: {reason}")]
    Alist { line: usize, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LdpcError {
    fn from(e: std::io::Error) -> Self {
        LdpcError::Io(e.to_string())
    }
}

/// How the parity part of `H` is laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityStructure {
    /// Dual diagonal: parity `j` sits in checks `j` and `j + 1`.
    Staircase,
    /// Parity columns are grown by PEG too, restricted to checks `≥ j`
    /// with the diagonal entry placed first.
    Triangular,
}

/// Bipartite graph of an `(n, k)` code with `m = n - k` checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    n: usize,
    k: usize,
    checks: Vec<Vec<usize>>,
    vars: Vec<Vec<usize>>,
}

impl TannerGraph {
    /// Builds a graph from per-check variable lists.
    pub fn from_checks(n: usize, checks: Vec<Vec<usize>>) -> Result<Self, LdpcError> {
        let m = checks.len();
        if m == 0 || m >= n {
            return Err(LdpcError::InvalidGraph(format!("need 0 < m < n, got m={m}, n={n}")));
        }
        let mut vars = vec![Vec::new(); n];
        let mut sorted = Vec::with_capacity(m);
        for (c, mut row) in checks.into_iter().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(LdpcError::InvalidGraph(format!("parallel edge in check {c}")));
            }
            for &v in &row {
                if v >= n {
                    return Err(LdpcError::InvalidGraph(format!(
                        "check {c} references variable {v} >= n={n}"
                    )));
                }
                vars[v].push(c);
            }
            sorted.push(row);
        }
        if let Some(v) = vars.iter().position(Vec::is_empty) {
            return Err(LdpcError::InvalidGraph(format!("variable {v} has no edges")));
        }
        Ok(TannerGraph {
            n,
            k: n - m,
            checks: sorted,
            vars,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.checks.len()
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn check(&self, c: usize) -> &[usize] {
        &self.checks[c]
    }

    pub fn var(&self, v: usize) -> &[usize] {
        &self.vars[v]
    }

    pub fn num_edges(&self) -> usize {
        self.checks.iter().map(Vec::len).sum()
    }

    pub fn column_weights(&self) -> Vec<usize> {
        self.vars.iter().map(Vec::len).collect()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.checks.iter().map(Vec::len).collect()
    }

    /// Dense `m × n` parity-check matrix.
    pub fn to_matrix(&self) -> BitMatrix {
        let mut h = BitMatrix::zeros(self.m(), self.n);
        for (c, row) in self.checks.iter().enumerate() {
            for &v in row {
                h.set(c, v, true);
            }
        }
        h
    }

    /// First check whose parity entries violate the lower-triangular layout.
    fn triangular_violation(&self) -> Option<usize> {
        (0..self.m()).find(|&c| {
            let parity = self.checks[c].iter().filter(|&&v| v >= self.k).map(|&v| v - self.k);
            let mut has_diagonal = false;
            for l in parity {
                if l > c {
                    return true;
                }
                has_diagonal |= l == c;
            }
            !has_diagonal
        })
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.triangular_violation().is_none()
    }

    /// `H · xᵀ == 0`.
    pub fn is_codeword(&self, x: &BitVector) -> bool {
        x.len() == self.n
            && self
                .checks
                .iter()
                .all(|row| row.iter().filter(|&&v| x.get(v)).count() % 2 == 0)
    }

    /// Number of unsatisfied checks.
    pub fn syndrome_weight(&self, x: &BitVector) -> usize {
        self.checks
            .iter()
            .filter(|row| row.iter().filter(|&&v| x.get(v)).count() % 2 == 1)
            .count()
    }

    /// Length of the shortest cycle, or `None` for a forest.
    pub fn girth(&self) -> Option<usize> {
        // BFS on the bipartite graph from every variable node; node ids are
        // variables 0..n then checks n..n+m.
        let total = self.n + self.m();
        let mut dist = vec![u32::MAX; total];
        let mut parent = vec![usize::MAX; total];
        let mut best = usize::MAX;
        let mut queue = VecDeque::new();
        for root in 0..self.n {
            dist.fill(u32::MAX);
            parent.fill(usize::MAX);
            dist[root] = 0;
            queue.clear();
            queue.push_back(root);
            while let Some(node) = queue.pop_front() {
                let d = dist[node] as usize;
                if 2 * d + 1 >= best {
                    break;
                }
                let neighbors: &[usize] = if node < self.n {
                    &self.vars[node]
                } else {
                    &self.checks[node - self.n]
                };
                for &raw in neighbors {
                    let next = if node < self.n { raw + self.n } else { raw };
                    if next == parent[node] {
                        continue;
                    }
                    if dist[next] == u32::MAX {
                        dist[next] = d as u32 + 1;
                        parent[next] = node;
                        queue.push_back(next);
                    } else {
                        best = best.min(d + dist[next] as usize + 1);
                    }
                }
            }
        }
        (best != usize::MAX).then_some(best)
    }

    /// Writes the graph in alist format (MacKay's sparse matrix text layout).
    pub fn write_alist<W: Write>(&self, out: &mut W) -> Result<(), LdpcError> {
        let col_w = self.column_weights();
        let row_w = self.row_weights();
        writeln!(out, "{} {}", self.n, self.m())?;
        writeln!(
            out,
            "{} {}",
            col_w.iter().max().unwrap_or(&0),
            row_w.iter().max().unwrap_or(&0)
        )?;
        writeln!(out, "{}", join(col_w.iter()))?;
        writeln!(out, "{}", join(row_w.iter()))?;
        for adj in &self.vars {
            writeln!(out, "{}", join(adj.iter().map(|c| c + 1)))?;
        }
        for adj in &self.checks {
            writeln!(out, "{}", join(adj.iter().map(|v| v + 1)))?;
        }
        Ok(())
    }

    pub fn read_alist<R: BufRead>(input: R) -> Result<Self, LdpcError> {
        let mut lines = input.lines().enumerate().filter_map(|(i, l)| match l {
            Ok(s) if s.trim().is_empty() => None,
            other => Some((i + 1, other)),
        });
        let mut next_numbers = |what: &str| -> Result<(usize, Vec<usize>), LdpcError> {
            let (line, text) = lines.next().ok_or_else(|| LdpcError::Alist {
                line: 0,
                reason: format!("unexpected end of file reading {what}"),
            })?;
            let text = text?;
            let nums = text
                .split_whitespace()
                .map(str::parse::<usize>)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| LdpcError::Alist {
                    line,
                    reason: format!("{what}: {e}"),
                })?;
            Ok((line, nums))
        };
        let (line, dims) = next_numbers("dimensions")?;
        let [n, m] = dims[..] else {
            return Err(LdpcError::Alist {
                line,
                reason: "expected `n m`".into(),
            });
        };
        next_numbers("maximum degrees")?;
        let (_, col_w) = next_numbers("column weights")?;
        let (_, row_w) = next_numbers("row weights")?;
        if col_w.len() != n || row_w.len() != m {
            return Err(LdpcError::Alist {
                line,
                reason: "weight lists do not match dimensions".into(),
            });
        }
        for _ in 0..n {
            next_numbers("variable adjacency")?;
        }
        let mut checks = Vec::with_capacity(m);
        for c in 0..m {
            let (line, adj) = next_numbers("check adjacency")?;
            // Some writers pad adjacency lists with zeros up to the maximum degree.
            let adj: Vec<usize> = adj.into_iter().filter(|&v| v != 0).map(|v| v - 1).collect();
            if adj.len() != row_w[c] {
                return Err(LdpcError::Alist {
                    line,
                    reason: format!("check {c} lists {} variables, weight says {}", adj.len(), row_w[c]),
                });
            }
            checks.push(adj);
        }
        let graph = TannerGraph::from_checks(n, checks)?;
        if graph.column_weights() != col_w {
            return Err(LdpcError::Alist {
                line: 3,
                reason: "column weights disagree with adjacency".into(),
            });
        }
        Ok(graph)
    }
}

fn join<T: ToString>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Progressive edge growth.
///
/// `degrees[v]` is the target degree of variable `v`. With
/// [`ParityStructure::Staircase`] the parity edges are laid down first and the
/// parity entries of `degrees` are ignored. Each new edge of a variable goes to
/// a check at maximum distance from it in the current graph (unreachable counts
/// as infinitely far); ties go to the lowest current check degree, then to the
/// lowest position in a seeded random ordering of the checks.
pub fn peg_construct(
    n: usize,
    k: usize,
    degrees: &[usize],
    structure: ParityStructure,
    seed: u64,
) -> Result<TannerGraph, LdpcError> {
    if !(n > k && k >= 1) {
        return Err(LdpcError::InvalidParams(format!("need n > k >= 1, got n={n}, k={k}")));
    }
    if degrees.len() != n {
        return Err(LdpcError::Length {
            what: "degree profile",
            got: degrees.len(),
            expected: n,
        });
    }
    let m = n - k;
    if let Some(v) = degrees[..k].iter().position(|&d| d == 0 || d > m) {
        return Err(LdpcError::Infeasible(format!(
            "variable {v} wants degree {} with {m} checks",
            degrees[v]
        )));
    }
    if structure == ParityStructure::Triangular {
        for j in 0..m {
            let d = degrees[k + j];
            if d == 0 || d > m - j {
                return Err(LdpcError::Infeasible(format!(
                    "parity {j} wants degree {d} but only {} checks lie on or below the diagonal",
                    m - j
                )));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut priority: Vec<usize> = (0..m).collect();
    priority.shuffle(&mut rng);
    let mut peg = PegState::new(n, m, priority);

    match structure {
        ParityStructure::Staircase => {
            for j in 0..m {
                peg.connect(k + j, j);
                if j + 1 < m {
                    peg.connect(k + j, j + 1);
                }
            }
        }
        ParityStructure::Triangular => {
            for j in 0..m {
                peg.connect(k + j, j);
                for _ in 1..degrees[k + j] {
                    let c = peg.farthest_check(k + j, |c| c > j);
                    peg.connect(k + j, c);
                }
            }
        }
    }
    for v in 0..k {
        for _ in 0..degrees[v] {
            let c = peg.farthest_check(v, |_| true);
            peg.connect(v, c);
        }
    }
    TannerGraph::from_checks(n, peg.check_adj)
}

struct PegState {
    check_adj: Vec<Vec<usize>>,
    var_adj: Vec<Vec<usize>>,
    priority: Vec<usize>,
    check_dist: Vec<u32>,
    var_seen: Vec<bool>,
}

impl PegState {
    fn new(n: usize, m: usize, priority: Vec<usize>) -> Self {
        PegState {
            check_adj: vec![Vec::new(); m],
            var_adj: vec![Vec::new(); n],
            priority,
            check_dist: vec![u32::MAX; m],
            var_seen: vec![false; n],
        }
    }

    fn connect(&mut self, v: usize, c: usize) {
        debug_assert!(!self.var_adj[v].contains(&c));
        self.var_adj[v].push(c);
        self.check_adj[c].push(v);
    }

    /// Check distances (in check-to-check hops) from variable `v`.
    fn bfs(&mut self, v: usize) {
        self.check_dist.fill(u32::MAX);
        self.var_seen.fill(false);
        self.var_seen[v] = true;
        let mut frontier: Vec<usize> = Vec::new();
        for &c in &self.var_adj[v] {
            self.check_dist[c] = 0;
            frontier.push(c);
        }
        let mut depth = 0;
        let mut next = Vec::new();
        while !frontier.is_empty() {
            depth += 1;
            next.clear();
            for &c in &frontier {
                for &u in &self.check_adj[c] {
                    if self.var_seen[u] {
                        continue;
                    }
                    self.var_seen[u] = true;
                    for &c2 in &self.var_adj[u] {
                        if self.check_dist[c2] == u32::MAX {
                            self.check_dist[c2] = depth;
                            next.push(c2);
                        }
                    }
                }
            }
            std::mem::swap(&mut frontier, &mut next);
        }
    }

    fn farthest_check(&mut self, v: usize, allowed: impl Fn(usize) -> bool) -> usize {
        self.bfs(v);
        let mut best: Option<(u32, usize, usize, usize)> = None;
        for c in 0..self.check_adj.len() {
            if !allowed(c) || self.check_dist[c] == 0 {
                continue;
            }
            // larger distance first, then lower degree, then lower priority
            let key = (self.check_dist[c], self.check_adj[c].len(), self.priority[c], c);
            best = match best {
                None => Some(key),
                Some(b) => {
                    let better = key.0 > b.0
                        || (key.0 == b.0 && (key.1, key.2) < (b.1, b.2));
                    Some(if better { key } else { b })
                }
            };
        }
        best.expect("degree bounds leave at least one admissible check").3
    }
}

/// An LDPC code ready for systematic encoding.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    graph: TannerGraph,
    /// Per check: message variables, and parity indices strictly below the diagonal.
    info_terms: Vec<Vec<usize>>,
    parity_terms: Vec<Vec<usize>>,
}

impl LdpcCode {
    pub fn new(graph: TannerGraph) -> Result<Self, LdpcError> {
        if let Some(check) = graph.triangular_violation() {
            return Err(LdpcError::NotTriangular { check });
        }
        let k = graph.k();
        let mut info_terms = Vec::with_capacity(graph.m());
        let mut parity_terms = Vec::with_capacity(graph.m());
        for (c, row) in graph.checks.iter().enumerate() {
            info_terms.push(row.iter().copied().filter(|&v| v < k).collect());
            parity_terms.push(
                row.iter()
                    .copied()
                    .filter(|&v| v >= k && v - k < c)
                    .map(|v| v - k)
                    .collect(),
            );
        }
        Ok(LdpcCode {
            graph,
            info_terms,
            parity_terms,
        })
    }

    pub fn graph(&self) -> &TannerGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n
    }

    pub fn k(&self) -> usize {
        self.graph.k
    }

    /// Systematic encoding by forward substitution: `[x | p]` with `H·[x|p]ᵀ = 0`.
    pub fn encode(&self, x: &BitVector) -> Result<BitVector, LdpcError> {
        let k = self.k();
        if x.len() != k {
            return Err(LdpcError::Length {
                what: "message",
                got: x.len(),
                expected: k,
            });
        }
        let m = self.graph.m();
        let mut parity = vec![false; m];
        for j in 0..m {
            let mut bit = self.info_terms[j].iter().filter(|&&v| x.get(v)).count() % 2 == 1;
            for &l in &self.parity_terms[j] {
                bit ^= parity[l];
            }
            parity[j] = bit;
        }
        Ok(x.concat(&BitVector::from_bools(&parity)))
    }
}

/// Check-node update rule; both compute the exact sum-product message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CheckRule {
    /// Pairwise `⊞` with forward/backward partial results.
    BoxPlus,
    /// `2·atanh(Π tanh(x/2))` with prefix/suffix products; about twice as fast.
    #[default]
    Tanh,
}

/// Message magnitude limit applied to variable-to-check messages.
pub const LLR_CLAMP: f64 = 30.0;

#[inline]
fn boxplus(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs()) + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutput {
    pub hard: BitVector,
    pub converged: bool,
    pub iterations: usize,
}

/// Flooding-schedule sum-product decoder over a fixed graph.
#[derive(Debug, Clone)]
pub struct SumProductDecoder {
    n: usize,
    rule: CheckRule,
    check_start: Vec<usize>,
    edge_var: Vec<usize>,
}

impl SumProductDecoder {
    pub fn new(graph: &TannerGraph) -> Self {
        Self::with_rule(graph, CheckRule::default())
    }

    pub fn with_rule(graph: &TannerGraph, rule: CheckRule) -> Self {
        let mut check_start = Vec::with_capacity(graph.m() + 1);
        let mut edge_var = Vec::with_capacity(graph.num_edges());
        check_start.push(0);
        for row in &graph.checks {
            edge_var.extend_from_slice(row);
            check_start.push(edge_var.len());
        }
        SumProductDecoder {
            n: graph.n(),
            rule,
            check_start,
            edge_var,
        }
    }

    fn syndrome_ok(&self, hard: &[bool]) -> bool {
        self.check_start.windows(2).all(|w| {
            self.edge_var[w[0]..w[1]]
                .iter()
                .fold(false, |acc, &v| acc ^ hard[v])
                == false
        })
    }

    /// Decodes channel LLRs (`log P(0)/P(1)`); punctured positions carry 0.
    /// Stops as soon as the hard decision satisfies every check.
    pub fn decode(&self, llr: &[f64], max_iters: usize) -> Result<DecodeOutput, LdpcError> {
        if llr.len() != self.n {
            return Err(LdpcError::Length {
                what: "LLR vector",
                got: llr.len(),
                expected: self.n,
            });
        }
        if let Some(i) = llr.iter().position(|x| !x.is_finite()) {
            return Err(LdpcError::NonFiniteLlr(i));
        }
        let max_iters = max_iters.max(1);
        let edges = self.edge_var.len();
        let mut c2v = vec![0.0f64; edges];
        let mut total = llr.to_vec();
        let mut hard: Vec<bool> = total.iter().map(|&x| x < 0.0).collect();
        let finish = |hard: &[bool], converged, iterations| DecodeOutput {
            hard: BitVector::from_bools(hard),
            converged,
            iterations,
        };
        if self.syndrome_ok(&hard) {
            return Ok(finish(&hard, true, 0));
        }
        let max_degree = self.check_start.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
        let mut input = vec![0.0f64; max_degree];
        let mut fwd = vec![0.0f64; max_degree];
        let mut bwd = vec![0.0f64; max_degree];
        for iter in 1..=max_iters {
            for w in self.check_start.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let d = hi - lo;
                for (slot, e) in (lo..hi).enumerate() {
                    input[slot] =
                        (total[self.edge_var[e]] - c2v[e]).clamp(-LLR_CLAMP, LLR_CLAMP);
                }
                let out = &mut c2v[lo..hi];
                match self.rule {
                    CheckRule::BoxPlus => check_boxplus(&input[..d], &mut fwd, &mut bwd, out),
                    CheckRule::Tanh => check_tanh(&input[..d], &mut fwd, &mut bwd, out),
                }
            }
            total.copy_from_slice(llr);
            for (e, &v) in self.edge_var.iter().enumerate() {
                total[v] += c2v[e];
            }
            for (h, &t) in hard.iter_mut().zip(&total) {
                *h = t < 0.0;
            }
            if self.syndrome_ok(&hard) {
                return Ok(finish(&hard, true, iter));
            }
        }
        Ok(finish(&hard, false, max_iters))
    }
}

fn check_boxplus(input: &[f64], fwd: &mut [f64], bwd: &mut [f64], out: &mut [f64]) {
    let d = input.len();
    match d {
        0 => {}
        1 => out[0] = 0.0,
        _ => {
            fwd[0] = input[0];
            for i in 1..d - 1 {
                fwd[i] = boxplus(fwd[i - 1], input[i]);
            }
            bwd[d - 1] = input[d - 1];
            for i in (1..d - 1).rev() {
                bwd[i] = boxplus(bwd[i + 1], input[i]);
            }
            out[0] = bwd[1];
            out[d - 1] = fwd[d - 2];
            for i in 1..d - 1 {
                out[i] = boxplus(fwd[i - 1], bwd[i + 1]);
            }
        }
    }
}

fn check_tanh(input: &[f64], fwd: &mut [f64], bwd: &mut [f64], out: &mut [f64]) {
    // Inputs are clamped to ±30, so |p| < 1 and the output stays finite.
    let d = input.len();
    if d < 2 {
        out.iter_mut().for_each(|o| *o = 0.0);
        return;
    }
    let t: &mut [f64] = bwd;
    for i in 0..d {
        let e = input[i].exp();
        t[i] = (e - 1.0) / (e + 1.0);
    }
    // fwd[i] = product of t[0..i]
    let mut acc = 1.0;
    for i in 0..d {
        fwd[i] = acc;
        acc *= t[i];
    }
    let mut suffix = 1.0;
    for i in (0..d).rev() {
        let p = fwd[i] * suffix;
        out[i] = ((1.0 + p) / (1.0 - p)).ln();
        suffix *= t[i];
    }
}

/// Positions that are never transmitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PunctureSet {
    n: usize,
    punctured: Vec<bool>,
    count: usize,
}

impl PunctureSet {
    pub fn new(n: usize, positions: &[usize]) -> Result<Self, LdpcError> {
        let mut punctured = vec![false; n];
        for &p in positions {
            if p >= n {
                return Err(LdpcError::InvalidParams(format!(
                    "puncture index {p} out of range for n={n}"
                )));
            }
            punctured[p] = true;
        }
        let count = punctured.iter().filter(|&&b| b).count();
        if count >= n {
            return Err(LdpcError::InvalidParams("cannot puncture every position".into()));
        }
        Ok(PunctureSet {
            n,
            punctured,
            count,
        })
    }

    pub fn none(n: usize) -> Self {
        PunctureSet {
            n,
            punctured: vec![false; n],
            count: 0,
        }
    }

    /// Punctures the first `k` (message) positions.
    pub fn first(n: usize, k: usize) -> Result<Self, LdpcError> {
        Self::new(n, &(0..k).collect::<Vec<_>>())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn transmitted_len(&self) -> usize {
        self.n - self.count
    }

    pub fn is_punctured(&self, i: usize) -> bool {
        self.punctured[i]
    }

    /// `c` restricted to the transmitted positions, order preserved.
    pub fn puncture(&self, c: &BitVector) -> Result<BitVector, LdpcError> {
        if c.len() != self.n {
            return Err(LdpcError::Length {
                what: "codeword",
                got: c.len(),
                expected: self.n,
            });
        }
        let kept: Vec<bool> = (0..self.n)
            .filter(|&i| !self.punctured[i])
            .map(|i| c.get(i))
            .collect();
        Ok(BitVector::from_bools(&kept))
    }

    /// Expands received LLRs to full length, with 0 at punctured positions.
    pub fn depuncture(&self, llr: &[f64]) -> Result<Vec<f64>, LdpcError> {
        if llr.len() != self.transmitted_len() {
            return Err(LdpcError::Length {
                what: "received LLRs",
                got: llr.len(),
                expected: self.transmitted_len(),
            });
        }
        let mut it = llr.iter();
        Ok(self
            .punctured
            .iter()
            .map(|&p| if p { 0.0 } else { *it.next().expect("length checked") })
            .collect())
    }
}

/// Spacing of the weight-2 message columns in mother codes.
pub const MOTHER_LIGHT_COLUMN_PERIOD: usize = 80;

/// Named code constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdpcPreset {
    /// (2364, 1576), rate 2/3.
    Paper,
    /// (3940, 1576) mother code; puncturing the message leaves 2364 bits.
    PaperMother,
    /// (1200, 800), rate 2/3.
    Desk,
    /// (2000, 800) mother code; puncturing the message leaves 1200 bits.
    DeskMother,
}

impl LdpcPreset {
    pub const ALL: [LdpcPreset; 4] = [
        LdpcPreset::Paper,
        LdpcPreset::PaperMother,
        LdpcPreset::Desk,
        LdpcPreset::DeskMother,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LdpcPreset::Paper => "paper",
            LdpcPreset::PaperMother => "paper_mother",
            LdpcPreset::Desk => "desk",
            LdpcPreset::DeskMother => "desk_mother",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn dimensions(self) -> (usize, usize) {
        match self {
            LdpcPreset::Paper => (2364, 1576),
            LdpcPreset::PaperMother => (3940, 1576),
            LdpcPreset::Desk => (1200, 800),
            LdpcPreset::DeskMother => (2000, 800),
        }
    }

    /// Mother codes are meant to have their message positions punctured.
    pub fn is_mother(self) -> bool {
        matches!(self, LdpcPreset::PaperMother | LdpcPreset::DeskMother)
    }

    pub fn structure(self) -> ParityStructure {
        ParityStructure::Staircase
    }

    /// Target column weights. Message columns of unpunctured codes have
    /// weight 4. Mother codes use weight 3 with every
    /// [`MOTHER_LIGHT_COLUMN_PERIOD`]-th message column at weight 2; the
    /// resulting weight-1 rows are where recovery of the punctured message
    /// starts. Parity entries are ignored by the staircase construction.
    pub fn degrees(self) -> Vec<usize> {
        let (n, k) = self.dimensions();
        (0..n)
            .map(|v| match (v < k, self.is_mother()) {
                (false, _) => 2,
                (true, false) => 4,
                (true, true) if v % MOTHER_LIGHT_COLUMN_PERIOD == 0 => 2,
                (true, true) => 3,
            })
            .collect()
    }

    /// PEG tie-break seed. The desk mother code uses seed 2: some seeds leave
    /// fewer degree-1 checks and show an error floor near BER 1e-4.
    pub fn seed(self) -> u64 {
        match self {
            LdpcPreset::DeskMother => 2,
            other => 0x5eed_0000 + other as u64,
        }
    }

    pub fn build(self) -> Result<LdpcCode, LdpcError> {
        let (n, k) = self.dimensions();
        let graph = peg_construct(n, k, &self.degrees(), self.structure(), self.seed())?;
        LdpcCode::new(graph)
    }
}
