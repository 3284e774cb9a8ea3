//! Exact maximum ℓ-Oddtown families on small ground sets, by maximum clique
//! search on the compatibility graph.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oddtown::{ground_mask, SetFamily};
use crate::par;

/// Default cap on adjacency storage, in 64-bit words.
pub const GRAPH_BUDGET: u64 = 1 << 22;
/// Default cap on search nodes.
pub const NODE_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Bitset(Vec<u64>);

impl Bitset {
    fn empty(len: usize) -> Self {
        Bitset(vec![0; len.div_ceil(64)])
    }

    fn full(len: usize) -> Self {
        let mut b = Self::empty(len);
        for v in 0..len {
            b.insert(v);
        }
        b
    }

    fn insert(&mut self, v: usize) {
        self.0[v / 64] |= 1 << (v % 64);
    }

    fn remove(&mut self, v: usize) {
        self.0[v / 64] &= !(1 << (v % 64));
    }

    fn contains(&self, v: usize) -> bool {
        self.0[v / 64] >> (v % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn first(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn intersect(&self, other: &Bitset) -> Bitset {
        Bitset(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn subtract(&mut self, other: &Bitset) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= !b);
    }
}

/// Sets with `|A| != 0 mod ℓ`, joined when `|A ∩ B| = 0 mod ℓ`.
///
/// Vertices are ordered by descending degree, ties by mask.
#[derive(Debug, Clone)]
pub struct CompatibilityGraph {
    n: usize,
    modulus: u64,
    vertices: Vec<u64>,
    adjacency: Vec<Bitset>,
}

impl CompatibilityGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Vertex masks in search order.
    pub fn vertices(&self) -> &[u64] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).sum::<usize>() / 2
    }
}

pub fn build_graph(n: usize, modulus: u64) -> Result<CompatibilityGraph> {
    build_graph_within(n, modulus, GRAPH_BUDGET)
}

pub fn build_graph_within(n: usize, modulus: u64, budget: u64) -> Result<CompatibilityGraph> {
    if modulus < 2 {
        return Err(Error::InvalidModulus(modulus));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("ground set must be non-empty".into()));
    }
    let words = |v: f64| v * (v / 64.0).ceil();
    if n >= 40 || words(2f64.powi(n as i32)) > budget as f64 {
        return Err(Error::budget("adjacency words", words(2f64.powi(n as i32)), budget));
    }
    let ok_size = |m: u64| !(m.count_ones() as u64).is_multiple_of(modulus);
    let ok_meet = |a: u64, b: u64| ((a & b).count_ones() as u64).is_multiple_of(modulus);

    let masks: Vec<u64> = (1..=ground_mask(n)).filter(|&m| ok_size(m)).collect();
    let degrees = par::map_slice(&masks, |&a| masks.iter().filter(|&&b| b != a && ok_meet(a, b)).count());
    let mut order: Vec<usize> = (0..masks.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(degrees[i]), masks[i]));
    let vertices: Vec<u64> = order.iter().map(|&i| masks[i]).collect();

    let count = vertices.len();
    let adjacency = par::map_slice(&vertices, |&a| {
        let mut row = Bitset::empty(count);
        for (j, &b) in vertices.iter().enumerate() {
            if b != a && ok_meet(a, b) {
                row.insert(j);
            }
        }
        row
    });
    Ok(CompatibilityGraph { n, modulus, vertices, adjacency })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub n: usize,
    pub modulus: u64,
    pub max_size: usize,
    pub witness: SetFamily,
    /// The search finished within its node budget.
    pub optimal: bool,
    pub nodes_explored: u64,
    /// Seconds.
    pub wall_time: f64,
}

struct Search<'g> {
    graph: &'g CompatibilityGraph,
    best: AtomicUsize,
    incumbent: Mutex<Vec<usize>>,
    nodes: AtomicU64,
    budget: u64,
    stop: AtomicBool,
    /// Stop at the first clique of this size instead of maximizing.
    target: Option<usize>,
}

impl<'g> Search<'g> {
    fn new(graph: &'g CompatibilityGraph, budget: u64, target: Option<usize>) -> Self {
        Search {
            graph,
            best: AtomicUsize::new(0),
            incumbent: Mutex::new(Vec::new()),
            nodes: AtomicU64::new(0),
            budget,
            stop: AtomicBool::new(false),
            target,
        }
    }

    /// Greedy coloring of `p`: vertices in color-class order with the running
    /// number of colors used.
    fn color_sort(&self, p: &Bitset) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(p.len());
        let mut colors = Vec::with_capacity(order.capacity());
        let mut uncolored = p.clone();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut candidates = uncolored.clone();
            while let Some(v) = candidates.first() {
                candidates.remove(v);
                candidates.subtract(&self.graph.adjacency[v]);
                uncolored.remove(v);
                order.push(v);
                colors.push(color);
            }
        }
        (order, colors)
    }

    fn pruned(&self, size: usize, color: usize) -> bool {
        match self.target {
            Some(t) => size + color < t,
            None => size + color <= self.best.load(Ordering::Relaxed),
        }
    }

    fn record(&self, clique: &[usize]) {
        let size = clique.len();
        if self.best.fetch_max(size, Ordering::AcqRel) < size {
            let mut inc = self.incumbent.lock().expect("incumbent lock");
            if inc.len() < size {
                *inc = clique.to_vec();
            }
        }
        if self.target.is_some_and(|t| size >= t) {
            self.stop.store(true, Ordering::Release);
        }
    }

    fn expand(&self, clique: &mut Vec<usize>, mut p: Bitset) {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.stop.store(true, Ordering::Release);
            return;
        }
        let (order, colors) = self.color_sort(&p);
        for i in (0..order.len()).rev() {
            if self.stop.load(Ordering::Acquire) || self.pruned(clique.len(), colors[i]) {
                return;
            }
            let v = order[i];
            clique.push(v);
            let next = p.intersect(&self.graph.adjacency[v]);
            if next.is_empty() {
                self.record(clique);
            } else {
                self.expand(clique, next);
            }
            clique.pop();
            p.remove(v);
        }
    }

    /// Top level: branch `i` takes the `i`-th vertex in color order together
    /// with its neighbours among the earlier ones. Branches are independent.
    fn run(&self, parallel: bool) {
        let all = Bitset::full(self.graph.vertex_count());
        let (order, colors) = self.color_sort(&all);
        let branch = |i: usize| {
            if self.stop.load(Ordering::Acquire) || self.pruned(0, colors[i]) {
                return;
            }
            let v = order[i];
            let mut earlier = Bitset::empty(order.len());
            order[..i].iter().for_each(|&u| earlier.insert(u));
            let next = earlier.intersect(&self.graph.adjacency[v]);
            let mut clique = vec![v];
            if next.is_empty() {
                self.record(&clique);
            } else {
                self.expand(&mut clique, next);
            }
        };
        let last = order.len() as u64;
        if parallel {
            par::map_range(0..last, |k| branch((last - 1 - k) as usize));
        } else {
            (0..order.len()).rev().for_each(branch);
        }
    }
}

/// Largest ℓ-Oddtown on `[n]`.
///
/// The size is found by a branch-and-bound search whose top-level branches
/// run in parallel; the witness is then the first family of that size in a
/// sequential depth-first search, so it does not depend on the thread count.
pub fn max_oddtown(n: usize, modulus: u64, node_budget: u64) -> Result<SolveResult> {
    let start = Instant::now();
    let graph = build_graph(n, modulus)?;
    let search = Search::new(&graph, node_budget, None);
    search.run(true);
    let optimal = !search.stop.load(Ordering::Acquire);
    let max_size = search.best.load(Ordering::Acquire);
    let nodes_explored = search.nodes.load(Ordering::Acquire).min(node_budget);

    let mut clique = search.incumbent.into_inner().expect("incumbent lock");
    if optimal {
        let finder = Search::new(&graph, node_budget, Some(max_size));
        finder.run(false);
        let found = finder.incumbent.into_inner().expect("incumbent lock");
        if found.len() == max_size {
            clique = found;
        }
    }
    let witness = SetFamily::new(n, clique.iter().map(|&v| graph.vertices[v]).collect())?;
    debug_assert_eq!(witness.len(), max_size);
    debug_assert!(crate::oddtown::verify_family(&witness, modulus)?.is_valid());
    Ok(SolveResult { n, modulus, max_size, witness, optimal, nodes_explored, wall_time: start.elapsed().as_secs_f64() })
}
