//! Cayley-graph analytics over SL_n(F_p): group closure by breadth-first
//! search, diameter (the eccentricity of the identity is the diameter by
//! vertex transitivity), girth as the shortest non-backtracking relation,
//! and the spectral gap of the normalized adjacency operator by deflated
//! power iteration.
//!
//! The graph is never materialized as an edge list. Neighbors are
//! recomputed from the generators on every visit, so memory stays at the
//! decoded vertex table plus a few working vectors. All floating-point
//! reductions use fixed-order pairwise summation, which keeps results
//! bit-identical across thread counts.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families;
use crate::ffmat::MatSL;
use crate::setops::{symmetrize, Budget, MatSet};

/// Symmetric generating set with the identity excluded.
#[derive(Clone, Debug)]
pub struct GenSet {
    set: MatSet,
}

impl GenSet {
    /// Symmetrizes the given elements (adds inverses) and drops the
    /// identity.
    pub fn new(n: usize, p: u64, elems: impl IntoIterator<Item = MatSL>) -> Result<Self> {
        let base = MatSet::from_elements(n, p, elems)?;
        Ok(Self::from_set(&base))
    }

    pub fn from_set(s: &MatSet) -> GenSet {
        let sym = symmetrize(s);
        let id_key = MatSL::identity_unchecked(sym.dim() as u8, sym.modulus()).key();
        let keys = sym.keys().iter().copied().filter(|&k| k != id_key).collect();
        GenSet {
            set: MatSet::from_sorted_keys(sym.dim() as u8, sym.modulus(), keys),
        }
    }

    pub fn as_set(&self) -> &MatSet {
        &self.set
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn modulus(&self) -> u64 {
        self.set.modulus()
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn elements(&self) -> Vec<MatSL> {
        self.set.to_elements()
    }
}

/// |SL_n(F_p)| = p^(n(n-1)/2) * prod_{k=2..n} (p^k - 1); saturates on
/// overflow, which only matters far beyond the supported ambients.
pub fn sl_order(n: usize, p: u64) -> u128 {
    let p = p as u128;
    let mut order: u128 = 1;
    for _ in 0..n * (n - 1) / 2 {
        order = order.saturating_mul(p);
    }
    for k in 2..=n {
        order = order.saturating_mul(p.saturating_pow(k as u32) - 1);
    }
    order
}

/// Closure of the generators under the group product: BFS from the
/// identity until no new elements appear.
pub fn generate_group(s: &GenSet, budget: Budget) -> Result<MatSet> {
    let n = s.dim();
    let p = s.modulus();
    let id = MatSL::identity(n, p)?;
    let gens = s.elements();
    let mut seen: HashSet<u128> = HashSet::new();
    seen.insert(id.key());
    let mut keys = vec![id.key()];
    let mut frontier = vec![id];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in &frontier {
            for g in &gens {
                let y = x.mul_unchecked(g);
                let k = y.key();
                if seen.insert(k) {
                    keys.push(k);
                    next.push(y);
                }
            }
        }
        budget.charge(keys.len() as u64)?;
        frontier = next;
    }
    keys.par_sort_unstable();
    Ok(MatSet::from_sorted_keys(n as u8, p, keys))
}

/// Vertex table for one Cayley graph: the closed group, decoded once,
/// plus the generators. Edges are recomputed from the generators; for
/// graphs small enough a per-generator index table is kept so the
/// spectral loop does not redo the multiply-encode-search on every one of
/// its thousands of passes. The cache is an index permutation per
/// generator, capped at [`NEIGHBOR_CACHE_LIMIT`] entries.
const NEIGHBOR_CACHE_LIMIT: usize = 1 << 25;

struct Graph {
    set: MatSet,
    elems: Vec<MatSL>,
    gens: Vec<MatSL>,
    id_idx: usize,
    nbr_cache: Option<Vec<u32>>,
}

impl Graph {
    fn build(s: &GenSet, budget: Budget) -> Result<Graph> {
        let set = generate_group(s, budget)?;
        let elems = set.to_elements();
        let gens = s.elements();
        let id_key = MatSL::identity_unchecked(set.dim() as u8, set.modulus()).key();
        let id_idx = set
            .keys()
            .binary_search(&id_key)
            .map_err(|_| Error::Internal("closure lost the identity".into()))?;
        let mut graph = Graph {
            set,
            elems,
            gens,
            id_idx,
            nbr_cache: None,
        };
        let entries = graph.order() * graph.degree();
        if entries > 0 && entries <= NEIGHBOR_CACHE_LIMIT && graph.order() <= u32::MAX as usize {
            let d = graph.degree();
            let mut cache = vec![0u32; entries];
            cache
                .par_chunks_mut(d)
                .enumerate()
                .for_each(|(v, row)| {
                    for (j, slot) in row.iter_mut().enumerate() {
                        *slot = graph.neighbor_uncached(v, j) as u32;
                    }
                });
            graph.nbr_cache = Some(cache);
        }
        Ok(graph)
    }

    fn order(&self) -> usize {
        self.elems.len()
    }

    fn degree(&self) -> usize {
        self.gens.len()
    }

    fn neighbor_uncached(&self, v: usize, j: usize) -> usize {
        let k = self.elems[v].mul_unchecked(&self.gens[j]).key();
        self.set
            .keys()
            .binary_search(&k)
            .expect("closure contains every product")
    }

    #[inline]
    fn neighbor(&self, v: usize, j: usize) -> usize {
        match &self.nbr_cache {
            Some(cache) => cache[v * self.degree() + j] as usize,
            None => self.neighbor_uncached(v, j),
        }
    }
}

/// BFS census from the identity.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BfsStats {
    pub group_order: u64,
    pub diameter: u32,
    pub sphere_sizes: Vec<u64>,
}

/// Diameter of the Cayley graph of the generated group. BFS from the
/// identity suffices: Cayley graphs are vertex-transitive, so the
/// eccentricity of the identity is the diameter.
pub fn diameter(s: &GenSet, budget: Budget) -> Result<BfsStats> {
    let g = Graph::build(s, budget)?;
    Ok(bfs_stats(&g))
}

fn bfs_stats(g: &Graph) -> BfsStats {
    let mut dist = vec![u32::MAX; g.order()];
    dist[g.id_idx] = 0;
    let mut frontier = vec![g.id_idx];
    let mut spheres = vec![1u64];
    let mut level = 0u32;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &v in &frontier {
            for j in 0..g.degree() {
                let u = g.neighbor(v, j);
                if dist[u] == u32::MAX {
                    dist[u] = level + 1;
                    next.push(u);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        level += 1;
        spheres.push(next.len() as u64);
        frontier = next;
    }
    BfsStats {
        group_order: g.order() as u64,
        diameter: level,
        sphere_sizes: spheres,
    }
}

/// Length of the shortest nonempty reduced word over the generators that
/// equals the identity (BFS over words, immediate-inverse backtracking
/// forbidden).
///
/// Conventions: an involution in S is a degenerate 2-cycle, so the girth
/// is 2; an empty generating set has no cycles and reports 0; a single
/// generator pair {t, t^-1} reports the order of t, the length of the
/// cycle graph it generates.
pub fn girth(s: &GenSet, budget: Budget) -> Result<u32> {
    let g = Graph::build(s, budget)?;
    Ok(girth_of(&g))
}

fn girth_of(g: &Graph) -> u32 {
    let d = g.degree();
    if d == 0 {
        return 0;
    }
    for gen in &g.gens {
        if gen.mul_unchecked(gen).is_identity() {
            return 2;
        }
    }
    // index of each generator's inverse within the generator list
    let inverse_of: Vec<usize> = g
        .gens
        .iter()
        .map(|x| {
            let k = x.inv().key();
            g.gens
                .iter()
                .position(|y| y.key() == k)
                .expect("generating set is symmetric")
        })
        .collect();
    let mut visited = vec![false; g.order() * d];
    let mut frontier: Vec<(usize, usize)> = Vec::with_capacity(d);
    for j in 0..d {
        let v = g.neighbor(g.id_idx, j);
        visited[v * d + j] = true;
        frontier.push((v, j));
    }
    let mut depth = 1u32;
    while !frontier.is_empty() {
        depth += 1;
        let mut next = Vec::new();
        for &(v, last) in &frontier {
            for j in 0..d {
                if j == inverse_of[last] {
                    continue;
                }
                let u = g.neighbor(v, j);
                if u == g.id_idx {
                    return depth;
                }
                if !visited[u * d + j] {
                    visited[u * d + j] = true;
                    next.push((u, j));
                }
            }
        }
        frontier = next;
    }
    0
}

/// Power-iteration controls.
#[derive(Clone, Copy, Debug)]
pub struct SpectralOpts {
    pub residual_tol: f64,
    pub iteration_cap: u32,
}

impl Default for SpectralOpts {
    fn default() -> Self {
        SpectralOpts {
            residual_tol: 1e-8,
            iteration_cap: 100_000,
        }
    }
}

/// Spectral summary of the normalized adjacency operator on the generated
/// component. `generated` records whether the closure is all of SL_n(F_p).
#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub n: usize,
    pub p: u64,
    pub group_order: u64,
    pub lambda2: f64,
    pub gap: f64,
    pub iterations: u32,
    pub residual: f64,
    pub converged: bool,
    pub generated: bool,
}

/// Second-largest eigenvalue of the normalized adjacency operator
/// A(x, y) = 1/|S| iff y = xs, via power iteration on (A + I)/2 restricted
/// to the complement of the constant vector. The shift keeps negative
/// eigenvalues from dominating; the mean is subtracted every step to hold
/// the iterate in the complement. The start vector is hashed from the
/// canonical encodings, so runs are deterministic.
pub fn spectral_gap(s: &GenSet, opts: SpectralOpts, budget: Budget) -> Result<SpectralReport> {
    let g = Graph::build(s, budget)?;
    Ok(spectral_of(&g, opts))
}

fn spectral_of(g: &Graph, opts: SpectralOpts) -> SpectralReport {
    let m = g.order();
    let d = g.degree();
    let generated = sl_order(g.set.dim(), g.set.modulus()) == m as u128;
    if m < 2 || d == 0 {
        return SpectralReport {
            n: g.set.dim(),
            p: g.set.modulus(),
            group_order: m as u64,
            lambda2: 0.0,
            gap: 1.0,
            iterations: 0,
            residual: 0.0,
            converged: true,
            generated,
        };
    }
    let mut x: Vec<f64> = g.set.keys().iter().map(|&k| hash_unit(k)).collect();
    center(&mut x);
    let nx = norm(&x);
    if nx < 1e-300 {
        x[0] += 1.0;
        center(&mut x);
    }
    let nx = norm(&x);
    for v in &mut x {
        *v /= nx;
    }
    let mut y = vec![0.0f64; m];
    let mut lambda = 0.0f64;
    let mut lambda_prev = f64::INFINITY;
    let mut residual = f64::INFINITY;
    let mut iterations = 0u32;
    let mut converged = false;
    while iterations < opts.iteration_cap {
        iterations += 1;
        let xs = &x;
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let mut acc = 0.0;
            for j in 0..d {
                acc += xs[g.neighbor(i, j)];
            }
            *yi = 0.5 * (xs[i] + acc / d as f64);
        });
        center(&mut y);
        lambda = dot(&x, &y);
        let ny = norm(&y);
        if ny < 1e-300 {
            // the operator annihilates the complement of the constants
            lambda = 0.0;
            residual = 0.0;
            converged = true;
            break;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ny;
        }
        residual = (lambda - lambda_prev).abs();
        lambda_prev = lambda;
        if iterations >= 2 && residual < opts.residual_tol {
            converged = true;
            break;
        }
    }
    let lambda2 = 2.0 * lambda - 1.0;
    SpectralReport {
        n: g.set.dim(),
        p: g.set.modulus(),
        group_order: m as u64,
        lambda2,
        gap: 1.0 - lambda2,
        iterations,
        residual,
        converged,
        generated,
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn hash_unit(k: u128) -> f64 {
    let h = splitmix64((k as u64) ^ splitmix64((k >> 64) as u64));
    (h >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

/// Fixed-order pairwise summation; deterministic regardless of thread
/// count because it is structural, not scheduling-dependent.
fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 64 {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() <= 64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    } else {
        let mid = a.len() / 2;
        dot(&a[..mid], &b[..mid]) + dot(&a[mid..], &b[mid..])
    }
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn center(x: &mut [f64]) {
    let mean = pairwise_sum(x) / x.len() as f64;
    for v in x.iter_mut() {
        *v -= mean;
    }
}

/// One prime of a reduction sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub p: u64,
    pub group_order: u64,
    pub diameter: u32,
    pub girth: u32,
    pub lambda2: f64,
    pub gap: f64,
    pub generated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSkip {
    pub p: u64,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize, Default)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<SweepSkip>,
}

/// Reduces the integer generators mod every listed prime and emits one
/// diameter/girth/gap row per prime. Primes where a generator fails to be
/// unimodular are skipped with a note rather than failing the sweep.
pub fn sweep(
    int_mats: &[Vec<Vec<i64>>],
    n: usize,
    p_list: &[u64],
    opts: SpectralOpts,
    budget: Budget,
) -> Result<SweepOutcome> {
    let mut outcome = SweepOutcome::default();
    for &p in p_list {
        let gens = match families::reduce_mod_p(int_mats, n, p) {
            Ok(g) => g,
            Err(Error::NotUnimodular { det }) => {
                outcome.skipped.push(SweepSkip {
                    p,
                    reason: format!("generator reduces to determinant {det} mod {p}"),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let graph = Graph::build(&gens, budget)?;
        let stats = bfs_stats(&graph);
        let gir = girth_of(&graph);
        let spectral = spectral_of(&graph, opts);
        outcome.rows.push(SweepRow {
            p,
            group_order: stats.group_order,
            diameter: stats.diameter,
            girth: gir,
            lambda2: spectral.lambda2,
            gap: spectral.gap,
            generated: spectral.generated,
        });
    }
    Ok(outcome)
}
