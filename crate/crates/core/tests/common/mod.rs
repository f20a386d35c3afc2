//! Shared oracle helpers for the integration suites. These deliberately
//! avoid the library's own search paths: brute enumeration over all
//! matrices, explicit adjacency construction, dense spectra.

// each test binary uses its own subset of these
#![allow(dead_code)]

use apxgrp::cayley::GenSet;
use apxgrp::{Budget, MatSL, MatSet};

pub fn budget() -> Budget {
    Budget::default()
}

/// Every 2x2 matrix over F_p with determinant 1, by exhaustive scan.
pub fn brute_sl2(p: u64) -> MatSet {
    let mut elems = Vec::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    if let Ok(m) = MatSL::new(2, p, &[a, b, c, d]) {
                        elems.push(m);
                    }
                }
            }
        }
    }
    MatSet::from_elements(2, p, elems).unwrap()
}

pub fn unipotent_gens(p: u64) -> GenSet {
    let u = MatSL::new(2, p, &[1, 1, 0, 1]).unwrap();
    let l = MatSL::new(2, p, &[1, 0, 1, 1]).unwrap();
    GenSet::new(2, p, [u, l]).unwrap()
}

pub fn unipotent_mats() -> Vec<Vec<Vec<i64>>> {
    vec![
        vec![vec![1, 1], vec![0, 1]],
        vec![vec![1, 0], vec![1, 1]],
    ]
}

/// Explicit adjacency lists of the Cayley graph of ⟨S⟩, built directly
/// from multiplication, independent of the library's graph plumbing.
pub fn explicit_adjacency(group: &MatSet, gens: &GenSet) -> Vec<Vec<usize>> {
    let keys = group.keys();
    let gen_elems = gens.elements();
    group
        .iter()
        .map(|x| {
            gen_elems
                .iter()
                .map(|g| {
                    let k = x.mat_mul(g).unwrap().key();
                    keys.binary_search(&k).unwrap()
                })
                .collect()
        })
        .collect()
}

/// All-pairs BFS diameter on an explicit adjacency list.
pub fn all_pairs_diameter(adj: &[Vec<usize>]) -> u32 {
    let n = adj.len();
    let mut diameter = 0u32;
    for start in 0..n {
        let mut dist = vec![u32::MAX; n];
        dist[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if dist[u] == u32::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        let ecc = dist.iter().copied().max().unwrap();
        assert_ne!(ecc, u32::MAX, "graph must be connected");
        diameter = diameter.max(ecc);
    }
    diameter
}

/// Girth of a simple graph by edge removal: for every edge (u, v), the
/// shortest u-v path avoiding that edge plus the edge itself is a cycle;
/// the minimum over edges is the girth. Quadratic and only for oracles.
pub fn edge_removal_girth(adj: &[Vec<usize>]) -> Option<u32> {
    let n = adj.len();
    let mut best: Option<u32> = None;
    for u in 0..n {
        for &v in &adj[u] {
            if v < u {
                continue;
            }
            // BFS from u to v without using edge (u, v)
            let mut dist = vec![u32::MAX; n];
            dist[u] = 0;
            let mut queue = std::collections::VecDeque::from([u]);
            while let Some(w) = queue.pop_front() {
                for &t in &adj[w] {
                    if (w == u && t == v) || (w == v && t == u) {
                        continue;
                    }
                    if dist[t] == u32::MAX {
                        dist[t] = dist[w] + 1;
                        queue.push_back(t);
                    }
                }
            }
            if dist[v] != u32::MAX {
                let cycle = dist[v] + 1;
                best = Some(best.map_or(cycle, |b| b.min(cycle)));
            }
        }
    }
    best
}
