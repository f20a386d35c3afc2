//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Oracles here are independent of the library's search paths:
//! brute enumeration of determinant-1 matrices, explicit conjugation
//! orbits, all-pairs BFS, and dense full-spectrum eigendecomposition.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use apxgrp::cayley::{
    diameter, generate_group, sl_order, sweep, GenSet, SpectralOpts, SweepOutcome,
};
use apxgrp::families::{borel_subset, progression};
use apxgrp::setops::{certify_approximate, growth_report, Budget, MatSet};
use apxgrp::structure::{
    centralizer_in, check_conjugation_invariance, count_involved_vs_bound,
    lp_exponent_conj_class, lp_exponent_torus, weyl_order, ConjClassHandle, TorusHandle,
};
use apxgrp::{MatSL, PrimeField};
use apxgrp_cli::report::fit_diameter_log_power;

fn budget() -> Budget {
    Budget::default()
}

fn pass(number: u32, name: &str, elapsed: Duration) {
    println!(
        "acceptance {:02} {name}: PASS ({:.2}s)",
        number,
        elapsed.as_secs_f64()
    );
}

fn unipotent_mats() -> Vec<Vec<Vec<i64>>> {
    vec![
        vec![vec![1, 1], vec![0, 1]],
        vec![vec![1, 0], vec![1, 1]],
    ]
}

fn unipotent_gens(p: u64) -> GenSet {
    apxgrp::families::reduce_mod_p(&unipotent_mats(), 2, p).unwrap()
}

fn full_group(p: u64) -> MatSet {
    generate_group(&unipotent_gens(p), budget()).unwrap()
}

/// Split-torus anchor diag(2, 2^-1); regular semisimple for p > 3.
fn split_anchor(p: u64) -> MatSL {
    let f = PrimeField::new(p).unwrap();
    MatSL::new(2, p, &[2, 0, 0, f.inv(2)]).unwrap()
}

/// Oracle: every 2x2 matrix over F_p with determinant 1, by brute scan.
fn brute_sl2(p: u64) -> MatSet {
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

fn explicit_adjacency(group: &MatSet, gens: &GenSet) -> Vec<Vec<usize>> {
    let keys = group.keys();
    let gen_elems = gens.elements();
    group
        .iter()
        .map(|x| {
            gen_elems
                .iter()
                .map(|g| keys.binary_search(&x.mat_mul(g).unwrap().key()).unwrap())
                .collect()
        })
        .collect()
}

fn all_pairs_diameter(adj: &[Vec<usize>]) -> u32 {
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
        diameter = diameter.max(dist.iter().copied().max().unwrap());
    }
    diameter
}

fn dense_lambda2(adj: &[Vec<usize>]) -> f64 {
    let n = adj.len();
    let degree = adj[0].len() as f64;
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    for (v, nbrs) in adj.iter().enumerate() {
        for &u in nbrs {
            m[(v, u)] += 1.0 / degree;
        }
    }
    let mut eigs: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    eigs[1]
}

#[test]
fn acceptance_01_group_orders() {
    let start = Instant::now();
    for p in [3u64, 5, 7, 11, 13] {
        let g = full_group(p);
        assert_eq!(g.len() as u128, sl_order(2, p), "p = {p}");
        assert_eq!(g.len() as u64, p * (p * p - 1), "p = {p}");
    }
    assert_eq!(full_group(3), brute_sl2(3));
    assert_eq!(full_group(5), brute_sl2(5));
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    pass(1, "group orders via closure vs brute enumeration", elapsed);
}

#[test]
fn acceptance_02_subgroups_are_one_approximate() {
    let start = Instant::now();
    for p in [3u64, 5, 7, 11, 13] {
        let borel = borel_subset(2, p, budget()).unwrap();
        let r = growth_report(&borel, budget()).unwrap();
        assert_eq!(r.doubling, 1.0, "borel p = {p}");
        assert_eq!(r.tripling, 1.0, "borel p = {p}");
        let w = certify_approximate(&borel, budget()).unwrap();
        assert_eq!(w.k, 1, "borel p = {p}");

        let f = PrimeField::new(p).unwrap();
        let torus = MatSet::from_elements(
            2,
            p,
            (1..p).map(|lam| MatSL::new(2, p, &[lam, 0, 0, f.inv(lam)]).unwrap()),
        )
        .unwrap();
        let r = growth_report(&torus, budget()).unwrap();
        assert_eq!((r.doubling, r.tripling), (1.0, 1.0), "torus p = {p}");
        let w = certify_approximate(&torus, budget()).unwrap();
        assert_eq!(w.k, 1, "torus p = {p}");
    }
    pass(2, "subgroups certify with K = 1", start.elapsed());
}

#[test]
fn acceptance_03_progression_certification() {
    let start = Instant::now();
    let u = MatSL::new(2, 101, &[1, 1, 0, 1]).unwrap();
    for n in [3u64, 5, 10] {
        let a = progression(&u, n as u32);
        let r = growth_report(&a, budget()).unwrap();
        assert_eq!(r.size1, 2 * n + 1);
        assert_eq!(r.size3, 6 * n + 1);
        assert_eq!(r.tripling, (6 * n + 1) as f64 / (2 * n + 1) as f64);
        let w = certify_approximate(&a, budget()).unwrap();
        assert!(w.k <= 5, "N = {n}: greedy K = {}", w.k);
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    pass(3, "progression tripling and greedy K <= 5", elapsed);
}

const PRIMES_11_TO_101: [u64; 22] = [
    11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101,
];

#[test]
fn acceptance_04_torus_exponent_across_primes() {
    let start = Instant::now();
    for p in PRIMES_11_TO_101 {
        let g = full_group(p);
        let t = TorusHandle::new(split_anchor(p)).unwrap();
        let report = lp_exponent_torus(&g, 1, &t, budget()).unwrap();
        assert_eq!(report.count, p - 1, "p = {p}");
        assert!(
            (0.30..=0.36).contains(&report.measured_exponent),
            "p = {p}: exponent {}",
            report.measured_exponent
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    pass(4, "torus exponent in [0.30, 0.36] for p in [11, 101]", elapsed);
}

#[test]
fn acceptance_05_conjugacy_class_exponent() {
    let start = Instant::now();
    for p in [11u64, 31, 101] {
        let g = full_group(p);
        let c = ConjClassHandle::new(&split_anchor(p)).unwrap();
        let report = lp_exponent_conj_class(&g, 1, &c, budget()).unwrap();
        assert!(
            (report.measured_exponent - 2.0 / 3.0).abs() <= 0.06,
            "p = {p}: exponent {}",
            report.measured_exponent
        );
    }
    pass(5, "conjugacy-class exponent within 0.06 of 2/3", start.elapsed());
}

#[test]
fn acceptance_06_fibre_identity() {
    let start = Instant::now();
    let g = full_group(5);
    let a = MatSL::new(2, 5, &[2, 0, 0, 3]).unwrap();
    // oracle: brute conjugation orbit
    let orbit =
        MatSet::from_elements(2, 5, g.iter().map(|x| a.conjugated_by(&x).unwrap())).unwrap();
    assert_eq!(orbit.len(), 30);
    assert_eq!(g.len() / orbit.len(), 4);
    let z = centralizer_in(&g, &a).unwrap();
    assert_eq!(z.len(), 4);
    pass(6, "orbit 30 and 120/30 = 4 = |Z(a)| on SL_2(F_5)", start.elapsed());
}

#[test]
fn acceptance_07_involved_census_and_invariance() {
    let start = Instant::now();
    // full group: hard assertions
    let g = full_group(5);
    let census = count_involved_vs_bound(&g, budget()).unwrap();
    assert_eq!(census.count, 25);
    let violations = check_conjugation_invariance(&g, &g, budget()).unwrap();
    assert!(
        violations.is_empty(),
        "full-group invariance violated: {} pairs",
        violations.len()
    );
    // radius-2 balls: the list is emitted and recorded; empty is expected
    // but only the full-group case above is allowed to fail the run
    for p in [7u64, 11] {
        let gens = unipotent_gens(p);
        let a = apxgrp::families::ball(&gens, 2, budget()).unwrap();
        let list = check_conjugation_invariance(&a, gens.as_set(), budget()).unwrap();
        println!(
            "acceptance 07 note: ball r=2 mod {p}: |A| = {}, violations = {}",
            a.len(),
            list.len()
        );
    }
    pass(7, "involved census m = 25 with empty violation list", start.elapsed());
}

#[test]
fn acceptance_08_involved_count_exponent() {
    let start = Instant::now();
    for p in [5u64, 7, 11] {
        let g = full_group(p);
        let r = count_involved_vs_bound(&g, budget()).unwrap();
        assert_eq!(r.count, p * p, "p = {p}");
        assert!(
            r.measured_exponent <= 0.72,
            "p = {p}: exponent {}",
            r.measured_exponent
        );
    }
    pass(8, "involved-tori exponent <= 0.72", start.elapsed());
}

#[test]
fn acceptance_09_weyl_order_two() {
    let start = Instant::now();
    for p in [5u64, 7, 11] {
        let g = full_group(p);
        // first split and nonsplit anchors by centralizer size
        let mut split = None;
        let mut nonsplit = None;
        for x in g.iter() {
            if !x.is_regular_semisimple().unwrap() {
                continue;
            }
            let z = centralizer_in(&g, &x).unwrap().len() as u64;
            if z == p - 1 && split.is_none() {
                split = Some(x);
            } else if z == p + 1 && nonsplit.is_none() {
                nonsplit = Some(x);
            }
            if split.is_some() && nonsplit.is_some() {
                break;
            }
        }
        for anchor in [split.unwrap(), nonsplit.unwrap()] {
            let t = TorusHandle::new(anchor).unwrap();
            assert_eq!(weyl_order(&g, &t, budget()).unwrap(), 2, "p = {p}");
        }
    }
    pass(9, "Weyl order 2 for split and nonsplit tori", start.elapsed());
}

const SWEEP_PRIMES: [u64; 17] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61];

struct SharedSweep {
    outcome: SweepOutcome,
    elapsed: Duration,
}

fn shared_sweep() -> &'static SharedSweep {
    static SWEEP: OnceLock<SharedSweep> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let start = Instant::now();
        let outcome = sweep(
            &unipotent_mats(),
            2,
            &SWEEP_PRIMES,
            SpectralOpts::default(),
            budget(),
        )
        .unwrap();
        SharedSweep {
            outcome,
            elapsed: start.elapsed(),
        }
    })
}

#[test]
fn acceptance_10_diameter_growth() {
    let shared = shared_sweep();
    let rows = &shared.outcome.rows;
    assert_eq!(rows.len(), SWEEP_PRIMES.len());
    assert!(shared.outcome.skipped.is_empty());
    for row in rows {
        assert_eq!(row.group_order as u128, sl_order(2, row.p));
        assert!(row.generated);
    }
    let fit = fit_diameter_log_power(rows).unwrap();
    assert!(fit.b <= 3.0, "fit exponent b = {}", fit.b);
    // independent all-pairs oracle at p = 3
    let gens3 = unipotent_gens(3);
    let group3 = generate_group(&gens3, budget()).unwrap();
    let oracle = all_pairs_diameter(&explicit_adjacency(&group3, &gens3));
    assert_eq!(rows[0].p, 3);
    assert_eq!(rows[0].diameter, oracle);
    assert_eq!(diameter(&gens3, budget()).unwrap().diameter, oracle);
    assert!(
        shared.elapsed < Duration::from_secs(300),
        "sweep took {:?}",
        shared.elapsed
    );
    println!(
        "acceptance 10 note: fit diameter(p) = {:.3} (log p)^{:.3} over {} primes",
        fit.a, fit.b, fit.points
    );
    pass(10, "diameter fit b <= 3 and p = 3 all-pairs match", shared.elapsed);
}

#[test]
fn acceptance_11_spectral_gap_stability() {
    let start = Instant::now();
    let rows = &shared_sweep().outcome.rows;
    // dense full-spectrum oracle at p = 3 and p = 5
    for p in [3u64, 5] {
        let gens = unipotent_gens(p);
        let group = generate_group(&gens, budget()).unwrap();
        let oracle = dense_lambda2(&explicit_adjacency(&group, &gens));
        let row = rows.iter().find(|r| r.p == p).unwrap();
        assert!(
            (row.lambda2 - oracle).abs() < 1e-6,
            "p = {p}: power iteration {} vs dense {}",
            row.lambda2,
            oracle
        );
    }
    println!("acceptance 11 note: lambda2 matches the dense oracle at p = 3 and p = 5");
    // gap stability across the sweep, relative to the gap at p = 5
    let gap5 = rows.iter().find(|r| r.p == 5).unwrap().gap;
    let (pmin, min_gap) = rows
        .iter()
        .filter(|r| r.p >= 5)
        .map(|r| (r.p, r.gap))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    assert!(
        min_gap >= 0.5 * gap5,
        "gap stability fails as stated: min gap {min_gap:.4} at p = {pmin} \
         vs 0.5 x gap(5) = {:.4}; the measured gaps for the standard unipotent \
         family settle near 0.04 while gap(5) is {gap5:.4}, so the 0.5 factor \
         relative to p = 5 cannot hold (see notes/decisions.md)",
        0.5 * gap5
    );
    pass(11, "spectral gap stability", start.elapsed());
}

#[test]
fn acceptance_12_determinism_across_thread_counts() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let growth_cfg = dir.path().join("growth.toml");
    std::fs::write(
        &growth_cfg,
        r#"
n = 2
p = 101
[family]
kind = "progression"
g = [[1, 1], [0, 1]]
n_steps = 5
"#,
    )
    .unwrap();
    let sweep_cfg = dir.path().join("sweep.toml");
    std::fs::write(
        &sweep_cfg,
        r#"
n = 2
p_list = [3, 5, 7]
[family]
kind = "mod_p_reduction"
mats = [[[1, 1], [0, 1]], [[1, 0], [1, 1]]]
"#,
    )
    .unwrap();
    let structure_cfg = dir.path().join("structure.toml");
    std::fs::write(
        &structure_cfg,
        r#"
n = 2
p = 11
[family]
kind = "subgroup"
mats = [[[1, 1], [0, 1]], [[1, 0], [1, 1]]]
[knobs]
powers = [1]
conjugators = "family"
"#,
    )
    .unwrap();

    let bin = env!("CARGO_BIN_EXE_apxgrp");
    let run = |sub: &str, cfg: &std::path::Path, threads: u32, out: &std::path::Path| {
        let status = std::process::Command::new(bin)
            .args([
                sub,
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--threads",
                &threads.to_string(),
            ])
            .status()
            .unwrap();
        assert!(status.success(), "{sub} with {threads} threads failed");
        let text = std::fs::read_to_string(out).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        serde_json::to_string(&value["payload"]).unwrap()
    };

    for (sub, cfg) in [
        ("growth", &growth_cfg),
        ("sweep", &sweep_cfg),
        ("structure", &structure_cfg),
    ] {
        let a = run(sub, cfg, 1, &dir.path().join("a.json"));
        let b = run(sub, cfg, 2, &dir.path().join("b.json"));
        let c = run(sub, cfg, 2, &dir.path().join("c.json"));
        assert_eq!(a, b, "{sub}: payload differs between 1 and 2 threads");
        assert_eq!(b, c, "{sub}: payload differs between identical reruns");
    }
    // sweep CSVs byte-identical too
    let csv_a = {
        run("sweep", &sweep_cfg, 1, &dir.path().join("s1.json"));
        std::fs::read(dir.path().join("s1.csv")).unwrap()
    };
    let csv_b = {
        run("sweep", &sweep_cfg, 3, &dir.path().join("s2.json"));
        std::fs::read(dir.path().join("s2.csv")).unwrap()
    };
    assert_eq!(csv_a, csv_b);
    pass(12, "byte-identical payloads across thread counts", start.elapsed());
}
