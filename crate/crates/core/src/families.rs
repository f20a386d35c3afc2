//! Constructors for the experiment families: geometric progressions,
//! word balls, Borel (upper-triangular) subgroups, mod-p reductions of
//! integer matrices, and seeded random generator sets.
//!
//! Every constructor yields either a symmetric [`MatSet`] containing the
//! identity or a [`GenSet`]; both pass the set invariants downstream
//! operations rely on. Construction is pure given (parameters, seed).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cayley::{generate_group, GenSet};
use crate::error::{Error, Result};
use crate::ffmat::{validate_ambient, MatSL, PrimeField};
use crate::setops::{Budget, MatSet};

/// {g^i : |i| <= n}, symmetric and containing the identity. Stops early on
/// wraparound, at which point the whole cyclic group has been collected.
pub fn progression(g: &MatSL, n: u32) -> MatSet {
    let id = MatSL::identity_unchecked(g.dim() as u8, g.modulus());
    let ginv = g.inv();
    let mut elems = vec![id];
    let mut fwd = id;
    let mut bwd = id;
    for _ in 0..n {
        fwd = fwd.mul_unchecked(g);
        if fwd.is_identity() {
            break;
        }
        bwd = bwd.mul_unchecked(&ginv);
        elems.push(fwd);
        elems.push(bwd);
    }
    MatSet::from_elements(g.dim(), g.modulus(), elems)
        .expect("progression elements share one validated ambient")
}

/// (S ∪ {id})^r: the radius-r word ball, computed by truncated BFS.
pub fn ball(s: &GenSet, r: u32, budget: Budget) -> Result<MatSet> {
    let id = MatSL::identity(s.dim(), s.modulus())?;
    let gens = s.elements();
    let mut seen = std::collections::HashSet::new();
    seen.insert(id.key());
    let mut elems = vec![id];
    let mut frontier = vec![id];
    for _ in 0..r {
        let mut next = Vec::new();
        for x in &frontier {
            for g in &gens {
                let y = x.mul_unchecked(g);
                if seen.insert(y.key()) {
                    elems.push(y);
                    next.push(y);
                }
            }
        }
        budget.charge(elems.len() as u64)?;
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    MatSet::from_elements(s.dim(), s.modulus(), elems)
}

/// All upper-triangular determinant-1 matrices: a genuine solvable
/// subgroup of order (p-1)^(n-1) * p^(n(n-1)/2).
pub fn borel_subset(n: usize, p: u64, budget: Budget) -> Result<MatSet> {
    let field = validate_ambient(n, p)?;
    let diag_choices = (p - 1).checked_pow(n as u32 - 1).unwrap_or(u64::MAX);
    let upper_slots = n * (n - 1) / 2;
    let upper_choices = p.checked_pow(upper_slots as u32).unwrap_or(u64::MAX);
    let count = (diag_choices as u128) * (upper_choices as u128);
    budget.charge_u128(count)?;
    let mut elems = Vec::with_capacity(count as usize);
    let mut entries = [0u64; 16];
    for idx in 0..count {
        let mut rest = idx;
        entries[..n * n].fill(0);
        // diagonal: n-1 free units, the last one forced
        let mut prod = 1u64;
        for i in 0..n - 1 {
            let digit = (rest % (p - 1) as u128) as u64 + 1;
            rest /= (p - 1) as u128;
            entries[i * n + i] = digit;
            prod = field.mul(prod, digit);
        }
        entries[(n - 1) * n + (n - 1)] = field.inv(prod);
        // strict upper entries
        for i in 0..n {
            for j in (i + 1)..n {
                let digit = (rest % p as u128) as u64;
                rest /= p as u128;
                entries[i * n + j] = digit;
            }
        }
        elems.push(MatSL::from_parts(n as u8, p, entries));
    }
    MatSet::from_elements(n, p, elems)
}

/// Reduces integer matrices mod p to a symmetric generator set. Inputs
/// must be n x n and unimodular after reduction.
pub fn reduce_mod_p(int_mats: &[Vec<Vec<i64>>], n: usize, p: u64) -> Result<GenSet> {
    let mut elems = Vec::with_capacity(int_mats.len());
    for rows in int_mats {
        elems.push(MatSL::from_int_rows(n, p, rows)?);
    }
    GenSet::new(n, p, elems)
}

/// One element of SL_n(F_p) by rejection: draw a uniform matrix, retry on
/// determinant zero, then rescale the first row to force determinant 1.
pub fn random_element(n: usize, p: u64, rng: &mut impl Rng) -> Result<MatSL> {
    let field = validate_ambient(n, p)?;
    let _ = field;
    loop {
        let entries: Vec<u64> = (0..n * n).map(|_| rng.gen_range(0..p)).collect();
        let candidate = raw_det(n, p, &entries);
        if candidate == 0 {
            continue;
        }
        let scale = PrimeField::new(p)?.inv(candidate);
        let mut fixed = entries;
        for v in fixed.iter_mut().take(n) {
            *v = PrimeField::new(p)?.mul(*v, scale);
        }
        return MatSL::new(n, p, &fixed);
    }
}

fn raw_det(n: usize, p: u64, entries: &[u64]) -> u64 {
    // determinant of an arbitrary (not necessarily unimodular) matrix
    let f = PrimeField::unchecked(p);
    let mut m = entries.to_vec();
    let mut det = 1u64 % p;
    let mut negate = false;
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| m[r * n + col] != 0) else {
            return 0;
        };
        if pivot != col {
            for c in 0..n {
                m.swap(pivot * n + c, col * n + c);
            }
            negate = !negate;
        }
        let pv = m[col * n + col];
        det = f.mul(det, pv);
        let inv_pv = f.inv(pv);
        for r in (col + 1)..n {
            let factor = f.mul(m[r * n + col], inv_pv);
            if factor == 0 {
                continue;
            }
            for c in col..n {
                let s = f.mul(factor, m[col * n + c]);
                m[r * n + c] = f.sub(m[r * n + c], s);
            }
        }
    }
    if negate {
        f.neg(det)
    } else {
        det
    }
}

/// `count` seeded random elements, symmetrized into a generator set.
pub fn random_generators(n: usize, p: u64, count: u32, seed: u64) -> Result<GenSet> {
    if count == 0 {
        return Err(Error::SetTooSmall { len: 0, min: 1 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elems: Vec<MatSL> = (0..count)
        .map(|_| random_element(n, p, &mut rng))
        .collect::<Result<_>>()?;
    GenSet::new(n, p, elems)
}

/// On-disk description of an experiment family. Integer matrices are row
/// lists and get reduced mod p at build time.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// Closure of the given integer generators: a genuine finite subgroup.
    Subgroup { mats: Vec<Vec<Vec<i64>>> },
    /// {g^i : |i| <= n_steps} for a single integer matrix g.
    Progression { g: Vec<Vec<i64>>, n_steps: u32 },
    /// Radius-r word ball on the symmetrized generators.
    Ball { mats: Vec<Vec<Vec<i64>>>, radius: u32 },
    /// All upper-triangular determinant-1 matrices.
    Borel,
    /// The symmetrized reduction itself, with the identity (a radius-1 ball).
    ModPReduction { mats: Vec<Vec<Vec<i64>>> },
    /// Seeded random generators, symmetrized, with the identity.
    Random {
        count: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

impl FamilySpec {
    /// Builds the family as a symmetric set containing the identity.
    pub fn build_set(&self, n: usize, p: u64, default_seed: u64, budget: Budget) -> Result<MatSet> {
        match self {
            FamilySpec::Subgroup { mats } => generate_group(&reduce_mod_p(mats, n, p)?, budget),
            FamilySpec::Progression { g, n_steps } => {
                Ok(progression(&MatSL::from_int_rows(n, p, g)?, *n_steps))
            }
            FamilySpec::Ball { mats, radius } => ball(&reduce_mod_p(mats, n, p)?, *radius, budget),
            FamilySpec::Borel => borel_subset(n, p, budget),
            FamilySpec::ModPReduction { mats } => ball(&reduce_mod_p(mats, n, p)?, 1, budget),
            FamilySpec::Random { count, seed } => ball(
                &random_generators(n, p, *count, seed.unwrap_or(default_seed))?,
                1,
                budget,
            ),
        }
    }

    /// The family's generator set, for graph experiments.
    pub fn generator_set(&self, n: usize, p: u64, default_seed: u64) -> Result<GenSet> {
        match self {
            FamilySpec::Subgroup { mats }
            | FamilySpec::Ball { mats, .. }
            | FamilySpec::ModPReduction { mats } => reduce_mod_p(mats, n, p),
            FamilySpec::Progression { g, .. } => {
                let gm = MatSL::from_int_rows(n, p, g)?;
                GenSet::new(n, p, [gm])
            }
            FamilySpec::Borel => Err(Error::NoGeneratorForm("borel")),
            FamilySpec::Random { count, seed } => {
                random_generators(n, p, *count, seed.unwrap_or(default_seed))
            }
        }
    }

    /// Raw integer generator matrices, when the family carries them
    /// (needed for reduction sweeps).
    pub fn int_mats(&self) -> Option<&[Vec<Vec<i64>>]> {
        match self {
            FamilySpec::Subgroup { mats }
            | FamilySpec::Ball { mats, .. }
            | FamilySpec::ModPReduction { mats } => Some(mats),
            _ => None,
        }
    }
}
