//! Maximal tori, centralizers, conjugacy classes, involved tori, Weyl
//! quotients and intersection-exponent measurements inside SL_n(F_p).
//!
//! A maximal torus is represented by a regular semisimple anchor: for such
//! an element the torus equals the centralizer, so membership is a plain
//! commuting test and no algebraic-closure arithmetic is ever needed. A
//! regular semisimple element lies on a unique maximal torus, which makes
//! "same torus" a commuting test as well and lets torus lists dedup by
//! anchor. Conjugacy classes of regular semisimple anchors are keyed by
//! the characteristic polynomial.
//!
//! Exponent comparisons are reports, never assertions: the constants in
//! the asymptotic statements being measured are ineffective, so the
//! numbers are for inspection against the predicted dimension ratios.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffmat::{CharPoly, MatSL};
use crate::setops::{power_set, Budget, MatSet};

fn commutes(a: &MatSL, b: &MatSL) -> bool {
    a.mul_unchecked(b) == b.mul_unchecked(a)
}

/// Maximal torus anchored at a regular semisimple element; membership is
/// the commuting test against the anchor.
#[derive(Clone, Copy, Debug)]
pub struct TorusHandle {
    anchor: MatSL,
}

impl TorusHandle {
    pub fn new(anchor: MatSL) -> Result<Self> {
        if !anchor.is_regular_semisimple()? {
            return Err(Error::NotRegularSemisimple);
        }
        Ok(TorusHandle { anchor })
    }

    pub fn anchor(&self) -> &MatSL {
        &self.anchor
    }

    pub fn contains(&self, x: &MatSL) -> bool {
        x.same_ambient(&self.anchor) && commutes(x, &self.anchor)
    }
}

/// Conjugacy class of a regular semisimple anchor, keyed by its
/// characteristic polynomial. Membership requires the candidate to be
/// regular semisimple too: for non-regular elements equal characteristic
/// polynomials do not mean conjugacy.
#[derive(Clone, Debug)]
pub struct ConjClassHandle {
    charpoly: CharPoly,
}

impl ConjClassHandle {
    pub fn new(anchor: &MatSL) -> Result<Self> {
        if !anchor.is_regular_semisimple()? {
            return Err(Error::NotRegularSemisimple);
        }
        Ok(ConjClassHandle {
            charpoly: anchor.char_poly(),
        })
    }

    pub fn charpoly(&self) -> &CharPoly {
        &self.charpoly
    }

    pub fn contains(&self, x: &MatSL) -> bool {
        x.char_poly() == self.charpoly && x.is_regular_semisimple().unwrap_or(false)
    }
}

/// {x in s : xa = ax}.
pub fn centralizer_in(s: &MatSet, a: &MatSL) -> Result<MatSet> {
    if s.dim() != a.dim() || s.modulus() != a.modulus() {
        return Err(Error::AmbientMismatch);
    }
    let keys: Vec<u128> = s
        .keys()
        .par_iter()
        .filter(|&&k| commutes(&s.decode(k), a))
        .copied()
        .collect();
    Ok(MatSet::from_sorted_keys(s.dim() as u8, s.modulus(), keys))
}

/// Two regular semisimple elements lie on the same maximal torus iff they
/// commute (each one's torus is its centralizer, and the torus containing
/// a regular semisimple element is unique).
pub fn same_torus(a: &MatSL, b: &MatSL) -> Result<bool> {
    if !a.same_ambient(b) {
        return Err(Error::AmbientMismatch);
    }
    if !a.is_regular_semisimple()? || !b.is_regular_semisimple()? {
        return Err(Error::NotRegularSemisimple);
    }
    Ok(commutes(a, b))
}

fn check_set_ambient(a: &MatSet, n: usize, p: u64) -> Result<()> {
    if a.dim() != n || a.modulus() != p {
        return Err(Error::AmbientMismatch);
    }
    Ok(())
}

/// Exact |A^m ∩ T| by membership scan over the m-fold product set.
pub fn torus_intersection(a: &MatSet, m: u32, t: &TorusHandle, budget: Budget) -> Result<u64> {
    check_set_ambient(a, t.anchor.dim(), t.anchor.modulus())?;
    let am = power_set(a, m, budget)?;
    Ok(am
        .keys()
        .par_iter()
        .filter(|&&k| t.contains(&am.decode(k)))
        .count() as u64)
}

/// Number of non-regular elements of A^m ∩ T (the part living on the
/// deficient subtori).
pub fn deficient_count(a: &MatSet, m: u32, t: &TorusHandle, budget: Budget) -> Result<u64> {
    check_set_ambient(a, t.anchor.dim(), t.anchor.modulus())?;
    let am = power_set(a, m, budget)?;
    let count = am
        .keys()
        .par_iter()
        .filter(|&&k| {
            let x = am.decode(k);
            t.contains(&x) && !x.is_regular_semisimple().unwrap_or(true)
        })
        .count();
    Ok(count as u64)
}

/// Exact |A^m ∩ C(a)| by characteristic-polynomial membership.
pub fn conj_class_intersection(
    a: &MatSet,
    m: u32,
    c: &ConjClassHandle,
    budget: Budget,
) -> Result<u64> {
    if c.charpoly.modulus() != a.modulus() || c.charpoly.degree() != a.dim() {
        return Err(Error::AmbientMismatch);
    }
    let am = power_set(a, m, budget)?;
    Ok(am
        .keys()
        .par_iter()
        .filter(|&&k| c.contains(&am.decode(k)))
        .count() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VarietyKind {
    Torus,
    Deficient,
    ConjClass,
}

/// Measured intersection exponent against the predicted dimension ratio
/// dim V / dim G. This is a report, not a verdict.
#[derive(Clone, Debug, Serialize)]
pub struct LPReport {
    pub variety: VarietyKind,
    pub m: u32,
    pub count: u64,
    pub set_size: u64,
    pub measured_exponent: f64,
    pub predicted_exponent: f64,
}

fn measured_exponent(count: u64, size: u64) -> f64 {
    if count == 0 {
        0.0
    } else {
        (count as f64).ln() / (size as f64).ln()
    }
}

fn lp_report(
    kind: VarietyKind,
    m: u32,
    count: u64,
    a: &MatSet,
    predicted: f64,
) -> Result<LPReport> {
    if a.len() < 2 {
        return Err(Error::SetTooSmall {
            len: a.len(),
            min: 2,
        });
    }
    Ok(LPReport {
        variety: kind,
        m,
        count,
        set_size: a.len() as u64,
        measured_exponent: measured_exponent(count, a.len() as u64),
        predicted_exponent: predicted,
    })
}

/// Torus exponent: dim T / dim G = (n-1)/(n^2-1), which is 1/(n+1).
pub fn lp_exponent_torus(a: &MatSet, m: u32, t: &TorusHandle, budget: Budget) -> Result<LPReport> {
    let count = torus_intersection(a, m, t, budget)?;
    let n = a.dim() as f64;
    lp_report(VarietyKind::Torus, m, count, a, (n - 1.0) / (n * n - 1.0))
}

/// Deficient-part exponent: the non-regular locus of a maximal torus has
/// dimension at most n-2, so the prediction is (n-2)/(n^2-1).
pub fn lp_exponent_deficient(
    a: &MatSet,
    m: u32,
    t: &TorusHandle,
    budget: Budget,
) -> Result<LPReport> {
    let count = deficient_count(a, m, t, budget)?;
    let n = a.dim() as f64;
    lp_report(
        VarietyKind::Deficient,
        m,
        count,
        a,
        (n - 2.0) / (n * n - 1.0),
    )
}

/// Conjugacy-class exponent: dim C / dim G = (n^2-n)/(n^2-1).
pub fn lp_exponent_conj_class(
    a: &MatSet,
    m: u32,
    c: &ConjClassHandle,
    budget: Budget,
) -> Result<LPReport> {
    let count = conj_class_intersection(a, m, c, budget)?;
    let n = a.dim() as f64;
    lp_report(
        VarietyKind::ConjClass,
        m,
        count,
        a,
        (n * n - n) / (n * n - 1.0),
    )
}

/// One handle per maximal torus whose intersection with A^2 contains a
/// regular semisimple element. Dedup is by the commuting test against the
/// representatives found so far; representatives come out in canonical
/// encoding order, so the list is reproducible.
pub fn enumerate_involved_tori(a: &MatSet, budget: Budget) -> Result<Vec<TorusHandle>> {
    if a.modulus() <= a.dim() as u64 {
        return Err(Error::SmallCharacteristic {
            p: a.modulus(),
            n: a.dim(),
        });
    }
    let a2 = power_set(a, 2, budget)?;
    let mut reps: Vec<MatSL> = Vec::new();
    for x in a2.iter() {
        if !x.is_regular_semisimple()? {
            continue;
        }
        if !reps.iter().any(|r| commutes(r, &x)) {
            reps.push(x);
        }
    }
    Ok(reps
        .into_iter()
        .map(|anchor| TorusHandle { anchor })
        .collect())
}

/// An involved torus whose conjugate fell outside the involved list.
#[derive(Clone, Copy, Debug)]
pub struct Violation {
    pub torus_anchor: MatSL,
    pub conjugator: MatSL,
}

/// For each involved torus T and conjugator g, tests whether g^-1 T g is
/// again involved. The returned list is empty exactly when invariance
/// holds over the tested conjugators.
pub fn check_conjugation_invariance(
    a: &MatSet,
    conjugators: &MatSet,
    budget: Budget,
) -> Result<Vec<Violation>> {
    if !a.same_ambient(conjugators) {
        return Err(Error::AmbientMismatch);
    }
    let anchors: Vec<MatSL> = enumerate_involved_tori(a, budget)?
        .into_iter()
        .map(|t| t.anchor)
        .collect();
    let gs = conjugators.to_elements();
    let violations: Vec<Vec<Violation>> = anchors
        .par_iter()
        .map(|anchor| {
            let mut out = Vec::new();
            for g in &gs {
                let moved = g.inv().mul_unchecked(anchor).mul_unchecked(g);
                if !anchors.iter().any(|r| commutes(r, &moved)) {
                    out.push(Violation {
                        torus_anchor: *anchor,
                        conjugator: *g,
                    });
                }
            }
            out
        })
        .collect();
    Ok(violations.into_iter().flatten().collect())
}

/// Involved-torus count against the predicted ceiling exponent n/(n+1).
#[derive(Clone, Debug, Serialize)]
pub struct InvolvedToriReport {
    pub count: u64,
    pub measured_exponent: f64,
    pub bound_exponent: f64,
}

pub fn count_involved_vs_bound(a: &MatSet, budget: Budget) -> Result<InvolvedToriReport> {
    let count = enumerate_involved_tori(a, budget)?.len() as u64;
    let n = a.dim() as f64;
    Ok(InvolvedToriReport {
        count,
        measured_exponent: measured_exponent(count, a.len() as u64),
        bound_exponent: n / (n + 1.0),
    })
}

/// Fraction of A^k that is regular semisimple, exactly.
pub fn regular_proportion(a: &MatSet, k: u32, budget: Budget) -> Result<f64> {
    if a.modulus() <= a.dim() as u64 {
        return Err(Error::SmallCharacteristic {
            p: a.modulus(),
            n: a.dim(),
        });
    }
    let ak = power_set(a, k, budget)?;
    if ak.is_empty() {
        return Ok(0.0);
    }
    let count = ak
        .keys()
        .par_iter()
        .filter(|&&key| ak.decode(key).is_regular_semisimple().unwrap_or(false))
        .count();
    Ok(count as f64 / ak.len() as f64)
}

/// Order of N_G(T)/T for a fully enumerated finite group `g`.
///
/// The input must be closed under products (checked exhaustively, which is
/// what the budget gates: the check is |g|^2 products). Normalizer
/// membership is "x a x^-1 still commutes with a", valid because the
/// anchor pins down its unique torus.
pub fn weyl_order(g: &MatSet, t: &TorusHandle, budget: Budget) -> Result<u64> {
    check_set_ambient(g, t.anchor.dim(), t.anchor.modulus())?;
    if g.is_empty() {
        return Err(Error::NotClosed);
    }
    budget.charge_u128(g.len() as u128 * g.len() as u128)?;
    let elems = g.to_elements();
    let closed = elems
        .par_iter()
        .all(|x| elems.iter().all(|y| g.contains_key(x.mul_unchecked(y).key())));
    if !closed {
        return Err(Error::NotClosed);
    }
    let anchor = &t.anchor;
    let torus_order = elems.iter().filter(|x| commutes(x, anchor)).count() as u64;
    let normalizer_order = elems
        .par_iter()
        .filter(|x| {
            let moved = x.mul_unchecked(anchor).mul_unchecked(&x.inv());
            commutes(&moved, anchor)
        })
        .count() as u64;
    if torus_order == 0 || !normalizer_order.is_multiple_of(torus_order) {
        return Err(Error::Internal(format!(
            "normalizer order {normalizer_order} not a multiple of torus order {torus_order}"
        )));
    }
    Ok(normalizer_order / torus_order)
}

/// Lowest-encoding regular semisimple element of the set, if any.
pub fn first_regular_semisimple(a: &MatSet) -> Result<Option<MatSL>> {
    if a.modulus() <= a.dim() as u64 {
        return Err(Error::SmallCharacteristic {
            p: a.modulus(),
            n: a.dim(),
        });
    }
    for x in a.iter() {
        if x.is_regular_semisimple()? {
            return Ok(Some(x));
        }
    }
    Ok(None)
}
