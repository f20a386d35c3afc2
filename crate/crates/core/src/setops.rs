//! Finite matrix sets over a fixed ambient SL_n(F_p): exact k-fold product
//! sets, growth statistics, greedy covering certificates (a symmetric X
//! with A·A ⊆ X·A certifies A as a |X|-approximate group) and control
//! verification between sets.
//!
//! Sets are sorted vectors of canonical encodings, so every operation is
//! order-independent and bit-exact regardless of thread count. Product
//! sets are computed fully — no sampling — up to a hard element budget;
//! exceeding the budget is an error, never a silent truncation.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffmat::{validate_ambient, MatSL};

/// Hard cap on the number of encoded elements a set operation may
/// generate (for products, the pair count before dedup).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    max_elements: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_elements: 50_000_000,
        }
    }
}

impl Budget {
    pub const fn new(max_elements: u64) -> Self {
        Budget { max_elements }
    }

    pub fn max_elements(self) -> u64 {
        self.max_elements
    }

    pub(crate) fn charge(self, needed: u64) -> Result<()> {
        if needed > self.max_elements {
            return Err(Error::BudgetExceeded {
                needed,
                budget: self.max_elements,
            });
        }
        Ok(())
    }

    pub(crate) fn charge_u128(self, needed: u128) -> Result<()> {
        if needed > self.max_elements as u128 {
            return Err(Error::BudgetExceeded {
                needed: needed.min(u64::MAX as u128) as u64,
                budget: self.max_elements,
            });
        }
        Ok(())
    }
}

/// Deduplicated, immutable set of SL_n(F_p) matrices keyed by canonical
/// encoding and stored sorted.
#[derive(Clone, PartialEq, Eq)]
pub struct MatSet {
    n: u8,
    p: u64,
    keys: Vec<u128>,
}

impl std::fmt::Debug for MatSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MatSet(n={}, p={}, len={})", self.n, self.p, self.keys.len())
    }
}

impl MatSet {
    pub fn empty(n: usize, p: u64) -> Result<Self> {
        validate_ambient(n, p)?;
        Ok(MatSet {
            n: n as u8,
            p,
            keys: Vec::new(),
        })
    }

    pub fn singleton_identity(n: usize, p: u64) -> Result<Self> {
        let id = MatSL::identity(n, p)?;
        Ok(MatSet {
            n: n as u8,
            p,
            keys: vec![id.key()],
        })
    }

    pub fn from_elements(
        n: usize,
        p: u64,
        elems: impl IntoIterator<Item = MatSL>,
    ) -> Result<Self> {
        validate_ambient(n, p)?;
        let mut keys = Vec::new();
        for e in elems {
            if e.dim() != n || e.modulus() != p {
                return Err(Error::AmbientMismatch);
            }
            keys.push(e.key());
        }
        keys.sort_unstable();
        keys.dedup();
        Ok(MatSet {
            n: n as u8,
            p,
            keys,
        })
    }

    pub(crate) fn from_sorted_keys(n: u8, p: u64, keys: Vec<u128>) -> Self {
        debug_assert!(keys.windows(2).all(|w| w[0] < w[1]));
        MatSet { n, p, keys }
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[u128] {
        &self.keys
    }

    pub(crate) fn decode(&self, key: u128) -> MatSL {
        MatSL::from_key(self.n, self.p, key)
    }

    pub fn iter(&self) -> impl Iterator<Item = MatSL> + '_ {
        self.keys.iter().map(move |&k| self.decode(k))
    }

    pub fn to_elements(&self) -> Vec<MatSL> {
        self.iter().collect()
    }

    pub fn contains(&self, m: &MatSL) -> bool {
        m.dim() == self.dim()
            && m.modulus() == self.p
            && self.keys.binary_search(&m.key()).is_ok()
    }

    pub(crate) fn contains_key(&self, key: u128) -> bool {
        self.keys.binary_search(&key).is_ok()
    }

    pub fn same_ambient(&self, other: &MatSet) -> bool {
        self.n == other.n && self.p == other.p
    }

    /// Sorted-merge subset test.
    pub fn is_subset_of(&self, other: &MatSet) -> bool {
        if !self.same_ambient(other) {
            return false;
        }
        let mut j = 0;
        for &k in &self.keys {
            while j < other.keys.len() && other.keys[j] < k {
                j += 1;
            }
            if j >= other.keys.len() || other.keys[j] != k {
                return false;
            }
        }
        true
    }

    /// Contains the identity and is closed under inverses.
    pub fn is_symmetric_with_identity(&self) -> bool {
        let id = MatSL::identity_unchecked(self.n, self.p);
        if !self.contains_key(id.key()) {
            return false;
        }
        self.keys
            .par_iter()
            .all(|&k| self.contains_key(self.decode(k).inv().key()))
    }
}

/// Exact product set {xy : x in a, y in b}.
///
/// The smaller factor is decoded once and held as the inner table; the
/// larger factor streams in parallel. The final sort-dedup makes the
/// result independent of chunking and thread count.
pub fn product(a: &MatSet, b: &MatSet, budget: Budget) -> Result<MatSet> {
    if !a.same_ambient(b) {
        return Err(Error::AmbientMismatch);
    }
    if a.is_empty() || b.is_empty() {
        return Ok(MatSet::from_sorted_keys(a.n, a.p, Vec::new()));
    }
    budget.charge_u128(a.len() as u128 * b.len() as u128)?;
    let left_small = a.len() <= b.len();
    let (small, big) = if left_small { (a, b) } else { (b, a) };
    let table = small.to_elements();
    let mut keys: Vec<u128> = big
        .keys
        .par_iter()
        .flat_map_iter(|&k| {
            let y = big.decode(k);
            table.iter().map(move |x| {
                if left_small {
                    x.mul_unchecked(&y).key()
                } else {
                    y.mul_unchecked(x).key()
                }
            })
        })
        .collect();
    keys.par_sort_unstable();
    keys.dedup();
    Ok(MatSet::from_sorted_keys(a.n, a.p, keys))
}

/// Exact k-fold product set A^k (A^0 is the identity singleton).
///
/// When the set contains the identity the powers are nested, so the first
/// repeat is a fixed point and iteration stops early.
pub fn power_set(a: &MatSet, k: u32, budget: Budget) -> Result<MatSet> {
    if k == 0 {
        return MatSet::singleton_identity(a.dim(), a.modulus());
    }
    let id_key = MatSL::identity_unchecked(a.n, a.p).key();
    let has_id = a.contains_key(id_key);
    let mut acc = a.clone();
    for _ in 2..=k {
        let next = product(&acc, a, budget)?;
        let stabilized = has_id && next.len() == acc.len();
        acc = next;
        if stabilized {
            break;
        }
    }
    Ok(acc)
}

/// a ∪ a^-1 ∪ {id}.
pub fn symmetrize(a: &MatSet) -> MatSet {
    let mut keys = Vec::with_capacity(2 * a.len() + 1);
    keys.extend_from_slice(&a.keys);
    for x in a.iter() {
        keys.push(x.inv().key());
    }
    keys.push(MatSL::identity_unchecked(a.n, a.p).key());
    keys.sort_unstable();
    keys.dedup();
    MatSet::from_sorted_keys(a.n, a.p, keys)
}

/// Cardinalities of A, A^2, A^3 with the derived growth ratios.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct GrowthReport {
    pub size1: u64,
    pub size2: u64,
    pub size3: u64,
    pub doubling: f64,
    pub tripling: f64,
    /// Greedy covering certificate size when one was computed; an upper
    /// bound on the optimal K, not the optimum.
    pub greedy_k: Option<u64>,
}

/// Exact growth statistics. The set must be symmetric with the identity.
pub fn growth_report(a: &MatSet, budget: Budget) -> Result<GrowthReport> {
    if !a.is_symmetric_with_identity() {
        return Err(Error::AsymmetricSet);
    }
    let a2 = product(a, a, budget)?;
    let a3 = product(&a2, a, budget)?;
    let size1 = a.len() as u64;
    Ok(GrowthReport {
        size1,
        size2: a2.len() as u64,
        size3: a3.len() as u64,
        doubling: a2.len() as f64 / size1 as f64,
        tripling: a3.len() as f64 / size1 as f64,
        greedy_k: None,
    })
}

/// Symmetric covering set X with A·A ⊆ X·A; `k = |X|`.
#[derive(Clone, Debug)]
pub struct ControlWitness {
    pub x: MatSet,
    pub k: u64,
}

/// Greedy covering certificate: repeatedly picks the x in A·A whose
/// translate xA covers the most still-uncovered elements of A·A, adding x
/// and x^-1 to keep X symmetric. Ties go to the lowest canonical encoding
/// so repeated runs are bit-identical. If A is closed under products it is
/// a subgroup and the identity alone certifies K = 1.
pub fn certify_approximate(a: &MatSet, budget: Budget) -> Result<ControlWitness> {
    if !a.is_symmetric_with_identity() {
        return Err(Error::AsymmetricSet);
    }
    let aa = product(a, a, budget)?;
    if aa.is_subset_of(a) {
        return Ok(ControlWitness {
            x: MatSet::singleton_identity(a.dim(), a.modulus())?,
            k: 1,
        });
    }
    let table = a.to_elements();
    let mut uncovered = vec![true; aa.len()];
    let mut left = aa.len();
    let mut x_keys: Vec<u128> = Vec::new();
    while left > 0 {
        let (best_key, best_cover) = aa
            .keys()
            .par_iter()
            .map(|&cand_key| {
                let cand = aa.decode(cand_key);
                let mut cover = 0usize;
                for y in &table {
                    if let Ok(i) = aa.keys().binary_search(&cand.mul_unchecked(y).key()) {
                        if uncovered[i] {
                            cover += 1;
                        }
                    }
                }
                (cand_key, cover)
            })
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .expect("product set of nonempty sets is nonempty");
        if best_cover == 0 {
            return Err(Error::Internal("greedy cover stalled".into()));
        }
        let x = aa.decode(best_key);
        for t in [x, x.inv()] {
            x_keys.push(t.key());
            for y in &table {
                if let Ok(i) = aa.keys().binary_search(&t.mul_unchecked(y).key()) {
                    if uncovered[i] {
                        uncovered[i] = false;
                        left -= 1;
                    }
                }
            }
        }
    }
    x_keys.sort_unstable();
    x_keys.dedup();
    let x = MatSet::from_sorted_keys(a.n, a.p, x_keys);
    // soundness: re-verify the certificate element by element
    let xa = product(&x, a, budget)?;
    if !aa.is_subset_of(&xa) {
        return Err(Error::Internal(
            "greedy certificate failed re-verification".into(),
        ));
    }
    Ok(ControlWitness {
        k: x.len() as u64,
        x,
    })
}

/// True iff |B| <= k|A|, |X| <= k and A ⊆ (X·B) ∩ (B·X).
pub fn verify_control(
    a: &MatSet,
    b: &MatSet,
    x: &MatSet,
    k: f64,
    budget: Budget,
) -> Result<bool> {
    if !a.same_ambient(b) || !a.same_ambient(x) {
        return Err(Error::AmbientMismatch);
    }
    if b.len() as f64 > k * a.len() as f64 || x.len() as f64 > k {
        return Ok(false);
    }
    let xb = product(x, b, budget)?;
    if !a.is_subset_of(&xb) {
        return Ok(false);
    }
    let bx = product(b, x, budget)?;
    Ok(a.is_subset_of(&bx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unipotent(p: u64) -> MatSL {
        MatSL::new(2, p, &[1, 1, 0, 1]).unwrap()
    }

    /// The split diagonal torus of SL_2(F_p) as an explicit set.
    fn diagonal_torus(p: u64) -> MatSet {
        let f = crate::ffmat::PrimeField::new(p).unwrap();
        let elems = (1..p).map(|lam| MatSL::new(2, p, &[lam, 0, 0, f.inv(lam)]).unwrap());
        MatSet::from_elements(2, p, elems).unwrap()
    }

    #[test]
    fn identity_products() {
        let id = MatSet::singleton_identity(2, 5).unwrap();
        let prod = product(&id, &id, Budget::default()).unwrap();
        assert_eq!(prod, id);
    }

    #[test]
    fn torus_subgroup_is_product_closed() {
        let h = diagonal_torus(5);
        assert_eq!(h.len(), 4);
        let hh = product(&h, &h, Budget::default()).unwrap();
        assert_eq!(hh, h);
    }

    #[test]
    fn unipotent_triple_product_size() {
        let u = unipotent(7);
        let a = MatSet::from_elements(2, 7, [MatSL::identity(2, 7).unwrap(), u, u.inv()]).unwrap();
        let aa = product(&a, &a, Budget::default()).unwrap();
        assert_eq!(aa.len(), 5); // u^-2 .. u^2
    }

    #[test]
    fn power_one_is_identity_map() {
        let a = families::progression(&unipotent(13), 2);
        assert_eq!(power_set(&a, 1, Budget::default()).unwrap(), a);
    }

    #[test]
    fn progression_cube_size() {
        // {u^i : |i| <= 2} over F_13, u of order 13: A^3 = {u^i : |i| <= 6}
        let a = families::progression(&unipotent(13), 2);
        assert_eq!(a.len(), 5);
        let a3 = power_set(&a, 3, Budget::default()).unwrap();
        assert_eq!(a3.len(), 13);
    }

    #[test]
    fn subgroup_powers_are_fixed() {
        let h = diagonal_torus(7);
        for k in 1..=4 {
            assert_eq!(power_set(&h, k, Budget::default()).unwrap(), h);
        }
    }

    #[test]
    fn symmetrize_cases() {
        let id = MatSet::singleton_identity(2, 5).unwrap();
        assert_eq!(symmetrize(&id), id);

        let u = unipotent(5);
        let s = symmetrize(&MatSet::from_elements(2, 5, [u]).unwrap());
        assert_eq!(s.len(), 3);
        assert!(s.is_symmetric_with_identity());
        assert_eq!(symmetrize(&s), s); // idempotent
    }

    #[test]
    fn growth_of_subgroup_is_flat() {
        let h = diagonal_torus(11);
        let r = growth_report(&h, Budget::default()).unwrap();
        assert_eq!((r.size1, r.size2, r.size3), (10, 10, 10));
        assert_eq!(r.doubling, 1.0);
        assert_eq!(r.tripling, 1.0);
    }

    #[test]
    fn growth_of_progression() {
        // {g^i : |i| <= 5}, ord(g) = 31: sizes 11, 21, 31
        let a = families::progression(&unipotent(31), 5);
        let r = growth_report(&a, Budget::default()).unwrap();
        assert_eq!((r.size1, r.size2, r.size3), (11, 21, 31));
        assert_eq!(r.doubling, 21.0 / 11.0);
        assert_eq!(r.tripling, 31.0 / 11.0);
    }

    #[test]
    fn growth_rejects_asymmetric_input() {
        let u = unipotent(7);
        let a = MatSet::from_elements(2, 7, [u]).unwrap();
        assert!(matches!(
            growth_report(&a, Budget::default()),
            Err(Error::AsymmetricSet)
        ));
    }

    #[test]
    fn certify_subgroup_gives_k1() {
        let h = diagonal_torus(7);
        let w = certify_approximate(&h, Budget::default()).unwrap();
        assert_eq!(w.k, 1);
        assert_eq!(w.x, MatSet::singleton_identity(2, 7).unwrap());
    }

    #[test]
    fn certify_full_group_gives_k1() {
        use crate::cayley::{generate_group, GenSet};
        let u = unipotent(5);
        let l = MatSL::new(2, 5, &[1, 0, 1, 1]).unwrap();
        let s = GenSet::new(2, 5, [u, l]).unwrap();
        let g = generate_group(&s, Budget::default()).unwrap();
        assert_eq!(g.len(), 120);
        let w = certify_approximate(&g, Budget::default()).unwrap();
        assert_eq!(w.k, 1);
    }

    #[test]
    fn certify_progression_small_k() {
        let a = families::progression(&unipotent(101), 10);
        let w = certify_approximate(&a, Budget::default()).unwrap();
        assert!(w.k <= 5, "greedy K = {}", w.k);
        assert_eq!(w.k, w.x.len() as u64);
        for x in w.x.iter() {
            assert!(w.x.contains(&x.inv())); // X stays symmetric
        }
        // certificate is genuinely a cover
        let aa = product(&a, &a, Budget::default()).unwrap();
        let xa = product(&w.x, &a, Budget::default()).unwrap();
        assert!(aa.is_subset_of(&xa));
    }

    #[test]
    fn verify_control_cases() {
        let a = families::progression(&unipotent(31), 5);
        let idset = MatSet::singleton_identity(2, 31).unwrap();
        assert!(verify_control(&a, &a, &idset, 1.0, Budget::default()).unwrap());

        // A inside the full group G, B = G, X = {id}, k = |G|/|A|
        use crate::cayley::{generate_group, GenSet};
        let u = unipotent(3);
        let l = MatSL::new(2, 3, &[1, 0, 1, 1]).unwrap();
        let g = generate_group(&GenSet::new(2, 3, [u, l]).unwrap(), Budget::default()).unwrap();
        let small = MatSet::from_elements(2, 3, [MatSL::identity(2, 3).unwrap(), u, u.inv()]).unwrap();
        let idset3 = MatSet::singleton_identity(2, 3).unwrap();
        let k = g.len() as f64 / small.len() as f64;
        assert!(verify_control(&small, &g, &idset3, k, Budget::default()).unwrap());

        // too-small X fails
        let wide = families::progression(&unipotent(101), 5);
        let narrow = families::progression(&unipotent(101), 2);
        assert!(!verify_control(&wide, &narrow, &idset_of(&wide), 10.0, Budget::default()).unwrap());
    }

    fn idset_of(a: &MatSet) -> MatSet {
        MatSet::singleton_identity(a.dim(), a.modulus()).unwrap()
    }

    #[test]
    fn budget_is_a_hard_error() {
        let a = families::progression(&unipotent(101), 5);
        assert!(matches!(
            product(&a, &a, Budget::new(10)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    fn arb_progression(p: u64) -> impl Strategy<Value = MatSet> {
        (any::<u64>(), 0u32..4).prop_map(move |(seed, n)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = families::random_element(2, p, &mut rng).unwrap();
            families::progression(&g, n)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn power_sizes_are_submultiplicative(a in arb_progression(11)) {
            let b = Budget::default();
            let sizes: Vec<u64> = (1..=4)
                .map(|k| power_set(&a, k, b).unwrap().len() as u64)
                .collect();
            for j in 1..=2usize {
                for k in 1..=2usize {
                    prop_assert!(sizes[j + k - 1] <= sizes[j - 1] * sizes[k - 1]);
                }
            }
        }

        #[test]
        fn product_cardinality_is_conjugation_invariant(
            (a, seed) in (arb_progression(11), any::<u64>())
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = families::random_element(2, 11, &mut rng).unwrap();
            let conj = MatSet::from_elements(
                2, 11,
                a.iter().map(|x| x.conjugated_by(&g).unwrap()),
            ).unwrap();
            let b = Budget::default();
            prop_assert_eq!(
                product(&a, &a, b).unwrap().len(),
                product(&conj, &conj, b).unwrap().len()
            );
        }

        #[test]
        fn symmetrized_powers_stay_symmetric(a in arb_progression(7), k in 1u32..4) {
            let s = symmetrize(&a);
            prop_assert_eq!(symmetrize(&s).len(), s.len());
            let sk = power_set(&s, k, Budget::default()).unwrap();
            prop_assert!(sk.is_symmetric_with_identity());
        }

        #[test]
        fn greedy_k_bounds_growth(a in arb_progression(13)) {
            let b = Budget::default();
            let w = certify_approximate(&a, b).unwrap();
            // |A^k| <= K^{k-1} |A| for k <= 5, exactly
            for k in 1..=5u32 {
                let size = power_set(&a, k, b).unwrap().len() as u128;
                let bound = (w.k as u128).pow(k - 1) * a.len() as u128;
                prop_assert!(size <= bound, "k={} size={} bound={}", k, size, bound);
            }
        }
    }
}
