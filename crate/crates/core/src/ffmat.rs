//! Exact arithmetic over F_p and over n x n unimodular matrices.
//!
//! Matrices carry their ambient parameters (n, p) and are stored as
//! canonical residues in row-major order. The row-major tuple read as a
//! base-p integer is the canonical encoding: it doubles as the hash,
//! ordering and dedup key everywhere downstream, so set semantics are
//! bit-exact. Characteristic polynomials come from principal minors (no
//! division by integer constants, so every prime characteristic works);
//! regular semisimplicity is the squarefreeness test gcd(f, f') = 1 in
//! F_p[x], which is reliable only for p > n and rejected otherwise.

use crate::error::{Error, Result};

/// Smallest supported matrix dimension.
pub const MIN_DIM: usize = 2;
/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 4;

const MAX_ENTRIES: usize = MAX_DIM * MAX_DIM;

type Entries = [u64; MAX_ENTRIES];

/// Trial-division primality test; moduli here are desk scale.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    for q in [2u64, 3, 5] {
        if p == q {
            return true;
        }
        if p.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = 7u64;
    while d * d <= p {
        for q in [d, d + 4] {
            if p.is_multiple_of(q) {
                return false;
            }
        }
        d += 6;
    }
    true
}

/// Validated prime-field context. Elements are canonical residues in
/// `[0, p)` carried as plain `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p > u32::MAX as u64 {
            return Err(Error::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub(crate) fn unchecked(p: u64) -> Self {
        PrimeField { p }
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero residue (Fermat).
    pub fn inv(self, a: u64) -> u64 {
        debug_assert!(a != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }

    /// Canonical residue of an arbitrary signed integer.
    pub fn reduce_i64(self, x: i64) -> u64 {
        let p = self.p as i64;
        (((x % p) + p) % p) as u64
    }
}

/// Checks that (n, p) is a usable ambient: supported dimension, prime
/// modulus, and a base-p encoding of n^2 digits that fits in a `u128`.
pub(crate) fn validate_ambient(n: usize, p: u64) -> Result<PrimeField> {
    if !(MIN_DIM..=MAX_DIM).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    let field = PrimeField::new(p)?;
    let mut acc: u128 = 1;
    for _ in 0..n * n {
        acc = acc
            .checked_mul(p as u128)
            .ok_or(Error::EncodingOverflow { n, p })?;
    }
    Ok(field)
}

/// Element of SL_n(F_p): row-major canonical residues with determinant 1.
///
/// `Eq`, `Hash` and `Ord` all agree with [`MatSL::key`] for matrices in the
/// same ambient, so identical group elements are identical keys no matter
/// how they were produced.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatSL {
    n: u8,
    p: u64,
    entries: Entries,
}

impl std::fmt::Debug for MatSL {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MatSL(n={}, p={}, {:?})", self.n, self.p, self.to_rows())
    }
}

impl MatSL {
    /// Builds a matrix from canonical residues; rejects anything that is
    /// not a well-formed element of SL_n(F_p).
    pub fn new(n: usize, p: u64, entries: &[u64]) -> Result<Self> {
        validate_ambient(n, p)?;
        if entries.len() != n * n {
            return Err(Error::BadShape { n });
        }
        let mut e: Entries = [0; MAX_ENTRIES];
        for (i, &v) in entries.iter().enumerate() {
            if v >= p {
                return Err(Error::EntryOutOfRange { value: v, p });
            }
            e[i] = v;
        }
        let m = MatSL {
            n: n as u8,
            p,
            entries: e,
        };
        let det = m.det();
        if det != 1 {
            return Err(Error::NotUnimodular { det });
        }
        Ok(m)
    }

    /// Builds a matrix from signed integer rows, reducing mod p first.
    pub fn from_int_rows(n: usize, p: u64, rows: &[Vec<i64>]) -> Result<Self> {
        let field = validate_ambient(n, p)?;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadShape { n });
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in rows {
            for &v in row {
                flat.push(field.reduce_i64(v));
            }
        }
        Self::new(n, p, &flat)
    }

    pub fn identity(n: usize, p: u64) -> Result<Self> {
        validate_ambient(n, p)?;
        Ok(Self::identity_unchecked(n as u8, p))
    }

    pub(crate) fn identity_unchecked(n: u8, p: u64) -> Self {
        let mut e: Entries = [0; MAX_ENTRIES];
        for i in 0..n as usize {
            e[i * n as usize + i] = 1;
        }
        MatSL { n, p, entries: e }
    }

    pub(crate) fn from_parts(n: u8, p: u64, entries: Entries) -> Self {
        MatSL { n, p, entries }
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub(crate) fn field(&self) -> PrimeField {
        PrimeField::unchecked(self.p)
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.dim() + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        let n = self.dim();
        (0..n)
            .map(|i| self.entries[i * n..(i + 1) * n].to_vec())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity_unchecked(self.n, self.p)
    }

    pub fn same_ambient(&self, other: &MatSL) -> bool {
        self.n == other.n && self.p == other.p
    }

    pub fn trace(&self) -> u64 {
        let n = self.dim();
        let f = self.field();
        let mut t = 0u64;
        for i in 0..n {
            t = f.add(t, self.entries[i * n + i]);
        }
        t
    }

    /// Canonical encoding: the row-major residue tuple as a base-p integer.
    pub fn key(&self) -> u128 {
        let n2 = self.dim() * self.dim();
        let mut k: u128 = 0;
        for i in 0..n2 {
            k = k * self.p as u128 + self.entries[i] as u128;
        }
        k
    }

    pub(crate) fn from_key(n: u8, p: u64, mut key: u128) -> Self {
        let n2 = (n as usize) * (n as usize);
        let mut e: Entries = [0; MAX_ENTRIES];
        for i in (0..n2).rev() {
            e[i] = (key % p as u128) as u64;
            key /= p as u128;
        }
        MatSL { n, p, entries: e }
    }

    pub(crate) fn mul_unchecked(&self, rhs: &MatSL) -> MatSL {
        let n = self.dim();
        let p = self.p as u128;
        let mut out: Entries = [0; MAX_ENTRIES];
        for i in 0..n {
            for j in 0..n {
                let mut acc: u128 = 0;
                for k in 0..n {
                    acc += self.entries[i * n + k] as u128 * rhs.entries[k * n + j] as u128;
                }
                out[i * n + j] = (acc % p) as u64;
            }
        }
        MatSL {
            n: self.n,
            p: self.p,
            entries: out,
        }
    }

    /// Group product; operands must share (n, p).
    pub fn mat_mul(&self, rhs: &MatSL) -> Result<MatSL> {
        if !self.same_ambient(rhs) {
            return Err(Error::AmbientMismatch);
        }
        Ok(self.mul_unchecked(rhs))
    }

    /// Inverse via the adjugate; determinant 1 makes the adjugate the
    /// inverse outright, no division needed.
    pub fn inv(&self) -> MatSL {
        let n = self.dim();
        let f = self.field();
        let mut out: Entries = [0; MAX_ENTRIES];
        if n == 2 {
            out[0] = self.entries[3];
            out[1] = f.neg(self.entries[1]);
            out[2] = f.neg(self.entries[2]);
            out[3] = self.entries[0];
        } else {
            for i in 0..n {
                for j in 0..n {
                    let d = self.minor_det(j, i);
                    out[i * n + j] = if (i + j) % 2 == 0 { d } else { f.neg(d) };
                }
            }
        }
        MatSL {
            n: self.n,
            p: self.p,
            entries: out,
        }
    }

    /// `g * self * g^-1`; operands must share (n, p).
    pub fn conjugated_by(&self, g: &MatSL) -> Result<MatSL> {
        if !self.same_ambient(g) {
            return Err(Error::AmbientMismatch);
        }
        Ok(g.mul_unchecked(self).mul_unchecked(&g.inv()))
    }

    pub fn det(&self) -> u64 {
        let n = self.dim();
        let mut buf = [0u64; MAX_ENTRIES];
        buf[..n * n].copy_from_slice(&self.entries[..n * n]);
        det_dense(self.field(), n, &mut buf[..n * n])
    }

    fn minor_det(&self, skip_row: usize, skip_col: usize) -> u64 {
        let n = self.dim();
        let m = n - 1;
        let mut buf = [0u64; MAX_ENTRIES];
        let mut idx = 0;
        for i in 0..n {
            if i == skip_row {
                continue;
            }
            for j in 0..n {
                if j == skip_col {
                    continue;
                }
                buf[idx] = self.entries[i * n + j];
                idx += 1;
            }
        }
        det_dense(self.field(), m, &mut buf[..m * m])
    }

    /// Monic characteristic polynomial, exactly, from principal minors:
    /// the coefficient of x^(n-k) is (-1)^k times the sum of the k x k
    /// principal minors.
    pub fn char_poly(&self) -> CharPoly {
        let n = self.dim();
        let f = self.field();
        let mut e = vec![0u64; n + 1];
        e[0] = 1 % self.p;
        let mut buf = [0u64; MAX_ENTRIES];
        for mask in 1u32..(1 << n) {
            let k = mask.count_ones() as usize;
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            for (r, &ri) in idx.iter().enumerate() {
                for (c, &ci) in idx.iter().enumerate() {
                    buf[r * k + c] = self.entries[ri * n + ci];
                }
            }
            let d = det_dense(f, k, &mut buf[..k * k]);
            e[k] = f.add(e[k], d);
        }
        let coeffs = (0..=n)
            .map(|k| if k % 2 == 0 { e[k] } else { f.neg(e[k]) })
            .collect();
        CharPoly { p: self.p, coeffs }
    }

    /// True iff the eigenvalues over the algebraic closure are pairwise
    /// distinct, tested as squarefreeness of the characteristic polynomial.
    /// Requires p > n.
    pub fn is_regular_semisimple(&self) -> Result<bool> {
        if self.p <= self.n as u64 {
            return Err(Error::SmallCharacteristic {
                p: self.p,
                n: self.dim(),
            });
        }
        self.char_poly().is_squarefree()
    }
}

/// In-place Gaussian elimination determinant over F_p on an n x n buffer.
fn det_dense(f: PrimeField, n: usize, m: &mut [u64]) -> u64 {
    let mut det = 1u64 % f.modulus();
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

/// Monic characteristic polynomial over F_p; `coeffs()[k]` is the
/// coefficient of x^(n-k), so the leading entry is always 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl CharPoly {
    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn eval(&self, x: u64) -> u64 {
        let f = PrimeField::unchecked(self.p);
        let mut acc = 0u64;
        for &c in &self.coeffs {
            acc = f.add(f.mul(acc, x), c);
        }
        acc
    }

    /// Squarefreeness over the closure via gcd(f, f') in F_p[x].
    /// Requires p > deg f; the derivative can degenerate otherwise.
    pub fn is_squarefree(&self) -> Result<bool> {
        let n = self.degree();
        if self.p <= n as u64 {
            return Err(Error::SmallCharacteristic { p: self.p, n });
        }
        let f = PrimeField::unchecked(self.p);
        let fx = strip(self.coeffs.clone());
        let dfx = poly_derivative(f, &fx);
        Ok(poly_gcd_degree(f, fx, dfx) == 0)
    }
}

// Dense polynomials, descending coefficients, leading entry nonzero;
// the empty vector is the zero polynomial.

fn strip(mut v: Vec<u64>) -> Vec<u64> {
    let lead = v.iter().position(|&c| c != 0).unwrap_or(v.len());
    v.drain(..lead);
    v
}

fn poly_derivative(f: PrimeField, a: &[u64]) -> Vec<u64> {
    if a.len() <= 1 {
        return Vec::new();
    }
    let deg = a.len() - 1;
    let out = (0..deg)
        .map(|i| f.mul(a[i], ((deg - i) as u64) % f.modulus()))
        .collect();
    strip(out)
}

fn poly_rem(f: PrimeField, mut a: Vec<u64>, b: &[u64]) -> Vec<u64> {
    debug_assert!(!b.is_empty() && b[0] != 0);
    let inv_lead = f.inv(b[0]);
    while a.len() >= b.len() {
        let coef = f.mul(a[0], inv_lead);
        for j in 0..b.len() {
            let t = f.mul(coef, b[j]);
            a[j] = f.sub(a[j], t);
        }
        a = strip(a);
    }
    a
}

fn poly_gcd_degree(f: PrimeField, a: Vec<u64>, b: Vec<u64>) -> usize {
    let mut a = strip(a);
    let mut b = strip(b);
    while !b.is_empty() {
        let r = poly_rem(f, a, &b);
        a = b;
        b = r;
    }
    a.len().saturating_sub(1)
}
