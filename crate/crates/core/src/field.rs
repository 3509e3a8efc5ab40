//! Prime-power fields GF(p^n) realized as log/antilog tables.
//!
//! Nonzero elements are addressed by their exponent with respect to a fixed
//! primitive element `α` (the root of the defining polynomial). Vector form is
//! the base-`p` integer whose digit `i` is the coefficient of `x^i`; for `p = 2`
//! this is the usual bit mask and addition is XOR.
//!
//! The Frobenius map `x ↦ x^(p^ℓ)` and the cyclic shift `α^i ↦ α^(i+j)` are both
//! plain exponent arithmetic modulo `p^n − 1`. Both fix `Zero`.

use std::fmt;

use thiserror::Error;

/// Largest multiplicative group order the tables will be built for.
pub const MAX_ORDER: u64 = 1 << 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("parameter {name} = {value} is not prime")]
    NonPrimeParameter { name: &'static str, value: u64 },
    #[error("polynomial is not primitive: root has order {order}, expected {expected}")]
    NonPrimitivePolynomial { order: u64, expected: u64 },
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("field too large: p^n - 1 = {0} exceeds the table limit of 2^32")]
    TooLarge(u64),
}

/// Parameters of GF(p^n): the characteristic, the extension degree and the
/// defining polynomial (coefficients over F_p, constant term first).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    pub p: u32,
    pub n: u32,
    pub poly: Vec<u32>,
}

impl FieldSpec {
    pub fn new(p: u32, n: u32, poly: Vec<u32>) -> Self {
        FieldSpec { p, n, poly }
    }

    /// GF(2^13) generated by a root of x^13 + x^4 + x^3 + x + 1.
    pub fn gf2_13() -> Self {
        let mut poly = vec![0; 14];
        for e in [0, 1, 3, 4, 13] {
            poly[e] = 1;
        }
        FieldSpec::new(2, 13, poly)
    }

    /// GF(2^13) generated by a root of the reciprocal x^13 + x^12 + x^10 + x^9 + 1,
    /// whose root is the inverse of the [`FieldSpec::gf2_13`] generator.
    pub fn gf2_13_reciprocal() -> Self {
        FieldSpec::binary(13, &[0, 9, 10, 12, 13])
    }

    /// Binary field from the exponents of the nonzero terms of its polynomial.
    pub fn binary(n: u32, terms: &[u32]) -> Self {
        let mut poly = vec![0; n as usize + 1];
        for &e in terms {
            poly[e as usize] = 1;
        }
        FieldSpec::new(2, n, poly)
    }

    /// `p^n`, the number of field elements.
    pub fn size(&self) -> u64 {
        (self.p as u64).saturating_pow(self.n)
    }

    /// `p^n − 1`, the order of the multiplicative group.
    pub fn order(&self) -> u64 {
        self.size() - 1
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod ", self.p, self.n)?;
        let mut first = true;
        for (e, &c) in self.poly.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if c != 1 || e == 0 {
                write!(f, "{c}")?;
            }
            match e {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{e}")?,
            }
        }
        Ok(())
    }
}

/// A field element in exponent form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Zero,
    Exp(u32),
}

/// Log/antilog tables for GF(p^n). Immutable once built.
#[derive(Debug, Clone)]
pub struct FieldTables {
    spec: FieldSpec,
    order: u32,
    /// `antilog[i]` is the vector form of `α^i`.
    antilog: Vec<u32>,
    /// `log[v]` is the exponent of the nonzero vector `v`; `log[0]` is unused.
    log: Vec<u32>,
}

const NO_LOG: u32 = u32::MAX;

pub(crate) fn is_prime(v: u64) -> bool {
    if v < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= v {
        if v % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors by trial division.
pub(crate) fn prime_factors(mut v: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= v {
        if v % d == 0 {
            out.push(d);
            while v % d == 0 {
                v /= d;
            }
        }
        d += 1;
    }
    if v > 1 {
        out.push(v);
    }
    out
}

/// Residues of polynomials over F_p modulo a fixed monic polynomial,
/// used only for the primitivity check.
struct PolyRing {
    p: u64,
    /// Monic modulus, constant term first, `modulus.len() == n + 1`.
    modulus: Vec<u64>,
}

impl PolyRing {
    fn n(&self) -> usize {
        self.modulus.len() - 1
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = self.n();
        let mut prod = vec![0u64; 2 * n];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % self.p;
            }
        }
        for d in (n..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            // x^d = x^(d-n) * x^n and x^n = -(lower terms of the modulus)
            for (t, &m) in self.modulus[..n].iter().enumerate() {
                let idx = d - n + t;
                prod[idx] = (prod[idx] + (self.p - m) * c) % self.p;
            }
            prod[d] = 0;
        }
        prod.truncate(n);
        prod
    }

    fn pow_x(&self, mut e: u64) -> Vec<u64> {
        let n = self.n();
        let mut result = vec![0u64; n];
        result[0] = 1;
        let mut base = vec![0u64; n];
        if n == 1 {
            base[0] = (self.p - self.modulus[0]) % self.p;
        } else {
            base[1] = 1;
        }
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        result
    }

    fn is_one(v: &[u64]) -> bool {
        v[0] == 1 && v[1..].iter().all(|&c| c == 0)
    }
}

fn check_spec(spec: &FieldSpec) -> Result<Vec<u64>, FieldError> {
    if !is_prime(spec.p as u64) {
        return Err(FieldError::NonPrimeParameter { name: "p", value: spec.p as u64 });
    }
    if !is_prime(spec.n as u64) {
        return Err(FieldError::NonPrimeParameter { name: "n", value: spec.n as u64 });
    }
    let n = spec.n as usize;
    if spec.poly.len() != n + 1 {
        return Err(FieldError::InvalidPolynomial(format!(
            "expected {} coefficients for degree {}, got {}",
            n + 1,
            n,
            spec.poly.len()
        )));
    }
    if let Some(&c) = spec.poly.iter().find(|&&c| c >= spec.p) {
        return Err(FieldError::InvalidPolynomial(format!(
            "coefficient {c} is not reduced modulo {}",
            spec.p
        )));
    }
    if spec.poly[n] != 1 {
        return Err(FieldError::InvalidPolynomial(format!(
            "leading coefficient must be 1, got {}",
            spec.poly[n]
        )));
    }
    let size = (spec.p as u64)
        .checked_pow(spec.n)
        .ok_or(FieldError::TooLarge(u64::MAX))?;
    if size - 1 > MAX_ORDER || size > u32::MAX as u64 {
        return Err(FieldError::TooLarge(size - 1));
    }
    Ok(spec.poly.iter().map(|&c| c as u64).collect())
}

/// Multiplicative order of `x` modulo the polynomial, assuming it divides
/// `order` (or `None` when `x` is not a unit of order dividing `order`).
fn root_order(ring: &PolyRing, order: u64) -> Option<u64> {
    if !PolyRing::is_one(&ring.pow_x(order)) {
        return None;
    }
    let mut ord = order;
    for q in prime_factors(order) {
        while ord % q == 0 && PolyRing::is_one(&ring.pow_x(ord / q)) {
            ord /= q;
        }
    }
    Some(ord)
}

impl FieldTables {
    /// Build the tables for `spec`, rejecting non-primitive polynomials.
    pub fn build(spec: FieldSpec) -> Result<Self, FieldError> {
        let modulus = check_spec(&spec)?;
        let order = spec.order();
        let ring = PolyRing { p: spec.p as u64, modulus };
        match root_order(&ring, order) {
            Some(o) if o == order => {}
            other => {
                return Err(FieldError::NonPrimitivePolynomial {
                    order: other.unwrap_or(0),
                    expected: order,
                })
            }
        }

        let p = spec.p;
        let n = spec.n as usize;
        let size = spec.size() as usize;
        let mut antilog = Vec::with_capacity(order as usize);
        let mut log = vec![NO_LOG; size];
        let mut digits = vec![0u32; n];
        digits[0] = 1;
        let weights: Vec<u32> = (0..n).map(|i| p.pow(i as u32)).collect();
        for i in 0..order as u32 {
            let code: u32 = digits.iter().zip(&weights).map(|(d, w)| d * w).sum();
            debug_assert_eq!(log[code as usize], NO_LOG);
            antilog.push(code);
            log[code as usize] = i;
            // multiply by x and reduce with x^n = -(poly[0] + ... + poly[n-1] x^(n-1))
            let top = digits[n - 1];
            for d in (1..n).rev() {
                digits[d] = digits[d - 1];
            }
            digits[0] = 0;
            if top != 0 {
                for (d, &c) in digits.iter_mut().zip(&spec.poly[..n]) {
                    *d = (*d + (p - c) * top) % p;
                }
            }
        }

        Ok(FieldTables { spec, order: order as u32, antilog, log })
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn p(&self) -> u32 {
        self.spec.p
    }

    pub fn n(&self) -> u32 {
        self.spec.n
    }

    /// `p^n − 1`.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Vector form of `α^i`.
    #[inline]
    pub fn antilog(&self, i: u32) -> u32 {
        self.antilog[(i % self.order) as usize]
    }

    /// Exponent of a nonzero vector, `None` for zero or out-of-range codes.
    #[inline]
    pub fn log(&self, v: u32) -> Option<u32> {
        match self.log.get(v as usize) {
            Some(&l) if l != NO_LOG => Some(l),
            _ => None,
        }
    }

    pub fn to_vector(&self, x: Element) -> u32 {
        match x {
            Element::Zero => 0,
            Element::Exp(i) => self.antilog(i),
        }
    }

    pub fn from_vector(&self, v: u32) -> Element {
        match self.log(v) {
            Some(i) => Element::Exp(i),
            None => Element::Zero,
        }
    }

    /// Reduced exponent form of `α^i`.
    pub fn exp(&self, i: u64) -> Element {
        Element::Exp((i % self.order as u64) as u32)
    }

    /// Sum of two vectors in F_p^n.
    #[inline]
    pub fn add_vectors(&self, a: u32, b: u32) -> u32 {
        if self.spec.p == 2 {
            return a ^ b;
        }
        let p = self.spec.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut w = 1u32;
        for _ in 0..self.spec.n {
            out += ((a % p + b % p) % p) * w;
            a /= p;
            b /= p;
            w = w.wrapping_mul(p);
        }
        out
    }

    /// Scalar multiple `c·v` of a vector, `c` taken modulo `p`.
    pub fn scale_vector(&self, c: u32, v: u32) -> u32 {
        let p = self.spec.p;
        let c = c % p;
        let mut v = v;
        let mut out = 0u32;
        let mut w = 1u32;
        for _ in 0..self.spec.n {
            out += (c * (v % p) % p) * w;
            v /= p;
            w = w.wrapping_mul(p);
        }
        out
    }

    pub fn add(&self, x: Element, y: Element) -> Element {
        self.from_vector(self.add_vectors(self.to_vector(x), self.to_vector(y)))
    }

    /// Exponent of `α^a + α^b`, or `None` when the sum vanishes.
    #[inline]
    pub fn add_exps(&self, a: u32, b: u32) -> Option<u32> {
        self.log(self.add_vectors(self.antilog(a), self.antilog(b)))
    }

    pub fn mul(&self, x: Element, y: Element) -> Element {
        match (x, y) {
            (Element::Exp(a), Element::Exp(b)) => self.exp(a as u64 + b as u64),
            _ => Element::Zero,
        }
    }

    /// `p^ℓ mod (p^n − 1)`.
    pub fn frobenius_multiplier(&self, l: u32) -> u32 {
        let mut m = 1u64;
        for _ in 0..(l % self.spec.n) {
            m = m * self.spec.p as u64 % self.order as u64;
        }
        m as u32
    }

    /// Exponent image of `α^i` under `Υ_ℓ`.
    #[inline]
    pub fn frobenius_exp(&self, i: u32, l: u32) -> u32 {
        (i as u64 * self.frobenius_multiplier(l) as u64 % self.order as u64) as u32
    }

    /// Exponent image of `α^i` under `Φ_j`.
    #[inline]
    pub fn shift_exp(&self, i: u32, j: u32) -> u32 {
        ((i as u64 + j as u64) % self.order as u64) as u32
    }

    /// `Υ_ℓ(x) = x^(p^ℓ)`.
    pub fn frobenius(&self, x: Element, l: u32) -> Element {
        match x {
            Element::Zero => Element::Zero,
            Element::Exp(i) => Element::Exp(self.frobenius_exp(i, l)),
        }
    }

    /// `Φ_j(α^i) = α^(i+j)`.
    pub fn cyclic_shift(&self, x: Element, j: u32) -> Element {
        match x {
            Element::Zero => Element::Zero,
            Element::Exp(i) => Element::Exp(self.shift_exp(i, j)),
        }
    }

    /// Index of `Υ_ℓ^{-1}`.
    pub fn frobenius_inverse(&self, l: u32) -> u32 {
        (self.spec.n - l % self.spec.n) % self.spec.n
    }

    /// Index of `Φ_j^{-1}`.
    pub fn shift_inverse(&self, j: u32) -> u32 {
        (self.order - j % self.order) % self.order
    }
}

/// Partition of `Z_{p^n−1}` into cyclotomic cosets `C_s = {s·p^i}`.
#[derive(Debug, Clone)]
pub struct CosetTable {
    modulus: u32,
    representative: Vec<u32>,
    cosets: Vec<Vec<u32>>,
    /// Index into `cosets` for each residue.
    coset_of: Vec<u32>,
}

impl CosetTable {
    pub fn build(tables: &FieldTables) -> Self {
        let modulus = tables.order();
        let p = tables.p() as u64;
        let mut representative = vec![u32::MAX; modulus as usize];
        let mut coset_of = vec![u32::MAX; modulus as usize];
        let mut cosets = Vec::new();
        for s in 0..modulus {
            if representative[s as usize] != u32::MAX {
                continue;
            }
            // s is the smallest residue not yet seen, so it is the minimum of its coset
            let mut coset = Vec::new();
            let mut x = s;
            loop {
                coset.push(x);
                x = (x as u64 * p % modulus as u64) as u32;
                if x == s {
                    break;
                }
            }
            coset.sort_unstable();
            coset.dedup();
            let idx = cosets.len() as u32;
            for &c in &coset {
                representative[c as usize] = s;
                coset_of[c as usize] = idx;
            }
            cosets.push(coset);
        }
        CosetTable { modulus, representative, cosets, coset_of }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// `ρ(s)`, the smallest member of the coset of `s`.
    #[inline]
    pub fn rep(&self, s: u32) -> u32 {
        self.representative[(s % self.modulus) as usize]
    }

    /// `ρ(a − b)` for residues `a`, `b`.
    #[inline]
    pub fn rep_of_difference(&self, a: u32, b: u32) -> u32 {
        let m = self.modulus;
        self.rep(((a as u64 + m as u64 - b as u64) % m as u64) as u32)
    }

    pub fn cosets(&self) -> &[Vec<u32>] {
        &self.cosets
    }

    pub fn coset_of(&self, s: u32) -> &[u32] {
        &self.cosets[self.coset_of[(s % self.modulus) as usize] as usize]
    }

    pub fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.cosets.iter().map(Vec::len)
    }

    pub fn count_of_size(&self, size: usize) -> usize {
        self.sizes().filter(|&s| s == size).count()
    }

    /// Representatives of all cosets of the given size, ascending.
    pub fn representatives_of_size(&self, size: usize) -> Vec<u32> {
        self.cosets.iter().filter(|c| c.len() == size).map(|c| c[0]).collect()
    }
}
