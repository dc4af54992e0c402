//! Exact arithmetic in `GF(p^k)`.
//!
//! A [`Field`] is a cheap handle (an `Arc`) to precomputed log/antilog and
//! Zech tables; a [`FieldElement`] is a plain index into those tables and only
//! means something next to the field that produced it.
//!
//! Element indices are chosen so that integer comparison of indices is the
//! element order: coefficients are compared lexicographically starting from
//! the constant term, so the constant coefficient is the most significant
//! base-`p` digit of the index. Zero is index 0; one is index `p^(k-1)`.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Largest extension degree accepted by [`Field::new`].
pub const MAX_DEGREE: u32 = 12;

/// Largest field order for which tables are built.
pub const MAX_ORDER: u64 = 1 << 22;

const NO_LOG: u32 = u32::MAX;

/// An element of some `GF(p^k)`, stored as its index. Ordering is the
/// coefficient-lex element order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone)]
pub struct Field(Arc<FieldData>);

struct FieldData {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus, low degree first, length `k + 1`.
    modulus: Vec<u32>,
    /// Place value of the constant coefficient, `p^(k-1)`.
    unit: u32,
    /// `exp[i] = g^i`, stored twice over so sums of two logs need no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `zech[i] = log(1 + g^i)`, or `NO_LOG` when that sum is zero.
    zech: Vec<u32>,
    neg_one_log: u32,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.k == other.0.k)
    }
}

impl Eq for Field {}

impl Hash for Field {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.0.k.hash(state);
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.0.p, self.0.k)
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.k)
    }
}

fn field_cache() -> &'static Mutex<HashMap<(u32, u32), Field>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Field>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn embedding_cache() -> &'static Mutex<HashMap<(u32, u32, u32), u32>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32, u32), u32>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Dense polynomials over `GF(p)`, low degree first.
mod poly {
    pub fn trim(v: &mut Vec<u32>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    /// Remainder of `a` modulo the monic polynomial `m`.
    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let p64 = p as u64;
        let dm = m.len() - 1;
        let mut r: Vec<u32> = a.to_vec();
        trim(&mut r);
        while r.len() > dm {
            let lead = *r.last().unwrap() as u64;
            let shift = r.len() - 1 - dm;
            for (i, &c) in m.iter().enumerate() {
                let t = (lead * c as u64) % p64;
                let slot = &mut r[shift + i];
                *slot = ((*slot as u64 + p64 - t) % p64) as u32;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let p64 = p as u64;
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p64;
            }
        }
        let mut v: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
        trim(&mut v);
        v
    }

    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn pow_mod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut acc = vec![1u32];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &b, m, p);
            }
            b = mul_mod(&b, &b, m, p);
            e >>= 1;
        }
        rem(&acc, m, p)
    }

    /// Trial division by every monic polynomial of degree `1..=deg/2`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let k = f.len() - 1;
        for d in 1..=k / 2 {
            let count = (p as u64).pow(d as u32);
            for n in 0..count {
                let mut g = Vec::with_capacity(d + 1);
                let mut m = n;
                for _ in 0..d {
                    g.push((m % p as u64) as u32);
                    m /= p as u64;
                }
                g.push(1);
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

impl Field {
    /// The field `GF(p^k)` with the lexicographically least monic irreducible
    /// modulus. Repeated calls share one table set.
    pub fn new(p: u64, k: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 || k > MAX_DEGREE {
            return Err(Error::DegreeOutOfRange(k));
        }
        let q = p.checked_pow(k).filter(|&q| q <= MAX_ORDER);
        let Some(q) = q else {
            return Err(Error::FieldTooLarge { p, k });
        };
        let key = (p as u32, k);
        if let Some(f) = field_cache().lock().unwrap().get(&key) {
            return Ok(f.clone());
        }
        let built = Field(Arc::new(FieldData::build(p as u32, k, q as u32)));
        let mut cache = field_cache().lock().unwrap();
        Ok(cache.entry(key).or_insert(built).clone())
    }

    pub fn prime(p: u64) -> Result<Field> {
        Field::new(p, 1)
    }

    /// Parses `"p^k"` or a bare prime `"p"`.
    pub fn parse(spec: &str) -> Result<Field> {
        let spec = spec.trim();
        let (p, k) = match spec.split_once('^') {
            Some((p, k)) => (p.trim(), k.trim()),
            None => (spec, "1"),
        };
        let p: u64 = p
            .parse()
            .map_err(|_| Error::parse("field", format!("bad characteristic in {spec:?}")))?;
        let k: u32 = k
            .parse()
            .map_err(|_| Error::parse("field", format!("bad degree in {spec:?}")))?;
        Field::new(p, k)
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.k
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(self.0.unit)
    }

    /// All elements in ascending element order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.0.q).map(FieldElement)
    }

    pub fn element(&self, index: u32) -> Result<FieldElement> {
        if index < self.0.q {
            Ok(FieldElement(index))
        } else {
            Err(Error::parse(
                "element",
                format!("index {index} out of range for GF({self})"),
            ))
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        let p = self.0.p as i64;
        FieldElement(n.rem_euclid(p) as u32 * self.0.unit)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() > self.0.k as usize {
            return Err(Error::parse(
                "element",
                format!(
                    "{} coefficients for a degree-{} field",
                    coeffs.len(),
                    self.0.k
                ),
            ));
        }
        let mut idx = 0u32;
        for i in 0..self.0.k as usize {
            let c = coeffs.get(i).copied().unwrap_or(0);
            if c >= self.0.p {
                return Err(Error::parse(
                    "element",
                    format!("coefficient {c} out of range mod {}", self.0.p),
                ));
            }
            idx = idx * self.0.p + c;
        }
        Ok(FieldElement(idx))
    }

    /// Coefficients over `GF(p)`, low degree first, always `k` of them.
    pub fn coeffs(&self, x: FieldElement) -> Vec<u32> {
        let k = self.0.k as usize;
        let mut out = vec![0; k];
        let mut v = x.0;
        for i in (0..k).rev() {
            out[i] = v % self.0.p;
            v /= self.0.p;
        }
        out
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let d = &*self.0;
        let n = d.q - 1;
        let la = d.log[a.0 as usize];
        let lb = d.log[b.0 as usize];
        let diff = if lb >= la { lb - la } else { lb + n - la };
        match d.zech[diff as usize] {
            NO_LOG => FieldElement(0),
            z => FieldElement(d.exp[(la + z) as usize]),
        }
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if a.0 == 0 {
            return a;
        }
        let d = &*self.0;
        FieldElement(d.exp[(d.log[a.0 as usize] + d.neg_one_log) as usize])
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement(0);
        }
        let d = &*self.0;
        FieldElement(d.exp[(d.log[a.0 as usize] + d.log[b.0 as usize]) as usize])
    }

    pub fn checked_inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.0 == 0 {
            return None;
        }
        let d = &*self.0;
        let n = d.q - 1;
        let l = d.log[a.0 as usize];
        Some(FieldElement(d.exp[((n - l) % n) as usize]))
    }

    /// # Panics
    /// On zero.
    pub fn inv(&self, a: FieldElement) -> FieldElement {
        self.checked_inv(a)
            .unwrap_or_else(|| panic!("inverse of zero in GF({self})"))
    }

    /// # Panics
    /// When `b` is zero.
    pub fn div(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return self.one();
        }
        if a.0 == 0 {
            return a;
        }
        let d = &*self.0;
        let n = (d.q - 1) as u64;
        let l = d.log[a.0 as usize] as u64;
        FieldElement(d.exp[((l * (e % n)) % n) as usize])
    }

    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.0.p as u64)
    }

    /// Evaluates `c[0] + c[1] t + c[2] t^2 + ...` by Horner's rule.
    pub fn eval(&self, coeffs: &[FieldElement], t: FieldElement) -> FieldElement {
        coeffs
            .iter()
            .rev()
            .fold(self.zero(), |acc, &c| self.add(self.mul(acc, t), c))
    }

    /// The least square root of `x` in element order, if one exists.
    pub fn sqrt_min(&self, x: FieldElement) -> Option<FieldElement> {
        if x.0 == 0 {
            return Some(x);
        }
        let d = &*self.0;
        let n = d.q - 1;
        let l = d.log[x.0 as usize];
        let half = if d.p == 2 {
            // n is odd, squaring is a bijection
            if l.is_multiple_of(2) {
                l / 2
            } else {
                (l + n) / 2
            }
        } else if l.is_multiple_of(2) {
            l / 2
        } else {
            return None;
        };
        let r = FieldElement(d.exp[half as usize]);
        Some(r.min(self.neg(r)))
    }

    /// All roots of `c0 + c1 t + c2 t^2 + c3 t^3` in this field, ascending.
    /// Found by evaluating at every element.
    pub fn roots_deg_le3(&self, coeffs: [FieldElement; 4]) -> Result<Vec<FieldElement>> {
        if coeffs[1..].iter().all(|c| c.is_zero()) {
            return Err(Error::ConstantPolynomial);
        }
        Ok(self
            .elements()
            .filter(|&t| self.eval(&coeffs, t).is_zero())
            .collect())
    }

    /// Prime-field elements print as integers, extension elements as a
    /// comma-separated coefficient list, low degree first.
    pub fn format_element(&self, x: FieldElement) -> String {
        if self.0.k == 1 {
            return x.0.to_string();
        }
        self.coeffs(x)
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_element(&self, s: &str) -> Result<FieldElement> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let mut coeffs = Vec::with_capacity(parts.len());
        for part in parts {
            let c: u32 = part
                .parse()
                .map_err(|_| Error::parse("element", format!("{s:?} is not a coefficient list")))?;
            coeffs.push(c);
        }
        self.from_coeffs(&coeffs)
    }

    /// True when `self` is a subfield of `other` (same characteristic, degree divides).
    pub fn divides(&self, other: &Field) -> bool {
        self.0.p == other.0.p && other.0.k.is_multiple_of(self.0.k)
    }

    /// The image of `x` in `target` under the fixed embedding of this field.
    ///
    /// Embeddings are chosen once per `(p, a, b)` and are mutually compatible:
    /// embedding `GF(p^a) -> GF(p^b) -> GF(p^c)` agrees with the direct map.
    pub fn embed(&self, x: FieldElement, target: &Field) -> Result<FieldElement> {
        Ok(self.embedding(target)?.apply(x))
    }

    pub fn embedding(&self, target: &Field) -> Result<Embedding> {
        if !self.divides(target) {
            return Err(Error::IncompatibleFields {
                p: self.0.p,
                from: self.0.k,
                q: target.0.p,
                to: target.0.k,
            });
        }
        let generator = if self.0.k == 1 || self.0.k == target.0.k {
            None
        } else {
            Some(FieldElement(generator_image(
                self.0.p, self.0.k, target.0.k,
            )))
        };
        Ok(Embedding {
            source: self.clone(),
            target: target.clone(),
            generator,
        })
    }

    /// The smallest extension `GF(p^(k d))`, `d` in 1..=3, containing a root
    /// of the polynomial, together with its least root there.
    pub fn splitting_extension(&self, coeffs: [FieldElement; 4]) -> Result<(Field, FieldElement)> {
        let degree = (1..4).rev().find(|&i| !coeffs[i].is_zero());
        let Some(degree) = degree else {
            return Err(Error::ConstantPolynomial);
        };
        for d in 1..=3u32 {
            // a root-free quadratic splits over the quadratic extension and a
            // root-free cubic is irreducible, so only d = 1 and d = degree matter
            if d != 1 && d as usize != degree {
                continue;
            }
            let k = self.0.k * d;
            if k > MAX_DEGREE {
                return Err(Error::ExtensionCap(k));
            }
            let ext = Field::new(self.0.p as u64, k)?;
            let emb = self.embedding(&ext)?;
            let lifted = coeffs.map(|c| emb.apply(c));
            if let Some(&r) = ext.roots_deg_le3(lifted)?.first() {
                return Ok((ext, r));
            }
        }
        Err(Error::Internal(format!(
            "degree-{degree} polynomial has no root in any extension of degree <= 3"
        )))
    }
}

/// A fixed field embedding, applied element by element.
#[derive(Clone, Debug)]
pub struct Embedding {
    source: Field,
    target: Field,
    generator: Option<FieldElement>,
}

impl Embedding {
    pub fn source(&self) -> &Field {
        &self.source
    }

    pub fn target(&self) -> &Field {
        &self.target
    }

    pub fn apply(&self, x: FieldElement) -> FieldElement {
        if self.source == self.target {
            return x;
        }
        let coeffs = self.source.coeffs(x);
        match self.generator {
            None => self.target.from_int(coeffs[0] as i64),
            Some(r) => coeffs.iter().rev().fold(self.target.zero(), |acc, &c| {
                self.target
                    .add(self.target.mul(acc, r), self.target.from_int(c as i64))
            }),
        }
    }
}

/// Index in `GF(p^b)` of the image of the generator of `GF(p^a)`, `1 < a < b`, `a | b`.
///
/// Picks the least root of the `GF(p^a)` modulus that keeps every
/// intermediate subfield `GF(p^c)`, `c | a`, commuting.
fn generator_image(p: u32, a: u32, b: u32) -> u32 {
    if let Some(&v) = embedding_cache().lock().unwrap().get(&(p, a, b)) {
        return v;
    }
    let small = Field::new(p as u64, a).expect("subfield exists");
    let big = Field::new(p as u64, b).expect("target exists");
    let modulus: Vec<FieldElement> = small
        .modulus()
        .iter()
        .map(|&c| big.from_int(c as i64))
        .collect();
    let first = big
        .elements()
        .find(|&z| big.eval(&modulus, z).is_zero())
        .expect("an irreducible of degree a splits in GF(p^b)");
    let mut candidates = vec![first];
    let mut r = first;
    for _ in 1..a {
        r = big.frobenius(r);
        candidates.push(r);
    }
    candidates.sort();
    candidates.dedup();

    let divisors: Vec<u32> = (2..a).filter(|c| a.is_multiple_of(*c)).collect();
    let constraints: Vec<(Vec<u32>, FieldElement)> = divisors
        .iter()
        .map(|&c| {
            let in_small = FieldElement(generator_image(p, c, a));
            let in_big = FieldElement(generator_image(p, c, b));
            (small.coeffs(in_small), in_big)
        })
        .collect();

    let chosen = candidates
        .into_iter()
        .find(|&r| {
            constraints.iter().all(|(coeffs, want)| {
                let image = coeffs.iter().rev().fold(big.zero(), |acc, &c| {
                    big.add(big.mul(acc, r), big.from_int(c as i64))
                });
                image == *want
            })
        })
        .expect("a compatible embedding always exists");
    embedding_cache()
        .lock()
        .unwrap()
        .insert((p, a, b), chosen.0);
    chosen.0
}

impl FieldData {
    fn build(p: u32, k: u32, q: u32) -> FieldData {
        let modulus = least_irreducible(p, k);
        let unit = p.pow(k - 1);
        let to_index = |c: &[u32]| -> u32 {
            (0..k as usize).fold(0u32, |idx, i| idx * p + c.get(i).copied().unwrap_or(0))
        };
        let from_index = |mut v: u32| -> Vec<u32> {
            let mut out = vec![0; k as usize];
            for i in (0..k as usize).rev() {
                out[i] = v % p;
                v /= p;
            }
            out
        };

        let n = q - 1;
        let factors = prime_factors(n as u64);
        let generator = (1..q)
            .map(&from_index)
            .find(|g| {
                factors
                    .iter()
                    .all(|&r| poly::pow_mod(g, n as u64 / r, &modulus, p) != [1])
            })
            .expect("multiplicative group is cyclic");

        let mut exp = vec![0u32; 2 * n as usize];
        let mut log = vec![NO_LOG; q as usize];
        let mut cur = vec![1u32];
        for i in 0..n {
            let idx = to_index(&cur);
            exp[i as usize] = idx;
            exp[(i + n) as usize] = idx;
            log[idx as usize] = i;
            cur = poly::mul_mod(&cur, &generator, &modulus, p);
        }

        let plus_one = |idx: u32| -> u32 {
            let c0 = idx / unit;
            if c0 == p - 1 {
                idx - (p - 1) * unit
            } else {
                idx + unit
            }
        };
        let zech = (0..n)
            .map(|i| match plus_one(exp[i as usize]) {
                0 => NO_LOG,
                v => log[v as usize],
            })
            .collect();
        let neg_one_log = if p == 2 { 0 } else { n / 2 };

        FieldData {
            p,
            k,
            q,
            modulus,
            unit,
            exp,
            log,
            zech,
            neg_one_log,
        }
    }
}

/// Least monic irreducible of degree `k` over `GF(p)`, coefficients compared
/// from the constant term upwards.
fn least_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = (p as u64).pow(k);
    for n in 0..count {
        let mut f = vec![0u32; k as usize + 1];
        let mut m = n;
        for i in (0..k as usize).rev() {
            f[i] = (m % p as u64) as u32;
            m /= p as u64;
        }
        f[k as usize] = 1;
        if poly::is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
