//! Finite fields `F_{p^r}` with a fixed, versioned table of defining
//! polynomials.
//!
//! Elements are encoded as integers `sum c_i p^i` where `c_i` are the
//! coordinates in the power basis `1, x, ..., x^{r-1}`. The defining
//! polynomial is always primitive, so `x` generates the multiplicative group
//! and multiplication goes through discrete log tables.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{invalid, Result};

/// Bumped whenever an entry of [`CONWAY_TABLE`] changes.
pub const MODULI_TABLE_VERSION: u32 = 1;

/// Conway polynomials, coefficients listed from the constant term upwards.
pub const CONWAY_TABLE: &[(u32, u32, &[u32])] = &[
    (2, 1, &[1, 1]),
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (3, 1, &[1, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (3, 5, &[1, 2, 0, 0, 0, 1]),
    (3, 6, &[2, 2, 1, 0, 2, 0, 1]),
    (5, 1, &[3, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (5, 4, &[2, 4, 4, 0, 1]),
    (5, 5, &[3, 4, 0, 0, 0, 1]),
    (5, 6, &[2, 0, 1, 4, 1, 0, 1]),
    (7, 1, &[4, 1]),
    (7, 2, &[3, 6, 1]),
    (7, 3, &[4, 0, 6, 1]),
    (7, 4, &[3, 4, 5, 0, 1]),
    (7, 5, &[4, 1, 0, 0, 0, 1]),
    (7, 6, &[3, 6, 4, 5, 1, 0, 1]),
];

/// Largest field we are willing to tabulate.
const MAX_ORDER: u64 = 1 << 22;
/// Full addition tables are built up to this order.
const ADD_TABLE_MAX: u32 = 256;

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits a prime power `q = p^r`.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut r = 0;
    let mut m = q;
    while m % p == 0 {
        m /= p;
        r += 1;
    }
    (m == 1).then_some((p as u32, r))
}

#[derive(Debug)]
struct Tables {
    p: u32,
    r: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    frob: Vec<u32>,
    add: Vec<u32>,
}

/// A finite field `F_{p^r}`. Cheap to clone.
#[derive(Clone)]
pub struct FiniteField(Arc<Tables>);

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.0.p, self.0.r)
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.r == other.0.r
    }
}
impl Eq for FiniteField {}

fn field_cache() -> &'static RwLock<HashMap<(u32, u32), FiniteField>> {
    static CACHE: OnceLock<RwLock<HashMap<(u32, u32), FiniteField>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn powers_of_x(p: u32, r: u32, modulus: &[u32], q: u32) -> Option<Vec<u32>> {
    // Multiply by x repeatedly in F_p[x]/(modulus); returns the exp table if
    // x has order exactly q - 1.
    let r = r as usize;
    let mut cur = vec![0u32; r];
    cur[0] = 1;
    let encode = |v: &[u32]| v.iter().rev().fold(0u32, |acc, &c| acc * p + c);
    let mut exp = Vec::with_capacity(q as usize - 1);
    for k in 0..(q - 1) {
        let code = encode(&cur);
        if k > 0 && code == 1 {
            return None;
        }
        exp.push(code);
        let top = cur[r - 1];
        for i in (1..r).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for i in 0..r {
                cur[i] = (cur[i] + (p - top) * modulus[i]) % p;
            }
        }
    }
    (encode(&cur) == 1).then_some(exp)
}

fn search_primitive(p: u32, r: u32, q: u32) -> (Vec<u32>, Vec<u32>) {
    // Lexicographically smallest primitive polynomial, constant term first.
    let total = (p as u64).pow(r);
    for idx in 0..total {
        let mut coeffs = Vec::with_capacity(r as usize + 1);
        let mut m = idx;
        for _ in 0..r {
            coeffs.push((m % p as u64) as u32);
            m /= p as u64;
        }
        if coeffs[0] == 0 {
            continue;
        }
        coeffs.push(1);
        if let Some(exp) = powers_of_x(p, r, &coeffs, q) {
            return (coeffs, exp);
        }
    }
    unreachable!("a primitive polynomial always exists")
}

impl FiniteField {
    /// The field `F_{p^r}`; built once per `(p, r)` and shared afterwards.
    pub fn new(p: u32, r: u32) -> Result<Self> {
        if !is_prime(p) {
            return invalid(format!("{p} is not prime"));
        }
        if r == 0 {
            return invalid("extension degree must be positive");
        }
        let q = (p as u64).checked_pow(r).filter(|&q| q <= MAX_ORDER);
        let Some(q) = q else {
            return invalid(format!("field F_{p}^{r} too large"));
        };
        if let Some(f) = field_cache().read().unwrap().get(&(p, r)) {
            return Ok(f.clone());
        }
        let q = q as u32;
        let (modulus, exp) = match CONWAY_TABLE.iter().find(|e| e.0 == p && e.1 == r) {
            Some(&(_, _, m)) => {
                let exp = powers_of_x(p, r, m, q)
                    .unwrap_or_else(|| panic!("table modulus for F_{p}^{r} is not primitive"));
                (m.to_vec(), exp)
            }
            None => search_primitive(p, r, q),
        };
        let mut log = vec![u32::MAX; q as usize];
        for (k, &e) in exp.iter().enumerate() {
            log[e as usize] = k as u32;
        }
        let digits = |mut c: u32| {
            let mut d = vec![0u32; r as usize];
            for x in d.iter_mut() {
                *x = c % p;
                c /= p;
            }
            d
        };
        let undigits = |d: &[u32]| d.iter().rev().fold(0u32, |acc, &c| acc * p + c);
        let neg: Vec<u32> = (0..q)
            .map(|c| undigits(&digits(c).iter().map(|&x| (p - x) % p).collect::<Vec<_>>()))
            .collect();
        let frob: Vec<u32> = (0..q)
            .map(|c| {
                if c == 0 {
                    0
                } else {
                    exp[((log[c as usize] as u64 * p as u64) % (q as u64 - 1)) as usize]
                }
            })
            .collect();
        let add = if q <= ADD_TABLE_MAX {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                let da = digits(a);
                for b in 0..q {
                    let db = digits(b);
                    let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                    t[(a * q + b) as usize] = undigits(&s);
                }
            }
            t
        } else {
            Vec::new()
        };
        let field = FiniteField(Arc::new(Tables { p, r, q, modulus, exp, log, neg, frob, add }));
        field_cache().write().unwrap().entry((p, r)).or_insert(field.clone());
        Ok(field)
    }

    /// The field of order `q`.
    pub fn of_order(q: u64) -> Result<Self> {
        match prime_power(q) {
            Some((p, r)) => Self::new(p, r),
            None => invalid(format!("{q} is not a prime power")),
        }
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }
    pub fn r(&self) -> u32 {
        self.0.r
    }
    pub fn q(&self) -> u32 {
        self.0.q
    }
    /// Defining polynomial, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let t = &self.0;
        if !t.add.is_empty() {
            return t.add[(a * t.q + b) as usize];
        }
        if t.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        while a > 0 || b > 0 {
            out += ((a % t.p + b % t.p) % t.p) * place;
            a /= t.p;
            b /= t.p;
            place *= t.p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.0.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let t = &self.0;
        let s = t.log[a as usize] as u64 + t.log[b as usize] as u64;
        t.exp[(s % (t.q as u64 - 1)) as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let t = &self.0;
        let l = t.log[a as usize];
        Some(t.exp[((t.q - 1 - l) % (t.q - 1)) as usize])
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let t = &self.0;
        let l = t.log[a as usize] as u64;
        t.exp[((l * (e % (t.q as u64 - 1))) % (t.q as u64 - 1)) as usize]
    }

    /// `a^p`.
    #[inline]
    pub fn frobenius(&self, a: u32) -> u32 {
        self.0.frob[a as usize]
    }

    /// `a^(1/p)`, the inverse Frobenius.
    pub fn frobenius_inv(&self, a: u32) -> u32 {
        self.pow(a, (self.q() / self.p()) as u64)
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.0.p as i64) as u32
    }

    /// Power-basis coordinates of `a`.
    pub fn coords(&self, a: u32) -> Vec<u32> {
        let mut a = a;
        (0..self.0.r)
            .map(|_| {
                let c = a % self.0.p;
                a /= self.0.p;
                c
            })
            .collect()
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<u32> {
        if coords.len() != self.0.r as usize || coords.iter().any(|&c| c >= self.0.p) {
            return invalid(format!("bad coordinates {coords:?} for {self:?}"));
        }
        Ok(coords.iter().rev().fold(0u32, |acc, &c| acc * self.0.p + c))
    }

    /// Generator `x` of the multiplicative group.
    pub fn generator(&self) -> u32 {
        self.0.exp[1 % (self.0.q as usize - 1).max(1)]
    }

    pub fn elem(&self, code: u32) -> FqElem {
        assert!(code < self.q(), "code {code} out of range for {self:?}");
        FqElem { field: self.clone(), code }
    }
}

/// An element of a finite field, bundled with its field.
#[derive(Clone, PartialEq, Eq)]
pub struct FqElem {
    field: FiniteField,
    code: u32,
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code)
    }
}

impl FqElem {
    pub fn field(&self) -> &FiniteField {
        &self.field
    }
    pub fn code(&self) -> u32 {
        self.code
    }
    pub fn zero(field: &FiniteField) -> Self {
        field.elem(0)
    }
    pub fn one(field: &FiniteField) -> Self {
        field.elem(1)
    }
    pub fn is_zero(&self) -> bool {
        self.code == 0
    }
    fn check(&self, other: &Self) {
        assert_eq!(self.field, other.field, "field mismatch");
    }
    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        self.field.elem(self.field.add(self.code, other.code))
    }
    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        self.field.elem(self.field.sub(self.code, other.code))
    }
    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        self.field.elem(self.field.mul(self.code, other.code))
    }
    pub fn neg(&self) -> Self {
        self.field.elem(self.field.neg(self.code))
    }
    pub fn inv(&self) -> Option<Self> {
        self.field.inv(self.code).map(|c| self.field.elem(c))
    }
    pub fn pow(&self, e: u64) -> Self {
        self.field.elem(self.field.pow(self.code, e))
    }
    pub fn frobenius(&self) -> Self {
        self.field.elem(self.field.frobenius(self.code))
    }
}
