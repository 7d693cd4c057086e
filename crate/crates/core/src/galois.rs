//! `W_h(F_{p^r})` realized as the Galois ring `(Z/p^h)[X]/(g)`.
//!
//! `g` is the minimal polynomial of the Teichmüller lift of the field
//! generator, so `X = [x]`, Teichmüller lifts are powers of `X`, and the
//! Witt Frobenius is the ring map `X -> X^p`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{invalid, Result};
use crate::field::FiniteField;
use crate::ring::ChainRing;

/// Largest supported residue degree.
pub const MAX_DEGREE: usize = 8;

/// Element of a [`GaloisRing`]: coefficients in `Z/p^h` of `1, X, ..., X^{r-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GrElem(pub [u32; MAX_DEGREE]);

#[derive(Debug)]
struct Inner {
    field: FiniteField,
    p: u32,
    r: usize,
    h: u32,
    modulus: u64,
    pows: Vec<u64>,
    /// `X^r = sum reduction[i] X^i`.
    reduction: [u64; MAX_DEGREE],
    frob: Vec<GrElem>,
    frob_inv: Vec<GrElem>,
    teich: Vec<GrElem>,
}

/// The ring `W_h(F_{p^r})`.
#[derive(Debug, Clone)]
pub struct GaloisRing(Arc<Inner>);

fn ring_cache() -> &'static RwLock<HashMap<(u32, u32, u32), GaloisRing>> {
    static CACHE: OnceLock<RwLock<HashMap<(u32, u32, u32), GaloisRing>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Arithmetic in `(Z/m)[X]/(X^r - sum red_i X^i)` used during construction
/// and by the ring itself.
fn poly_mul(a: &GrElem, b: &GrElem, r: usize, m: u64, red: &[u64; MAX_DEGREE]) -> GrElem {
    let mut acc = [0u64; 2 * MAX_DEGREE];
    for i in 0..r {
        if a.0[i] == 0 {
            continue;
        }
        let ai = a.0[i] as u64;
        for j in 0..r {
            acc[i + j] += ai * b.0[j] as u64 % m;
        }
    }
    for k in (r..2 * r - 1).rev() {
        let top = acc[k] % m;
        if top == 0 {
            continue;
        }
        for i in 0..r {
            acc[k - r + i] += top * red[i] % m;
        }
    }
    let mut out = [0u32; MAX_DEGREE];
    for i in 0..r {
        out[i] = (acc[i] % m) as u32;
    }
    GrElem(out)
}

fn poly_pow(a: &GrElem, mut e: u64, r: usize, m: u64, red: &[u64; MAX_DEGREE]) -> GrElem {
    let mut one = [0u32; MAX_DEGREE];
    one[0] = 1;
    let mut acc = GrElem(one);
    let mut base = *a;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul(&acc, &base, r, m, red);
        }
        base = poly_mul(&base, &base, r, m, red);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, m: u64) -> u64 {
    // a is a unit mod m
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    old_s.rem_euclid(m as i128) as u64
}

/// Solves `M c = rhs` over `Z/p^h` where `M` is invertible mod `p`.
fn solve_unimodular(mut mat: Vec<Vec<u64>>, mut rhs: Vec<u64>, p: u64, m: u64) -> Vec<u64> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| mat[r][col] % p != 0).expect("singular mod p");
        mat.swap(col, piv);
        rhs.swap(col, piv);
        let inv = inv_mod(mat[col][col], m);
        for j in 0..n {
            mat[col][j] = mat[col][j] * inv % m;
        }
        rhs[col] = rhs[col] * inv % m;
        for r in 0..n {
            if r != col && mat[r][col] != 0 {
                let f = mat[r][col];
                for j in 0..n {
                    mat[r][j] = (mat[r][j] + m - f * mat[col][j] % m) % m;
                }
                rhs[r] = (rhs[r] + m - f * rhs[col] % m) % m;
            }
        }
    }
    rhs
}

impl GaloisRing {
    pub fn new(p: u32, r: u32, h: u32) -> Result<Self> {
        if h == 0 {
            return invalid("Witt length must be positive");
        }
        if r as usize > MAX_DEGREE {
            return invalid(format!("residue degree {r} exceeds {MAX_DEGREE}"));
        }
        let field = FiniteField::new(p, r)?;
        let modulus = match (p as u64).checked_pow(h) {
            Some(m) if m < (1u64 << 32) => m,
            _ => return invalid(format!("p^h = {p}^{h} does not fit in 32 bits")),
        };
        if let Some(g) = ring_cache().read().unwrap().get(&(p, r, h)) {
            return Ok(g.clone());
        }
        let ru = r as usize;
        let m = modulus;
        // Start from the naive lift of the field modulus.
        let mut red = [0u64; MAX_DEGREE];
        for i in 0..ru {
            red[i] = (m - field.modulus()[i] as u64 % m) % m;
        }
        let mut x = [0u32; MAX_DEGREE];
        if ru == 1 {
            x[0] = red[0] as u32;
        } else {
            x[1] = 1;
        }
        // Teichmüller lift of the generator: x^(q^(h-1)).
        let mut t = GrElem(x);
        for _ in 1..h {
            t = poly_pow(&t, field.q() as u64, ru, m, &red);
        }
        // Minimal polynomial of t: t^r = sum c_i t^i.
        let mut powers = Vec::with_capacity(ru + 1);
        let mut one = [0u32; MAX_DEGREE];
        one[0] = 1;
        powers.push(GrElem(one));
        for k in 1..=ru {
            powers.push(poly_mul(&powers[k - 1], &t, ru, m, &red));
        }
        let mat: Vec<Vec<u64>> =
            (0..ru).map(|row| (0..ru).map(|col| powers[col].0[row] as u64).collect()).collect();
        let rhs: Vec<u64> = (0..ru).map(|row| powers[ru].0[row] as u64).collect();
        let c = solve_unimodular(mat, rhs, p as u64, m);
        let mut reduction = [0u64; MAX_DEGREE];
        reduction[..ru].copy_from_slice(&c[..ru]);

        let pows: Vec<u64> = (0..=h).map(|k| (p as u64).pow(k)).collect();
        let mut inner = Inner {
            field: field.clone(),
            p,
            r: ru,
            h,
            modulus: m,
            pows,
            reduction,
            frob: Vec::new(),
            frob_inv: Vec::new(),
            teich: Vec::new(),
        };
        let mut xgen = [0u32; MAX_DEGREE];
        if ru == 1 {
            xgen[0] = reduction[0] as u32;
        } else {
            xgen[1] = 1;
        }
        let xgen = GrElem(xgen);
        let xp = poly_pow(&xgen, p as u64, ru, m, &inner.reduction);
        let xpinv = poly_pow(&xgen, (field.q() / p) as u64, ru, m, &inner.reduction);
        let mut frob = Vec::with_capacity(ru);
        let mut frob_inv = Vec::with_capacity(ru);
        let mut cur = GrElem(one);
        let mut cur_inv = GrElem(one);
        for _ in 0..ru {
            frob.push(cur);
            frob_inv.push(cur_inv);
            cur = poly_mul(&cur, &xp, ru, m, &inner.reduction);
            cur_inv = poly_mul(&cur_inv, &xpinv, ru, m, &inner.reduction);
        }
        inner.frob = frob;
        inner.frob_inv = frob_inv;
        if field.q() <= 1 << 16 {
            let mut teich = vec![GrElem([0; MAX_DEGREE]); field.q() as usize];
            let mut cur = GrElem(one);
            let g = field.generator();
            let mut code = 1u32;
            for _ in 0..field.q() - 1 {
                teich[code as usize] = cur;
                cur = poly_mul(&cur, &xgen, ru, m, &inner.reduction);
                code = field.mul(code, g);
            }
            inner.teich = teich;
        }
        let ring = GaloisRing(Arc::new(inner));
        ring_cache().write().unwrap().entry((p, r, h)).or_insert(ring.clone());
        Ok(ring)
    }

    pub fn field(&self) -> &FiniteField {
        &self.0.field
    }

    /// `p^h`.
    pub fn characteristic(&self) -> u64 {
        self.0.modulus
    }

    /// The same ring at a different length.
    pub fn with_precision(&self, h: u32) -> Result<Self> {
        Self::new(self.0.p, self.0.r as u32, h)
    }

    /// Reduction `W_h -> W_k` for `k <= h`, realized in the ring of length `k`.
    pub fn reduce_to(&self, a: GrElem, target: &GaloisRing) -> GrElem {
        let m = target.0.modulus;
        let mut out = [0u32; MAX_DEGREE];
        for i in 0..self.0.r {
            out[i] = (a.0[i] as u64 % m) as u32;
        }
        GrElem(out)
    }

    /// Lift from a shorter ring by the canonical (coefficient-wise) lift.
    pub fn lift_from(&self, a: GrElem) -> GrElem {
        a
    }

    fn apply_linear(&self, a: GrElem, images: &[GrElem]) -> GrElem {
        let inner = &*self.0;
        let m = inner.modulus;
        let mut acc = [0u64; MAX_DEGREE];
        for i in 0..inner.r {
            let ai = a.0[i] as u64;
            if ai == 0 {
                continue;
            }
            for j in 0..inner.r {
                acc[j] += ai * images[i].0[j] as u64 % m;
            }
        }
        let mut out = [0u32; MAX_DEGREE];
        for j in 0..inner.r {
            out[j] = (acc[j] % m) as u32;
        }
        GrElem(out)
    }
}

impl ChainRing for GaloisRing {
    type Elem = GrElem;

    fn p(&self) -> u32 {
        self.0.p
    }
    fn residue_degree(&self) -> u32 {
        self.0.r as u32
    }
    fn precision(&self) -> u32 {
        self.0.h
    }
    fn zero(&self) -> GrElem {
        GrElem([0; MAX_DEGREE])
    }
    fn one(&self) -> GrElem {
        let mut c = [0; MAX_DEGREE];
        c[0] = 1 % self.0.modulus as u32;
        GrElem(c)
    }
    fn from_int(&self, n: i64) -> GrElem {
        let mut c = [0; MAX_DEGREE];
        c[0] = n.rem_euclid(self.0.modulus as i64) as u32;
        GrElem(c)
    }
    #[inline]
    fn add(&self, a: GrElem, b: GrElem) -> GrElem {
        let m = self.0.modulus as u64;
        let mut out = [0u32; MAX_DEGREE];
        for i in 0..self.0.r {
            out[i] = ((a.0[i] as u64 + b.0[i] as u64) % m) as u32;
        }
        GrElem(out)
    }
    #[inline]
    fn sub(&self, a: GrElem, b: GrElem) -> GrElem {
        let m = self.0.modulus as u64;
        let mut out = [0u32; MAX_DEGREE];
        for i in 0..self.0.r {
            out[i] = ((a.0[i] as u64 + m - b.0[i] as u64) % m) as u32;
        }
        GrElem(out)
    }
    fn neg(&self, a: GrElem) -> GrElem {
        self.sub(self.zero(), a)
    }
    #[inline]
    fn mul(&self, a: GrElem, b: GrElem) -> GrElem {
        if self.0.r == 1 {
            let mut out = [0u32; MAX_DEGREE];
            out[0] = (a.0[0] as u64 * b.0[0] as u64 % self.0.modulus) as u32;
            return GrElem(out);
        }
        poly_mul(&a, &b, self.0.r, self.0.modulus, &self.0.reduction)
    }
    fn valuation(&self, a: GrElem) -> u32 {
        let inner = &*self.0;
        let mut v = inner.h;
        for &c in &a.0[..inner.r] {
            if c == 0 {
                continue;
            }
            let mut k = 0;
            let mut c = c;
            while c % inner.p == 0 {
                c /= inner.p;
                k += 1;
            }
            v = v.min(k);
        }
        v
    }
    fn inv_unit(&self, a: GrElem) -> Option<GrElem> {
        let res = self.residue(a);
        let f = &self.0.field;
        let inv0 = f.inv(res)?;
        let coords = f.coords(inv0);
        let mut y = [0u32; MAX_DEGREE];
        y[..coords.len()].copy_from_slice(&coords);
        let mut y = GrElem(y);
        // Newton: y <- y (2 - a y)
        let two = self.from_int(2);
        let mut prec = 1;
        while prec < self.0.h {
            let ay = self.mul(a, y);
            y = self.mul(y, self.sub(two, ay));
            prec *= 2;
        }
        debug_assert_eq!(self.mul(a, y), self.one());
        Some(y)
    }
    fn uniformizer_pow(&self, k: u32) -> GrElem {
        let mut c = [0; MAX_DEGREE];
        if k < self.0.h {
            c[0] = self.0.pows[k as usize] as u32;
        }
        GrElem(c)
    }
    fn div_uniformizer_pow(&self, a: GrElem, k: u32) -> GrElem {
        if k == 0 {
            return a;
        }
        let inner = &*self.0;
        let d = inner.pows[k.min(inner.h) as usize] as u32;
        let mut out = [0u32; MAX_DEGREE];
        for i in 0..inner.r {
            debug_assert!(a.0[i] % d == 0, "not divisible by p^{k}");
            out[i] = a.0[i] / d;
        }
        GrElem(out)
    }
    fn reduce_mod(&self, a: GrElem, k: u32) -> GrElem {
        let inner = &*self.0;
        if k >= inner.h {
            return a;
        }
        let d = inner.pows[k as usize] as u32;
        let mut out = [0u32; MAX_DEGREE];
        for i in 0..inner.r {
            out[i] = a.0[i] % d;
        }
        GrElem(out)
    }
    fn representative(&self, k: u32, index: u64) -> GrElem {
        let inner = &*self.0;
        let base = inner.pows[k.min(inner.h) as usize];
        let mut idx = index;
        let mut out = [0u32; MAX_DEGREE];
        for i in 0..inner.r {
            out[i] = (idx % base) as u32;
            idx /= base;
        }
        GrElem(out)
    }
    fn teichmuller(&self, code: u32) -> GrElem {
        let inner = &*self.0;
        if code == 0 {
            return self.zero();
        }
        if !inner.teich.is_empty() {
            return inner.teich[code as usize];
        }
        // [c] = c0^(q^(h-1)) for any lift c0
        let coords = inner.field.coords(code);
        let mut c = [0u32; MAX_DEGREE];
        c[..coords.len()].copy_from_slice(&coords);
        let mut t = GrElem(c);
        for _ in 1..inner.h {
            t = self.pow(t, inner.field.q() as u64);
        }
        t
    }
    fn residue(&self, a: GrElem) -> u32 {
        let inner = &*self.0;
        a.0[..inner.r].iter().rev().fold(0u32, |acc, &c| acc * inner.p + c % inner.p)
    }
    fn frobenius(&self, a: GrElem) -> GrElem {
        self.apply_linear(a, &self.0.frob)
    }
    fn frobenius_inv(&self, a: GrElem) -> GrElem {
        self.apply_linear(a, &self.0.frob_inv)
    }
}
