//! Truncated Witt vectors over `F_{p^r}` and windows of `W(F_{p^r})[1/p]`.
//!
//! Arithmetic runs in the Galois ring model of [`GaloisRing`]; Witt
//! coordinates are recovered from Teichmüller digits via
//! `x_i = d_i^{p^i}` where `a = sum p^i [d_i]`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, precision, Error, Result};
use crate::field::{FiniteField, FqElem};
use crate::galois::{GaloisRing, GrElem};
use crate::matrix;
use crate::ring::ChainRing;

/// An element of `W_h(F_{p^r})`.
#[derive(Debug, Clone)]
pub struct WittVector {
    ring: GaloisRing,
    value: GrElem,
}

impl PartialEq for WittVector {
    fn eq(&self, other: &Self) -> bool {
        self.same_ring(other) && self.value == other.value
    }
}
impl Eq for WittVector {}

impl WittVector {
    pub fn zero(ring: &GaloisRing) -> Self {
        WittVector { ring: ring.clone(), value: ring.zero() }
    }

    pub fn one(ring: &GaloisRing) -> Self {
        WittVector { ring: ring.clone(), value: ring.one() }
    }

    pub fn from_int(ring: &GaloisRing, n: i64) -> Self {
        WittVector { ring: ring.clone(), value: ring.from_int(n) }
    }

    pub fn from_elem(ring: &GaloisRing, value: GrElem) -> Self {
        WittVector { ring: ring.clone(), value }
    }

    /// Builds a vector from Witt coordinates given as field codes.
    pub fn from_coords(ring: &GaloisRing, coords: &[u32]) -> Result<Self> {
        let h = ring.precision() as usize;
        if coords.len() != h {
            return invalid(format!("expected {h} Witt coordinates, got {}", coords.len()));
        }
        let f = ring.field();
        if let Some(&bad) = coords.iter().find(|&&c| c >= f.q()) {
            return invalid(format!("{bad} is not an element of F_{}", f.q()));
        }
        let digits: Vec<u32> = coords
            .iter()
            .enumerate()
            .map(|(i, &c)| (0..i).fold(c, |x, _| f.frobenius_inv(x)))
            .collect();
        Ok(WittVector { ring: ring.clone(), value: ring.from_digits(&digits) })
    }

    /// Teichmüller lift `[x]`.
    pub fn teichmuller(ring: &GaloisRing, x: u32) -> Self {
        WittVector { ring: ring.clone(), value: ring.teichmuller(x) }
    }

    pub fn ring(&self) -> &GaloisRing {
        &self.ring
    }

    pub fn elem(&self) -> GrElem {
        self.value
    }

    pub fn len(&self) -> u32 {
        self.ring.precision()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Witt coordinates `(x_0, ..., x_{h-1})` as field codes.
    pub fn coords(&self) -> Vec<u32> {
        let f = self.ring.field();
        self.ring
            .digits(self.value)
            .into_iter()
            .enumerate()
            .map(|(i, d)| (0..i).fold(d, |x, _| f.frobenius(x)))
            .collect()
    }

    pub fn coord_elems(&self) -> Vec<FqElem> {
        let f = self.ring.field();
        self.coords().into_iter().map(|c| f.elem(c)).collect()
    }

    /// Teichmüller digits `d_i` with `a = sum p^i [d_i]`.
    pub fn digits(&self) -> Vec<u32> {
        self.ring.digits(self.value)
    }

    fn same_ring(&self, other: &Self) -> bool {
        self.ring.p() == other.ring.p()
            && self.ring.residue_degree() == other.ring.residue_degree()
            && self.ring.precision() == other.ring.precision()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.same_ring(other) {
            Ok(())
        } else {
            Err(Error::Mismatch(format!(
                "W_{}(F_{}) vs W_{}(F_{})",
                self.len(),
                self.ring.q(),
                other.len(),
                other.ring.q()
            )))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_elem(&self.ring, self.ring.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_elem(&self.ring, self.ring.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_elem(&self.ring, self.ring.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> Self {
        Self::from_elem(&self.ring, self.ring.neg(self.value))
    }

    /// Witt Frobenius: raises every coordinate to the `p`-th power.
    pub fn frobenius(&self) -> Self {
        Self::from_elem(&self.ring, self.ring.frobenius(self.value))
    }

    /// Verschiebung: `(x_0, x_1, ...) -> (0, x_0, x_1, ...)`, truncated.
    pub fn verschiebung(&self) -> Self {
        let mut c = self.coords();
        c.pop();
        c.insert(0, 0);
        Self::from_coords(&self.ring, &c).expect("valid coordinates")
    }

    /// Image under `W_h -> W_m`.
    pub fn truncate(&self, m: u32) -> Result<Self> {
        if m == 0 || m > self.len() {
            return invalid(format!("cannot truncate length {} to {m}", self.len()));
        }
        let target = self.ring.with_precision(m)?;
        Ok(Self::from_elem(&target, self.ring.reduce_to(self.value, &target)))
    }

    pub fn valuation(&self) -> u32 {
        self.ring.valuation(self.value)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.ring
            .inv_unit(self.value)
            .map(|v| Self::from_elem(&self.ring, v))
            .ok_or_else(|| Error::Domain("not a unit".into()))
    }
}

impl Serialize for WittVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coords: Vec<String> = self.coords().iter().map(|c| c.to_string()).collect();
        coords.serialize(s)
    }
}

pub fn witt_add(a: &WittVector, b: &WittVector) -> Result<WittVector> {
    a.add(b)
}

pub fn witt_mul(a: &WittVector, b: &WittVector) -> Result<WittVector> {
    a.mul(b)
}

pub fn teichmuller(x: &FqElem, h: u32) -> Result<WittVector> {
    let f = x.field();
    let ring = GaloisRing::new(f.p(), f.r(), h)?;
    Ok(WittVector::teichmuller(&ring, x.code()))
}

pub fn frobenius_sigma(a: &WittVector) -> WittVector {
    a.frobenius()
}

/// Witt coordinates of `det A`.
pub fn det_components(a: &[Vec<WittVector>]) -> Result<Vec<u32>> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return invalid("determinant of a non-square matrix");
    }
    let Some(first) = a.first().and_then(|r| r.first()) else {
        return invalid("empty matrix");
    };
    let ring = first.ring().clone();
    for x in a.iter().flatten() {
        first.check(x)?;
    }
    let m: Vec<Vec<GrElem>> = a.iter().map(|r| r.iter().map(|x| x.elem()).collect()).collect();
    Ok(WittVector::from_elem(&ring, matrix::det(&ring, &m)).coords())
}

/// `p^v * sum_i p^i [d_i]`, known modulo `p^{v + len}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicWindow {
    p: u32,
    r: u32,
    v: i64,
    digits: Vec<u32>,
}

impl PadicWindow {
    /// Zero known modulo `p^prec`.
    pub fn zero(p: u32, r: u32, prec: i64) -> Self {
        PadicWindow { p, r, v: prec, digits: Vec::new() }
    }

    /// `p^v * [x]` with `len` digits of relative precision.
    pub fn teichmuller(p: u32, r: u32, x: u32, v: i64, len: u32) -> Self {
        let mut digits = vec![0; len as usize];
        if let Some(d) = digits.first_mut() {
            *d = x;
        }
        PadicWindow { p, r, v, digits }.normalized()
    }

    pub fn from_int(p: u32, r: u32, n: i64, len: u32) -> Result<Self> {
        let ring = GaloisRing::new(p, r, len)?;
        Ok(PadicWindow { p, r, v: 0, digits: ring.digits(ring.from_int(n)) }.normalized())
    }

    /// `p^k` with `len` digits.
    pub fn p_power(p: u32, r: u32, k: i64, len: u32) -> Self {
        Self::teichmuller(p, r, 1, k, len)
    }

    pub fn from_witt(a: &WittVector, v: i64) -> Self {
        PadicWindow {
            p: a.ring().p(),
            r: a.ring().residue_degree(),
            v,
            digits: a.digits(),
        }
        .normalized()
    }

    /// Valuation lower bound (exact unless the window is zero).
    pub fn offset(&self) -> i64 {
        self.v
    }

    /// Absolute precision: the value is known modulo `p^absolute_precision`.
    pub fn absolute_precision(&self) -> i64 {
        self.v + self.digits.len() as i64
    }

    pub fn relative_precision(&self) -> u32 {
        self.digits.len() as u32
    }

    /// Whether the known part is zero.
    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// Teichmüller digit at `p^k`; errors beyond the available precision.
    pub fn digit(&self, k: i64) -> Result<u32> {
        if k >= self.absolute_precision() {
            return precision(format!(
                "digit at p^{k} requested, value known only mod p^{}",
                self.absolute_precision()
            ));
        }
        if k < self.v {
            return Ok(0);
        }
        Ok(self.digits[(k - self.v) as usize])
    }

    fn normalized(mut self) -> Self {
        let lead = self.digits.iter().take_while(|&&d| d == 0).count();
        self.digits.drain(..lead);
        self.v += lead as i64;
        self
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.r != other.r {
            return Err(Error::Mismatch(format!(
                "F_{}^{} vs F_{}^{}",
                self.p, self.r, other.p, other.r
            )));
        }
        Ok(())
    }

    fn elem_in(&self, ring: &GaloisRing, base: i64) -> GrElem {
        let shift = (self.v - base) as usize;
        let h = ring.precision() as usize;
        let mut d = vec![0u32; h];
        for (i, &x) in self.digits.iter().enumerate() {
            if shift + i < h {
                d[shift + i] = x;
            }
        }
        ring.from_digits(&d)
    }

    fn from_ring(p: u32, r: u32, ring: &GaloisRing, base: i64, e: GrElem) -> Self {
        PadicWindow { p, r, v: base, digits: ring.digits(e) }.normalized()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Result<Self> {
        self.check(other)?;
        let top = self.absolute_precision().min(other.absolute_precision());
        let base = self.v.min(other.v);
        if top <= base {
            return Ok(Self::zero(self.p, self.r, top));
        }
        let ring = GaloisRing::new(self.p, self.r, (top - base) as u32)?;
        let a = self.elem_in(&ring, base);
        let b = other.elem_in(&ring, base);
        let s = if negate { ring.sub(a, b) } else { ring.add(a, b) };
        Ok(Self::from_ring(self.p, self.r, &ring, base, s))
    }

    pub fn neg(&self) -> Result<Self> {
        Self::zero(self.p, self.r, self.absolute_precision()).sub(self)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let v = self.v + other.v;
        let len = self.relative_precision().min(other.relative_precision());
        if len == 0 {
            // one factor is only known to lie in p^v O
            let prec = (self.absolute_precision() + other.v).min(other.absolute_precision() + self.v);
            return Ok(Self::zero(self.p, self.r, prec));
        }
        let ring = GaloisRing::new(self.p, self.r, len)?;
        let prod = ring.mul(self.elem_in(&ring, self.v), other.elem_in(&ring, other.v));
        Ok(Self::from_ring(self.p, self.r, &ring, v, prod))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of a window not known to be nonzero".into()));
        }
        let ring = GaloisRing::new(self.p, self.r, self.relative_precision())?;
        let u = ring.inv_unit(self.elem_in(&ring, self.v)).expect("leading digit is a unit");
        Ok(Self::from_ring(self.p, self.r, &ring, -self.v, u))
    }

    pub fn frobenius(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let ring = GaloisRing::new(self.p, self.r, self.relative_precision())?;
        let f = ring.frobenius(self.elem_in(&ring, self.v));
        Ok(Self::from_ring(self.p, self.r, &ring, self.v, f))
    }

    /// Equality on the common range of precision.
    pub fn agrees_with(&self, other: &Self) -> Result<bool> {
        Ok(self.sub(other)?.is_zero())
    }
}

/// 2x2 product over windows.
fn mul2(a: &[[PadicWindow; 2]; 2], b: &[[PadicWindow; 2]; 2]) -> Result<[[PadicWindow; 2]; 2]> {
    let e = |i: usize, j: usize| -> Result<PadicWindow> {
        a[i][0].mul(&b[0][j])?.add(&a[i][1].mul(&b[1][j])?)
    };
    Ok([[e(0, 0)?, e(0, 1)?], [e(1, 0)?, e(1, 1)?]])
}

/// Checks the factorization of the Weyl element
/// `[[0,-1],[1,0]] = [[1,-p^-1],[0,1]] [[1,0],[p,1]] [[1,-p^-1],[0,1]] diag(p^-1, p)`
/// with all entries carried at relative precision `h`.
pub fn verify_famous_identity(p: u32, h: u32) -> Result<bool> {
    if h < 2 {
        return invalid("the identity needs h >= 2");
    }
    if !crate::field::is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    let hi = h as i64;
    let one = PadicWindow::from_int(p, 1, 1, h)?;
    let m_one = PadicWindow::from_int(p, 1, -1, h)?;
    let zero = PadicWindow::zero(p, 1, hi);
    let pinv = PadicWindow::p_power(p, 1, -1, h);
    let m_pinv = pinv.neg()?;
    let pp = PadicWindow::p_power(p, 1, 1, h);
    let u = [[one.clone(), m_pinv.clone()], [zero.clone(), one.clone()]];
    let l = [[one.clone(), zero.clone()], [pp.clone(), one.clone()]];
    let d = [[pinv.clone(), zero.clone()], [zero.clone(), pp.clone()]];
    let rhs = mul2(&mul2(&mul2(&u, &l)?, &u)?, &d)?;
    let lhs = [[zero.clone(), m_one], [one, zero]];
    let mut ok = true;
    for i in 0..2 {
        for j in 0..2 {
            // a positive amount of information must survive
            if rhs[i][j].absolute_precision() <= 0 {
                return precision("identity entries lost all precision");
            }
            ok &= rhs[i][j].agrees_with(&lhs[i][j])?;
        }
    }
    Ok(ok)
}

/// The field underlying a Witt ring.
pub fn residue_field(ring: &GaloisRing) -> &FiniteField {
    ring.field()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Witt coordinates of `n mod p^h` from ghost congruences
    /// `w_k = sum_{i<=k} p^i x_i^{p^{k-i}} = n mod p^{k+1}`.
    fn ghost_coords(p: u64, h: u32, n: u64) -> Vec<u32> {
        let mut xs: Vec<u64> = Vec::new();
        for k in 0..h {
            let m = p.pow(k + 1);
            let partial = |xs: &[u64]| -> u64 {
                xs.iter().enumerate().fold(0u64, |acc, (i, &x)| {
                    let mut t = 1u64;
                    for _ in 0..p.pow(k - i as u32) {
                        t = t * x % m;
                    }
                    (acc + p.pow(i as u32) * t) % m
                })
            };
            let found = (0..p)
                .find(|&x| {
                    let mut c = xs.clone();
                    c.push(x);
                    partial(&c) == n % m
                })
                .expect("ghost congruence solvable");
            xs.push(found);
        }
        xs.into_iter().map(|x| x as u32).collect()
    }

    #[test]
    fn prime_field_coordinates_match_ghost_oracle() {
        for (p, h) in [(2u32, 3u32), (3, 3), (2, 5), (3, 5), (5, 3)] {
            let ring = GaloisRing::new(p, 1, h).unwrap();
            let m = (p as u64).pow(h);
            for n in 0..m {
                let w = WittVector::from_int(&ring, n as i64);
                assert_eq!(w.coords(), ghost_coords(p as u64, h, n), "p={p} h={h} n={n}");
            }
        }
    }

    #[test]
    fn seed_values() {
        let r = GaloisRing::new(2, 1, 3).unwrap();
        let one = WittVector::teichmuller(&r, 1);
        let two = one.add(&one).unwrap();
        assert_eq!(two.coords(), vec![0, 1, 0]);
        assert_eq!(two.mul(&two).unwrap().coords(), vec![0, 0, 1]);
        let r3 = GaloisRing::new(3, 1, 2).unwrap();
        // [2] = -1 for odd p, so [1] + [2] = 0
        let s = WittVector::teichmuller(&r3, 1).add(&WittVector::teichmuller(&r3, 2)).unwrap();
        assert_eq!(WittVector::teichmuller(&r3, 2), WittVector::from_int(&r3, 8));
        assert_eq!(s.coords(), vec![0, 0]);
        assert_eq!(WittVector::from_int(&r3, 3).coords(), vec![0, 1]);
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let a = WittVector::one(&GaloisRing::new(2, 1, 3).unwrap());
        let b = WittVector::one(&GaloisRing::new(2, 1, 4).unwrap());
        assert!(matches!(a.add(&b), Err(Error::Mismatch(_))));
    }

    #[test]
    fn verschiebung_frobenius_relation() {
        let ring = GaloisRing::new(3, 2, 4).unwrap();
        let p = WittVector::from_int(&ring, 3);
        for code in 0..9 {
            for c1 in [0, 5] {
                let a = WittVector::from_coords(&ring, &[code, c1, 2, 7]).unwrap();
                assert_eq!(p.mul(&a).unwrap(), a.frobenius().verschiebung());
            }
        }
    }

    #[test]
    fn det_of_scalar_p() {
        let ring = GaloisRing::new(3, 2, 3).unwrap();
        let p = WittVector::from_int(&ring, 3);
        let z = WittVector::zero(&ring);
        let m = vec![vec![p.clone(), z.clone()], vec![z, p]];
        assert_eq!(det_components(&m).unwrap(), vec![0, 0, 1]);
    }

    #[test]
    fn windows_track_precision() {
        let a = PadicWindow::p_power(3, 1, -1, 3);
        let b = PadicWindow::p_power(3, 1, 1, 3);
        let prod = a.mul(&b).unwrap();
        assert_eq!(prod.absolute_precision(), 3);
        assert!(prod.digit(3).is_err());
        let s = a.add(&b).unwrap();
        assert_eq!(s.absolute_precision(), 2);
        assert_eq!(s.digit(1).unwrap(), 1);
    }

    #[test]
    fn famous_identity() {
        for (p, h) in [(2, 4), (3, 3), (5, 5), (7, 3)] {
            assert!(verify_famous_identity(p, h).unwrap());
        }
        // the two factors p^-1 eat two digits
        assert!(matches!(verify_famous_identity(7, 2), Err(Error::Precision(_))));
        assert!(verify_famous_identity(2, 1).is_err());
    }
}
