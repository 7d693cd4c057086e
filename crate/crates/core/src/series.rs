//! The equal-characteristic ring `F_q[t]/t^h`.

use crate::error::{invalid, Result};
use crate::field::FiniteField;
use crate::ring::ChainRing;

/// Largest supported truncation length.
pub const MAX_LENGTH: usize = 16;

/// Truncated power series, coefficient `i` is the field code of `t^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Series(pub [u32; MAX_LENGTH]);

#[derive(Debug, Clone)]
pub struct TruncatedSeries {
    field: FiniteField,
    h: u32,
}

impl TruncatedSeries {
    pub fn new(p: u32, r: u32, h: u32) -> Result<Self> {
        if h == 0 || h as usize > MAX_LENGTH {
            return invalid(format!("series length must be in 1..={MAX_LENGTH}, got {h}"));
        }
        Ok(TruncatedSeries { field: FiniteField::new(p, r)?, h })
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    fn map(&self, a: Series, f: impl Fn(u32) -> u32) -> Series {
        let mut out = [0u32; MAX_LENGTH];
        for i in 0..self.h as usize {
            out[i] = f(a.0[i]);
        }
        Series(out)
    }
}

impl ChainRing for TruncatedSeries {
    type Elem = Series;

    fn p(&self) -> u32 {
        self.field.p()
    }
    fn residue_degree(&self) -> u32 {
        self.field.r()
    }
    fn precision(&self) -> u32 {
        self.h
    }
    fn zero(&self) -> Series {
        Series([0; MAX_LENGTH])
    }
    fn one(&self) -> Series {
        let mut c = [0; MAX_LENGTH];
        c[0] = 1;
        Series(c)
    }
    fn from_int(&self, n: i64) -> Series {
        let mut c = [0; MAX_LENGTH];
        c[0] = self.field.from_int(n);
        Series(c)
    }
    fn add(&self, a: Series, b: Series) -> Series {
        let mut out = [0u32; MAX_LENGTH];
        for i in 0..self.h as usize {
            out[i] = self.field.add(a.0[i], b.0[i]);
        }
        Series(out)
    }
    fn sub(&self, a: Series, b: Series) -> Series {
        let mut out = [0u32; MAX_LENGTH];
        for i in 0..self.h as usize {
            out[i] = self.field.sub(a.0[i], b.0[i]);
        }
        Series(out)
    }
    fn neg(&self, a: Series) -> Series {
        self.map(a, |c| self.field.neg(c))
    }
    fn mul(&self, a: Series, b: Series) -> Series {
        let h = self.h as usize;
        let mut out = [0u32; MAX_LENGTH];
        for i in 0..h {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..h - i {
                if b.0[j] != 0 {
                    out[i + j] = self.field.add(out[i + j], self.field.mul(a.0[i], b.0[j]));
                }
            }
        }
        Series(out)
    }
    fn valuation(&self, a: Series) -> u32 {
        a.0[..self.h as usize].iter().position(|&c| c != 0).map_or(self.h, |i| i as u32)
    }
    fn inv_unit(&self, a: Series) -> Option<Series> {
        let a0inv = self.field.inv(a.0[0])?;
        let h = self.h as usize;
        let mut out = [0u32; MAX_LENGTH];
        out[0] = a0inv;
        for k in 1..h {
            let mut s = 0;
            for i in 1..=k {
                s = self.field.add(s, self.field.mul(a.0[i], out[k - i]));
            }
            out[k] = self.field.neg(self.field.mul(s, a0inv));
        }
        Some(Series(out))
    }
    fn uniformizer_pow(&self, k: u32) -> Series {
        let mut c = [0; MAX_LENGTH];
        if k < self.h {
            c[k as usize] = 1;
        }
        Series(c)
    }
    fn div_uniformizer_pow(&self, a: Series, k: u32) -> Series {
        let h = self.h as usize;
        let k = (k as usize).min(h);
        debug_assert!(a.0[..k].iter().all(|&c| c == 0), "not divisible by t^{k}");
        let mut out = [0u32; MAX_LENGTH];
        out[..h - k].copy_from_slice(&a.0[k..h]);
        Series(out)
    }
    fn reduce_mod(&self, a: Series, k: u32) -> Series {
        let mut out = a;
        for c in out.0.iter_mut().skip(k as usize) {
            *c = 0;
        }
        out
    }
    fn representative(&self, k: u32, index: u64) -> Series {
        let q = self.field.q() as u64;
        let mut idx = index;
        let mut out = [0u32; MAX_LENGTH];
        for c in out.iter_mut().take((k as usize).min(self.h as usize)) {
            *c = (idx % q) as u32;
            idx /= q;
        }
        Series(out)
    }
    fn teichmuller(&self, code: u32) -> Series {
        let mut c = [0; MAX_LENGTH];
        c[0] = code;
        Series(c)
    }
    fn residue(&self, a: Series) -> u32 {
        a.0[0]
    }
    fn frobenius(&self, a: Series) -> Series {
        self.map(a, |c| self.field.frobenius(c))
    }
    fn frobenius_inv(&self, a: Series) -> Series {
        self.map(a, |c| self.field.frobenius_inv(c))
    }
    fn digits(&self, a: Series) -> Vec<u32> {
        a.0[..self.h as usize].to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_inverse() {
        let ring = TruncatedSeries::new(3, 1, 6).unwrap();
        let one_minus_t = ring.sub(ring.one(), ring.uniformizer_pow(1));
        let inv = ring.inv_unit(one_minus_t).unwrap();
        assert!(inv.0[..6].iter().all(|&c| c == 1));
    }

    #[test]
    fn length_limits() {
        assert!(TruncatedSeries::new(2, 1, 17).is_err());
        assert!(TruncatedSeries::new(2, 1, 0).is_err());
    }
}
