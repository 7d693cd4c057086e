//! Finite chain rings: the coefficient rings `O/p^h` that lattices live over.
//!
//! Two realizations share one interface: the mixed-characteristic ring
//! `W_h(F_q)` ([`GaloisRing`]) and the equal-characteristic ring
//! `F_q[t]/t^h` ([`TruncatedSeries`]).

use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::galois::GaloisRing;
use crate::series::TruncatedSeries;

/// A finite chain ring with residue field `F_q`, uniformizer `ϖ` and
/// nilpotency index `h` (so `ϖ^h = 0`).
pub trait ChainRing: Clone + Send + Sync + Debug {
    type Elem: Copy + Eq + Ord + Hash + Debug + Send + Sync;

    fn p(&self) -> u32;
    fn residue_degree(&self) -> u32;
    fn q(&self) -> u64 {
        (self.p() as u64).pow(self.residue_degree())
    }
    /// `h`, the length of the ring.
    fn precision(&self) -> u32;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;

    /// Valuation; `precision()` for zero.
    fn valuation(&self, a: Self::Elem) -> u32;
    fn is_zero(&self, a: Self::Elem) -> bool {
        self.valuation(a) >= self.precision()
    }
    /// Inverse of a unit; `None` if `a` is not a unit.
    fn inv_unit(&self, a: Self::Elem) -> Option<Self::Elem>;
    /// `ϖ^k` (zero once `k >= h`).
    fn uniformizer_pow(&self, k: u32) -> Self::Elem;
    /// Exact quotient `a / ϖ^k` for `v(a) >= k`. The result is only
    /// meaningful modulo `ϖ^{h-k}`; the canonical lift with zero top digits is
    /// returned.
    fn div_uniformizer_pow(&self, a: Self::Elem, k: u32) -> Self::Elem;
    /// Canonical representative of `a mod ϖ^k`.
    fn reduce_mod(&self, a: Self::Elem, k: u32) -> Self::Elem;
    /// The `index`-th canonical representative of `O/ϖ^k`,
    /// `0 <= index < q^k`.
    fn representative(&self, k: u32, index: u64) -> Self::Elem;

    /// Image of a residue field element (field code) under the multiplicative
    /// section.
    fn teichmuller(&self, code: u32) -> Self::Elem;
    /// Residue field code of `a mod ϖ`.
    fn residue(&self, a: Self::Elem) -> u32;
    /// The ring automorphism lifting `x -> x^p` on the residue field.
    fn frobenius(&self, a: Self::Elem) -> Self::Elem;
    fn frobenius_inv(&self, a: Self::Elem) -> Self::Elem;

    /// Digits `d_i` with `a = sum ϖ^i [d_i]`.
    fn digits(&self, a: Self::Elem) -> Vec<u32> {
        let h = self.precision();
        let mut out = Vec::with_capacity(h as usize);
        let mut cur = a;
        for i in 0..h {
            let d = self.residue(cur);
            out.push(d);
            let rest = self.sub(cur, self.teichmuller(d));
            if i + 1 < h {
                cur = self.div_uniformizer_pow(rest, 1);
            }
        }
        out
    }

    fn from_digits(&self, digits: &[u32]) -> Self::Elem {
        let mut acc = self.zero();
        for (i, &d) in digits.iter().enumerate().take(self.precision() as usize) {
            let term = self.mul(self.uniformizer_pow(i as u32), self.teichmuller(d));
            acc = self.add(acc, term);
        }
        acc
    }

    fn pow(&self, a: Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

/// Which characteristic the coefficient ring has.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingKind {
    /// `W_h(F_q)`, uniformizer `p`.
    Mixed,
    /// `F_q[t]/t^h`, uniformizer `t`.
    Equal,
}

impl std::str::FromStr for RingKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mixed" | "witt" => Ok(RingKind::Mixed),
            "equal" | "laurent" => Ok(RingKind::Equal),
            _ => invalid(format!("unknown ring kind '{s}'")),
        }
    }
}

impl std::fmt::Display for RingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RingKind::Mixed => "mixed",
            RingKind::Equal => "equal",
        })
    }
}

/// A coefficient ring of either kind.
#[derive(Debug, Clone)]
pub enum CoefficientRing {
    Mixed(GaloisRing),
    Equal(TruncatedSeries),
}

impl CoefficientRing {
    pub fn new(kind: RingKind, p: u32, r: u32, h: u32) -> Result<Self> {
        Ok(match kind {
            RingKind::Mixed => CoefficientRing::Mixed(GaloisRing::new(p, r, h)?),
            RingKind::Equal => CoefficientRing::Equal(TruncatedSeries::new(p, r, h)?),
        })
    }

    pub fn with_order(kind: RingKind, q: u64, h: u32) -> Result<Self> {
        let Some((p, r)) = crate::field::prime_power(q) else {
            return invalid(format!("{q} is not a prime power"));
        };
        Self::new(kind, p, r, h)
    }

    pub fn kind(&self) -> RingKind {
        match self {
            CoefficientRing::Mixed(_) => RingKind::Mixed,
            CoefficientRing::Equal(_) => RingKind::Equal,
        }
    }

    pub fn q(&self) -> u64 {
        match self {
            CoefficientRing::Mixed(r) => r.q(),
            CoefficientRing::Equal(r) => r.q(),
        }
    }

    pub fn precision(&self) -> u32 {
        match self {
            CoefficientRing::Mixed(r) => r.precision(),
            CoefficientRing::Equal(r) => r.precision(),
        }
    }
}

/// Runs `$body` with `$r` bound to the concrete ring inside a
/// [`CoefficientRing`].
#[macro_export]
macro_rules! with_ring {
    ($ring:expr, $r:ident => $body:expr) => {
        match $ring {
            $crate::ring::CoefficientRing::Mixed($r) => $body,
            $crate::ring::CoefficientRing::Equal($r) => $body,
        }
    };
}
