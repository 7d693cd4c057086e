//! Coweights of `GL_n`: integer vectors with dominance order and the
//! pairings with `rho` and `2 rho`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coweight(pub Vec<i64>);

impl Coweight {
    pub fn new(v: impl Into<Vec<i64>>) -> Self {
        Coweight(v.into())
    }

    pub fn zero(n: usize) -> Self {
        Coweight(vec![0; n])
    }

    /// `omega_i = (1, ..., 1, 0, ..., 0)` with `i` ones.
    pub fn fundamental(n: usize, i: usize) -> Self {
        Coweight((0..n).map(|k| (k < i) as i64).collect())
    }

    /// `omega_1^* = (0, ..., 0, -1)`.
    pub fn fundamental_dual(n: usize) -> Self {
        Coweight((0..n).map(|k| -((k + 1 == n) as i64)).collect())
    }

    /// The quasi-minuscule coweight `(1, 0, ..., 0, -1)`.
    pub fn quasi_minuscule(n: usize) -> Self {
        Coweight((0..n).map(|k| (k == 0) as i64 - (k + 1 == n) as i64).collect())
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn is_dominant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }

    /// The dominant representative of the Weyl orbit.
    pub fn dominant(&self) -> Coweight {
        let mut v = self.0.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        Coweight(v)
    }

    /// Kottwitz index: the sum of the entries.
    pub fn size(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Coweight) -> Coweight {
        Coweight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Coweight) -> Coweight {
        Coweight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Coweight {
        Coweight(self.0.iter().map(|a| -a).collect())
    }

    /// `lambda^* = -w_0 lambda`.
    pub fn dual(&self) -> Coweight {
        Coweight(self.0.iter().rev().map(|a| -a).collect())
    }

    /// `w_0 lambda`.
    pub fn reversed(&self) -> Coweight {
        Coweight(self.0.iter().rev().copied().collect())
    }

    /// Adds `c (1, ..., 1)`.
    pub fn shift(&self, c: i64) -> Coweight {
        Coweight(self.0.iter().map(|a| a + c).collect())
    }

    pub fn min_entry(&self) -> i64 {
        self.0.iter().copied().min().unwrap_or(0)
    }

    pub fn max_entry(&self) -> i64 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// `<2 rho, lambda> = sum_i (n - 1 - 2i) lambda_i`.
    pub fn pairing_2rho(&self) -> i64 {
        let n = self.0.len() as i64;
        self.0.iter().enumerate().map(|(i, &a)| (n - 1 - 2 * i as i64) * a).sum()
    }

    /// `<rho, lambda>` if integral.
    pub fn pairing_rho(&self) -> Option<i64> {
        let t = self.pairing_2rho();
        (t % 2 == 0).then_some(t / 2)
    }

    /// `(-1)^{<2 rho, lambda>}`.
    pub fn parity(&self) -> i64 {
        if self.pairing_2rho().rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// `self <= other` in dominance order: `other - self` is a nonnegative
    /// combination of positive coroots.
    pub fn dominance_leq(&self, other: &Coweight) -> bool {
        if self.rank() != other.rank() || self.size() != other.size() {
            return false;
        }
        let mut a = 0;
        let mut b = 0;
        for (x, y) in self.0.iter().zip(&other.0) {
            a += x;
            b += y;
            if a > b {
                return false;
            }
        }
        true
    }

    /// All dominant coweights `nu <= self` (self dominant).
    pub fn dominant_below(&self) -> Vec<Coweight> {
        assert!(self.is_dominant());
        let n = self.rank();
        let mut out = Vec::new();
        let mut cur = vec![0i64; n];
        fn rec(i: usize, cur: &mut Vec<i64>, top: &Coweight, out: &mut Vec<Coweight>) {
            let n = cur.len();
            if i == n {
                let c = Coweight(cur.clone());
                if c.dominance_leq(top) {
                    out.push(c);
                }
                return;
            }
            let hi = if i == 0 { top.0[0] } else { cur[i - 1] };
            let lo = top.0[n - 1];
            let mut v = hi;
            while v >= lo {
                cur[i] = v;
                rec(i + 1, cur, top, out);
                v -= 1;
            }
        }
        rec(0, &mut cur, self, &mut out);
        out
    }

    /// All weights in the convex hull of `W self` congruent to it (the
    /// support of `V_self`), dominant or not.
    pub fn weights_below(&self) -> Vec<Coweight> {
        let mut out: Vec<Coweight> = self
            .dominant_below()
            .iter()
            .flat_map(|d| d.orbit())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// The Weyl orbit (distinct permutations).
    pub fn orbit(&self) -> Vec<Coweight> {
        let mut v = self.0.clone();
        v.sort();
        let mut out = vec![Coweight(v.clone())];
        while next_permutation(&mut v) {
            out.push(Coweight(v.clone()));
        }
        out
    }
}

pub(crate) fn next_permutation(v: &mut [i64]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl fmt::Display for Coweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl FromStr for Coweight {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        if t.is_empty() {
            return Ok(Coweight(Vec::new()));
        }
        let parsed: std::result::Result<Vec<i64>, _> =
            t.split(',').map(|x| x.trim().parse::<i64>()).collect();
        match parsed {
            Ok(v) => Ok(Coweight(v)),
            Err(_) => invalid(format!("cannot parse coweight '{s}'")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        let a: Coweight = "1,1".parse().unwrap();
        let b = Coweight::new([2, 0]);
        assert!(a.dominance_leq(&b));
        assert!(!b.dominance_leq(&a));
        assert_eq!(Coweight::new([1, 0]).parity(), -1);
        assert_eq!(Coweight::new([2, 1, 0]).pairing_2rho(), 4);
        assert_eq!(Coweight::new([2, 0]).dominant_below(), vec![Coweight::new([2, 0]), Coweight::new([1, 1])]);
        assert_eq!(Coweight::new([1, 0, -1]).weights_below().len(), 7);
        assert_eq!(Coweight::fundamental_dual(3), Coweight::new([0, 0, -1]));
        assert_eq!(Coweight::new([3, 1, 0]).dual(), Coweight::new([0, -1, -3]));
    }
}
