//! Integer Laurent polynomials and exact interpolation.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// `sum_i coeffs[i] x^(low + i)` with integer coefficients.
///
/// Used for polynomials in `q`, Laurent polynomials in `v = q^{-1/2}` and
/// expressions in a formal square root `u` of `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Laurent {
    low: i32,
    coeffs: Vec<i64>,
}

/// Polynomials in `q` are Laurent polynomials with no negative powers.
pub type QPolynomial = Laurent;

impl Default for Laurent {
    fn default() -> Self {
        Laurent::zero()
    }
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent { low: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn monomial(c: i64, e: i32) -> Self {
        Laurent { low: e, coeffs: vec![c] }.trimmed()
    }

    /// From ascending coefficients starting at `x^0`.
    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        Laurent { low: 0, coeffs }.trimmed()
    }

    pub fn from_low(low: i32, coeffs: Vec<i64>) -> Self {
        Laurent { low, coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|&&c| c == 0).count();
        if lead == self.coeffs.len() {
            return Laurent { low: 0, coeffs: Vec::new() };
        }
        self.coeffs.drain(..lead);
        self.low += lead as i32;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with nonzero coefficient (0 for the zero polynomial).
    pub fn low_degree(&self) -> i32 {
        self.low
    }

    /// Highest exponent; `None` for zero.
    pub fn degree(&self) -> Option<i32> {
        if self.is_zero() {
            None
        } else {
            Some(self.low + self.coeffs.len() as i32 - 1)
        }
    }

    pub fn coeff(&self, e: i32) -> i64 {
        let i = e - self.low;
        if i < 0 {
            return 0;
        }
        self.coeffs.get(i as usize).copied().unwrap_or(0)
    }

    pub fn leading_coeff(&self) -> i64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    /// `(exponent, coefficient)` pairs with nonzero coefficient.
    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, &c)| (self.low + i as i32, c))
    }

    /// Ascending coefficients from `x^0`; panics on negative powers.
    pub fn to_coeffs(&self) -> Vec<i64> {
        assert!(self.is_zero() || self.low >= 0, "negative powers in {self}");
        let mut out = vec![0; self.low.max(0) as usize];
        out.extend_from_slice(&self.coeffs);
        if self.is_zero() {
            out.clear();
        }
        out
    }

    pub fn is_polynomial(&self) -> bool {
        self.is_zero() || self.low >= 0
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let low = self.low.min(other.low);
        let high = self.degree().unwrap().max(other.degree().unwrap());
        let coeffs = (low..=high).map(|e| self.coeff(e) + other.coeff(e)).collect();
        Laurent { low, coeffs }.trimmed()
    }

    pub fn neg(&self) -> Self {
        Laurent { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: i64) -> Self {
        Laurent { low: self.low, coeffs: self.coeffs.iter().map(|x| x * c).collect() }.trimmed()
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: i32) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Laurent { low: self.low + k, coeffs: self.coeffs.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Laurent::zero();
        }
        let mut coeffs = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Laurent { low: self.low + other.low, coeffs }.trimmed()
    }

    /// Exact quotient; `None` if `other` does not divide `self`.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Laurent::zero());
        }
        let lead = other.leading_coeff();
        let dtop = other.degree().unwrap();
        let mut rem = self.clone();
        let mut quot = Laurent::zero();
        let floor = self.low - other.low;
        while !rem.is_zero() {
            let rtop = rem.degree().unwrap();
            let e = rtop - dtop;
            if e < floor {
                return None;
            }
            let c = rem.leading_coeff();
            if c % lead != 0 {
                return None;
            }
            let term = Laurent::monomial(c / lead, e);
            rem = rem.sub(&term.mul(other));
            quot = quot.add(&term);
        }
        Some(quot)
    }

    /// `x -> x^{-1}`.
    pub fn bar(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Laurent { low: -self.degree().unwrap(), coeffs }
    }

    /// `x -> -x`.
    pub fn negate_variable(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| if (self.low + i as i32).rem_euclid(2) == 1 { -c } else { c })
            .collect();
        Laurent { low: self.low, coeffs }
    }

    /// `x -> x^k`.
    pub fn substitute_power(&self, k: i32) -> Self {
        assert!(k > 0);
        let mut out = Laurent::zero();
        for (e, c) in self.terms() {
            out = out.add(&Laurent::monomial(c, e * k));
        }
        out
    }

    /// `x^2 -> y` when only even powers appear.
    pub fn halve_exponents(&self) -> Option<Self> {
        let mut out = Laurent::zero();
        for (e, c) in self.terms() {
            if e % 2 != 0 {
                return None;
            }
            out = out.add(&Laurent::monomial(c, e / 2));
        }
        Some(out)
    }

    /// Value at an integer point (nonnegative powers only).
    pub fn eval(&self, x: i128) -> i128 {
        assert!(self.is_polynomial(), "cannot evaluate {self} at an integer");
        let mut acc = 0i128;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c as i128;
        }
        acc * x.pow(self.low.max(0) as u32)
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.terms().collect::<Vec<_>>().into_iter().rev() {
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match e {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    if e == 1 {
                        f.write_str("x")?;
                    } else {
                        write!(f, "x^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Polynomial through a set of points, with certification by surplus points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fit {
    /// Ascending rational coefficients of the interpolant.
    pub coeffs: Vec<Ratio<i128>>,
    /// Whether at least one point beyond those needed confirms the fit.
    pub certified: bool,
}

impl Fit {
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn leading(&self) -> Ratio<i128> {
        self.degree().map_or(Ratio::zero(), |d| self.coeffs[d])
    }

    /// Integer polynomial if all coefficients are integral.
    pub fn to_integer(&self) -> Option<QPolynomial> {
        if self.coeffs.iter().any(|c| !c.is_integer()) {
            return None;
        }
        Some(Laurent::from_coeffs(self.coeffs.iter().map(|c| c.to_integer() as i64).collect()))
    }
}

/// Newton interpolation through `(x_i, y_i)` with distinct `x_i`.
pub fn interpolate(points: &[(i64, i128)]) -> Fit {
    let n = points.len();
    let xs: Vec<Ratio<i128>> = points.iter().map(|&(x, _)| Ratio::from_integer(x as i128)).collect();
    let mut dd: Vec<Ratio<i128>> = points.iter().map(|&(_, y)| Ratio::from_integer(y)).collect();
    for k in 1..n {
        for i in (k..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - k]);
        }
    }
    // expand the Newton form
    let mut coeffs = vec![Ratio::<i128>::zero(); n.max(1)];
    let mut basis = vec![Ratio::<i128>::one()];
    for k in 0..n {
        for (i, b) in basis.iter().enumerate() {
            coeffs[i] += dd[k] * b;
        }
        let mut next = vec![Ratio::<i128>::zero(); basis.len() + 1];
        for (i, b) in basis.iter().enumerate() {
            next[i + 1] += b;
            next[i] -= xs[k] * b;
        }
        basis = next;
    }
    let mut fit = Fit { coeffs, certified: false };
    let deg = fit.degree().unwrap_or(0);
    fit.certified = n >= deg + 2;
    fit
}

/// Prime powers used as sample points for point counts.
pub const Q_GRID: &[u64] = &[2, 3, 4, 5, 7, 8, 9, 11, 13, 16];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_division() {
        let a = Laurent::from_coeffs(vec![1, 1]); // 1 + x
        let b = Laurent::from_low(-1, vec![2, 0, -3]);
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!(Laurent::from_coeffs(vec![1, 0, 1]).div_exact(&a), None);
        assert_eq!(b.bar().bar(), b);
        assert_eq!(Laurent::from_coeffs(vec![1, 2, 3]).negate_variable(), Laurent::from_coeffs(vec![1, -2, 3]));
        assert_eq!(format!("{}", Laurent::from_low(-1, vec![-1, 0, 2])), "2x - x^-1");
    }

    #[test]
    fn interpolation_recovers_cubic() {
        let p = |q: i128| q * q * q - 2 * q + 5;
        let pts: Vec<(i64, i128)> = [2, 3, 4, 5, 7].iter().map(|&q| (q, p(q as i128))).collect();
        let fit = interpolate(&pts);
        assert!(fit.certified);
        assert_eq!(fit.to_integer(), Some(Laurent::from_coeffs(vec![5, -2, 0, 1])));
        let short = interpolate(&pts[..4]);
        assert!(!short.certified);
    }
}
