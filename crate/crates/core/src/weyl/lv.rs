//! Lusztig–Vogan polynomials on the module spanned by twisted involutions.
//!
//! For a twist `*` and `w` with `w^* = w^{-1}`, the Hecke algebra
//! (`(T_s + 1)(T_s - u^2) = 0`) acts on the basis `a_w` by
//!
//! * `T_s a_w = u a_w + (u+1) a_{sw}` if `sw = ws^* > w`,
//! * `T_s a_w = (u^2-u-1) a_w + (u^2-u) a_{sw}` if `sw = ws^* < w`,
//! * `T_s a_w = a_{sws^*}` if `sw != ws^*`, `sw > w`,
//! * `T_s a_w = (u^2-1) a_w + u^2 a_{sws^*}` if `sw != ws^*`, `sw < w`.
//!
//! The bar involution fixes `a_e` and intertwines `T_s` with `T_s^{-1}`.
//! In the basis `v^{-l(w)} a_w`, `v^2 = u`, it is unitriangular, and the
//! self-dual basis `A_w = sum_y pi_{y,w} v^{-l(y)} a_y` with
//! `pi_{y,w} in v^{-1} Z[v^{-1}]` defines
//! `P^sigma_{y,w} = v^{l(w)-l(y)} pi_{y,w}`, a polynomial in `u`.

use std::collections::{BTreeMap, HashMap};

use super::{CoxeterGroup, Element, Twist};
use crate::error::{invalid, Error, Result};
use crate::poly::{Laurent, QPolynomial};

type Vector = BTreeMap<Element, Laurent>;

fn axpy(out: &mut Vector, c: &Laurent, x: &Element) {
    if c.is_zero() {
        return;
    }
    let e = out.entry(x.clone()).or_default();
    *e = e.add(c);
    if e.is_zero() {
        out.remove(x);
    }
}

/// `u^k` as a Laurent polynomial in `v`.
fn u_pow(k: i32) -> Laurent {
    Laurent::monomial(1, 2 * k)
}

fn u_poly(coeffs: &[i64]) -> Laurent {
    Laurent::from_coeffs(coeffs.to_vec()).substitute_power(2)
}

/// LV tables for one group and twist.
#[derive(Debug, Clone)]
pub struct LvTable {
    group: CoxeterGroup,
    twist: Twist,
    /// `bar(a_w)` in the `a` basis.
    bars: HashMap<Element, Vector>,
    /// `P^sigma_{y,w}` in `u`, per `w`.
    columns: HashMap<Element, BTreeMap<Element, QPolynomial>>,
}

impl LvTable {
    pub fn new(group: CoxeterGroup, twist: Twist) -> Result<Self> {
        twist.validate(&group)?;
        Ok(LvTable { group, twist, bars: HashMap::new(), columns: HashMap::new() })
    }

    pub fn group(&self) -> &CoxeterGroup {
        &self.group
    }

    pub fn twist(&self) -> &Twist {
        &self.twist
    }

    pub fn is_twisted_involution(&self, w: &Element) -> bool {
        self.twist.is_twisted_involution(&self.group, w)
    }

    fn require(&self, w: &Element) -> Result<()> {
        if self.group.omega_component(w) != 0 {
            return invalid(format!("{} is not in the affine Weyl group", self.group.describe(w)));
        }
        if !self.is_twisted_involution(w) {
            return Err(Error::Domain(format!("{} is not a twisted involution", self.group.describe(w))));
        }
        self.group.check_cap(w)
    }

    /// `T_s a_y`.
    fn act(&self, s: usize, y: &Element, c: &Laurent, out: &mut Vector) {
        let g = &self.group;
        let gs = g.generator(s);
        let st = g.generator(self.twist.on_generator(g, s));
        let sy = g.mul(&gs, y);
        let up = !g.left_descent(y, s);
        if sy == g.mul(y, &st) {
            if up {
                axpy(out, &c.mul(&u_pow(1)), y);
                axpy(out, &c.mul(&u_poly(&[1, 1])), &sy);
            } else {
                axpy(out, &c.mul(&u_poly(&[-1, -1, 1])), y);
                axpy(out, &c.mul(&u_poly(&[0, -1, 1])), &sy);
            }
        } else {
            let z = g.mul(&sy, &st);
            if up {
                axpy(out, c, &z);
            } else {
                axpy(out, &c.mul(&u_poly(&[-1, 0, 1])), y);
                axpy(out, &c.mul(&u_pow(2)), &z);
            }
        }
    }

    /// `bar(T_s) m = u^{-2} T_s m + (u^{-2} - 1) m`.
    fn bar_t(&self, s: usize, m: &Vector) -> Vector {
        let mut t = Vector::new();
        for (y, c) in m {
            self.act(s, y, c, &mut t);
        }
        let mut out = Vector::new();
        for (y, c) in t {
            axpy(&mut out, &c.mul(&u_pow(-2)), &y);
        }
        let k = u_pow(-2).sub(&Laurent::one());
        for (y, c) in m {
            axpy(&mut out, &c.mul(&k), y);
        }
        out
    }

    fn bar_of(&mut self, w: &Element) -> Result<Vector> {
        if let Some(b) = self.bars.get(w) {
            return Ok(b.clone());
        }
        let g = self.group.clone();
        let Some(s) = (0..g.rank()).find(|&s| g.left_descent(w, s)) else {
            let b = Vector::from([(w.clone(), Laurent::one())]);
            self.bars.insert(w.clone(), b.clone());
            return Ok(b);
        };
        let gs = g.generator(s);
        let st = g.generator(self.twist.on_generator(&g, s));
        let sw = g.mul(&gs, w);
        let out = if sw == g.mul(w, &st) {
            // a_w = (T_s - u) a_{sw} / (u + 1)
            let prev = self.bar_of(&sw)?;
            let mut num = self.bar_t(s, &prev);
            for (y, c) in &prev {
                axpy(&mut num, &c.mul(&u_pow(-1)).neg(), y);
            }
            let den = u_pow(-1).add(&Laurent::one());
            let mut out = Vector::new();
            for (y, c) in num {
                let q = c.div_exact(&den).ok_or_else(|| Error::Domain("inexact division in the bar operator".into()))?;
                axpy(&mut out, &q, &y);
            }
            out
        } else {
            let prev = self.bar_of(&g.mul(&sw, &st))?;
            self.bar_t(s, &prev)
        };
        self.bars.insert(w.clone(), out.clone());
        Ok(out)
    }

    /// Normalized bar coefficients `r_{y,w}` for `v^{-l} a`.
    fn normalized_bar(&mut self, w: &Element) -> Result<Vector> {
        let g = self.group.clone();
        let lw = g.length(w) as i32;
        let b = self.bar_of(w)?;
        let mut out = Vector::new();
        for (y, c) in b {
            let ly = g.length(&y) as i32;
            out.insert(y, c.shift(lw + ly));
        }
        if out.get(w) != Some(&Laurent::one()) {
            return Err(Error::Domain(format!("bar operator is not unitriangular at {}", g.describe(w))));
        }
        Ok(out)
    }

    /// Column `y -> P^sigma_{y,w}` for twisted involutions `y <= w`.
    pub fn column(&mut self, w: &Element) -> Result<BTreeMap<Element, QPolynomial>> {
        if let Some(c) = self.columns.get(w) {
            return Ok(c.clone());
        }
        self.require(w)?;
        let g = self.group.clone();
        let lw = g.length(w) as i32;
        let mut inv: Vec<Element> = g.ideal(w).into_iter().filter(|y| self.is_twisted_involution(y)).collect();
        inv.reverse();
        let mut rbar: HashMap<Element, Vector> = HashMap::new();
        for y in &inv {
            rbar.insert(y.clone(), self.normalized_bar(y)?);
        }
        let mut pi: Vec<(Element, Laurent)> = vec![(w.clone(), Laurent::one())];
        for z in &inv[1..] {
            let mut s = Laurent::zero();
            for (y, p) in &pi {
                if let Some(r) = rbar[y].get(z) {
                    s = s.add(&p.bar().mul(r));
                }
            }
            // s = pi - bar(pi) with pi in v^{-1} Z[v^{-1}]
            let neg: Vec<(i32, i64)> = s.terms().filter(|&(e, _)| e < 0).collect();
            let mut p = Laurent::zero();
            for (e, c) in neg {
                p = p.add(&Laurent::monomial(c, e));
            }
            if s != p.sub(&p.bar()) {
                return Err(Error::Domain("bar operator is not an involution".into()));
            }
            if !p.is_zero() {
                pi.push((z.clone(), p));
            }
        }
        let mut out = BTreeMap::new();
        for (y, p) in pi {
            let full = p.shift(lw - g.length(&y) as i32);
            let in_u = full
                .halve_exponents()
                .filter(|x| x.is_polynomial())
                .ok_or_else(|| Error::Domain(format!("P^sigma = {full} is not a polynomial in u")))?;
            out.insert(y, in_u);
        }
        self.columns.insert(w.clone(), out.clone());
        Ok(out)
    }

    /// `P^sigma_{y,w}`; zero when `y` is not below `w`.
    pub fn polynomial(&mut self, y: &Element, w: &Element) -> Result<QPolynomial> {
        self.require(y)?;
        if !self.group.bruhat_leq(y, w) {
            return invalid(format!(
                "{} is not below {} in the Bruhat order",
                self.group.describe(y),
                self.group.describe(w)
            ));
        }
        Ok(self.column(w)?.get(y).cloned().unwrap_or_default())
    }
}
