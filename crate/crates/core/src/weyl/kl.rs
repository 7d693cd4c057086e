//! Kazhdan–Lusztig polynomials `P_{y,w}(q)`.
//!
//! Columns `y -> P_{y,w}` are built bottom-up over the Bruhat ideal of `w`
//! with the standard recursion along a left descent `s` of `w`:
//!
//! `P_{x,w} = q^{1-c} P_{sx,sw} + q^c P_{x,sw}
//!            - sum_{z < sw, sz < z} mu(z,sw) q^{(l(w)-l(z))/2} P_{x,z}`
//!
//! with `c = 1` when `sx < x`. Columns of one length are independent and
//! are computed in parallel.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::{CoxeterGroup, Element};
use crate::error::{invalid, Result};
use crate::poly::QPolynomial;

pub type Column = HashMap<Element, QPolynomial>;

/// Memo table of KL columns for one group.
#[derive(Debug, Clone)]
pub struct KlTable {
    group: CoxeterGroup,
    columns: HashMap<Element, Arc<Column>>,
}

impl KlTable {
    pub fn new(group: CoxeterGroup) -> Self {
        KlTable { group, columns: HashMap::new() }
    }

    pub fn group(&self) -> &CoxeterGroup {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// `P_{y,w}`; errors unless `y <= w`.
    pub fn polynomial(&mut self, y: &Element, w: &Element) -> Result<QPolynomial> {
        let col = self.column(w)?;
        match col.get(y) {
            Some(p) => Ok(p.clone()),
            None => invalid(format!(
                "{} is not below {} in the Bruhat order",
                self.group.describe(y),
                self.group.describe(w)
            )),
        }
    }

    /// `mu(y, w)`: the coefficient of `q^{(l(w)-l(y)-1)/2}` in `P_{y,w}`.
    pub fn mu(&mut self, y: &Element, w: &Element) -> Result<i64> {
        let d = self.group.length(w) as i64 - self.group.length(y) as i64;
        if d <= 0 || d % 2 == 0 {
            return Ok(0);
        }
        let col = self.column(w)?;
        Ok(col.get(y).map_or(0, |p| p.coeff(((d - 1) / 2) as i32)))
    }

    /// The full column `y -> P_{y,w}` over the Bruhat ideal of `w`.
    pub fn column(&mut self, w: &Element) -> Result<Arc<Column>> {
        if let Some(c) = self.columns.get(w) {
            return Ok(c.clone());
        }
        self.group.check_cap(w)?;
        let g = &self.group;
        let ideal = g.ideal(w);
        let mut levels: Vec<Vec<Element>> = Vec::new();
        for x in ideal {
            let l = g.length(&x);
            if levels.len() <= l {
                levels.resize(l + 1, Vec::new());
            }
            if !self.columns.contains_key(&x) {
                levels[l].push(x);
            }
        }
        for level in levels {
            let built: Vec<(Element, Column)> =
                level.into_par_iter().map(|x| (x.clone(), self.build(&x))).collect();
            for (x, c) in built {
                self.columns.insert(x, Arc::new(c));
            }
        }
        Ok(self.columns[w].clone())
    }

    fn build(&self, w: &Element) -> Column {
        let g = &self.group;
        let lw = g.length(w) as i32;
        let Some(s) = (0..g.rank()).find(|&s| g.left_descent(w, s)) else {
            // length zero
            return Column::from([(w.clone(), QPolynomial::one())]);
        };
        let gs = g.generator(s);
        let v = g.mul(&gs, w);
        let col_v = &self.columns[&v];
        let lv = lw - 1;
        let mut corrections: Vec<(i64, i32, &Column)> = Vec::new();
        let mut zs: Vec<&Element> = col_v.keys().collect();
        zs.sort();
        for z in zs {
            let lz = g.length(z) as i32;
            let d = lv - lz;
            if d <= 0 || d % 2 == 0 || !g.left_descent(z, s) {
                continue;
            }
            let mu = col_v[z].coeff((d - 1) / 2);
            if mu != 0 {
                corrections.push((mu, (lw - lz) / 2, &self.columns[z]));
            }
        }
        let mut out = Column::new();
        for x in g.ideal(w) {
            let sx = g.mul(&gs, &x);
            let c = g.left_descent(&x, s);
            let p_sx = col_v.get(&sx).cloned().unwrap_or_default();
            let p_x = col_v.get(&x).cloned().unwrap_or_default();
            let mut p = if c { p_sx.add(&p_x.shift(1)) } else { p_sx.shift(1).add(&p_x) };
            for (mu, e, col_z) in &corrections {
                if let Some(pz) = col_z.get(&x) {
                    p = p.sub(&pz.shift(*e).scale(*mu));
                }
            }
            debug_assert!(!p.is_zero());
            out.insert(x, p);
        }
        out
    }

    /// All computed entries `(y, w, P_{y,w})`, sorted.
    pub fn entries(&self) -> Vec<(Element, Element, QPolynomial)> {
        let mut out: Vec<(Element, Element, QPolynomial)> = self
            .columns
            .iter()
            .flat_map(|(w, col)| col.iter().map(move |(y, p)| (y.clone(), w.clone(), p.clone())))
            .collect();
        out.sort_by(|a, b| (&a.1, &a.0).cmp(&(&b.1, &b.0)));
        out
    }

    /// Seeds the memo with a column read from a cache. The column must be
    /// complete (every `y <= w`) for the recursion to stay exact.
    pub fn insert_column(&mut self, w: Element, col: Column) {
        self.columns.insert(w, Arc::new(col));
    }

    pub fn columns(&self) -> impl Iterator<Item = (&Element, &Arc<Column>)> {
        self.columns.iter()
    }
}
