//! Double-coset longest elements `d_mu` in the extended affine Weyl group
//! of `GL_n` and the comparison `P^sigma_{d_lambda,d_mu}(q) = P_{d_lambda,d_mu}(-q)`.
//!
//! `J = {1, ..., n-1}` spans the finite Weyl group. For dominant `mu`,
//! `omega = tau^{|mu|}` is the length-zero element with `t^mu in W_a omega`,
//! the twist is `w -> omega w^* omega^{-1}`, and `d_mu` is the longest
//! element of `W_J (t^mu omega^{-1}) W_J^twist`.

use std::collections::HashMap;

use serde::Serialize;

use super::kl::KlTable;
use super::lv::LvTable;
use super::{CoxeterGroup, Element, ElementView, Twist};
use crate::coweight::Coweight;
use crate::error::{invalid, Result};
use crate::poly::QPolynomial;

/// Index set `J` of the finite Weyl group inside the affine one.
pub const FINITE_NODES_START: usize = 1;

pub fn finite_nodes(n: usize) -> Vec<usize> {
    (FINITE_NODES_START..n).collect()
}

/// `(d_mu, omega)` together with the twist they define.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleCoset {
    pub d: Element,
    pub omega: Element,
    pub twist: Twist,
}

pub fn d_of_coweight(g: &CoxeterGroup, mu: &Coweight) -> Result<DoubleCoset> {
    let Some(n) = g.gl_rank() else {
        return invalid("d_mu needs the affine permutation model");
    };
    if mu.rank() != n || !mu.is_dominant() {
        return invalid(format!("{mu} is not a dominant coweight of GL_{n}"));
    }
    let k = mu.size();
    let omega = g.omega(k)?;
    let twist = Twist::Affine { k };
    let x = g.mul(&g.translation(mu)?, &g.omega(-k)?);
    let j = finite_nodes(n);
    let j2: Vec<usize> = j.iter().map(|&s| twist.on_generator(g, s)).collect();
    let d = g.double_coset_longest(&j, &j2, &x)?;
    Ok(DoubleCoset { d, omega, twist })
}

/// One `(lambda, mu)` comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinusQRecord {
    pub lambda: Coweight,
    pub mu: Coweight,
    pub d_lambda: ElementView,
    pub d_mu: ElementView,
    pub kl: Vec<i64>,
    pub lv: Vec<i64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinusQReport {
    #[serde(rename = "type")]
    pub type_name: String,
    pub len_cap: usize,
    pub pairs: usize,
    pub failures: usize,
    /// Pairs of twisted involutions where `P^sigma` and `P` differ mod 2.
    pub congruence_failures: usize,
    pub records: Vec<MinusQRecord>,
}

/// Dominant coweights with last entry zero whose `d_mu` has length at most
/// `len_cap`.
pub fn coweights_within(g: &CoxeterGroup, len_cap: usize) -> Result<Vec<Coweight>> {
    let Some(n) = g.gl_rank() else {
        return invalid("needs the affine permutation model");
    };
    let mut out = Vec::new();
    let mut cur = vec![0i64; n];
    fn rec(i: usize, cap: i64, cur: &mut Vec<i64>, out: &mut Vec<Coweight>) {
        let n = cur.len();
        if i + 1 == n {
            out.push(Coweight(cur.clone()));
            return;
        }
        let hi = if i == 0 { cap } else { cur[i - 1] };
        for v in 0..=hi {
            cur[i] = v;
            rec(i + 1, cap, cur, out);
        }
    }
    rec(0, len_cap as i64, &mut cur, &mut out);
    let mut kept = Vec::new();
    for mu in out {
        if g.length(&d_of_coweight(g, &mu)?.d) <= len_cap {
            kept.push(mu);
        }
    }
    Ok(kept)
}

/// Checks `P^sigma_{d_lambda,d_mu}(q) = P_{d_lambda,d_mu}(-q)` for all
/// dominant `lambda <= mu` with `l(d_mu) <= len_cap`, and the mod 2
/// congruence on every pair of twisted involutions below each `d_mu`.
pub fn verify_minus_q(g: &CoxeterGroup, len_cap: usize) -> Result<MinusQReport> {
    let mut kl = KlTable::new(g.clone());
    let mut lvs: HashMap<i64, LvTable> = HashMap::new();
    let mut records = Vec::new();
    let mut congruence_failures = 0;
    let n = g.gl_rank().expect("checked by coweights_within");
    for mu in coweights_within(g, len_cap)? {
        let dm = d_of_coweight(g, &mu)?;
        let key = mu.size().rem_euclid(n as i64);
        if !lvs.contains_key(&key) {
            lvs.insert(key, LvTable::new(g.clone(), dm.twist.clone())?);
        }
        let lv = lvs.get_mut(&key).expect("inserted");
        let kl_col = kl.column(&dm.d)?;
        let lv_col = lv.column(&dm.d)?;
        for (y, p) in &lv_col {
            if !same_mod_two(p, &kl_col[y]) {
                congruence_failures += 1;
            }
        }
        for lambda in mu.dominant_below() {
            let dl = d_of_coweight(g, &lambda)?;
            let p = kl_col.get(&dl.d).cloned().unwrap_or_default();
            let ps = lv_col.get(&dl.d).cloned().unwrap_or_default();
            let pass = !p.is_zero() && ps == p.negate_variable();
            records.push(MinusQRecord {
                lambda,
                mu: mu.clone(),
                d_lambda: g.view(&dl.d),
                d_mu: g.view(&dm.d),
                kl: p.to_coeffs(),
                lv: ps.to_coeffs(),
                pass,
            });
        }
    }
    let failures = records.iter().filter(|r| !r.pass).count();
    Ok(MinusQReport {
        type_name: g.name().to_string(),
        len_cap,
        pairs: records.len(),
        failures,
        congruence_failures,
        records,
    })
}

fn same_mod_two(a: &QPolynomial, b: &QPolynomial) -> bool {
    a.sub(b).to_coeffs().iter().all(|c| c % 2 == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// Longest element of `W_J x W_J'` by enumerating the whole coset.
    fn coset_max(g: &CoxeterGroup, j1: &[usize], j2: &[usize], x: &Element) -> (usize, Vec<Element>) {
        let close = |gens: &[usize]| {
            let mut set = BTreeSet::from([g.identity()]);
            let mut frontier = vec![g.identity()];
            while let Some(y) = frontier.pop() {
                for &s in gens {
                    let z = g.mul(&y, &g.generator(s));
                    if set.insert(z.clone()) {
                        frontier.push(z);
                    }
                }
            }
            set
        };
        let (a, b) = (close(j1), close(j2));
        let coset: BTreeSet<Element> = a.iter().flat_map(|u| b.iter().map(move |v| (u, v))).map(|(u, v)| g.mul(&g.mul(u, x), v)).collect();
        let top = coset.iter().map(|w| g.length(w)).max().unwrap();
        (top, coset.into_iter().filter(|w| g.length(w) == top).collect())
    }

    #[test]
    fn d_mu_is_coset_maximum_and_twisted_involution() {
        for n in [2usize, 3] {
            let g = CoxeterGroup::affine_gl(n);
            let w0_len = n * (n - 1) / 2;
            for mu in coweights_within(&g, 9).unwrap() {
                let dm = d_of_coweight(&g, &mu).unwrap();
                let j = finite_nodes(n);
                let j2: Vec<usize> = j.iter().map(|&s| dm.twist.on_generator(&g, s)).collect();
                let x = g.mul(&g.translation(&mu).unwrap(), &g.omega(-mu.size()).unwrap());
                let (top, maxima) = coset_max(&g, &j, &j2, &x);
                assert_eq!(maxima, vec![dm.d.clone()], "{mu}");
                assert_eq!(top, w0_len + mu.pairing_2rho() as usize);
                assert!(dm.twist.is_twisted_involution(&g, &dm.d), "{mu}");
                assert_eq!(g.omega_component(&dm.d), 0);
            }
            let zero = d_of_coweight(&g, &Coweight::zero(n)).unwrap();
            assert_eq!(zero.d, g.parabolic_longest(&finite_nodes(n)).unwrap());
            assert_eq!(zero.omega, g.identity());
        }
        let g = CoxeterGroup::affine_gl(2);
        let dm = d_of_coweight(&g, &Coweight::new([1, 0])).unwrap();
        assert_ne!(dm.omega, g.identity());
        assert_eq!(g.length(&dm.d), 2);
    }

    #[test]
    fn minus_q_small() {
        let g = CoxeterGroup::affine_gl(2);
        let r = verify_minus_q(&g, 7).unwrap();
        assert!(r.pairs > 0);
        assert_eq!(r.failures, 0, "{:#?}", r.records.iter().filter(|x| !x.pass).collect::<Vec<_>>());
        assert_eq!(r.congruence_failures, 0);
    }
}
