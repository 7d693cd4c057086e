//! Lattices in `F^n` over a finite chain ring: canonical forms, relative
//! position, Iwasawa type and window enumeration.
//!
//! A lattice is stored as `p^{-scale} span(B)` with `B` integral, upper
//! triangular, pivots `p^{a_i}` on the diagonal and `B[i][j]` (`j > i`)
//! reduced modulo `p^{a_i}`; `scale` is minimal, i.e. `B` is not divisible
//! by `p`. Writing `B = u diag(p^{a})` with `u` upper unipotent shows that
//! the lattice lies in the semi-infinite orbit of `a - scale`.

use rayon::prelude::*;
use serde::Serialize;

use crate::coweight::Coweight;
use crate::error::{invalid, precision, Result};
use crate::matrix::{self, Matrix};
use crate::ring::ChainRing;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lattice<E> {
    scale: i64,
    basis: Matrix<E>,
}

/// Canonical upper-triangular basis of the column span of `gens`
/// (`n x m`, `m >= n`), together with the pivot exponents.
pub fn hermite_form<R: ChainRing>(ring: &R, gens: &Matrix<R::Elem>) -> Result<(Matrix<R::Elem>, Vec<u32>)> {
    let n = gens.len();
    let m = gens.first().map_or(0, |r| r.len());
    if m < n {
        return invalid(format!("{m} generators cannot span a rank-{n} lattice"));
    }
    let h = ring.precision();
    let mut cols: Vec<Vec<R::Elem>> = (0..m).map(|j| (0..n).map(|i| gens[i][j]).collect()).collect();
    let mut out: Vec<Vec<R::Elem>> = vec![Vec::new(); n];
    let mut exps = vec![0u32; n];
    for i in (0..n).rev() {
        let (pos, v) = cols
            .iter()
            .enumerate()
            .map(|(k, c)| (k, ring.valuation(c[i])))
            .min_by_key(|&(k, v)| (v, k))
            .expect("columns remain");
        if v >= h {
            return precision(format!("pivot in row {i} vanishes at precision {h}"));
        }
        let mut piv = cols.swap_remove(pos);
        let uinv = ring.inv_unit(ring.div_uniformizer_pow(piv[i], v)).expect("unit");
        for x in piv.iter_mut() {
            *x = ring.mul(*x, uinv);
        }
        for c in cols.iter_mut() {
            if ring.is_zero(c[i]) {
                continue;
            }
            let f = ring.div_uniformizer_pow(c[i], v);
            for k in 0..=i {
                c[k] = ring.sub(c[k], ring.mul(f, piv[k]));
            }
        }
        exps[i] = v;
        out[i] = piv;
    }
    let total: u32 = exps.iter().sum();
    if total >= h {
        return precision(format!("determinant valuation {total} needs precision above {h}"));
    }
    for j in 0..n {
        for i in (0..j).rev() {
            let x = out[j][i];
            let r = ring.reduce_mod(x, exps[i]);
            if r == x {
                continue;
            }
            let f = ring.div_uniformizer_pow(ring.sub(x, r), exps[i]);
            let (left, right) = out.split_at_mut(j);
            let col_i = &left[i];
            let col_j = &mut right[0];
            for k in 0..=i {
                col_j[k] = ring.sub(col_j[k], ring.mul(f, col_i[k]));
            }
            col_j[i] = r;
        }
    }
    let basis = (0..n).map(|i| (0..n).map(|j| out[j][i]).collect()).collect();
    Ok((basis, exps))
}

impl<E: Copy + Eq> Lattice<E> {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// Canonical integral basis of `p^scale L`.
    pub fn basis(&self) -> &Matrix<E> {
        &self.basis
    }
}

impl<E> Lattice<E>
where
    E: Copy + Eq + Ord + std::hash::Hash + std::fmt::Debug + Send + Sync,
{
    /// `Lambda_0`.
    pub fn standard<R: ChainRing<Elem = E>>(ring: &R, n: usize) -> Self {
        Lattice { scale: 0, basis: matrix::identity(ring, n) }
    }

    /// `p^{-scale} span(gens)`.
    pub fn from_generators<R: ChainRing<Elem = E>>(ring: &R, scale: i64, gens: &Matrix<E>) -> Result<Self> {
        let (basis, _) = hermite_form(ring, gens)?;
        Ok(Lattice { scale, basis }.normalized(ring))
    }

    /// Wraps an already canonical integral basis.
    pub fn from_canonical<R: ChainRing<Elem = E>>(ring: &R, scale: i64, basis: Matrix<E>) -> Self {
        Lattice { scale, basis }.normalized(ring)
    }

    /// `p^lambda Lambda_0`.
    pub fn from_coweight<R: ChainRing<Elem = E>>(ring: &R, lambda: &Coweight) -> Result<Self> {
        let m = lambda.min_entry();
        let n = lambda.rank();
        let mut basis = matrix::identity(ring, n);
        for (i, &l) in lambda.as_slice().iter().enumerate() {
            let e = (l - m) as u32;
            if e >= ring.precision() {
                return precision(format!("p^{e} vanishes at precision {}", ring.precision()));
            }
            basis[i][i] = ring.uniformizer_pow(e);
        }
        Ok(Lattice { scale: -m, basis })
    }

    fn normalized<R: ChainRing<Elem = E>>(mut self, ring: &R) -> Self {
        let n = self.basis.len();
        while n > 0 && self.basis.iter().flatten().all(|&x| ring.valuation(x) >= 1) {
            for row in self.basis.iter_mut() {
                for x in row.iter_mut() {
                    *x = ring.div_uniformizer_pow(*x, 1);
                }
            }
            self.scale -= 1;
        }
        self
    }

    /// Pivot exponents of the canonical basis.
    pub fn pivots<R: ChainRing<Elem = E>>(&self, ring: &R) -> Vec<u32> {
        (0..self.rank()).map(|i| ring.valuation(self.basis[i][i])).collect()
    }

    /// The `lambda` with `L` in the orbit `S_lambda`.
    pub fn iwasawa_type<R: ChainRing<Elem = E>>(&self, ring: &R) -> Coweight {
        Coweight(self.pivots(ring).iter().map(|&a| a as i64 - self.scale).collect())
    }

    /// Valuation of the determinant of a basis.
    pub fn kottwitz_index<R: ChainRing<Elem = E>>(&self, ring: &R) -> i64 {
        self.pivots(ring).iter().map(|&a| a as i64).sum::<i64>() - self.scale * self.rank() as i64
    }

    /// `g L` for `g = p^{-g_scale} G`, `G` integral.
    pub fn transform<R: ChainRing<Elem = E>>(&self, ring: &R, g: &Matrix<E>, g_scale: i64) -> Result<Self> {
        let prod = matrix::mul(ring, g, &self.basis);
        Self::from_generators(ring, self.scale + g_scale, &prod)
    }

    /// `sigma(L)`.
    pub fn frobenius<R: ChainRing<Elem = E>>(&self, ring: &R) -> Result<Self> {
        Self::from_generators(ring, self.scale, &matrix::frobenius(ring, &self.basis))
    }

    pub fn contains<R: ChainRing<Elem = E>>(&self, ring: &R, other: &Self) -> Result<bool> {
        Ok(relative_position(ring, other, self)?.as_slice().iter().all(|&x| x >= 0))
    }
}

/// `inv(L1, L2)`: the dominant elementary-divisor type of `L1` relative to
/// `L2`, so `inv(p Lambda_0, Lambda_0) = (1, ..., 1)`.
pub fn relative_position<R: ChainRing>(
    ring: &R,
    l1: &Lattice<R::Elem>,
    l2: &Lattice<R::Elem>,
) -> Result<Coweight> {
    if l1.rank() != l2.rank() {
        return invalid("lattices of different rank");
    }
    let exps = raw_position(ring, &l1.basis, &l2.basis);
    let d2: u32 = l2.pivots(ring).iter().sum();
    if exps.iter().any(|&e| e >= ring.precision()) {
        return precision(format!("relative position needs precision above {}", ring.precision()));
    }
    let mut v: Vec<i64> = exps.iter().map(|&e| e as i64 - d2 as i64 + l2.scale - l1.scale).collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    Ok(Coweight(v))
}

/// Smith exponents of `adj(B2) B1` (saturating at the precision).
fn raw_position<R: ChainRing>(ring: &R, b1: &Matrix<R::Elem>, b2: &Matrix<R::Elem>) -> Vec<u32> {
    let x = matrix::mul(ring, &matrix::adjugate(ring, b2), b1);
    matrix::smith_exponents(ring, &x)
}

/// Dominant type of an integral basis relative to `Lambda_0` (descending);
/// entries equal to the precision are saturated.
pub fn smith_type<R: ChainRing>(ring: &R, b: &Matrix<R::Elem>) -> Vec<u32> {
    let mut e = matrix::smith_exponents(ring, b);
    e.sort_unstable_by(|a, b| b.cmp(a));
    e
}

/// Shape of a window enumeration: integral canonical bases `B` with
/// `p^depth Lambda_0 ⊂ span B ⊂ Lambda_0` and `v(det B) = det`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    pub n: usize,
    pub depth: u32,
    pub det: u32,
}

impl Window {
    /// Ring precision sufficient for exact enumeration and Smith forms.
    pub fn precision(&self) -> u32 {
        self.depth.max(self.det) + 1
    }

    /// All pivot vectors compatible with the window.
    pub fn pivot_vectors(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.n];
        fn rec(i: usize, left: u32, depth: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            let n = cur.len();
            if i + 1 == n {
                if left <= depth {
                    cur[i] = left;
                    out.push(cur.clone());
                }
                return;
            }
            for a in 0..=depth.min(left) {
                cur[i] = a;
                rec(i + 1, left - a, depth, cur, out);
            }
        }
        if self.n == 0 {
            if self.det == 0 {
                out.push(Vec::new());
            }
            return out;
        }
        rec(0, self.det, self.depth, &mut cur, &mut out);
        out
    }
}

/// Whether `p^depth e_j` lies in the span of the first `j+1` columns.
fn column_ok<R: ChainRing>(ring: &R, b: &Matrix<R::Elem>, a: &[u32], j: usize, depth: u32) -> bool {
    let mut v: Vec<R::Elem> = vec![ring.zero(); j + 1];
    v[j] = ring.uniformizer_pow(depth);
    for i in (0..=j).rev() {
        if ring.valuation(v[i]) < a[i] {
            return false;
        }
        let c = ring.div_uniformizer_pow(v[i], a[i]);
        if ring.is_zero(c) {
            continue;
        }
        for k in 0..i {
            v[k] = ring.sub(v[k], ring.mul(c, b[k][i]));
        }
    }
    true
}

/// A partially filled basis: the first `cols` columns are fixed.
#[derive(Debug, Clone)]
pub struct Prefix<E> {
    pub pivots: Vec<u32>,
    pub basis: Matrix<E>,
    pub cols: usize,
}

fn extend<R: ChainRing>(
    ring: &R,
    depth: u32,
    pre: &mut Prefix<R::Elem>,
    stop: usize,
    f: &mut dyn FnMut(&Prefix<R::Elem>),
) {
    if pre.cols == stop {
        f(pre);
        return;
    }
    let j = pre.cols;
    let a = pre.pivots.clone();
    let choices: u64 = (0..j).map(|i| ring.q().pow(a[i])).product();
    pre.basis[j][j] = ring.uniformizer_pow(a[j]);
    for idx in 0..choices {
        let mut rest = idx;
        for i in 0..j {
            let base = ring.q().pow(a[i]);
            pre.basis[i][j] = ring.representative(a[i], rest % base);
            rest /= base;
        }
        if column_ok(ring, &pre.basis, &a, j, depth) {
            pre.cols += 1;
            extend(ring, depth, pre, stop, f);
            pre.cols -= 1;
        }
    }
    for i in 0..=j {
        pre.basis[i][j] = ring.zero();
    }
}

/// Prefixes with all but the last column fixed, in lexicographic order;
/// these are the units of parallel work.
pub fn window_prefixes<R: ChainRing>(
    ring: &R,
    w: &Window,
    pivots: Option<&[u32]>,
) -> Vec<Prefix<R::Elem>> {
    let vectors = match pivots {
        Some(a) => {
            let ok = a.len() == w.n && a.iter().all(|&x| x <= w.depth) && a.iter().sum::<u32>() == w.det;
            if ok { vec![a.to_vec()] } else { Vec::new() }
        }
        None => w.pivot_vectors(),
    };
    let stop = w.n.saturating_sub(1);
    let mut out = Vec::new();
    for a in vectors {
        let mut pre = Prefix { pivots: a, basis: vec![vec![ring.zero(); w.n]; w.n], cols: 0 };
        extend(ring, w.depth, &mut pre, stop, &mut |p| out.push(p.clone()));
    }
    out
}

/// Visits every completion of a prefix.
pub fn for_each_completion<R: ChainRing>(
    ring: &R,
    w: &Window,
    prefix: &Prefix<R::Elem>,
    f: &mut dyn FnMut(&Matrix<R::Elem>),
) {
    let mut pre = prefix.clone();
    extend(ring, w.depth, &mut pre, w.n, &mut |p| f(&p.basis));
}

/// Visits every canonical basis in the window, sequentially and in order.
pub fn for_each_in_window<R: ChainRing>(
    ring: &R,
    w: &Window,
    pivots: Option<&[u32]>,
    f: &mut dyn FnMut(&Matrix<R::Elem>),
) {
    for pre in window_prefixes(ring, w, pivots) {
        for_each_completion(ring, w, &pre, f);
    }
}

/// Counts bases in the window satisfying `pred`, in parallel.
pub fn count_in_window<R, F>(ring: &R, w: &Window, pivots: Option<&[u32]>, pred: F) -> u64
where
    R: ChainRing,
    F: Fn(&Matrix<R::Elem>) -> bool + Sync,
{
    window_prefixes(ring, w, pivots)
        .par_iter()
        .map(|pre| {
            let mut c = 0u64;
            for_each_completion(ring, w, pre, &mut |b| {
                if pred(b) {
                    c += 1;
                }
            });
            c
        })
        .sum()
}

fn shifted(mu: &Coweight) -> (Vec<u32>, i64) {
    let m = mu.min_entry();
    (mu.as_slice().iter().map(|&x| (x - m) as u32).collect(), m)
}

/// Window for lattices at relative position `<= mu` from `Lambda_0` after
/// translating `mu` to have minimum entry 0.
pub fn window_for(mu: &Coweight) -> Window {
    let (s, _) = shifted(mu);
    Window { n: mu.rank(), depth: s.iter().copied().max().unwrap_or(0), det: s.iter().sum() }
}

fn check_precision<R: ChainRing>(ring: &R, w: &Window) -> Result<()> {
    if ring.precision() < w.precision() {
        return precision(format!("window needs precision {}, ring has {}", w.precision(), ring.precision()));
    }
    Ok(())
}

fn dominant_check(mu: &Coweight) -> Result<()> {
    if !mu.is_dominant() {
        return invalid(format!("{mu} is not dominant"));
    }
    Ok(())
}

/// `|Gr_mu(F_q)|`.
pub fn count_cell<R: ChainRing>(ring: &R, mu: &Coweight) -> Result<u64> {
    dominant_check(mu)?;
    let w = window_for(mu);
    check_precision(ring, &w)?;
    let (target, _) = shifted(mu);
    Ok(count_in_window(ring, &w, None, |b| smith_type(ring, b) == target))
}

/// `|Gr_{<=mu}(F_q)|`.
pub fn count_leq<R: ChainRing>(ring: &R, mu: &Coweight) -> Result<u64> {
    dominant_check(mu)?;
    let w = window_for(mu);
    check_precision(ring, &w)?;
    let (target, _) = shifted(mu);
    let top = Coweight(target.iter().map(|&x| x as i64).collect());
    Ok(count_in_window(ring, &w, None, |b| {
        Coweight(smith_type(ring, b).iter().map(|&x| x as i64).collect()).dominance_leq(&top)
    }))
}

fn mv_pivots(lambda: &Coweight, mu: &Coweight) -> Option<Vec<u32>> {
    if lambda.rank() != mu.rank() || lambda.size() != mu.size() {
        return None;
    }
    let m = mu.min_entry();
    let s: Vec<i64> = lambda.as_slice().iter().map(|&x| x - m).collect();
    if s.iter().any(|&x| x < 0) {
        return None;
    }
    Some(s.iter().map(|&x| x as u32).collect())
}

/// `|S_lambda ∩ Gr_mu(F_q)|`.
pub fn count_mv<R: ChainRing>(ring: &R, lambda: &Coweight, mu: &Coweight) -> Result<u64> {
    dominant_check(mu)?;
    let w = window_for(mu);
    check_precision(ring, &w)?;
    let Some(a) = mv_pivots(lambda, mu) else { return Ok(0) };
    let (target, _) = shifted(mu);
    Ok(count_in_window(ring, &w, Some(&a), |b| smith_type(ring, b) == target))
}

/// `|S_lambda ∩ Gr_{<=mu}(F_q)|`.
pub fn count_mv_leq<R: ChainRing>(ring: &R, lambda: &Coweight, mu: &Coweight) -> Result<u64> {
    dominant_check(mu)?;
    let w = window_for(mu);
    check_precision(ring, &w)?;
    let Some(a) = mv_pivots(lambda, mu) else { return Ok(0) };
    let (target, _) = shifted(mu);
    let top = Coweight(target.iter().map(|&x| x as i64).collect());
    Ok(count_in_window(ring, &w, Some(&a), |b| {
        Coweight(smith_type(ring, b).iter().map(|&x| x as i64).collect()).dominance_leq(&top)
    }))
}

/// All lattices `L` with `inv(L, Lambda_0) <= mu`, deduplicated canonical
/// forms in enumeration order.
pub fn enumerate_lattices_leq<R: ChainRing>(ring: &R, mu: &Coweight) -> Result<Vec<Lattice<R::Elem>>> {
    dominant_check(mu)?;
    let w = window_for(mu);
    check_precision(ring, &w)?;
    let (target, m) = shifted(mu);
    let top = Coweight(target.iter().map(|&x| x as i64).collect());
    let mut out = Vec::new();
    for_each_in_window(ring, &w, None, &mut |b| {
        let t = Coweight(smith_type(ring, b).iter().map(|&x| x as i64).collect());
        if t.dominance_leq(&top) {
            out.push(Lattice { scale: -m, basis: b.clone() }.normalized(ring));
        }
    });
    Ok(out)
}

/// Canonical bases of `Gr_mu` relative to `Lambda_0`, for `mu` translated to
/// minimum entry 0; the translation is returned alongside.
pub fn cell_bases<R: ChainRing>(ring: &R, mu: &Coweight) -> Result<(Vec<Matrix<R::Elem>>, i64)> {
    dominant_check(mu)?;
    let w = window_for(mu);
    check_precision(ring, &w)?;
    let (target, m) = shifted(mu);
    let mut out = Vec::new();
    for_each_in_window(ring, &w, None, &mut |b| {
        if smith_type(ring, b) == target {
            out.push(b.clone());
        }
    });
    Ok((out, m))
}

/// Precision needed to follow chains of the given steps exactly.
pub fn chain_precision(steps: &[Coweight]) -> u32 {
    let total: u32 = steps.iter().map(|mu| window_for(mu).det).sum();
    let depth: u32 = steps.iter().map(|mu| window_for(mu).depth).max().unwrap_or(0);
    total.max(depth) + 2
}

/// A chain `Lambda_0 = L_0, L_1, ..., L_m` as integral bases with scales:
/// `L_i = p^{-scale_i} span(basis_i)`.
#[derive(Debug, Clone)]
pub struct ChainStep<E> {
    pub scale: i64,
    pub basis: Matrix<E>,
}

fn walk<R: ChainRing>(
    ring: &R,
    cells: &[(Vec<Matrix<R::Elem>>, i64)],
    cur: &ChainStep<R::Elem>,
    depth: usize,
    stop: usize,
    f: &mut dyn FnMut(&[ChainStep<R::Elem>]),
    trail: &mut Vec<ChainStep<R::Elem>>,
) {
    if depth == stop {
        f(trail);
        return;
    }
    let (members, m) = &cells[depth];
    for mm in members {
        let next = ChainStep { scale: cur.scale - m, basis: matrix::mul(ring, &cur.basis, mm) };
        trail.push(next.clone());
        walk(ring, cells, &next, depth + 1, stop, f, trail);
        trail.pop();
    }
}

/// Visits every chain with `inv(L_i, L_{i-1}) = mu_i`.
pub fn for_each_chain<R: ChainRing>(
    ring: &R,
    steps: &[Coweight],
    f: &mut dyn FnMut(&[ChainStep<R::Elem>]),
) -> Result<()> {
    let cells: Vec<_> = steps.iter().map(|mu| cell_bases(ring, mu)).collect::<Result<_>>()?;
    let start = ChainStep { scale: 0, basis: matrix::identity(ring, steps.first().map_or(0, |m| m.rank())) };
    walk(ring, &cells, &start, 0, steps.len(), f, &mut Vec::new());
    Ok(())
}

/// Number of chains, counted as distinct tuples of canonical lattices.
pub fn count_chains<R: ChainRing>(ring: &R, steps: &[Coweight]) -> Result<u64> {
    if steps.is_empty() {
        return Ok(1);
    }
    if ring.precision() < chain_precision(steps) {
        return precision(format!("chains need precision {}", chain_precision(steps)));
    }
    let mut seen = std::collections::HashSet::new();
    let mut err = None;
    for_each_chain(ring, steps, &mut |trail| {
        let key: Result<Vec<Lattice<R::Elem>>> =
            trail.iter().map(|s| Lattice::from_generators(ring, s.scale, &s.basis)).collect();
        match key {
            Ok(k) => {
                seen.insert(k);
            }
            Err(e) => err = Some(e),
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(seen.len() as u64)
}

/// Whether `inv(target, L) = mu` for `L = p^{-scale} span(B)` and
/// `target = p^lambda Lambda_0`; only needs precision above the exponents of
/// a hit, larger exponents saturate and compare unequal.
fn hits_diagonal<R: ChainRing>(ring: &R, lambda: &Coweight, step: &ChainStep<R::Elem>, mu: &Coweight) -> bool {
    // inv(L, target) = Smith(p^{c - lambda} B) - scale - c
    let c = lambda.max_entry();
    let n = lambda.rank();
    let x: Matrix<R::Elem> = (0..n)
        .map(|i| {
            let d = ring.uniformizer_pow((c - lambda.as_slice()[i]) as u32);
            step.basis[i].iter().map(|&e| ring.mul(d, e)).collect()
        })
        .collect();
    let exps = matrix::smith_exponents(ring, &x);
    if exps.iter().any(|&e| e >= ring.precision()) {
        return false;
    }
    let mut inv_l_t: Vec<i64> = exps.iter().map(|&e| e as i64 - step.scale - c).collect();
    inv_l_t.sort_unstable_by(|a, b| b.cmp(a));
    // inv(target, L) = -w0 inv(L, target)
    Coweight(inv_l_t).dual() == *mu
}

/// `|m^{-1}(p^lambda) ∩ Gr_{mu.}(F_q)|`: chains whose last lattice is
/// `p^lambda Lambda_0`.
pub fn convolution_fiber_count<R: ChainRing>(ring: &R, steps: &[Coweight], lambda: &Coweight) -> Result<u64> {
    let Some((last, init)) = steps.split_last() else {
        return Ok(u64::from(lambda.as_slice().iter().all(|&x| x == 0)));
    };
    if lambda.size() != steps.iter().map(|m| m.size()).sum::<i64>() {
        return Ok(0);
    }
    let need = chain_precision(steps) + (lambda.max_entry() - lambda.min_entry()) as u32;
    if ring.precision() < need {
        return precision(format!("fiber count needs precision {need}"));
    }
    if init.is_empty() {
        let start = ChainStep { scale: 0, basis: matrix::identity(ring, lambda.rank()) };
        return Ok(u64::from(hits_diagonal(ring, lambda, &start, last)));
    }
    let cells: Vec<_> = init.iter().map(|mu| cell_bases(ring, mu)).collect::<Result<_>>()?;
    let (first, m0) = &cells[0];
    let rest = &cells[1..];
    let total = first
        .par_iter()
        .map(|b| {
            let start = ChainStep { scale: -m0, basis: b.clone() };
            let mut c = 0u64;
            let mut trail = Vec::new();
            walk(ring, rest, &start, 0, rest.len(), &mut |t| {
                let end = t.last().unwrap_or(&start);
                if hits_diagonal(ring, lambda, end, last) {
                    c += 1;
                }
            }, &mut trail);
            c
        })
        .sum();
    Ok(total)
}
