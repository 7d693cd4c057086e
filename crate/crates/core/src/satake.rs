//! Satake-side combinatorics for `GL_n`: weight and tensor multiplicities,
//! the Satake transform assembled from lattice counts, the Lusztig–Kato
//! expansion and its inverse (Kostka–Foulkes), and the sign of the
//! commutativity constraint.
//!
//! Half powers of `q` are tracked in a formal unit `u` with `u^2 = q`.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::counts::CountQuery;
use crate::coweight::Coweight;
use crate::error::{invalid, Error, Result};
use crate::poly::Laurent;
use crate::ring::RingKind;

/// `GL_n` root datum: roots `e_i - e_j`, `2 rho = (n-1, n-3, ..., 1-n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RootDatum {
    pub n: usize,
}

impl RootDatum {
    pub fn gl(n: usize) -> Self {
        RootDatum { n }
    }

    pub fn two_rho(&self) -> Vec<i64> {
        let n = self.n as i64;
        (0..n).map(|i| n - 1 - 2 * i).collect()
    }

    pub fn positive_roots(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|i| (i + 1..self.n).map(move |j| (i, j))).collect()
    }

    pub fn w0(&self, lambda: &Coweight) -> Coweight {
        lambda.reversed()
    }
}

pub fn dominance_leq(lambda: &Coweight, mu: &Coweight) -> bool {
    lambda.dominance_leq(mu)
}

pub fn pairing_2rho(mu: &Coweight) -> i64 {
    mu.pairing_2rho()
}

pub fn parity(mu: &Coweight) -> i64 {
    mu.parity()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Weight multiplicities of `V_mu` by Freudenthal's recursion.
#[derive(Debug, Clone)]
pub struct Character {
    mu: Coweight,
    memo: HashMap<Coweight, i64>,
}

impl Character {
    pub fn new(mu: &Coweight) -> Result<Self> {
        if !mu.is_dominant() {
            return invalid(format!("{mu} is not dominant"));
        }
        Ok(Character { mu: mu.clone(), memo: HashMap::new() })
    }

    pub fn highest_weight(&self) -> &Coweight {
        &self.mu
    }

    /// `dim V_mu(lambda)`.
    pub fn multiplicity(&mut self, lambda: &Coweight) -> i64 {
        let dom = lambda.dominant();
        if !dom.dominance_leq(&self.mu) {
            return 0;
        }
        if dom == self.mu {
            return 1;
        }
        if let Some(&m) = self.memo.get(&dom) {
            return m;
        }
        let n = self.mu.rank();
        let two_rho = RootDatum::gl(n).two_rho();
        let mu = self.mu.as_slice();
        let l = dom.as_slice();
        // 2 * ((mu+rho)^2 - (lambda+rho)^2), kept integral
        let denom = 2 * (dot(mu, mu) - dot(l, l)) + 2 * dot(&self.mu.sub(&dom).0, &two_rho);
        let mut num = 0i64;
        for (i, j) in RootDatum::gl(n).positive_roots() {
            let mut k = 1i64;
            loop {
                let mut v = l.to_vec();
                v[i] += k;
                v[j] -= k;
                let w = Coweight(v);
                if !w.dominant().dominance_leq(&self.mu) {
                    break;
                }
                let m = self.multiplicity(&w);
                num += m * (w.0[i] - w.0[j]);
                k += 1;
            }
        }
        let m = 4 * num / denom;
        debug_assert_eq!(4 * num % denom, 0);
        self.memo.insert(dom, m);
        m
    }

    /// All weights with their multiplicities.
    pub fn weights(&mut self) -> BTreeMap<Coweight, i64> {
        let mut out = BTreeMap::new();
        for w in self.mu.weights_below() {
            let m = self.multiplicity(&w);
            if m != 0 {
                out.insert(w, m);
            }
        }
        out
    }
}

pub fn weight_multiplicity(mu: &Coweight, lambda: &Coweight) -> Result<i64> {
    Ok(Character::new(mu)?.multiplicity(lambda))
}

/// Decomposition of a tensor product into irreducibles.
pub fn tensor_decomposition(factors: &[Coweight]) -> Result<BTreeMap<Coweight, i64>> {
    let Some(first) = factors.first() else {
        return invalid("empty tensor product");
    };
    if let Some(bad) = factors.iter().find(|m| !m.is_dominant() || m.rank() != first.rank()) {
        return invalid(format!("{bad} is not a dominant coweight of the right rank"));
    }
    let n = first.rank();
    let two_rho = RootDatum::gl(n).two_rho();
    let mut cur = BTreeMap::from([(first.clone(), 1i64)]);
    for nu in &factors[1..] {
        let weights = Character::new(nu)?.weights();
        let mut next: BTreeMap<Coweight, i64> = BTreeMap::new();
        for (lam, &c) in &cur {
            for (beta, &m) in &weights {
                // Brauer–Klimyk: reflect lam + beta + rho into the dominant chamber
                let doubled: Vec<i64> =
                    lam.0.iter().zip(&beta.0).zip(&two_rho).map(|((a, b), r)| 2 * (a + b) + r).collect();
                let mut sorted = doubled.clone();
                let sign = sort_sign(&mut sorted);
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
                let dom: Vec<i64> = sorted.iter().zip(&two_rho).map(|(x, r)| (x - r) / 2).collect();
                *next.entry(Coweight(dom)).or_insert(0) += sign * c * m;
            }
        }
        next.retain(|_, v| *v != 0);
        cur = next;
    }
    if cur.values().any(|&v| v < 0) {
        return Err(Error::Domain("negative tensor multiplicity".into()));
    }
    Ok(cur)
}

/// Sorts descending, returning the sign of the permutation used.
fn sort_sign(v: &mut [i64]) -> i64 {
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] < v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    sign
}

pub fn tensor_multiplicity(factors: &[Coweight], lambda: &Coweight) -> Result<i64> {
    Ok(tensor_decomposition(factors)?.get(lambda).copied().unwrap_or(0))
}

/// Finite sum `sum_lambda c_lambda(u) e^lambda` with `u^2 = q`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CharacterExpansion {
    pub terms: BTreeMap<Coweight, Laurent>,
}

impl CharacterExpansion {
    pub fn get(&self, lambda: &Coweight) -> Laurent {
        self.terms.get(lambda).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, lambda: Coweight, c: Laurent) {
        let e = self.terms.entry(lambda.clone()).or_default();
        *e = e.add(&c);
        if e.is_zero() {
            self.terms.remove(&lambda);
        }
    }

    /// Invariance under permutations of the weights.
    pub fn is_weyl_invariant(&self) -> bool {
        self.terms.iter().all(|(l, c)| l.orbit().iter().all(|w| self.get(w) == *c))
    }
}

/// `Sat(1_{K p^mu K})(p^lambda) = q^{-(rho, lambda)} |S_lambda ∩ Gr_mu(F_q)|`
/// as polynomials in `u`.
pub fn satake_transform(mu: &Coweight, kind: RingKind) -> Result<CharacterExpansion> {
    if !mu.is_dominant() {
        return invalid(format!("{mu} is not dominant"));
    }
    let mut out = CharacterExpansion::default();
    for lambda in mu.weights_below() {
        let count = CountQuery::Mv { lambda: lambda.clone(), mu: mu.clone() }.polynomial(kind)?;
        if count.is_zero() {
            continue;
        }
        let in_u = count.substitute_power(2).shift(-lambda.pairing_2rho() as i32);
        out.add_term(lambda, in_u);
    }
    Ok(out)
}

/// Polynomials `P_{mu nu}(v)`, `v = q^{-1}`, with
/// `q^{-(rho,mu)} Sat(1_mu) = sum_nu P_{mu nu}(v) ch V_nu`.
pub fn lusztig_kato_expand(mu: &Coweight, kind: RingKind) -> Result<BTreeMap<Coweight, Laurent>> {
    let sat = satake_transform(mu, kind)?;
    let mut rest = CharacterExpansion::default();
    for (l, c) in sat.terms {
        rest.add_term(l, c.shift(-mu.pairing_2rho() as i32));
    }
    let mut out = BTreeMap::new();
    // dominant weights from the top down
    let mut doms = mu.dominant_below();
    doms.sort_by_key(|d| std::cmp::Reverse(d.pairing_2rho()));
    for nu in doms {
        let c = rest.get(&nu);
        if c.is_zero() {
            continue;
        }
        for (w, m) in Character::new(&nu)?.weights() {
            rest.add_term(w, c.scale(-m));
        }
        out.insert(nu, u_to_v(&c)?);
    }
    if !rest.terms.is_empty() {
        return Err(Error::Domain("Satake transform is not a combination of characters".into()));
    }
    Ok(out)
}

/// Rewrites a Laurent polynomial in `u` with only even nonpositive powers
/// as a polynomial in `v = u^{-2}`.
fn u_to_v(c: &Laurent) -> Result<Laurent> {
    c.bar()
        .halve_exponents()
        .filter(|p| p.is_polynomial())
        .ok_or_else(|| Error::Domain(format!("coefficient {c} is not a polynomial in q^-1")))
}

/// Unitriangular matrix over `Z[v]` indexed by dominant coweights.
pub type TriangularMatrix = BTreeMap<(Coweight, Coweight), Laurent>;

/// Lusztig–Kato matrix on all dominant `nu <= mu`.
pub fn lusztig_kato_matrix(mu: &Coweight, kind: RingKind) -> Result<(Vec<Coweight>, TriangularMatrix)> {
    let doms = mu.dominant_below();
    let mut m = TriangularMatrix::new();
    for a in &doms {
        for (b, c) in lusztig_kato_expand(a, kind)? {
            m.insert((a.clone(), b), c);
        }
    }
    Ok((doms, m))
}

/// Inverse of a unitriangular matrix (rows expand in terms of columns).
pub fn invert_unitriangular(index: &[Coweight], m: &TriangularMatrix) -> Result<TriangularMatrix> {
    // order so that lower weights come later
    let mut order: Vec<Coweight> = index.to_vec();
    order.sort_by_key(|d| std::cmp::Reverse(d.pairing_2rho()));
    let mut inv = TriangularMatrix::new();
    for (i, a) in order.iter().enumerate() {
        if m.get(&(a.clone(), a.clone())) != Some(&Laurent::one()) {
            return Err(Error::Domain(format!("diagonal entry at {a} is not 1")));
        }
        inv.insert((a.clone(), a.clone()), Laurent::one());
        for b in &order[i + 1..] {
            // sum_c inv[a][c] m[c][b] = 0 for a != b
            let mut s = Laurent::zero();
            for c in &order[i..] {
                if c == b {
                    break;
                }
                if let (Some(x), Some(y)) = (inv.get(&(a.clone(), c.clone())), m.get(&(c.clone(), b.clone()))) {
                    s = s.add(&x.mul(y));
                }
            }
            if !s.is_zero() {
                inv.insert((a.clone(), b.clone()), s.neg());
            }
        }
    }
    Ok(inv)
}

/// `K_{mu lambda}(t)` as the inverse of the Lusztig–Kato matrix, `t = q^{-1}`.
pub fn kostka_foulkes(mu: &Coweight, lambda: &Coweight, kind: RingKind) -> Result<Laurent> {
    let (index, lk) = lusztig_kato_matrix(mu, kind)?;
    let k = invert_unitriangular(&index, &lk)?;
    let c = k.get(&(mu.clone(), lambda.clone())).cloned().unwrap_or_default();
    if !c.has_nonnegative_coeffs() {
        return Err(Error::Domain(format!("K_{mu},{lambda} = {c} has a negative coefficient")));
    }
    Ok(c)
}

/// `K_{mu lambda}(t)` from the charge statistic: the sum of `t^{charge(T)}`
/// over semistandard tableaux of shape `mu` and content `lambda`. Independent
/// of any lattice count.
pub fn kostka_foulkes_charge(mu: &Coweight, lambda: &Coweight) -> Result<Laurent> {
    if mu.rank() != lambda.rank() {
        return invalid("rank mismatch");
    }
    if !mu.is_dominant() || !lambda.is_dominant() {
        return invalid("both coweights must be dominant");
    }
    let low = mu.min_entry().min(lambda.min_entry());
    let shape: Vec<usize> = mu.0.iter().map(|&x| (x - low) as usize).collect();
    let content: Vec<usize> = lambda.0.iter().map(|&x| (x - low) as usize).collect();
    if shape.iter().sum::<usize>() != content.iter().sum::<usize>() {
        return Ok(Laurent::zero());
    }
    let mut tab: Vec<Vec<usize>> = shape.iter().map(|&l| vec![0; l]).collect();
    let mut total = Laurent::zero();
    fill_tableaux(&shape, &mut content.clone(), &mut tab, 0, 0, &mut |t| {
        total = total.add(&Laurent::monomial(1, charge(&reading_word(t)) as i32));
    });
    Ok(total)
}

/// Outcome of comparing the Lusztig–Kato matrix with the charge
/// Kostka–Foulkes matrix on all dominant coweights below `top`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LkReport {
    pub top: Coweight,
    pub index: Vec<Coweight>,
    /// Nonzero entries `(mu, nu, P_{mu nu})`.
    pub entries: Vec<(Coweight, Coweight, Vec<i64>)>,
    /// Diagonal not 1, an off-diagonal constant term, or `nu` not below `mu`.
    pub triangularity_failures: usize,
    /// Entries of `P K - 1` that are nonzero.
    pub inverse_failures: usize,
    pub pass: bool,
}

/// Unitriangularity of the Lusztig–Kato expansion and `P K = 1` with `K`
/// from [`kostka_foulkes_charge`].
pub fn lk_charge_check(top: &Coweight, kind: RingKind) -> Result<LkReport> {
    let (index, lk) = lusztig_kato_matrix(top, kind)?;
    let mut triangularity_failures = 0;
    for a in &index {
        if lk.get(&(a.clone(), a.clone())) != Some(&Laurent::one()) {
            triangularity_failures += 1;
        }
    }
    for ((a, b), c) in &lk {
        if a != b && (c.coeff(0) != 0 || !b.dominance_leq(a)) {
            triangularity_failures += 1;
        }
    }
    let mut kf = HashMap::new();
    for b in &index {
        for c in &index {
            kf.insert((b.clone(), c.clone()), kostka_foulkes_charge(b, c)?);
        }
    }
    let mut inverse_failures = 0;
    for a in &index {
        for c in &index {
            let mut s = Laurent::zero();
            for b in &index {
                if let Some(p) = lk.get(&(a.clone(), b.clone())) {
                    s = s.add(&p.mul(&kf[&(b.clone(), c.clone())]));
                }
            }
            let want = if a == c { Laurent::one() } else { Laurent::zero() };
            inverse_failures += usize::from(s != want);
        }
    }
    let entries = lk.iter().map(|((a, b), c)| (a.clone(), b.clone(), c.to_coeffs())).collect();
    Ok(LkReport {
        top: top.clone(),
        index,
        entries,
        triangularity_failures,
        inverse_failures,
        pass: triangularity_failures == 0 && inverse_failures == 0,
    })
}

/// One pair of the KL comparison: `K_{mu lambda}(q)` from charge next to
/// `P_{d_lambda, d_mu}(q)` in the affine Weyl group of `GL_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KlKostkaRecord {
    pub mu: Coweight,
    pub lambda: Coweight,
    pub kostka_foulkes: Vec<i64>,
    pub kl: Vec<i64>,
    /// `s` with `P = q^s K`, when one exists.
    pub shift: Option<i32>,
    /// Whether `P(q) = q^{(rho, mu - lambda)} K(q^{-1})`.
    pub reversed: bool,
}

/// Exploratory comparison of Kostka–Foulkes and affine KL polynomials
/// at double-coset longest elements. Nothing here is asserted; the report
/// lists the shifts that make the two agree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KlKostkaReport {
    pub top: Coweight,
    pub records: Vec<KlKostkaRecord>,
    /// Distinct shifts seen, `None` for pairs with no monomial relation.
    pub shifts: Vec<Option<i32>>,
    /// Pairs where the reversed form does not hold.
    pub reversed_mismatches: usize,
}

pub fn kl_kostka_report(top: &Coweight) -> Result<KlKostkaReport> {
    use crate::weyl::{affine, kl::KlTable, CoxeterGroup};
    let g = CoxeterGroup::affine_gl(top.rank()).with_length_cap(None);
    let mut table = KlTable::new(g.clone());
    let mut records = Vec::new();
    for mu in top.dominant_below() {
        let dm = affine::d_of_coweight(&g, &mu)?;
        let col = table.column(&dm.d)?;
        for lambda in mu.dominant_below() {
            let kf = kostka_foulkes_charge(&mu, &lambda)?;
            let dl = affine::d_of_coweight(&g, &lambda)?;
            let p = col.get(&dl.d).cloned().unwrap_or_default();
            let shift = (!kf.is_zero() && !p.is_zero())
                .then(|| p.low_degree() - kf.low_degree())
                .filter(|&s| kf.shift(s) == p);
            let e = mu.sub(&lambda).pairing_rho().expect("same component") as i32;
            let reversed = kf.bar().shift(e) == p;
            records.push(KlKostkaRecord { mu: mu.clone(), lambda, kostka_foulkes: kf.to_coeffs(), kl: p.to_coeffs(), shift, reversed });
        }
    }
    let mut shifts: Vec<Option<i32>> = records.iter().map(|r| r.shift).collect();
    shifts.sort();
    shifts.dedup();
    let reversed_mismatches = records.iter().filter(|r| !r.reversed).count();
    Ok(KlKostkaReport { top: top.clone(), records, shifts, reversed_mismatches })
}

fn fill_tableaux(
    shape: &[usize],
    content: &mut [usize],
    tab: &mut [Vec<usize>],
    r: usize,
    c: usize,
    visit: &mut dyn FnMut(&[Vec<usize>]),
) {
    if r == shape.len() {
        visit(tab);
        return;
    }
    if c == shape[r] {
        return fill_tableaux(shape, content, tab, r + 1, 0, visit);
    }
    for v in 0..content.len() {
        if content[v] == 0 || (c > 0 && tab[r][c - 1] > v) || (r > 0 && tab[r - 1][c] >= v) {
            continue;
        }
        content[v] -= 1;
        tab[r][c] = v;
        fill_tableaux(shape, content, tab, r, c + 1, visit);
        content[v] += 1;
    }
}

/// Rows from the bottom up, each left to right.
fn reading_word(tab: &[Vec<usize>]) -> Vec<usize> {
    tab.iter().rev().flat_map(|row| row.iter().copied()).collect()
}

/// Lascoux–Schützenberger charge of a word with partition content.
fn charge(word: &[usize]) -> usize {
    let mut left: Vec<Option<usize>> = word.iter().map(|&x| Some(x)).collect();
    let mut total = 0;
    while left.iter().any(Option::is_some) {
        // standard subword: scan leftwards for 0, 1, 2, ..., wrapping around
        let mut pos = left.len();
        let mut index = 0;
        for letter in 0.. {
            let before = (0..pos).rev().find(|&i| left[i] == Some(letter));
            let i = match before {
                Some(i) => i,
                None => match (pos..left.len()).rev().find(|&i| left[i] == Some(letter)) {
                    Some(i) => {
                        index += 1;
                        i
                    }
                    None => break,
                },
            };
            total += index;
            left[i] = None;
            pos = i;
        }
    }
    total
}

/// Result of fitting a count against the expected degree and leading term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeadingReport {
    pub lambda: Coweight,
    pub mu: Coweight,
    pub polynomial: Vec<i64>,
    pub expected_degree: i64,
    pub degree: Option<i32>,
    pub expected_leading: i64,
    pub leading: i64,
    pub pass: bool,
}

/// `|S_lambda ∩ Gr_{<=mu}|` has degree `(rho, lambda + mu)` and leading
/// coefficient `dim V_mu(lambda)`.
pub fn mv_leading_check(lambda: &Coweight, mu: &Coweight, kind: RingKind) -> Result<LeadingReport> {
    let Some(deg) = lambda.add(mu).pairing_rho() else {
        return invalid(format!("{lambda} and {mu} lie in different components"));
    };
    let p = CountQuery::MvLeq { lambda: lambda.clone(), mu: mu.clone() }.polynomial(kind)?;
    let mult = weight_multiplicity(mu, lambda)?;
    let degree = p.degree();
    let leading = p.leading_coeff();
    Ok(LeadingReport {
        lambda: lambda.clone(),
        mu: mu.clone(),
        polynomial: p.to_coeffs(),
        expected_degree: deg,
        degree,
        expected_leading: mult,
        leading,
        pass: degree == Some(deg as i32) && leading == mult,
    })
}

/// `(-1)^{(rho, mu + nu - lambda) + (2rho, mu)(2rho, nu)}`.
pub fn commutativity_sign(mu: &Coweight, nu: &Coweight, lambda: &Coweight) -> Result<i64> {
    let Some(e) = mu.add(nu).sub(lambda).pairing_rho() else {
        return invalid("lambda is not in the component of mu + nu");
    };
    let exp = e + mu.pairing_2rho() * nu.pairing_2rho();
    Ok(if exp.rem_euclid(2) == 0 { 1 } else { -1 })
}

/// Per-`lambda` outcome of the semismallness check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub lambda: Coweight,
    pub polynomial: Vec<i64>,
    pub bound: i64,
    pub degree: Option<i32>,
    pub coefficient_at_bound: i64,
    pub tensor_multiplicity: i64,
    pub pass: bool,
}

/// Degree bound `(rho, |mu.| - lambda)` for convolution fibers, with the
/// coefficient at the bound equal to the tensor multiplicity.
pub fn semismall_report(steps: &[Coweight], kind: RingKind) -> Result<Vec<FiberReport>> {
    let Some(first) = steps.first() else {
        return invalid("empty sequence");
    };
    let total = steps.iter().skip(1).fold(first.clone(), |a, b| a.add(b));
    let dominant_steps: Vec<Coweight> = steps.iter().map(|s| s.dominant()).collect();
    let tensor = tensor_decomposition(&dominant_steps)?;
    let mut out = Vec::new();
    for lambda in total.dominant().dominant_below() {
        let bound = total.sub(&lambda).pairing_rho().expect("same component");
        let p = CountQuery::Fiber { steps: steps.to_vec(), lambda: lambda.clone() }.polynomial(kind)?;
        let mult = tensor.get(&lambda).copied().unwrap_or(0);
        let degree = p.degree();
        let coefficient_at_bound = p.coeff(bound as i32);
        let pass = degree.is_none_or(|d| d as i64 <= bound) && coefficient_at_bound == mult;
        out.push(FiberReport {
            lambda,
            polynomial: p.to_coeffs(),
            bound,
            degree,
            coefficient_at_bound,
            tensor_multiplicity: mult,
            pass,
        });
    }
    Ok(out)
}
