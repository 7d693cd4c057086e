//! Coxeter groups: extended affine Weyl groups of `GL_n` as affine
//! permutations, and crystallographic Coxeter groups given by a Cartan
//! matrix acting on the root lattice.
//!
//! Kazhdan–Lusztig polynomials live in [`kl`], the twisted (Lusztig–Vogan)
//! polynomials in [`lv`], double cosets and the `d_mu` elements in [`affine`].

pub mod affine;
pub mod kl;
pub mod lv;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use crate::coweight::Coweight;
use crate::error::{invalid, Error, Result};
use crate::poly::QPolynomial;

/// Default length cap for groups given by a Cartan matrix.
pub const DEFAULT_LENGTH_CAP: usize = 16;

/// Group element in the normal form of its group: the window
/// `(w(1), ..., w(n))` for affine permutations, or the matrices of `w` and
/// `w^{-1}` on the root lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(pub(crate) Vec<i64>);

impl Element {
    pub fn raw(&self) -> &[i64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Model {
    AffineA { n: usize },
    Cartan { cartan: Vec<Vec<i64>> },
}

/// A Coxeter system `(W, S)` together with a concrete model of `W`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoxeterGroup {
    name: String,
    model: Model,
    coxeter: Vec<Vec<u32>>,
    cap: Option<usize>,
}

fn coxeter_from_cartan(a: &[Vec<i64>]) -> Vec<Vec<u32>> {
    let r = a.len();
    let mut m = vec![vec![1u32; r]; r];
    for i in 0..r {
        for j in 0..r {
            if i != j {
                m[i][j] = match a[i][j] * a[j][i] {
                    0 => 2,
                    1 => 3,
                    2 => 4,
                    3 => 6,
                    _ => 0,
                };
            }
        }
    }
    m
}

fn chain(r: usize) -> Vec<Vec<i64>> {
    let mut a = vec![vec![0i64; r]; r];
    for i in 0..r {
        a[i][i] = 2;
        if i + 1 < r {
            a[i][i + 1] = -1;
            a[i + 1][i] = -1;
        }
    }
    a
}

/// Cartan matrices of the finite types and a few affine ones.
fn cartan_of(name: &str) -> Option<Vec<Vec<i64>>> {
    let lower = name.to_ascii_lowercase();
    let (affine, body) = match lower.strip_prefix("affine-") {
        Some(b) => (true, b.to_string()),
        None => (false, lower.clone()),
    };
    let letter = body.chars().next()?;
    let r: usize = body[1..].parse().ok()?;
    if affine {
        return match (letter, r) {
            ('a', 1) => Some(vec![vec![2, -2], vec![-2, 2]]),
            ('a', r) if r >= 2 => {
                let mut a = chain(r + 1);
                a[0][r] = -1;
                a[r][0] = -1;
                Some(a)
            }
            ('c', 2) => Some(vec![vec![2, -1, 0], vec![-2, 2, -2], vec![0, -1, 2]]),
            ('g', 2) => Some(vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -3, 2]]),
            _ => None,
        };
    }
    let mut a = chain(r);
    match (letter, r) {
        ('a', r) if r >= 1 => {}
        ('b', r) | ('c', r) if r >= 2 => {
            a[r - 2][r - 1] = -2;
        }
        ('d', r) if r >= 4 => {
            a[r - 2][r - 1] = 0;
            a[r - 1][r - 2] = 0;
            a[r - 3][r - 1] = -1;
            a[r - 1][r - 3] = -1;
        }
        ('e', r) if (6..=8).contains(&r) => {
            // Bourbaki: 1-3-4-5-6-7-8 with 2 attached to 4
            a = vec![vec![0; r]; r];
            let edges = [(0usize, 2usize), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];
            for i in 0..r {
                a[i][i] = 2;
            }
            for &(i, j) in &edges {
                if i < r && j < r {
                    a[i][j] = -1;
                    a[j][i] = -1;
                }
            }
        }
        ('f', 4) => {
            a[1][2] = -2;
        }
        ('g', 2) => {
            a[1][0] = -3;
        }
        _ => return None,
    }
    Some(a)
}

impl CoxeterGroup {
    /// Parses `affine-aN` (extended affine Weyl group of `GL_{N+1}` as
    /// affine permutations) or a Cartan type such as `B3`, `F4`,
    /// `affine-g2`.
    pub fn from_name(name: &str) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        if let Some(rest) = lower.strip_prefix("affine-a") {
            if let Ok(r) = rest.parse::<usize>() {
                if r >= 1 {
                    return Ok(Self::affine_gl(r + 1));
                }
            }
        }
        match cartan_of(name) {
            Some(c) => Self::from_cartan(&lower, c),
            None => invalid(format!("unknown Coxeter type '{name}'")),
        }
    }

    /// The extended affine Weyl group of `GL_n`, `n >= 2`.
    pub fn affine_gl(n: usize) -> Self {
        assert!(n >= 2);
        let mut m = vec![vec![2u32; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
            if n == 2 {
                row[1 - i] = 0;
            } else {
                row[(i + 1) % n] = 3;
                row[(i + n - 1) % n] = 3;
            }
        }
        CoxeterGroup { name: format!("affine-a{}", n - 1), model: Model::AffineA { n }, coxeter: m, cap: None }
    }

    /// A crystallographic Coxeter group from a generalized Cartan matrix.
    pub fn from_cartan(name: &str, cartan: Vec<Vec<i64>>) -> Result<Self> {
        let r = cartan.len();
        if r == 0 || r > 8 || cartan.iter().any(|row| row.len() != r) {
            return invalid("Cartan matrix must be square of size 1..=8");
        }
        for i in 0..r {
            if cartan[i][i] != 2 {
                return invalid("Cartan matrix needs 2 on the diagonal");
            }
            for j in 0..r {
                if i != j && (cartan[i][j] > 0 || (cartan[i][j] == 0) != (cartan[j][i] == 0)) {
                    return invalid("not a generalized Cartan matrix");
                }
            }
        }
        let coxeter = coxeter_from_cartan(&cartan);
        Ok(CoxeterGroup { name: name.to_string(), model: Model::Cartan { cartan }, coxeter, cap: Some(DEFAULT_LENGTH_CAP) })
    }

    pub fn with_length_cap(mut self, cap: Option<usize>) -> Self {
        if matches!(self.model, Model::Cartan { .. }) {
            self.cap = cap;
        }
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of simple reflections.
    pub fn rank(&self) -> usize {
        self.coxeter.len()
    }

    pub fn coxeter_matrix(&self) -> &[Vec<u32>] {
        &self.coxeter
    }

    /// `n` for the affine permutation model.
    pub fn gl_rank(&self) -> Option<usize> {
        match self.model {
            Model::AffineA { n } => Some(n),
            Model::Cartan { .. } => None,
        }
    }

    pub fn length_cap(&self) -> Option<usize> {
        self.cap
    }

    /// Errors if `w` is longer than the length cap.
    pub fn check_cap(&self, w: &Element) -> Result<()> {
        match self.cap {
            Some(cap) if self.length(w) > cap => Err(Error::LengthCap { cap }),
            _ => Ok(()),
        }
    }

    pub fn identity(&self) -> Element {
        match &self.model {
            Model::AffineA { n } => Element((1..=*n as i64).collect()),
            Model::Cartan { cartan } => {
                let r = cartan.len();
                let mut v = vec![0i64; 2 * r * r];
                for i in 0..r {
                    v[i * r + i] = 1;
                    v[r * r + i * r + i] = 1;
                }
                Element(v)
            }
        }
    }

    pub fn generator(&self, s: usize) -> Element {
        assert!(s < self.rank());
        match &self.model {
            Model::AffineA { n } => {
                let n = *n;
                let mut v: Vec<i64> = (1..=n as i64).collect();
                if s == 0 {
                    v[0] = 0;
                    v[n - 1] = n as i64 + 1;
                } else {
                    v.swap(s - 1, s);
                }
                Element(v)
            }
            Model::Cartan { cartan } => {
                let r = cartan.len();
                let mut m = vec![0i64; r * r];
                for j in 0..r {
                    m[j * r + j] = 1;
                    m[s * r + j] -= cartan[s][j];
                }
                let mut v = m.clone();
                v.extend(m);
                Element(v)
            }
        }
    }

    /// The length-zero element `tau^k`, `tau(i) = i + 1`.
    pub fn omega(&self, k: i64) -> Result<Element> {
        match self.model {
            Model::AffineA { n } => Ok(Element((1..=n as i64).map(|i| i + k).collect())),
            Model::Cartan { .. } => {
                if k == 0 {
                    Ok(self.identity())
                } else {
                    Err(Error::Unsupported(format!("{} has no length-zero elements", self.name)))
                }
            }
        }
    }

    /// The translation `t^lambda: i -> i + n lambda_i`.
    pub fn translation(&self, lambda: &Coweight) -> Result<Element> {
        match self.model {
            Model::AffineA { n } if lambda.rank() == n => {
                Ok(Element((0..n).map(|i| i as i64 + 1 + n as i64 * lambda.0[i]).collect()))
            }
            _ => invalid(format!("{lambda} is not a coweight of {}", self.name)),
        }
    }

    /// Parses a reduced or unreduced word `s_{i1} ... s_{ik}`.
    pub fn from_word(&self, word: &[usize]) -> Result<Element> {
        let mut w = self.identity();
        for &s in word {
            if s >= self.rank() {
                return invalid(format!("generator {s} out of range for {}", self.name));
            }
            w = self.mul(&w, &self.generator(s));
        }
        Ok(w)
    }

    /// Builds an element from an affine-permutation window.
    pub fn from_window(&self, window: &[i64]) -> Result<Element> {
        let Model::AffineA { n } = self.model else {
            return invalid("windows only describe affine permutations");
        };
        if window.len() != n {
            return invalid(format!("window must have {n} entries"));
        }
        let residues: HashSet<i64> = window.iter().map(|x| x.rem_euclid(n as i64)).collect();
        if residues.len() != n {
            return invalid("window entries must be distinct mod n");
        }
        Ok(Element(window.to_vec()))
    }

    fn eval(&self, w: &Element, i: i64) -> i64 {
        let Model::AffineA { n } = self.model else { unreachable!() };
        let n = n as i64;
        let r = (i - 1).rem_euclid(n);
        let k = (i - 1).div_euclid(n);
        w.0[r as usize] + n * k
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        match &self.model {
            Model::AffineA { .. } => Element(b.0.iter().map(|&x| self.eval(a, x)).collect()),
            Model::Cartan { cartan } => {
                let r = cartan.len();
                let rr = r * r;
                let mm = |x: &[i64], y: &[i64]| -> Vec<i64> {
                    let mut out = vec![0i64; rr];
                    for i in 0..r {
                        for k in 0..r {
                            let xv = x[i * r + k];
                            if xv != 0 {
                                for j in 0..r {
                                    out[i * r + j] += xv * y[k * r + j];
                                }
                            }
                        }
                    }
                    out
                };
                let mut v = mm(&a.0[..rr], &b.0[..rr]);
                v.extend(mm(&b.0[rr..], &a.0[rr..]));
                Element(v)
            }
        }
    }

    pub fn inverse(&self, w: &Element) -> Element {
        match &self.model {
            Model::AffineA { n } => {
                let n = *n as i64;
                let mut v = vec![0i64; n as usize];
                for (r, &m) in w.0.iter().enumerate() {
                    let j = (m - 1).rem_euclid(n);
                    let k = (m - 1).div_euclid(n);
                    v[j as usize] = r as i64 + 1 - n * k;
                }
                Element(v)
            }
            Model::Cartan { cartan } => {
                let rr = cartan.len() * cartan.len();
                let mut v = w.0[rr..].to_vec();
                v.extend_from_slice(&w.0[..rr]);
                Element(v)
            }
        }
    }

    /// `ws < w`.
    pub fn right_descent(&self, w: &Element, s: usize) -> bool {
        match &self.model {
            Model::AffineA { .. } => self.eval(w, s as i64) > self.eval(w, s as i64 + 1),
            Model::Cartan { cartan } => {
                let r = cartan.len();
                (0..r).all(|i| w.0[i * r + s] <= 0)
            }
        }
    }

    /// `sw < w`.
    pub fn left_descent(&self, w: &Element, s: usize) -> bool {
        match &self.model {
            Model::AffineA { .. } => self.right_descent(&self.inverse(w), s),
            Model::Cartan { cartan } => {
                let r = cartan.len();
                let rr = r * r;
                (0..r).all(|i| w.0[rr + i * r + s] <= 0)
            }
        }
    }

    pub fn right_descents(&self, w: &Element) -> Vec<usize> {
        (0..self.rank()).filter(|&s| self.right_descent(w, s)).collect()
    }

    pub fn left_descents(&self, w: &Element) -> Vec<usize> {
        (0..self.rank()).filter(|&s| self.left_descent(w, s)).collect()
    }

    pub fn length(&self, w: &Element) -> usize {
        match &self.model {
            Model::AffineA { n } => {
                let n = *n as i64;
                let mut l = 0i64;
                for i in 0..n as usize {
                    for j in i + 1..n as usize {
                        l += (w.0[j] - w.0[i]).div_euclid(n).abs();
                    }
                }
                l as usize
            }
            Model::Cartan { .. } => {
                let mut w = w.clone();
                let mut l = 0;
                while let Some(s) = (0..self.rank()).find(|&s| self.right_descent(&w, s)) {
                    w = self.mul(&w, &self.generator(s));
                    l += 1;
                }
                l
            }
        }
    }

    /// `k` with `w in W_a tau^k`.
    pub fn omega_component(&self, w: &Element) -> i64 {
        match self.model {
            Model::AffineA { n } => {
                let n = n as i64;
                let s: i64 = w.0.iter().enumerate().map(|(i, &x)| x - i as i64 - 1).sum();
                s / n
            }
            Model::Cartan { .. } => 0,
        }
    }

    /// ShortLex normal form: the lexicographically first reduced word of
    /// the `W_a` part, and the length-zero component `k` with
    /// `w = s_{i1} ... s_{il} tau^k`.
    pub fn reduced_word(&self, w: &Element) -> (Vec<usize>, i64) {
        let k = self.omega_component(w);
        let mut x = self.mul(w, &self.omega(-k).expect("component is zero outside type A"));
        let mut word = Vec::new();
        while let Some(s) = (0..self.rank()).find(|&s| self.left_descent(&x, s)) {
            word.push(s);
            x = self.mul(&self.generator(s), &x);
        }
        (word, k)
    }

    pub fn from_normal_form(&self, word: &[usize], k: i64) -> Result<Element> {
        Ok(self.mul(&self.from_word(word)?, &self.omega(k)?))
    }

    /// Bruhat order, via `y <= w  <=>  min(y, ys) <= ws` for a right
    /// descent `s` of `w`.
    pub fn bruhat_leq(&self, y: &Element, w: &Element) -> bool {
        let k = self.omega_component(w);
        if self.omega_component(y) != k {
            return false;
        }
        let back = self.omega(-k).expect("component is zero outside type A");
        let mut y = self.mul(y, &back);
        let mut w = self.mul(w, &back);
        if self.length(&y) > self.length(&w) {
            return false;
        }
        let e = self.identity();
        loop {
            if w == e {
                return y == e;
            }
            let s = (0..self.rank()).find(|&s| self.right_descent(&w, s)).expect("nontrivial element has a descent");
            let g = self.generator(s);
            if self.right_descent(&y, s) {
                y = self.mul(&y, &g);
            }
            w = self.mul(&w, &g);
        }
    }

    /// All `y <= w`, sorted by length and then normal form.
    pub fn ideal(&self, w: &Element) -> Vec<Element> {
        let (word, k) = self.reduced_word(w);
        let mut set: BTreeSet<Element> = BTreeSet::from([self.identity()]);
        for &s in &word {
            let g = self.generator(s);
            let more: Vec<Element> = set.iter().map(|x| self.mul(x, &g)).collect();
            set.extend(more);
        }
        let om = self.omega(k).expect("component is zero outside type A");
        let mut out: Vec<Element> = set.into_iter().map(|x| self.mul(&x, &om)).collect();
        out.sort_by_cached_key(|x| (self.length(x), x.clone()));
        out
    }

    /// `sum_{v <= w} q^{l(v)}`.
    pub fn schubert_poincare(&self, w: &Element) -> Result<QPolynomial> {
        self.check_cap(w)?;
        let mut coeffs = vec![0i64; self.length(w) + 1];
        for v in self.ideal(w) {
            coeffs[self.length(&v)] += 1;
        }
        Ok(QPolynomial::from_coeffs(coeffs))
    }

    /// Longest element of the finite parabolic subgroup `W_J`.
    pub fn parabolic_longest(&self, j: &[usize]) -> Result<Element> {
        self.double_coset_longest(j, &[], &self.identity())
    }

    /// Unique longest element of `W_{J1} x W_{J2}`, found by saturation:
    /// multiply by the first generator that increases length until none
    /// does.
    pub fn double_coset_longest(&self, j1: &[usize], j2: &[usize], x: &Element) -> Result<Element> {
        if let Some(&bad) = j1.iter().chain(j2).find(|&&s| s >= self.rank()) {
            return invalid(format!("generator {bad} out of range"));
        }
        let bound = self.length(x) + self.parabolic_bound(j1)? + self.parabolic_bound(j2)?;
        let mut w = x.clone();
        let mut steps = 0;
        loop {
            if let Some(&s) = j1.iter().find(|&&s| !self.left_descent(&w, s)) {
                w = self.mul(&self.generator(s), &w);
            } else if let Some(&s) = j2.iter().find(|&&s| !self.right_descent(&w, s)) {
                w = self.mul(&w, &self.generator(s));
            } else {
                return Ok(w);
            }
            steps += 1;
            if steps > bound {
                return invalid("parabolic subgroup is infinite");
            }
        }
    }

    /// Upper bound on `l(w_J)`: rejects infinite parabolics.
    fn parabolic_bound(&self, j: &[usize]) -> Result<usize> {
        let mut seen: Vec<usize> = j.to_vec();
        seen.sort_unstable();
        seen.dedup();
        for (a, &s) in seen.iter().enumerate() {
            for &t in &seen[a + 1..] {
                if self.coxeter[s][t] == 0 {
                    return invalid("parabolic subgroup is infinite");
                }
            }
        }
        // generous: finite Coxeter groups of rank r have l(w_0) <= r^2 * 3
        Ok(3 * seen.len() * seen.len() + 1)
    }

    /// Human-readable normal form.
    pub fn describe(&self, w: &Element) -> String {
        let (word, k) = self.reduced_word(w);
        let mut parts: Vec<String> = word.iter().map(|s| format!("s{s}")).collect();
        if k != 0 {
            parts.push(format!("tau^{k}"));
        }
        if parts.is_empty() {
            "e".to_string()
        } else {
            parts.join(" ")
        }
    }

    /// Serializable view of an element.
    pub fn view(&self, w: &Element) -> ElementView {
        let (word, omega) = self.reduced_word(w);
        ElementView {
            word,
            omega,
            length: self.length(w),
            window: self.gl_rank().map(|_| w.0.clone()),
        }
    }

    /// Parses `e`, a comma separated word such as `0,1,0`, a word with a
    /// length-zero factor such as `0,1;tau=1`, or a window `[0,3]`.
    pub fn parse_element(&self, s: &str) -> Result<Element> {
        let t = s.trim();
        if t.starts_with('[') {
            let inner = t.trim_start_matches('[').trim_end_matches(']');
            let v: std::result::Result<Vec<i64>, _> = inner.split(',').map(|x| x.trim().parse::<i64>()).collect();
            return match v {
                Ok(v) => self.from_window(&v),
                Err(_) => invalid(format!("cannot parse window '{s}'")),
            };
        }
        let (word, k) = match t.split_once(';') {
            Some((w, rest)) => {
                let k = rest.trim().trim_start_matches("tau=").parse::<i64>();
                match k {
                    Ok(k) => (w, k),
                    Err(_) => return invalid(format!("cannot parse '{rest}'")),
                }
            }
            None => (t, 0),
        };
        let word = word.trim();
        let letters: Vec<usize> = if word.is_empty() || word == "e" {
            Vec::new()
        } else {
            let v: std::result::Result<Vec<usize>, _> =
                word.split(',').map(|x| x.trim().trim_start_matches('s').parse::<usize>()).collect();
            match v {
                Ok(v) => v,
                Err(_) => return invalid(format!("cannot parse word '{word}'")),
            }
        };
        self.from_normal_form(&letters, k)
    }
}

/// Element as reported in JSON output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElementView {
    pub word: Vec<usize>,
    pub omega: i64,
    pub length: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Vec<i64>>,
}

/// A diagram automorphism of `(W, S)` used to twist involutions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Twist {
    Identity,
    /// A permutation of the simple reflections.
    Diagram(Vec<usize>),
    /// `w -> tau^k w^* tau^{-k}` on affine permutations, where `*` is the
    /// diagram flip `s_i -> s_{-i}`.
    Affine { k: i64 },
}

impl Twist {
    pub fn validate(&self, g: &CoxeterGroup) -> Result<()> {
        match self {
            Twist::Identity => Ok(()),
            Twist::Affine { .. } if g.gl_rank().is_some() => Ok(()),
            Twist::Affine { .. } => invalid("affine twists need the affine permutation model"),
            Twist::Diagram(p) => {
                let r = g.rank();
                let mut seen = p.clone();
                seen.sort_unstable();
                if seen != (0..r).collect::<Vec<_>>() {
                    return invalid("twist must permute the simple reflections");
                }
                for i in 0..r {
                    for j in 0..r {
                        if g.coxeter[i][j] != g.coxeter[p[i]][p[j]] {
                            return invalid("twist does not preserve the Coxeter matrix");
                        }
                    }
                    if p[p[i]] != i {
                        return invalid("twist must be an involution");
                    }
                }
                Ok(())
            }
        }
    }

    /// Image of the simple reflection `s`.
    pub fn on_generator(&self, g: &CoxeterGroup, s: usize) -> usize {
        match self {
            Twist::Identity => s,
            Twist::Diagram(p) => p[s],
            Twist::Affine { k } => {
                let n = g.rank() as i64;
                (k - s as i64).rem_euclid(n) as usize
            }
        }
    }

    pub fn apply(&self, g: &CoxeterGroup, w: &Element) -> Element {
        match self {
            Twist::Identity => w.clone(),
            Twist::Affine { k } => {
                let n = g.gl_rank().expect("validated") as i64;
                // conjugation by c(i) = n + 1 - i
                let star = Element((1..=n).map(|i| n + 1 - g.eval(w, n + 1 - i)).collect());
                let om = g.omega(*k).expect("type A");
                g.mul(&g.mul(&om, &star), &g.omega(-*k).expect("type A"))
            }
            Twist::Diagram(_) => {
                let (word, k) = g.reduced_word(w);
                assert_eq!(k, 0, "diagram twists act on W_a");
                let image: Vec<usize> = word.iter().map(|&s| self.on_generator(g, s)).collect();
                g.from_word(&image).expect("generators in range")
            }
        }
    }

    /// `w^twist = w^{-1}`.
    pub fn is_twisted_involution(&self, g: &CoxeterGroup, w: &Element) -> bool {
        self.apply(g, w) == g.inverse(w)
    }
}

impl fmt::Display for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Twist::Identity => f.write_str("id"),
            Twist::Diagram(p) => write!(f, "{p:?}"),
            Twist::Affine { k } => write!(f, "tau^{k} * tau^-{k}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `y <= w` iff `y` is a product of a subword of a reduced word of `w`.
    fn subword_leq(g: &CoxeterGroup, y: &Element, w: &Element) -> bool {
        let (word, k) = g.reduced_word(w);
        let om = g.omega(k).unwrap();
        (0u32..1 << word.len()).any(|mask| {
            let sub: Vec<usize> = word.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &s)| s).collect();
            g.mul(&g.from_word(&sub).unwrap(), &om) == *y
        })
    }

    fn ball(g: &CoxeterGroup, len: usize) -> Vec<Element> {
        let mut all = BTreeSet::from([g.identity()]);
        let mut frontier = vec![g.identity()];
        for _ in 0..len {
            let mut next = vec![];
            for x in &frontier {
                for s in 0..g.rank() {
                    let y = g.mul(x, &g.generator(s));
                    if all.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        all.into_iter().collect()
    }

    #[test]
    fn basic_semantics() {
        for name in ["affine-a1", "affine-a2", "B3", "G2", "affine-c2"] {
            let g = CoxeterGroup::from_name(name).unwrap();
            let e = g.identity();
            assert_eq!(g.length(&e), 0);
            for s in 0..g.rank() {
                let x = g.generator(s);
                assert_eq!(g.length(&x), 1);
                assert_eq!(g.mul(&x, &x), e);
                assert!(g.bruhat_leq(&e, &x));
            }
            for w in ball(&g, 5) {
                let (word, k) = g.reduced_word(&w);
                assert_eq!(word.len(), g.length(&w));
                assert_eq!(g.from_normal_form(&word, k).unwrap(), w);
                assert_eq!(g.mul(&w, &g.inverse(&w)), e);
                for s in 0..g.rank() {
                    let ws = g.mul(&w, &g.generator(s));
                    assert_eq!(g.right_descent(&w, s), g.length(&ws) < g.length(&w));
                }
            }
        }
    }

    #[test]
    fn coxeter_orders() {
        let g = CoxeterGroup::from_name("G2").unwrap();
        assert_eq!(g.coxeter_matrix()[0][1], 6);
        assert_eq!(g.length(&g.parabolic_longest(&[0, 1]).unwrap()), 6);
        for (name, l0) in [("A3", 6), ("B3", 9), ("D4", 12), ("F4", 24), ("E6", 36)] {
            let g = CoxeterGroup::from_name(name).unwrap().with_length_cap(None);
            let all: Vec<usize> = (0..g.rank()).collect();
            assert_eq!(g.length(&g.parabolic_longest(&all).unwrap()), l0, "{name}");
        }
    }

    #[test]
    fn bruhat_matches_subwords() {
        for name in ["affine-a2", "affine-a1", "B3"] {
            let g = CoxeterGroup::from_name(name).unwrap();
            let elems = ball(&g, 6);
            for w in elems.iter().step_by(3) {
                for y in &elems {
                    assert_eq!(g.bruhat_leq(y, w), subword_leq(&g, y, w), "{name}");
                }
            }
        }
    }

    #[test]
    fn translation_lengths() {
        let g = CoxeterGroup::affine_gl(2);
        for m in 0..6 {
            let t = g.translation(&Coweight::new([m, 0])).unwrap();
            assert_eq!(g.length(&t), m as usize);
        }
        let g3 = CoxeterGroup::affine_gl(3);
        let lambda = Coweight::new([2, -1, 0]);
        let expected: i64 = [(0, 1), (0, 2), (1, 2)].iter().map(|&(i, j)| (lambda.0[i] - lambda.0[j]).abs()).sum();
        assert_eq!(g3.length(&g3.translation(&lambda).unwrap()) as i64, expected);
        assert_eq!(g3.omega_component(&g3.translation(&lambda).unwrap()), 1);
    }

    #[test]
    fn schubert_poincare_counts_interval() {
        let g = CoxeterGroup::affine_gl(3);
        assert_eq!(g.schubert_poincare(&g.identity()).unwrap(), QPolynomial::one());
        assert_eq!(g.schubert_poincare(&g.generator(1)).unwrap(), QPolynomial::from_coeffs(vec![1, 1]));
        let elems = ball(&g, 5);
        let w = g.from_word(&[0, 1, 2, 1, 0]).unwrap();
        let mut coeffs = vec![0i64; 6];
        for y in &elems {
            if subword_leq(&g, y, &w) {
                coeffs[g.length(y)] += 1;
            }
        }
        assert_eq!(g.schubert_poincare(&w).unwrap(), QPolynomial::from_coeffs(coeffs));
    }

    #[test]
    fn length_cap_enforced() {
        let g = CoxeterGroup::from_name("affine-g2").unwrap();
        let long = g.from_word(&[0, 1, 2].repeat(6)).unwrap();
        assert!(g.length(&long) > DEFAULT_LENGTH_CAP);
        assert_eq!(g.schubert_poincare(&long), Err(Error::LengthCap { cap: DEFAULT_LENGTH_CAP }));
    }

    #[test]
    fn parse_elements() {
        let g = CoxeterGroup::affine_gl(2);
        assert_eq!(g.parse_element("e").unwrap(), g.identity());
        assert_eq!(g.parse_element("[0,3]").unwrap(), g.generator(0));
        assert_eq!(g.parse_element("0;tau=1").unwrap(), g.mul(&g.generator(0), &g.omega(1).unwrap()));
        assert!(g.parse_element("[1,3]").is_err());
    }
}
