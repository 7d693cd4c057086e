//! Dense matrices over a [`ChainRing`]: division-free determinant and
//! characteristic polynomial, adjugate, and Smith exponents.

use crate::ring::ChainRing;

pub type Matrix<E> = Vec<Vec<E>>;

pub fn identity<R: ChainRing>(ring: &R, n: usize) -> Matrix<R::Elem> {
    (0..n).map(|i| (0..n).map(|j| if i == j { ring.one() } else { ring.zero() }).collect()).collect()
}

pub fn mul<R: ChainRing>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![ring.zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            let x = a[i][l];
            if ring.is_zero(x) {
                continue;
            }
            for j in 0..m {
                out[i][j] = ring.add(out[i][j], ring.mul(x, b[l][j]));
            }
        }
    }
    out
}

pub fn scale<R: ChainRing>(ring: &R, c: R::Elem, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    a.iter().map(|row| row.iter().map(|&x| ring.mul(c, x)).collect()).collect()
}

pub fn map<R: ChainRing>(a: &Matrix<R::Elem>, f: impl Fn(R::Elem) -> R::Elem) -> Matrix<R::Elem> {
    a.iter().map(|row| row.iter().map(|&x| f(x)).collect()).collect()
}

/// Entrywise Frobenius.
pub fn frobenius<R: ChainRing>(ring: &R, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    map::<R>(a, |x| ring.frobenius(x))
}

pub fn frobenius_inv<R: ChainRing>(ring: &R, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    map::<R>(a, |x| ring.frobenius_inv(x))
}

/// Coefficients `c_0..c_n` of `det(x I - A) = sum c_k x^k` (Berkowitz).
pub fn charpoly<R: ChainRing>(ring: &R, a: &Matrix<R::Elem>) -> Vec<R::Elem> {
    let n = a.len();
    // descending coefficients, leading 1
    let mut poly = vec![ring.one()];
    for k in 0..n {
        // leading (k+1)x(k+1) block: [[A_k, c], [r, a_kk]]
        let akk = a[k][k];
        let col: Vec<R::Elem> = (0..k).map(|i| a[i][k]).collect();
        let row: Vec<R::Elem> = (0..k).map(|j| a[k][j]).collect();
        // Toeplitz column: 1, -a_kk, -r c, -r A c, -r A^2 c, ...
        let mut t = vec![ring.one(), ring.neg(akk)];
        let mut v = col.clone();
        for _ in 0..k {
            let rv = row.iter().zip(&v).fold(ring.zero(), |s, (&x, &y)| ring.add(s, ring.mul(x, y)));
            t.push(ring.neg(rv));
            let next: Vec<R::Elem> = (0..k)
                .map(|i| (0..k).fold(ring.zero(), |s, j| ring.add(s, ring.mul(a[i][j], v[j]))))
                .collect();
            v = next;
        }
        let mut next = vec![ring.zero(); poly.len() + 1];
        for (i, &ti) in t.iter().enumerate() {
            for (j, &pj) in poly.iter().enumerate() {
                if i + j < next.len() {
                    next[i + j] = ring.add(next[i + j], ring.mul(ti, pj));
                }
            }
        }
        poly = next;
    }
    poly.reverse();
    poly
}

pub fn det<R: ChainRing>(ring: &R, a: &Matrix<R::Elem>) -> R::Elem {
    let n = a.len();
    match n {
        0 => ring.one(),
        1 => a[0][0],
        2 => ring.sub(ring.mul(a[0][0], a[1][1]), ring.mul(a[0][1], a[1][0])),
        _ => {
            let c0 = charpoly(ring, a)[0];
            if n % 2 == 0 {
                c0
            } else {
                ring.neg(c0)
            }
        }
    }
}

/// Adjugate, so that `A adj(A) = det(A) I`.
pub fn adjugate<R: ChainRing>(ring: &R, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let n = a.len();
    if n == 1 {
        return vec![vec![ring.one()]];
    }
    if n == 2 {
        return vec![
            vec![a[1][1], ring.neg(a[0][1])],
            vec![ring.neg(a[1][0]), a[0][0]],
        ];
    }
    // adj(A) = (-1)^{n-1} (A^{n-1} + c_{n-1} A^{n-2} + ... + c_1 I)
    // evaluated by Horner's rule
    let c = charpoly(ring, a);
    let mut acc = a.clone();
    for k in (1..n).rev() {
        if k < n - 1 {
            acc = mul(ring, &acc, a);
        }
        for i in 0..n {
            acc[i][i] = ring.add(acc[i][i], c[k]);
        }
    }
    if n % 2 == 0 {
        scale(ring, ring.from_int(-1), &acc)
    } else {
        acc
    }
}

/// Elementary divisor exponents of `a` (ascending); exponent `h` stands for a
/// divisor that vanishes at the ring's precision.
pub fn smith_exponents<R: ChainRing>(ring: &R, a: &Matrix<R::Elem>) -> Vec<u32> {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let h = ring.precision();
    let mut out = Vec::with_capacity(rows.min(cols));
    for k in 0..rows.min(cols) {
        let mut best = (h, k, k);
        'search: for i in k..rows {
            for j in k..cols {
                let v = ring.valuation(m[i][j]);
                if v < best.0 {
                    best = (v, i, j);
                    if v == 0 {
                        break 'search;
                    }
                }
            }
        }
        let (v, pi, pj) = best;
        if v >= h {
            out.extend(std::iter::repeat_n(h, rows.min(cols) - k));
            break;
        }
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        out.push(v);
        let unit = ring.div_uniformizer_pow(m[k][k], v);
        let uinv = ring.inv_unit(unit).expect("normalized pivot is a unit");
        // only the trailing block matters afterwards
        for i in k + 1..rows {
            if ring.is_zero(m[i][k]) {
                continue;
            }
            let f = ring.mul(ring.div_uniformizer_pow(m[i][k], v), uinv);
            for j in k + 1..cols {
                m[i][j] = ring.sub(m[i][j], ring.mul(f, m[k][j]));
            }
        }
        // clearing row k by column operations leaves the trailing block alone
    }
    out
}
