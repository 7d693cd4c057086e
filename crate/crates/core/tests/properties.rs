use proptest::prelude::*;

use wittgr::adlv::{defect, mazur_admissible, rapoport_dimension, BSpec, SigmaClass};
use wittgr::coweight::Coweight;
use wittgr::lattice::{relative_position, Lattice};
use wittgr::matrix::{self, Matrix};
use wittgr::ring::ChainRing;
use wittgr::satake::Character;
use wittgr::weyl::CoxeterGroup;
use wittgr::witt::WittVector;
use wittgr::{GaloisRing, GrElem};

fn ring_params() -> impl Strategy<Value = (u32, u32, u32)> {
    (prop::sample::select(vec![2u32, 3, 5]), 1u32..=2, 1u32..=4)
}

fn elem(ring: &GaloisRing, digits: &[u32]) -> GrElem {
    let q = ring.q() as u32;
    let d: Vec<u32> = digits.iter().map(|x| x % q).collect();
    ring.from_digits(&d)
}

fn coweight(n: usize, lo: i64, hi: i64) -> impl Strategy<Value = Coweight> {
    prop::collection::vec(lo..=hi, n).prop_map(Coweight)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frobenius_is_a_ring_map((p, r, h) in ring_params(), a in prop::collection::vec(0u32..1000, 4), b in prop::collection::vec(0u32..1000, 4)) {
        let ring = GaloisRing::new(p, r, h).unwrap();
        let (x, y) = (elem(&ring, &a), elem(&ring, &b));
        prop_assert_eq!(ring.frobenius(ring.add(x, y)), ring.add(ring.frobenius(x), ring.frobenius(y)));
        prop_assert_eq!(ring.frobenius(ring.mul(x, y)), ring.mul(ring.frobenius(x), ring.frobenius(y)));
        let mut z = x;
        for _ in 0..r {
            z = ring.frobenius(z);
        }
        prop_assert_eq!(z, x);
        prop_assert_eq!(ring.frobenius_inv(ring.frobenius(x)), x);
    }

    #[test]
    fn witt_structure_maps((p, r, h) in ring_params(), a in prop::collection::vec(0u32..1000, 4), s in 0u32..1000, t in 0u32..1000) {
        let ring = GaloisRing::new(p, r, h).unwrap();
        let x = WittVector::from_elem(&ring, elem(&ring, &a));
        // F V = V F = p
        let px = x.mul(&WittVector::from_int(&ring, p as i64)).unwrap();
        prop_assert_eq!(x.verschiebung().frobenius(), px.clone());
        prop_assert_eq!(x.frobenius().verschiebung(), px);
        // Teichmüller lifts are multiplicative and coordinates round-trip
        let q = ring.q() as u32;
        let (s, t) = (s % q, t % q);
        let f = ring.field();
        let prod = WittVector::teichmuller(&ring, s).mul(&WittVector::teichmuller(&ring, t)).unwrap();
        prop_assert_eq!(prod, WittVector::teichmuller(&ring, f.mul(s, t)));
        prop_assert_eq!(WittVector::from_coords(&ring, &x.coords()).unwrap(), x.clone());
        prop_assert_eq!(ring.from_digits(&x.digits()), x.elem());
        if x.valuation() == 0 {
            prop_assert_eq!(x.mul(&x.inverse().unwrap()).unwrap(), WittVector::one(&ring));
        }
    }

    #[test]
    fn relative_position_laws(
        (p, r) in (prop::sample::select(vec![2u32, 3]), 1u32..=2),
        g1 in prop::collection::vec(prop::collection::vec(0u32..1000, 3), 4),
        g2 in prop::collection::vec(prop::collection::vec(0u32..1000, 3), 4),
        k in prop::collection::vec(prop::collection::vec(0u32..1000, 3), 4),
        s1 in -2i64..=2, s2 in -2i64..=2,
    ) {
        let ring = GaloisRing::new(p, r, 8).unwrap();
        let mat = |v: &Vec<Vec<u32>>| -> Matrix<GrElem> {
            vec![vec![elem(&ring, &v[0]), elem(&ring, &v[1])], vec![elem(&ring, &v[2]), elem(&ring, &v[3])]]
        };
        let (b1, b2, g) = (mat(&g1), mat(&g2), mat(&k));
        let ok = |m: &Matrix<GrElem>| ring.valuation(matrix::det(&ring, m)) <= 2;
        prop_assume!(ok(&b1) && ok(&b2));
        let l1 = Lattice::from_generators(&ring, s1, &b1).unwrap();
        let l2 = Lattice::from_generators(&ring, s2, &b2).unwrap();
        let inv12 = relative_position(&ring, &l1, &l2).unwrap();
        let inv21 = relative_position(&ring, &l2, &l1).unwrap();
        prop_assert_eq!(inv21, inv12.dual());
        prop_assert_eq!(inv12.size(), l1.kottwitz_index(&ring) - l2.kottwitz_index(&ring));
        prop_assert!(inv12.is_dominant());
        prop_assert_eq!(relative_position(&ring, &l1, &l1).unwrap(), Coweight::zero(2));
        // invariance under GL_2(O) and under Frobenius
        if ring.valuation(matrix::det(&ring, &g)) == 0 {
            let t1 = l1.transform(&ring, &g, 0).unwrap();
            let t2 = l2.transform(&ring, &g, 0).unwrap();
            prop_assert_eq!(relative_position(&ring, &t1, &t2).unwrap(), inv12.clone());
        }
        let f1 = l1.frobenius(&ring).unwrap();
        let f2 = l2.frobenius(&ring).unwrap();
        prop_assert_eq!(relative_position(&ring, &f1, &f2).unwrap(), inv12);
    }

    #[test]
    fn dominance_closure(mu in coweight(3, -3, 3)) {
        let dom = mu.dominant();
        for lam in dom.dominant_below() {
            prop_assert!(lam.is_dominant());
            prop_assert!(lam.dominance_leq(&dom));
            prop_assert_eq!(lam.size(), dom.size());
            prop_assert_eq!(lam.parity(), dom.parity());
        }
        prop_assert_eq!(mu.dual().dual(), mu.clone());
        prop_assert_eq!(dom.pairing_2rho(), dom.dual().pairing_2rho());
    }

    #[test]
    fn characters_match_weyl_dimension(mu in coweight(3, -2, 3)) {
        let mu = mu.dominant();
        let mut ch = Character::new(&mu).unwrap();
        let weights = ch.weights();
        let total: i64 = weights.values().sum();
        // prod over i < j of (mu_i - mu_j + j - i) / (j - i)
        let v = mu.as_slice();
        let mut num = 1i64;
        let mut den = 1i64;
        for i in 0..3 {
            for j in i + 1..3 {
                num *= v[i] - v[j] + (j - i) as i64;
                den *= (j - i) as i64;
            }
        }
        prop_assert_eq!(total, num / den);
        for (w, m) in &weights {
            prop_assert_eq!(ch.multiplicity(&w.dominant()), *m);
            prop_assert!(w.dominance_leq(&mu) || w.dominant().dominance_leq(&mu));
        }
    }

    #[test]
    fn length_and_words(word in prop::collection::vec(0usize..3, 0..10), other in prop::collection::vec(0usize..3, 0..6), k in -2i64..=2) {
        let g = CoxeterGroup::affine_gl(3);
        let x = g.mul(&g.from_word(&word).unwrap(), &g.omega(k).unwrap());
        let y = g.from_word(&other).unwrap();
        let (rw, omega) = g.reduced_word(&x);
        prop_assert_eq!(rw.len(), g.length(&x));
        prop_assert_eq!(g.mul(&g.from_word(&rw).unwrap(), &g.omega(omega).unwrap()), x.clone());
        prop_assert_eq!(g.length(&g.inverse(&x)), g.length(&x));
        let xy = g.mul(&x, &y);
        prop_assert!(g.length(&xy) <= g.length(&x) + g.length(&y));
        prop_assert_eq!((g.length(&xy) + g.length(&x) + g.length(&y)) % 2, 0);
        // prefixes of a reduced word lie below in the Bruhat order
        let w = g.from_word(&rw).unwrap();
        for i in 0..=rw.len() {
            let pre = g.from_word(&rw[..i]).unwrap();
            prop_assert!(g.bruhat_leq(&pre, &w));
        }
        for s in 0..3 {
            let ws = g.mul(&w, &g.generator(s));
            prop_assert_eq!(g.right_descent(&w, s), g.length(&ws) < g.length(&w));
        }
    }

    #[test]
    fn newton_point_invariants(p in prop::sample::select(vec![2u32, 3]), n in 2usize..=4, k in -3i64..=5, e in prop::collection::vec(-2i64..=3, 4)) {
        for b in [SigmaClass::superbasic(p, n, k).unwrap(), SigmaClass::diagonal(p, &e[..n]).unwrap()] {
            let nu = b.newton_point(p).unwrap();
            prop_assert!(nu.0.windows(2).all(|w| w[0] >= w[1]));
            let total: num_rational::Ratio<i64> = nu.0.iter().sum();
            prop_assert!(total.is_integer());
            let d = defect(&nu);
            prop_assert!(0 <= d && d < n as i64);
            // every coweight with the right index whose dominant form
            // dominates nu gives an integral dimension
            let mu = Coweight(vec![total.to_integer()].into_iter().chain(std::iter::repeat(0).take(n - 1)).collect());
            if mazur_admissible(&mu, &nu) {
                prop_assert!(rapoport_dimension(&mu, &nu).unwrap() >= 0);
            }
        }
        // conjugating by a permutation matrix leaves the Newton point alone
        let b = SigmaClass::diagonal(p, &e[..n]).unwrap();
        let mut perm = b.matrix.clone();
        perm.reverse();
        for row in perm.iter_mut() {
            row.reverse();
        }
        let c = SigmaClass::new(b.shift, perm).unwrap();
        prop_assert_eq!(c.newton_point(p).unwrap(), b.newton_point(p).unwrap());
    }

    #[test]
    fn b_specs_round_trip(k in -4i64..=4, e in prop::collection::vec(-3i64..=3, 1..4)) {
        for spec in [BSpec::Superbasic(Some(k)), BSpec::Diagonal(e.clone()), BSpec::Identity] {
            prop_assert_eq!(spec.to_string().parse::<BSpec>().unwrap(), spec.clone());
        }
    }
}
