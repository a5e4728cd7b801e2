use std::sync::Arc;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::oracle::sl2_norm;
use super::psd::{is_hermitian, quadratic_form};
use super::*;
use crate::affine::AffineAlgebra;
use crate::catalog::finite_matrix;
use crate::finite_lie::FiniteAlgebra;
use crate::scalar::{rat, GaussianRational};

fn sl2(m: i64, sign: i64) -> FormContext {
    FormContext::generators(Gcm::new(vec![vec![2]]).unwrap(), vec![Scalar::from_int(m)], vec![sign])
        .unwrap()
}

fn a1_affine_gcm() -> Gcm {
    Gcm::new(vec![vec![2, -2], vec![-2, 2]]).unwrap()
}

fn ints(v: &[i64]) -> Vec<Scalar> {
    v.iter().map(|&x| Scalar::from_int(x)).collect()
}

fn affine(family: char, l: usize) -> Arc<AffineAlgebra> {
    let alg = FiniteAlgebra::new(&Gcm::new(finite_matrix(family, l).unwrap()).unwrap()).unwrap();
    Arc::new(AffineAlgebra::new(alg).unwrap())
}

/// Loop route for a dominant affine weight given by `h_values` on nodes.
fn loop_weight(aff: Arc<AffineAlgebra>, h_values: &[i64], kind: OmegaKind) -> FormContext {
    let finite: Vec<Scalar> = ints(&h_values[1..]);
    let level: i64 = h_values.iter().zip(aff.comarks()).map(|(a, b)| a * b).sum();
    let omega = omega_table(aff.finite(), kind).unwrap();
    let lam: CartanFunctional =
        Arc::new(move |deg, j| if deg == 0 { finite[j].clone() } else { Scalar::zero() });
    FormContext::loop_route(
        aff,
        Mode::StandardBorel,
        omega,
        lam,
        Scalar::from_int(level),
        Scalar::zero(),
        true,
    )
    .unwrap()
}

/// `su(1,1)` loops in the natural parabolic with `Lambda(z^k h) = m c^k`.
fn su11_elementary(m: i64, c: Scalar) -> FormContext {
    let aff = affine('A', 1);
    let omega = omega_table(aff.finite(), OmegaKind::SignTwisted).unwrap();
    let lam: CartanFunctional = Arc::new(move |deg, _| {
        let base = if deg >= 0 { c.clone() } else { c.conj() };
        let mut v = Scalar::from_int(m);
        for _ in 0..deg.unsigned_abs() {
            v *= &base;
        }
        v
    });
    FormContext::loop_route(
        aff,
        Mode::NaturalParabolic,
        omega,
        lam,
        Scalar::zero(),
        Scalar::zero(),
        true,
    )
    .unwrap()
}

fn label(drop: &[i64]) -> BlockLabel {
    BlockLabel { drop: drop.to_vec(), window: None }
}

fn falling(m: i64, k: usize) -> i64 {
    (0..k as i64).map(|j| (j + 1) * (m - j)).product()
}

#[test]
fn sl2_norms_match_pbw_oracle() {
    for m in 0..=5 {
        let ctx = sl2(m, 1);
        for k in 0..=6usize {
            let w = vec![Token::F(0); k];
            let oracle = sl2_norm(m as i128, k);
            assert_eq!(ctx.form_value(&w, &w).unwrap(), Scalar::from_int(oracle as i64), "m={m} k={k}");
            assert_eq!(oracle as i64, falling(m, k));
        }
    }
}

#[test]
fn sl2_sign_twisted_alternates() {
    for m in [-3, -1, 2] {
        let ctx = sl2(m, -1);
        for k in 0..=5usize {
            let w = vec![Token::F(0); k];
            let expect = if k % 2 == 0 { 1 } else { -1 } * falling(m, k);
            assert_eq!(ctx.form_value(&w, &w).unwrap(), Scalar::from_int(expect));
        }
    }
}

#[test]
fn sl2_negative_weight_is_indefinite() {
    let block = sl2(-1, 1).gram_block(&label(&[1])).unwrap();
    assert_eq!(block.matrix, vec![vec![Scalar::from_int(-1)]]);
    assert!(!block.verdict.is_psd());
}

#[test]
fn singular_vector_has_zero_norm() {
    let ctx = sl2(2, 1);
    let w = vec![Token::F(0); 3];
    assert!(ctx.form_value(&w, &w).unwrap().is_zero());
    let aff = FormContext::generators(a1_affine_gcm(), ints(&[1, 0]), vec![1, 1]).unwrap();
    let f1 = vec![Token::F(1)];
    assert!(aff.form_value(&f1, &f1).unwrap().is_zero());
    let f00 = vec![Token::F(0); 2];
    assert!(aff.form_value(&f00, &f00).unwrap().is_zero());
}

#[test]
fn a1_affine_raising() {
    let ctx = FormContext::generators(a1_affine_gcm(), ints(&[1, 0]), vec![1, 1]).unwrap();
    let ev = ctx.evaluator();
    let out = ev.act(&Action::Gen(Gen::E(1), Scalar::one()), &[Token::F(1), Token::F(0)]).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[&vec![Token::F(0)]], Scalar::from_int(2));
    let out = ev.act(&Action::Gen(Gen::E(0), Scalar::one()), &[Token::F(0), Token::F(1)]).unwrap();
    assert_eq!(out[&vec![Token::F(1)]], Scalar::from_int(3));
    let b = ctx.gram_block(&label(&[1, 0])).unwrap();
    assert_eq!(b.matrix, vec![vec![Scalar::one()]]);
}

#[test]
fn a1_affine_lambda0_block() {
    let ctx = FormContext::generators(a1_affine_gcm(), ints(&[1, 0]), vec![1, 1]).unwrap();
    let b = ctx.gram_block(&label(&[1, 1])).unwrap();
    assert_eq!(b.words, vec![vec![Token::F(0), Token::F(1)], vec![Token::F(1), Token::F(0)]]);
    assert_eq!(b.matrix, vec![ints(&[0, 0]), ints(&[0, 2])]);
    assert_eq!(b.verdict, Verdict::PositiveSemidefinite { rank: 1 });
    assert_eq!(b.kernel, vec![ints(&[1, 0])]);
    assert_eq!(b.degree, Some(-1));
}

#[test]
fn loop_route_matches_generators_route() {
    let cases: Vec<(Arc<AffineAlgebra>, Vec<i64>, Gcm)> = vec![
        (affine('A', 1), vec![1, 0], a1_affine_gcm()),
        (affine('A', 1), vec![1, 1], a1_affine_gcm()),
        (affine('A', 1), vec![0, 2], a1_affine_gcm()),
        (affine('A', 2), vec![1, 1, 0], affine('A', 2).gcm().clone()),
        (affine('A', 2), vec![0, 1, 1], affine('A', 2).gcm().clone()),
    ];
    for (aff, hv, gcm) in cases {
        let n = hv.len();
        let lp = loop_weight(aff, &hv, OmegaKind::Compact);
        let gen = FormContext::generators(gcm, ints(&hv), vec![1; n]).unwrap();
        let mut drops: Vec<Vec<i64>> = vec![vec![]];
        for _ in 0..n {
            drops = drops
                .into_iter()
                .flat_map(|d| (0..=2).map(move |k| [d.clone(), vec![k]].concat()))
                .collect();
        }
        for d in drops {
            if d.iter().sum::<i64>() > 4 {
                continue;
            }
            let a = lp.gram_block(&label(&d)).unwrap();
            let b = gen.gram_block(&label(&d)).unwrap();
            assert_eq!(a.matrix, b.matrix, "weight {hv:?} drop {d:?}");
            assert_eq!(a.verdict, b.verdict);
            assert!(a.verdict.is_psd(), "integrable module should be unitary: {hv:?} {d:?}");
        }
    }
}

#[test]
fn matrix_omega_agrees_with_sign_twisted() {
    for l in 1..=3 {
        let aff = affine('A', l);
        let a = omega_table(aff.finite(), OmegaKind::Matrix).unwrap();
        let b = omega_table(aff.finite(), OmegaKind::SignTwisted).unwrap();
        assert_eq!(a, b);
    }
    let g2 = FiniteAlgebra::new(&Gcm::new(finite_matrix('G', 2).unwrap()).unwrap()).unwrap();
    assert!(omega_table(&g2, OmegaKind::SignTwisted).is_err());
}

#[test]
fn su11_elementary_blocks() {
    // Lambda(z^k h) = m: every entry equals -m.
    let ctx = su11_elementary(-2, Scalar::one());
    let b = ctx.gram_block(&BlockLabel { drop: vec![1], window: Some(1) }).unwrap();
    assert_eq!(b.dim(), 3);
    for row in &b.matrix {
        for v in row {
            assert_eq!(*v, Scalar::from_int(2));
        }
    }
    assert_eq!(b.verdict, Verdict::PositiveSemidefinite { rank: 1 });
    assert_eq!(b.degree, None);
    let b0 = ctx.gram_block(&BlockLabel { drop: vec![2], window: Some(0) }).unwrap();
    // Finite su(1,1): (-1)^2 2! m (m-1) = 12.
    assert_eq!(b0.matrix, vec![ints(&[12])]);
    assert!(ctx.gram_block(&label(&[1])).is_err());
}

fn phase() -> Scalar {
    Scalar::from(GaussianRational::new(rat(3, 5), rat(4, 5)))
}

#[test]
fn gram_blocks_are_hermitian() {
    let ctx = su11_elementary(-3, phase());
    let mut pairs = 0;
    for drop in 1..=3 {
        let b = ctx.gram_block(&BlockLabel { drop: vec![drop], window: Some(2) }).unwrap();
        assert!(is_hermitian(&b.matrix));
        let ev = ctx.evaluator();
        for u in &b.words {
            for w in &b.words {
                assert_eq!(ev.form(u, w).unwrap(), ev.form(w, u).unwrap().conj());
                pairs += 1;
            }
        }
    }
    assert!(pairs >= 1000, "{pairs}");
}

#[test]
fn form_is_contravariant() {
    let aff = affine('A', 2);
    let ctx = loop_weight(aff.clone(), &[1, 0, 1], OmegaKind::Compact);
    let ev = ctx.evaluator();
    let mut rng = StdRng::seed_from_u64(7);
    let mut words = Vec::new();
    for d in [[0, 0, 0], [1, 0, 0], [0, 0, 1], [1, 1, 0], [0, 1, 1], [1, 0, 1], [1, 1, 1]] {
        words.extend(ctx.block_words(&label(&d)).unwrap());
    }
    let dim = aff.finite().dim();
    let mut nontrivial = 0;
    for deg in -1..=1 {
        for b in 0..dim {
            let coeff = Scalar::gaussian(rat(rng.gen_range(-3..=3), 1), rat(rng.gen_range(1..=3), 1));
            let x = Action::Loop(LoopElement::term(deg, b, coeff));
            let wx = ctx.omega_action(&x).unwrap();
            for u in &words {
                let xu = ev.act(&x, u).unwrap();
                for w in &words {
                    let mut lhs = Scalar::zero();
                    for (word, c) in &xu {
                        lhs += &(c * &ev.form(word, w).unwrap());
                    }
                    let mut rhs = Scalar::zero();
                    for (word, c) in ev.act(&wx, w).unwrap() {
                        rhs += &(&c.conj() * &ev.form(u, &word).unwrap());
                    }
                    assert_eq!(lhs, rhs);
                    if !lhs.is_zero() {
                        nontrivial += 1;
                    }
                }
            }
        }
    }
    assert!(nontrivial > 20, "{nontrivial}");
}

#[test]
fn blocks_are_orthogonal() {
    let ctx = FormContext::generators(a1_affine_gcm(), ints(&[1, 1]), vec![1, 1]).unwrap();
    let u = vec![Token::F(0), Token::F(1)];
    let w = vec![Token::F(1), Token::F(1)];
    assert!(ctx.form_value(&u, &w).unwrap().is_zero());
}

#[test]
fn block_cap_is_a_resource_error() {
    let ctx = FormContext::generators(a1_affine_gcm(), ints(&[1, 0]), vec![1, 1]).unwrap().with_cap(5);
    let err = ctx.gram_block(&label(&[3, 3])).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn small_psd_examples() {
    assert_eq!(psd_verdict(&[ints(&[1])]).unwrap(), Verdict::PositiveDefinite);
    assert_eq!(
        psd_verdict(&[ints(&[0, 0]), ints(&[0, 2])]).unwrap(),
        Verdict::PositiveSemidefinite { rank: 1 }
    );
    let Verdict::Indefinite { witness, value } = psd_verdict(&[ints(&[-1])]).unwrap() else {
        panic!("expected indefinite")
    };
    assert_eq!(witness, ints(&[1]));
    assert_eq!(value, Scalar::from_int(-1));
    let hyper = [ints(&[0, 1]), ints(&[1, 0])];
    assert!(!psd_verdict(&hyper).unwrap().is_psd());
    assert!(psd_verdict(&[ints(&[0, 1]), ints(&[2, 0])]).is_err());
}

/// Determinant by cofactor expansion, for the brute-force check below.
fn det(m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    if n == 0 {
        return Scalar::one();
    }
    let mut acc = Scalar::zero();
    for j in 0..n {
        let minor: Vec<Vec<Scalar>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let t = &m[0][j] * &det(&minor);
        if j % 2 == 0 {
            acc += &t;
        } else {
            acc -= &t;
        }
    }
    acc
}

/// psd iff every principal minor is nonnegative.
fn brute_psd(m: &[Vec<Scalar>]) -> bool {
    let n = m.len();
    (1u32..(1 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Vec<Vec<Scalar>> =
            idx.iter().map(|&i| idx.iter().map(|&j| m[i][j].clone()).collect()).collect();
        det(&sub).real_sign() != Some(std::cmp::Ordering::Less)
    })
}

fn hermitian_from(n: usize, raw: &[(i64, i64)]) -> Vec<Vec<Scalar>> {
    let mut m = vec![vec![Scalar::zero(); n]; n];
    let mut it = raw.iter();
    for i in 0..n {
        for j in i..n {
            let &(a, b) = it.next().unwrap();
            if i == j {
                m[i][i] = Scalar::from_int(a);
            } else {
                m[i][j] = Scalar::gaussian(rat(a, 1), rat(b, 1));
                m[j][i] = m[i][j].conj();
            }
        }
    }
    m
}

proptest! {
    #[test]
    fn psd_verdict_matches_principal_minors(
        n in 1usize..=4,
        raw in proptest::collection::vec((-3i64..=3, -2i64..=2), 10),
        low_rank in any::<bool>(),
    ) {
        let mut m = hermitian_from(n, &raw);
        if low_rank {
            // Gram matrix of n vectors in C^2: psd with rank <= 2.
            let v: Vec<Scalar> = raw.iter().take(2 * n)
                .map(|&(a, b)| Scalar::gaussian(rat(a, 1), rat(b, 1))).collect();
            for i in 0..n {
                for j in 0..n {
                    m[i][j] = &(&v[2 * i] * &v[2 * j].conj()) + &(&v[2 * i + 1] * &v[2 * j + 1].conj());
                }
            }
        }
        let verdict = psd_verdict(&m).unwrap();
        prop_assert_eq!(verdict.is_psd(), brute_psd(&m));
        let rank = crate::linalg::rank(&m);
        match &verdict {
            Verdict::PositiveDefinite => prop_assert_eq!(rank, n),
            Verdict::PositiveSemidefinite { rank: r } => {
                prop_assert_eq!(*r, rank);
                prop_assert_eq!(kernel_basis(&m).len(), n - rank);
            }
            Verdict::Indefinite { witness, value } => {
                prop_assert_eq!(&quadratic_form(&m, witness), value);
            }
        }
    }
}
