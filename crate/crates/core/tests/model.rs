mod common;

use common::{c, dense_transfer, max_abs, params, FIG1_THETAS};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xxz_roots::model::{
    ad_functions, hamiltonian, hamiltonian_from_transfer, r_matrix, unitarity_factor, verify_tt_identity,
    TransferOperator,
};
use xxz_roots::{CMatrix, Complex64, ModelParams};

const ETA: Complex64 = Complex64::new(0.75, 0.0);

fn dense(m: &CMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn r(u: Complex64) -> DMatrix<Complex64> {
    dense(&r_matrix(u, ETA).unwrap())
}

fn swap() -> DMatrix<Complex64> {
    let mut p = DMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        p[(i, j)] = c(1.0, 0.0);
    }
    p
}

fn sigma_y0() -> DMatrix<Complex64> {
    let y = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
    y.kronecker(&DMatrix::identity(2, 2))
}

/// Partial transpose on the first factor of a 4x4 operator.
fn transpose_aux(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(4, 4, |row, col| {
        let (a, i) = (row / 2, row % 2);
        let (b, k) = (col / 2, col % 2);
        m[(2 * b + i, 2 * a + k)]
    })
}

fn scale(m: &DMatrix<Complex64>) -> f64 {
    max_abs(m).max(1.0)
}

fn cplx() -> impl Strategy<Value = Complex64> {
    (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b)| c(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn yang_baxter(u1 in cplx(), u2 in cplx(), u3 in cplx()) {
        let id = DMatrix::<Complex64>::identity(2, 2);
        let p23 = id.kronecker(&swap());
        let r12 = |u| r(u).kronecker(&id);
        let r23 = |u| id.kronecker(&r(u));
        let r13 = |u| &p23 * r12(u) * &p23;
        let lhs = r12(u1 - u2) * r13(u1 - u3) * r23(u2 - u3);
        let rhs = r23(u2 - u3) * r13(u1 - u3) * r12(u1 - u2);
        prop_assert!(max_abs(&(&lhs - &rhs)) <= 1e-12 * scale(&lhs));
    }

    #[test]
    fn unitarity_crossing_and_pt(u in cplx()) {
        let p = swap();
        let ru = r(u);
        let unit = &ru * (&p * r(-u) * &p) - DMatrix::identity(4, 4) * unitarity_factor(u, ETA);
        prop_assert!(max_abs(&unit) <= 1e-12 * scale(&ru).powi(2));
        let y = sigma_y0();
        let crossed = -(&y * transpose_aux(&r(-u - ETA)) * &y);
        prop_assert!(max_abs(&(&ru - &crossed)) <= 1e-12 * scale(&ru));
        prop_assert!(max_abs(&(&ru - &p * &ru * &p)) <= 1e-12 * scale(&ru));
        prop_assert!(max_abs(&(&ru - ru.transpose())) <= 1e-12 * scale(&ru));
    }
}

#[test]
fn initial_condition_and_unitarity_factor() {
    assert!(max_abs(&(r(c(0.0, 0.0)) - swap())) <= 1e-12);
    let prod = r(c(0.3, 0.0)) * r(c(-0.3, 0.0));
    let phi = unitarity_factor(c(0.3, 0.0), ETA);
    let oracle = -(0.3f64 + 0.75).sinh() * (0.3f64 - 0.75).sinh() / 0.75f64.sinh().powi(2);
    assert!((phi.re - oracle).abs() < 1e-14 && phi.im == 0.0);
    assert!((phi.re - 0.8629).abs() < 5e-5);
    assert!(max_abs(&(prod - DMatrix::identity(4, 4) * phi)) <= 1e-12);
}

#[test]
fn degenerate_anisotropy_is_rejected() {
    assert!(r_matrix(c(0.1, 0.0), c(0.0, std::f64::consts::PI)).is_err());
    assert!(ModelParams::new(1, ETA, vec![c(0.0, 0.0)]).is_err());
    assert!(ModelParams::ferromagnetic(4, 0.75).unwrap().with_imaginary_thetas(&[0.1, 0.2, 2.0, 0.0]).is_err());
}

#[test]
fn transfer_matches_explicit_monodromy() {
    for antiferro in [false, true] {
        let p = params(4, antiferro).with_imaginary_thetas(&FIG1_THETAS[..4]).unwrap();
        let u = c(0.23, -0.41);
        let fast = dense(&TransferOperator::new(&p, u).to_dense());
        let slow = dense_transfer(&p, u);
        assert!(max_abs(&(&fast - &slow)) <= 1e-12 * scale(&slow));
    }
}

#[test]
fn transfer_matrices_commute() {
    let p = params(6, false);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let mut draw = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.5..1.5));
        let (u, v) = (draw(), draw());
        let tu = dense(&TransferOperator::new(&p, u).to_dense());
        let tv = dense(&TransferOperator::new(&p, v).to_dense());
        let comm = &tu * &tv - &tv * &tu;
        assert!(max_abs(&comm) <= 1e-10 * max_abs(&tu) * max_abs(&tv));
    }
}

#[test]
fn periodicity_and_conjugation() {
    let p = params(5, false);
    let u = c(0.2, 0.0);
    let t = dense(&TransferOperator::new(&p, u).to_dense());
    let shifted = dense(&TransferOperator::new(&p, u + c(0.0, std::f64::consts::PI)).to_dense());
    assert!(max_abs(&(&shifted - &t)) <= 1e-12 * scale(&t));

    let p = params(4, false);
    let u = c(0.1, 0.2);
    let t = dense(&TransferOperator::new(&p, u).to_dense());
    let mirrored = dense(&TransferOperator::new(&p, -u.conj() - p.eta()).to_dense());
    assert!(max_abs(&(t.adjoint() + &mirrored)) <= 1e-12 * scale(&t));
}

#[test]
fn hamiltonian_is_traceless_and_hermitian() {
    for n in 2..=7 {
        for antiferro in [false, true] {
            let h = hamiltonian(&params(n, antiferro)).matrix;
            assert!(h.trace().norm() <= 1e-12);
            assert_eq!(h.adjoint(), h);
        }
    }
}

#[test]
fn hamiltonian_matches_pauli_strings() {
    for antiferro in [false, true] {
        let p = params(6, antiferro);
        let h = dense(&hamiltonian(&p).matrix);
        let oracle = common::pauli_hamiltonian(6, p.eta());
        assert!(max_abs(&(h - oracle)) <= 1e-12);
    }
}

#[test]
fn hamiltonian_from_log_derivative() {
    let p = params(8, false);
    let h = hamiltonian(&p).matrix;
    let from_t = hamiltonian_from_transfer(&p, 1e-3).matrix;
    assert!((&h - &from_t).max_abs() <= 1e-6);
}

#[test]
fn ad_function_examples() {
    let p = params(6, false);
    let (_, d) = ad_functions(&p, ETA);
    assert!((d - c(1.0, 0.0)).norm() < 1e-14);
    let (_, d) = ad_functions(&p, c(0.0, 0.0));
    assert_eq!(d.norm(), 0.0);

    let p = p.with_imaginary_thetas(&FIG1_THETAS[..6]).unwrap();
    let u = c(0.0, 0.3);
    let (a, d) = ad_functions(&p, u);
    let s = 0.75f64.sinh();
    let (mut a_ref, mut d_ref) = (c(1.0, 0.0), c(1.0, 0.0));
    for &th in &FIG1_THETAS[..6] {
        a_ref *= (u - c(0.0, th) + ETA).sinh() / s;
        d_ref *= (u - c(0.0, th)).sinh() / s;
    }
    assert!((a - a_ref).norm() <= 1e-14 * a_ref.norm().max(1.0));
    assert!((d - d_ref).norm() <= 1e-14 * d_ref.norm().max(1.0));
    let (a_shift, _) = ad_functions(&p, u - ETA);
    assert!((a_shift - d).norm() <= 1e-13);
}

#[test]
fn operator_product_identity() {
    for antiferro in [false, true] {
        assert!(verify_tt_identity(&params(6, antiferro)) <= 1e-9);
        let p = params(6, antiferro).with_imaginary_thetas(&FIG1_THETAS[..6]).unwrap();
        assert!(verify_tt_identity(&p) <= 1e-9);
    }
}

#[test]
fn identities_hold_in_single_precision() {
    let p = xxz_roots::model::ModelParams::<f32>::ferromagnetic(4, 0.75).unwrap();
    assert!(verify_tt_identity(&p) <= 1e-4);
}
