//! Seeded random generators for tests, the acceptance suite and the CLI's
//! randomized checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hermmap::MatrixMap;
use crate::matlin::{matrix_exp_unitary, vec_norm, ComplexMatrix, HermitianOperator, C64};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform_c64(r: &mut impl Rng) -> C64 {
    C64::new(r.gen_range(-1.0..=1.0), r.gen_range(-1.0..=1.0))
}

pub fn random_matrix(r: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| uniform_c64(r))
}

/// Entries uniform in `[-1,1] + i[-1,1]`, then symmetrized.
pub fn random_hermitian(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    random_matrix(r, n, n).hermitian_part()
}

pub fn random_hermitian_op(r: &mut impl Rng, n: usize) -> HermitianOperator {
    HermitianOperator::from_hermitian_part(&random_matrix(r, n, n))
}

/// `G G† / Tr[G G†]`, full rank with probability one.
pub fn random_density(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = random_matrix(r, n, n);
    let p = &g * &g.adjoint();
    let tr = p.trace().re;
    p.scale_re(1.0 / tr).hermitian_part()
}

fn standard_normal(r: &mut impl Rng) -> f64 {
    // Box-Muller
    let u1: f64 = 1.0 - r.gen::<f64>();
    let u2: f64 = r.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Haar-random state vector: a normalized complex Gaussian vector.
pub fn random_pure_state(r: &mut impl Rng, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n)
        .map(|_| C64::new(standard_normal(r), standard_normal(r)))
        .collect();
    let norm = vec_norm(&v);
    v.into_iter().map(|z| z / norm).collect()
}

pub fn random_unitary(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    let h = random_hermitian_op(r, n).scale(std::f64::consts::PI);
    matrix_exp_unitary(&h, 1.0)
}

/// A trace-preserving, Hermiticity-preserving map `Q ↦ Σ w_i U_i Q U_i†`
/// with real weights of both signs summing to one.
pub fn random_signed_conjugation_map(r: &mut impl Rng, n: usize, terms: usize) -> MatrixMap {
    assert!(terms >= 1);
    let mut weights: Vec<f64> = (0..terms - 1).map(|_| r.gen_range(-1.0..=1.0)).collect();
    let rest: f64 = weights.iter().sum();
    weights.push(1.0 - rest);
    let unitaries: Vec<ComplexMatrix> = (0..terms).map(|_| random_unitary(r, n)).collect();
    MatrixMap::from_action(n, |q| {
        let mut out = ComplexMatrix::zeros(n, n);
        for (w, u) in weights.iter().zip(&unitaries) {
            out = &out + &u.conjugate(q).scale_re(*w);
        }
        out
    })
    .expect("action preserves dimension")
}

/// Random completely positive trace-preserving map from `terms` Kraus
/// operators `K_i = A_i S^{-1/2}` with `S = Σ A_i†A_i`.
pub fn random_channel(r: &mut impl Rng, n: usize, terms: usize) -> MatrixMap {
    let raw: Vec<ComplexMatrix> = (0..terms).map(|_| random_matrix(r, n, n)).collect();
    let mut s = ComplexMatrix::zeros(n, n);
    for a in &raw {
        s = &s + &(&a.adjoint() * a);
    }
    let es = crate::matlin::eig_hermitian(&HermitianOperator::from_hermitian_part(&s));
    let mut inv_sqrt = ComplexMatrix::zeros(n, n);
    for (lam, v) in es.eigenvalues.iter().zip(&es.eigenvectors) {
        inv_sqrt = &inv_sqrt + &ComplexMatrix::projector(v).scale_re(1.0 / lam.sqrt());
    }
    let kraus: Vec<ComplexMatrix> = raw.iter().map(|a| a * &inv_sqrt).collect();
    MatrixMap::from_action(n, |q| {
        let mut out = ComplexMatrix::zeros(n, n);
        for k in &kraus {
            out = &out + &k.conjugate(q);
        }
        out
    })
    .expect("action preserves dimension")
}
