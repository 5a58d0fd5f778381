//! Linear assignments `ρ_A ↦ ρ_AB` with `Tr_B[ρ_AB] = ρ_A`.
//!
//! If such an assignment maps every density matrix to a density matrix it
//! is a fixed product `ρ_A ⊗ ρ_B`. The checks here follow that argument:
//! pure states must be assigned products, and the six-vector mixtures
//! force the same `ρ_B` everywhere. For assignments that are not of this
//! form, [`hunt_positivity_failure`] searches for the pure state whose
//! assigned matrix is not positive.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matlin::{
    hs_inner, min_eigenvalue, partial_trace, tensor, vec_inner, vec_norm, ComplexMatrix, HermitianOperator, Subsystem,
    C64, HERMITIAN_TOL, I, ONE, ZERO,
};
use crate::reduced::{build_basis, composite_basis, OperatorBasis};
use crate::testing::{random_pure_state, rng};

/// Tolerance on `Tr_B[L(F_α)] = F_α`.
pub const PARTIAL_TRACE_TOL: f64 = 1e-10;
/// Positivity slack for the theorem's hypothesis.
pub const HYPOTHESIS_TOL: f64 = 1e-9;
/// Factorization residual or `ρ_B` spread above which an assignment counts as non-product.
pub const NON_PRODUCT_TOL: f64 = 1e-8;

/// Real-linear assignment stored as a `(NM)² × N²` matrix acting on the
/// coordinates `x_α = Tr[F_α X]` and producing `y_κ = Tr[K_κ L(X)]`, with
/// `K_κ = F_{μ0} ⊗ F_{0ν}`.
#[derive(Clone, Debug)]
pub struct AssignmentMap {
    dim_a: usize,
    dim_b: usize,
    basis_a: OperatorBasis,
    composite: Vec<ComplexMatrix>,
    matrix: Vec<f64>,
}

/// On-disk form: `b_matrix` lists `[re, im]` pairs of the `(NM·N)²` matrix
/// with `L(X)_rs = Σ B[(r,j),(s,k)] X_jk`, composite index `r·N + j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssignmentFile {
    #[serde(rename = "dimA")]
    pub dim_a: usize,
    #[serde(rename = "dimB")]
    pub dim_b: usize,
    pub b_matrix: Vec<[f64; 2]>,
}

impl AssignmentMap {
    /// Tabulates `action` on the basis of `A`; it must preserve Hermiticity
    /// and the partial trace.
    pub fn from_fn(dim_a: usize, dim_b: usize, action: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let basis_a = build_basis(dim_a, None)?;
        let basis_b = build_basis(dim_b, None)?;
        let composite = composite_basis(&basis_a, &basis_b);
        let nm = dim_a * dim_b;
        let (cols, rows) = (basis_a.len(), composite.len());
        let mut matrix = vec![0.0; rows * cols];
        for (alpha, f) in basis_a.elements().iter().enumerate() {
            let image = action(f.matrix());
            if image.rows() != nm || image.cols() != nm {
                return Err(Error::DimensionMismatch(format!(
                    "assigned matrix is {}x{}, expected {nm}x{nm}",
                    image.rows(),
                    image.cols()
                )));
            }
            let dev = image.hermiticity_deviation();
            if dev > HERMITIAN_TOL {
                return Err(Error::NotHermitian(dev));
            }
            let reduced = partial_trace(&image, Subsystem::Second, (dim_a, dim_b))?;
            let pt_dev = reduced.max_abs_diff(f.matrix());
            if pt_dev > PARTIAL_TRACE_TOL {
                return Err(Error::InvalidParameter(format!(
                    "assignment changes the partial trace (deviation {pt_dev:e})"
                )));
            }
            for (kappa, k) in composite.iter().enumerate() {
                matrix[kappa * cols + alpha] = hs_inner(k, &image)?.re / dim_a as f64;
            }
        }
        Ok(Self {
            dim_a,
            dim_b,
            basis_a,
            composite,
            matrix,
        })
    }

    /// `X ↦ X ⊗ ρ_B`
    pub fn product(dim_a: usize, rho_b: &ComplexMatrix) -> Result<Self> {
        check_density(rho_b)?;
        Self::from_fn(dim_a, rho_b.rows(), |x| tensor(x, rho_b))
    }

    /// `X ↦ X ⊗ ρ_B + ε Tr[F_last X] (1/NM) 1 ⊗ G_last`, where `F_last`, `G_last`
    /// are the last basis elements (`Σ₃`, `Ξ₃` for qubits).
    pub fn perturbed(dim_a: usize, rho_b: &ComplexMatrix, eps: f64) -> Result<Self> {
        check_density(rho_b)?;
        let dim_b = rho_b.rows();
        let fa = build_basis(dim_a, None)?.elements().last().expect("non-empty").clone();
        let gb = build_basis(dim_b, None)?.elements().last().expect("non-empty").clone();
        let correction = tensor(&ComplexMatrix::identity(dim_a), gb.matrix()).scale_re(eps / (dim_a * dim_b) as f64);
        Self::from_fn(dim_a, dim_b, |x| {
            let weight = hs_inner(fa.matrix(), x).expect("same dimension");
            &tensor(x, rho_b) + &correction.scale(weight)
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let coords = self.basis_a.coordinates(x)?;
        let cols = coords.len();
        let nm = self.dim_a * self.dim_b;
        let mut out = ComplexMatrix::zeros(nm, nm);
        for (kappa, k) in self.composite.iter().enumerate() {
            let y: C64 = (0..cols)
                .map(|alpha| coords[alpha] * self.matrix[kappa * cols + alpha])
                .sum();
            if y != ZERO {
                out = &out + &k.scale(y / nm as f64);
            }
        }
        Ok(out)
    }

    /// `max_α |Tr_B[L(F_α)] − F_α|`
    pub fn partial_trace_deviation(&self) -> Result<f64> {
        let mut dev: f64 = 0.0;
        for f in self.basis_a.elements() {
            let reduced = partial_trace(&self.apply(f.matrix())?, Subsystem::Second, (self.dim_a, self.dim_b))?;
            dev = dev.max(reduced.max_abs_diff(f.matrix()));
        }
        Ok(dev)
    }

    /// `max |L(aX + bY) − aL(X) − bL(Y)|` over random Hermitian `X`, `Y`.
    pub fn linearity_deviation(&self, samples: usize, seed: u64) -> Result<f64> {
        let mut r = rng(seed);
        let mut dev: f64 = 0.0;
        for _ in 0..samples {
            let x = crate::testing::random_hermitian(&mut r, self.dim_a);
            let y = crate::testing::random_hermitian(&mut r, self.dim_a);
            let (a, b): (f64, f64) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            let lhs = self.apply(&(&x.scale_re(a) + &y.scale_re(b)))?;
            let rhs = &self.apply(&x)?.scale_re(a) + &self.apply(&y)?.scale_re(b);
            dev = dev.max(lhs.max_abs_diff(&rhs));
        }
        Ok(dev)
    }

    pub fn to_file(&self) -> Result<AssignmentFile> {
        let (n, nm) = (self.dim_a, self.dim_a * self.dim_b);
        let size = nm * n;
        let mut b = vec![[0.0; 2]; size * size];
        for j in 0..n {
            for k in 0..n {
                let mut e = ComplexMatrix::zeros(n, n);
                e[(j, k)] = ONE;
                let image = self.apply(&e)?;
                for r in 0..nm {
                    for s in 0..nm {
                        let z = image[(r, s)];
                        b[(r * n + j) * size + s * n + k] = [z.re, z.im];
                    }
                }
            }
        }
        Ok(AssignmentFile {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            b_matrix: b,
        })
    }

    pub fn from_file(file: &AssignmentFile) -> Result<Self> {
        let (n, nm) = (file.dim_a, file.dim_a * file.dim_b);
        if n == 0 || file.dim_b == 0 {
            return Err(Error::DimensionMismatch("dimensions must be positive".into()));
        }
        let size = nm * n;
        if file.b_matrix.len() != size * size {
            return Err(Error::DimensionMismatch(format!(
                "b_matrix has {} entries, expected {}",
                file.b_matrix.len(),
                size * size
            )));
        }
        let b: Vec<C64> = file.b_matrix.iter().map(|&[re, im]| C64::new(re, im)).collect();
        Self::from_fn(file.dim_a, file.dim_b, |x| {
            ComplexMatrix::from_fn(nm, nm, |r, s| {
                let mut z = ZERO;
                for j in 0..n {
                    for k in 0..n {
                        z += b[(r * n + j) * size + s * n + k] * x[(j, k)];
                    }
                }
                z
            })
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file()?)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }
}

fn check_density(rho: &ComplexMatrix) -> Result<()> {
    let h = HermitianOperator::new(rho.clone()).map_err(|e| Error::NotDensityMatrix(e.to_string()))?;
    if (h.trace() - 1.0).abs() > 1e-10 || min_eigenvalue(&h) < -1e-10 {
        return Err(Error::NotDensityMatrix(
            "needs unit trace and no negative eigenvalues".into(),
        ));
    }
    Ok(())
}

/// `⟨ψ| X |ψ⟩` over the first factor of an `NM × NM` matrix.
fn partial_mean(x: &ComplexMatrix, psi: &[C64], dim_b: usize) -> ComplexMatrix {
    let n = psi.len();
    ComplexMatrix::from_fn(dim_b, dim_b, |a, b| {
        let mut z = ZERO;
        for i in 0..n {
            for j in 0..n {
                z += psi[i].conj() * x[(i * dim_b + a, j * dim_b + b)] * psi[j];
            }
        }
        z
    })
}

/// Outcome of assigning a joint matrix to the pure state `|ψ⟩⟨ψ|`.
#[derive(Clone, Debug)]
pub struct FactorizationCheck {
    /// `ρ_B = ⟨ψ|ρ_AB|ψ⟩`
    pub rho_b: ComplexMatrix,
    /// `max |ρ_AB − |ψ⟩⟨ψ| ⊗ ρ_B|`
    pub residual: f64,
    pub min_eigenvalue: f64,
    /// Whether the assigned matrix is positive within [`HYPOTHESIS_TOL`].
    pub hypothesis_holds: bool,
}

pub fn check_pure_state_factorization(l: &AssignmentMap, psi: &[C64]) -> Result<FactorizationCheck> {
    if psi.len() != l.dim_a {
        return Err(Error::DimensionMismatch(format!(
            "state of length {} for dimension {}",
            psi.len(),
            l.dim_a
        )));
    }
    let norm_dev = (vec_norm(psi) - 1.0).abs();
    if norm_dev > 1e-10 {
        return Err(Error::NotOrthonormal(norm_dev));
    }
    let p = ComplexMatrix::projector(psi);
    let assigned = l.apply(&p)?;
    let min_eig = min_eigenvalue(&HermitianOperator::from_hermitian_part(&assigned));
    let rho_b = partial_mean(&assigned, psi, l.dim_b);
    let residual = assigned.max_abs_diff(&tensor(&p, &rho_b));
    Ok(FactorizationCheck {
        rho_b,
        residual,
        min_eigenvalue: min_eig,
        hypothesis_holds: min_eig >= -HYPOTHESIS_TOL,
    })
}

/// `ψ₃,₄ = (ψ₁ ± i e^{iβ} ψ₂)/√2`, `ψ₅ = cos α ψ₁ + sin α e^{iβ} ψ₂`,
/// `ψ₆ = sin α ψ₁ − cos α e^{iβ} ψ₂`.
pub fn six_vectors(psi1: &[C64], psi2: &[C64], alpha: f64, beta: f64) -> [Vec<C64>; 6] {
    let phase = C64::from_polar(1.0, beta);
    let comb = |a: C64, b: C64| -> Vec<C64> { psi1.iter().zip(psi2).map(|(x, y)| a * x + b * y).collect() };
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let (sa, ca) = alpha.sin_cos();
    [
        psi1.to_vec(),
        psi2.to_vec(),
        comb(h, I * phase * FRAC_1_SQRT_2),
        comb(h, -I * phase * FRAC_1_SQRT_2),
        comb(C64::new(ca, 0.0), phase * sa),
        comb(C64::new(sa, 0.0), -phase * ca),
    ]
}

/// Six-vector test of whether `ρ_B` is the same for all pure states.
#[derive(Clone, Debug, Serialize)]
pub struct SixVectorReport {
    /// `max | |⟨ψ_i|ψ_j⟩|² − ½ |` over the eight pairs that should overlap by one half.
    pub overlap_deviation: f64,
    /// `½(P₁ + P₂) = ½(P₃ + P₄)` and `½(P₃ + P₄) = ½(P₅ + P₆)`.
    pub mixture_deviation: f64,
    pub factorization_residuals: [f64; 6],
    pub min_eigenvalues: [f64; 6],
    pub hypothesis_holds: bool,
    /// Largest `max |ρ_B(i) − ρ_B(j)|` and the pair (1-based) where it occurs.
    pub max_pairwise_distance: f64,
    pub worst_pair: (usize, usize),
    /// `ρ_B(1) = ½(ρ_B(3) + ρ_B(4))`, `ρ_B(2) = ½(ρ_B(3) + ρ_B(4))`, `ρ_B(3) = ½(ρ_B(1) + ρ_B(2))`.
    pub partial_mean_residuals: [f64; 3],
    /// The same with `1, 2, 3, 4` replaced by `3, 4, 5, 6`.
    pub second_set_residuals: [f64; 3],
}

pub fn check_constant_rho_b(
    l: &AssignmentMap,
    psi1: &[C64],
    psi2: &[C64],
    alpha: f64,
    beta: f64,
) -> Result<SixVectorReport> {
    let dev = (vec_norm(psi1) - 1.0)
        .abs()
        .max((vec_norm(psi2) - 1.0).abs())
        .max(vec_inner(psi1, psi2).norm());
    if dev > 1e-10 {
        return Err(Error::NotOrthonormal(dev));
    }
    let psi = six_vectors(psi1, psi2, alpha, beta);
    let overlap = |i: usize, j: usize| vec_inner(&psi[i - 1], &psi[j - 1]).norm_sqr();
    let overlap_deviation = [(1, 3), (1, 4), (2, 3), (2, 4), (3, 5), (3, 6), (4, 5), (4, 6)]
        .iter()
        .map(|&(i, j)| (overlap(i, j) - 0.5).abs())
        .fold(0.0, f64::max);
    let p: Vec<ComplexMatrix> = psi.iter().map(|v| ComplexMatrix::projector(v)).collect();
    let half = |i: usize, j: usize| (&p[i - 1] + &p[j - 1]).scale_re(0.5);
    let mixture_deviation = half(1, 2)
        .max_abs_diff(&half(3, 4))
        .max(half(3, 4).max_abs_diff(&half(5, 6)));

    let checks: Vec<FactorizationCheck> = psi
        .iter()
        .map(|v| check_pure_state_factorization(l, v))
        .collect::<Result<_>>()?;
    let rb: Vec<&ComplexMatrix> = checks.iter().map(|c| &c.rho_b).collect();
    let mut factorization_residuals = [0.0; 6];
    let mut min_eigenvalues = [0.0; 6];
    for (k, c) in checks.iter().enumerate() {
        factorization_residuals[k] = c.residual;
        min_eigenvalues[k] = c.min_eigenvalue;
    }
    let mut max_pairwise_distance = 0.0;
    let mut worst_pair = (1, 1);
    for i in 0..6 {
        for j in i + 1..6 {
            let d = rb[i].max_abs_diff(rb[j]);
            if d > max_pairwise_distance {
                max_pairwise_distance = d;
                worst_pair = (i + 1, j + 1);
            }
        }
    }
    let avg = |i: usize, j: usize| (rb[i - 1] + rb[j - 1]).scale_re(0.5);
    let partial_mean_residuals = [
        rb[0].max_abs_diff(&avg(3, 4)),
        rb[1].max_abs_diff(&avg(3, 4)),
        rb[2].max_abs_diff(&avg(1, 2)),
    ];
    let second_set_residuals = [
        rb[2].max_abs_diff(&avg(5, 6)),
        rb[3].max_abs_diff(&avg(5, 6)),
        rb[4].max_abs_diff(&avg(3, 4)),
    ];
    Ok(SixVectorReport {
        overlap_deviation,
        mixture_deviation,
        factorization_residuals,
        min_eigenvalues,
        hypothesis_holds: checks.iter().all(|c| c.hypothesis_holds),
        max_pairwise_distance,
        worst_pair,
        partial_mean_residuals,
        second_set_residuals,
    })
}

/// Where a scanned state came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateSource {
    Random,
    SixVector,
}

/// Result of scanning pure states for a non-positive assigned matrix.
#[derive(Clone, Debug, Serialize)]
pub struct HuntReport {
    pub states_scanned: usize,
    pub worst_state: Vec<[f64; 2]>,
    pub worst_source: StateSource,
    pub min_eigenvalue: f64,
    pub max_factorization_residual: f64,
    /// `max |ρ_B(ψ) − ρ_B(ψ₀)|` over scanned states.
    pub max_rho_b_spread: f64,
    pub non_product: bool,
    pub violation_found: bool,
}

/// Angles used for the structured part of the scan.
const GRID_ALPHA: usize = 16;
const GRID_BETA: usize = 16;

fn structured_states(n: usize) -> Vec<Vec<C64>> {
    let basis = |i: usize| -> Vec<C64> { (0..n).map(|k| if k == i { ONE } else { ZERO }).collect() };
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (e1, e2) = (basis(i), basis(j));
            for a in 0..GRID_ALPHA {
                for b in 0..GRID_BETA {
                    let alpha = PI * a as f64 / GRID_ALPHA as f64;
                    let beta = 2.0 * PI * b as f64 / GRID_BETA as f64;
                    let six = six_vectors(&e1, &e2, alpha, beta);
                    out.extend(six.into_iter().skip(if a == 0 && b == 0 { 0 } else { 2 }));
                }
            }
        }
    }
    out
}

/// Scans `samples` seeded random pure states plus the six-vector states
/// built on pairs of computational basis vectors over an `(α, β)` grid.
pub fn hunt_positivity_failure(l: &AssignmentMap, samples: usize, seed: u64) -> Result<HuntReport> {
    let mut r = rng(seed);
    let mut states: Vec<(StateSource, Vec<C64>)> = (0..samples)
        .map(|_| (StateSource::Random, random_pure_state(&mut r, l.dim_a)))
        .collect();
    states.extend(
        structured_states(l.dim_a)
            .into_iter()
            .map(|s| (StateSource::SixVector, s)),
    );
    if states.is_empty() {
        return Err(Error::InvalidParameter("nothing to scan".into()));
    }
    let checks: Vec<FactorizationCheck> = states
        .par_iter()
        .map(|(_, s)| check_pure_state_factorization(l, s))
        .collect::<Result<_>>()?;

    let mut worst = 0;
    for (k, c) in checks.iter().enumerate() {
        if c.min_eigenvalue < checks[worst].min_eigenvalue {
            worst = k;
        }
    }
    let max_factorization_residual = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    let max_rho_b_spread = checks
        .iter()
        .map(|c| c.rho_b.max_abs_diff(&checks[0].rho_b))
        .fold(0.0, f64::max);
    let min_eig = checks[worst].min_eigenvalue;
    Ok(HuntReport {
        states_scanned: states.len(),
        worst_state: states[worst].1.iter().map(|z| [z.re, z.im]).collect(),
        worst_source: states[worst].0,
        min_eigenvalue: min_eig,
        max_factorization_residual,
        max_rho_b_spread,
        non_product: max_factorization_residual > NON_PRODUCT_TOL || max_rho_b_spread > NON_PRODUCT_TOL,
        violation_found: min_eig < -1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::random_density;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    fn rho_b() -> ComplexMatrix {
        ComplexMatrix::diag_real(&[0.7, 0.3])
    }

    fn ket(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn product_assignment_factorizes() {
        let l = AssignmentMap::product(2, &rho_b()).unwrap();
        assert!(l.partial_trace_deviation().unwrap() < 1e-14);
        let c = check_pure_state_factorization(&l, &ket(&[0.6, 0.8])).unwrap();
        assert!(c.residual < 1e-14);
        assert!(c.rho_b.max_abs_diff(&rho_b()) < 1e-14);
        assert!(c.hypothesis_holds);

        let mut r = rng(51);
        let rb = random_density(&mut r, 2);
        let l3 = AssignmentMap::product(3, &rb).unwrap();
        for _ in 0..20 {
            let psi = random_pure_state(&mut r, 3);
            let c = check_pure_state_factorization(&l3, &psi).unwrap();
            assert!(c.residual < 1e-12);
            assert!(c.rho_b.max_abs_diff(&rb) < 1e-12);
        }
    }

    #[test]
    fn apply_matches_definition() {
        let l = AssignmentMap::perturbed(2, &rho_b(), 0.1).unwrap();
        let mut r = rng(52);
        let x = random_density(&mut r, 2);
        let sigma3 = crate::matlin::pauli(3).unwrap();
        let xi3 = crate::matlin::pauli(3).unwrap();
        let expect = &tensor(&x, &rho_b())
            + &tensor(&ComplexMatrix::identity(2), xi3.matrix()).scale_re(0.1 * sigma3.expectation(&x) / 4.0);
        assert!(l.apply(&x).unwrap().max_abs_diff(&expect) < 1e-14);
        assert!(l.partial_trace_deviation().unwrap() < 1e-14);
        assert!(l.linearity_deviation(20, 3).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_inconsistent_assignments() {
        // X ↦ X ⊗ 1 doubles the trace
        let res = AssignmentMap::from_fn(2, 2, |x| tensor(x, &ComplexMatrix::identity(2)));
        assert!(matches!(res, Err(Error::InvalidParameter(_))));
        let res = AssignmentMap::from_fn(2, 2, |x| tensor(x, &ComplexMatrix::diag(&[ONE, I])));
        assert!(res.is_err());
        assert!(AssignmentMap::product(2, &ComplexMatrix::diag_real(&[1.2, -0.2])).is_err());
    }

    #[test]
    fn perturbation_breaks_factorization() {
        let l = AssignmentMap::perturbed(2, &rho_b(), 0.1).unwrap();
        let c = check_pure_state_factorization(&l, &ket(&[1.0, 0.0])).unwrap();
        assert_abs_diff_eq!(c.residual, 0.025, epsilon = 1e-14);
        assert_abs_diff_eq!(c.min_eigenvalue, -0.025, epsilon = 1e-12);
        assert!(!c.hypothesis_holds);
    }

    #[test]
    fn six_vector_overlaps() {
        let e1 = ket(&[1.0, 0.0]);
        let e2 = ket(&[0.0, 1.0]);
        let l = AssignmentMap::product(2, &rho_b()).unwrap();
        let rep = check_constant_rho_b(&l, &e1, &e2, FRAC_PI_4, 0.0).unwrap();
        assert!(rep.overlap_deviation < 1e-15);
        assert!(rep.mixture_deviation < 1e-15);
        assert!(rep.max_pairwise_distance < 1e-14);
        assert!(rep.hypothesis_holds);
        assert!(rep.partial_mean_residuals.iter().all(|r| *r < 1e-14));
        assert!(rep.second_set_residuals.iter().all(|r| *r < 1e-14));
        let six = six_vectors(&e1, &e2, FRAC_PI_4, 0.0);
        assert_abs_diff_eq!(vec_inner(&six[2], &six[4]).norm_sqr(), 0.5, epsilon = 1e-15);
        for (i, j) in [(2, 3), (4, 5)] {
            assert!(vec_inner(&six[i], &six[j]).norm() < 1e-15);
        }
    }

    #[test]
    fn six_vector_flags_violation() {
        let l = AssignmentMap::perturbed(2, &rho_b(), 0.1).unwrap();
        let rep = check_constant_rho_b(&l, &ket(&[1.0, 0.0]), &ket(&[0.0, 1.0]), 0.3, 1.1).unwrap();
        assert!(!rep.hypothesis_holds);
        assert!(rep.max_pairwise_distance > 1e-3);
        assert!(rep.worst_pair.0 < rep.worst_pair.1);
        assert!(check_constant_rho_b(&l, &ket(&[1.0, 0.0]), &ket(&[0.6, 0.8]), 0.3, 1.1).is_err());
    }

    #[test]
    fn hunt_product_finds_nothing() {
        let l = AssignmentMap::product(2, &rho_b()).unwrap();
        let rep = hunt_positivity_failure(&l, 500, 7).unwrap();
        assert!(rep.min_eigenvalue >= -1e-12);
        assert!(!rep.non_product);
        assert!(!rep.violation_found);
        assert!(rep.max_rho_b_spread < 1e-9);
    }

    #[test]
    fn hunt_perturbed_scaling() {
        for (eps, expect) in [(0.2, -0.05), (0.1, -0.025), (0.05, -0.0125)] {
            let l = AssignmentMap::perturbed(2, &rho_b(), eps).unwrap();
            let rep = hunt_positivity_failure(&l, 500, 7).unwrap();
            assert!(rep.non_product);
            assert!(rep.violation_found);
            assert_abs_diff_eq!(rep.min_eigenvalue, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn hunt_is_deterministic() {
        let l = AssignmentMap::perturbed(3, &ComplexMatrix::diag_real(&[0.5, 0.5]), 0.1).unwrap();
        let a = hunt_positivity_failure(&l, 200, 11).unwrap();
        let b = hunt_positivity_failure(&l, 200, 11).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.violation_found);
    }

    #[test]
    fn json_round_trip() {
        let l = AssignmentMap::perturbed(2, &rho_b(), 0.1).unwrap();
        let back = AssignmentMap::from_json(&l.to_json().unwrap()).unwrap();
        let mut r = rng(53);
        for _ in 0..5 {
            let x = random_density(&mut r, 2);
            assert!(back.apply(&x).unwrap().max_abs_diff(&l.apply(&x).unwrap()) < 1e-14);
        }
        let file = l.to_file().unwrap();
        assert_eq!(file.b_matrix.len(), 64);
        let short = AssignmentFile {
            b_matrix: file.b_matrix[..10].to_vec(),
            ..file
        };
        assert!(AssignmentMap::from_file(&short).is_err());
    }
}
