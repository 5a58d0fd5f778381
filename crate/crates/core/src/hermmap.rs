//! Linear maps of `N×N` matrices represented by their B-matrix.
//!
//! A map `Q ↦ Q'` is stored as the `N²×N²` matrix `B` with
//! `Q'_rs = Σ_jk B[(r,j),(s,k)] Q_jk`, composite index `(r,j) ↦ r·N + j`.
//! For `N = 2` the rows and columns are therefore ordered 11, 12, 21, 22.
//! Column `(s,k)` block of `B` is the image of the matrix unit `E_jk`:
//! `B[(r,j),(s,k)] = (E_jk')_rs`.
//!
//! A map sends Hermitian matrices to Hermitian matrices exactly when `B` is
//! Hermitian. Diagonalizing `B = Σ λ_n |n⟩⟨n|` and setting
//! `C(n)_rj = √|λ_n| ⟨rj|n⟩` gives the signed operator-sum form
//! `Q' = Σ sign(λ_n) C(n) Q C(n)†` with `Tr[C(m)†C(n)] = 0` for `m ≠ n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matlin::{eig_hermitian, hs_inner, ComplexMatrix, HermitianOperator, C64, HERMITIAN_TOL, ONE};

/// Eigenvalues of B with modulus below this are dropped from decompositions.
pub const KRAUS_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixMap {
    dim: usize,
    b: ComplexMatrix,
}

impl MatrixMap {
    pub fn new(dim: usize, b: ComplexMatrix) -> Result<Self> {
        let d2 = dim * dim;
        if dim == 0 || b.rows() != d2 || b.cols() != d2 {
            return Err(Error::DimensionMismatch(format!(
                "B-matrix for N = {dim} must be {d2}x{d2}, got {}x{}",
                b.rows(),
                b.cols()
            )));
        }
        Ok(Self { dim, b })
    }

    /// Builds B column by column from the images of the matrix units `E_jk`.
    /// The caller guarantees that `action` is linear.
    pub fn from_action(dim: usize, action: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let n = dim;
        let mut b = ComplexMatrix::zeros(n * n, n * n);
        for j in 0..n {
            for k in 0..n {
                let mut unit = ComplexMatrix::zeros(n, n);
                unit[(j, k)] = ONE;
                let image = action(&unit);
                if image.rows() != n || image.cols() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "action returned {}x{} for a {n}x{n} input",
                        image.rows(),
                        image.cols()
                    )));
                }
                for r in 0..n {
                    for s in 0..n {
                        b[(r * n + j, s * n + k)] = image[(r, s)];
                    }
                }
            }
        }
        Ok(Self { dim, b })
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_action(dim, Clone::clone).expect("identity preserves dimension")
    }

    pub fn transpose(dim: usize) -> Self {
        Self::from_action(dim, ComplexMatrix::transpose).expect("transpose preserves dimension")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn b_matrix(&self) -> &ComplexMatrix {
        &self.b
    }

    /// `B[(r,j),(s,k)]`
    pub fn entry(&self, r: usize, j: usize, s: usize, k: usize) -> C64 {
        let n = self.dim;
        self.b[(r * n + j, s * n + k)]
    }

    pub fn apply(&self, q: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dim;
        if q.rows() != n || q.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "map on {n}x{n} matrices applied to {}x{}",
                q.rows(),
                q.cols()
            )));
        }
        Ok(ComplexMatrix::from_fn(n, n, |r, s| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                for k in 0..n {
                    acc += self.b[(r * n + j, s * n + k)] * q[(j, k)];
                }
            }
            acc
        }))
    }

    /// Composition `other ∘ self`.
    pub fn then(&self, other: &MatrixMap) -> Result<MatrixMap> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch("composing maps of different dimension".into()));
        }
        Self::from_action(self.dim, |q| {
            other
                .apply(&self.apply(q).expect("dimension checked"))
                .expect("dimension checked")
        })
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.b.hermiticity_deviation()
    }

    pub fn is_hermiticity_preserving(&self) -> bool {
        self.hermiticity_deviation() <= HERMITIAN_TOL
    }

    fn hermitian_b(&self) -> Result<HermitianOperator> {
        HermitianOperator::new(self.b.clone())
    }

    /// Signed operator-sum decomposition.
    ///
    /// Terms with `λ ≥ 0` come first, then the negative ones; inside each
    /// block the order is by decreasing `|λ|`. Eigenvalues with
    /// `|λ| < KRAUS_CUTOFF` are dropped.
    pub fn signed_kraus(&self) -> Result<SignedKraus> {
        let n = self.dim;
        let es = eig_hermitian(&self.hermitian_b()?);
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for (lam, v) in es.eigenvalues.iter().zip(&es.eigenvectors) {
            if lam.abs() < KRAUS_CUTOFF {
                continue;
            }
            let weight = lam.abs().sqrt();
            let c = ComplexMatrix::from_fn(n, n, |r, j| v[r * n + j] * weight);
            let term = KrausTerm {
                sign: Sign::of(*lam),
                operator: c,
            };
            if *lam >= 0.0 {
                positive.push((*lam, term));
            } else {
                negative.push((*lam, term));
            }
        }
        // eigenvalues arrive in descending order
        negative.reverse();
        let (eigenvalues, terms) = positive.into_iter().chain(negative).unzip();
        Ok(SignedKraus {
            dim: n,
            terms,
            eigenvalues,
        })
    }

    pub fn min_b_eigenvalue(&self) -> Result<f64> {
        Ok(eig_hermitian(&self.hermitian_b()?).min_eigenvalue())
    }

    /// True iff B is Hermitian and its smallest eigenvalue is at least `-tol`.
    pub fn is_completely_positive(&self, tol: f64) -> bool {
        self.min_b_eigenvalue().map(|m| m >= -tol).unwrap_or(false)
    }

    /// Largest deviation of `Σ_r B[(r,j),(r,k)]` from `δ_jk`.
    pub fn trace_preservation_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let sum: C64 = (0..n).map(|r| self.entry(r, j, r, k)).sum();
                let target = if j == k { 1.0 } else { 0.0 };
                dev = dev.max((sum - target).norm());
            }
        }
        dev
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.trace_preservation_deviation() <= tol
    }

    /// The map `self ⊗ id_M` on `NM×NM` matrices, with the tensor ordering of
    /// [`crate::matlin::tensor`] (this map's factor outer).
    pub fn extend_with_identity(&self, anc_dim: usize) -> MatrixMap {
        let n = self.dim;
        let m = anc_dim;
        let nm = n * m;
        let mut b = ComplexMatrix::zeros(nm * nm, nm * nm);
        for r in 0..n {
            for j in 0..n {
                for s in 0..n {
                    for k in 0..n {
                        let val = self.entry(r, j, s, k);
                        if val == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for x in 0..m {
                            for y in 0..m {
                                let big_r = r * m + x;
                                let big_j = j * m + x;
                                let big_s = s * m + y;
                                let big_k = k * m + y;
                                b[(big_r * nm + big_j, big_s * nm + big_k)] = val;
                            }
                        }
                    }
                }
            }
        }
        MatrixMap { dim: nm, b }
    }

    pub fn to_file(&self) -> MapFile {
        MapFile {
            dim: self.dim,
            b_matrix: self.b.as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_file(file: &MapFile) -> Result<Self> {
        let data = file.b_matrix.iter().map(|&[re, im]| C64::new(re, im)).collect();
        let d2 = file.dim * file.dim;
        Self::new(file.dim, ComplexMatrix::new(d2, d2, data)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }
}

/// On-disk form of a [`MatrixMap`]: `b_matrix` lists `[re, im]` pairs in
/// row-major order over the composite indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub dim: usize,
    pub b_matrix: Vec<[f64; 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(x: f64) -> Self {
        if x >= 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct KrausTerm {
    pub sign: Sign,
    pub operator: ComplexMatrix,
}

/// `Q ↦ Σ sign_n C(n) Q C(n)†`, a difference of two completely positive maps.
#[derive(Clone, Debug)]
pub struct SignedKraus {
    pub dim: usize,
    pub terms: Vec<KrausTerm>,
    /// The B-matrix eigenvalue each term came from (same order as `terms`).
    pub eigenvalues: Vec<f64>,
}

impl SignedKraus {
    pub fn apply(&self, q: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for term in &self.terms {
            out = &out + &term.operator.conjugate(q).scale_re(term.sign.value());
        }
        out
    }

    pub fn signs(&self) -> Vec<Sign> {
        self.terms.iter().map(|t| t.sign).collect()
    }

    pub fn positive_count(&self) -> usize {
        self.terms.iter().filter(|t| t.sign == Sign::Plus).count()
    }

    /// `Σ sign_n C(n)†C(n)`, the identity for trace-preserving maps.
    pub fn completeness(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for term in &self.terms {
            let c = &term.operator;
            out = &out + &(&c.adjoint() * c).scale_re(term.sign.value());
        }
        out
    }

    pub fn completeness_deviation(&self) -> f64 {
        self.completeness().max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    /// Largest `|Tr[C(m)†C(n)]|` over `m ≠ n`.
    pub fn orthogonality_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (m, a) in self.terms.iter().enumerate() {
            for b in &self.terms[m + 1..] {
                let ip = hs_inner(&a.operator, &b.operator).expect("terms share a dimension");
                worst = worst.max(ip.norm());
            }
        }
        worst
    }

    pub fn to_map(&self) -> MatrixMap {
        MatrixMap::from_action(self.dim, |q| self.apply(q)).expect("terms share a dimension")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::{is_psd, pauli, tensor, ZERO};
    use crate::testing::{
        random_channel, random_density, random_hermitian, random_matrix, random_signed_conjugation_map, rng,
    };

    #[test]
    fn identity_map_b_matrix() {
        let id = MatrixMap::identity(3);
        for r in 0..3 {
            for j in 0..3 {
                for s in 0..3 {
                    for k in 0..3 {
                        let expect = if r == j && s == k { 1.0 } else { 0.0 };
                        assert_eq!(id.entry(r, j, s, k), C64::new(expect, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn transpose_map_is_swap() {
        // E_jk' = E_kj, so B[(r,j),(s,k)] = δ_rk δ_sj
        let t = MatrixMap::transpose(2);
        for r in 0..2 {
            for j in 0..2 {
                for s in 0..2 {
                    for k in 0..2 {
                        let expect = if r == k && s == j { 1.0 } else { 0.0 };
                        assert_eq!(t.entry(r, j, s, k).re, expect);
                    }
                }
            }
        }
    }

    #[test]
    fn apply_matches_action_and_is_linear() {
        let mut r = rng(1);
        let a = random_matrix(&mut r, 3, 3);
        let map = MatrixMap::from_action(3, |q| &(&a * q) * &a.adjoint()).unwrap();
        for _ in 0..10 {
            let q = random_matrix(&mut r, 3, 3);
            assert!(map.apply(&q).unwrap().max_abs_diff(&a.conjugate(&q)) < 1e-12);
        }
        let q1 = random_matrix(&mut r, 3, 3);
        let q2 = random_matrix(&mut r, 3, 3);
        let (al, be) = (C64::new(0.3, -1.2), C64::new(-0.7, 0.4));
        let lhs = map.apply(&(&q1.scale(al) + &q2.scale(be))).unwrap();
        let rhs = &map.apply(&q1).unwrap().scale(al) + &map.apply(&q2).unwrap().scale(be);
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        assert!(map.apply(&ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn kraus_of_identity() {
        let sk = MatrixMap::identity(2).signed_kraus().unwrap();
        assert_eq!(sk.terms.len(), 1);
        assert_eq!(sk.terms[0].sign, Sign::Plus);
        assert!((sk.eigenvalues[0] - 2.0).abs() < 1e-14);
        assert!(sk.terms[0].operator.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn kraus_of_transpose() {
        let sk = MatrixMap::transpose(2).signed_kraus().unwrap();
        assert_eq!(sk.signs(), vec![Sign::Plus, Sign::Plus, Sign::Plus, Sign::Minus]);
        for (lam, expect) in sk.eigenvalues.iter().zip([1.0, 1.0, 1.0, -1.0]) {
            assert!((lam - expect).abs() < 1e-13);
        }
        let mut r = rng(2);
        for _ in 0..10 {
            let q = random_matrix(&mut r, 2, 2);
            assert!(sk.apply(&q).max_abs_diff(&q.transpose()) < 1e-12);
        }
        assert!(!MatrixMap::transpose(2).is_completely_positive(1e-10));
    }

    #[test]
    fn non_hermitian_b_is_rejected() {
        // Q -> E_01 Q has non-Hermitian B
        let mut e = ComplexMatrix::zeros(2, 2);
        e[(0, 1)] = ONE;
        let map = MatrixMap::from_action(2, |q| &e * q).unwrap();
        assert!(matches!(map.signed_kraus(), Err(Error::NotHermitian(_))));
        assert!(!map.is_completely_positive(1e-10));
    }

    #[test]
    fn trace_preservation() {
        assert!(MatrixMap::identity(3).is_trace_preserving(1e-12));
        let zero = MatrixMap::from_action(2, |_| ComplexMatrix::zeros(2, 2)).unwrap();
        assert!(!zero.is_trace_preserving(1e-12));
        let mut r = rng(4);
        let m = random_signed_conjugation_map(&mut r, 3, 4);
        assert!(m.is_trace_preserving(1e-12));
        assert!((m.b_matrix().trace().re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn random_signed_maps_decompose() {
        let mut r = rng(7);
        for i in 0..100 {
            let n = 2 + i % 3;
            let map = random_signed_conjugation_map(&mut r, n, 1 + i % 4);
            let sk = map.signed_kraus().unwrap();
            assert!(sk.orthogonality_deviation() < 1e-10);
            assert!(sk.completeness_deviation() < 1e-10);
            for _ in 0..5 {
                let q = random_matrix(&mut r, n, n);
                assert!(sk.apply(&q).max_abs_diff(&map.apply(&q).unwrap()) < 1e-10);
            }
            let h = random_hermitian(&mut r, n);
            assert!(map.apply(&h).unwrap().hermiticity_deviation() < 1e-10);
        }
    }

    #[test]
    fn cp_maps_stay_positive_when_extended() {
        let mut r = rng(9);
        let map = random_channel(&mut r, 2, 3);
        assert!(map.is_completely_positive(1e-10));
        let ext = map.extend_with_identity(2);
        for _ in 0..50 {
            let rho = random_density(&mut r, 4);
            let out = ext.apply(&rho).unwrap();
            assert!(is_psd(&HermitianOperator::from_hermitian_part(&out), 1e-9));
        }
    }

    #[test]
    fn extension_acts_factorwise() {
        let mut r = rng(10);
        let map = random_signed_conjugation_map(&mut r, 2, 3);
        let ext = map.extend_with_identity(3);
        assert_eq!(ext.dim(), 6);
        assert!(
            MatrixMap::identity(2)
                .extend_with_identity(3)
                .b_matrix()
                .max_abs_diff(MatrixMap::identity(6).b_matrix())
                == 0.0
        );
        for _ in 0..5 {
            let x = random_matrix(&mut r, 2, 2);
            let y = random_matrix(&mut r, 3, 3);
            let got = ext.apply(&tensor(&x, &y)).unwrap();
            let expect = tensor(&map.apply(&x).unwrap(), &y);
            assert!(got.max_abs_diff(&expect) < 1e-12);
        }
    }

    #[test]
    fn transpose_extension_is_not_positive() {
        // partial transpose of a Bell projector has eigenvalue -1/2
        let mut bell = vec![ZERO; 4];
        bell[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        bell[3] = bell[0];
        let out = MatrixMap::transpose(2)
            .extend_with_identity(2)
            .apply(&ComplexMatrix::projector(&bell))
            .unwrap();
        let min = crate::matlin::min_eigenvalue(&HermitianOperator::new(out).unwrap());
        assert!((min + 0.5).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut r = rng(13);
        let map = random_signed_conjugation_map(&mut r, 3, 3);
        let back = MatrixMap::from_json(&map.to_json().unwrap()).unwrap();
        assert_eq!(map, back);
        let bad = r#"{"dim": 2, "b_matrix": [[1.0, 0.0]]}"#;
        assert!(MatrixMap::from_json(bad).is_err());
    }

    #[test]
    fn composition() {
        let p = pauli(1).unwrap().into_matrix();
        let flip = MatrixMap::from_action(2, |q| p.conjugate(q)).unwrap();
        let twice = flip.then(&flip).unwrap();
        assert!(twice.b_matrix().max_abs_diff(MatrixMap::identity(2).b_matrix()) < 1e-15);
    }
}
