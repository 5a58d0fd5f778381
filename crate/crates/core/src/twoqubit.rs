//! Two qubits `Σ` and `Ξ` evolving under `H = ½ω Σ₃Ξ₁`.
//!
//! The `Σ` qubit's Bloch vector evolves affinely,
//!
//! ```text
//! ⟨Σ₁⟩' = ⟨Σ₁⟩ cos ωt + a₁ sin ωt,   a₁ = −⟨Σ₂Ξ₁⟩
//! ⟨Σ₂⟩' = ⟨Σ₂⟩ cos ωt + a₂ sin ωt,   a₂ =  ⟨Σ₁Ξ₁⟩
//! ⟨Σ₃⟩' = ⟨Σ₃⟩
//! ```
//!
//! and the linear extension `1' = 1 + (a₁Σ₁ + a₂Σ₂) sin ωt`, `Σ₁,₂' = Σ₁,₂ cos ωt`,
//! `Σ₃' = Σ₃` is trace- and Hermiticity-preserving but, for `a ≠ 0` and
//! `sin ωt ≠ 0`, has two negative B-matrix eigenvalues.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::hermmap::{KrausTerm, MatrixMap, Sign, SignedKraus, KRAUS_CUTOFF};
use crate::matlin::{hs_inner, min_eigenvalue, pauli, tensor, ComplexMatrix, HermitianOperator, C64, I, ONE, ZERO};

/// Slack allowed on `a₁² + a₂² ≤ 1`.
const PARAM_TOL: f64 = 1e-12;

/// Drive parameters of the two-qubit map: the initial correlations
/// `a₁ = −⟨Σ₂Ξ₁⟩`, `a₂ = ⟨Σ₁Ξ₁⟩` and the phase `ωt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationParams {
    pub a1: f64,
    pub a2: f64,
    pub omega_t: f64,
}

impl CorrelationParams {
    pub fn new(a1: f64, a2: f64, omega_t: f64) -> Result<Self> {
        if !(a1.is_finite() && a2.is_finite() && omega_t.is_finite()) {
            return Err(Error::InvalidParameter("parameters must be finite".into()));
        }
        if a1 * a1 + a2 * a2 > 1.0 + PARAM_TOL {
            return Err(Error::InvalidParameter(format!(
                "a1² + a2² = {} exceeds 1",
                a1 * a1 + a2 * a2
            )));
        }
        Ok(Self { a1, a2, omega_t })
    }

    /// Same correlations at a different phase.
    pub fn at(&self, omega_t: f64) -> Self {
        Self { omega_t, ..*self }
    }

    /// `a = a₁ + i a₂`
    pub fn a(&self) -> C64 {
        C64::new(self.a1, self.a2)
    }

    pub fn abs_a_sq(&self) -> f64 {
        self.a1 * self.a1 + self.a2 * self.a2
    }

    pub fn abs_a(&self) -> f64 {
        self.abs_a_sq().sqrt()
    }

    /// Reads `a₁ = −⟨Σ₂Ξ₁⟩`, `a₂ = ⟨Σ₁Ξ₁⟩` off a two-qubit density matrix.
    pub fn from_state(pi: &ComplexMatrix, omega_t: f64) -> Result<Self> {
        let s2x1 = two_qubit_mean(pi, 2, 1)?;
        let s1x1 = two_qubit_mean(pi, 1, 1)?;
        Self::new(-s2x1, s1x1, omega_t)
    }

    // 1 + cos ωt and 1 − cos ωt without cancellation
    fn one_plus_cos(&self) -> f64 {
        2.0 * (0.5 * self.omega_t).cos().powi(2)
    }

    fn one_minus_cos(&self) -> f64 {
        2.0 * (0.5 * self.omega_t).sin().powi(2)
    }

    /// `¼|a|² sin² ωt`
    fn quarter_drive_sq(&self) -> f64 {
        0.25 * self.abs_a_sq() * self.omega_t.sin().powi(2)
    }
}

/// Mean values `⟨Σ₁⟩, ⟨Σ₂⟩, ⟨Σ₃⟩` of a single qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl BlochVector {
    pub const fn new(s1: f64, s2: f64, s3: f64) -> Self {
        Self { s1, s2, s3 }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.s1, self.s2, self.s3]
    }

    pub fn norm_sq(&self) -> f64 {
        self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `ρ = ½(1 + ⟨Σ⟩·Σ)`
    pub fn density_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![
                C64::new(0.5 * (1.0 + self.s3), 0.0),
                C64::new(0.5 * self.s1, -0.5 * self.s2),
            ],
            vec![
                C64::new(0.5 * self.s1, 0.5 * self.s2),
                C64::new(0.5 * (1.0 - self.s3), 0.0),
            ],
        ])
        .expect("2x2 literal")
    }

    /// `⟨Σ_k⟩ = Tr[Σ_k ρ]`
    pub fn from_density(rho: &ComplexMatrix) -> Result<Self> {
        let mean = |k| -> Result<f64> { Ok(hs_inner(pauli(k)?.matrix(), rho)?.re) };
        Ok(Self::new(mean(1)?, mean(2)?, mean(3)?))
    }

    pub fn scaled(&self, q: f64) -> Self {
        Self::new(q * self.s1, q * self.s2, q * self.s3)
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self::new(self.s1 + other.s1, self.s2 + other.s2, self.s3 + other.s3)
    }
}

/// Affine image of the Bloch vector after phase `ωt`.
pub fn evolve_bloch(v: &BlochVector, p: &CorrelationParams) -> BlochVector {
    let (s, c) = p.omega_t.sin_cos();
    BlochVector::new(v.s1 * c + p.a1 * s, v.s2 * c + p.a2 * s, v.s3)
}

/// The linear map sending `1, Σ₁, Σ₂, Σ₃` to the four given images.
pub fn map_from_pauli_images(images: &[ComplexMatrix; 4]) -> Result<MatrixMap> {
    let paulis = [
        pauli(1)?.into_matrix(),
        pauli(2)?.into_matrix(),
        pauli(3)?.into_matrix(),
    ];
    MatrixMap::from_action(2, |q| {
        // Q = ½(Tr Q · 1 + Σ_k Tr[Σ_k Q] Σ_k)
        let mut out = images[0].scale(q.trace() * 0.5);
        for (k, sk) in paulis.iter().enumerate() {
            let coeff = hs_inner(sk, q).expect("2x2") * 0.5;
            out = &out + &images[k + 1].scale(coeff);
        }
        out
    })
}

/// B-matrix of the reduced map, rows and columns ordered 11, 12, 21, 22:
///
/// ```text
/// ⎡ 1           0           ½a* sin ωt  cos ωt     ⎤
/// ⎢ 0           0           0           ½a* sin ωt ⎥
/// ⎢ ½a sin ωt   0           0           0          ⎥
/// ⎣ cos ωt      ½a sin ωt   0           1          ⎦
/// ```
pub fn reduced_map(p: &CorrelationParams) -> MatrixMap {
    let (s, c) = p.omega_t.sin_cos();
    let h = p.a() * (0.5 * s);
    let hc = h.conj();
    let cc = C64::new(c, 0.0);
    let b = ComplexMatrix::from_rows(&[
        vec![ONE, ZERO, hc, cc],
        vec![ZERO, ZERO, ZERO, hc],
        vec![h, ZERO, ZERO, ZERO],
        vec![cc, h, ZERO, ONE],
    ])
    .expect("4x4 literal");
    MatrixMap::new(2, b).expect("4x4 B-matrix")
}

/// Closed-form spectrum of the reduced map's B-matrix.
///
/// Labels follow the two eigenvector families: `λ₁ ≥ 0 ≥ λ₃` belong to
/// `(λ, ½a* sin ωt, ½a sin ωt, λ)` and `λ₂ ≥ 0 ≥ λ₄` to
/// `(λ, −½a* sin ωt, ½a sin ωt, −λ)`. The labels are not sorted across
/// families: `λ₂ > λ₁` and `λ₄ < λ₃` whenever `cos ωt < 0`.
#[derive(Clone, Debug)]
pub struct AnalyticEigensystem {
    pub eigenvalues: [f64; 4],
    /// Normalized eigenvectors `|n⟩`.
    pub eigenvectors: [[C64; 4]; 4],
    /// `‖ψ_n‖²` of the unnormalized eigenvectors.
    pub norms_sq: [f64; 4],
}

impl AnalyticEigensystem {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[2].min(self.eigenvalues[3])
    }
}

pub fn analytic_eigensystem(p: &CorrelationParams) -> AnalyticEigensystem {
    let u_plus = p.one_plus_cos();
    let u_minus = p.one_minus_cos();
    let x = p.quarter_drive_sq();
    let h = p.a() * (0.5 * p.omega_t.sin());
    let hc = h.conj();

    // λ² − uλ − x = 0; the small root is −x/λ_big to avoid cancellation.
    let big = |u: f64| 0.5 * (u + (u * u + 4.0 * x).sqrt());
    let small = |b: f64| if b > 0.0 { -x / b } else { 0.0 };
    let l1 = big(u_plus);
    let l3 = small(l1);
    let l2 = big(u_minus);
    let l4 = small(l2);
    let eigenvalues = [l1, l2, l3, l4];

    let re = |v: f64| C64::new(v, 0.0);
    let raw: [[C64; 4]; 4] = if x > 0.0 {
        [
            [re(l1), hc, h, re(l1)],
            [re(l2), -hc, h, re(-l2)],
            [re(l3), hc, h, re(l3)],
            [re(l4), -hc, h, re(-l4)],
        ]
    } else {
        // a sin ωt = 0: B is block diagonal on {11, 22} and zero on {12, 21}
        [
            [ONE, ZERO, ZERO, ONE],
            [ONE, ZERO, ZERO, -ONE],
            [ZERO, ONE, ONE, ZERO],
            [ZERO, -ONE, ONE, ZERO],
        ]
    };
    let mut eigenvectors = raw;
    let mut norms_sq = [0.0; 4];
    for (n, v) in eigenvectors.iter_mut().enumerate() {
        norms_sq[n] = v.iter().map(|z| z.norm_sqr()).sum();
        let norm = norms_sq[n].sqrt();
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
    AnalyticEigensystem {
        eigenvalues,
        eigenvectors,
        norms_sq,
    }
}

/// Closed-form signed Kraus operators
///
/// ```text
/// C(n) = √(|λ_n| / (2λ_n(1 + cos ωt) + |a|² sin² ωt)) [λ_n + ½(a₁Σ₁ + a₂Σ₂) sin ωt]       n = 1, 3
/// C(n) = √(|λ_n| / (2λ_n(1 − cos ωt) + |a|² sin² ωt)) [λ_n Σ₃ + ½i(a₂Σ₁ − a₁Σ₂) sin ωt]   n = 2, 4
/// ```
///
/// with signs `(+, +, −, −)`. When `a sin ωt = 0` the map is completely
/// positive with `C(1) = √((1 + cos ωt)/2)·1`, `C(2) = √((1 − cos ωt)/2)·Σ₃`.
/// Terms with `|λ_n| < KRAUS_CUTOFF` are dropped.
pub fn analytic_kraus(p: &CorrelationParams) -> SignedKraus {
    let s1 = pauli(1).expect("σ1").into_matrix();
    let s2 = pauli(2).expect("σ2").into_matrix();
    let s3 = pauli(3).expect("σ3").into_matrix();
    let id = ComplexMatrix::identity(2);
    let mut terms = Vec::new();
    let mut eigenvalues = Vec::new();

    if p.quarter_drive_sq() == 0.0 {
        let u_plus = p.one_plus_cos();
        let u_minus = p.one_minus_cos();
        for (lam, op) in [
            (u_plus, id.scale_re((0.5 * u_plus).sqrt())),
            (u_minus, s3.scale_re((0.5 * u_minus).sqrt())),
        ] {
            if lam >= KRAUS_CUTOFF {
                terms.push(KrausTerm {
                    sign: Sign::Plus,
                    operator: op,
                });
                eigenvalues.push(lam);
            }
        }
        return SignedKraus {
            dim: 2,
            terms,
            eigenvalues,
        };
    }

    let sin = p.omega_t.sin();
    let drive_sq = p.abs_a_sq() * sin * sin;
    let es = analytic_eigensystem(p);
    let rotating = (&s1.scale_re(p.a1) + &s2.scale_re(p.a2)).scale_re(0.5 * sin);
    let transverse = (&s1.scale_re(p.a2) - &s2.scale_re(p.a1)).scale(I * (0.5 * sin));
    for (n, &lam) in es.eigenvalues.iter().enumerate() {
        if lam.abs() < KRAUS_CUTOFF {
            continue;
        }
        let (u, body) = if n % 2 == 0 {
            (p.one_plus_cos(), &id.scale_re(lam) + &rotating)
        } else {
            (p.one_minus_cos(), &s3.scale_re(lam) + &transverse)
        };
        let weight = (lam.abs() / (2.0 * lam * u + drive_sq)).sqrt();
        terms.push(KrausTerm {
            sign: Sign::of(lam),
            operator: body.scale_re(weight),
        });
        eigenvalues.push(lam);
    }
    SignedKraus {
        dim: 2,
        terms,
        eigenvalues,
    }
}

/// Leading small-`ωt` behaviour of the spectrum and Kraus operators.
#[derive(Clone, Debug)]
pub struct SmallTimeSeries {
    pub eigenvalues: [f64; 4],
    pub kraus: [ComplexMatrix; 4],
}

/// Truncated series for small `ωt > 0` and `|a| > 0`:
///
/// ```text
/// λ₁ = 2 − ½(ωt)² + ⅛|a|²(ωt)²
/// λ₂ = ½|a|ωt + ¼(ωt)² + (ωt)³/(16|a|)
/// λ₃ = −⅛|a|²(ωt)²
/// λ₄ = −½|a|ωt + ¼(ωt)² − (ωt)³/(16|a|)
/// ```
///
/// The λ₂, λ₄ expansions omit a `∓|a|(ωt)³/12` contribution, so they agree
/// with the exact values to `O((ωt)³)`.
pub fn small_t_series(p: &CorrelationParams) -> Result<SmallTimeSeries> {
    let m = p.abs_a();
    if m == 0.0 {
        return Err(Error::InvalidParameter("small-time series needs |a| > 0".into()));
    }
    let x = p.omega_t;
    if x <= 0.0 {
        return Err(Error::InvalidParameter("small-time series needs ωt > 0".into()));
    }
    let a_sq = m * m;
    let eigenvalues = [
        2.0 - 0.5 * x * x + a_sq * x * x / 8.0,
        0.5 * m * x + 0.25 * x * x + x.powi(3) / (16.0 * m),
        -a_sq * x * x / 8.0,
        -0.5 * m * x + 0.25 * x * x - x.powi(3) / (16.0 * m),
    ];

    let s1 = pauli(1)?.into_matrix();
    let s2 = pauli(2)?.into_matrix();
    let s3 = pauli(3)?.into_matrix();
    let id = ComplexMatrix::identity(2);
    let a_sigma = &s1.scale_re(p.a1) + &s2.scale_re(p.a2);
    let transverse = (&s1.scale_re(p.a2) - &s2.scale_re(p.a1)).scale(I);
    let half = x.sqrt();
    let three_halves = x.powf(1.5);
    let c1 = &id.scale_re(1.0 - x * x / 8.0) + &a_sigma.scale_re(x / 4.0);
    let c3 = &id.scale_re(-a_sq * x * x / 16.0) + &a_sigma.scale_re(x / 4.0);
    let off = transverse.scale_re((1.0 / (8.0 * m)).sqrt() * half);
    let c2 = &s3.scale_re((m / 8.0).sqrt() * (half + three_halves / (2.0 * m))) + &off;
    let c4 = &s3.scale_re((m / 8.0).sqrt() * (-half + three_halves / (2.0 * m))) + &off;
    Ok(SmallTimeSeries {
        eigenvalues,
        kraus: [c1, c2, c3, c4],
    })
}

/// Image `P'` of the positive matrix `P = ½(1 + Σ₃)` and its smallest eigenvalue.
#[derive(Clone, Debug)]
pub struct WitnessP {
    pub p_prime: HermitianOperator,
    pub min_eigenvalue: f64,
}

/// `P' = ½(1 + (a₁Σ₁ + a₂Σ₂) sin ωt + Σ₃)`; at `ωt = π/2` its smallest
/// eigenvalue is `½(1 − √(1 + r²))`, negative for every `r = |a| > 0`.
pub fn witness_p(p: &CorrelationParams) -> Result<WitnessP> {
    if p.abs_a_sq() == 0.0 {
        return Err(Error::InvalidParameter("witness P' needs a ≠ 0".into()));
    }
    let image = reduced_map(p).apply(&BlochVector::new(0.0, 0.0, 1.0).density_matrix())?;
    let p_prime = HermitianOperator::new(image)?;
    let min_eigenvalue = min_eigenvalue(&p_prime);
    Ok(WitnessP {
        p_prime,
        min_eigenvalue,
    })
}

/// `½(1 − √(1 + r² sin² ωt))`
pub fn witness_p_min_closed_form(p: &CorrelationParams) -> f64 {
    0.5 * (1.0 - (1.0 + p.abs_a_sq() * p.omega_t.sin().powi(2)).sqrt())
}

/// `W = ¼(1 + Σ₂/√2 + Σ₃Ξ₃/√2)`, a density matrix with `W² = ½W`.
pub fn witness_w_operator() -> HermitianOperator {
    let id = ComplexMatrix::identity(2);
    let s2 = pauli(2).expect("σ2").into_matrix();
    let s3 = pauli(3).expect("σ3").into_matrix();
    let w = &(&ComplexMatrix::identity(4) + &tensor(&s2, &id).scale_re(FRAC_1_SQRT_2))
        + &tensor(&s3, &s3).scale_re(FRAC_1_SQRT_2);
    HermitianOperator::new(w.scale_re(0.25)).expect("W is Hermitian")
}

/// Largest entry of `W² − ½W`.
pub fn witness_w_projector_deviation() -> f64 {
    let w = witness_w_operator();
    (w.matrix() * w.matrix()).max_abs_diff(&w.scale(0.5))
}

/// `Tr[Π'W] = ¼(1 + ⟨Σ₁Ξ₁⟩/√2 + ⟨Σ₃Ξ₃⟩/√2)` for the extended map at `ωt = π/2`.
pub fn witness_w(sigma1_xi1: f64, sigma3_xi3: f64) -> Result<f64> {
    for v in [sigma1_xi1, sigma3_xi3] {
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!("correlation {v} outside [-1, 1]")));
        }
    }
    debug_assert!(witness_w_projector_deviation() < 1e-15);
    Ok(0.25 * (1.0 + (sigma1_xi1 + sigma3_xi3) * FRAC_1_SQRT_2))
}

/// `Tr[((map ⊗ id)Π) W]` with the map's parameters read off `Π` itself.
pub fn pairing_with_w(pi: &ComplexMatrix, omega_t: f64) -> Result<f64> {
    let p = CorrelationParams::from_state(pi, omega_t)?;
    let image = reduced_map(&p).extend_with_identity(2).apply(pi)?;
    Ok(hs_inner(witness_w_operator().matrix(), &image)?.re)
}

/// The alternative completely positive map for product-like initial states:
/// `1' = 1`, `Σ₁' = ⟨Ξ₁⟩Σ₂`, `Σ₂' = −⟨Ξ₁⟩Σ₁`, `Σ₃' = Σ₃`.
pub fn product_state_map(xi1: f64) -> Result<MatrixMap> {
    if !(-1.0..=1.0).contains(&xi1) {
        return Err(Error::InvalidParameter(format!("⟨Ξ₁⟩ = {xi1} outside [-1, 1]")));
    }
    let s1 = pauli(1)?.into_matrix();
    let s2 = pauli(2)?.into_matrix();
    let s3 = pauli(3)?.into_matrix();
    map_from_pauli_images(&[ComplexMatrix::identity(2), s2.scale_re(xi1), s1.scale_re(-xi1), s3])
}

/// `Π = ¼(1 + Σ s_j Σ_j + Σ x_k Ξ_k + Σ z_jk Σ_j Ξ_k)`
pub fn two_qubit_state(sigma: [f64; 3], xi: [f64; 3], corr: [[f64; 3]; 3]) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let p: Vec<ComplexMatrix> = (1..=3).map(|k| pauli(k).expect("pauli").into_matrix()).collect();
    let mut pi = ComplexMatrix::identity(4);
    for j in 0..3 {
        pi = &pi + &tensor(&p[j], &id).scale_re(sigma[j]);
        pi = &pi + &tensor(&id, &p[j]).scale_re(xi[j]);
        for k in 0..3 {
            pi = &pi + &tensor(&p[j], &p[k]).scale_re(corr[j][k]);
        }
    }
    pi.scale_re(0.25)
}

/// `⟨Σ_jΞ_k⟩`, with index 0 standing for the identity on that factor.
pub fn two_qubit_mean(pi: &ComplexMatrix, j: usize, k: usize) -> Result<f64> {
    let factor = |i: usize| -> Result<ComplexMatrix> {
        if i == 0 {
            Ok(ComplexMatrix::identity(2))
        } else {
            Ok(pauli(i)?.into_matrix())
        }
    };
    Ok(hs_inner(&tensor(&factor(j)?, &factor(k)?), pi)?.re)
}

/// The singlet `¼(1 − Σ₁Ξ₁ − Σ₂Ξ₂ − Σ₃Ξ₃)`.
pub fn singlet() -> ComplexMatrix {
    two_qubit_state(
        [0.0; 3],
        [0.0; 3],
        [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]],
    )
}
