//! Compatibility and positivity domains of the two-qubit example.
//!
//! Coordinates are taken along `Σ₊ = (⟨Σ₁Ξ₁⟩Σ₁ + ⟨Σ₂Ξ₁⟩Σ₂)/c` and
//! `Σ₋ = (⟨Σ₂Ξ₁⟩Σ₁ − ⟨Σ₁Ξ₁⟩Σ₂)/c` with `c = ⟨Σ₊Ξ₁⟩ = |a|`, so that
//! `⟨Σ₋Ξ₁⟩ = 0`. The compatibility domain is the set where
//!
//! ```text
//! √((s₋² + s₊² + c²)² − 4s₊²c²) ≤ 2 − 2s₃² − s₋² − s₊² − c²
//! ```
//!
//! and it equals the intersection over `t` of the positivity domains.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matlin::{pauli, tensor, ComplexMatrix, HermitianOperator};
use crate::twoqubit::{evolve_bloch, BlochVector, CorrelationParams};

/// Slack on membership inequalities so exact boundary points count as inside.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Components of `⟨Σ⟩` along `Σ₊`, `Σ₋`, `Σ₃`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RotatedBloch {
    pub s_plus: f64,
    pub s_minus: f64,
    pub s3: f64,
}

impl RotatedBloch {
    pub const fn new(s_plus: f64, s_minus: f64, s3: f64) -> Self {
        Self { s_plus, s_minus, s3 }
    }

    pub fn norm_sq(&self) -> f64 {
        self.s_plus * self.s_plus + self.s_minus * self.s_minus + self.s3 * self.s3
    }

    pub fn scaled(&self, q: f64) -> Self {
        Self::new(q * self.s_plus, q * self.s_minus, q * self.s3)
    }

    pub fn plus(&self, o: &Self) -> Self {
        Self::new(self.s_plus + o.s_plus, self.s_minus + o.s_minus, self.s3 + o.s3)
    }
}

/// `c = ⟨Σ₊Ξ₁⟩` and the angle `α` with `a₁ = c cos α`, `a₂ = c sin α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DomainSpec {
    pub c: f64,
    pub alpha: f64,
}

impl DomainSpec {
    pub fn new(c: f64, alpha: f64) -> Result<Self> {
        if !(c.is_finite() && alpha.is_finite()) || !(0.0..1.0).contains(&c) {
            return Err(Error::InvalidParameter(format!("c = {c} must lie in [0, 1)")));
        }
        Ok(Self { c, alpha })
    }

    pub fn from_params(p: &CorrelationParams) -> Result<Self> {
        Self::new(p.abs_a(), p.a2.atan2(p.a1))
    }

    /// `a = (−½, ½)`: `c = 1/√2`, `α = 3π/4`.
    pub fn half_half() -> Self {
        Self {
            c: FRAC_1_SQRT_2,
            alpha: 0.75 * PI,
        }
    }

    pub fn a1(&self) -> f64 {
        self.c * self.alpha.cos()
    }

    pub fn a2(&self) -> f64 {
        self.c * self.alpha.sin()
    }

    pub fn params(&self, omega_t: f64) -> CorrelationParams {
        CorrelationParams {
            a1: self.a1(),
            a2: self.a2(),
            omega_t,
        }
    }

    /// Unit vectors of `Σ₊` and `Σ₋` in the `(Σ₁, Σ₂)` plane; the identity at `c = 0`.
    pub fn axes(&self) -> ([f64; 2], [f64; 2]) {
        if self.c == 0.0 {
            return ([1.0, 0.0], [0.0, 1.0]);
        }
        let (s, c) = self.alpha.sin_cos();
        ([s, -c], [-c, -s])
    }
}

pub fn to_rotated(v: &BlochVector, spec: &DomainSpec) -> RotatedBloch {
    let (ep, em) = spec.axes();
    RotatedBloch::new(ep[0] * v.s1 + ep[1] * v.s2, em[0] * v.s1 + em[1] * v.s2, v.s3)
}

pub fn from_rotated(r: &RotatedBloch, spec: &DomainSpec) -> BlochVector {
    let (ep, em) = spec.axes();
    BlochVector::new(
        r.s_plus * ep[0] + r.s_minus * em[0],
        r.s_plus * ep[1] + r.s_minus * em[1],
        r.s3,
    )
}

/// Unsquared compatibility inequality with the right side required nonnegative.
pub fn in_compatibility(v: &RotatedBloch, c: f64) -> bool {
    let (sp2, sm2, c2) = (v.s_plus * v.s_plus, v.s_minus * v.s_minus, c * c);
    let rhs = 2.0 - 2.0 * v.s3 * v.s3 - sm2 - sp2 - c2;
    if rhs < -MEMBERSHIP_TOL {
        return false;
    }
    let lhs = ((sm2 + sp2 + c2).powi(2) - 4.0 * sp2 * c2).max(0.0).sqrt();
    lhs <= rhs + MEMBERSHIP_TOL
}

/// The squared form `s₋² + s₊² + s₃² + c² − s₊²c²/(1 − s₃²) ≤ 1`, which
/// also admits a spurious branch outside the compatibility domain.
pub fn satisfies_squared_form(v: &RotatedBloch, c: f64) -> bool {
    let rest = 1.0 - v.s3 * v.s3;
    let sp2c2 = v.s_plus * v.s_plus * c * c;
    if rest <= 0.0 {
        return sp2c2 == 0.0 && v.norm_sq() + c * c <= 1.0 + MEMBERSHIP_TOL;
    }
    v.s_minus * v.s_minus + v.s_plus * v.s_plus + v.s3 * v.s3 + c * c - sp2c2 / rest <= 1.0 + MEMBERSHIP_TOL
}

fn sigma_plus_minus(spec: &DomainSpec) -> (ComplexMatrix, ComplexMatrix) {
    let (ep, em) = spec.axes();
    let s1 = pauli(1).expect("σ1").into_matrix();
    let s2 = pauli(2).expect("σ2").into_matrix();
    (
        &s1.scale_re(ep[0]) + &s2.scale_re(ep[1]),
        &s1.scale_re(em[0]) + &s2.scale_re(em[1]),
    )
}

/// Two-qubit density matrix
/// `¼(1 + s₋Σ₋ + s₃Σ₃ + s₊Σ₊ + cΣ₊Ξ₁ + ⟨Ξ₁⟩Ξ₁ + s₃⟨Ξ₁⟩Σ₃Ξ₁)`
/// with `⟨Ξ₁⟩ = s₊c/(1 − s₃²)`, whose marginal is `v` and whose correlations
/// are `⟨Σ₊Ξ₁⟩ = c`, `⟨Σ₋Ξ₁⟩ = 0`.
pub fn compatibility_witness(v: &RotatedBloch, spec: &DomainSpec) -> Result<HermitianOperator> {
    if !in_compatibility(v, spec.c) {
        return Err(Error::OutsideDomain);
    }
    let id = ComplexMatrix::identity(2);
    let s3 = pauli(3)?.into_matrix();
    let x1 = pauli(1)?.into_matrix();
    let rest = 1.0 - v.s3 * v.s3;
    if rest <= MEMBERSHIP_TOL {
        // pole: only reachable with c = 0 and s₊ = s₋ = 0
        let rho = BlochVector::new(0.0, 0.0, v.s3.signum()).density_matrix();
        return HermitianOperator::new(tensor(&rho, &id.scale_re(0.5)));
    }
    let (sp, sm) = sigma_plus_minus(spec);
    let xi1 = v.s_plus * spec.c / rest;
    let terms = [
        (1.0, tensor(&id, &id)),
        (v.s_minus, tensor(&sm, &id)),
        (v.s3, tensor(&s3, &id)),
        (v.s_plus, tensor(&sp, &id)),
        (spec.c, tensor(&sp, &x1)),
        (xi1, tensor(&id, &x1)),
        (v.s3 * xi1, tensor(&s3, &x1)),
    ];
    let mut pi = ComplexMatrix::zeros(4, 4);
    for (w, m) in &terms {
        pi = &pi + &m.scale_re(0.25 * w);
    }
    HermitianOperator::new(pi)
}

/// A compatible product state `ρ ⊗ ½(1 + (c/s₊)Ξ₁)`, available when
/// `s₋ = 0`, `s₊² ≥ c²` and `s₃² ≤ 1 − s₊²`.
pub fn product_witness(v: &RotatedBloch, spec: &DomainSpec) -> Option<HermitianOperator> {
    let sp2 = v.s_plus * v.s_plus;
    if v.s_minus != 0.0 || sp2 == 0.0 || sp2 < spec.c * spec.c || v.s3 * v.s3 > 1.0 - sp2 + MEMBERSHIP_TOL {
        return None;
    }
    let rho = from_rotated(v, spec).density_matrix();
    let env = BlochVector::new(spec.c / v.s_plus, 0.0, 0.0).density_matrix();
    HermitianOperator::new(tensor(&rho, &env)).ok()
}

/// `|v| ≤ 1` and `|v'| ≤ 1` where `v'` is the evolved Bloch vector.
pub fn in_positivity(v: &BlochVector, p: &CorrelationParams) -> bool {
    v.norm_sq() <= 1.0 + MEMBERSHIP_TOL && evolve_bloch(v, p).norm_sq() <= 1.0 + MEMBERSHIP_TOL
}

/// Preimage of the unit-sphere point `(θ, φ)`:
/// `(−a₁ tan ωt + sin θ cos φ / cos ωt, −a₂ tan ωt + sin θ sin φ / cos ωt, cos θ)`.
pub fn positivity_boundary(p: &CorrelationParams, theta: f64, phi: f64) -> Result<BlochVector> {
    let (s, c) = p.omega_t.sin_cos();
    if c.abs() < 1e-12 {
        return Err(Error::InvalidParameter(
            "cos ωt = 0: the positivity domain is the slab s3² ≤ 1 − |a|² inside the unit ball".into(),
        ));
    }
    let t = s / c;
    let (st, ct) = theta.sin_cos();
    let (sf, cf) = phi.sin_cos();
    Ok(BlochVector::new(-p.a1 * t + st * cf / c, -p.a2 * t + st * sf / c, ct))
}

/// Whether the north pole `(0, 0, 1)` lies outside the positivity domain.
pub fn excludes_north_pole(p: &CorrelationParams) -> bool {
    !in_positivity(&BlochVector::new(0.0, 0.0, 1.0), p)
}

/// Point of the constant-`s₃` boundary ellipse at parameter `β`:
/// `s₊ = −√(1 − s₃²) sin β`, `s₋ = −√(1 − s₃² − c²) cos β`.
pub fn contour_point(c: f64, s3: f64, beta: f64) -> Result<RotatedBloch> {
    let minor = 1.0 - s3 * s3 - c * c;
    if minor < 0.0 {
        return Err(Error::InvalidParameter(format!("s3² = {} exceeds 1 − c²", s3 * s3)));
    }
    Ok(RotatedBloch::new(
        -(1.0 - s3 * s3).sqrt() * beta.sin(),
        -minor.sqrt() * beta.cos(),
        s3,
    ))
}

/// Phase at which a compatibility boundary point touches the positivity
/// boundary: `tan ωt = −c s₋ / (1 − s₃² − c²)`.
pub fn touching_phase(v: &RotatedBloch, c: f64) -> Result<f64> {
    let minor = 1.0 - v.s3 * v.s3 - c * c;
    if minor <= 0.0 {
        return Err(Error::InvalidParameter("degenerate contour".into()));
    }
    Ok((-c * v.s_minus).atan2(minor))
}

/// Named boundary curve of a planar section of the compatibility domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Section {
    /// `(s₋, s₃)` at `s₊ = 0`: circle of radius `√(1 − c²)`.
    Minus3,
    /// `(s₊, s₋)` at `s₃ = 0`: ellipse with semi-axes `1` and `√(1 − c²)`.
    PlusMinus,
    /// `(s₊, s₃)` at `s₋ = 0`: `s₃² ≤ 1 − max(s₊², c²)`.
    Plus3,
}

impl Section {
    pub fn name(&self) -> &'static str {
        match self {
            Section::Minus3 => "minus3",
            Section::PlusMinus => "plusminus",
            Section::Plus3 => "plus3",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "minus3" => Some(Section::Minus3),
            "plusminus" => Some(Section::PlusMinus),
            "plus3" => Some(Section::Plus3),
            _ => None,
        }
    }

    /// Closed boundary curve sampled at `points` parameter values, the
    /// first point repeated at the end.
    pub fn boundary(&self, c: f64, points: usize) -> Vec<(f64, f64)> {
        let minor = (1.0 - c * c).max(0.0).sqrt();
        let n = points.max(4);
        let angle = |k: usize| 2.0 * PI * (k % n) as f64 / n as f64;
        match self {
            Section::Minus3 => (0..=n)
                .map(|k| (minor * angle(k).cos(), minor * angle(k).sin()))
                .collect(),
            Section::PlusMinus => (0..=n).map(|k| (angle(k).cos(), minor * angle(k).sin())).collect(),
            Section::Plus3 => {
                // upper branch left to right, then lower branch back
                let half = n / 2;
                let upper = |u: f64| (1.0 - (u * u).max(c * c)).max(0.0).sqrt();
                let mut out = Vec::with_capacity(2 * half + 2);
                for k in 0..=half {
                    let u = -1.0 + 2.0 * k as f64 / half as f64;
                    out.push((u, upper(u)));
                }
                for k in (0..=half).rev() {
                    let u = -1.0 + 2.0 * k as f64 / half as f64;
                    out.push((u, -upper(u)));
                }
                out.push(out[0]);
                out
            }
        }
    }
}

/// Integer grid `k·step`, `|k| ≤ ⌊1/step⌋`, covering `[−1, 1]`.
pub fn grid_axis(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidParameter(format!("grid step {step} outside (0, 0.5]")));
    }
    let n = (1.0 / step + 1e-9).floor() as i64;
    Ok((-n..=n).map(|k| k as f64 * step).collect())
}

/// One membership-grid row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridPoint {
    pub s_plus: f64,
    pub s_minus: f64,
    pub s3: f64,
    pub in_domain: bool,
}

/// Compatibility membership on the full cube grid, ordered by `s₊`, then `s₋`, then `s₃`.
pub fn membership_grid(c: f64, step: f64) -> Result<Vec<GridPoint>> {
    let axis = grid_axis(step)?;
    let mut out = Vec::with_capacity(axis.len().pow(3));
    for &sp in &axis {
        for &sm in &axis {
            for &s3 in &axis {
                let in_domain = in_compatibility(&RotatedBloch::new(sp, sm, s3), c);
                out.push(GridPoint {
                    s_plus: sp,
                    s_minus: sm,
                    s3,
                    in_domain,
                });
            }
        }
    }
    Ok(out)
}

/// Result of comparing the compatibility domain with the intersection of
/// sampled positivity domains on a grid inside the unit ball.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub c: f64,
    pub alpha: f64,
    pub grid_step: f64,
    pub t_samples: usize,
    pub points_in_ball: usize,
    pub compatible: usize,
    /// Compatible points mapped outside the ball at a sampled phase, away from the boundary.
    pub compatible_not_positive: usize,
    /// Incompatible points positive at every sampled phase, away from the boundary.
    pub positive_not_compatible: usize,
    /// Mismatches with a point of the opposite compatibility status within one grid step.
    pub boundary_exceptions: usize,
    /// Largest distance to the opposite status over the boundary exceptions.
    pub max_exception_distance: f64,
}

impl EquivalenceReport {
    pub fn interior_violations(&self) -> usize {
        self.compatible_not_positive + self.positive_not_compatible
    }

    fn merge(mut self, o: Self) -> Self {
        self.points_in_ball += o.points_in_ball;
        self.compatible += o.compatible;
        self.compatible_not_positive += o.compatible_not_positive;
        self.positive_not_compatible += o.positive_not_compatible;
        self.boundary_exceptions += o.boundary_exceptions;
        self.max_exception_distance = self.max_exception_distance.max(o.max_exception_distance);
        self
    }
}

/// Fibonacci-sphere directions used to probe the neighbourhood of a grid point.
fn probe_directions(count: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Smallest probed distance `≤ step` at which compatibility differs from `status`.
fn distance_to_opposite(v: &RotatedBloch, c: f64, status: bool, step: f64, dirs: &[[f64; 3]]) -> Option<f64> {
    const FRACTIONS: [f64; 8] = [0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0];
    for f in FRACTIONS {
        let r = f * step;
        for d in dirs {
            let w = RotatedBloch::new(v.s_plus + r * d[0], v.s_minus + r * d[1], v.s3 + r * d[2]);
            if in_compatibility(&w, c) != status {
                return Some(r);
            }
        }
    }
    None
}

/// Grid check that compatibility coincides with positivity at all sampled
/// phases `2πk/t_samples`. Grid layers in `s₃` are scanned in parallel.
pub fn intersection_equals_compatibility(
    spec: &DomainSpec,
    grid_step: f64,
    t_samples: usize,
) -> Result<EquivalenceReport> {
    if t_samples < 8 {
        return Err(Error::InvalidParameter(format!(
            "t_samples = {t_samples} must be at least 8"
        )));
    }
    let axis = grid_axis(grid_step)?;
    let phases: Vec<CorrelationParams> = (0..t_samples)
        .map(|k| spec.params(2.0 * PI * k as f64 / t_samples as f64))
        .collect();
    let dirs = probe_directions(96);
    let c = spec.c;

    let layers: Vec<EquivalenceReport> = axis
        .par_iter()
        .map(|&s3| {
            let mut rep = EquivalenceReport::default();
            for &sp in &axis {
                for &sm in &axis {
                    let r = RotatedBloch::new(sp, sm, s3);
                    if r.norm_sq() > 1.0 + MEMBERSHIP_TOL {
                        continue;
                    }
                    rep.points_in_ball += 1;
                    let v = from_rotated(&r, spec);
                    let compatible = in_compatibility(&r, c);
                    let positive = phases.iter().all(|p| in_positivity(&v, p));
                    if compatible {
                        rep.compatible += 1;
                    }
                    if compatible == positive {
                        continue;
                    }
                    match distance_to_opposite(&r, c, compatible, grid_step, &dirs) {
                        Some(d) => {
                            rep.boundary_exceptions += 1;
                            rep.max_exception_distance = rep.max_exception_distance.max(d);
                        }
                        None if compatible => rep.compatible_not_positive += 1,
                        None => rep.positive_not_compatible += 1,
                    }
                }
            }
            rep
        })
        .collect();

    let base = EquivalenceReport {
        c,
        alpha: spec.alpha,
        grid_step,
        t_samples,
        ..Default::default()
    };
    Ok(layers.into_iter().fold(base, EquivalenceReport::merge))
}
