//! Reduced dynamics of the first factor of a bipartite system in the
//! Heisenberg picture.
//!
//! With orthonormal Hermitian bases `F_{μ0}` (dimension `N`) and `F_{0ν}`
//! (dimension `M`), `Tr[F_{μ0}F_{ν0}] = N δ_{μν}`, the products
//! `F_{μν} = F_{μ0} ⊗ F_{0ν}` evolve as
//!
//! ```text
//! e^{iHt} F_{μν} e^{−iHt} = Σ t_{μν;αβ} F_{αβ}
//! ```
//!
//! and the mean values of the first factor follow the affine map
//! `⟨F_{μ0}⟩' = d_μ + Σ_α t_{μ0;α0} ⟨F_{α0}⟩` with drift
//! `d_μ = Σ_{α, β≥1} t_{μ0;αβ} ⟨F_{αβ}⟩`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermmap::MatrixMap;
use crate::matlin::{
    hs_inner, is_psd, matrix_exp_unitary, partial_trace, pauli, tensor, ComplexMatrix, HermitianOperator, Subsystem,
    C64, I, ONE,
};

/// Gram–Schmidt residual (relative Frobenius norm) below which a seed counts as dependent.
pub const DEPENDENCE_TOL: f64 = 1e-10;

/// Orthonormal Hermitian basis `F_0 = 1, F_1, …, F_{N²−1}` with `Tr[F_μF_ν] = N δ_{μν}`.
#[derive(Clone, Debug)]
pub struct OperatorBasis {
    dim: usize,
    elements: Vec<HermitianOperator>,
}

impl OperatorBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn element(&self, mu: usize) -> &HermitianOperator {
        &self.elements[mu]
    }

    /// `x_μ = Tr[F_μ X]`, complex for non-Hermitian `X`.
    pub fn coordinates(&self, x: &ComplexMatrix) -> Result<Vec<C64>> {
        self.elements.iter().map(|f| hs_inner(f.matrix(), x)).collect()
    }

    /// Mean values `⟨F_μ⟩`, `μ ≥ 1`.
    pub fn mean_values(&self, rho: &ComplexMatrix) -> Result<Vec<f64>> {
        Ok(self.coordinates(rho)?.into_iter().skip(1).map(|z| z.re).collect())
    }

    /// `(1/N) Σ x_μ F_μ`
    pub fn from_coordinates(&self, x: &[C64]) -> Result<ComplexMatrix> {
        if x.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for a basis of {}",
                x.len(),
                self.len()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (f, &c) in self.elements.iter().zip(x) {
            out = &out + &f.matrix().scale(c / self.dim as f64);
        }
        Ok(out)
    }

    /// `ρ = (1/N)(1 + Σ_{μ≥1} ⟨F_μ⟩ F_μ)`
    pub fn density_from_means(&self, means: &[f64]) -> Result<ComplexMatrix> {
        let coords: Vec<C64> = std::iter::once(ONE)
            .chain(means.iter().map(|&m| C64::new(m, 0.0)))
            .collect();
        self.from_coordinates(&coords)
    }
}

/// Generalized Gell-Mann seeds: symmetric `E_jk + E_kj`, then antisymmetric
/// `−i(E_jk − E_kj)` for `j < k`, then the traceless diagonals.
pub fn gell_mann_seeds(dim: usize) -> Vec<HermitianOperator> {
    let mut sym = Vec::new();
    let mut anti = Vec::new();
    for j in 0..dim {
        for k in j + 1..dim {
            let mut s = ComplexMatrix::zeros(dim, dim);
            s[(j, k)] = ONE;
            s[(k, j)] = ONE;
            sym.push(HermitianOperator::new(s).expect("symmetric"));
            let mut a = ComplexMatrix::zeros(dim, dim);
            a[(j, k)] = -I;
            a[(k, j)] = I;
            anti.push(HermitianOperator::new(a).expect("antisymmetric"));
        }
    }
    let diag = (1..dim).map(|l| {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let values: Vec<f64> = (0..dim)
            .map(|i| match i.cmp(&l) {
                std::cmp::Ordering::Less => norm,
                std::cmp::Ordering::Equal => -(l as f64) * norm,
                std::cmp::Ordering::Greater => 0.0,
            })
            .collect();
        HermitianOperator::diag(&values)
    });
    sym.into_iter().chain(anti).chain(diag).collect()
}

/// Gram–Schmidt on `1, seeds…` under `Tr[A†B]`, each result scaled to `Tr[F²] = N`.
pub fn build_basis(dim: usize, seeds: Option<&[HermitianOperator]>) -> Result<OperatorBasis> {
    if dim == 0 {
        return Err(Error::InvalidParameter("basis dimension must be positive".into()));
    }
    let default;
    let seeds = match seeds {
        Some(s) => s,
        None => {
            default = gell_mann_seeds(dim);
            &default[..]
        }
    };
    if seeds.len() != dim * dim - 1 {
        return Err(Error::DimensionMismatch(format!(
            "need {} seeds, got {}",
            dim * dim - 1,
            seeds.len()
        )));
    }
    let n = dim as f64;
    let mut elements = vec![HermitianOperator::identity(dim)];
    for seed in seeds {
        if seed.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "seed of dimension {} for basis of {dim}",
                seed.dim()
            )));
        }
        let scale = seed.frobenius_norm();
        let mut r = seed.matrix().clone();
        for f in &elements {
            let overlap = hs_inner(f.matrix(), &r)?.re / n;
            r = &r - &f.matrix().scale_re(overlap);
        }
        let residual = r.frobenius_norm();
        if scale == 0.0 || residual < DEPENDENCE_TOL * scale {
            return Err(Error::LinearlyDependent(residual / scale.max(f64::MIN_POSITIVE)));
        }
        elements.push(HermitianOperator::from_hermitian_part(&r.scale_re(n.sqrt() / residual)));
    }
    Ok(OperatorBasis { dim, elements })
}

/// Composite basis `F_{μν} = F_{μ0} ⊗ F_{0ν}` at index `μ·M² + ν`.
pub fn composite_basis(a: &OperatorBasis, b: &OperatorBasis) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for fa in a.elements() {
        for fb in b.elements() {
            out.push(tensor(fa.matrix(), fb.matrix()));
        }
    }
    out
}

/// Real orthogonal matrix `t_{μν;αβ}` with row `μ·M² + ν` and column `α·M² + β`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    dim_a: usize,
    dim_b: usize,
    time: f64,
    size: usize,
    entries: Vec<f64>,
}

impl TransferMatrix {
    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn idx(&self, mu: usize, nu: usize) -> usize {
        mu * self.dim_b * self.dim_b + nu
    }

    pub fn get(&self, mu: usize, nu: usize, alpha: usize, beta: usize) -> f64 {
        self.entries[self.idx(mu, nu) * self.size + self.idx(alpha, beta)]
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.size + col]
    }

    pub fn transpose(&self) -> Self {
        let n = self.size;
        let entries = (0..n * n).map(|k| self.entries[(k % n) * n + k / n]).collect();
        Self {
            time: -self.time,
            entries,
            ..*self
        }
    }

    /// Matrix product `self · other`: evolution for `self.time` then `other.time`
    /// under the same Hamiltonian.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.size != other.size {
            return Err(Error::DimensionMismatch("transfer matrices of different sizes".into()));
        }
        let n = self.size;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        Ok(Self {
            time: self.time + other.time,
            entries,
            ..*self
        })
    }

    /// `max |tᵀt − 1|`
    pub fn orthogonality_deviation(&self) -> f64 {
        let n = self.size;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| self.entries[k * n + i] * self.entries[k * n + j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((dot - expect).abs());
            }
        }
        dev
    }

    /// Largest departure of row `00` and column `00` from the unit vector.
    pub fn unit_row_column_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for k in 0..self.size {
            let expect = if k == 0 { 1.0 } else { 0.0 };
            dev = dev
                .max((self.entry(0, k) - expect).abs())
                .max((self.entry(k, 0) - expect).abs());
        }
        dev
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `Σ_{αβ} t_{μν;αβ} F_{αβ}`
    pub fn evolved(&self, mu: usize, nu: usize, composite: &[ComplexMatrix]) -> ComplexMatrix {
        let row = self.idx(mu, nu);
        let d = self.dim_a * self.dim_b;
        let mut out = ComplexMatrix::zeros(d, d);
        for (col, f) in composite.iter().enumerate() {
            let t = self.entries[row * self.size + col];
            if t != 0.0 {
                out = &out + &f.scale_re(t);
            }
        }
        out
    }

    /// Largest deviation of `Σ t_{μν;αβ}F_{αβ}` from the product of the evolved
    /// factors `(Σ t_{μ0;αβ}F_{αβ})(Σ t_{0ν;αβ}F_{αβ})` over the given pairs.
    pub fn factorization_deviation(&self, composite: &[ComplexMatrix], pairs: &[(usize, usize)]) -> f64 {
        pairs
            .iter()
            .map(|&(mu, nu)| {
                let whole = self.evolved(mu, nu, composite);
                let prod = &self.evolved(mu, 0, composite) * &self.evolved(0, nu, composite);
                whole.max_abs_diff(&prod)
            })
            .fold(0.0, f64::max)
    }
}

fn check_bipartite(h: &HermitianOperator, a: &OperatorBasis, b: &OperatorBasis) -> Result<()> {
    if h.dim() != a.dim() * b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian of dimension {} for factors {}x{}",
            h.dim(),
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// `t_{μν;αβ} = (1/NM) Tr[e^{iHt} F_{μν} e^{−iHt} F_{αβ}]`; rows are computed in parallel.
pub fn transfer_matrix(h: &HermitianOperator, t: f64, a: &OperatorBasis, b: &OperatorBasis) -> Result<TransferMatrix> {
    check_bipartite(h, a, b)?;
    let u = matrix_exp_unitary(h, t);
    let composite = composite_basis(a, b);
    let size = composite.len();
    let norm = (a.dim() * b.dim()) as f64;
    let rows: Vec<Vec<f64>> = composite
        .par_iter()
        .map(|f| {
            let evolved = u.conjugate(f);
            composite
                .iter()
                .map(|g| hs_inner(&evolved, g).expect("same dimension").re / norm)
                .collect()
        })
        .collect();
    Ok(TransferMatrix {
        dim_a: a.dim(),
        dim_b: b.dim(),
        time: t,
        size,
        entries: rows.concat(),
    })
}

/// Correlation and environment mean values `⟨F_{αβ}⟩` for `α = 0..N²−1`, `β = 1..M²−1`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvMeans {
    dim_a: usize,
    dim_b: usize,
    values: Vec<f64>,
}

impl EnvMeans {
    pub fn zeros(dim_a: usize, dim_b: usize) -> Self {
        Self {
            dim_a,
            dim_b,
            values: vec![0.0; dim_a * dim_a * (dim_b * dim_b - 1)],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    fn idx(&self, alpha: usize, beta: usize) -> Result<usize> {
        let (na, nb) = (self.dim_a * self.dim_a, self.dim_b * self.dim_b);
        if alpha >= na || beta == 0 || beta >= nb {
            return Err(Error::DimensionMismatch(format!(
                "index ({alpha}, {beta}) outside {na}x(1..{nb})"
            )));
        }
        Ok(alpha * (nb - 1) + beta - 1)
    }

    pub fn get(&self, alpha: usize, beta: usize) -> Result<f64> {
        Ok(self.values[self.idx(alpha, beta)?])
    }

    pub fn set(&mut self, alpha: usize, beta: usize, value: f64) -> Result<()> {
        let i = self.idx(alpha, beta)?;
        self.values[i] = value;
        Ok(())
    }

    /// Reads every `⟨F_{αβ}⟩`, `β ≥ 1`, off a joint state.
    pub fn from_state(pi: &ComplexMatrix, a: &OperatorBasis, b: &OperatorBasis) -> Result<Self> {
        let mut out = Self::zeros(a.dim(), b.dim());
        for (alpha, fa) in a.elements().iter().enumerate() {
            for (beta, fb) in b.elements().iter().enumerate().skip(1) {
                let v = hs_inner(&tensor(fa.matrix(), fb.matrix()), pi)?.re;
                out.set(alpha, beta, v)?;
            }
        }
        Ok(out)
    }

    pub fn from_file(file: &EnvMeansFile) -> Result<Self> {
        let mut out = Self::zeros(file.dim_a, file.dim_b);
        for e in &file.entries {
            out.set(e.alpha, e.beta, e.value)?;
        }
        Ok(out)
    }

    pub fn to_file(&self) -> EnvMeansFile {
        let nb = self.dim_b * self.dim_b;
        let entries = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(k, &value)| MeanEntry {
                alpha: k / (nb - 1),
                beta: k % (nb - 1) + 1,
                value,
            })
            .collect();
        EnvMeansFile {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            entries,
        }
    }
}

/// Sparse on-disk form of [`EnvMeans`]; missing entries are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvMeansFile {
    #[serde(rename = "dimA")]
    pub dim_a: usize,
    #[serde(rename = "dimB")]
    pub dim_b: usize,
    pub entries: Vec<MeanEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEntry {
    pub alpha: usize,
    pub beta: usize,
    pub value: f64,
}

/// Affine map `⟨F_μ⟩' = d_μ + Σ_α t_{μ0;α0} ⟨F_α⟩` on mean values, `μ, α ≥ 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReducedAffineMap {
    pub dim: usize,
    pub drift: Vec<f64>,
    /// Row-major `(N²−1)×(N²−1)` block, row `μ−1`, column `α−1`.
    pub block: Vec<f64>,
}

impl ReducedAffineMap {
    pub fn block_entry(&self, mu: usize, alpha: usize) -> f64 {
        let k = self.drift.len();
        self.block[(mu - 1) * k + alpha - 1]
    }

    pub fn apply(&self, means: &[f64]) -> Result<Vec<f64>> {
        let k = self.drift.len();
        if means.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "{} mean values for a map on {k}",
                means.len()
            )));
        }
        Ok((0..k)
            .map(|i| self.drift[i] + (0..k).map(|j| self.block[i * k + j] * means[j]).sum::<f64>())
            .collect())
    }
}

pub fn reduce(tm: &TransferMatrix, env: &EnvMeans) -> Result<ReducedAffineMap> {
    if tm.dims() != env.dims() {
        return Err(Error::DimensionMismatch(format!(
            "transfer matrix for {:?} with mean values for {:?}",
            tm.dims(),
            env.dims()
        )));
    }
    let (n, m) = tm.dims();
    let (na, nb) = (n * n, m * m);
    let mut drift = vec![0.0; na - 1];
    let mut block = vec![0.0; (na - 1) * (na - 1)];
    for mu in 1..na {
        for alpha in 0..na {
            for beta in 1..nb {
                drift[mu - 1] += tm.get(mu, 0, alpha, beta) * env.get(alpha, beta)?;
            }
        }
        for alpha in 1..na {
            block[(mu - 1) * (na - 1) + alpha - 1] = tm.get(mu, 0, alpha, 0);
        }
    }
    Ok(ReducedAffineMap { dim: n, drift, block })
}

/// Linear extension `1' = 1 + Σ d_μ F_μ`, `F_α' = Σ_μ t_{μ0;α0} F_μ`.
pub fn reduced_matrix_map(ram: &ReducedAffineMap, basis: &OperatorBasis) -> Result<MatrixMap> {
    let n = basis.dim();
    if ram.dim != n {
        return Err(Error::DimensionMismatch(format!(
            "reduced map on {} with basis of {n}",
            ram.dim
        )));
    }
    let k = ram.drift.len();
    let mut images = Vec::with_capacity(k + 1);
    let mut one = ComplexMatrix::identity(n);
    for mu in 1..=k {
        one = &one + &basis.element(mu).matrix().scale_re(ram.drift[mu - 1]);
    }
    images.push(one);
    for alpha in 1..=k {
        let mut img = ComplexMatrix::zeros(n, n);
        for mu in 1..=k {
            img = &img + &basis.element(mu).matrix().scale_re(ram.block_entry(mu, alpha));
        }
        images.push(img);
    }
    MatrixMap::from_action(n, |q| {
        // Q = (1/N) Σ Tr[F_α Q] F_α
        let coords = basis.coordinates(q).expect("dimension checked");
        let mut out = ComplexMatrix::zeros(n, n);
        for (img, c) in images.iter().zip(coords) {
            out = &out + &img.scale(c / n as f64);
        }
        out
    })
}

/// `ρ'` from the mean-value route and from `Tr_B[e^{−iHt} Π₀ e^{iHt}]`.
#[derive(Clone, Debug)]
pub struct CrossCheck {
    pub heisenberg: ComplexMatrix,
    pub schrodinger: ComplexMatrix,
    pub max_deviation: f64,
}

pub fn schrodinger_crosscheck(
    h: &HermitianOperator,
    t: f64,
    pi0: &ComplexMatrix,
    a: &OperatorBasis,
    b: &OperatorBasis,
) -> Result<CrossCheck> {
    check_bipartite(h, a, b)?;
    let state = HermitianOperator::new(pi0.clone()).map_err(|e| Error::NotDensityMatrix(e.to_string()))?;
    if state.dim() != h.dim() {
        return Err(Error::DimensionMismatch(
            "state and Hamiltonian dimensions differ".into(),
        ));
    }
    if (state.trace() - 1.0).abs() > 1e-9 || !is_psd(&state, 1e-9) {
        return Err(Error::NotDensityMatrix(
            "initial state must be positive with unit trace".into(),
        ));
    }
    let tm = transfer_matrix(h, t, a, b)?;
    let env = EnvMeans::from_state(pi0, a, b)?;
    let ram = reduce(&tm, &env)?;
    let rho0 = partial_trace(pi0, Subsystem::Second, (a.dim(), b.dim()))?;
    let heisenberg = a.density_from_means(&ram.apply(&a.mean_values(&rho0)?)?)?;

    let u = matrix_exp_unitary(h, t);
    let evolved = u.adjoint().conjugate(pi0);
    let schrodinger = partial_trace(&evolved, Subsystem::Second, (a.dim(), b.dim()))?;
    let max_deviation = heisenberg.max_abs_diff(&schrodinger);
    Ok(CrossCheck {
        heisenberg,
        schrodinger,
        max_deviation,
    })
}

/// `H = ½ω Σ₃ ⊗ Ξ₁`
pub fn two_qubit_hamiltonian(omega: f64) -> HermitianOperator {
    let h = tensor(pauli(3).expect("σ3").matrix(), pauli(1).expect("σ1").matrix()).scale_re(0.5 * omega);
    HermitianOperator::new(h).expect("Hermitian")
}

/// Bipartite Hamiltonian with its factor dimensions.
#[derive(Clone, Debug)]
pub struct BipartiteHamiltonian {
    pub dim_a: usize,
    pub dim_b: usize,
    pub h: HermitianOperator,
}

/// On-disk form: `matrix` lists `[re, im]` pairs in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianFile {
    #[serde(rename = "dimA")]
    pub dim_a: usize,
    #[serde(rename = "dimB")]
    pub dim_b: usize,
    pub matrix: Vec<[f64; 2]>,
}

impl BipartiteHamiltonian {
    pub fn new(dim_a: usize, dim_b: usize, h: HermitianOperator) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 || h.dim() != dim_a * dim_b {
            return Err(Error::DimensionMismatch(format!(
                "Hamiltonian of dimension {} for factors {dim_a}x{dim_b}",
                h.dim()
            )));
        }
        Ok(Self { dim_a, dim_b, h })
    }

    pub fn from_file(file: &HamiltonianFile) -> Result<Self> {
        let d = file.dim_a * file.dim_b;
        let data = file.matrix.iter().map(|&[re, im]| C64::new(re, im)).collect();
        Self::new(
            file.dim_a,
            file.dim_b,
            HermitianOperator::new(ComplexMatrix::new(d, d, data)?)?,
        )
    }

    pub fn to_file(&self) -> HamiltonianFile {
        HamiltonianFile {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            matrix: self.h.as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }
}
