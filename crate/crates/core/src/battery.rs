//! State and Hamiltonian families for two-qubit batteries, purifications,
//! and entropy measures.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qmath::{
    eig_hermitian, kron, partial_trace, pauli_x, pauli_y, pauli_z, psd_check, Complex64,
    ComplexMatrix, DimList,
};

const STATE_TOL: f64 = 1e-9;

/// Hermitian, PSD, unit-trace operator with an attached subsystem split.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: DimList,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and unit trace within 1e-9.
    pub fn new(matrix: ComplexMatrix, dims: DimList) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        dims.check_side(matrix.rows())?;
        if !matrix.all_finite() {
            return Err(Error::NotDensity("non-finite entries".into()));
        }
        let report = psd_check(&matrix, STATE_TOL);
        if report.herm_defect > STATE_TOL * matrix.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian {
                defect: report.herm_defect,
            });
        }
        if report.min_eig < -STATE_TOL {
            return Err(Error::NotDensity(format!(
                "negative eigenvalue {:.3e}",
                report.min_eig
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::NotDensity(format!("trace {tr} != 1")));
        }
        Ok(Self { matrix, dims })
    }

    /// Skips validation; for internal constructions that guarantee the
    /// invariants structurally (hot optimizer paths).
    pub(crate) fn from_parts_unchecked(matrix: ComplexMatrix, dims: DimList) -> Self {
        debug_assert!(dims.product() == matrix.rows());
        Self { matrix, dims }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &DimList {
        &self.dims
    }

    /// Population spectrum, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eig_hermitian(&self.matrix).expect("density matrix is hermitian").0
    }

    /// Tr(rho^2).
    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// Von Neumann entropy in bits.
    pub fn von_neumann_entropy(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .filter(|&&l| l > 1e-15)
            .map(|&l| -l * l.log2())
            .sum()
    }
}

/// Hermitian operator with an attached subsystem split. Energies are in units
/// of the scale `e` (dimensionless multiplier, 1 by default).
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    matrix: ComplexMatrix,
    dims: DimList,
    unit: f64,
}

impl Hamiltonian {
    pub fn new(matrix: ComplexMatrix, dims: DimList) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        dims.check_side(matrix.rows())?;
        if !matrix.all_finite() {
            return Err(Error::InvalidParameter("non-finite Hamiltonian".into()));
        }
        let defect = matrix.hermiticity_defect();
        if defect > STATE_TOL * matrix.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Self {
            matrix,
            dims,
            unit: 1.0,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &DimList {
        &self.dims
    }

    pub fn unit(&self) -> f64 {
        self.unit
    }

    /// Energy spectrum, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eig_hermitian(&self.matrix).expect("hamiltonian is hermitian").0
    }
}

/// A bipartite battery: the pair `{rho_AB, H_AB}` on matching dimensions.
#[derive(Debug, Clone)]
pub struct BipartiteBattery {
    pub rho: DensityMatrix,
    pub ham: Hamiltonian,
}

impl BipartiteBattery {
    pub fn new(rho: DensityMatrix, ham: Hamiltonian) -> Result<Self> {
        if rho.dims() != ham.dims() {
            return Err(Error::DimMismatch {
                expected: rho.dims().product(),
                got: ham.dims().product(),
            });
        }
        Ok(Self { rho, ham })
    }
}

/// State of environment:A:B, the source of dilation-generated NCPTP maps.
#[derive(Debug, Clone)]
pub struct TripartiteState {
    matrix: ComplexMatrix,
    dims: DimList,
    pure: bool,
}

impl TripartiteState {
    /// `dims` must list (d_E, d_A, d_B).
    pub fn new(matrix: ComplexMatrix, dims: DimList) -> Result<Self> {
        if dims.len() != 3 {
            return Err(Error::InvalidDims(format!(
                "tripartite state needs 3 subsystems, got {}",
                dims.len()
            )));
        }
        let rho = DensityMatrix::new(matrix, dims)?;
        let pure = (rho.purity() - 1.0).abs() <= STATE_TOL;
        Ok(Self {
            matrix: rho.matrix.clone(),
            dims: rho.dims,
            pure,
        })
    }

    fn from_pure_vector(psi: &[Complex64], dims: DimList) -> Self {
        debug_assert_eq!(dims.product(), psi.len());
        Self {
            matrix: ComplexMatrix::outer(psi),
            dims,
            pure: true,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &DimList {
        &self.dims
    }

    pub fn is_pure(&self) -> bool {
        self.pure
    }

    pub fn d_env(&self) -> usize {
        self.dims[0]
    }

    /// Marginal of the battery, Tr_E.
    pub fn battery_marginal(&self) -> DensityMatrix {
        let m = partial_trace(&self.matrix, &self.dims, &[1, 2]).expect("valid dims");
        let dims = DimList::new(&[self.dims[1], self.dims[2]]).expect("valid dims");
        DensityMatrix::from_parts_unchecked(m, dims)
    }
}

/// Field parameters (p, q) and interaction strength r of the XY family, in
/// units of e.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XYParams {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl XYParams {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        if !(p.is_finite() && q.is_finite() && r.is_finite()) {
            return Err(Error::InvalidParameter("non-finite XY parameters".into()));
        }
        Ok(Self { p, q, r })
    }
}

/// Eight complex amplitudes of a pure state on C^4 (x) C^2 whose first-party
/// marginal is a rank-two two-qubit state.
#[derive(Debug, Clone)]
pub struct RankTwoAmplitudes(pub [Complex64; 8]);

impl RankTwoAmplitudes {
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Builds from 16 raw reals (re, im interleaved), normalizing. A
    /// near-zero raw vector falls back to the |00> amplitude.
    pub fn from_raw(raw: &[f64; 16]) -> Self {
        let mut amps = [Complex64::new(0.0, 0.0); 8];
        for k in 0..8 {
            amps[k] = Complex::new(raw[2 * k], raw[2 * k + 1]);
        }
        let n = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n < 1e-8 {
            amps = [Complex64::new(0.0, 0.0); 8];
            amps[0] = Complex64::new(1.0, 0.0);
        } else {
            for z in &mut amps {
                *z /= n;
            }
        }
        Self(amps)
    }
}

fn basis_ket(dim: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[k] = Complex64::new(1.0, 0.0);
    v
}

/// `p1 |psi+><psi+| + (1-p1) |psi-><psi-|` on two qubits, with
/// `|psi+-> = (|01> +- |10>)/sqrt(2)`.
pub fn bell_mixture(p1: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::InvalidParameter(format!("p1 = {p1} out of [0,1]")));
    }
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(1, 1)] = Complex64::new(0.5, 0.0);
    m[(2, 2)] = Complex64::new(0.5, 0.0);
    let cross = p1 - 0.5;
    m[(1, 2)] = Complex64::new(cross, 0.0);
    m[(2, 1)] = Complex64::new(cross, 0.0);
    Ok(DensityMatrix::from_parts_unchecked(
        m,
        DimList::new(&[2, 2])?,
    ))
}

/// `p sigma_z (x) I + q I (x) sigma_z + r (sigma_x (x) sigma_x + sigma_y (x) sigma_y)`.
pub fn xy_hamiltonian(params: XYParams) -> Hamiltonian {
    let i2 = ComplexMatrix::identity(2);
    let m = kron(&pauli_z(), &i2)
        .scale_re(params.p)
        .add(&kron(&i2, &pauli_z()).scale_re(params.q))
        .add(
            &kron(&pauli_x(), &pauli_x())
                .add(&kron(&pauli_y(), &pauli_y()))
                .scale_re(params.r),
        );
    Hamiltonian::new(m, DimList::new(&[2, 2]).unwrap()).expect("hermitian by construction")
}

/// Rank-two two-qubit state from the marginal of a pure state on C^4 (x) C^2:
/// the eight amplitudes populate `|k>|aux>` with `k` the two-qubit index, and
/// the auxiliary party is traced out.
pub fn rank_two_state(amps: &RankTwoAmplitudes) -> Result<DensityMatrix> {
    let n2 = amps.norm_sqr();
    if (n2 - 1.0).abs() > STATE_TOL {
        return Err(Error::InvalidParameter(format!(
            "amplitudes not normalized: |psi|^2 = {n2}"
        )));
    }
    let mut m = ComplexMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..2 {
                acc += amps.0[2 * i + k] * amps.0[2 * j + k].conj();
            }
            m[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix::from_parts_unchecked(
        m,
        DimList::new(&[2, 2])?,
    ))
}

/// Pure dilation of `rho` over a computational environment basis:
/// `|Psi> = sum_i sqrt(l_i) |i>_E |v_i>` over the eigenvalues `l_i >= cutoff`
/// of `rho`, in ascending order. The environment dimension equals the number
/// of retained eigenvalues, and `Tr_E` recovers `rho`.
pub fn purify(rho: &DensityMatrix, cutoff: f64) -> Result<TripartiteState> {
    if rho.dims().len() != 2 {
        return Err(Error::InvalidDims(
            "purify expects a bipartite battery state".into(),
        ));
    }
    let (vals, vecs) = eig_hermitian(rho.matrix())?;
    let n = rho.matrix().rows();
    let retained: Vec<usize> = (0..n).filter(|&k| vals[k] >= cutoff.max(0.0)).collect();
    if retained.is_empty() {
        return Err(Error::NotDensity("no eigenvalue above cutoff".into()));
    }
    let d_env = retained.len();
    let mut psi = vec![Complex64::new(0.0, 0.0); d_env * n];
    for (e, &k) in retained.iter().enumerate() {
        let w = vals[k].max(0.0).sqrt();
        for x in 0..n {
            psi[e * n + x] = vecs[(x, k)] * w;
        }
    }
    let dims = DimList::new(&[d_env, rho.dims()[0], rho.dims()[1]])?;
    Ok(TripartiteState::from_pure_vector(&psi, dims))
}

/// Entanglement entropy (base 2) of a pure tripartite state across E : AB.
pub fn entanglement_entropy(state: &TripartiteState) -> Result<f64> {
    if !state.is_pure() {
        let purity = DensityMatrix::from_parts_unchecked(
            state.matrix().clone(),
            state.dims().clone(),
        )
        .purity();
        return Err(Error::NotPure { purity });
    }
    let env = partial_trace(state.matrix(), state.dims(), &[0])?;
    let env = DensityMatrix::from_parts_unchecked(env, DimList::new(&[state.d_env().max(1)])?);
    Ok(env.von_neumann_entropy())
}

/// `Tr(rho H)` as a real energy.
pub fn energy(rho: &DensityMatrix, ham: &Hamiltonian) -> Result<f64> {
    if rho.dims() != ham.dims() {
        return Err(Error::DimMismatch {
            expected: rho.dims().product(),
            got: ham.dims().product(),
        });
    }
    let tr = rho.matrix().trace_product(ham.matrix());
    debug_assert!(tr.im.abs() <= 1e-10 * ham.matrix().frobenius_norm().max(1.0));
    Ok(tr.re)
}

/// Pure two-qubit Bell states as density matrices; sign selects psi+ / psi-.
pub fn bell_state(plus: bool) -> DensityMatrix {
    let s = 1.0 / 2f64.sqrt();
    let mut v = basis_ket(4, 1);
    v[1] = Complex64::new(s, 0.0);
    v[2] = Complex64::new(if plus { s } else { -s }, 0.0);
    DensityMatrix::from_parts_unchecked(ComplexMatrix::outer(&v), DimList::new(&[2, 2]).unwrap())
}
