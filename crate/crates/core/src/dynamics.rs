//! Unitary parametrizations (local SU(2), Cartan, controlled, block-diagonal,
//! Givens products) and application of environment-assisted local maps.

use num_complex::Complex;

use crate::battery::{DensityMatrix, TripartiteState};
use crate::error::{Error, Result};
use crate::qmath::{
    kron, partial_trace, pauli_x, pauli_y, pauli_z, ComplexMatrix, DimList,
};

const UNITARY_TOL: f64 = 1e-9;

/// Fifteen angles of a two-qubit unitary in Cartan (KAK) form:
/// `(U_E (x) U_A) U_d (V_E (x) V_A)` with
/// `U_d = exp(-i sum_s eta_s sigma_s (x) sigma_s)`.
///
/// Index k = 1..4 labels U_A, U_E, V_A, V_E in that order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartanParams {
    /// alpha_k in [0, pi]
    pub alpha: [f64; 4],
    /// beta_k in [0, 4 pi)
    pub beta: [f64; 4],
    /// gamma_k in [0, 2 pi]
    pub gamma: [f64; 4],
    /// eta_x, eta_y, eta_z in [0, pi/2]
    pub eta: [f64; 3],
}

impl CartanParams {
    pub const N_PARAMS: usize = 15;

    pub fn identity() -> Self {
        Self {
            alpha: [0.0; 4],
            beta: [0.0; 4],
            gamma: [0.0; 4],
            eta: [0.0; 3],
        }
    }

    /// Box bounds in the flat layout used by the optimizer.
    pub fn bounds() -> Vec<(f64, f64)> {
        let pi = std::f64::consts::PI;
        let mut b = Vec::with_capacity(Self::N_PARAMS);
        for _ in 0..4 {
            b.push((0.0, pi)); // alpha_k
            b.push((0.0, 4.0 * pi)); // beta_k
            b.push((0.0, 2.0 * pi)); // gamma_k
        }
        for _ in 0..3 {
            b.push((0.0, pi / 2.0)); // eta_s
        }
        b
    }

    /// Flat layout: (alpha_k, beta_k, gamma_k) for k = 1..4, then the etas.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(Self::N_PARAMS);
        for k in 0..4 {
            v.push(self.alpha[k]);
            v.push(self.beta[k]);
            v.push(self.gamma[k]);
        }
        v.extend_from_slice(&self.eta);
        v
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        if x.len() != Self::N_PARAMS {
            return Err(Error::InvalidParameter(format!(
                "expected {} Cartan parameters, got {}",
                Self::N_PARAMS,
                x.len()
            )));
        }
        let mut p = Self::identity();
        for k in 0..4 {
            p.alpha[k] = x[3 * k];
            p.beta[k] = x[3 * k + 1];
            p.gamma[k] = x[3 * k + 2];
        }
        p.eta = [x[12], x[13], x[14]];
        Ok(p)
    }
}

/// Two-block unitary parameters: `U_EA = diag(U_1, U_2)` with
/// `U_k = [[e^{i theta_k} cos phi_k, e^{i chi_k} sin phi_k],
///         [-e^{-i chi_k} sin phi_k, e^{-i theta_k} cos phi_k]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockUnitaryParams {
    /// theta_k in [0, 2 pi)
    pub theta: [f64; 2],
    /// chi_k in [0, 2 pi)
    pub chi: [f64; 2],
    /// phi_k in [0, pi]
    pub phi: [f64; 2],
}

impl BlockUnitaryParams {
    pub fn identity() -> Self {
        Self {
            theta: [0.0; 2],
            chi: [0.0; 2],
            phi: [0.0; 2],
        }
    }
}

/// The SU(2) element
/// `[[cos(a/2) e^{i(b+g)/2},  sin(a/2) e^{-i(b-g)/2}],
///   [-sin(a/2) e^{i(b-g)/2}, cos(a/2) e^{-i(b+g)/2}]]`.
pub fn local_su2(alpha: f64, beta: f64, gamma: f64) -> ComplexMatrix {
    let ch = (alpha / 2.0).cos();
    let sh = (alpha / 2.0).sin();
    let ep = Complex::from_polar(1.0, (beta + gamma) / 2.0);
    let em = Complex::from_polar(1.0, (beta - gamma) / 2.0);
    let mut u = ComplexMatrix::zeros(2, 2);
    u[(0, 0)] = ep * ch;
    u[(0, 1)] = em.conj() * sh;
    u[(1, 0)] = -em * sh;
    u[(1, 1)] = ep.conj() * ch;
    u
}

/// Nonlocal core `exp(-i sum_s eta_s sigma_s (x) sigma_s)`, built as a product
/// of three commuting closed-form factors `cos(eta) I - i sin(eta) sigma_s (x) sigma_s`.
fn cartan_core(eta: [f64; 3]) -> ComplexMatrix {
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let mut u = ComplexMatrix::identity(4);
    for (s, pauli) in paulis.iter().enumerate() {
        let ss = kron(pauli, pauli);
        let factor = ComplexMatrix::identity(4)
            .scale_re(eta[s].cos())
            .add(&ss.scale(Complex::new(0.0, -eta[s].sin())));
        u = u.matmul(&factor);
    }
    u
}

/// Arbitrary two-qubit unitary `(U_E (x) U_A) U_d (V_E (x) V_A)` acting on
/// E (x) A, E slowest.
pub fn cartan_unitary(p: &CartanParams) -> ComplexMatrix {
    let u_a = local_su2(p.alpha[0], p.beta[0], p.gamma[0]);
    let u_e = local_su2(p.alpha[1], p.beta[1], p.gamma[1]);
    let v_a = local_su2(p.alpha[2], p.beta[2], p.gamma[2]);
    let v_e = local_su2(p.alpha[3], p.beta[3], p.gamma[3]);
    kron(&u_e, &u_a)
        .matmul(&cartan_core(p.eta))
        .matmul(&kron(&v_e, &v_a))
}

/// `|0><0| (x) I + |1><1| (x) U_2` with the control on the environment qubit.
pub fn controlled_unitary(alpha2: f64, beta2: f64, gamma2: f64) -> ComplexMatrix {
    let u2 = local_su2(alpha2, beta2, gamma2);
    let mut u = ComplexMatrix::identity(4);
    for i in 0..2 {
        for j in 0..2 {
            u[(2 + i, 2 + j)] = u2[(i, j)];
        }
    }
    u
}

/// Block-diagonal two-qubit unitary `diag(U_1, U_2)`.
pub fn block_unitary(p: &BlockUnitaryParams) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(4, 4);
    for k in 0..2 {
        let (c, s) = (p.phi[k].cos(), p.phi[k].sin());
        let et = Complex::from_polar(1.0, p.theta[k]);
        let ec = Complex::from_polar(1.0, p.chi[k]);
        let o = 2 * k;
        u[(o, o)] = et * c;
        u[(o, o + 1)] = ec * s;
        u[(o + 1, o)] = -ec.conj() * s;
        u[(o + 1, o + 1)] = et.conj() * c;
    }
    u
}

/// Number of real parameters of the d-dimensional Givens-product unitary:
/// two angles per pair plus one phase per row.
pub fn givens_param_count(d: usize) -> usize {
    d * (d - 1) + d
}

/// Unitary on C^d as a phase diagonal times a fixed-order product of Givens
/// rotations. All-zero parameters give the identity.
pub fn givens_unitary(d: usize, params: &[f64]) -> Result<ComplexMatrix> {
    if params.len() != givens_param_count(d) {
        return Err(Error::InvalidParameter(format!(
            "expected {} Givens parameters for dimension {d}, got {}",
            givens_param_count(d),
            params.len()
        )));
    }
    let mut u = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        u[(i, i)] = Complex::from_polar(1.0, params[i]);
    }
    let mut idx = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let theta = params[idx];
            let phi = params[idx + 1];
            idx += 2;
            if theta == 0.0 && phi == 0.0 {
                continue;
            }
            let (c, s) = (theta.cos(), theta.sin());
            let e = Complex::from_polar(1.0, phi);
            // right-multiply by G(i,j): only columns i and j change
            for row in 0..d {
                let ui = u[(row, i)];
                let uj = u[(row, j)];
                u[(row, i)] = ui * c + uj * (e * s);
                u[(row, j)] = ui * (-e.conj() * s) + uj * c;
            }
        }
    }
    Ok(u)
}

/// Box bounds for `givens_unitary` parameters, centered on the identity.
pub fn givens_bounds(d: usize) -> Vec<(f64, f64)> {
    let pi = std::f64::consts::PI;
    vec![(-pi, pi); givens_param_count(d)]
}

pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    u.adjoint()
        .matmul(u)
        .sub(&ComplexMatrix::identity(u.rows()))
        .frobenius_norm()
}

/// `Tr_E[(U_EA (x) I_B) rho_EAB (U_EA (x) I_B)^dagger]` as a battery state.
pub fn apply_local_map(state: &TripartiteState, u_ea: &ComplexMatrix) -> Result<DensityMatrix> {
    let (d_e, d_a, d_b) = (state.dims()[0], state.dims()[1], state.dims()[2]);
    if u_ea.rows() != d_e * d_a || u_ea.cols() != d_e * d_a {
        return Err(Error::DimMismatch {
            expected: d_e * d_a,
            got: u_ea.rows(),
        });
    }
    let defect = unitarity_defect(u_ea);
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary { defect });
    }
    let full = kron(u_ea, &ComplexMatrix::identity(d_b));
    let rotated = state.matrix().conjugate_by(&full);
    let reduced = partial_trace(&rotated, state.dims(), &[1, 2])?;
    Ok(DensityMatrix::from_parts_unchecked(
        reduced,
        DimList::new(&[d_a, d_b])?,
    ))
}

/// Hot-path version of `apply_local_map` used inside optimizer objectives:
/// returns `(U (x) I_B) rho (U (x) I_B)^dagger` without tracing or validating.
pub(crate) fn rotate_full_raw(
    state: &ComplexMatrix,
    u_ea: &ComplexMatrix,
    d_b: usize,
) -> ComplexMatrix {
    let full = kron(u_ea, &ComplexMatrix::identity(d_b));
    state.conjugate_by(&full)
}
