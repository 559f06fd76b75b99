//! Extractable-energy quantities: ergotropy, the local-CPTP maximum and its
//! Stinespring-dilation oracle, optimized NCPTP extraction from pure
//! dilations, the controlled-unitary closed form, the surpass condition, the
//! non-complete-positivity witness, and the rank-two state maximization.


use crate::battery::{
    energy, purify, rank_two_state, xy_hamiltonian, BipartiteBattery, DensityMatrix, Hamiltonian,
    RankTwoAmplitudes, TripartiteState, XYParams,
};
use crate::dynamics::{
    cartan_unitary, givens_bounds, givens_unitary, rotate_full_raw, CartanParams,
};
use crate::error::{Error, Result};
use crate::optimize::{local_polish, minimize_with_polish, OptimizerConfig};
use crate::passivity::build_c_local;
use crate::qmath::{eig_hermitian, kron, ComplexMatrix, DimList};
use crate::random::derive_seed;

/// Parametrization used by an extraction run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamSpace {
    /// 15-angle two-qubit Cartan form (d_E * d_A == 4).
    Cartan,
    /// Phase-diagonal times Givens-rotation product on C^dim.
    Givens { dim: usize },
}

/// Result of an optimized extraction run.
#[derive(Debug, Clone)]
pub struct ExtractionResult {
    /// Extracted energy: initial energy minus the best final energy found.
    pub delta_w: f64,
    /// Flat optimal parameters in the layout of `space`.
    pub params: Vec<f64>,
    pub space: ParamSpace,
    pub evaluations: usize,
    pub converged: bool,
    pub seed: u64,
}

impl ExtractionResult {
    /// The optimal parameters as Cartan angles, when applicable.
    pub fn cartan_params(&self) -> Option<CartanParams> {
        match self.space {
            ParamSpace::Cartan => CartanParams::from_slice(&self.params).ok(),
            _ => None,
        }
    }
}

/// Verdict of the non-complete-positivity witness.
#[derive(Debug, Clone)]
pub struct WitnessVerdict {
    /// Clamped local-CPTP bound, `max(0, raw)`.
    pub cp_bound: f64,
    pub observed: f64,
    /// True only when the observation strictly exceeds the bound; otherwise
    /// no inference about the map is drawn.
    pub is_ncptp: bool,
    /// The bound is only guaranteed for non-degenerate C spectra.
    pub degenerate_c: bool,
}

/// Eigenvalue-formula value for the local-CPTP extractable work.
#[derive(Debug, Clone, Copy)]
pub struct CptpMax {
    /// `Tr(rho H) - c_min` as-is; can be negative inside the passive region.
    pub raw: f64,
    /// `max(0, raw)`; the identity channel guarantees zero.
    pub clamped: f64,
    /// Minimum eigenvalue of `C_AA'`.
    pub c_min: f64,
    /// True when `c_min` sits within 1e-9 of the next eigenvalue.
    pub degenerate: bool,
}

/// Maximum unitarily extractable energy and the passive state left behind:
/// populations sorted descending against energies ascending.
pub fn ergotropy(rho: &DensityMatrix, ham: &Hamiltonian) -> Result<(f64, DensityMatrix)> {
    if rho.dims() != ham.dims() {
        return Err(Error::DimMismatch {
            expected: rho.dims().product(),
            got: ham.dims().product(),
        });
    }
    let (mut pops, _) = eig_hermitian(rho.matrix())?;
    pops.reverse(); // descending
    let (energies, vecs) = eig_hermitian(ham.matrix())?;
    let n = pops.len();
    let passive_energy: f64 = pops.iter().zip(&energies).map(|(l, e)| l * e).sum();

    let mut passive = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                passive[(i, j)] += vecs[(i, k)] * vecs[(j, k)].conj() * pops[k];
            }
        }
    }
    let delta = energy(rho, ham)? - passive_energy;
    let delta = if delta < 0.0 && delta > -1e-10 { 0.0 } else { delta };
    Ok((
        delta,
        DensityMatrix::from_parts_unchecked(passive, rho.dims().clone()),
    ))
}

/// The `Tr(rho H) - min eig(C_AA')` formula for work extractable by CPTP
/// maps on A, reported raw and clamped at zero, with a degeneracy flag for
/// the C spectrum. The genuine channel optimum can differ in both directions;
/// `cptp_oracle` measures it directly.
pub fn max_work_cptp(b: &BipartiteBattery) -> Result<CptpMax> {
    let c = build_c_local(b)?;
    let (vals, _) = eig_hermitian(&c)?;
    let c_min = vals[0];
    let degenerate = vals.len() > 1 && (vals[1] - vals[0]).abs() < 1e-9;
    let raw = energy(&b.rho, &b.ham)? - c_min;
    Ok(CptpMax {
        raw,
        clamped: raw.max(0.0),
        c_min,
        degenerate,
    })
}

/// Energy-after-rotation objective shared by the NCPTP and CPTP searches.
struct MapObjective {
    state: ComplexMatrix,
    k_full: ComplexMatrix,
    d_b: usize,
    space: ParamSpace,
}

impl MapObjective {
    fn new(state: &ComplexMatrix, dims: &DimList, ham: &ComplexMatrix) -> Self {
        let d = dims[0] * dims[1];
        let space = if d == 4 {
            ParamSpace::Cartan
        } else {
            ParamSpace::Givens { dim: d }
        };
        Self {
            state: state.clone(),
            k_full: kron(&ComplexMatrix::identity(dims[0]), ham),
            d_b: dims[2],
            space,
        }
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        match self.space {
            ParamSpace::Cartan => CartanParams::bounds(),
            ParamSpace::Givens { dim } => givens_bounds(dim),
        }
    }

    fn unitary(&self, x: &[f64]) -> ComplexMatrix {
        match self.space {
            ParamSpace::Cartan => {
                cartan_unitary(&CartanParams::from_slice(x).expect("bounds fix the layout"))
            }
            ParamSpace::Givens { dim } => {
                givens_unitary(dim, x).expect("bounds fix the layout")
            }
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let u = self.unitary(x);
        rotate_full_raw(&self.state, &u, self.d_b)
            .trace_product(&self.k_full)
            .re
    }
}

fn run_extraction(
    objective: &MapObjective,
    initial_energy: f64,
    cfg: &OptimizerConfig,
) -> ExtractionResult {
    let bounds = objective.bounds();
    let mut search_cfg = cfg.clone();
    search_cfg.bounds = bounds.clone();

    let calls = std::cell::Cell::new(0usize);
    let counted = |x: &[f64]| {
        calls.set(calls.get() + 1);
        objective.eval(x)
    };
    let global = minimize_with_polish(counted, &search_cfg);

    // the identity is always in the search space
    let identity = vec![0.0; bounds.len()];
    let id_value = counted(&identity);

    let (best_value, best_point) = if id_value < global.best_value {
        (id_value, identity)
    } else {
        (global.best_value, global.best_point)
    };

    ExtractionResult {
        delta_w: initial_energy - best_value,
        params: best_point,
        space: objective.space,
        evaluations: calls.get(),
        converged: global.converged,
        seed: cfg.seed,
    }
}

/// Best extraction found from the battery marginal of a dilation by global
/// unitaries on E (x) A followed by tracing out E. Uses the Cartan
/// parametrization when `d_E * d_A == 4` and a Givens product otherwise.
/// The all-zero (identity) point is always evaluated, so `delta_w >= 0` up
/// to float noise. `cfg.bounds` are replaced by the parametrization's box.
pub fn extract_ncptp(
    state: &TripartiteState,
    ham: &Hamiltonian,
    cfg: &OptimizerConfig,
) -> Result<ExtractionResult> {
    let (d_a, d_b) = (state.dims()[1], state.dims()[2]);
    if ham.dims().as_slice() != [d_a, d_b] {
        return Err(Error::DimMismatch {
            expected: d_a * d_b,
            got: ham.dims().product(),
        });
    }
    let objective = MapObjective::new(state.matrix(), state.dims(), ham.matrix());
    let e0 = energy(&state.battery_marginal(), ham)?;
    Ok(run_extraction(&objective, e0, cfg))
}

/// Environment dimension of the Stinespring dilation used by `cptp_oracle`;
/// d_A^2 suffices for every qubit channel.
pub const CPTP_ORACLE_ENV_DIM: usize = 4;

/// Best extraction found over CPTP channels on A realized by Stinespring
/// dilation: a fixed pure environment of dimension 4 and a Givens-product
/// unitary on the 8-dimensional E (x) A space. Measures the channel optimum
/// directly and can land on either side of the `max_work_cptp` formula value.
pub fn cptp_oracle(b: &BipartiteBattery, cfg: &OptimizerConfig) -> Result<ExtractionResult> {
    let dims = b.rho.dims();
    if dims.as_slice() != [2, 2] {
        return Err(Error::InvalidDims("cptp_oracle needs a two-qubit battery".into()));
    }
    let d_env = CPTP_ORACLE_ENV_DIM;
    let side = d_env * 4;
    // |0><0|_E (x) rho_AB
    let mut state = ComplexMatrix::zeros(side, side);
    for i in 0..4 {
        for j in 0..4 {
            state[(i, j)] = b.rho.matrix()[(i, j)];
        }
    }
    let full_dims = DimList::new(&[d_env, 2, 2])?;
    let objective = MapObjective::new(&state, &full_dims, b.ham.matrix());
    let e0 = energy(&b.rho, &b.ham)?;
    Ok(run_extraction(&objective, e0, cfg))
}

/// Closed-form work of the controlled unitary acting on the two-Bell-mixture
/// dilation at p1 = 1/4: returns `(w, x)` with
/// `x = cos(a2 - b2 - g2) + 2 cos(b2 + g2) + cos(a2 + b2 + g2) - 4` in
/// `[-8, 0]` and `w = (3/8) r x`.
pub fn controlled_work_analytic(r: f64, alpha2: f64, beta2: f64, gamma2: f64) -> (f64, f64) {
    let x = (alpha2 - beta2 - gamma2).cos() + 2.0 * (beta2 + gamma2).cos()
        + (alpha2 + beta2 + gamma2).cos()
        - 4.0;
    (0.375 * r * x, x)
}

/// Whether the controlled-unitary extraction beats the local-CPTP maximum in
/// the reduced regime `r < 0`, `x != 0`: true iff
/// `(3/8)|r||x| > |r| + (p + q)/2`. Returns false outside that regime.
pub fn surpass_condition(p: f64, q: f64, r: f64, x: f64) -> bool {
    if r >= 0.0 || x == 0.0 {
        return false;
    }
    0.375 * r.abs() * x.abs() > r.abs() + 0.5 * (p + q)
}

/// Witness of non-complete positivity: an observed extraction strictly above
/// the clamped CPTP bound certifies the applied map was not CPTP. At or
/// below the bound no inference is drawn.
pub fn witness(b: &BipartiteBattery, observed: f64) -> Result<WitnessVerdict> {
    let m = max_work_cptp(b)?;
    Ok(WitnessVerdict {
        cp_bound: m.clamped,
        observed,
        is_ncptp: observed > m.clamped + 1e-9,
        degenerate_c: m.degenerate,
    })
}

/// Purification eigenvalue cutoff used by the rank-two search.
const RANK_TWO_CUTOFF: f64 = 1e-12;

fn rank_two_inner_delta(
    raw: &[f64; 16],
    ham: &Hamiltonian,
    inner_cfg: &OptimizerConfig,
) -> Result<f64> {
    let amps = RankTwoAmplitudes::from_raw(raw);
    let rho = rank_two_state(&amps)?;
    let state = purify(&rho, RANK_TWO_CUTOFF)?;
    Ok(extract_ncptp(&state, ham, inner_cfg)?.delta_w)
}

/// Canonical rank-two probe amplitudes: the two-Bell mixture at p1 = 1/4
/// written over (AB):aux, plus a pair of simple product seeds.
pub fn rank_two_probe_amplitudes() -> Vec<[f64; 16]> {
    let s = 1.0 / 2f64.sqrt();
    let mut bell = [0.0; 16];
    // sqrt(1/4)|psi+>|0> + sqrt(3/4)|psi->|1>, real amplitudes; slot 2k+aux
    // holds the (AB index k, aux) amplitude
    bell[2] = 0.5 * s; // |01>_AB, aux 0
    bell[4] = 0.5 * s; // |10>_AB, aux 0
    let w = 3f64.sqrt() / 2.0;
    bell[3] = w * s; // |01>_AB, aux 1
    bell[5] = -w * s; // |10>_AB, aux 1

    let mut top = [0.0; 16];
    top[0] = s; // |00>
    top[6] = s; // |11>
    let mut mid = [0.0; 16];
    mid[2] = s; // |01>, aux 0
    mid[5] = s; // |10>, aux 1
    vec![bell, top, mid]
}

/// Maximizes NCPTP extraction over rank-two battery states for the XY
/// Hamiltonian at the given parameters: an outer seeded search over the 16
/// raw amplitude reals with a nested `extract_ncptp` per candidate. Returns
/// the refined best extraction and the achieving state.
pub fn max_over_rank_two(
    params: XYParams,
    cfg: &OptimizerConfig,
) -> Result<(ExtractionResult, DensityMatrix)> {
    let ham = xy_hamiltonian(params);

    // the inner seed is fixed so the outer objective is a pure function
    let inner_cfg = OptimizerConfig {
        seed: derive_seed(cfg.seed, 1),
        population: 24,
        max_evals: 1_600,
        restarts: 2,
        tol: cfg.tol,
        bounds: Vec::new(),
    };

    let outer_objective = |x: &[f64]| {
        let mut raw = [0.0; 16];
        raw.copy_from_slice(x);
        match rank_two_inner_delta(&raw, &ham, &inner_cfg) {
            Ok(delta) => -delta,
            Err(_) => f64::INFINITY,
        }
    };

    // every outer evaluation costs a full inner run, so the outer search
    // takes a slice of the configured budget; the winner is refined below
    // with the full budget
    let outer_cfg = OptimizerConfig {
        seed: cfg.seed,
        population: cfg.population.min(30),
        max_evals: (cfg.max_evals / 25).max(400),
        restarts: cfg.restarts.clamp(1, 2),
        tol: cfg.tol,
        bounds: vec![(-1.0, 1.0); 16],
    };

    let global = crate::optimize::global_minimize(outer_objective, &outer_cfg);
    let mut best_value = global.best_value;
    let mut best_point = global.best_point;

    // canonical probes join the candidate set
    for probe in rank_two_probe_amplitudes() {
        let v = outer_objective(&probe);
        if v < best_value {
            best_value = v;
            best_point = probe.to_vec();
        }
    }
    let (polished_value, polished_point) = local_polish(outer_objective, &best_point, &outer_cfg);
    if polished_value < best_value {
        best_value = polished_value;
        best_point = polished_point;
    }

    let mut raw = [0.0; 16];
    raw.copy_from_slice(&best_point);
    let best_state = rank_two_state(&RankTwoAmplitudes::from_raw(&raw))?;

    // refine the winner with the full budget and report the better of the
    // two estimates so the result dominates every candidate evaluated
    let refine_cfg = OptimizerConfig {
        seed: derive_seed(cfg.seed, 2),
        population: cfg.population,
        max_evals: cfg.max_evals,
        restarts: cfg.restarts.max(4),
        tol: cfg.tol,
        bounds: Vec::new(),
    };
    let state = purify(&best_state, RANK_TWO_CUTOFF)?;
    let mut refined = extract_ncptp(&state, &ham, &refine_cfg)?;
    refined.delta_w = refined.delta_w.max(-best_value);
    refined.converged = refined.converged && global.converged;
    Ok((refined, best_state))
}

/// Convenience: `extract_ncptp` on the ascending-eigenvalue purification of a
/// battery state.
pub fn extract_ncptp_from_battery(
    rho: &DensityMatrix,
    ham: &Hamiltonian,
    cfg: &OptimizerConfig,
) -> Result<ExtractionResult> {
    let state = purify(rho, RANK_TWO_CUTOFF)?;
    extract_ncptp(&state, ham, cfg)
}
