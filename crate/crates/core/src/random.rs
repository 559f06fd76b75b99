//! Seeded generators for random states, Hamiltonians and batteries.
//!
//! Everything is driven by `ChaCha8Rng`, so instances are reproducible from
//! a `u64` seed across platforms and runs.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::battery::{
    bell_mixture, xy_hamiltonian, BipartiteBattery, DensityMatrix, Hamiltonian, TripartiteState,
    XYParams,
};
use crate::qmath::{Complex64, ComplexMatrix, DimList};

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 step; used to derive independent per-index seeds from one base
/// seed without correlations.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Standard normal via Box-Muller; one draw per call keeps streams simple.
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex::new(standard_normal(rng), standard_normal(rng))
}

/// Haar-ish random unit vector of dimension `d`.
pub fn random_unit_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..d).map(|_| complex_normal(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= n;
    }
    v
}

/// Full-rank random density matrix G G^dagger / Tr on the given subsystems.
pub fn random_density(rng: &mut ChaCha8Rng, dims: &[usize]) -> DensityMatrix {
    let dl = DimList::new(dims).expect("valid dims");
    let n = dl.product();
    let g = ComplexMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    let gg = g.matmul(&g.adjoint());
    let tr = gg.trace().re;
    DensityMatrix::new(gg.scale_re(1.0 / tr), dl).expect("GG^dagger/Tr is a state")
}

/// Random Hermitian operator (G + G^dagger)/2.
pub fn random_hermitian_op(rng: &mut ChaCha8Rng, dims: &[usize]) -> Hamiltonian {
    let dl = DimList::new(dims).expect("valid dims");
    let n = dl.product();
    let g = ComplexMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    Hamiltonian::new(g.add(&g.adjoint()).scale_re(0.5), dl).expect("hermitian by construction")
}

/// Random pure tripartite state on the given (d_E, d_A, d_B).
pub fn random_pure_tripartite(rng: &mut ChaCha8Rng, dims: &[usize; 3]) -> TripartiteState {
    let dl = DimList::new(dims).expect("valid dims");
    let psi = random_unit_vector(rng, dl.product());
    TripartiteState::new(ComplexMatrix::outer(&psi), dl).expect("pure state")
}

/// Random two-qubit battery (full-rank state, Gaussian Hermitian Hamiltonian).
pub fn random_battery(rng: &mut ChaCha8Rng) -> BipartiteBattery {
    let rho = random_density(rng, &[2, 2]);
    let ham = random_hermitian_op(rng, &[2, 2]);
    BipartiteBattery::new(rho, ham).expect("matching dims")
}

/// Random two-Bell-mixture battery drawn from inside the CPTP-local passive
/// region: `p1 <= 1/2` and `r >= p/(1 - 2 p1)`, with p = q.
///
/// Callers should still certify the result; this samples from the interior of
/// the analytically known region.
pub fn random_passive_battery(rng: &mut ChaCha8Rng) -> BipartiteBattery {
    let p1 = uniform(rng, 0.0, 0.4);
    let p = uniform(rng, 0.1, 1.0);
    let threshold = p / (1.0 - 2.0 * p1);
    let r = threshold * uniform(rng, 1.0, 2.5);
    let rho = bell_mixture(p1).expect("p1 in range");
    let ham = xy_hamiltonian(XYParams::new(p, p, r).expect("finite"));
    BipartiteBattery::new(rho, ham).expect("matching dims")
}
