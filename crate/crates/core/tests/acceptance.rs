//! Acceptance suite: one test per acceptance criterion, each printing a
//! single `criterion N: PASS/FAIL` line (run with `--nocapture` to see the
//! lines for passing tests).
//!
//! Criterion 10 (byte-identical CLI reruns) lives in the CLI crate's own
//! acceptance target.

use qbattery::dynamics::BlockUnitaryParams;
use qbattery::passivity::block_work;
use qbattery::qmath::Complex64;
use qbattery::random::{
    derive_seed, random_battery, random_hermitian_op, random_passive_battery,
    random_pure_tripartite, rng_from, uniform,
};
use qbattery::*;

const PURIFY_CUTOFF: f64 = 1e-12;

fn xy(p: f64, q: f64, r: f64) -> Hamiltonian {
    xy_hamiltonian(XYParams::new(p, q, r).unwrap())
}

fn cfg(seed: u64, max_evals: usize, restarts: usize) -> OptimizerConfig {
    OptimizerConfig {
        seed,
        population: 40,
        max_evals,
        restarts,
        tol: 1e-6,
        bounds: Vec::new(),
    }
}

/// Ground-state dilation |0>_E (x) |g><g| of a random two-qubit Hamiltonian.
fn ground_instance(seed: u64) -> (TripartiteState, Hamiltonian) {
    let mut rng = rng_from(seed);
    let ham = random_hermitian_op(&mut rng, &[2, 2]);
    let (_, vecs) = eig_hermitian(ham.matrix()).unwrap();
    let mut psi = vec![Complex64::new(0.0, 0.0); 8];
    for i in 0..4 {
        psi[i] = vecs[(i, 0)];
    }
    let state = TripartiteState::new(
        ComplexMatrix::outer(&psi),
        DimList::new(&[2, 2, 2]).unwrap(),
    )
    .unwrap();
    (state, ham)
}

#[test]
fn criterion_01_fig1_endpoint_is_zero() {
    // p1 = 0: the dilation is a pure product across E:AB, the map is CPTP,
    // and the battery is already in its ground state
    let rho = bell_mixture(0.0).unwrap();
    let state = purify(&rho, PURIFY_CUTOFF).unwrap();
    let s = entanglement_entropy(&state).unwrap();
    let res = extract_ncptp(&state, &xy(0.5, 0.5, 1.0), &cfg(101, 4_000, 2)).unwrap();
    let pass = s.abs() <= 1e-9 && res.delta_w.abs() <= 1e-6;
    println!(
        "criterion 1: {} — S = {:.3e}, dW at S=0 = {:.3e} (|dW| <= 1e-6)",
        if pass { "PASS" } else { "FAIL" },
        s,
        res.delta_w
    );
    assert!(pass);
}

#[test]
fn criterion_02_fig1_monotone_in_s_and_r() {
    let p = 0.5;
    let r_values = [1.0, 1.5, 2.0];
    let grid = 16;
    // common grid over the passive region of the smallest r
    let p1_max = 0.5 * (1.0 - p / r_values[0]);
    let mut curves: Vec<Vec<f64>> = Vec::new();
    for (ri, &r) in r_values.iter().enumerate() {
        let ham = xy(p, p, r);
        let mut curve = Vec::new();
        for k in 0..grid {
            let p1 = p1_max * k as f64 / (grid - 1) as f64;
            let state = purify(&bell_mixture(p1).unwrap(), PURIFY_CUTOFF).unwrap();
            let c = cfg(derive_seed(202, (ri * grid + k) as u64), 6_000, 3);
            curve.push(extract_ncptp(&state, &ham, &c).unwrap().delta_w);
        }
        curves.push(curve);
    }
    let noise = 1e-3;
    let mut monotone_s = true;
    for curve in &curves {
        for w in curve.windows(2) {
            if w[1] < w[0] - noise {
                monotone_s = false;
            }
        }
    }
    let mut monotone_r = true;
    for k in 0..grid {
        for ri in 1..r_values.len() {
            if curves[ri][k] < curves[ri - 1][k] - noise {
                monotone_r = false;
            }
        }
    }
    let pass = monotone_s && monotone_r;
    println!(
        "criterion 2: {} — nondecreasing in S: {}, pointwise nondecreasing in r: {} (16-point grid, 1e-3 noise)",
        if pass { "PASS" } else { "FAIL" },
        monotone_s,
        monotone_r
    );
    assert!(pass);
}

#[test]
fn criterion_03_two_copies_stay_passive() {
    let mut checked = 0usize;
    let mut worst = f64::INFINITY;

    // the anchor battery first
    let anchor = BipartiteBattery::new(bell_mixture(0.25).unwrap(), xy(0.5, 0.5, 1.0)).unwrap();
    assert!(cptp_local_passive(&anchor, 1e-9).unwrap().passive);
    let two = tensor_copies(&anchor, 2).unwrap();
    let v = cptp_local_passive(&two, 1e-9).unwrap();
    worst = worst.min(v.min_eig);
    let mut ok = v.passive && v.min_eig >= -1e-8;
    checked += 1;

    let mut rng = rng_from(303);
    let mut attempts = 0usize;
    while checked < 101 && attempts < 1_000 {
        attempts += 1;
        let b = random_passive_battery(&mut rng);
        if !cptp_local_passive(&b, 1e-9).unwrap().passive {
            continue;
        }
        let two = tensor_copies(&b, 2).unwrap();
        let v = cptp_local_passive(&two, 1e-9).unwrap();
        worst = worst.min(v.min_eig);
        if !(v.passive && v.min_eig >= -1e-8) {
            ok = false;
        }
        checked += 1;
    }
    let pass = ok && checked == 101;
    println!(
        "criterion 3: {} — {} certified batteries, 2-copy min eig worst {:.3e} (>= -1e-8)",
        if pass { "PASS" } else { "FAIL" },
        checked,
        worst
    );
    assert!(pass);
}

#[test]
fn criterion_04_max_work_formula_cross_validation() {
    // spot value: the formula on (bell_mixture(1/4), p=q=1/2, r=0.3) equals 0.2
    let b = BipartiteBattery::new(bell_mixture(0.25).unwrap(), xy(0.5, 0.5, 0.3)).unwrap();
    let spot = max_work_cptp(&b).unwrap();
    let spot_ok = (spot.raw - 0.2).abs() <= 1e-9;

    // 100 random batteries with non-degenerate C
    let mut rng = rng_from(404);
    let mut exceeded = 0usize;
    let mut short = 0usize;
    let mut max_excess = 0.0f64;
    let mut max_shortfall = 0.0f64;
    let mut done = 0usize;
    while done < 100 {
        let b = random_battery(&mut rng);
        let m = max_work_cptp(&b).unwrap();
        if m.degenerate {
            continue;
        }
        let res = cptp_oracle(&b, &cfg(derive_seed(405, done as u64), 20_000, 8)).unwrap();
        let gap = res.delta_w - m.raw;
        if gap > 1e-9 {
            exceeded += 1;
            max_excess = max_excess.max(gap);
        }
        if gap < -1e-2 {
            short += 1;
            max_shortfall = max_shortfall.min(gap).abs().max(max_shortfall);
        }
        done += 1;
    }
    let pass = spot_ok && exceeded == 0 && short == 0;
    println!(
        "criterion 4: {} — spot value 0.2: {} (raw {:.12}); oracle exceeded the formula on {}/100 \
         (max excess {:.3e}), fell short by >1e-2 on {}/100 (max shortfall {:.3e})",
        if pass { "PASS" } else { "FAIL" },
        if spot_ok { "ok" } else { "bad" },
        spot.raw,
        exceeded,
        max_excess,
        short,
        max_shortfall
    );
    assert!(
        pass,
        "the eigenvalue formula Tr(rho H) - c_min is not the CPTP optimum: a Stinespring \
         (hence CPTP) channel beats it on {exceeded} of 100 instances (amplitude damping \
         toward the local ground already gives 0.245 > 0.2 on the spot instance), and the \
         converged oracle stays more than 1e-2 below it on {short} instances"
    );
}

#[test]
fn criterion_05_controlled_unitary_identity() {
    let state = purify(&bell_mixture(0.25).unwrap(), PURIFY_CUTOFF).unwrap();
    let mut rng = rng_from(505);
    let mut max_err = 0.0f64;
    for _ in 0..1_000 {
        let r = uniform(&mut rng, -2.0, 2.0);
        let a2 = uniform(&mut rng, 0.0, std::f64::consts::PI);
        let b2 = uniform(&mut rng, 0.0, 4.0 * std::f64::consts::PI);
        let g2 = uniform(&mut rng, 0.0, 2.0 * std::f64::consts::PI);
        let ham = xy(0.5, 0.5, r);
        let (w, _) = controlled_work_analytic(r, a2, b2, g2);
        let after = apply_local_map(&state, &controlled_unitary(a2, b2, g2)).unwrap();
        let simulated =
            energy(&state.battery_marginal(), &ham).unwrap() - energy(&after, &ham).unwrap();
        max_err = max_err.max((w - simulated).abs());
    }

    let mut x_ok = true;
    let mut rng = rng_from(506);
    for _ in 0..1_000_000 {
        let a2 = uniform(&mut rng, 0.0, std::f64::consts::PI);
        let b2 = uniform(&mut rng, 0.0, 4.0 * std::f64::consts::PI);
        let g2 = uniform(&mut rng, 0.0, 2.0 * std::f64::consts::PI);
        let (_, x) = controlled_work_analytic(1.0, a2, b2, g2);
        if !(-8.0 - 1e-12..=1e-12).contains(&x) {
            x_ok = false;
        }
    }
    let pass = max_err <= 1e-10 && x_ok;
    println!(
        "criterion 5: {} — max |analytic - simulated| = {:.3e} over 1000 draws (<= 1e-10); x in [-8,0] over 1e6 samples: {}",
        if pass { "PASS" } else { "FAIL" },
        max_err,
        x_ok
    );
    assert!(pass);
}

#[test]
fn criterion_06_surpass_demonstration() {
    // p = q = -1/4, r = -1, angles (0, pi, 0) give x = -8
    let (p, q, r) = (-0.25, -0.25, -1.0);
    let (w_analytic, x) = controlled_work_analytic(r, 0.0, std::f64::consts::PI, 0.0);
    let battery = BipartiteBattery::new(bell_mixture(0.25).unwrap(), xy(p, q, r)).unwrap();

    let state = purify(&bell_mixture(0.25).unwrap(), PURIFY_CUTOFF).unwrap();
    let after =
        apply_local_map(&state, &controlled_unitary(0.0, std::f64::consts::PI, 0.0)).unwrap();
    let ham = xy(p, q, r);
    let simulated =
        energy(&state.battery_marginal(), &ham).unwrap() - energy(&after, &ham).unwrap();

    let bound = max_work_cptp(&battery).unwrap().clamped;
    let pass = (x + 8.0).abs() < 1e-12
        && (simulated - w_analytic).abs() < 1e-10
        && simulated > bound + 1e-9
        && surpass_condition(p, q, r, x);
    println!(
        "criterion 6: {} — simulated extraction {:.6} exceeds clamped CPTP bound {:.6} at x = {:.1}",
        if pass { "PASS" } else { "FAIL" },
        simulated,
        bound,
        x
    );
    assert!(pass);
}

#[test]
fn criterion_07_ncptp_certifier_two_way_consistency() {
    let mut rng = rng_from(707);
    let mut passive_branch = 0usize;
    let mut extractable_branch = 0usize;
    let mut ok = true;
    for k in 0..50u64 {
        let state = random_pure_tripartite(&mut rng, &[2, 2, 2]);
        let ham = random_hermitian_op(&mut rng, &[2, 2]);
        let verdict = ncptp_local_passive(&state, &ham, 1e-9).unwrap();
        // 20 restarts as the falsifier budget
        let res = extract_ncptp(&state, &ham, &cfg(derive_seed(708, k), 30_000, 20)).unwrap();
        if verdict.min_eig >= -1e-9 {
            passive_branch += 1;
            if res.delta_w > 1e-3 {
                ok = false;
                println!(
                    "  instance {k}: min eig {:.3e} but extraction {:.3e}",
                    verdict.min_eig, res.delta_w
                );
            }
        }
        if verdict.min_eig <= -1e-3 {
            extractable_branch += 1;
            if res.delta_w < 1e-4 {
                ok = false;
                println!(
                    "  instance {k}: min eig {:.3e} but extraction only {:.3e}",
                    verdict.min_eig, res.delta_w
                );
            }
        }
    }
    println!(
        "criterion 7: {} — 50 random instances: {} in the certified-passive branch, {} in the extractable branch, all consistent: {}",
        if ok { "PASS" } else { "FAIL" },
        passive_branch,
        extractable_branch,
        ok
    );
    assert!(ok);
}

fn finite_difference_hessian(state: &TripartiteState, ham: &Hamiltonian) -> [[f64; 6]; 6] {
    let h = 1e-4;
    let w = |v: &[f64; 6]| {
        let p = BlockUnitaryParams {
            phi: [v[0], v[1]],
            theta: [v[2], v[4]],
            chi: [v[3], v[5]],
        };
        block_work(state, ham, &p).unwrap()
    };
    let mut out = [[0.0; 6]; 6];
    let w0 = w(&[0.0; 6]);
    for i in 0..6 {
        for j in i..6 {
            let val = if i == j {
                let mut vp = [0.0; 6];
                vp[i] = h;
                let mut vm = [0.0; 6];
                vm[i] = -h;
                (w(&vp) - 2.0 * w0 + w(&vm)) / (h * h)
            } else {
                let mut vpp = [0.0; 6];
                vpp[i] = h;
                vpp[j] = h;
                let mut vpm = [0.0; 6];
                vpm[i] = h;
                vpm[j] = -h;
                let mut vmp = [0.0; 6];
                vmp[i] = -h;
                vmp[j] = h;
                let mut vmm = [0.0; 6];
                vmm[i] = -h;
                vmm[j] = -h;
                (w(&vpp) - w(&vpm) - w(&vmp) + w(&vmm)) / (4.0 * h * h)
            };
            out[i][j] = val;
            out[j][i] = val;
        }
    }
    out
}

#[test]
fn criterion_08_necessary_conditions() {
    // every instance with (near-)zero extraction has a vanishing commutator
    // residual; ground-state dilations provide such instances
    let mut commutator_ok = true;
    let mut zero_extraction_instances = 0usize;
    for seed in 0..10u64 {
        let (state, ham) = ground_instance(seed);
        let res = extract_ncptp(&state, &ham, &cfg(derive_seed(808, seed), 8_000, 4)).unwrap();
        if res.delta_w <= 1e-6 {
            zero_extraction_instances += 1;
            let v = commutator_check(&state, &ham).unwrap();
            if v.norm_residual > 1e-6 {
                commutator_ok = false;
            }
        }
    }

    // analytic Hessian vs central differences on 20 random instances
    let mut rng = rng_from(809);
    let mut max_rel = 0.0f64;
    for _ in 0..20 {
        let state = random_pure_tripartite(&mut rng, &[2, 2, 2]);
        let ham = random_hermitian_op(&mut rng, &[2, 2]);
        let (analytic, _) = hessian_check(&state, &ham).unwrap();
        let fd = finite_difference_hessian(&state, &ham);
        let mut diff = 0.0;
        let mut norm = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                diff += (analytic[i][j] - fd[i][j]).powi(2);
                norm += analytic[i][j].powi(2);
            }
        }
        max_rel = max_rel.max(diff.sqrt() / norm.sqrt().max(1.0));
    }
    let hessian_match = max_rel <= 1e-6;

    // Hessian PSD on passive instances
    let mut psd_ok = true;
    for seed in 20..30u64 {
        let (state, ham) = ground_instance(seed);
        let (_, verdict) = hessian_check(&state, &ham).unwrap();
        if !verdict.passive {
            psd_ok = false;
        }
    }

    let pass = commutator_ok && zero_extraction_instances == 10 && hessian_match && psd_ok;
    println!(
        "criterion 8: {} — commutator residual <= 1e-6 on {}/10 zero-extraction instances; \
         Hessian FD max relative error {:.3e} (<= 1e-6); PSD on passive instances: {}",
        if pass { "PASS" } else { "FAIL" },
        zero_extraction_instances,
        max_rel,
        psd_ok
    );
    assert!(pass);
}

#[test]
fn criterion_09_fig2_ordering() {
    let mut ok = true;
    let mut rows = Vec::new();
    for k in 0..9 {
        let r = -2.0 + 0.5 * k as f64;
        let params = XYParams::new(0.5, 0.5, r).unwrap();
        let (res, best_state) =
            max_over_rank_two(params, &cfg(derive_seed(909, k as u64), 20_000, 8)).unwrap();
        let battery = BipartiteBattery::new(best_state, xy(0.5, 0.5, r)).unwrap();
        let clamped = max_work_cptp(&battery).unwrap().clamped;
        if res.delta_w + 1e-6 < clamped {
            ok = false;
        }
        rows.push(format!("r={r}: ncp {:.4} vs cp {:.4}", res.delta_w, clamped));
    }
    println!(
        "criterion 9: {} — {}",
        if ok { "PASS" } else { "FAIL" },
        rows.join("; ")
    );
    assert!(ok);
}

#[test]
fn criterion_11_ergotropy_spot_value() {
    let (dw, _) = ergotropy(
        &bell_mixture(0.25).unwrap(),
        &xy(0.5, 0.5, 1.0),
    )
    .unwrap();
    let pass = (dw - 0.75).abs() <= 1e-10;
    println!(
        "criterion 11: {} — ergotropy = {:.12} (0.75 within 1e-10)",
        if pass { "PASS" } else { "FAIL" },
        dw
    );
    assert!(pass);
}
