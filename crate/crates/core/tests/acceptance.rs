//! Exit criteria. Each test prints one `criterion N: PASS|FAIL` line to stderr (outside
//! the test harness capture) and then asserts.

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use levymult::checks::{
    case_derivative, directional_power, distinct_index_sets, fit_power_exponent, hormander_shell_check,
    lagrange1_max, marcinkiewicz_weighted_sup, relativistic_l_estimates, rising_even, CheckSymbol, DerivativeCase,
    ShellOptions,
};
use levymult::cli::{run_check, CheckOptions};
use levymult::jump_sim::{char_function_check, projection_check, subordination_check, SimulationConfig};
use levymult::numerics::{axis_aware_steps, finite_difference_partial_steps, AlignedRule, MultiIndexSpec};
use levymult::spectral::{
    beurling_identity_error, estimate_lp_ratio, identity_fields, l2_operator_norm, lp_norm, plane_wave,
    standard_ensemble, BoundKind, EnsembleConfig, GridSpec, SymbolGrid,
};
use levymult::symbols::{
    normalization_constant, AngularModulator, DensitySpec, RadialProfile, SymbolDescriptor, SymbolEvaluator,
};

static SERIAL: Mutex<()> = Mutex::new(());

/// Runs one criterion alone, prints its line and asserts pass and runtime budget.
fn criterion(number: u32, title: &str, budget_secs: u64, body: impl FnOnce() -> (bool, String)) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let (ok, detail) = body();
    let elapsed = start.elapsed();
    let in_budget = elapsed <= Duration::from_secs(budget_secs);
    let status = if ok && in_budget { "PASS" } else { "FAIL" };
    let line = format!(
        "criterion {number}: {status} [{title}] {detail}; {:.1}s of {budget_secs}s budget\n",
        elapsed.as_secs_f64()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "criterion {number} failed: {detail}");
    assert!(in_budget, "criterion {number} exceeded its runtime budget: {elapsed:?}");
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let q: f64 = v.iter().map(|x| x * x).sum();
        if q > 1e-4 && q <= 1.0 {
            let s = q.sqrt();
            return v.into_iter().map(|x| x / s).collect();
        }
    }
}

#[test]
fn c01_normalization_identity() {
    criterion(1, "sphere normalization identity", 10, || {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let mut worst = [0.0f64; 2];
        for (slot, (n, level, _)) in [(2usize, 14u32, 1e-8), (3, 64, 1e-5)].into_iter().enumerate() {
            let rule = AlignedRule::new(n, level).unwrap();
            for r in [0.5, 1.0, 2.0, 3.7, 10.0] {
                let a = normalization_constant(n, r).unwrap();
                for _ in 0..20 {
                    let dir = random_unit(n, &mut rng);
                    let norm = 10f64.powf(rng.gen_range(-1.0..1.0));
                    let q = rule.integrate_around(&dir, |_, t| (norm * t.abs()).powf(r));
                    let exact = a * norm.powf(r);
                    worst[slot] = worst[slot].max((q - exact).abs() / exact);
                }
            }
        }
        let ok = worst[0] <= 1e-8 && worst[1] <= 1e-5;
        (ok, format!("max rel err n=2 {:.2e} (tol 1e-8), n=3 {:.2e} (tol 1e-5)", worst[0], worst[1]))
    });
}

#[test]
fn c02_beurling_identity() {
    criterion(2, "stable second-harmonic equals scaled Beurling", 60, || {
        let spec = GridSpec::cube(2, 256, 2.0 * std::f64::consts::PI).unwrap();
        let fields = identity_fields(&spec, 202).unwrap();
        let mut worst = 0.0f64;
        for r in [0.5, 1.0, 2.0, 8.0, 40.0] {
            for f in &fields {
                worst = worst.max(beurling_identity_error(r, &f.field, 12).unwrap());
            }
        }
        (worst <= 1e-3, format!("max relative L2 error {worst:.2e} (tol 1e-3) over 3 fields x 5 r on 256^2"))
    });
}

fn modulators(rng: &mut ChaCha8Rng) -> AngularModulator {
    match rng.gen_range(0..5) {
        0 => AngularModulator::one(),
        1 => AngularModulator::beurling_harmonic(),
        2 => AngularModulator::SecondHarmonic { sign: 1 },
        3 => AngularModulator::Monomial { coef: Complex64::new(0.0, 1.0), powers: vec![1, 1] },
        _ => AngularModulator::Constant(Complex64::from_polar(1.0, rng.gen_range(0.0..6.28))),
    }
}

#[test]
fn c03_modulus_bound() {
    criterion(3, "sampled modulus bound", 60, || {
        let mut rng = ChaCha8Rng::seed_from_u64(303);
        let mut pool = Vec::new();
        for _ in 0..12 {
            let r = 10f64.powf(rng.gen_range(-1.0..1.3));
            pool.push(SymbolDescriptor::stable(2, r, modulators(&mut rng)).unwrap());
            let r = rng.gen_range(0.2..4.0);
            let s = r + rng.gen_range(0.2..4.0);
            let (cr, cs) = (rng.gen_range(0.1..3.0), rng.gen_range(0.0..3.0));
            pool.push(SymbolDescriptor::mixed(2, r, s, cr, cs, modulators(&mut rng)).unwrap());
        }
        for alpha in [0.5, 1.0, 1.5] {
            let profile = RadialProfile::from_spec(DensitySpec::relativistic_like(alpha, 2)).unwrap().with_default_table();
            pool.push(SymbolDescriptor::general_l(2, profile, modulators(&mut rng)).unwrap());
        }
        let evals: Vec<SymbolEvaluator> = pool.iter().map(|d| SymbolEvaluator::new(d, 12).unwrap()).collect();
        let mut worst_excess = f64::NEG_INFINITY;
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let e = &evals[rng.gen_range(0..evals.len())];
            let radius = 10f64.powf(rng.gen_range(-3.0..3.0));
            let xi: Vec<f64> = random_unit(2, &mut rng).into_iter().map(|v| v * radius).collect();
            let m = e.eval(&xi).unwrap().norm();
            worst = worst.max(m);
            worst_excess = worst_excess.max(m - (1.0 + 10.0 * e.est_error()));
        }
        (worst_excess <= 0.0, format!("max |m| {worst:.12} over 10^4 draws, max excess over 1+10*est_error {worst_excess:.2e}"))
    });
}

#[test]
fn c04_lagrange_lemmas() {
    criterion(4, "optimization lemma closed forms", 30, || {
        let reports = run_check("lagrange", &CheckOptions { seed: Some(404), ..Default::default() }).unwrap();
        let exact = lagrange1_max(1.0, 1.0, 1.0, 1.0).unwrap();
        let worst = reports.iter().filter(|r| r.check != "lagrange1-exact").map(|r| r.measured).fold(0.0, f64::max);
        let first = reports.iter().filter(|r| r.check == "lagrange1").count() - 1;
        let second = reports.iter().filter(|r| r.check == "lagrange2").count();
        let ok = reports.iter().all(|r| r.pass) && exact == 0.5 && first >= 20 && second >= 20;
        (ok, format!("max rel gap {worst:.2e} (tol 1e-6) over {first}+{second} draws; lagrange1(1,1,1,1) = {exact}"))
    });
}

/// Central differences extrapolated twice: the library stencil at steps `3h` and `6h`
/// combined to cancel the `h^4` term.
fn richardson_oracle(xi: &[f64], r: f64, b: &MultiIndexSpec) -> f64 {
    let base = axis_aware_steps(xi, b, &[0]);
    let at = |k: f64| {
        let steps: Vec<f64> = base.iter().map(|h| k * h).collect();
        finite_difference_partial_steps(|x| directional_power(x, r), xi, b, &steps).unwrap()
    };
    (16.0 * at(3.0) - at(6.0)) / 15.0
}

#[test]
fn c05_case_derivatives() {
    criterion(5, "case derivative closed forms vs finite differences", 30, || {
        let mut rng = ChaCha8Rng::seed_from_u64(505);
        let mut worst = 0.0f64;
        let mut count = 0;
        for n in [2usize, 3] {
            let sets = distinct_index_sets(n);
            for r in [0.5, 2.0, 7.0] {
                for case in [DerivativeCase::WithoutFirst, DerivativeCase::FirstOnly, DerivativeCase::WithFirst] {
                    let members: Vec<&MultiIndexSpec> = sets.iter().filter(|s| DerivativeCase::of(s) == case).collect();
                    for _ in 0..1000 {
                        let b = members[rng.gen_range(0..members.len())];
                        // Orthant points kept 0.02 away from the coordinate planes.
                        let xi = loop {
                            let u: Vec<f64> = random_unit(n, &mut rng).into_iter().map(f64::abs).collect();
                            if u.iter().all(|&v| v >= 0.02) {
                                break u;
                            }
                        };
                        let cf = case_derivative(&xi, r, b).unwrap();
                        let fd = richardson_oracle(&xi, r, b);
                        let scale = cf.abs().max(1e-3 * rising_even(r, b.order()));
                        worst = worst.max((fd - cf).abs() / scale);
                        count += 1;
                    }
                }
            }
        }
        (worst <= 1e-6, format!("max relative deviation {worst:.2e} (tol 1e-6) over {count} points"))
    });
}

#[test]
fn c06_r_independence_plateau() {
    criterion(6, "weighted-sup plateau in r", 120, || {
        let rs: Vec<f64> = (0..9).map(|i| 10f64.powf(-1.0 + 0.5 * i as f64)).collect();
        let mut worst = (0.0f64, 0usize, 0usize);
        let mut lines = Vec::new();
        for n in [2usize, 3] {
            let level = if n == 2 { 32 } else { 16 };
            for k in 1..=n {
                let sets: Vec<MultiIndexSpec> = distinct_index_sets(n).into_iter().filter(|s| s.order() == k).collect();
                let sup_at = |r: f64| {
                    sets.iter().map(|s| marcinkiewicz_weighted_sup(n, r, s, level).unwrap().measured).fold(0.0, f64::max)
                };
                let sweep: Vec<f64> = rs.iter().map(|&r| sup_at(r)).collect();
                let ratio = sweep.iter().cloned().fold(0.0, f64::max) / sweep[6];
                lines.push(format!("n={n},k={k}:{ratio:.4}"));
                if ratio > worst.0 {
                    worst = (ratio, n, k);
                }
            }
        }
        let (ratio, n, k) = worst;
        (ratio <= 1.05, format!("max/value(r=100) by (n,k) [{}], worst {ratio:.4} at n={n},k={k} (limit 1.05)", lines.join(" ")))
    });
}

#[test]
fn c07_hormander_shells() {
    criterion(7, "shell invariance and r-scaling", 120, || {
        let radii = [0.5, 1.0, 4.0];
        let opts = ShellOptions::for_dim(2);
        let rs = [3.0, 6.0, 12.0, 24.0];
        let betas = MultiIndexSpec::all_up_to(2, 2);
        let mut spread = 0.0f64;
        let mut homogeneous_ok = true;
        let mut fits = Vec::new();
        let mut worst_margin = f64::NEG_INFINITY;
        let mut shells = vec![Vec::new(); betas.len()];
        for &r in &rs {
            let desc = SymbolDescriptor::stable(2, r, AngularModulator::beurling_harmonic()).unwrap();
            let m = CheckSymbol::from_descriptor(&desc, 12).unwrap();
            for (i, b) in betas.iter().enumerate() {
                let rep = hormander_shell_check(&m, b, &radii, opts).unwrap();
                spread = spread.max(rep.meta["relative_spread"].as_f64().unwrap());
                homogeneous_ok &= rep.pass;
                shells[i].push(rep.measured);
            }
        }
        for m in [CheckSymbol::from_descriptor(&SymbolDescriptor::beurling(), 12).unwrap(), CheckSymbol::DirectionalPower { n: 2, r: 2.0 }] {
            for b in &betas {
                let rep = hormander_shell_check(&m, b, &radii, opts).unwrap();
                spread = spread.max(rep.meta["relative_spread"].as_f64().unwrap());
                homogeneous_ok &= rep.pass;
            }
        }
        for (b, ks) in betas.iter().zip(&shells) {
            let slope = fit_power_exponent(&rs, ks).unwrap();
            worst_margin = worst_margin.max(slope - (b.order() as f64 + 0.2));
            fits.push(format!("{:?}:{slope:.3}", b.beta()));
        }
        let ok = homogeneous_ok && spread <= 1e-6 && worst_margin <= 0.0;
        (ok, format!("max shell spread {spread:.2e} (tol 1e-6); fitted exponents [{}] each <= |beta|+0.2", fits.join(" ")))
    });
}

#[test]
fn c08_l2_norm_attainment() {
    criterion(8, "L2 operator norm attainment", 30, || {
        let harmonic = AngularModulator::beurling_harmonic;
        let descriptors = vec![
            SymbolDescriptor::beurling(),
            SymbolDescriptor::stable(2, 0.5, harmonic()).unwrap(),
            SymbolDescriptor::stable(2, 2.0, harmonic()).unwrap(),
            SymbolDescriptor::stable(2, 8.0, AngularModulator::Monomial { coef: Complex64::new(1.0, 0.0), powers: vec![2, 0] }).unwrap(),
            SymbolDescriptor::mixed(2, 1.0, 3.0, 1.0, 0.5, harmonic()).unwrap(),
            SymbolDescriptor::general_l(2, RadialProfile::from_spec(DensitySpec::relativistic_like(1.0, 2)).unwrap().with_default_table(), harmonic()).unwrap(),
            SymbolDescriptor::riesz_power(2, 1).unwrap(),
            SymbolDescriptor::riesz_power(2, 3).unwrap(),
            SymbolDescriptor::constant(2, Complex64::new(0.3, 0.4)).unwrap(),
            SymbolDescriptor::stable(3, 1.0, AngularModulator::Monomial { coef: Complex64::new(0.0, 1.0), powers: vec![0, 0, 2] }).unwrap(),
        ];
        let mut worst_over = f64::NEG_INFINITY;
        let mut worst_gap = 0.0f64;
        for d in &descriptors {
            let spec = if d.n == 2 { GridSpec::cube(2, 32, 1.0).unwrap() } else { GridSpec::cube(3, 16, 1.0).unwrap() };
            let eval = SymbolEvaluator::new(d, if d.n == 2 { 12 } else { 24 }).unwrap();
            let norm = l2_operator_norm(&eval, &spec).unwrap();
            let grid = SymbolGrid::new(&eval, &spec).unwrap();
            let config = EnsembleConfig { random_fields: 8, ..Default::default() };
            for f in standard_ensemble(&spec, &config).unwrap() {
                let ratio = lp_norm(&grid.apply(&f.field).unwrap(), 2.0).unwrap() / lp_norm(&f.field, 2.0).unwrap();
                worst_over = worst_over.max(ratio - norm);
            }
            let (_, flat) = grid.argmax();
            let wave = plane_wave(&spec, flat);
            let ratio = lp_norm(&grid.apply(&wave).unwrap(), 2.0).unwrap() / lp_norm(&wave, 2.0).unwrap();
            worst_gap = worst_gap.max((ratio - norm).abs());
        }
        let ok = worst_over <= 1e-10 && worst_gap <= 1e-10;
        (ok, format!("max ratio - norm {worst_over:.2e} (tol 1e-10); argmax field gap {worst_gap:.2e} (tol 1e-10); 10 descriptors"))
    });
}

#[test]
fn c09_simulator_suite() {
    criterion(9, "compound Poisson simulator", 600, || {
        let base = SimulationConfig::standard();
        let small = SimulationConfig { paths: 10_000, ..base.clone() };
        let sub = subordination_check(&small).unwrap();
        let ecf = char_function_check(&small).unwrap();
        let proj = projection_check(&SimulationConfig { paths: 100_000, ..base }).unwrap();
        let ok = sub.pass && ecf.pass && proj.pass;
        (
            ok,
            format!(
                "(a) {} subordination violations on 10^4 paths; (b) worst ecf deviation {:.2} SE (limit 4); (c) projection deviation {:.2} SE (limit 3), bias factor {:.1e}, seed {}",
                sub.measured,
                ecf.measured,
                proj.measured,
                proj.meta["bias_factor"].as_f64().unwrap(),
                small.seed
            ),
        )
    });
}

#[test]
fn c10_relativistic_estimates() {
    criterion(10, "relativistic profile estimates", 60, || {
        let mut ok = true;
        let mut parts = Vec::new();
        for alpha in [0.5, 1.0, 1.5] {
            let rep = relativistic_l_estimates(&DensitySpec::relativistic_like(alpha, 2), 2, 129).unwrap();
            ok &= rep.pass;
            parts.push(format!(
                "alpha={alpha}: sups {:.3}/{:.3}, refinement change {:.1e}",
                rep.meta["sup_value_ratio"].as_f64().unwrap(),
                rep.meta["sup_derivative_ratio"].as_f64().unwrap(),
                rep.meta["refinement_change"].as_f64().unwrap()
            ));
        }
        (ok, format!("{} (limit 5%)", parts.join("; ")))
    });
}

#[test]
fn c11_beurling_lp_ratios() {
    criterion(11, "Beurling Lp ratios below 2(p*-1)", 120, || {
        let eval = SymbolEvaluator::new(&SymbolDescriptor::beurling(), 12).unwrap();
        let spec = GridSpec::cube(2, 128, 1.0).unwrap();
        let mut ok = true;
        let mut parts = Vec::new();
        for p in [1.5, 3.0, 6.0] {
            let config = EnsembleConfig { extremal_p: Some(p), ..Default::default() };
            let ensemble = standard_ensemble(&spec, &config).unwrap();
            let rep = estimate_lp_ratio(&eval, p, &ensemble, BoundKind::TwoBound).unwrap();
            ok &= rep.pass && !rep.modulo_cn;
            parts.push(format!("p={p}: {:.4} <= {:.4} (seed {:#x})", rep.observed_ratio, rep.bound_factor, config.seed));
        }
        (
            ok,
            format!(
                "{}; theorem constants, sharpness of the exponents, the weak (1,1) constant and the conjecture are not reproducible numerically and are not asserted",
                parts.join("; ")
            ),
        )
    });
}
