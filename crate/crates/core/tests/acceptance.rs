//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use maxrand::entropies::{
    conditional_h, conditional_h_basis, conditional_hmax, psecr_oracle_qubit, von_neumann_entropy,
};
use maxrand::guessing::{
    bruteforce_pguess, eve_decomposition, helstrom_check, pguess_coarse_lower_from, pguess_fixed,
    pguess_optimal, pretty_good_measurement, DEFAULT_RESTARTS,
};
use maxrand::linalg::random::{haar_unitary, seeded_rng};
use maxrand::linalg::C64;
use maxrand::measurements::{
    coarse_grain, condition_residuals, qutrit_family, unbiased_basis, CoarseGraining,
    ConditionTarget, MeasurementBasis, ProductMode, QutritFamilyParams,
};
use maxrand::search::{find_product_basis, verify_no_unbiased_product_basis};
use maxrand::states::{qubit_m_state, random_density, tensor_with_pure_aux, two_qubit_diag_state, DensityMatrix};
use maxrand::Error;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn sigma_x() -> MeasurementBasis {
    let s = 0.5f64.sqrt();
    MeasurementBasis::from_vectors(
        vec![
            vec![C64::new(s, 0.0), C64::new(s, 0.0)],
            vec![C64::new(s, 0.0), C64::new(-s, 0.0)],
        ],
        1e-12,
    )
    .unwrap()
}

fn random_basis(d: usize, seed: u64) -> MeasurementBasis {
    MeasurementBasis::from_unitary(&haar_unitary(d, &mut seeded_rng(seed)), 1e-10).unwrap()
}

fn closed_form(rho: &DensityMatrix) -> f64 {
    let t = rho.trace_sqrt();
    t * t / rho.dim() as f64
}

fn c1_qubit_example() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for m in [0.0, 0.25, 0.6, 0.8, 1.0] {
        let rho = qubit_m_state(m).unwrap();
        let value = pguess_fixed(&rho, &sigma_x(), 1, DEFAULT_RESTARTS).unwrap().value;
        worst = worst.max((value - 0.5 * (1.0 + (1.0 - m * m).sqrt())).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-7 && elapsed < Duration::from_secs(1),
        format!("max error {worst:.2e}, {elapsed:.2?}"),
    )
}

fn c2_closed_form() -> Outcome {
    let start = Instant::now();
    let (mut worst, mut worst_gap): (f64, f64) = (0.0, 0.0);
    for seed in 0..50u64 {
        let d = 2 + seed as usize % 4;
        let rho = random_density(d, d, 2000 + seed).unwrap();
        let r = pguess_fixed(&rho, &unbiased_basis(&rho), seed, DEFAULT_RESTARTS).unwrap();
        worst = worst.max((r.value - closed_form(&rho)).abs());
        worst_gap = worst_gap.max(r.bracket.gap);
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-6 && worst_gap <= 1e-5 && elapsed < Duration::from_secs(30),
        format!("max error {worst:.2e}, max gap {worst_gap:.2e}, {elapsed:.2?}"),
    )
}

fn c3_oracle_agreement() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let d = 2 + seed as usize % 2;
        let rho = random_density(d, d, 3000 + seed).unwrap();
        let m = random_basis(d, 3100 + seed);
        let solver = pguess_fixed(&rho, &m, seed, DEFAULT_RESTARTS).unwrap().value;
        let brute = bruteforce_pguess(&rho, &m, seed, 20, 200).unwrap();
        worst = worst.max((solver - brute).abs());
    }
    outcome(worst <= 1e-5, format!("max |solver - oracle| {worst:.2e}"))
}

fn c4_universal_bound() -> Outcome {
    let mut violations = 0;
    let mut min_margin = f64::INFINITY;
    for seed in 0..100u64 {
        let d = 2 + seed as usize % 4;
        let rho = random_density(d, d, 4000 + seed).unwrap();
        let m = random_basis(d, 4100 + seed);
        let value = pguess_fixed(&rho, &m, seed, DEFAULT_RESTARTS).unwrap().value;
        let margin = value - closed_form(&rho);
        min_margin = min_margin.min(margin);
        if margin < -1e-7 {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("{violations} violations, min margin {min_margin:.2e}"))
}

fn c5_necessary_condition() -> Outcome {
    let mut violations = 0;
    let mut tested = 0;
    let mut seed = 5000u64;
    while tested < 30 {
        seed += 1;
        let d = 2 + tested % 3;
        let rho = random_density(d, d, seed).unwrap();
        let m = random_basis(d, seed + 100_000);
        let res = condition_residuals(&rho, &m).unwrap();
        if res.max_abs(ConditionTarget::Hmin) <= 1e-3 {
            continue;
        }
        tested += 1;
        let bound = closed_form(&rho) + res.sum_sq(ConditionTarget::Hmin);
        let value = pguess_fixed(&rho, &m, seed, DEFAULT_RESTARTS).unwrap().value;
        if value < bound - 1e-7 {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("{violations} violations over {tested} pairs"))
}

fn c6_von_neumann() -> Outcome {
    let (mut worst_unbiased, mut worst_eigen): (f64, f64) = (0.0, 0.0);
    for seed in 0..50u64 {
        let d = 2 + seed as usize % 5;
        let rho = random_density(d, d, 6000 + seed).unwrap();
        let expected = (d as f64).log2() - von_neumann_entropy(&rho);
        let h = conditional_h_basis(&rho, &unbiased_basis(&rho)).unwrap();
        worst_unbiased = worst_unbiased.max((h - expected).abs());
        let h0 = conditional_h_basis(&rho, &MeasurementBasis::eigenbasis(&rho)).unwrap();
        worst_eigen = worst_eigen.max(h0.abs());
    }
    outcome(
        worst_unbiased <= 1e-9 && worst_eigen <= 1e-9,
        format!("unbiased error {worst_unbiased:.2e}, eigenbasis {worst_eigen:.2e}"),
    )
}

fn c7_max_entropy() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for seed in 0..50u64 {
        let d = 2 + seed as usize % 4;
        let rho = random_density(d, d, 7000 + seed).unwrap();
        let m = unbiased_basis(&rho);
        let r = conditional_hmax(&rho, &m).unwrap();
        let expected = (d as f64).log2() + rho.lambda_max().log2();
        worst = worst.max((r.h_max - expected).abs());
        if d == 2 {
            for basis in [m, random_basis(2, 7100 + seed)] {
                let p = conditional_hmax(&rho, &basis).unwrap().p_secr;
                let oracle = psecr_oracle_qubit(&rho, &basis, 0.02).unwrap();
                worst_oracle = worst_oracle.max((p - oracle).abs());
            }
        }
    }
    outcome(
        worst <= 1e-5 && worst_oracle <= 2e-3,
        format!("max error {worst:.2e} bits, qubit oracle {worst_oracle:.2e}"),
    )
}

fn c8_qutrit_family() -> Outcome {
    let mut failures = Vec::new();
    for seed in 0..20u64 {
        let rho = random_density(3, 3, 8000 + seed).unwrap();
        let (lambda, _) = rho.eigenbasis_descending();
        let eb = MeasurementBasis::eigenbasis(&rho);
        let sqrt_l = [lambda[0].sqrt(), lambda[1].sqrt(), lambda[2].sqrt()];
        let lam = [lambda[0], lambda[1], lambda[2]];
        let flat = [lambda[0], lambda[2], lambda[2]];
        let entropy_gap = 3f64.log2() - von_neumann_entropy(&rho);

        for (gamma, kind) in [(sqrt_l, "sqrt"), (lam, "lambda"), (flat, "flat")] {
            let (lo, hi) = QutritFamilyParams::k_window(gamma).unwrap();
            for frac in [-0.9, -0.4, 0.3, 0.7, 1.0] {
                let k = if frac < 0.0 { -frac * lo } else { frac * hi };
                let m = match qutrit_family(gamma, k, &eb) {
                    Ok(m) => m,
                    Err(e) => {
                        failures.push(format!("seed {seed} {kind} k={k}: {e}"));
                        continue;
                    }
                };
                let res = condition_residuals(&rho, &m).unwrap();
                match kind {
                    "sqrt" => {
                        let p = pguess_fixed(&rho, &m, seed, DEFAULT_RESTARTS).unwrap().value;
                        if res.max_abs(ConditionTarget::Hmin) > 1e-10
                            || (p - closed_form(&rho)).abs() > 1e-6
                            || res.max_abs(ConditionTarget::H) <= 1e-4
                        {
                            failures.push(format!("seed {seed} sqrt k={k}"));
                        }
                    }
                    "lambda" => {
                        let h = conditional_h_basis(&rho, &m).unwrap();
                        if res.max_abs(ConditionTarget::H) > 1e-10 || (h - entropy_gap).abs() > 1e-8 {
                            failures.push(format!("seed {seed} lambda k={k}"));
                        }
                    }
                    _ => {
                        if res.max_abs(ConditionTarget::Hmax) > 1e-10 {
                            failures.push(format!("seed {seed} flat k={k}"));
                        }
                    }
                }
            }
            if !matches!(qutrit_family(gamma, hi * 1.001, &eb), Err(Error::InfeasibleK { .. }))
                || !matches!(qutrit_family(gamma, lo * 1.001, &eb), Err(Error::InfeasibleK { .. }))
                || qutrit_family(gamma, lo, &eb).is_err()
            {
                failures.push(format!("seed {seed} {kind}: window edges"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            "20 states x 5 k x 3 families".to_string()
        } else {
            failures.join("; ")
        },
    )
}

fn c9_product_search() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut max_restarts = 0;
    for seed in 0..20u64 {
        let mut rng = seeded_rng(9000 + seed);
        let mut w: Vec<f64> = (0..4).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        w.sort_by(|a, b| b.total_cmp(a));
        let rho = two_qubit_diag_state([w[0], w[1], w[2], w[3]]).unwrap();
        for target in [ConditionTarget::Hmin, ConditionTarget::H, ConditionTarget::Hmax] {
            for mode in [ProductMode::General, ProductMode::Restricted] {
                match find_product_basis(&rho, target, mode, seed, 200, 1e-10) {
                    Ok(r) => max_restarts = max_restarts.max(r.restarts_used),
                    Err(e) => failures.push(format!("seed {seed} {target} {mode:?}: {e}")),
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures.is_empty() && elapsed < Duration::from_secs(300),
        format!(
            "{} failures, max restarts used {max_restarts}, {elapsed:.2?}{}",
            failures.len(),
            if failures.is_empty() { String::new() } else { format!(": {}", failures.join("; ")) }
        ),
    )
}

fn c10_no_unbiased_product_basis() -> Outcome {
    let report = verify_no_unbiased_product_basis();
    outcome(
        report.pairs.len() == 4 && report.max_trig_violation <= 1e-12 && report.min_deviation > 0.01,
        format!(
            "trig violation {:.2e}, min deviation from 1/4 {:.4}",
            report.max_trig_violation, report.min_deviation
        ),
    )
}

fn c11_coarse_graining() -> Outcome {
    let mut violations = 0;
    for seed in 0..50u64 {
        let d = 3 + seed as usize % 3;
        let rho = random_density(d, d, 11_000 + seed).unwrap();
        let m = random_basis(d, 11_100 + seed);
        let mut rng = seeded_rng(11_200 + seed);
        let labels = rng.random_range(1..d);
        // every label gets one outcome, the rest are assigned at random
        let mut map: Vec<usize> = (0..d).map(|i| if i < labels { i } else { rng.random_range(0..labels) }).collect();
        for i in (1..d).rev() {
            map.swap(i, rng.random_range(0..=i));
        }
        let f = CoarseGraining::new(map).unwrap();
        let fine_h = conditional_h_basis(&rho, &m).unwrap();
        let coarse_h = conditional_h(&rho, &coarse_grain(&m, &f).unwrap()).unwrap();
        let fine = pguess_fixed(&rho, &m, seed, DEFAULT_RESTARTS).unwrap();
        let coarse_p = pguess_coarse_lower_from(&fine, &m, &f).unwrap();
        if coarse_h > fine_h + 1e-9 || coarse_p < fine.value - 1e-9 {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("{violations} violations over 50 triples"))
}

fn c12_auxiliary() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..10u64 {
        let d = 2 + seed as usize % 3;
        let rho = random_density(d, d, 12_000 + seed).unwrap();
        for d_aux in [2, 3] {
            let big = tensor_with_pure_aux(&rho, d_aux).unwrap();
            worst = worst.max((pguess_optimal(&big) - pguess_optimal(&rho) / d_aux as f64).abs());
        }
    }
    outcome(worst <= 1e-12, format!("max error {worst:.2e}"))
}

fn c13_discrimination() -> Outcome {
    let mut problems = Vec::new();
    let mut worst_pgm: f64 = 0.0;
    for seed in 0..20u64 {
        let d = 2 + seed as usize % 4;
        let rho = random_density(d, d, 13_000 + seed).unwrap();
        let m = random_basis(d, 13_100 + seed);
        let pgm = pretty_good_measurement(&eve_decomposition(&rho, &m).unwrap()).unwrap();
        for (p, q) in pgm.iter().zip(m.projectors()) {
            worst_pgm = worst_pgm.max(p.max_abs_diff(&q));
        }
    }
    if worst_pgm > 1e-9 {
        problems.push(format!("pgm error {worst_pgm:.2e}"));
    }

    let mut cases: Vec<(DensityMatrix, MeasurementBasis)> = Vec::new();
    for seed in 0..10u64 {
        let d = 2 + seed as usize % 4;
        let rho = random_density(d, d, 13_200 + seed).unwrap();
        cases.push((rho.clone(), unbiased_basis(&rho)));
        cases.push((rho.clone(), random_basis(d, 13_300 + seed)));
        cases.push((rho.clone(), MeasurementBasis::eigenbasis(&rho)));
        let q = random_density(3, 3, 13_400 + seed).unwrap();
        let (l, _) = q.eigenbasis_descending();
        let gamma = [l[0].sqrt(), l[1].sqrt(), l[2].sqrt()];
        let k = 0.5 * QutritFamilyParams::k_window(gamma).unwrap().1;
        let fam = qutrit_family(gamma, k, &MeasurementBasis::eigenbasis(&q)).unwrap();
        cases.push((q, fam));
    }
    let mut mismatches = 0;
    for (rho, m) in &cases {
        let holds = condition_residuals(rho, m).unwrap().max_abs(ConditionTarget::Hmin) < 1e-8;
        let w = helstrom_check(&eve_decomposition(rho, m).unwrap(), &m.projectors()).unwrap();
        if w.certifies_symmetric(1e-8) != holds || (holds && !w.certifies(1e-8)) {
            mismatches += 1;
        }
    }
    if mismatches > 0 {
        problems.push(format!("{mismatches} verdict mismatches"));
    }

    let q = qubit_m_state(0.6).unwrap();
    let eb = MeasurementBasis::eigenbasis(&q);
    let w = helstrom_check(&eve_decomposition(&q, &eb).unwrap(), &eb.projectors()).unwrap();
    let most_negative = w.symmetric_min_eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if most_negative >= 0.0 {
        problems.push("eigenbasis counterexample not negative".into());
    }
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            format!(
                "pgm error {worst_pgm:.2e}, {} verdicts agree, counterexample eigenvalue {most_negative:.4}",
                cases.len()
            )
        } else {
            problems.join("; ")
        },
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("qubit example", c1_qubit_example),
        ("closed-form guessing probability", c2_closed_form),
        ("independent oracle agreement", c3_oracle_agreement),
        ("universal lower bound", c4_universal_bound),
        ("necessary condition bound", c5_necessary_condition),
        ("von Neumann optimum", c6_von_neumann),
        ("max-entropy optimum", c7_max_entropy),
        ("qutrit family", c8_qutrit_family),
        ("product-basis search", c9_product_search),
        ("no unbiased product basis", c10_no_unbiased_product_basis),
        ("coarse-graining monotonicity", c11_coarse_graining),
        ("auxiliary factorisation", c12_auxiliary),
        ("discrimination suite", c13_discrimination),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = check();
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<34} {}  {}",
            i + 1,
            name,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
