//! Acceptance criteria, one pass/fail line each.

use std::f64::consts::SQRT_2;
use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use anyhow::{ensure, Result};
use mtc_coset_cli::format::{to_json, CosetFile};
use mtc_coset_core::coset::{solve_branching, CosetSystem};
use mtc_coset_core::generators::{minimal_model, su2_level};
use mtc_coset_core::spectral::diagonalize;
use mtc_coset_core::{fixtures, ModularData, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL_RESIDUAL: f64 = 1e-9;
const TOL_VERLINDE: f64 = 1e-6;
const TOL_B11: f64 = 1e-12;
const TOL_PRODUCT: f64 = 1e-10;
const TOL_SPECTRAL: f64 = 1e-8;
const TOL_COVARIANCE: f64 = 1e-8;
const TOL_DIM: f64 = 1e-9;
const LIMIT_GENERATORS: Duration = Duration::from_secs(2);
const LIMIT_SPECTRAL: Duration = Duration::from_secs(5);
const RANDOM_SYSTEMS: usize = 100;
const RANDOM_SEED: u64 = 20_240_601;
const TWIST_KICK: f64 = 0.25;

fn ising_md() -> ModularData {
    minimal_model(3, 4).unwrap()
}

fn solved_ising() -> Result<CosetSystem> {
    let f = fixtures::ising()?;
    let mut sols = solve_branching(f.md1(), f.md2(), f.mdc(), 2)?;
    ensure!(sols.len() == 1, "{} solutions for the Ising triple", sols.len());
    Ok(sols.remove(0))
}

fn fixture_systems() -> Result<Vec<CosetSystem>> {
    let x = ising_md();
    Ok(vec![
        fixtures::ising()?,
        fixtures::k2_diagonal()?,
        fixtures::trivial(&x)?,
        fixtures::double(&x)?,
        fixtures::spectator(&x)?,
    ])
}

/// Truncated Clebsch-Gordan rule for su(2) at level k.
fn clebsch_gordan(k: usize, a: usize, b: usize, c: usize) -> u32 {
    let lower = a.abs_diff(b);
    let upper = (a + b).min(2 * k - a - b);
    u32::from(c >= lower && c <= upper && (a + b + c).is_multiple_of(2))
}

fn criterion_1() -> Result<String> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut worst_verlinde: f64 = 0.0;
    let mut data: Vec<ModularData> = (1..=8).map(su2_level).collect::<Result<_, _>>()?;
    for (p, q) in [(3, 4), (4, 5), (5, 6)] {
        data.push(minimal_model(p, q)?);
    }
    for md in &data {
        let report = md.validate();
        ensure!(report.passed(), "{} fails {:?}", md.name(), report.failures());
        for c in &report.checks {
            match c.name.as_str() {
                "verlinde_integrality" => worst_verlinde = worst_verlinde.max(c.residual),
                "fusion_axioms" => ensure!(c.residual == 0.0, "{} fusion axioms", md.name()),
                _ => worst = worst.max(c.residual),
            }
        }
    }
    for k in 1..=8usize {
        let n = su2_level(k as i64)?.verlinde()?;
        for a in 0..=k {
            for b in 0..=k {
                for c in 0..=k {
                    ensure!(n.get(a, b, c) == clebsch_gordan(k, a, b, c), "su2_{k} N_{a}{b}^{c}");
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(worst < TOL_RESIDUAL, "residual {worst:e}");
    ensure!(worst_verlinde < TOL_VERLINDE, "verlinde deviation {worst_verlinde:e}");
    ensure!(elapsed < LIMIT_GENERATORS, "took {elapsed:?}");
    Ok(format!(
        "11 generators; worst residual {worst:.2e} < {TOL_RESIDUAL:e}; verlinde {worst_verlinde:.2e} < {TOL_VERLINDE:e}; fusion = CG oracle; {:.0} ms < {} ms",
        elapsed.as_secs_f64() * 1e3,
        LIMIT_GENERATORS.as_millis()
    ))
}

fn criterion_2() -> Result<String> {
    let cs = solved_ising()?;
    let crit = cs.kw_criteria();
    ensure!(crit.by_twist == [0, 2] && crit.by_monodromy == [0, 2], "{crit:?}");
    let fi = cs.field_identification()?;
    // Ambient index 2x+y; M(3,4) order 1, σ, ε.
    ensure!(fi.orbits == vec![vec![0, 3], vec![1, 2]], "orbits {:?}", fi.orbits);
    ensure!(fi.supports == vec![vec![0, 2], vec![1]], "supports {:?}", fi.supports);
    let c = cs.c_values();
    let c_dev = c.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    ensure!(c_dev < TOL_DIM, "c deviation {c_dev:e}");
    let dims = cs.check_dim_formulas()?;
    ensure!(dims.worst_residual < TOL_DIM, "dimension residual {:e}", dims.worst_residual);
    let b11 = cs.b_coeff(0, 0)?;
    let b_dev = (b11 - C64::new(0.5, 0.0)).norm().max((b11 - cs.md2().s(0, 0)).norm());
    ensure!(b_dev < TOL_B11, "b(1,1) = {b11}");
    Ok(format!(
        "KW {{0,2}} by both criteria; orbits and supports exact; |c-1| {c_dev:.1e} and dims {:.1e} < {TOL_DIM:e}; |b(1,1)-0.5| {b_dev:.1e} < {TOL_B11:e}",
        dims.worst_residual
    ))
}

fn criterion_3() -> Result<String> {
    let x = ising_md();
    let systems = [
        fixtures::ising()?,
        fixtures::k2_diagonal()?,
        fixtures::trivial(&x)?,
        fixtures::double(&x)?,
    ];
    let mut min_re = f64::INFINITY;
    let mut max_im: f64 = 0.0;
    let mut count = 0;
    for cs in &systems {
        let h = cs.kw_hypothesis()?;
        count += h.products.len();
        min_re = min_re.min(h.min_re);
        max_im = max_im.max(h.max_abs_im);
    }
    ensure!(max_im < TOL_RESIDUAL && min_re > -TOL_RESIDUAL, "min re {min_re}, max im {max_im}");
    let p = systems[0]
        .kw_hypothesis()?
        .product(1, 1, 2)
        .ok_or_else(|| anyhow::anyhow!("product ((0,1),1,2) missing"))?;
    let dev = (p - C64::new(SQRT_2 / 4.0, 0.0)).norm();
    ensure!(dev < TOL_PRODUCT, "product {p}");
    Ok(format!(
        "{count} products on 4 fixtures; min Re {min_re:.4} > -{TOL_RESIDUAL:e}; max |Im| {max_im:.1e} < {TOL_RESIDUAL:e}; |p - √2/4| {dev:.1e} < {TOL_PRODUCT:e}"
    ))
}

fn criterion_4() -> Result<String> {
    let mut systems = fixture_systems()?;
    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
    for _ in 0..RANDOM_SYSTEMS {
        systems.push(fixtures::random_pointed(&mut rng, 4)?);
    }
    let mut groups = 0;
    for cs in &systems {
        let g = cs.kw_group_diagnostics()?;
        ensure!(g.agree(), "{} {g:?}", cs.mdc().name());
        groups += usize::from(g.kw_is_group);
    }
    Ok(format!(
        "{} systems (5 fixtures + {RANDOM_SYSTEMS} seeded pointed); all four conditions agree; {groups} group / {} non-group",
        systems.len(),
        systems.len() - groups
    ))
}

fn criterion_5() -> Result<String> {
    let start = Instant::now();
    let cs = solved_ising()?;
    let basis = cs.algebra().decompose_module_category()?;
    ensure!(basis.len() == 6, "{} simples", basis.len());
    let mut dims: Vec<f64> = basis.simples().iter().map(|s| s.dim).collect();
    dims.sort_by(f64::total_cmp);
    let expected = [1.0, 1.0, 1.0, 1.0, SQRT_2, SQRT_2];
    let dim_dev = dims.iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure!(dim_dev < TOL_DIM, "dims {dims:?}");
    ensure!(basis.local_indices().len() == 4, "{} local", basis.local_indices().len());
    let sys = cs.module_fusion_system()?;
    let spectrum = diagonalize(&sys, cs.mdc(), cs.ambient())?;
    ensure!(spectrum.eigenvectors().len() == 6, "{} eigenvectors", spectrum.eigenvectors().len());
    let e = spectrum.verify_e_criterion();
    ensure!(e.passed(), "E violations {:?}", e.violations);
    let ids = spectrum.verify_spectral_identities()?;
    let worst = ids.worst().max(spectrum.worst_eigen_residual());
    ensure!(worst < TOL_SPECTRAL, "{ids:?}");
    let elapsed = start.elapsed();
    ensure!(elapsed < LIMIT_SPECTRAL, "took {elapsed:?}");
    Ok(format!(
        "6 simples (4 local), dims within {dim_dev:.1e}; 6 labelled eigenvectors; E biconditional exact; worst identity {worst:.1e} (weight {:.1e}) < {TOL_SPECTRAL:e}; {:.0} ms < {} ms",
        ids.weight,
        elapsed.as_secs_f64() * 1e3,
        LIMIT_SPECTRAL.as_millis()
    ))
}

fn criterion_6() -> Result<String> {
    let mut lines = Vec::new();
    for f in [fixtures::ising()?, fixtures::k2_diagonal()?] {
        let sols = solve_branching(f.md1(), f.md2(), f.mdc(), 2)?;
        ensure!(sols.len() == 1, "{}: {} solutions", f.mdc().name(), sols.len());
        let cov = sols[0].s_covariance_residual();
        ensure!(cov < TOL_COVARIANCE, "covariance {cov:e}");
        ensure!(sols[0].check_dim_formulas()?.passed(), "dimension formulas");
        ensure!(sols[0].branching() == f.branching(), "solution differs from the fixture");
        lines.push(format!("{}: 1 (cov {cov:.1e})", f.mdc().name()));
    }
    let none = solve_branching(&su2_level(2)?, &ising_md(), &su2_level(1)?, 2)?;
    ensure!(none.is_empty(), "{} solutions for the inconsistent triple", none.len());
    Ok(format!("{}; (su2_2, Ising, su2_1): 0; covariance < {TOL_COVARIANCE:e}", lines.join(", ")))
}

/// Library-side detection: invalid part, rejected system, KW disagreement or covariance failure.
fn detected(parts: &[ModularData; 3], cs: &CosetSystem, which: usize) -> bool {
    if !parts[which].validate().passed() {
        return true;
    }
    match CosetSystem::new(parts[0].clone(), parts[1].clone(), parts[2].clone(), cs.branching().clone()) {
        Err(_) => true,
        Ok(p) => !p.kw_criteria().agree() || p.s_covariance_residual() >= TOL_RESIDUAL,
    }
}

fn criterion_7() -> Result<String> {
    let dir = tempfile::TempDir::new()?;
    let file = dir.path().join("bent.json");
    let kick = C64::from_polar(1.0, TWIST_KICK);
    let mut cases = 0;
    for cs in fixture_systems()? {
        let original = [cs.md1().clone(), cs.md2().clone(), cs.mdc().clone()];
        for which in 0..3 {
            for a in 0..original[which].rank() {
                let mut parts = original.clone();
                parts[which] = parts[which].with_twist(a, parts[which].twist(a) * kick)?;
                ensure!(detected(&parts, &cs, which), "{} part {which} label {a}: silent", cs.mdc().name());

                let mut encoded = CosetFile::from_system(&cs);
                let bent = mtc_coset_cli::format::Source::Inline(
                    mtc_coset_cli::format::ModularDataFile::from_data(&parts[which]),
                );
                match which {
                    0 => encoded.c1 = bent,
                    1 => encoded.c2 = bent,
                    _ => encoded.ambient = bent,
                }
                fs::write(&file, to_json(&encoded)?)?;
                let status = Command::new(env!("CARGO_BIN_EXE_mtc-coset"))
                    .args(["coset", "analyze"])
                    .arg(&file)
                    .output()?
                    .status
                    .code();
                ensure!(
                    matches!(status, Some(1) | Some(2)),
                    "{} part {which} label {a}: exit {status:?}",
                    cs.mdc().name()
                );
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} single-twist perturbations (phase {TWIST_KICK}) on 5 fixtures; all detected; CLI exit 1 or 2 on each"))
}

type Criterion = (&'static str, fn() -> Result<String>);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("generator validity", criterion_1),
        ("Ising coset end-to-end", criterion_2),
        ("KW hypothesis sign condition", criterion_3),
        ("KW group equivalences", criterion_4),
        ("spectral classification on the Ising extension", criterion_5),
        ("branching solver oracle", criterion_6),
        ("negative-control twist perturbations", criterion_7),
    ];
    let mut failures = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail}", n + 1),
            Err(e) => {
                failures += 1;
                println!("criterion {} FAIL  {name}: {e:#}", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
