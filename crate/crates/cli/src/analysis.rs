//! Report builders over the core library.

use mtc_coset_core::coset::CosetSystem;
use mtc_coset_core::spectral::diagonalize;
use mtc_coset_core::tolerance::eps_num;
use mtc_coset_core::{Error, ModularData};
use serde_json::json;

use crate::report::{Report, Section};

fn names(md: &ModularData, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&a| md.label(a).to_string()).collect()
}

/// Invariant checks of one modular datum as a section.
pub fn validation_section(title: &str, md: &ModularData) -> Section {
    let report = md.validate();
    let mut s = Section::new(title).status(report.passed()).entry("name", md.name()).entry("rank", md.rank());
    for c in &report.checks {
        s = s.entry(&c.name, json!({ "passed": c.passed, "residual": c.residual }));
    }
    s
}

pub fn validate_report(md: &ModularData) -> Report {
    let mut r = Report::new(format!("Validation of {}", md.name()));
    r.push(validation_section("invariants", md));
    let qd = md.quantum_dims();
    r.push(
        Section::new("dimensions")
            .entry("labels", md.labels())
            .entry("quantum_dims", &qd.dims)
            .entry("global_dim", qd.global_dim),
    );
    r
}

fn error_section(name: &str, e: &Error) -> Section {
    match e {
        Error::Precondition(msg) => Section::new(name).skipped(msg.clone()),
        other => Section::new(name).failed(other.to_string()),
    }
}

/// Validates the three inputs, then assembles the system when possible.
pub fn analyze_inputs(
    r: &mut Report,
    md1: &ModularData,
    md2: &ModularData,
    mdc: &ModularData,
    build: impl FnOnce() -> mtc_coset_core::Result<CosetSystem>,
) -> Option<CosetSystem> {
    r.push(validation_section("c1 invariants", md1));
    r.push(validation_section("c2 invariants", md2));
    r.push(validation_section("ambient invariants", mdc));
    match build() {
        Ok(cs) => Some(cs),
        Err(e) => {
            r.push(error_section("system", &e));
            None
        }
    }
}

/// Every coset diagnostic, in dependency order.
pub fn coset_sections(r: &mut Report, cs: &CosetSystem) {
    let (md1, md2, mdc) = (cs.md1(), cs.md2(), cs.mdc());

    let checks = cs.assumption_checks();
    let mut s = Section::new("assumptions").status(checks.iter().all(|c| c.passed));
    for c in &checks {
        s = s.entry(&c.name, json!({ "passed": c.passed, "residual": c.residual }));
    }
    s = s.entry("unreached_c2_labels", names(md2, &cs.unreached_c2_labels()));
    r.push(s);

    let crit = cs.kw_criteria();
    let kw = crit.by_twist.clone();
    r.push(
        Section::new("kw set")
            .status(crit.agree())
            .entry("by_twist", names(md1, &crit.by_twist))
            .entry("by_monodromy", names(md1, &crit.by_monodromy))
            .entry("kw", names(md1, &kw)),
    );

    let mut induced = Vec::new();
    let mut induced_ok = true;
    for &b in &kw {
        match cs.identify_induced(b) {
            Ok(i) => induced.push(json!([md1.label(b), mdc.label(i)])),
            Err(e) => {
                induced_ok = false;
                induced.push(json!([md1.label(b), e.to_string()]));
            }
        }
    }
    r.push(Section::new("induced kw modules").status(induced_ok).entry("pairs", induced));

    r.push(match cs.kw_group_diagnostics() {
        Ok(g) => Section::new("group diagnostics")
            .status(g.agree())
            .entry("kw_is_group", g.kw_is_group)
            .entry("dims_multiplicative", g.dims_multiplicative)
            .entry("c_all_one", g.c_all_one)
            .entry("fusion_in_j1", g.fusion_in_j1),
        Err(e) => error_section("group diagnostics", &e),
    });

    let c = cs.c_values();
    let table: serde_json::Map<String, serde_json::Value> =
        (0..mdc.rank()).map(|i| (mdc.label(i).to_string(), json!(c[i]))).collect();
    r.push(Section::new("c values").entry("c", table));

    r.push(match cs.check_dim_formulas() {
        Ok(d) => Section::new("dimension formulas")
            .status(d.passed())
            .entry("worst_residual", d.worst_residual)
            .entry("b11_residual", d.b11_residual)
            .entry("min_b_re", d.min_b_re)
            .entry("max_b_im", d.max_b_im)
            .entry("entries", d.entries.len()),
        Err(e) => error_section("dimension formulas", &e),
    });

    r.push(match cs.field_identification() {
        Ok(f) => Section::new("field identification")
            .status(f.passed())
            .entry("orbits", f.orbits.iter().map(|o| names(mdc, o)).collect::<Vec<_>>())
            .entry("supports", f.supports.iter().map(|o| names(md2, o)).collect::<Vec<_>>()),
        Err(e) => error_section("field identification", &e),
    });

    stabilizer_sections(r, cs);

    let m = cs.mixed_branching_check();
    r.push(
        Section::new("mixed branching")
            .status(m.max_deviation == 0 && m.closure)
            .entry("max_deviation", m.max_deviation)
            .entry("closure", m.closure),
    );

    r.push(match cs.kw_hypothesis() {
        Ok(h) => Section::new("kw hypothesis")
            .status(h.passed())
            .entry("products", h.products.len())
            .entry("min_re", h.min_re)
            .entry("max_abs_im", h.max_abs_im),
        Err(e) => error_section("kw hypothesis", &e),
    });

    r.push(spectral_section(cs));
}

fn stabilizer_sections(r: &mut Report, cs: &CosetSystem) {
    let (md1, mdc) = (cs.md1(), cs.mdc());
    let mut stab = Section::new("stabilizers");
    let mut mult = Section::new("multiplicity structure");
    let (mut stab_ok, mut mult_ok) = (true, true);
    for i in 0..mdc.rank() {
        for a in cs.j_set(i) {
            let key = format!("({},{})", mdc.label(i), md1.label(a));
            match cs.stabilizers(i, a) {
                Ok(st) => {
                    stab_ok &= st.closed && st.within_j1;
                    stab = stab.entry(
                        &key,
                        json!({ "g_i": names(md1, &st.g_i), "g_i_alpha": names(md1, &st.g_i_alpha) }),
                    );
                }
                Err(e) => {
                    r.push(error_section("stabilizers", &e));
                    r.push(error_section("multiplicity structure", &e));
                    return;
                }
            }
            match cs.multiplicity_structure(i, a) {
                Ok(m) => {
                    mult_ok &= m.passed();
                    mult = mult.entry(
                        &key,
                        json!({
                            "norm": m.norm,
                            "stabilizer_order": m.stabilizer_order,
                            "cyclic": m.stabilizer_cyclic,
                            "passed": m.passed(),
                        }),
                    );
                }
                Err(e) => {
                    mult_ok = false;
                    mult = mult.entry(&key, e.to_string());
                }
            }
        }
    }
    r.push(stab.status(stab_ok));
    r.push(mult.status(mult_ok));
}

/// Module-category construction, joint diagonalization and the spectral identities.
pub fn spectral_section(cs: &CosetSystem) -> Section {
    let name = "spectral verification";
    let sys = match cs.module_fusion_system() {
        Ok(sys) => sys,
        Err(e) if !cs.algebra().is_simple_current() => {
            return Section::new(name).skipped(format!("module category not constructed: {e}"))
        }
        Err(e) => return error_section(name, &e),
    };
    let spectrum = match diagonalize(&sys, cs.mdc(), cs.ambient()) {
        Ok(s) => s,
        Err(e) => return error_section(name, &e),
    };
    let e = spectrum.verify_e_criterion();
    let ids = match spectrum.verify_spectral_identities() {
        Ok(ids) => ids,
        Err(err) => return error_section(name, &err),
    };
    let tol = eps_num();
    Section::new(name)
        .status(e.passed() && ids.worst() < tol && spectrum.worst_eigen_residual() < tol)
        .entry("module_simples", sys.basis().len())
        .entry("local_simples", sys.basis().local_indices().len())
        .entry("eigenvectors", spectrum.eigenvectors().len())
        .entry("eigen_residual", spectrum.worst_eigen_residual())
        .entry("e_criterion_violations", e.violations.len())
        .entry("s_intertwining", ids.s_intertwining)
        .entry("proportionality", ids.proportionality)
        .entry("weight", ids.weight)
        .entry("resolution", ids.resolution)
        .entry("orthonormality", ids.orthonormality)
}
