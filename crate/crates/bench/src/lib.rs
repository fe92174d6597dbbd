//! Workloads shared by the pipeline benchmarks.

use mtc_coset_core::coset::CosetSystem;
use mtc_coset_core::generators::{minimal_model, su2_level};
use mtc_coset_core::{fixtures, ModularData, Result};

/// Generators validated in the first stage.
pub fn generator_set() -> Result<Vec<ModularData>> {
    let mut out: Vec<ModularData> = (1..=8).map(su2_level).collect::<Result<_>>()?;
    for (p, q) in [(3, 4), (4, 5), (5, 6)] {
        out.push(minimal_model(p, q)?);
    }
    Ok(out)
}

/// Named coset fixtures.
pub fn coset_set() -> Result<Vec<(&'static str, CosetSystem)>> {
    Ok(vec![
        ("ising", fixtures::ising()?),
        ("k2", fixtures::k2_diagonal()?),
    ])
}
