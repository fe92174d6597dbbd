//! Reference coset systems.

use rand::Rng;

use crate::coset::{Branching, CosetSystem};
use crate::error::{Error, Result};
use crate::generators::{kac_labels, minimal_model, pointed_cyclic, su2_level};
use crate::modular::ModularData;

/// `su2_1 ⊠ su2_1 ⊃ su2_2 ⊠ M(3,4)`.
///
/// C labels `(x,y)` have index `2x + y`; M(3,4) labels are `(1,1), (1,2), (1,3)`.
pub fn ising() -> Result<CosetSystem> {
    let md1 = su2_level(2)?;
    let md2 = minimal_model(3, 4)?;
    let s1 = su2_level(1)?;
    let mdc = s1.deligne_product(&s1);
    let mut z = vec![vec![vec![0u32; 3]; 3]; 4];
    z[0][0][0] = 1;
    z[0][2][2] = 1;
    z[3][2][0] = 1;
    z[3][0][2] = 1;
    z[1][1][1] = 1;
    z[2][1][1] = 1;
    CosetSystem::new(md1, md2, mdc, z)
}

/// `su2_2 ⊠ su2_1 ⊃ su2_3 ⊠ M(4,5)`.
///
/// C labels `(λ,e)` have index `2λ + e`. `Z^(λ,e)_{μ, [λ+1, μ+1]} = 1` when
/// `λ + e + μ` is even.
pub fn k2_diagonal() -> Result<CosetSystem> {
    let (p, q) = (4, 5);
    let md1 = su2_level(3)?;
    let md2 = minimal_model(p, q)?;
    let mdc = su2_level(2)?.deligne_product(&su2_level(1)?);
    let kac = kac_labels(p, q);
    let mut z = vec![vec![vec![0u32; kac.len()]; 4]; 6];
    for lambda in 0..3i64 {
        for e in 0..2i64 {
            for mu in 0..4i64 {
                if (lambda + e + mu) % 2 != 0 {
                    continue;
                }
                let (r, s) = (lambda + 1, mu + 1);
                let rep = (r, s).min((p - r, q - s));
                let phi = kac.iter().position(|&x| x == rep).unwrap();
                z[(2 * lambda + e) as usize][mu as usize][phi] = 1;
            }
        }
    }
    CosetSystem::new(md1, md2, mdc, z)
}

/// `X ⊃ 1 ⊠ X` with `Z^i = e_i`.
pub fn trivial(x: &ModularData) -> Result<CosetSystem> {
    let n = x.rank();
    let z: Branching = (0..n)
        .map(|i| vec![(0..n).map(|f| u32::from(f == i)).collect()])
        .collect();
    CosetSystem::new(pointed_cyclic(1, 0)?, x.clone(), x.clone(), z)
}

/// `Vec ⊃ X ⊠ mirror(X)` with `Z^1_{α,α'} = 1`.
pub fn double(x: &ModularData) -> Result<CosetSystem> {
    let n = x.rank();
    let dual = x.dual_permutation()?;
    let z: Branching = vec![(0..n)
        .map(|a| (0..n).map(|f| u32::from(f == dual[a])).collect())
        .collect()];
    CosetSystem::new(x.clone(), x.mirror(), pointed_cyclic(1, 0)?, z)
}

/// `X ⊃ X ⊠ 1` with `Z^i_{i,1} = 1`; KW is all of `X`.
pub fn spectator(x: &ModularData) -> Result<CosetSystem> {
    let n = x.rank();
    let z: Branching = (0..n)
        .map(|i| (0..n).map(|a| vec![u32::from(a == i)]).collect())
        .collect();
    CosetSystem::new(x.clone(), pointed_cyclic(1, 0)?, x.clone(), z)
}

/// Parameters `(n, t)` accepted by [`pointed_cyclic`].
pub fn pointed_parameters(max_n: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for t in 0..2 * n {
            if pointed_cyclic(n, t).is_ok() {
                out.push((n, t));
            }
        }
    }
    out
}

/// `P1 ⊠ P2 ⊃ (P1 ⊠ Q) ⊠ (P2 ⊠ mirror(Q))` for pointed cyclic `P1, P2, Q`.
///
/// `Z^(x,y)_{(x,q),(y,q')} = 1` when `q' = q*`.
pub fn pointed_product(p1: &ModularData, p2: &ModularData, q: &ModularData) -> Result<CosetSystem> {
    let md1 = p1.deligne_product(q);
    let md2 = p2.deligne_product(&q.mirror());
    let mdc = p1.deligne_product(p2);
    let (n1, n2, nq) = (p1.rank(), p2.rank(), q.rank());
    let dual = q.dual_permutation()?;
    let mut z = vec![vec![vec![0u32; n2 * nq]; n1 * nq]; n1 * n2];
    for x in 0..n1 {
        for y in 0..n2 {
            for qq in 0..nq {
                z[x * n2 + y][x * nq + qq][y * nq + dual[qq]] = 1;
            }
        }
    }
    CosetSystem::new(md1, md2, mdc, z)
}

/// A pointed coset system with factors drawn from `pointed_parameters(max_n)`.
pub fn random_pointed<R: Rng>(rng: &mut R, max_n: i64) -> Result<CosetSystem> {
    let params = pointed_parameters(max_n);
    if params.is_empty() {
        return Err(Error::InvalidParameters("no pointed parameters".into()));
    }
    let mut pick = || {
        let (n, t) = params[rng.gen_range(0..params.len())];
        pointed_cyclic(n, t)
    };
    let (p1, p2, q) = (pick()?, pick()?, pick()?);
    pointed_product(&p1, &p2, &q)
}
