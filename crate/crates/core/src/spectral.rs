//! Joint diagonalization of the module fusion operators and the spectral
//! identities relating their eigenvectors to local and ambient S-matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::extension::{IntMatrix, ModuleFusionSystem};
use crate::modular::{ModularData, C64};
use crate::tolerance::eps_num;

/// Acceptance radius for matching eigenvalue tuples to characters.
pub const MATCH_RADIUS: f64 = 1e-6;

/// Eigenvalue clustering radius during refinement.
const CLUSTER_RADIUS: f64 = 1e-7;

type CVector = DVector<C64>;
type CMat = DMatrix<C64>;

/// A joint eigenvector `v^(i,μ,m)`.
#[derive(Clone, Debug)]
pub struct Eigenvector {
    /// Coefficients over the simple A-module classes.
    pub vector: CVector,
    /// Label `i` of the local category.
    pub local: usize,
    /// Label `μ` of the ambient category.
    pub ambient: usize,
    /// Index `m` within the `(i, μ)` eigenspace.
    pub multiplicity: usize,
    /// Worst eigen-equation residual over the whole family.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    system: ModuleFusionSystem,
    local_s: ModularData,
    ambient_s: ModularData,
    /// Simple class of each local label.
    simple_of_label: Vec<usize>,
    eigenvectors: Vec<Eigenvector>,
}

/// Exact comparison of eigenvector labels with `b_iμ = ⟨σ_i, a_μ⟩ > 0`.
#[derive(Clone, Debug)]
pub struct ECriterionReport {
    /// `(i, μ, b_iμ, eigenvector count)`.
    pub pairs: Vec<(usize, usize, u32, usize)>,
    pub violations: Vec<(usize, usize)>,
}

impl ECriterionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Worst residual of each spectral identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralIdentityReport {
    /// `Σ_j s_kj b_jλ = Σ_μ b_kμ s^D_μλ`.
    pub s_intertwining: f64,
    /// `v_σj = (s_j'i / s_1i) v_A`.
    pub proportionality: f64,
    /// `Σ_m |v_A|² / (s^D_1δ s_1k) = b_kδ`.
    pub weight: f64,
    /// `V^λ_ab = Σ eigenvalue · v_b conj(v_a)`.
    pub resolution: f64,
    /// Orthonormality of the eigenbasis.
    pub orthonormality: f64,
}

impl SpectralIdentityReport {
    pub fn worst(&self) -> f64 {
        [
            self.s_intertwining,
            self.proportionality,
            self.weight,
            self.resolution,
            self.orthonormality,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn cmax<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::RawStorage<C64, R, C>>(
    m: &nalgebra::Matrix<C64, R, C, S>,
) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn to_complex(m: &IntMatrix) -> CMat {
    m.map(|v| C64::from(v as f64))
}

/// Splits each subspace by the eigenvalues of `h` restricted to it.
fn refine(spaces: Vec<CMat>, h: &CMat) -> Vec<CMat> {
    let mut out = Vec::with_capacity(spaces.len());
    for q in spaces {
        if q.ncols() == 1 {
            out.push(q);
            continue;
        }
        let mut local = q.adjoint() * h * &q;
        local = (&local + local.adjoint()) * C64::from(0.5);
        let eig = SymmetricEigen::new(local);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut start = 0;
        while start < order.len() {
            let mut end = start + 1;
            while end < order.len()
                && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] < CLUSTER_RADIUS
            {
                end += 1;
            }
            let cols: Vec<CVector> = order[start..end]
                .iter()
                .map(|&c| &q * eig.eigenvectors.column(c))
                .collect();
            out.push(CMat::from_columns(&cols));
            start = end;
        }
    }
    out
}

/// Orthonormal basis of `q` whose first vector is the normalized projection of `e_unit`.
fn normalize_phases(q: &CMat, unit: usize) -> Vec<CVector> {
    let eps = eps_num();
    let r = q.nrows();
    let mut e = CVector::zeros(r);
    e[unit] = C64::from(1.0);
    let w = q * (q.adjoint() * &e);
    let mut basis: Vec<CVector> = Vec::new();
    if w.norm() > eps {
        basis.push(&w / C64::from(w.norm()));
    }
    for c in 0..q.ncols() {
        let mut v: CVector = q.column(c).into_owned();
        for b in &basis {
            let proj = b.dotc(&v);
            v -= b * proj;
        }
        let n = v.norm();
        if n > 1e-6 {
            basis.push(v / C64::from(n));
        }
        if basis.len() == q.ncols() {
            break;
        }
    }
    basis
}

/// Simultaneously diagonalizes `{T_j} ∪ {V^λ}` and labels each eigenvector by `(i, μ)`.
pub fn diagonalize(
    system: &ModuleFusionSystem,
    local_s: &ModularData,
    ambient_s: &ModularData,
) -> Result<SpectralDecomposition> {
    if system.commutator_residual() != 0 {
        return Err(Error::Spectral("operators do not commute".into()));
    }
    let r = system.basis().len();
    let n_amb = ambient_s.rank();
    if system.ambient_operators().len() != n_amb {
        return Err(Error::Spectral("ambient data does not match the system".into()));
    }
    let mut simple_of_label = vec![usize::MAX; local_s.rank()];
    for op in system.local_operators() {
        let label = op
            .label
            .ok_or_else(|| Error::Spectral("local simples are not matched to labels".into()))?;
        if label >= local_s.rank() {
            return Err(Error::Spectral("local label out of range".into()));
        }
        simple_of_label[label] = op.simple;
    }
    if simple_of_label.contains(&usize::MAX) {
        return Err(Error::Spectral("some local label has no simple class".into()));
    }

    // Operators act on coefficient vectors by the transpose.
    let ambient: Vec<CMat> = system
        .ambient_operators()
        .iter()
        .map(|m| to_complex(&m.transpose()))
        .collect();
    let local: Vec<CMat> = simple_of_label
        .iter()
        .map(|&k| Ok(to_complex(&system.module_fusion_local(k)?.transpose())))
        .collect::<Result<_>>()?;

    let mut spaces = vec![CMat::identity(r, r)];
    let i_unit = C64::new(0.0, 1.0);
    for x in ambient.iter().chain(local.iter()) {
        let herm = (x + x.adjoint()) * C64::from(0.5);
        let anti = (x - x.adjoint()) * (C64::from(0.5) / i_unit);
        spaces = refine(spaces, &herm);
        spaces = refine(spaces, &anti);
    }

    let eigen_of = |m: &CMat, v: &CVector| v.dotc(&(m * v));
    let expected_amb = |lambda: usize, mu: usize| ambient_s.s(lambda, mu) / ambient_s.s(0, mu);
    let expected_loc = |j: usize, i: usize| local_s.s(j, i) / local_s.s(0, i);

    let unit = system.basis().unit_index();
    let mut eigenvectors = Vec::with_capacity(r);
    for q in &spaces {
        let probe: CVector = q.column(0).into_owned();
        let amb_vals: Vec<C64> = ambient.iter().map(|m| eigen_of(m, &probe)).collect();
        let loc_vals: Vec<C64> = local.iter().map(|m| eigen_of(m, &probe)).collect();
        let mut hits = Vec::new();
        for mu in 0..n_amb {
            let da = (0..n_amb)
                .map(|l| (amb_vals[l] - expected_amb(l, mu)).norm())
                .fold(0.0, f64::max);
            if da >= MATCH_RADIUS {
                continue;
            }
            for i in 0..local_s.rank() {
                let dl = (0..local_s.rank())
                    .map(|j| (loc_vals[j] - expected_loc(j, i)).norm())
                    .fold(0.0, f64::max);
                if dl < MATCH_RADIUS {
                    hits.push((i, mu));
                }
            }
        }
        let (i, mu) = match hits.as_slice() {
            [one] => *one,
            [] => {
                return Err(Error::Spectral(
                    "eigenvalue tuple matches no character pair".into(),
                ))
            }
            _ => {
                return Err(Error::Spectral(
                    "eigenvalue tuple matches several character pairs".into(),
                ))
            }
        };
        for (m, v) in normalize_phases(q, unit).into_iter().enumerate() {
            let mut residual: f64 = 0.0;
            for (l, x) in ambient.iter().enumerate() {
                residual = residual.max(cmax(&(x * &v - &v * expected_amb(l, mu))));
            }
            for (j, x) in local.iter().enumerate() {
                residual = residual.max(cmax(&(x * &v - &v * expected_loc(j, i))));
            }
            eigenvectors.push(Eigenvector {
                vector: v,
                local: i,
                ambient: mu,
                multiplicity: m,
                residual,
            });
        }
    }
    if eigenvectors.len() != r {
        return Err(Error::Spectral(format!(
            "found {} eigenvectors for a {r}-dimensional space",
            eigenvectors.len()
        )));
    }
    eigenvectors.sort_by_key(|e| (e.local, e.ambient, e.multiplicity));
    Ok(SpectralDecomposition {
        system: system.clone(),
        local_s: local_s.clone(),
        ambient_s: ambient_s.clone(),
        simple_of_label,
        eigenvectors,
    })
}

impl SpectralDecomposition {
    pub fn eigenvectors(&self) -> &[Eigenvector] {
        &self.eigenvectors
    }

    pub fn system(&self) -> &ModuleFusionSystem {
        &self.system
    }

    pub fn worst_eigen_residual(&self) -> f64 {
        self.eigenvectors
            .iter()
            .map(|e| e.residual)
            .fold(0.0, f64::max)
    }

    /// `b_iμ = ⟨σ_i, a_μ⟩`, the multiplicity of the local class `σ_i` in `a_μ`.
    pub fn b(&self, i: usize, mu: usize) -> u32 {
        self.system.basis().simples()[self.simple_of_label[i]].restriction.0[mu]
    }

    pub fn count(&self, i: usize, mu: usize) -> usize {
        self.eigenvectors
            .iter()
            .filter(|e| e.local == i && e.ambient == mu)
            .count()
    }

    /// An eigenvector labelled `(i, μ)` exists exactly when `b_iμ > 0`.
    pub fn verify_e_criterion(&self) -> ECriterionReport {
        let mut pairs = Vec::new();
        let mut violations = Vec::new();
        for i in 0..self.local_s.rank() {
            for mu in 0..self.ambient_s.rank() {
                let b = self.b(i, mu);
                let c = self.count(i, mu);
                if (b > 0) != (c > 0) {
                    violations.push((i, mu));
                }
                pairs.push((i, mu, b, c));
            }
        }
        ECriterionReport { pairs, violations }
    }

    /// Evaluates the intertwining, proportionality, weight and resolution identities.
    pub fn verify_spectral_identities(&self) -> Result<SpectralIdentityReport> {
        let (nl, na) = (self.local_s.rank(), self.ambient_s.rank());
        let sl = self.local_s.s_matrix();
        let sa = self.ambient_s.s_matrix();
        let bmat = DMatrix::<C64>::from_fn(nl, na, |i, mu| C64::from(self.b(i, mu) as f64));
        let s_intertwining = cmax(&(sl * &bmat - &bmat * sa));

        let dual = self.local_s.dual_permutation()?;
        let unit = self.system.basis().unit_index();
        let mut proportionality: f64 = 0.0;
        for e in &self.eigenvectors {
            let va = e.vector[unit];
            for j in 0..nl {
                let k = self.simple_of_label[j];
                let expected = self.local_s.s(dual[j], e.local) / self.local_s.s(0, e.local) * va;
                proportionality = proportionality.max((e.vector[k] - expected).norm());
            }
        }

        let mut weight: f64 = 0.0;
        for k in 0..nl {
            for delta in 0..na {
                let total: f64 = self
                    .eigenvectors
                    .iter()
                    .filter(|e| e.local == k && e.ambient == delta)
                    .map(|e| e.vector[unit].norm_sqr())
                    .sum::<f64>();
                let scale = self.ambient_s.s(0, delta).re * self.local_s.s(0, k).re;
                weight = weight.max((total / scale - self.b(k, delta) as f64).abs());
            }
        }

        let mut resolution: f64 = 0.0;
        for (lambda, v) in self.system.ambient_operators().iter().enumerate() {
            let mut rebuilt = CMat::zeros(v.nrows(), v.ncols());
            for e in &self.eigenvectors {
                let ev = self.ambient_s.s(lambda, e.ambient) / self.ambient_s.s(0, e.ambient);
                rebuilt += (&e.vector.conjugate() * e.vector.transpose()) * ev;
            }
            resolution = resolution.max(cmax(&(rebuilt - to_complex(v))));
        }

        let basis = CMat::from_columns(
            &self
                .eigenvectors
                .iter()
                .map(|e| e.vector.clone())
                .collect::<Vec<_>>(),
        );
        let r = basis.ncols();
        let orthonormality = cmax(&(basis.adjoint() * &basis - CMat::identity(r, r)));

        Ok(SpectralIdentityReport {
            s_intertwining,
            proportionality,
            weight,
            resolution,
            orthonormality,
        })
    }
}
