//! Modular data: normalized S-matrix and twists, with the derived fusion ring.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::{eps_num, EPS_INT};

/// Complex scalar type used throughout.
pub type C64 = Complex64;

/// Dense complex matrix.
pub type CMatrix = DMatrix<C64>;

/// Numerical skeleton of a pseudo-unitary modular tensor category.
///
/// Index 0 is the unit. Labels are display strings only; all comparisons go
/// through indices.
#[derive(Clone, Debug, PartialEq)]
pub struct ModularData {
    name: String,
    labels: Vec<String>,
    s: CMatrix,
    twists: Vec<C64>,
}

/// Quantum dimensions `d_a = s_{1a}/s_{11}` and the global dimension `D = 1/s_{11}`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumDims {
    pub dims: Vec<f64>,
    pub global_dim: f64,
}

/// One named invariant with its numeric residual.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, residual: f64) -> Self {
        Check {
            name: name.into(),
            passed,
            residual,
        }
    }

    fn below(name: &str, residual: f64, tol: f64) -> Self {
        Check::new(name, residual < tol, residual)
    }
}

/// Result of [`ModularData::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Where duals enter the balancing identity
/// `s_ab = D^-1 θ_a^-1 θ_b^-1 Σ_c N_{x y}^c θ_c d_c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualPlacement {
    /// `N_{a b}^c`
    Neither,
    /// `N_{a' b}^c`
    First,
    /// `N_{a b'}^c`
    Second,
}

/// Convention used by [`ModularData::balancing_check`]; it is the one that
/// holds for every generator in [`crate::generators`].
pub const BALANCING_PLACEMENT: DualPlacement = DualPlacement::Neither;

impl ModularData {
    /// Builds modular data, checking only shapes and finiteness.
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        s: CMatrix,
        twists: Vec<C64>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Structure("no labels".into()));
        }
        if s.nrows() != n || s.ncols() != n {
            return Err(Error::Structure(format!(
                "S is {}x{} but there are {} labels",
                s.nrows(),
                s.ncols(),
                n
            )));
        }
        if twists.len() != n {
            return Err(Error::Structure(format!(
                "{} twists for {} labels",
                twists.len(),
                n
            )));
        }
        if s.iter().chain(twists.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Structure("non-finite entry".into()));
        }
        Ok(ModularData {
            name: name.into(),
            labels,
            s,
            twists,
        })
    }

    /// Builds modular data from row vectors.
    pub fn from_rows(
        name: impl Into<String>,
        labels: Vec<String>,
        rows: &[Vec<C64>],
        twists: Vec<C64>,
    ) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Structure("S is not square".into()));
        }
        let s = CMatrix::from_fn(n, n, |i, j| rows[i][j]);
        ModularData::new(name, labels, s, twists)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn s_matrix(&self) -> &CMatrix {
        &self.s
    }

    pub fn s(&self, a: usize, b: usize) -> C64 {
        self.s[(a, b)]
    }

    pub fn twists(&self) -> &[C64] {
        &self.twists
    }

    pub fn twist(&self, a: usize) -> C64 {
        self.twists[a]
    }

    /// Renamed copy.
    pub fn with_name(&self, name: impl Into<String>) -> Self {
        ModularData {
            name: name.into(),
            ..self.clone()
        }
    }

    /// Copy with a single twist replaced. No validation is performed.
    pub fn with_twist(&self, a: usize, value: C64) -> Result<Self> {
        if a >= self.rank() {
            return Err(Error::Structure(format!("label index {a} out of range")));
        }
        let mut out = self.clone();
        out.twists[a] = value;
        Ok(out)
    }

    /// Mirror data: conjugated S-matrix and twists.
    pub fn mirror(&self) -> Self {
        ModularData {
            name: format!("{}-mirror", self.name),
            labels: self.labels.clone(),
            s: self.s.map(|z| z.conj()),
            twists: self.twists.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Global dimension `D = 1/s_11`.
    pub fn global_dim(&self) -> f64 {
        1.0 / self.s[(0, 0)].re
    }

    pub fn quantum_dims(&self) -> QuantumDims {
        let s11 = self.s[(0, 0)].re;
        QuantumDims {
            dims: (0..self.rank()).map(|a| self.s[(0, a)].re / s11).collect(),
            global_dim: 1.0 / s11,
        }
    }

    /// Unrounded Verlinde sums `Σ_x s_ax s_bx conj(s_cx) / s_1x`, flattened as `[a][b][c]`.
    fn verlinde_raw(&self) -> Result<Vec<C64>> {
        let n = self.rank();
        let row0: Vec<C64> = (0..n).map(|x| self.s[(0, x)]).collect();
        if row0.iter().any(|z| z.norm() < EPS_INT) {
            return Err(Error::NotModular("vanishing entry in the first row of S".into()));
        }
        let adj = self.s.adjoint();
        let mut out = vec![C64::new(0.0, 0.0); n * n * n];
        for a in 0..n {
            let mut w = self.s.clone();
            for x in 0..n {
                let scale = self.s[(a, x)] / row0[x];
                for b in 0..n {
                    w[(b, x)] *= scale;
                }
            }
            let na = w * &adj;
            for b in 0..n {
                for c in 0..n {
                    out[(a * n + b) * n + c] = na[(b, c)];
                }
            }
        }
        Ok(out)
    }

    /// Fusion coefficients from the Verlinde formula, rounded to integers.
    pub fn verlinde(&self) -> Result<FusionTensor> {
        let n = self.rank();
        let raw = self.verlinde_raw()?;
        let mut data = Vec::with_capacity(raw.len());
        for (idx, z) in raw.iter().enumerate() {
            let r = z.re.round();
            let dev = (z - C64::new(r, 0.0)).norm();
            if dev >= EPS_INT {
                let (a, b, c) = (idx / (n * n), (idx / n) % n, idx % n);
                return Err(Error::NotModular(format!(
                    "N_{{{a},{b}}}^{{{c}}} = {z} is not an integer"
                )));
            }
            if r < 0.0 {
                let (a, b, c) = (idx / (n * n), (idx / n) % n, idx % n);
                return Err(Error::NotModular(format!(
                    "N_{{{a},{b}}}^{{{c}}} = {r} is negative"
                )));
            }
            data.push(r as u32);
        }
        Ok(FusionTensor { rank: n, data })
    }

    /// Charge conjugation read off `S^2`.
    pub fn dual_permutation(&self) -> Result<Vec<usize>> {
        let (perm, residual) = self.charge_conjugation();
        let eps = eps_num();
        let perm = match perm {
            Some(p) if residual < eps => p,
            _ => {
                return Err(Error::NotModular(format!(
                    "S^2 is not a permutation matrix (residual {residual:.3e})"
                )))
            }
        };
        if perm[0] != 0 || (0..perm.len()).any(|a| perm[perm[a]] != a) {
            return Err(Error::NotModular(
                "S^2 is not an involution fixing the unit".into(),
            ));
        }
        Ok(perm)
    }

    /// Nearest permutation to `S^2` and the entrywise distance from it.
    fn charge_conjugation(&self) -> (Option<Vec<usize>>, f64) {
        let n = self.rank();
        let s2 = &self.s * &self.s;
        let mut perm = Vec::with_capacity(n);
        let mut residual: f64 = 0.0;
        for a in 0..n {
            let (b, _) = (0..n)
                .map(|b| (b, s2[(a, b)].norm()))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            for c in 0..n {
                let target = if c == b { 1.0 } else { 0.0 };
                residual = residual.max((s2[(a, c)] - C64::new(target, 0.0)).norm());
            }
            perm.push(b);
        }
        let mut seen = vec![false; n];
        for &b in &perm {
            if seen[b] {
                return (None, residual);
            }
            seen[b] = true;
        }
        (Some(perm), residual)
    }

    /// `|D s_ab - d_a d_b| < ε`: `a` and `b` centralize each other.
    pub fn monodromy_is_trivial(&self, a: usize, b: usize) -> bool {
        let d = self.quantum_dims();
        let lhs = self.s[(a, b)] * d.global_dim;
        (lhs - C64::new(d.dims[a] * d.dims[b], 0.0)).norm() < eps_num()
    }

    /// Deligne product; label `(a,b)` sits at index `a * rank(other) + b`.
    pub fn deligne_product(&self, other: &ModularData) -> ModularData {
        let (n1, n2) = (self.rank(), other.rank());
        let n = n1 * n2;
        let labels = (0..n)
            .map(|x| format!("({},{})", self.labels[x / n2], other.labels[x % n2]))
            .collect();
        let s = CMatrix::from_fn(n, n, |x, y| {
            self.s[(x / n2, y / n2)] * other.s[(x % n2, y % n2)]
        });
        let twists = (0..n)
            .map(|x| self.twists[x / n2] * other.twists[x % n2])
            .collect();
        ModularData {
            name: format!("{}*{}", self.name, other.name),
            labels,
            s,
            twists,
        }
    }

    /// Max residual of the balancing identity tying S, twists and fusion.
    pub fn balancing_check(&self, fusion: &FusionTensor) -> f64 {
        self.balancing_residual(fusion, BALANCING_PLACEMENT)
    }

    /// Balancing residual under an explicit dual placement.
    pub fn balancing_residual(&self, fusion: &FusionTensor, placement: DualPlacement) -> f64 {
        let n = self.rank();
        if fusion.rank() != n {
            return f64::INFINITY;
        }
        let dual = match placement {
            DualPlacement::Neither => (0..n).collect(),
            _ => match self.dual_permutation() {
                Ok(p) => p,
                Err(_) => return f64::INFINITY,
            },
        };
        let qd = self.quantum_dims();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let (x, y) = match placement {
                    DualPlacement::Neither => (a, b),
                    DualPlacement::First => (dual[a], b),
                    DualPlacement::Second => (a, dual[b]),
                };
                let mut acc = C64::new(0.0, 0.0);
                for c in 0..n {
                    let m = fusion.get(x, y, c);
                    if m > 0 {
                        acc += self.twists[c] * (m as f64 * qd.dims[c]);
                    }
                }
                let rhs = acc / (self.twists[a] * self.twists[b] * qd.global_dim);
                worst = worst.max((self.s[(a, b)] - rhs).norm());
            }
        }
        worst
    }

    /// Residual of `(S T^-1)^3 = λ S^2` with `|λ| = 1`, matching the balancing convention.
    pub fn modular_relation_residual(&self) -> f64 {
        let inv: Vec<C64> = self.twists.iter().map(|t| t.conj()).collect();
        let t = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(inv));
        let st = &self.s * t;
        let lhs = &st * &st * &st;
        let s2 = &self.s * &self.s;
        if s2[(0, 0)].norm() < 1e-12 {
            return f64::INFINITY;
        }
        let lambda = lhs[(0, 0)] / s2[(0, 0)];
        let diff = lhs - s2 * lambda;
        let worst = diff.iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst.max((lambda.norm() - 1.0).abs())
    }

    /// Second Frobenius-Schur indicators `ν_c = D^-2 Σ_ab N_ab^c d_a d_b (θ_a/θ_b)^2`.
    pub fn frobenius_schur_indicators(&self, fusion: &FusionTensor) -> Vec<C64> {
        let n = self.rank();
        let qd = self.quantum_dims();
        let d2 = qd.global_dim * qd.global_dim;
        (0..n)
            .map(|c| {
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..n {
                    for b in 0..n {
                        let m = fusion.get(a, b, c);
                        if m > 0 {
                            let r = self.twists[a] / self.twists[b];
                            acc += r * r * (m as f64 * qd.dims[a] * qd.dims[b]);
                        }
                    }
                }
                acc / d2
            })
            .collect()
    }

    /// Distance of each indicator from `0` (non-self-dual) or `±1` (self-dual).
    fn frobenius_schur_residual(&self, fusion: &FusionTensor, dual: &[usize]) -> f64 {
        self.frobenius_schur_indicators(fusion)
            .iter()
            .enumerate()
            .map(|(c, nu)| {
                let target = if dual[c] == c { nu.re.signum() } else { 0.0 };
                (nu - C64::new(target, 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Checks every invariant and reports residuals.
    pub fn validate(&self) -> ValidationReport {
        let eps = eps_num();
        let n = self.rank();
        let mut checks = Vec::new();

        let mut sym: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                sym = sym.max((self.s[(a, b)] - self.s[(b, a)]).norm());
            }
        }
        checks.push(Check::below("symmetric", sym, eps));

        let prod = &self.s * self.s.adjoint();
        let mut uni: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let target = if a == b { 1.0 } else { 0.0 };
                uni = uni.max((prod[(a, b)] - C64::new(target, 0.0)).norm());
            }
        }
        checks.push(Check::below("unitary", uni, eps));

        let max_im = (0..n).map(|a| self.s[(0, a)].im.abs()).fold(0.0, f64::max);
        let min_re = (0..n).map(|a| self.s[(0, a)].re).fold(f64::INFINITY, f64::min);
        let pos_residual = max_im.max((eps - min_re).max(0.0));
        checks.push(Check::new(
            "first_row_positive",
            max_im < eps && min_re > eps,
            pos_residual,
        ));

        let mut tw = (self.twists[0] - C64::new(1.0, 0.0)).norm();
        for t in &self.twists {
            tw = tw.max((t.norm() - 1.0).abs());
        }
        checks.push(Check::below("twists", tw, eps));
        checks.push(Check::below("modular_relation", self.modular_relation_residual(), eps));

        let (perm, cc) = self.charge_conjugation();
        let cc_ok = cc < eps
            && perm
                .as_ref()
                .map(|p| p[0] == 0 && (0..n).all(|a| p[p[a]] == a))
                .unwrap_or(false);
        checks.push(Check::new("charge_conjugation", cc_ok, cc));

        let fusion = match self.verlinde_raw() {
            Ok(raw) => {
                let dev = raw
                    .iter()
                    .map(|z| (z - C64::new(z.re.round(), 0.0)).norm())
                    .fold(0.0, f64::max);
                let negative = raw.iter().any(|z| z.re.round() < 0.0);
                checks.push(Check::new(
                    "verlinde_integrality",
                    dev < EPS_INT && !negative,
                    dev,
                ));
                self.verlinde().ok()
            }
            Err(_) => {
                checks.push(Check::new("verlinde_integrality", false, f64::INFINITY));
                None
            }
        };

        match &fusion {
            Some(f) => {
                let dual = if cc_ok { perm.clone() } else { None };
                let violations = f.axiom_violations(dual.as_deref());
                checks.push(Check::new(
                    "fusion_axioms",
                    violations == 0 && dual.is_some(),
                    violations as f64,
                ));
                checks.push(Check::below("balancing", self.balancing_check(f), eps));
                let fs = match &dual {
                    Some(d) => self.frobenius_schur_residual(f, d),
                    None => f64::INFINITY,
                };
                checks.push(Check::below("frobenius_schur", fs, eps));
            }
            None => {
                checks.push(Check::new("fusion_axioms", false, f64::INFINITY));
                checks.push(Check::new("balancing", false, f64::INFINITY));
                checks.push(Check::new("frobenius_schur", false, f64::INFINITY));
            }
        }

        ValidationReport { checks }
    }
}

/// Nonnegative-integer structure constants `N_ab^c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionTensor {
    rank: usize,
    data: Vec<u32>,
}

impl FusionTensor {
    /// Builds a tensor from a flattened `[a][b][c]` array.
    pub fn from_data(rank: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rank * rank * rank {
            return Err(Error::Structure("fusion tensor has the wrong size".into()));
        }
        Ok(FusionTensor { rank, data })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> u32 {
        self.data[(a * self.rank + b) * self.rank + c]
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    /// Support of `a ⊗ b` as (label, multiplicity) pairs.
    pub fn product(&self, a: usize, b: usize) -> Vec<(usize, u32)> {
        (0..self.rank)
            .filter_map(|c| {
                let m = self.get(a, b, c);
                (m > 0).then_some((c, m))
            })
            .collect()
    }

    /// Fusion of two object vectors.
    pub fn fuse(&self, x: &ObjectVector, y: &ObjectVector) -> ObjectVector {
        let n = self.rank;
        let mut out = vec![0u32; n];
        for a in x.support() {
            for b in y.support() {
                let w = x.0[a] * y.0[b];
                for (c, o) in out.iter_mut().enumerate() {
                    *o += w * self.get(a, b, c);
                }
            }
        }
        ObjectVector(out)
    }

    /// Fusion of a simple label with an object vector.
    pub fn fuse_label(&self, a: usize, y: &ObjectVector) -> ObjectVector {
        self.fuse(&ObjectVector::simple(self.rank, a), y)
    }

    /// Kronecker product, matching the label order of [`ModularData::deligne_product`].
    pub fn tensor(&self, other: &FusionTensor) -> FusionTensor {
        let (n1, n2) = (self.rank, other.rank);
        let n = n1 * n2;
        let mut data = vec![0u32; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    data[(a * n + b) * n + c] = self.get(a / n2, b / n2, c / n2)
                        * other.get(a % n2, b % n2, c % n2);
                }
            }
        }
        FusionTensor { rank: n, data }
    }

    /// Number of violated fusion-ring axioms (unit, commutativity, duality when
    /// a dual permutation is given, associativity).
    pub fn axiom_violations(&self, dual: Option<&[usize]>) -> usize {
        let n = self.rank;
        let mut bad = 0;
        for a in 0..n {
            for b in 0..n {
                if self.get(0, a, b) != u32::from(a == b) {
                    bad += 1;
                }
                for c in 0..n {
                    if self.get(a, b, c) != self.get(b, a, c) {
                        bad += 1;
                    }
                }
                if let Some(d) = dual {
                    if self.get(a, b, 0) != u32::from(b == d[a]) {
                        bad += 1;
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let lhs: u64 = (0..n)
                            .map(|e| self.get(a, b, e) as u64 * self.get(e, c, d) as u64)
                            .sum();
                        let rhs: u64 = (0..n)
                            .map(|f| self.get(b, c, f) as u64 * self.get(a, f, d) as u64)
                            .sum();
                        if lhs != rhs {
                            bad += 1;
                        }
                    }
                }
            }
        }
        bad
    }
}

/// Nonnegative-integer combination of simple labels (a Grothendieck-group element).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectVector(pub Vec<u32>);

impl ObjectVector {
    pub fn zero(rank: usize) -> Self {
        ObjectVector(vec![0; rank])
    }

    pub fn simple(rank: usize, a: usize) -> Self {
        let mut v = vec![0; rank];
        v[a] = 1;
        ObjectVector(v)
    }

    pub fn mult(&self) -> &[u32] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&m| m == 0)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&a| self.0[a] > 0).collect()
    }

    /// `Σ_a m_a d_a`.
    pub fn dim(&self, dims: &[f64]) -> f64 {
        self.0.iter().zip(dims).map(|(&m, d)| m as f64 * d).sum()
    }

    /// `⟨x, y⟩ = Σ_a x_a y_a`.
    pub fn inner(&self, other: &ObjectVector) -> u32 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }
}
