//! Categorical coset systems `(C1, C2, C)` with branching matrices `Z^i`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::extension::{AlgebraObject, LocalMatching, ModuleFusionSystem};
use crate::modular::{Check, FusionTensor, ModularData, ObjectVector, C64};
use crate::tolerance::{eps_num, EPS_INT};

/// Branching data: `branching[i][α][φ] = Z^i_{αφ}`.
pub type Branching = Vec<Vec<Vec<u32>>>;

/// A coset system: `M^i = ⊕ W^α ⊗ (i,α)` with `(i,α) = Σ_φ Z^i_{αφ} φ`.
#[derive(Clone, Debug)]
pub struct CosetSystem {
    md1: ModularData,
    md2: ModularData,
    mdc: ModularData,
    branching: Branching,
    n1: FusionTensor,
    n2: FusionTensor,
    nc: FusionTensor,
    d1: Vec<f64>,
    d2: Vec<f64>,
    dc: Vec<f64>,
    dual1: Vec<usize>,
    dualc: Vec<usize>,
    ambient: ModularData,
    algebra: AlgebraObject,
}

/// KW membership by the twist test and by the monodromy test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KwCriteria {
    pub by_twist: Vec<usize>,
    pub by_monodromy: Vec<usize>,
}

impl KwCriteria {
    pub fn agree(&self) -> bool {
        self.by_twist == self.by_monodromy
    }
}

/// One `(i, α)` row of the dimension-formula comparison.
#[derive(Clone, Debug)]
pub struct DimEntry {
    pub i: usize,
    pub alpha: usize,
    /// `Σ_φ Z^i_{αφ} d_φ`.
    pub from_branching: f64,
    /// `b(i,α) / b(1,1)`.
    pub from_b: C64,
    /// `c_i d_i d_α`.
    pub from_c: f64,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct DimFormulaReport {
    pub entries: Vec<DimEntry>,
    pub c: Vec<f64>,
    /// `|b(1,1) - s̈_11|`.
    pub b11_residual: f64,
    /// Smallest `Re b(i,α)` over `α ∈ J_i`.
    pub min_b_re: f64,
    /// Largest `|Im b(i,α)|` over `α ∈ J_i`.
    pub max_b_im: f64,
    pub worst_residual: f64,
}

impl DimFormulaReport {
    pub fn passed(&self) -> bool {
        let eps = eps_num();
        self.worst_residual < eps
            && self.b11_residual < eps
            && self.min_b_re > eps
            && self.max_b_im < eps
            && self.c.iter().all(|&c| c <= 1.0 + eps)
    }
}

/// The four conditions that are equivalent for a valid system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupDiagnostics {
    /// Every KW element is invertible.
    pub kw_is_group: bool,
    /// `d_(i,α) = d_i d_α` for all `i`, `α ∈ J_i`.
    pub dims_multiplicative: bool,
    /// `c_i = 1` for all `i`.
    pub c_all_one: bool,
    /// `α' ⊠ α` is supported on `J_1` for every `α`.
    pub fusion_in_j1: bool,
}

impl GroupDiagnostics {
    pub fn agree(&self) -> bool {
        let v = self.kw_is_group;
        self.dims_multiplicative == v && self.c_all_one == v && self.fusion_in_j1 == v
    }
}

#[derive(Clone, Debug)]
pub struct KwHypothesisReport {
    /// `(i, α, β, s_ij conj(ṡ_αβ))` with `j` the label of `a_{β⊗1}`.
    pub products: Vec<(usize, usize, usize, C64)>,
    pub min_re: f64,
    pub max_abs_im: f64,
}

impl KwHypothesisReport {
    pub fn passed(&self) -> bool {
        let eps = eps_num();
        self.max_abs_im < eps && self.min_re > -eps
    }

    pub fn product(&self, i: usize, alpha: usize, beta: usize) -> Option<C64> {
        self.products
            .iter()
            .find(|p| p.0 == i && p.1 == alpha && p.2 == beta)
            .map(|p| p.3)
    }
}

#[derive(Clone, Debug)]
pub struct FieldIdentification {
    pub orbits: Vec<Vec<usize>>,
    /// C2-support of each orbit (taken from its first member).
    pub supports: Vec<Vec<usize>>,
    pub same_support_within: bool,
    pub disjoint_across: bool,
}

impl FieldIdentification {
    pub fn passed(&self) -> bool {
        self.same_support_within && self.disjoint_across
    }
}

/// Stabilizer subgroups of KW for `(i, α)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilizers {
    pub g_i: Vec<usize>,
    pub g_i_alpha: Vec<usize>,
    pub closed: bool,
    /// Every element of `G^(i,α)` lies in `J_1`.
    pub within_j1: bool,
}

#[derive(Clone, Debug)]
pub struct MultiplicityReport {
    pub i: usize,
    pub alpha: usize,
    /// `⟨(i,α),(i,α)⟩ = Σ_φ (Z^i_{αφ})²`.
    pub norm: u32,
    pub stabilizer_order: usize,
    pub stabilizer_cyclic: bool,
    /// All summands of `(i,α)` share one quantum dimension.
    pub equal_summand_dims: bool,
    /// `(i,α) = (i,γ)` exactly when `γ` is in the `G^i`-orbit of `α`.
    pub orbit_criterion: bool,
    /// Cyclic stabilizer of order `t`: `t` distinct multiplicity-free summands of dimension `d_i d_α / t`.
    pub cyclic_decomposition: Option<bool>,
    /// Worst excess of `⟨(i,α),(j,γ)⟩` over its KW bound (0 when all bounds hold).
    pub bound_excess: u32,
    /// Every bound is attained.
    pub bound_equality: bool,
    /// `⟨(i,α),(i,α)⟩` and its bound.
    pub self_bound: u32,
}

impl MultiplicityReport {
    /// Predicates that hold for every valid system with invertible KW.
    pub fn passed(&self) -> bool {
        self.equal_summand_dims
            && self.orbit_criterion
            && self.cyclic_decomposition != Some(false)
            && self.bound_excess == 0
            && self.bound_equality
    }

    pub fn norm_matches_stabilizer(&self) -> bool {
        self.norm as usize == self.stabilizer_order
    }
}

#[derive(Clone, Debug)]
pub struct MixedBranchingReport {
    pub max_deviation: u32,
    pub closure: bool,
}

impl CosetSystem {
    /// Builds a system after shape checks, the unit-row condition and the
    /// algebra conditions on `A = ⊕ Z^1_{βφ} β⊗φ`.
    pub fn new(
        md1: ModularData,
        md2: ModularData,
        mdc: ModularData,
        branching: Branching,
    ) -> Result<Self> {
        let (ni, nj, nk) = (mdc.rank(), md1.rank(), md2.rank());
        if branching.len() != ni
            || branching
                .iter()
                .any(|z| z.len() != nj || z.iter().any(|row| row.len() != nk))
        {
            return Err(Error::Structure(format!(
                "branching must have shape {ni} x {nj} x {nk}"
            )));
        }
        let z1 = &branching[0];
        if (0..nk).any(|f| z1[0][f] != u32::from(f == 0)) {
            return Err(Error::InconsistentSystem(
                "(1,1) must be the unit of C2".into(),
            ));
        }
        let mut seen = Vec::new();
        for (beta, row) in z1.iter().enumerate() {
            let total: u32 = row.iter().sum();
            if total == 0 {
                continue;
            }
            if total != 1 {
                return Err(Error::InconsistentSystem(format!(
                    "(1,{}) is not simple",
                    md1.label(beta)
                )));
            }
            let phi = row.iter().position(|&v| v == 1).unwrap();
            if seen.contains(&phi) {
                return Err(Error::InconsistentSystem(format!(
                    "(1,{}) repeats a C2 simple",
                    md1.label(beta)
                )));
            }
            seen.push(phi);
        }
        let n1 = md1.verlinde()?;
        let n2 = md2.verlinde()?;
        let nc = mdc.verlinde()?;
        let dual1 = md1.dual_permutation()?;
        let dualc = mdc.dual_permutation()?;
        let ambient = md1.deligne_product(&md2);
        let mult = (0..nj)
            .flat_map(|a| (0..nk).map(move |f| (a, f)))
            .map(|(a, f)| z1[a][f])
            .collect();
        let algebra = AlgebraObject::with_fusion(ambient.clone(), n1.tensor(&n2), mult)?;
        Ok(CosetSystem {
            d1: md1.quantum_dims().dims,
            d2: md2.quantum_dims().dims,
            dc: mdc.quantum_dims().dims,
            md1,
            md2,
            mdc,
            branching,
            n1,
            n2,
            nc,
            dual1,
            dualc,
            ambient,
            algebra,
        })
    }

    pub fn md1(&self) -> &ModularData {
        &self.md1
    }

    pub fn md2(&self) -> &ModularData {
        &self.md2
    }

    pub fn mdc(&self) -> &ModularData {
        &self.mdc
    }

    pub fn branching(&self) -> &Branching {
        &self.branching
    }

    pub fn z(&self, i: usize, alpha: usize, phi: usize) -> u32 {
        self.branching[i][alpha][phi]
    }

    /// `D = C1 ⊠ C2`, index `α · rank(C2) + φ`.
    pub fn ambient(&self) -> &ModularData {
        &self.ambient
    }

    pub fn algebra(&self) -> &AlgebraObject {
        &self.algebra
    }

    /// `J_i = {α : (i,α) ≠ 0}`.
    pub fn j_set(&self, i: usize) -> Vec<usize> {
        (0..self.md1.rank())
            .filter(|&a| self.branching[i][a].iter().any(|&v| v > 0))
            .collect()
    }

    /// `M^i` restricted to `D`, as a vector over ambient labels.
    pub fn restriction(&self, i: usize) -> ObjectVector {
        ObjectVector(self.branching[i].iter().flatten().copied().collect())
    }

    pub fn restrictions(&self) -> Vec<ObjectVector> {
        (0..self.mdc.rank()).map(|i| self.restriction(i)).collect()
    }

    fn row(&self, i: usize, alpha: usize) -> ObjectVector {
        ObjectVector(self.branching[i][alpha].clone())
    }

    /// `d_(i,α) = Σ_φ Z^i_{αφ} d_φ`.
    pub fn branching_dim(&self, i: usize, alpha: usize) -> f64 {
        self.row(i, alpha).dim(&self.d2)
    }

    /// Assumption checks: dimension match, twist compatibility, covariance, surjectivity.
    pub fn assumption_checks(&self) -> Vec<Check> {
        let eps = eps_num();
        let ratio = self.md1.global_dim() * self.md2.global_dim() / self.mdc.global_dim();
        let mut dim_res: f64 = 0.0;
        for i in 0..self.mdc.rank() {
            let total: f64 = (0..self.md1.rank())
                .map(|a| self.d1[a] * self.branching_dim(i, a))
                .sum();
            dim_res = dim_res.max((total - ratio * self.dc[i]).abs());
        }
        let mut twist_res: f64 = 0.0;
        for i in 0..self.mdc.rank() {
            for a in 0..self.md1.rank() {
                for f in 0..self.md2.rank() {
                    if self.branching[i][a][f] > 0 {
                        let d = self.mdc.twist(i) - self.md1.twist(a) * self.md2.twist(f);
                        twist_res = twist_res.max(d.norm());
                    }
                }
            }
        }
        let cov = self.s_covariance_residual();
        let missing = self.unreached_c2_labels().len();
        vec![
            Check::new("dimension_match", dim_res < eps, dim_res),
            Check::new("twist_compatibility", twist_res < eps, twist_res),
            Check::new("s_covariance", cov < eps, cov),
            Check::new("surjectivity", missing == 0, missing as f64),
        ]
    }

    /// Max entry of `G s - (ṡ ⊗ s̈) G` with `G_{(α,φ), i} = Z^i_{αφ}`.
    pub fn s_covariance_residual(&self) -> f64 {
        let (ni, nj, nk) = (self.mdc.rank(), self.md1.rank(), self.md2.rank());
        let g = DMatrix::<C64>::from_fn(nj * nk, ni, |r, i| {
            C64::from(self.branching[i][r / nk][r % nk] as f64)
        });
        let lhs = &g * self.mdc.s_matrix();
        let rhs = self.ambient.s_matrix() * &g;
        (lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// C2 labels that occur in no `(i,α)`.
    pub fn unreached_c2_labels(&self) -> Vec<usize> {
        (0..self.md2.rank())
            .filter(|&f| {
                !self
                    .branching
                    .iter()
                    .any(|z| z.iter().any(|row| row[f] > 0))
            })
            .collect()
    }

    /// Both KW membership tests.
    pub fn kw_criteria(&self) -> KwCriteria {
        let eps = eps_num();
        let j1 = self.j_set(0);
        let n = self.md1.rank();
        let by_twist = (0..n)
            .filter(|&a| {
                j1.iter().all(|&b| {
                    self.n1.product(b, a).iter().all(|&(g, _)| {
                        (self.md1.twist(g) - self.md1.twist(a) * self.md1.twist(b)).norm() < eps
                    })
                })
            })
            .collect();
        let by_monodromy = (0..n)
            .filter(|&a| j1.iter().all(|&b| self.md1.monodromy_is_trivial(a, b)))
            .collect();
        KwCriteria {
            by_twist,
            by_monodromy,
        }
    }

    /// The KW set; errors when the two membership tests disagree.
    pub fn kw_set(&self) -> Result<Vec<usize>> {
        let c = self.kw_criteria();
        if c.agree() {
            Ok(c.by_twist)
        } else {
            Err(Error::KwCriteriaDisagree {
                by_twist: c.by_twist,
                by_monodromy: c.by_monodromy,
            })
        }
    }

    /// Label `i` of C with `M^i = a_{β⊗1}`, matched by exact restriction.
    pub fn identify_induced(&self, beta: usize) -> Result<usize> {
        let (nj, nk) = (self.md1.rank(), self.md2.rank());
        let mut target = vec![vec![0u32; nk]; nj];
        for g in self.j_set(0) {
            for (delta, m) in self.n1.product(g, beta) {
                for f in 0..nk {
                    target[delta][f] += m * self.branching[0][g][f];
                }
            }
        }
        let hits: Vec<usize> = (0..self.mdc.rank())
            .filter(|&i| self.branching[i] == target)
            .collect();
        match hits.as_slice() {
            [i] => Ok(*i),
            [] => Err(Error::InconsistentSystem(format!(
                "a_({}⊗1) matches no simple of C",
                self.md1.label(beta)
            ))),
            _ => Err(Error::InconsistentSystem(format!(
                "a_({}⊗1) matches several simples of C",
                self.md1.label(beta)
            ))),
        }
    }

    fn kw_with_labels(&self) -> Result<Vec<(usize, usize)>> {
        let kw = self.kw_set()?;
        let mut pairs = Vec::with_capacity(kw.len());
        for b in kw {
            pairs.push((b, self.identify_induced(b)?));
        }
        let mut js: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        js.sort_unstable();
        js.dedup();
        if js.len() != pairs.len() {
            return Err(Error::InconsistentSystem(
                "β ↦ a_(β⊗1) is not injective on KW".into(),
            ));
        }
        Ok(pairs)
    }

    /// `b(i,α) = Σ_{β∈KW} conj(ṡ_αβ) s_ij`, `M^j = a_{β⊗1}`.
    pub fn b_coeff(&self, i: usize, alpha: usize) -> Result<C64> {
        Ok(self
            .kw_with_labels()?
            .iter()
            .map(|&(b, j)| self.md1.s(alpha, b).conj() * self.mdc.s(i, j))
            .sum())
    }

    /// `c_i = Σ_{β∈J_1} d_β² / Σ_{γ∈J_i} d_γ²`.
    pub fn c_values(&self) -> Vec<f64> {
        let sq = |set: Vec<usize>| set.iter().map(|&a| self.d1[a] * self.d1[a]).sum::<f64>();
        let top = sq(self.j_set(0));
        (0..self.mdc.rank()).map(|i| top / sq(self.j_set(i))).collect()
    }

    /// Compares the three expressions for `d_(i,α)`.
    pub fn check_dim_formulas(&self) -> Result<DimFormulaReport> {
        let c = self.c_values();
        let b11 = self.b_coeff(0, 0)?;
        let s2_11 = self.md2.s(0, 0);
        let mut entries = Vec::new();
        let mut worst: f64 = 0.0;
        let mut min_b_re = f64::INFINITY;
        let mut max_b_im: f64 = 0.0;
        for i in 0..self.mdc.rank() {
            for alpha in self.j_set(i) {
                let b = self.b_coeff(i, alpha)?;
                min_b_re = min_b_re.min(b.re);
                max_b_im = max_b_im.max(b.im.abs());
                let from_branching = self.branching_dim(i, alpha);
                let from_b = b / b11;
                let from_c = c[i] * self.dc[i] * self.d1[alpha];
                let residual = (from_b - from_branching)
                    .norm()
                    .max((from_c - from_branching).abs());
                worst = worst.max(residual);
                entries.push(DimEntry {
                    i,
                    alpha,
                    from_branching,
                    from_b,
                    from_c,
                    residual,
                });
            }
        }
        Ok(DimFormulaReport {
            entries,
            c,
            b11_residual: (b11 - s2_11).norm(),
            min_b_re,
            max_b_im,
            worst_residual: worst,
        })
    }

    /// Evaluates the four group conditions independently.
    pub fn kw_group_diagnostics(&self) -> Result<GroupDiagnostics> {
        let eps = eps_num();
        let kw = self.kw_set()?;
        let kw_is_group = kw.iter().all(|&b| (self.d1[b] - 1.0).abs() < eps);
        let dims_multiplicative = (0..self.mdc.rank()).all(|i| {
            self.j_set(i).iter().all(|&a| {
                (self.branching_dim(i, a) - self.dc[i] * self.d1[a]).abs() < eps
            })
        });
        let c_all_one = self.c_values().iter().all(|&c| (c - 1.0).abs() < eps);
        let j1 = self.j_set(0);
        let fusion_in_j1 = (0..self.md1.rank()).all(|a| {
            self.n1
                .product(self.dual1[a], a)
                .iter()
                .all(|(g, _)| j1.contains(g))
        });
        Ok(GroupDiagnostics {
            kw_is_group,
            dims_multiplicative,
            c_all_one,
            fusion_in_j1,
        })
    }

    /// Products `s_ij conj(ṡ_αβ)` over `i`, `α ∈ J_i`, `β ∈ KW`.
    pub fn kw_hypothesis(&self) -> Result<KwHypothesisReport> {
        let pairs = self.kw_with_labels()?;
        let mut products = Vec::new();
        let mut min_re = f64::INFINITY;
        let mut max_abs_im: f64 = 0.0;
        for i in 0..self.mdc.rank() {
            for alpha in self.j_set(i) {
                for &(b, j) in &pairs {
                    let p = self.mdc.s(i, j) * self.md1.s(alpha, b).conj();
                    min_re = min_re.min(p.re);
                    max_abs_im = max_abs_im.max(p.im.abs());
                    products.push((i, alpha, b, p));
                }
            }
        }
        Ok(KwHypothesisReport {
            products,
            min_re,
            max_abs_im,
        })
    }

    /// C2-support of `i`: labels `φ` with `Z^i_{αφ} > 0` for some `α`.
    pub fn c2_support(&self, i: usize) -> Vec<usize> {
        (0..self.md2.rank())
            .filter(|&f| self.branching[i].iter().any(|row| row[f] > 0))
            .collect()
    }

    /// Orbits of `i ~ k` for `k ⊂ M^i ⊠ a_{β⊗1}`, `β ∈ KW`, with support checks.
    pub fn field_identification(&self) -> Result<FieldIdentification> {
        let pairs = self.kw_with_labels()?;
        let n = self.mdc.rank();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for i in 0..n {
            for &(_, j) in &pairs {
                for (k, _) in self.nc.product(i, j) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, k));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        let mut root_of: Vec<(usize, usize)> = Vec::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            match root_of.iter().find(|p| p.0 == r) {
                Some(&(_, o)) => orbits[o].push(i),
                None => {
                    root_of.push((r, orbits.len()));
                    orbits.push(vec![i]);
                }
            }
        }
        let supports: Vec<Vec<usize>> = orbits.iter().map(|o| self.c2_support(o[0])).collect();
        let same_support_within = orbits
            .iter()
            .zip(&supports)
            .all(|(o, s)| o.iter().all(|&i| &self.c2_support(i) == s));
        let disjoint_across = (0..supports.len()).all(|a| {
            (a + 1..supports.len()).all(|b| supports[a].iter().all(|f| !supports[b].contains(f)))
        });
        Ok(FieldIdentification {
            orbits,
            supports,
            same_support_within,
            disjoint_across,
        })
    }

    fn require_group(&self) -> Result<Vec<(usize, usize)>> {
        let diag = self.kw_group_diagnostics()?;
        if !diag.kw_is_group {
            return Err(Error::Precondition(
                "KW does not consist of invertible objects".into(),
            ));
        }
        self.kw_with_labels()
    }

    /// `G^i` and `G^(i,α)` as subsets of KW.
    pub fn stabilizers(&self, i: usize, alpha: usize) -> Result<Stabilizers> {
        let pairs = self.require_group()?;
        let g_i: Vec<usize> = pairs
            .iter()
            .filter(|&&(_, j)| self.nc.get(j, i, i) > 0)
            .map(|p| p.0)
            .collect();
        let g_i_alpha: Vec<usize> = g_i
            .iter()
            .copied()
            .filter(|&b| self.n1.get(b, alpha, alpha) > 0)
            .collect();
        let closed = [&g_i, &g_i_alpha].iter().all(|g| {
            g.iter().all(|&a| {
                g.iter()
                    .all(|&b| self.n1.product(a, b).iter().all(|(c, _)| g.contains(c)))
            })
        });
        let j1 = self.j_set(0);
        let within_j1 = g_i_alpha.iter().all(|b| j1.contains(b));
        Ok(Stabilizers {
            g_i,
            g_i_alpha,
            closed,
            within_j1,
        })
    }

    fn cyclic(&self, group: &[usize]) -> bool {
        group.iter().any(|&g| {
            let mut x = g;
            let mut order = 1;
            while x != 0 && order <= group.len() {
                x = self.n1.product(x, g)[0].0;
                order += 1;
            }
            x == 0 && order == group.len()
        })
    }

    /// `⟨(i,α),(j,γ)⟩` and the bound `Σ_{ε∈KW} N_{α',γ}^ε N_{i',j}^{k(ε)}`.
    pub fn inner_product_bound(
        &self,
        i: usize,
        alpha: usize,
        j: usize,
        gamma: usize,
    ) -> Result<(u32, u32)> {
        let pairs = self.kw_with_labels()?;
        let inner = self.row(i, alpha).inner(&self.row(j, gamma));
        let bound = pairs
            .iter()
            .map(|&(e, k)| {
                self.n1.get(self.dual1[alpha], gamma, e) * self.nc.get(self.dualc[i], j, k)
            })
            .sum();
        Ok((inner, bound))
    }

    /// Multiplicity predicates for `(i, α)`; requires invertible KW.
    pub fn multiplicity_structure(&self, i: usize, alpha: usize) -> Result<MultiplicityReport> {
        let eps = eps_num();
        self.require_group()?;
        let st = self.stabilizers(i, alpha)?;
        let row = self.row(i, alpha);
        let norm = row.inner(&row);
        let support = row.support();
        let equal_summand_dims = support
            .windows(2)
            .all(|w| (self.d2[w[0]] - self.d2[w[1]]).abs() < eps);
        let orbit: Vec<usize> = st
            .g_i
            .iter()
            .map(|&b| self.n1.product(b, alpha)[0].0)
            .collect();
        let orbit_criterion = self
            .j_set(i)
            .iter()
            .all(|&g| (self.branching[i][g] == self.branching[i][alpha]) == orbit.contains(&g));
        let stabilizer_cyclic = self.cyclic(&st.g_i_alpha);
        let t = st.g_i_alpha.len();
        let cyclic_decomposition = stabilizer_cyclic.then(|| {
            let target = self.dc[i] * self.d1[alpha] / t as f64;
            row.0.iter().all(|&m| m <= 1)
                && support.len() == t
                && support.iter().all(|&f| (self.d2[f] - target).abs() < eps)
        });
        let mut bound_excess = 0;
        let mut bound_equality = true;
        let mut self_bound = 0;
        for j in 0..self.mdc.rank() {
            for gamma in 0..self.md1.rank() {
                let (inner, bound) = self.inner_product_bound(i, alpha, j, gamma)?;
                bound_excess = bound_excess.max(inner.saturating_sub(bound));
                bound_equality &= inner == bound;
                if j == i && gamma == alpha {
                    self_bound = bound;
                }
            }
        }
        Ok(MultiplicityReport {
            i,
            alpha,
            norm,
            stabilizer_order: t,
            stabilizer_cyclic,
            equal_summand_dims,
            orbit_criterion,
            cyclic_decomposition,
            bound_excess,
            bound_equality,
            self_bound,
        })
    }

    /// `(1,β) ⊠ (i,α) = Σ_γ N_{βα}^γ (i,γ)` over `β ∈ J_1`, plus closure of `J_i`.
    pub fn mixed_branching_check(&self) -> MixedBranchingReport {
        let j1 = self.j_set(0);
        let mut max_deviation = 0;
        let mut closure = true;
        for i in 0..self.mdc.rank() {
            let ji = self.j_set(i);
            for &b in &j1 {
                for &a in &ji {
                    let lhs = self.n2.fuse(&self.row(0, b), &self.row(i, a));
                    let mut rhs = vec![0u32; self.md2.rank()];
                    for (g, m) in self.n1.product(b, a) {
                        closure &= ji.contains(&g);
                        for (f, slot) in rhs.iter_mut().enumerate() {
                            *slot += m * self.branching[i][g][f];
                        }
                    }
                    for (l, r) in lhs.0.iter().zip(&rhs) {
                        max_deviation = max_deviation.max(l.abs_diff(*r));
                    }
                }
            }
        }
        MixedBranchingReport {
            max_deviation,
            closure,
        }
    }

    /// Module fusion operators on `K(D_A)` with local simples matched to C.
    pub fn module_fusion_system(&self) -> Result<ModuleFusionSystem> {
        let basis = self.algebra.decompose_module_category()?;
        let matching = LocalMatching::by_restriction(&basis, self.mdc.clone(), &self.restrictions())?;
        ModuleFusionSystem::new(basis, Some(matching))
    }
}

/// Upper bound on enumerated candidate points in [`solve_branching`].
pub const SOLVER_BUDGET: u64 = 2_000_000;

/// All branching families with entries in `0..=bound` compatible with the
/// coset assumptions.
///
/// Unknowns are restricted to twist-compatible triples `θ_i = θ_α θ_φ`. The
/// real linear system of S-covariance, dimension match and the unit row is
/// solved in closed form; integer points of its solution set are enumerated
/// over a pivot box and filtered by the remaining conditions.
pub fn solve_branching(
    md1: &ModularData,
    md2: &ModularData,
    mdc: &ModularData,
    bound: u32,
) -> Result<Vec<CosetSystem>> {
    let eps = eps_num();
    let (ni, nj, nk) = (mdc.rank(), md1.rank(), md2.rank());
    let vars: Vec<(usize, usize, usize)> = (0..ni)
        .flat_map(|i| (0..nj).flat_map(move |a| (0..nk).map(move |f| (i, a, f))))
        .filter(|&(i, a, f)| (mdc.twist(i) - md1.twist(a) * md2.twist(f)).norm() < eps)
        .collect();
    let nv = vars.len();
    if nv == 0 {
        return Ok(Vec::new());
    }
    let ss = md1.deligne_product(md2);
    let d1 = md1.quantum_dims().dims;
    let d2 = md2.quantum_dims().dims;
    let dc = mdc.quantum_dims().dims;
    let ratio = md1.global_dim() * md2.global_dim() / mdc.global_dim();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for i in 0..ni {
        for bp in 0..nj * nk {
            let mut re = vec![0.0; nv];
            let mut im = vec![0.0; nv];
            for (n, &(j, a, f)) in vars.iter().enumerate() {
                let af = a * nk + f;
                let mut c = C64::from(0.0);
                if af == bp {
                    c += mdc.s(j, i);
                }
                if j == i {
                    c -= ss.s(bp, af);
                }
                re[n] = c.re;
                im[n] = c.im;
            }
            rows.push(re);
            rows.push(im);
            rhs.push(0.0);
            rhs.push(0.0);
        }
    }
    for i in 0..ni {
        rows.push(
            vars.iter()
                .map(|&(j, a, f)| if j == i { d1[a] * d2[f] } else { 0.0 })
                .collect(),
        );
        rhs.push(ratio * dc[i]);
    }
    for (n, &(i, a, f)) in vars.iter().enumerate() {
        if i == 0 && a == 0 {
            let mut r = vec![0.0; nv];
            r[n] = 1.0;
            rows.push(r);
            rhs.push(if f == 0 { 1.0 } else { 0.0 });
        }
    }
    if !vars.contains(&(0, 0, 0)) {
        return Ok(Vec::new());
    }
    while rows.len() < nv {
        rows.push(vec![0.0; nv]);
        rhs.push(0.0);
    }
    let m = DMatrix::from_fn(rows.len(), nv, |r, c| rows[r][c]);
    let b = DVector::from_vec(rhs);

    let svd = m.clone().svd(true, true);
    let x0 = svd
        .solve(&b, 1e-10)
        .map_err(|e| Error::InconsistentSystem(e.to_string()))?;
    if (&m * &x0 - &b).amax() > 1e-7 {
        return Ok(Vec::new());
    }
    let gram = m.transpose() * &m;
    let eig = SymmetricEigen::new(gram);
    let null_cols: Vec<usize> = (0..nv).filter(|&c| eig.eigenvalues[c].abs() < 1e-14).collect();
    let k = null_cols.len();
    let null = DMatrix::from_fn(nv, k, |r, c| eig.eigenvectors[(r, null_cols[c])]);

    let pivots = pivot_rows(&null);
    let combos = (bound as u64 + 1).checked_pow(k as u32).unwrap_or(u64::MAX);
    if combos > SOLVER_BUDGET {
        return Err(Error::SearchBudget(format!(
            "{combos} candidate points for a {k}-dimensional solution space"
        )));
    }
    let np = DMatrix::from_fn(k, k, |r, c| null[(pivots[r], c)]);
    let np_inv = np
        .try_inverse()
        .ok_or_else(|| Error::InconsistentSystem("singular pivot block".into()))?;

    let mut out: Vec<CosetSystem> = Vec::new();
    let mut p = vec![0u32; k];
    loop {
        let diff = DVector::from_fn(k, |r, _| p[r] as f64 - x0[pivots[r]]);
        let t = &np_inv * diff;
        let x = &x0 + &null * t;
        if let Some(zs) = integer_point(&x, bound) {
            let mut z = vec![vec![vec![0u32; nk]; nj]; ni];
            for (n, &(i, a, f)) in vars.iter().enumerate() {
                z[i][a][f] = zs[n];
            }
            if let Some(cs) = accept(md1, md2, mdc, z, &dc, &d1, &d2) {
                out.push(cs);
            }
        }
        let mut idx = 0;
        loop {
            if idx == k {
                return Ok(out);
            }
            p[idx] += 1;
            if p[idx] <= bound {
                break;
            }
            p[idx] = 0;
            idx += 1;
        }
    }
}

fn integer_point(x: &DVector<f64>, bound: u32) -> Option<Vec<u32>> {
    x.iter()
        .map(|&v| {
            let r = v.round();
            ((v - r).abs() < EPS_INT && r >= 0.0 && r <= bound as f64).then_some(r as u32)
        })
        .collect()
}

fn accept(
    md1: &ModularData,
    md2: &ModularData,
    mdc: &ModularData,
    z: Branching,
    dc: &[f64],
    d1: &[f64],
    d2: &[f64],
) -> Option<CosetSystem> {
    let eps = eps_num();
    for (i, zi) in z.iter().enumerate() {
        for (a, row) in zi.iter().enumerate() {
            let dim = ObjectVector(row.clone()).dim(d2);
            if dim > dc[i] * d1[a] + eps {
                return None;
            }
        }
    }
    let cs = CosetSystem::new(md1.clone(), md2.clone(), mdc.clone(), z).ok()?;
    cs.assumption_checks()
        .iter()
        .all(|c| c.passed)
        .then_some(cs)
}

/// Rows of `n` (tall, full column rank) forming an invertible square block.
fn pivot_rows(n: &DMatrix<f64>) -> Vec<usize> {
    let mut work = n.transpose();
    let (k, cols) = work.shape();
    let mut pivots = Vec::with_capacity(k);
    for r in 0..k {
        let (best, _) = (0..cols)
            .filter(|c| !pivots.contains(c))
            .map(|c| (c, work[(r, c)].abs()))
            .fold((usize::MAX, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        pivots.push(best);
        let pv = work[(r, best)];
        for rr in r + 1..k {
            let factor = work[(rr, best)] / pv;
            for c in 0..cols {
                let v = work[(r, c)];
                work[(rr, c)] -= factor * v;
            }
        }
    }
    pivots
}
