//! Commutative algebra objects at the Grothendieck level: induction, locality,
//! the simple module classes of `D_A`, and their fusion operators.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::modular::{FusionTensor, ModularData, ObjectVector};
use crate::tolerance::eps_num;

/// Integer matrix used for module fusion operators.
pub type IntMatrix = DMatrix<i64>;

/// Search budget for Gram factorization and fixed-point resolution.
const SEARCH_BUDGET: usize = 200_000;

/// Largest ambient rank accepted by the Gram factorization fallback.
pub const GRAM_RANK_LIMIT: usize = 64;

/// Multiplicity vector `m_a = ⟨a, A⟩` of a commutative algebra in an ambient category.
#[derive(Clone, Debug)]
pub struct AlgebraObject {
    base: ModularData,
    fusion: FusionTensor,
    dims: Vec<f64>,
    dual: Vec<usize>,
    mult: Vec<u32>,
}

impl AlgebraObject {
    /// Checks unit multiplicity, twist triviality on the support and duality closure.
    pub fn new(base: ModularData, mult: Vec<u32>) -> Result<Self> {
        let fusion = base.verlinde()?;
        AlgebraObject::with_fusion(base, fusion, mult)
    }

    /// As [`AlgebraObject::new`] with precomputed fusion rules of `base`.
    pub fn with_fusion(base: ModularData, fusion: FusionTensor, mult: Vec<u32>) -> Result<Self> {
        if fusion.rank() != base.rank() {
            return Err(Error::Structure("fusion rank differs from base rank".into()));
        }
        if mult.len() != base.rank() {
            return Err(Error::Structure(format!(
                "algebra has {} multiplicities for rank {}",
                mult.len(),
                base.rank()
            )));
        }
        let dual = base.dual_permutation()?;
        if mult[0] != 1 {
            return Err(Error::InvalidAlgebra(format!(
                "unit multiplicity is {}, expected 1",
                mult[0]
            )));
        }
        let eps = eps_num();
        for (a, &m) in mult.iter().enumerate() {
            if m == 0 {
                continue;
            }
            if (base.twist(a) - 1.0).norm() >= eps {
                return Err(Error::InvalidAlgebra(format!(
                    "twist of {} is not trivial",
                    base.label(a)
                )));
            }
            if mult[dual[a]] != m {
                return Err(Error::InvalidAlgebra(format!(
                    "support is not closed under duality at {}",
                    base.label(a)
                )));
            }
        }
        let dims = base.quantum_dims().dims;
        Ok(AlgebraObject {
            base,
            fusion,
            dims,
            dual,
            mult,
        })
    }

    /// The trivial algebra `A = 1`.
    pub fn unit(base: ModularData) -> Result<Self> {
        let mut mult = vec![0; base.rank()];
        mult[0] = 1;
        AlgebraObject::new(base, mult)
    }

    pub fn base(&self) -> &ModularData {
        &self.base
    }

    pub fn fusion(&self) -> &FusionTensor {
        &self.fusion
    }

    pub fn dims(&self) -> &[f64] {
        &self.dims
    }

    pub fn dual(&self) -> &[usize] {
        &self.dual
    }

    pub fn mult(&self) -> &[u32] {
        &self.mult
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.mult.len()).filter(|&a| self.mult[a] > 0).collect()
    }

    /// `FPdim(A) = Σ m_a d_a`.
    pub fn fpdim(&self) -> f64 {
        ObjectVector(self.mult.clone()).dim(&self.dims)
    }

    /// True when every summand is invertible and appears once.
    pub fn is_simple_current(&self) -> bool {
        let eps = eps_num();
        self.support()
            .iter()
            .all(|&a| self.mult[a] == 1 && (self.dims[a] - 1.0).abs() < eps)
    }

    /// `(A ⊠ x)_c = Σ_a m_a N_{ax}^c`.
    pub fn induce(&self, x: usize) -> ObjectVector {
        self.fusion
            .fuse(&ObjectVector(self.mult.clone()), &ObjectVector::simple(self.mult.len(), x))
    }

    /// `dim Hom_A(a_x, a_y) = Σ_a m_a N_{ay}^x`.
    pub fn induced_hom(&self, x: usize, y: usize) -> u32 {
        self.support()
            .iter()
            .map(|&a| self.mult[a] * self.fusion.get(a, y, x))
            .sum()
    }

    /// True when the twist is constant on the support of `A ⊠ x`.
    pub fn is_local_induced(&self, x: usize) -> bool {
        twist_constant(&self.base, &self.induce(x).support())
    }

    /// Simple A-module classes of `D_A` with restrictions, dimensions and locality.
    pub fn decompose_module_category(&self) -> Result<ModuleClassBasis> {
        let simples = if self.is_simple_current() {
            self.decompose_simple_current()?
        } else {
            self.decompose_gram()?
        };
        let method = if self.is_simple_current() {
            DecompositionMethod::SimpleCurrent
        } else {
            DecompositionMethod::GramFactorization
        };
        let basis = ModuleClassBasis {
            algebra: self.clone(),
            simples,
            method,
        };
        let eps = eps_num();
        if basis.gram_residual() != 0 {
            return Err(Error::DecompositionNotFound(
                "Gram realization does not match induced Hom dimensions".into(),
            ));
        }
        let fp = basis.fpdim_sums();
        if (fp.all - fp.expected_all).abs() >= eps || (fp.local - fp.expected_local).abs() >= eps {
            return Err(Error::DecompositionNotFound(format!(
                "FPdim identities fail: {} vs {}, {} vs {}",
                fp.all, fp.expected_all, fp.local, fp.expected_local
            )));
        }
        Ok(basis)
    }

    fn module_simple(&self, restriction: ObjectVector) -> ModuleSimple {
        let dim = restriction.dim(&self.dims) / self.fpdim();
        let local = twist_constant(&self.base, &restriction.support());
        ModuleSimple {
            restriction,
            dim,
            local,
        }
    }

    fn decompose_simple_current(&self) -> Result<Vec<ModuleSimple>> {
        let n = self.mult.len();
        let group = self.support();
        let mut seen = vec![false; n];
        let mut simples = Vec::new();
        for x in 0..n {
            if seen[x] {
                continue;
            }
            let mut orbit: Vec<usize> = group
                .iter()
                .map(|&g| self.fusion.product(g, x)[0].0)
                .collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &y in &orbit {
                seen[y] = true;
            }
            let stabilizer = group.len() / orbit.len();
            if self.induced_hom(x, x) as usize != stabilizer {
                return Err(Error::DecompositionNotFound(format!(
                    "orbit of {} has stabilizer {} but End(a_x) = {}",
                    self.base.label(x),
                    stabilizer,
                    self.induced_hom(x, x)
                )));
            }
            if stabilizer > 2 {
                return Err(Error::DecompositionNotFound(format!(
                    "fixed point {} has stabilizer of order {stabilizer} > 2",
                    self.base.label(x)
                )));
            }
            let mut res = vec![0u32; n];
            for &y in &orbit {
                res[y] = 1;
            }
            for _ in 0..stabilizer {
                simples.push(self.module_simple(ObjectVector(res.clone())));
            }
        }
        Ok(simples)
    }

    fn decompose_gram(&self) -> Result<Vec<ModuleSimple>> {
        let n = self.mult.len();
        if n > GRAM_RANK_LIMIT {
            return Err(Error::DecompositionNotFound(format!(
                "rank {n} exceeds the Gram factorization limit {GRAM_RANK_LIMIT}"
            )));
        }
        let gram: Vec<Vec<u32>> = (0..n)
            .map(|x| (0..n).map(|y| self.induced_hom(x, y)).collect())
            .collect();
        let mut search = GramSearch {
            gram: &gram,
            n,
            columns: Vec::new(),
            nodes: 0,
            algebra: self,
        };
        match search.run(0)? {
            Some(columns) => Ok(columns
                .into_iter()
                .map(|c| self.module_simple(ObjectVector(c)))
                .collect()),
            None => Err(Error::DecompositionNotFound(
                "no Gram factorization satisfies the FPdim identities".into(),
            )),
        }
    }
}

fn twist_constant(base: &ModularData, support: &[usize]) -> bool {
    let eps = eps_num();
    match support.first() {
        None => true,
        Some(&x) => support
            .iter()
            .all(|&c| (base.twist(c) - base.twist(x)).norm() < eps),
    }
}

struct GramSearch<'a> {
    gram: &'a [Vec<u32>],
    n: usize,
    columns: Vec<Vec<u32>>,
    nodes: usize,
    algebra: &'a AlgebraObject,
}

impl GramSearch<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > SEARCH_BUDGET {
            return Err(Error::DecompositionNotFound(
                "Gram factorization search budget exceeded".into(),
            ));
        }
        Ok(())
    }

    fn run(&mut self, x: usize) -> Result<Option<Vec<Vec<u32>>>> {
        self.tick()?;
        if x == self.n {
            return Ok(self.accept().then(|| self.columns.clone()));
        }
        let mut coeffs = vec![0u32; self.columns.len()];
        self.assign_existing(x, 0, &mut coeffs)
    }

    fn accept(&self) -> bool {
        let eps = eps_num();
        let a = self.algebra;
        let fp = a.fpdim();
        let total: f64 = self
            .columns
            .iter()
            .map(|c| (ObjectVector(c.clone()).dim(&a.dims) / fp).powi(2))
            .sum();
        let global = a.base.global_dim().powi(2);
        (total - global / fp).abs() < eps
    }

    fn assign_existing(
        &mut self,
        x: usize,
        k: usize,
        coeffs: &mut Vec<u32>,
    ) -> Result<Option<Vec<Vec<u32>>>> {
        self.tick()?;
        let used: u32 = coeffs.iter().map(|c| c * c).sum();
        if used > self.gram[x][x] {
            return Ok(None);
        }
        if k == self.columns.len() {
            for y in 0..x {
                let dot: u32 = (0..k).map(|j| coeffs[j] * self.columns[j][y]).sum();
                if dot != self.gram[x][y] {
                    return Ok(None);
                }
            }
            let rest = self.gram[x][x] - used;
            for parts in square_partitions(rest, rest) {
                let before = self.columns.len();
                for (j, &c) in coeffs.iter().enumerate() {
                    self.columns[j][x] = c;
                }
                for &p in &parts {
                    let mut col = vec![0u32; self.n];
                    col[x] = p;
                    self.columns.push(col);
                }
                if let Some(found) = self.run(x + 1)? {
                    return Ok(Some(found));
                }
                self.columns.truncate(before);
                for j in 0..coeffs.len() {
                    self.columns[j][x] = 0;
                }
            }
            return Ok(None);
        }
        let cap = (self.gram[x][x] as f64).sqrt() as u32;
        for c in 0..=cap {
            let over = (0..x).any(|y| {
                let partial: u32 = (0..k).map(|j| coeffs[j] * self.columns[j][y]).sum::<u32>()
                    + c * self.columns[k][y];
                partial > self.gram[x][y]
            });
            if over {
                break;
            }
            coeffs[k] = c;
            if let Some(found) = self.assign_existing(x, k + 1, coeffs)? {
                return Ok(Some(found));
            }
        }
        coeffs[k] = 0;
        Ok(None)
    }
}

/// Nonincreasing lists of positive integers whose squares sum to `n`, parts at most `max`.
fn square_partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let top = ((n as f64).sqrt() as u32).min(max);
    for p in (1..=top).rev() {
        for mut rest in square_partitions(n - p * p, p) {
            rest.insert(0, p);
            out.push(rest);
        }
    }
    out
}

/// A simple A-module class: its restriction to the ambient category.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleSimple {
    pub restriction: ObjectVector,
    /// `dim_A = FPdim(restriction) / FPdim(A)`.
    pub dim: f64,
    pub local: bool,
}

/// How the simple module classes were found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecompositionMethod {
    SimpleCurrent,
    GramFactorization,
}

/// Sums of squared module dimensions against their expected values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FpdimSums {
    pub all: f64,
    pub expected_all: f64,
    pub local: f64,
    pub expected_local: f64,
}

/// The simple classes of `D_A`.
#[derive(Clone, Debug)]
pub struct ModuleClassBasis {
    algebra: AlgebraObject,
    simples: Vec<ModuleSimple>,
    method: DecompositionMethod,
}

impl ModuleClassBasis {
    pub fn algebra(&self) -> &AlgebraObject {
        &self.algebra
    }

    pub fn simples(&self) -> &[ModuleSimple] {
        &self.simples
    }

    pub fn len(&self) -> usize {
        self.simples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simples.is_empty()
    }

    pub fn method(&self) -> DecompositionMethod {
        self.method
    }

    /// Index of the class of A itself.
    pub fn unit_index(&self) -> usize {
        self.simples
            .iter()
            .position(|s| s.restriction.0[0] > 0)
            .expect("some simple contains the unit")
    }

    pub fn local_indices(&self) -> Vec<usize> {
        (0..self.simples.len()).filter(|&k| self.simples[k].local).collect()
    }

    /// Multiplicity of each simple class in the induced module `a_x`.
    pub fn induced_decomposition(&self, x: usize) -> Vec<u32> {
        self.simples.iter().map(|s| s.restriction.0[x]).collect()
    }

    /// Max deviation between `⟨a_x, a_y⟩` computed in the basis and `induced_hom(x, y)`.
    pub fn gram_residual(&self) -> u64 {
        let n = self.algebra.mult.len();
        let mut worst = 0u64;
        for x in 0..n {
            for y in 0..n {
                let via: u64 = self
                    .simples
                    .iter()
                    .map(|s| s.restriction.0[x] as u64 * s.restriction.0[y] as u64)
                    .sum();
                let direct = self.algebra.induced_hom(x, y) as u64;
                worst = worst.max(via.abs_diff(direct));
            }
        }
        worst
    }

    pub fn fpdim_sums(&self) -> FpdimSums {
        let fp = self.algebra.fpdim();
        let global = self.algebra.base.global_dim().powi(2);
        FpdimSums {
            all: self.simples.iter().map(|s| s.dim * s.dim).sum(),
            expected_all: global / fp,
            local: self
                .simples
                .iter()
                .filter(|s| s.local)
                .map(|s| s.dim * s.dim)
                .sum(),
            expected_local: global / (fp * fp),
        }
    }
}

/// Assignment of local simple classes to labels of a modular category.
#[derive(Clone, Debug)]
pub struct LocalMatching {
    pub mdc: ModularData,
    /// `(simple index, label of mdc)` for every local simple.
    pub pairs: Vec<(usize, usize)>,
}

impl LocalMatching {
    /// Matches local simples to labels of `mdc` whose restriction vectors agree.
    ///
    /// `restrictions[i]` is the restriction of label `i` of `mdc` to the ambient
    /// category. Simples with identical restrictions are assigned in order.
    pub fn by_restriction(
        basis: &ModuleClassBasis,
        mdc: ModularData,
        restrictions: &[ObjectVector],
    ) -> Result<Self> {
        if restrictions.len() != mdc.rank() {
            return Err(Error::Structure("one restriction per label expected".into()));
        }
        let locals = basis.local_indices();
        if locals.len() != mdc.rank() {
            return Err(Error::InconsistentBasis(format!(
                "{} local simples but {} labels",
                locals.len(),
                mdc.rank()
            )));
        }
        let mut used = vec![false; mdc.rank()];
        let mut pairs = Vec::new();
        for &k in &locals {
            let res = &basis.simples[k].restriction;
            let i = (0..mdc.rank())
                .find(|&i| !used[i] && &restrictions[i] == res)
                .ok_or_else(|| {
                    Error::InconsistentBasis(format!("local simple {k} matches no label"))
                })?;
            used[i] = true;
            pairs.push((k, i));
        }
        Ok(LocalMatching { mdc, pairs })
    }

    pub fn label_of(&self, simple: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == simple).map(|p| p.1)
    }

    pub fn simple_of(&self, label: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.1 == label).map(|p| p.0)
    }
}

/// Fusion operator of a local simple class.
#[derive(Clone, Debug)]
pub struct LocalOperator {
    pub simple: usize,
    pub label: Option<usize>,
    pub matrix: IntMatrix,
}

/// The commuting operator family `{T_j} ∪ {V^λ}` on `K(D_A)`.
///
/// Row convention: `T(a) = Σ_b M_ab b`.
#[derive(Clone, Debug)]
pub struct ModuleFusionSystem {
    basis: ModuleClassBasis,
    ambient: Vec<IntMatrix>,
    local: Vec<LocalOperator>,
    matching: Option<LocalMatching>,
}

impl ModuleFusionSystem {
    /// Builds every `V^λ` and every local `T_j`.
    ///
    /// Entries that restriction data leaves undetermined (between split
    /// fixed-point classes) are found by a bounded search enforcing
    /// adjointness, the ring homomorphism property, commutativity and, when a
    /// matching is supplied, the fusion rules of the local category.
    pub fn new(basis: ModuleClassBasis, matching: Option<LocalMatching>) -> Result<Self> {
        let (ambient, local) = Builder::new(&basis, matching.as_ref())?.build()?;
        Ok(ModuleFusionSystem {
            basis,
            ambient,
            local,
            matching,
        })
    }

    pub fn basis(&self) -> &ModuleClassBasis {
        &self.basis
    }

    pub fn matching(&self) -> Option<&LocalMatching> {
        self.matching.as_ref()
    }

    /// `V^λ` for an ambient label.
    pub fn module_fusion(&self, lambda: usize) -> &IntMatrix {
        &self.ambient[lambda]
    }

    pub fn ambient_operators(&self) -> &[IntMatrix] {
        &self.ambient
    }

    pub fn local_operators(&self) -> &[LocalOperator] {
        &self.local
    }

    /// `T_j` for a local simple class `j`.
    pub fn module_fusion_local(&self, j: usize) -> Result<&IntMatrix> {
        self.local
            .iter()
            .find(|op| op.simple == j)
            .map(|op| &op.matrix)
            .ok_or_else(|| Error::Structure(format!("simple {j} is not local")))
    }

    /// Max entry of `V^μ V^ν - Σ N_{μν}^ρ V^ρ` over all pairs.
    pub fn ring_homomorphism_residual(&self) -> i64 {
        ring_residual(&self.ambient, self.basis.algebra.fusion())
    }

    /// Max entry of all pairwise commutators in the family.
    pub fn commutator_residual(&self) -> i64 {
        let all: Vec<&IntMatrix> = self
            .ambient
            .iter()
            .chain(self.local.iter().map(|op| &op.matrix))
            .collect();
        let mut worst = 0;
        for (i, x) in all.iter().enumerate() {
            for y in &all[i + 1..] {
                worst = worst.max(max_abs(&(*x * *y - *y * *x)));
            }
        }
        worst
    }
}

fn max_abs(m: &IntMatrix) -> i64 {
    m.iter().map(|v| v.abs()).max().unwrap_or(0)
}

fn ring_residual(ops: &[IntMatrix], fusion: &FusionTensor) -> i64 {
    let n = ops.len();
    let mut worst = 0;
    for a in 0..n {
        for b in a..n {
            let mut rhs = IntMatrix::zeros(ops[a].nrows(), ops[a].ncols());
            for (c, m) in fusion.product(a, b) {
                rhs += &ops[c] * m as i64;
            }
            worst = worst.max(max_abs(&(&ops[a] * &ops[b] - rhs)));
        }
    }
    worst
}

/// Unknown block of some `V^λ` between two split clusters.
#[derive(Clone, Debug)]
struct BlockVar {
    candidates: Vec<Vec<Vec<u32>>>,
}

struct Builder<'a> {
    basis: &'a ModuleClassBasis,
    n: usize,
    r: usize,
    cluster_of: Vec<usize>,
    clusters: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    classes: usize,
    /// Entries fixed by restriction data, per class.
    fixed: Vec<Vec<Vec<Option<u32>>>>,
    /// `(class, P, Q)` -> (variable index, transposed).
    block_index: BTreeMap<(usize, usize, usize), (usize, bool)>,
    vars: Vec<BlockVar>,
    matching: Option<&'a LocalMatching>,
    /// Pseudo-inverse of the cluster restriction matrix.
    pinv: DMatrix<f64>,
}

impl<'a> Builder<'a> {
    fn new(basis: &'a ModuleClassBasis, matching: Option<&'a LocalMatching>) -> Result<Self> {
        let alg = &basis.algebra;
        let n = alg.mult.len();
        let r = basis.simples.len();

        let mut clusters: Vec<Vec<usize>> = Vec::new();
        let mut cluster_of = vec![0; r];
        for k in 0..r {
            match clusters
                .iter()
                .position(|c| basis.simples[c[0]].restriction == basis.simples[k].restriction)
            {
                Some(q) => {
                    clusters[q].push(k);
                    cluster_of[k] = q;
                }
                None => {
                    cluster_of[k] = clusters.len();
                    clusters.push(vec![k]);
                }
            }
        }

        let mut keys: Vec<Vec<u32>> = Vec::new();
        let mut class_of = vec![0; n];
        for (lambda, slot) in class_of.iter_mut().enumerate() {
            let key = basis.induced_decomposition(lambda);
            *slot = match keys.iter().position(|k| *k == key) {
                Some(c) => c,
                None => {
                    keys.push(key);
                    keys.len() - 1
                }
            };
        }
        let classes = keys.len();
        let mut rep = vec![usize::MAX; classes];
        for lambda in (0..n).rev() {
            rep[class_of[lambda]] = lambda;
        }

        let restriction = DMatrix::<f64>::from_fn(n, clusters.len(), |x, q| {
            basis.simples[clusters[q][0]].restriction.0[x] as f64
        });
        let svd = restriction.svd(true, true);
        if svd.singular_values.iter().any(|s| *s < 1e-9) {
            return Err(Error::InconsistentBasis(
                "restrictions of simple classes are linearly dependent".into(),
            ));
        }
        let pinv = svd
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::InconsistentBasis(e.to_string()))?;

        let mut b = Builder {
            pinv,
            basis,
            n,
            r,
            cluster_of,
            clusters,
            class_of,
            classes,
            fixed: Vec::new(),
            block_index: BTreeMap::new(),
            vars: Vec::new(),
            matching,
        };

        // Cluster coefficients of λ ⊠ res(l) for every class representative and row.
        let mut coeff: Vec<Vec<Vec<u32>>> = Vec::with_capacity(classes);
        for &lambda in &rep {
            let mut rows = Vec::with_capacity(r);
            for l in 0..r {
                let w = alg
                    .fusion
                    .fuse_label(lambda, &basis.simples[l].restriction);
                rows.push(b.decompose(&w)?);
            }
            coeff.push(rows);
        }
        let dual_class: Vec<usize> = rep
            .iter()
            .map(|&lambda| b.class_of[alg.dual[lambda]])
            .collect();

        let unit_class = b.class_of[0];
        let mut fixed = vec![vec![vec![None; r]; r]; classes];
        let mut pending: Vec<(usize, usize, usize, u32, u32)> = Vec::new();
        for cls in 0..classes {
            for l in 0..r {
                let p = b.cluster_of[l];
                for (q, members) in b.clusters.iter().enumerate() {
                    let c = coeff[cls][l][q];
                    if cls == unit_class {
                        for &m in members {
                            fixed[cls][l][m] = Some(u32::from(m == l));
                        }
                        continue;
                    }
                    if members.len() == 1 {
                        fixed[cls][l][members[0]] = Some(c);
                    } else if b.clusters[p].len() == 1 {
                        let mut total = 0;
                        for &m in members {
                            let v = coeff[dual_class[cls]][m][p];
                            fixed[cls][l][m] = Some(v);
                            total += v;
                        }
                        if total != c {
                            return Err(Error::InconsistentBasis(
                                "adjoint coefficients disagree with restriction".into(),
                            ));
                        }
                    } else if l == b.clusters[p][0] {
                        let m0 = members[0];
                        let colsum = coeff[dual_class[cls]][m0][p];
                        pending.push((cls, p, q, c, colsum));
                    }
                }
            }
        }
        b.fixed = fixed;

        for (cls, p, q, rowsum, colsum) in pending {
            if b.block_index.contains_key(&(cls, p, q)) {
                continue;
            }
            let partner = (dual_class[cls], q, p);
            let (rows, cols) = (b.clusters[p].len(), b.clusters[q].len());
            let symmetric = partner == (cls, p, q);
            let candidates = tables(rows, cols, rowsum, colsum, symmetric);
            if candidates.is_empty() {
                return Err(Error::InconsistentBasis(
                    "no integer block fits the restriction data".into(),
                ));
            }
            let idx = b.vars.len();
            b.vars.push(BlockVar {
                candidates,
            });
            b.block_index.insert((cls, p, q), (idx, false));
            if !symmetric {
                b.block_index.insert(partner, (idx, true));
            }
        }
        Ok(b)
    }

    /// Writes `w` as a nonnegative-integer combination of cluster restrictions.
    fn decompose(&self, w: &ObjectVector) -> Result<Vec<u32>> {
        let m = self.clusters.len();
        let rhs = nalgebra::DVector::<f64>::from_fn(self.n, |x, _| w.0[x] as f64);
        let sol = &self.pinv * rhs;
        let mut out = Vec::with_capacity(m);
        for v in sol.iter() {
            let rv = v.round();
            if (v - rv).abs() > 1e-6 || rv < 0.0 {
                return Err(Error::InconsistentBasis(
                    "fusion is not a nonnegative integer combination of simple classes".into(),
                ));
            }
            out.push(rv as u32);
        }
        for x in 0..self.n {
            let back: u32 = (0..m)
                .map(|q| out[q] * self.basis.simples[self.clusters[q][0]].restriction.0[x])
                .sum();
            if back != w.0[x] {
                return Err(Error::InconsistentBasis("re-expression is not exact".into()));
            }
        }
        Ok(out)
    }

    fn class_matrix(&self, cls: usize, choice: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.r, self.r);
        for l in 0..self.r {
            for k in 0..self.r {
                let v = match self.fixed[cls][l][k] {
                    Some(v) => v,
                    None => {
                        let (p, q) = (self.cluster_of[l], self.cluster_of[k]);
                        let (var, transposed) = self.block_index[&(cls, p, q)];
                        let li = self.clusters[p].iter().position(|&x| x == l).unwrap();
                        let ki = self.clusters[q].iter().position(|&x| x == k).unwrap();
                        let table = &self.vars[var].candidates[choice[var]];
                        if transposed {
                            table[ki][li]
                        } else {
                            table[li][ki]
                        }
                    }
                };
                m[(l, k)] = v as i64;
            }
        }
        m
    }

    fn build(&self) -> Result<(Vec<IntMatrix>, Vec<LocalOperator>)> {
        let mut choice = vec![0usize; self.vars.len()];
        let mut leaves = 0usize;
        loop {
            leaves += 1;
            if leaves > SEARCH_BUDGET {
                return Err(Error::SearchBudget(
                    "fixed-point resolution of module fusion".into(),
                ));
            }
            let by_class: Vec<IntMatrix> = (0..self.classes)
                .map(|c| self.class_matrix(c, &choice))
                .collect();
            let ambient: Vec<IntMatrix> =
                (0..self.n).map(|l| by_class[self.class_of[l]].clone()).collect();
            if ring_residual(&ambient, self.basis.algebra.fusion()) == 0 {
                if let Some(local) = self.local_operators(&ambient)? {
                    return Ok((ambient, local));
                }
            }
            if !advance(&mut choice, &self.vars.iter().map(|v| v.candidates.len()).collect::<Vec<_>>()) {
                return Err(Error::InconsistentBasis(
                    "no consistent module fusion operators".into(),
                ));
            }
        }
    }

    /// Local operators given ambient ones; `None` when no consistent choice exists.
    fn local_operators(&self, ambient: &[IntMatrix]) -> Result<Option<Vec<LocalOperator>>> {
        let basis = self.basis;
        let r = self.r;
        let locals = basis.local_indices();
        let induced: Vec<Vec<u32>> = (0..self.n).map(|x| basis.induced_decomposition(x)).collect();
        let exact = |k: usize| (0..self.n).find(|&x| (0..r).all(|j| induced[x][j] == u32::from(j == k)));

        let dual_simple = |j: usize| -> Option<usize> {
            let m = self.matching?;
            let label = m.label_of(j)?;
            let d = m.mdc.dual_permutation().ok()?;
            m.simple_of(d[label])
        };

        // Partially determined matrices and the free split entries.
        let mut partial: Vec<(usize, Vec<Vec<Option<i64>>>)> = Vec::new();
        let mut free: Vec<(usize, usize, usize, i64)> = Vec::new(); // (cluster, l, m, total)
        for &j in &locals {
            if let Some(x) = exact(j) {
                let full = (0..r)
                    .map(|l| (0..r).map(|m| Some(ambient[x][(l, m)])).collect())
                    .collect();
                partial.push((j, full));
                continue;
            }
            let q = self.cluster_of[j];
            let members = &self.clusters[q];
            let y = (0..self.n).find(|&y| {
                (0..r).all(|k| induced[y][k] == u32::from(members.contains(&k)))
            });
            let y = match y {
                Some(y) if members.iter().all(|&k| basis.simples[k].local) => y,
                _ => {
                    return Err(Error::InconsistentBasis(format!(
                        "local simple {j} is not reachable from induced modules"
                    )))
                }
            };
            let jd = dual_simple(j).ok_or_else(|| {
                Error::InconsistentBasis(
                    "split local simples need a matching to a modular category".into(),
                )
            })?;
            let mut mat = vec![vec![None; r]; r];
            for l in 0..r {
                for m in 0..r {
                    if let Some(z) = self.singleton_source(l, &induced) {
                        mat[l][m] = Some(ambient[z][(j, m)]);
                    } else if let Some(w) = self.singleton_source(m, &induced) {
                        mat[l][m] = Some(ambient[w][(jd, l)]);
                    } else if j == members[0] {
                        free.push((q, l, m, ambient[y][(l, m)]));
                    }
                }
            }
            partial.push((j, mat));
        }

        // Enumerate distributions of each free entry over the split cluster.
        let options: Vec<Vec<Vec<i64>>> = free
            .iter()
            .map(|&(q, _, _, total)| compositions(total, self.clusters[q].len()))
            .collect();
        let sizes: Vec<usize> = options.iter().map(|o| o.len()).collect();
        let mut choice = vec![0usize; free.len()];
        let mut leaves = 0usize;
        loop {
            leaves += 1;
            if leaves > SEARCH_BUDGET {
                return Err(Error::SearchBudget("local operator resolution".into()));
            }
            let mut ops = Vec::with_capacity(partial.len());
            for (j, mat) in &partial {
                let q = self.cluster_of[*j];
                let pos = self.clusters[q].iter().position(|x| x == j).unwrap();
                let m = IntMatrix::from_fn(r, r, |l, mm| match mat[l][mm] {
                    Some(v) => v,
                    None => {
                        let f = free
                            .iter()
                            .position(|&(fq, fl, fm, _)| fq == q && fl == l && fm == mm)
                            .expect("free entry registered");
                        options[f][choice[f]][pos]
                    }
                });
                ops.push(LocalOperator {
                    simple: *j,
                    label: self.matching.and_then(|mt| mt.label_of(*j)),
                    matrix: m,
                });
            }
            if self.locals_consistent(&ops, ambient, &dual_simple) {
                return Ok(Some(ops));
            }
            if !advance(&mut choice, &sizes) {
                return Ok(None);
            }
        }
    }

    /// Ambient label `z` with `a_z` equal to the single simple `l`.
    fn singleton_source(&self, l: usize, induced: &[Vec<u32>]) -> Option<usize> {
        if self.clusters[self.cluster_of[l]].len() != 1 {
            return None;
        }
        (0..self.n).find(|&x| (0..self.r).all(|k| induced[x][k] == u32::from(k == l)))
    }

    fn locals_consistent(
        &self,
        ops: &[LocalOperator],
        ambient: &[IntMatrix],
        dual_simple: &dyn Fn(usize) -> Option<usize>,
    ) -> bool {
        let unit = self.basis.unit_index();
        for op in ops {
            if op.matrix.iter().any(|&v| v < 0) {
                return false;
            }
            for m in 0..self.r {
                if op.matrix[(unit, m)] != i64::from(m == op.simple) {
                    return false;
                }
            }
            for v in ambient {
                if &op.matrix * v != v * &op.matrix {
                    return false;
                }
            }
            if let Some(d) = dual_simple(op.simple) {
                match ops.iter().find(|o| o.simple == d) {
                    Some(o) if o.matrix == op.matrix.transpose() => {}
                    _ => return false,
                }
            }
        }
        if let Some(mt) = self.matching {
            let Ok(nc) = mt.mdc.verlinde() else {
                return false;
            };
            let by_label = |i: usize| ops.iter().find(|o| o.label == Some(i)).map(|o| &o.matrix);
            for a in ops {
                for b in ops {
                    let (Some(i), Some(j)) = (a.label, b.label) else {
                        return false;
                    };
                    let mut rhs = IntMatrix::zeros(self.r, self.r);
                    for (k, mult) in nc.product(i, j) {
                        match by_label(k) {
                            Some(m) => rhs += m * mult as i64,
                            None => return false,
                        }
                    }
                    if &a.matrix * &b.matrix != rhs {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Odometer step over mixed radices; false once every combination is visited.
fn advance(choice: &mut [usize], sizes: &[usize]) -> bool {
    for i in 0..choice.len() {
        choice[i] += 1;
        if choice[i] < sizes[i] {
            return true;
        }
        choice[i] = 0;
    }
    false
}

/// Ordered ways to write `total` as a sum of `parts` nonnegative integers.
fn compositions(total: i64, parts: usize) -> Vec<Vec<i64>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Nonnegative integer `rows x cols` tables with constant row and column sums.
fn tables(rows: usize, cols: usize, rowsum: u32, colsum: u32, symmetric: bool) -> Vec<Vec<Vec<u32>>> {
    if rows as u64 * rowsum as u64 != cols as u64 * colsum as u64 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut t = vec![vec![0u32; cols]; rows];
    fill_table(&mut t, 0, 0, rowsum, colsum, symmetric, &mut out);
    out
}

fn fill_table(
    t: &mut Vec<Vec<u32>>,
    i: usize,
    j: usize,
    rowsum: u32,
    colsum: u32,
    symmetric: bool,
    out: &mut Vec<Vec<Vec<u32>>>,
) {
    let (rows, cols) = (t.len(), t[0].len());
    if i == rows {
        if (0..cols).all(|c| t.iter().map(|r| r[c]).sum::<u32>() == colsum)
            && (!symmetric || (0..rows).all(|a| (0..cols).all(|b| t[a][b] == t[b][a])))
        {
            out.push(t.clone());
        }
        return;
    }
    let (ni, nj) = if j + 1 == cols { (i + 1, 0) } else { (i, j + 1) };
    let used: u32 = t[i][..j].iter().sum();
    let col_used: u32 = (0..i).map(|r| t[r][j]).sum();
    if j + 1 == cols {
        let v = rowsum - used;
        if col_used + v <= colsum {
            t[i][j] = v;
            fill_table(t, ni, nj, rowsum, colsum, symmetric, out);
            t[i][j] = 0;
        }
        return;
    }
    for v in 0..=(rowsum - used).min(colsum - col_used) {
        t[i][j] = v;
        fill_table(t, ni, nj, rowsum, colsum, symmetric, out);
    }
    t[i][j] = 0;
}
