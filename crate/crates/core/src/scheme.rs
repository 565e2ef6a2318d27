//! Exact linear algebra over the Grassmann scheme of a [`GeometryCtx`].
//!
//! The relations are stored once as a `N x N` table of relation indices
//! (`i` where `dim(π ∩ π') = k - i`); dense [`ExactMatrix`] views are built
//! from it on demand. Matrix-vector products used by the checks go through
//! the table directly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{eigenvalue_p, qb, SchemeParams};
use crate::matrix::{dot, is_zero_vec, ExactMatrix, RVec, RowSpace};
use crate::projspace::GeometryCtx;

/// Largest number of `k`-spaces for which the dense scheme is built.
pub const DEFAULT_MAX_SCHEME: usize = 5000;

/// Relation index for every ordered pair of `k`-spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationTable {
    size: usize,
    classes: u8,
    data: Vec<u8>,
}

impl RelationTable {
    pub fn build(ctx: &GeometryCtx) -> Self {
        let size = ctx.num_kspaces();
        let mut data = vec![0u8; size * size];
        for a in 0..size {
            for b in a..size {
                let r = ctx.relation(a as u32, b as u32) as u8;
                data[a * size + b] = r;
                data[b * size + a] = r;
            }
        }
        RelationTable { size, classes: ctx.params().k as u8 + 2, data }
    }

    pub(crate) fn from_raw(size: usize, classes: u8, data: Vec<u8>) -> Result<Self> {
        if data.len() != size * size || data.iter().any(|&r| r >= classes) {
            return Err(Error::Cache("relation table payload is malformed".into()));
        }
        Ok(RelationTable { size, classes, data })
    }

    pub(crate) fn raw(&self) -> &[u8] {
        &self.data
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of relations, `k + 2`.
    pub fn classes(&self) -> usize {
        self.classes as usize
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> u8 {
        self.data[a * self.size + b]
    }

    pub fn row(&self, a: usize) -> &[u8] {
        &self.data[a * self.size..(a + 1) * self.size]
    }

    /// `A_i v` over the rationals.
    pub fn apply(&self, i: usize, v: &[BigRational]) -> RVec {
        (0..self.size)
            .map(|a| {
                self.row(a)
                    .iter()
                    .zip(v)
                    .filter(|(&r, x)| r as usize == i && !x.is_zero())
                    .fold(BigRational::zero(), |acc, (_, x)| acc + x)
            })
            .collect()
    }

    /// `A_i v` for integer vectors.
    pub fn apply_int(&self, i: usize, v: &[i128]) -> Vec<i128> {
        (0..self.size)
            .map(|a| {
                self.row(a)
                    .iter()
                    .zip(v)
                    .filter(|(&r, _)| r as usize == i)
                    .map(|(_, x)| *x)
                    .sum()
            })
            .collect()
    }

    /// Per-row counts of `(row, i)` pairs restricted to members: entry
    /// `[a][i]` = number of `σ ∈ L` with relation `i` to `a`.
    pub fn distribution(&self, a: usize, members: &[bool]) -> Vec<usize> {
        let mut out = vec![0; self.classes()];
        for (r, &m) in self.row(a).iter().zip(members) {
            if m {
                out[*r as usize] += 1;
            }
        }
        out
    }

    pub fn row_sums(&self, i: usize) -> Vec<usize> {
        (0..self.size).map(|a| self.row(a).iter().filter(|&&r| r as usize == i).count()).collect()
    }
}

/// Points x `k`-spaces 0/1 incidence matrix.
pub fn build_incidence(ctx: &GeometryCtx) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(ctx.num_points(), ctx.num_kspaces());
    for id in 0..ctx.num_kspaces() {
        for &p in ctx.points_of(id as u32) {
            m.set(p as usize, id, BigRational::one());
        }
    }
    m
}

/// Dense `A_i`.
pub fn build_relation(i: usize, table: &RelationTable) -> Result<ExactMatrix> {
    if i >= table.classes() {
        return Err(Error::Precondition(format!(
            "relation index {i} out of range 0..={}",
            table.classes() - 1
        )));
    }
    let m = ExactMatrix::from_fn(table.size, table.size, |a, b| {
        if table.get(a, b) as usize == i {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    });
    if i == 0 && m != ExactMatrix::identity(table.size) {
        return Err(Error::Disagreement("A_0 is not the identity".into()));
    }
    Ok(m)
}

/// All relation matrices, with `Σ A_i = J` asserted.
pub fn build_all_relations(table: &RelationTable) -> Result<Vec<ExactMatrix>> {
    let mats: Vec<ExactMatrix> =
        (0..table.classes()).map(|i| build_relation(i, table)).collect::<Result<_>>()?;
    let n = table.size;
    let mut sum = ExactMatrix::zeros(n, n);
    for m in &mats {
        sum = sum.add(m);
    }
    let j = ExactMatrix::from_fn(n, n, |_, _| BigRational::one());
    if sum != j {
        return Err(Error::Disagreement("relation matrices do not sum to J".into()));
    }
    Ok(mats)
}

/// A spanning set of `ker(A)`, stored sparsely.
#[derive(Debug, Clone)]
pub struct KernelBasis {
    len: usize,
    vectors: Vec<Vec<(u32, BigRational)>>,
}

impl KernelBasis {
    fn from_dense(len: usize, dense: Vec<RVec>) -> Self {
        let vectors = dense
            .into_iter()
            .map(|v| {
                v.into_iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(i, x)| (i as u32, x))
                    .collect()
            })
            .collect();
        KernelBasis { len, vectors }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dense(&self, idx: usize) -> RVec {
        let mut v = vec![BigRational::zero(); self.len];
        for (i, x) in &self.vectors[idx] {
            v[*i as usize] = x.clone();
        }
        v
    }

    pub fn dot(&self, idx: usize, v: &[BigRational]) -> BigRational {
        self.vectors[idx]
            .iter()
            .filter(|(i, _)| !v[*i as usize].is_zero())
            .fold(BigRational::zero(), |acc, (i, x)| acc + x * &v[*i as usize])
    }

    /// Dot product with a 0/1 vector.
    pub fn dot_indicator(&self, idx: usize, members: &[bool]) -> BigRational {
        self.vectors[idx]
            .iter()
            .filter(|(i, _)| members[*i as usize])
            .fold(BigRational::zero(), |acc, (_, x)| acc + x)
    }

    /// Index of the first basis vector not orthogonal to `v`.
    pub fn first_violation(&self, v: &[BigRational]) -> Option<usize> {
        (0..self.vectors.len()).find(|&i| !self.dot(i, v).is_zero())
    }

    /// Each vector scaled to coprime integers.
    pub fn integer_vectors(&self) -> Option<Vec<Vec<(u32, i64)>>> {
        self.vectors
            .iter()
            .map(|v| {
                let lcm = v.iter().fold(BigInt::one(), |acc, (_, x)| {
                    num_integer::Integer::lcm(&acc, x.denom())
                });
                v.iter()
                    .map(|(i, x)| (x * BigRational::from_integer(lcm.clone())).to_integer().to_i64().map(|c| (*i, c)))
                    .collect::<Option<Vec<_>>>()
            })
            .collect()
    }
}

pub fn kernel_basis(a: &ExactMatrix) -> KernelBasis {
    KernelBasis::from_dense(a.ncols(), a.kernel_basis())
}

/// `v ∈ im(Aᵀ)` by elimination against the rows of `A`.
pub fn in_rowspace(v: &[BigRational], a: &ExactMatrix) -> bool {
    RowSpace::of(a).contains(v)
}

/// Precomputed scheme data for repeated queries on one geometry.
#[derive(Debug)]
pub struct Scheme {
    params: SchemeParams,
    relations: RelationTable,
    incidence: ExactMatrix,
    rowspace: RowSpace,
    kernel: KernelBasis,
}

impl Scheme {
    pub fn build(ctx: &GeometryCtx) -> Result<Self> {
        Self::check_size(ctx)?;
        Self::with_relations(ctx, RelationTable::build(ctx))
    }

    fn check_size(ctx: &GeometryCtx) -> Result<()> {
        if ctx.num_kspaces() > DEFAULT_MAX_SCHEME {
            return Err(Error::SizeCap {
                what: "dense scheme".into(),
                count: ctx.num_kspaces().to_string(),
                cap: DEFAULT_MAX_SCHEME.to_string(),
            });
        }
        Ok(())
    }

    pub fn with_relations(ctx: &GeometryCtx, relations: RelationTable) -> Result<Self> {
        Self::check_size(ctx)?;
        if relations.size() != ctx.num_kspaces() {
            return Err(Error::Precondition("relation table does not match the geometry".into()));
        }
        let incidence = build_incidence(ctx);
        let rowspace = RowSpace::of(&incidence);
        let kernel = KernelBasis::from_dense(incidence.ncols(), rowspace.kernel_basis());
        Ok(Scheme { params: *ctx.params(), relations, incidence, rowspace, kernel })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn relations(&self) -> &RelationTable {
        &self.relations
    }

    pub fn incidence(&self) -> &ExactMatrix {
        &self.incidence
    }

    pub fn rank(&self) -> usize {
        self.rowspace.dim()
    }

    pub fn rowspace(&self) -> &RowSpace {
        &self.rowspace
    }

    pub fn kernel(&self) -> &KernelBasis {
        &self.kernel
    }

    pub fn in_rowspace(&self, v: &[BigRational]) -> bool {
        self.rowspace.contains(v)
    }

    /// Orthogonality to every kernel vector.
    pub fn orthogonal_to_kernel(&self, v: &[BigRational]) -> bool {
        self.kernel.first_violation(v).is_none()
    }

    /// `K v = P_{1,k+1} v` with `K = A_{k+1}`.
    pub fn v1_eigen_check(&self, v: &[BigRational]) -> bool {
        let d = self.params.k + 1;
        let lambda = BigRational::from_integer(eigenvalue_p(1, d, &self.params).expect("in range"));
        let kv = self.relations.apply(d as usize, v);
        kv.iter().zip(v).all(|(a, b)| *a == &lambda * b)
    }

    /// `(K - P_{0,k+1})(K - P_{1,k+1}) v = 0`: `v` has no component outside
    /// `V_0 ⊥ V_1`. Integer input only.
    pub fn in_v0_v1(&self, v: &[i128]) -> bool {
        let d = self.params.k + 1;
        let p0 = eigenvalue_p(0, d, &self.params).unwrap().to_i128().unwrap();
        let p1 = eigenvalue_p(1, d, &self.params).unwrap().to_i128().unwrap();
        let shifted = |w: &[i128], lambda: i128| -> Vec<i128> {
            let kw = self.relations.apply_int(d as usize, w);
            kw.iter().zip(w).map(|(a, b)| a - lambda * b).collect()
        };
        shifted(&shifted(v, p1), p0).iter().all(|&x| x == 0)
    }

    /// Checks that `χ_Z - q^{k²+k}[n-k-1,k]([n,k]^{-1} j - χ_π) ∈ ker(A)`,
    /// `Z` the `k`-spaces disjoint from `π`.
    pub fn disjointness_vector_identity(&self, pi: u32) -> bool {
        let (n, k, q) = (self.params.n as i64, self.params.k as i64, self.params.q);
        let scale = BigRational::from_integer(crate::exactmath::disjoint_scale(&self.params));
        let inv_nk = BigRational::new(BigInt::one(), qb(n, k, q));
        let d = self.params.k as u8 + 1;
        let v: RVec = self
            .relations
            .row(pi as usize)
            .iter()
            .enumerate()
            .map(|(id, &r)| {
                let chi_z = if r == d { BigRational::one() } else { BigRational::zero() };
                let chi_pi = if id == pi as usize { BigRational::one() } else { BigRational::zero() };
                chi_z - &scale * (&inv_nk - chi_pi)
            })
            .collect();
        is_zero_vec(&self.incidence.mul_vec(&v))
    }
}

/// Outcome of computing `V_0` and `V_1` explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct V0V1Report {
    pub rank_a: usize,
    pub dim_v0: usize,
    pub dim_v1: usize,
    pub rows_in_sum: bool,
    pub j_in_rowspace: bool,
}

impl V0V1Report {
    pub fn holds(&self) -> bool {
        self.dim_v0 == 1 && self.dim_v0 + self.dim_v1 == self.rank_a && self.rows_in_sum && self.j_in_rowspace
    }
}

/// Eigenspaces of `K` for `P_{0,k+1}` and `P_{1,k+1}`, compared against the
/// row space of `A`.
pub fn rowspace_equals_v0v1(scheme: &Scheme) -> Result<V0V1Report> {
    let params = scheme.params();
    let d = params.k as usize + 1;
    let k_mat = build_relation(d, scheme.relations())?;
    let eigenspace = |j: u32| -> Result<Vec<RVec>> {
        let lambda = BigRational::from_integer(eigenvalue_p(j, d as u32, params)?);
        Ok(k_mat.shift(&lambda).kernel_basis())
    };
    let v0 = eigenspace(0)?;
    let v1 = eigenspace(1)?;
    let n = scheme.relations().size();
    let mut span_rows = v0.clone();
    span_rows.extend(v1.iter().cloned());
    let span = RowSpace::of_rows(span_rows, n);
    let rows_in_sum = (0..scheme.incidence().nrows()).all(|r| span.contains(scheme.incidence().row(r)));
    let j: RVec = vec![BigRational::one(); n];
    Ok(V0V1Report {
        rank_a: scheme.rank(),
        dim_v0: v0.len(),
        dim_v1: v1.len(),
        rows_in_sum,
        j_in_rowspace: scheme.in_rowspace(&j),
    })
}

/// Result of checking the eigenvalue matrix against explicit eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// Dimension of each eigenspace `V_j` found from `A_1`.
    pub multiplicities: Vec<usize>,
    /// `[j][i]`: every basis vector of `V_j` satisfies `A_i v = P_{ji} v`.
    pub verified: Vec<Vec<bool>>,
}

impl SpectrumReport {
    pub fn all_verified(&self, total: usize) -> bool {
        self.multiplicities.iter().sum::<usize>() == total
            && self.verified.iter().flatten().all(|&b| b)
    }
}

/// Builds each `V_j` as the kernel of `A_1 - P_{j1} I`, then checks every
/// relation on every basis vector.
pub fn verify_spectrum(scheme: &Scheme) -> Result<SpectrumReport> {
    let params = scheme.params();
    let d = params.k + 1;
    let table = scheme.relations();
    let a1 = build_relation(1, table)?;
    let mut multiplicities = Vec::new();
    let mut verified = Vec::new();
    for j in 0..=d {
        let lambda = BigRational::from_integer(eigenvalue_p(j, 1, params)?);
        let basis = a1.shift(&lambda).kernel_basis();
        let mut row = Vec::new();
        for i in 0..=d {
            let p = BigRational::from_integer(eigenvalue_p(j, i, params)?);
            let ok = basis.iter().all(|v| {
                let av = table.apply(i as usize, v);
                av.iter().zip(v).all(|(a, b)| *a == &p * b)
            });
            row.push(ok);
        }
        multiplicities.push(basis.len());
        verified.push(row);
    }
    Ok(SpectrumReport { multiplicities, verified })
}

/// Whether `A_a A_b = A_b A_a` for all pairs.
pub fn relations_commute(mats: &[ExactMatrix]) -> bool {
    mats.iter()
        .enumerate()
        .all(|(a, ma)| mats[a + 1..].iter().all(|mb| ma.mul(mb) == mb.mul(ma)))
}

/// `A χ` for a 0/1 vector: per point, the number of members through it.
pub fn point_counts(ctx: &GeometryCtx, members: &[bool]) -> Vec<usize> {
    let mut out = vec![0; ctx.num_points()];
    for (id, _) in members.iter().enumerate().filter(|(_, &m)| m) {
        for &p in ctx.points_of(id as u32) {
            out[p as usize] += 1;
        }
    }
    out
}

pub fn indicator_vec(members: &[bool]) -> RVec {
    members
        .iter()
        .map(|&m| if m { BigRational::one() } else { BigRational::zero() })
        .collect()
}

/// Dot product helper for callers holding dense kernel vectors.
pub fn orthogonal(a: &[BigRational], b: &[BigRational]) -> bool {
    dot(a, b).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::count_disjoint;

    fn setup(n: u32, k: u32, q: u64) -> (GeometryCtx, Scheme) {
        let ctx = GeometryCtx::enumerate(SchemeParams::new(n, k, q).unwrap()).unwrap();
        let s = Scheme::build(&ctx).unwrap();
        (ctx, s)
    }

    #[test]
    fn incidence_pg32() {
        let (ctx, s) = setup(3, 1, 2);
        let a = s.incidence();
        assert_eq!((a.nrows(), a.ncols()), (15, 35));
        let ones = vec![BigRational::one(); 35];
        assert!(a.mul_vec(&ones).iter().all(|x| *x == BigRational::from_integer(7.into())));
        let pts = vec![BigRational::one(); 15];
        assert!(a.transpose().mul_vec(&pts).iter().all(|x| *x == BigRational::from_integer(3.into())));
        assert_eq!(s.rank(), 15);
        assert_eq!(s.kernel().len(), 20);
        assert_eq!(ctx.num_kspaces(), 35);
    }

    #[test]
    fn relations_pg32() {
        let (_, s) = setup(3, 1, 2);
        let mats = build_all_relations(s.relations()).unwrap();
        assert_eq!(mats[0], ExactMatrix::identity(35));
        assert!(mats.iter().all(|m| m.is_symmetric()));
        assert!(s.relations().row_sums(2).iter().all(|&c| c as i64 == 16));
        assert_eq!(count_disjoint(3, 2, 1, 1), BigInt::from(16));
        for i in 0..3 {
            let p = eigenvalue_p(0, i, s.params()).unwrap();
            assert!(s.relations().row_sums(i as usize).iter().all(|&c| BigInt::from(c) == p));
        }
        assert!(relations_commute(&mats));
        assert!(build_relation(3, s.relations()).is_err());
    }

    #[test]
    fn rowspace_and_kernel_routes() {
        let (ctx, s) = setup(3, 1, 2);
        for r in 0..15 {
            let row = s.incidence().row(r).to_vec();
            assert!(s.in_rowspace(&row));
            assert!(s.orthogonal_to_kernel(&row));
        }
        let pencil = ctx.pencil(0).indicator(35);
        assert!(s.in_rowspace(&indicator_vec(&pencil)));
        let mut lines = vec![false; 35];
        for id in 0..7 {
            lines[id] = true;
        }
        let v = indicator_vec(&lines);
        assert_eq!(s.in_rowspace(&v), s.orthogonal_to_kernel(&v));
        assert!(in_rowspace(&indicator_vec(&pencil), s.incidence()));
        let kb = kernel_basis(s.incidence());
        assert_eq!(kb.len(), 20);
        for i in 0..kb.len() {
            assert!(is_zero_vec(&s.incidence().mul_vec(&kb.dense(i))));
        }
    }

    #[test]
    fn disjointness_identity_all_lines() {
        let (_, s) = setup(3, 1, 2);
        assert!((0..35).all(|pi| s.disjointness_vector_identity(pi)));
        let (_, s) = setup(4, 2, 2);
        assert!((0..155).all(|pi| s.disjointness_vector_identity(pi)));
    }

    #[test]
    fn v1_checks() {
        let (ctx, s) = setup(3, 1, 2);
        let pencil = ctx.pencil(3).indicator(35);
        // x = 1: v = χ - (q^2-1)/(q^4-1) j = χ - j/5
        let fifth = BigRational::new(1.into(), 5.into());
        let v: RVec = indicator_vec(&pencil).into_iter().map(|c| c - &fifth).collect();
        assert!(s.v1_eigen_check(&v));
        let j = vec![BigRational::one(); 35];
        assert!(!s.v1_eigen_check(&j));
        let kj = s.relations().apply(2, &j);
        assert!(kj.iter().all(|x| *x == BigRational::from_integer(16.into())));
        assert!(s.v1_eigen_check(&vec![BigRational::zero(); 35]));
    }

    #[test]
    fn v0v1_decomposition() {
        let (_, s) = setup(3, 1, 2);
        let r = rowspace_equals_v0v1(&s).unwrap();
        assert_eq!((r.rank_a, r.dim_v0, r.dim_v1), (15, 1, 14));
        assert!(r.holds());
        let (_, s) = setup(4, 1, 2);
        let r = rowspace_equals_v0v1(&s).unwrap();
        assert_eq!(r.rank_a, 31);
        assert!(r.holds());
    }

    #[test]
    fn spectrum_pg32() {
        let (_, s) = setup(3, 1, 2);
        let rep = verify_spectrum(&s).unwrap();
        assert_eq!(rep.multiplicities, vec![1, 14, 20]);
        assert!(rep.all_verified(35));
    }
}
