//! Points and `k`-subspaces of `PG(n,q)`.
//!
//! A subspace is stored as the reduced row-echelon basis of the underlying
//! vector space; equal subspaces have equal matrices. A [`GeometryCtx`]
//! enumerates every point and every `k`-subspace once, in lexicographic order
//! of their canonical matrices, and keeps the incidence data needed by the
//! scheme and search layers.

use std::collections::HashMap;

use num_traits::ToPrimitive;

use crate::error::{precondition, Error, Result};
use crate::exactmath::{num_kspaces, qbinom, SchemeParams};
use crate::gfq::{FieldCtx, FieldElement, FieldReduction, DEFAULT_MAX_Q};

pub type Vector = Vec<FieldElement>;

/// Default cap on the number of enumerated `k`-subspaces.
pub const DEFAULT_MAX_KSPACES: u64 = 1_000_000;

/// Row-reduces `rows` in place and drops zero rows. Leading entries become 1.
pub fn rref(field: &FieldCtx, rows: &mut Vec<Vector>) {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = field.inv_nonzero(rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c];
            for j in c..ncols {
                let t = field.mul(f, rows[r][j]);
                rows[i][j] = field.sub(rows[i][j], t);
            }
        }
        r += 1;
    }
    rows.truncate(r);
}

/// Scales a nonzero vector so its leftmost nonzero coordinate is 1.
pub fn normalize(field: &FieldCtx, v: &mut [FieldElement]) -> bool {
    let Some(lead) = v.iter().copied().find(|x| !x.is_zero()) else {
        return false;
    };
    let inv = field.inv_nonzero(lead);
    for x in v.iter_mut() {
        *x = field.mul(*x, inv);
    }
    true
}

/// A projective subspace of `PG(n,q)` in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    rows: Vec<Vector>,
    n: u32,
}

impl Subspace {
    /// Subspace spanned by `vectors` (each of length `n+1`).
    pub fn span(field: &FieldCtx, n: u32, vectors: &[Vector]) -> Self {
        debug_assert!(vectors.iter().all(|v| v.len() == n as usize + 1));
        let mut rows = vectors.to_vec();
        rref(field, &mut rows);
        Subspace { rows, n }
    }

    /// Builds from rows that must already be canonical; rejects otherwise.
    pub fn from_canonical(field: &FieldCtx, n: u32, rows: Vec<Vector>) -> Result<Self> {
        let s = Subspace::span(field, n, &rows);
        if s.rows != rows {
            return precondition("matrix is not a canonical reduced row-echelon basis");
        }
        Ok(s)
    }

    /// The common zero set of the given linear functionals.
    pub fn kernel_of(field: &FieldCtx, n: u32, functionals: &[Vector]) -> Self {
        let len = n as usize + 1;
        let mut rows = functionals.to_vec();
        rref(field, &mut rows);
        let pivots: Vec<usize> = rows
            .iter()
            .map(|r| r.iter().position(|x| !x.is_zero()).unwrap())
            .collect();
        let mut basis = Vec::new();
        for free in (0..len).filter(|c| !pivots.contains(c)) {
            let mut v = vec![FieldElement::ZERO; len];
            v[free] = FieldElement::ONE;
            for (r, &pc) in rows.iter().zip(&pivots) {
                v[pc] = field.neg(r[free]);
            }
            basis.push(v);
        }
        Subspace::span(field, n, &basis)
    }

    pub fn ambient(&self) -> u32 {
        self.n
    }

    /// Projective dimension; `-1` for the empty subspace.
    pub fn dim(&self) -> i32 {
        self.rows.len() as i32 - 1
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn flat(&self) -> Vec<u16> {
        self.rows.iter().flatten().map(|x| x.0).collect()
    }

    pub fn join(&self, field: &FieldCtx, other: &Subspace) -> Subspace {
        let mut all = self.rows.clone();
        all.extend(other.rows.iter().cloned());
        Subspace::span(field, self.n, &all)
    }

    /// `dim(a) + dim(b) - dim(<a, b>)`, i.e. the projective dimension of the meet.
    pub fn intersection_dim(&self, field: &FieldCtx, other: &Subspace) -> i32 {
        self.dim() + other.dim() - self.join(field, other).dim()
    }

    pub fn contains_vector(&self, field: &FieldCtx, v: &[FieldElement]) -> bool {
        let mut all = self.rows.clone();
        all.push(v.to_vec());
        rref(field, &mut all);
        all.len() == self.rows.len()
    }

    pub fn contains(&self, field: &FieldCtx, other: &Subspace) -> bool {
        other.rows.iter().all(|r| self.contains_vector(field, r))
    }

    /// Canonical point vectors of the subspace.
    pub fn point_vectors(&self, field: &FieldCtx) -> Vec<Vector> {
        let d = self.rows.len();
        let len = self.n as usize + 1;
        let q = field.q();
        let mut out = Vec::new();
        // Coefficient vectors whose first nonzero entry is 1 give each point once.
        for lead in 0..d {
            let tail = d - lead - 1;
            let combos = q.pow(tail as u32);
            for code in 0..combos {
                let mut v = self.rows[lead].clone();
                let mut c = code;
                for r in lead + 1..d {
                    let a = field.element(c % q);
                    c /= q;
                    if a.is_zero() {
                        continue;
                    }
                    for j in 0..len {
                        let t = field.mul(a, self.rows[r][j]);
                        v[j] = field.add(v[j], t);
                    }
                }
                out.push(v);
            }
        }
        out
    }

    /// Applies a coordinate permutation: coordinate `i` moves to `perm[i]`.
    pub fn permute(&self, field: &FieldCtx, perm: &[usize]) -> Subspace {
        let rows: Vec<Vector> = self
            .rows
            .iter()
            .map(|r| {
                let mut v = vec![FieldElement::ZERO; r.len()];
                for (i, &x) in r.iter().enumerate() {
                    v[perm[i]] = x;
                }
                v
            })
            .collect();
        Subspace::span(field, self.n, &rows)
    }
}

/// Every `d`-dimensional projective subspace of `PG(n,q)`, sorted
/// lexicographically by canonical matrix.
pub fn enumerate_subspaces(field: &FieldCtx, n: u32, d: u32) -> Vec<Subspace> {
    let len = n as usize + 1;
    let rank = d as usize + 1;
    let q = field.q();
    let mut out = Vec::new();
    let mut pivots: Vec<usize> = (0..rank).collect();
    loop {
        // free cells: (row, col) with col right of the row's pivot and not a pivot column
        let free: Vec<(usize, usize)> = (0..rank)
            .flat_map(|r| {
                let pv = &pivots;
                (pv[r] + 1..len).filter(move |c| !pv.contains(c)).map(move |c| (r, c))
            })
            .collect();
        let total = q.pow(free.len() as u32);
        for code in 0..total {
            let mut rows = vec![vec![FieldElement::ZERO; len]; rank];
            for (r, &p) in pivots.iter().enumerate() {
                rows[r][p] = FieldElement::ONE;
            }
            let mut c = code;
            for &(r, col) in &free {
                rows[r][col] = field.element(c % q);
                c /= q;
            }
            out.push(Subspace { rows, n });
        }
        // next pivot combination
        let mut i = rank;
        loop {
            if i == 0 {
                out.sort_unstable_by_key(|s| s.flat());
                return out;
            }
            i -= 1;
            if pivots[i] < len - rank + i {
                pivots[i] += 1;
                for j in i + 1..rank {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Sorted, duplicate-free list of `k`-subspace ids of a [`GeometryCtx`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KFamily(Vec<u32>);

impl KFamily {
    pub fn new(mut ids: Vec<u32>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        KFamily(ids)
    }

    /// Accepts ids that are already strictly increasing.
    pub fn from_sorted(ids: Vec<u32>) -> Result<Self> {
        if ids.windows(2).any(|w| w[0] >= w[1]) {
            return precondition("family ids must be strictly increasing");
        }
        Ok(KFamily(ids))
    }

    pub fn ids(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: u32) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn into_ids(self) -> Vec<u32> {
        self.0
    }

    /// 0/1 membership vector over all `total` ids.
    pub fn indicator(&self, total: usize) -> Vec<bool> {
        let mut v = vec![false; total];
        for &id in &self.0 {
            v[id as usize] = true;
        }
        v
    }

    pub fn intersection_size(&self, other: &KFamily) -> usize {
        let (mut i, mut j, mut c) = (0, 0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    c += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        c
    }

    pub fn difference(&self, other: &KFamily) -> KFamily {
        KFamily(self.0.iter().copied().filter(|&id| !other.contains(id)).collect())
    }
}

/// Enumeration limits.
#[derive(Debug, Clone, Copy)]
pub struct GeometryLimits {
    pub max_kspaces: u64,
    pub max_q: u64,
}

impl Default for GeometryLimits {
    fn default() -> Self {
        GeometryLimits { max_kspaces: DEFAULT_MAX_KSPACES, max_q: DEFAULT_MAX_Q }
    }
}

/// Every point and every `k`-subspace of `PG(n,q)` with incidence data.
#[derive(Debug)]
pub struct GeometryCtx {
    params: SchemeParams,
    field: FieldCtx,
    points: Vec<Vector>,
    point_index: HashMap<Vector, u32>,
    kspaces: Vec<Subspace>,
    kspace_index: HashMap<Vec<u16>, u32>,
    kspace_points: Vec<Vec<u32>>,
    point_bits: Vec<u64>,
    words: usize,
    pencils: Vec<Vec<u32>>,
    /// `dim_by_count[c]` = projective dimension of a subspace with `c` points.
    dim_by_count: Vec<i8>,
}

fn size_error(what: &str, count: impl ToString, cap: impl ToString) -> Error {
    Error::SizeCap { what: what.into(), count: count.to_string(), cap: cap.to_string() }
}

impl GeometryCtx {
    pub fn enumerate(params: SchemeParams) -> Result<Self> {
        Self::enumerate_with(params, GeometryLimits::default())
    }

    pub fn enumerate_with(params: SchemeParams, limits: GeometryLimits) -> Result<Self> {
        if params.q > limits.max_q {
            return Err(size_error("field GF(q)", params.q, limits.max_q));
        }
        let count = num_kspaces(&params);
        if count > limits.max_kspaces.into() {
            return Err(size_error(&format!("the k-space set of {params}"), count, limits.max_kspaces));
        }
        let field = FieldCtx::new(params.q)?;
        let n = params.n;
        let points: Vec<Vector> = enumerate_subspaces(&field, n, 0)
            .into_iter()
            .map(|s| s.rows.into_iter().next().unwrap())
            .collect();
        let point_index: HashMap<Vector, u32> =
            points.iter().enumerate().map(|(i, p)| (p.clone(), i as u32)).collect();
        let kspaces = enumerate_subspaces(&field, n, params.k);
        let kspace_index = kspaces.iter().enumerate().map(|(i, s)| (s.flat(), i as u32)).collect();
        let words = points.len().div_ceil(64);
        let mut point_bits = vec![0u64; kspaces.len() * words];
        let mut kspace_points = Vec::with_capacity(kspaces.len());
        let mut pencils = vec![Vec::new(); points.len()];
        for (id, s) in kspaces.iter().enumerate() {
            let mut pts: Vec<u32> =
                s.point_vectors(&field).iter().map(|v| point_index[v]).collect();
            pts.sort_unstable();
            for &p in &pts {
                point_bits[id * words + p as usize / 64] |= 1 << (p % 64);
                pencils[p as usize].push(id as u32);
            }
            kspace_points.push(pts);
        }
        let q = params.q as usize;
        let mut dim_by_count = vec![-1i8; kspace_points.first().map_or(1, |p| p.len()) + 1];
        let mut c = 1usize;
        for d in 0..=params.k as i8 {
            dim_by_count[c] = d;
            c = c * q + 1;
        }
        Ok(GeometryCtx {
            params,
            field,
            points,
            point_index,
            kspaces,
            kspace_index,
            kspace_points,
            point_bits,
            words,
            pencils,
            dim_by_count,
        })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn num_kspaces(&self) -> usize {
        self.kspaces.len()
    }

    pub fn point(&self, id: u32) -> &Vector {
        &self.points[id as usize]
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn kspace(&self, id: u32) -> &Subspace {
        &self.kspaces[id as usize]
    }

    pub fn kspaces(&self) -> &[Subspace] {
        &self.kspaces
    }

    pub fn point_id(&self, v: &[FieldElement]) -> Option<u32> {
        let mut v = v.to_vec();
        if !normalize(&self.field, &mut v) {
            return None;
        }
        self.point_index.get(&v).copied()
    }

    pub fn kspace_id(&self, s: &Subspace) -> Option<u32> {
        if s.dim() != self.params.k as i32 {
            return None;
        }
        self.kspace_index.get(&s.flat()).copied()
    }

    /// Sorted point ids of a `k`-space.
    pub fn points_of(&self, id: u32) -> &[u32] {
        &self.kspace_points[id as usize]
    }

    pub(crate) fn bits_of(&self, id: u32) -> &[u64] {
        let w = self.words;
        &self.point_bits[id as usize * w..(id as usize + 1) * w]
    }

    /// Point set of an arbitrary subspace as a bitset.
    pub fn point_set(&self, s: &Subspace) -> Vec<u64> {
        let mut bits = vec![0u64; self.words];
        for v in s.point_vectors(&self.field) {
            let p = self.point_index[&v];
            bits[p as usize / 64] |= 1 << (p % 64);
        }
        bits
    }

    /// Number of common points of two `k`-spaces.
    #[inline]
    pub fn common_points(&self, a: u32, b: u32) -> u32 {
        self.bits_of(a)
            .iter()
            .zip(self.bits_of(b))
            .map(|(x, y)| (x & y).count_ones())
            .sum()
    }

    /// Projective dimension of `a ∩ b`, `-1` if disjoint.
    #[inline]
    pub fn intersection_dim(&self, a: u32, b: u32) -> i32 {
        self.dim_by_count[self.common_points(a, b) as usize] as i32
    }

    #[inline]
    pub fn disjoint(&self, a: u32, b: u32) -> bool {
        self.bits_of(a).iter().zip(self.bits_of(b)).all(|(x, y)| x & y == 0)
    }

    /// Relation index `i` with `dim(a ∩ b) = k - i`.
    #[inline]
    pub fn relation(&self, a: u32, b: u32) -> u32 {
        (self.params.k as i32 - self.intersection_dim(a, b)) as u32
    }

    /// All `k`-spaces through point `p`.
    pub fn pencil(&self, p: u32) -> KFamily {
        KFamily(self.pencils[p as usize].clone())
    }

    /// All `k`-spaces contained in `tau`.
    pub fn all_in(&self, tau: &Subspace) -> Result<KFamily> {
        if tau.dim() < self.params.k as i32 {
            return precondition(format!("subspace of dimension {} has no k-spaces", tau.dim()));
        }
        let bits = self.point_set(tau);
        Ok(self.contained_in_bits(&bits))
    }

    fn contained_in_bits(&self, bits: &[u64]) -> KFamily {
        let ids = (0..self.kspaces.len() as u32)
            .filter(|&id| self.bits_of(id).iter().zip(bits).all(|(a, b)| a & !b == 0))
            .collect();
        KFamily(ids)
    }

    /// `k`-spaces through `p` inside `tau`.
    pub fn pencil_in(&self, p: u32, tau: &Subspace) -> Result<KFamily> {
        if !tau.contains_vector(&self.field, self.point(p)) {
            return precondition(format!("point {p} is not in the given subspace"));
        }
        let inside = self.all_in(tau)?;
        let through = &self.pencils[p as usize];
        Ok(KFamily(inside.0.into_iter().filter(|id| through.binary_search(id).is_ok()).collect()))
    }

    /// Hyperplane with the given id: the zero set of the functional whose
    /// coordinates are those of point `id`.
    pub fn hyperplane(&self, id: u32) -> Subspace {
        Subspace::kernel_of(&self.field, self.params.n, std::slice::from_ref(self.point(id)))
    }

    pub fn num_hyperplanes(&self) -> usize {
        self.points.len()
    }

    pub fn family_of(&self, subspaces: &[Subspace]) -> Result<KFamily> {
        let ids = subspaces
            .iter()
            .map(|s| {
                self.kspace_id(s).ok_or_else(|| {
                    Error::Precondition("subspace is not a k-space of this geometry".into())
                })
            })
            .collect::<Result<Vec<u32>>>()?;
        Ok(KFamily::new(ids))
    }

    /// Whether the members are pairwise disjoint.
    pub fn is_partial_spread(&self, f: &KFamily) -> bool {
        let mut cover = vec![0u64; self.words];
        for &id in f.ids() {
            for (c, b) in cover.iter_mut().zip(self.bits_of(id)) {
                if *c & b != 0 {
                    return false;
                }
                *c |= b;
            }
        }
        true
    }

    pub fn is_spread(&self, f: &KFamily) -> bool {
        self.is_partial_spread(f)
            && f.len() * self.kspace_points[0].len() == self.points.len()
    }

    fn cover_bits(&self, f: &KFamily) -> Vec<u64> {
        let mut cover = vec![0u64; self.words];
        for &id in f.ids() {
            for (c, b) in cover.iter_mut().zip(self.bits_of(id)) {
                *c |= b;
            }
        }
        cover
    }

    /// `R` and `R'` are nonempty disjoint partial spreads covering the same points.
    pub fn are_conjugate_switching_sets(&self, r: &KFamily, r2: &KFamily) -> bool {
        !r.is_empty()
            && self.is_partial_spread(r)
            && self.is_partial_spread(r2)
            && r.intersection_size(r2) == 0
            && self.cover_bits(r) == self.cover_bits(r2)
    }

    /// The field-reduction spread; needs `(k+1) | (n+1)`.
    pub fn construct_spread(&self) -> Result<KFamily> {
        let SchemeParams { n, k, q } = self.params;
        if !self.params.admits_spread() {
            return precondition(format!("no {k}-spread in PG({n},{q}): {} does not divide {}", k + 1, n + 1));
        }
        let big_q = q.checked_pow(k + 1).unwrap_or(u64::MAX);
        let fr = FieldReduction::new(FieldCtx::new(big_q)?, self.field.clone())?;
        let m = (n + 1) / (k + 1);
        let big_points = enumerate_subspaces(fr.big(), m - 1, 0);
        let mut ids = Vec::with_capacity(big_points.len());
        for p in &big_points {
            let img = Subspace::span(&self.field, n, &fr.image_of_point(&p.rows[0]));
            let id = self.kspace_id(&img).ok_or_else(|| {
                Error::Precondition("field reduction produced a subspace of the wrong dimension".into())
            })?;
            ids.push(id);
        }
        let spread = KFamily::new(ids);
        if spread.len() != big_points.len() || !self.is_spread(&spread) {
            return precondition("field-reduction image is not a spread");
        }
        Ok(spread)
    }

    /// Images of a family under a coordinate permutation.
    pub fn permute_family(&self, f: &KFamily, perm: &[usize]) -> KFamily {
        KFamily::new(
            f.ids()
                .iter()
                .map(|&id| self.kspace_id(&self.kspace(id).permute(&self.field, perm)).unwrap())
                .collect(),
        )
    }

    /// The field-reduction spread together with its images under every
    /// permutation of the coordinates, deduplicated and sorted.
    pub fn reduced_spreads(&self) -> Result<Vec<KFamily>> {
        let base = self.construct_spread()?;
        let m = self.params.n as usize + 1;
        let mut out = vec![base.clone()];
        let mut perm: Vec<usize> = (0..m).collect();
        while next_permutation(&mut perm) {
            out.push(self.permute_family(&base, &perm));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Every spread, by exhaustive exact-cover backtracking. Refused when the
    /// geometry has more than `max_kspaces` `k`-spaces.
    pub fn enumerate_all_spreads(&self, max_kspaces: usize) -> Result<Vec<KFamily>> {
        if !self.params.admits_spread() {
            let SchemeParams { n, k, q } = self.params;
            return precondition(format!("no {k}-spread in PG({n},{q}): {} does not divide {}", k + 1, n + 1));
        }
        if self.kspaces.len() > max_kspaces {
            return Err(size_error("exhaustive spread search", self.kspaces.len(), max_kspaces));
        }
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        let mut cover = vec![0u64; self.words];
        self.spread_rec(&mut cover, &mut chosen, &mut out);
        out.sort();
        Ok(out)
    }

    fn spread_rec(&self, cover: &mut [u64], chosen: &mut Vec<u32>, out: &mut Vec<KFamily>) {
        let first_free = (0..self.points.len()).find(|&p| cover[p / 64] >> (p % 64) & 1 == 0);
        let Some(p) = first_free else {
            out.push(KFamily::new(chosen.clone()));
            return;
        };
        for &id in &self.pencils[p] {
            let bits = self.bits_of(id);
            if bits.iter().zip(cover.iter()).any(|(b, c)| b & c != 0) {
                continue;
            }
            for (c, b) in cover.iter_mut().zip(bits) {
                *c |= b;
            }
            chosen.push(id);
            self.spread_rec(cover, chosen, out);
            chosen.pop();
            for (c, b) in cover.iter_mut().zip(bits) {
                *c &= !b;
            }
        }
    }

    /// Checks the invariants the rest of the crate relies on.
    pub fn validate(&self) -> Result<()> {
        let SchemeParams { n, k, q } = self.params;
        let np = qbinom(n + 1, 1, q)?.to_usize().unwrap_or(usize::MAX);
        let nk = num_kspaces(&self.params).to_usize().unwrap_or(usize::MAX);
        let per = qbinom(k + 1, 1, q)?.to_usize().unwrap_or(usize::MAX);
        if self.points.len() != np || self.kspaces.len() != nk {
            return precondition("enumeration sizes do not match Gaussian binomials");
        }
        if self.kspace_points.iter().any(|p| p.len() != per) {
            return precondition("a k-space has the wrong number of points");
        }
        if self.kspaces.windows(2).any(|w| w[0].flat() >= w[1].flat()) {
            return precondition("k-spaces are not strictly sorted");
        }
        Ok(())
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Spreads of `PG(2k+1,q)`, transported into any `(2k+1)`-subspace of a
/// larger geometry through a choice of basis.
#[derive(Debug)]
pub struct SpreadModel {
    model: GeometryCtx,
    spreads: Vec<KFamily>,
}

impl SpreadModel {
    /// Enumerates all spreads of `PG(2k+1,q)`; `max_kspaces` guards the search.
    pub fn new(k: u32, q: u64, max_kspaces: usize) -> Result<Self> {
        let model = GeometryCtx::enumerate(SchemeParams::new(2 * k + 1, k, q)?)?;
        let spreads = model.enumerate_all_spreads(max_kspaces)?;
        Ok(SpreadModel { model, spreads })
    }

    /// Like [`SpreadModel::new`] but with [`GeometryCtx::reduced_spreads`]
    /// in place of the exhaustive list.
    pub fn reduced(k: u32, q: u64) -> Result<Self> {
        let model = GeometryCtx::enumerate(SchemeParams::new(2 * k + 1, k, q)?)?;
        let spreads = model.reduced_spreads()?;
        Ok(SpreadModel { model, spreads })
    }

    pub fn model(&self) -> &GeometryCtx {
        &self.model
    }

    pub fn spreads(&self) -> &[KFamily] {
        &self.spreads
    }

    /// The model spreads carried into `sigma`, a `(2k+1)`-subspace of `ctx`.
    pub fn spreads_in(&self, ctx: &GeometryCtx, sigma: &Subspace) -> Result<Vec<KFamily>> {
        let mk = self.model.params().k;
        if ctx.params().k != mk || ctx.params().q != self.model.params().q {
            return precondition("spread model does not match the geometry");
        }
        if sigma.dim() != 2 * mk as i32 + 1 {
            return precondition(format!("need a {}-subspace, got dimension {}", 2 * mk + 1, sigma.dim()));
        }
        let field = ctx.field();
        let n = ctx.params().n;
        let basis = sigma.rows();
        let mut image = vec![u32::MAX; self.model.num_kspaces()];
        for (mid, s) in self.model.kspaces().iter().enumerate() {
            let vecs: Vec<Vector> = s
                .rows()
                .iter()
                .map(|coeffs| {
                    let mut v = vec![FieldElement::ZERO; n as usize + 1];
                    for (c, b) in coeffs.iter().zip(basis) {
                        if c.is_zero() {
                            continue;
                        }
                        for (x, y) in v.iter_mut().zip(b) {
                            *x = field.add(*x, field.mul(*c, *y));
                        }
                    }
                    v
                })
                .collect();
            image[mid] = ctx.kspace_id(&Subspace::span(field, n, &vecs)).unwrap();
        }
        Ok(self
            .spreads
            .iter()
            .map(|sp| KFamily::new(sp.ids().iter().map(|&m| image[m as usize]).collect()))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: u32, k: u32, q: u64) -> GeometryCtx {
        GeometryCtx::enumerate(SchemeParams::new(n, k, q).unwrap()).unwrap()
    }

    #[test]
    fn enumeration_sizes() {
        let g = ctx(3, 1, 2);
        assert_eq!((g.num_points(), g.num_kspaces()), (15, 35));
        let g = ctx(2, 1, 3);
        assert_eq!((g.num_points(), g.num_kspaces()), (13, 13));
        assert_eq!(ctx(4, 2, 2).num_kspaces(), 155);
        for (n, k, q) in [(3, 1, 2), (2, 1, 3), (4, 2, 2), (3, 1, 4), (3, 0, 3)] {
            ctx(n, k, q).validate().unwrap();
        }
    }

    #[test]
    fn enumeration_cap() {
        let p = SchemeParams::new(5, 2, 3).unwrap();
        let err = GeometryCtx::enumerate_with(p, GeometryLimits { max_kspaces: 1000, max_q: 16 })
            .unwrap_err();
        assert!(err.to_string().contains("33880"), "{err}");
        let p = SchemeParams::new(3, 1, 32).unwrap();
        assert!(GeometryCtx::enumerate(p).is_err());
    }

    #[test]
    fn canonical_forms_are_fixed_points() {
        let g = ctx(4, 1, 3);
        for s in g.kspaces() {
            assert_eq!(&Subspace::span(g.field(), 4, s.rows()), s);
        }
    }

    #[test]
    fn intersection_dims() {
        let g = ctx(3, 1, 2);
        let f = g.field();
        let a = g.kspace(0);
        assert_eq!(a.intersection_dim(f, a), 1);
        assert_eq!(g.intersection_dim(0, 0), 1);
        let p = g.points_of(0)[0];
        let pencil = g.pencil(p);
        let (l1, l2) = (pencil.ids()[0], pencil.ids()[1]);
        assert_eq!(g.intersection_dim(l1, l2), 0);
        let skew = (0..35).find(|&b| g.disjoint(0, b)).unwrap();
        assert_eq!(a.intersection_dim(f, g.kspace(skew)), -1);
        // rank route and point-count route agree everywhere
        for x in 0..35 {
            for y in 0..35 {
                assert_eq!(g.intersection_dim(x, y), g.kspace(x).intersection_dim(f, g.kspace(y)));
            }
        }
    }

    #[test]
    fn pencils_and_containment() {
        let g = ctx(3, 1, 2);
        for p in 0..15 {
            assert_eq!(g.pencil(p).len(), 7);
        }
        let h = g.hyperplane(0);
        assert_eq!(h.dim(), 2);
        assert_eq!(g.all_in(&h).unwrap().len(), 7);
        let p = (0..15).find(|&p| h.contains_vector(g.field(), g.point(p))).unwrap();
        assert_eq!(g.pencil_in(p, &h).unwrap().len(), 3);
        let off = (0..15).find(|&p| !h.contains_vector(g.field(), g.point(p))).unwrap();
        assert!(g.pencil_in(off, &h).is_err());
        let line = g.kspace(0).clone();
        let pt = Subspace::span(g.field(), 3, &[g.point(0).clone()]);
        assert!(g.all_in(&pt).is_err());
        assert_eq!(g.all_in(&line).unwrap().len(), 1);
    }

    #[test]
    fn field_reduction_spreads() {
        let g = ctx(3, 1, 2);
        let s = g.construct_spread().unwrap();
        assert_eq!(s.len(), 5);
        assert!(g.is_spread(&s));
        let g = ctx(5, 1, 2);
        let s = g.construct_spread().unwrap();
        assert_eq!(s.len(), 21);
        assert!(g.is_spread(&s));
        let g = ctx(3, 1, 3);
        assert_eq!(g.construct_spread().unwrap().len(), 10);
        let g = ctx(5, 2, 2);
        assert_eq!(g.construct_spread().unwrap().len(), 9);
        let g = ctx(3, 1, 4);
        assert_eq!(g.construct_spread().unwrap().len(), 17);
        assert!(ctx(4, 1, 2).construct_spread().is_err());
    }

    #[test]
    fn all_spreads_of_pg32() {
        let g = ctx(3, 1, 2);
        let spreads = g.enumerate_all_spreads(200).unwrap();
        assert_eq!(spreads.len(), 56);
        assert!(spreads.iter().all(|s| g.is_spread(s)));
        assert!(ctx(2, 1, 2).enumerate_all_spreads(200).is_err());
        assert!(ctx(5, 1, 2).enumerate_all_spreads(200).is_err());
    }

    #[test]
    fn switching_sets_from_spread_pairs() {
        let g = ctx(3, 1, 2);
        let spreads = g.enumerate_all_spreads(200).unwrap();
        let mut sizes = std::collections::BTreeMap::new();
        for a in &spreads {
            for b in &spreads {
                if a == b {
                    continue;
                }
                let (r, r2) = (a.difference(b), b.difference(a));
                assert!(g.are_conjugate_switching_sets(&r, &r2));
                *sizes.entry(r.len()).or_insert(0usize) += 1;
            }
        }
        // no two spreads of PG(3,2) share three lines; the smallest switches are reguli
        let expected: std::collections::BTreeMap<usize, usize> =
            [(3, 560), (4, 840), (5, 1680)].into_iter().collect();
        assert_eq!(sizes, expected);
        let f = spreads[0].clone();
        assert!(!g.are_conjugate_switching_sets(&f, &f));
    }

    #[test]
    fn reduced_spreads_are_spreads() {
        let g = ctx(3, 1, 2);
        let red = g.reduced_spreads().unwrap();
        let all = g.enumerate_all_spreads(100).unwrap();
        assert!(red.len() > 1);
        assert!(red.iter().all(|s| all.binary_search(s).is_ok()));
        let mut p = vec![0, 1, 2];
        let mut n = 1;
        while next_permutation(&mut p) {
            n += 1;
        }
        assert_eq!((n, p), (6, vec![2, 1, 0]));
    }

    #[test]
    fn spread_model_transport() {
        let model = SpreadModel::new(1, 2, 200).unwrap();
        let g = ctx(5, 1, 2);
        let sigma = enumerate_subspaces(g.field(), 5, 3).into_iter().nth(17).unwrap();
        let spreads = model.spreads_in(&g, &sigma).unwrap();
        assert_eq!(spreads.len(), 56);
        let inside = g.all_in(&sigma).unwrap();
        for s in &spreads {
            assert_eq!(s.len(), 5);
            assert!(g.is_partial_spread(s));
            assert_eq!(s.intersection_size(&inside), 5);
        }
    }
}
