//! Cameron-Liebler families and the battery of equivalent definitions.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use crate::error::{precondition, Error, Result};
use crate::exactmath::{
    disjoint_scale, eigenvalue_p, extra_property_coefficients, intersection_count,
    parameter_of_size, pow, rat, SchemeParams,
};
use crate::projspace::{enumerate_subspaces, GeometryCtx, KFamily, Subspace, SpreadModel};
use crate::scheme::Scheme;

/// Exhaustive spread enumeration is attempted up to this many `k`-spaces.
pub const EXHAUSTIVE_SPREAD_LIMIT: usize = 200;

/// A family of `k`-spaces tied to its geometry.
#[derive(Debug, Clone)]
pub struct CLCandidate<'a> {
    ctx: &'a GeometryCtx,
    family: KFamily,
}

impl<'a> CLCandidate<'a> {
    pub fn new(ctx: &'a GeometryCtx, family: KFamily) -> Result<Self> {
        if let Some(&bad) = family.ids().iter().find(|&&id| id as usize >= ctx.num_kspaces()) {
            return precondition(format!("k-space id {bad} out of range"));
        }
        Ok(CLCandidate { ctx, family })
    }

    pub fn ctx(&self) -> &'a GeometryCtx {
        self.ctx
    }

    pub fn family(&self) -> &KFamily {
        &self.family
    }

    pub fn into_family(self) -> KFamily {
        self.family
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    /// `|L| / [n,k]`.
    pub fn x(&self) -> BigRational {
        parameter_of_size(self.ctx.params(), self.family.len())
    }

    pub fn indicator(&self) -> Vec<bool> {
        self.family.indicator(self.ctx.num_kspaces())
    }

    pub fn complement(&self) -> CLCandidate<'a> {
        let all = KFamily::from_sorted((0..self.ctx.num_kspaces() as u32).collect()).unwrap();
        CLCandidate { ctx: self.ctx, family: all.difference(&self.family) }
    }

    /// Union of two disjoint families; an overlap is reported by its smallest id.
    pub fn disjoint_union(&self, other: &CLCandidate<'_>) -> Result<CLCandidate<'a>> {
        if let Some(&id) = self.family.ids().iter().find(|&&id| other.family.contains(id)) {
            return precondition(format!("families are not disjoint: both contain k-space {id}"));
        }
        let mut ids = self.family.ids().to_vec();
        ids.extend_from_slice(other.family.ids());
        Ok(CLCandidate { ctx: self.ctx, family: KFamily::new(ids) })
    }

    /// `self \ other`, requiring `other ⊆ self`.
    pub fn difference(&self, other: &CLCandidate<'_>) -> Result<CLCandidate<'a>> {
        if let Some(&id) = other.family.ids().iter().find(|&&id| !self.family.contains(id)) {
            return precondition(format!("subtrahend is not contained in the family: k-space {id}"));
        }
        Ok(CLCandidate { ctx: self.ctx, family: self.family.difference(&other.family) })
    }
}

pub fn make_point_pencil(p: u32, ctx: &GeometryCtx) -> Result<CLCandidate<'_>> {
    if p as usize >= ctx.num_points() {
        return precondition(format!("point id {p} out of range"));
    }
    CLCandidate::new(ctx, ctx.pencil(p))
}

pub fn make_hyperplane_family<'a>(h: &Subspace, ctx: &'a GeometryCtx) -> Result<CLCandidate<'a>> {
    let n = ctx.params().n;
    if h.ambient() != n || h.dim() != n as i32 - 1 {
        return precondition(format!("not a hyperplane of PG({n},{})", ctx.params().q));
    }
    CLCandidate::new(ctx, ctx.all_in(h)?)
}

/// A uniformly random family of the given size.
pub fn random_family<R: Rng + ?Sized>(ctx: &GeometryCtx, size: usize, rng: &mut R) -> KFamily {
    KFamily::new(sample(rng, ctx.num_kspaces(), size).into_iter().map(|i| i as u32).collect())
}

/// Counts of members by relation to `π`: entry `i` is the number of members
/// meeting `π` in a `(k-i)`-space (entry 0 is `π` itself).
pub fn intersection_distribution(cand: &CLCandidate<'_>, pi: u32) -> Vec<usize> {
    let ctx = cand.ctx;
    let mut out = vec![0; ctx.params().k as usize + 2];
    for &id in cand.family.ids() {
        out[ctx.relation(pi, id) as usize] += 1;
    }
    out
}

/// Members meeting `π` (including `π` when it is a member).
pub fn meeting_count(cand: &CLCandidate<'_>, pi: u32) -> usize {
    cand.family.ids().iter().filter(|&&id| !cand.ctx.disjoint(pi, id)).count()
}

/// Members disjoint from every listed `k`-space.
pub fn disjoint_from_all(cand: &CLCandidate<'_>, others: &[u32]) -> usize {
    cand.family
        .ids()
        .iter()
        .filter(|&&id| others.iter().all(|&o| cand.ctx.disjoint(o, id)))
        .count()
}

/// Evidence attached to a failed check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `χ` has a nonzero residual against the rows of `A` at this coordinate.
    Residual { kspace: u32 },
    /// `χ` is not orthogonal to this kernel basis vector.
    KernelVector { index: usize },
    /// A `k`-space where a relation-`relation` quantity differs from its predicted value.
    KSpace { kspace: u32, relation: u32, expected: String, found: String },
    /// A conjugate switching pair meeting the family unevenly.
    SwitchingPair { index: usize, left: usize, right: usize },
    /// A spread meeting the family in the wrong number of members.
    Spread { index: usize, meet: usize },
    /// The parameter is not an integer, so no spread can meet the family in `x`.
    NonIntegralParameter { x: String },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Residual { kspace } => write!(f, "row-space residual nonzero at k-space {kspace}"),
            Witness::KernelVector { index } => write!(f, "not orthogonal to kernel vector {index}"),
            Witness::KSpace { kspace, relation, expected, found } => write!(
                f,
                "k-space {kspace}, relation {relation}: found {found}, expected {expected}"
            ),
            Witness::SwitchingPair { index, left, right } => {
                write!(f, "switching pair {index}: {left} vs {right}")
            }
            Witness::Spread { index, meet } => write!(f, "spread {index} meets the family in {meet}"),
            Witness::NonIntegralParameter { x } => write!(f, "x = {x} is not an integer"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail { witness: Witness },
    Skipped { reason: String },
}

impl Verdict {
    pub fn passed(&self) -> Option<bool> {
        match self {
            Verdict::Pass => Some(true),
            Verdict::Fail { .. } => Some(false),
            Verdict::Skipped { .. } => None,
        }
    }

    fn fail(witness: Witness) -> Self {
        Verdict::Fail { witness }
    }

    fn skip(reason: impl Into<String>) -> Self {
        Verdict::Skipped { reason: reason.into() }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("pass"),
            Verdict::Fail { witness } => write!(f, "fail ({witness})"),
            Verdict::Skipped { reason } => write!(f, "skipped ({reason})"),
        }
    }
}

fn verdict_of(found: Option<Witness>) -> Verdict {
    found.map_or(Verdict::Pass, Verdict::fail)
}

fn require_same_ctx(cand: &CLCandidate<'_>, scheme: &Scheme) -> Result<()> {
    if cand.ctx.params() != scheme.params() || cand.ctx.num_kspaces() != scheme.relations().size() {
        return precondition("scheme was built for a different geometry");
    }
    Ok(())
}

fn skip_without_disjoint_pairs(params: &SchemeParams) -> Option<Verdict> {
    (!params.has_disjoint_pairs())
        .then(|| Verdict::skip(format!("needs n >= 2k+1, got {params}")))
}

fn indicator_rat(members: &[bool]) -> Vec<BigRational> {
    members.iter().map(|&m| if m { BigRational::one() } else { BigRational::zero() }).collect()
}

/// `χ ∈ im(Aᵀ)`.
pub fn check_def1(cand: &CLCandidate<'_>, scheme: &Scheme) -> Result<Verdict> {
    require_same_ctx(cand, scheme)?;
    let res = scheme.rowspace().residual(&indicator_rat(&cand.indicator()));
    Ok(verdict_of(res.iter().position(|v| !v.is_zero()).map(|i| Witness::Residual { kspace: i as u32 })))
}

/// `χ ⟂ ker(A)`.
pub fn check_def2(cand: &CLCandidate<'_>, scheme: &Scheme) -> Result<Verdict> {
    require_same_ctx(cand, scheme)?;
    let members = cand.indicator();
    let kernel = scheme.kernel();
    Ok(verdict_of(
        (0..kernel.len())
            .find(|&i| !kernel.dot_indicator(i, &members).is_zero())
            .map(|index| Witness::KernelVector { index }),
    ))
}

/// Members disjoint from every `k`-space `π` number `(x - χ(π)) q^{k²+k} [n-k-1,k]`.
pub fn check_def3(cand: &CLCandidate<'_>) -> Verdict {
    let params = cand.ctx.params();
    if let Some(v) = skip_without_disjoint_pairs(params) {
        return v;
    }
    let x = cand.x();
    let scale = rat(disjoint_scale(params));
    let members = cand.indicator();
    let far = params.k + 1;
    let found = (0..cand.ctx.num_kspaces() as u32).find_map(|pi| {
        let count = cand.family.ids().iter().filter(|&&id| cand.ctx.disjoint(pi, id)).count();
        let chi = if members[pi as usize] { BigRational::one() } else { BigRational::zero() };
        let expected = (&x - chi) * &scale;
        (rat(BigInt::from(count)) != expected).then(|| Witness::KSpace {
            kspace: pi,
            relation: far,
            expected: expected.to_string(),
            found: count.to_string(),
        })
    });
    verdict_of(found)
}

/// `χ - x (q^{k+1}-1)/(q^{n+1}-1) j` is a `P_{1,k+1}`-eigenvector of `K`.
pub fn check_def4(cand: &CLCandidate<'_>, scheme: &Scheme) -> Result<Verdict> {
    require_same_ctx(cand, scheme)?;
    let params = cand.ctx.params();
    if let Some(v) = skip_without_disjoint_pairs(params) {
        return Ok(v);
    }
    let d = params.k + 1;
    let x = cand.x();
    let c = BigRational::new(pow(params.q, d) - 1, pow(params.q, params.n + 1) - 1);
    let shift = &x * &c;
    let p0 = rat(eigenvalue_p(0, d, params)?);
    let p1 = rat(eigenvalue_p(1, d, params)?);
    let members = cand.indicator();
    let table = scheme.relations();
    let found = (0..table.size()).find_map(|pi| {
        let disjoint = table.distribution(pi, &members)[d as usize];
        // (K v)_π = disjoint - shift·P_{0,k+1}; (λ v)_π = P_{1,k+1}(χ_π - shift)
        let kv = rat(BigInt::from(disjoint)) - &shift * &p0;
        let chi = if members[pi] { BigRational::one() } else { BigRational::zero() };
        let lv = &p1 * (chi - &shift);
        (kv != lv).then(|| Witness::KSpace {
            kspace: pi as u32,
            relation: d,
            expected: lv.to_string(),
            found: kv.to_string(),
        })
    });
    Ok(verdict_of(found))
}

/// `χ ∈ V_0 ⟂ V_1`: `(K - P_{0,k+1})(K - P_{1,k+1}) χ = 0`.
pub fn check_def5(cand: &CLCandidate<'_>, scheme: &Scheme) -> Result<Verdict> {
    require_same_ctx(cand, scheme)?;
    let params = cand.ctx.params();
    if let Some(v) = skip_without_disjoint_pairs(params) {
        return Ok(v);
    }
    let d = params.k as usize + 1;
    let p0 = eigenvalue_p(0, d as u32, params)?.to_i128().expect("eigenvalue fits in i128");
    let p1 = eigenvalue_p(1, d as u32, params)?.to_i128().expect("eigenvalue fits in i128");
    let table = scheme.relations();
    let chi: Vec<i128> = cand.indicator().iter().map(|&m| m as i128).collect();
    let step = |w: &[i128], lambda: i128| -> Vec<i128> {
        table.apply_int(d, w).iter().zip(w).map(|(a, b)| a - lambda * b).collect()
    };
    let out = step(&step(&chi, p1), p0);
    Ok(verdict_of(out.iter().position(|&v| v != 0).map(|i| Witness::KSpace {
        kspace: i as u32,
        relation: d as u32,
        expected: "0".into(),
        found: out[i].to_string(),
    })))
}

/// For every `π` and `1 <= i <= k+1`, the members meeting `π` in a
/// `(k-i)`-space match [`intersection_count`].
pub fn check_def6(cand: &CLCandidate<'_>) -> Result<Verdict> {
    let params = cand.ctx.params();
    if let Some(v) = skip_without_disjoint_pairs(params) {
        return Ok(v);
    }
    let x = cand.x();
    let expected: Vec<[BigRational; 2]> = (1..=params.k + 1)
        .map(|i| Ok([intersection_count(params, &x, i, false)?, intersection_count(params, &x, i, true)?]))
        .collect::<Result<_>>()?;
    let members = cand.indicator();
    for pi in 0..cand.ctx.num_kspaces() as u32 {
        let dist = intersection_distribution(cand, pi);
        for i in 1..=params.k as usize + 1 {
            let want = &expected[i - 1][members[pi as usize] as usize];
            if rat(BigInt::from(dist[i])) != *want {
                return Ok(Verdict::fail(Witness::KSpace {
                    kspace: pi,
                    relation: i as u32,
                    expected: want.to_string(),
                    found: dist[i].to_string(),
                }));
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Two families forming a pair of conjugate switching sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchingPair {
    pub r: KFamily,
    pub r2: KFamily,
}

/// `|L ∩ R| = |L ∩ R'|` for each supplied pair. Invalid pairs are rejected.
pub fn check_def7(cand: &CLCandidate<'_>, pairs: &[SwitchingPair]) -> Result<Verdict> {
    if pairs.is_empty() {
        return Ok(Verdict::skip("no switching pairs supplied"));
    }
    if let Some(i) = pairs.iter().position(|p| !cand.ctx.are_conjugate_switching_sets(&p.r, &p.r2)) {
        return precondition(format!("pair {i} is not a pair of conjugate switching sets"));
    }
    Ok(check_def7_trusted(cand, pairs))
}

fn check_def7_trusted(cand: &CLCandidate<'_>, pairs: &[SwitchingPair]) -> Verdict {
    if pairs.is_empty() {
        return Verdict::skip("no switching pairs supplied");
    }
    verdict_of(pairs.iter().enumerate().find_map(|(index, p)| {
        let left = cand.family.intersection_size(&p.r);
        let right = cand.family.intersection_size(&p.r2);
        (left != right).then_some(Witness::SwitchingPair { index, left, right })
    }))
}

/// `|L ∩ S| = x` for each supplied spread.
pub fn check_def8(cand: &CLCandidate<'_>, spreads: &[KFamily]) -> Result<Verdict> {
    let params = cand.ctx.params();
    if !params.admits_spread() {
        return Ok(Verdict::skip(format!("no {}-spreads: {} does not divide {}", params.k, params.k + 1, params.n + 1)));
    }
    if spreads.is_empty() {
        return Ok(Verdict::skip("no spreads supplied"));
    }
    if let Some(i) = spreads.iter().position(|s| !cand.ctx.is_spread(s)) {
        return precondition(format!("entry {i} is not a spread"));
    }
    let x = cand.x();
    if !x.is_integer() {
        return Ok(Verdict::fail(Witness::NonIntegralParameter { x: x.to_string() }));
    }
    let want = x.to_integer().to_usize().unwrap_or(usize::MAX);
    Ok(verdict_of(spreads.iter().enumerate().find_map(|(index, s)| {
        let meet = cand.family.intersection_size(s);
        (meet != want).then_some(Witness::Spread { index, meet })
    })))
}

/// `|[P]∩L| + a|[τ]∩L| = b|[P,τ]∩L| + c|L|` for `P ∈ τ`, `dim τ >= k+1`.
pub fn extra_property_check(cand: &CLCandidate<'_>, p: u32, tau: &Subspace) -> Result<bool> {
    let ctx = cand.ctx;
    if p as usize >= ctx.num_points() {
        return precondition(format!("point id {p} out of range"));
    }
    if tau.ambient() != ctx.params().n || tau.dim() < ctx.params().k as i32 + 1 {
        return precondition(format!("τ must be a subspace of dimension >= {}", ctx.params().k + 1));
    }
    let (a, b, c) = extra_property_coefficients(ctx.params(), tau.dim() as u32)?;
    let through_p = ctx.pencil(p).intersection_size(&cand.family);
    let in_tau = ctx.all_in(tau)?.intersection_size(&cand.family);
    let both = ctx.pencil_in(p, tau)?.intersection_size(&cand.family);
    let n = |v: usize| rat(BigInt::from(v));
    Ok(n(through_p) + a * n(in_tau) == b * n(both) + c * n(cand.len()))
}

/// How the spread lists fed to properties 7 and 8 are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpreadMode {
    /// Every spread, when the geometry is small enough; reduced otherwise.
    #[default]
    Exhaustive,
    /// The field-reduction spread and its coordinate-permutation images.
    Reduced,
}

/// Switching pairs and spreads for one geometry.
#[derive(Debug, Clone, Default)]
pub struct BatteryData {
    pub pairs: Vec<SwitchingPair>,
    /// Pairs come from every spread of every `(2k+1)`-subspace.
    pub pairs_exhaustive: bool,
    pub spreads: Vec<KFamily>,
    pub spreads_exhaustive: bool,
}

impl BatteryData {
    /// Spreads of the whole space (when `(k+1) | (n+1)`) and, for every
    /// `(2k+1)`-subspace `Σ`, the pairs `(S_i \ S_{i+1}, S_{i+1} \ S_i)` for
    /// consecutive spreads of `Σ`. Equal meets along this chain force equal
    /// meets for every pair of spreads of `Σ`.
    pub fn generate(ctx: &GeometryCtx, mode: SpreadMode) -> Result<Self> {
        let params = *ctx.params();
        let mut data = BatteryData::default();
        if params.admits_spread() {
            let exhaustive = mode == SpreadMode::Exhaustive && ctx.num_kspaces() <= EXHAUSTIVE_SPREAD_LIMIT;
            data.spreads =
                if exhaustive { ctx.enumerate_all_spreads(EXHAUSTIVE_SPREAD_LIMIT)? } else { ctx.reduced_spreads()? };
            data.spreads_exhaustive = exhaustive;
        }
        if !params.has_disjoint_pairs() {
            return Ok(data);
        }
        let (k, q) = (params.k, params.q);
        let model_size = crate::exactmath::num_kspaces(&SchemeParams::new(2 * k + 1, k, q)?);
        let exhaustive = mode == SpreadMode::Exhaustive
            && model_size.to_usize().is_some_and(|s| s <= EXHAUSTIVE_SPREAD_LIMIT);
        let model = if exhaustive {
            SpreadModel::new(k, q, EXHAUSTIVE_SPREAD_LIMIT)?
        } else {
            SpreadModel::reduced(k, q)?
        };
        for sigma in enumerate_subspaces(ctx.field(), params.n, 2 * k + 1) {
            let spreads = model.spreads_in(ctx, &sigma)?;
            for w in spreads.windows(2) {
                data.pairs.push(SwitchingPair { r: w[0].difference(&w[1]), r2: w[1].difference(&w[0]) });
            }
        }
        data.pairs_exhaustive = exhaustive;
        Ok(data)
    }
}

/// Which checks [`run_battery`] performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BatteryLevel {
    #[default]
    All,
    /// Properties 2 and 3 only.
    Fast,
}

/// One property's outcome.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyResult {
    pub property: u8,
    #[serde(flatten)]
    pub verdict: Verdict,
    /// The data behind the check is a sample, not the full quantifier range.
    pub sampled: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatteryReport {
    pub n: u32,
    pub q: u64,
    pub k: u32,
    pub size: usize,
    pub x_num: String,
    pub x_den: String,
    pub verdicts: Vec<PropertyResult>,
}

impl BatteryReport {
    pub fn x(&self) -> BigRational {
        BigRational::new(self.x_num.parse().unwrap(), self.x_den.parse().unwrap())
    }

    pub fn verdict(&self, property: u8) -> Option<&Verdict> {
        self.verdicts.iter().find(|r| r.property == property).map(|r| &r.verdict)
    }

    /// Verdict of the exact checks. `None` if every check was skipped.
    pub fn passed(&self) -> Option<bool> {
        self.verdicts.iter().filter(|r| !r.sampled).find_map(|r| r.verdict.passed())
    }

    /// First failing check's witness.
    pub fn witness(&self) -> Option<&Witness> {
        self.verdicts.iter().find_map(|r| match &r.verdict {
            Verdict::Fail { witness } => Some(witness),
            _ => None,
        })
    }

    /// Exact checks must agree with each other; a sampled check may pass
    /// where the exact ones fail, but never fail where they pass.
    fn agreement(&self) -> std::result::Result<(), String> {
        let exact: Vec<(u8, bool)> = self
            .verdicts
            .iter()
            .filter(|r| !r.sampled)
            .filter_map(|r| r.verdict.passed().map(|p| (r.property, p)))
            .collect();
        if exact.windows(2).any(|w| w[0].1 != w[1].1) {
            return Err(format!("exact checks disagree: {exact:?}"));
        }
        if let Some(&(_, true)) = exact.first() {
            if let Some(r) = self.verdicts.iter().find(|r| r.sampled && r.verdict.passed() == Some(false)) {
                return Err(format!("property {} fails where the exact checks pass: {}", r.property, r.verdict));
            }
        }
        Ok(())
    }

    pub fn render_text(&self) -> String {
        let mut s = format!("PG({},{}), k = {}\nsize = {}\nx = {}\n", self.n, self.q, self.k, self.size, self.x());
        for r in &self.verdicts {
            let tag = if r.sampled { " [sampled]" } else { "" };
            s.push_str(&format!("property {}: {}{}\n", r.property, r.verdict, tag));
        }
        s.push_str(match self.passed() {
            Some(true) => "result: Cameron-Liebler\n",
            Some(false) => "result: not Cameron-Liebler\n",
            None => "result: undecided\n",
        });
        s
    }
}

/// Runs the enabled checks and asserts that they agree.
pub fn run_battery(
    cand: &CLCandidate<'_>,
    scheme: &Scheme,
    data: &BatteryData,
    level: BatteryLevel,
) -> Result<BatteryReport> {
    require_same_ctx(cand, scheme)?;
    let params = *cand.ctx.params();
    let x = cand.x();
    let mut verdicts = Vec::new();
    let mut run = |property: u8, sampled: bool, f: &mut dyn FnMut() -> Result<Verdict>| -> Result<()> {
        let start = Instant::now();
        let verdict = f()?;
        verdicts.push(PropertyResult { property, verdict, sampled, elapsed: start.elapsed() });
        Ok(())
    };
    let fast = level == BatteryLevel::Fast;
    if !fast {
        run(1, false, &mut || check_def1(cand, scheme))?;
    }
    run(2, false, &mut || check_def2(cand, scheme))?;
    run(3, false, &mut || Ok(check_def3(cand)))?;
    if !fast {
        run(4, false, &mut || check_def4(cand, scheme))?;
        run(5, false, &mut || check_def5(cand, scheme))?;
        run(6, false, &mut || check_def6(cand))?;
        run(7, !data.pairs_exhaustive, &mut || {
            Ok(if params.has_disjoint_pairs() { check_def7_trusted(cand, &data.pairs) } else { skip_without_disjoint_pairs(&params).unwrap() })
        })?;
        run(8, !data.spreads_exhaustive, &mut || check_def8(cand, &data.spreads))?;
    }
    let report = BatteryReport {
        n: params.n,
        q: params.q,
        k: params.k,
        size: cand.len(),
        x_num: x.numer().to_string(),
        x_den: x.denom().to_string(),
        verdicts,
    };
    report.agreement().map_err(Error::Disagreement)?;
    Ok(report)
}
