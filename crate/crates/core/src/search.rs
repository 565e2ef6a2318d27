//! Exhaustive search for Cameron-Liebler families of a given parameter.
//!
//! Ids are decided in ascending order, each either taken or left out. Two
//! necessary conditions prune the tree:
//!
//! * disjointness budgets: every `k`-space `π` must end with exactly
//!   `(x - χ(π)) q^{k²+k} [n-k-1,k]` disjoint members, so running tallies give
//!   upper bounds and the undecided ids give lower bounds;
//! * kernel orthogonality: `χ · b = 0` for every vector `b` of a fixed kernel
//!   basis of `A`, bounded by the signed coefficients still undecided.
//!
//! Both are consequences of the characterization, so no family is lost.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::clset::{run_battery, BatteryData, BatteryLevel, CLCandidate, SpreadMode};
use crate::error::{Error, Result};
use crate::exactmath::{
    disjoint_scale, klaus_condition, num_kspaces, parameter_of_size, rat, size_of_parameter,
    within_classification_bound, KlausAudit, SchemeParams,
};
use crate::projspace::{GeometryCtx, KFamily};
use crate::scheme::Scheme;

/// Largest geometry searched by default: lines of `PG(4,2)` and `PG(3,3)`
/// fit, anything bigger is refused.
pub const DEFAULT_SEARCH_CAP: usize = 200;

/// Depth of the prefix split used to hand subtrees to workers. Fixed so that
/// statistics do not depend on the thread count.
const SPLIT_DEPTH: usize = 8;

#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Use the budget and kernel rules; off means plain enumeration of all
    /// subsets of the target size.
    pub prune: bool,
    pub threads: usize,
    /// Restrict the smallest member to ids minimal in their orbit under
    /// coordinate permutations, then expand the results again.
    pub symmetry: bool,
    pub max_kspaces: usize,
    /// Run the full battery on every result.
    pub verify: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { prune: true, threads: 1, symmetry: false, max_kspaces: DEFAULT_SEARCH_CAP, verify: true }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
    pub pruned_size: u64,
    pub pruned_budget: u64,
    pub pruned_kernel: u64,
    pub pruned_symmetry: u64,
}

impl SearchStats {
    fn merge(&mut self, o: &SearchStats) {
        self.nodes += o.nodes;
        self.leaves += o.leaves;
        self.pruned_size += o.pruned_size;
        self.pruned_budget += o.pruned_budget;
        self.pruned_kernel += o.pruned_kernel;
        self.pruned_symmetry += o.pruned_symmetry;
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub x: BigRational,
    pub size: Option<usize>,
    /// Families sorted by their id lists.
    pub families: Vec<KFamily>,
    pub stats: SearchStats,
    /// Why the search ended without exploring, if it did.
    pub reason: Option<String>,
    pub elapsed: Duration,
}

fn refuse_if_large(params: &SchemeParams, cap: usize) -> Result<()> {
    let total = num_kspaces(params);
    if total.to_usize().is_none_or(|t| t > cap) {
        return Err(Error::SizeCap {
            what: format!("search over {params}"),
            count: total.to_string(),
            cap: cap.to_string(),
        });
    }
    Ok(())
}

/// Checks the size guard from the parameters alone, before enumerating.
pub fn check_search_cap(params: &SchemeParams, config: &SearchConfig) -> Result<()> {
    refuse_if_large(params, config.max_kspaces)
}

/// Required disjoint-member counts for members and non-members, `None` when
/// the value is not a nonnegative integer.
fn budgets(params: &SchemeParams, x: &BigRational) -> (Option<i64>, Option<i64>) {
    let scale = rat(disjoint_scale(params));
    let as_count = |v: BigRational| {
        (v.is_integer() && v >= BigRational::zero()).then(|| v.to_integer().to_i64()).flatten()
    };
    (as_count((x - BigRational::one()) * &scale), as_count(x * &scale))
}

/// State of a partial family: which ids are taken, disjointness tallies and
/// running kernel dot products.
#[derive(Clone)]
struct SearchNode {
    chosen: Vec<bool>,
    count: usize,
    tally: Vec<i64>,
    dots: Vec<i64>,
    first: Option<u32>,
}

struct Searcher {
    total: usize,
    size: usize,
    member_req: Option<i64>,
    outside_req: Option<i64>,
    disjoint: Vec<Vec<u32>>,
    /// `suffix[π * (N+1) + t]`: ids `>= t` disjoint from `π`.
    suffix: Vec<u32>,
    by_id: Vec<Vec<(u32, i64)>>,
    pos_suffix: Vec<i64>,
    neg_suffix: Vec<i64>,
    kernel_len: usize,
    canonical: Option<Vec<bool>>,
    prune: bool,
}

impl Searcher {
    fn new(ctx: &GeometryCtx, scheme: &Scheme, size: usize, x: &BigRational, canonical: Option<Vec<bool>>, prune: bool) -> Result<Self> {
        let total = ctx.num_kspaces();
        let (member_req, outside_req) = budgets(ctx.params(), x);
        let disjoint: Vec<Vec<u32>> = (0..total as u32)
            .map(|a| (0..total as u32).filter(|&b| ctx.disjoint(a, b)).collect())
            .collect();
        let mut suffix = vec![0u32; total * (total + 1)];
        for (pi, list) in disjoint.iter().enumerate() {
            let row = &mut suffix[pi * (total + 1)..(pi + 1) * (total + 1)];
            for &d in list {
                row[d as usize] += 1;
            }
            for t in (0..total).rev() {
                row[t] += row[t + 1];
            }
        }
        let kernel = scheme
            .kernel()
            .integer_vectors()
            .ok_or_else(|| Error::Precondition("kernel coefficients exceed i64".into()))?;
        let kernel_len = kernel.len();
        let mut by_id = vec![Vec::new(); total];
        let mut pos_suffix = vec![0i64; kernel_len * (total + 1)];
        let mut neg_suffix = vec![0i64; kernel_len * (total + 1)];
        for (v, vec) in kernel.iter().enumerate() {
            for &(id, c) in vec {
                by_id[id as usize].push((v as u32, c));
                let slot = v * (total + 1) + id as usize;
                if c > 0 {
                    pos_suffix[slot] += c;
                } else {
                    neg_suffix[slot] += c;
                }
            }
            for t in (0..total).rev() {
                pos_suffix[v * (total + 1) + t] += pos_suffix[v * (total + 1) + t + 1];
                neg_suffix[v * (total + 1) + t] += neg_suffix[v * (total + 1) + t + 1];
            }
        }
        Ok(Searcher {
            total,
            size,
            member_req,
            outside_req,
            disjoint,
            suffix,
            by_id,
            pos_suffix,
            neg_suffix,
            kernel_len,
            canonical,
            prune,
        })
    }

    fn root(&self) -> SearchNode {
        SearchNode {
            chosen: vec![false; self.total],
            count: 0,
            tally: vec![0; self.total],
            dots: vec![0; self.kernel_len],
            first: None,
        }
    }

    fn take(&self, node: &mut SearchNode, t: usize) {
        node.chosen[t] = true;
        node.count += 1;
        for &p in &self.disjoint[t] {
            node.tally[p as usize] += 1;
        }
        for &(v, c) in &self.by_id[t] {
            node.dots[v as usize] += c;
        }
        if node.first.is_none() {
            node.first = Some(t as u32);
        }
    }

    fn untake(&self, node: &mut SearchNode, t: usize) {
        node.chosen[t] = false;
        node.count -= 1;
        for &p in &self.disjoint[t] {
            node.tally[p as usize] -= 1;
        }
        for &(v, c) in &self.by_id[t] {
            node.dots[v as usize] -= c;
        }
        if node.first == Some(t as u32) {
            node.first = None;
        }
    }

    /// Whether the subtree below `node` (ids `< t` decided) can hold a solution.
    fn feasible(&self, node: &SearchNode, t: usize, stats: &mut SearchStats) -> bool {
        let slots = self.size - node.count;
        if self.total - t < slots {
            stats.pruned_size += 1;
            return false;
        }
        if !self.prune {
            return true;
        }
        let stride = self.total + 1;
        for pi in 0..self.total {
            let cur = node.tally[pi];
            let reach = cur + (self.suffix[pi * stride + t] as usize).min(slots) as i64;
            let ok = if pi < t {
                let req = if node.chosen[pi] { self.member_req } else { self.outside_req };
                req.is_some_and(|r| cur <= r && reach >= r)
            } else {
                [self.member_req, self.outside_req].iter().flatten().any(|&r| cur <= r && reach >= r)
            };
            if !ok {
                stats.pruned_budget += 1;
                return false;
            }
        }
        for v in 0..self.kernel_len {
            let d = node.dots[v];
            if d + self.pos_suffix[v * stride + t] < 0 || d + self.neg_suffix[v * stride + t] > 0 {
                stats.pruned_kernel += 1;
                return false;
            }
        }
        true
    }

    /// Exact check of a complete assignment (all ids `>= count` left out).
    fn accept(&self, node: &SearchNode) -> bool {
        (0..self.total).all(|pi| {
            let req = if node.chosen[pi] { self.member_req } else { self.outside_req };
            req == Some(node.tally[pi])
        }) && node.dots.iter().all(|&d| d == 0)
    }

    fn may_take(&self, node: &SearchNode, t: usize, stats: &mut SearchStats) -> bool {
        if node.count >= self.size || self.member_req.is_none() {
            return false;
        }
        if node.first.is_none() {
            if let Some(canon) = &self.canonical {
                if !canon[t] {
                    stats.pruned_symmetry += 1;
                    return false;
                }
            }
        }
        true
    }

    fn rec(&self, node: &mut SearchNode, t: usize, out: &mut Vec<KFamily>, stats: &mut SearchStats) {
        stats.nodes += 1;
        if !self.feasible(node, t, stats) {
            return;
        }
        if node.count == self.size || t == self.total {
            stats.leaves += 1;
            if node.count == self.size && self.accept(node) {
                out.push(self.family_of(node));
            }
            return;
        }
        if self.may_take(node, t, stats) {
            self.take(node, t);
            self.rec(node, t + 1, out, stats);
            self.untake(node, t);
        }
        if self.outside_req.is_some() || !self.prune {
            self.rec(node, t + 1, out, stats);
        }
    }

    fn family_of(&self, node: &SearchNode) -> KFamily {
        KFamily::from_sorted((0..self.total as u32).filter(|&i| node.chosen[i as usize]).collect()).unwrap()
    }

    /// Nodes at depth `SPLIT_DEPTH` (or leaves above it), in tree order.
    fn prefixes(&self, stats: &mut SearchStats) -> Vec<(SearchNode, usize)> {
        let mut out = Vec::new();
        let mut node = self.root();
        self.collect_prefixes(&mut node, 0, &mut out, stats);
        out
    }

    fn collect_prefixes(&self, node: &mut SearchNode, t: usize, out: &mut Vec<(SearchNode, usize)>, stats: &mut SearchStats) {
        if t == SPLIT_DEPTH.min(self.total) || node.count == self.size {
            out.push((node.clone(), t));
            return;
        }
        stats.nodes += 1;
        if !self.feasible(node, t, stats) {
            return;
        }
        if self.may_take(node, t, stats) {
            self.take(node, t);
            self.collect_prefixes(node, t + 1, out, stats);
            self.untake(node, t);
        }
        if self.outside_req.is_some() || !self.prune {
            self.collect_prefixes(node, t + 1, out, stats);
        }
    }
}

/// Runs `work` over `jobs` on up to `threads` workers; results come back in
/// job order.
fn run_jobs<J: Sync, R: Send>(jobs: &[J], threads: usize, work: impl Fn(&J) -> R + Sync) -> Vec<R> {
    let slots: Vec<Mutex<Option<R>>> = jobs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..threads.max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let r = work(&jobs[i]);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().unwrap().unwrap()).collect()
}

/// Ids that are smallest in their orbit under coordinate permutations.
fn orbit_minimal(ctx: &GeometryCtx) -> Vec<bool> {
    let m = ctx.params().n as usize + 1;
    let mut best: Vec<u32> = (0..ctx.num_kspaces() as u32).collect();
    for perm in permutations(m) {
        for id in 0..ctx.num_kspaces() as u32 {
            let img = ctx.kspace_id(&ctx.kspace(id).permute(ctx.field(), &perm)).unwrap();
            best[id as usize] = best[id as usize].min(img);
        }
    }
    best.iter().enumerate().map(|(i, &b)| b == i as u32).collect()
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..m).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..m).rev().find(|&i| p[i - 1] < p[i]) else { break };
        let j = (i..m).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

fn empty_result(x: &BigRational, size: Option<usize>, reason: String, start: Instant) -> SearchResult {
    SearchResult {
        x: x.clone(),
        size,
        families: Vec::new(),
        stats: SearchStats::default(),
        reason: Some(reason),
        elapsed: start.elapsed(),
    }
}

/// Every family with parameter `x`.
pub fn search_all(ctx: &GeometryCtx, scheme: &Scheme, x: &BigRational, config: &SearchConfig) -> Result<SearchResult> {
    let start = Instant::now();
    let params = *ctx.params();
    refuse_if_large(&params, config.max_kspaces)?;
    let Some(size) = size_of_parameter(&params, x) else {
        return Ok(empty_result(x, None, "non-integral size".into(), start));
    };
    if size > ctx.num_kspaces() {
        return Ok(empty_result(x, None, "size exceeds the number of k-spaces".into(), start));
    }
    let (member_req, outside_req) = budgets(&params, x);
    if config.prune && params.has_disjoint_pairs() {
        if size > 0 && member_req.is_none() {
            return Ok(empty_result(x, Some(size), "members would need a negative or fractional number of disjoint members".into(), start));
        }
        if size < ctx.num_kspaces() && outside_req.is_none() {
            return Ok(empty_result(x, Some(size), "non-members would need a fractional number of disjoint members".into(), start));
        }
    }
    if !params.has_disjoint_pairs() && config.prune {
        return Err(Error::Precondition(format!("pruned search needs n >= 2k+1, got {params}")));
    }
    let canonical = config.symmetry.then(|| orbit_minimal(ctx));
    let searcher = Searcher::new(ctx, scheme, size, x, canonical, config.prune)?;
    let mut stats = SearchStats::default();
    let mut families = if config.prune {
        let prefixes = searcher.prefixes(&mut stats);
        let parts = run_jobs(&prefixes, config.threads, |(node, t)| {
            let mut node = node.clone();
            let mut out = Vec::new();
            let mut st = SearchStats::default();
            searcher.rec(&mut node, *t, &mut out, &mut st);
            (out, st)
        });
        let mut fams = Vec::new();
        for (out, st) in parts {
            stats.merge(&st);
            fams.extend(out);
        }
        fams
    } else {
        enumerate_unpruned(ctx, &searcher, config, &mut stats)
    };
    if let Some(canon) = &searcher.canonical {
        let _ = canon;
        let m = params.n as usize + 1;
        let mut all = Vec::new();
        for perm in permutations(m) {
            all.extend(families.iter().map(|f| ctx.permute_family(f, &perm)));
        }
        families = all;
    }
    families.sort();
    families.dedup();
    if config.verify {
        verify_results(ctx, scheme, &families, x)?;
    }
    Ok(SearchResult { x: x.clone(), size: Some(size), families, stats, reason: None, elapsed: start.elapsed() })
}

/// Plain enumeration of all `size`-subsets, each checked exactly.
fn enumerate_unpruned(ctx: &GeometryCtx, searcher: &Searcher, config: &SearchConfig, stats: &mut SearchStats) -> Vec<KFamily> {
    let total = ctx.num_kspaces();
    let size = searcher.size;
    if size == 0 {
        let node = searcher.root();
        stats.leaves += 1;
        return if searcher.accept(&node) { vec![KFamily::new(vec![])] } else { vec![] };
    }
    let firsts: Vec<usize> = (0..=total - size).collect();
    let parts = run_jobs(&firsts, config.threads, |&f| {
        let mut st = SearchStats::default();
        let mut out = Vec::new();
        if let Some(canon) = &searcher.canonical {
            if !canon[f] {
                st.pruned_symmetry += 1;
                return (out, st);
            }
        }
        let mut node = searcher.root();
        searcher.take(&mut node, f);
        combos(searcher, &mut node, f + 1, &mut out, &mut st);
        (out, st)
    });
    let mut fams = Vec::new();
    for (out, st) in parts {
        stats.merge(&st);
        fams.extend(out);
    }
    fams
}

fn combos(s: &Searcher, node: &mut SearchNode, t: usize, out: &mut Vec<KFamily>, stats: &mut SearchStats) {
    stats.nodes += 1;
    if node.count == s.size {
        stats.leaves += 1;
        if s.accept(node) {
            out.push(s.family_of(node));
        }
        return;
    }
    for next in t..=s.total - (s.size - node.count) {
        s.take(node, next);
        combos(s, node, next + 1, out, stats);
        s.untake(node, next);
    }
}

fn verify_results(ctx: &GeometryCtx, scheme: &Scheme, families: &[KFamily], x: &BigRational) -> Result<()> {
    if families.is_empty() {
        return Ok(());
    }
    let data = BatteryData::generate(ctx, SpreadMode::Exhaustive)?;
    for f in families {
        let cand = CLCandidate::new(ctx, f.clone())?;
        let rep = run_battery(&cand, scheme, &data, BatteryLevel::All)?;
        if rep.passed() != Some(true) {
            return Err(Error::Disagreement(format!("search returned a family failing the battery: {:?}", f.ids())));
        }
        if x.is_one() && !is_trivial_x1(ctx, f) {
            return Err(Error::Disagreement(format!(
                "x = 1 family is neither a point-pencil nor a hyperplane family: {:?}",
                f.ids()
            )));
        }
    }
    Ok(())
}

/// All members share a point, or (`n = 2k+1`) all lie in one hyperplane.
pub fn is_trivial_x1(ctx: &GeometryCtx, f: &KFamily) -> bool {
    let ids = f.ids();
    let Some(&first) = ids.first() else { return false };
    let mut common: Vec<u32> = ctx.points_of(first).to_vec();
    for &id in &ids[1..] {
        let pts = ctx.points_of(id);
        common.retain(|p| pts.contains(p));
    }
    if !common.is_empty() {
        return true;
    }
    let params = ctx.params();
    params.n == 2 * params.k + 1
        && (0..ctx.num_hyperplanes() as u32).any(|h| {
            let inside = ctx.all_in(&ctx.hyperplane(h)).unwrap();
            ids.iter().all(|&id| inside.contains(id))
        })
}

/// One parameter inside a nonexistence window.
#[derive(Debug, Clone, Serialize)]
pub struct WindowEntry {
    pub x_num: String,
    pub x_den: String,
    pub size: usize,
    pub families: usize,
    pub reason: Option<String>,
    pub nodes: u64,
    /// `None` when the bound's hypothesis `n >= 3k+2` fails.
    pub within_bound: Option<bool>,
    pub klaus: Option<KlausSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KlausSummary {
    pub c: u64,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

impl From<(u64, KlausAudit)> for KlausSummary {
    fn from((c, a): (u64, KlausAudit)) -> Self {
        KlausSummary { c, lhs: a.lhs.to_string(), rhs: a.rhs.to_string(), holds: a.holds }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowReport {
    pub lo: String,
    pub hi: String,
    pub entries: Vec<WindowEntry>,
}

impl WindowReport {
    pub fn total_families(&self) -> usize {
        self.entries.iter().map(|e| e.families).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_families() == 0
    }
}

/// Searches every `x` in the open interval `(lo, hi)` with integral family size.
pub fn nonexistence_window(
    ctx: &GeometryCtx,
    scheme: &Scheme,
    lo: &BigRational,
    hi: &BigRational,
    config: &SearchConfig,
) -> Result<WindowReport> {
    let params = *ctx.params();
    let mut entries = Vec::new();
    for size in 0..=ctx.num_kspaces() {
        let x = parameter_of_size(&params, size);
        if x <= *lo || x >= *hi {
            continue;
        }
        let res = search_all(ctx, scheme, &x, config)?;
        let within_bound = within_classification_bound(&params, &x).ok();
        let c = x.floor().to_integer().to_u64().unwrap_or(0);
        let klaus = klaus_condition(c, &params, &x).ok().map(|a| (c, a).into());
        entries.push(WindowEntry {
            x_num: x.numer().to_string(),
            x_den: x.denom().to_string(),
            size,
            families: res.families.len(),
            reason: res.reason,
            nodes: res.stats.nodes,
            within_bound,
            klaus,
        });
    }
    Ok(WindowReport { lo: lo.to_string(), hi: hi.to_string(), entries })
}

/// Largest pairwise-disjoint subfamily, by branch and bound.
pub fn max_disjoint(ctx: &GeometryCtx, f: &KFamily) -> usize {
    fn grow(ctx: &GeometryCtx, cands: &[u32], size: usize, best: &mut usize) {
        if size + cands.len() <= *best {
            return;
        }
        if cands.is_empty() {
            *best = size;
            return;
        }
        for (i, &c) in cands.iter().enumerate() {
            if size + cands.len() - i <= *best {
                return;
            }
            let rest: Vec<u32> = cands[i + 1..].iter().copied().filter(|&o| ctx.disjoint(c, o)).collect();
            grow(ctx, &rest, size + 1, best);
        }
    }
    let mut best = 0;
    grow(ctx, f.ids(), 0, &mut best);
    best
}

/// Whether the largest pairwise-disjoint subfamily has at most `c` members.
pub fn verify_max_disjoint(ctx: &GeometryCtx, f: &KFamily, c: usize) -> bool {
    max_disjoint(ctx, f) <= c
}
