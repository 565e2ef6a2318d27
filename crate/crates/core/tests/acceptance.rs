//! Acceptance run: each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use clg::clset::{
    extra_property_check, make_hyperplane_family, make_point_pencil, meeting_count, random_family,
    run_battery, BatteryData, BatteryLevel, CLCandidate, SpreadMode,
};
use clg::exactmath::{
    count_disjoint, d2, eigenvalue_p, num_kspaces, parameter_range, qbinom, s1, s2,
    verify_eigenvalue_separation, w_component, w_sigma, w_sigma_bar, w_total, within_classification_bound,
};
use clg::gfq::FieldCtx;
use clg::projspace::{enumerate_subspaces, GeometryCtx, KFamily, SpreadModel, Subspace};
use clg::scheme::{verify_spectrum, Scheme};
use clg::search::{nonexistence_window, search_all, SearchConfig};
use clg::SchemeParams;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn params(n: u32, k: u32, q: u64) -> SchemeParams {
    SchemeParams::new(n, k, q).unwrap()
}

fn geometry(n: u32, k: u32, q: u64) -> GeometryCtx {
    GeometryCtx::enumerate(params(n, k, q)).unwrap()
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn big(v: usize) -> BigInt {
    BigInt::from(v)
}

// ---------------------------------------------------------------------------
// 1. Closed forms against brute-force counts.

fn in_set(ctx: &GeometryCtx, s: &Subspace) -> Vec<bool> {
    let mut mark = vec![false; ctx.num_points()];
    for v in s.point_vectors(ctx.field()) {
        mark[ctx.point_id(&v).unwrap() as usize] = true;
    }
    mark
}

fn misses(ctx: &GeometryCtx, id: u32, mark: &[bool]) -> bool {
    ctx.points_of(id).iter().all(|&p| !mark[p as usize])
}

fn criterion_1() -> Outcome {
    let mut checks = 0usize;
    for q in [2u64, 3] {
        let field = FieldCtx::new(q).unwrap();
        // Gaussian binomials: count canonical bases, and for q = 2 also the
        // distinct spans of all b-tuples of nonzero vectors.
        for a in 1..=6u32 {
            for b in 0..=a {
                let counted = if b == 0 { 1 } else { enumerate_subspaces(&field, a - 1, b - 1).len() };
                ensure(qbinom(a, b, q).unwrap() == big(counted), || format!("qbinom({a},{b},{q})"))?;
                checks += 1;
            }
        }
        if q == 2 {
            for a in 1..=4u32 {
                let vecs: Vec<Vec<clg::gfq::FieldElement>> = (1..1usize << a)
                    .map(|m| (0..a).map(|i| field.element((m >> i) & 1)).collect())
                    .collect();
                for b in 1..=a.min(3) {
                    let mut spans = std::collections::HashSet::new();
                    let mut idx = vec![0usize; b as usize];
                    loop {
                        let rows: Vec<_> = idx.iter().map(|&i| vecs[i].clone()).collect();
                        let s = Subspace::span(&field, a - 1, &rows);
                        if s.dim() == b as i32 - 1 {
                            spans.insert(s);
                        }
                        let mut p = 0;
                        while p < idx.len() {
                            idx[p] += 1;
                            if idx[p] < vecs.len() {
                                break;
                            }
                            idx[p] = 0;
                            p += 1;
                        }
                        if p == idx.len() {
                            break;
                        }
                    }
                    ensure(qbinom(a, b, q).unwrap() == big(spans.len()), || format!("span count ({a},{b})"))?;
                    checks += 1;
                }
            }
        }
        for n in 1..=5u32 {
            for k in 0..=2u32.min(n - 1) {
                let p = params(n, k, q);
                if num_kspaces(&p) > BigInt::from(100_000) {
                    continue;
                }
                let ctx = GeometryCtx::enumerate(p).unwrap();
                let total = ctx.num_kspaces();
                // Disjointness from a fixed m-space, for every m.
                for m in 0..=n {
                    let fixed = &enumerate_subspaces(&field, n, m)[0];
                    let mark = in_set(&ctx, fixed);
                    let c = (0..total as u32).filter(|&id| misses(&ctx, id, &mark)).count();
                    ensure(count_disjoint(n, q, m, k) == big(c), || format!("count_disjoint n={n} q={q} m={m} j={k}"))?;
                    checks += 1;
                }
                // Valences.
                for pi in [0, total / 2, total - 1] {
                    let mut val = vec![0usize; k as usize + 2];
                    for b in 0..total as u32 {
                        val[ctx.relation(pi as u32, b) as usize] += 1;
                    }
                    for (i, v) in val.iter().enumerate() {
                        ensure(eigenvalue_p(0, i as u32, &p).unwrap() == big(*v), || format!("valence {p} i={i}"))?;
                        checks += 1;
                    }
                }
                if p.has_disjoint_pairs() {
                    checks += check_w(&ctx)?;
                }
            }
        }
    }
    Ok(format!("{checks} exact comparisons"))
}

fn check_w(ctx: &GeometryCtx) -> Result<usize, String> {
    let p = *ctx.params();
    let field = ctx.field();
    let k = p.k;
    let pi = 0u32;
    let pi2 = (0..ctx.num_kspaces() as u32).find(|&b| ctx.disjoint(pi, b)).unwrap();
    let sigma = ctx.kspace(pi).join(field, ctx.kspace(pi2));
    let mut by_dim = vec![0usize; k as usize + 2];
    let mut meeting = 0usize;
    let in_sigma = in_set(ctx, &sigma);
    let in_pi: Vec<bool> = {
        let mut m = vec![false; ctx.num_points()];
        for &x in ctx.points_of(pi).iter().chain(ctx.points_of(pi2)) {
            m[x as usize] = true;
        }
        m
    };
    let p_in = (0..ctx.num_points()).find(|&x| in_sigma[x] && !in_pi[x]).unwrap() as u32;
    let p_out = (0..ctx.num_points()).find(|&x| !in_sigma[x]).map(|x| x as u32);
    let (mut through_in, mut through_out) = (0usize, 0usize);
    for id in 0..ctx.num_kspaces() as u32 {
        if ctx.disjoint(pi, id) && ctx.disjoint(pi2, id) {
            let d = ctx.kspace(id).intersection_dim(field, &sigma);
            by_dim[(d + 1) as usize] += 1;
            let pts = ctx.points_of(id);
            through_in += pts.contains(&p_in) as usize;
            through_out += p_out.is_some_and(|o| pts.contains(&o)) as usize;
        } else {
            meeting += 1;
        }
    }
    let mut checks = 0;
    for (slot, &c) in by_dim.iter().enumerate() {
        let i = slot as i64 - 1;
        ensure(w_component(i, &p).unwrap() == big(c), || format!("W_{i} for {p}"))?;
        checks += 1;
    }
    let total: usize = by_dim.iter().sum();
    ensure(w_total(&p).unwrap() == big(total), || format!("W for {p}"))?;
    ensure(total + meeting == ctx.num_kspaces(), || format!("W + meeting for {p}"))?;
    ensure(w_sigma(&p).unwrap() == big(through_in), || format!("W_sigma for {p}"))?;
    checks += 3;
    if p.n > 2 * p.k + 1 {
        ensure(w_sigma_bar(&p).unwrap() == big(through_out), || format!("W_sigma_bar for {p}"))?;
        checks += 1;
    }
    Ok(checks)
}

// ---------------------------------------------------------------------------
// 2. Eigenvalues by explicit eigenvectors.

fn criterion_2() -> Outcome {
    let mut lines = Vec::new();
    for (n, k, q) in [(3, 1, 2), (3, 1, 3), (4, 1, 2)] {
        let ctx = geometry(n, k, q);
        let p = *ctx.params();
        let scheme = Scheme::build(&ctx).unwrap();
        let rep = verify_spectrum(&scheme).unwrap();
        ensure(rep.all_verified(ctx.num_kspaces()), || format!("{p}: {:?}", rep.verified))?;
        for (j, &m) in rep.multiplicities.iter().enumerate() {
            let j = j as u32;
            let expect = qbinom(n + 1, j, q).unwrap() - if j == 0 { BigInt::zero() } else { qbinom(n + 1, j - 1, q).unwrap() };
            ensure(big(m) == expect, || format!("{p}: multiplicity of V_{j}"))?;
        }
        for i in 1..=k + 1 {
            ensure(verify_eigenvalue_separation(i, &p).unwrap(), || format!("{p}: separation i={i}"))?;
        }
        lines.push(format!("J_{q}({},{}) multiplicities {:?}", n + 1, k + 1, rep.multiplicities));
    }
    Ok(lines.join("; "))
}

// ---------------------------------------------------------------------------
// 3. Battery agreement on trivial and random families.

fn trivial_families(ctx: &GeometryCtx) -> Vec<KFamily> {
    let mut out = Vec::new();
    for p in 0..ctx.num_points() as u32 {
        let pencil = make_point_pencil(p, ctx).unwrap();
        out.push(pencil.complement().into_family());
        out.push(pencil.into_family());
    }
    for h in 0..ctx.num_hyperplanes() as u32 {
        let fam = make_hyperplane_family(&ctx.hyperplane(h), ctx).unwrap();
        out.push(fam.complement().into_family());
        out.push(fam.into_family());
    }
    out
}

fn criterion_3() -> Outcome {
    let mut summary = Vec::new();
    for (n, k, q, seed) in [(3u32, 1u32, 2u64, 11u64), (3, 1, 3, 12)] {
        let ctx = geometry(n, k, q);
        let scheme = Scheme::build(&ctx).unwrap();
        let data = BatteryData::generate(&ctx, SpreadMode::Exhaustive).unwrap();
        ensure(data.spreads_exhaustive && data.pairs_exhaustive, || "spread data not exhaustive".into())?;
        if q == 2 {
            ensure(data.spreads.len() == 56, || format!("{} spreads", data.spreads.len()))?;
        }
        let trivial = trivial_families(&ctx);
        for f in &trivial {
            let cand = CLCandidate::new(&ctx, f.clone()).unwrap();
            let rep = run_battery(&cand, &scheme, &data, BatteryLevel::All).map_err(|e| e.to_string())?;
            ensure(rep.passed() == Some(true), || format!("trivial family failed:\n{}", rep.render_text()))?;
        }
        let size = qbinom(n, k, q).unwrap().to_usize().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut passed = 0;
        for _ in 0..500 {
            let cand = CLCandidate::new(&ctx, random_family(&ctx, size, &mut rng)).unwrap();
            let rep = run_battery(&cand, &scheme, &data, BatteryLevel::All).map_err(|e| e.to_string())?;
            passed += (rep.passed() == Some(true)) as usize;
        }
        summary.push(format!(
            "PG({n},{q}): {} trivial families pass, 500 random agree ({passed} pass), {} spreads, {} switching pairs",
            trivial.len(),
            data.spreads.len(),
            data.pairs.len()
        ));
    }
    Ok(summary.join("; "))
}

// ---------------------------------------------------------------------------
// 4. Classification by exhaustive search.

fn criterion_4() -> Outcome {
    let cfg = SearchConfig { threads: 4, ..Default::default() };
    let ctx = geometry(3, 1, 2);
    let scheme = Scheme::build(&ctx).unwrap();
    let res = search_all(&ctx, &scheme, &rat(1), &cfg).unwrap();
    let mut expected: Vec<KFamily> = (0..15).map(|p| ctx.pencil(p)).collect();
    expected.extend((0..15).map(|h| ctx.all_in(&ctx.hyperplane(h)).unwrap()));
    expected.sort();
    ensure(res.families == expected, || format!("PG(3,2) x=1: {} families", res.families.len()))?;

    let ctx = geometry(4, 1, 2);
    let scheme = Scheme::build(&ctx).unwrap();
    let res = search_all(&ctx, &scheme, &rat(1), &cfg).unwrap();
    let mut pencils: Vec<KFamily> = (0..31).map(|p| ctx.pencil(p)).collect();
    pencils.sort();
    ensure(res.families == pencils, || format!("PG(4,2) x=1: {} families", res.families.len()))?;
    let low = nonexistence_window(&ctx, &scheme, &rat(0), &rat(1), &cfg).unwrap();
    let high = nonexistence_window(&ctx, &scheme, &rat(1), &rat(2), &cfg).unwrap();
    ensure(low.is_empty() && high.is_empty(), || "window not empty".into())?;
    let searched: Vec<usize> = high.entries.iter().filter(|e| e.reason.is_none()).map(|e| e.size).collect();
    Ok(format!(
        "PG(3,2) x=1: 30 (15 pencils + 15 hyperplanes); PG(4,2) x=1: 31 pencils; windows (0,1) {} sizes and (1,2) {} sizes empty (sizes {searched:?} needed branching)",
        low.entries.len(),
        high.entries.len()
    ))
}

// ---------------------------------------------------------------------------
// 5. s1 and d2 against direct counts.

/// Pencils, hyperplane families, pencil ∪ hyperplane with the point off the
/// hyperplane, and complements; `reps` limits how many of each kind.
fn passing_families(ctx: &GeometryCtx, reps: usize) -> Vec<KFamily> {
    let mut out = vec![KFamily::new(vec![])];
    for p in 0..(ctx.num_points()).min(reps) as u32 {
        out.push(ctx.pencil(p));
    }
    for h in 0..(ctx.num_hyperplanes()).min(reps) as u32 {
        let hyp = ctx.all_in(&ctx.hyperplane(h)).unwrap();
        let off = (0..ctx.num_points() as u32)
            .find(|&p| !ctx.hyperplane(h).contains_vector(ctx.field(), ctx.point(p)))
            .unwrap();
        let mut ids = hyp.ids().to_vec();
        ids.extend_from_slice(ctx.pencil(off).ids());
        out.push(hyp);
        out.push(KFamily::new(ids));
    }
    let all = KFamily::new((0..ctx.num_kspaces() as u32).collect());
    let comps: Vec<KFamily> = out.iter().map(|f| all.difference(f)).collect();
    out.extend(comps);
    out
}

fn criterion_5() -> Outcome {
    let mut summary = Vec::new();
    for (n, reps) in [(3u32, usize::MAX), (5, 1)] {
        let ctx = geometry(n, 1, 2);
        let p = *ctx.params();
        let scheme = Scheme::build(&ctx).unwrap();
        let data = BatteryData::generate(&ctx, SpreadMode::Exhaustive).unwrap();
        let model = SpreadModel::new(1, 2, 200).unwrap();
        let total = ctx.num_kspaces();
        let disjoint: Vec<bool> = (0..total * total)
            .map(|c| ctx.disjoint((c / total) as u32, (c % total) as u32))
            .collect();
        let mut spreads_of: HashMap<Subspace, Vec<KFamily>> = HashMap::new();
        let (mut families, mut triples, mut meets) = (0usize, 0usize, 0usize);
        for f in passing_families(&ctx, reps) {
            let cand = CLCandidate::new(&ctx, f.clone()).unwrap();
            let rep = run_battery(&cand, &scheme, &data, BatteryLevel::All).map_err(|e| e.to_string())?;
            ensure(rep.passed() == Some(true), || format!("{p}: family not CL:\n{}", rep.render_text()))?;
            families += 1;
            let x = cand.x();
            let want_s1 = s1(&p, &x).unwrap();
            for &pi in f.ids() {
                ensure(rat(meeting_count(&cand, pi) as i64) == want_s1, || format!("{p}: s1 at {pi}"))?;
                meets += 1;
            }
            let members = f.indicator(total);
            let max_meet = 2 * p.q as usize + 2;
            let d2_table: Vec<BigRational> = (0..=max_meet).map(|m| d2(&p, &x, &big(m)).unwrap()).collect();
            let s2_table: Vec<BigRational> = (0..=max_meet).map(|m| s2(&p, &x, &big(m)).unwrap()).collect();
            let ids = f.ids();
            for (a_idx, &a) in ids.iter().enumerate() {
                for &b in &ids[a_idx + 1..] {
                    if !disjoint[a as usize * total + b as usize] {
                        continue;
                    }
                    let both_skew = ids
                        .iter()
                        .filter(|&&c| disjoint[a as usize * total + c as usize] && disjoint[b as usize * total + c as usize])
                        .count();
                    let both_meet = ids
                        .iter()
                        .filter(|&&c| !disjoint[a as usize * total + c as usize] && !disjoint[b as usize * total + c as usize])
                        .count();
                    let sigma = ctx.kspace(a).join(ctx.field(), ctx.kspace(b));
                    let spreads = spreads_of
                        .entry(sigma.clone())
                        .or_insert_with(|| model.spreads_in(&ctx, &sigma).unwrap());
                    for s0 in spreads.iter() {
                        let m = s0.ids().iter().filter(|&&id| members[id as usize]).count();
                        ensure(rat(both_skew as i64) == d2_table[m], || format!("{p}: d2 at ({a},{b})"))?;
                        ensure(rat(both_meet as i64) == s2_table[m], || format!("{p}: s2 at ({a},{b})"))?;
                        if p.n > 3 * p.k + 1 {
                            ensure(rat(m as i64) <= x, || format!("{p}: |S0 ∩ L| = {m} > x at ({a},{b})"))?;
                        }
                        triples += 1;
                    }
                }
            }
        }
        summary.push(format!("PG({n},2): {families} families, {meets} s1 counts, {triples} (π,π′,S₀) triples"));
    }
    Ok(summary.join("; "))
}

// ---------------------------------------------------------------------------
// 6. Bound comparator against a 50-digit evaluation of f.

const DIGITS: u32 = 60;

/// `floor(base^(num/den) · 10^DIGITS)` for a positive rational base.
fn fixed_root(base: &BigRational, num: i64, den: u32) -> BigInt {
    let scale = BigInt::from(10).pow(DIGITS * den);
    let (b, e) = if num >= 0 { (base.clone(), num as u32) } else { (base.recip(), (-num) as u32) };
    let powered = num_traits::pow(b, e as usize);
    (powered * BigRational::from_integer(scale)).to_integer().nth_root(den)
}

/// `f(q,n,k)` scaled by `10^DIGITS`, factor by factor.
fn f_fixed(q: u64, n: i64, k: i64) -> BigInt {
    let scale = BigInt::from(10).pow(DIGITS);
    let qf = fixed_root(&rat(q as i64), 2 * n - k * k - 3 * k - 6, 4);
    let q1 = fixed_root(&rat(q as i64 - 1), k * k - k + 2, 4);
    let tri = fixed_root(&rat((q * q + q + 1) as i64), 1, 2);
    qf * q1 / &scale * tri / &scale
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let scale = BigInt::from(10).pow(DIGITS);
    let qs = [2u64, 3, 4, 5, 7, 8, 9];
    let (mut tested, mut inside) = (0, 0);
    while tested < 50 {
        let q = qs[rng.gen_range(0..qs.len())];
        let k = rng.gen_range(1..=4u32);
        let n = rng.gen_range(3 * k + 2..=3 * k + 10);
        let p = params(n, k, q);
        let f = f_fixed(q, n as i64, k as i64);
        let (_, hi) = parameter_range(&p);
        // Half the samples near f, half uniform in the admissible range.
        let x = if tested % 2 == 0 {
            let jitter = rng.gen_range(-1000i64..=1000);
            let approx = &f + &f * BigInt::from(jitter) / BigInt::from(100_000);
            BigRational::new(approx / BigInt::from(10).pow(DIGITS - 12), BigInt::from(10).pow(12))
        } else {
            let t = BigRational::new(rng.gen_range(1i64..1_000_000).into(), 1_000_000.into());
            hi.clone() * t
        };
        if !x.is_positive() || x >= hi {
            continue;
        }
        let x_fixed = (&x * BigRational::from_integer(scale.clone())).to_integer();
        let margin = (&x_fixed - &f).abs() * BigInt::from(10).pow(20);
        if margin <= f {
            continue;
        }
        let numeric = x_fixed <= f;
        let exact = within_classification_bound(&p, &x).unwrap();
        ensure(numeric == exact, || format!("{p}, x = {x}: exact {exact}, numeric {numeric}"))?;
        tested += 1;
        inside += exact as usize;
    }
    Ok(format!("{tested} samples agree ({inside} within the bound)"))
}

// ---------------------------------------------------------------------------
// 7. The pencil/subspace identity for every (P, hyperplane).

fn criterion_7() -> Outcome {
    let mut summary = Vec::new();
    for q in [2u64, 3] {
        let ctx = geometry(3, 1, q);
        let scheme = Scheme::build(&ctx).unwrap();
        let data = BatteryData::generate(&ctx, SpreadMode::Exhaustive).unwrap();
        let mut families = passing_families(&ctx, usize::MAX);
        families.extend(trivial_families(&ctx));
        families.sort();
        families.dedup();
        let hyperplanes: Vec<Subspace> = (0..ctx.num_hyperplanes() as u32).map(|h| ctx.hyperplane(h)).collect();
        let mut checks = 0;
        for f in &families {
            let cand = CLCandidate::new(&ctx, f.clone()).unwrap();
            let rep = run_battery(&cand, &scheme, &data, BatteryLevel::All).map_err(|e| e.to_string())?;
            ensure(rep.passed() == Some(true), || "family not CL".into())?;
            for tau in &hyperplanes {
                for pt in 0..ctx.num_points() as u32 {
                    if tau.contains_vector(ctx.field(), ctx.point(pt)) {
                        ensure(extra_property_check(&cand, pt, tau).unwrap(), || format!("PG(3,{q}) point {pt}"))?;
                        checks += 1;
                    }
                }
            }
        }
        summary.push(format!("PG(3,{q}): {} families, {checks} (P,τ) checks", families.len()));
    }
    Ok(summary.join("; "))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("formula vs brute force", criterion_1),
        ("spectral oracle", criterion_2),
        ("battery equivalence", criterion_3),
        ("classification reproduction", criterion_4),
        ("skew-count consistency", criterion_5),
        ("bound evaluator", criterion_6),
        ("pencil/subspace identity", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
