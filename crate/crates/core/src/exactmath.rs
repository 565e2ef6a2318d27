//! Closed-form counts for the Grassmann scheme, evaluated in exact integer
//! and rational arithmetic.
//!
//! Every quantity here is a polynomial expression in `q` built from Gaussian
//! binomial coefficients. Nothing touches floating point: the one real-valued
//! bound, `f(q,n,k)`, is compared through fourth powers so that the comparison
//! is decided over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{precondition, Error, Result};

/// Ambient parameters of the Grassmann scheme of `k`-spaces in `PG(n,q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SchemeParams {
    pub n: u32,
    pub k: u32,
    pub q: u64,
}

impl SchemeParams {
    pub fn new(n: u32, k: u32, q: u64) -> Result<Self> {
        if k >= n {
            return Err(Error::InvalidParams(format!(
                "need 0 <= k < n, got n = {n}, k = {k}"
            )));
        }
        prime_power(q)?;
        Ok(SchemeParams { n, k, q })
    }

    fn ni(&self) -> i64 {
        self.n as i64
    }

    fn ki(&self) -> i64 {
        self.k as i64
    }

    /// `n >= 2k+1`, the range where the characterization holds.
    pub fn has_disjoint_pairs(&self) -> bool {
        self.n > 2 * self.k
    }

    /// `(k+1) | (n+1)`, i.e. `PG(n,q)` admits a `k`-spread.
    pub fn admits_spread(&self) -> bool {
        (self.n + 1).is_multiple_of(self.k + 1)
    }
}

impl std::fmt::Display for SchemeParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PG({},{}), k = {}", self.n, self.q, self.k)
    }
}

/// Splits `q` as `p^e`. Rejects anything that is not a prime power, with the
/// factorization in the message.
pub fn prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::InvalidField(format!("q = {q} is not a prime power")));
    }
    let factors = factorize(q);
    if factors.len() == 1 {
        return Ok(factors[0]);
    }
    let shown: Vec<String> = factors
        .iter()
        .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
        .collect();
    Err(Error::InvalidField(format!(
        "{q} = {} not a prime power",
        shown.join("·")
    )))
}

fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

pub(crate) fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

pub(crate) fn rat(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}

/// `q^e` for `e >= 0`.
pub fn pow(q: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(q), e as usize)
}

fn pow_i(q: u64, e: i64) -> BigInt {
    debug_assert!(e >= 0, "negative exponent {e}");
    pow(q, e as u32)
}

/// Gaussian binomial with the convention that it vanishes outside
/// `0 <= b <= a`. `q` must already be validated.
pub(crate) fn qb(a: i64, b: i64, q: u64) -> BigInt {
    if b < 0 || a < 0 || b > a {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigInt::one();
    // After step t the accumulator equals [a, t]_q, so each division is exact.
    for t in 1..=b {
        acc *= pow_i(q, a - t + 1) - 1;
        let (quot, rem) = acc.div_rem(&(pow_i(q, t) - 1));
        debug_assert!(rem.is_zero());
        acc = quot;
    }
    acc
}

/// Number of `b`-dimensional subspaces of `GF(q)^a`.
pub fn qbinom(a: u32, b: u32, q: u64) -> Result<BigInt> {
    if q < 2 {
        return Err(Error::InvalidField(format!("q must be at least 2, got {q}")));
    }
    Ok(qb(a as i64, b as i64, q))
}

/// Number of projective `j`-spaces of `PG(n,q)` disjoint from a fixed `m`-space.
pub fn count_disjoint(n: u32, q: u64, m: u32, j: u32) -> BigInt {
    let (n, m, j) = (n as i64, m as i64, j as i64);
    pow_i(q, (m + 1) * (j + 1)) * qb(n - m, j + 1, q)
}

/// Eigenvalue of the distance-`i` relation on the common eigenspace `V_j`.
pub fn eigenvalue_p(j: u32, i: u32, params: &SchemeParams) -> Result<BigInt> {
    let d = params.k + 1;
    if i > d || j > d {
        return precondition(format!("need 0 <= i, j <= k+1 = {d}, got i = {i}, j = {j}"));
    }
    let (n, k, q) = (params.ni(), params.ki(), params.q);
    let (i, j) = (i as i64, j as i64);
    let lo = 0.max(j - i);
    let hi = j.min(k + 1 - i);
    let mut sum = BigInt::zero();
    for s in lo..=hi {
        let e = i * (i + s - j) + (j - s) * (j - s - 1) / 2;
        let term = qb(j, s, q) * qb(n - k + s - j, n - k - i, q) * qb(k + 1 - s, i, q) * pow_i(q, e);
        if (j + s) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum)
}

/// The full `(k+2) x (k+2)` eigenvalue matrix, rows indexed by eigenspace.
pub fn p_matrix(params: &SchemeParams) -> Vec<Vec<BigInt>> {
    let d = params.k + 1;
    (0..=d)
        .map(|j| (0..=d).map(|i| eigenvalue_p(j, i, params).expect("in range")).collect())
        .collect()
}

/// Largest `a` with `q^a | value`; `None` for zero (infinite valuation).
pub fn q_valuation(value: &BigInt, q: u64) -> Option<u32> {
    if value.is_zero() {
        return None;
    }
    let q = BigInt::from(q);
    let mut v = value.abs();
    let mut a = 0;
    loop {
        let (quot, rem) = v.div_rem(&q);
        if !rem.is_zero() {
            return Some(a);
        }
        v = quot;
        a += 1;
    }
}

/// `phi_i(j)`: exponent of `q` in `P_{ji}`; `None` when `P_{ji} = 0`.
pub fn phi(i: u32, j: u32, params: &SchemeParams) -> Result<Option<u32>> {
    Ok(q_valuation(&eigenvalue_p(j, i, params)?, params.q))
}

/// Whether `P_{1i}` differs from every `P_{ji}`, `j = 2..=k+1`.
pub fn verify_eigenvalue_separation(i: u32, params: &SchemeParams) -> Result<bool> {
    if i == 0 || i > params.k + 1 {
        return precondition(format!("need 1 <= i <= k+1, got {i}"));
    }
    let p1 = eigenvalue_p(1, i, params)?;
    for j in 2..=params.k + 1 {
        if eigenvalue_p(j, i, params)? == p1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks `phi_i(1) > phi_i(2) > ... > phi_i(i) = ... = phi_i(k+1)`,
/// skipping indices where `P_{ji}` vanishes.
pub fn phi_chain_holds(i: u32, params: &SchemeParams) -> Result<bool> {
    if i == 0 || i > params.k + 1 {
        return precondition(format!("need 1 <= i <= k+1, got {i}"));
    }
    let vals: Vec<(u32, u32)> = (1..=params.k + 1)
        .filter_map(|j| phi(i, j, params).transpose().map(|r| r.map(|v| (j, v))))
        .collect::<Result<_>>()?;
    for w in vals.windows(2) {
        let ((ja, a), (_, b)) = (w[0], w[1]);
        let ok = if ja < i { a > b } else { a == b };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

fn require_disjoint_pairs(params: &SchemeParams) -> Result<()> {
    if !params.has_disjoint_pairs() {
        return precondition(format!("need n >= 2k+1, got {params}"));
    }
    Ok(())
}

/// Number of `k`-spaces disjoint from two fixed disjoint `k`-spaces `π, π'`
/// that meet `Σ = <π, π'>` in an `i`-space (`i = -1` meaning disjoint from `Σ`).
pub fn w_component(i: i64, params: &SchemeParams) -> Result<BigInt> {
    require_disjoint_pairs(params)?;
    let (n, k, q) = (params.ni(), params.ki(), params.q);
    if i < -1 || i > k {
        return precondition(format!("need -1 <= i <= k, got {i}"));
    }
    if i == -1 {
        return Ok(pow_i(q, 2 * (k + 1) * (k + 1)) * qb(n - 2 * k - 1, k + 1, q));
    }
    let e = 2 * k * k + k + (3 * i * i - i) / 2 - 3 * i * k;
    let mut v = pow_i(q, e) * qb(n - 2 * k - 1, k - i, q) * qb(k + 1, i + 1, q);
    for j in 0..=i {
        v *= pow_i(q, k - j + 1) - 1;
    }
    Ok(v)
}

pub fn w_total(params: &SchemeParams) -> Result<BigInt> {
    let mut sum = BigInt::zero();
    for i in -1..=params.ki() {
        sum += w_component(i, params)?;
    }
    Ok(sum)
}

fn exact_div(num: BigInt, den: &BigInt, what: &'static str) -> Result<BigInt> {
    let (quot, rem) = num.div_rem(den);
    if !rem.is_zero() {
        return Err(Error::InexactDivision(what));
    }
    Ok(quot)
}

/// `k`-spaces disjoint from `π` and `π'` through a fixed point of
/// `Σ \ (π ∪ π')`.
pub fn w_sigma(params: &SchemeParams) -> Result<BigInt> {
    let (k, q) = (params.ki(), params.q);
    let mut sum = BigInt::zero();
    for i in 0..=k {
        sum += w_component(i, params)? * (pow_i(q, i + 1) - 1);
    }
    let den = num_traits::pow(pow_i(q, k + 1) - 1, 2);
    exact_div(sum, &den, "W_sigma")
}

/// `k`-spaces disjoint from `π` and `π'` through a fixed point outside `Σ`.
/// Needs `n > 2k+1`: for `n = 2k+1` there is no such point.
pub fn w_sigma_bar(params: &SchemeParams) -> Result<BigInt> {
    if params.n <= 2 * params.k + 1 {
        return precondition(format!(
            "W_sigma_bar needs n > 2k+1 (no points outside Σ), got {params}"
        ));
    }
    let (n, k, q) = (params.ni(), params.ki(), params.q);
    let mut sum = BigInt::zero();
    for i in -1..k {
        sum += w_component(i, params)? * (pow_i(q, k + 1) - pow_i(q, i + 1));
    }
    let den = pow_i(q, n + 1) - pow_i(q, 2 * k + 2);
    exact_div(sum, &den, "W_sigma_bar")
}

/// `q^{k²+k} [n-k-1, k]`: members disjoint from a fixed `k`-space through a
/// point off it, and the scale of the disjointness counts.
pub fn disjoint_scale(params: &SchemeParams) -> BigInt {
    let (n, k, q) = (params.ni(), params.ki(), params.q);
    pow_i(q, k * k + k) * qb(n - k - 1, k, q)
}

fn qbin_nk(params: &SchemeParams) -> BigInt {
    qb(params.ni(), params.ki(), params.q)
}

/// Members of a Cameron-Liebler family meeting a fixed member (itself included).
pub fn s1(params: &SchemeParams, x: &BigRational) -> Result<BigRational> {
    require_disjoint_pairs(params)?;
    let one = BigRational::one();
    Ok(x * rat(qbin_nk(params)) - (x - &one) * rat(disjoint_scale(params)))
}

fn require_primed(params: &SchemeParams) -> Result<()> {
    if params.n <= 3 * params.k + 1 {
        return precondition(format!("primed bounds need n > 3k+1, got {params}"));
    }
    Ok(())
}

pub fn d2prime(params: &SchemeParams, x: &BigRational) -> Result<BigRational> {
    require_primed(params)?;
    Ok((x - rat(big(2))) * rat(w_sigma(params)?))
}

pub fn s2prime(params: &SchemeParams, x: &BigRational) -> Result<BigRational> {
    let d = d2prime(params, x)?;
    Ok(s2_base(params, x) + d)
}

fn s2_base(params: &SchemeParams, x: &BigRational) -> BigRational {
    let one = BigRational::one();
    x * rat(qbin_nk(params)) - rat(big(2)) * (x - one) * rat(disjoint_scale(params))
}

/// Members skew to both of two skew members `π, π'`, given `spread_meet =
/// |S₀ ∩ L|` for a spread `S₀` of `<π, π'>`.
///
/// For `n = 2k+1` the term carrying `W_sigma_bar` is multiplied by
/// `x - |S₀ ∩ L|`, which is zero for every Cameron-Liebler family, and there
/// are no points outside `Σ`; the term is dropped.
pub fn d2(params: &SchemeParams, x: &BigRational, spread_meet: &BigInt) -> Result<BigRational> {
    require_disjoint_pairs(params)?;
    let m = rat(spread_meet.clone());
    let ws = rat(w_sigma(params)?);
    let mut v = ws * (&m - rat(big(2)));
    if params.n > 2 * params.k + 1 {
        v += rat(w_sigma_bar(params)?) * (x - &m);
    }
    Ok(v)
}

/// Members meeting both of two skew members, by inclusion-exclusion.
pub fn s2(params: &SchemeParams, x: &BigRational, spread_meet: &BigInt) -> Result<BigRational> {
    Ok(s2_base(params, x) + d2(params, x, spread_meet)?)
}

/// Both sides of `(c+1)·s1 - C(c+1,2)·s2' > x·[n,k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KlausAudit {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub holds: bool,
}

pub fn klaus_condition(c: u64, params: &SchemeParams, x: &BigRational) -> Result<KlausAudit> {
    if params.n <= 2 * params.k + 1 {
        return precondition(format!("need n > 2k+1, got {params}"));
    }
    let c1 = rat(BigInt::from(c + 1));
    let pairs = rat(BigInt::from(c + 1) * BigInt::from(c) / 2);
    let lhs = c1 * s1(params, x)? - pairs * s2prime(params, x)?;
    let rhs = x * rat(qbin_nk(params));
    let holds = lhs > rhs;
    Ok(KlausAudit { lhs, rhs, holds })
}

/// `f(q,n,k)^4 = q^{2n-k²-3k-6} (q-1)^{k²-k+2} (q²+q+1)²`. The exponent of
/// `q` can be negative for `k >= 3`, hence a rational.
pub fn bound_fourth_power(params: &SchemeParams) -> BigRational {
    let (n, k, q) = (params.ni(), params.ki(), params.q);
    let eq = 2 * n - k * k - 3 * k - 6;
    let qpart = if eq >= 0 {
        rat(pow_i(q, eq))
    } else {
        BigRational::new(BigInt::one(), pow_i(q, -eq))
    };
    let rest = pow_i(q - 1, k * k - k + 2) * num_traits::pow(big((q * q + q + 1) as i64), 2);
    qpart * rat(rest)
}

/// Whether `x <= f(q,n,k)`, decided exactly.
pub fn within_classification_bound(params: &SchemeParams, x: &BigRational) -> Result<bool> {
    if params.n < 3 * params.k + 2 {
        return precondition(format!("need n >= 3k+2, got {params}"));
    }
    if !x.is_positive() {
        return Ok(true);
    }
    Ok(num_traits::pow(x.clone(), 4) <= bound_fourth_power(params))
}

/// `[0, (q^{n+1}-1)/(q^{k+1}-1)]`, the admissible parameter range.
pub fn parameter_range(params: &SchemeParams) -> (BigRational, BigRational) {
    let (n, k, q) = (params.ni(), params.ki(), params.q);
    let upper = BigRational::new(pow_i(q, n + 1) - 1, pow_i(q, k + 1) - 1);
    (BigRational::zero(), upper)
}

/// Number of `k`-spaces of `PG(n,q)`.
pub fn num_kspaces(params: &SchemeParams) -> BigInt {
    qb(params.ni() + 1, params.ki() + 1, params.q)
}

/// Parameter of the family of all `k`-spaces in a hyperplane.
pub fn hyperplane_parameter(params: &SchemeParams) -> BigRational {
    let (n, k, q) = (params.ni(), params.ki(), params.q);
    BigRational::new(pow_i(q, n - k) - 1, pow_i(q, k + 1) - 1)
}

/// `x = size / [n,k]`.
pub fn parameter_of_size(params: &SchemeParams, size: usize) -> BigRational {
    BigRational::new(BigInt::from(size), qbin_nk(params))
}

/// `x·[n,k]` when it is a nonnegative integer.
pub fn size_of_parameter(params: &SchemeParams, x: &BigRational) -> Option<usize> {
    let s = x * rat(qbin_nk(params));
    if !s.is_integer() || s.is_negative() {
        return None;
    }
    s.to_integer().to_usize()
}

/// Expected count of members meeting `π` in a `(k-i)`-space, `1 <= i <= k+1`.
///
/// The member branch is written as `(x-1)[k+1,i][n-k-1,i-1]q^{i(i-1)} +
/// [n-k,i][k,i]q^{i²}`, which equals the quotient form but stays defined at
/// `i = k+1`.
pub fn intersection_count(
    params: &SchemeParams,
    x: &BigRational,
    i: u32,
    member: bool,
) -> Result<BigRational> {
    if i == 0 || i > params.k + 1 {
        return precondition(format!("need 1 <= i <= k+1, got {i}"));
    }
    let (n, k, q) = (params.ni(), params.ki(), params.q);
    let i = i as i64;
    let base = qb(n - k - 1, i - 1, q) * qb(k + 1, i, q) * pow_i(q, i * (i - 1));
    if member {
        let second = qb(n - k, i, q) * qb(k, i, q) * pow_i(q, i * i);
        Ok((x - BigRational::one()) * rat(base) + rat(second))
    } else {
        Ok(x * rat(base))
    }
}

/// Coefficients of the identity relating point-pencils and subspace families:
/// `|[P]∩L| + a·|[τ]∩L| = b·|[P,τ]∩L| + c·|L|` for `P ∈ τ`, `dim τ = i`.
pub fn extra_property_coefficients(
    params: &SchemeParams,
    i: u32,
) -> Result<(BigRational, BigRational, BigRational)> {
    let (n, k, q) = (params.ni(), params.ki(), params.q);
    if (i as i64) < k + 1 || i > params.n {
        return precondition(format!("need k+1 <= dim τ <= n, got {i}"));
    }
    let i = i as i64;
    let a = BigRational::new(
        qb(n - 1, k, q) * (pow_i(q, k) - 1),
        qb(i - 1, k, q) * (pow_i(q, i) - 1),
    );
    let b = BigRational::new(qb(n - 1, k, q), qb(i - 1, k, q));
    let c = BigRational::new(pow_i(q, k) - 1, pow_i(q, n) - 1);
    Ok((a, b, c))
}
