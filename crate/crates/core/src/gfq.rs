//! Table-driven arithmetic in `GF(p^e)`.
//!
//! Elements are encoded by an index `Σ c_j p^j` where `Σ c_j α^j` is the
//! polynomial representative modulo a fixed irreducible. The modulus is the
//! smallest monic irreducible of degree `e` when coefficient lists are compared
//! from the leading term down (equivalently: smallest index encoding), so
//! every run and every file agrees on the model of the field.

use crate::error::{Error, Result};
use crate::exactmath::prime_power;

/// Largest field order for which tables are built.
pub const MAX_FIELD_ORDER: u64 = 256;

/// Default cap on the field order of a geometry.
pub const DEFAULT_MAX_Q: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone)]
pub struct FieldCtx {
    p: u64,
    e: u32,
    q: usize,
    modulus: Vec<u64>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

fn digits(mut idx: u64, p: u64, e: u32) -> Vec<u64> {
    (0..e)
        .map(|_| {
            let d = idx % p;
            idx /= p;
            d
        })
        .collect()
}

fn undigits(coeffs: &[u64], p: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Polynomial product modulo `p`, no reduction by a modulus.
fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Irreducibility by trial division against every monic polynomial of
/// degree `1..=deg/2`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for low in 0..count {
            let mut g = digits(low, p, d as u32);
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn poly_rem(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut r = trim(f.to_vec());
    let gd = g.len() - 1;
    let lead_inv = mod_inv(*g.last().unwrap(), p);
    while r.len() > gd {
        let shift = r.len() - 1 - gd;
        let c = r.last().unwrap() * lead_inv % p;
        for (j, &gj) in g.iter().enumerate() {
            r[shift + j] = (r[shift + j] + p * p - c * gj % p) % p;
        }
        r = trim(r);
    }
    r
}

fn mod_inv(a: u64, p: u64) -> u64 {
    (1..p).find(|&b| a * b % p == 1).expect("nonzero residue")
}

impl FieldCtx {
    /// Builds `GF(q)` with the canonical modulus.
    pub fn new(q: u64) -> Result<Self> {
        let (p, e) = prime_power(q)?;
        if q > MAX_FIELD_ORDER {
            return Err(Error::InvalidField(format!(
                "field order {q} exceeds the table limit {MAX_FIELD_ORDER}"
            )));
        }
        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            (0..p.pow(e))
                .map(|low| {
                    let mut f = digits(low, p, e);
                    f.push(1);
                    f
                })
                .find(|f| is_irreducible(f, p))
                .expect("an irreducible polynomial of every degree exists")
        };
        Ok(Self::with_modulus(p, e, modulus))
    }

    fn with_modulus(p: u64, e: u32, modulus: Vec<u64>) -> Self {
        let q = p.pow(e) as usize;
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for a in 0..q {
            let da = digits(a as u64, p, e);
            for b in 0..q {
                let db = digits(b as u64, p, e);
                let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = undigits(&s, p) as u16;
                let prod = poly_mul(&da, &db, p);
                let mut red = if e == 1 { prod } else { poly_rem(&prod, &modulus, p) };
                red.resize(e as usize, 0);
                mul[a * q + b] = undigits(&red, p) as u16;
            }
        }
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u16)
            .collect();
        let inv = (0..q)
            .map(|a| if a == 0 { 0 } else { (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u16 })
            .collect();
        FieldCtx { p, e, q, modulus, add, mul, neg, inv }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Modulus coefficients `c_0 … c_e` (monic, so `c_e = 1`).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Header line `POLY c_0 … c_e`.
    pub fn poly_header(&self) -> String {
        let cs: Vec<String> = self.modulus.iter().map(|c| c.to_string()).collect();
        format!("POLY {}", cs.join(" "))
    }

    pub fn element(&self, index: usize) -> FieldElement {
        assert!(index < self.q, "element index {index} out of range for GF({})", self.q);
        FieldElement(index as u16)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q as u16).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.add[a.index() * self.q + b.index()])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.mul[a.index() * self.q + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg[a.index()])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::InvalidField("inverse of zero".into()));
        }
        Ok(FieldElement(self.inv[a.index()]))
    }

    #[inline]
    pub(crate) fn inv_nonzero(&self, a: FieldElement) -> FieldElement {
        debug_assert!(!a.is_zero());
        FieldElement(self.inv[a.index()])
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

/// Linear identification of `GF(Q)^m` with `GF(q)^{m·t}` where `Q = q^t`.
///
/// Each point `<v>` of `PG(m-1, Q)` maps to the `GF(q)`-span of
/// `{b_0 v, …, b_{t-1} v}` for a `GF(q)`-basis `b` of `GF(Q)`, an
/// `(t-1)`-space of `PG(mt-1, q)`. The images of all points form a spread.
#[derive(Debug, Clone)]
pub struct FieldReduction {
    big: FieldCtx,
    small: FieldCtx,
    degree: usize,
    basis: Vec<FieldElement>,
    /// `coords[a]` = coordinates of big-field element `a` in `basis`, as small-field elements.
    coords: Vec<Vec<FieldElement>>,
}

impl FieldReduction {
    /// `big` must have order `small.q()^t` for some `t >= 1`.
    pub fn new(big: FieldCtx, small: FieldCtx) -> Result<Self> {
        if big.p != small.p || !big.e.is_multiple_of(small.e) {
            return Err(Error::InvalidField(format!(
                "GF({}) is not an extension of GF({})",
                big.q, small.q
            )));
        }
        let degree = (big.e / small.e) as usize;
        // Embed the small field: send its generator α to a root of its modulus.
        let root = big
            .elements()
            .find(|&g| {
                let mut acc = FieldElement::ZERO;
                for &c in small.modulus.iter().rev() {
                    acc = big.add(big.mul(acc, g), FieldElement(c as u16));
                }
                acc.is_zero()
            })
            .ok_or_else(|| Error::InvalidField("small-field modulus has no root".into()))?;
        let embed: Vec<FieldElement> = small
            .elements()
            .map(|s| {
                let cs = digits(s.0 as u64, small.p, small.e);
                let mut acc = FieldElement::ZERO;
                for &c in cs.iter().rev() {
                    acc = big.add(big.mul(acc, root), FieldElement(c as u16));
                }
                acc
            })
            .collect();
        // Greedy basis: extend while the next element leaves the current span.
        let mut basis = Vec::new();
        let mut span: Vec<Option<Vec<FieldElement>>> = vec![None; big.q];
        span[0] = Some(Vec::new());
        for cand in big.elements() {
            if basis.len() == degree {
                break;
            }
            if span[cand.index()].is_some() {
                continue;
            }
            let old: Vec<(usize, Vec<FieldElement>)> = span
                .iter()
                .enumerate()
                .filter_map(|(i, c)| c.clone().map(|c| (i, c)))
                .collect();
            let mut next: Vec<Option<Vec<FieldElement>>> = vec![None; big.q];
            for s in small.elements() {
                let scaled = big.mul(embed[s.index()], cand);
                for (base, c) in &old {
                    let v = big.add(FieldElement(*base as u16), scaled);
                    let mut cc = c.clone();
                    cc.push(s);
                    next[v.index()] = Some(cc);
                }
            }
            span = next;
            basis.push(cand);
        }
        if basis.len() != degree || span.iter().any(|c| c.is_none()) {
            return Err(Error::InvalidField("failed to find a subfield basis".into()));
        }
        let coords = span.into_iter().map(|c| c.unwrap()).collect();
        Ok(FieldReduction { big, small, degree, basis, coords })
    }

    pub fn big(&self) -> &FieldCtx {
        &self.big
    }

    pub fn small(&self) -> &FieldCtx {
        &self.small
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coordinates of a big-field vector: `m` entries become `m·t`.
    pub fn flatten(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        v.iter().flat_map(|a| self.coords[a.index()].iter().copied()).collect()
    }

    /// Spanning vectors of the image of the point `<v>`.
    pub fn image_of_point(&self, v: &[FieldElement]) -> Vec<Vec<FieldElement>> {
        self.basis
            .iter()
            .map(|&b| {
                let scaled: Vec<FieldElement> = v.iter().map(|&a| self.big.mul(b, a)).collect();
                self.flatten(&scaled)
            })
            .collect()
    }
}
