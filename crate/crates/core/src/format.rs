//! The `CLKSET v1` text format for families of `k`-spaces.
//!
//! ```text
//! CLKSET v1
//! n q k
//! POLY c_0 … c_e        (only when q is not prime)
//! <(k+1)(n+1) field indices, one k-space per line>
//! ```
//!
//! Each data line is the canonical reduced row-echelon basis, row-major.
//! Writers emit members in id order, so output is deterministic.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::exactmath::SchemeParams;
use crate::gfq::{FieldCtx, FieldElement};
use crate::projspace::{GeometryCtx, KFamily, Subspace};

pub const MAGIC: &str = "CLKSET v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClksetFile {
    pub params: SchemeParams,
    pub subspaces: Vec<Subspace>,
}

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

impl ClksetFile {
    pub fn from_family(ctx: &GeometryCtx, family: &KFamily) -> Self {
        ClksetFile {
            params: *ctx.params(),
            subspaces: family.ids().iter().map(|&id| ctx.kspace(id).clone()).collect(),
        }
    }

    /// Ids of the members in `ctx`, which must be the declared geometry.
    pub fn to_family(&self, ctx: &GeometryCtx) -> Result<KFamily> {
        if ctx.params() != &self.params {
            return Err(Error::Precondition(format!(
                "file describes {}, geometry is {}",
                self.params,
                ctx.params()
            )));
        }
        ctx.family_of(&self.subspaces)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        match lines.next() {
            Some((_, MAGIC)) => {}
            Some((l, other)) => return perr(l, format!("expected header {MAGIC:?}, found {other:?}")),
            None => return perr(1, "empty file"),
        }
        let Some((pl, pline)) = lines.next() else {
            return perr(2, "missing parameter line");
        };
        let nums: Vec<u64> = pline
            .split_whitespace()
            .map(|t| t.parse::<u64>())
            .collect::<std::result::Result<_, _>>()
            .or_else(|_| perr(pl, "parameter line must hold three integers n q k"))?;
        let [n, q, k] = nums[..] else {
            return perr(pl, "parameter line must hold three integers n q k");
        };
        let (n, k) = match (u32::try_from(n), u32::try_from(k)) {
            (Ok(n), Ok(k)) => (n, k),
            _ => return perr(pl, "n or k out of range"),
        };
        let params = SchemeParams::new(n, k, q).or_else(|e| perr(pl, e.to_string()))?;
        let field = FieldCtx::new(q).or_else(|e| perr(pl, e.to_string()))?;
        let mut rest: Vec<(usize, &str)> = lines.filter(|(_, l)| !l.is_empty()).collect();
        if field.e() > 1 {
            let expected = field.poly_header();
            match rest.first() {
                Some((_, l)) if *l == expected => {
                    rest.remove(0);
                }
                Some((l, other)) if other.starts_with("POLY") => {
                    return perr(*l, format!("field polynomial {other:?} does not match {expected:?}"))
                }
                _ => return perr(pl + 1, format!("missing {expected:?} line for GF({q})")),
            }
        } else if let Some((l, other)) = rest.first().filter(|(_, l)| l.starts_with("POLY")) {
            return perr(*l, format!("unexpected {other:?} line for prime field GF({q})"));
        }
        let width = (n as usize + 1) * (k as usize + 1);
        let mut seen = HashSet::new();
        let mut subspaces = Vec::with_capacity(rest.len());
        for (l, line) in rest {
            let vals: Vec<u64> = line
                .split_whitespace()
                .map(|t| t.parse::<u64>())
                .collect::<std::result::Result<_, _>>()
                .or_else(|_| perr(l, "non-integer entry"))?;
            if vals.len() != width {
                return perr(l, format!("expected {width} entries, found {}", vals.len()));
            }
            if let Some(v) = vals.iter().find(|&&v| v >= q) {
                return perr(l, format!("entry {v} is not an element of GF({q})"));
            }
            let rows: Vec<Vec<FieldElement>> = vals
                .chunks(n as usize + 1)
                .map(|c| c.iter().map(|&v| FieldElement(v as u16)).collect())
                .collect();
            let s = Subspace::from_canonical(&field, n, rows)
                .or_else(|_| perr(l, "matrix is not in canonical reduced row-echelon form"))?;
            if s.dim() != k as i32 {
                return perr(l, format!("rows do not span a {k}-space"));
            }
            if !seen.insert(s.clone()) {
                return perr(l, "duplicate k-space");
            }
            subspaces.push(s);
        }
        Ok(ClksetFile { params, subspaces })
    }

    /// Text with members sorted by canonical matrix.
    pub fn render(&self) -> String {
        let SchemeParams { n, k, q } = self.params;
        let mut out = format!("{MAGIC}\n{n} {q} {k}\n");
        let field = FieldCtx::new(q).expect("params already validated");
        if field.e() > 1 {
            out.push_str(&field.poly_header());
            out.push('\n');
        }
        let mut subs: Vec<&Subspace> = self.subspaces.iter().collect();
        subs.sort_by_key(|s| s.flat());
        for s in subs {
            let cells: Vec<String> = s.flat().iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.render().as_bytes())
    }
}

/// Writes through a temporary sibling file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: u32, k: u32, q: u64) -> GeometryCtx {
        GeometryCtx::enumerate(SchemeParams::new(n, k, q).unwrap()).unwrap()
    }

    #[test]
    fn round_trip_prime_and_extension() {
        for (n, k, q) in [(3, 1, 2), (3, 1, 4), (4, 2, 2)] {
            let g = ctx(n, k, q);
            let fam = g.pencil(3);
            let text = ClksetFile::from_family(&g, &fam).render();
            let parsed = ClksetFile::parse(&text).unwrap();
            assert_eq!(parsed.render(), text);
            assert_eq!(parsed.to_family(&g).unwrap(), fam);
            assert_eq!(text.contains("POLY"), q == 4);
        }
    }

    #[test]
    fn header_layout() {
        let g = ctx(3, 1, 4);
        let text = ClksetFile::from_family(&g, &KFamily::new(vec![0])).render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[..3], ["CLKSET v1", "3 4 1", "POLY 1 1 1"]);
        assert_eq!(lines[3].split(' ').count(), 8);
    }

    #[test]
    fn rejections_carry_line_numbers() {
        let line_of = |t: &str| match ClksetFile::parse(t).unwrap_err() {
            Error::Parse { line, .. } => line,
            e => panic!("{e}"),
        };
        assert_eq!(line_of("CLKSET v2\n3 2 1\n"), 1);
        assert_eq!(line_of("CLKSET v1\n3 6 1\n"), 2);
        assert_eq!(line_of("CLKSET v1\n3 2 1\n1 0 0 0 0 1 0 0\n1 0 0 0 0 1 0 0\n"), 4);
        assert_eq!(line_of("CLKSET v1\n3 2 1\n1 1 0 0 0 1 0 0\n"), 3);
        assert_eq!(line_of("CLKSET v1\n3 2 1\n1 0 0 0\n"), 3);
        assert_eq!(line_of("CLKSET v1\n3 4 1\n1 0 0 0 0 1 0 0\n"), 3);
        assert_eq!(line_of("CLKSET v1\n3 2 1\nPOLY 1 1\n"), 3);
        assert_eq!(line_of("CLKSET v1\n3 2 1\n1 0 0 0 0 1 0 2\n"), 3);
    }

    #[test]
    fn atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("f.clk");
        let g = ctx(3, 1, 2);
        let file = ClksetFile::from_family(&g, &g.pencil(0));
        file.write(&path).unwrap();
        assert_eq!(ClksetFile::read(&path).unwrap(), file);
        assert_eq!(std::fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }
}
