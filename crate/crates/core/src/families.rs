//! Affine parametric families of Butson matrices.
//!
//! Each entry of a family is a constant root of unity times a monomial in
//! the parameters, where a conjugated parameter carries exponent -1. Five
//! families ship with the crate as `.fam` files:
//!
//! ```text
//! F8_5 8 4 params=a,b,c,d,e
//! p^0, p^0, ...
//! p^0, p^0 * a^1, p^2 * a^-1 c^1 e^1, ...
//! ```
//!
//! The header is `name n q params=...`; each following line is one row of
//! `n` comma-separated entries `p^s * x^i y^j ...`, where `p` is the
//! primitive `q`-th root. `#` starts a comment line.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::arith::{check_order, unit_from_exponent, GaussianInt, PhaseExponent};
use crate::catalog::Catalog;
use crate::equivalence::canonical_form;
use crate::error::{Error, Result};
use crate::matrix::ButsonMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FamilyEntry {
    /// Exponent of the constant root.
    pub constant: u8,
    /// Exponent of each parameter, aligned with `FamilySpec::params`.
    pub exps: Vec<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub name: String,
    pub n: usize,
    pub q: u8,
    pub params: Vec<String>,
    /// Row-major, `n * n` entries.
    pub entries: Vec<FamilyEntry>,
}

const BUILTIN_SOURCES: [&str; 5] = [
    include_str!("../families/H4.fam"),
    include_str!("../families/D6.fam"),
    include_str!("../families/F8_5.fam"),
    include_str!("../families/S8_4.fam"),
    include_str!("../families/D8B_5.fam"),
];

pub fn builtin_families() -> Vec<FamilySpec> {
    BUILTIN_SOURCES
        .iter()
        .map(|src| FamilySpec::parse(src).expect("bundled family files parse"))
        .collect()
}

pub fn builtin_family(name: &str) -> Option<FamilySpec> {
    builtin_families().into_iter().find(|f| f.name == name)
}

impl FamilySpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let (hl, header) = lines
            .next()
            .ok_or_else(|| perr(1, "missing family header".into()))?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        let [name, n, q, params] = toks[..] else {
            return Err(perr(hl, "header must be `name n q params=...`".into()));
        };
        let n: usize = n
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| perr(hl, format!("invalid order {n:?}")))?;
        let q: u8 = q
            .parse()
            .map_err(|_| perr(hl, format!("invalid q {q:?}")))?;
        check_order(q)?;
        let params: Vec<String> = params
            .strip_prefix("params=")
            .ok_or_else(|| perr(hl, "expected `params=` list".into()))?
            .split(',')
            .filter(|s| !s.is_empty())
            .map(str::to_owned)
            .collect();
        if params.iter().any(|p| p == "p") {
            return Err(perr(hl, "`p` is reserved for the constant root".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        let mut rows = 0;
        for (ln, line) in lines {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != n {
                return Err(perr(
                    ln,
                    format!("expected {n} entries, found {}", cells.len()),
                ));
            }
            for cell in cells {
                entries.push(parse_entry(cell, q, &params).map_err(|m| perr(ln, m))?);
            }
            rows += 1;
        }
        if rows != n {
            return Err(perr(hl, format!("expected {n} rows, found {rows}")));
        }
        Ok(Self {
            name: name.to_owned(),
            n,
            q,
            params,
            entries,
        })
    }

    pub fn num_tuples(&self) -> usize {
        (self.q as usize).pow(self.params.len() as u32)
    }

    /// Parameter tuple number `idx` in lexicographic order (first
    /// parameter most significant).
    pub fn tuple(&self, mut idx: usize) -> Vec<u8> {
        let q = self.q as usize;
        let mut t = vec![0u8; self.params.len()];
        for slot in t.iter_mut().rev() {
            *slot = (idx % q) as u8;
            idx /= q;
        }
        t
    }

    fn grid_at(&self, values: &[u8]) -> Vec<u8> {
        let q = self.q as i64;
        self.entries
            .iter()
            .map(|en| {
                let s: i64 = en.constant as i64
                    + en.exps
                        .iter()
                        .zip(values)
                        .map(|(&x, &v)| x as i64 * v as i64)
                        .sum::<i64>();
                s.rem_euclid(q) as u8
            })
            .collect()
    }

    /// Evaluates the family with parameter `j` set to `zeta_q^values[j]`.
    pub fn eval(&self, values: &[u8]) -> Result<ButsonMatrix> {
        if values.len() != self.params.len() {
            return Err(Error::Family {
                family: self.name.clone(),
                msg: format!(
                    "expected {} parameters, got {}",
                    self.params.len(),
                    values.len()
                ),
            });
        }
        ButsonMatrix::from_exponents(self.q, self.n, self.grid_at(values)).map_err(|e| {
            Error::Family {
                family: self.name.clone(),
                msg: format!("evaluation at {values:?} is not Hadamard: {e}"),
            }
        })
    }

    /// Evaluates with named parameters.
    pub fn eval_named(&self, assignment: &BTreeMap<String, PhaseExponent>) -> Result<ButsonMatrix> {
        let values = self
            .params
            .iter()
            .map(|p| match assignment.get(p) {
                Some(ph) if ph.q() == self.q => Ok(ph.k()),
                Some(ph) => Err(Error::Dimension(format!(
                    "parameter {p} has modulus {}, family uses {}",
                    ph.q(),
                    self.q
                ))),
                None => Err(Error::Family {
                    family: self.name.clone(),
                    msg: format!("parameter {p} is unassigned"),
                }),
            })
            .collect::<Result<Vec<u8>>>()?;
        self.eval(&values)
    }

    /// Checks that every pair of rows is orthogonal as a formal Laurent
    /// polynomial in the parameters, i.e. for every parameter value on the
    /// unit circle.
    pub fn check_symbolic_orthogonality(&self) -> Result<()> {
        let n = self.n;
        for j in 0..n {
            for k in j + 1..n {
                let mut terms: HashMap<Vec<i32>, GaussianInt> = HashMap::new();
                for m in 0..n {
                    let a = &self.entries[j * n + m];
                    let b = &self.entries[k * n + m];
                    let mono: Vec<i32> = a.exps.iter().zip(&b.exps).map(|(x, y)| x - y).collect();
                    let c = (a.constant + self.q - b.constant) % self.q;
                    *terms.entry(mono).or_default() += unit_from_exponent(c, self.q);
                }
                if let Some((mono, coef)) = terms.iter().find(|(_, c)| !c.is_zero()) {
                    return Err(Error::Family {
                        family: self.name.clone(),
                        msg: format!(
                            "rows {} and {} leave coefficient {coef} on monomial {mono:?}",
                            j + 1,
                            k + 1
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn to_fam(&self) -> String {
        let mut s = format!(
            "{} {} {} params={}\n",
            self.name,
            self.n,
            self.q,
            self.params.join(",")
        );
        for row in self.entries.chunks(self.n) {
            let cells: Vec<String> = row.iter().map(|e| self.format_entry(e)).collect();
            s.push_str(&cells.join(", "));
            s.push('\n');
        }
        s
    }

    fn format_entry(&self, e: &FamilyEntry) -> String {
        let factors: Vec<String> = self
            .params
            .iter()
            .zip(&e.exps)
            .filter(|(_, &x)| x != 0)
            .map(|(p, x)| format!("{p}^{x}"))
            .collect();
        if factors.is_empty() {
            format!("p^{}", e.constant)
        } else {
            format!("p^{} * {}", e.constant, factors.join(" "))
        }
    }

    /// Human-readable evaluation point, e.g. `F8_5(1,i,i,1,i)`.
    pub fn label(&self, values: &[u8]) -> String {
        format_tag(&self.name, self.q, values)
    }
}

pub fn format_tag(name: &str, q: u8, values: &[u8]) -> String {
    let vals: Vec<String> = values.iter().map(|&v| root_symbol(v, q)).collect();
    format!("{name}({})", vals.join(","))
}

fn root_symbol(k: u8, q: u8) -> String {
    match (k as u32 * 4 / q as u32, 4 % q) {
        (0, _) => "1".into(),
        (1, 0) => "i".into(),
        (2, 0) => "-1".into(),
        (3, 0) => "-i".into(),
        _ => format!("w^{k}"),
    }
}

fn parse_entry(cell: &str, q: u8, params: &[String]) -> std::result::Result<FamilyEntry, String> {
    let mut constant: i64 = 0;
    let mut exps = vec![0i32; params.len()];
    let mut any = false;
    for part in cell.split('*') {
        for factor in part.split_whitespace() {
            any = true;
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (
                    b,
                    e.parse::<i32>()
                        .map_err(|_| format!("bad exponent in {factor:?}"))?,
                ),
                None => (factor, 1),
            };
            if base == "p" {
                constant += exp as i64;
            } else if let Some(i) = params.iter().position(|p| p == base) {
                exps[i] += exp;
            } else {
                return Err(format!("unknown symbol {base:?} in {cell:?}"));
            }
        }
    }
    if !any {
        return Err("empty entry".into());
    }
    Ok(FamilyEntry {
        constant: constant.rem_euclid(q as i64) as u8,
        exps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassHit {
    pub class_id: u32,
    /// First tuple (lexicographically) reaching the class.
    pub tuple: Vec<u8>,
    /// The hit comes from the transpose of the evaluation.
    pub transposed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub family: String,
    pub tuples_scanned: usize,
    pub hadamard_tuples: usize,
    /// Sorted by class id.
    pub classes_hit: Vec<ClassHit>,
    pub includes_transpose: bool,
}

impl ScanReport {
    pub fn class_ids(&self) -> BTreeSet<u32> {
        self.classes_hit.iter().map(|h| h.class_id).collect()
    }
}

impl fmt::Display for ScanReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "family {}{}: {} tuples scanned, {} Hadamard, {} classes",
            self.family,
            if self.includes_transpose {
                " (with transpose)"
            } else {
                ""
            },
            self.tuples_scanned,
            self.hadamard_tuples,
            self.classes_hit.len()
        )?;
        for h in &self.classes_hit {
            let vals: Vec<String> = h.tuple.iter().map(u8::to_string).collect();
            writeln!(
                f,
                "  class {:>2}  params {}{}",
                h.class_id,
                vals.join(","),
                if h.transposed { "  (transpose)" } else { "" }
            )?;
        }
        Ok(())
    }
}

type HitMap = BTreeMap<u32, Vec<u8>>;

/// First direct and first transposed hit of every class reached by the
/// family, each keyed by class id.
pub(crate) fn scan_hits(spec: &FamilySpec, catalog: &Catalog) -> Result<(usize, HitMap, HitMap)> {
    if spec.n != catalog.n {
        return Err(Error::Dimension(format!(
            "family {} has order {}, catalog has order {}",
            spec.name, spec.n, catalog.n
        )));
    }
    if !catalog.q.is_multiple_of(spec.q) {
        return Err(Error::Dimension(format!(
            "family {} uses q={}, catalog uses q={}",
            spec.name, spec.q, catalog.q
        )));
    }
    let lookup = |m: &ButsonMatrix| -> Result<u32> {
        let m = m.lift(catalog.q)?;
        catalog
            .lookup(canonical_form(&m).key())
            .map(|r| r.id)
            .ok_or(Error::NotInCatalog)
    };
    let results: Vec<Result<Option<(u32, u32)>>> = (0..spec.num_tuples())
        .into_par_iter()
        .map(|idx| {
            let Ok(m) = spec.eval(&spec.tuple(idx)) else {
                return Ok(None);
            };
            Ok(Some((lookup(&m)?, lookup(&m.transpose())?)))
        })
        .collect();
    let mut hadamard = 0;
    let mut direct = BTreeMap::new();
    let mut transposed = BTreeMap::new();
    for (idx, r) in results.into_iter().enumerate() {
        if let Some((d, t)) = r? {
            hadamard += 1;
            direct.entry(d).or_insert_with(|| spec.tuple(idx));
            transposed.entry(t).or_insert_with(|| spec.tuple(idx));
        }
    }
    Ok((hadamard, direct, transposed))
}

/// Evaluates every parameter tuple and maps each result (and optionally
/// its transpose) onto a catalog class.
pub fn scan_family(
    spec: &FamilySpec,
    catalog: &Catalog,
    with_transpose: bool,
) -> Result<ScanReport> {
    let (hadamard, direct, transposed) = scan_hits(spec, catalog)?;
    let mut hits: BTreeMap<u32, ClassHit> = direct
        .into_iter()
        .map(|(id, tuple)| {
            (
                id,
                ClassHit {
                    class_id: id,
                    tuple,
                    transposed: false,
                },
            )
        })
        .collect();
    if with_transpose {
        for (id, tuple) in transposed {
            hits.entry(id).or_insert(ClassHit {
                class_id: id,
                tuple,
                transposed: true,
            });
        }
    }
    Ok(ScanReport {
        family: spec.name.clone(),
        tuples_scanned: spec.num_tuples(),
        hadamard_tuples: hadamard,
        classes_hit: hits.into_values().collect(),
        includes_transpose: with_transpose,
    })
}

pub fn coverage_union(reports: &[ScanReport]) -> BTreeSet<u32> {
    reports.iter().flat_map(ScanReport::class_ids).collect()
}

/// Pairs `(t, t')` with `eval(t)^T == eval(t')` entrywise.
pub fn self_cognate_check(spec: &FamilySpec) -> Vec<(Vec<u8>, Vec<u8>)> {
    let grids: Vec<Vec<u8>> = (0..spec.num_tuples())
        .map(|i| spec.grid_at(&spec.tuple(i)))
        .collect();
    let mut index: HashMap<&[u8], Vec<usize>> = HashMap::new();
    for (i, g) in grids.iter().enumerate() {
        index.entry(g.as_slice()).or_default().push(i);
    }
    let n = spec.n;
    let mut pairs = Vec::new();
    for (i, g) in grids.iter().enumerate() {
        let t: Vec<u8> = (0..n * n).map(|x| g[(x % n) * n + x / n]).collect();
        if let Some(js) = index.get(t.as_slice()) {
            for &j in js {
                pairs.push((spec.tuple(i), spec.tuple(j)));
            }
        }
    }
    pairs
}
