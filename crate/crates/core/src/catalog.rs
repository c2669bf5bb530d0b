//! Classified catalogs: JSON persistence with revalidation on load, the
//! plain-text report, and identification of arbitrary matrices.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arith::GaussianInt;
use crate::enumeration::{classify, ClassRecord, FamilyTag, GenerationMode};
use crate::equivalence::{canonical_form, TransposeClass};
use crate::error::{Error, Result};
use crate::families::{builtin_families, format_tag, scan_hits};
use crate::invariants::{
    fingerprint, haagerup, smith_normal_form, Fingerprint, HaagerupSet, SnfDiagonal,
};
use crate::matrix::{ButsonMatrix, EquivalenceWitness};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    pub q: u8,
    pub n: usize,
    pub tool_version: String,
    pub generation_mode: GenerationMode,
    /// Sorted by id; ids rank the canonical keys starting at 1.
    pub records: Vec<ClassRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct CatalogFile {
    q: u8,
    n: usize,
    tool_version: String,
    generation_mode: GenerationMode,
    records: Vec<RecordFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct RecordFile {
    id: u32,
    grid: Vec<Vec<u8>>,
    haagerup: Vec<u8>,
    fingerprint: Vec<(usize, Vec<(u64, u64)>)>,
    snf: Vec<(i64, i64)>,
    transpose: TransposeFile,
    family_tags: Vec<FamilyTag>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct TransposeFile {
    class: TransposeClass,
    partner_id: Option<u32>,
}

impl Catalog {
    /// Enumerates, classifies and tags `BH(q, n)` with the built-in families.
    pub fn build(q: u8, n: usize, mode: GenerationMode) -> Result<Self> {
        let records = classify(q, n, mode)?;
        let mut cat = Self {
            q,
            n,
            tool_version: TOOL_VERSION.to_owned(),
            generation_mode: mode,
            records,
        };
        cat.attach_family_tags()?;
        Ok(cat)
    }

    /// Records, for every built-in family of matching order, the first
    /// parameter tuple reaching each class (`name^T` for transposes).
    pub fn attach_family_tags(&mut self) -> Result<()> {
        for rec in &mut self.records {
            rec.family_tags.clear();
        }
        for fam in builtin_families() {
            if fam.n != self.n || !self.q.is_multiple_of(fam.q) {
                continue;
            }
            let (_, direct, transposed) = scan_hits(&fam, self)?;
            for (suffix, hits) in [("", direct), ("^T", transposed)] {
                for (id, params) in hits {
                    self.records[id as usize - 1].family_tags.push(FamilyTag {
                        family: format!("{}{suffix}", fam.name),
                        params,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn lookup(&self, key: &[u8]) -> Option<&ClassRecord> {
        self.records
            .binary_search_by(|r| r.representative.exponents().cmp(key))
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn get(&self, id: u32) -> Option<&ClassRecord> {
        self.records.get((id as usize).checked_sub(1)?)
    }

    pub fn to_json(&self) -> String {
        let file = CatalogFile {
            q: self.q,
            n: self.n,
            tool_version: self.tool_version.clone(),
            generation_mode: self.generation_mode,
            records: self
                .records
                .iter()
                .map(|r| RecordFile {
                    id: r.id,
                    grid: r.representative.rows(),
                    haagerup: r.haagerup.members.clone(),
                    fingerprint: r
                        .fingerprint
                        .as_ref()
                        .map(|f| f.per_degree.clone())
                        .unwrap_or_default(),
                    snf: r.snf.diag.iter().map(|z| (z.re, z.im)).collect(),
                    transpose: TransposeFile {
                        class: r.transpose_class,
                        partner_id: r.transpose_partner,
                    },
                    family_tags: r.family_tags.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("catalog serializes") + "\n"
    }

    /// Parses a catalog and re-verifies every record: Hadamard property,
    /// canonicality, id order, stored invariants and transpose pairing.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: CatalogFile =
            serde_json::from_str(text).map_err(|e| Error::MalformedCatalog(e.to_string()))?;
        if file.tool_version != TOOL_VERSION {
            log::warn!(
                "catalog written by version {}, this is {}",
                file.tool_version,
                TOOL_VERSION
            );
        }
        crate::arith::check_order(file.q)?;
        let q = file.q;
        let mut records = Vec::with_capacity(file.records.len());
        for (pos, rf) in file.records.into_iter().enumerate() {
            let id = rf.id;
            let bad = |msg: String| Error::CorruptCatalog { id, msg };
            if id as usize != pos + 1 {
                return Err(bad(format!("expected id {}", pos + 1)));
            }
            if rf.grid.len() != file.n || rf.grid.iter().any(|r| r.len() != file.n) {
                return Err(bad(format!("grid is not {0}x{0}", file.n)));
            }
            let rep = ButsonMatrix::from_rows(q, &rf.grid).map_err(|e| bad(e.to_string()))?;
            if canonical_form(&rep).matrix != rep {
                return Err(bad("representative is not in canonical form".into()));
            }
            let rec = ClassRecord {
                id,
                haagerup: HaagerupSet {
                    q,
                    members: rf.haagerup,
                },
                fingerprint: (!rf.fingerprint.is_empty()).then_some(Fingerprint {
                    per_degree: rf.fingerprint,
                }),
                snf: SnfDiagonal {
                    diag: rf
                        .snf
                        .into_iter()
                        .map(|(re, im)| GaussianInt::new(re, im))
                        .collect(),
                },
                transpose_class: rf.transpose.class,
                transpose_partner: rf.transpose.partner_id,
                family_tags: rf.family_tags,
                representative: rep,
            };
            if rec.haagerup != haagerup(&rec.representative) {
                return Err(bad("stored Haagerup set does not match".into()));
            }
            if rec.fingerprint != fingerprint(&rec.representative).ok() {
                return Err(bad("stored fingerprint does not match".into()));
            }
            if rec.snf != smith_normal_form(&rec.representative) {
                return Err(bad("stored Smith normal form does not match".into()));
            }
            if rec.transpose_partner.is_some()
                != (rec.transpose_class == TransposeClass::TransposePaired)
            {
                return Err(bad(
                    "transpose partner inconsistent with transpose class".into()
                ));
            }
            records.push(rec);
        }
        for w in records.windows(2) {
            if w[0].representative.exponents() >= w[1].representative.exponents() {
                return Err(Error::CorruptCatalog {
                    id: w[1].id,
                    msg: "records are not sorted by canonical key".into(),
                });
            }
        }
        let cat = Self {
            q,
            n: file.n,
            tool_version: file.tool_version,
            generation_mode: file.generation_mode,
            records,
        };
        for r in &cat.records {
            let t = canonical_form(&r.representative.transpose());
            let found = cat.lookup(t.key()).map(|x| x.id);
            let expected = Some(r.transpose_partner.unwrap_or(r.id));
            if found != expected {
                return Err(Error::CorruptCatalog {
                    id: r.id,
                    msg: format!("transpose lies in class {found:?}, record says {expected:?}"),
                });
            }
        }
        Ok(cat)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Finds the class of `h` and a witness taking the stored
    /// representative to `h`. Matrices over a subgroup of the catalog's
    /// roots are lifted first.
    pub fn identify(&self, h: &ButsonMatrix) -> Result<(u32, EquivalenceWitness)> {
        if h.n() != self.n {
            return Err(Error::Dimension(format!(
                "matrix has order {}, catalog has order {}",
                h.n(),
                self.n
            )));
        }
        let lifted = if h.q() == self.q {
            h.clone()
        } else if self.q.is_multiple_of(h.q()) {
            h.lift(self.q)?
        } else {
            return Err(Error::Dimension(format!(
                "matrix uses q={}, catalog uses q={}",
                h.q(),
                self.q
            )));
        };
        let cf = canonical_form(&lifted);
        let rec = self.lookup(cf.key()).ok_or(Error::NotInCatalog)?;
        let w = cf.witness.inverse();
        debug_assert_eq!(rec.representative.apply_unchecked(&w), lifted);
        Ok((rec.id, w))
    }

    pub fn summary(&self) -> CatalogSummary {
        let distinct = |f: &dyn Fn(&ClassRecord) -> String| {
            self.records.iter().map(f).collect::<BTreeSet<_>>().len()
        };
        let self_t = self
            .records
            .iter()
            .filter(|r| r.transpose_class == TransposeClass::SelfTransposeEquivalent)
            .count();
        CatalogSummary {
            classes: self.records.len(),
            self_transpose: self_t,
            transpose_pairs: (self.records.len() - self_t) / 2,
            fingerprints: distinct(&|r| format!("{:?}", r.fingerprint)),
            snfs: distinct(&|r| format!("{:?}", r.snf)),
        }
    }

    /// Fixed-layout text table of the catalog with summary counts.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "BH({},{}) catalog: generation {}, tool {}",
            self.q,
            self.n,
            match self.generation_mode {
                GenerationMode::Pruned => "pruned",
                GenerationMode::Safe => "safe",
            },
            self.tool_version
        );
        let _ = writeln!(
            out,
            "{:>3}  {:<9}  {:>7}  {:<10}  {:<34}  {:<40}  families",
            "id", "transpose", "partner", "haagerup", "snf", "fingerprint moduli"
        );
        for r in &self.records {
            let fp = match &r.fingerprint {
                Some(f) => f
                    .display_moduli()
                    .iter()
                    .map(|(d, m)| format!("d{d}: {}", m.join(" ")))
                    .collect::<Vec<_>>()
                    .join(" | "),
                None => "-".into(),
            };
            let tags = if r.family_tags.is_empty() {
                "-".to_string()
            } else {
                r.family_tags
                    .iter()
                    .map(|t| format_tag(&t.family, self.q, &t.params))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let hg: Vec<String> = r.haagerup.members.iter().map(u8::to_string).collect();
            let _ = writeln!(
                out,
                "{:>3}  {:<9}  {:>7}  {:<10}  {:<34}  {:<40}  {}",
                r.id,
                match r.transpose_class {
                    TransposeClass::SelfTransposeEquivalent => "self",
                    TransposeClass::TransposePaired => "paired",
                },
                r.transpose_partner
                    .map_or("-".to_string(), |p| p.to_string()),
                hg.join(","),
                r.snf.to_string(),
                fp,
                tags
            );
        }
        let _ = writeln!(out, "{}", self.summary());
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogSummary {
    pub classes: usize,
    pub self_transpose: usize,
    pub transpose_pairs: usize,
    pub fingerprints: usize,
    pub snfs: usize,
}

fn plural(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

impl std::fmt::Display for CatalogSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}; {} self-transpose; {}; {}; {}",
            plural(self.classes, "class", "classes"),
            self.self_transpose,
            plural(self.transpose_pairs, "transpose pair", "transpose pairs"),
            plural(self.fingerprints, "fingerprint", "fingerprints"),
            plural(self.snfs, "SNF", "SNFs"),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_catalog_report() {
        let c = Catalog {
            q: 2,
            n: 6,
            tool_version: TOOL_VERSION.into(),
            generation_mode: GenerationMode::Pruned,
            records: vec![],
        };
        let rep = c.report();
        assert!(rep.contains("id"));
        assert!(rep
            .ends_with("0 classes; 0 self-transpose; 0 transpose pairs; 0 fingerprints; 0 SNFs\n"));
        assert_eq!(Catalog::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn small_round_trip() {
        let c = Catalog::build(4, 4, GenerationMode::Pruned).unwrap();
        assert_eq!(c.records.len(), 2);
        let back = Catalog::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        // both H4 classes are tagged by the H4 family
        assert!(c
            .records
            .iter()
            .all(|r| r.family_tags.iter().any(|t| t.family == "H4")));
    }

    #[test]
    fn tampered_catalog_rejected() {
        let c = Catalog::build(4, 4, GenerationMode::Pruned).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        v["records"][1]["grid"][1][2] = serde_json::json!(3);
        match Catalog::from_json(&v.to_string()) {
            Err(Error::CorruptCatalog { id: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            Catalog::from_json("{\"q\": 4}"),
            Err(Error::MalformedCatalog(_))
        ));
    }

    #[test]
    fn identify_dimension_errors() {
        let c = Catalog::build(4, 2, GenerationMode::Pruned).unwrap();
        let h = ButsonMatrix::from_rows(4, &[vec![0]]).unwrap();
        assert!(matches!(c.identify(&h), Err(Error::Dimension(_))));
        let real = ButsonMatrix::from_rows(2, &[vec![1, 0], vec![1, 1]]).unwrap();
        let (id, w) = c.identify(&real).unwrap();
        assert_eq!(id, 1);
        assert_eq!(
            c.get(1).unwrap().representative.apply_witness(&w).unwrap(),
            real.lift(4).unwrap()
        );
    }
}
