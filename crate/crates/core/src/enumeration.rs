//! Exhaustive generation of dephased `BH(q, n)` matrices and their
//! classification into equivalence classes.
//!
//! Rows of a dephased matrix are drawn from the vectors with leading
//! exponent 0 that are orthogonal to the all-ones row. Two such rows are
//! adjacent when they are orthogonal, so a dephased matrix is a clique of
//! size `n - 1` in this graph, and the search extends cliques through
//! intersections of neighbour bitsets.
//!
//! Isomorph rejection is orderly: every prefix of a canonical matrix is
//! itself canonical among partial matrices with the same number of rows, so
//! a partial matrix is extended only while it is its own partial canonical
//! form. The leaves are then exactly the canonical forms, one per class.
//! The safe mode keeps only cheap necessary conditions (increasing rows,
//! lexicographically ordered columns) and deduplicates the leaves by their
//! full canonical form.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equivalence::{are_equivalent, canonical_form, is_canonical_partial, TransposeClass};
use crate::error::{Error, Result};
use crate::invariants::{
    fingerprint, haagerup, smith_normal_form, Fingerprint, HaagerupSet, SnfDiagonal,
};
use crate::matrix::{row_inner, ButsonMatrix};

pub const MAX_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GenerationMode {
    /// Orderly generation with partial canonicity tests.
    #[default]
    Pruned,
    /// Weak pruning followed by deduplication on canonical forms.
    Safe,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilyTag {
    pub family: String,
    /// Parameter exponents of `i` (or of the primitive `q`-th root).
    pub params: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRecord {
    pub id: u32,
    /// Canonical form of the class.
    pub representative: ButsonMatrix,
    pub haagerup: HaagerupSet,
    /// `None` for orders below 4.
    pub fingerprint: Option<Fingerprint>,
    pub snf: SnfDiagonal,
    pub transpose_class: TransposeClass,
    pub transpose_partner: Option<u32>,
    pub family_tags: Vec<FamilyTag>,
}

fn check_search(q: u8, n: usize) -> Result<()> {
    crate::arith::check_order(q)?;
    let err = |reason: &str| Error::UnsupportedSearch {
        q,
        n,
        reason: reason.into(),
    };
    if n == 0 || n > MAX_ORDER {
        return Err(err("order must lie in 1..=8"));
    }
    if n > 1 && n % 2 == 1 {
        return Err(err("orders above 1 must be even"));
    }
    if q == 1 && n > 1 {
        return Err(err("q=1 admits only n=1"));
    }
    Ok(())
}

/// Candidate non-leading rows: leading exponent 0 and orthogonal to the
/// all-zero row, in lexicographic order.
fn candidate_rows(q: u8, n: usize) -> Vec<Vec<u8>> {
    let zero = vec![0u8; n];
    let total = (q as usize).pow(n as u32 - 1);
    (0..total)
        .map(|mut x| {
            let mut row = vec![0u8; n];
            for c in (1..n).rev() {
                row[c] = (x % q as usize) as u8;
                x /= q as usize;
            }
            row
        })
        .filter(|row| row_inner(q, row, &zero).is_zero())
        .collect()
}

#[derive(Clone)]
struct Bitset(Vec<u64>);

impl Bitset {
    fn new(len: usize) -> Self {
        Self(vec![0; len.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Self) -> Self {
        Self(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

struct RowGraph {
    q: u8,
    n: usize,
    rows: Vec<Vec<u8>>,
    /// `later[i]`: rows `j > i` orthogonal to row `i`.
    later: Vec<Bitset>,
}

impl RowGraph {
    fn new(q: u8, n: usize) -> Self {
        let rows = candidate_rows(q, n);
        let m = rows.len();
        let later = (0..m)
            .into_par_iter()
            .map(|i| {
                let mut b = Bitset::new(m);
                for j in i + 1..m {
                    if row_inner(q, &rows[i], &rows[j]).is_zero() {
                        b.set(j);
                    }
                }
                b
            })
            .collect();
        Self { q, n, rows, later }
    }
}

/// Search state below a fixed prefix of rows.
struct Extender<'a> {
    g: &'a RowGraph,
    mode: GenerationMode,
    grid: Vec<u8>,
    out: Vec<Vec<u8>>,
    nodes: u64,
}

impl Extender<'_> {
    /// `ties[c]`: columns `c` and `c + 1` agree on every placed row.
    fn extend(&mut self, cands: &Bitset, ties: &[bool]) {
        let n = self.g.n;
        let placed = self.grid.len() / n;
        if placed == n {
            self.out.push(self.grid.clone());
            return;
        }
        if cands.count() < n - placed {
            return;
        }
        for idx in cands.iter() {
            let next = cands.and(&self.g.later[idx]);
            self.place(idx, &next, ties);
        }
    }

    /// Appends candidate row `idx`, recursing with `next` as the rows still
    /// compatible with every placed row.
    fn place(&mut self, idx: usize, next: &Bitset, ties: &[bool]) {
        let n = self.g.n;
        let placed = self.grid.len() / n;
        let row = &self.g.rows[idx];
        // columns 1.. stay in lexicographic order
        if (1..n - 1).any(|c| ties[c] && row[c] > row[c + 1]) {
            return;
        }
        self.grid.extend_from_slice(row);
        self.nodes += 1;
        let keep = match self.mode {
            GenerationMode::Pruned => is_canonical_partial(self.g.q, n, &self.grid),
            GenerationMode::Safe => true,
        };
        if keep {
            let new_ties: Vec<bool> = (0..n)
                .map(|c| c + 1 < n && ties[c] && row[c] == row[c + 1])
                .collect();
            self.extend(next, &new_ties);
        }
        self.grid.truncate(placed * n);
    }
}

/// Dephased matrices covering every equivalence class of `BH(q, n)`.
///
/// In pruned mode the result holds exactly one canonical form per class;
/// in safe mode it holds every leaf of the weakly pruned search.
pub fn generate_dephased(q: u8, n: usize, mode: GenerationMode) -> Result<Vec<ButsonMatrix>> {
    check_search(q, n)?;
    if n == 1 {
        return Ok(vec![ButsonMatrix::from_trusted(q, 1, vec![0])]);
    }
    let g = RowGraph::new(q, n);
    log::info!(
        "BH({q},{n}): {} candidate rows, {mode:?} search",
        g.rows.len()
    );
    let mut ties = vec![true; n];
    ties[n - 1] = false;
    // one work unit per choice of the second row
    let chunks: Vec<(Vec<Vec<u8>>, u64)> = (0..g.rows.len())
        .into_par_iter()
        .map(|first| {
            let mut ex = Extender {
                g: &g,
                mode,
                grid: vec![0; n],
                out: Vec::new(),
                nodes: 0,
            };
            ex.place(first, &g.later[first], &ties);
            (ex.out, ex.nodes)
        })
        .collect();
    let nodes: u64 = chunks.iter().map(|c| c.1).sum();
    let grids: Vec<Vec<u8>> = chunks.into_iter().flat_map(|c| c.0).collect();
    log::info!(
        "BH({q},{n}): {} leaves from {nodes} search nodes",
        grids.len()
    );
    Ok(grids
        .into_iter()
        .map(|e| ButsonMatrix::from_trusted(q, n, e))
        .collect())
}

/// Attaches invariants and transpose partners to one canonical
/// representative per class. Ids follow the lexicographic order of the
/// canonical keys, starting at 1.
fn build_records(mut reps: Vec<ButsonMatrix>) -> Vec<ClassRecord> {
    reps.sort_by(|a, b| a.exponents().cmp(b.exponents()));
    reps.dedup();
    let keys: Vec<&[u8]> = reps.iter().map(ButsonMatrix::exponents).collect();
    reps.par_iter()
        .enumerate()
        .map(|(i, rep)| {
            let t = canonical_form(&rep.transpose());
            let partner =
                keys.binary_search(&t.key())
                    .expect("transpose of a catalogued class is catalogued") as u32
                    + 1;
            let id = i as u32 + 1;
            ClassRecord {
                id,
                representative: rep.clone(),
                haagerup: haagerup(rep),
                fingerprint: fingerprint(rep).ok(),
                snf: smith_normal_form(rep),
                transpose_class: if partner == id {
                    TransposeClass::SelfTransposeEquivalent
                } else {
                    TransposeClass::TransposePaired
                },
                transpose_partner: (partner != id).then_some(partner),
                family_tags: Vec::new(),
            }
        })
        .collect()
}

/// Classifies `BH(q, n)` up to equivalence.
pub fn classify(q: u8, n: usize, mode: GenerationMode) -> Result<Vec<ClassRecord>> {
    let generated = generate_dephased(q, n, mode)?;
    let reps: Vec<ButsonMatrix> = match mode {
        GenerationMode::Pruned => generated,
        GenerationMode::Safe => {
            let keys: BTreeSet<Vec<u8>> = generated
                .par_iter()
                .map(|m| canonical_form(m).key().to_vec())
                .collect();
            keys.into_iter()
                .map(|k| ButsonMatrix::from_trusted(q, n, k))
                .collect()
        }
    };
    Ok(build_records(reps))
}

/// Independent oracle for small orders: scans every dephased grid and
/// groups the Hadamard ones by pairwise equivalence tests.
pub fn brute_force_classify(q: u8, n: usize) -> Result<Vec<ClassRecord>> {
    check_search(q, n)?;
    if n > 4 {
        return Err(Error::UnsupportedSearch {
            q,
            n,
            reason: "brute force is limited to n <= 4".into(),
        });
    }
    let free = (n - 1) * (n - 1);
    let total = (q as usize).pow(free as u32);
    let mut reps: Vec<ButsonMatrix> = Vec::new();
    for mut x in 0..total {
        let mut e = vec![0u8; n * n];
        for r in 1..n {
            for c in 1..n {
                e[r * n + c] = (x % q as usize) as u8;
                x /= q as usize;
            }
        }
        let Ok(h) = ButsonMatrix::from_exponents(q, n, e) else {
            continue;
        };
        let mut known = false;
        for r in &reps {
            if are_equivalent(r, &h)?.is_some() {
                known = true;
                break;
            }
        }
        if !known {
            reps.push(h);
        }
    }
    // ids come from canonical keys; transpose pairing from direct
    // equivalence tests between the oracle's own representatives
    let canon: Vec<Vec<u8>> = reps
        .iter()
        .map(|r| canonical_form(r).key().to_vec())
        .collect();
    let mut sorted = canon.clone();
    sorted.sort();
    let id_of = |i: usize| sorted.binary_search(&canon[i]).expect("present") as u32 + 1;
    let mut records = Vec::with_capacity(reps.len());
    for (i, rep) in reps.iter().enumerate() {
        let t = rep.transpose();
        let j = reps
            .iter()
            .position(|r| matches!(are_equivalent(r, &t), Ok(Some(_))))
            .expect("transpose of a Hadamard matrix lies in some scanned class");
        let (id, pid) = (id_of(i), id_of(j));
        let representative = ButsonMatrix::from_trusted(q, n, canon[i].clone());
        records.push(ClassRecord {
            id,
            haagerup: haagerup(rep),
            fingerprint: fingerprint(rep).ok(),
            snf: smith_normal_form(rep),
            transpose_class: if i == j {
                TransposeClass::SelfTransposeEquivalent
            } else {
                TransposeClass::TransposePaired
            },
            transpose_partner: (i != j).then_some(pid),
            family_tags: Vec::new(),
            representative,
        });
    }
    records.sort_by_key(|r| r.id);
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidate_row_counts() {
        assert_eq!(candidate_rows(4, 8).len(), 1225);
        assert_eq!(candidate_rows(4, 6).len(), 100);
        assert_eq!(candidate_rows(4, 2).len(), 1);
        assert_eq!(candidate_rows(2, 4).len(), 3);
    }

    #[test]
    fn unsupported_parameters() {
        assert!(generate_dephased(4, 3, GenerationMode::Pruned).is_err());
        assert!(generate_dephased(4, 10, GenerationMode::Pruned).is_err());
        assert!(generate_dephased(1, 2, GenerationMode::Pruned).is_err());
        assert!(generate_dephased(3, 2, GenerationMode::Pruned).is_err());
        assert!(brute_force_classify(4, 6).is_err());
    }

    #[test]
    fn small_counts() {
        for (q, n, want) in [
            (4, 1, 1),
            (4, 2, 1),
            (4, 4, 2),
            (2, 2, 1),
            (2, 4, 1),
            (2, 6, 0),
            (1, 1, 1),
        ] {
            for mode in [GenerationMode::Pruned, GenerationMode::Safe] {
                let recs = classify(q, n, mode).unwrap();
                assert_eq!(recs.len(), want, "q={q} n={n} {mode:?}");
            }
        }
    }

    #[test]
    fn pruned_stream_is_canonical() {
        let gen = generate_dephased(4, 4, GenerationMode::Pruned).unwrap();
        assert_eq!(gen.len(), 2);
        for m in gen {
            assert_eq!(canonical_form(&m).matrix, m);
        }
    }

    #[test]
    fn bitset_iteration() {
        let mut b = Bitset::new(130);
        for i in [0, 63, 64, 129] {
            b.set(i);
        }
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(b.count(), 4);
    }
}
