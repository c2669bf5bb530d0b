//! Canonical forms, equivalence testing with explicit witnesses, and
//! transpose classification.
//!
//! The canonical form of `H` is the lexicographically least row-major
//! exponent grid among all dephased matrices equivalent to `H`. A dephased
//! member of the orbit is fixed by the source row `r0` and column `c0` moved
//! to the front and by the order of the remaining rows and columns. The
//! search fixes `(r0, c0)`, then picks rows one at a time: given the rows
//! already placed, the columns form an ordered partition (columns that agree
//! on every placed row), and the best image of a candidate row sorts its
//! values inside each cell. Only rows achieving the least such image can
//! lead to the minimum, and branches are cut against the best grid found.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{fingerprint, haagerup};
use crate::matrix::{ButsonMatrix, EquivalenceWitness};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    /// The dephased orbit minimum.
    pub matrix: ButsonMatrix,
    /// Witness taking the input matrix to `matrix`.
    pub witness: EquivalenceWitness,
}

impl CanonicalForm {
    /// Row-major exponent sequence of the canonical matrix.
    pub fn key(&self) -> &[u8] {
        self.matrix.exponents()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransposeClass {
    SelfTransposeEquivalent,
    TransposePaired,
}

/// Branch-and-bound over the dephased orbit of a `k x n` exponent grid.
struct OrbitSearch<'a> {
    q: u8,
    n: usize,
    k: usize,
    src: &'a [u8],
    /// dephased grid for the current `(r0, c0)`
    d: Vec<u8>,
    best: Option<Vec<u8>>,
    best_choice: Option<(usize, usize, Vec<usize>, Vec<usize>)>,
    /// When set, stop as soon as a grid strictly below `best` is seen.
    stop_on_improvement: bool,
    improved: bool,
    cur: Vec<u8>,
    cur_rows: Vec<usize>,
    r0: usize,
    c0: usize,
}

/// Row image, source row, refined column order and its cell boundaries.
type Candidate = (Vec<u8>, usize, Vec<usize>, Vec<usize>);

impl<'a> OrbitSearch<'a> {
    fn new(q: u8, n: usize, k: usize, src: &'a [u8]) -> Self {
        Self {
            q,
            n,
            k,
            src,
            d: vec![0; k * n],
            best: None,
            best_choice: None,
            stop_on_improvement: false,
            improved: false,
            cur: Vec::with_capacity(k * n),
            cur_rows: Vec::with_capacity(k),
            r0: 0,
            c0: 0,
        }
    }

    fn run(&mut self) {
        let (q, n, k) = (self.q as u32, self.n, self.k);
        for r0 in 0..k {
            for c0 in 0..n {
                let s = self.src;
                for r in 0..k {
                    for c in 0..n {
                        let v = s[r * n + c] as u32 + 2 * q + s[r0 * n + c0] as u32
                            - s[r * n + c0] as u32
                            - s[r0 * n + c] as u32;
                        self.d[r * n + c] = (v % q) as u8;
                    }
                }
                self.r0 = r0;
                self.c0 = c0;
                self.cur.clear();
                self.cur.resize(n, 0);
                self.cur_rows.clear();
                self.cur_rows.push(r0);
                let mut order = vec![c0];
                order.extend((0..n).filter(|&c| c != c0));
                let bounds = if n > 1 { vec![0, 1, n] } else { vec![0, 1] };
                let left: Vec<usize> = (0..k).filter(|&r| r != r0).collect();
                self.descend(&order, &bounds, &left);
                if self.improved && self.stop_on_improvement {
                    return;
                }
            }
        }
    }

    /// Refines the column partition by the values of row `r`.
    fn refine(&self, r: usize, order: &[usize], bounds: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let row = &self.d[r * self.n..(r + 1) * self.n];
        let mut new_order = order.to_vec();
        let mut new_bounds = vec![0];
        for w in bounds.windows(2) {
            let cell = &mut new_order[w[0]..w[1]];
            cell.sort_by_key(|&c| (row[c], c));
            for i in w[0] + 1..w[1] {
                if row[new_order[i]] != row[new_order[i - 1]] {
                    new_bounds.push(i);
                }
            }
            new_bounds.push(w[1]);
        }
        (new_order, new_bounds)
    }

    fn descend(&mut self, order: &[usize], bounds: &[usize], left: &[usize]) {
        let n = self.n;
        let level = self.cur_rows.len();
        if level == self.k {
            let better = match &self.best {
                None => true,
                Some(b) => self.cur.as_slice() < b.as_slice(),
            };
            if better {
                if self.best.is_some() {
                    self.improved = true;
                }
                self.best = Some(self.cur.clone());
                self.best_choice = Some((self.r0, self.c0, self.cur_rows.clone(), order.to_vec()));
            }
            return;
        }
        // image of every remaining row under its best column arrangement
        let mut cands: Vec<Candidate> = Vec::with_capacity(left.len());
        let mut min_img: Option<Vec<u8>> = None;
        for &r in left {
            let (o, b) = self.refine(r, order, bounds);
            let img: Vec<u8> = o.iter().map(|&c| self.d[r * n + c]).collect();
            match min_img.as_ref().map(|m| img.as_slice().cmp(m)) {
                Some(Ordering::Greater) => continue,
                Some(Ordering::Less) | None => {
                    cands.clear();
                    min_img = Some(img.clone());
                }
                Some(Ordering::Equal) => {}
            }
            cands.push((img, r, o, b));
        }
        let min_img = min_img.expect("at least one row remains");
        if let Some(best) = &self.best {
            let prefix = level * n;
            if self.cur[..prefix] == best[..prefix] {
                match min_img.as_slice().cmp(&best[prefix..prefix + n]) {
                    Ordering::Greater => return,
                    Ordering::Less if self.stop_on_improvement => {
                        self.improved = true;
                        return;
                    }
                    _ => {}
                }
            }
        }
        for (img, r, o, b) in cands {
            self.cur.extend_from_slice(&img);
            self.cur_rows.push(r);
            let rest: Vec<usize> = left.iter().copied().filter(|&x| x != r).collect();
            self.descend(&o, &b, &rest);
            self.cur_rows.pop();
            self.cur.truncate(level * n);
            if self.improved && self.stop_on_improvement {
                return;
            }
        }
    }
}

/// Orbit-minimum dephased form of `h`, with a witness reaching it.
pub fn canonical_form(h: &ButsonMatrix) -> CanonicalForm {
    let (q, n) = (h.q(), h.n());
    let mut s = OrbitSearch::new(q, n, n, h.exponents());
    s.run();
    let key = s.best.expect("search visits at least one leaf");
    let (r0, c0, rows, cols) = s.best_choice.expect("leaf recorded");
    let base = h.dephasing_witness(r0, c0);
    let witness = EquivalenceWitness {
        row_perm: rows,
        col_perm: cols,
        ..base
    };
    let matrix = ButsonMatrix::from_trusted(q, n, key);
    debug_assert_eq!(h.apply_unchecked(&witness), matrix);
    CanonicalForm { matrix, witness }
}

/// True when the dephased `k x n` grid `rows` is the least member of its
/// orbit under row and column permutations and phase changes.
///
/// The first row and first column of `rows` are expected to be zero.
pub(crate) fn is_canonical_partial(q: u8, n: usize, rows: &[u8]) -> bool {
    let k = rows.len() / n;
    let mut s = OrbitSearch::new(q, n, k, rows);
    s.best = Some(rows.to_vec());
    s.stop_on_improvement = true;
    s.run();
    !s.improved
}

/// Searches for `w` with `apply_witness(h, w) == k`.
///
/// Haagerup sets and fingerprints are compared first; a mismatch proves
/// inequivalence. Otherwise every choice of leading row and column of `h`
/// is tried, and rows of `h` are assigned to the rows of the dephased `k`
/// one by one while the multisets of partial columns still agree.
pub fn are_equivalent(h: &ButsonMatrix, k: &ButsonMatrix) -> Result<Option<EquivalenceWitness>> {
    if h.q() != k.q() || h.n() != k.n() {
        return Err(Error::Dimension(format!(
            "cannot compare BH({}, {}) with BH({}, {})",
            h.q(),
            h.n(),
            k.q(),
            k.n()
        )));
    }
    if haagerup(h) != haagerup(k) {
        return Ok(None);
    }
    if h.n() >= 4 && fingerprint(h)? != fingerprint(k)? {
        return Ok(None);
    }
    Ok(search_equivalence(h, k))
}

/// The backtracking search alone, without invariant pre-filtering.
pub fn search_equivalence(h: &ButsonMatrix, k: &ButsonMatrix) -> Option<EquivalenceWitness> {
    let n = h.n();
    let to_k = k.dephasing_witness(0, 0);
    let target = k.apply_unchecked(&to_k);
    let back = to_k.inverse();
    for r0 in 0..n {
        for c0 in 0..n {
            let d = h.dephase_at(r0, c0);
            let mut m = Matcher {
                n,
                d: d.exponents(),
                t: target.exponents(),
                sigma: vec![r0],
                used: vec![false; n],
            };
            m.used[r0] = true;
            let mut col_t = vec![1usize; n];
            col_t[0] = 0;
            let mut col_d = vec![1usize; n];
            col_d[c0] = 0;
            if n == 1 {
                col_t = vec![0];
                col_d = vec![0];
            }
            if let Some(tau) = m.extend(&col_t, &col_d) {
                let base = h.dephasing_witness(r0, c0);
                let w = EquivalenceWitness {
                    row_perm: m.sigma.clone(),
                    col_perm: tau,
                    ..base
                };
                debug_assert_eq!(&h.apply_unchecked(&w), &target);
                let w = w.then(&back);
                debug_assert!(verify_witness(h, k, &w));
                return Some(w);
            }
        }
    }
    None
}

struct Matcher<'a> {
    n: usize,
    d: &'a [u8],
    t: &'a [u8],
    sigma: Vec<usize>,
    used: Vec<bool>,
}

impl Matcher<'_> {
    /// `col_t[j]` and `col_d[c]` are cell labels: target column `j` may map
    /// to source column `c` only when the labels agree.
    fn extend(&mut self, col_t: &[usize], col_d: &[usize]) -> Option<Vec<usize>> {
        let n = self.n;
        let i = self.sigma.len();
        if i == n {
            let mut tau = vec![usize::MAX; n];
            for j in 0..n {
                tau[j] = (0..n).find(|&c| col_d[c] == col_t[j])?;
            }
            return Some(tau);
        }
        let trow = &self.t[i * n..(i + 1) * n];
        for r in 0..n {
            if self.used[r] {
                continue;
            }
            let drow = &self.d[r * n..(r + 1) * n];
            if let Some((nt, nd)) = refine_pair(col_t, col_d, trow, drow) {
                self.used[r] = true;
                self.sigma.push(r);
                if let Some(tau) = self.extend(&nt, &nd) {
                    return Some(tau);
                }
                self.sigma.pop();
                self.used[r] = false;
            }
        }
        None
    }
}

/// Splits cells by the new row values; fails when some refined cell has
/// different sizes on the two sides. Labels are kept dense in `0..n`.
fn refine_pair(
    col_t: &[usize],
    col_d: &[usize],
    trow: &[u8],
    drow: &[u8],
) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = col_t.len();
    let lt: Vec<usize> = (0..n).map(|j| col_t[j] * 4 + trow[j] as usize).collect();
    let ld: Vec<usize> = (0..n).map(|c| col_d[c] * 4 + drow[c] as usize).collect();
    let mut st = lt.clone();
    st.sort_unstable();
    let mut sd = ld.clone();
    sd.sort_unstable();
    if st != sd {
        return None;
    }
    st.dedup();
    let dense = |l: &usize| st.binary_search(l).expect("label present");
    Some((
        lt.iter().map(dense).collect(),
        ld.iter().map(dense).collect(),
    ))
}

/// True iff `apply_witness(h, w)` equals `k` entrywise.
pub fn verify_witness(h: &ButsonMatrix, k: &ButsonMatrix, w: &EquivalenceWitness) -> bool {
    h.n() == k.n()
        && h.q() == k.q()
        && w.validate(h.q(), h.n()).is_ok()
        && &h.apply_unchecked(w) == k
}

pub fn transpose_class(h: &ButsonMatrix) -> TransposeClass {
    match are_equivalent(h, &h.transpose()).expect("same dimensions") {
        Some(_) => TransposeClass::SelfTransposeEquivalent,
        None => TransposeClass::TransposePaired,
    }
}
