//! Butson matrices as grids of root-of-unity exponents, the monomial
//! transforms acting on them, and the `.bhm` text format.

use std::fmt;

use crate::arith::{check_order, unit_from_exponent, GaussianInt, PhaseExponent};
use crate::error::{Error, Result};

/// A complex Hadamard matrix whose entries are `q`-th roots of unity.
///
/// Entry `(j, k)` stands for `zeta_q^e[j][k]`. Construction checks that all
/// pairs of distinct rows are orthogonal, so every value of this type
/// satisfies `H H* = n I` exactly.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ButsonMatrix {
    q: u8,
    n: usize,
    e: Vec<u8>,
}

/// Row inner product `sum_m zeta^(a_m - b_m)` in `Z[i]`.
pub(crate) fn row_inner(q: u8, a: &[u8], b: &[u8]) -> GaussianInt {
    let mut counts = [0i64; 4];
    for (&x, &y) in a.iter().zip(b) {
        counts[((x + q - y) % q) as usize] += 1;
    }
    let mut sum = GaussianInt::ZERO;
    for (k, &c) in counts.iter().enumerate().take(q as usize) {
        let u = unit_from_exponent(k as u8, q);
        sum += GaussianInt::new(u.re * c, u.im * c);
    }
    sum
}

fn check_rows_orthogonal(q: u8, n: usize, e: &[u8]) -> Result<()> {
    for i in 0..n {
        for j in i + 1..n {
            let ip = row_inner(q, &e[i * n..(i + 1) * n], &e[j * n..(j + 1) * n]);
            if !ip.is_zero() {
                return Err(Error::NotHadamard(i + 1, j + 1, ip));
            }
        }
    }
    Ok(())
}

impl ButsonMatrix {
    /// Validates a row-major exponent grid. Exponents must already lie in
    /// `[0, q)`.
    pub fn from_exponents(q: u8, n: usize, e: Vec<u8>) -> Result<Self> {
        check_order(q)?;
        if n == 0 {
            return Err(Error::Dimension("matrix order must be positive".into()));
        }
        if e.len() != n * n {
            return Err(Error::Dimension(format!(
                "expected {} exponents for n={n}, got {}",
                n * n,
                e.len()
            )));
        }
        if let Some(pos) = e.iter().position(|&x| x >= q) {
            return Err(Error::Domain(format!(
                "exponent {} at ({}, {}) is not reduced mod {q}",
                e[pos],
                pos / n + 1,
                pos % n + 1
            )));
        }
        check_rows_orthogonal(q, n, &e)?;
        Ok(Self { q, n, e })
    }

    pub fn from_rows(q: u8, rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("grid is not square".into()));
        }
        Self::from_exponents(q, n, rows.concat())
    }

    /// Skips validation; callers guarantee orthogonality.
    pub(crate) fn from_trusted(q: u8, n: usize, e: Vec<u8>) -> Self {
        debug_assert!(check_rows_orthogonal(q, n, &e).is_ok());
        Self { q, n, e }
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row-major exponents.
    pub fn exponents(&self) -> &[u8] {
        &self.e
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.e[r * self.n + c]
    }

    pub fn phase(&self, r: usize, c: usize) -> PhaseExponent {
        PhaseExponent::new(self.get(r, c) as i64, self.q).expect("modulus validated")
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.e[r * self.n..(r + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.e.chunks(self.n).map(<[u8]>::to_vec).collect()
    }

    pub fn to_gaussian(&self) -> Vec<GaussianInt> {
        self.e
            .iter()
            .map(|&k| unit_from_exponent(k, self.q))
            .collect()
    }

    /// Re-runs the orthogonality check on rows and columns.
    pub fn verify(&self) -> Result<()> {
        check_rows_orthogonal(self.q, self.n, &self.e)?;
        check_rows_orthogonal(self.q, self.n, &self.transpose().e)
    }

    pub fn is_dephased(&self) -> bool {
        self.row(0).iter().all(|&x| x == 0) && (0..self.n).all(|r| self.get(r, 0) == 0)
    }

    /// Scales rows and columns so that the first row and column are all
    /// ones; entry `(j, k)` becomes `e[j][k] - e[j][0] - e[0][k] + e[0][0]`.
    pub fn dephase(&self) -> Self {
        self.dephase_at(0, 0)
    }

    pub(crate) fn dephase_at(&self, r0: usize, c0: usize) -> Self {
        let (q, n) = (self.q, self.n);
        let mut e = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let v = self.get(r, c) as u32 + 2 * q as u32 + self.get(r0, c0) as u32
                    - self.get(r, c0) as u32
                    - self.get(r0, c) as u32;
                e.push((v % q as u32) as u8);
            }
        }
        Self { q, n, e }
    }

    /// Witness taking `self` to `self.dephase_at(r0, c0)` with rows `r0`
    /// and columns `c0` moved to the front.
    pub(crate) fn dephasing_witness(&self, r0: usize, c0: usize) -> EquivalenceWitness {
        let (q, n) = (self.q, self.n);
        let mut row_perm: Vec<usize> = vec![r0];
        row_perm.extend((0..n).filter(|&r| r != r0));
        let mut col_perm: Vec<usize> = vec![c0];
        col_perm.extend((0..n).filter(|&c| c != c0));
        EquivalenceWitness {
            q,
            row_phases: (0..n).map(|r| (q - self.get(r, c0)) % q).collect(),
            col_phases: (0..n)
                .map(|c| (q + self.get(r0, c0) - self.get(r0, c)) % q)
                .collect(),
            row_perm,
            col_perm,
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let e = (0..n * n).map(|i| self.e[(i % n) * n + i / n]).collect();
        Self { q: self.q, n, e }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|j| (0..j).all(|k| self.get(j, k) == self.get(k, j)))
    }

    /// Computes `P1 D1 H D2 P2` for the transform described by `w`.
    pub fn apply_witness(&self, w: &EquivalenceWitness) -> Result<Self> {
        w.validate(self.q, self.n)?;
        let out = self.apply_unchecked(w);
        check_rows_orthogonal(out.q, out.n, &out.e)?;
        Ok(out)
    }

    pub(crate) fn apply_unchecked(&self, w: &EquivalenceWitness) -> Self {
        let (q, n) = (self.q, self.n);
        let mut e = Vec::with_capacity(n * n);
        for &r in &w.row_perm {
            for &c in &w.col_perm {
                e.push((self.get(r, c) + w.row_phases[r] + w.col_phases[c]) % q);
            }
        }
        Self { q, n, e }
    }

    /// Smallest `q'` dividing `q` such that the dephased matrix has all its
    /// entries among the `q'`-th roots of unity.
    pub fn recognize_butson_order(&self) -> u8 {
        let d = self.dephase();
        let g = d.e.iter().fold(self.q as u32, |g, &k| gcd(g, k as u32));
        (self.q as u32 / g) as u8
    }

    /// Re-expresses the matrix over a larger root order `q2` (a multiple of `q`).
    pub fn lift(&self, q2: u8) -> Result<Self> {
        check_order(q2)?;
        if !q2.is_multiple_of(self.q) {
            return Err(Error::Domain(format!(
                "cannot lift from q={} to q={q2}",
                self.q
            )));
        }
        let f = q2 / self.q;
        Ok(Self {
            q: q2,
            n: self.n,
            e: self.e.iter().map(|&k| k * f).collect(),
        })
    }

    /// Reduces the root order to `recognize_butson_order` when the matrix is
    /// already dephased and all entries lie in the smaller subgroup.
    pub fn reduce_order(&self) -> Option<Self> {
        let q2 = self.recognize_butson_order();
        if !self.is_dephased() {
            return None;
        }
        let f = self.q / q2;
        Some(Self {
            q: q2,
            n: self.n,
            e: self.e.iter().map(|&k| k / f).collect(),
        })
    }

    /// Parses the `.bhm` text format.
    pub fn parse_bhm(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing `q n` header".into(),
        })?;
        let nums = parse_ints(hl, header)?;
        let [q, n] = nums[..] else {
            return Err(Error::Parse {
                line: hl,
                msg: "header must be `q n`".into(),
            });
        };
        let q = u8::try_from(q).map_err(|_| Error::UnsupportedOrder(u8::MAX))?;
        check_order(q)?;
        let n = usize::try_from(n)
            .ok()
            .filter(|&n| n > 0)
            .ok_or(Error::Parse {
                line: hl,
                msg: format!("invalid order {n}"),
            })?;
        let mut e = Vec::with_capacity(n * n);
        let mut rows = 0;
        for (ln, line) in lines {
            if rows == n {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("more than {n} rows"),
                });
            }
            let vals = parse_ints(ln, line)?;
            if vals.len() != n {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("expected {n} exponents, found {}", vals.len()),
                });
            }
            for v in vals {
                if !(0..q as i64).contains(&v) {
                    return Err(Error::Parse {
                        line: ln,
                        msg: format!("exponent {v} outside [0, {q})"),
                    });
                }
                e.push(v as u8);
            }
            rows += 1;
        }
        if rows != n {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: format!("expected {n} rows, found {rows}"),
            });
        }
        Self::from_exponents(q, n, e)
    }

    pub fn to_bhm(&self) -> String {
        let mut s = format!("{} {}\n", self.q, self.n);
        for row in self.e.chunks(self.n) {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

fn parse_ints(line: usize, s: &str) -> Result<Vec<i64>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<i64>().map_err(|_| Error::Parse {
                line,
                msg: format!("not an integer: {t:?}"),
            })
        })
        .collect()
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Debug for ButsonMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BH({}, {})", self.q, self.n)?;
        for row in self.e.chunks(self.n) {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl fmt::Display for ButsonMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bhm())
    }
}

/// A monomial transform `(P1, D1, D2, P2)` acting as `K = P1 D1 H D2 P2`.
///
/// Concretely `K[i][j] = H[row_perm[i]][col_perm[j]] + row_phases[row_perm[i]] +
/// col_phases[col_perm[j]]` in exponents mod `q`: the phases are indexed by
/// rows and columns of the source matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EquivalenceWitness {
    pub q: u8,
    pub row_perm: Vec<usize>,
    pub row_phases: Vec<u8>,
    pub col_phases: Vec<u8>,
    pub col_perm: Vec<usize>,
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter()
        .all(|&x| x < seen.len() && !std::mem::replace(&mut seen[x], true))
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

impl EquivalenceWitness {
    pub fn identity(q: u8, n: usize) -> Self {
        Self {
            q,
            row_perm: (0..n).collect(),
            row_phases: vec![0; n],
            col_phases: vec![0; n],
            col_perm: (0..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.row_perm.len()
    }

    pub fn validate(&self, q: u8, n: usize) -> Result<()> {
        if self.q != q {
            return Err(Error::Dimension(format!(
                "witness modulus {} does not match matrix modulus {q}",
                self.q
            )));
        }
        let lens = [
            self.row_perm.len(),
            self.row_phases.len(),
            self.col_phases.len(),
            self.col_perm.len(),
        ];
        if lens.iter().any(|&l| l != n) {
            return Err(Error::Dimension(format!(
                "witness sizes {lens:?} do not match n={n}"
            )));
        }
        if !is_permutation(&self.row_perm) || !is_permutation(&self.col_perm) {
            return Err(Error::Domain("witness contains a non-permutation".into()));
        }
        if self
            .row_phases
            .iter()
            .chain(&self.col_phases)
            .any(|&k| k >= q)
        {
            return Err(Error::Domain(format!("witness phase not reduced mod {q}")));
        }
        Ok(())
    }

    /// The transform `K -> H` undoing `self`.
    pub fn inverse(&self) -> Self {
        let q = self.q;
        Self {
            q,
            row_phases: self
                .row_perm
                .iter()
                .map(|&r| (q - self.row_phases[r]) % q)
                .collect(),
            col_phases: self
                .col_perm
                .iter()
                .map(|&c| (q - self.col_phases[c]) % q)
                .collect(),
            row_perm: invert(&self.row_perm),
            col_perm: invert(&self.col_perm),
        }
    }

    /// Applying `self` and then `next` equals applying the result.
    pub fn then(&self, next: &Self) -> Self {
        let q = self.q;
        let rinv = invert(&self.row_perm);
        let cinv = invert(&self.col_perm);
        Self {
            q,
            row_perm: next.row_perm.iter().map(|&i| self.row_perm[i]).collect(),
            col_perm: next.col_perm.iter().map(|&j| self.col_perm[j]).collect(),
            row_phases: (0..self.n())
                .map(|r| (self.row_phases[r] + next.row_phases[rinv[r]]) % q)
                .collect(),
            col_phases: (0..self.n())
                .map(|c| (self.col_phases[c] + next.col_phases[cinv[c]]) % q)
                .collect(),
        }
    }
}

impl fmt::Display for EquivalenceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_based = |p: &[usize]| {
            p.iter()
                .map(|x| (x + 1).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let phases = |p: &[u8]| p.iter().map(u8::to_string).collect::<Vec<_>>().join(" ");
        writeln!(f, "row permutation: {}", one_based(&self.row_perm))?;
        writeln!(f, "row phases:      {}", phases(&self.row_phases))?;
        writeln!(f, "column phases:   {}", phases(&self.col_phases))?;
        write!(f, "column permutation: {}", one_based(&self.col_perm))
    }
}
