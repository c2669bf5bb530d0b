//! Equivalence invariants: the Haagerup set, the minor fingerprint and the
//! Smith normal form over `Z[i]`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{canonical_associate, det_exact, GaussianInt};
use crate::error::{Error, Result};
use crate::matrix::ButsonMatrix;

/// The set of chord products `h_ij h_kl conj(h_il) conj(h_kj)`, as sorted
/// exponents mod `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HaagerupSet {
    pub q: u8,
    pub members: Vec<u8>,
}

pub fn haagerup(h: &ButsonMatrix) -> HaagerupSet {
    let (q, n) = (h.q(), h.n());
    let mut seen = [false; 4];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                // e_ij - e_kj is shared by every l
                let a = h.get(i, j) + q - h.get(k, j);
                for l in 0..n {
                    let v = a + h.get(k, l) + q - h.get(i, l);
                    seen[(v % q) as usize] = true;
                }
            }
        }
    }
    HaagerupSet {
        q,
        members: (0..q).filter(|&k| seen[k as usize]).collect(),
    }
}

/// Distribution of `|minor|^2` for every minor degree `d = 2 ..= n/2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint {
    /// `(d, [(norm_sq, multiplicity), ...])` with strictly increasing norms.
    pub per_degree: Vec<(usize, Vec<(u64, u64)>)>,
}

impl Fingerprint {
    /// Moduli rendered as in the usual presentation: `sqrt(norm_sq)` when it
    /// is an integer, `√k` otherwise.
    pub fn display_moduli(&self) -> Vec<(usize, Vec<String>)> {
        self.per_degree
            .iter()
            .map(|(d, vals)| (*d, vals.iter().map(|&(v, _)| format_modulus(v)).collect()))
            .collect()
    }
}

pub fn format_modulus(norm_sq: u64) -> String {
    let r = (norm_sq as f64).sqrt().round() as u64;
    if r * r == norm_sq {
        r.to_string()
    } else {
        format!("√{norm_sq}")
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .per_degree
            .iter()
            .map(|(_, vals)| {
                let inner: Vec<String> = vals
                    .iter()
                    .map(|&(v, m)| format!("({}, {m})", format_modulus(v)))
                    .collect();
                format!("{{{}}}", inner.join(", "))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    if k <= n {
        rec(0, n, k, &mut cur, &mut out);
    }
    out
}

/// Calls `f` with every `d x d` minor of the `n x n` Gaussian matrix `g`.
pub(crate) fn for_each_minor(
    g: &[GaussianInt],
    n: usize,
    d: usize,
    mut f: impl FnMut(GaussianInt),
) {
    let subsets = combinations(n, d);
    let mut buf = vec![GaussianInt::ZERO; d * d];
    for rows in &subsets {
        for cols in &subsets {
            for (a, &r) in rows.iter().enumerate() {
                for (b, &c) in cols.iter().enumerate() {
                    buf[a * d + b] = g[r * n + c];
                }
            }
            f(det_exact(&buf, d));
        }
    }
}

pub fn fingerprint(h: &ButsonMatrix) -> Result<Fingerprint> {
    let n = h.n();
    if n < 4 {
        return Err(Error::OrderTooSmall(n));
    }
    let g = h.to_gaussian();
    let per_degree = (2..=n / 2)
        .map(|d| {
            let mut tally: BTreeMap<u64, u64> = BTreeMap::new();
            for_each_minor(&g, n, d, |m| {
                *tally.entry(m.norm() as u64).or_default() += 1
            });
            (d, tally.into_iter().collect())
        })
        .collect();
    Ok(Fingerprint { per_degree })
}

/// Diagonal `d_1 | d_2 | ... | d_n` of the Smith normal form, each entry a
/// canonical associate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SnfDiagonal {
    pub diag: Vec<GaussianInt>,
}

impl fmt::Display for SnfDiagonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.diag.iter().map(|z| z.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

pub fn smith_normal_form(h: &ButsonMatrix) -> SnfDiagonal {
    SnfDiagonal {
        diag: snf_diagonal(h.to_gaussian(), h.n()),
    }
}

/// Smith normal form of a square matrix over `Z[i]` by repeated
/// minimum-norm pivoting and Euclidean reduction.
pub fn snf_diagonal(mut a: Vec<GaussianInt>, n: usize) -> Vec<GaussianInt> {
    assert_eq!(a.len(), n * n);
    let idx = |r: usize, c: usize| r * n + c;
    let mut diag = Vec::with_capacity(n);
    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let pivot = (t..n)
                .flat_map(|r| (t..n).map(move |c| (r, c)))
                .filter(|&(r, c)| !a[idx(r, c)].is_zero())
                .min_by_key(|&(r, c)| a[idx(r, c)].norm());
            let Some((pr, pc)) = pivot else {
                diag.resize(n, GaussianInt::ZERO);
                return diag;
            };
            if pr != t {
                for c in 0..n {
                    a.swap(idx(pr, c), idx(t, c));
                }
            }
            if pc != t {
                for r in 0..n {
                    a.swap(idx(r, pc), idx(r, t));
                }
            }
            let p = a[idx(t, t)];
            let mut clean = true;
            for r in t + 1..n {
                let (qt, rem) = a[idx(r, t)].div_rem(p);
                if !qt.is_zero() {
                    for c in t..n {
                        let v = a[idx(t, c)];
                        a[idx(r, c)] -= qt * v;
                    }
                }
                clean &= rem.is_zero();
            }
            for c in t + 1..n {
                let (qt, rem) = a[idx(t, c)].div_rem(p);
                if !qt.is_zero() {
                    for r in t..n {
                        let v = a[idx(r, t)];
                        a[idx(r, c)] -= qt * v;
                    }
                }
                clean &= rem.is_zero();
            }
            if !clean {
                continue;
            }
            // pivot must divide the whole trailing block
            let bad = (t + 1..n)
                .flat_map(|r| (t + 1..n).map(move |c| (r, c)))
                .find(|&(r, c)| !p.divides(a[idx(r, c)]));
            match bad {
                Some((r, _)) => {
                    for c in t..n {
                        let v = a[idx(r, c)];
                        a[idx(t, c)] += v;
                    }
                }
                None => {
                    diag.push(canonical_associate(p));
                    break;
                }
            }
        }
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::gaussian_gcd;

    fn g(re: i64, im: i64) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    fn h4(a: u8) -> ButsonMatrix {
        ButsonMatrix::from_rows(
            4,
            &[
                vec![0, 0, 0, 0],
                vec![0, 2, a, (a + 2) % 4],
                vec![0, 0, 2, 2],
                vec![0, 2, (a + 2) % 4, a],
            ],
        )
        .unwrap()
    }

    fn fourier2() -> ButsonMatrix {
        ButsonMatrix::from_rows(4, &[vec![0, 0], vec![0, 2]]).unwrap()
    }

    /// Brute force over all n^4 quadruples, straight from the definition.
    fn haagerup_oracle(h: &ButsonMatrix) -> Vec<u8> {
        let n = h.n();
        let q = h.q() as i32;
        let mut s = std::collections::BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = h.get(i, j) as i32 + h.get(k, l) as i32
                            - h.get(i, l) as i32
                            - h.get(k, j) as i32;
                        s.insert(v.rem_euclid(q) as u8);
                    }
                }
            }
        }
        s.into_iter().collect()
    }

    #[test]
    fn haagerup_small() {
        assert_eq!(haagerup(&h4(0)).members, vec![0, 2]);
        assert_eq!(haagerup(&h4(1)).members, vec![0, 1, 2, 3]);
        assert_eq!(haagerup(&fourier2()).members, vec![0, 2]);
        for a in 0..4 {
            assert_eq!(haagerup(&h4(a)).members, haagerup_oracle(&h4(a)));
        }
    }

    #[test]
    fn fingerprint_counts() {
        for a in [0, 1] {
            let f = fingerprint(&h4(a)).unwrap();
            assert_eq!(f.per_degree.len(), 1);
            let total: u64 = f.per_degree[0].1.iter().map(|&(_, m)| m).sum();
            assert_eq!(total, 36);
        }
        assert!(matches!(
            fingerprint(&fourier2()),
            Err(Error::OrderTooSmall(2))
        ));
    }

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(8, 4).len(), 70);
        assert_eq!(combinations(4, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn snf_small() {
        assert_eq!(smith_normal_form(&fourier2()).diag, vec![g(1, 0), g(2, 0)]);
        let one = ButsonMatrix::from_rows(4, &[vec![0]]).unwrap();
        assert_eq!(smith_normal_form(&one).diag, vec![g(1, 0)]);
        // singular input keeps trailing zeros
        assert_eq!(snf_diagonal(vec![g(2, 0); 4], 2), vec![g(2, 0), g(0, 0)]);
        // diag(2, 3) is not in normal form; gcd moves to the front
        assert_eq!(
            snf_diagonal(vec![g(2, 0), g(0, 0), g(0, 0), g(3, 0)], 2),
            vec![g(1, 0), g(6, 0)]
        );
    }

    /// The product of the first k diagonal entries is the gcd of all k x k
    /// minors (determinantal divisors), up to units.
    fn check_determinantal_divisors(h: &ButsonMatrix) {
        let n = h.n();
        let gm = h.to_gaussian();
        let diag = smith_normal_form(h).diag;
        let mut prod = GaussianInt::ONE;
        for k in 1..=n {
            prod = prod * diag[k - 1];
            let mut acc = GaussianInt::ZERO;
            for_each_minor(&gm, n, k, |m| {
                if !m.is_zero() {
                    acc = if acc.is_zero() {
                        canonical_associate(m)
                    } else {
                        gaussian_gcd(acc, m).unwrap()
                    };
                }
            });
            assert_eq!(canonical_associate(prod), acc, "k={k}");
        }
        for w in diag.windows(2) {
            assert!(w[0].divides(w[1]));
        }
    }

    #[test]
    fn snf_matches_determinantal_divisors() {
        for a in 0..4 {
            check_determinantal_divisors(&h4(a));
        }
        check_determinantal_divisors(&fourier2());
    }
}
