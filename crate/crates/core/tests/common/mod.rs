#![allow(dead_code)]

use bh_core::{ButsonMatrix, EquivalenceWitness};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_witness(rng: &mut impl Rng, q: u8, n: usize) -> EquivalenceWitness {
    let mut row_perm: Vec<usize> = (0..n).collect();
    let mut col_perm: Vec<usize> = (0..n).collect();
    row_perm.shuffle(rng);
    col_perm.shuffle(rng);
    EquivalenceWitness {
        q,
        row_perm,
        row_phases: (0..n).map(|_| rng.gen_range(0..q)).collect(),
        col_phases: (0..n).map(|_| rng.gen_range(0..q)).collect(),
        col_perm,
    }
}

/// Every dephased BH(q,n) by exhaustive scan of the free (n-1)x(n-1) block.
pub fn all_dephased(q: u8, n: usize) -> Vec<ButsonMatrix> {
    let free = (n - 1) * (n - 1);
    let total = (q as usize).pow(free as u32);
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut e = vec![0u8; n * n];
        for r in 1..n {
            for c in 1..n {
                e[r * n + c] = (code % q as usize) as u8;
                code /= q as usize;
            }
        }
        if let Ok(h) = ButsonMatrix::from_exponents(q, n, e) {
            out.push(h);
        }
    }
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    heap(n, &mut p, &mut out);
    out
}

fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(p.clone());
        return;
    }
    for i in 0..k - 1 {
        heap(k - 1, p, out);
        if k.is_multiple_of(2) {
            p.swap(i, k - 1);
        } else {
            p.swap(0, k - 1);
        }
    }
    heap(k - 1, p, out);
}

/// Full monomial-group search: every row and column permutation and every row
/// phase vector, with the column phases forced by the first target row.
pub fn brute_equivalent(h: &ButsonMatrix, k: &ButsonMatrix) -> bool {
    let (q, n) = (h.q(), h.n());
    let perms = permutations(n);
    let phase_vectors = (q as usize).pow(n as u32);
    for rp in &perms {
        for cp in &perms {
            for mut code in 0..phase_vectors {
                let mut rph = vec![0u8; n];
                for x in rph.iter_mut() {
                    *x = (code % q as usize) as u8;
                    code /= q as usize;
                }
                let cph: Vec<u8> = (0..n)
                    .map(|j| (k.get(0, j) + 2 * q - h.get(rp[0], cp[j]) - rph[rp[0]]) % q)
                    .collect();
                let ok = (0..n).all(|i| {
                    (0..n).all(|j| (h.get(rp[i], cp[j]) + rph[rp[i]] + cph[j]) % q == k.get(i, j))
                });
                if ok {
                    return true;
                }
            }
        }
    }
    false
}
