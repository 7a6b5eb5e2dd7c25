//! Reference implementations that share no code with the library: GF(2)
//! subspaces as explicit sets of bitmask vectors, and tensor rank by
//! breadth-first search over sums of rank-one tensors.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use dimspread::families::MapFamily;
use dimspread::tensor::Tensor3;
use dimspread::{FieldSpec, Matrix, Subspace};

/// Every subspace of GF(2)^n as a membership mask over the `2^n` vectors
/// (bit `v` set iff vector `v` belongs). Requires `n <= 5`.
pub fn gf2_subspaces(n: usize) -> Vec<u64> {
    assert!(n <= 5);
    let mut seen = BTreeSet::from([1u64]);
    let mut queue = VecDeque::from([1u64]);
    while let Some(mask) = queue.pop_front() {
        for v in 0..1u64 << n {
            if mask >> v & 1 == 1 {
                continue;
            }
            let mut next = mask;
            for u in 0..1u64 << n {
                if mask >> u & 1 == 1 {
                    next |= 1 << (u ^ v);
                }
            }
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    seen.into_iter().collect()
}

pub fn mask_dim(mask: u64) -> usize {
    mask.count_ones().trailing_zeros() as usize
}

pub fn mask_members(mask: u64) -> impl Iterator<Item = u64> {
    (0..64).filter(move |v| mask >> v & 1 == 1)
}

/// Rows of `m` as bitmasks (bit `c` = column `c`).
pub fn row_masks(m: &Matrix) -> Vec<u64> {
    (0..m.rows())
        .map(|r| (0..m.cols()).fold(0, |acc, c| acc | (u64::from(m.get(r, c)) << c)))
        .collect()
}

pub fn apply(rows: &[u64], v: u64) -> u64 {
    rows.iter()
        .enumerate()
        .fold(0, |acc, (r, row)| acc | (u64::from((row & v).count_ones() & 1) << r))
}

pub fn span_dim(vectors: impl IntoIterator<Item = u64>) -> usize {
    // basis[b] has highest set bit b
    let mut basis = [0u64; 64];
    let mut dim = 0;
    for mut v in vectors {
        while v != 0 {
            let top = 63 - v.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = v;
                dim += 1;
                break;
            }
            v ^= basis[top];
        }
    }
    dim
}

pub struct Gf2Family {
    pub n: usize,
    pub maps: Vec<Vec<u64>>,
}

impl Gf2Family {
    pub fn new(fam: &MapFamily) -> Self {
        assert_eq!(fam.field(), FieldSpec::GF2);
        Gf2Family {
            n: fam.n(),
            maps: fam.maps().iter().map(row_masks).collect(),
        }
    }

    /// `dim(Σ_i A_i(U))` for the subspace given as a membership mask.
    pub fn image_dim(&self, mask: u64) -> usize {
        span_dim(mask_members(mask).flat_map(|u| self.maps.iter().map(move |a| apply(a, u))))
    }

    /// `(dim, minimum image dimension)` for `dim = 1..=n`.
    pub fn profile(&self) -> Vec<(usize, usize)> {
        let subs = gf2_subspaces(self.n);
        (1..=self.n)
            .map(|d| {
                let min = subs
                    .iter()
                    .filter(|&&m| mask_dim(m) == d)
                    .map(|&m| self.image_dim(m))
                    .min()
                    .unwrap();
                (d, min)
            })
            .collect()
    }
}

/// Membership mask of a library subspace over GF(2).
pub fn subspace_mask(u: &Subspace) -> u64 {
    let gens = row_masks(u.basis());
    let mut mask = 1u64;
    for g in gens {
        let mut next = mask;
        for v in mask_members(mask) {
            next |= 1 << (v ^ g);
        }
        mask = next;
    }
    mask
}

/// Exact rank of every tensor of shape `dims` over GF(p), by BFS from zero
/// adding one rank-one tensor per step. Tensors are indexed in base `p`
/// with entry `(i,j,k)` as the digit of weight `p^((i*d2+j)*d3+k)`.
pub struct RankTable {
    pub p: u32,
    pub dims: (usize, usize, usize),
    pub rank: Vec<u8>,
}

impl RankTable {
    pub fn build(p: u32, dims: (usize, usize, usize)) -> Self {
        let (d1, d2, d3) = dims;
        let len = d1 * d2 * d3;
        let total = (p as usize).pow(len as u32);
        let vectors = |d: usize| -> Vec<Vec<u32>> {
            (1..(p as usize).pow(d as u32))
                .map(|mut x| {
                    (0..d)
                        .map(|_| {
                            let digit = (x % p as usize) as u32;
                            x /= p as usize;
                            digit
                        })
                        .collect()
                })
                .collect()
        };
        let mut ones = BTreeSet::new();
        for f in vectors(d1) {
            for g in vectors(d2) {
                for h in vectors(d3) {
                    let mut digits = Vec::with_capacity(len);
                    for &a in &f {
                        for &b in &g {
                            for &c in &h {
                                digits.push(a * b % p * c % p);
                            }
                        }
                    }
                    ones.insert(digits);
                }
            }
        }
        let ones: Vec<Vec<u32>> = ones.into_iter().collect();

        let mut rank = vec![u8::MAX; total];
        rank[0] = 0;
        let mut frontier = vec![0usize];
        let mut level = 0u8;
        let mut digits = vec![0u32; len];
        while !frontier.is_empty() {
            level += 1;
            let mut next = Vec::new();
            for &x in &frontier {
                let mut y = x;
                for d in digits.iter_mut() {
                    *d = (y % p as usize) as u32;
                    y /= p as usize;
                }
                for one in &ones {
                    let mut idx = 0usize;
                    for k in (0..len).rev() {
                        idx = idx * p as usize + ((digits[k] + one[k]) % p) as usize;
                    }
                    if rank[idx] == u8::MAX {
                        rank[idx] = level;
                        next.push(idx);
                    }
                }
            }
            frontier = next;
        }
        RankTable { p, dims, rank }
    }

    pub fn index(&self, t: &Tensor3) -> usize {
        t.entries().iter().rev().fold(0, |acc, &x| acc * self.p as usize + x as usize)
    }

    pub fn rank_of(&self, t: &Tensor3) -> usize {
        self.rank[self.index(t)] as usize
    }
}

/// `[n choose k]_q` from the product formula.
pub fn gaussian_binomial_product(n: u32, k: u32, q: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= q.pow(n - i) - 1;
        den *= q.pow(i + 1) - 1;
    }
    num / den
}
