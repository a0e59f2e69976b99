//! Smith normal form over the integers and the torsion of the cokernel.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Diagonal of the Smith normal form and the primary decomposition of
/// `Z^m / M Z^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantFactors {
    /// Non-negative, each dividing the next.
    pub snf_diagonal: Vec<BigInt>,
    /// `(p, k) -> multiplicity` of the cyclic factors `Z_{p^k}`.
    pub torsion_prime_powers: BTreeMap<(u64, u32), usize>,
}

impl InvariantFactors {
    /// Invariant factors greater than one.
    pub fn nontrivial(&self) -> Vec<BigInt> {
        self.snf_diagonal.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    pub fn product(&self) -> BigInt {
        self.snf_diagonal.iter().product()
    }

    /// Same multiset as `⊕ Z_{o}^{count}` for the given `(order, count)`
    /// summands.
    pub fn matches_group(&self, summands: &[(u64, usize)]) -> bool {
        self.torsion_prime_powers == prime_powers_of(summands)
    }

    /// `[[p, k, multiplicity], ...]`.
    pub fn prime_power_triples(&self) -> Vec<[u64; 3]> {
        self.torsion_prime_powers.iter().map(|(&(p, k), &c)| [p, k as u64, c as u64]).collect()
    }
}

/// Primary decomposition of `⊕ Z_{order}^{count}`.
pub fn prime_powers_of(summands: &[(u64, usize)]) -> BTreeMap<(u64, u32), usize> {
    let mut out = BTreeMap::new();
    for &(order, count) in summands {
        for (p, k) in factorize(order) {
            *out.entry((p, k)).or_insert(0) += count;
        }
    }
    out
}

fn factorize(mut v: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= v {
        let mut k = 0;
        while v.is_multiple_of(p) {
            v /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
        p += 1;
    }
    if v > 1 {
        out.push((v, 1));
    }
    out
}

/// Smith normal form of a square nonsingular integer matrix.
///
/// Pivot: smallest nonzero absolute value in the remaining block, reduced
/// Euclid-style against its row and column. A pivot that fails to divide the
/// rest of the block absorbs the offending row and the step repeats.
pub fn smith_normal_form(m: &IntMatrix) -> Result<InvariantFactors> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows(), m.cols()));
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut diag = Vec::with_capacity(n);
    for t in 0..n {
        loop {
            let Some((pi, pj)) = smallest_nonzero(&a, t) else {
                return Err(Error::SingularMatrix);
            };
            a.swap_rows(t, pi);
            a.swap_cols(t, pj);

            let mut dirty = false;
            for i in t + 1..n {
                if !a[(i, t)].is_zero() {
                    let q = a[(i, t)].div_floor(&a[(t, t)]);
                    for j in t..n {
                        let v = &a[(i, j)] - &q * &a[(t, j)];
                        a[(i, j)] = v;
                    }
                    dirty |= !a[(i, t)].is_zero();
                }
            }
            for j in t + 1..n {
                if !a[(t, j)].is_zero() {
                    let q = a[(t, j)].div_floor(&a[(t, t)]);
                    for i in t..n {
                        let v = &a[(i, j)] - &q * &a[(i, t)];
                        a[(i, j)] = v;
                    }
                    dirty |= !a[(t, j)].is_zero();
                }
            }
            if dirty {
                continue;
            }
            let pivot = a[(t, t)].clone();
            let offender = (t + 1..n).find(|&i| (t + 1..n).any(|j| !a[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    for j in t..n {
                        let v = &a[(t, j)] + &a[(i, j)];
                        a[(t, j)] = v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[(t, t)].abs());
    }

    let mut torsion = BTreeMap::new();
    for d in &diag {
        if d.is_one() {
            continue;
        }
        let v = d.to_u64().expect("invariant factor fits in u64");
        for (p, k) in factorize(v) {
            *torsion.entry((p, k)).or_insert(0) += 1;
        }
    }
    Ok(InvariantFactors { snf_diagonal: diag, torsion_prime_powers: torsion })
}

fn smallest_nonzero(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let n = a.rows();
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..n {
        for j in t..n {
            let v = a[(i, j)].abs();
            if !v.is_zero() && best.as_ref().is_none_or(|(_, _, b)| v < *b) {
                best = Some((i, j, v));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}
