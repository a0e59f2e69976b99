//! The connectivity matrix of the partition lattice and its exact inverse.
//!
//! States span a commutative algebra in two ways: with join as product
//! (unit: all singletons) and with meet as product (unit: the one-block
//! state). Two idempotent-like elements are built per state:
//!
//! * `π(A) = A · Π_τ (e − ⟨τ⟩)` over transpositions `τ` joining two blocks
//!   of `A` (join product). Its support is `≥ A` and its coefficient on the
//!   top state is the connectivity number `α_A = ±(m_A − 1)!`.
//! * `ξ(A) = Π_C (A − C)` over the states `C` covered by `A` (meet
//!   product). Its support is `≤ A`.
//!
//! In a coherent order the matrices `B` (columns `π(A_j)`) and `D` (columns
//! `ξ(A_j)`) are unit triangular, and `A⁻¹ = B · diag(1/α) · D`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{IntMatrix, RatMatrix};
use crate::partition::{CoherentOrder, OrderVariant, Partition};
use crate::rational::Rational;

/// Finitely supported rational combination of states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraVector {
    n: usize,
    coeffs: BTreeMap<Partition, Rational>,
}

impl AlgebraVector {
    pub fn zero(n: usize) -> Self {
        Self { n, coeffs: BTreeMap::new() }
    }

    pub fn basis(p: &Partition) -> Self {
        let mut v = Self::zero(p.n());
        v.add_term(p.clone(), Rational::one());
        v
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, p: &Partition) -> Rational {
        self.coeffs.get(p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &Rational)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, p: Partition, c: Rational) {
        let slot = self.coeffs.entry(p).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.retain(|_, v| !v.is_zero());
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, c) in &other.coeffs {
            out.add_term(p.clone(), -c.clone());
        }
        out
    }

    fn map_basis(&self, f: impl Fn(&Partition) -> Partition) -> Self {
        let mut out = Self::zero(self.n);
        for (p, c) in &self.coeffs {
            out.add_term(f(p), c.clone());
        }
        out
    }

    /// `b · v` in the join algebra.
    pub fn join_action(&self, b: &Partition) -> Self {
        self.map_basis(|p| p.join_unchecked(b))
    }

    /// `b ∩ v` in the meet algebra.
    pub fn meet_action(&self, b: &Partition) -> Self {
        self.map_basis(|p| p.meet_unchecked(b))
    }

    pub fn join_product(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n);
        for (q, d) in &other.coeffs {
            for (p, c) in &self.coeffs {
                out.add_term(p.join_unchecked(q), c * d);
            }
        }
        out
    }

    pub fn meet_product(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n);
        for (q, d) in &other.coeffs {
            for (p, c) in &self.coeffs {
                out.add_term(p.meet_unchecked(q), c * d);
            }
        }
        out
    }

    /// Image under a permutation of `{1..n}` (1-based images).
    pub fn conjugate(&self, sigma: &[usize]) -> Result<Self> {
        let mut out = Self::zero(self.n);
        for (p, c) in &self.coeffs {
            out.add_term(p.conjugate(sigma)?, c.clone());
        }
        Ok(out)
    }
}

/// The state whose only non-singleton block is `{i, j}` (1-based).
pub fn transposition(n: usize, i: usize, j: usize) -> Partition {
    let raw: Vec<usize> = (1..=n).map(|k| if k == j { i } else { k }).collect();
    Partition::from_labels(&raw)
}

/// Unordered pairs `{i, j}` lying in different blocks of `a`.
pub fn splitting_transpositions(a: &Partition) -> Vec<(usize, usize)> {
    let n = a.n();
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if !a.same_block(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn pi_vector(a: &Partition) -> AlgebraVector {
    let mut v = AlgebraVector::basis(a);
    for (i, j) in splitting_transpositions(a) {
        let t = transposition(a.n(), i, j);
        v = v.sub(&v.join_action(&t));
    }
    v
}

pub fn xi_vector(a: &Partition) -> AlgebraVector {
    let mut v = AlgebraVector::basis(a);
    for c in a.co_covers() {
        v = v.sub(&v.meet_action(&c));
    }
    v
}

/// Coefficient of the one-block state in `π(a)`.
pub fn connectivity_number(a: &Partition) -> BigInt {
    pi_vector(a).coeff(&Partition::top(a.n())).to_integer()
}

/// `a_ij = 1` iff the pair `(A_i, A_j)` joins to the one-block state.
pub fn build_a(order: &CoherentOrder) -> IntMatrix {
    let states = order.states();
    IntMatrix::from_fn(states.len(), states.len(), |i, j| {
        if states[i].join_unchecked(&states[j]).is_top() {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    })
}

/// Everything derived from one coherent order.
#[derive(Debug, Clone)]
pub struct ConnectivityBundle {
    pub order: CoherentOrder,
    pub a: IntMatrix,
    /// Columns are `π(A_j)`: lower unitriangular.
    pub b: IntMatrix,
    /// Connectivity numbers `α(A_i)`; `C = diag(1/α)`.
    pub alphas: Vec<BigInt>,
    /// Columns are `ξ(A_j)`: upper unitriangular.
    pub d: IntMatrix,
    pub a_inv: RatMatrix,
}

impl ConnectivityBundle {
    pub fn new(n: usize, variant: OrderVariant) -> Result<Self> {
        invert_a(&CoherentOrder::with_variant(n, variant)?)
    }

    pub fn n(&self) -> usize {
        self.order.n()
    }

    pub fn c(&self) -> RatMatrix {
        let m = self.alphas.len();
        let mut c = RatMatrix::zeros(m, m);
        for (i, alpha) in self.alphas.iter().enumerate() {
            c[(i, i)] = BigRational::new(BigInt::one(), alpha.clone());
        }
        c
    }

    /// `b_ij` looked up by state labels.
    pub fn inverse_entry(&self, a: &Partition, b: &Partition) -> Option<&Rational> {
        Some(&self.a_inv[(self.order.index_of(a)?, self.order.index_of(b)?)])
    }
}

fn coefficient_matrix(order: &CoherentOrder, columns: &[AlgebraVector]) -> IntMatrix {
    let m = order.len();
    let mut out = IntMatrix::zeros(m, m);
    for (j, v) in columns.iter().enumerate() {
        for (p, c) in v.terms() {
            let i = order.index_of(p).expect("state in order");
            out[(i, j)] = c.to_integer();
        }
    }
    out
}

/// Builds `A`, `B`, `C`, `D` and `A⁻¹ = B C D` for the given order. The
/// per-state expansions are independent and computed in parallel.
pub fn invert_a(order: &CoherentOrder) -> Result<ConnectivityBundle> {
    let states = order.states();
    let pis: Vec<AlgebraVector> = states.par_iter().map(pi_vector).collect();
    let xis: Vec<AlgebraVector> = states.par_iter().map(xi_vector).collect();
    let top = Partition::top(order.n());
    let alphas: Vec<BigInt> = pis.iter().map(|v| v.coeff(&top).to_integer()).collect();
    if let Some(i) = alphas.iter().position(|a| a.is_zero()) {
        return Err(Error::ZeroConnectivityNumber(states[i].to_string()));
    }
    let b = coefficient_matrix(order, &pis);
    let d = coefficient_matrix(order, &xis);

    // A⁻¹ = (Σ_k B_ik (L/α_k) D_kj) / L with L = lcm |α_k|.
    let l = alphas.iter().fold(BigInt::one(), |acc, a| acc.lcm(a));
    let m = states.len();
    let scaled_b = IntMatrix::from_fn(m, m, |i, k| &b[(i, k)] * (&l / &alphas[k]));
    let numer = scaled_b.mul(&d);
    let a_inv = numer.map(|v| BigRational::new(v.clone(), l.clone()));

    Ok(ConnectivityBundle { order: order.clone(), a: build_a(order), b, alphas, d, a_inv })
}

/// Determinant of the connectivity matrix by exact elimination.
pub fn det_a(n: usize) -> Result<BigInt> {
    build_a(&CoherentOrder::new(n)?).determinant()
}

/// `Π_O ((m_O − 1)!)^{#O}`.
pub fn det_orbit_formula(n: usize) -> Result<BigInt> {
    let order = CoherentOrder::new(n)?;
    Ok(order
        .orbits()
        .iter()
        .map(|o| num_traits::pow(factorial(o.block_count() - 1), o.size()))
        .product())
}

pub fn factorial(k: usize) -> BigInt {
    (1..=k).map(BigInt::from).product()
}

/// `|α_A|` for a state with `m` blocks.
pub fn expected_connectivity_magnitude(a: &Partition) -> BigInt {
    factorial(a.block_count() - 1)
}

impl ConnectivityBundle {
    /// Exact check `A · A⁻¹ = I`.
    pub fn verifies_inverse(&self) -> bool {
        self.a.to_rational().mul(&self.a_inv) == RatMatrix::identity(self.a.rows())
    }

    pub fn abs_det(&self) -> Result<BigInt> {
        Ok(self.a.determinant()?.abs())
    }
}
