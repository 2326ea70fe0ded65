//! Dense Clifford algebra Cl(p, q) over an abstract scalar ring.
//!
//! A multivector holds 2^n coefficients (n = p + q <= 12) indexed by blade
//! bitmask: bit i set means basis coform θ^i is a factor, factors in
//! ascending index order. The first p basis coforms square to +1, the rest
//! to -1. The scalar type is either `f64` or a truncated jet, so the same
//! kernels serve plain evaluation and exact differentiation.

use crate::jet::Scalar;
use thiserror::Error;

pub const MAX_DIM: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum CliffordError {
    #[error("signature mismatch: Cl({0},{1}) vs Cl({2},{3})")]
    SignatureMismatch(usize, usize, usize, usize),
    #[error("grade {grade} out of range for dimension {dim}")]
    GradeOutOfRange { grade: usize, dim: usize },
    #[error("multivector is not invertible (|A reverse(A)| scalar part is zero)")]
    NotInvertible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    /// Number of basis coforms squaring to +1.
    pub p: usize,
    /// Number squaring to -1.
    pub q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Self {
        assert!(p + q <= MAX_DIM, "dimension {} exceeds {MAX_DIM}", p + q);
        Signature { p, q }
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }

    /// Square of the i-th basis coform.
    pub fn eta(&self, i: usize) -> f64 {
        if i < self.p {
            1.0
        } else {
            -1.0
        }
    }
}

/// Sign from reordering the factors of blade `a` past those of `b` into
/// canonical ascending order (metric signs handled separately).
fn reorder_sign(a: u32, b: u32) -> f64 {
    let mut x = a >> 1;
    let mut swaps = 0u32;
    while x != 0 {
        swaps += (x & b).count_ones();
        x >>= 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Geometric product of two basis blades: resulting blade mask and sign.
pub fn blade_geometric(sig: Signature, a: u32, b: u32) -> (u32, f64) {
    let mut sign = reorder_sign(a, b);
    let mut common = a & b;
    while common != 0 {
        let i = common.trailing_zeros() as usize;
        sign *= sig.eta(i);
        common &= common - 1;
    }
    (a ^ b, sign)
}

/// Sign of reversion on a grade-r blade: (-1)^(r(r-1)/2).
pub fn reverse_sign(r: usize) -> f64 {
    if (r * (r.wrapping_sub(1)) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Multivector<T: Scalar> {
    sig: Signature,
    coeffs: Vec<T>,
}

/// Which part of a blade-by-blade product to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ProductKind {
    Geometric,
    Outer,
    LeftContract,
    RightContract,
}

impl<T: Scalar> Multivector<T> {
    pub fn zero(sig: Signature) -> Self {
        Multivector {
            sig,
            coeffs: vec![T::zero(); 1 << sig.n()],
        }
    }

    pub fn scalar(sig: Signature, s: T) -> Self {
        let mut mv = Self::zero(sig);
        mv.coeffs[0] = s;
        mv
    }

    /// Single basis blade with the given coefficient.
    pub fn blade(sig: Signature, mask: u32, coeff: T) -> Self {
        assert!((mask as usize) < (1 << sig.n()), "blade mask out of range");
        let mut mv = Self::zero(sig);
        mv.coeffs[mask as usize] = coeff;
        mv
    }

    /// The i-th basis coform θ^i.
    pub fn coform(sig: Signature, i: usize) -> Self {
        Self::blade(sig, 1 << i, T::one())
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn coeff(&self, mask: u32) -> &T {
        &self.coeffs[mask as usize]
    }

    pub fn set_coeff(&mut self, mask: u32, value: T) {
        self.coeffs[mask as usize] = value;
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn check_signature(&self, other: &Self) -> Result<(), CliffordError> {
        if self.sig != other.sig {
            return Err(CliffordError::SignatureMismatch(
                self.sig.p, self.sig.q, other.sig.p, other.sig.q,
            ));
        }
        Ok(())
    }

    fn assert_sig(&self, other: &Self) {
        self.check_signature(other)
            .expect("multivector signature mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_sig(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect();
        Multivector {
            sig: self.sig,
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_sig(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.sub(b))
            .collect();
        Multivector {
            sig: self.sig,
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(|a| a.scale(k)).collect(),
        }
    }

    pub fn scale_s(&self, s: &T) -> Self {
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(|a| a.mul(s)).collect(),
        }
    }

    fn product(&self, other: &Self, kind: ProductKind) -> Self {
        self.assert_sig(other);
        let mut out = Self::zero(self.sig);
        for (am, ac) in self.coeffs.iter().enumerate() {
            if ac.is_zero() {
                continue;
            }
            let (am, ga) = (am as u32, (am as u32).count_ones());
            for (bm, bc) in other.coeffs.iter().enumerate() {
                if bc.is_zero() {
                    continue;
                }
                let (bm, gb) = (bm as u32, (bm as u32).count_ones());
                let keep = match kind {
                    ProductKind::Geometric => true,
                    // For basis blades: a ∧ b survives iff the factors are
                    // disjoint; a ⌟ b iff a's factors all lie in b (result
                    // grade s - r); a ⌞ b is the mirror image.
                    ProductKind::Outer => am & bm == 0,
                    ProductKind::LeftContract => am & !bm == 0,
                    ProductKind::RightContract => bm & !am == 0,
                };
                if !keep {
                    continue;
                }
                let (rm, sign) = blade_geometric(self.sig, am, bm);
                debug_assert!(match kind {
                    ProductKind::Outer => rm.count_ones() == ga + gb,
                    ProductKind::LeftContract => rm.count_ones() == gb - ga,
                    ProductKind::RightContract => rm.count_ones() == ga - gb,
                    ProductKind::Geometric => true,
                });
                let term = ac.mul(bc).scale(sign);
                let slot = &mut out.coeffs[rm as usize];
                *slot = slot.add(&term);
            }
        }
        out
    }

    /// Geometric (Clifford) product.
    pub fn geometric(&self, other: &Self) -> Self {
        self.product(other, ProductKind::Geometric)
    }

    /// Exterior product: for homogeneous factors the grade r+s part.
    pub fn outer(&self, other: &Self) -> Self {
        self.product(other, ProductKind::Outer)
    }

    /// Left contraction a ⌟ b: for homogeneous factors the grade s-r part.
    pub fn left_contract(&self, other: &Self) -> Self {
        self.product(other, ProductKind::LeftContract)
    }

    /// Right contraction a ⌞ b: the grade r-s part.
    pub fn right_contract(&self, other: &Self) -> Self {
        self.product(other, ProductKind::RightContract)
    }

    /// Scalar product restricted to equal grades, with the convention
    /// θ^i · θ_j = δ^i_j (reversed first factor), so for r-forms
    /// a · b = <reverse(a) b>_0 per grade.
    pub fn scalar_product(&self, other: &Self) -> T {
        self.assert_sig(other);
        let mut acc = T::zero();
        for (m, ac) in self.coeffs.iter().enumerate() {
            let bc = &other.coeffs[m];
            let grade = (m as u32).count_ones() as usize;
            let (_, sq) = blade_geometric(self.sig, m as u32, m as u32);
            let s = reverse_sign(grade) * sq;
            acc = acc.add(&ac.mul(bc).scale(s));
        }
        acc
    }

    /// Grade-r projection. Panics if r > n; use `try_grade` at boundaries.
    pub fn grade(&self, r: usize) -> Self {
        self.try_grade(r).expect("grade out of range")
    }

    pub fn try_grade(&self, r: usize) -> Result<Self, CliffordError> {
        if r > self.sig.n() {
            return Err(CliffordError::GradeOutOfRange {
                grade: r,
                dim: self.sig.n(),
            });
        }
        let mut out = Self::zero(self.sig);
        for (m, c) in self.coeffs.iter().enumerate() {
            if (m as u32).count_ones() as usize == r {
                out.coeffs[m] = c.clone();
            }
        }
        Ok(out)
    }

    /// Reversion: (-1)^(r(r-1)/2) per grade-r part.
    pub fn reverse(&self) -> Self {
        let mut out = self.clone();
        for (m, c) in out.coeffs.iter_mut().enumerate() {
            let r = (m as u32).count_ones() as usize;
            if reverse_sign(r) < 0.0 {
                *c = c.neg();
            }
        }
        out
    }

    /// Commutator product C × D = (CD - DC)/2.
    pub fn commutator(&self, other: &Self) -> Self {
        self.geometric(other)
            .sub(&other.geometric(self))
            .scale(0.5)
    }

    /// Blade inverse A^-1 = reverse(A) / <A reverse(A)>_0 (valid for
    /// invertible blades, e.g. frame pseudoscalars).
    pub fn blade_inverse(&self) -> Result<Self, CliffordError> {
        let rev = self.reverse();
        let norm2 = self.geometric(&rev).coeffs[0].clone();
        if norm2.value() == 0.0 {
            return Err(CliffordError::NotInvertible);
        }
        Ok(rev.scale_s(&T::one().div(&norm2)))
    }

    /// Euclidean norm of the coefficient values (residual magnitude).
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.value() * c.value())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.value().abs() <= tol)
    }

    /// Apply a scalar-level map to every coefficient (e.g. a jet partial
    /// derivative), preserving the blade structure.
    pub fn map_coeffs(&self, f: impl Fn(&T) -> T) -> Self {
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Value-part snapshot: the same multivector over f64.
    pub fn value_part(&self) -> Multivector<f64> {
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(|c| c.value()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Mv = Multivector<f64>;

    fn e(sig: Signature, i: usize) -> Mv {
        Mv::coform(sig, i)
    }

    #[test]
    fn euclidean_plane_products() {
        let s = Signature::new(2, 0);
        let (e1, e2) = (e(s, 0), e(s, 1));
        // e1 e1 = 1
        assert_eq!(e1.geometric(&e1).coeff(0b00), &1.0);
        // e1 e2 = e12, e2 e1 = -e12
        assert_eq!(e1.geometric(&e2).coeff(0b11), &1.0);
        assert_eq!(e2.geometric(&e1).coeff(0b11), &-1.0);
        // e1 ⌟ e12 = e2
        let e12 = e1.outer(&e2);
        assert_eq!(e1.left_contract(&e12).coeff(0b10), &1.0);
        // e12 ⌞ e2 = e1 (right contraction peels from the right: e1 e2 e2)
        assert_eq!(e12.right_contract(&e2).coeff(0b01), &1.0);
        // reverse(e12) = -e12
        assert_eq!(e12.reverse().coeff(0b11), &-1.0);
        // e12 × e1 = -e2 (commutator of a biform with a vector)
        let c = e12.commutator(&e1);
        assert_eq!(c.coeff(0b10), &-1.0);
        assert_eq!(c.coeff(0b01), &0.0);
    }

    #[test]
    fn scalar_product_convention() {
        let s = Signature::new(2, 0);
        let (e1, e2) = (e(s, 0), e(s, 1));
        let e12 = e1.outer(&e2);
        // (e1∧e2)·(e1∧e2) = det of Gram matrix = +1 in Cl(2,0).
        assert_eq!(e12.scalar_product(&e12), 1.0);
        // θ^i · θ^j = δ^ij here (Euclidean).
        assert_eq!(e1.scalar_product(&e1), 1.0);
        assert_eq!(e1.scalar_product(&e2), 0.0);
        // Mixed grades contribute nothing.
        let mixed = e1.add(&e12);
        assert_eq!(mixed.scalar_product(&e2), 0.0);
    }

    #[test]
    fn minkowski_signature_squares() {
        // Cl(1,3): e0^2 = +1, ei^2 = -1, pseudoscalar I^2 = -1.
        let s = Signature::new(1, 3);
        assert_eq!(e(s, 0).geometric(&e(s, 0)).coeff(0), &1.0);
        for i in 1..4 {
            assert_eq!(e(s, i).geometric(&e(s, i)).coeff(0), &-1.0);
        }
        let i = e(s, 0)
            .outer(&e(s, 1))
            .outer(&e(s, 2))
            .outer(&e(s, 3));
        assert_eq!(i.geometric(&i).coeff(0), &-1.0);
    }

    #[test]
    fn wedge_antisymmetry_and_contraction_grades() {
        let s = Signature::new(3, 0);
        let u = e(s, 0).scale(2.0).add(&e(s, 1).scale(-1.0));
        let v = e(s, 1).scale(0.5).add(&e(s, 2).scale(3.0));
        let uv = u.outer(&v);
        let vu = v.outer(&u);
        assert_eq!(uv, vu.neg());
        assert!(u.outer(&u).is_zero_within(0.0));
        // u∧v = (uv - vu)/2 for vectors.
        let anti = u.geometric(&v).sub(&v.geometric(&u)).scale(0.5);
        assert_eq!(uv, anti);
        // u·v = symmetric part.
        let sym = u.geometric(&v).add(&v.geometric(&u)).scale(0.5);
        assert!((u.scalar_product(&v) - sym.coeff(0)).abs() < 1e-15);
    }

    #[test]
    fn blade_inverse_roundtrip() {
        let s = Signature::new(1, 2);
        let i3 = e(s, 0).outer(&e(s, 1)).outer(&e(s, 2));
        let inv = i3.blade_inverse().unwrap();
        let prod = i3.geometric(&inv);
        assert!((prod.coeff(0) - 1.0).abs() < 1e-15);
        assert!(prod.sub(&Mv::scalar(s, 1.0)).is_zero_within(1e-15));
        assert_eq!(Mv::zero(s).blade_inverse(), Err(CliffordError::NotInvertible));
    }

    #[test]
    fn checked_errors() {
        let a = Mv::zero(Signature::new(2, 0));
        let b = Mv::zero(Signature::new(1, 1));
        assert!(matches!(
            a.check_signature(&b),
            Err(CliffordError::SignatureMismatch(2, 0, 1, 1))
        ));
        assert!(matches!(
            a.try_grade(3),
            Err(CliffordError::GradeOutOfRange { grade: 3, dim: 2 })
        ));
    }
}
