//! Fixed-size vectors of the ambient Euclidean space the target is embedded in.

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientVector<const K: usize>(pub [f64; K]);

pub type Vec3 = AmbientVector<3>;

impl<const K: usize> Default for AmbientVector<K> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const K: usize> AmbientVector<K> {
    pub const fn new(c: [f64; K]) -> Self {
        Self(c)
    }

    pub const fn zero() -> Self {
        Self([0.0; K])
    }

    /// Unit basis vector `e_i`.
    pub fn basis(i: usize) -> Self {
        let mut v = Self::zero();
        v.0[i] = 1.0;
        v
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn components(&self) -> &[f64; K] {
        &self.0
    }
}

impl Vec3 {
    pub fn cross(&self, o: &Self) -> Self {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = o.0;
        Self([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])
    }
}

impl<const K: usize> Index<usize> for AmbientVector<K> {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<const K: usize> IndexMut<usize> for AmbientVector<K> {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl<const K: usize> Add for AmbientVector<K> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self += o;
        self
    }
}

impl<const K: usize> AddAssign for AmbientVector<K> {
    fn add_assign(&mut self, o: Self) {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a += b;
        }
    }
}

impl<const K: usize> Sub for AmbientVector<K> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        self -= o;
        self
    }
}

impl<const K: usize> SubAssign for AmbientVector<K> {
    fn sub_assign(&mut self, o: Self) {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a -= b;
        }
    }
}

impl<const K: usize> Mul<f64> for AmbientVector<K> {
    type Output = Self;
    fn mul(mut self, s: f64) -> Self {
        for a in self.0.iter_mut() {
            *a *= s;
        }
        self
    }
}

impl<const K: usize> Mul<AmbientVector<K>> for f64 {
    type Output = AmbientVector<K>;
    fn mul(self, v: AmbientVector<K>) -> AmbientVector<K> {
        v * self
    }
}

impl<const K: usize> Neg for AmbientVector<K> {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}
