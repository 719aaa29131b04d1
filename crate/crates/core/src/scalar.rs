//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating point type the library is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in working precision")
}

/// Converts an index or count into the working scalar.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in working precision")
}

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn real<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Neumaier compensated summation over complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    re: (T, T),
    im: (T, T),
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            re: (T::zero(), T::zero()),
            im: (T::zero(), T::zero()),
        }
    }

    fn step(acc: &mut (T, T), x: T) {
        let (s, c) = *acc;
        let t = s + x;
        let c = if s.abs() >= x.abs() {
            c + ((s - t) + x)
        } else {
            c + ((x - t) + s)
        };
        *acc = (t, c);
    }

    pub fn add(&mut self, z: Complex<T>) {
        Self::step(&mut self.re, z.re);
        Self::step(&mut self.im, z.im);
    }

    pub fn value(&self) -> Complex<T> {
        Complex::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

impl<T: Real> std::iter::FromIterator<Complex<T>> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = Complex<T>>>(iter: I) -> Self {
        let mut acc = Self::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let terms = [1e16, 1.0, -1e16, 1.0];
        let acc: CompensatedSum<f64> = terms.iter().map(|&x| real(x)).collect();
        assert_eq!(acc.value().re, 2.0);
    }

    #[test]
    fn literal_round_trips() {
        assert_eq!(lit::<f64>(0.1), 0.1);
        assert_eq!(lit::<f32>(0.5), 0.5f32);
    }
}
