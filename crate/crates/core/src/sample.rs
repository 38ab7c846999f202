//! Deterministic seeded sampling of rational scalars and step functions.
//!
//! Samples live on dyadic grids (numerator over a power-of-two denominator)
//! so every downstream computation stays small and exact. The same seed
//! always reproduces the same draws.

use crate::rv::RandomVariable;
use crate::scalar::Scalar;
use crate::space::{SigmaAlgebra, TailRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform numerator in [-numer_bound, numer_bound] over 2^denom_pow.
    pub fn rational<T: Scalar>(&mut self, numer_bound: i64, denom_pow: u32) -> T {
        let n = self.rng.gen_range(-numer_bound..=numer_bound);
        T::from_int(n) * T::pow2(-(denom_pow as i32))
    }

    /// Uniform rational in [0, 1] on the grid with denominator 2^denom_pow.
    pub fn unit<T: Scalar>(&mut self, denom_pow: u32) -> T {
        let d = 1i64 << denom_pow;
        let n = self.rng.gen_range(0..=d);
        T::from_int(n) * T::pow2(-(denom_pow as i32))
    }

    /// Strictly positive rational in (0, 1] on the dyadic grid.
    pub fn positive_unit<T: Scalar>(&mut self, denom_pow: u32) -> T {
        let d = 1i64 << denom_pow;
        let n = self.rng.gen_range(1..=d);
        T::from_int(n) * T::pow2(-(denom_pow as i32))
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn bool(&mut self) -> bool {
        self.rng.gen()
    }

    /// Step function with values on the dyadic grid; on lazy spaces the tail
    /// is a sampled constant so tail algebra stays symbolic.
    pub fn rv<T: Scalar>(
        &mut self,
        algebra: &SigmaAlgebra<T>,
        numer_bound: i64,
        denom_pow: u32,
    ) -> RandomVariable<T> {
        let values = (0..algebra.cell_count())
            .map(|_| self.rational(numer_bound, denom_pow))
            .collect();
        let tail = algebra
            .space()
            .is_dyadic()
            .then(|| TailRule::Const(self.rational(numer_bound, denom_pow)));
        RandomVariable::from_values(algebra, values, tail).expect("sampled sizes match")
    }

    /// Step function with values in [0, 1].
    pub fn rv_unit<T: Scalar>(
        &mut self,
        algebra: &SigmaAlgebra<T>,
        denom_pow: u32,
    ) -> RandomVariable<T> {
        let values = (0..algebra.cell_count()).map(|_| self.unit(denom_pow)).collect();
        let tail = algebra
            .space()
            .is_dyadic()
            .then(|| TailRule::Const(self.unit(denom_pow)));
        RandomVariable::from_values(algebra, values, tail).expect("sampled sizes match")
    }

    /// Strictly positive step function (an ε in L⁰₊₊).
    pub fn rv_positive<T: Scalar>(
        &mut self,
        algebra: &SigmaAlgebra<T>,
        denom_pow: u32,
    ) -> RandomVariable<T> {
        let values = (0..algebra.cell_count())
            .map(|_| self.positive_unit(denom_pow))
            .collect();
        let tail = algebra
            .space()
            .is_dyadic()
            .then(|| TailRule::Const(self.positive_unit(denom_pow)));
        RandomVariable::from_values(algebra, values, tail).expect("sampled sizes match")
    }

    /// Random convex weights on the dyadic grid, exactly summing to one.
    pub fn simplex_weights<T: Scalar>(&mut self, n: usize, denom_pow: u32) -> Vec<T> {
        let d = 1i64 << denom_pow;
        // a composition of d into n nonnegative parts
        let mut cuts: Vec<i64> = (0..n - 1).map(|_| self.rng.gen_range(0..=d)).collect();
        cuts.sort_unstable();
        let mut parts = Vec::with_capacity(n);
        let mut prev = 0i64;
        for c in cuts {
            parts.push(c - prev);
            prev = c;
        }
        parts.push(d - prev);
        parts
            .into_iter()
            .map(|p| T::from_int(p) * T::pow2(-(denom_pow as i32)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;
    use crate::Q;
    use num_traits::{One, Signed, Zero};

    #[test]
    fn sampling_is_deterministic() {
        let s = Space::<Q>::uniform(3).unwrap();
        let alg = SigmaAlgebra::discrete(&s).unwrap();
        let a = Sampler::new(7).rv::<Q>(&alg, 8, 3);
        let b = Sampler::new(7).rv::<Q>(&alg, 8, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn simplex_weights_sum_to_one() {
        let mut s = Sampler::new(3);
        for n in 1..6 {
            let w: Vec<Q> = s.simplex_weights(n, 4);
            assert_eq!(w.len(), n);
            assert!(w.iter().all(|x| !x.is_negative()));
            let total: Q = w.into_iter().fold(Q::zero(), |a, b| a + b);
            assert!(total.is_one());
        }
    }
}
