//! Conditional expectation, the squared conditional L² norm, seminorm
//! axioms, and seminorm-family neighborhoods.
//!
//! Squared norms are the canonical exact representation here: the value of
//! the conditional L² norm itself is usually irrational, but its square is a
//! rational step function, and every inequality in scope can be decided in
//! squared form. Square roots appear only in display strings.

use crate::error::{Error, Result};
use crate::rv::{CompareMode, RandomVariable};
use crate::scalar::Scalar;
use crate::space::{SigmaAlgebra, TailRule};

/// E[X | F] on each F-cell: (Σ over fine cells c ⊆ A of X(c)·P(c)) / P(A).
pub fn conditional_expectation<T: Scalar>(
    x: &RandomVariable<T>,
    coarse: &SigmaAlgebra<T>,
) -> Result<RandomVariable<T>> {
    if !x.algebra().refines(coarse) {
        return Err(Error::IncompatibleOperands(
            "conditioning algebra is not a coarsening".into(),
        ));
    }
    let values = (0..coarse.cell_count())
        .map(|cell| {
            let mut acc = T::zero();
            for fine in coarse.cell_fines(cell) {
                acc = acc + x.value_on_fine(fine).clone() * x.algebra().space().fine_prob(fine);
            }
            acc / coarse.cell_prob(cell)
        })
        .collect();
    let tail = x.tail().map(|t| t.block_mean());
    RandomVariable::from_values(coarse, values, tail)
}

/// ‖X | F‖₂², exactly, per F-cell.
///
/// Evaluated by the per-block formula Σ (‖X·1_A‖₂² / P(A))·1_A, which equals
/// E[|X|²|F]; the two routes are cross-validated in tests and in the axiom
/// suites.
pub fn conditional_l2_norm_sq<T: Scalar>(
    x: &RandomVariable<T>,
    coarse: &SigmaAlgebra<T>,
) -> Result<RandomVariable<T>> {
    if !x.algebra().refines(coarse) {
        return Err(Error::IncompatibleOperands(
            "conditioning algebra is not a coarsening".into(),
        ));
    }
    let values = (0..coarse.cell_count())
        .map(|cell| {
            // ‖X·1_A‖₂² = Σ X(c)²·P(c), then divide by P(A)
            let mut block_l2_sq = T::zero();
            for fine in coarse.cell_fines(cell) {
                let v = x.value_on_fine(fine);
                block_l2_sq =
                    block_l2_sq + v.clone() * v.clone() * x.algebra().space().fine_prob(fine);
            }
            block_l2_sq / coarse.cell_prob(cell)
        })
        .collect();
    let tail = x.tail().and_then(|t| t.square()).map(|sq| sq.block_mean());
    RandomVariable::from_values(coarse, values, tail)
}

/// The module of fine step functions with scalars over the coarse algebra,
/// normed by the conditional L² norm. At desk scale every realized step
/// function has square-integrable block pieces; what membership checks is
/// the algebra relationship and that the tail (if any) has a representable
/// square, so the squared norm stays exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalL2Module<T> {
    fine: SigmaAlgebra<T>,
    coarse: SigmaAlgebra<T>,
}

impl<T: Scalar> ConditionalL2Module<T> {
    pub fn new(fine: SigmaAlgebra<T>, coarse: SigmaAlgebra<T>) -> Result<Self> {
        if !fine.refines(&coarse) {
            return Err(Error::IncompatibleOperands(
                "module needs the fine algebra to refine the coarse one".into(),
            ));
        }
        Ok(Self { fine, coarse })
    }

    pub fn over_space(space: &crate::space::SpaceRef<T>) -> Result<Self> {
        Self::new(SigmaAlgebra::fine(space)?, SigmaAlgebra::coarse(space)?)
    }

    pub fn fine(&self) -> &SigmaAlgebra<T> {
        &self.fine
    }

    pub fn coarse(&self) -> &SigmaAlgebra<T> {
        &self.coarse
    }

    /// Is x an element: measurable against a refinement of the coarse
    /// algebra, with every block piece of finite squared norm (symbolically
    /// representable on the tail)?
    pub fn contains(&self, x: &RandomVariable<T>) -> bool {
        if x.algebra().space() != self.fine.space() || !x.algebra().refines(&self.coarse) {
            return false;
        }
        match x.tail() {
            None => true, // prefix element; scope tags handle the rest
            Some(t) => t.square().is_some(),
        }
    }

    pub fn norm(&self) -> Seminorm<T> {
        Seminorm::CondL2 { coarse: self.coarse.clone() }
    }

    pub fn norm_sq(&self, x: &RandomVariable<T>) -> Result<RandomVariable<T>> {
        conditional_l2_norm_sq(x, &self.coarse)
    }
}

/// A conditional seminorm, evaluated in exact squared form.
#[derive(Debug, Clone)]
pub enum Seminorm<T> {
    /// ‖X|F‖₂ = E[|X|²|F]^{1/2}; a norm.
    CondL2 { coarse: SigmaAlgebra<T> },
    /// |E[X|F]|; a seminorm whose definiteness fails.
    AbsCondExp { coarse: SigmaAlgebra<T> },
    /// |⟨X, μ⟩| for a concrete dual vector: the seminorms that induce the
    /// weak topology.
    PairingAbs { dual: crate::weakdual::DualVector<T> },
    /// The zero map.
    Zero { coarse: SigmaAlgebra<T> },
}

impl<T: Scalar> Seminorm<T> {
    pub fn coarse(&self) -> &SigmaAlgebra<T> {
        match self {
            Seminorm::CondL2 { coarse }
            | Seminorm::AbsCondExp { coarse }
            | Seminorm::Zero { coarse } => coarse,
            Seminorm::PairingAbs { dual } => dual.coarse(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Seminorm::CondL2 { .. } => "cond-l2",
            Seminorm::AbsCondExp { .. } => "abs-cond-exp",
            Seminorm::PairingAbs { .. } => "pairing-abs",
            Seminorm::Zero { .. } => "zero",
        }
    }

    pub fn claims_norm(&self) -> bool {
        matches!(self, Seminorm::CondL2 { .. })
    }

    /// The squared seminorm value, exact on every cell of F.
    pub fn value_sq(&self, x: &RandomVariable<T>) -> Result<RandomVariable<T>> {
        match self {
            Seminorm::CondL2 { coarse } => conditional_l2_norm_sq(x, coarse),
            Seminorm::AbsCondExp { coarse } => {
                Ok(conditional_expectation(x, coarse)?.square())
            }
            Seminorm::PairingAbs { dual } => Ok(dual.pairing(x)?.square()),
            Seminorm::Zero { coarse } => Ok(RandomVariable::zero(coarse)),
        }
    }

    /// Decimal rendering of the seminorm value; display-only, never compared.
    pub fn value_display(&self, x: &RandomVariable<T>) -> Result<Vec<f64>> {
        Ok(self
            .value_sq(x)?
            .values()
            .iter()
            .map(|v| v.display_f64().sqrt())
            .collect())
    }
}

/// Decides a ≤ b + c for nonnegative quantities known through their exact
/// squares. Avoids square roots: a ≤ b + c ⇔ a² ≤ b² + c² + 2bc, and the
/// cross term is compared in squared form again.
pub fn sqrt_sum_dominates<T: Scalar>(a_sq: &T, b_sq: &T, c_sq: &T) -> bool {
    let t = a_sq.clone() - b_sq.clone() - c_sq.clone();
    if !t.is_positive() {
        return true;
    }
    // need t ≤ 2·√(b²c²): both sides nonnegative, compare squares
    t.clone() * t <= T::from_int(4) * b_sq.clone() * c_sq.clone()
}

#[derive(Debug, Clone)]
pub struct AxiomWitness {
    pub axiom: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SeminormReport {
    pub homogeneity_ok: bool,
    pub triangle_ok: bool,
    pub definite: bool,
    pub trials: usize,
    pub seed: u64,
    pub witnesses: Vec<AxiomWitness>,
}

/// Samples the seminorm axioms: L⁰-homogeneity ‖YX‖ = |Y|‖X‖ (squared form),
/// the triangle inequality (squared comparison), and definiteness.
/// Failures return concrete witnesses.
pub fn seminorm_axioms_check<T: Scalar>(
    s: &Seminorm<T>,
    fine: &SigmaAlgebra<T>,
    trials: usize,
    seed: u64,
) -> Result<SeminormReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be ≥ 1".into()));
    }
    let mut sampler = crate::sample::Sampler::new(seed);
    let mut witnesses = Vec::new();
    let mut homogeneity_ok = true;
    let mut triangle_ok = true;
    let mut definite = true;

    for _ in 0..trials {
        let x1 = sampler.rv(fine, 8, 3);
        let x2 = sampler.rv(fine, 8, 3);
        // scalar Y is F-measurable (cellwise-varying against the coarse algebra)
        let y = sampler.rv(s.coarse(), 8, 3);

        // homogeneity, exactly: ‖YX‖² = Y²‖X‖²
        let lhs = s.value_sq(&y.mul(&x1)?)?;
        let rhs = y.square().mul(&s.value_sq(&x1)?)?;
        if !lhs.eq_realized(&rhs)? {
            homogeneity_ok = false;
            witnesses.push(AxiomWitness {
                axiom: "homogeneity",
                detail: format!("Y={} X={}", y.describe(), x1.describe()),
            });
        }

        // triangle, cellwise in squared form
        let sum_sq = s.value_sq(&x1.add(&x2)?)?;
        let a_sq = s.value_sq(&x1)?;
        let b_sq = s.value_sq(&x2)?;
        for cell in 0..sum_sq.values().len() {
            if !sqrt_sum_dominates(&sum_sq.values()[cell], &a_sq.values()[cell], &b_sq.values()[cell])
            {
                triangle_ok = false;
                witnesses.push(AxiomWitness {
                    axiom: "triangle",
                    detail: format!("cell {cell}: X1={} X2={}", x1.describe(), x2.describe()),
                });
                break;
            }
        }

        // definiteness: ‖X‖ = 0 with X ≠ 0 refutes the norm claim
        let nz = s.value_sq(&x1)?;
        let x1_zero = x1.eq_realized(&RandomVariable::zero(fine))?;
        let norm_zero = nz.eq_realized(&RandomVariable::zero(s.coarse()))?;
        if norm_zero && !x1_zero {
            definite = false;
            witnesses.push(AxiomWitness {
                axiom: "definiteness",
                detail: format!("X={}", x1.describe()),
            });
        }
    }

    // a deterministic definiteness probe: a ±1 pattern on each coarse cell
    // kills conditional expectations without being zero
    if definite {
        if let Some(probe) = mean_zero_probe(fine, s.coarse()) {
            let nz = s.value_sq(&probe)?;
            if nz.eq_realized(&RandomVariable::zero(s.coarse()))? {
                definite = false;
                witnesses.push(AxiomWitness {
                    axiom: "definiteness",
                    detail: format!("X={}", probe.describe()),
                });
            }
        }
    }

    Ok(SeminormReport { homogeneity_ok, triangle_ok, definite, trials, seed, witnesses })
}

/// A nonzero element with zero conditional mean on every coarse cell that
/// splits into an even number of equal fine cells; None if no cell splits.
fn mean_zero_probe<T: Scalar>(
    fine: &SigmaAlgebra<T>,
    coarse: &SigmaAlgebra<T>,
) -> Option<RandomVariable<T>> {
    let mut values = vec![T::zero(); fine.cell_count()];
    let mut any = false;
    for cell in 0..coarse.cell_count() {
        let fines = coarse.cell_fines(cell);
        if fines.len() >= 2 && fines.len() % 2 == 0 {
            let p0 = fine.cell_prob(fines[0]);
            if fines.iter().all(|&f| fine.cell_prob(f) == p0) {
                for (i, &f) in fines.iter().enumerate() {
                    values[f] = if i % 2 == 0 { T::one() } else { -T::one() };
                }
                any = true;
            }
        }
    }
    if !any {
        return None;
    }
    let tail = fine.space().is_dyadic().then(TailRule::zero);
    RandomVariable::from_values(fine, values, tail).ok()
}

/// Membership in U_{Q,ε} = {X : sup over Q of ‖X‖ ≤ ε}, decided in squared
/// form (ε > 0 and norms ≥ 0, so ‖X‖ ≤ ε ⇔ ‖X‖² ≤ ε²).
pub fn neighborhood_member<T: Scalar>(
    seminorms: &[Seminorm<T>],
    epsilon: &RandomVariable<T>,
    x: &RandomVariable<T>,
) -> Result<bool> {
    if seminorms.is_empty() {
        return Err(Error::EmptySet);
    }
    if !epsilon.is_strictly_positive()? {
        return Err(Error::InvalidEpsilon);
    }
    let eps_sq = epsilon.square();
    for s in seminorms {
        if !eps_sq.compare(&s.value_sq(x)?, CompareMode::Geq, None)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;
    use crate::weakdual::RademacherNet;
    use crate::Q;
    use num_traits::{One, Zero};

    fn dyadic(blocks: u32, depth: u32) -> (SigmaAlgebra<Q>, SigmaAlgebra<Q>) {
        let s = Space::<Q>::dyadic_uniform(blocks, depth, TailRule::zero()).unwrap();
        (SigmaAlgebra::fine(&s).unwrap(), SigmaAlgebra::coarse(&s).unwrap())
    }

    #[test]
    fn constant_conditional_expectation() {
        let (fine, coarse) = dyadic(3, 2);
        let c = RandomVariable::constant(&fine, Q::ratio(7, 3));
        let e = conditional_expectation(&c, &coarse).unwrap();
        assert!(e.values().iter().all(|v| *v == Q::ratio(7, 3)));
    }

    #[test]
    fn rademacher_block_mean_is_zero() {
        let (_, coarse) = dyadic(3, 4);
        let net = RademacherNet::new(vec![1, 2, 1], 1);
        let x = net.element(coarse.space()).unwrap();
        let e = conditional_expectation(&x, &coarse).unwrap();
        assert!(e.values().iter().all(|v| v.is_zero()));
        // |X| ≡ 1 so the squared conditional norm is 1 on every block
        let n = conditional_l2_norm_sq(&x, &coarse).unwrap();
        assert!(n.values().iter().all(|v| v.is_one()));
    }

    #[test]
    fn tower_property() {
        let (fine, coarse) = dyadic(3, 3);
        let mut sampler = crate::sample::Sampler::new(7);
        for _ in 0..20 {
            let x = sampler.rv(&fine, 16, 4);
            let once = conditional_expectation(&x, &coarse).unwrap();
            let twice = conditional_expectation(&once, &coarse).unwrap();
            assert!(once.eq_realized(&twice).unwrap());
        }
    }

    #[test]
    fn block_indicator_norm() {
        // ‖1_{A_1}‖² = (1/2)/(1/2) = 1 on A_1, 0 elsewhere
        let (_fine, coarse) = dyadic(3, 2);
        let a1 = crate::space::EventSet::of_cells(&coarse, [0]).unwrap();
        let ind = RandomVariable::indicator(&a1);
        let n = conditional_l2_norm_sq(&ind, &coarse).unwrap();
        assert_eq!(n.values()[0], Q::one());
        assert!(n.values()[1].is_zero() && n.values()[2].is_zero());
    }

    #[test]
    fn norm_sq_matches_conditional_expectation_of_square() {
        let (fine, coarse) = dyadic(4, 3);
        let mut sampler = crate::sample::Sampler::new(99);
        for _ in 0..50 {
            let x = sampler.rv(&fine, 12, 4);
            let direct = conditional_l2_norm_sq(&x, &coarse).unwrap();
            let via_ce = conditional_expectation(&x.square(), &coarse).unwrap();
            assert!(direct.eq_realized(&via_ce).unwrap());
        }
    }

    #[test]
    fn norm_locality() {
        // ‖1_A·X|F‖² = 1_A·‖X|F‖² for coarse events A
        let (fine, coarse) = dyadic(3, 3);
        let mut sampler = crate::sample::Sampler::new(5);
        let x = sampler.rv(&fine, 10, 3);
        let a = crate::space::EventSet::of_cells(&coarse, [0, 2]).unwrap();
        let lhs = conditional_l2_norm_sq(&x.restrict(&a).unwrap(), &coarse).unwrap();
        let rhs = conditional_l2_norm_sq(&x, &coarse)
            .unwrap()
            .restrict(&a)
            .unwrap();
        assert!(lhs.eq_realized(&rhs).unwrap());
    }

    #[test]
    fn axioms_pass_for_cond_l2() {
        let (fine, coarse) = dyadic(3, 2);
        let s = Seminorm::CondL2 { coarse };
        let rep = seminorm_axioms_check(&s, &fine, 40, 42).unwrap();
        assert!(rep.homogeneity_ok && rep.triangle_ok && rep.definite);
    }

    #[test]
    fn abs_cond_exp_fails_definiteness_with_witness() {
        let (fine, coarse) = dyadic(3, 2);
        let s = Seminorm::AbsCondExp { coarse };
        let rep = seminorm_axioms_check(&s, &fine, 40, 42).unwrap();
        assert!(rep.homogeneity_ok && rep.triangle_ok);
        assert!(!rep.definite);
        assert!(rep.witnesses.iter().any(|w| w.axiom == "definiteness"));
    }

    #[test]
    fn zero_map_is_a_seminorm_not_a_norm() {
        let (fine, coarse) = dyadic(2, 2);
        let s = Seminorm::Zero { coarse };
        let rep = seminorm_axioms_check(&s, &fine, 10, 1).unwrap();
        assert!(rep.homogeneity_ok && rep.triangle_ok && !rep.definite);
    }

    #[test]
    fn neighborhood_membership() {
        let (fine, coarse) = dyadic(2, 2);
        let q = vec![Seminorm::CondL2 { coarse: coarse.clone() }];
        let eps = RandomVariable::constant(&coarse, Q::one());
        // squared norm ≡ 1/4 ⇒ in the ε=1 neighborhood
        let x = RandomVariable::constant(&fine, Q::ratio(1, 2));
        assert!(neighborhood_member(&q, &eps, &x).unwrap());
        assert!(neighborhood_member(&q, &eps, &RandomVariable::zero(&fine)).unwrap());
        let zero_eps = RandomVariable::zero(&coarse);
        assert!(matches!(
            neighborhood_member(&q, &zero_eps, &x),
            Err(Error::InvalidEpsilon)
        ));
    }
}
