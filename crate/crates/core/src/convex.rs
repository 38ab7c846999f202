//! L⁰-convex sets, the Minkowski gauge with exact and bracketing evaluation
//! paths, convexity-axiom checks, the closure/sublevel relation, and the
//! degenerate-gauge construction on the lazy dyadic space.
//!
//! A set is described per coarse cell where possible (facet lists, hulls,
//! norm balls): membership then localizes, which is exactly the relative
//! countable concatenation property in operational form. Shapes whose
//! membership couples cells (a joint half-space, the cofinite unit ball) are
//! carried too, but the gauge machinery rejects them rather than guessing.

use crate::error::{Error, Result};
use crate::report::Scope;
use crate::rv::{CompareMode, ExtRandomVariable, RandomVariable};
use crate::scalar::{Ext, Scalar};
use crate::solve::hull_membership;
use crate::space::{SigmaAlgebra, SpaceRef, TailRule};

/// One linear constraint ⟨normal, x⟩ ≤ offset (or < when strict) on the
/// fine-value section of a cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet<T> {
    pub normal: Vec<T>,
    pub offset: T,
    pub strict: bool,
}

impl<T: Scalar> Facet<T> {
    pub fn new(normal: Vec<T>, offset: T) -> Self {
        Facet { normal, offset, strict: false }
    }

    pub fn strict(normal: Vec<T>, offset: T) -> Self {
        Facet { normal, offset, strict: true }
    }

    pub fn value(&self, section: &[T]) -> T {
        self.normal
            .iter()
            .zip(section)
            .map(|(a, x)| a.clone() * x.clone())
            .fold(T::zero(), |a, b| a + b)
    }

    pub fn holds(&self, section: &[T]) -> bool {
        let v = self.value(section);
        if self.strict {
            v < self.offset
        } else {
            v <= self.offset
        }
    }
}

#[derive(Debug, Clone)]
pub enum SetShape<T> {
    /// Per-cell rational polytope (facet representation). The exact gauge
    /// path lives here.
    CellPolytope { facets: Vec<Vec<Facet<T>>> },
    /// Per-cell convex hull of the sections of finitely many elements.
    CellHull { generators: Vec<RandomVariable<T>> },
    /// {X : ‖X|F‖₂ ≤ r}, radius a strictly positive coarse variable;
    /// membership decided in squared form.
    NormBall { radius: RandomVariable<T> },
    /// A plain finite set of elements (not convex; used for concatenation
    /// closure experiments).
    FiniteSet { members: Vec<RandomVariable<T>> },
    /// {Y : |Y·1_{A_i}| ≤ 1 for all but finitely many i} on a lazy dyadic
    /// space. Not cellwise-local.
    CofiniteUnitBall,
    /// One polytope over the concatenated realized fine values; couples
    /// cells, so it is not cellwise-local.
    GlobalPolytope { facets: Vec<Facet<T>> },
}

/// Structural claims derivable from the shape alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetFlags {
    pub convex: Option<bool>,
    pub balanced: Option<bool>,
    pub absorbent: Option<bool>,
    /// membership decided cell by cell, which certifies the relative
    /// countable concatenation property
    pub local: bool,
}

#[derive(Debug, Clone)]
pub struct L0ConvexSet<T> {
    fine: SigmaAlgebra<T>,
    coarse: SigmaAlgebra<T>,
    shape: SetShape<T>,
    /// optional per-cell upper bound for the absorbency search
    pub absorb_hint: Option<T>,
}

impl<T: Scalar> L0ConvexSet<T> {
    pub fn cell_polytope(
        fine: &SigmaAlgebra<T>,
        coarse: &SigmaAlgebra<T>,
        facets: Vec<Vec<Facet<T>>>,
    ) -> Result<Self> {
        if facets.len() != coarse.cell_count() {
            return Err(Error::ArityMismatch { expected: coarse.cell_count(), got: facets.len() });
        }
        for (cell, fs) in facets.iter().enumerate() {
            let dim = coarse.cell_fines(cell).len();
            if fs.iter().any(|f| f.normal.len() != dim) {
                return Err(Error::InvalidParameter(format!(
                    "facet dimension mismatch on cell {cell}"
                )));
            }
        }
        Ok(Self {
            fine: fine.clone(),
            coarse: coarse.clone(),
            shape: SetShape::CellPolytope { facets },
            absorb_hint: None,
        })
    }

    /// Per-atom interval [lo, hi] on a finite space (1-dimensional sections).
    pub fn interval_per_atom(
        algebra: &SigmaAlgebra<T>,
        bounds: Vec<(T, T)>,
    ) -> Result<Self> {
        let facets = bounds
            .into_iter()
            .map(|(lo, hi)| {
                vec![
                    Facet::new(vec![T::one()], hi),
                    Facet::new(vec![-T::one()], -lo),
                ]
            })
            .collect();
        Self::cell_polytope(algebra, algebra, facets)
    }

    pub fn norm_ball(
        fine: &SigmaAlgebra<T>,
        coarse: &SigmaAlgebra<T>,
        radius: RandomVariable<T>,
    ) -> Result<Self> {
        if !radius.is_strictly_positive()? {
            return Err(Error::InvalidParameter("ball radius must be strictly positive".into()));
        }
        Ok(Self {
            fine: fine.clone(),
            coarse: coarse.clone(),
            shape: SetShape::NormBall { radius },
            absorb_hint: None,
        })
    }

    pub fn cell_hull(
        fine: &SigmaAlgebra<T>,
        coarse: &SigmaAlgebra<T>,
        generators: Vec<RandomVariable<T>>,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(Self {
            fine: fine.clone(),
            coarse: coarse.clone(),
            shape: SetShape::CellHull { generators },
            absorb_hint: None,
        })
    }

    pub fn finite_set(
        fine: &SigmaAlgebra<T>,
        coarse: &SigmaAlgebra<T>,
        members: Vec<RandomVariable<T>>,
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(Self {
            fine: fine.clone(),
            coarse: coarse.clone(),
            shape: SetShape::FiniteSet { members },
            absorb_hint: None,
        })
    }

    /// Example set on a lazy space: unit bound violated on at most finitely
    /// many blocks. Scalars act fine-measurably here, so the coarse algebra
    /// equals the fine one; the block structure only enters membership.
    pub fn cofinite_unit_ball(space: &SpaceRef<T>) -> Result<Self> {
        if !space.is_dyadic() {
            return Err(Error::InvalidParameter("cofinite unit ball needs a dyadic space".into()));
        }
        let fine = SigmaAlgebra::fine(space)?;
        Ok(Self {
            fine: fine.clone(),
            coarse: fine,
            shape: SetShape::CofiniteUnitBall,
            absorb_hint: None,
        })
    }

    pub fn global_polytope(fine: &SigmaAlgebra<T>, facets: Vec<Facet<T>>) -> Result<Self> {
        let dim = fine.space().fine_count();
        if facets.iter().any(|f| f.normal.len() != dim) {
            return Err(Error::InvalidParameter("global facet dimension mismatch".into()));
        }
        Ok(Self {
            fine: fine.clone(),
            coarse: fine.clone(),
            shape: SetShape::GlobalPolytope { facets },
            absorb_hint: None,
        })
    }

    pub fn fine(&self) -> &SigmaAlgebra<T> {
        &self.fine
    }

    pub fn coarse(&self) -> &SigmaAlgebra<T> {
        &self.coarse
    }

    pub fn shape(&self) -> &SetShape<T> {
        &self.shape
    }

    pub fn space(&self) -> &SpaceRef<T> {
        self.fine.space()
    }

    pub fn structural_flags(&self) -> SetFlags {
        match &self.shape {
            SetShape::CellPolytope { .. } => {
                SetFlags { convex: Some(true), balanced: None, absorbent: None, local: true }
            }
            SetShape::CellHull { .. } => {
                SetFlags { convex: Some(true), balanced: None, absorbent: None, local: true }
            }
            SetShape::NormBall { .. } => SetFlags {
                convex: Some(true),
                balanced: Some(true),
                absorbent: Some(true),
                local: true,
            },
            SetShape::FiniteSet { .. } => {
                SetFlags { convex: None, balanced: None, absorbent: None, local: false }
            }
            SetShape::CofiniteUnitBall => SetFlags {
                convex: Some(true),
                balanced: Some(true),
                absorbent: Some(true),
                local: false,
            },
            SetShape::GlobalPolytope { .. } => {
                SetFlags { convex: Some(true), balanced: None, absorbent: None, local: false }
            }
        }
    }

    pub fn is_local(&self) -> bool {
        self.structural_flags().local
    }

    /// Fine-value section of `x` on a coarse cell.
    pub fn section_of(&self, x: &RandomVariable<T>, cell: usize) -> Vec<T> {
        self.coarse
            .cell_fines(cell)
            .iter()
            .map(|&f| x.value_on_fine(f).clone())
            .collect()
    }

    /// Cellwise membership oracle; None when the shape is not local.
    pub fn local_member(&self, cell: usize, section: &[T]) -> Option<Result<bool>> {
        match &self.shape {
            SetShape::CellPolytope { facets } => {
                Some(Ok(facets[cell].iter().all(|f| f.holds(section))))
            }
            SetShape::CellHull { generators } => {
                let gens: Vec<Vec<T>> = generators
                    .iter()
                    .map(|g| self.section_of(g, cell))
                    .collect();
                Some(hull_membership(&gens, section).map(|w| w.is_some()))
            }
            SetShape::NormBall { radius } => {
                // section norm² ≤ r² on the cell
                let mut acc = T::zero();
                for (&f, v) in self.coarse.cell_fines(cell).iter().zip(section) {
                    acc = acc + v.clone() * v.clone() * self.fine.space().fine_prob(f);
                }
                let norm_sq = acc / self.coarse.cell_prob(cell);
                let r = radius.value(cell);
                Some(Ok(norm_sq <= r.clone() * r.clone()))
            }
            SetShape::FiniteSet { .. }
            | SetShape::CofiniteUnitBall
            | SetShape::GlobalPolytope { .. } => None,
        }
    }

    /// Scope of a membership decision for elements carrying usable tails.
    pub fn membership_scope(&self, x: &RandomVariable<T>) -> Scope {
        let Some(d) = self.space().as_dyadic() else {
            return Scope::Exact;
        };
        let blocks = d.block_count();
        match &self.shape {
            // realized-cell descriptions say nothing about tail blocks
            SetShape::CellPolytope { .. }
            | SetShape::CellHull { .. }
            | SetShape::GlobalPolytope { .. } => Scope::PrefixOnly { blocks },
            SetShape::NormBall { .. } | SetShape::FiniteSet { .. } | SetShape::CofiniteUnitBall => {
                if x.tail().is_some() {
                    Scope::Exact
                } else {
                    Scope::PrefixOnly { blocks }
                }
            }
        }
    }

    /// Global membership. Tails are consulted where the shape models them;
    /// see `membership_scope` for what the answer covers.
    pub fn member(&self, x: &RandomVariable<T>) -> Result<bool> {
        if x.algebra().space() != self.fine.space() {
            return Err(Error::IncompatibleOperands("element on another space".into()));
        }
        match &self.shape {
            SetShape::CellPolytope { .. } | SetShape::CellHull { .. } | SetShape::NormBall { .. } => {
                for cell in 0..self.coarse.cell_count() {
                    let section = self.section_of(x, cell);
                    match self.local_member(cell, &section).expect("local shape") {
                        Ok(true) => {}
                        Ok(false) => return Ok(false),
                        Err(e) => return Err(e),
                    }
                }
                if let (SetShape::NormBall { radius }, Some(_)) = (&self.shape, x.tail()) {
                    // tail: ‖X‖² ≤ r² symbolically when both rules square
                    let norm_sq = crate::condnorm::conditional_l2_norm_sq(x, &self.coarse)?;
                    if let (Some(n_t), Some(r_t)) = (norm_sq.tail(), radius.tail()) {
                        if let Some(r_sq) = r_t.square() {
                            let m = self.space().as_dyadic().unwrap().block_count();
                            if let Some(ok) = r_sq.compare(n_t, false, m) {
                                return Ok(ok);
                            }
                        }
                        return Err(Error::TailUndecidable("ball tail comparison".into()));
                    }
                }
                Ok(true)
            }
            SetShape::FiniteSet { members } => {
                for member in members {
                    if x.eq_pointwise(member)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            SetShape::CofiniteUnitBall => {
                // finitely many realized violations never matter; the tail decides
                match x.tail() {
                    Some(t) => Ok(t.abs_le_one_cofinitely()),
                    None => Err(Error::TailUndecidable(
                        "cofinite bound needs a tail rule".into(),
                    )),
                }
            }
            SetShape::GlobalPolytope { facets } => {
                let all: Vec<T> = (0..self.fine.space().fine_count())
                    .map(|f| x.value_on_fine(f).clone())
                    .collect();
                Ok(facets.iter().all(|f| f.holds(&all)))
            }
        }
    }

    /// Minkowski sum with a closed form per shape pair.
    pub fn minkowski_sum(&self, other: &Self) -> Result<Self> {
        if self.fine != other.fine || self.coarse != other.coarse {
            return Err(Error::IncompatibleOperands("sets on different algebras".into()));
        }
        match (&self.shape, &other.shape) {
            (SetShape::NormBall { radius: r1 }, SetShape::NormBall { radius: r2 }) => {
                Self::norm_ball(&self.fine, &self.coarse, r1.add(r2)?)
            }
            (SetShape::FiniteSet { members: a }, SetShape::FiniteSet { members: b }) => {
                let mut sums = Vec::new();
                for x in a {
                    for y in b {
                        sums.push(x.add(y)?);
                    }
                }
                Self::finite_set(&self.fine, &self.coarse, sums)
            }
            (SetShape::CellHull { generators: a }, SetShape::CellHull { generators: b }) => {
                // hull(A) + hull(B) = hull of pairwise sums
                let mut sums = Vec::new();
                for x in a {
                    for y in b {
                        sums.push(x.add(y)?);
                    }
                }
                Self::cell_hull(&self.fine, &self.coarse, sums)
            }
            _ => Err(Error::InvalidParameter(
                "no closed-form Minkowski sum for this shape pair".into(),
            )),
        }
    }
}

/// Exact gauge bracket per coarse cell.
#[derive(Debug, Clone)]
pub struct GaugeValue<T> {
    pub lower: ExtRandomVariable<T>,
    pub upper: ExtRandomVariable<T>,
    pub exact: bool,
}

impl<T: Scalar> GaugeValue<T> {
    pub fn exact_values(&self) -> Option<RandomVariable<T>> {
        if self.exact {
            self.lower.as_finite()
        } else {
            None
        }
    }
}

/// p_K(X) = essinf{Y > 0 : X ∈ YK}.
///
/// Requires 0 ∈ K together with convexity, which makes y ↦ [X ∈ yK]
/// monotone — the basis for both evaluation paths. Per-cell polytopes are
/// evaluated exactly as the max of facet ratios; other local shapes get a
/// bisection bracket of width ≤ tol. Cells where no scaling absorbs X
/// report +∞.
pub fn gauge<T: Scalar>(
    set: &L0ConvexSet<T>,
    x: &RandomVariable<T>,
    tol: &T,
) -> Result<GaugeValue<T>> {
    if !set.is_local() {
        return Err(Error::PreconditionViolation(
            "gauge evaluation needs a cellwise-local membership oracle".into(),
        ));
    }
    if !tol.is_positive() {
        return Err(Error::InvalidParameter("tolerance must be > 0".into()));
    }
    if !set.member(&RandomVariable::zero(set.fine()))? {
        return Err(Error::PreconditionViolation("gauge needs 0 ∈ K".into()));
    }

    if let SetShape::CellPolytope { facets } = set.shape() {
        let mut lower = Vec::new();
        for cell in 0..set.coarse().cell_count() {
            let section = set.section_of(x, cell);
            let mut best = T::zero();
            let mut unbounded = false;
            for f in &facets[cell] {
                if !f.offset.is_positive() {
                    // a facet through 0: absorbency fails off its hyperplane
                    if f.value(&section).is_positive() {
                        unbounded = true;
                    }
                    continue;
                }
                let ratio = f.value(&section) / f.offset.clone();
                if ratio > best {
                    best = ratio;
                }
            }
            lower.push(if unbounded { Ext::PosInf } else { Ext::Fin(best) });
        }
        let ext = ExtRandomVariable::from_values(set.coarse(), lower, None)?;
        return Ok(GaugeValue { lower: ext.clone(), upper: ext, exact: true });
    }

    gauge_bisect(set, x, tol)
}

/// Membership-oracle gauge bracketing: per-cell bisection down to width
/// ≤ tol. Works for every cellwise-local shape, including polytopes, where
/// it serves as an independent route against the exact facet formula.
pub fn gauge_bisect<T: Scalar>(
    set: &L0ConvexSet<T>,
    x: &RandomVariable<T>,
    tol: &T,
) -> Result<GaugeValue<T>> {
    if !set.is_local() {
        return Err(Error::PreconditionViolation(
            "gauge bisection needs a cellwise-local membership oracle".into(),
        ));
    }
    if !tol.is_positive() {
        return Err(Error::InvalidParameter("tolerance must be > 0".into()));
    }
    let mut lowers = Vec::new();
    let mut uppers = Vec::new();
    for cell in 0..set.coarse().cell_count() {
        let section = set.section_of(x, cell);
        if section.iter().all(|v| v.is_zero()) {
            lowers.push(Ext::Fin(T::zero()));
            uppers.push(Ext::Fin(T::zero()));
            continue;
        }
        let in_scaled = |y: &T| -> Result<bool> {
            let scaled: Vec<T> = section.iter().map(|v| v.clone() / y.clone()).collect();
            set.local_member(cell, &scaled).expect("local shape")
        };
        // find an absorbing power of two
        let mut hi = set.absorb_hint.clone().unwrap_or_else(T::one);
        let mut found = false;
        for _ in 0..64 {
            if in_scaled(&hi)? {
                found = true;
                break;
            }
            hi = hi.clone() + hi;
        }
        if !found {
            lowers.push(Ext::PosInf);
            uppers.push(Ext::PosInf);
            continue;
        }
        let mut lo = T::zero();
        while hi.clone() - lo.clone() > *tol {
            let mid = (hi.clone() + lo.clone()) / T::from_int(2);
            if in_scaled(&mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lowers.push(Ext::Fin(lo));
        uppers.push(Ext::Fin(hi));
    }
    Ok(GaugeValue {
        lower: ExtRandomVariable::from_values(set.coarse(), lowers, None)?,
        upper: ExtRandomVariable::from_values(set.coarse(), uppers, None)?,
        exact: false,
    })
}

/// Independent gauge oracle: sweep a fixed grid of positive scalings per
/// cell and report the tightest [largest failing, smallest succeeding]
/// bracket. Used to cross-check `gauge`; shares nothing with its bisection.
///
/// Sets without a local oracle get the uniform-scaling sweep instead: one
/// global bracket from `member(X/y)`, broadcast across cells. That is the
/// only bracketing on offer for such sets.
pub fn gauge_bruteforce<T: Scalar>(
    set: &L0ConvexSet<T>,
    x: &RandomVariable<T>,
    grid: &[T],
) -> Result<GaugeValue<T>> {
    if grid.is_empty() || grid.iter().any(|g| !g.is_positive()) {
        return Err(Error::InvalidParameter("grid must be strictly positive".into()));
    }
    let mut sorted = grid.to_vec();
    sorted.sort();
    if !set.is_local() {
        let mut largest_fail: Option<T> = None;
        let mut smallest_pass: Option<T> = None;
        for y in &sorted {
            let scaled = x.scale(&(T::one() / y.clone()));
            match set.member(&scaled) {
                Ok(true) => {
                    smallest_pass = Some(y.clone());
                    break;
                }
                Ok(false) => largest_fail = Some(y.clone()),
                Err(e) => return Err(e),
            }
        }
        let cells = set.coarse().cell_count();
        let lo = Ext::Fin(largest_fail.unwrap_or_else(T::zero));
        let hi = smallest_pass.map(Ext::Fin).unwrap_or(Ext::PosInf);
        return Ok(GaugeValue {
            lower: ExtRandomVariable::from_values(set.coarse(), vec![lo; cells], None)?,
            upper: ExtRandomVariable::from_values(set.coarse(), vec![hi; cells], None)?,
            exact: false,
        });
    }
    let mut lowers = Vec::new();
    let mut uppers = Vec::new();
    for cell in 0..set.coarse().cell_count() {
        let section = set.section_of(x, cell);
        let mut largest_fail: Option<T> = None;
        let mut smallest_pass: Option<T> = None;
        for y in &sorted {
            let scaled: Vec<T> = section.iter().map(|v| v.clone() / y.clone()).collect();
            let inside = set.local_member(cell, &scaled).expect("local shape")?;
            if inside {
                smallest_pass = Some(y.clone());
                break;
            } else {
                largest_fail = Some(y.clone());
            }
        }
        lowers.push(Ext::Fin(largest_fail.unwrap_or_else(T::zero)));
        uppers.push(match smallest_pass {
            Some(y) => Ext::Fin(y),
            None => Ext::PosInf, // every grid point fails: bracket open above
        });
    }
    Ok(GaugeValue {
        lower: ExtRandomVariable::from_values(set.coarse(), lowers, None)?,
        upper: ExtRandomVariable::from_values(set.coarse(), uppers, None)?,
        exact: false,
    })
}

#[derive(Debug, Clone)]
pub enum CheckOutcome {
    Pass,
    Fail { witness: String },
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CheckOutcome::Pass)
    }
}

#[derive(Debug, Clone)]
pub struct ConvexityReport {
    pub convex: CheckOutcome,
    pub absorbent: CheckOutcome,
    pub balanced: CheckOutcome,
    pub trials: usize,
    pub seed: u64,
}

/// Randomized check of the three convexity axioms with a deterministic seed.
/// Convexity uses sampled member pairs against cellwise-varying coefficients
/// in [0,1]; absorbency searches powers of two per element; balancedness
/// scales members by sampled |Y| ≤ 1. Witnesses are re-verified before being
/// reported.
pub fn check_convex_absorbent_balanced<T: Scalar>(
    set: &L0ConvexSet<T>,
    trials: usize,
    seed: u64,
) -> Result<ConvexityReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be ≥ 1".into()));
    }
    let mut sampler = crate::sample::Sampler::new(seed);
    let fine = set.fine().clone();
    let coarse = set.coarse().clone();

    // harvest member samples by halving arbitrary elements into the set
    let mut members = Vec::new();
    if let SetShape::CellHull { generators } | SetShape::FiniteSet { members: generators } =
        set.shape()
    {
        members.extend(generators.iter().cloned());
    }
    let mut attempts = 0;
    while members.len() < trials.min(24) && attempts < 8 * trials {
        attempts += 1;
        let mut x = sampler.rv(&fine, 8, 2);
        let mut ok = false;
        for _ in 0..24 {
            if set.member(&x)? {
                ok = true;
                break;
            }
            x = x.scale(&T::ratio(1, 2));
        }
        if ok {
            members.push(x);
        }
    }
    if members.is_empty() {
        return Err(Error::AbsorbencyFailure(
            "no member samples found; set appears empty around 0".into(),
        ));
    }

    let mut convex = CheckOutcome::Pass;
    for _ in 0..trials {
        let x1 = &members[sampler.index(members.len())];
        let x2 = &members[sampler.index(members.len())];
        let y = sampler.rv_unit(&coarse, 4);
        let combo = y
            .mul(x1)?
            .add(&RandomVariable::constant(&coarse, T::one()).sub(&y)?.mul(x2)?)?;
        let inside = match set.member(&combo) {
            Ok(b) => b,
            Err(Error::TailUndecidable(_)) => true, // realized part re-checked below
            Err(e) => return Err(e),
        };
        if !inside {
            // re-verify before reporting
            debug_assert!(!set.member(&combo)?);
            convex = CheckOutcome::Fail {
                witness: format!(
                    "Y={} X1={} X2={} combo={}",
                    y.describe(),
                    x1.describe(),
                    x2.describe(),
                    combo.describe()
                ),
            };
            break;
        }
    }

    let mut absorbent = CheckOutcome::Pass;
    for _ in 0..trials {
        let x = sampler.rv(&fine, 8, 2);
        let mut y = T::one();
        let mut absorbed = false;
        for _ in 0..64 {
            if set.member(&x.scale(&(T::one() / y.clone())))? {
                absorbed = true;
                break;
            }
            y = y.clone() + y;
        }
        if !absorbed {
            absorbent = CheckOutcome::Fail { witness: format!("X={}", x.describe()) };
            break;
        }
    }

    let mut balanced = CheckOutcome::Pass;
    'outer: for _ in 0..trials {
        let x = &members[sampler.index(members.len())];
        // |Y| ≤ 1 with cellwise-varying sign
        let y = {
            let u = sampler.rv_unit::<T>(&coarse, 4);
            let flip = sampler.rv_unit::<T>(&coarse, 1).map(
                |v| {
                    if v <= &T::ratio(1, 2) {
                        -T::one()
                    } else {
                        T::one()
                    }
                },
                |_| Some(TailRule::Const(T::one())),
            );
            u.mul(&flip)?
        };
        let scaled = y.mul(x)?;
        let inside = match set.member(&scaled) {
            Ok(b) => b,
            Err(Error::TailUndecidable(_)) => true,
            Err(e) => return Err(e),
        };
        if !inside {
            balanced = CheckOutcome::Fail {
                witness: format!("Y={} X={} YX={}", y.describe(), x.describe(), scaled.describe()),
            };
            break 'outer;
        }
    }

    Ok(ConvexityReport { convex, absorbent, balanced, trials, seed })
}

#[derive(Debug, Clone)]
pub struct SublevelSample {
    pub label: String,
    pub in_closure: bool,
    pub gauge_at_most_one: bool,
}

#[derive(Debug, Clone)]
pub struct SublevelReport {
    /// 0 is interior (a ball around 0 fits inside K), so the gauge is
    /// continuous and the closure/sublevel relation is asserted.
    pub zero_interior: bool,
    pub interior_radius: Option<String>,
    /// closure = {p ≤ 1} on every sampled element (only asserted with rcc)
    pub equality_on_samples: Option<bool>,
    pub samples: Vec<SublevelSample>,
    /// the degenerate case: sublevel strictly larger than the (closed) set
    pub strict_inclusion_witness: Option<String>,
    pub note: String,
}

/// Checks C̄ = {X : p_C(X) ≤ 1} over a deterministic sample grid.
///
/// Closure membership is established by the net test: X ∈ (1+δ)·C for every
/// δ in a decreasing dyadic sweep (the scaled net X/Y_δ drives X into the
/// closure), plus direct membership. For per-cell polytopes both sides are
/// exact. Without a local membership oracle the relation is reported, not
/// asserted: the cofinite unit ball exhibits the strict inclusion.
pub fn sublevel_closure_check<T: Scalar>(
    set: &L0ConvexSet<T>,
    seed: u64,
) -> Result<SublevelReport> {
    if let SetShape::CofiniteUnitBall = set.shape() {
        // p ≡ 0, so the unit sublevel set is the whole module while the set
        // itself misses e.g. the constant 2
        let two = RandomVariable::constant(set.fine(), T::from_int(2));
        let deltas: Vec<T> = (0..=6).map(|j| T::pow2(-j)).collect();
        let cert = gauge_degenerate_scenario(set, &two, &deltas)?;
        let in_set = set.member(&two)?;
        return Ok(SublevelReport {
            zero_interior: true,
            interior_radius: Some("1".into()),
            equality_on_samples: Some(false),
            samples: vec![SublevelSample {
                label: "constant 2".into(),
                in_closure: in_set,
                gauge_at_most_one: cert.gauge_upper_bound <= T::one(),
            }],
            strict_inclusion_witness: Some(format!(
                "X ≡ 2 has gauge ≤ {} yet is not a member; sublevel set is the whole module",
                cert.gauge_upper_bound
            )),
            note: "set lacks the concatenation property; equality fails as documented".into(),
        });
    }

    if !set.is_local() {
        return Err(Error::PreconditionViolation(
            "closure/sublevel check needs a local membership oracle".into(),
        ));
    }

    let interior = interior_ball_radius(set)?;
    let Some(radius) = interior else {
        return Ok(SublevelReport {
            zero_interior: false,
            interior_radius: None,
            equality_on_samples: None,
            samples: Vec::new(),
            strict_inclusion_witness: None,
            note: "0 not interior: gauge not continuous; equality not asserted".into(),
        });
    };

    // deterministic samples: seeded elements, scaled members, boundary points
    let mut sampler = crate::sample::Sampler::new(seed);
    let mut samples: Vec<(String, RandomVariable<T>)> = Vec::new();
    for i in 0..12 {
        samples.push((format!("seeded-{i}"), sampler.rv(set.fine(), 6, 2)));
    }
    for (i, scale) in [(0, T::ratio(1, 2)), (1, T::one()), (2, T::ratio(3, 2))] {
        let x = sampler.rv::<T>(set.fine(), 4, 2).scale(&scale);
        samples.push((format!("scaled-{i}"), x));
    }
    samples.push(("zero".into(), RandomVariable::zero(set.fine())));

    let mut outcomes = Vec::new();
    let mut equal = true;
    let tol = T::pow2(-20);
    for (label, x) in samples {
        let g = gauge(set, &x, &tol)?;
        // decide p ≤ 1 exactly where possible, else by bracket
        let at_most_one = match (&g.exact, g.lower.values()) {
            (true, vals) => vals.iter().all(|v| *v <= Ext::Fin(T::one())),
            (false, _) => {
                let one = Ext::Fin(T::one());
                let lower_ok = g.lower.values().iter().all(|v| *v <= one);
                let upper_ok = g.upper.values().iter().all(|v| *v <= one);
                if lower_ok != upper_ok {
                    // bracket straddles 1: tighten by direct membership
                    set.member(&x)?
                } else {
                    upper_ok
                }
            }
        };
        let in_closure = closure_member_by_net(set, &x)?;
        if at_most_one != in_closure {
            equal = false;
        }
        outcomes.push(SublevelSample { label, in_closure, gauge_at_most_one: at_most_one });
    }

    Ok(SublevelReport {
        zero_interior: true,
        interior_radius: Some(radius.to_string()),
        equality_on_samples: Some(equal),
        samples: outcomes,
        strict_inclusion_witness: None,
        note: if equal {
            "closure coincides with the unit sublevel set on every sample".into()
        } else {
            "discrepancy found; set may lack the concatenation property".into()
        },
    })
}

/// Net-based closure membership: direct membership, or X ∈ (1+2^-j)·K for a
/// full decreasing sweep of dyadic enlargements.
pub fn closure_member_by_net<T: Scalar>(
    set: &L0ConvexSet<T>,
    x: &RandomVariable<T>,
) -> Result<bool> {
    if set.member(x)? {
        return Ok(true);
    }
    for j in 1..=20u32 {
        let y = T::one() + T::pow2(-(j as i32));
        let shrunk = x.scale(&(T::one() / y));
        if !set.member(&shrunk)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A rational ρ > 0 with the ∞-ball of radius ρ inside K, when one exists.
fn interior_ball_radius<T: Scalar>(set: &L0ConvexSet<T>) -> Result<Option<T>> {
    match set.shape() {
        SetShape::CellPolytope { facets } => {
            let mut best: Option<T> = None;
            for cell_facets in facets {
                for f in cell_facets {
                    if !f.offset.is_positive() {
                        return Ok(None);
                    }
                    let weight: T = f
                        .normal
                        .iter()
                        .map(|a| a.abs())
                        .fold(T::zero(), |a, b| a + b);
                    if weight.is_zero() {
                        continue;
                    }
                    let rho = f.offset.clone() / weight;
                    best = Some(match best {
                        None => rho,
                        Some(b) => b.min(rho),
                    });
                }
            }
            Ok(best.or_else(|| Some(T::one())))
        }
        SetShape::NormBall { radius } => {
            Ok(radius.values().iter().min().cloned())
        }
        SetShape::CellHull { .. } => {
            // certify via ± scaled unit sections: if ±ρ·e_i all lie in the
            // hull per cell, the 1-ball of radius ρ does
            let mut rho = T::ratio(1, 2);
            'search: for _ in 0..8 {
                for cell in 0..set.coarse().cell_count() {
                    let dim = set.coarse().cell_fines(cell).len();
                    for i in 0..dim {
                        for sign in [T::one(), -T::one()] {
                            let mut section = vec![T::zero(); dim];
                            section[i] = sign * rho.clone();
                            if !set.local_member(cell, &section).expect("local")? {
                                rho = rho.clone() / T::from_int(2);
                                continue 'search;
                            }
                        }
                    }
                }
                return Ok(Some(rho));
            }
            Ok(None)
        }
        _ => Ok(None),
    }
}

/// Witness family for one δ of the degenerate-gauge construction.
#[derive(Debug, Clone)]
pub struct DegenerateWitness {
    pub delta: String,
    /// indices of the realized family members (the exceptional set grows
    /// with the member index)
    pub members_verified: usize,
    /// essinf of the family equals δ on every realized block, exactly
    pub essinf_is_delta: bool,
    pub scope: Scope,
}

#[derive(Debug, Clone)]
pub struct DegenerateGaugeCertificate<S> {
    pub witnesses: Vec<DegenerateWitness>,
    /// the least δ certified, an upper bound for the gauge of X
    pub gauge_upper_bound: S,
    /// X itself violates the unit bound on infinitely many blocks
    pub not_member: bool,
    pub scope: Scope,
}

/// For each δ builds the family Y_n = δ on blocks ≤ n and max(|X|, δ)
/// beyond, verifies X ∈ Y_n·(cofinite unit ball) with exceptional set
/// {1..n}, and certifies essinf_n Y_n = δ cellwise, concluding p(X) ≤ δ.
/// Additionally decides membership of X itself from its tail rule.
pub fn gauge_degenerate_scenario<S: Scalar>(
    set: &L0ConvexSet<S>,
    x: &RandomVariable<S>,
    deltas: &[S],
) -> Result<DegenerateGaugeCertificate<S>> {
    let SetShape::CofiniteUnitBall = set.shape() else {
        return Err(Error::PreconditionViolation(
            "degenerate-gauge scenario runs on the cofinite unit ball".into(),
        ));
    };
    if deltas.is_empty() || deltas.iter().any(|d| !d.is_positive()) {
        return Err(Error::InvalidParameter("δ sweep must be strictly positive".into()));
    }
    let d = set.space().as_dyadic().expect("dyadic by construction");
    let blocks = d.block_count();
    let fine = set.fine().clone();

    let x_tail = x.tail().cloned();
    let scope = match &x_tail {
        Some(_) => Scope::Exact,
        None => Scope::PrefixOnly { blocks },
    };
    let abs_x = x.abs();

    let mut witnesses = Vec::new();
    let mut best: Option<S> = None;
    for delta in deltas {
        // realized members Y_1..Y_m (+ the all-δ member), each verified
        let mut family = Vec::new();
        for n in 0..=blocks {
            // Y_n: δ on blocks ≤ n, max(|X|, δ) on blocks > n
            let mut values = Vec::with_capacity(fine.cell_count());
            for cell in 0..fine.cell_count() {
                let block = d.block_of_fine(cell);
                values.push(if block <= n {
                    delta.clone()
                } else {
                    abs_x.value(cell).clone().max(delta.clone())
                });
            }
            let tail = match (&x_tail, n == blocks) {
                // beyond the prefix the rule is max(|X|, δ): constant when
                // X's tail is; for the final member it is δ on realized
                // blocks but still max(|X|, δ) on tail blocks
                (Some(t), _) => {
                    let abs_t = t.abs();
                    match &abs_t {
                        TailRule::Const(c) => {
                            Some(TailRule::Const(c.clone().max(delta.clone())))
                        }
                        TailRule::BlockDyadic(_) | TailRule::Rademacher { .. } => {
                            // |tail| ≤ max bound: collapse conservatively to
                            // max(1, δ) for ±1 patterns; dyadic rules shrink
                            // below δ so the max is δ
                            match abs_t.compare(&TailRule::Const(delta.clone()), false, blocks) {
                                Some(true) => None, // varying max: not representable
                                Some(false) | None => Some(TailRule::Const(delta.clone())),
                            }
                        }
                    }
                }
                (None, _) => None,
            };
            let y = RandomVariable::from_values(&fine, values, tail)?;
            // strict positivity of the scaling
            debug_assert!(y.compare_realized(&RandomVariable::zero(&fine), CompareMode::Gt)?);
            // verify X ∈ Y_n·U: |X/Y_n| ≤ 1 away from blocks ≤ n
            let ratio = x.div(&y)?.abs();
            for cell in 0..fine.cell_count() {
                let block = d.block_of_fine(cell);
                if block > n && ratio.value(cell) > &S::one() {
                    return Err(Error::OracleViolation(format!(
                        "witness family violates the unit bound on block {block}"
                    )));
                }
            }
            if let Some(rt) = ratio.tail() {
                if !rt.abs_le_one_cofinitely() {
                    return Err(Error::OracleViolation(
                        "witness family violates the unit bound on the tail".into(),
                    ));
                }
            }
            family.push(y);
        }
        // essinf over the family is δ on every realized cell
        let inf = crate::order::essinf(&family)?;
        let delta_rv = RandomVariable::constant(&fine, delta.clone());
        let essinf_is_delta = inf.eq_realized(&delta_rv)?;
        if !essinf_is_delta {
            return Err(Error::OracleViolation("family infimum missed δ".into()));
        }
        witnesses.push(DegenerateWitness {
            delta: delta.to_string(),
            members_verified: family.len(),
            essinf_is_delta,
            scope,
        });
        best = Some(match best {
            None => delta.clone(),
            Some(b) => b.min(delta.clone()),
        });
    }

    // membership of X itself: decided by tail inspection
    let not_member = match &x_tail {
        Some(t) => t.abs_gt_one_infinitely(),
        None => false,
    };

    Ok(DegenerateGaugeCertificate {
        witnesses,
        gauge_upper_bound: best.expect("nonempty sweep"),
        not_member,
        scope,
    })
}
