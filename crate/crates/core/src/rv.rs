//! Random variables as exact step functions, the a.s. order, and lattice
//! operations.
//!
//! A [`RandomVariable`] is constant on each cell of its σ-algebra. On lazy
//! dyadic spaces it optionally carries a [`TailRule`]; a variable without one
//! is only defined on the realized prefix and any operation that would need
//! the tail reports that instead of guessing.

use crate::error::{Error, Result};
use crate::scalar::{Ext, Scalar};
use crate::space::{EventSet, SigmaAlgebra, TailRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareMode {
    Geq,
    Gt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeOp {
    Meet,
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomVariable<T> {
    algebra: SigmaAlgebra<T>,
    values: Vec<T>,
    tail: Option<TailRule<T>>,
}

impl<T: Scalar> RandomVariable<T> {
    pub fn from_values(
        algebra: &SigmaAlgebra<T>,
        values: Vec<T>,
        tail: Option<TailRule<T>>,
    ) -> Result<Self> {
        if values.len() != algebra.cell_count() {
            return Err(Error::ArityMismatch {
                expected: algebra.cell_count(),
                got: values.len(),
            });
        }
        if tail.is_some() && !algebra.space().is_dyadic() {
            return Err(Error::InvalidParameter("finite spaces have no tail".into()));
        }
        Ok(Self { algebra: algebra.clone(), values, tail })
    }

    pub fn constant(algebra: &SigmaAlgebra<T>, c: T) -> Self {
        let tail = algebra.space().is_dyadic().then(|| TailRule::Const(c.clone()));
        Self {
            algebra: algebra.clone(),
            values: vec![c; algebra.cell_count()],
            tail,
        }
    }

    pub fn zero(algebra: &SigmaAlgebra<T>) -> Self {
        Self::constant(algebra, T::zero())
    }

    /// The indicator 1_A on A's own algebra.
    pub fn indicator(event: &EventSet<T>) -> Self {
        let algebra = event.algebra().clone();
        let mut values = vec![T::zero(); algebra.cell_count()];
        for &c in event.cells() {
            values[c] = T::one();
        }
        let tail = algebra.space().is_dyadic().then(|| {
            TailRule::Const(if event.includes_tail() { T::one() } else { T::zero() })
        });
        Self { algebra, values, tail }
    }

    pub fn algebra(&self) -> &SigmaAlgebra<T> {
        &self.algebra
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, cell: usize) -> &T {
        &self.values[cell]
    }

    pub fn tail(&self) -> Option<&TailRule<T>> {
        self.tail.as_ref()
    }

    pub fn with_tail(mut self, tail: Option<TailRule<T>>) -> Self {
        self.tail = tail;
        self
    }

    /// Value at a realized fine atom, resolving through the algebra.
    pub fn value_on_fine(&self, fine: usize) -> &T {
        &self.values[self.algebra.fine_to_cell(fine)]
    }

    fn tail_blocks(&self) -> u32 {
        self.algebra
            .space()
            .as_dyadic()
            .map(|d| d.block_count())
            .unwrap_or(0)
    }

    /// Applies `f` cellwise and `tf` to the tails.
    pub fn map<F, G>(&self, f: F, tf: G) -> Self
    where
        F: Fn(&T) -> T,
        G: Fn(&TailRule<T>) -> Option<TailRule<T>>,
    {
        Self {
            algebra: self.algebra.clone(),
            values: self.values.iter().map(&f).collect(),
            tail: self.tail.as_ref().and_then(tf),
        }
    }

    /// The finer of the two algebras, where both variables are measurable.
    fn align<'a>(&'a self, other: &'a Self) -> Result<&'a SigmaAlgebra<T>> {
        if self.algebra == other.algebra || other.algebra.refines(&self.algebra) {
            Ok(&other.algebra)
        } else if self.algebra.refines(&other.algebra) {
            Ok(&self.algebra)
        } else {
            Err(Error::IncompatibleOperands(
                "random variables on incomparable algebras".into(),
            ))
        }
    }

    pub fn zip_with<F, G>(&self, other: &Self, f: F, tf: G) -> Result<Self>
    where
        F: Fn(&T, &T) -> T,
        G: Fn(&TailRule<T>, &TailRule<T>) -> Option<TailRule<T>>,
    {
        let algebra = self.align(other)?.clone();
        let values = (0..algebra.cell_count())
            .map(|c| {
                let fine = algebra.cell_fines(c)[0];
                f(self.value_on_fine(fine), other.value_on_fine(fine))
            })
            .collect();
        let tail = match (&self.tail, &other.tail) {
            (Some(a), Some(b)) => tf(a, b),
            _ if !algebra.space().is_dyadic() => None,
            _ => None,
        };
        Ok(Self { algebra, values, tail })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone(), |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone(), |a, b| a.sub(b))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() * b.clone(), |a, b| a.mul(b))
    }

    /// Pointwise division; the divisor must be nonzero on every realized cell.
    pub fn div(&self, other: &Self) -> Result<Self> {
        let algebra = self.align(other)?.clone();
        for c in 0..algebra.cell_count() {
            let fine = algebra.cell_fines(c)[0];
            if other.value_on_fine(fine).is_zero() {
                return Err(Error::InvalidParameter("division by a zero cell".into()));
            }
        }
        self.zip_with(other, |a, b| a.clone() / b.clone(), |a, b| a.div(b))
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v.clone(), |t| t.neg())
    }

    pub fn scale(&self, s: &T) -> Self {
        let srule = TailRule::Const(s.clone());
        self.map(|v| v.clone() * s.clone(), |t| srule.mul(t))
    }

    pub fn abs(&self) -> Self {
        self.map(|v| v.abs(), |t| Some(t.abs()))
    }

    pub fn square(&self) -> Self {
        self.map(|v| v.clone() * v.clone(), |t| t.square())
    }

    /// X·1_A. Outside the event the value is exactly 0, so the tail stays
    /// representable even when the event drops it.
    pub fn restrict(&self, event: &EventSet<T>) -> Result<Self> {
        if event.algebra().space() != self.algebra.space() {
            return Err(Error::IncompatibleOperands("event on another space".into()));
        }
        // fine atoms covered by the event
        let mut keep = vec![false; self.algebra.space().fine_count()];
        for &c in event.cells() {
            for f in event.algebra().cell_fines(c) {
                keep[f] = true;
            }
        }
        let out_alg = if event.algebra().refines(&self.algebra) {
            event.algebra().clone()
        } else {
            self.algebra.clone()
        };
        // the event must not cut through an output cell
        for c in 0..out_alg.cell_count() {
            let fines = out_alg.cell_fines(c);
            if fines.iter().any(|&f| keep[f] != keep[fines[0]]) {
                return Err(Error::IncompatibleOperands(
                    "event is not measurable against the output algebra".into(),
                ));
            }
        }
        let values = (0..out_alg.cell_count())
            .map(|c| {
                let fine = out_alg.cell_fines(c)[0];
                if keep[fine] {
                    self.value_on_fine(fine).clone()
                } else {
                    T::zero()
                }
            })
            .collect();
        let tail = if !out_alg.space().is_dyadic() {
            None
        } else if event.includes_tail() {
            self.tail.clone()
        } else {
            Some(TailRule::zero())
        };
        Ok(Self { algebra: out_alg, values, tail })
    }

    /// Decides X ≥ Y (or X > Y) almost surely, optionally restricted to a
    /// positive-measure event. Exact, no tolerance; errors if the tail part
    /// would be needed but is not symbolically decidable.
    pub fn compare(&self, other: &Self, mode: CompareMode, on: Option<&EventSet<T>>) -> Result<bool> {
        let algebra = self.align(other)?;
        let strict = mode == CompareMode::Gt;
        let (fines, tail_needed): (Vec<usize>, bool) = match on {
            None => ((0..algebra.space().fine_count()).collect(), algebra.space().is_dyadic()),
            Some(ev) => {
                if ev.algebra().space() != algebra.space() {
                    return Err(Error::IncompatibleOperands("event on another space".into()));
                }
                if !ev.is_positive() {
                    return Err(Error::InvalidParameter(
                        "restriction event must have positive measure".into(),
                    ));
                }
                let mut fines = Vec::new();
                for &c in ev.cells() {
                    fines.extend(ev.algebra().cell_fines(c));
                }
                (fines, ev.includes_tail())
            }
        };
        for f in fines {
            let (a, b) = (self.value_on_fine(f), other.value_on_fine(f));
            let ok = if strict { a > b } else { a >= b };
            if !ok {
                return Ok(false);
            }
        }
        if tail_needed {
            let m = self.tail_blocks();
            match (&self.tail, &other.tail) {
                (Some(a), Some(b)) => match a.compare(b, strict, m) {
                    Some(ans) => return Ok(ans),
                    None => {
                        return Err(Error::TailUndecidable(format!(
                            "compare {} vs {}",
                            a.describe(),
                            b.describe()
                        )))
                    }
                },
                _ => {
                    return Err(Error::TailUndecidable(
                        "operand without a tail rule".into(),
                    ))
                }
            }
        }
        Ok(true)
    }

    /// Comparison over the realized prefix only, ignoring any tail.
    pub fn compare_realized(&self, other: &Self, mode: CompareMode) -> Result<bool> {
        let algebra = self.align(other)?;
        let strict = mode == CompareMode::Gt;
        for f in 0..algebra.space().fine_count() {
            let (a, b) = (self.value_on_fine(f), other.value_on_fine(f));
            if !(if strict { a > b } else { a >= b }) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Pointwise equality as functions (algebras may differ in resolution).
    pub fn eq_pointwise(&self, other: &Self) -> Result<bool> {
        let algebra = self.align(other)?;
        for f in 0..algebra.space().fine_count() {
            if self.value_on_fine(f) != other.value_on_fine(f) {
                return Ok(false);
            }
        }
        if algebra.space().is_dyadic() {
            match (&self.tail, &other.tail) {
                (Some(a), Some(b)) => {
                    let m = self.tail_blocks();
                    match (a.compare(b, false, m), b.compare(a, false, m)) {
                        (Some(x), Some(y)) => Ok(x && y),
                        _ => Err(Error::TailUndecidable("equality of tails".into())),
                    }
                }
                _ => Err(Error::TailUndecidable("operand without a tail rule".into())),
            }
        } else {
            Ok(true)
        }
    }

    pub fn eq_realized(&self, other: &Self) -> Result<bool> {
        Ok(self.compare_realized(other, CompareMode::Geq)?
            && other.compare_realized(self, CompareMode::Geq)?)
    }

    pub fn is_nonnegative(&self) -> Result<bool> {
        self.compare(&Self::zero(&self.algebra), CompareMode::Geq, None)
    }

    pub fn is_strictly_positive(&self) -> Result<bool> {
        self.compare(&Self::zero(&self.algebra), CompareMode::Gt, None)
    }

    /// Cellwise meet/join. Equals the indicator gluing 1_A·X + 1_{A^c}·Y over
    /// A = (X < Y) (for the meet); the gluing identity is exercised in tests.
    pub fn lattice(&self, other: &Self, op: LatticeOp) -> Result<Self> {
        let m = self.tail_blocks();
        self.zip_with(
            other,
            |a, b| match op {
                LatticeOp::Meet => a.clone().min(b.clone()),
                LatticeOp::Join => a.clone().max(b.clone()),
            },
            |ta, tb| match op {
                LatticeOp::Meet => ta.meet(tb, m),
                LatticeOp::Join => ta.join(tb, m),
            },
        )
    }

    /// The event (self < other) as a set of cells of the aligned algebra.
    pub fn strictly_below(&self, other: &Self) -> Result<EventSet<T>> {
        let algebra = self.align(other)?.clone();
        let cells = (0..algebra.cell_count())
            .filter(|&c| {
                let fine = algebra.cell_fines(c)[0];
                self.value_on_fine(fine) < other.value_on_fine(fine)
            })
            .collect();
        EventSet::new(&algebra, cells, false)
    }

    pub fn describe(&self) -> String {
        let vals: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        match &self.tail {
            Some(t) => format!("({}); tail: {}", vals.join(","), t.describe()),
            None => format!("({})", vals.join(",")),
        }
    }
}

/// Extended-valued step function (values in L̄⁰). Supports comparison and
/// reporting only; no arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtRandomVariable<T> {
    algebra: SigmaAlgebra<T>,
    values: Vec<Ext<T>>,
    tail: Option<ExtTail<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtTail<T> {
    Finite(TailRule<T>),
    PosInf,
    NegInf,
}

impl<T: Scalar> ExtRandomVariable<T> {
    pub fn from_finite(rv: &RandomVariable<T>) -> Self {
        Self {
            algebra: rv.algebra().clone(),
            values: rv.values().iter().cloned().map(Ext::Fin).collect(),
            tail: rv.tail().cloned().map(ExtTail::Finite),
        }
    }

    pub fn from_values(
        algebra: &SigmaAlgebra<T>,
        values: Vec<Ext<T>>,
        tail: Option<ExtTail<T>>,
    ) -> Result<Self> {
        if values.len() != algebra.cell_count() {
            return Err(Error::ArityMismatch {
                expected: algebra.cell_count(),
                got: values.len(),
            });
        }
        Ok(Self { algebra: algebra.clone(), values, tail })
    }

    pub fn algebra(&self) -> &SigmaAlgebra<T> {
        &self.algebra
    }

    pub fn values(&self) -> &[Ext<T>] {
        &self.values
    }

    pub fn tail(&self) -> Option<&ExtTail<T>> {
        self.tail.as_ref()
    }

    pub fn as_finite(&self) -> Option<RandomVariable<T>> {
        let mut vals = Vec::with_capacity(self.values.len());
        for v in &self.values {
            vals.push(v.finite()?.clone());
        }
        let tail = match &self.tail {
            Some(ExtTail::Finite(t)) => Some(t.clone()),
            Some(_) => return None,
            None => None,
        };
        RandomVariable::from_values(&self.algebra, vals, tail).ok()
    }

    /// Realized-prefix dominance in the extended order.
    pub fn dominates_realized(&self, other: &RandomVariable<T>) -> bool {
        (0..self.values.len()).all(|c| {
            let fines = self.algebra.cell_fines(c);
            fines
                .iter()
                .all(|&f| self.values[c] >= Ext::Fin(other.value_on_fine(f).clone()))
        })
    }

    pub fn describe(&self) -> String {
        let vals: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        format!("({})", vals.join(","))
    }
}
