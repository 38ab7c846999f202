//! Atomic probability spaces, lazy dyadic block spaces, σ-algebras, events,
//! and countable partitions.
//!
//! Two space kinds exist. A [`FiniteAtomicSpace`] is an explicit list of atoms
//! with positive rational probabilities summing to one. A [`DyadicBlockSpace`]
//! models Ω = (0,1) cut into blocks A_n = [2⁻ⁿ, 2⁻ⁿ⁺¹): the first `m` blocks
//! are materialized (each subdivided into 2^d equal fine cells) and everything
//! beyond is governed by a total symbolic [`TailRule`]. Operations either
//! handle the tail symbolically or say so via scope tags / tail errors.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::collections::BTreeSet;
use std::sync::Arc;

/// Total symbolic description of a step function on the unrealized blocks
/// n > m of a dyadic space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailRule<T> {
    /// Constant value c on every tail block.
    Const(T),
    /// Value c·2⁻ⁿ on tail block n (the dyadic ε rule is `BlockDyadic(1)`).
    BlockDyadic(T),
    /// Alternating ±1 pattern of the given index on each tail block.
    Rademacher { index: u32 },
}

impl<T: Scalar> TailRule<T> {
    pub fn zero() -> Self {
        TailRule::Const(T::zero())
    }

    /// Normalizing constructor: a zero scale collapses to the constant rule.
    pub fn block_dyadic(scale: T) -> Self {
        if scale.is_zero() {
            TailRule::Const(T::zero())
        } else {
            TailRule::BlockDyadic(scale)
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, TailRule::Const(c) if c.is_zero())
    }

    pub fn neg(&self) -> Option<Self> {
        match self {
            TailRule::Const(c) => Some(TailRule::Const(-c.clone())),
            TailRule::BlockDyadic(c) => Some(TailRule::BlockDyadic(-c.clone())),
            TailRule::Rademacher { .. } => None,
        }
    }

    /// Pointwise absolute value; total on this family.
    pub fn abs(&self) -> Self {
        match self {
            TailRule::Const(c) => TailRule::Const(c.abs()),
            TailRule::BlockDyadic(c) => TailRule::BlockDyadic(c.abs()),
            TailRule::Rademacher { .. } => TailRule::Const(T::one()),
        }
    }

    pub fn add(&self, other: &Self) -> Option<Self> {
        use TailRule::*;
        match (self, other) {
            (Const(a), Const(b)) => Some(Const(a.clone() + b.clone())),
            (Const(a), r) if a.is_zero() => Some(r.clone()),
            (r, Const(b)) if b.is_zero() => Some(r.clone()),
            (BlockDyadic(a), BlockDyadic(b)) => Some(Self::block_dyadic(a.clone() + b.clone())),
            _ => None,
        }
    }

    pub fn sub(&self, other: &Self) -> Option<Self> {
        self.add(&other.neg()?)
    }

    pub fn mul(&self, other: &Self) -> Option<Self> {
        use TailRule::*;
        match (self, other) {
            (Const(a), _) if a.is_zero() => Some(Self::zero()),
            (_, Const(b)) if b.is_zero() => Some(Self::zero()),
            (Const(a), Const(b)) => Some(Const(a.clone() * b.clone())),
            (Const(a), BlockDyadic(b)) | (BlockDyadic(b), Const(a)) => {
                Some(Self::block_dyadic(a.clone() * b.clone()))
            }
            (Const(a), r @ Rademacher { .. }) | (r @ Rademacher { .. }, Const(a)) => {
                if a.is_one() {
                    Some(r.clone())
                } else {
                    None
                }
            }
            (Rademacher { index: i }, Rademacher { index: j }) if i == j => Some(Const(T::one())),
            _ => None,
        }
    }

    pub fn square(&self) -> Option<Self> {
        match self {
            TailRule::Const(c) => Some(TailRule::Const(c.clone() * c.clone())),
            TailRule::Rademacher { .. } => Some(TailRule::Const(T::one())),
            TailRule::BlockDyadic(_) => None,
        }
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        use TailRule::*;
        match (self, other) {
            (_, Const(b)) if b.is_zero() => None,
            (Const(a), Const(b)) => Some(Const(a.clone() / b.clone())),
            (BlockDyadic(a), Const(b)) => Some(Self::block_dyadic(a.clone() / b.clone())),
            (r @ Rademacher { .. }, Const(b)) if b.is_one() => Some(r.clone()),
            (Rademacher { index: i }, Rademacher { index: j }) if i == j => Some(Const(T::one())),
            _ => None,
        }
    }

    /// Per-block mean of the rule (conditional expectation against the coarse
    /// algebra); total on this family.
    pub fn block_mean(&self) -> Self {
        match self {
            TailRule::Rademacher { .. } => Self::zero(),
            other => other.clone(),
        }
    }

    /// Decides `self ≥ other` (or strict) simultaneously on *all* tail blocks
    /// n > m. `None` means the answer is not symbolically decidable.
    pub fn compare(&self, other: &Self, strict: bool, m: u32) -> Option<bool> {
        use TailRule::*;
        let first = m + 1; // index of the first tail block
        match (self, other) {
            (Const(a), Const(b)) => Some(if strict { a > b } else { a >= b }),
            (BlockDyadic(a), BlockDyadic(b)) => Some(if strict { a > b } else { a >= b }),
            (BlockDyadic(a), Const(d)) => {
                // values a·2⁻ⁿ, n ≥ first
                if a.is_positive() {
                    // decreasing to 0, infimum 0 not attained
                    Some(d <= &T::zero())
                } else {
                    // increasing to 0, minimum attained at n = first
                    let min = a.clone() * T::pow2(-(first as i32));
                    Some(if strict { d < &min } else { d <= &min })
                }
            }
            (Const(d), BlockDyadic(a)) => {
                if a.is_positive() {
                    let max = a.clone() * T::pow2(-(first as i32));
                    Some(if strict { d > &max } else { d >= &max })
                } else {
                    // supremum 0 not attained, so d ≥ 0 suffices even strictly
                    Some(d >= &T::zero())
                }
            }
            (Rademacher { index: i }, Rademacher { index: j }) => {
                if i == j {
                    Some(!strict)
                } else {
                    // distinct patterns disagree on sets of positive measure
                    Some(false)
                }
            }
            (Rademacher { .. }, Const(d)) => Some(if strict {
                d < &(-T::one())
            } else {
                d <= &(-T::one())
            }),
            (Const(d), Rademacher { .. }) => Some(if strict { d > &T::one() } else { d >= &T::one() }),
            // a ±1 pattern can never dominate (or be dominated by) a rule with
            // arbitrarily small positive/negative values on both sign cells
            (Rademacher { .. }, BlockDyadic(_)) | (BlockDyadic(_), Rademacher { .. }) => Some(false),
        }
    }

    /// Pointwise maximum as a rule, when representable.
    pub fn join(&self, other: &Self, m: u32) -> Option<Self> {
        if self.compare(other, false, m)? {
            Some(self.clone())
        } else if other.compare(self, false, m)? {
            Some(other.clone())
        } else {
            None
        }
    }

    pub fn meet(&self, other: &Self, m: u32) -> Option<Self> {
        if self.compare(other, false, m)? {
            Some(other.clone())
        } else if other.compare(self, false, m)? {
            Some(self.clone())
        } else {
            None
        }
    }

    /// True iff |rule| ≤ 1 holds on all but finitely many tail blocks.
    pub fn abs_le_one_cofinitely(&self) -> bool {
        match self {
            TailRule::Const(c) => c.abs() <= T::one(),
            TailRule::BlockDyadic(_) => true,
            TailRule::Rademacher { .. } => true,
        }
    }

    /// True iff |rule| > 1 holds on infinitely many tail blocks.
    pub fn abs_gt_one_infinitely(&self) -> bool {
        match self {
            TailRule::Const(c) => c.abs() > T::one(),
            TailRule::BlockDyadic(_) => false,
            TailRule::Rademacher { .. } => false,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            TailRule::Const(c) => format!("const {c}"),
            TailRule::BlockDyadic(c) => format!("{c} * 2^-n per block n"),
            TailRule::Rademacher { index } => format!("rademacher index {index}"),
        }
    }
}

/// Explicit finite atomic probability space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAtomicSpace<T> {
    labels: Vec<String>,
    probs: Vec<T>,
}

impl<T: Scalar> FiniteAtomicSpace<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        let labels = (0..probs.len()).map(|i| format!("a{i}")).collect();
        Self::with_labels(labels, probs)
    }

    pub fn with_labels(labels: Vec<String>, probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidParameter("space needs at least one atom".into()));
        }
        if labels.len() != probs.len() {
            return Err(Error::ArityMismatch { expected: probs.len(), got: labels.len() });
        }
        if probs.iter().any(|p| !p.is_positive()) {
            return Err(Error::InvalidParameter("atom probabilities must be > 0".into()));
        }
        let total: T = probs.iter().cloned().fold(T::zero(), |a, b| a + b);
        if !total.is_one() {
            return Err(Error::InvalidParameter(format!(
                "atom probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { labels, probs })
    }

    pub fn atom_count(&self) -> usize {
        self.probs.len()
    }

    pub fn prob(&self, atom: usize) -> &T {
        &self.probs[atom]
    }

    pub fn label(&self, atom: usize) -> &str {
        &self.labels[atom]
    }
}

/// Lazy dyadic block space on Ω = (0,1): blocks A_n = [2⁻ⁿ, 2⁻ⁿ⁺¹), the first
/// `blocks` of them realized, block n subdivided into 2^depths[n-1] fine cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicBlockSpace<T> {
    blocks: u32,
    depths: Vec<u32>,
    tail: TailRule<T>,
    /// fine-cell index of the first cell of each block, plus the total count
    offsets: Vec<usize>,
}

impl<T: Scalar> DyadicBlockSpace<T> {
    pub fn new(blocks: u32, depths: Vec<u32>, tail: TailRule<T>) -> Result<Self> {
        if blocks == 0 {
            return Err(Error::InvalidParameter("block count must be ≥ 1".into()));
        }
        if depths.len() != blocks as usize {
            return Err(Error::ArityMismatch { expected: blocks as usize, got: depths.len() });
        }
        if depths.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParameter("fine depth must be ≥ 1 on every block".into()));
        }
        if depths.iter().any(|&d| d > 24) {
            return Err(Error::InvalidParameter("fine depth above 24 is not materializable".into()));
        }
        let mut offsets = Vec::with_capacity(blocks as usize + 1);
        let mut acc = 0usize;
        for &d in &depths {
            offsets.push(acc);
            acc += 1usize << d;
        }
        offsets.push(acc);
        Ok(Self { blocks, depths, tail, offsets })
    }

    pub fn block_count(&self) -> u32 {
        self.blocks
    }

    pub fn depth(&self, block: u32) -> u32 {
        self.depths[(block - 1) as usize]
    }

    pub fn default_tail(&self) -> &TailRule<T> {
        &self.tail
    }

    /// P(A_n) = 2⁻ⁿ, exactly.
    pub fn block_prob(&self, block: u32) -> T {
        T::pow2(-(block as i32))
    }

    /// Mass of the unrealized remainder (0, 2⁻ᵐ).
    pub fn tail_mass(&self) -> T {
        T::pow2(-(self.blocks as i32))
    }

    pub fn fine_count(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn block_cell_range(&self, block: u32) -> std::ops::Range<usize> {
        let b = (block - 1) as usize;
        self.offsets[b]..self.offsets[b + 1]
    }

    pub fn block_of_fine(&self, fine: usize) -> u32 {
        debug_assert!(fine < self.fine_count());
        match self.offsets.binary_search(&fine) {
            Ok(b) if b < self.blocks as usize => b as u32 + 1,
            Ok(b) => b as u32, // exact hit on the final sentinel cannot happen for valid input
            Err(b) => b as u32,
        }
    }

    /// Exact probability of one fine cell of the given block: 2^-(n + d_n).
    pub fn fine_prob_in_block(&self, block: u32) -> T {
        T::pow2(-(block as i32 + self.depth(block) as i32))
    }

    /// Left endpoint of fine cell j within block n, as an exact rational.
    pub fn fine_left_endpoint(&self, block: u32, j: usize) -> T {
        let d = self.depth(block);
        let base = T::pow2(-(block as i32));
        base.clone() + base * T::from_int(j as i64) * T::pow2(-(d as i32))
    }
}

/// A probability space of either kind, shared by reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Space<T> {
    Finite(FiniteAtomicSpace<T>),
    Dyadic(DyadicBlockSpace<T>),
}

pub type SpaceRef<T> = Arc<Space<T>>;

impl<T: Scalar> Space<T> {
    pub fn finite(probs: Vec<T>) -> Result<SpaceRef<T>> {
        Ok(Arc::new(Space::Finite(FiniteAtomicSpace::new(probs)?)))
    }

    /// Uniform finite space with n atoms.
    pub fn uniform(n: usize) -> Result<SpaceRef<T>> {
        let p = T::one() / T::from_int(n as i64);
        Space::finite(vec![p; n])
    }

    pub fn dyadic(blocks: u32, depths: Vec<u32>, tail: TailRule<T>) -> Result<SpaceRef<T>> {
        Ok(Arc::new(Space::Dyadic(DyadicBlockSpace::new(blocks, depths, tail)?)))
    }

    /// Dyadic space with one shared subdivision depth.
    pub fn dyadic_uniform(blocks: u32, depth: u32, tail: TailRule<T>) -> Result<SpaceRef<T>> {
        Space::dyadic(blocks, vec![depth; blocks as usize], tail)
    }

    pub fn as_dyadic(&self) -> Option<&DyadicBlockSpace<T>> {
        match self {
            Space::Dyadic(d) => Some(d),
            Space::Finite(_) => None,
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteAtomicSpace<T>> {
        match self {
            Space::Finite(f) => Some(f),
            Space::Dyadic(_) => None,
        }
    }

    pub fn is_dyadic(&self) -> bool {
        matches!(self, Space::Dyadic(_))
    }

    /// Number of realized fine atoms.
    pub fn fine_count(&self) -> usize {
        match self {
            Space::Finite(f) => f.atom_count(),
            Space::Dyadic(d) => d.fine_count(),
        }
    }

    pub fn fine_prob(&self, fine: usize) -> T {
        match self {
            Space::Finite(f) => f.prob(fine).clone(),
            Space::Dyadic(d) => d.fine_prob_in_block(d.block_of_fine(fine)),
        }
    }

    /// Mass not covered by realized fine atoms (0 on finite spaces).
    pub fn tail_mass(&self) -> T {
        match self {
            Space::Finite(_) => T::zero(),
            Space::Dyadic(d) => d.tail_mass(),
        }
    }
}

/// σ-algebra over a space, represented by its partition into cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaAlgebra<T> {
    space: SpaceRef<T>,
    kind: AlgebraKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraKind {
    /// Every atom of a finite space is a cell.
    Discrete,
    /// Cells are explicit groups of atoms of a finite space.
    Grouped(Arc<Vec<Vec<usize>>>),
    /// Every realized fine cell of a dyadic space is a cell.
    DyadicFine,
    /// The blocks A_n are the cells (σ generated by the block family).
    DyadicCoarse,
}

impl<T: Scalar> SigmaAlgebra<T> {
    pub fn discrete(space: &SpaceRef<T>) -> Result<Self> {
        if space.is_dyadic() {
            return Err(Error::InvalidParameter(
                "discrete algebra is for finite spaces; use fine() on dyadic spaces".into(),
            ));
        }
        Ok(Self { space: space.clone(), kind: AlgebraKind::Discrete })
    }

    pub fn grouped(space: &SpaceRef<T>, groups: Vec<Vec<usize>>) -> Result<Self> {
        let f = space
            .as_finite()
            .ok_or_else(|| Error::InvalidParameter("grouped algebra needs a finite space".into()))?;
        let mut seen = vec![false; f.atom_count()];
        for g in &groups {
            if g.is_empty() {
                return Err(Error::InvalidPartition("empty cell".into()));
            }
            for &a in g {
                if a >= f.atom_count() || seen[a] {
                    return Err(Error::InvalidPartition(format!(
                        "atom {a} missing or covered twice"
                    )));
                }
                seen[a] = true;
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidPartition("cells do not cover the space".into()));
        }
        Ok(Self { space: space.clone(), kind: AlgebraKind::Grouped(Arc::new(groups)) })
    }

    pub fn fine(space: &SpaceRef<T>) -> Result<Self> {
        match space.as_ref() {
            Space::Dyadic(_) => Ok(Self { space: space.clone(), kind: AlgebraKind::DyadicFine }),
            Space::Finite(_) => Ok(Self { space: space.clone(), kind: AlgebraKind::Discrete }),
        }
    }

    pub fn coarse(space: &SpaceRef<T>) -> Result<Self> {
        match space.as_ref() {
            Space::Dyadic(_) => Ok(Self { space: space.clone(), kind: AlgebraKind::DyadicCoarse }),
            Space::Finite(_) => Ok(Self { space: space.clone(), kind: AlgebraKind::Discrete }),
        }
    }

    pub fn space(&self) -> &SpaceRef<T> {
        &self.space
    }

    pub fn kind(&self) -> &AlgebraKind {
        &self.kind
    }

    pub fn is_fine(&self) -> bool {
        matches!(self.kind, AlgebraKind::Discrete | AlgebraKind::DyadicFine)
    }

    pub fn cell_count(&self) -> usize {
        match &self.kind {
            AlgebraKind::Discrete | AlgebraKind::DyadicFine => self.space.fine_count(),
            AlgebraKind::Grouped(g) => g.len(),
            AlgebraKind::DyadicCoarse => {
                self.space.as_dyadic().map(|d| d.block_count() as usize).unwrap_or(0)
            }
        }
    }

    pub fn cell_prob(&self, cell: usize) -> T {
        match &self.kind {
            AlgebraKind::Discrete | AlgebraKind::DyadicFine => self.space.fine_prob(cell),
            AlgebraKind::Grouped(g) => g[cell]
                .iter()
                .map(|&a| self.space.fine_prob(a))
                .fold(T::zero(), |x, y| x + y),
            AlgebraKind::DyadicCoarse => {
                self.space.as_dyadic().unwrap().block_prob(cell as u32 + 1)
            }
        }
    }

    /// Fine atoms belonging to the given cell.
    pub fn cell_fines(&self, cell: usize) -> Vec<usize> {
        match &self.kind {
            AlgebraKind::Discrete | AlgebraKind::DyadicFine => vec![cell],
            AlgebraKind::Grouped(g) => g[cell].clone(),
            AlgebraKind::DyadicCoarse => {
                self.space.as_dyadic().unwrap().block_cell_range(cell as u32 + 1).collect()
            }
        }
    }

    pub fn fine_to_cell(&self, fine: usize) -> usize {
        match &self.kind {
            AlgebraKind::Discrete | AlgebraKind::DyadicFine => fine,
            AlgebraKind::Grouped(g) => g
                .iter()
                .position(|cells| cells.contains(&fine))
                .expect("grouped algebra covers the space"),
            AlgebraKind::DyadicCoarse => {
                (self.space.as_dyadic().unwrap().block_of_fine(fine) - 1) as usize
            }
        }
    }

    pub fn cell_label(&self, cell: usize) -> String {
        match (&self.kind, self.space.as_ref()) {
            (AlgebraKind::Discrete, Space::Finite(f)) => f.label(cell).to_string(),
            (AlgebraKind::Grouped(g), Space::Finite(f)) => {
                let names: Vec<&str> = g[cell].iter().map(|&a| f.label(a)).collect();
                format!("{{{}}}", names.join(","))
            }
            (AlgebraKind::DyadicFine, Space::Dyadic(d)) => {
                let b = d.block_of_fine(cell);
                format!("A{}:{}", b, cell - d.block_cell_range(b).start)
            }
            (AlgebraKind::DyadicCoarse, Space::Dyadic(_)) => format!("A{}", cell + 1),
            _ => format!("c{cell}"),
        }
    }

    /// Does every cell of `self` lie inside a cell of `other`?
    pub fn refines(&self, other: &Self) -> bool {
        if self.space != other.space {
            return false;
        }
        use AlgebraKind::*;
        match (&self.kind, &other.kind) {
            (a, b) if a == b => true,
            (Discrete, _) | (DyadicFine, _) => true,
            (Grouped(fine), Grouped(coarse)) => fine.iter().all(|cell| {
                coarse.iter().any(|big| cell.iter().all(|a| big.contains(a)))
            }),
            _ => false,
        }
    }

    /// Sum of realized cell probabilities plus tail mass; exactly 1 by
    /// construction, re-checked in tests.
    pub fn total_measure(&self) -> T {
        let realized: T = (0..self.cell_count())
            .map(|c| self.cell_prob(c))
            .fold(T::zero(), |a, b| a + b);
        realized + self.space.tail_mass()
    }
}

/// A measurable event: a set of cells of a σ-algebra, optionally together
/// with the whole unrealized tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventSet<T> {
    algebra: SigmaAlgebra<T>,
    cells: BTreeSet<usize>,
    include_tail: bool,
}

impl<T: Scalar> EventSet<T> {
    pub fn new(algebra: &SigmaAlgebra<T>, cells: BTreeSet<usize>, include_tail: bool) -> Result<Self> {
        if include_tail && !algebra.space().is_dyadic() {
            return Err(Error::InvalidParameter("only dyadic spaces have a tail".into()));
        }
        if let Some(&max) = cells.iter().max() {
            if max >= algebra.cell_count() {
                return Err(Error::InvalidParameter(format!("cell {max} out of range")));
            }
        }
        Ok(Self { algebra: algebra.clone(), cells, include_tail })
    }

    pub fn empty(algebra: &SigmaAlgebra<T>) -> Self {
        Self { algebra: algebra.clone(), cells: BTreeSet::new(), include_tail: false }
    }

    pub fn whole(algebra: &SigmaAlgebra<T>) -> Self {
        Self {
            algebra: algebra.clone(),
            cells: (0..algebra.cell_count()).collect(),
            include_tail: algebra.space().is_dyadic(),
        }
    }

    pub fn of_cells<I: IntoIterator<Item = usize>>(algebra: &SigmaAlgebra<T>, iter: I) -> Result<Self> {
        Self::new(algebra, iter.into_iter().collect(), false)
    }

    pub fn algebra(&self) -> &SigmaAlgebra<T> {
        &self.algebra
    }

    pub fn cells(&self) -> &BTreeSet<usize> {
        &self.cells
    }

    pub fn includes_tail(&self) -> bool {
        self.include_tail
    }

    pub fn measure(&self) -> T {
        let realized: T = self
            .cells
            .iter()
            .map(|&c| self.algebra.cell_prob(c))
            .fold(T::zero(), |a, b| a + b);
        if self.include_tail {
            realized + self.algebra.space().tail_mass()
        } else {
            realized
        }
    }

    pub fn is_positive(&self) -> bool {
        !self.cells.is_empty() || self.include_tail
    }

    pub fn is_empty(&self) -> bool {
        !self.is_positive()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::IncompatibleOperands("events on different algebras".into()));
        }
        Ok(())
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            algebra: self.algebra.clone(),
            cells: self.cells.union(&other.cells).copied().collect(),
            include_tail: self.include_tail || other.include_tail,
        })
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            algebra: self.algebra.clone(),
            cells: self.cells.intersection(&other.cells).copied().collect(),
            include_tail: self.include_tail && other.include_tail,
        })
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            algebra: self.algebra.clone(),
            cells: self.cells.difference(&other.cells).copied().collect(),
            include_tail: self.include_tail && !other.include_tail,
        })
    }

    pub fn complement(&self) -> Self {
        let all: BTreeSet<usize> = (0..self.algebra.cell_count()).collect();
        Self {
            algebra: self.algebra.clone(),
            cells: all.difference(&self.cells).copied().collect(),
            include_tail: self.algebra.space().is_dyadic() && !self.include_tail,
        }
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.cells.is_disjoint(&other.cells) && !(self.include_tail && other.include_tail)
    }

    pub fn describe(&self) -> String {
        let mut parts: Vec<String> =
            self.cells.iter().map(|&c| self.algebra.cell_label(c)).collect();
        if self.include_tail {
            parts.push("tail".into());
        }
        format!("{{{}}}", parts.join(","))
    }
}

/// Ordered countable partition: realized events plus an explicit remainder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountablePartition<T> {
    events: Vec<EventSet<T>>,
    remainder: EventSet<T>,
}

impl<T: Scalar> CountablePartition<T> {
    pub fn new(events: Vec<EventSet<T>>, remainder: EventSet<T>) -> Result<Self> {
        for (i, a) in events.iter().enumerate() {
            if !a.is_disjoint(&remainder) {
                return Err(Error::InvalidPartition(format!("event {i} overlaps the remainder")));
            }
            for b in events.iter().skip(i + 1) {
                if !a.is_disjoint(b) {
                    return Err(Error::InvalidPartition(format!("event {i} overlaps a later event")));
                }
            }
        }
        let total: T = events
            .iter()
            .map(|e| e.measure())
            .fold(remainder.measure(), |a, b| a + b);
        if !total.is_one() {
            return Err(Error::InvalidPartition(format!("total measure {total}, expected 1")));
        }
        Ok(Self { events, remainder })
    }

    /// The trivial partition {Ω}.
    pub fn trivial(algebra: &SigmaAlgebra<T>) -> Self {
        Self {
            events: vec![EventSet::whole(algebra)],
            remainder: EventSet::empty(algebra),
        }
    }

    /// One event per cell of the algebra (the finest realized partition),
    /// with the tail as remainder.
    pub fn finest(algebra: &SigmaAlgebra<T>) -> Self {
        let events = (0..algebra.cell_count())
            .map(|c| EventSet {
                algebra: algebra.clone(),
                cells: BTreeSet::from([c]),
                include_tail: false,
            })
            .collect();
        let remainder = EventSet {
            algebra: algebra.clone(),
            cells: BTreeSet::new(),
            include_tail: algebra.space().is_dyadic(),
        };
        Self { events, remainder }
    }

    pub fn events(&self) -> &[EventSet<T>] {
        &self.events
    }

    pub fn remainder(&self) -> &EventSet<T> {
        &self.remainder
    }
}
