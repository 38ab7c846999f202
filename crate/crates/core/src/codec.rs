//! Structured-text serialization of spaces and random variables.
//!
//! Rationals travel as "p/q" strings; dyadic step functions as arrays of
//! {block, depth, cell_values}. This is the wire format the CLI reads and
//! writes for witness data.

use crate::error::{Error, Result};
use crate::rv::RandomVariable;
use crate::scalar::Scalar;
use crate::space::{SigmaAlgebra, Space, SpaceRef, TailRule};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum TailDto {
    Const { value: String },
    BlockDyadic { scale: String },
    Rademacher { index: u32 },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpaceDto {
    Finite { probs: Vec<String> },
    Dyadic { blocks: u32, depths: Vec<u32>, tail: TailDto },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BlockValuesDto {
    pub block: u32,
    pub depth: u32,
    pub cell_values: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "algebra", rename_all = "kebab-case")]
pub enum RvDto {
    /// values per atom of a finite space
    Finite { values: Vec<String> },
    /// fine step function per realized block
    DyadicFine {
        blocks: Vec<BlockValuesDto>,
        #[serde(skip_serializing_if = "Option::is_none")]
        tail: Option<TailDto>,
    },
    /// one value per block
    DyadicCoarse {
        values: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        tail: Option<TailDto>,
    },
}

fn rational_to_string<T: Scalar>(v: &T) -> String {
    v.to_string()
}

fn rational_from_string<T: Scalar>(s: &str) -> Result<T> {
    T::parse_ratio(s).ok_or_else(|| Error::InvalidParameter(format!("bad rational: {s}")))
}

pub fn tail_to_dto<T: Scalar>(tail: &TailRule<T>) -> TailDto {
    match tail {
        TailRule::Const(c) => TailDto::Const { value: rational_to_string(c) },
        TailRule::BlockDyadic(c) => TailDto::BlockDyadic { scale: rational_to_string(c) },
        TailRule::Rademacher { index } => TailDto::Rademacher { index: *index },
    }
}

pub fn tail_from_dto<T: Scalar>(dto: &TailDto) -> Result<TailRule<T>> {
    Ok(match dto {
        TailDto::Const { value } => TailRule::Const(rational_from_string(value)?),
        TailDto::BlockDyadic { scale } => TailRule::block_dyadic(rational_from_string(scale)?),
        TailDto::Rademacher { index } => TailRule::Rademacher { index: *index },
    })
}

pub fn space_to_dto<T: Scalar>(space: &SpaceRef<T>) -> SpaceDto {
    match space.as_ref() {
        Space::Finite(f) => SpaceDto::Finite {
            probs: (0..f.atom_count()).map(|a| rational_to_string(f.prob(a))).collect(),
        },
        Space::Dyadic(d) => SpaceDto::Dyadic {
            blocks: d.block_count(),
            depths: (1..=d.block_count()).map(|b| d.depth(b)).collect(),
            tail: tail_to_dto(d.default_tail()),
        },
    }
}

pub fn space_from_dto<T: Scalar>(dto: &SpaceDto) -> Result<SpaceRef<T>> {
    match dto {
        SpaceDto::Finite { probs } => {
            let probs = probs
                .iter()
                .map(|p| rational_from_string(p))
                .collect::<Result<Vec<T>>>()?;
            Space::finite(probs)
        }
        SpaceDto::Dyadic { blocks, depths, tail } => {
            Space::dyadic(*blocks, depths.clone(), tail_from_dto(tail)?)
        }
    }
}

pub fn rv_to_dto<T: Scalar>(rv: &RandomVariable<T>) -> RvDto {
    let algebra = rv.algebra();
    match algebra.space().as_ref() {
        Space::Finite(_) => RvDto::Finite {
            values: rv.values().iter().map(rational_to_string).collect(),
        },
        Space::Dyadic(d) => {
            if algebra.is_fine() {
                let blocks = (1..=d.block_count())
                    .map(|b| BlockValuesDto {
                        block: b,
                        depth: d.depth(b),
                        cell_values: d
                            .block_cell_range(b)
                            .map(|f| rational_to_string(rv.value_on_fine(f)))
                            .collect(),
                    })
                    .collect();
                RvDto::DyadicFine { blocks, tail: rv.tail().map(tail_to_dto) }
            } else {
                RvDto::DyadicCoarse {
                    values: rv.values().iter().map(rational_to_string).collect(),
                    tail: rv.tail().map(tail_to_dto),
                }
            }
        }
    }
}

pub fn rv_from_dto<T: Scalar>(dto: &RvDto, space: &SpaceRef<T>) -> Result<RandomVariable<T>> {
    match dto {
        RvDto::Finite { values } => {
            let algebra = SigmaAlgebra::discrete(space)?;
            let vals = values
                .iter()
                .map(|v| rational_from_string(v))
                .collect::<Result<Vec<T>>>()?;
            RandomVariable::from_values(&algebra, vals, None)
        }
        RvDto::DyadicFine { blocks, tail } => {
            let d = space
                .as_dyadic()
                .ok_or_else(|| Error::IncompatibleOperands("expected a dyadic space".into()))?;
            let algebra = SigmaAlgebra::fine(space)?;
            let mut vals = vec![T::zero(); d.fine_count()];
            for b in blocks {
                if b.block == 0 || b.block > d.block_count() {
                    return Err(Error::InvalidParameter(format!("block {} out of range", b.block)));
                }
                if b.depth != d.depth(b.block) {
                    return Err(Error::DepthError {
                        block: b.block,
                        have: d.depth(b.block),
                        required: b.depth,
                    });
                }
                let range = d.block_cell_range(b.block);
                if b.cell_values.len() != range.len() {
                    return Err(Error::ArityMismatch {
                        expected: range.len(),
                        got: b.cell_values.len(),
                    });
                }
                for (f, v) in range.zip(&b.cell_values) {
                    vals[f] = rational_from_string(v)?;
                }
            }
            let tail = tail.as_ref().map(tail_from_dto).transpose()?;
            RandomVariable::from_values(&algebra, vals, tail)
        }
        RvDto::DyadicCoarse { values, tail } => {
            let algebra = SigmaAlgebra::coarse(space)?;
            let vals = values
                .iter()
                .map(|v| rational_from_string(v))
                .collect::<Result<Vec<T>>>()?;
            let tail = tail.as_ref().map(tail_from_dto).transpose()?;
            RandomVariable::from_values(&algebra, vals, tail)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;
    use num_traits::One;

    #[test]
    fn space_roundtrip() {
        let s = Space::<Q>::dyadic(3, vec![2, 3, 1], TailRule::block_dyadic(Q::one())).unwrap();
        let dto = space_to_dto(&s);
        let back = space_from_dto::<Q>(&dto).unwrap();
        assert_eq!(s, back);
        let json = serde_json::to_string(&dto).unwrap();
        assert!(json.contains("dyadic"));
        let parsed: SpaceDto = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, dto);
    }

    #[test]
    fn rv_roundtrip_with_ratio_strings() {
        let s = Space::<Q>::dyadic_uniform(2, 2, TailRule::zero()).unwrap();
        let fine = SigmaAlgebra::fine(&s).unwrap();
        let mut sampler = crate::sample::Sampler::new(3);
        let x = sampler.rv::<Q>(&fine, 9, 3);
        let dto = rv_to_dto(&x);
        let json = serde_json::to_string(&dto).unwrap();
        let parsed: RvDto = serde_json::from_str(&json).unwrap();
        let back = rv_from_dto::<Q>(&parsed, &s).unwrap();
        assert_eq!(x, back);
    }

    #[test]
    fn rejects_malformed_rationals() {
        let dto = RvDto::Finite { values: vec!["1/0x".into()] };
        let s = Space::<Q>::uniform(1).unwrap();
        assert!(rv_from_dto::<Q>(&dto, &s).is_err());
    }
}
