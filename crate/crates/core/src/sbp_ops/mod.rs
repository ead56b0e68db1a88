//! Diagonal-norm summation-by-parts operators on uniform grids.
//!
//! A first-derivative operator is `D = P⁻¹Q` with `P` diagonal positive and
//! `Q + Qᵀ = B = diag(-1, 0, …, 0, 1)`. A second-derivative operator is
//! `D2 = P⁻¹(−SᵀM + B)S` with `M` symmetric positive definite and the first
//! and last rows of `S` approximating the boundary derivative.

mod first;
mod report;
mod second;
pub mod tables;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use first::{FirstDerivativeOperator, OperatorDocument};
pub use report::{
    compose_wide_second_derivative, second_derivative_residuals, verify_first_derivative, verify_second_derivative,
    AccuracyResidual, OperatorReport, ACCURACY_TOLERANCE, RECONSTRUCTION_TOLERANCE, ROUNDOFF_MULTIPLIER, SBP_TOLERANCE,
};
pub use second::SecondDerivativeOperator;

use tables::{FirstDerivativeTable, SecondDerivativeTable};

/// Interior order `p` and boundary-closure order `r` of a diagonal-norm
/// operator. Only `(2,1)`, `(4,2)` and `(6,3)` exist here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AccuracyOrder {
    #[serde(rename = "p")]
    interior: u32,
    #[serde(rename = "r")]
    boundary: u32,
}

impl AccuracyOrder {
    pub const SECOND: Self = Self {
        interior: 2,
        boundary: 1,
    };
    pub const FOURTH: Self = Self {
        interior: 4,
        boundary: 2,
    };
    pub const SIXTH: Self = Self {
        interior: 6,
        boundary: 3,
    };
    pub const ALL: [Self; 3] = [Self::SECOND, Self::FOURTH, Self::SIXTH];

    pub fn new(interior: u32, boundary: u32) -> Result<Self> {
        let order = Self { interior, boundary };
        if Self::ALL.contains(&order) {
            Ok(order)
        } else {
            Err(Error::UnsupportedOrder { interior, boundary })
        }
    }

    /// Looks up the supported pair with interior order `p`.
    pub fn from_interior(p: u32) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|o| o.interior == p)
            .ok_or(Error::UnsupportedOrder {
                interior: p,
                boundary: p / 2,
            })
    }

    pub fn interior(self) -> u32 {
        self.interior
    }

    pub fn boundary(self) -> u32 {
        self.boundary
    }

    /// Rows at each end that carry the boundary closure.
    pub fn boundary_width(self) -> usize {
        self.first_table().norm.len()
    }

    /// Smallest grid for which the two closures do not overlap.
    pub fn min_points(self) -> usize {
        2 * self.boundary_width() + 1
    }

    pub(crate) fn check_grid(self, n: usize) -> Result<()> {
        if n < self.min_points() {
            return Err(Error::GridTooSmall {
                n,
                min: self.min_points(),
                interior: self.interior,
                boundary: self.boundary,
            });
        }
        Ok(())
    }

    pub(crate) fn first_table(self) -> &'static FirstDerivativeTable {
        match self.interior {
            2 => &tables::FIRST_2,
            4 => &tables::FIRST_4,
            _ => &tables::FIRST_6,
        }
    }

    pub(crate) fn second_table(self) -> &'static SecondDerivativeTable {
        match self.interior {
            2 => &tables::SECOND_2,
            4 => &tables::SECOND_4,
            _ => &tables::SECOND_6,
        }
    }
}

impl std::fmt::Display for AccuracyOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.interior, self.boundary)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supported_pairs_satisfy_diagonal_norm_constraint() {
        for o in AccuracyOrder::ALL {
            assert_eq!(o.interior(), 2 * o.boundary());
        }
        assert_eq!(AccuracyOrder::SECOND.boundary_width(), 1);
        assert_eq!(AccuracyOrder::FOURTH.boundary_width(), 4);
        assert_eq!(AccuracyOrder::SIXTH.boundary_width(), 6);
    }

    #[test]
    fn unsupported_orders_rejected() {
        assert!(matches!(
            AccuracyOrder::new(8, 4),
            Err(Error::UnsupportedOrder { interior: 8, .. })
        ));
        assert!(AccuracyOrder::new(4, 3).is_err());
        assert!(AccuracyOrder::from_interior(5).is_err());
        assert_eq!(AccuracyOrder::from_interior(6).unwrap(), AccuracyOrder::SIXTH);
    }

    #[test]
    fn tables_are_consistent() {
        for o in AccuracyOrder::ALL {
            let t = o.first_table();
            assert_eq!(t.interior.len() as u32, o.interior() / 2);
            assert_eq!(t.block.len(), t.norm.len());
            assert!(t.block.iter().all(|r| r.len() == t.norm.len()));
            let s = o.second_table();
            assert_eq!(s.block.len(), t.norm.len());
            assert_eq!(s.interior.len() as u32, o.interior() / 2 + 1);
        }
    }
}
