//! Diagonal-norm coefficient tables, exact rationals `(numerator, denominator)`.
//!
//! Grid spacing is factored out: norm weights scale with `h`, `Q` is
//! dimensionless and the second-derivative form `M̃ = SᵀMS` scales with `1/h`.
//! Only the left boundary is tabulated; the right one follows by reflection.
#![allow(clippy::unreadable_literal)]

pub type Ratio = (i64, i64);

pub struct FirstDerivativeTable {
    /// `Q[i][i+k] = interior[k-1]`, antisymmetric in `k`.
    pub interior: &'static [Ratio],
    /// Norm weights of the boundary rows; interior weight is 1.
    pub norm: &'static [Ratio],
    /// Leading `b×b` block of `Q`; entries right of it follow the interior stencil.
    pub block: &'static [&'static [Ratio]],
}

pub struct SecondDerivativeTable {
    /// Centre weight followed by the weights at offsets `±1, ±2, …` of the
    /// interior `h²·D2` stencil.
    pub interior: &'static [Ratio],
    /// One-sided `h·u_x(x₀)` stencil used as the first row of `S`.
    pub boundary_derivative: &'static [Ratio],
    /// Leading block of `h·M̃`; outside it `M̃` is minus the interior stencil.
    pub block: &'static [&'static [Ratio]],
}

pub const FIRST_2: FirstDerivativeTable = FirstDerivativeTable {
    interior: &[(1, 2)],
    norm: &[(1, 2)],
    block: &[&[(-1, 2)]],
};

pub const FIRST_4: FirstDerivativeTable = FirstDerivativeTable {
    interior: &[(2, 3), (-1, 12)],
    norm: &[(17, 48), (59, 48), (43, 48), (49, 48)],
    block: &[
        &[(-1, 2), (59, 96), (-1, 12), (-1, 32)],
        &[(-59, 96), (0, 1), (59, 96), (0, 1)],
        &[(1, 12), (-59, 96), (0, 1), (59, 96)],
        &[(1, 32), (0, 1), (-59, 96), (0, 1)],
    ],
};

// Free parameter Q[4][5] = 342523/518400.
pub const FIRST_6: FirstDerivativeTable = FirstDerivativeTable {
    interior: &[(3, 4), (-3, 20), (1, 60)],
    norm: &[
        (13649, 43200),
        (12013, 8640),
        (2711, 4320),
        (5359, 4320),
        (7877, 8640),
        (43801, 43200),
    ],
    block: &[
        &[
            (-1, 2),
            (104009, 172800),
            (30443, 259200),
            (-33311, 86400),
            (5621, 28800),
            (-601, 20736),
        ],
        &[
            (-104009, 172800),
            (0, 1),
            (-311, 51840),
            (6743, 5760),
            (-24337, 34560),
            (36661, 259200),
        ],
        &[
            (-30443, 259200),
            (311, 51840),
            (0, 1),
            (-2231, 5184),
            (41287, 51840),
            (-7333, 28800),
        ],
        &[
            (33311, 86400),
            (-6743, 5760),
            (2231, 5184),
            (0, 1),
            (4147, 17280),
            (25427, 259200),
        ],
        &[
            (-5621, 28800),
            (24337, 34560),
            (-41287, 51840),
            (-4147, 17280),
            (0, 1),
            (342523, 518400),
        ],
        &[
            (601, 20736),
            (-36661, 259200),
            (7333, 28800),
            (-25427, 259200),
            (-342523, 518400),
            (0, 1),
        ],
    ],
};

pub const SECOND_2: SecondDerivativeTable = SecondDerivativeTable {
    interior: &[(-2, 1), (1, 1)],
    boundary_derivative: &[(-3, 2), (2, 1), (-1, 2)],
    block: &[&[(1, 1)]],
};

pub const SECOND_4: SecondDerivativeTable = SecondDerivativeTable {
    interior: &[(-5, 2), (4, 3), (-1, 12)],
    boundary_derivative: &[(-11, 6), (3, 1), (-3, 2), (1, 3)],
    block: &[
        &[(9, 8), (-59, 48), (1, 12), (1, 48)],
        &[(-59, 48), (59, 24), (-59, 48), (0, 1)],
        &[(1, 12), (-59, 48), (55, 24), (-59, 48)],
        &[(1, 48), (0, 1), (-59, 48), (59, 24)],
    ],
};

// Free parameter M̃[5][5] = 537/200 (positive semidefinite for values above ~2.6746).
pub const SECOND_6: SecondDerivativeTable = SecondDerivativeTable {
    interior: &[(-49, 18), (3, 2), (-3, 20), (1, 90)],
    boundary_derivative: &[(-25, 12), (4, 1), (-3, 1), (4, 3), (-1, 4)],
    block: &[
        &[
            (75503, 64800),
            (-220933, 172800),
            (4151, 129600),
            (27877, 259200),
            (-329, 14400),
            (-1739, 518400),
        ],
        &[
            (-220933, 172800),
            (30293, 12960),
            (-38123, 51840),
            (-1219, 2880),
            (9929, 103680),
            (521, 129600),
        ],
        &[
            (4151, 129600),
            (-38123, 51840),
            (2951, 2160),
            (-3287, 5184),
            (-1271, 25920),
            (1751, 86400),
        ],
        &[
            (27877, 259200),
            (-1219, 2880),
            (-3287, 5184),
            (13847, 6480),
            (-21209, 17280),
            (6659, 129600),
        ],
        &[
            (-329, 14400),
            (9929, 103680),
            (-1271, 25920),
            (-21209, 17280),
            (7973, 3240),
            (-723791, 518400),
        ],
        &[
            (-1739, 518400),
            (521, 129600),
            (1751, 86400),
            (6659, 129600),
            (-723791, 518400),
            (537, 200),
        ],
    ],
};
