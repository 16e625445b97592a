use crate::extreal::ExtReal;
use crate::gallager::ErrorType;
use crate::model::{Class, User};

/// Column order of the 3x4 tables: user 1's class varies fastest.
pub const CLASS_PAIRS: [(Class, Class); 4] = [
    (Class::One, Class::One),
    (Class::Two, Class::One),
    (Class::One, Class::Two),
    (Class::Two, Class::Two),
];

pub(crate) fn cell_index(tau: ErrorType, i1: Class, i2: Class) -> usize {
    let row = match tau {
        ErrorType::User1 => 0,
        ErrorType::User2 => 1,
        ErrorType::Both => 2,
    };
    4 * row + i1.index() + 2 * i2.index()
}

/// One maximized objective: error type, class pair, value and maximizing `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveCell {
    pub tau: ErrorType,
    pub i1: Class,
    pub i2: Class,
    pub value: ExtReal,
    /// Maximizer in `[0, 1]`; 0 when `value` is infinite.
    pub rho_star: f64,
}

impl ObjectiveCell {
    pub fn class(&self, user: User) -> Class {
        match user {
            User::One => self.i1,
            User::Two => self.i2,
        }
    }
}

/// The twelve cells for all error types and class pairs, in table order
/// (error type major, then [`CLASS_PAIRS`]).
#[derive(Debug, Clone, PartialEq)]
pub struct CellTable {
    cells: Vec<ObjectiveCell>,
}

impl CellTable {
    pub(crate) fn new(cells: Vec<ObjectiveCell>) -> Self {
        debug_assert_eq!(cells.len(), 12);
        debug_assert!(cells
            .iter()
            .enumerate()
            .all(|(k, c)| cell_index(c.tau, c.i1, c.i2) == k));
        CellTable { cells }
    }

    pub fn cells(&self) -> &[ObjectiveCell] {
        &self.cells
    }

    pub fn get(&self, tau: ErrorType, i1: Class, i2: Class) -> &ObjectiveCell {
        &self.cells[cell_index(tau, i1, i2)]
    }

    /// Cells of one error type in column order.
    pub fn row(&self, tau: ErrorType) -> &[ObjectiveCell] {
        let start = cell_index(tau, Class::One, Class::One);
        &self.cells[start..start + 4]
    }

    /// Minimum over error types for one class pair.
    pub fn little_f(&self, i1: Class, i2: Class) -> ExtReal {
        ErrorType::ALL
            .iter()
            .map(|&t| self.get(t, i1, i2).value)
            .min()
            .expect("three error types")
    }

    /// Minimum over all class pairs of [`CellTable::little_f`].
    pub fn d(&self) -> ExtReal {
        self.cells
            .iter()
            .map(|c| c.value)
            .min()
            .expect("twelve cells")
    }

    /// `min_{i1} f_{i1,c}`: the quantity balanced when solving for user 2's threshold.
    pub fn k_user2(&self, c: Class) -> ExtReal {
        self.little_f(Class::One, c)
            .min(self.little_f(Class::Two, c))
    }

    /// `min_{i2} f_{c,i2}`: the quantity balanced when solving for user 1's threshold.
    pub fn k_user1(&self, c: Class) -> ExtReal {
        self.little_f(c, Class::One)
            .min(self.little_f(c, Class::Two))
    }

    /// `|k(class 1) - k(class 2)|` for the threshold of `user`; `None` when
    /// either side is infinite.
    pub fn balance_gap(&self, user: User) -> Option<f64> {
        let (a, b) = match user {
            User::One => (self.k_user1(Class::One), self.k_user1(Class::Two)),
            User::Two => (self.k_user2(Class::One), self.k_user2(Class::Two)),
        };
        Some((a.finite()? - b.finite()?).abs())
    }
}
