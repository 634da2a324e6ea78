//! Crossbar arrays and row read-out.
//!
//! Selection is ideal: sneak paths, wire resistance and multiplexer losses are
//! not modeled, so a row current is exactly the sum of the selected cells.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::device::{DeviceParams, Environment, Fluctuation, OperatingPoint, ReRamCell};
use crate::error::{Error, Result};

/// Largest supported number of simultaneously selected columns.
pub const CS_MAX: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct CrossbarArray {
    rows: usize,
    cols: usize,
    cells: Vec<ReRamCell>,
}

impl CrossbarArray {
    /// Samples every cell independently, row-major.
    pub fn build<R: Rng + ?Sized>(
        rows: usize,
        cols: usize,
        params: &DeviceParams,
        rng: &mut R,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("crossbar dimensions must be >= 1"));
        }
        params.validate()?;
        let cells = (0..rows * cols).map(|_| params.sample_cell(rng)).collect();
        Ok(Self { rows, cols, cells })
    }

    pub fn from_cells(rows: usize, cols: usize, cells: Vec<ReRamCell>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("crossbar dimensions must be >= 1"));
        }
        if cells.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} cells for a {rows}x{cols} array, got {}",
                rows * cols,
                cells.len()
            )));
        }
        if cells.iter().any(|c| !(c.resistance > 0.0 && c.resistance.is_finite())) {
            return Err(Error::invalid("cell resistances must be positive and finite"));
        }
        Ok(Self { rows, cols, cells })
    }

    /// Array of identical HRS cells; handy for hand-checkable scenarios.
    pub fn uniform(rows: usize, cols: usize, resistance: f64) -> Result<Self> {
        Self::from_cells(rows, cols, vec![ReRamCell::hrs(resistance); rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[ReRamCell] {
        &self.cells
    }

    pub fn cell(&self, row: usize, col: usize) -> Result<&ReRamCell> {
        if row >= self.rows {
            return Err(Error::IndexOutOfRange { what: "row", index: row, len: self.rows });
        }
        if col >= self.cols {
            return Err(Error::IndexOutOfRange { what: "column", index: col, len: self.cols });
        }
        Ok(&self.cells[row * self.cols + col])
    }

    /// Sum of inverse resistances over `columns` of `row`.
    pub(crate) fn row_conductance(&self, row: usize, columns: &[usize]) -> Result<f64> {
        if row >= self.rows {
            return Err(Error::IndexOutOfRange { what: "row", index: row, len: self.rows });
        }
        let base = row * self.cols;
        columns.iter().try_fold(0.0, |acc, &c| {
            if c >= self.cols {
                return Err(Error::IndexOutOfRange { what: "column", index: c, len: self.cols });
            }
            Ok(acc + 1.0 / self.cells[base + c].resistance)
        })
    }

    /// Row current at a fixed operating point.
    pub fn row_current_at(
        &self,
        params: &DeviceParams,
        row: usize,
        columns: &[usize],
        op: &OperatingPoint,
    ) -> Result<f64> {
        Ok(params.current_scale(op) * self.row_conductance(row, columns)?)
    }

    /// Row current for one read event on its own.
    pub fn row_current<R: Rng + ?Sized>(
        &self,
        params: &DeviceParams,
        row: usize,
        columns: &[usize],
        env: &Environment,
        rng: &mut R,
    ) -> Result<f64> {
        let shared = env.sample_fluctuation(rng);
        self.row_current_shared(params, row, columns, env, &shared, rng)
    }

    /// Row current within a read event whose common deviation is `shared`.
    pub fn row_current_shared<R: Rng + ?Sized>(
        &self,
        params: &DeviceParams,
        row: usize,
        columns: &[usize],
        env: &Environment,
        shared: &Fluctuation,
        rng: &mut R,
    ) -> Result<f64> {
        if !env.has_local_variation() {
            return self.row_current_at(params, row, columns, &env.point_at(shared));
        }
        let mut total = 0.0;
        for &c in columns {
            let cell = self.cell(row, c)?;
            total += params.current_at(cell, &env.cell_point(shared, rng));
        }
        Ok(total)
    }

    /// Current through cells addressed by flat index within one read event.
    pub(crate) fn flat_current<R: Rng + ?Sized>(
        &self,
        params: &DeviceParams,
        flat: impl Iterator<Item = usize>,
        env: &Environment,
        shared: &Fluctuation,
        rng: &mut R,
    ) -> f64 {
        if !env.has_local_variation() {
            return params.current_scale(&env.point_at(shared)) * self.flat_conductance(flat);
        }
        flat.map(|i| params.current_at(&self.cells[i], &env.cell_point(shared, rng))).sum()
    }

    pub(crate) fn flat_conductance(&self, flat: impl Iterator<Item = usize>) -> f64 {
        flat.map(|i| 1.0 / self.cells[i].resistance).sum()
    }
}

/// Columns and row pair addressed by one evaluation of a crossbar.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Selection {
    pub columns: Vec<usize>,
    pub rows: (usize, usize),
}

impl Selection {
    pub fn new(columns: Vec<usize>, rows: (usize, usize)) -> Self {
        Self { columns, rows }
    }

    pub fn validate(&self, rows: usize, cols: usize) -> Result<()> {
        let cs = self.columns.len();
        if cs == 0 || cs > CS_MAX {
            return Err(Error::invalid(format!("column count {cs} outside 1..={CS_MAX}")));
        }
        for (i, &c) in self.columns.iter().enumerate() {
            if c >= cols {
                return Err(Error::IndexOutOfRange { what: "column", index: c, len: cols });
            }
            if self.columns[..i].contains(&c) {
                return Err(Error::invalid(format!("duplicate column {c}")));
            }
        }
        let (p, q) = self.rows;
        for r in [p, q] {
            if r >= rows {
                return Err(Error::IndexOutOfRange { what: "row", index: r, len: rows });
            }
        }
        if p == q {
            return Err(Error::invalid("row pair must be distinct"));
        }
        Ok(())
    }
}

/// Mean and variance of a current.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumStats {
    pub mean: f64,
    pub variance: f64,
}

impl SumStats {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Statistics of a sum of independent currents.
pub fn combine_stats(stats: &[SumStats]) -> Result<SumStats> {
    if stats.is_empty() {
        return Err(Error::EmptyInput("combine_stats needs at least one term"));
    }
    Ok(SumStats {
        mean: stats.iter().map(|s| s.mean).sum(),
        variance: stats.iter().map(|s| s.variance).sum(),
    })
}
