/// Dense row-major matrix of probabilities with a mask of forbidden entries.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    mask: Vec<bool>,
}

impl AssignmentMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols], mask: vec![false; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            m.data[i * c..(i + 1) * c].copy_from_slice(&row);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_sum(&self, r: usize) -> f64 {
        self.row(r).iter().sum()
    }

    pub fn is_masked(&self, r: usize, c: usize) -> bool {
        self.mask[r * self.cols + c]
    }

    pub fn set_masked(&mut self, r: usize, c: usize) {
        self.mask[r * self.cols + c] = true;
    }

    /// Zeroes all masked entries.
    pub fn apply_mask(&mut self) {
        for (v, &m) in self.data.iter_mut().zip(&self.mask) {
            if m {
                *v = 0.0;
            }
        }
    }

    /// Column of the largest entry, lowest index on ties; `None` for an all-zero row.
    pub fn argmax_row(&self, r: usize) -> Option<usize> {
        let row = self.row(r);
        let mut best: Option<usize> = None;
        for (c, &v) in row.iter().enumerate() {
            if v > 0.0 && best.is_none_or(|b| v > row[b]) {
                best = Some(c);
            }
        }
        best
    }

    pub fn is_hard(&self) -> bool {
        (0..self.rows).all(|r| {
            let row = self.row(r);
            let ones = row.iter().filter(|&&v| v == 1.0).count();
            row.iter().all(|&v| v == 0.0 || v == 1.0) && ones <= 1
        })
    }

    /// Per-row argmax hardening; all-zero rows stay zero.
    pub fn hardened(&self) -> Self {
        let mut out = Self { data: vec![0.0; self.data.len()], ..self.clone() };
        for r in 0..self.rows {
            if let Some(c) = self.argmax_row(r) {
                out.set(r, c, 1.0);
            }
        }
        out
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_breaks_ties_low() {
        let m = AssignmentMatrix::from_rows(vec![vec![0.25, 0.5, 0.5], vec![0.0, 0.0, 0.0]]);
        assert_eq!(m.argmax_row(0), Some(1));
        assert_eq!(m.argmax_row(1), None);
        let h = m.hardened();
        assert!(h.is_hard());
        assert_eq!(h.row(0), &[0.0, 1.0, 0.0]);
    }
}
