//! Incremental sparse row reduction.
//!
//! Rows are kept in semi-echelon form while vectors are inserted (each row
//! is normalized with a leading 1 and only holds entries at or after its
//! pivot). `finish` performs the back substitution that produces the
//! reduced row-echelon form.

use super::{Mat, Scalar};

type SparseRow = Vec<(usize, Scalar)>;

#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<SparseRow>,
    pivot_row: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: Vec::new(),
            pivot_row: vec![None; ncols],
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    /// Reduces `v` in place against the stored rows. Afterwards `v` is zero
    /// iff it lay in the span.
    pub fn reduce(&self, v: &mut [Scalar]) {
        assert_eq!(v.len(), self.ncols, "echelon vector length mismatch");
        for j in 0..self.ncols {
            if v[j].is_zero() {
                continue;
            }
            if let Some(r) = self.pivot_row[j] {
                let f = v[j].clone();
                for (k, x) in &self.rows[r] {
                    v[*k].sub_mul(&f, x);
                }
            }
        }
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, mut v: Vec<Scalar>) -> bool {
        if self.is_full() {
            return false;
        }
        self.reduce(&mut v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip().expect("nonzero pivot");
        let row: SparseRow = v
            .into_iter()
            .enumerate()
            .skip(p)
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| (k, x * &inv))
            .collect();
        self.pivot_row[p] = Some(self.rows.len());
        self.rows.push(row);
        true
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(Scalar::is_zero)
    }

    /// Reduced row-echelon basis (rows sorted by pivot) and the pivots.
    pub fn finish(self) -> (Mat, Vec<usize>) {
        let n = self.ncols;
        let mut order: Vec<(usize, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r[0].0, i))
            .collect();
        order.sort_unstable();
        let pivots: Vec<usize> = order.iter().map(|(p, _)| *p).collect();
        let mut is_pivot = vec![None; n];
        for (pos, &(p, _)) in order.iter().enumerate() {
            is_pivot[p] = Some(pos);
        }
        let mut rows: Vec<Option<SparseRow>> = self.rows.into_iter().map(Some).collect();
        let mut reduced: Vec<SparseRow> = vec![Vec::new(); order.len()];
        // Rows with larger pivots are finalized first; each is then free of
        // every later pivot, so a single left-to-right sweep suffices.
        for pos in (0..order.len()).rev() {
            let src = rows[order[pos].1].take().expect("row used once");
            let mut dense = vec![Scalar::zero(); n];
            for (k, x) in src {
                dense[k] = x;
            }
            for j in pivots[pos] + 1..n {
                if dense[j].is_zero() {
                    continue;
                }
                if let Some(q) = is_pivot[j] {
                    let f = dense[j].clone();
                    for (k, x) in &reduced[q] {
                        dense[*k].sub_mul(&f, x);
                    }
                }
            }
            reduced[pos] = dense
                .into_iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .collect();
        }
        let mut basis = Mat::zeros(reduced.len(), n);
        for (r, row) in reduced.into_iter().enumerate() {
            for (k, x) in row {
                basis.set(r, k, x);
            }
        }
        (basis, pivots)
    }
}

/// Reduced row-echelon form of the row space of `m`.
pub fn rref(m: &Mat) -> (Mat, Vec<usize>) {
    let mut e = Echelon::new(m.cols());
    for r in 0..m.rows() {
        if e.is_full() {
            break;
        }
        e.insert(m.row(r).to_vec());
    }
    e.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_of_small_matrix() {
        let m = Mat::from_i64(3, 3, &[0, 2, 4, 1, 1, 1, 1, 3, 5]);
        let (r, pivots) = rref(&m);
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(r, Mat::from_i64(2, 3, &[1, 0, -1, 0, 1, 2]));
    }

    #[test]
    fn insert_reports_dependence() {
        let mut e = Echelon::new(2);
        assert!(e.insert(vec![Scalar::from_int(1), Scalar::from_int(1)]));
        assert!(!e.insert(vec![Scalar::from_int(2), Scalar::from_int(2)]));
        assert!(e.contains(&[Scalar::from_int(-3), Scalar::from_int(-3)]));
        assert!(!e.contains(&[Scalar::from_int(1), Scalar::from_int(0)]));
    }
}
