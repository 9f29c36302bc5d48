use super::echelon::{rref, Echelon};
use super::mat::{unit_vec, vec_axpy};
use super::{Mat, Scalar};
use crate::error::{Error, Result};

/// A linear subspace in canonical form: the basis rows are the reduced
/// row-echelon form of any spanning set, so two subspaces of the same
/// ambient space are equal iff their bases are entry-identical.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Mat,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Mat::zeros(0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Mat::identity(ambient),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn span<I>(ambient: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = Vec<Scalar>>,
    {
        let mut e = Echelon::new(ambient);
        for v in vectors {
            assert_eq!(v.len(), ambient, "spanning vector has wrong length");
            if e.is_full() {
                break;
            }
            e.insert(v);
        }
        Self::from_echelon(ambient, e)
    }

    pub(crate) fn from_echelon(ambient: usize, e: Echelon) -> Self {
        let (basis, pivots) = e.finish();
        Subspace {
            ambient,
            basis,
            pivots,
        }
    }

    /// Row space of `m`.
    pub fn row_space(m: &Mat) -> Self {
        let (basis, pivots) = rref(m);
        Subspace {
            ambient: m.cols(),
            basis,
            pivots,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_zero(&self) -> bool {
        self.pivots.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.pivots.len() == self.ambient
    }

    /// Basis vectors as rows.
    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn vector(&self, i: usize) -> Vec<Scalar> {
        self.basis.row(i).to_vec()
    }

    pub fn vectors(&self) -> Vec<Vec<Scalar>> {
        self.basis.row_vecs()
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v` is not
    /// in the subspace.
    pub fn coords(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(v.len(), self.ambient, "coords: vector length mismatch");
        let c: Vec<Scalar> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut w = v.to_vec();
        for (i, ci) in c.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (x, b) in w.iter_mut().zip(self.basis.row(i)) {
                x.sub_mul(ci, b);
            }
        }
        w.iter().all(Scalar::is_zero).then_some(c)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.coords(v).is_some()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && (0..other.dim()).all(|i| self.contains(other.basis.row(i)))
    }

    /// Linear combination of the basis with the given coordinates.
    pub fn combine(&self, coords: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(coords.len(), self.dim());
        let mut out = vec![Scalar::zero(); self.ambient];
        for (i, c) in coords.iter().enumerate() {
            vec_axpy(&mut out, c, self.basis.row(i));
        }
        out
    }

    /// Matrix of the coordinate map restricted to the subspace: columns are
    /// basis vectors (ambient × dim).
    pub fn inclusion(&self) -> Mat {
        self.basis.transpose()
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        check_ambient(self, other)?;
        let mut e = Echelon::new(self.ambient);
        for v in self.vectors().into_iter().chain(other.vectors()) {
            e.insert(v);
        }
        Ok(Self::from_echelon(self.ambient, e))
    }

    /// Image of this subspace under `m`.
    pub fn map(&self, m: &Mat) -> Result<Subspace> {
        if m.cols() != self.ambient {
            return Err(Error::Dimension(format!(
                "cannot map a subspace of dimension-{} space by a {}x{} matrix",
                self.ambient,
                m.rows(),
                m.cols()
            )));
        }
        Ok(Subspace::span(
            m.rows(),
            (0..self.dim()).map(|i| m.mul_vec(self.basis.row(i))),
        ))
    }
}

fn check_ambient(u: &Subspace, v: &Subspace) -> Result<()> {
    if u.ambient != v.ambient {
        return Err(Error::Dimension(format!(
            "subspaces live in ambient spaces of dimension {} and {}",
            u.ambient, v.ambient
        )));
    }
    Ok(())
}

/// `{v : m v = 0}`.
pub fn kernel(m: &Mat) -> Subspace {
    let (r, pivots) = rref(m);
    let n = m.cols();
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let vectors = (0..n).filter(|&f| !is_pivot[f]).map(|f| {
        let mut v = unit_vec(n, f);
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -r.get(i, f);
        }
        v
    });
    Subspace::span(n, vectors)
}

/// Column space of `m`.
pub fn image(m: &Mat) -> Subspace {
    Subspace::span(m.rows(), (0..m.cols()).map(|c| m.col(c)))
}

pub fn intersect(u: &Subspace, v: &Subspace) -> Result<Subspace> {
    check_ambient(u, v)?;
    if u.is_zero() || v.is_full() {
        return Ok(u.clone());
    }
    if v.is_zero() || u.is_full() {
        return Ok(v.clone());
    }
    let q = quotient(v.ambient, v)?;
    let restricted = q.projection.try_mul(&u.inclusion())?;
    let coeffs = kernel(&restricted);
    Ok(Subspace::span(
        u.ambient,
        coeffs.vectors().iter().map(|c| u.combine(c)),
    ))
}

/// `{x : m x ∈ u}`.
pub fn preimage(m: &Mat, u: &Subspace) -> Result<Subspace> {
    if m.rows() != u.ambient {
        return Err(Error::Dimension(format!(
            "preimage: map has {} rows but subspace lives in dimension {}",
            m.rows(),
            u.ambient
        )));
    }
    let q = quotient(u.ambient, u)?;
    Ok(kernel(&q.projection.try_mul(m)?))
}

/// Any solution of `m x = b`.
pub fn solve(m: &Mat, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    if b.len() != m.rows() {
        return Err(Error::Dimension(format!(
            "solve: right-hand side has length {} but the matrix has {} rows",
            b.len(),
            m.rows()
        )));
    }
    Ok(Solver::new(m).solve(b))
}

/// Precomputed elimination of a fixed matrix, reused across many
/// right-hand sides.
#[derive(Clone, Debug)]
pub struct Solver {
    rows: usize,
    cols: usize,
    // Reduced rows of [m | I]; `solution_rows` have their pivot inside m,
    // `constraint_rows` inside the identity block.
    reduced: Mat,
    solution_rows: Vec<(usize, usize)>,
    constraint_rows: Vec<usize>,
}

impl Solver {
    pub fn new(m: &Mat) -> Self {
        let aug = m.hstack(&Mat::identity(m.rows()));
        let (reduced, pivots) = rref(&aug);
        let mut solution_rows = Vec::new();
        let mut constraint_rows = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            if p < m.cols() {
                solution_rows.push((i, p));
            } else {
                constraint_rows.push(i);
            }
        }
        Solver {
            rows: m.rows(),
            cols: m.cols(),
            reduced,
            solution_rows,
            constraint_rows,
        }
    }

    pub fn rank(&self) -> usize {
        self.solution_rows.len()
    }

    fn apply_left(&self, row: usize, b: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (k, bk) in b.iter().enumerate() {
            acc.add_mul(self.reduced.get(row, self.cols + k), bk);
        }
        acc
    }

    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows, "solver right-hand side length mismatch");
        if self
            .constraint_rows
            .iter()
            .any(|&r| !self.apply_left(r, b).is_zero())
        {
            return None;
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for &(r, p) in &self.solution_rows {
            x[p] = self.apply_left(r, b);
        }
        Some(x)
    }
}

/// A quotient `V / U` with its canonical projection and a section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientData {
    pub sub: Subspace,
    /// Quotient dimension × ambient dimension.
    pub projection: Mat,
    /// Ambient dimension × quotient dimension; `projection · section = id`.
    pub section: Mat,
    /// Ambient coordinates used as the complement basis, increasing.
    pub complement: Vec<usize>,
}

impl QuotientData {
    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.sub.ambient
    }

    pub fn project(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.projection.mul_vec(v)
    }

    pub fn lift(&self, q: &[Scalar]) -> Vec<Scalar> {
        self.section.mul_vec(q)
    }
}

/// Quotient of a `dim`-dimensional space by `u`. The complement basis is
/// the set of non-pivot coordinates of `u` in increasing order; the
/// projection reduces a vector modulo `u` and reads off those coordinates.
pub fn quotient(dim: usize, u: &Subspace) -> Result<QuotientData> {
    if u.ambient != dim {
        return Err(Error::Dimension(format!(
            "quotient: subspace lives in dimension {} not {dim}",
            u.ambient
        )));
    }
    let mut is_pivot = vec![None; dim];
    for (i, &p) in u.pivots.iter().enumerate() {
        is_pivot[p] = Some(i);
    }
    let complement: Vec<usize> = (0..dim).filter(|&c| is_pivot[c].is_none()).collect();
    let q = complement.len();
    let mut projection = Mat::zeros(q, dim);
    let mut section = Mat::zeros(dim, q);
    for (j, &c) in complement.iter().enumerate() {
        projection.set(j, c, Scalar::one());
        section.set(c, j, Scalar::one());
        for (i, &p) in u.pivots.iter().enumerate() {
            let x = u.basis.get(i, c);
            if !x.is_zero() {
                projection.set(j, p, -x);
            }
        }
    }
    Ok(QuotientData {
        sub: u.clone(),
        projection,
        section,
        complement,
    })
}

/// Given `m : V → W` and a surjection `p : V → U` whose kernel lies in the
/// kernel of `m`, returns the unique `t : U → W` with `t · p = m`.
pub fn factor_through(m: &Mat, p: &Mat) -> Result<Mat> {
    if m.cols() != p.cols() {
        return Err(Error::Dimension(format!(
            "factor_through: maps have sources of dimension {} and {}",
            m.cols(),
            p.cols()
        )));
    }
    let solver = Solver::new(p);
    let mut cols = Vec::with_capacity(p.rows());
    for u in 0..p.rows() {
        let pre = solver.solve(&unit_vec(p.rows(), u)).ok_or_else(|| {
            Error::Precondition("factor_through: the projection is not surjective".into())
        })?;
        cols.push(m.mul_vec(&pre));
    }
    let t = Mat::from_columns(m.rows(), &cols);
    if &t * p != *m {
        return Err(Error::Precondition(
            "factor_through: the map does not vanish on the kernel of the projection".into(),
        ));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(&Mat::identity(3)).dim(), 0);
        assert!(kernel(&Mat::zeros(2, 3)).is_full());
        let k = kernel(&Mat::from_i64(1, 2, &[1, 1]));
        assert_eq!(k.vectors(), vec![vec![s(1), s(-1)]]);
    }

    #[test]
    fn image_intersect_preimage_examples() {
        assert!(image(&Mat::identity(4)).is_full());
        let e1 = Subspace::span(2, [vec![s(1), s(0)]]);
        let e2 = Subspace::span(2, [vec![s(0), s(1)]]);
        assert!(intersect(&e1, &e2).unwrap().is_zero());
        let pre = preimage(&Mat::from_i64(1, 2, &[1, 0]), &Subspace::zero(1)).unwrap();
        assert_eq!(pre, e2);
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let u = Subspace::zero(2);
        let v = Subspace::zero(3);
        assert!(matches!(intersect(&u, &v), Err(Error::Dimension(_))));
        assert!(matches!(
            solve(&Mat::identity(2), &[s(1)]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn quotient_examples() {
        let q = quotient(3, &Subspace::zero(3)).unwrap();
        assert!(q.projection.is_identity() && q.section.is_identity());
        assert_eq!(quotient(3, &Subspace::full(3)).unwrap().dim(), 0);
        let u = Subspace::span(2, [vec![s(1), s(1)]]);
        let q = quotient(2, &u).unwrap();
        assert_eq!(q.dim(), 1);
        assert!((&q.projection * &q.section).is_identity());
        assert_eq!(kernel(&q.projection), u);
    }

    #[test]
    fn solve_finds_solution_or_none() {
        let m = Mat::from_i64(2, 2, &[1, 1, 2, 2]);
        let x = solve(&m, &[s(3), s(6)]).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x), vec![s(3), s(6)]);
        assert!(solve(&m, &[s(1), s(0)]).unwrap().is_none());
    }

    #[test]
    fn factor_through_rejects_non_vanishing_maps() {
        let p = Mat::from_i64(1, 2, &[1, 1]);
        let good = Mat::from_i64(1, 2, &[2, 2]);
        assert_eq!(factor_through(&good, &p).unwrap(), Mat::from_i64(1, 1, &[2]));
        let bad = Mat::from_i64(1, 2, &[1, 0]);
        assert!(factor_through(&bad, &p).is_err());
    }
}
