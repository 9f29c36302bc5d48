//! Finite-dimensional bimodules, their maps, and tensor/hom/Tor.

use std::fmt;
use std::sync::Arc;

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::exactla::{
    kernel, kron_vec, quotient, unit_vec, vec_is_zero, Echelon, Mat, QuotientData, Scalar,
    Subspace,
};

/// A module over `algebra` with optional left and right actions. A
/// one-sided module simply has the other action absent.
#[derive(Clone, PartialEq, Eq)]
pub struct Bimodule {
    algebra: Arc<Algebra>,
    dim: usize,
    left: Option<Vec<Mat>>,
    right: Option<Vec<Mat>>,
}

impl fmt::Debug for Bimodule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Bimodule(dim {}, left: {}, right: {})",
            self.dim,
            self.left.is_some(),
            self.right.is_some()
        )
    }
}

impl Bimodule {
    /// Validating constructor.
    pub fn new(
        algebra: Arc<Algebra>,
        dim: usize,
        left: Option<Vec<Mat>>,
        right: Option<Vec<Mat>>,
    ) -> Result<Self> {
        let m = Self::new_unchecked(algebra, dim, left, right);
        m.validate()?;
        Ok(m)
    }

    pub fn new_unchecked(
        algebra: Arc<Algebra>,
        dim: usize,
        left: Option<Vec<Mat>>,
        right: Option<Vec<Mat>>,
    ) -> Self {
        Bimodule {
            algebra,
            dim,
            left,
            right,
        }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_left(&self) -> bool {
        self.left.is_some()
    }

    pub fn has_right(&self) -> bool {
        self.right.is_some()
    }

    pub fn left(&self) -> Result<&[Mat]> {
        self.left
            .as_deref()
            .ok_or_else(|| Error::Precondition("module has no left action".into()))
    }

    pub fn right(&self) -> Result<&[Mat]> {
        self.right
            .as_deref()
            .ok_or_else(|| Error::Precondition("module has no right action".into()))
    }

    pub fn left_by(&self, a: &[Scalar]) -> Result<Mat> {
        Ok(combine(self.left()?, a, self.dim))
    }

    pub fn right_by(&self, a: &[Scalar]) -> Result<Mat> {
        Ok(combine(self.right()?, a, self.dim))
    }

    /// Checks the action axioms. Multiplicativity is verified for every
    /// algebra generator against every basis element, which implies it for
    /// all pairs.
    pub fn validate(&self) -> Result<()> {
        let a = &self.algebra;
        let n = a.dim();
        let id = Mat::identity(self.dim);
        let bad = |msg: String| Err(Error::Validation(msg));
        for (side, acts) in [("left", &self.left), ("right", &self.right)] {
            let Some(acts) = acts else { continue };
            if acts.len() != n {
                return bad(format!("{side} action has {} matrices, expected {n}", acts.len()));
            }
            if let Some(m) = acts.iter().find(|m| m.shape() != (self.dim, self.dim)) {
                return bad(format!(
                    "{side} action matrix has shape {:?}, expected {}x{}",
                    m.shape(),
                    self.dim,
                    self.dim
                ));
            }
            if combine(acts, a.unit(), self.dim) != id {
                return bad(format!("unit does not act as the identity on the {side}"));
            }
        }
        if let Some(l) = &self.left {
            for &g in a.generators() {
                for j in 0..n {
                    if &l[g] * &l[j] != combine(l, &a.basis_product(g, j), self.dim) {
                        return bad(format!("left action is not multiplicative at e{g} e{j}"));
                    }
                }
            }
        }
        if let Some(r) = &self.right {
            for &g in a.generators() {
                for j in 0..n {
                    if &r[g] * &r[j] != combine(r, &a.basis_product(j, g), self.dim) {
                        return bad(format!("right action is not multiplicative at e{j} e{g}"));
                    }
                }
            }
        }
        if let (Some(l), Some(r)) = (&self.left, &self.right) {
            for &g in a.generators() {
                for &h in a.generators() {
                    if &l[g] * &r[h] != &r[h] * &l[g] {
                        return bad(format!("left e{g} and right e{h} actions do not commute"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks multiplicativity on every pair of basis elements rather than
    /// on generators only.
    pub fn validate_exhaustive(&self) -> Result<()> {
        let a = &self.algebra;
        let n = a.dim();
        let bad = |msg: String| Err(Error::Validation(msg));
        self.validate()?;
        for i in 0..n {
            for j in 0..n {
                let prod = a.basis_product(i, j);
                if let Some(l) = &self.left {
                    if &l[i] * &l[j] != combine(l, &prod, self.dim) {
                        return bad(format!("(e{i} e{j}) x != e{i} (e{j} x)"));
                    }
                }
                if let Some(r) = &self.right {
                    if &r[j] * &r[i] != combine(r, &prod, self.dim) {
                        return bad(format!("x (e{i} e{j}) != (x e{i}) e{j}"));
                    }
                }
                if let (Some(l), Some(r)) = (&self.left, &self.right) {
                    if &l[i] * &r[j] != &r[j] * &l[i] {
                        return bad(format!("(e{i} x) e{j} != e{i} (x e{j})"));
                    }
                }
            }
        }
        Ok(())
    }

    /// The restriction to a subspace closed under the present actions.
    pub fn restrict(&self, sub: &Subspace) -> Result<Bimodule> {
        let restrict_all = |acts: &[Mat]| -> Result<Vec<Mat>> {
            acts.iter().map(|m| restrict_endo(m, sub)).collect()
        };
        Ok(Bimodule {
            algebra: self.algebra.clone(),
            dim: sub.dim(),
            left: self.left.as_deref().map(restrict_all).transpose()?,
            right: self.right.as_deref().map(restrict_all).transpose()?,
        })
    }

    /// The quotient by a sub-bimodule, with induced actions.
    pub fn quotient_by(&self, sub: &Subspace) -> Result<(Bimodule, QuotientData)> {
        let q = quotient(self.dim, sub)?;
        let induce = |acts: &[Mat]| -> Vec<Mat> { acts.iter().map(|m| induced(m, &q)).collect() };
        let module = Bimodule {
            algebra: self.algebra.clone(),
            dim: q.dim(),
            left: self.left.as_deref().map(induce),
            right: self.right.as_deref().map(induce),
        };
        Ok((module, q))
    }

    pub fn forget_left(&self) -> Bimodule {
        Bimodule {
            left: None,
            ..self.clone()
        }
    }

    pub fn forget_right(&self) -> Bimodule {
        Bimodule {
            right: None,
            ..self.clone()
        }
    }
}

fn combine(mats: &[Mat], coeffs: &[Scalar], dim: usize) -> Mat {
    let mut out = Mat::zeros(dim, dim);
    for (m, c) in mats.iter().zip(coeffs) {
        out.add_scaled(c, m);
    }
    out
}

/// Matrix of `m` restricted to the invariant subspace `sub`, in its
/// coordinates.
fn restrict_endo(m: &Mat, sub: &Subspace) -> Result<Mat> {
    let cols: Result<Vec<Vec<Scalar>>> = (0..sub.dim())
        .map(|i| {
            sub.coords(&m.mul_vec(sub.basis().row(i))).ok_or_else(|| {
                Error::Precondition("subspace is not invariant under the action".into())
            })
        })
        .collect();
    Ok(Mat::from_columns(sub.dim(), &cols?))
}

/// `p ∘ m ∘ s` for a quotient whose section picks ambient coordinates.
fn induced(m: &Mat, q: &QuotientData) -> Mat {
    let cols: Vec<Vec<Scalar>> = q.complement.iter().map(|&c| q.project(&m.col(c))).collect();
    Mat::from_columns(q.dim(), &cols)
}

/// A linear map between modules.
#[derive(Clone, Debug)]
pub struct BimoduleMap {
    pub source: Arc<Bimodule>,
    pub target: Arc<Bimodule>,
    pub mat: Mat,
}

impl BimoduleMap {
    pub fn new(source: Arc<Bimodule>, target: Arc<Bimodule>, mat: Mat) -> Result<Self> {
        if mat.shape() != (target.dim(), source.dim()) {
            return Err(Error::Dimension(format!(
                "map matrix is {:?}, expected {}x{}",
                mat.shape(),
                target.dim(),
                source.dim()
            )));
        }
        Ok(BimoduleMap {
            source,
            target,
            mat,
        })
    }

    pub fn is_left_linear(&self) -> bool {
        intertwines(&self.mat, &self.source.left, &self.target.left)
    }

    pub fn is_right_linear(&self) -> bool {
        intertwines(&self.mat, &self.source.right, &self.target.right)
    }

    pub fn is_bilinear(&self) -> bool {
        self.is_left_linear() && self.is_right_linear()
    }
}

fn intertwines(t: &Mat, src: &Option<Vec<Mat>>, tgt: &Option<Vec<Mat>>) -> bool {
    match (src, tgt) {
        (Some(s), Some(g)) => s.iter().zip(g).all(|(a, b)| t * a == b * t),
        _ => false,
    }
}

/// `A^rank` as a left module, copy `r` occupying indices `r·dim A ..`.
pub fn free_module(a: &Arc<Algebra>, rank: usize) -> Bimodule {
    let id = Mat::identity(rank);
    Bimodule {
        algebra: a.clone(),
        dim: rank * a.dim(),
        left: Some(a.left_muls().iter().map(|l| id.kron(l)).collect()),
        right: None,
    }
}

pub fn regular_bimodule(a: &Arc<Algebra>) -> Bimodule {
    Bimodule {
        algebra: a.clone(),
        dim: a.dim(),
        left: Some(a.left_muls().to_vec()),
        right: Some(a.right_muls().to_vec()),
    }
}

/// `E ⊗_𝕜 F`, with `e_i ⊗ f_j` at index `i·dim F + j`; the left action
/// comes from `E` and the right action from `F`.
pub fn tensor_k(e: &Bimodule, f: &Bimodule) -> Bimodule {
    let id_e = Mat::identity(e.dim);
    let id_f = Mat::identity(f.dim);
    Bimodule {
        algebra: e.algebra.clone(),
        dim: e.dim * f.dim,
        left: e.left.as_ref().map(|l| l.iter().map(|m| m.kron(&id_f)).collect()),
        right: f.right.as_ref().map(|r| r.iter().map(|m| id_e.kron(m)).collect()),
    }
}

/// `E ⊗_A F` together with the canonical projection from `E ⊗_𝕜 F`.
#[derive(Clone, Debug)]
pub struct TensorA {
    pub module: Bimodule,
    pub quotient: QuotientData,
    left_dim: usize,
    right_dim: usize,
}

impl TensorA {
    pub fn dim(&self) -> usize {
        self.module.dim
    }

    /// Class of `x ⊗ y`.
    pub fn class_of(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        self.quotient.project(&kron_vec(x, y))
    }

    pub fn project(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.quotient.project(v)
    }

    /// A representative in `E ⊗_𝕜 F`.
    pub fn lift(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.quotient.lift(v)
    }

    /// The pair of basis indices `(x, y)` whose tensor represents the
    /// `k`-th basis class.
    pub fn section_pair(&self, k: usize) -> (usize, usize) {
        let c = self.quotient.complement[k];
        (c / self.right_dim, c % self.right_dim)
    }

    pub fn factor_dims(&self) -> (usize, usize) {
        (self.left_dim, self.right_dim)
    }

    /// `p ∘ m` restricted along the section, i.e. the induced map
    /// `E ⊗_A F → target` of a map `m` on `E ⊗_𝕜 F` that vanishes on the
    /// balancing relations.
    pub fn descend(&self, m: &Mat) -> Mat {
        let cols: Vec<Vec<Scalar>> = self.quotient.complement.iter().map(|&c| m.col(c)).collect();
        Mat::from_columns(m.rows(), &cols)
    }
}

/// The balancing relations `xa ⊗ y − x ⊗ ay`. Only algebra generators are
/// needed since the relation for `ab` is a sum of relations for `a` and
/// `b`.
pub fn balancing_relations(e: &Bimodule, f: &Bimodule) -> Result<Subspace> {
    let re = e.right()?;
    let lf = f.left()?;
    let a = &e.algebra;
    let n = e.dim * f.dim;
    let mut ech = Echelon::new(n);
    for &g in a.generators() {
        for x in 0..e.dim {
            let xa = re[g].col(x);
            for y in 0..f.dim {
                if ech.is_full() {
                    break;
                }
                let ay = lf[g].col(y);
                let mut v = vec![Scalar::zero(); n];
                for (i, c) in xa.iter().enumerate() {
                    if !c.is_zero() {
                        v[i * f.dim + y] += c;
                    }
                }
                for (j, c) in ay.iter().enumerate() {
                    if !c.is_zero() {
                        v[x * f.dim + j] -= c;
                    }
                }
                if !vec_is_zero(&v) {
                    ech.insert(v);
                }
            }
        }
    }
    Ok(Subspace::from_echelon(n, ech))
}

pub fn tensor_a(e: &Bimodule, f: &Bimodule) -> Result<TensorA> {
    let rel = balancing_relations(e, f)?;
    let (module, quotient) = tensor_k(e, f).quotient_by(&rel)?;
    Ok(TensorA {
        module,
        quotient,
        left_dim: e.dim,
        right_dim: f.dim,
    })
}

/// The map `f ⊗_A g` induced between two balanced tensor products.
pub fn tensor_a_map(f: &Mat, g: &Mat, src: &TensorA, tgt: &TensorA) -> Mat {
    let cols: Vec<Vec<Scalar>> = (0..src.dim())
        .map(|k| {
            let (x, y) = src.section_pair(k);
            tgt.class_of(&f.col(x), &g.col(y))
        })
        .collect();
    Mat::from_columns(tgt.dim(), &cols)
}

/// `E ⊗_A A` with the isomorphism `E → E ⊗_A A`, `x ↦ x ⊗ 1`.
pub fn right_unitor(e: &Bimodule) -> Result<(TensorA, Mat)> {
    let reg = regular_bimodule(e.algebra());
    let t = tensor_a(e, &reg)?;
    let one = e.algebra().unit().to_vec();
    let cols: Vec<Vec<Scalar>> = (0..e.dim)
        .map(|x| t.class_of(&unit_vec(e.dim, x), &one))
        .collect();
    let iso = Mat::from_columns(t.dim(), &cols);
    Ok((t, iso))
}

/// Canonical basis of the left-A-linear maps `E → F`, as vectors in the
/// row-major `dim F × dim E` map space.
pub fn hom_left_linear(e: &Bimodule, f: &Bimodule) -> Result<Subspace> {
    let le = e.left()?;
    let lf = f.left()?;
    let (de, df) = (e.dim, f.dim);
    let n = de * df;
    let gens = e.algebra.generators();
    let mut rows = Vec::with_capacity(gens.len() * n);
    // (T L_E)[r, c] - (L_F T)[r, c] as a linear form in T.
    for &g in gens {
        for r in 0..df {
            for c in 0..de {
                let mut row = vec![Scalar::zero(); n];
                for k in 0..de {
                    let x = le[g].get(k, c);
                    if !x.is_zero() {
                        row[r * de + k] += x;
                    }
                }
                for k in 0..df {
                    let x = lf[g].get(r, k);
                    if !x.is_zero() {
                        row[k * de + c] -= x;
                    }
                }
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return Ok(Subspace::full(n));
    }
    Ok(kernel(&Mat::from_rows(n, rows)?))
}

/// Smallest subspace containing `gens` and stable under every present
/// action.
pub fn sub_bimodule_generated(e: &Bimodule, gens: &[Vec<Scalar>]) -> Subspace {
    let a = &e.algebra;
    let mut ech = Echelon::new(e.dim);
    let mut frontier: Vec<Vec<Scalar>> = Vec::new();
    for g in gens {
        assert_eq!(g.len(), e.dim, "generator has wrong length");
        if ech.insert(g.clone()) {
            frontier.push(g.clone());
        }
    }
    while !frontier.is_empty() && !ech.is_full() {
        let mut next = Vec::new();
        for acts in [&e.left, &e.right].into_iter().flatten() {
            for v in &frontier {
                for &g in a.generators() {
                    let w = acts[g].mul_vec(v);
                    if ech.insert(w.clone()) {
                        next.push(w);
                    }
                }
            }
        }
        frontier = next;
    }
    Subspace::from_echelon(e.dim, ech)
}

/// A minimal-size generating set of a left module, picked greedily from
/// the standard basis.
pub fn left_generators(e: &Bimodule) -> Result<Vec<usize>> {
    let left = e.left()?;
    let alone = Bimodule {
        algebra: e.algebra.clone(),
        dim: e.dim,
        left: Some(left.to_vec()),
        right: None,
    };
    let mut gens = Vec::new();
    let mut span = Subspace::zero(e.dim);
    for i in 0..e.dim {
        if span.is_full() {
            break;
        }
        let v = unit_vec(e.dim, i);
        if !span.contains(&v) {
            gens.push(i);
            let vs: Vec<Vec<Scalar>> = gens.iter().map(|&g| unit_vec(e.dim, g)).collect();
            span = sub_bimodule_generated(&alone, &vs);
        }
    }
    Ok(gens)
}

/// `dim Tor₁^A(W, E)` from the presentation `0 → K → A^m → E → 0` given
/// by a generating set of `E`.
pub fn tor1(w: &Bimodule, e: &Bimodule) -> Result<usize> {
    w.right()?;
    let le = e.left()?;
    let a = e.algebra.clone();
    let n = a.dim();
    let gens = left_generators(e)?;
    let m = gens.len();
    let free = free_module(&a, m);
    // (r, i) ↦ e_i · g_r
    let pres = Mat::from_fn(e.dim, m * n, |row, col| {
        let (r, i) = (col / n, col % n);
        le[i].get(row, gens[r]).clone()
    });
    let k = kernel(&pres);
    if k.is_zero() {
        return Ok(0);
    }
    let k_mod = free.restrict(&k)?;
    let w_left = Bimodule {
        left: None,
        ..w.clone()
    };
    let wk = tensor_a(&w_left, &k_mod)?;
    let wf = tensor_a(&w_left, &free)?;
    let map = tensor_a_map(&Mat::identity(w.dim), &k.inclusion(), &wk, &wf);
    Ok(kernel(&map).dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{cyclic_table, group_algebra, matrix_algebra, truncated_polynomial};

    fn z2() -> Arc<Algebra> {
        Arc::new(group_algebra(&cyclic_table(2)).unwrap())
    }

    #[test]
    fn regular_and_free_modules() {
        let a = z2();
        let reg = regular_bimodule(&a);
        reg.validate_exhaustive().unwrap();
        let swap = Mat::from_i64(2, 2, &[0, 1, 1, 0]);
        assert_eq!(reg.left().unwrap()[1], swap);
        assert_eq!(reg.right().unwrap()[1], swap);
        let f = free_module(&a, 3);
        assert_eq!(f.dim(), 6);
        f.validate().unwrap();
        assert_eq!(tensor_k(&reg, &reg).dim(), 4);
    }

    #[test]
    fn tensor_with_unit_object() {
        let a = Arc::new(truncated_polynomial(3).unwrap());
        let reg = regular_bimodule(&a);
        assert_eq!(tensor_a(&reg, &reg).unwrap().dim(), 3);
        let e = free_module(&a, 2);
        assert_eq!(tensor_a(&reg, &e).unwrap().dim(), 6);
        let (t, iso) = right_unitor(&reg).unwrap();
        assert_eq!(iso.rank(), t.dim());
    }

    #[test]
    fn hom_left_linear_examples() {
        let a = z2();
        let reg = regular_bimodule(&a);
        assert_eq!(hom_left_linear(&reg, &reg).unwrap().dim(), 2);
        let m2 = Arc::new(matrix_algebra(2).unwrap());
        let reg2 = regular_bimodule(&m2);
        assert_eq!(hom_left_linear(&reg2, &reg2).unwrap().dim(), 4);
        let zero = Bimodule::new(a.clone(), 0, Some(vec![Mat::zeros(0, 0); 2]), None).unwrap();
        assert!(hom_left_linear(&reg, &zero).unwrap().is_zero());
    }

    #[test]
    fn saturation_examples() {
        let a = z2();
        let reg = regular_bimodule(&a);
        assert!(sub_bimodule_generated(&reg, &[vec![Scalar::zero(); 2]]).is_zero());
        assert!(sub_bimodule_generated(&reg, &[a.unit().to_vec()]).is_full());
    }

    #[test]
    fn tor_vanishes_on_free_modules() {
        let a = Arc::new(truncated_polynomial(3).unwrap());
        let reg = regular_bimodule(&a);
        assert_eq!(tor1(&reg, &free_module(&a, 2)).unwrap(), 0);
        assert_eq!(tor1(&reg, &reg).unwrap(), 0);
        // A/(x) as a left module: Tor₁(A/(x), A/(x)) = (x)/(x²) has dim 1.
        let z = Mat::zeros(1, 1);
        let one = Mat::identity(1);
        let kx = Bimodule::new(a.clone(), 1, Some(vec![one.clone(), z.clone(), z.clone()]), Some(vec![one, z.clone(), z])).unwrap();
        assert_eq!(tor1(&kx, &kx).unwrap(), 1);
    }

    #[test]
    fn functoriality_of_tensor_a() {
        let a = Arc::new(truncated_polynomial(3).unwrap());
        let reg = regular_bimodule(&a);
        let t = tensor_a(&reg, &reg).unwrap();
        let x = a.right_mul(1).clone();
        let x2 = a.right_mul(2).clone();
        let induced = tensor_a_map(&x, &x2, &t, &t);
        let lhs = &induced * &t.quotient.projection;
        let rhs = &t.quotient.projection * &x.kron(&x2);
        assert_eq!(lhs, rhs);
    }
}
