//! Vector fields, their bimodule structure and pairings, `Asym`,
//! projectors and the bracket.

use std::sync::{Arc, OnceLock};

use crate::algebra::{clifford_subsets, Algebra, Family};
use crate::bimodule::{hom_left_linear, regular_bimodule, right_unitor, tensor_a, Bimodule, TensorA};
use crate::calculus::{Calculus, Exterior2};
use crate::diffops::{is_weak_operator, jet_map, symbol2, weak_diffop_space};
use crate::error::{Error, Result};
use crate::exactla::{
    factor_through, intersect, kernel, preimage, vec_add, vec_is_zero, vec_sub, Mat, Scalar,
    Subspace,
};
use crate::jets::{relation_tower, RelationTower};

pub struct VectorFieldSpace {
    calculus: Arc<Calculus>,
    tower: RelationTower,
    basis: Subspace,
    fields: Vec<Mat>,
    thetas: Vec<Mat>,
    module: Arc<Bimodule>,
    xx: OnceLock<Result<TensorA>>,
}

impl std::fmt::Debug for VectorFieldSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "VectorFieldSpace(dim {})", self.dim())
    }
}

/// `{Δ : Δ(k) = 0 for k ∈ K}` inside `Hom(A, A)`.
fn annihilator(n: usize, k: &Subspace) -> Subspace {
    if k.is_zero() {
        return Subspace::full(n * n);
    }
    let mut rows = Vec::with_capacity(k.dim() * n);
    for v in k.vectors() {
        for r in 0..n {
            let mut row = vec![Scalar::zero(); n * n];
            row[r * n..(r + 1) * n].clone_from_slice(&v);
            rows.push(row);
        }
    }
    kernel(&Mat::from_rows(n * n, rows).expect("rows have the map-space width"))
}

pub fn vector_fields(c: &Arc<Calculus>) -> Result<VectorFieldSpace> {
    let a = c.algebra();
    let n = a.dim();
    let e = Arc::new(regular_bimodule(a).forget_right());
    let tower = relation_tower(c, &e)?;
    let d1 = weak_diffop_space(&tower, &e, 1)?;
    let ann = annihilator(n, &c.kernel_d());
    let basis = intersect(&d1.basis, &ann)?;

    let omega_left = c.omega1().forget_right();
    let hom = hom_left_linear(&omega_left, &e)?;
    let via_theta = Subspace::span(
        n * n,
        hom.vectors().into_iter().map(|v| {
            let theta = Mat::from_vec(n, c.dim_omega1(), v);
            (&theta * c.d()).to_vec()
        }),
    );
    if via_theta != basis {
        return Err(Error::Consistency(
            "vector fields from operators and from forms on Ω¹ disagree".into(),
        ));
    }

    let fields: Vec<Mat> = basis
        .vectors()
        .into_iter()
        .map(|v| Mat::from_vec(n, n, v))
        .collect();
    let thetas = fields
        .iter()
        .map(|x| factor_through(&jet_map(&tower, &e, x)?, c.rho()))
        .collect::<Result<Vec<Mat>>>()?;

    let coords_of = |m: &Mat| -> Result<Vec<Scalar>> {
        basis
            .coords(&m.to_vec())
            .ok_or_else(|| Error::Consistency("action leaves the vector fields".into()))
    };
    let omega_right = c.omega1().right()?;
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for i in 0..n {
        let rd = &omega_right[i] * c.d();
        let lcols = thetas
            .iter()
            .map(|th| coords_of(&(th * &rd)))
            .collect::<Result<Vec<_>>>()?;
        let rcols = fields
            .iter()
            .map(|x| coords_of(&(a.right_mul(i) * x)))
            .collect::<Result<Vec<_>>>()?;
        left.push(Mat::from_columns(basis.dim(), &lcols));
        right.push(Mat::from_columns(basis.dim(), &rcols));
    }
    let module = Arc::new(Bimodule::new_unchecked(
        a.clone(),
        basis.dim(),
        Some(left),
        Some(right),
    ));
    Ok(VectorFieldSpace {
        calculus: c.clone(),
        tower,
        basis,
        fields,
        thetas,
        module,
        xx: OnceLock::new(),
    })
}

impl VectorFieldSpace {
    pub fn calculus(&self) -> &Arc<Calculus> {
        &self.calculus
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        self.calculus.algebra()
    }

    /// The relation tower of `A` as a left module over itself.
    pub fn tower(&self) -> &RelationTower {
        &self.tower
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Canonical basis inside the flattened `Hom(A, A)`.
    pub fn basis(&self) -> &Subspace {
        &self.basis
    }

    pub fn fields(&self) -> &[Mat] {
        &self.fields
    }

    /// `θ_X : Ω¹ → A` for each basis field.
    pub fn thetas(&self) -> &[Mat] {
        &self.thetas
    }

    /// `𝔛` as an `A`-bimodule in basis coordinates.
    pub fn module(&self) -> &Arc<Bimodule> {
        &self.module
    }

    pub fn coords(&self, x: &Mat) -> Option<Vec<Scalar>> {
        self.basis.coords(&x.to_vec())
    }

    pub fn contains(&self, x: &Mat) -> bool {
        self.basis.contains(&x.to_vec())
    }

    pub fn field(&self, coords: &[Scalar]) -> Mat {
        let n = self.algebra().dim();
        Mat::from_vec(n, n, self.basis.combine(coords))
    }

    /// `θ_X` for a field given in basis coordinates.
    pub fn theta(&self, coords: &[Scalar]) -> Mat {
        let mut out = Mat::zeros(self.algebra().dim(), self.calculus.dim_omega1());
        for (t, c) in self.thetas.iter().zip(coords) {
            out.add_scaled(c, t);
        }
        out
    }

    /// `⟨ω, X⟩ = θ_X(ω)`.
    pub fn interior(&self, omega: &[Scalar], x: &Mat) -> Result<Vec<Scalar>> {
        let c = self
            .coords(x)
            .ok_or_else(|| Error::Precondition("map is not a vector field".into()))?;
        Ok(self.theta(&c).mul_vec(omega))
    }

    /// `aX`, as a map `A → A`.
    pub fn left_act(&self, a: &[Scalar], x: &Mat) -> Result<Mat> {
        let c = self
            .coords(x)
            .ok_or_else(|| Error::Precondition("map is not a vector field".into()))?;
        let ra = self.calculus.omega1().right_by(a)?;
        Ok(&(&self.theta(&c) * &ra) * self.calculus.d())
    }

    /// `Xa = R_a ∘ X`.
    pub fn right_act(&self, a: &[Scalar], x: &Mat) -> Mat {
        &self.algebra().right_mul_by(a) * x
    }

    /// Checks both round trips of `X ↦ θ_X` and `θ ↦ θ ∘ d`.
    pub fn check_duality(&self) -> Result<()> {
        let c = &self.calculus;
        for (x, th) in self.fields.iter().zip(&self.thetas) {
            if &(th * c.d()) != x {
                return Err(Error::Consistency("θ_X ∘ d differs from X".into()));
            }
        }
        let n = self.algebra().dim();
        let e = regular_bimodule(self.algebra()).forget_right();
        let hom = hom_left_linear(&c.omega1().forget_right(), &e)?;
        for v in hom.vectors() {
            let theta = Mat::from_vec(n, c.dim_omega1(), v);
            let x = &theta * c.d();
            let coords = self
                .coords(&x)
                .ok_or_else(|| Error::Consistency("θ ∘ d is not a vector field".into()))?;
            if self.theta(&coords) != theta {
                return Err(Error::Consistency("θ ↦ θ ∘ d ↦ θ is not the identity".into()));
            }
        }
        Ok(())
    }

    /// `𝔛 ⊗_A 𝔛`.
    pub fn xx(&self) -> Result<&TensorA> {
        self.xx
            .get_or_init(|| tensor_a(&self.module, &self.module))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `θ_Y(α · θ_X(β))` for basis forms and basis fields.
    fn pair_basis(&self, alpha: usize, beta: usize, x: usize, y: usize) -> Result<Vec<Scalar>> {
        let tx_beta = self.thetas[x].col(beta);
        let right = self.calculus.omega1().right_by(&tx_beta)?;
        Ok(self.thetas[y].mul_vec(&right.col(alpha)))
    }

    /// `⟨⟨ξ, η⟩⟩` for `ξ ∈ Ω¹ ⊗_A Ω¹` and `η ∈ 𝔛 ⊗_A 𝔛`.
    pub fn pairing2(&self, xi: &[Scalar], eta: &[Scalar]) -> Result<Vec<Scalar>> {
        let m = self.pairing_against(xi)?;
        Ok(m.mul_vec(eta))
    }

    /// The map `η ↦ ⟨⟨ξ, η⟩⟩` on `𝔛 ⊗_A 𝔛`.
    pub fn pairing_against(&self, xi: &[Scalar]) -> Result<Mat> {
        let t2 = self.calculus.t2();
        let xx = self.xx()?;
        let n = self.algebra().dim();
        let mut cols = Vec::with_capacity(xx.dim());
        for u in 0..xx.dim() {
            let (x, y) = xx.section_pair(u);
            let mut acc = vec![Scalar::zero(); n];
            for (s, c) in xi.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (alpha, beta) = t2.section_pair(s);
                let v = self.pair_basis(alpha, beta, x, y)?;
                crate::exactla::vec_axpy(&mut acc, c, &v);
            }
            cols.push(acc);
        }
        Ok(Mat::from_columns(n, &cols))
    }

    /// Verifies that the pairing on representatives is balanced over both
    /// tensor products.
    pub fn check_pairing_balanced(&self) -> Result<()> {
        let c = &self.calculus;
        let a = self.algebra();
        let om = c.omega1();
        let dom = c.dim_omega1();
        let joint_kernel = {
            let rows: Vec<Vec<Scalar>> = self.thetas.iter().flat_map(|t| t.row_vecs()).collect();
            if rows.is_empty() {
                Subspace::full(dom)
            } else {
                kernel(&Mat::from_rows(dom, rows)?)
            }
        };
        let mut gammas = Vec::new();
        for x in 0..self.dim() {
            for beta in 0..dom {
                let tb = self.thetas[x].col(beta);
                let rtb = om.right_by(&tb)?;
                for alpha in 0..dom {
                    gammas.push(rtb.col(alpha));
                }
                for &g in a.generators() {
                    // αa · θ_X(β) − α · θ_X(aβ)
                    let tab = self.thetas[x].mul_vec(&om.left()?[g].col(beta));
                    let rtab = om.right_by(&tab)?;
                    for alpha in 0..dom {
                        let alpha_a = om.right()?[g].col(alpha);
                        let v = vec_sub(&rtb.mul_vec(&alpha_a), &rtab.col(alpha));
                        if !joint_kernel.contains(&v) {
                            return Err(Error::Consistency(
                                "pairing is not balanced over Ω¹ ⊗_A Ω¹".into(),
                            ));
                        }
                    }
                }
            }
        }
        let span = Subspace::span(dom, gammas);
        for gamma in span.vectors() {
            for &g in a.generators() {
                let gamma_a = om.right()?[g].mul_vec(&gamma);
                for y in 0..self.dim() {
                    let lhs = self.thetas[y].mul_vec(&gamma_a);
                    let ay = self.module.left()?[g].col(y);
                    let rhs = self.theta(&ay).mul_vec(&gamma);
                    if lhs != rhs {
                        return Err(Error::Consistency(
                            "pairing is not balanced over 𝔛 ⊗_A 𝔛".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// `c(ξ) = Σ ξ_{kl} X_l ∘ X_k` for `ξ = Σ ξ_{kl} X_k ⊗ X_l`.
    pub fn compose_c(&self, xi: &[Scalar]) -> Mat {
        let m = self.dim();
        assert_eq!(xi.len(), m * m, "compose_c: wrong tensor length");
        let n = self.algebra().dim();
        let mut out = Mat::zeros(n, n);
        for k in 0..m {
            for l in 0..m {
                let c = &xi[k * m + l];
                if !c.is_zero() {
                    out.add_scaled(c, &(&self.fields[l] * &self.fields[k]));
                }
            }
        }
        out
    }

    /// Whether the second-order symbol of `c(ξ)` on `S²` agrees with the
    /// double pairing against the class of `ξ`.
    pub fn check_symbol_pairing(&self, x2: &Exterior2, xi: &[Scalar]) -> Result<bool> {
        let s2 = x2.s2();
        if s2.is_zero() {
            return Ok(true);
        }
        let e = self.tower.module();
        let op = self.compose_c(xi);
        if !is_weak_operator(&self.tower, e, &op, 2)? {
            return Err(Error::Precondition(
                "composite of vector fields is not of order 2".into(),
            ));
        }
        let sym = symbol2(&self.tower, e, &op)?;
        let (t2a, iso) = right_unitor(&self.calculus.t2().module)?;
        let t2e = self.tower.t2e()?;
        if t2a.quotient.sub != t2e.quotient.sub {
            return Err(Error::Consistency("T2 ⊗_A A built inconsistently".into()));
        }
        let eta = self.xx()?.project(xi);
        for sigma in s2.vectors() {
            let lhs = sym.evaluate(&iso.mul_vec(&sigma))?;
            let rhs = self.pairing2(&sigma, &eta)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug)]
pub struct AsymData {
    /// Inside `𝔛 ⊗_A 𝔛`.
    pub ann: Subspace,
    /// Inside `𝔛 ⊗ 𝔛`, index `k·dim 𝔛 + l`.
    pub asym: Subspace,
    /// Whether the exterior component was maximal; closure of the bracket
    /// is only guaranteed then.
    pub maximal: bool,
}

pub fn asym(v: &VectorFieldSpace, x2: &Exterior2) -> Result<AsymData> {
    let xx = v.xx()?;
    let m = v.dim();
    let s2 = x2.s2();
    if s2.is_zero() {
        return Ok(AsymData {
            ann: Subspace::full(xx.dim()),
            asym: Subspace::full(m * m),
            maximal: x2.is_maximal(),
        });
    }
    v.check_pairing_balanced()?;
    let mut rows = Vec::new();
    for sigma in s2.vectors() {
        rows.extend(v.pairing_against(&sigma)?.row_vecs());
    }
    let ann = kernel(&Mat::from_rows(xx.dim(), rows)?);
    let asym = preimage(&xx.quotient.projection, &ann)?;
    Ok(AsymData {
        ann,
        asym,
        maximal: x2.is_maximal(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjectorKind {
    Orthogonal,
    Custom,
}

#[derive(Clone, Debug)]
pub struct ProjectorSpec {
    pub map: Mat,
    pub kind: ProjectorKind,
    /// Gram matrix on `𝔛 ⊗ 𝔛` for orthogonal projectors.
    pub gram: Option<Mat>,
}

impl ProjectorSpec {
    /// Checks `image ⊆ Asym`, plus idempotency, self-adjointness and
    /// `image = Asym` for orthogonal projectors.
    pub fn validate(&self, asym: &AsymData) -> Result<()> {
        let dim = asym.asym.ambient_dim();
        if self.map.shape() != (dim, dim) {
            return Err(Error::Dimension(format!(
                "projector has shape {:?}, expected {dim}x{dim}",
                self.map.shape()
            )));
        }
        let img = crate::exactla::image(&self.map);
        if !asym.asym.contains_subspace(&img) {
            return Err(Error::Precondition("projector image is not inside Asym".into()));
        }
        if self.kind == ProjectorKind::Orthogonal {
            let p = &self.map;
            if &(p * p) != p {
                return Err(Error::Consistency("orthogonal projector is not idempotent".into()));
            }
            if let Some(k) = &self.gram {
                if !(k * p).is_symmetric() {
                    return Err(Error::Consistency(
                        "orthogonal projector is not self-adjoint".into(),
                    ));
                }
            }
            if img != asym.asym {
                return Err(Error::Consistency("projector image differs from Asym".into()));
            }
            for b in asym.asym.vectors() {
                if p.mul_vec(&b) != b {
                    return Err(Error::Consistency("projector moves an element of Asym".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GramFamily {
    Group,
    Clifford,
}

/// Orthonormal group basis, or the subset-product diagonal for Clifford
/// algebras.
pub fn canonical_gram(a: &Algebra, family: GramFamily) -> Result<Mat> {
    match (family, a.family()) {
        (GramFamily::Group, Family::Group) => Ok(Mat::identity(a.dim())),
        (GramFamily::Clifford, Family::Clifford(d)) => {
            let diag: Vec<Scalar> = clifford_subsets(d.len())
                .iter()
                .map(|s| s.iter().fold(Scalar::one(), |acc, &i| acc * &d[i]))
                .collect();
            Ok(Mat::diagonal(&diag))
        }
        (f, g) => Err(Error::Precondition(format!(
            "canonical gram for {f:?} requested on an algebra of family {g:?}"
        ))),
    }
}

/// For each generator `e_i` of a Clifford algebra, whether
/// `⟨e_i x, e_i y⟩ = d_i ⟨x, y⟩` holds for the given gram.
pub fn clifford_invariance(a: &Algebra, gram: &Mat) -> Result<Vec<bool>> {
    let Family::Clifford(d) = a.family() else {
        return Err(Error::Precondition("not a Clifford algebra".into()));
    };
    Ok((0..d.len())
        .map(|i| {
            let l = a.left_mul(i + 1);
            &(&l.transpose() * gram) * l == gram.scale(&d[i])
        })
        .collect())
}

/// `⟨Δ, Δ′⟩ = tr(Δᵀ G Δ′ G⁻¹)` restricted to the field basis.
pub fn field_gram(v: &VectorFieldSpace, gram: &Mat) -> Result<Mat> {
    let n = v.algebra().dim();
    if gram.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "gram has shape {:?}, expected {n}x{n}",
            gram.shape()
        )));
    }
    if !gram.is_symmetric() || !gram.leading_minors().iter().all(Scalar::is_positive) {
        return Err(Error::Precondition("gram is not symmetric positive definite".into()));
    }
    let ginv = gram.inverse().expect("positive definite implies invertible");
    let f = v.fields();
    let gf: Vec<Mat> = f.iter().map(|x| &(gram * x) * &ginv).collect();
    Ok(Mat::from_fn(f.len(), f.len(), |k, l| {
        let (x, y) = (&f[k], &gf[l]);
        let mut acc = Scalar::zero();
        for i in 0..n {
            for j in 0..n {
                acc.add_mul(x.get(i, j), y.get(i, j));
            }
        }
        acc
    }))
}

pub fn orthogonal_projector(v: &VectorFieldSpace, asym: &AsymData, gram: &Mat) -> Result<ProjectorSpec> {
    let h = field_gram(v, gram)?;
    let k = h.kron(&h);
    let dim = k.rows();
    let map = if asym.asym.is_full() {
        Mat::identity(dim)
    } else if asym.asym.is_zero() {
        Mat::zeros(dim, dim)
    } else {
        let b = asym.asym.basis();
        let bk = b * &k;
        let inner = (&bk * &b.transpose())
            .inverse()
            .ok_or_else(|| Error::Consistency("restricted gram is singular".into()))?;
        &(&b.transpose() * &inner) * &bk
    };
    Ok(ProjectorSpec {
        map,
        kind: ProjectorKind::Orthogonal,
        gram: Some(k),
    })
}

/// `X ⊗ Y ↦ X ⊗ Y − Y ⊗ X`, not idempotent.
pub fn skew_projector(v: &VectorFieldSpace) -> ProjectorSpec {
    let m = v.dim();
    let mut map = Mat::identity(m * m);
    for k in 0..m {
        for l in 0..m {
            let entry = map.get(l * m + k, k * m + l) - Scalar::one();
            map.set(l * m + k, k * m + l, entry);
        }
    }
    ProjectorSpec {
        map,
        kind: ProjectorKind::Custom,
        gram: None,
    }
}

pub fn custom_projector(map: Mat) -> ProjectorSpec {
    ProjectorSpec {
        map,
        kind: ProjectorKind::Custom,
        gram: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket {
    pub value: Mat,
    /// Coordinates in the field basis, `None` when the value is not a
    /// vector field.
    pub coords: Option<Vec<Scalar>>,
}

/// `[X, Y] = c(℘(Y ⊗ X))` for basis fields `x`, `y`.
pub fn bracket(v: &VectorFieldSpace, x: usize, y: usize, p: &ProjectorSpec) -> Bracket {
    let m = v.dim();
    let col = p.map.col(y * m + x);
    let value = v.compose_c(&col);
    let coords = v.coords(&value);
    Bracket { value, coords }
}

pub fn bracket_table(v: &VectorFieldSpace, p: &ProjectorSpec) -> Vec<Vec<Bracket>> {
    (0..v.dim())
        .map(|x| (0..v.dim()).map(|y| bracket(v, x, y, p)).collect())
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LeibnizReport {
    pub checked: usize,
    /// `(field, a, b)` where `X(ab) ≠ aX(b) + (bX)(a)`.
    pub failures: Vec<(usize, usize, usize)>,
    /// Present when `A` is commutative and `Ω¹` is a symmetric bimodule:
    /// failures of `X(ab) = aX(b) + X(a)b`.
    pub classical_failures: Option<Vec<(usize, usize, usize)>>,
}

impl LeibnizReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.classical_failures.as_ref().is_none_or(Vec::is_empty)
    }
}

pub fn leibniz_check(v: &VectorFieldSpace) -> Result<LeibnizReport> {
    let a = v.algebra();
    let n = a.dim();
    let om = v.calculus().omega1();
    let commutative = a.is_commutative() && om.left()? == om.right()?;
    let mut report = LeibnizReport {
        classical_failures: commutative.then(Vec::new),
        ..Default::default()
    };
    for (k, x) in v.fields().iter().enumerate() {
        for b in 0..n {
            let bx = v.left_act(&a.basis(b), x)?;
            let xb = x.col(b);
            for ai in 0..n {
                let lhs = x.mul_vec(&a.basis_product(ai, b));
                let a_xb = a.left_mul(ai).mul_vec(&xb);
                let rhs = vec_add(&a_xb, &bx.col(ai));
                report.checked += 1;
                if lhs != rhs {
                    report.failures.push((k, ai, b));
                }
                if let Some(cf) = report.classical_failures.as_mut() {
                    let xa_b = a.right_mul(b).mul_vec(&x.col(ai));
                    if lhs != vec_add(&a_xb, &xa_b) {
                        cf.push((k, ai, b));
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Whether left and right actions agree on every basis field.
pub fn actions_coincide(v: &VectorFieldSpace) -> Result<bool> {
    Ok(v.module.left()? == v.module.right()?)
}

/// `vec_is_zero` re-exported for callers comparing pairing values.
pub fn is_zero(v: &[Scalar]) -> bool {
    vec_is_zero(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{clifford_algebra, cyclic_table, group_algebra, truncated_polynomial};
    use crate::calculus::{
        calculus_from_relations, kahler_commutators, maximal_prolongation, universal_calculus,
        zero_exterior2,
    };

    fn kahler(n: usize) -> Arc<Calculus> {
        let a = Arc::new(truncated_polynomial(n).unwrap());
        Arc::new(calculus_from_relations(&a, &kahler_commutators(&a)).unwrap())
    }

    fn monomial_field(n: usize, shift: usize) -> Mat {
        // x^{shift} ∂ : x^k ↦ k x^{k-1+shift}
        let mut m = Mat::zeros(n, n);
        for k in 1..n {
            let t = k - 1 + shift;
            if t < n {
                m.set(t, k, Scalar::from_int(k as i64));
            }
        }
        m
    }

    #[test]
    fn universal_z2_fields() {
        let a = Arc::new(group_algebra(&cyclic_table(2)).unwrap());
        let c = Arc::new(universal_calculus(&a).unwrap());
        let v = vector_fields(&c).unwrap();
        assert_eq!(v.dim(), 2);
        v.check_duality().unwrap();
        v.module().validate_exhaustive().unwrap();
        assert!(leibniz_check(&v).unwrap().passed());
    }

    #[test]
    fn kahler_fields_are_x_d_and_x2_d() {
        let c = kahler(3);
        let v = vector_fields(&c).unwrap();
        assert_eq!(v.dim(), 2);
        let xd = monomial_field(3, 1);
        let x2d = monomial_field(3, 2);
        assert!(v.contains(&xd) && v.contains(&x2d));
        let a = c.algebra();
        let dx = c.d().col(1);
        assert_eq!(v.interior(&dx, &xd).unwrap(), a.basis(1));
        assert!(actions_coincide(&v).unwrap());
        let rep = leibniz_check(&v).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn degenerate_calculus_has_no_fields() {
        let a = Arc::new(group_algebra(&cyclic_table(2)).unwrap());
        let u = universal_calculus(&a).unwrap();
        let c = Arc::new(calculus_from_relations(&a, &u.omega_u().vectors()).unwrap());
        assert_eq!(vector_fields(&c).unwrap().dim(), 0);
    }

    #[test]
    fn skew_bracket_matches_classical() {
        let c = kahler(3);
        let v = vector_fields(&c).unwrap();
        let x2 = maximal_prolongation(&c).unwrap();
        let asym_data = asym(&v, &x2).unwrap();
        let p = skew_projector(&v);
        p.validate(&asym_data).unwrap();
        let xd = v.coords(&monomial_field(3, 1)).unwrap();
        let x2d = v.coords(&monomial_field(3, 2)).unwrap();
        let x = xd.iter().position(|c| !c.is_zero()).unwrap();
        let y = x2d.iter().position(|c| !c.is_zero()).unwrap();
        let b = bracket(&v, x, y, &p);
        let expected = monomial_field(3, 2).scale(&(&x2d[y] * &xd[x]).recip().unwrap());
        assert_eq!(b.value, expected);
    }

    #[test]
    fn orthogonal_projector_contract() {
        let c = kahler(3);
        let v = vector_fields(&c).unwrap();
        for x2 in [maximal_prolongation(&c).unwrap(), zero_exterior2(&c).unwrap()] {
            let ad = asym(&v, &x2).unwrap();
            let p = orthogonal_projector(&v, &ad, &Mat::identity(3)).unwrap();
            p.validate(&ad).unwrap();
        }
    }

    #[test]
    fn symbol_of_composite_matches_pairing() {
        for n in [3, 4] {
            let c = kahler(n);
            let v = vector_fields(&c).unwrap();
            let x2 = maximal_prolongation(&c).unwrap();
            assert!(!x2.s2().is_zero());
            let m = v.dim();
            for k in 0..m * m {
                let mut xi = vec![Scalar::zero(); m * m];
                xi[k] = Scalar::one();
                assert!(v.check_symbol_pairing(&x2, &xi).unwrap(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn grams() {
        let z2 = group_algebra(&cyclic_table(2)).unwrap();
        assert!(canonical_gram(&z2, GramFamily::Group).unwrap().is_identity());
        assert!(canonical_gram(&z2, GramFamily::Clifford).is_err());
        let s = |n| Scalar::from_int(n);
        let c1 = clifford_algebra(&[s(2)]).unwrap();
        assert_eq!(canonical_gram(&c1, GramFamily::Clifford).unwrap(), Mat::diagonal(&[s(1), s(2)]));
        let c2 = clifford_algebra(&[s(1), s(1)]).unwrap();
        let g = canonical_gram(&c2, GramFamily::Clifford).unwrap();
        assert!(g.is_identity());
        assert_eq!(clifford_invariance(&c2, &g).unwrap(), vec![true, true]);
        let z = Mat::zeros(2, 2);
        let u = Arc::new(universal_calculus(&Arc::new(z2)).unwrap());
        let v = vector_fields(&u).unwrap();
        assert!(field_gram(&v, &z).is_err());
    }
}
